//! Complex linear algebra and quantum objects.
//!
//! Everything here is dense: matrices are `nalgebra::DMatrix<Complex<f64>>` and
//! composite systems are ordered with site 0 as the most significant tensor
//! factor, matching `Matrix::kronecker`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for structural checks (Hermiticity of POVM elements, PSD, completeness).
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Tolerance for norms and traces.
pub const NORM_TOL: f64 = 1e-12;
/// Largest total Hilbert-space dimension any construction will expand to.
pub const MAX_DIM: usize = 4096;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Eigen-decomposition of the Hermitian part of `m`: real eigenvalues and
/// eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rebuild `V diag(f(λ)) V†` from a Hermitian eigendecomposition.
pub fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let w = f(vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    &scaled * vecs.adjoint()
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    spectral_map(m, |x| x.max(0.0))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Re Tr(a b) without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

fn product(dims: &[usize]) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::InvalidDimension("site dimension 0".into()));
        }
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_DIM)
            .ok_or_else(|| Error::InvalidDimension(format!("total dimension exceeds {MAX_DIM}")))?;
    }
    Ok(total)
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: CVector,
}

impl Ket {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("empty ket".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("ket norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` instead of rejecting them.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidDimension(format!("basis index {k} out of range for d={d}")));
        }
        let mut v = CVector::zeros(d);
        v[k] = c(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Multiply by a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Ket {
        Ket {
            amplitudes: self.amplitudes.map(|z| z * C64::from_polar(1.0, theta)),
        }
    }
}

/// A unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Shape(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_hermitian(&matrix, NORM_TOL) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let lo = min_eigenvalue(&matrix);
        if lo < -STRUCTURE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn from_ket(ket: &Ket) -> Self {
        Self {
            matrix: ket.projector(),
        }
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension("d = 0".into()));
        }
        Ok(Self {
            matrix: identity(d).unscale(d as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "cannot mix states of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w} outside [0,1]")));
        }
        Ok(DensityMatrix {
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
        })
    }
}

/// A finite list of positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(elements, STRUCTURE_TOL)
    }

    pub fn with_tolerance(elements: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidDimension("POVM of dimension 0".into()));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (a, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::Shape(format!("element {a} is not {dim}x{dim}")));
            }
            if !is_hermitian(e, tol) {
                return Err(Error::InvalidPovm(format!("element {a} is not Hermitian")));
            }
            let lo = min_eigenvalue(e);
            if lo < -tol {
                return Err(Error::InvalidPovm(format!("element {a} has eigenvalue {lo:e}")));
            }
            sum += e;
        }
        let gap = max_abs(&(sum - identity(dim)));
        if gap > tol {
            return Err(Error::InvalidPovm(format!("elements miss identity by {gap:e}")));
        }
        Ok(Self { dim, elements })
    }

    /// Rank-1 projective measurement onto an orthonormal basis.
    pub fn from_basis(basis: &[Ket]) -> Result<Self> {
        Self::new(basis.iter().map(Ket::projector).collect())
    }

    /// Single-outcome measurement `{I}`.
    pub fn trivial(d: usize) -> Result<Self> {
        Self::new(vec![identity(d)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Outcome probabilities `Tr(M_a ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::Shape(format!(
                "state dimension {} vs POVM dimension {}",
                rho.dim(),
                self.dim
            )));
        }
        Ok(self
            .elements
            .iter()
            .map(|e| trace_product_re(e, rho.matrix()))
            .collect())
    }
}

/// An indexed family of POVMs on a common space, one per setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    dim: usize,
    povms: Vec<Povm>,
}

impl Assembly {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        let Some(first) = povms.first() else {
            return Err(Error::InvalidPovm("assembly needs at least one setting".into()));
        };
        let dim = first.dim();
        if let Some(x) = povms.iter().position(|p| p.dim() != dim) {
            return Err(Error::Shape(format!("setting {x} has dimension {} != {dim}", povms[x].dim())));
        }
        Ok(Self { dim, povms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn settings(&self) -> usize {
        self.povms.len()
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn povm(&self, x: usize) -> &Povm {
        &self.povms[x]
    }

    /// Outcome counts per setting.
    pub fn outcome_counts(&self) -> Vec<usize> {
        self.povms.iter().map(Povm::outcomes).collect()
    }

    /// Element-wise map `M_{a|x} ↦ f(x, a, M_{a|x})`, revalidated.
    pub fn map_elements(&self, f: impl Fn(usize, usize, &CMatrix) -> CMatrix) -> Result<Assembly> {
        let povms = self
            .povms
            .iter()
            .enumerate()
            .map(|(x, p)| {
                Povm::new(
                    p.elements()
                        .iter()
                        .enumerate()
                        .map(|(a, e)| f(x, a, e))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Assembly::new(povms)
    }

    /// `w·M_{a|x} + (1−w)·I/d`: mixing each element with white noise.
    pub fn depolarized(&self, w: f64) -> Result<Assembly> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("visibility {w} outside [0,1]")));
        }
        let noise = identity(self.dim).unscale(self.dim as f64);
        self.map_elements(|_, _, e| e.scale(w) + noise.scale(1.0 - w))
    }

    /// `w·M_{a|x} + (1−w)·I/k_x`: mixing with the trivial assembly that ignores the system.
    pub fn mixed_with_trivial(&self, w: f64) -> Result<Assembly> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w} outside [0,1]")));
        }
        let counts = self.outcome_counts();
        let dim = self.dim;
        self.map_elements(|x, _, e| e.scale(w) + identity(dim).scale((1.0 - w) / counts[x] as f64))
    }
}

/// Tensor product of per-site assemblies with a common number of settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAssembly {
    site_dims: Vec<usize>,
    site_assemblies: Vec<Assembly>,
}

impl ProductAssembly {
    pub fn new(site_assemblies: Vec<Assembly>) -> Result<Self> {
        let Some(first) = site_assemblies.first() else {
            return Err(Error::InvalidEdge("product assembly needs at least one site".into()));
        };
        let m = first.settings();
        if let Some(k) = site_assemblies.iter().position(|a| a.settings() != m) {
            return Err(Error::Shape(format!(
                "site {k} has {} settings, expected {m}",
                site_assemblies[k].settings()
            )));
        }
        let site_dims: Vec<usize> = site_assemblies.iter().map(Assembly::dim).collect();
        product(&site_dims)?;
        Ok(Self {
            site_dims,
            site_assemblies,
        })
    }

    pub fn sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn site_assemblies(&self) -> &[Assembly] {
        &self.site_assemblies
    }

    pub fn total_dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    /// Expand to a single assembly on the composite space. Outcome tuples are
    /// ordered lexicographically with site 0 most significant.
    pub fn expand(&self) -> Result<Assembly> {
        let m = self.site_assemblies[0].settings();
        let povms = (0..m)
            .map(|x| {
                let mut elements = vec![identity(1)];
                for site in &self.site_assemblies {
                    let mut next = Vec::with_capacity(elements.len() * site.povm(x).outcomes());
                    for e in &elements {
                        for f in site.povm(x).elements() {
                            next.push(kron(e, f));
                        }
                    }
                    elements = next;
                }
                Povm::new(elements)
            })
            .collect::<Result<Vec<_>>>()?;
        Assembly::new(povms)
    }
}

/// A Hermitian observable with its list of outcome values.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    outcome_values: Vec<f64>,
}

impl Observable {
    /// A ±1-valued observable: Hermitian with `O² = I`.
    pub fn pm_one(matrix: CMatrix) -> Result<Self> {
        if !is_hermitian(&matrix, NORM_TOL) {
            return Err(Error::InvalidObservable("matrix is not Hermitian".into()));
        }
        let d = matrix.nrows();
        let gap = max_abs(&(&matrix * &matrix - identity(d)));
        if gap > STRUCTURE_TOL {
            return Err(Error::InvalidObservable(format!("O² differs from I by {gap:e}")));
        }
        Ok(Self {
            matrix,
            outcome_values: vec![-1.0, 1.0],
        })
    }

    /// A 0/1-valued observable, i.e. a projector.
    pub fn projector(matrix: CMatrix) -> Result<Self> {
        if !is_hermitian(&matrix, NORM_TOL) {
            return Err(Error::InvalidObservable("matrix is not Hermitian".into()));
        }
        let gap = max_abs(&(&matrix * &matrix - &matrix));
        if gap > STRUCTURE_TOL {
            return Err(Error::InvalidObservable(format!("P² differs from P by {gap:e}")));
        }
        Ok(Self {
            matrix,
            outcome_values: vec![0.0, 1.0],
        })
    }

    /// `Σ_k o_k O_k` from orthogonal spectral projectors and their values.
    pub fn from_spectral(projectors: &[CMatrix], values: &[f64]) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != values.len() {
            return Err(Error::Shape("need one value per projector".into()));
        }
        let d = projectors[0].nrows();
        let povm = Povm::new(projectors.to_vec())?;
        let mut matrix = CMatrix::zeros(d, d);
        for (p, &v) in povm.elements().iter().zip(values) {
            matrix += p.scale(v);
        }
        let mut outcome_values = values.to_vec();
        outcome_values.sort_by(f64::total_cmp);
        outcome_values.dedup();
        Ok(Self {
            matrix,
            outcome_values,
        })
    }

    /// The identity, read as a ±1 observable that always returns +1.
    pub fn identity(d: usize) -> Self {
        Self {
            matrix: identity(d),
            outcome_values: vec![-1.0, 1.0],
        }
    }

    pub fn pauli_x() -> Self {
        Self::pm_one(CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]))
            .expect("σx")
    }

    pub fn pauli_y() -> Self {
        Self::pm_one(CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]))
            .expect("σy")
    }

    pub fn pauli_z() -> Self {
        Self::pm_one(CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]))
            .expect("σz")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn outcome_values(&self) -> &[f64] {
        &self.outcome_values
    }

    pub fn is_pm_one(&self) -> bool {
        self.outcome_values == [-1.0, 1.0]
    }

    /// Outcome relabeling `o ↦ −o`.
    pub fn negated(&self) -> Self {
        let mut outcome_values: Vec<f64> = self.outcome_values.iter().map(|v| -v).collect();
        outcome_values.sort_by(f64::total_cmp);
        Self {
            matrix: -self.matrix.clone(),
            outcome_values,
        }
    }
}

/// `d` kets with amplitudes `ω^{jk}/√d`, `ω = e^{2πi/d}`.
pub fn fourier_basis(d: usize) -> Result<Vec<Ket>> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("Fourier basis needs d >= 2, got {d}")));
    }
    let norm = (d as f64).sqrt();
    Ok((0..d)
        .map(|j| {
            let v = CVector::from_fn(d, |k, _| {
                let phase = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
                C64::from_polar(1.0 / norm, phase)
            });
            Ket { amplitudes: v }
        })
        .collect())
}

pub fn computational_basis(d: usize) -> Result<Vec<Ket>> {
    if d < 1 {
        return Err(Error::InvalidDimension("d = 0".into()));
    }
    (0..d).map(|k| Ket::basis(d, k)).collect()
}

/// Two-setting assembly: computational basis (setting 0) and Fourier basis (setting 1).
pub fn mub_pair_assembly(d: usize) -> Result<Assembly> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("MUB pair needs d >= 2, got {d}")));
    }
    Assembly::new(vec![
        Povm::from_basis(&computational_basis(d)?)?,
        Povm::from_basis(&fourier_basis(d)?)?,
    ])
}

/// `n` tensor copies of [`mub_pair_assembly`]: two product unbiased bases on `d^n`.
pub fn product_assembly(n: usize, d: usize) -> Result<ProductAssembly> {
    if n < 1 {
        return Err(Error::InvalidDimension("product assembly needs N >= 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(format!("product assembly needs d >= 2, got {d}")));
    }
    product(&vec![d; n])?;
    let site = mub_pair_assembly(d)?;
    ProductAssembly::new(vec![site; n])
}

/// Restrict a product assembly to the sites in `keep` (0-based, treated as a set).
pub fn reduce_assembly(pa: &ProductAssembly, keep: &[usize]) -> Result<ProductAssembly> {
    let keep = normalize_subset(keep, pa.sites())?;
    ProductAssembly::new(keep.iter().map(|&k| pa.site_assemblies[k].clone()).collect())
}

fn normalize_subset(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidEdge("empty subset".into()));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidEdge(format!("site {k} out of range for {n} sites")));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    Ok(keep)
}

/// Partial trace of an arbitrary square matrix over the sites not in `keep`.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if dims.is_empty() {
        return Err(Error::Shape("no subsystem dimensions".into()));
    }
    let total = product(dims).map_err(|e| Error::Shape(e.to_string()))?;
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Shape(format!(
            "matrix is {}x{} but dims multiply to {total}",
            m.nrows(),
            m.ncols()
        )));
    }
    let keep = normalize_subset(keep, dims.len())?;
    let kept: usize = keep.iter().map(|&k| dims[k]).product();

    // split every composite index into (kept part, traced part)
    let mut split = Vec::with_capacity(total);
    for i in 0..total {
        let mut rem = i;
        let mut digits = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let (mut ki, mut ti) = (0usize, 0usize);
        for (s, &dgt) in digits.iter().enumerate() {
            if keep.binary_search(&s).is_ok() {
                ki = ki * dims[s] + dgt;
            } else {
                ti = ti * dims[s] + dgt;
            }
        }
        split.push((ki, ti));
    }

    let mut out = CMatrix::zeros(kept, kept);
    for i in 0..total {
        let (ki, ti) = split[i];
        for j in 0..total {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix {
        matrix: partial_trace_matrix(rho.matrix(), dims, keep)?,
    })
}

/// Checks the unbiasedness condition: same-basis overlaps `|⟨a|a'⟩|² = δ` and
/// cross overlaps `|⟨a|b⟩|² = 1/D`, each within `tol`.
pub fn is_unbiased_pair(basis_a: &[Ket], basis_b: &[Ket], dim: usize, tol: f64) -> bool {
    let ok_len = |b: &[Ket]| b.len() == dim && b.iter().all(|k| k.dim() == dim);
    if dim == 0 || !ok_len(basis_a) || !ok_len(basis_b) {
        return false;
    }
    let target = 1.0 / dim as f64;
    let within = |basis: &[Ket]| {
        basis.iter().enumerate().all(|(i, u)| {
            basis
                .iter()
                .enumerate()
                .all(|(j, v)| (u.inner(v).norm_sqr() - if i == j { 1.0 } else { 0.0 }).abs() <= tol)
        })
    };
    let cross = basis_a
        .iter()
        .all(|u| basis_b.iter().all(|v| (u.inner(v).norm_sqr() - target).abs() <= tol));
    within(basis_a) && within(basis_b) && cross
}

/// Projector form of [`is_unbiased_pair`]: overlaps are read as `Tr(P Q)`.
pub fn is_unbiased_povm_pair(a: &Povm, b: &Povm, dim: usize, tol: f64) -> bool {
    if a.dim() != dim || b.dim() != dim || a.outcomes() != dim || b.outcomes() != dim {
        return false;
    }
    let target = 1.0 / dim as f64;
    let within = |p: &Povm| {
        p.elements().iter().enumerate().all(|(i, x)| {
            p.elements()
                .iter()
                .enumerate()
                .all(|(j, y)| (trace_product_re(x, y) - if i == j { 1.0 } else { 0.0 }).abs() <= tol)
        })
    };
    let cross = a
        .elements()
        .iter()
        .all(|x| b.elements().iter().all(|y| (trace_product_re(x, y) - target).abs() <= tol));
    within(a) && within(b) && cross
}

/// `⟨O⟩_ρ = Tr(O ρ)`.
pub fn expectation(rho: &DensityMatrix, obs: &Observable) -> Result<f64> {
    expectation_matrix(rho, obs.matrix())
}

/// `Re Tr(O ρ)` for an arbitrary square operator.
pub fn expectation_matrix(rho: &DensityMatrix, op: &CMatrix) -> Result<f64> {
    if op.nrows() != rho.dim() || op.ncols() != rho.dim() {
        return Err(Error::Shape(format!(
            "operator is {}x{} but state has dimension {}",
            op.nrows(),
            op.ncols(),
            rho.dim()
        )));
    }
    Ok(trace_product_re(op, rho.matrix()))
}
