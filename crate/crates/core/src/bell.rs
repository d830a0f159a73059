//! Bell and contextuality correlation evaluators.
//!
//! Covers the nearest-neighbour cyclic correlation, the I3322 expression in
//! its ±1 form, the fixed-measurement resource monotone `max(0, I − B_c)`,
//! and the two I3322 Bell operators (0/1 projector form and ±1 form) together
//! with a randomized check of the affine identity that links them.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::qcore::{
    expectation_matrix, identity, is_hermitian, kron, max_abs, CMatrix, CVector, DensityMatrix, Ket, Observable,
    NORM_TOL, STRUCTURE_TOL,
};
use crate::{Error, Result};

/// Adjacent observables whose commutator norm exceeds this are flagged.
pub const COMMUTATOR_WARN: f64 = 1e-8;

/// Quantum and classical bounds used by the monogamy and exclusivity instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants;

impl BoundConstants {
    /// Quantum-minus-classical gap of the five-cycle correlation.
    pub const NU2: f64 = 0.9442;
    /// Bracket on the quantum-minus-classical gap of I3322 in ±1 form.
    pub const NU1_BRACKET: [f64; 2] = [1.0, 1.0034];
    /// Conservative default for that gap (lower end of the bracket).
    pub const NU1_DEFAULT: f64 = 1.0;
    /// Bracket on the quantum bound of the 0/1-form I3322 Bell operator.
    pub const BQV_BRACKET: [f64; 2] = [0.25, 0.25085];
    /// Classical bound of the ±1-form I3322 expression.
    pub const CLASSICAL_I3322: f64 = 4.0;

    /// Classical bound `s − 2` of the s-cycle correlation.
    pub fn classical_cyclic(s: usize) -> f64 {
        s as f64 - 2.0
    }
}

/// `s ≥ 3` ±1 observables on a common space and a state.
#[derive(Debug, Clone)]
pub struct CyclicScenario {
    observables: Vec<Observable>,
    state: DensityMatrix,
}

impl CyclicScenario {
    pub fn new(observables: Vec<Observable>, state: DensityMatrix) -> Result<Self> {
        if observables.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "cycle needs at least 3 observables, got {}",
                observables.len()
            )));
        }
        for (k, o) in observables.iter().enumerate() {
            if o.dim() != state.dim() {
                return Err(Error::Shape(format!(
                    "observable {k} has dimension {} but the state has {}",
                    o.dim(),
                    state.dim()
                )));
            }
            if !o.is_pm_one() {
                return Err(Error::InvalidObservable(format!("observable {k} is not ±1-valued")));
            }
        }
        Ok(Self { observables, state })
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Largest `‖[B_k, B_{k+1}]‖` (max entry) around the cycle.
    pub fn max_adjacent_commutator(&self) -> f64 {
        let s = self.observables.len();
        (0..s)
            .map(|k| {
                let a = self.observables[k].matrix();
                let b = self.observables[(k + 1) % s].matrix();
                max_abs(&(a * b - b * a))
            })
            .fold(0.0, f64::max)
    }

    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        Self::new(self.observables.clone(), state)
    }
}

fn symmetrized(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b + b * a).scale(0.5)
}

/// Operator whose expectation is the cyclic correlation.
pub fn cyclic_operator(observables: &[Observable]) -> CMatrix {
    let s = observables.len();
    let d = observables[0].dim();
    let mut op = CMatrix::zeros(d, d);
    for k in 0..s - 1 {
        op += symmetrized(observables[k].matrix(), observables[k + 1].matrix());
    }
    op -= symmetrized(observables[s - 1].matrix(), observables[0].matrix());
    op
}

/// `Σ_{k<s} ⟨B_k B_{k+1}⟩ − ⟨B_s B_1⟩`, with non-commuting neighbours
/// evaluated through the symmetrized product.
pub fn cyclic_correlation(scenario: &CyclicScenario) -> Result<f64> {
    expectation_matrix(&scenario.state, &cyclic_operator(&scenario.observables))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CyclicEvaluation {
    pub value: f64,
    pub max_adjacent_commutator: f64,
    /// False when some neighbouring pair fails to commute (above [`COMMUTATOR_WARN`]).
    pub compatible_neighbours: bool,
}

pub fn cyclic_correlation_checked(scenario: &CyclicScenario) -> Result<CyclicEvaluation> {
    let value = cyclic_correlation(scenario)?;
    let comm = scenario.max_adjacent_commutator();
    Ok(CyclicEvaluation {
        value,
        max_adjacent_commutator: comm,
        compatible_neighbours: comm <= COMMUTATOR_WARN,
    })
}

/// Bipartite I3322 scenario: three ±1 observables per side, state on `dA·dB`.
/// `b` holds the observables entering the expression as `B_1`, `B_4`, `B_6`.
#[derive(Debug, Clone)]
pub struct I3322Scenario {
    state: DensityMatrix,
    a: [Observable; 3],
    b: [Observable; 3],
}

impl I3322Scenario {
    pub fn new(state: DensityMatrix, a: [Observable; 3], b: [Observable; 3]) -> Result<Self> {
        let da = a[0].dim();
        let db = b[0].dim();
        for (side, obs, d) in [("A", &a, da), ("B", &b, db)] {
            for (k, o) in obs.iter().enumerate() {
                if o.dim() != d {
                    return Err(Error::Shape(format!("{side}{k} has dimension {} != {d}", o.dim())));
                }
                if !o.is_pm_one() {
                    return Err(Error::InvalidObservable(format!("{side}{k} is not ±1-valued")));
                }
            }
        }
        if state.dim() != da * db {
            return Err(Error::Shape(format!(
                "state dimension {} != {da}·{db}",
                state.dim()
            )));
        }
        Ok(Self { state, a, b })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        Self::new(state, self.a.clone(), self.b.clone())
    }

    /// The I3322 operator `⟨·⟩` is taken of.
    pub fn operator(&self) -> CMatrix {
        let [a1, a2, a3] = [self.a[0].matrix(), self.a[1].matrix(), self.a[2].matrix()];
        let [b1, b4, b6] = [self.b[0].matrix(), self.b[1].matrix(), self.b[2].matrix()];
        i3322_operator([a1, a2, a3], [b1, b4, b6])
    }
}

/// `B1 + B4 + A1 + A2 − B1A1 − B1A2 − B1A3 − B4A1 − B4A2 + B4A3 − B6A1 + B6A2`
/// with `A` acting on the first tensor factor.
fn i3322_operator(a: [&CMatrix; 3], b: [&CMatrix; 3]) -> CMatrix {
    let ia = identity(a[0].nrows());
    let ib = identity(b[0].nrows());
    let [a1, a2, a3] = a;
    let [b1, b4, b6] = b;
    kron(&ia, b1) + kron(&ia, b4) + kron(a1, &ib) + kron(a2, &ib)
        - kron(a1, b1)
        - kron(a2, b1)
        - kron(a3, b1)
        - kron(a1, b4)
        - kron(a2, b4)
        + kron(a3, b4)
        - kron(a1, b6)
        + kron(a2, b6)
}

pub fn i3322_correlation(scenario: &I3322Scenario) -> Result<f64> {
    expectation_matrix(&scenario.state, &scenario.operator())
}

/// Fixed-measurement lower bound on the resource monotone: `max(0, I − B_c)`.
pub fn monotone_value(correlation_value: f64, classical_bound: f64) -> f64 {
    (correlation_value - classical_bound).max(0.0)
}

fn check_projector(name: &str, p: &CMatrix) -> Result<()> {
    if !p.is_square() || !is_hermitian(p, NORM_TOL) {
        return Err(Error::InvalidObservable(format!("{name} is not a Hermitian square matrix")));
    }
    let gap = max_abs(&(p * p - p));
    if gap > STRUCTURE_TOL {
        return Err(Error::InvalidObservable(format!("{name} is not a projector (‖P²−P‖ = {gap:e})")));
    }
    Ok(())
}

fn check_pm_one(name: &str, o: &CMatrix) -> Result<()> {
    if !o.is_square() || !is_hermitian(o, NORM_TOL) {
        return Err(Error::InvalidObservable(format!("{name} is not a Hermitian square matrix")));
    }
    let gap = max_abs(&(o * o - identity(o.nrows())));
    if gap > STRUCTURE_TOL {
        return Err(Error::InvalidObservable(format!("{name} does not square to I (gap {gap:e})")));
    }
    Ok(())
}

fn check_sides(a: &[&CMatrix; 3], b: &[&CMatrix; 3]) -> Result<()> {
    let (da, db) = (a[0].nrows(), b[0].nrows());
    if a.iter().any(|m| m.nrows() != da) || b.iter().any(|m| m.nrows() != db) {
        return Err(Error::Shape("observables on one side differ in dimension".into()));
    }
    Ok(())
}

/// I3322 Bell operator over 0/1 projectors `A1..A3` (first factor) and
/// `B1, B4, B6` (second factor):
///
/// `−A2⊗I − I⊗B1 − 2 I⊗B4 + A1⊗B1 + A1⊗B4 + A2⊗B1 + A2⊗B4 − A1⊗B6 + A2⊗B6 − A3⊗B1 + A3⊗B4`.
pub fn build_vertesi_operator(a: [&CMatrix; 3], b: [&CMatrix; 3]) -> Result<CMatrix> {
    for (k, p) in a.iter().enumerate() {
        check_projector(&format!("A{}", k + 1), p)?;
    }
    for (name, p) in ["B1", "B4", "B6"].iter().zip(&b) {
        check_projector(name, p)?;
    }
    check_sides(&a, &b)?;
    let ia = identity(a[0].nrows());
    let ib = identity(b[0].nrows());
    let [a1, a2, a3] = a;
    let [b1, b4, b6] = b;
    Ok(-kron(a2, &ib) - kron(&ia, b1) - kron(&ia, b4).scale(2.0)
        + kron(a1, b1)
        + kron(a1, b4)
        + kron(a2, b1)
        + kron(a2, b4)
        - kron(a1, b6)
        + kron(a2, b6)
        - kron(a3, b1)
        + kron(a3, b4))
}

/// The relabeled ±1 observables `(A'1, A'2, A''3)` and `(B''1, B''4, B'6)`
/// where `X'' = −X'`.
fn relabel(a_prime: [&CMatrix; 3], b_prime: [&CMatrix; 3]) -> ([CMatrix; 3], [CMatrix; 3]) {
    (
        [a_prime[0].clone(), a_prime[1].clone(), -a_prime[2].clone()],
        [-b_prime[0].clone(), -b_prime[1].clone(), b_prime[2].clone()],
    )
}

/// I3322 Bell operator in ±1 form, built from primed observables
/// `A'1, A'2, A'3` and `B'1, B'4, B'6` after the outcome relabelings
/// `B''1 = −B'1`, `B''4 = −B'4`, `A''3 = −A'3`.
pub fn build_gamma_operator(a_prime: [&CMatrix; 3], b_prime: [&CMatrix; 3]) -> Result<CMatrix> {
    for (k, o) in a_prime.iter().enumerate() {
        check_pm_one(&format!("A'{}", k + 1), o)?;
    }
    for (name, o) in ["B'1", "B'4", "B'6"].iter().zip(&b_prime) {
        check_pm_one(name, o)?;
    }
    check_sides(&a_prime, &b_prime)?;
    let (a, b) = relabel(a_prime, b_prime);
    Ok(i3322_operator([&a[0], &a[1], &a[2]], [&b[0], &b[1], &b[2]]))
}

/// Scenario whose [`i3322_correlation`] is `⟨B^γ⟩_ρ` for the given primed observables.
pub fn gamma_scenario(state: DensityMatrix, a_prime: [&CMatrix; 3], b_prime: [&CMatrix; 3]) -> Result<I3322Scenario> {
    let (a, b) = relabel(a_prime, b_prime);
    let [a1, a2, a3] = a.map(Observable::pm_one);
    let [b1, b4, b6] = b.map(Observable::pm_one);
    I3322Scenario::new(state, [a1?, a2?, a3?], [b1?, b4?, b6?])
}

/// How projectors are drawn in [`operator_identity_residuals`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorSource {
    /// Rank-1 projectors onto Haar-random qubit kets.
    #[default]
    Random,
    /// Every projector is 0.
    Zero,
    /// Every projector is the identity.
    Identity,
}

fn haar_qubit_projector(rng: &mut ChaCha8Rng) -> CMatrix {
    let amps = CVector::from_fn(2, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        crate::qcore::c(re, im)
    });
    Ket::normalized(amps).expect("gaussian vector is nonzero").projector()
}

fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Residual `‖B^γ − 4B^v − 4I‖` (spectral norm) for one set of qubit projectors.
pub fn identity_residual(a: [&CMatrix; 3], b: [&CMatrix; 3]) -> Result<f64> {
    let bv = build_vertesi_operator(a, b)?;
    let to_pm = |p: &CMatrix| p.scale(2.0) - identity(p.nrows());
    let ap = a.map(to_pm);
    let bp = b.map(to_pm);
    let bg = build_gamma_operator([&ap[0], &ap[1], &ap[2]], [&bp[0], &bp[1], &bp[2]])?;
    let n = bg.nrows();
    Ok(spectral_norm(&(bg - bv.scale(4.0) - identity(n).scale(4.0))))
}

/// Per-trial residuals of the operator identity. Trial `k` draws from the
/// ChaCha stream `k` of `seed`, so trials are independent and reproducible.
pub fn operator_identity_residuals(seed: u64, trials: usize, source: ProjectorSource) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    (0..trials)
        .map(|k| {
            let projectors: Vec<CMatrix> = match source {
                ProjectorSource::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    (0..6).map(|_| haar_qubit_projector(&mut rng)).collect()
                }
                ProjectorSource::Zero => vec![DMatrix::zeros(2, 2); 6],
                ProjectorSource::Identity => vec![identity(2); 6],
            };
            identity_residual(
                [&projectors[0], &projectors[1], &projectors[2]],
                [&projectors[3], &projectors[4], &projectors[5]],
            )
        })
        .collect()
}

/// Largest residual of the operator identity over `trials` random draws.
pub fn verify_operator_identity(seed: u64, trials: usize) -> Result<f64> {
    Ok(operator_identity_residuals(seed, trials, ProjectorSource::Random)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Free operation: mix the state with a fixed state.
#[derive(Debug, Clone)]
pub struct MixingOperation {
    weight: f64,
    state: DensityMatrix,
}

impl MixingOperation {
    pub fn new(weight: f64, state: DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!("mixing weight {weight} outside [0,1]")));
        }
        Ok(Self { weight, state })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// `λ·ρ + (1 − λ)·σ`.
pub fn apply_mixing(rho: &DensityMatrix, op: &MixingOperation) -> Result<DensityMatrix> {
    rho.mix(&op.state, op.weight)
}

/// Enumerate every ±1 assignment of `n` variables.
pub fn sign_assignments(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0u32..(1 << n)).map(move |mask| (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
}

fn scalar_observable(v: f64) -> Observable {
    Observable::pm_one(CMatrix::from_element(1, 1, crate::qcore::c(v, 0.0))).expect("±1 scalar")
}

/// Maximum cyclic correlation over deterministic ±1 assignments, evaluated
/// through [`cyclic_correlation`] on one-dimensional observables.
pub fn deterministic_cyclic_max(s: usize) -> Result<f64> {
    let state = DensityMatrix::maximally_mixed(1)?;
    let mut best = f64::NEG_INFINITY;
    for signs in sign_assignments(s) {
        let obs = signs.iter().map(|&v| scalar_observable(v)).collect();
        best = best.max(cyclic_correlation(&CyclicScenario::new(obs, state.clone())?)?);
    }
    Ok(best)
}

/// Maximum I3322 value over deterministic ±1 assignments of the six observables.
pub fn deterministic_i3322_max() -> Result<f64> {
    let state = DensityMatrix::maximally_mixed(1)?;
    let mut best = f64::NEG_INFINITY;
    for signs in sign_assignments(6) {
        let o: Vec<Observable> = signs.iter().map(|&v| scalar_observable(v)).collect();
        let sc = I3322Scenario::new(
            state.clone(),
            [o[0].clone(), o[1].clone(), o[2].clone()],
            [o[3].clone(), o[4].clone(), o[5].clone()],
        )?;
        best = best.max(i3322_correlation(&sc)?);
    }
    Ok(best)
}
