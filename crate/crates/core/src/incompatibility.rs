//! Joint measurability and generalized robustness of small assemblies.
//!
//! Joint measurability asks for a parent POVM `{G_λ}` indexed by outcome
//! tuples `λ = (a_1, …, a_m)` whose marginals `Σ_{λ: λ_x = a} G_λ` reproduce
//! every `M_{a|x}`. Deterministic response functions are enough, so the parent
//! has `∏_x k_x` outcomes.
//!
//! Generalized robustness is the least `s ≥ 0` for which some assembly `N`
//! makes `(M + sN)/(1 + s)` jointly measurable. Scaling by `1 + s`, that is
//! feasibility of
//!
//! ```text
//! G_λ ⪰ 0,   Σ_λ G_λ = (1 + s) I,   Σ_{λ: λ_x = a} G_λ − S_{a|x} = M_{a|x},   S_{a|x} ⪰ 0
//! ```
//!
//! with `S = sN`. Both problems are an intersection of a product of PSD cones
//! with an affine subspace; we find a point by alternating projections and
//! bisect on `s`. Any approximately feasible PSD iterate is turned into an
//! exactly feasible certificate at a slightly larger `s` (see [`repair`]), so
//! the upper end of the returned bracket is always certified.

use nalgebra::DMatrix;

use crate::qcore::{hermitian_part, identity, max_abs, min_eigenvalue, project_psd, spectral_map, Assembly, CMatrix, ProductAssembly};
use crate::{Error, Result};

/// Largest Hilbert-space dimension accepted by the solvers.
pub const MAX_DIM: usize = 8;
/// Largest number of parent outcomes `∏_x k_x`.
pub const MAX_PARENT_OUTCOMES: usize = 64;
/// Largest number of settings.
pub const MAX_SETTINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Width of the final bisection bracket.
    pub tol: f64,
    /// Affine residual below which a PSD iterate counts as feasible.
    pub feasibility_tol: f64,
    pub max_iterations: usize,
    /// Upper end of the bisection interval.
    pub s_max: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            feasibility_tol: 1e-8,
            max_iterations: 50_000,
            s_max: 4.0,
        }
    }
}

/// Candidate parent POVM (scaled by `1 + s` in the robustness problem).
#[derive(Debug, Clone, PartialEq)]
pub struct ParentCandidate {
    /// Parent elements, one per entry of `outcome_tuples`.
    pub parent_elements: Vec<CMatrix>,
    /// `λ = (a_1, …, a_m)` for each parent element.
    pub outcome_tuples: Vec<Vec<usize>>,
    /// Largest constraint violation, see [`jm_violation`] and [`robustness_violation`].
    pub residual: f64,
}

impl ParentCandidate {
    /// `Σ_{λ: λ_x = a} G_λ`.
    pub fn marginal(&self, x: usize, a: usize) -> CMatrix {
        let d = self.parent_elements[0].nrows();
        self.parent_elements
            .iter()
            .zip(&self.outcome_tuples)
            .filter(|(_, t)| t[x] == a)
            .fold(CMatrix::zeros(d, d), |acc, (g, _)| acc + g)
    }
}

/// Outcome of a joint-measurability check.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasurability {
    pub compatible: bool,
    /// Best PSD iterate found; a certificate whenever `compatible`.
    pub candidate: ParentCandidate,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessResult {
    /// Certified robustness estimate (the upper end of the bracket).
    pub value: f64,
    pub bracket: (f64, f64),
    /// Parent elements `G̃_λ` feasible at `bracket.1`.
    pub certificate: ParentCandidate,
    pub bisection_steps: usize,
}

/// Largest violation of the joint-measurability constraints: negative
/// eigenvalues of the parent elements and marginal mismatches (max entry).
pub fn jm_violation(assembly: &Assembly, candidate: &ParentCandidate) -> f64 {
    let mut worst: f64 = 0.0;
    for g in &candidate.parent_elements {
        worst = worst.max(-min_eigenvalue(g));
    }
    for (x, povm) in assembly.povms().iter().enumerate() {
        for (a, m) in povm.elements().iter().enumerate() {
            worst = worst.max(max_abs(&(candidate.marginal(x, a) - m)));
        }
    }
    worst
}

/// Largest violation of the robustness constraints at `s`: negative
/// eigenvalues of `G̃_λ` and of `marginal − M_{a|x}`, and the mismatch of
/// `Σ_λ G̃_λ` against `(1 + s) I`.
pub fn robustness_violation(assembly: &Assembly, candidate: &ParentCandidate, s: f64) -> f64 {
    let d = assembly.dim();
    let mut worst: f64 = 0.0;
    let mut total = CMatrix::zeros(d, d);
    for g in &candidate.parent_elements {
        worst = worst.max(-min_eigenvalue(g));
        total += g;
    }
    worst = worst.max(max_abs(&(total - identity(d).scale(1.0 + s))));
    for (x, povm) in assembly.povms().iter().enumerate() {
        for (a, m) in povm.elements().iter().enumerate() {
            worst = worst.max(-min_eigenvalue(&(candidate.marginal(x, a) - m)));
        }
    }
    worst
}

fn check_caps(assembly: &Assembly) -> Result<Vec<Vec<usize>>> {
    if assembly.dim() > MAX_DIM {
        return Err(Error::CapExceeded(format!(
            "dimension {} exceeds {MAX_DIM}",
            assembly.dim()
        )));
    }
    if assembly.settings() > MAX_SETTINGS {
        return Err(Error::CapExceeded(format!(
            "{} settings exceed {MAX_SETTINGS}",
            assembly.settings()
        )));
    }
    let counts = assembly.outcome_counts();
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k).filter(|&t| t <= MAX_PARENT_OUTCOMES));
    if total.is_none() {
        return Err(Error::CapExceeded(format!(
            "parent outcome count ∏ {counts:?} exceeds {MAX_PARENT_OUTCOMES}"
        )));
    }
    Ok(outcome_tuples(&counts))
}

/// All outcome tuples, setting 0 most significant.
fn outcome_tuples(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut tuples = vec![Vec::new()];
    for &k in counts {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |a| {
                    let mut u = t.clone();
                    u.push(a);
                    u
                })
            })
            .collect();
    }
    tuples
}

/// The affine constraint set, written entrywise as `C z = r` over the stacked
/// variables `z = (G_λ…, S_{a|x}…)`.
struct AffineSet {
    dim: usize,
    n_parent: usize,
    /// rows × variables
    c: DMatrix<f64>,
    /// (C Cᵀ)⁺
    gram_pinv: DMatrix<f64>,
    targets: Vec<CMatrix>,
}

impl AffineSet {
    /// `scale = None` builds the joint-measurability constraints; `Some(s)`
    /// adds slacks and the normalization `Σ G = (1 + s) I`.
    fn new(assembly: &Assembly, tuples: &[Vec<usize>], scale: Option<f64>) -> Self {
        let d = assembly.dim();
        let n_parent = tuples.len();
        let counts = assembly.outcome_counts();
        let n_marg: usize = counts.iter().sum();
        let n_slack = if scale.is_some() { n_marg } else { 0 };
        let n_rows = n_marg + usize::from(scale.is_some());
        let mut c = DMatrix::<f64>::zeros(n_rows, n_parent + n_slack);
        let mut targets = Vec::with_capacity(n_rows);
        let mut row = 0;
        for (x, povm) in assembly.povms().iter().enumerate() {
            for (a, m) in povm.elements().iter().enumerate() {
                for (l, t) in tuples.iter().enumerate() {
                    if t[x] == a {
                        c[(row, l)] = 1.0;
                    }
                }
                if scale.is_some() {
                    c[(row, n_parent + row)] = -1.0;
                }
                targets.push(m.clone());
                row += 1;
            }
        }
        if let Some(s) = scale {
            for l in 0..n_parent {
                c[(row, l)] = 1.0;
            }
            targets.push(identity(d).scale(1.0 + s));
        }
        let gram = &c * c.transpose();
        let gram_pinv = gram.pseudo_inverse(1e-12).expect("pseudo-inverse of a real Gram matrix");
        Self {
            dim: d,
            n_parent,
            c,
            gram_pinv,
            targets,
        }
    }

    fn vars(&self) -> usize {
        self.c.ncols()
    }

    fn row_residuals(&self, z: &[CMatrix]) -> Vec<CMatrix> {
        (0..self.c.nrows())
            .map(|r| {
                let mut acc = -self.targets[r].clone();
                for (v, zv) in z.iter().enumerate() {
                    let k = self.c[(r, v)];
                    if k != 0.0 {
                        acc += zv.scale(k);
                    }
                }
                acc
            })
            .collect()
    }

    fn residual(&self, z: &[CMatrix]) -> f64 {
        self.row_residuals(z).iter().map(max_abs).fold(0.0, f64::max)
    }

    fn project(&self, z: &mut [CMatrix]) {
        let res = self.row_residuals(z);
        let rows = res.len();
        let w: Vec<CMatrix> = (0..rows)
            .map(|r| {
                let mut acc = CMatrix::zeros(self.dim, self.dim);
                for (q, rq) in res.iter().enumerate() {
                    let k = self.gram_pinv[(r, q)];
                    if k != 0.0 {
                        acc += rq.scale(k);
                    }
                }
                acc
            })
            .collect();
        for (v, zv) in z.iter_mut().enumerate() {
            for (r, wr) in w.iter().enumerate() {
                let k = self.c[(r, v)];
                if k != 0.0 {
                    *zv -= wr.scale(k);
                }
            }
        }
    }

    fn initial_point(&self, assembly: &Assembly, s: f64) -> Vec<CMatrix> {
        let d = self.dim;
        let mut z = vec![identity(d).scale((1.0 + s) / self.n_parent as f64); self.n_parent];
        for k in assembly.outcome_counts() {
            for _ in 0..k {
                if z.len() < self.vars() {
                    z.push(identity(d).scale(s / k as f64));
                }
            }
        }
        z
    }
}

enum Verdict {
    Feasible,
    Infeasible,
    Indeterminate,
}

struct RunOutcome {
    verdict: Verdict,
    /// Final PSD point.
    psd_point: Vec<CMatrix>,
    residual: f64,
    iterations: usize,
}

const CHECK_EVERY: usize = 50;
const STALL_WINDOW: usize = 2_000;

/// Alternating projections between the PSD cones and the affine set.
fn alternate(set: &AffineSet, mut z: Vec<CMatrix>, opts: &SolverOptions) -> RunOutcome {
    let tol = opts.feasibility_tol;
    let mut last_window = f64::INFINITY;
    let mut psd: Vec<CMatrix> = z.iter().map(|m| project_psd(&hermitian_part(m))).collect();
    let mut residual = set.residual(&psd);
    let mut it = 0;
    while it < opts.max_iterations {
        if residual <= tol {
            return RunOutcome {
                verdict: Verdict::Feasible,
                psd_point: psd,
                residual,
                iterations: it,
            };
        }
        z.clone_from(&psd);
        set.project(&mut z);
        psd = z.iter().map(project_psd).collect();
        it += 1;
        if it % CHECK_EVERY == 0 {
            residual = set.residual(&psd);
        }
        if it % STALL_WINDOW == 0 {
            // disjoint sets: the residual settles at the positive gap
            if residual > 1e3 * tol && residual > last_window * (1.0 - 1e-3) {
                return RunOutcome {
                    verdict: Verdict::Infeasible,
                    psd_point: psd,
                    residual,
                    iterations: it,
                };
            }
            last_window = residual;
        }
    }
    residual = set.residual(&psd);
    let verdict = if residual <= tol {
        Verdict::Feasible
    } else if residual >= 10.0 * tol {
        Verdict::Infeasible
    } else {
        Verdict::Indeterminate
    };
    RunOutcome {
        verdict,
        psd_point: psd,
        residual,
        iterations: it,
    }
}

/// Decide joint measurability of `assembly`. `tol` is the residual tolerance
/// on the marginal constraints.
pub fn joint_measurability_feasible(assembly: &Assembly, tol: f64) -> Result<JointMeasurability> {
    let opts = SolverOptions {
        feasibility_tol: tol,
        ..SolverOptions::default()
    };
    joint_measurability_with(assembly, &opts)
}

pub fn joint_measurability_with(assembly: &Assembly, opts: &SolverOptions) -> Result<JointMeasurability> {
    let tuples = check_caps(assembly)?;
    let set = AffineSet::new(assembly, &tuples, None);
    let start = set.initial_point(assembly, 0.0);
    let run = alternate(&set, start, opts);
    let candidate = |run: &RunOutcome| ParentCandidate {
        parent_elements: run.psd_point[..set.n_parent].to_vec(),
        outcome_tuples: tuples.clone(),
        residual: run.residual,
    };
    match run.verdict {
        Verdict::Feasible => Ok(JointMeasurability {
            compatible: true,
            candidate: candidate(&run),
            iterations: run.iterations,
        }),
        Verdict::Infeasible => Ok(JointMeasurability {
            compatible: false,
            candidate: candidate(&run),
            iterations: run.iterations,
        }),
        Verdict::Indeterminate => Err(Error::Indeterminate {
            residual: run.residual,
            iterations: run.iterations,
        }),
    }
}

/// Turn PSD parent elements that nearly satisfy the robustness constraints
/// at `s` into an exactly feasible set at some `s' ≥ s`.
///
/// The elements are first congruence-normalized so that they sum to
/// `(1 + s) I`. If a marginal then undershoots `M_{a|x}` by at most `δ` in
/// eigenvalue, adding `c I` with `c = δ·k_max/n` to every element lifts each
/// marginal by at least `δ` and the total by `δ·k_max`, giving `s' = s + δ·k_max`.
pub fn repair(assembly: &Assembly, parents: &[CMatrix], tuples: &[Vec<usize>], s: f64) -> Option<(f64, Vec<CMatrix>)> {
    let d = assembly.dim();
    let n = parents.len();
    let total = parents.iter().fold(CMatrix::zeros(d, d), |acc, g| acc + g);
    if min_eigenvalue(&total) <= 1e-12 {
        return None;
    }
    let inv_sqrt = spectral_map(&total, |x| 1.0 / x.sqrt());
    let norm = 1.0 + s;
    let mut g: Vec<CMatrix> = parents
        .iter()
        .map(|p| hermitian_part(&(&inv_sqrt * p * &inv_sqrt)).scale(norm))
        .collect();

    let candidate = ParentCandidate {
        parent_elements: g.clone(),
        outcome_tuples: tuples.to_vec(),
        residual: 0.0,
    };
    let mut delta: f64 = 0.0;
    for (x, povm) in assembly.povms().iter().enumerate() {
        for (a, m) in povm.elements().iter().enumerate() {
            delta = delta.max(-min_eigenvalue(&(candidate.marginal(x, a) - m)));
        }
    }
    // margin for rounding in the eigenvalue computations
    let delta = delta.max(0.0) + 1e-13;
    let k_max = assembly.outcome_counts().into_iter().max().unwrap_or(1) as f64;
    let lift = delta * k_max / n as f64;
    for gl in &mut g {
        *gl += identity(d).scale(lift);
    }
    Some((s + delta * k_max, g))
}

/// Generalized robustness by bisection on `s ∈ [0, s_max]`.
pub fn generalized_robustness(assembly: &Assembly, tol: f64) -> Result<RobustnessResult> {
    generalized_robustness_with(
        assembly,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn generalized_robustness_with(assembly: &Assembly, opts: &SolverOptions) -> Result<RobustnessResult> {
    let tuples = check_caps(assembly)?;

    // compatible assemblies have zero robustness
    let jm = match joint_measurability_with(assembly, opts) {
        Ok(jm) => Some(jm),
        Err(Error::Indeterminate { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(jm) = jm.filter(|j| j.compatible) {
        return Ok(RobustnessResult {
            value: 0.0,
            bracket: (0.0, 0.0),
            certificate: jm.candidate,
            bisection_steps: 0,
        });
    }

    let mut warm: Option<Vec<CMatrix>> = None;
    let attempt = |s: f64, warm: &mut Option<Vec<CMatrix>>| -> (bool, Option<(f64, Vec<CMatrix>)>) {
        let set = AffineSet::new(assembly, &tuples, Some(s));
        let start = warm.take().unwrap_or_else(|| set.initial_point(assembly, s));
        let run = alternate(&set, start, opts);
        let repaired = repair(assembly, &run.psd_point[..set.n_parent], &tuples, s);
        let feasible = matches!(run.verdict, Verdict::Feasible);
        *warm = Some(run.psd_point);
        (feasible, repaired)
    };

    let (_, top) = attempt(opts.s_max, &mut warm);
    let Some((s_top, g_top)) = top.filter(|(s, _)| *s <= opts.s_max + opts.tol) else {
        return Err(Error::CapExceeded(format!(
            "no certificate at s_max = {}; raise s_max",
            opts.s_max
        )));
    };
    let mut hi = s_top.min(opts.s_max);
    let mut best = g_top;
    let mut lo = 0.0f64;
    let mut steps = 0;
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        let (feasible, repaired) = attempt(mid, &mut warm);
        steps += 1;
        if let Some((s_cert, g)) = repaired {
            if s_cert < hi {
                hi = s_cert;
                best = g;
            }
        }
        if !feasible {
            lo = lo.max(mid.min(hi));
        }
    }

    let mut certificate = ParentCandidate {
        parent_elements: best,
        outcome_tuples: tuples,
        residual: 0.0,
    };
    certificate.residual = robustness_violation(assembly, &certificate, hi);
    Ok(RobustnessResult {
        value: hi,
        bracket: (lo, hi),
        certificate,
        bisection_steps: steps,
    })
}

/// `(√D − 1)/(√D + 1)`: robustness of a pair of unbiased bases in dimension `D`.
pub fn closed_form_mub_robustness(total_dim: usize) -> f64 {
    let r = (total_dim as f64).sqrt();
    (r - 1.0) / (r + 1.0)
}

/// Robustness of the restriction of a product assembly to the sites in `edge`,
/// optionally depolarized with visibility `eta` on the composite system.
pub fn edge_robustness(pa: &ProductAssembly, edge: &[usize], eta: f64, opts: &SolverOptions) -> Result<RobustnessResult> {
    let reduced = crate::qcore::reduce_assembly(pa, edge)?.expand()?;
    let noisy = if eta < 1.0 { reduced.depolarized(eta)? } else { reduced };
    generalized_robustness_with(&noisy, opts)
}
