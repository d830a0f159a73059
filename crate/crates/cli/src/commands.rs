//! The four subcommands. Each returns the results section of a report and
//! the tolerances it used.

use qalloc_core::allocation::{
    fairness_dominance, performance_fairness, performance_reliability, theorem1_allocation, AllocationList,
    Hypergraph, Priors,
};
use qalloc_core::bell::{operator_identity_residuals, BoundConstants, ProjectorSource};
use qalloc_core::equitability::{
    exclusivity_problem, lexicographic_maxmin, monogamy_problem, EquitableSolution,
};
use qalloc_core::incompatibility::{closed_form_mub_robustness, generalized_robustness_with, SolverOptions};
use qalloc_core::qcore::{c, mub_pair_assembly, product_assembly, reduce_assembly, Assembly, CMatrix, Povm};
use serde_json::{json, Map, Value};

use crate::problem::{
    AllocationProblem, AssemblySpec, BellVerifyProblem, Builder, EquitableProblem, Entry, MatrixSpec, Objective,
    RobustnessProblem,
};
use crate::CliError;

pub struct Outcome {
    pub results: Value,
    pub tolerances: Map<String, Value>,
    /// Exit status when the run completed but its check failed.
    pub failed_check: bool,
}

fn tolerances(pairs: &[(&str, f64)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()
}

pub fn allocate(p: &AllocationProblem) -> Result<Outcome, CliError> {
    let h = Hypergraph::new(&p.hypergraph.vertices, &p.hypergraph.edges).map_err(|e| CliError::at("hypergraph", e))?;
    let alloc = theorem1_allocation(&h, p.d).map_err(|e| CliError::at("d", e))?;
    let priors = p
        .priors
        .clone()
        .map(Priors::new)
        .transpose()
        .map_err(|e| CliError::at("priors", e))?;
    let objectives = if p.objectives.is_empty() {
        let mut o = vec![Objective::Fairness];
        if priors.is_some() {
            o.push(Objective::Reliability);
        }
        o
    } else {
        p.objectives.clone()
    };
    if objectives.contains(&Objective::Reliability) && priors.is_none() {
        return Err(CliError::schema("priors", "required for the reliability objective"));
    }

    let score = |a: &AllocationList| -> Result<Map<String, Value>, CliError> {
        let mut m = Map::new();
        for o in &objectives {
            match o {
                Objective::Fairness => {
                    m.insert("fairness".into(), json!(performance_fairness(a).map_err(|e| CliError::at("compare", e))?));
                }
                Objective::Reliability => {
                    let pr = priors.as_ref().expect("checked above");
                    let v = performance_reliability(&h, a, pr).map_err(|e| CliError::at("priors", e))?;
                    m.insert("reliability".into(), json!(v));
                }
            }
        }
        Ok(m)
    };

    let edges: Vec<Value> = alloc
        .entries
        .iter()
        .map(|e| json!({"edge": e.edge, "size": e.edge.len(), "value": e.value}))
        .collect();
    let mut results = json!({
        "edges": edges,
        "performance": score(&alloc)?,
    });
    if let Some(values) = &p.compare {
        let other = AllocationList::from_values(&h, values).map_err(|e| CliError::at("compare", e))?;
        let dominance = fairness_dominance(&alloc, &other).map_err(|e| CliError::at("compare", e))?;
        results["compare"] = json!({
            "values": values,
            "performance": score(&other)?,
            "fairness_dominance": dominance,
        });
    }
    Ok(Outcome {
        results,
        tolerances: Map::new(),
        failed_check: false,
    })
}

fn solution_json(s: &EquitableSolution) -> Value {
    json!({
        "values": s.values,
        "elimination_order": s.elimination_order,
        "stage_values": s.stage_values,
    })
}

pub fn equitable(p: &EquitableProblem) -> Result<Outcome, CliError> {
    let problem = match (&p.problem, &p.builder) {
        (Some(k), None) => k.clone(),
        (None, Some(Builder::Monogamy { lambda, nu1, nu2 })) => monogamy_problem(
            *lambda,
            nu1.unwrap_or(BoundConstants::NU1_DEFAULT),
            nu2.unwrap_or(BoundConstants::NU2),
        )
        .map_err(|e| CliError::at("builder", e))?,
        (None, Some(Builder::Exclusivity { gap_n, gap_m })) => {
            exclusivity_problem(*gap_n, *gap_m).map_err(|e| CliError::at("builder", e))?
        }
        (Some(_), Some(_)) => return Err(CliError::schema("builder", "give either `problem` or `builder`, not both")),
        (None, None) => return Err(CliError::schema("problem", "missing; give `problem` or `builder`")),
    };
    let solution = lexicographic_maxmin(&problem).map_err(|e| CliError::at("problem", e))?;
    let mut results = solution_json(&solution);
    results["tied"] = Value::Array(solution.tied.iter().map(solution_json).collect());
    results["instance"] = serde_json::to_value(&problem).map_err(CliError::internal)?;
    Ok(Outcome {
        results,
        tolerances: tolerances(&[("feasibility", qalloc_core::equitability::FEAS_TOL)]),
        failed_check: false,
    })
}

fn matrix(spec: &MatrixSpec, path: &str) -> Result<CMatrix, CliError> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|r| r.len() != n) {
        return Err(CliError::schema(path, "matrix must be square and non-empty"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| match spec[i][j] {
        Entry::Real(x) => c(x, 0.0),
        Entry::Complex([re, im]) => c(re, im),
    }))
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

/// The assembly and, for unbiased-basis families without noise, the total dimension.
fn build_assembly(spec: &AssemblySpec) -> Result<(Assembly, Option<usize>), CliError> {
    let at = |e| CliError::at("assembly", e);
    match spec {
        AssemblySpec::MubPair { d, visibility } => {
            let a = mub_pair_assembly(*d).map_err(at)?;
            let noisy = a.depolarized(*visibility).map_err(at)?;
            Ok((noisy, (*visibility == 1.0).then_some(*d)))
        }
        AssemblySpec::ProductMub {
            sites,
            d,
            keep,
            visibility,
        } => {
            let pa = product_assembly(*sites, *d).map_err(at)?;
            let keep = keep.clone().unwrap_or_else(|| (0..*sites).collect());
            let reduced = reduce_assembly(&pa, &keep).map_err(|e| CliError::at("assembly.keep", e))?;
            let total = reduced.total_dim();
            let a = reduced.expand().map_err(at)?.depolarized(*visibility).map_err(at)?;
            Ok((a, (*visibility == 1.0).then_some(total)))
        }
        AssemblySpec::Explicit { povms } => {
            let mut out = Vec::with_capacity(povms.len());
            for (x, elements) in povms.iter().enumerate() {
                let mats = elements
                    .iter()
                    .enumerate()
                    .map(|(a, m)| matrix(m, &format!("assembly.povms[{x}][{a}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(Povm::new(mats).map_err(|e| CliError::at(&format!("assembly.povms[{x}]"), e))?);
            }
            Ok((Assembly::new(out).map_err(|e| CliError::at("assembly.povms", e))?, None))
        }
    }
}

pub fn robustness(p: &RobustnessProblem, tol: Option<f64>, with_certificate: bool) -> Result<Outcome, CliError> {
    let defaults = SolverOptions::default();
    let opts = SolverOptions {
        tol: tol.unwrap_or(defaults.tol),
        feasibility_tol: p.feasibility_tol.unwrap_or(defaults.feasibility_tol),
        max_iterations: p.max_iterations.unwrap_or(defaults.max_iterations),
        s_max: p.s_max.unwrap_or(defaults.s_max),
    };
    if !(opts.tol > 0.0 && opts.feasibility_tol > 0.0 && opts.s_max > 0.0 && opts.max_iterations > 0) {
        return Err(CliError::domain("solver tolerances, s_max and max_iterations must be positive"));
    }
    let (assembly, mub_dim) = build_assembly(&p.assembly)?;
    log::info!(
        "robustness: dim {}, outcome counts {:?}",
        assembly.dim(),
        assembly.outcome_counts()
    );
    let r = generalized_robustness_with(&assembly, &opts).map_err(|e| CliError::at("assembly", e))?;
    let mut certificate = json!({
        "residual": r.certificate.residual,
        "outcome_tuples": r.certificate.outcome_tuples,
    });
    if with_certificate {
        certificate["parent_elements"] = Value::Array(r.certificate.parent_elements.iter().map(matrix_json).collect());
    }
    let mut results = json!({
        "dimension": assembly.dim(),
        "outcome_counts": assembly.outcome_counts(),
        "value": r.value,
        "bracket": [r.bracket.0, r.bracket.1],
        "bisection_steps": r.bisection_steps,
        "certificate": certificate,
    });
    if let Some(dim) = mub_dim {
        let cf = closed_form_mub_robustness(dim);
        results["closed_form"] = json!({"value": cf, "abs_difference": (r.value - cf).abs()});
    }
    Ok(Outcome {
        results,
        tolerances: tolerances(&[
            ("bisection", opts.tol),
            ("feasibility", opts.feasibility_tol),
            ("s_max", opts.s_max),
            ("max_iterations", opts.max_iterations as f64),
        ]),
        failed_check: false,
    })
}

pub const BELL_THRESHOLD: f64 = 1e-8;

pub fn bell_verify(
    p: Option<&BellVerifyProblem>,
    trials: Option<usize>,
    source: Option<ProjectorSource>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let trials = trials.or(p.and_then(|p| p.trials)).unwrap_or(100);
    let source = source.or(p.and_then(|p| p.source)).unwrap_or_default();
    let threshold = tol.unwrap_or(BELL_THRESHOLD);
    if trials == 0 {
        return Err(CliError::schema("trials", "must be at least 1"));
    }
    let residuals = operator_identity_residuals(seed, trials, source).map_err(|e| CliError::at("trials", e))?;
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let mean = residuals.iter().sum::<f64>() / trials as f64;
    let pass = max <= threshold;
    if !pass {
        log::error!("operator identity residual {max:.3e} exceeds {threshold:.1e}");
    }
    Ok(Outcome {
        results: json!({
            "trials": trials,
            "source": source,
            "max_residual": max,
            "mean_residual": mean,
            "pass": pass,
        }),
        tolerances: tolerances(&[("residual_threshold", threshold)]),
        failed_check: !pass,
    })
}
