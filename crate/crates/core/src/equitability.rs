//! Knapsack-constrained lexicographic max-min (equitable) allocation.
//!
//! Variables are resource values with box bounds `[L, U]`, coupled by linear
//! budget constraints `Σ Λ_i v_i ≤ Γ`. The solver works in stages: each stage
//! maximizes the smallest not-yet-fixed value, fixes one variable that cannot
//! exceed that optimum, and recurses on the rest. Upper bounds induce a
//! priority order (`U_i < U_j` ⇒ `v_i ≤ v_j`) that every stage respects.
//! Every stage is a small LP solved exactly by [`crate::lp`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bell::BoundConstants;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::{Error, Result};

/// Feasibility tolerance on returned solutions.
pub const FEAS_TOL: f64 = 1e-9;
/// Two stage values closer than this are considered tied.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub lower: f64,
    pub upper: f64,
}

/// `Σ_id coefficients[id]·v_id ≤ budget`; absent ids have coefficient 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackConstraint {
    pub coefficients: BTreeMap<String, f64>,
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackProblem {
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub constraints: Vec<KnapsackConstraint>,
    /// Sets of variables of which at most one may be strictly positive.
    #[serde(default)]
    pub exclusivity_groups: Vec<Vec<String>>,
}

impl KnapsackProblem {
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::InvalidProblem("no variables".into()));
        }
        let mut ids = HashMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            if ids.insert(v.id.as_str(), i).is_some() {
                return Err(Error::InvalidProblem(format!("duplicate variable id {:?}", v.id)));
            }
            if !v.lower.is_finite() || !v.upper.is_finite() || v.lower < 0.0 || v.upper < v.lower {
                return Err(Error::InvalidBound(format!(
                    "variable {:?} has bounds [{}, {}]",
                    v.id, v.lower, v.upper
                )));
            }
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if !c.budget.is_finite() || c.budget < 0.0 {
                return Err(Error::InvalidProblem(format!("constraint {k} has budget {}", c.budget)));
            }
            for (id, &coef) in &c.coefficients {
                if !ids.contains_key(id.as_str()) {
                    return Err(Error::InvalidProblem(format!("constraint {k} references unknown id {id:?}")));
                }
                if !coef.is_finite() || coef < 0.0 {
                    return Err(Error::InvalidProblem(format!("constraint {k} has coefficient {coef} on {id:?}")));
                }
            }
        }
        for (g, group) in self.exclusivity_groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidProblem(format!("exclusivity group {g} is empty")));
            }
            if let Some(id) = group.iter().find(|id| !ids.contains_key(id.as_str())) {
                return Err(Error::InvalidProblem(format!("exclusivity group {g} references unknown id {id:?}")));
            }
        }
        Ok(())
    }

    fn index_of(&self, id: &str) -> usize {
        self.variables.iter().position(|v| v.id == id).expect("validated id")
    }

    fn coefficient_rows(&self) -> Vec<Vec<f64>> {
        self.constraints
            .iter()
            .map(|c| {
                self.variables
                    .iter()
                    .map(|v| c.coefficients.get(&v.id).copied().unwrap_or(0.0))
                    .collect()
            })
            .collect()
    }
}

/// `value[lower] ≤ value[upper]`, derived from upper bounds. Pairs with equal
/// upper bounds are emitted in both directions with `tied = true`; the solver
/// does not enforce tied pairs, so equality is allowed but not forced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderConstraint {
    pub lower: String,
    pub upper: String,
    pub tied: bool,
}

pub fn priority_order(problem: &KnapsackProblem) -> Vec<OrderConstraint> {
    let vars = &problem.variables;
    let mut out = Vec::new();
    for (i, a) in vars.iter().enumerate() {
        for (j, b) in vars.iter().enumerate() {
            if i == j {
                continue;
            }
            if a.upper < b.upper {
                out.push(OrderConstraint {
                    lower: a.id.clone(),
                    upper: b.id.clone(),
                    tied: false,
                });
            } else if a.upper == b.upper {
                out.push(OrderConstraint {
                    lower: a.id.clone(),
                    upper: b.id.clone(),
                    tied: true,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquitableSolution {
    pub values: BTreeMap<String, f64>,
    /// Variable ids in the order the stages fixed them.
    pub elimination_order: Vec<String>,
    /// Max-min value of each stage, aligned with `elimination_order`.
    pub stage_values: Vec<f64>,
    /// Further solutions with identical stage values (exclusivity ties).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tied: Vec<EquitableSolution>,
}

impl EquitableSolution {
    pub fn value(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }
}

/// Largest violation of bounds, budgets and enforced order constraints.
pub fn max_violation(problem: &KnapsackProblem, values: &BTreeMap<String, f64>) -> f64 {
    let get = |id: &str| values.get(id).copied().unwrap_or(f64::NAN);
    let mut worst: f64 = 0.0;
    for v in &problem.variables {
        let x = get(&v.id);
        if x.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(v.lower - x).max(x - v.upper);
    }
    for c in &problem.constraints {
        let lhs: f64 = c.coefficients.iter().map(|(id, k)| k * get(id)).sum();
        worst = worst.max(lhs - c.budget);
    }
    for o in priority_order(problem).iter().filter(|o| !o.tied) {
        worst = worst.max(get(&o.lower) - get(&o.upper));
    }
    for group in &problem.exclusivity_groups {
        let mut positive: Vec<f64> = group.iter().map(|id| get(id)).filter(|&x| x > FEAS_TOL).collect();
        if positive.len() > 1 {
            positive.sort_by(f64::total_cmp);
            worst = worst.max(positive[positive.len() - 2]);
        }
    }
    worst
}

/// Run the staged max-min algorithm. Exclusivity groups are resolved by
/// branching over which member (if any) may be positive; the lexicographically
/// best branch wins and equally good branches are listed in `tied`.
pub fn lexicographic_maxmin(problem: &KnapsackProblem) -> Result<EquitableSolution> {
    problem.validate()?;
    let order: Vec<(usize, usize)> = priority_order(problem)
        .iter()
        .filter(|o| !o.tied)
        .map(|o| (problem.index_of(&o.lower), problem.index_of(&o.upper)))
        .collect();

    let branches = exclusivity_branches(problem);
    let mut results: Vec<EquitableSolution> = Vec::new();
    let mut first_error = None;
    for uppers in branches {
        match solve_branch(problem, &uppers, &order) {
            Ok(sol) => results.push(sol),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if results.is_empty() {
        return Err(first_error.unwrap_or_else(|| Error::Infeasible("no feasible branch".into())));
    }

    let mut best = 0;
    for i in 1..results.len() {
        if compare_stages(&results[i].stage_values, &results[best].stage_values) == Ordering::Greater {
            best = i;
        }
    }
    let mut winner = results[best].clone();
    for (i, r) in results.into_iter().enumerate() {
        if i == best || compare_stages(&r.stage_values, &winner.stage_values) != Ordering::Equal {
            continue;
        }
        let duplicate = std::iter::once(&winner)
            .chain(winner.tied.iter())
            .any(|w| same_values(&w.values, &r.values));
        if !duplicate {
            winner.tied.push(r);
        }
    }
    Ok(winner)
}

fn same_values(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> bool {
    a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).is_some_and(|w| (v - w).abs() <= TIE_TOL))
}

/// Lexicographic comparison of stage-value vectors with tolerance.
fn compare_stages(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x - y > TIE_TOL {
            return Ordering::Greater;
        }
        if y - x > TIE_TOL {
            return Ordering::Less;
        }
    }
    a.len().cmp(&b.len())
}

/// Effective upper bounds per branch: for every exclusivity group either one
/// member keeps its bound or all members are pinned to zero.
fn exclusivity_branches(problem: &KnapsackProblem) -> Vec<Vec<f64>> {
    let base: Vec<f64> = problem.variables.iter().map(|v| v.upper).collect();
    let mut branches = vec![base];
    for group in &problem.exclusivity_groups {
        let members: Vec<usize> = group.iter().map(|id| problem.index_of(id)).collect();
        let mut next = Vec::new();
        for b in &branches {
            for &active in &members {
                let mut u = b.clone();
                for &m in &members {
                    if m != active {
                        u[m] = 0.0;
                    }
                }
                next.push(u);
            }
            let mut zero = b.clone();
            for &m in &members {
                zero[m] = 0.0;
            }
            next.push(zero);
        }
        branches = next;
    }
    branches
}

fn solve_branch(problem: &KnapsackProblem, uppers: &[f64], order: &[(usize, usize)]) -> Result<EquitableSolution> {
    let n = problem.variables.len();
    let lowers: Vec<f64> = problem.variables.iter().map(|v| v.lower).collect();
    if let Some(i) = (0..n).find(|&i| lowers[i] > uppers[i]) {
        return Err(Error::Infeasible(format!(
            "variable {:?} has lower bound {} above its branch upper bound {}",
            problem.variables[i].id, lowers[i], uppers[i]
        )));
    }
    let rows = problem.coefficient_rows();
    let stage = StageModel {
        lowers: &lowers,
        uppers,
        rows: &rows,
        budgets: problem.constraints.iter().map(|c| c.budget).collect(),
        order,
    };

    let mut fixed: Vec<Option<f64>> = vec![None; n];
    let mut elimination_order = Vec::with_capacity(n);
    let mut stage_values = Vec::with_capacity(n);
    let mut floor = 0.0f64;
    while fixed.iter().any(Option::is_none) {
        let Some(t) = stage.max_min(&fixed, floor) else {
            return Err(infeasibility_report(problem, &lowers));
        };
        let blocking: Vec<usize> = (0..n)
            .filter(|&i| fixed[i].is_none())
            .filter(|&i| stage.max_single(&fixed, t, i).is_none_or(|best| best <= t + TIE_TOL))
            .collect();
        // there is always a blocking variable at an optimum; fall back to all free ones if
        // rounding hides it
        let candidates = if blocking.is_empty() {
            (0..n).filter(|&i| fixed[i].is_none()).collect()
        } else {
            blocking
        };
        let pick = *candidates
            .iter()
            .min_by(|&&a, &&b| {
                problem.variables[a]
                    .upper
                    .total_cmp(&problem.variables[b].upper)
                    .then_with(|| problem.variables[a].id.cmp(&problem.variables[b].id))
            })
            .expect("non-empty");
        fixed[pick] = Some(t);
        elimination_order.push(problem.variables[pick].id.clone());
        stage_values.push(t);
        floor = t;
    }

    let values = problem
        .variables
        .iter()
        .zip(&fixed)
        .map(|(v, x)| (v.id.clone(), x.expect("all fixed")))
        .collect();
    Ok(EquitableSolution {
        values,
        elimination_order,
        stage_values,
        tied: Vec::new(),
    })
}

fn infeasibility_report(problem: &KnapsackProblem, lowers: &[f64]) -> Error {
    for (k, c) in problem.constraints.iter().enumerate() {
        let lhs: f64 = problem
            .variables
            .iter()
            .zip(lowers)
            .map(|(v, l)| c.coefficients.get(&v.id).copied().unwrap_or(0.0) * l)
            .sum();
        if lhs > c.budget + FEAS_TOL {
            return Error::Infeasible(format!(
                "constraint {k} violated at the lower bounds: {lhs} > budget {}",
                c.budget
            ));
        }
    }
    Error::Infeasible("priority order incompatible with bounds and budgets".into())
}

struct StageModel<'a> {
    lowers: &'a [f64],
    uppers: &'a [f64],
    rows: &'a [Vec<f64>],
    budgets: Vec<f64>,
    order: &'a [(usize, usize)],
}

impl StageModel<'_> {
    /// LP over the free variables (fixed ones substituted) plus an optional
    /// extra column `t`. Returns the program and the map from variable index
    /// to LP column.
    fn base(&self, fixed: &[Option<f64>], floor: f64, with_t: bool) -> (LinearProgram, Vec<Option<usize>>) {
        let n = fixed.len();
        let mut col = vec![None; n];
        let mut m = 0;
        for (slot, f) in col.iter_mut().zip(fixed) {
            if f.is_none() {
                *slot = Some(m);
                m += 1;
            }
        }
        let width = m + usize::from(with_t);
        let mut lp = LinearProgram::new(width);
        for (i, slot) in col.iter().enumerate() {
            if let Some(c) = *slot {
                lp.bound(c, Relation::Le, self.uppers[i]);
                lp.bound(c, Relation::Ge, self.lowers[i].max(floor));
            }
        }
        for (row, &budget) in self.rows.iter().zip(&self.budgets) {
            let mut coef = vec![0.0; width];
            let mut rhs = budget;
            for i in 0..n {
                match (col[i], fixed[i]) {
                    (Some(c), _) => coef[c] = row[i],
                    (None, Some(x)) => rhs -= row[i] * x,
                    (None, None) => unreachable!(),
                }
            }
            lp.add(coef, Relation::Le, rhs);
        }
        for &(lo, hi) in self.order {
            let mut coef = vec![0.0; width];
            let mut rhs = 0.0;
            match (col[lo], fixed[lo]) {
                (Some(c), _) => coef[c] += 1.0,
                (None, Some(x)) => rhs -= x,
                _ => unreachable!(),
            }
            match (col[hi], fixed[hi]) {
                (Some(c), _) => coef[c] -= 1.0,
                (None, Some(x)) => rhs += x,
                _ => unreachable!(),
            }
            if coef.iter().all(|&v| v == 0.0) {
                // both sides fixed: already satisfied by construction
                continue;
            }
            lp.add(coef, Relation::Le, rhs);
        }
        (lp, col)
    }

    /// max t s.t. t ≤ v_i for every free i.
    fn max_min(&self, fixed: &[Option<f64>], floor: f64) -> Option<f64> {
        let (mut lp, col) = self.base(fixed, floor, true);
        let t = lp.vars() - 1;
        for c in col.iter().flatten() {
            let mut row = vec![0.0; lp.vars()];
            row[t] = 1.0;
            row[*c] = -1.0;
            lp.add(row, Relation::Le, 0.0);
        }
        lp.objective[t] = 1.0;
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    /// max v_i with every free variable held at or above `t`.
    fn max_single(&self, fixed: &[Option<f64>], t: f64, i: usize) -> Option<f64> {
        let (mut lp, col) = self.base(fixed, t - 1e-12, false);
        lp.objective[col[i].expect("free variable")] = 1.0;
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Two mutually exclusive resources with bounds `[0, gap]`: at most one of the
/// two can be strictly positive.
pub fn exclusivity_problem(gap_n: f64, gap_m: f64) -> Result<KnapsackProblem> {
    for (name, g) in [("gap_n", gap_n), ("gap_m", gap_m)] {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidBound(format!("{name} = {g} must be a finite nonnegative gap")));
        }
    }
    Ok(KnapsackProblem {
        variables: vec![
            Variable {
                id: "N_n".into(),
                lower: 0.0,
                upper: gap_n,
            },
            Variable {
                id: "N_m".into(),
                lower: 0.0,
                upper: gap_m,
            },
        ],
        constraints: Vec::new(),
        exclusivity_groups: vec![vec!["N_n".into(), "N_m".into()]],
    })
}

/// Bipartite I3322 value `N_AB ∈ [0, nu1]` against local five-cycle value
/// `N_5 ∈ [0, nu2]`, coupled by `N_AB + 2·N_5 ≤ 4 − lambda`.
pub fn monogamy_problem(lambda: f64, nu1: f64, nu2: f64) -> Result<KnapsackProblem> {
    if !lambda.is_finite() || !(0.0..4.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in [0, 4)")));
    }
    if !(nu1 > 0.0 && nu1.is_finite() && nu2 > 0.0 && nu2.is_finite()) {
        return Err(Error::InvalidParameter(format!("bounds nu1 = {nu1}, nu2 = {nu2} must be positive")));
    }
    Ok(KnapsackProblem {
        variables: vec![
            Variable {
                id: "N_AB".into(),
                lower: 0.0,
                upper: nu1,
            },
            Variable {
                id: "N_5".into(),
                lower: 0.0,
                upper: nu2,
            },
        ],
        constraints: vec![KnapsackConstraint {
            coefficients: [("N_AB".to_string(), 1.0), ("N_5".to_string(), 2.0)].into_iter().collect(),
            budget: 4.0 - lambda,
        }],
        exclusivity_groups: Vec::new(),
    })
}

/// [`monogamy_problem`] with the default quantum-bound gaps.
pub fn monogamy_problem_default(lambda: f64) -> Result<KnapsackProblem> {
    monogamy_problem(lambda, BoundConstants::NU1_DEFAULT, BoundConstants::NU2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(id: &str, lower: f64, upper: f64) -> Variable {
        Variable {
            id: id.into(),
            lower,
            upper,
        }
    }

    #[test]
    fn priority_order_cases() {
        let p = monogamy_problem(2.5, 1.0, 0.9442).unwrap();
        let o = priority_order(&p);
        assert_eq!(
            o,
            vec![OrderConstraint {
                lower: "N_5".into(),
                upper: "N_AB".into(),
                tied: false
            }]
        );

        let eq = KnapsackProblem {
            variables: vec![var("x", 0.0, 1.0), var("y", 0.0, 1.0)],
            constraints: vec![],
            exclusivity_groups: vec![],
        };
        let o = priority_order(&eq);
        assert_eq!(o.len(), 2);
        assert!(o.iter().all(|c| c.tied));

        let single = KnapsackProblem {
            variables: vec![var("x", 0.0, 1.0)],
            constraints: vec![],
            exclusivity_groups: vec![],
        };
        assert!(priority_order(&single).is_empty());
    }

    #[test]
    fn monogamy_solution_three() {
        let s = lexicographic_maxmin(&monogamy_problem(2.5, 1.0, 0.9442).unwrap()).unwrap();
        assert!((s.value("N_AB").unwrap() - 0.5).abs() < 1e-12);
        assert!((s.value("N_5").unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s.elimination_order, vec!["N_5", "N_AB"]);

        let s = lexicographic_maxmin(&monogamy_problem_default(2.8).unwrap()).unwrap();
        assert!((s.value("N_AB").unwrap() - 0.4).abs() < 1e-12);
        assert!((s.value("N_5").unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn monogamy_saturated_regime() {
        let s = lexicographic_maxmin(&monogamy_problem(0.5, 1.0, 0.9442).unwrap()).unwrap();
        assert!((s.value("N_5").unwrap() - 0.9442).abs() < 1e-12);
        assert!((s.value("N_AB").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.stage_values.len(), 2);
    }

    #[test]
    fn zero_budget() {
        let mut p = monogamy_problem(2.0, 1.0, 0.9442).unwrap();
        p.constraints[0].budget = 0.0;
        let s = lexicographic_maxmin(&p).unwrap();
        assert_eq!(s.value("N_AB").unwrap().abs(), 0.0);
        assert_eq!(s.value("N_5").unwrap().abs(), 0.0);
    }

    #[test]
    fn box_maximum_without_coupling() {
        let p = KnapsackProblem {
            variables: vec![var("x", 0.0, 1.0), var("y", 0.0, 2.0)],
            constraints: vec![],
            exclusivity_groups: vec![],
        };
        let s = lexicographic_maxmin(&p).unwrap();
        assert!((s.value("x").unwrap() - 1.0).abs() < 1e-12);
        assert!((s.value("y").unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(s.elimination_order, vec!["x", "y"]);
    }

    #[test]
    fn exclusivity_selection() {
        let s = lexicographic_maxmin(&exclusivity_problem(1.0, 0.9442).unwrap()).unwrap();
        assert_eq!(s.value("N_n"), Some(1.0));
        assert_eq!(s.value("N_m"), Some(0.0));
        assert!(s.tied.is_empty());

        let s = lexicographic_maxmin(&exclusivity_problem(0.5, 0.7).unwrap()).unwrap();
        assert_eq!(s.value("N_n"), Some(0.0));
        assert_eq!(s.value("N_m"), Some(0.7));
        assert!(s.tied.is_empty());

        let s = lexicographic_maxmin(&exclusivity_problem(0.8, 0.8).unwrap()).unwrap();
        assert_eq!(s.tied.len(), 1);
        let mut seen = vec![
            (s.value("N_n").unwrap(), s.value("N_m").unwrap()),
            (s.tied[0].value("N_n").unwrap(), s.tied[0].value("N_m").unwrap()),
        ];
        seen.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(seen, vec![(0.0, 0.8), (0.8, 0.0)]);

        assert!(matches!(exclusivity_problem(-0.1, 1.0), Err(Error::InvalidBound(_))));
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(monogamy_problem(4.0, 1.0, 0.9), Err(Error::InvalidParameter(_))));
        assert!(matches!(monogamy_problem(-1.0, 1.0, 0.9), Err(Error::InvalidParameter(_))));
        assert!(matches!(monogamy_problem(1.0, 0.0, 0.9), Err(Error::InvalidParameter(_))));

        let bad = KnapsackProblem {
            variables: vec![var("x", 0.5, 0.2)],
            constraints: vec![],
            exclusivity_groups: vec![],
        };
        assert!(matches!(lexicographic_maxmin(&bad), Err(Error::InvalidBound(_))));

        let unknown = KnapsackProblem {
            variables: vec![var("x", 0.0, 1.0)],
            constraints: vec![KnapsackConstraint {
                coefficients: [("y".to_string(), 1.0)].into_iter().collect(),
                budget: 1.0,
            }],
            exclusivity_groups: vec![],
        };
        assert!(matches!(lexicographic_maxmin(&unknown), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn infeasible_reports_constraint() {
        let p = KnapsackProblem {
            variables: vec![var("x", 0.6, 1.0), var("y", 0.6, 1.0)],
            constraints: vec![KnapsackConstraint {
                coefficients: [("x".to_string(), 1.0), ("y".to_string(), 1.0)].into_iter().collect(),
                budget: 1.0,
            }],
            exclusivity_groups: vec![],
        };
        match lexicographic_maxmin(&p) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("constraint 0"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn order_respected_with_larger_lower_bound() {
        // x has the smaller U so x <= y even though x's floor is higher
        let p = KnapsackProblem {
            variables: vec![var("x", 0.5, 0.8), var("y", 0.0, 1.0)],
            constraints: vec![KnapsackConstraint {
                coefficients: [("x".to_string(), 1.0), ("y".to_string(), 1.0)].into_iter().collect(),
                budget: 1.2,
            }],
            exclusivity_groups: vec![],
        };
        let s = lexicographic_maxmin(&p).unwrap();
        assert!(max_violation(&p, &s.values) <= FEAS_TOL);
        assert!((s.value("x").unwrap() - 0.6).abs() < 1e-12);
        assert!((s.value("y").unwrap() - 0.6).abs() < 1e-12);
    }
}
