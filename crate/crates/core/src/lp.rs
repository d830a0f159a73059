//! Small dense linear programs.
//!
//! Two-phase tableau simplex with Bland's rule. Intended for the handful of
//! variables the equitability stages produce, where a dense tableau is both
//! exact at vertices (up to floating point) and cheap.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize c·x` subject to the rows and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coefficients.len(), self.vars());
        self.rows.push(Row {
            coefficients,
            relation,
            rhs,
        });
    }

    /// Convenience for a single-variable row `x_i (rel) rhs`.
    pub fn bound(&mut self, i: usize, relation: Relation, rhs: f64) {
        let mut row = vec![0.0; self.vars()];
        row[i] = 1.0;
        self.add(row, relation, rhs);
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    // m rows of `cols + 1` entries; the last entry is the right-hand side
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.vars();
        let m = lp.rows.len();

        // normalize to nonnegative right-hand sides
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs < 0.0 {
                    let flipped = match r.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (r.coefficients.iter().map(|v| -v).collect(), flipped, -r.rhs)
                } else {
                    (r.coefficients.clone(), r.relation, r.rhs)
                }
            })
            .collect();

        let slack_count = normalized.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificial_count = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = n + slack_count;
        let cols = artificial_start + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, artificial_start);
        for (coef, rel, rhs) in normalized {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(&coef);
            row[cols] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Self {
            rows,
            basis,
            n,
            cols,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns `< allowed`; returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let rhs = self.cols;
        loop {
            // Bland: first improving column
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b] * row[j])
                    .sum();
                cost[j] - z > EPS
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[rhs] / row[c];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn solve(mut self, objective: &[f64]) -> LpOutcome {
        let rhs = self.cols;
        if self.artificial_start < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for v in &mut phase1[self.artificial_start..] {
                *v = -1.0;
            }
            self.optimize(&phase1, self.cols);
            let infeasibility: f64 = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= self.artificial_start)
                .map(|(row, _)| row[rhs])
                .sum();
            if infeasibility > 1e-9 {
                return LpOutcome::Infeasible;
            }
            // drive remaining (zero-valued) artificials out of the basis
            for r in 0..self.rows.len() {
                if self.basis[r] >= self.artificial_start {
                    if let Some(c) = (0..self.artificial_start).find(|&j| self.rows[r][j].abs() > 1e-9) {
                        self.pivot(r, c);
                    }
                }
            }
        }

        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(objective);
        if !self.optimize(&cost, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[rhs];
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
