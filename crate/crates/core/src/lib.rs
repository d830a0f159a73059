//! Optimal allocation of quantum resources over hypergraphs.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`qcore`]: dense complex linear algebra, states, POVMs, mutually unbiased
//!   bases and their product (nested) constructions.
//! - [`allocation`]: hypergraphs, allocation lists and the proportional-fairness
//!   and reliability performance functionals, plus the closed-form optimal
//!   allocation of product MUB measurements.
//! - [`incompatibility`]: joint-measurability feasibility and generalized
//!   robustness via alternating projections and bisection.
//! - [`equitability`]: knapsack-constrained lexicographic max-min solver and the
//!   nonlocality/contextuality instances built on it.
//! - [`bell`]: cyclic and I3322 correlation evaluators, Bell operators and the
//!   fixed-measurement resource monotone.

pub mod allocation;
pub mod bell;
pub mod equitability;
mod error;
pub mod incompatibility;
pub mod lp;
pub mod qcore;

pub use error::{Error, Result};
