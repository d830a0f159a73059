use nalgebra::DMatrix;
use num_complex::Complex;
use qalloc_core::incompatibility::{
    closed_form_mub_robustness, edge_robustness, generalized_robustness, generalized_robustness_with,
    joint_measurability_feasible, SolverOptions,
};
use qalloc_core::qcore::{mub_pair_assembly, product_assembly, Assembly};

type M = DMatrix<Complex<f64>>;

fn min_eig(m: &M) -> f64 {
    let h = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.min()
}

fn loose() -> SolverOptions {
    SolverOptions {
        tol: 1e-4,
        ..SolverOptions::default()
    }
}

/// Recomputes every robustness constraint from the raw parent elements.
fn certificate_violation(a: &Assembly, parents: &[M], tuples: &[Vec<usize>], s: f64) -> f64 {
    let d = a.dim();
    let mut worst = 0f64;
    let mut total = M::zeros(d, d);
    for g in parents {
        worst = worst.max(-min_eig(g));
        total += g;
    }
    let target = M::identity(d, d) * Complex::new(1.0 + s, 0.0);
    worst = worst.max((total - target).iter().map(|z| z.norm()).fold(0.0, f64::max));
    for (x, povm) in a.povms().iter().enumerate() {
        for (k, m) in povm.elements().iter().enumerate() {
            let mut marg = M::zeros(d, d);
            for (g, t) in parents.iter().zip(tuples) {
                if t[x] == k {
                    marg += g;
                }
            }
            worst = worst.max(-min_eig(&(marg - m)));
        }
    }
    worst
}

#[test]
fn mub_pairs_match_closed_form() {
    for d in [2, 3] {
        let a = mub_pair_assembly(d).unwrap();
        let r = generalized_robustness(&a, 1e-6).unwrap();
        let oracle = ((d as f64).sqrt() - 1.0) / ((d as f64).sqrt() + 1.0);
        assert!((r.value - oracle).abs() < 1e-3, "d={d}: {} vs {oracle}", r.value);
        assert!((closed_form_mub_robustness(d) - oracle).abs() < 1e-15);
        let (lo, hi) = r.bracket;
        assert!(lo <= r.value && r.value <= hi && hi - lo <= 1e-6);
        let v = certificate_violation(&a, &r.certificate.parent_elements, &r.certificate.outcome_tuples, hi);
        assert!(v <= 1e-5, "certificate violation {v}");
        assert!((v - r.certificate.residual).abs() <= 1e-9);
    }
}

#[test]
fn qubit_compatibility_threshold() {
    let mub = mub_pair_assembly(2).unwrap();
    let below = joint_measurability_feasible(&mub.mixed_with_trivial(0.70).unwrap(), 1e-8).unwrap();
    assert!(below.compatible);
    let above = joint_measurability_feasible(&mub.mixed_with_trivial(0.72).unwrap(), 1e-8).unwrap();
    assert!(!above.compatible);
}

#[test]
fn analytic_parent_at_threshold() {
    // G_{±±} = (I ± (σx ± σz)/√2)/4 reproduces the η = 1/√2 mixture exactly
    let eta = 1.0 / 2f64.sqrt();
    let a = mub_pair_assembly(2).unwrap().mixed_with_trivial(eta).unwrap();
    let r = generalized_robustness(&a, 1e-6).unwrap();
    assert!(r.value <= 1e-5, "{}", r.value);
}

#[test]
fn robustness_monotone_in_visibility() {
    let mub = mub_pair_assembly(2).unwrap();
    let mut prev = 0.0;
    for eta in [0.5, 0.7, 0.75, 0.85, 0.95, 1.0] {
        let r = generalized_robustness_with(&mub.depolarized(eta).unwrap(), &loose()).unwrap();
        assert!(r.value + 1e-4 >= prev, "eta={eta}: {} < {prev}", r.value);
        if eta <= 1.0 / 2f64.sqrt() {
            assert!(r.value <= 1e-4);
        }
        prev = r.value;
    }
}

#[test]
fn trivial_mixing_never_increases_robustness() {
    let mub = mub_pair_assembly(2).unwrap();
    let base = generalized_robustness_with(&mub, &loose()).unwrap().value;
    for w in [0.25, 0.5, 0.75] {
        let r = generalized_robustness_with(&mub.mixed_with_trivial(w).unwrap(), &loose()).unwrap();
        assert!(r.value <= base + 1e-4, "w={w}: {} > {base}", r.value);
    }
}

#[test]
fn two_site_edge_matches_product_closed_form() {
    let pa = product_assembly(2, 2).unwrap();
    let r = edge_robustness(&pa, &[0, 1], 1.0, &loose()).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() < 1e-3, "{}", r.value);
    let single = edge_robustness(&pa, &[1], 1.0, &loose()).unwrap();
    assert!((single.value - closed_form_mub_robustness(2)).abs() < 1e-3);
}
