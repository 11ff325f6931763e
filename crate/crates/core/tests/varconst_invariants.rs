use std::f64::consts::PI;

use proptest::prelude::*;
use stablewalk::dilation::{ExponentStructure, NormalizationSequence};
use stablewalk::occupation::ProfileF;
use stablewalk::par::Execution;
use stablewalk::stablelaw::LimitLaw;
use stablewalk::varconst::{self, Domain};

const SEQ: Execution = Execution::Sequential;

#[test]
fn eigenvalue_decreases_along_the_basis_ladder() {
    let ll = LimitLaw::symmetric_stable(1.0, 1.0).unwrap();
    let dom = Domain::Interval { lo: -0.5, hi: 0.5 };
    let vals: Vec<f64> = [8, 16, 32, 64].iter().map(|&m| varconst::eigen_rayleigh(&ll, &dom, m, SEQ).unwrap().lambda).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
}

#[test]
fn nested_domains_have_ordered_eigenvalues() {
    let ll = LimitLaw::symmetric_stable(1.5, 1.0).unwrap();
    let mut last = f64::INFINITY;
    for h in [0.25, 0.5, 1.0, 3.0] {
        let l = varconst::eigen_rayleigh(&ll, &Domain::Interval { lo: 0.0, hi: h }, 24, SEQ).unwrap().lambda;
        assert!(l < last);
        last = l;
    }
    let sq = LimitLaw::axis_separable(&[(2.0, 1.0), (2.0, 1.0)]).unwrap();
    let small = varconst::eigen_rayleigh(&sq, &Domain::Box { sides: vec![1.0, 1.0] }, 16, SEQ).unwrap().lambda;
    let big = varconst::eigen_rayleigh(&sq, &Domain::Box { sides: vec![1.0, 2.0] }, 16, SEQ).unwrap().lambda;
    assert!(big < small);
}

#[test]
fn eigenvalue_is_linear_in_the_symbol_and_scales_with_the_domain() {
    let dom = Domain::Interval { lo: 0.0, hi: 1.0 };
    let alpha = 1.2;
    let l1 = varconst::eigen_rayleigh(&LimitLaw::symmetric_stable(alpha, 1.0).unwrap(), &dom, 32, SEQ).unwrap().lambda;
    let l3 = varconst::eigen_rayleigh(&LimitLaw::symmetric_stable(alpha, 3.0).unwrap(), &dom, 32, SEQ).unwrap().lambda;
    assert!((l3 / l1 - 3.0).abs() < 1e-9, "{}", l3 / l1);
    let wide = Domain::Interval { lo: 0.0, hi: 2.0 };
    let l2 = varconst::eigen_rayleigh(&LimitLaw::symmetric_stable(alpha, 1.0).unwrap(), &wide, 32, SEQ).unwrap().lambda;
    assert!((l2 / l1 - 2f64.powf(-alpha)).abs() < 1e-9, "{}", l2 / l1);
}

#[test]
fn sequential_and_parallel_eigenvalues_agree() {
    let ll = LimitLaw::isotropic(2, 2.0, 1.0).unwrap();
    let dom = Domain::unit_ball(2);
    let a = varconst::eigen_rayleigh(&ll, &dom, 5, Execution::Sequential).unwrap().lambda;
    let b = varconst::eigen_rayleigh(&ll, &dom, 5, Execution::Parallel).unwrap().lambda;
    assert_eq!(a.to_bits(), b.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dv_constant_homogeneity(theta in 0.01..10.0f64, tau in 0.2..4.0f64, lam in 0.5..50.0f64, s in 0.1..10.0f64) {
        let k = varconst::constant_dv_theta(theta, tau, lam).unwrap().value;
        prop_assert!(k > 0.0 && k.is_finite());
        let ks = varconst::constant_dv_theta(s * theta, tau, lam).unwrap().value;
        prop_assert!((ks / k / s.powf(1.0 / (tau + 1.0)) - 1.0).abs() < 1e-12);
        let kl = varconst::constant_dv_theta(theta, tau, s * lam).unwrap().value;
        prop_assert!((kl / k / s.powf(tau / (tau + 1.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_and_nonamenable_homogeneity(g in 0.05..0.95f64, a in 0.1..5.0f64, c in 0.1..5.0f64, r1 in 0.01..0.99f64, r2 in 0.01..0.99f64) {
        let k = varconst::constant_schmidt(g, a, 1.0).unwrap().value;
        let kc = varconst::constant_schmidt(g, a, c).unwrap().value;
        prop_assert!((kc / k / c.powf(2.0 / (3.0 - g)) - 1.0).abs() < 1e-12);
        let n12 = varconst::constant_nonamenable(r1 * r2).unwrap().value;
        let n1 = varconst::constant_nonamenable(r1).unwrap().value;
        let n2 = varconst::constant_nonamenable(r2).unwrap().value;
        prop_assert!((n12 / (n1 + n2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_profiles_have_closed_form_kappa(g in 0.0..0.9f64, a1 in 0.5..2.0f64, a2 in 0.5..2.0f64) {
        let es = ExponentStructure::diagonal(&[a1, a2]).unwrap();
        let tau = es.trace();
        let ns = NormalizationSequence::floor(es);
        let sol = varconst::solve_scaling(&ProfileF::Power { nu: 1.0, gamma: g }, &ns).unwrap();
        prop_assert!((sol.kappa - (1.0 - g) / (1.0 + tau * (1.0 - g))).abs() < 1e-12);
        for n in [1_000u64, 100_000] {
            prop_assert!(sol.residual(n).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn laplacian_constant_in_one_dimension() {
    let ll = LimitLaw::symmetric_stable(2.0, 1.0).unwrap();
    let lt = varconst::lambda_theta(&ll, 32, SEQ).unwrap();
    assert!((lt.best.lambda / (PI * PI) - 1.0).abs() < 1e-8);
}
