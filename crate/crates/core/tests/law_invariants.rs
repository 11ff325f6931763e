use nalgebra::DMatrix;
use proptest::prelude::*;
use stablewalk::dilation::{ExponentStructure, NormalizationSequence};
use stablewalk::lattice::Site;
use stablewalk::steplaw::{LawSpec, StepLaw};

fn rotation(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilations_form_a_semigroup(a1 in 0.3..2.0f64, a2 in 0.3..2.0f64, th in 0.0..3.0f64, t in 0.1..10.0f64, s in 0.1..10.0f64) {
        let es = ExponentStructure::with_basis(rotation(th), &[a1, a2]).unwrap();
        let prod = es.power(t) * es.power(s);
        let direct = es.power(t * s);
        prop_assert!((prod - &direct).amax() < 1e-10 * direct.amax().max(1.0));
        prop_assert!((es.power(t).determinant() - t.powf(es.trace())).abs() < 1e-10 * t.powf(es.trace()).max(1.0));
    }

    #[test]
    fn floor_normalization_is_exactly_invertible(a1 in 0.5..2.0f64, a2 in 0.5..2.0f64, n in 1u64..1_000_000) {
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[a1, a2]).unwrap());
        let b = ns.build(n).unwrap();
        prop_assert!(b.is_invertible() && b.inverse_is_exact());
    }

    #[test]
    fn step_laws_are_symmetric(alpha in 0.3..1.95f64, x in -50i64..50, y in -50i64..50) {
        for spec in [LawSpec::Radial { dim: 1, alpha }, LawSpec::AxisProduct { alphas: vec![alpha, 1.0] }, LawSpec::Radial { dim: 2, alpha }] {
            let law = StepLaw::new(spec).unwrap();
            let p = if law.dim() == 1 { Site::from_slice(&[x]) } else { Site::from_slice(&[x, y]) };
            prop_assert_eq!(law.pmf(&p), law.pmf(&p.neg()));
            let c0 = law.char_fn(&vec![0.0; law.dim()]);
            prop_assert!((c0.value - 1.0).abs() < 1e-12);
        }
    }
}
