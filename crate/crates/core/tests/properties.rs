use std::sync::OnceLock;

use morsekit::basis::{MixingCoefficients, MorseSystem, MuBasis};
use morsekit::coherent::{Axis, UncertaintyContext};
use morsekit::params::{decompose, RationalityMode};
use morsekit::quadrature::QuadratureConfig;
use morsekit::spectrum::order_spectrum;
use num_complex::Complex64;
use proptest::prelude::*;

fn context() -> &'static UncertaintyContext {
    static CONTEXT: OnceLock<UncertaintyContext> = OnceLock::new();
    CONTEXT.get_or_init(|| {
        let param = decompose("3pi", RationalityMode::Irrational).unwrap();
        let system = MorseSystem::new(param.clone(), 1.0).unwrap();
        let basis = MuBasis::new(
            order_spectrum(&param).unwrap(),
            MixingCoefficients::symmetric(),
        )
        .unwrap();
        UncertaintyContext::new(system, basis, &QuadratureConfig::default()).unwrap()
    })
}

fn mixing(theta: f64, phase: f64) -> MixingCoefficients {
    MixingCoefficients::new(
        Complex64::from_polar(theta.cos(), phase),
        Complex64::new(theta.sin(), 0.0),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn off_sphere_mixing_is_rejected(re in -2.0f64..2.0, im in -2.0f64..2.0, d in -2.0f64..2.0) {
        let g = Complex64::new(re, im);
        let dz = Complex64::new(d, 0.0);
        let off = (g.norm_sqr() + dz.norm_sqr() - 1.0).abs();
        let built = MixingCoefficients::new(g, dz);
        prop_assert_eq!(built.is_ok(), off <= 1e-12);
        if off > 1e-9 {
            let fixed = MixingCoefficients::normalized(g, dz);
            prop_assert!(fixed.is_ok() || g.norm() + dz.norm() == 0.0);
        }
    }

    #[test]
    fn swapped_mixing_mirrors_every_state(
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        phase in -3.0f64..3.0,
        index in 0usize..55,
        x in -1.4f64..6.0,
        y in -1.4f64..6.0,
    ) {
        let ctx = context();
        let m = mixing(theta, phase);
        let a = MuBasis::new(ctx.basis().spectrum().clone(), m).unwrap();
        let b = MuBasis::new(ctx.basis().spectrum().clone(), m.swapped()).unwrap();
        let system = ctx.system();
        let da = system.mu_wavefunction(a.state(index).unwrap(), x, y).unwrap().norm_sqr();
        let db = system.mu_wavefunction(b.state(index).unwrap(), y, x).unwrap().norm_sqr();
        prop_assert!((da - db).abs() <= 1e-13 * da.max(1e-300));
    }

    #[test]
    fn separability(n in 0u32..10, m in 0u32..10, x in -1.5f64..20.0, y in -1.5f64..20.0) {
        let system = context().system();
        let product = system.mode(n).unwrap().value(x) * system.mode(m).unwrap().value(y);
        let direct = system.eigenfunction(n, m, x, y).unwrap();
        prop_assert!((product - direct).abs() <= 2.0 * f64::EPSILON * direct.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uncertainty_floor_for_complex_amplitudes(
        r in 0.0f64..6.0,
        arg in -3.1f64..3.1,
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        phase in -3.0f64..3.0,
    ) {
        let ctx = context().with_mixing(mixing(theta, phase)).unwrap();
        let state = ctx.coherent_expansion(Complex64::from_polar(r, arg)).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let report = ctx.engine().report(&state, axis).unwrap();
            prop_assert!(report.product >= 0.25 - 1e-9, "{:?}", report);
            prop_assert!(report.mean_q2 >= report.mean_q * report.mean_q);
            prop_assert!(report.mean_p2 >= report.mean_p * report.mean_p);
            prop_assert!((report.mean_p2 - report.mean_p2_laplacian).abs() <= 1e-6 * report.mean_p2);
        }
    }
}
