use chernoff_core::grid::{read_dump, spectral_shift, write_dump};
use chernoff_core::linear::power_norm_estimate;
use chernoff_core::operators::ChernoffGenerator;
use chernoff_core::random::random_wave;
use chernoff_core::verify::convergence_report;
use chernoff_core::{Grid, LinearOp, Preset, Propagator, PropagatorConfig, RegulatorFn};
use proptest::prelude::*;

fn small_line() -> Grid {
    Grid::line(32, 8.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shifts_compose_and_preserve_norm(seed in any::<u64>(), a in -8.0f64..8.0, b in -8.0f64..8.0) {
        let grid = small_line();
        let f = random_wave(&grid, seed);
        let ab = spectral_shift(&spectral_shift(&f, 0, a).unwrap(), 0, b).unwrap();
        let direct = spectral_shift(&f, 0, a + b).unwrap();
        prop_assert!(ab.distance(&direct).unwrap() <= 1e-12 * f.norm());
        prop_assert!((direct.norm() - f.norm()).abs() <= 1e-12 * f.norm());
    }

    #[test]
    fn generator_is_symmetric(seed in any::<u64>(), t in 1e-4f64..1.0, which in 0usize..6) {
        let grid = small_line();
        let spec = Preset::ALL[which].build(&grid, RegulatorFn::arctan(), 1.0).unwrap();
        let x = ChernoffGenerator::new(&spec, t).unwrap();
        let f = random_wave(&grid, seed);
        let g = random_wave(&grid, seed.wrapping_add(1));
        let lhs = x.apply(&f).unwrap().inner_product(&g).unwrap();
        let rhs = f.inner_product(&x.apply(&g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * f.norm() * g.norm());
    }

    #[test]
    fn propagation_is_unitary(seed in any::<u64>(), t in 0.0f64..1.0, log_n in 0u32..10, which in 0usize..6) {
        let grid = small_line();
        let spec = Preset::ALL[which].build(&grid, RegulatorFn::sin(), 1.0).unwrap();
        let psi0 = random_wave(&grid, seed);
        let psi = Propagator::new(spec).propagate(t, &PropagatorConfig::with_n(1 << log_n), &psi0).unwrap();
        prop_assert!((psi.norm() / psi0.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn w_norm_respects_bound(t in 1e-3f64..2.0, which in 0usize..4) {
        let grid = small_line();
        let w = [RegulatorFn::arctan(), RegulatorFn::sin(), RegulatorFn::tanh()][which % 3].clone();
        let m = w.bound();
        let spec = Preset::Harmonic.build(&grid, w, 1.0).unwrap();
        let x = ChernoffGenerator::new(&spec, t).unwrap();
        let est = power_norm_estimate(&x, 200, 1e-12, 7);
        prop_assert!(est.value <= (2.0 + m) * (1.0 + 1e-6));
    }

    #[test]
    fn dumps_round_trip(seed in any::<u64>(), n0 in 2usize..9, n1 in 2usize..9) {
        let grid = Grid::new(&[n0, n1], &[1.5, 2.5]).unwrap();
        let f = random_wave(&grid, seed);
        let mut buf = Vec::new();
        write_dump(&f, &mut buf).unwrap();
        prop_assert_eq!(read_dump(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn convergence_verdict_matches_violation(errors in prop::collection::vec(1e-8f64..1.0, 2..8)) {
        let n_list: Vec<usize> = (0..errors.len()).map(|i| 1 << i).collect();
        let r = convergence_report(&n_list, &errors);
        prop_assert_eq!(r.pass, r.worst_violation <= r.tolerance);
        prop_assert!(r.worst_violation >= 0.0);
    }
}
