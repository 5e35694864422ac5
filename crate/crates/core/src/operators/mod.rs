//! Operator families: multiplication, the regulator `w`, `F_0`, `F_k`, `F(t)`,
//! the d-dimensional `W(t)` and the Hamiltonians they approximate.

mod apply;
mod generator;
mod hamiltonian;
mod presets;
mod regulator;

pub use apply::{
    apply_f, apply_f0, apply_fk_binomial, apply_fk_composed, apply_h, apply_mult, apply_w, ROOT_UNDERFLOW,
};
pub use generator::{ChernoffGenerator, HamiltonianOp};
pub use hamiltonian::{CoefficientSet, Family, HamiltonianSpec, Mutation, Potential, MAX_ORDER};
pub use presets::{momentum_polynomial, Preset};
pub use regulator::{RegulatorFn, RegulatorKind};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::grid::{sample, sample_real, spectral_shift, Grid, WaveFunction};
    use crate::linear::LinearOp;
    use crate::random::{random_field, random_wave, rng};

    fn plane(grid: &Grid, m: i32) -> (f64, WaveFunction) {
        let kappa = 2.0 * PI * m as f64 / grid.length()[0];
        (kappa, sample(|x| Complex64::from_polar(1.0, kappa * x[0]), grid).unwrap())
    }

    fn gaussian(grid: &Grid, width: f64) -> WaveFunction {
        let c = grid.center();
        sample(
            |x| {
                let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
            },
            grid,
        )
        .unwrap()
    }

    fn unit_k1(grid: &Grid) -> HamiltonianSpec {
        let n = grid.total_size();
        HamiltonianSpec::one_d(
            CoefficientSet::new(grid, vec![0.0; n], vec![vec![1.0; n]]).unwrap(),
            RegulatorFn::arctan(),
        )
    }

    fn rel(a: &WaveFunction, b: &WaveFunction) -> f64 {
        a.distance(b).unwrap() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn mult_identity_zero_and_pointwise() {
        let g = Grid::line(256, 32.0).unwrap();
        let f = gaussian(&g, 1.0);
        assert_eq!(apply_mult(&vec![1.0; 256], &f).unwrap(), f);
        assert_eq!(apply_mult(&vec![0.0; 256], &f).unwrap().norm(), 0.0);
        let x = sample_real(|x| x[0], &g).unwrap();
        let expect = sample(|x| Complex64::new(x[0] * (-(x[0] - 16.0).powi(2) / 2.0).exp(), 0.0), &g).unwrap();
        assert!(rel(&apply_mult(&x, &f).unwrap(), &expect) <= 1e-14);
        assert!(apply_mult(&[1.0; 4], &f).is_err());
    }

    #[test]
    fn f0_cases() {
        let g = Grid::line(256, 32.0).unwrap();
        let f = gaussian(&g, 1.0);
        let a0 = sample_real(|x| (x[0] - 16.0).powi(2), &g).unwrap();
        assert_eq!(apply_f0(0.0, &a0, &RegulatorFn::arctan(), 1.0, &f).unwrap().norm(), 0.0);

        let t = 0.25;
        let half_pi = vec![PI / (2.0 * t); 256];
        assert!(rel(&apply_f0(t, &half_pi, &RegulatorFn::sin(), 1.0, &f).unwrap(), &f) <= 1e-15);

        let t = 1e-6;
        let got = apply_f0(t, &a0, &RegulatorFn::arctan(), 1.0, &f).unwrap();
        let linear = apply_mult(&a0.iter().map(|a| t * a).collect::<Vec<_>>(), &f).unwrap();
        assert!(rel(&got, &linear) <= 1e-9, "{}", rel(&got, &linear));
        assert!(apply_f0(-1.0, &a0, &RegulatorFn::arctan(), 1.0, &f).is_err());
    }

    #[test]
    fn fk_plane_wave_symbols() {
        let g = Grid::line(64, 8.0).unwrap();
        let ones = vec![1.0; 64];
        for &t in &[1e-4f64, 0.01, 0.3, 2.0] {
            for m in [-7, 1, 3, 20] {
                let (kappa, f) = plane(&g, m);
                let s1 = 2.0 * (kappa * t.sqrt()).cos() - 2.0;
                let got = apply_fk_composed(t, 1, &ones, &f).unwrap();
                assert!(got.distance(&f.scaled(Complex64::new(s1, 0.0))).unwrap() <= 1e-12 * f.norm());
                let s2 = (2.0 * (kappa * t.powf(0.25)).cos() - 2.0).powi(2);
                let got = apply_fk_composed(t, 2, &ones, &f).unwrap();
                assert!(got.distance(&f.scaled(Complex64::new(s2, 0.0))).unwrap() <= 1e-12 * f.norm());
            }
        }
    }

    #[test]
    fn fk_and_binomial_vanish_at_zero() {
        let g = Grid::line(32, 4.0).unwrap();
        let f = random_wave(&g, 3);
        let a = random_field(&g, &mut rng(4), -1.0, 1.0);
        for k in 1..=3 {
            assert_eq!(apply_fk_composed(0.0, k, &a, &f).unwrap().norm(), 0.0);
            assert_eq!(apply_fk_binomial(0.0, k, &a, &f).unwrap().norm(), 0.0);
        }
        assert!(matches!(apply_fk_composed(0.1, 0, &a, &f), Err(crate::ChernoffError::OrderOutOfRange { .. })));
        assert!(apply_fk_binomial(0.1, MAX_ORDER + 1, &a, &f).is_err());
    }

    #[test]
    fn binomial_matches_composed() {
        let g = Grid::line(128, 10.0).unwrap();
        let mut r = rng(11);
        for trial in 0..10u64 {
            let f = random_wave(&g, 100 + trial);
            let a = random_field(&g, &mut r, -2.0, 2.0);
            for k in 1..=3 {
                for &t in &[1e-3, 0.07, 0.9] {
                    let c = apply_fk_composed(t, k, &a, &f).unwrap();
                    let b = apply_fk_binomial(t, k, &a, &f).unwrap();
                    assert!(rel(&b, &c) <= 1e-11, "k={k} t={t}: {}", rel(&b, &c));
                }
            }
        }
    }

    // Band-limited p and f keep every product below Nyquist, so the shifts in
    // the closed-form expansion are exact translates.
    #[test]
    fn sturm_liouville_matches_direct_expansion() {
        let n = 64;
        let l = 12.0;
        let g = Grid::line(n, l).unwrap();
        let spec = Preset::SturmLiouville.build(&g, RegulatorFn::arctan(), 1.0).unwrap();
        let f_at = |x: f64| {
            let k = 2.0 * PI / l;
            Complex64::new((k * x).cos() + 0.3 * (3.0 * k * x).sin(), 0.5 * (2.0 * k * x).cos())
        };
        let p_at = |x: f64| 1.0 + 0.5 * (2.0 * PI * x / l).sin();
        let q_at = |x: f64| (x - 0.5 * l).powi(2);
        let f = sample(|x| f_at(x[0]), &g).unwrap();
        for &t in &[1e-3f64, 0.02, 0.4] {
            let s = t.sqrt();
            let direct = sample(
                |x| {
                    let x = x[0];
                    f_at(x) * (t * q_at(x)).atan() + p_at(x + s) * f_at(x + s) - (p_at(x + s) + p_at(x)) * f_at(x)
                        + p_at(x) * f_at(x - s)
                },
                &g,
            )
            .unwrap();
            let got = apply_f(t, &spec, &f).unwrap();
            assert!(rel(&got, &direct) <= 1e-12, "t={t}: {}", rel(&got, &direct));

            let HamiltonianSpec::OneD { coeffs, .. } = &spec else { unreachable!() };
            let f1 = apply_fk_binomial(t, 1, coeffs.coefficient(1), &f).unwrap();
            let no_f0 = direct.sub(&apply_f0(t, coeffs.a0(), spec.regulator(), 1.0, &f).unwrap()).unwrap();
            assert!(rel(&f1, &no_f0) <= 1e-12);
        }
    }

    #[test]
    fn f_of_unit_k1_is_cosine_symbol() {
        let g = Grid::line(32, 6.0).unwrap();
        let spec = unit_k1(&g);
        let (kappa, f) = plane(&g, 5);
        let t = 0.05;
        let got = apply_f(t, &spec, &f).unwrap();
        let expect = f.scaled(Complex64::new(2.0 * (kappa * t.sqrt()).cos() - 2.0, 0.0));
        assert!(got.distance(&expect).unwrap() <= 1e-12 * f.norm());
        assert_eq!(apply_f(0.0, &spec, &f).unwrap().norm(), 0.0);
    }

    #[test]
    fn w_free_plane_wave_and_zero() {
        let g = Grid::line(64, 16.0).unwrap();
        let spec = Preset::Free.build(&g, RegulatorFn::arctan(), 1.0).unwrap();
        for m in [1, 4, -9] {
            let (kappa, f) = plane(&g, m);
            for &t in &[1e-3, 0.1, 1.0] {
                let got = apply_w(t, &spec, &f).unwrap();
                let expect = f.scaled(Complex64::new((kappa * t.sqrt()).cos() - 1.0, 0.0));
                assert!(got.distance(&expect).unwrap() <= 1e-12 * f.norm());
            }
        }
        assert_eq!(apply_w(0.0, &spec, &random_wave(&g, 1)).unwrap().norm(), 0.0);
        assert!(apply_f(0.1, &spec, &random_wave(&g, 1)).is_err());
    }

    #[test]
    fn generator_agrees_with_literal_evaluation() {
        let line = Grid::line(128, 20.0).unwrap();
        let square = Grid::cube(2, 16, 8.0).unwrap();
        let specs = [
            Preset::SturmLiouville.build(&line, RegulatorFn::arctan(), 1.0).unwrap(),
            Preset::MomentumPoly.build(&line, RegulatorFn::tanh(), 1.0).unwrap(),
            Preset::Anharmonic.build(&line, RegulatorFn::sin(), 0.7).unwrap(),
            Preset::Harmonic.build(&square, RegulatorFn::arctan(), -1.3).unwrap(),
        ];
        for spec in &specs {
            let f = random_wave(spec.grid(), 9);
            for &t in &[1e-4, 0.03, 0.8] {
                let literal = match spec.family() {
                    Family::OneD => apply_f(t, spec, &f).unwrap(),
                    Family::MultiD => apply_w(t, spec, &f).unwrap(),
                };
                let fast = ChernoffGenerator::new(spec, t).unwrap().apply(&f).unwrap();
                assert!(rel(&fast, &literal) <= 1e-12, "{}", rel(&fast, &literal));
            }
        }
    }

    #[test]
    fn generators_are_self_adjoint() {
        let line = Grid::line(128, 20.0).unwrap();
        let square = Grid::cube(2, 16, 8.0).unwrap();
        let specs = [
            Preset::SturmLiouville.build(&line, RegulatorFn::arctan(), 1.0).unwrap(),
            Preset::MomentumPoly.build(&line, RegulatorFn::arctan(), 1.0).unwrap(),
            Preset::Quartic.build(&square, RegulatorFn::arctan(), 1.0).unwrap(),
        ];
        for spec in &specs {
            for &t in &[1e-4, 1e-2, 0.5] {
                let op = ChernoffGenerator::new(spec, t).unwrap();
                for seed in 0..20 {
                    let f = random_wave(spec.grid(), 2 * seed);
                    let g = random_wave(spec.grid(), 2 * seed + 1);
                    let lhs = op.apply(&f).unwrap().inner_product(&g).unwrap();
                    let rhs = f.inner_product(&op.apply(&g).unwrap()).unwrap();
                    assert!((lhs - rhs).norm() <= 1e-11 * f.norm() * g.norm());
                }
            }
        }
    }

    #[test]
    fn w_norm_within_bound() {
        let g = Grid::line(128, 16.0).unwrap();
        for reg in [RegulatorFn::arctan(), RegulatorFn::sin(), RegulatorFn::tanh()] {
            let bound = 2.0 + reg.bound();
            let spec = Preset::Harmonic.build(&g, reg, 1.0).unwrap();
            for &t in &[0.01, 0.1, 1.0] {
                let op = ChernoffGenerator::new(&spec, t).unwrap();
                let est = crate::linear::power_norm_estimate(&op, 500, 1e-10, 5);
                assert!(est.value <= bound * (1.0 + 1e-6), "{} > {bound}", est.value);
                assert!(op.norm_upper_bound() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn mutation_changes_the_root() {
        let g = Grid::line(32, 6.0).unwrap();
        let spec = unit_k1(&g);
        let (kappa, f) = plane(&g, 2);
        let t = 0.04;
        let broken = ChernoffGenerator::with_mutation(&spec, t, Mutation::WrongRootExponent).unwrap();
        let expect = f.scaled(Complex64::new(2.0 * (kappa * t).cos() - 2.0, 0.0));
        assert!(broken.apply(&f).unwrap().distance(&expect).unwrap() <= 1e-12 * f.norm());
    }

    #[test]
    fn hamiltonian_spectral_cases() {
        let g = Grid::cube(2, 16, 2.0 * PI).unwrap();
        let spec = Preset::Free.build(&g, RegulatorFn::arctan(), 1.0).unwrap();
        let f = sample(|x| Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1]), &g).unwrap();
        let got = apply_h(&spec, &f).unwrap();
        assert!(got.distance(&f.scaled(Complex64::new(-6.5, 0.0))).unwrap() <= 1e-12 * f.norm());

        let line = Grid::line(64, 2.0 * PI).unwrap();
        let f = sample(|x| Complex64::new((4.0 * x[0]).sin(), 0.0), &line).unwrap();
        let got = apply_h(&unit_k1(&line), &f).unwrap();
        assert!(got.distance(&f.scaled(Complex64::new(-16.0, 0.0))).unwrap() <= 1e-11 * f.norm());
    }

    fn fd_second_derivative(v: &[Complex64], h: f64) -> Vec<Complex64> {
        const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut acc = v[i] * C[0];
                for (j, c) in C.iter().enumerate().skip(1) {
                    acc += (v[(i + j) % n] + v[(i + n - j) % n]) * *c;
                }
                acc / (h * h)
            })
            .collect()
    }

    #[test]
    fn fourth_order_hamiltonian_matches_finite_differences() {
        let n = 256;
        let l = 32.0;
        let g = Grid::line(n, l).unwrap();
        let a2 = sample_real(|x| 1.0 + 0.5 * (2.0 * PI * x[0] / l).sin(), &g).unwrap();
        let coeffs = CoefficientSet::new(&g, vec![0.0; n], vec![vec![0.0; n], a2.clone()]).unwrap();
        let spec = HamiltonianSpec::one_d(coeffs, RegulatorFn::arctan());
        let f = gaussian(&g, 1.0);
        let h = g.spacing()[0];
        let d2: Vec<Complex64> = fd_second_derivative(f.values(), h).iter().zip(&a2).map(|(v, a)| v * a).collect();
        let oracle = WaveFunction::new(&g, fd_second_derivative(&d2, h)).unwrap();
        let got = apply_h(&spec, &f).unwrap();
        assert!(rel(&got, &oracle) <= 1e-6, "{}", rel(&got, &oracle));
    }

    #[test]
    fn preset_catalog() {
        let line = Grid::line(16, 4.0).unwrap();
        let square = Grid::cube(2, 8, 4.0).unwrap();
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
            assert!(p.build(&line, RegulatorFn::arctan(), 1.0).is_ok());
            assert_eq!(p.build(&square, RegulatorFn::arctan(), 1.0).is_ok(), p.is_multi_d());
        }
        assert!(Preset::from_name("nope").is_none());
        let spec = Preset::MomentumPoly.build(&line, RegulatorFn::arctan(), 1.0).unwrap();
        let HamiltonianSpec::OneD { coeffs, .. } = spec else { panic!() };
        assert_eq!(coeffs.order(), 2);
        assert_eq!(coeffs.coefficient(1)[0], -1.0);
        assert_eq!(coeffs.coefficient(2)[0], 1.0);
        assert_eq!(coeffs.a0()[0], 2.0);
    }

    #[test]
    fn shift_is_not_self_adjoint() {
        let g = Grid::line(32, 5.0).unwrap();
        let f = random_wave(&g, 1);
        let h = random_wave(&g, 2);
        let lhs = spectral_shift(&f, 0, 0.37).unwrap().inner_product(&h).unwrap();
        let rhs = f.inner_product(&spectral_shift(&h, 0, 0.37).unwrap()).unwrap();
        assert!((lhs - rhs).norm() > 1e-3 * f.norm() * h.norm());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_f_norm_envelope(t in 0.0f64..1.0, seed in 0u64..1000) {
            let g = Grid::line(64, 10.0).unwrap();
            let spec = Preset::MomentumPoly.build(&g, RegulatorFn::arctan(), 1.0).unwrap();
            let HamiltonianSpec::OneD { coeffs, regulator } = &spec else { unreachable!() };
            let envelope = (1..=coeffs.order()).map(|k| 4f64.powi(k as i32) * coeffs.max_abs(k)).sum::<f64>()
                + regulator.bound();
            let op = ChernoffGenerator::new(&spec, t).unwrap();
            let f = random_wave(&g, seed);
            prop_assert!(op.apply(&f).unwrap().norm() <= envelope * f.norm() * (1.0 + 1e-12));
        }

        #[test]
        fn prop_binomial_composed(k in 1usize..=3, t in 1e-6f64..2.0, seed in 0u64..1000) {
            let g = Grid::line(32, 7.0).unwrap();
            let f = random_wave(&g, seed);
            let a = random_field(&g, &mut rng(seed ^ 0xabc), -3.0, 3.0);
            let c = apply_fk_composed(t, k, &a, &f).unwrap();
            let b = apply_fk_binomial(t, k, &a, &f).unwrap();
            prop_assert!(b.distance(&c).unwrap() <= 1e-11 * c.norm().max(f.norm()));
        }
    }
}
