//! Property harness: self-adjointness, tangency, norm bounds, continuity and
//! convergence of the Chernoff iterate, each summarized as a [`PropertyReport`].

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{ChernoffError, Result};
use crate::grid::{spectral_shift, WaveFunction};
use crate::linear::{power_norm_estimate, LinearOp};
use crate::operators::{ChernoffGenerator, HamiltonianOp, HamiltonianSpec, Mutation};
use crate::propagator::{Propagator, PropagatorConfig};
use crate::random::{random_wave_with, rng};

pub const SELF_ADJOINT_TOL: f64 = 1e-11;
pub const TANGENCY_MIN_SLOPE: f64 = 1.2;
/// Tangency errors below this multiple of `‖φ‖` are treated as rounding noise.
pub const TANGENCY_NOISE_FLOOR: f64 = 1e-13;
pub const NORM_BOUND_SLACK: f64 = 1e-6;
pub const SHIFT_ISOMETRY_TOL: f64 = 1e-12;
pub const POWER_ITERATION_STEPS: usize = 500;
pub const CONVERGENCE_SLACK: f64 = 0.10;
pub const CONVERGENCE_RATIO: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub samples: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub fitted_order: Option<f64>,
    pub pass: bool,
    pub details: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn new(property_id: &str, samples: usize, worst_violation: f64, tolerance: f64) -> Self {
        Self {
            property_id: property_id.into(),
            samples,
            worst_violation,
            tolerance,
            fitted_order: None,
            pass: worst_violation <= tolerance,
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Worst `|⟨X(t)f, g⟩ − ⟨f, X(t)g⟩| / (‖f‖·‖g‖)` over random pairs and `t`.
pub fn verify_self_adjoint<O, F>(op_at: F, t_list: &[f64], trials: usize, tol: f64, seed: u64) -> Result<PropertyReport>
where
    O: LinearOp,
    F: Fn(f64) -> Result<O>,
{
    if trials == 0 {
        return Err(ChernoffError::InvalidParameter("self-adjointness needs at least one trial".into()));
    }
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut per_t = Vec::new();
    for &t in t_list {
        let op = op_at(t)?;
        let mut worst_t = 0.0f64;
        for _ in 0..trials {
            let f = random_wave_with(op.grid(), &mut r);
            let g = random_wave_with(op.grid(), &mut r);
            let lhs = op.apply(&f)?.inner_product(&g)?;
            let rhs = f.inner_product(&op.apply(&g)?)?;
            worst_t = worst_t.max((lhs - rhs).norm() / (f.norm() * g.norm()));
        }
        per_t.push((t, worst_t));
        worst = worst.max(worst_t);
    }
    let mut report = PropertyReport::new("self_adjoint", trials * t_list.len(), worst, tol).detail("seed", seed as f64);
    for (t, v) in per_t {
        report = report.detail(format!("violation(t={t:e})"), v);
    }
    Ok(report)
}

/// Least-squares slope of `ln e(t)` against `ln t` for
/// `e(t) = ‖X(t)φ − t·Hφ‖`, where `X` is `F` or `W` and `H` the matching
/// Hamiltonian (so `(I + F(t))φ − φ − t𝓗φ` in the one-dimensional case).
pub fn verify_tangency(
    spec: &HamiltonianSpec,
    phi: &WaveFunction,
    t_grid: &[f64],
    mutation: Mutation,
) -> Result<PropertyReport> {
    let h_phi = HamiltonianOp::new(spec).apply(phi)?;
    let floor = TANGENCY_NOISE_FLOOR * phi.norm();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &t in t_grid {
        let x_phi = ChernoffGenerator::with_mutation(spec, t, mutation)?.apply(phi)?;
        let e = x_phi.axpy(Complex64::new(-t, 0.0), &h_phi)?.norm();
        if e < floor {
            excluded.push(t);
        } else {
            points.push((t, e));
        }
    }
    let slope = if points.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(t, e)| (t.ln(), e.ln())).unzip();
        fit_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let violation = if slope.is_finite() { (TANGENCY_MIN_SLOPE - slope).max(0.0) } else { f64::INFINITY };
    let mut report = PropertyReport::new("tangency", points.len(), violation, 0.0).detail("slope", slope);
    report.fitted_order = Some(slope);
    for (t, e) in &points {
        report = report.detail(format!("e(t={t:e})"), *e);
    }
    if !excluded.is_empty() {
        report.notes.push(format!("{} point(s) below the noise floor excluded: {excluded:?}", excluded.len()));
    }
    if mutation != Mutation::None {
        report.notes.push(format!("mutation {mutation:?} injected"));
    }
    Ok(report)
}

/// Power-iteration norm estimates of `W(t)` against `2 + M`, or of `F(t)`
/// against `Σ 4^k max|a_k| + M`, plus shift isometry on random data.
pub fn verify_norm_bounds(spec: &HamiltonianSpec, t_list: &[f64], seed: u64) -> Result<PropertyReport> {
    let m = spec.regulator().bound();
    let bound = match spec {
        HamiltonianSpec::MultiD { .. } => 2.0 + m,
        HamiltonianSpec::OneD { coeffs, .. } => {
            m + (1..=coeffs.order()).map(|k| 4f64.powi(k as i32) * coeffs.max_abs(k)).sum::<f64>()
        }
    };
    let limit = bound * (1.0 + NORM_BOUND_SLACK);
    let mut worst = 0.0f64;
    let mut report_details = vec![("bound".to_string(), bound), ("seed".to_string(), seed as f64)];
    let mut notes = Vec::new();
    for (i, &t) in t_list.iter().enumerate() {
        let op = ChernoffGenerator::new(spec, t)?;
        let est = power_norm_estimate(&op, POWER_ITERATION_STEPS, 1e-12, seed.wrapping_add(i as u64));
        if !est.converged {
            notes.push(format!("power iteration at t={t:e} did not settle in {} steps; inconclusive", est.steps));
        }
        worst = worst.max(est.value - limit);
        report_details.push((format!("norm(t={t:e})"), est.value));
    }
    let isometry = shift_isometry_violation(spec, seed, 20)?;
    report_details.push(("shift_isometry".into(), isometry));
    // Both checks are folded into one violation measured against zero.
    let violation = worst.max(0.0).max(if isometry > SHIFT_ISOMETRY_TOL { isometry } else { 0.0 });
    let id = match spec {
        HamiltonianSpec::MultiD { .. } => "norm_bound",
        HamiltonianSpec::OneD { .. } => "uniform_bound",
    };
    let mut report = PropertyReport::new(id, t_list.len(), violation, 0.0);
    report.details = report_details;
    report.notes = notes;
    Ok(report)
}

fn shift_isometry_violation(spec: &HamiltonianSpec, seed: u64, trials: usize) -> Result<f64> {
    let grid = spec.grid();
    let mut r = rng(seed ^ 0x0054_17f7);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = random_wave_with(grid, &mut r);
        let axis = r.random_range(0..grid.dim());
        let offset = r.random_range(-1.0..1.0) * grid.length()[axis];
        let g = spectral_shift(&f, axis, offset)?;
        worst = worst.max((g.norm() - f.norm()).abs() / f.norm());
    }
    Ok(worst)
}

/// `‖X(t + δ)f − X(t)f‖` along decreasing `δ`; passes when the sequence is
/// non-increasing and ends below a tenth of its start.
///
/// This samples the strong-continuity statement on one `f` only.
pub fn verify_strong_continuity(
    spec: &HamiltonianSpec,
    f: &WaveFunction,
    t: f64,
    deltas: &[f64],
) -> Result<PropertyReport> {
    let base = ChernoffGenerator::new(spec, t)?.apply(f)?;
    let mut gaps = Vec::new();
    for &d in deltas {
        let moved = ChernoffGenerator::new(spec, t + d)?.apply(f)?;
        gaps.push(moved.distance(&base)?);
    }
    let mut violation = 0.0f64;
    for w in gaps.windows(2) {
        violation = violation.max(w[1] - w[0]);
    }
    if let (Some(first), Some(last)) = (gaps.first(), gaps.last()) {
        violation = violation.max(last - first / 10.0);
    }
    let mut report = PropertyReport::new("strong_continuity", gaps.len(), violation.max(0.0), 0.0);
    for (d, g) in deltas.iter().zip(&gaps) {
        report = report.detail(format!("gap(delta={d:e})"), *g);
    }
    report.notes.push("sampled property: checked on a single trial function".into());
    Ok(report)
}

/// `ε(n) = ‖propagate(t, n, ψ0) − oracle‖` for each `n`.
pub fn convergence_errors(
    propagator: &Propagator,
    psi0: &WaveFunction,
    t: f64,
    n_list: &[usize],
    oracle: &WaveFunction,
    base: &PropagatorConfig,
) -> Result<Vec<f64>> {
    n_list.iter().map(|&n| propagator.propagate(t, &PropagatorConfig { n, ..*base }, psi0)?.distance(oracle)).collect()
}

/// Ratio test on precomputed errors: each `ε` within 10% of its predecessor
/// or below it, and `ε(last) < ε(first)/4`. The fitted order is `−slope` of
/// `ln ε` against `ln n`.
pub fn convergence_report(n_list: &[usize], errors: &[f64]) -> PropertyReport {
    let mut violation = 0.0f64;
    for w in errors.windows(2) {
        violation = violation.max(w[1] / ((1.0 + CONVERGENCE_SLACK) * w[0]) - 1.0);
    }
    if let (Some(first), Some(last)) = (errors.first(), errors.last()) {
        violation = violation.max(last * CONVERGENCE_RATIO / first - 1.0);
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let order = if xs.len() >= 2 { -fit_slope(&xs, &ys) } else { f64::NAN };
    let mut report = PropertyReport::new("convergence", errors.len(), violation.max(0.0), 0.0);
    report.fitted_order = Some(order);
    for (n, e) in n_list.iter().zip(errors) {
        report = report.detail(format!("eps(n={n})"), *e);
    }
    report
}

pub fn verify_convergence(
    propagator: &Propagator,
    psi0: &WaveFunction,
    t: f64,
    n_list: &[usize],
    oracle: &WaveFunction,
    base: &PropagatorConfig,
) -> Result<PropertyReport> {
    let errors = convergence_errors(propagator, psi0, t, n_list, oracle, base)?;
    Ok(convergence_report(n_list, &errors))
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `count` points from `lo` to `hi` in geometric progression.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Settings for [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub mutation: Mutation,
    pub trials: usize,
    pub self_adjoint_t: Vec<f64>,
    pub tangency_t: Vec<f64>,
    pub norm_t: Vec<f64>,
    /// `(t, n_list, reference)` for the convergence check, when a reference exists.
    pub convergence: Option<(f64, Vec<usize>, WaveFunction)>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            mutation: Mutation::None,
            trials: 200,
            self_adjoint_t: vec![1e-4, 1e-2, 0.5],
            tangency_t: geometric_grid(1e-5, 1e-2, 13),
            norm_t: vec![0.01, 0.1, 1.0],
            convergence: None,
        }
    }
}

/// Every property applicable to `spec`, in a fixed order.
pub fn run_suite(spec: &HamiltonianSpec, phi: &WaveFunction, opts: &SuiteOptions) -> Result<Vec<PropertyReport>> {
    let mutation = opts.mutation;
    let mut out = vec![
        verify_self_adjoint(
            |t| ChernoffGenerator::with_mutation(spec, t, mutation),
            &opts.self_adjoint_t,
            opts.trials,
            SELF_ADJOINT_TOL,
            opts.seed,
        )?,
        verify_tangency(spec, phi, &opts.tangency_t, mutation)?,
        verify_norm_bounds(spec, &opts.norm_t, opts.seed)?,
        verify_strong_continuity(spec, phi, 0.1, &geometric_grid(1e-2, 1e-6, 5))?,
    ];
    if let Some((t, n_list, reference)) = &opts.convergence {
        let p = Propagator::with_mutation(spec.clone(), mutation);
        out.push(verify_convergence(&p, phi, *t, n_list, reference, &PropagatorConfig::default())?);
    }
    Ok(out)
}
