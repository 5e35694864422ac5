//! Matrix-free operator exponentials and the Chernoff iterate.

use std::collections::HashMap;

use num_complex::Complex64;
use parking_lot::RwLock;
use serde::Serialize;

use crate::error::{ChernoffError, Result};
use crate::grid::WaveFunction;
use crate::linear::{power_norm_estimate, LinearOp};
use crate::operators::{ChernoffGenerator, HamiltonianSpec, Mutation};

/// Power-iteration steps behind the scaling decision.
pub const NORM_ESTIMATE_STEPS: usize = 20;
const NORM_ESTIMATE_SEED: u64 = 0x5eed_c4e7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropagatorConfig {
    pub n: usize,
    pub taylor_tol: f64,
    pub max_terms: usize,
    pub squaring_threshold: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { n: 1, taylor_tol: 1e-14, max_terms: 400, squaring_threshold: 1.0 }
    }
}

impl PropagatorConfig {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(ChernoffError::InvalidParameter("n must be at least 1".into()));
        }
        if self.taylor_tol.is_nan() || self.taylor_tol <= 0.0 {
            return Err(ChernoffError::InvalidParameter(format!("taylor_tol {} must be positive", self.taylor_tol)));
        }
        if self.max_terms == 0 {
            return Err(ChernoffError::InvalidParameter("max_terms must be at least 1".into()));
        }
        if !(self.squaring_threshold > 0.0 && self.squaring_threshold.is_finite()) {
            return Err(ChernoffError::InvalidParameter(format!(
                "squaring_threshold {} must be positive",
                self.squaring_threshold
            )));
        }
        Ok(())
    }
}

/// Per-term norms `‖c^q/q!·X^q f‖` of one Taylor sum.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SeriesTrace {
    pub partial_norms: Vec<f64>,
    pub terms_used: usize,
    pub converged: bool,
}

/// `e^{cX} f` by Taylor summation, with scaling and squaring driven by a
/// power-iteration estimate of `‖X‖`.
pub fn exp_apply(op: &dyn LinearOp, c: Complex64, f: &WaveFunction, cfg: &PropagatorConfig) -> Result<WaveFunction> {
    if c == Complex64::new(0.0, 0.0) {
        return Ok(f.clone());
    }
    let norm = power_norm_estimate(op, NORM_ESTIMATE_STEPS, 0.0, NORM_ESTIMATE_SEED).value;
    exp_apply_with_norm(op, c, f, cfg, norm)
}

/// As [`exp_apply`] with a caller-supplied estimate of `‖X‖`.
pub fn exp_apply_with_norm(
    op: &dyn LinearOp,
    c: Complex64,
    f: &WaveFunction,
    cfg: &PropagatorConfig,
    op_norm: f64,
) -> Result<WaveFunction> {
    cfg.validate()?;
    if !(c.re.is_finite() && c.im.is_finite()) {
        return Err(ChernoffError::InvalidParameter(format!("exponent coefficient {c} is not finite")));
    }
    if f.grid() != op.grid() {
        return Err(ChernoffError::GridMismatch);
    }
    if c == Complex64::new(0.0, 0.0) {
        return Ok(f.clone());
    }
    let s = squarings(c.norm() * op_norm, cfg.squaring_threshold);
    let factor = c / 2f64.powi(s as i32);
    let mut v = f.values().to_vec();
    for _ in 0..(1u64 << s) {
        let (next, trace) = taylor(op, factor, &v, cfg.max_terms, Some(cfg.taylor_tol));
        if !trace.converged {
            return Err(ChernoffError::SeriesNotConverged { trace });
        }
        v = next;
    }
    let out = WaveFunction::from_raw(f.grid(), v);
    if !out.is_finite() {
        return Err(ChernoffError::InvalidParameter("operator exponential produced non-finite values".into()));
    }
    Ok(out)
}

/// Smallest `s` with `x / 2^s ≤ threshold`.
fn squarings(x: f64, threshold: f64) -> u32 {
    if x.is_nan() || x <= threshold {
        return 0;
    }
    let mut s = (x / threshold).log2().ceil().max(0.0) as u32;
    while x / 2f64.powi(s as i32) > threshold {
        s += 1;
    }
    s.min(62)
}

/// Sums `Σ_{q ≤ cap} (c X)^q/q! v`. With `tol`, stops at the first term whose
/// norm is at most `tol·‖v‖`.
fn taylor(
    op: &dyn LinearOp,
    c: Complex64,
    v: &[Complex64],
    cap: usize,
    tol: Option<f64>,
) -> (Vec<Complex64>, SeriesTrace) {
    let base = euclid(v);
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    let mut trace = SeriesTrace { partial_norms: vec![base], terms_used: 1, converged: false };
    if base == 0.0 {
        trace.converged = true;
        return (sum, trace);
    }
    for q in 1..=cap {
        let scale = c / q as f64;
        term = op.apply_values(&term);
        term.iter_mut().for_each(|x| *x *= scale);
        sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
        let tn = euclid(&term);
        trace.partial_norms.push(tn);
        trace.terms_used = q + 1;
        if let Some(tol) = tol {
            if tn <= tol * base {
                trace.converged = true;
                break;
            }
        }
    }
    (sum, trace)
}

fn euclid(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Chernoff propagator for one spec, caching norm estimates per step size.
pub struct Propagator {
    spec: HamiltonianSpec,
    mutation: Mutation,
    norms: RwLock<HashMap<u64, f64>>,
}

impl Propagator {
    pub fn new(spec: HamiltonianSpec) -> Self {
        Self::with_mutation(spec, Mutation::None)
    }

    pub fn with_mutation(spec: HamiltonianSpec, mutation: Mutation) -> Self {
        Self { spec, mutation, norms: RwLock::new(HashMap::new()) }
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    /// `F(t)` or `W(t)`, including any injected mutation.
    pub fn generator(&self, t: f64) -> Result<ChernoffGenerator> {
        ChernoffGenerator::with_mutation(&self.spec, t, self.mutation)
    }

    /// Cached power-iteration estimate of `‖F(t)‖` or `‖W(t)‖`.
    pub fn generator_norm(&self, t: f64) -> Result<f64> {
        if let Some(v) = self.norms.read().get(&t.to_bits()) {
            return Ok(*v);
        }
        let op = self.generator(t)?;
        let v = power_norm_estimate(&op, NORM_ESTIMATE_STEPS, 0.0, NORM_ESTIMATE_SEED).value;
        self.norms.write().insert(t.to_bits(), v);
        Ok(v)
    }

    /// One factor `R(t) = exp[c·X(t)]` at the given step `t`.
    pub fn step(&self, t: f64, cfg: &PropagatorConfig, f: &WaveFunction) -> Result<WaveFunction> {
        check_t(t)?;
        let op = self.generator(t)?;
        exp_apply_with_norm(&op, self.spec.evolution_coefficient(), f, cfg, self.generator_norm(t)?)
    }

    /// `R(t/n)^n ψ0`, evaluated as the single exponential `exp[n·c·X(t/n)] ψ0`.
    pub fn propagate(&self, t: f64, cfg: &PropagatorConfig, psi0: &WaveFunction) -> Result<WaveFunction> {
        check_t(t)?;
        cfg.validate()?;
        if t == 0.0 {
            return Ok(psi0.clone());
        }
        let dt = t / cfg.n as f64;
        let op = self.generator(dt)?;
        let c = self.spec.evolution_coefficient() * cfg.n as f64;
        exp_apply_with_norm(&op, c, psi0, cfg, self.generator_norm(dt)?)
    }

    /// `n` successive applications of [`step`](Self::step) at `t/n`.
    pub fn propagate_stepwise(&self, t: f64, cfg: &PropagatorConfig, psi0: &WaveFunction) -> Result<WaveFunction> {
        cfg.validate()?;
        let dt = t / cfg.n as f64;
        let mut v = psi0.clone();
        for _ in 0..cfg.n {
            v = self.step(dt, cfg, &v)?;
        }
        Ok(v)
    }

    /// `Σ_{q=0}^{j} (n·c)^q/q! X(t/n)^q ψ0` with no scaling.
    pub fn series_partial(
        &self,
        t: f64,
        j: usize,
        cfg: &PropagatorConfig,
        psi0: &WaveFunction,
    ) -> Result<(WaveFunction, SeriesTrace)> {
        check_t(t)?;
        cfg.validate()?;
        let dt = t / cfg.n as f64;
        let op = self.generator(dt)?;
        let c = self.spec.evolution_coefficient() * cfg.n as f64;
        let (v, mut trace) = taylor(&op, c, psi0.values(), j, None);
        let base = trace.partial_norms[0];
        trace.converged = trace.partial_norms.last().is_some_and(|&tn| tn <= cfg.taylor_tol * base) || base == 0.0;
        Ok((WaveFunction::from_raw(psi0.grid(), v), trace))
    }
}

/// `R(t) f` for one step of size `t`; OneD uses `exp[−iF(t)]`, MultiD `exp[iaW(t)]`.
pub fn chernoff_step(t: f64, spec: &HamiltonianSpec, cfg: &PropagatorConfig, f: &WaveFunction) -> Result<WaveFunction> {
    check_t(t)?;
    let op = ChernoffGenerator::new(spec, t)?;
    exp_apply(&op, spec.evolution_coefficient(), f, cfg)
}

pub fn propagate(t: f64, spec: &HamiltonianSpec, cfg: &PropagatorConfig, psi0: &WaveFunction) -> Result<WaveFunction> {
    Propagator::new(spec.clone()).propagate(t, cfg, psi0)
}

pub fn series_partial(
    t: f64,
    j: usize,
    spec: &HamiltonianSpec,
    cfg: &PropagatorConfig,
    psi0: &WaveFunction,
) -> Result<(WaveFunction, SeriesTrace)> {
    Propagator::new(spec.clone()).series_partial(t, j, cfg, psi0)
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(ChernoffError::InvalidParameter(format!("t = {t} must be finite and non-negative")))
    }
}
