//! Direct evaluations of the Chernoff operator families.
//!
//! These follow the operator definitions term by term through
//! [`spectral_shift`]. The propagators use the equivalent Fourier-symbol form
//! in [`ChernoffGenerator`](super::ChernoffGenerator); tests keep the two
//! paths in agreement.

use num_complex::Complex64;

use super::hamiltonian::{HamiltonianSpec, MAX_ORDER};
use super::{HamiltonianOp, RegulatorFn};
use crate::error::{ChernoffError, Result};
use crate::grid::{spectral_shift, WaveFunction};
use crate::linear::LinearOp;

/// Below this `t` the roots `t^{1/2k}` are treated as zero.
pub const ROOT_UNDERFLOW: f64 = 1e-300;

/// `(B_a f)(x) = a(x)·f(x)`.
pub fn apply_mult(field: &[f64], f: &WaveFunction) -> Result<WaveFunction> {
    if field.len() != f.values().len() {
        return Err(ChernoffError::GridMismatch);
    }
    let values = f.values().iter().zip(field).map(|(v, a)| v * a).collect();
    Ok(WaveFunction::from_raw(f.grid(), values))
}

/// `(F_0(t)f)(x) = w(sign·t·a_0(x))·f(x)`.
pub fn apply_f0(t: f64, a0: &[f64], w: &RegulatorFn, sign: f64, f: &WaveFunction) -> Result<WaveFunction> {
    check_time(t)?;
    let field = regulated_field(t, a0, w, sign);
    apply_mult(&field, f)
}

pub(crate) fn regulated_field(t: f64, a0: &[f64], w: &RegulatorFn, sign: f64) -> Vec<f64> {
    a0.iter().map(|&a| w.eval(sign * t * a)).collect()
}

/// `F_k(t) = (A(τ) − I)^k B_{a_k} (I − A(τ)*)^k` with `τ = t^{1/2k}`.
pub fn apply_fk_composed(t: f64, k: usize, a_k: &[f64], f: &WaveFunction) -> Result<WaveFunction> {
    check_fk_args(t, k, f)?;
    if t < ROOT_UNDERFLOW {
        return Ok(WaveFunction::zeros(f.grid()));
    }
    let tau = t.powf(1.0 / (2 * k) as f64);
    let mut g = f.clone();
    for _ in 0..k {
        let back = spectral_shift(&g, 0, -tau)?;
        g = g.sub(&back)?;
    }
    g = apply_mult(a_k, &g)?;
    for _ in 0..k {
        let fwd = spectral_shift(&g, 0, tau)?;
        g = fwd.sub(&g)?;
    }
    Ok(g)
}

/// Same operator as [`apply_fk_composed`], expanded binomially:
/// `Σ_{j1,j2} C(k,j1)(−1)^{j1} C(k,j2)(−1)^{k−j2} A(τ)^{j2} B_{a_k} A(τ)^{*j1}`.
///
/// Each term `A^{j2} B A^{*j1} f` is the function
/// `x ↦ a_k(x + j2·τ)·f(x + (j2 − j1)·τ)`.
pub fn apply_fk_binomial(t: f64, k: usize, a_k: &[f64], f: &WaveFunction) -> Result<WaveFunction> {
    check_fk_args(t, k, f)?;
    if a_k.len() != f.values().len() {
        return Err(ChernoffError::GridMismatch);
    }
    if t < ROOT_UNDERFLOW {
        return Ok(WaveFunction::zeros(f.grid()));
    }
    let tau = t.powf(1.0 / (2 * k) as f64);
    let mut acc = WaveFunction::zeros(f.grid());
    for j1 in 0..=k {
        let c1 = binomial(k, j1) * sign_pow(j1);
        let inner = apply_mult(a_k, &spectral_shift(f, 0, -(j1 as f64) * tau)?)?;
        for j2 in 0..=k {
            let c2 = binomial(k, j2) * sign_pow(k - j2);
            let term = spectral_shift(&inner, 0, j2 as f64 * tau)?;
            acc = acc.axpy(Complex64::new(c1 * c2, 0.0), &term)?;
        }
    }
    Ok(acc)
}

/// `F(t) = F_0(t) + Σ_{k=1}^K F_k(t)` for a one-dimensional spec.
pub fn apply_f(t: f64, spec: &HamiltonianSpec, f: &WaveFunction) -> Result<WaveFunction> {
    let HamiltonianSpec::OneD { coeffs, regulator } = spec else {
        return Err(ChernoffError::InvalidSpec("F(t) is defined for one-dimensional specs".into()));
    };
    if f.grid() != coeffs.grid() {
        return Err(ChernoffError::GridMismatch);
    }
    let mut acc = apply_f0(t, coeffs.a0(), regulator, 1.0, f)?;
    for k in 1..=coeffs.order() {
        let term = apply_fk_composed(t, k, coeffs.coefficient(k), f)?;
        acc = acc.axpy(Complex64::new(1.0, 0.0), &term)?;
    }
    Ok(acc)
}

/// `(W(t)f)(x) = (1/2d) Σ_j [f(x + s·e_j) + f(x − s·e_j) − 2f(x)] + w(−t·V(x))·f(x)`
/// with `s = √d·√t`.
pub fn apply_w(t: f64, spec: &HamiltonianSpec, f: &WaveFunction) -> Result<WaveFunction> {
    let HamiltonianSpec::MultiD { potential, regulator, .. } = spec else {
        return Err(ChernoffError::InvalidSpec("W(t) is defined for multi-dimensional specs".into()));
    };
    check_time(t)?;
    if f.grid() != potential.grid() {
        return Err(ChernoffError::GridMismatch);
    }
    let d = f.grid().dim();
    let s = (d as f64).sqrt() * t.sqrt();
    let mut acc = apply_f0(t, potential.values(), regulator, -1.0, f)?;
    let weight = Complex64::new(1.0 / (2.0 * d as f64), 0.0);
    for axis in 0..d {
        let plus = spectral_shift(f, axis, s)?;
        let minus = spectral_shift(f, axis, -s)?;
        let stencil = plus.axpy(Complex64::new(1.0, 0.0), &minus)?.axpy(Complex64::new(-2.0, 0.0), f)?;
        acc = acc.axpy(weight, &stencil)?;
    }
    Ok(acc)
}

/// Reference Hamiltonian action: `Σ ∂^k(a_k ∂^k f) + a_0 f`, or `½Δf − V f`.
///
/// Derivatives are spectral, so `f` should be smooth and well resolved.
pub fn apply_h(spec: &HamiltonianSpec, f: &WaveFunction) -> Result<WaveFunction> {
    HamiltonianOp::new(spec).apply(f)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(ChernoffError::InvalidParameter(format!("t = {t} must be finite and non-negative")))
    }
}

fn check_fk_args(t: f64, k: usize, f: &WaveFunction) -> Result<()> {
    check_time(t)?;
    if k == 0 || k > MAX_ORDER {
        return Err(ChernoffError::OrderOutOfRange { k, max: MAX_ORDER });
    }
    if f.grid().dim() != 1 {
        return Err(ChernoffError::InvalidSpec("F_k(t) acts on one-dimensional grids".into()));
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sign_pow(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
