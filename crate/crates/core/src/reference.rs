//! Independent reference solutions: Strang split-step, closed forms and a
//! dense matrix exponential on small grids.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChernoffError, Result};
use crate::grid::{apply_full_symbol, sample, Grid, WaveFunction};
use crate::linear::LinearOp;
use crate::operators::{HamiltonianOp, HamiltonianSpec};

/// Largest total grid size accepted by [`dense_oracle`].
pub const DENSE_SIZE_CAP: usize = 512;
/// Largest mass a closed form may leave outside the box.
pub const BOUNDARY_MASS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMethod {
    Splitstep,
    Analytic,
    Dense,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub wavefunction: WaveFunction,
    pub method: OracleMethod,
    pub steps: usize,
    /// Self-consistency estimate of the oracle's own error.
    pub est_error: f64,
}

/// Strang splitting of `e^{iat(½Δ − V)}` with `steps` equal substeps.
///
/// `est_error` is the distance to the same evolution with `2·steps`.
pub fn splitstep_evolve(spec: &HamiltonianSpec, t: f64, steps: usize, psi0: &WaveFunction) -> Result<OracleResult> {
    if steps == 0 {
        return Err(ChernoffError::InvalidParameter("split-step needs at least one step".into()));
    }
    let coarse = splitstep_raw(spec, t, steps, psi0)?;
    let fine = splitstep_raw(spec, t, 2 * steps, psi0)?;
    let est_error = coarse.distance(&fine)?;
    Ok(OracleResult { wavefunction: coarse, method: OracleMethod::Splitstep, steps, est_error })
}

/// The split-step evolution alone, without the self-convergence run.
pub fn splitstep_raw(spec: &HamiltonianSpec, t: f64, steps: usize, psi0: &WaveFunction) -> Result<WaveFunction> {
    let HamiltonianSpec::MultiD { potential, a, .. } = spec else {
        return Err(ChernoffError::InvalidSpec("split-step applies to ½Δ − V specs".into()));
    };
    let grid = spec.grid();
    if psi0.grid() != grid {
        return Err(ChernoffError::GridMismatch);
    }
    if !(t.is_finite()) || steps == 0 {
        return Err(ChernoffError::InvalidParameter(format!("t = {t}, steps = {steps}")));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let dt = t / steps as f64;
    let half: Vec<Complex64> =
        potential.values().iter().map(|v| Complex64::from_polar(1.0, -a * dt * v / 2.0)).collect();
    let kinetic: Vec<Complex64> = grid
        .spectral_symbol(|k| -a * dt * k.iter().map(|q| q * q).sum::<f64>() / 2.0)
        .into_iter()
        .map(|p: f64| Complex64::from_polar(1.0, p))
        .collect();
    let mut v = psi0.values().to_vec();
    for _ in 0..steps {
        v.iter_mut().zip(&half).for_each(|(x, p)| *x *= p);
        apply_full_symbol(grid, &mut v, &kinetic);
        v.iter_mut().zip(&half).for_each(|(x, p)| *x *= p);
    }
    Ok(WaveFunction::from_raw(grid, v))
}

/// Free evolution `ψ' = ia·½Δψ` of a normalized Gaussian wave packet.
///
/// `ψ0(x) = (πσ0²)^{-d/4} exp(−|x − x0|²/(2σ0²) + i k0·(x − x0))`; the complex
/// width is `σ(t)² = σ0² + i·a·t`. Fails when more than
/// [`BOUNDARY_MASS_TOL`] of the continuum packet lies outside the box.
pub fn analytic_free_gaussian(
    sigma0: f64,
    x0: &[f64],
    k0: &[f64],
    a: f64,
    t: f64,
    grid: &Grid,
) -> Result<WaveFunction> {
    let d = grid.dim();
    if x0.len() != d || k0.len() != d {
        return Err(ChernoffError::InvalidParameter(format!("x0 and k0 need {d} components")));
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(ChernoffError::InvalidParameter(format!("sigma0 = {sigma0} must be positive")));
    }
    let s = a * t;
    let width2 = Complex64::new(sigma0 * sigma0, s);
    // |ψ|² along each axis is a normal density with this standard deviation.
    let spread = width2.norm() / (sigma0 * std::f64::consts::SQRT_2);
    let mut mass = 0.0;
    for m in 0..d {
        let c = x0[m] + k0[m] * s;
        let z = |u: f64| u / (spread * std::f64::consts::SQRT_2);
        mass += 0.5 * libm::erfc(z(c)) + 0.5 * libm::erfc(z(grid.length()[m] - c));
    }
    if mass > BOUNDARY_MASS_TOL {
        return Err(ChernoffError::BoundaryMass { mass });
    }
    let prefactor = (PI * sigma0 * sigma0).powf(-0.25) * (Complex64::new(sigma0 * sigma0, 0.0) / width2).sqrt();
    sample(
        |x| {
            let mut v = Complex64::new(1.0, 0.0);
            for m in 0..d {
                let u = x[m] - x0[m];
                let drift = u - k0[m] * s;
                let arg = -drift * drift / (2.0 * width2) + Complex64::new(0.0, k0[m] * u - k0[m] * k0[m] * s / 2.0);
                v *= prefactor * arg.exp();
            }
            v
        },
        grid,
    )
}

/// Oscillator eigenstate of `H = ½Δ − ½|ξ|²`, `ξ = x − L/2`, with `level`
/// quanta along axis 0 and the ground state along the others, times
/// `e^{−i(level + d/2)t}` (the evolution `ψ' = iHψ`).
pub fn analytic_harmonic_state(level: usize, t: f64, grid: &Grid) -> Result<WaveFunction> {
    let d = grid.dim();
    let centre = grid.center();
    let energy = level as f64 + d as f64 / 2.0;
    let phase = Complex64::from_polar(1.0, -energy * t);
    let state = sample(
        |x| {
            let mut v = hermite_function(level, x[0] - centre[0]);
            for m in 1..d {
                v *= hermite_function(0, x[m] - centre[m]);
            }
            phase * v
        },
        grid,
    )?;
    let face: f64 = (0..d)
        .map(|m| {
            let half = 0.5 * grid.length()[m];
            let n = if m == 0 { level } else { 0 };
            hermite_function(n, half).powi(2) * half
        })
        .sum();
    if face > BOUNDARY_MASS_TOL {
        return Err(ChernoffError::BoundaryMass { mass: face });
    }
    let spectrum = state.spectrum();
    let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
    let cutoff: Vec<f64> = (0..d).map(|m| 0.5 * grid.max_wavenumber(m)).collect();
    let tail: f64 = grid
        .spectral_symbol(|k| if k.iter().zip(&cutoff).any(|(q, c)| q.abs() > *c) { 1.0 } else { 0.0 })
        .iter()
        .zip(&spectrum)
        .map(|(w, c)| w * c.norm_sqr())
        .sum();
    if tail > BOUNDARY_MASS_TOL * total {
        return Err(ChernoffError::UnresolvedLevel {
            level,
            reason: format!("relative spectral tail {:.3e} above half the grid bandwidth", tail / total),
        });
    }
    Ok(state)
}

/// Normalized Hermite function `ψ_n(ξ) = (2^n n! √π)^{-1/2} H_n(ξ) e^{−ξ²/2}`.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * xi * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The generator `c·H` as a dense matrix, built column by column.
pub fn dense_generator(spec: &HamiltonianSpec) -> Result<DMatrix<Complex64>> {
    let n = spec.grid().total_size();
    if n > DENSE_SIZE_CAP {
        return Err(ChernoffError::OracleSizeCap { size: n, cap: DENSE_SIZE_CAP });
    }
    Ok(hermitian_matrix(spec) * spec.evolution_coefficient())
}

fn hermitian_matrix(spec: &HamiltonianSpec) -> DMatrix<Complex64> {
    let n = spec.grid().total_size();
    let op = HamiltonianOp::new(spec);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply_values(&e);
        e[j] = Complex64::new(0.0, 0.0);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    // Symmetrize away rounding so the eigen cross-check sees an exact Hermitian matrix.
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `e^{t·c·H} ψ0` by dense Padé scaling-and-squaring, where `c` is the
/// Hamiltonian's evolution coefficient.
///
/// `est_error` is the distance to the same exponential computed from the
/// eigendecomposition of the Hermitian `H`.
pub fn dense_oracle(spec: &HamiltonianSpec, t: f64, psi0: &WaveFunction) -> Result<OracleResult> {
    let grid = spec.grid();
    let n = grid.total_size();
    if n > DENSE_SIZE_CAP {
        return Err(ChernoffError::OracleSizeCap { size: n, cap: DENSE_SIZE_CAP });
    }
    if psi0.grid() != grid {
        return Err(ChernoffError::GridMismatch);
    }
    if !t.is_finite() {
        return Err(ChernoffError::InvalidParameter(format!("t = {t}")));
    }
    let h = hermitian_matrix(spec);
    let c = spec.evolution_coefficient() * t;
    let v0 = DVector::from_column_slice(psi0.values());
    let pade = (&h * c).exp() * &v0;

    let eig = SymmetricEigen::new(h);
    let phases = eig.eigenvalues.map(|lambda| (c * lambda).exp());
    let q = &eig.eigenvectors;
    let coeffs = q.adjoint() * &v0;
    let spectral = q * DVector::from_iterator(n, coeffs.iter().zip(phases.iter()).map(|(a, p)| a * p));

    let wavefunction = WaveFunction::new(grid, pade.iter().copied().collect())?;
    let check = WaveFunction::new(grid, spectral.iter().copied().collect())?;
    let est_error = wavefunction.distance(&check)?;
    Ok(OracleResult { wavefunction, method: OracleMethod::Dense, steps: 1, est_error })
}
