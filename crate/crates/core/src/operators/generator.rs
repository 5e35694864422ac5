//! Fourier-symbol forms of `F(t)`, `W(t)` and the reference Hamiltonian.
//!
//! Every shift `A(τ)` is diagonal in the discrete Fourier basis with symbol
//! `exp(iκτ)`, so the shift polynomials in `F_k(t)` and the stencil in `W(t)`
//! collapse to single multipliers. Multiplication operators are applied in
//! physical space between transforms.

use num_complex::Complex64;

use super::apply::{regulated_field, ROOT_UNDERFLOW};
use super::hamiltonian::{HamiltonianSpec, Mutation};
use crate::error::{ChernoffError, Result};
use crate::grid::{forward_all, inverse_all, Grid};
use crate::linear::LinearOp;

struct OrderTerm {
    /// Symbol of `(A(τ) − I)^k`.
    left: Vec<Complex64>,
    /// Symbol of `(I − A(τ)*)^k`.
    right: Vec<Complex64>,
    coeff: Vec<f64>,
}

enum Kind {
    OneD { f0: Vec<f64>, terms: Vec<OrderTerm> },
    MultiD { stencil: Vec<f64>, potential: Vec<f64> },
}

/// `F(t)` (one-dimensional) or `W(t)` (multi-dimensional) at a fixed `t`.
pub struct ChernoffGenerator {
    grid: Grid,
    t: f64,
    kind: Kind,
}

impl ChernoffGenerator {
    pub fn new(spec: &HamiltonianSpec, t: f64) -> Result<Self> {
        Self::with_mutation(spec, t, Mutation::None)
    }

    pub fn with_mutation(spec: &HamiltonianSpec, t: f64, mutation: Mutation) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ChernoffError::InvalidParameter(format!("t = {t} must be finite and non-negative")));
        }
        let grid = spec.grid().clone();
        let kind = match spec {
            HamiltonianSpec::OneD { coeffs, regulator } => {
                let f0 = regulated_field(t, coeffs.a0(), regulator, 1.0);
                let mut terms = Vec::new();
                if t >= ROOT_UNDERFLOW {
                    for k in 1..=coeffs.order() {
                        let root = match mutation {
                            Mutation::None => 1.0 / (2 * k) as f64,
                            Mutation::WrongRootExponent => 1.0 / k as f64,
                        };
                        let tau = t.powf(root);
                        let kappa = grid.wavenumbers(0);
                        // e^{iκτ} − 1 = 2i·sin(κτ/2)·e^{iκτ/2}, and 1 − e^{−iκτ} is its mirror.
                        let left = kappa
                            .iter()
                            .map(|&q| {
                                let s = 2.0 * (0.5 * q * tau).sin();
                                (Complex64::new(0.0, s) * Complex64::from_polar(1.0, 0.5 * q * tau)).powu(k as u32)
                            })
                            .collect();
                        let right = kappa
                            .iter()
                            .map(|&q| {
                                let s = 2.0 * (0.5 * q * tau).sin();
                                (Complex64::new(0.0, s) * Complex64::from_polar(1.0, -0.5 * q * tau)).powu(k as u32)
                            })
                            .collect();
                        terms.push(OrderTerm { left, right, coeff: coeffs.coefficient(k).to_vec() });
                    }
                }
                Kind::OneD { f0, terms }
            }
            HamiltonianSpec::MultiD { potential, regulator, .. } => {
                let d = grid.dim() as f64;
                let s = match mutation {
                    Mutation::None => d.sqrt() * t.sqrt(),
                    Mutation::WrongRootExponent => d.sqrt() * t,
                };
                // (1/d) Σ_j (cos(κ_j s) − 1), written as −(2/d) Σ sin²(κ_j s/2).
                let stencil = grid.spectral_symbol(|kappa| {
                    -2.0 / d * kappa.iter().map(|&q| (0.5 * q * s).sin().powi(2)).sum::<f64>()
                });
                let potential = regulated_field(t, potential.values(), regulator, -1.0);
                Kind::MultiD { stencil, potential }
            }
        };
        Ok(Self { grid, t, kind })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Upper bound on the operator norm from the triangle inequality.
    pub fn norm_upper_bound(&self) -> f64 {
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let csup = |v: &[Complex64]| v.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        match &self.kind {
            Kind::OneD { f0, terms } => {
                sup(f0) + terms.iter().map(|t| csup(&t.left) * sup(&t.coeff) * csup(&t.right)).sum::<f64>()
            }
            Kind::MultiD { stencil, potential } => sup(stencil) + sup(potential),
        }
    }
}

impl LinearOp for ChernoffGenerator {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_values(&self, input: &[Complex64]) -> Vec<Complex64> {
        let grid = &self.grid;
        match &self.kind {
            Kind::OneD { f0, terms } => {
                let mut out: Vec<Complex64> = input.iter().zip(f0).map(|(v, w)| v * w).collect();
                if terms.is_empty() {
                    return out;
                }
                let mut spectrum = input.to_vec();
                forward_all(grid, &mut spectrum);
                let mut acc = vec![Complex64::new(0.0, 0.0); input.len()];
                for term in terms {
                    let mut g: Vec<Complex64> = spectrum.iter().zip(&term.right).map(|(a, b)| a * b).collect();
                    inverse_all(grid, &mut g);
                    g.iter_mut().zip(&term.coeff).for_each(|(v, a)| *v *= a);
                    forward_all(grid, &mut g);
                    acc.iter_mut().zip(g.iter().zip(&term.left)).for_each(|(a, (v, l))| *a += v * l);
                }
                inverse_all(grid, &mut acc);
                out.iter_mut().zip(acc).for_each(|(o, a)| *o += a);
                out
            }
            Kind::MultiD { stencil, potential } => {
                let mut spectrum = input.to_vec();
                forward_all(grid, &mut spectrum);
                spectrum.iter_mut().zip(stencil).for_each(|(v, s)| *v *= s);
                inverse_all(grid, &mut spectrum);
                spectrum.iter_mut().zip(input.iter().zip(potential)).for_each(|(o, (v, p))| *o += v * p);
                spectrum
            }
        }
    }
}

enum HKind {
    OneD { a0: Vec<f64>, terms: Vec<(Vec<Complex64>, Vec<f64>)> },
    MultiD { kinetic: Vec<f64>, potential: Vec<f64> },
}

/// Spectral evaluation of `𝓗 = a_0 + Σ ∂^k a_k ∂^k` or `H = ½Δ − V`.
pub struct HamiltonianOp {
    grid: Grid,
    kind: HKind,
}

impl HamiltonianOp {
    pub fn new(spec: &HamiltonianSpec) -> Self {
        let grid = spec.grid().clone();
        let kind = match spec {
            HamiltonianSpec::OneD { coeffs, .. } => {
                let terms = (1..=coeffs.order())
                    .map(|k| {
                        let sym = grid.wavenumbers(0).iter().map(|&q| Complex64::new(0.0, q).powu(k as u32)).collect();
                        (sym, coeffs.coefficient(k).to_vec())
                    })
                    .collect();
                HKind::OneD { a0: coeffs.a0().to_vec(), terms }
            }
            HamiltonianSpec::MultiD { potential, .. } => HKind::MultiD {
                kinetic: grid.spectral_symbol(|kappa| -0.5 * kappa.iter().map(|q| q * q).sum::<f64>()),
                potential: potential.values().to_vec(),
            },
        };
        Self { grid, kind }
    }
}

impl LinearOp for HamiltonianOp {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_values(&self, input: &[Complex64]) -> Vec<Complex64> {
        let grid = &self.grid;
        let mut spectrum = input.to_vec();
        forward_all(grid, &mut spectrum);
        match &self.kind {
            HKind::OneD { a0, terms } => {
                let mut acc = vec![Complex64::new(0.0, 0.0); input.len()];
                for (sym, coeff) in terms {
                    let mut g: Vec<Complex64> = spectrum.iter().zip(sym).map(|(a, b)| a * b).collect();
                    inverse_all(grid, &mut g);
                    g.iter_mut().zip(coeff).for_each(|(v, a)| *v *= a);
                    forward_all(grid, &mut g);
                    acc.iter_mut().zip(g.iter().zip(sym)).for_each(|(a, (v, s))| *a += v * s);
                }
                inverse_all(grid, &mut acc);
                acc.iter_mut().zip(input.iter().zip(a0)).for_each(|(o, (v, a))| *o += v * a);
                acc
            }
            HKind::MultiD { kinetic, potential } => {
                spectrum.iter_mut().zip(kinetic).for_each(|(v, s)| *v *= s);
                inverse_all(grid, &mut spectrum);
                spectrum.iter_mut().zip(input.iter().zip(potential)).for_each(|(o, (v, p))| *o -= v * p);
                spectrum
            }
        }
    }
}
