//! Matrix-free linear maps on [`WaveFunction`]s.

use num_complex::Complex64;

use crate::error::{ChernoffError, Result};
use crate::grid::{Grid, WaveFunction};

/// A bounded linear operator acting on fields of one grid.
pub trait LinearOp: Send + Sync {
    fn grid(&self) -> &Grid;

    /// Applies the operator to raw values already known to match [`grid`](Self::grid).
    fn apply_values(&self, input: &[Complex64]) -> Vec<Complex64>;

    fn apply(&self, f: &WaveFunction) -> Result<WaveFunction> {
        if f.grid() != self.grid() {
            return Err(ChernoffError::GridMismatch);
        }
        Ok(WaveFunction::from_raw(self.grid(), self.apply_values(f.values())))
    }
}

/// Pointwise multiplication by a real field.
#[derive(Clone, Debug)]
pub struct Multiplication {
    grid: Grid,
    field: Vec<f64>,
}

impl Multiplication {
    pub fn new(grid: &Grid, field: Vec<f64>) -> Result<Self> {
        if field.len() != grid.total_size() {
            return Err(ChernoffError::LengthMismatch { got: field.len(), expected: grid.total_size() });
        }
        Ok(Self { grid: grid.clone(), field })
    }
}

impl LinearOp for Multiplication {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_values(&self, input: &[Complex64]) -> Vec<Complex64> {
        input.iter().zip(&self.field).map(|(v, a)| v * a).collect()
    }
}

/// Adapts a closure over raw values into a [`LinearOp`].
pub struct FnOp<F> {
    grid: Grid,
    f: F,
}

impl<F> FnOp<F>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync,
{
    pub fn new(grid: &Grid, f: F) -> Self {
        Self { grid: grid.clone(), f }
    }
}

impl<F> LinearOp for FnOp<F>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync,
{
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply_values(&self, input: &[Complex64]) -> Vec<Complex64> {
        (self.f)(input)
    }
}

/// Outcome of a power iteration on `X*X`-style growth `‖X^{k+1}v‖ / ‖X^k v‖`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Power-iteration estimate of `‖op‖` from a seeded complex Gaussian start.
///
/// For self-adjoint operators the iterates increase monotonically towards the
/// norm, so the estimate never overshoots it beyond rounding. Stops once the
/// relative change drops to `rel_tol` or after `max_steps` applications.
pub fn power_norm_estimate(op: &dyn LinearOp, max_steps: usize, rel_tol: f64, seed: u64) -> NormEstimate {
    let mut v = crate::random::random_wave(op.grid(), seed).into_values();
    let n0 = euclid(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut value = 0.0;
    for step in 1..=max_steps {
        let mut w = op.apply_values(&v);
        let nw = euclid(&w);
        if nw == 0.0 {
            return NormEstimate { value: 0.0, steps: step, converged: true };
        }
        let delta = (nw - value).abs();
        value = nw;
        w.iter_mut().for_each(|x| *x /= nw);
        v = w;
        if step > 1 && delta <= rel_tol * nw {
            return NormEstimate { value, steps: step, converged: true };
        }
    }
    NormEstimate { value, steps: max_steps, converged: false }
}

fn euclid(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_finds_diagonal_norm() {
        let g = Grid::line(64, 1.0).unwrap();
        let field: Vec<f64> = (0..64).map(|i| (i as f64 / 10.0).sin() * 3.0).collect();
        let exact = field.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let op = Multiplication::new(&g, field).unwrap();
        let est = power_norm_estimate(&op, 2000, 1e-13, 7);
        assert!(est.value <= exact * (1.0 + 1e-14));
        assert!(est.value >= exact * (1.0 - 1e-3), "{est:?} vs {exact}");
    }

    #[test]
    fn zero_operator_has_zero_norm() {
        let g = Grid::line(8, 1.0).unwrap();
        let op = Multiplication::new(&g, vec![0.0; 8]).unwrap();
        let est = power_norm_estimate(&op, 20, 0.0, 1);
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn apply_rejects_foreign_grid() {
        let g = Grid::line(8, 1.0).unwrap();
        let op = Multiplication::new(&g, vec![1.0; 8]).unwrap();
        let other = WaveFunction::zeros(&Grid::line(8, 2.0).unwrap());
        assert!(matches!(op.apply(&other), Err(ChernoffError::GridMismatch)));
    }
}
