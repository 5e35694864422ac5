//! Periodic uniform grids over `[0, L)^d` and complex fields living on them.
//!
//! A [`Grid`] is the discrete stand-in for `L2(ℝ^d)`: points sit at
//! `x_i = i·h` along every axis, the measure of a cell is `∏ h_m`, and values
//! are stored row-major with axis 0 slowest. Because the box is periodic the
//! translation operator realized by [`spectral_shift`] is exactly unitary.
//!
//! Shifts by non-grid-aligned offsets use trigonometric interpolation. The
//! Nyquist mode (even `N`) is shifted with the phase `exp(i·κ_Nyq·τ)` as-is,
//! so data that is not band-limited below Nyquist aliases.

mod dump;
mod spectral;

pub use dump::{read_dump, write_dump, DUMP_MAGIC};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ChernoffError, Result};

struct GridInner {
    n_points: Vec<usize>,
    length: Vec<f64>,
    spacing: Vec<f64>,
    wavenumbers: Vec<Vec<f64>>,
    strides: Vec<usize>,
    total: usize,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

/// Periodic uniform discretization of `[0, L_0) × … × [0, L_{d-1})`.
///
/// Cloning is cheap; FFT plans are shared between clones.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl Grid {
    pub fn new(n_points: &[usize], length: &[f64]) -> Result<Self> {
        if n_points.is_empty() {
            return Err(ChernoffError::InvalidGrid("dimension must be positive".into()));
        }
        if n_points.len() != length.len() {
            return Err(ChernoffError::InvalidGrid(format!(
                "{} axis sizes but {} lengths",
                n_points.len(),
                length.len()
            )));
        }
        if let Some(n) = n_points.iter().find(|&&n| n == 0) {
            return Err(ChernoffError::InvalidGrid(format!("axis size {n} must be positive")));
        }
        if let Some(l) = length.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(ChernoffError::InvalidGrid(format!("axis length {l} must be positive")));
        }

        let d = n_points.len();
        let spacing: Vec<f64> = n_points.iter().zip(length).map(|(&n, &l)| l / n as f64).collect();
        let wavenumbers = n_points
            .iter()
            .zip(length)
            .map(|(&n, &l)| (0..n).map(|k| 2.0 * PI * signed_mode(k, n) as f64 / l).collect())
            .collect();
        let mut strides = vec![1usize; d];
        for m in (0..d.saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * n_points[m + 1];
        }
        let total = n_points.iter().product();

        let mut planner = FftPlanner::new();
        let forward = n_points.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = n_points.iter().map(|&n| planner.plan_fft_inverse(n)).collect();

        Ok(Self {
            inner: Arc::new(GridInner {
                n_points: n_points.to_vec(),
                length: length.to_vec(),
                spacing,
                wavenumbers,
                strides,
                total,
                forward,
                inverse,
            }),
        })
    }

    /// One-dimensional grid with `n` points on `[0, length)`.
    pub fn line(n: usize, length: f64) -> Result<Self> {
        Self::new(&[n], &[length])
    }

    /// `d`-dimensional grid with the same size and length on every axis.
    pub fn cube(d: usize, n: usize, length: f64) -> Result<Self> {
        Self::new(&vec![n; d], &vec![length; d])
    }

    pub fn dim(&self) -> usize {
        self.inner.n_points.len()
    }

    pub fn n_points(&self) -> &[usize] {
        &self.inner.n_points
    }

    pub fn length(&self) -> &[f64] {
        &self.inner.length
    }

    pub fn spacing(&self) -> &[f64] {
        &self.inner.spacing
    }

    /// Angular wavenumbers `2πk/L` of `axis`, in FFT order.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.inner.wavenumbers[axis]
    }

    pub fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    pub fn total_size(&self) -> usize {
        self.inner.total
    }

    /// Measure of one grid cell, `∏ h_m`.
    pub fn cell_volume(&self) -> f64 {
        self.inner.spacing.iter().product()
    }

    /// Geometric center of the box, `L/2` on every axis.
    pub fn center(&self) -> Vec<f64> {
        self.inner.length.iter().map(|l| 0.5 * l).collect()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        self.inner
            .strides
            .iter()
            .map(|&s| {
                let i = rem / s;
                rem %= s;
                i
            })
            .collect()
    }

    /// Physical coordinates of the flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().zip(&self.inner.spacing).map(|(i, h)| i as f64 * h).collect()
    }

    /// Coordinates of every grid point, in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.total_size()).map(|i| self.point(i)).collect()
    }

    /// Evaluates `f(κ)` on the full wavenumber lattice, in storage order.
    pub fn spectral_symbol<T, F>(&self, f: F) -> Vec<T>
    where
        F: Fn(&[f64]) -> T,
    {
        let d = self.dim();
        let mut kappa = vec![0.0; d];
        (0..self.total_size())
            .map(|flat| {
                let idx = self.multi_index(flat);
                for m in 0..d {
                    kappa[m] = self.inner.wavenumbers[m][idx[m]];
                }
                f(&kappa)
            })
            .collect()
    }

    /// Largest representable `|κ|` on `axis` (the Nyquist wavenumber for even sizes).
    pub fn max_wavenumber(&self, axis: usize) -> f64 {
        self.inner.wavenumbers[axis].iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    pub(crate) fn fft_plans(&self, axis: usize, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.inner.inverse[axis]
        } else {
            &self.inner.forward[axis]
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n_points == other.inner.n_points
                && self.inner.length.iter().zip(&other.inner.length).all(|(a, b)| a.to_bits() == b.to_bits()))
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n_points", &self.inner.n_points).field("length", &self.inner.length).finish()
    }
}

fn signed_mode(k: usize, n: usize) -> i64 {
    // FFT ordering; for even n the Nyquist mode is reported as -n/2.
    if 2 * k < n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Complex amplitude field over a [`Grid`], row-major with axis 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    /// Wraps `values`, rejecting wrong lengths and non-finite entries.
    pub fn new(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total_size() {
            return Err(ChernoffError::LengthMismatch { got: values.len(), expected: grid.total_size() });
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ChernoffError::NonFinite { coord: grid.point(i) });
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub(crate) fn from_raw(grid: &Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.total_size());
        Self { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_raw(grid, vec![Complex64::new(0.0, 0.0); grid.total_size()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn inner_product(&self, other: &WaveFunction) -> Result<Complex64> {
        inner_product(self, other)
    }

    pub fn scaled(&self, c: Complex64) -> WaveFunction {
        Self::from_raw(&self.grid, self.values.iter().map(|v| v * c).collect())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &WaveFunction) -> Result<WaveFunction> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Self::from_raw(&self.grid, values))
    }

    pub fn sub(&self, other: &WaveFunction) -> Result<WaveFunction> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// L2 distance `‖self − other‖`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Unnormalized forward DFT over all axes.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        spectral::forward_all(&self.grid, &mut buf);
        buf
    }

    pub(crate) fn check_grid(&self, other: &WaveFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(ChernoffError::GridMismatch)
        }
    }
}

/// Samples `f` at every grid point `x_i = i·h`.
pub fn sample<F>(f: F, grid: &Grid) -> Result<WaveFunction>
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut values = Vec::with_capacity(grid.total_size());
    for i in 0..grid.total_size() {
        let x = grid.point(i);
        let v = f(&x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ChernoffError::NonFinite { coord: x });
        }
        values.push(v);
    }
    Ok(WaveFunction::from_raw(grid, values))
}

/// Samples a real field (potential, coefficient) at every grid point.
pub fn sample_real<F>(f: F, grid: &Grid) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::with_capacity(grid.total_size());
    for i in 0..grid.total_size() {
        let x = grid.point(i);
        let v = f(&x);
        if !v.is_finite() {
            return Err(ChernoffError::NonFinite { coord: x });
        }
        values.push(v);
    }
    Ok(values)
}

/// Discrete L2 pairing `(∏ h_m) · Σ conj(f_i)·g_i`.
pub fn inner_product(f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
    f.check_grid(g)?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.grid.cell_volume())
}

/// Same pairing evaluated on the Fourier coefficients (Parseval).
pub fn inner_product_spectral(f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
    f.check_grid(g)?;
    let fs = f.spectrum();
    let gs = g.spectrum();
    let sum: Complex64 = fs.iter().zip(&gs).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.grid.cell_volume() / f.grid.total_size() as f64)
}

pub fn norm(f: &WaveFunction) -> f64 {
    let sum: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
    (sum * f.grid.cell_volume()).sqrt()
}

/// Translation `(A(τ)f)(x) = f(x + τ·e_axis)` by trigonometric interpolation.
///
/// Offsets that are integer multiples of the spacing reduce to an exact
/// circular roll of the samples.
pub fn spectral_shift(f: &WaveFunction, axis: usize, offset: f64) -> Result<WaveFunction> {
    let grid = &f.grid;
    if axis >= grid.dim() {
        return Err(ChernoffError::AxisOutOfRange { axis, d: grid.dim() });
    }
    if !offset.is_finite() {
        return Err(ChernoffError::InvalidParameter(format!("shift offset {offset}")));
    }
    let n = grid.n_points()[axis];
    let cells = offset / grid.spacing()[axis];
    let rounded = cells.round();
    if (cells - rounded).abs() <= 1e-12 * rounded.abs().max(1.0) {
        let m = (rounded as i64).rem_euclid(n as i64) as usize;
        return Ok(WaveFunction::from_raw(grid, roll(grid, &f.values, axis, m)));
    }
    let phases: Vec<Complex64> =
        grid.wavenumbers(axis).iter().map(|&k| Complex64::from_polar(1.0, k * offset)).collect();
    let mut buf = f.values.clone();
    spectral::apply_axis_symbol(grid, &mut buf, axis, &phases);
    Ok(WaveFunction::from_raw(grid, buf))
}

/// `out[i] = values[i + m·e_axis]` with periodic wrap.
fn roll(grid: &Grid, values: &[Complex64], axis: usize, m: usize) -> Vec<Complex64> {
    if m == 0 {
        return values.to_vec();
    }
    let n = grid.n_points()[axis];
    let stride = grid.strides()[axis];
    let block = n * stride;
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for base in (0..values.len()).step_by(block) {
        for j in 0..n {
            let src = base + ((j + m) % n) * stride;
            let dst = base + j * stride;
            out[dst..dst + stride].copy_from_slice(&values[src..src + stride]);
        }
    }
    out
}

pub(crate) use spectral::{apply_full_symbol, forward_all, inverse_all};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::random_wave;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn spacing_times_points_is_length() {
        let g = Grid::new(&[8, 6], &[3.0, 7.5]).unwrap();
        for m in 0..2 {
            assert_eq!(g.spacing()[m] * g.n_points()[m] as f64, g.length()[m]);
            assert_eq!(g.wavenumbers(m).len(), g.n_points()[m]);
        }
    }

    #[test]
    fn wavenumbers_closed_under_negation_except_nyquist() {
        for n in [7usize, 8, 16, 33] {
            let g = Grid::line(n, 5.0).unwrap();
            let k = g.wavenumbers(0);
            let nyq = if n % 2 == 0 { Some(-(2.0 * PI * (n / 2) as f64 / 5.0)) } else { None };
            for &kv in k {
                if Some(kv) == nyq {
                    continue;
                }
                assert!(k.iter().any(|&o| (o + kv).abs() < 1e-12), "n={n} κ={kv}");
            }
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(&[], &[]).is_err());
        assert!(Grid::new(&[0], &[1.0]).is_err());
        assert!(Grid::new(&[4], &[-1.0]).is_err());
        assert!(Grid::new(&[4, 4], &[1.0]).is_err());
    }

    #[test]
    fn sample_zero_function() {
        let g = Grid::line(16, 2.0).unwrap();
        let f = sample(|_| Complex64::new(0.0, 0.0), &g).unwrap();
        assert!(f.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert_eq!(f.norm(), 0.0);
    }

    #[test]
    fn sample_plane_wave_gives_roots_of_unity() {
        let g = Grid::line(8, 8.0).unwrap();
        let k1 = 2.0 * PI / 8.0;
        let f = sample(|x| Complex64::from_polar(1.0, k1 * x[0]), &g).unwrap();
        for (j, v) in f.values().iter().enumerate() {
            let root = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 8.0);
            assert!((v - root).norm() < 1e-15);
        }
    }

    #[test]
    fn sample_rejects_non_finite_with_coordinate() {
        let g = Grid::line(4, 4.0).unwrap();
        let err = sample(|x| Complex64::new(1.0 / (x[0] - 2.0), 0.0), &g).unwrap_err();
        match err {
            ChernoffError::NonFinite { coord } => assert_eq!(coord, vec![2.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = WaveFunction::zeros(&Grid::line(8, 1.0).unwrap());
        let b = WaveFunction::zeros(&Grid::line(8, 2.0).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(ChernoffError::GridMismatch)));
    }

    #[test]
    fn inner_product_self_is_real_nonnegative() {
        let g = Grid::line(64, 3.0).unwrap();
        for seed in 0..10 {
            let f = random_wave(&g, seed);
            let ip = inner_product(&f, &f).unwrap();
            assert!(ip.re >= 0.0);
            assert!(ip.im.abs() <= 1e-15 * ip.re);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let g = Grid::new(&[8, 4], &[1.0, 2.0]).unwrap();
        let f = random_wave(&g, 1);
        let h = random_wave(&g, 2);
        let a = inner_product(&f, &h).unwrap();
        let b = inner_product(&h, &f).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn distinct_plane_waves_are_orthogonal() {
        let g = Grid::line(16, 5.0).unwrap();
        let k = g.wavenumbers(0).to_vec();
        for (i, &k1) in k.iter().enumerate() {
            for &k2 in &k[i + 1..] {
                let f = sample(|x| Complex64::from_polar(1.0, k1 * x[0]), &g).unwrap();
                let h = sample(|x| Complex64::from_polar(1.0, k2 * x[0]), &g).unwrap();
                assert!(inner_product(&f, &h).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn norm_homogeneity() {
        let g = Grid::line(32, 4.0).unwrap();
        let f = random_wave(&g, 5);
        let c = Complex64::new(-1.3, 0.7);
        assert!(rel_close(f.scaled(c).norm(), c.norm() * f.norm(), 1e-14));
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let g = Grid::line(32, 4.0).unwrap();
        let f = random_wave(&g, 9);
        let s = spectral_shift(&f, 0, 0.0).unwrap();
        assert_eq!(s.values(), f.values());
    }

    #[test]
    fn shift_axis_out_of_range() {
        let g = Grid::line(8, 1.0).unwrap();
        let f = WaveFunction::zeros(&g);
        assert!(matches!(spectral_shift(&f, 1, 0.1), Err(ChernoffError::AxisOutOfRange { axis: 1, d: 1 })));
    }

    #[test]
    fn shift_plane_wave_is_phase() {
        let g = Grid::line(64, 10.0).unwrap();
        for &k in &[g.wavenumbers(0)[3], g.wavenumbers(0)[60], g.wavenumbers(0)[32]] {
            let f = sample(|x| Complex64::from_polar(1.0, k * x[0]), &g).unwrap();
            for &tau in &[0.0137, -1.9, 12.4] {
                let s = spectral_shift(&f, 0, tau).unwrap();
                let expected = f.scaled(Complex64::from_polar(1.0, k * tau));
                assert!(s.distance(&expected).unwrap() < 1e-12 * f.norm());
            }
        }
    }

    #[test]
    fn integer_offset_is_exact_roll() {
        let g = Grid::new(&[6, 8], &[3.0, 2.0]).unwrap();
        let f = random_wave(&g, 3);
        let h = g.spacing()[1];
        let s = spectral_shift(&f, 1, 3.0 * h).unwrap();
        for flat in 0..g.total_size() {
            let idx = g.multi_index(flat);
            let src = idx[0] * 8 + (idx[1] + 3) % 8;
            assert_eq!(s.values()[flat], f.values()[src]);
        }
        let back = spectral_shift(&f, 0, -2.0 * g.spacing()[0]).unwrap();
        for flat in 0..g.total_size() {
            let idx = g.multi_index(flat);
            let src = ((idx[0] + 4) % 6) * 8 + idx[1];
            assert_eq!(back.values()[flat], f.values()[src]);
        }
    }

    #[test]
    fn parseval() {
        let g = Grid::new(&[16, 8], &[2.0, 3.0]).unwrap();
        let f = random_wave(&g, 11);
        let h = random_wave(&g, 12);
        let a = inner_product(&f, &h).unwrap();
        let b = inner_product_spectral(&f, &h).unwrap();
        assert!((a - b).norm() <= 1e-12 * f.norm() * h.norm());
    }
}
