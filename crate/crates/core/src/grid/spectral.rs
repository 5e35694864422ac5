use num_complex::Complex64;

use super::Grid;

/// Unnormalized DFT (forward or inverse) of every line along `axis`.
pub(crate) fn fft_axis(grid: &Grid, data: &mut [Complex64], axis: usize, inverse: bool) {
    let fft = grid.fft_plans(axis, inverse);
    let n = grid.n_points()[axis];
    let stride = grid.strides()[axis];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    if stride == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    let block = n * stride;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for base in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let start = base + inner;
            for j in 0..n {
                line[j] = data[start + j * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for j in 0..n {
                data[start + j * stride] = line[j];
            }
        }
    }
}

pub(crate) fn forward_all(grid: &Grid, data: &mut [Complex64]) {
    for axis in 0..grid.dim() {
        fft_axis(grid, data, axis, false);
    }
}

/// Inverse DFT over all axes, normalized so that it undoes [`forward_all`].
pub(crate) fn inverse_all(grid: &Grid, data: &mut [Complex64]) {
    for axis in 0..grid.dim() {
        fft_axis(grid, data, axis, true);
    }
    let scale = 1.0 / grid.total_size() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
}

/// Multiplies mode `κ` of every line along `axis` by `symbol[κ]`.
pub(crate) fn apply_axis_symbol(grid: &Grid, data: &mut [Complex64], axis: usize, symbol: &[Complex64]) {
    let n = grid.n_points()[axis];
    let stride = grid.strides()[axis];
    fft_axis(grid, data, axis, false);
    let scale = 1.0 / n as f64;
    for (flat, v) in data.iter_mut().enumerate() {
        let mode = (flat / stride) % n;
        *v *= symbol[mode] * scale;
    }
    fft_axis(grid, data, axis, true);
}

/// Fourier multiplier over the full lattice: `data ← F⁻¹(symbol · F data)`.
pub(crate) fn apply_full_symbol(grid: &Grid, data: &mut [Complex64], symbol: &[Complex64]) {
    forward_all(grid, data);
    data.iter_mut().zip(symbol).for_each(|(v, s)| *v *= s);
    inverse_all(grid, data);
}
