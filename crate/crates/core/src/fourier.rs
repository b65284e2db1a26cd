//! Fourier conventions and the convolution *-algebra of transformed functions.
//!
//! Forward: `f~(k) = (2 pi)^{-n} sum_q dq^n e^{-ikq} f(q)`.
//! Inverse: `f(q) = sum_k dk^n f~(k) e^{ikq}`.
//! The whole `(2 pi)^{-n}` lives in the forward transform, so
//! `inverse(forward(f)) == f` exactly on the lattice. Spectral samples are kept
//! in centered order, index `c` holding wavevector `(c - N/2) dk` per axis.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Wavefunction};
use crate::numeric::pairwise_sum_by;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized n-dimensional FFT in place (row-major, `n` points per axis).
pub(crate) fn fft_nd(data: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    for axis in 0..dim {
        fft_axis(data, n, dim, axis, inverse);
    }
}

/// Unnormalized FFT along one axis of a row-major `dim`-dimensional array.
pub(crate) fn fft_axis(data: &mut [Complex64], n: usize, dim: usize, axis: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let inner = n.pow((dim - 1 - axis) as u32);
    if inner == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    let outer = data.len() / (n * inner);
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            let line = (o * inner + i) * n;
            for j in 0..n {
                lines[line + j] = data[base + j * inner];
            }
        }
    }
    fft.process_with_scratch(&mut lines, &mut scratch);
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            let line = (o * inner + i) * n;
            for j in 0..n {
                data[base + j * inner] = lines[line + j];
            }
        }
    }
}

/// One-dimensional FFT over each contiguous line of length `n`.
pub(crate) fn fft_lines(data: &mut [Complex64], n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
}

/// Signed mode number of raw FFT index `p`.
#[inline]
pub(crate) fn raw_mode(p: usize, n: usize) -> i64 {
    if p < n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// Wavevectors in raw FFT order along one axis.
pub(crate) fn raw_wavevectors(grid: &GridSpec) -> Vec<f64> {
    let n = grid.points_per_axis();
    let dk = grid.wavevector_spacing();
    (0..n).map(|p| raw_mode(p, n) as f64 * dk).collect()
}

/// Multiply the spectrum of `psi` by `factor(k)` and transform back.
/// This is the workhorse behind shifts, generators and free evolution.
pub(crate) fn spectral_multiply<F>(psi: &Wavefunction, factor: F) -> Wavefunction
where
    F: Fn(&[f64]) -> Complex64,
{
    let grid = *psi.grid();
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let ks = raw_wavevectors(&grid);
    let mut data = psi.values().to_vec();
    fft_nd(&mut data, n, dim, false);
    let scale = 1.0 / grid.len() as f64;
    let mut k = [0.0; 3];
    for (i, v) in data.iter_mut().enumerate() {
        let idx = grid.unravel(i);
        for axis in 0..dim {
            k[axis] = ks[idx[axis]];
        }
        *v *= factor(&k[..dim]) * scale;
    }
    fft_nd(&mut data, n, dim, true);
    psi.with_values(data)
}

/// Samples of a transformed function on the centered wavevector lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} spectral samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); grid.len()], grid }
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let k = wavevector_of(&grid, i);
                f(&k[..dim])
            })
            .collect();
        Self { grid, values }
    }

    /// A point mass at mode `m` (per-axis integers in `[-N/2, N/2)`) whose
    /// integral `sum dk^n f~` equals `weight`.
    pub fn point_mass(grid: GridSpec, m: &[i64], weight: Complex64) -> Result<Self> {
        grid.check_vector(&vec![0.0; m.len()])?;
        let mut out = Self::zeros(grid);
        let idx = centered_index(&grid, m)?;
        out.values[idx] = weight / grid.wavevector_cell_volume();
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn wavevector(&self, index: usize) -> [f64; 3] {
        wavevector_of(&self.grid, index)
    }

    pub fn at_mode(&self, m: &[i64]) -> Result<Complex64> {
        Ok(self.values[centered_index(&self.grid, m)?])
    }

    /// `sum_k dk^n f~(k)`, the discrete `integral dk f~(k)`.
    pub fn integral(&self) -> Complex64 {
        pairwise_sum_by(self.values.len(), &|i| self.values[i]) * self.grid.wavevector_cell_volume()
    }

    /// `sum_k dk^n |f~(k)|`, the discrete L1 norm.
    pub fn l1_norm(&self) -> f64 {
        pairwise_sum_by(self.values.len(), &|i| self.values[i].norm())
            * self.grid.wavevector_cell_volume()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn max_abs_diff(&self, other: &SpectralFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Wavevector of centered spectral index `index`.
pub fn wavevector_of(grid: &GridSpec, index: usize) -> [f64; 3] {
    let idx = grid.unravel(index);
    let n = grid.points_per_axis() as i64;
    let dk = grid.wavevector_spacing();
    let mut k = [0.0; 3];
    for axis in 0..grid.dim() {
        k[axis] = (idx[axis] as i64 - n / 2) as f64 * dk;
    }
    k
}

/// Flat centered index of mode `m`; modes outside `[-N/2, N/2)` wrap.
pub fn centered_index(grid: &GridSpec, m: &[i64]) -> Result<usize> {
    if m.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: m.len() });
    }
    let n = grid.points_per_axis() as i64;
    let mut idx = [0usize; 3];
    for axis in 0..grid.dim() {
        idx[axis] = (m[axis] + n / 2).rem_euclid(n) as usize;
    }
    Ok(grid.ravel(&idx))
}

// Raw FFT index <-> centered index along every axis is a half-length roll.
fn raw_to_centered(grid: &GridSpec, raw: &[Complex64]) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); raw.len()];
    for (i, v) in raw.iter().enumerate() {
        let mut idx = grid.unravel(i);
        for x in idx.iter_mut().take(dim) {
            *x = (*x + n / 2) % n;
        }
        out[grid.ravel(&idx)] = *v;
    }
    out
}

fn centered_to_raw(grid: &GridSpec, centered: &[Complex64]) -> Vec<Complex64> {
    // the half-length roll is its own inverse
    raw_to_centered(grid, centered)
}

// (-1)^(sum of centered indices); N/2 is even so this equals (-1)^(sum m).
fn checkerboard(grid: &GridSpec, index: usize) -> f64 {
    let idx = grid.unravel(index);
    let s: usize = idx[..grid.dim()].iter().sum();
    if s.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform `f~(k) = (2 pi)^{-n} integral dq e^{-ikq} f(q)`.
pub fn forward(f: &Wavefunction) -> SpectralFunction {
    let grid = *f.grid();
    let mut data = f.values().to_vec();
    fft_nd(&mut data, grid.points_per_axis(), grid.dim(), false);
    let scale = grid.cell_volume() / (2.0 * PI).powi(grid.dim() as i32);
    let mut values = raw_to_centered(&grid, &data);
    for (i, v) in values.iter_mut().enumerate() {
        *v *= scale * checkerboard(&grid, i);
    }
    SpectralFunction { grid, values }
}

/// Inverse transform `f(q) = integral dk f~(k) e^{ikq}`.
pub fn inverse(tf: &SpectralFunction) -> Wavefunction {
    let grid = tf.grid;
    let mut centered = tf.values.clone();
    let scale = grid.wavevector_cell_volume();
    for (i, v) in centered.iter_mut().enumerate() {
        *v *= scale * checkerboard(&grid, i);
    }
    let mut data = centered_to_raw(&grid, &centered);
    fft_nd(&mut data, grid.points_per_axis(), grid.dim(), true);
    Wavefunction::new(grid, data).expect("length preserved")
}

/// Convolution `(f~ x g~)(k) = integral dk' f~(k') g~(k - k')` on the periodic
/// wavevector lattice, evaluated through the convolution theorem.
pub fn convolve(tf: &SpectralFunction, tg: &SpectralFunction) -> Result<SpectralFunction> {
    tf.grid.ensure_same(&tg.grid)?;
    let f = inverse(tf);
    let g = inverse(tg);
    Ok(forward(&f.pointwise_mul(&g)?))
}

/// The involution `f~*(k) = conj(f~(-k))`.
pub fn involution(tf: &SpectralFunction) -> SpectralFunction {
    let grid = tf.grid;
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let mut values = vec![Complex64::new(0.0, 0.0); tf.values.len()];
    for (i, v) in values.iter_mut().enumerate() {
        let mut idx = grid.unravel(i);
        for x in idx.iter_mut().take(dim) {
            *x = (n - *x) % n;
        }
        *v = tf.values[grid.ravel(&idx)].conj();
    }
    SpectralFunction { grid, values }
}

/// Fraction of spectral mass in the top quarter of wavevector shells
/// (`max_j |m_j| >= 3N/8`).
pub fn spectral_tail_fraction(psi: &Wavefunction) -> f64 {
    let tf = forward(psi);
    let grid = tf.grid;
    let n = grid.points_per_axis() as i64;
    let cut = 3 * n / 8;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, v) in tf.values.iter().enumerate() {
        let idx = grid.unravel(i);
        let shell = idx[..grid.dim()].iter().map(|&c| (c as i64 - n / 2).abs()).max().unwrap_or(0);
        let w = v.norm_sqr();
        total += w;
        if shell >= cut {
            tail += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Band-limited in the exactness sense: less than `1e-12` of the spectral
/// mass in the top quarter of shells.
pub fn is_band_limited(psi: &Wavefunction) -> bool {
    spectral_tail_fraction(psi) < 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn constant_maps_to_single_sample() {
        for dim in 1..=2 {
            let g = make_grid(dim, 16, 3.0).unwrap();
            let c = Complex64::new(1.5, -0.5);
            let tf = forward(&Wavefunction::constant(g, c));
            let origin = centered_index(&g, &vec![0; dim]).unwrap();
            let expect = c * 3.0f64.powi(dim as i32) / (2.0 * PI).powi(dim as i32);
            for (i, v) in tf.values().iter().enumerate() {
                if i == origin {
                    assert!((v - expect).norm() < 1e-13);
                } else {
                    assert!(v.norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn plane_wave_is_a_delta() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let k0 = 5.0 * g.wavevector_spacing();
        let tf = forward(&Wavefunction::from_fn(g, |q| Complex64::from_polar(1.0, k0 * q[0])));
        let height = 10.0 / (2.0 * PI);
        let at = tf.at_mode(&[5]).unwrap();
        assert!((at.re - height).abs() < 1e-13 && at.im.abs() < 1e-13);
        let others: f64 = tf.values().iter().map(|v| v.norm()).sum::<f64>() - at.norm();
        assert!(others < 1e-11);
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = make_grid(2, 8, 1.0).unwrap();
        assert!(forward(&Wavefunction::zeros(g)).values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // exp(-q^2/2) -> (2 pi)^{-n} (2 pi)^{n/2} exp(-k^2/2)
        let g = make_grid(1, 256, 40.0).unwrap();
        let tf = forward(&Wavefunction::from_real_fn(g, |q| (-q[0] * q[0] / 2.0).exp()));
        for (i, v) in tf.values().iter().enumerate() {
            let k = tf.wavevector(i)[0];
            let expect = (2.0 * PI).powf(-0.5) * (-k * k / 2.0).exp();
            assert!((v - expect).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn point_mass_inverts_to_plane_wave() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let tf = SpectralFunction::point_mass(g, &[3], Complex64::new(1.0, 0.0)).unwrap();
        let f = inverse(&tf);
        let k0 = 3.0 * g.wavevector_spacing();
        for (q, v) in g.axis_coordinates().iter().zip(f.values()) {
            assert!((v - Complex64::from_polar(1.0, k0 * q)).norm() < 1e-13);
        }
    }

    #[test]
    fn involution_of_real_even_function_is_identity() {
        let g = make_grid(1, 64, 12.0).unwrap();
        let tf = forward(&Wavefunction::from_real_fn(g, |q| (-q[0] * q[0]).exp() * q[0].cos()));
        assert!(involution(&tf).max_abs_diff(&tf) < 1e-15);
    }

    #[test]
    fn band_limit_tail_fraction() {
        let g = make_grid(1, 128, 20.0).unwrap();
        let smooth = Wavefunction::from_real_fn(g, |q| (-q[0] * q[0] / 2.0).exp());
        assert!(is_band_limited(&smooth));
        let nyq = Wavefunction::from_real_fn(g, |q| {
            (-q[0] * q[0] / 2.0).exp() * (g.max_wavevector() * q[0]).cos()
        });
        assert!(spectral_tail_fraction(&nyq) > 0.5);
    }
}
