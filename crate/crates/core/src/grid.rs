//! Discretized configuration space and the Hilbert-space primitives on it.
//!
//! A [`GridSpec`] is a uniform periodic lattice over the box `[-L/2, L/2)^n`
//! with `N` points per axis. Samples are stored in row-major order (axis 0
//! varies slowest). All integrals are plain Riemann sums times `dq^n`, which
//! is spectrally exact for band-limited periodic integrands.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{is_power_of_two, pairwise_sum, pairwise_sum_by, wrap_centered};

/// Default cap on the total number of lattice points `N^dim`.
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        Self::with_point_cap(dim, points_per_axis, box_length, DEFAULT_POINT_CAP)
    }

    pub fn with_point_cap(
        dim: usize,
        points_per_axis: usize,
        box_length: f64,
        cap: usize,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} outside 1..=3")));
        }
        if points_per_axis < 4 || !is_power_of_two(points_per_axis) {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points_per_axis} must be a power of two >= 4"
            )));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidGrid(format!("box length {box_length} must be positive")));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGrid("point count overflows".into()))?;
        if total > cap {
            return Err(Error::TooLarge { what: "grid points".into(), size: total, limit: cap });
        }
        Ok(Self { dim, points_per_axis, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of lattice points, `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position spacing `dq = L/N`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Wavevector spacing `dk = 2 pi / L`.
    pub fn wavevector_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// `dq^n`, the quadrature weight of a lattice point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `dk^n`, the quadrature weight of a wavevector lattice point.
    pub fn wavevector_cell_volume(&self) -> f64 {
        self.wavevector_spacing().powi(self.dim as i32)
    }

    /// Nyquist wavevector `pi / dq`.
    pub fn max_wavevector(&self) -> f64 {
        PI / self.spacing()
    }

    /// Lattice coordinates along one axis: `-L/2 + j dq`.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        let dq = self.spacing();
        let half = self.box_length / 2.0;
        (0..self.points_per_axis).map(|j| -half + j as f64 * dq).collect()
    }

    /// Wavevectors `m dk` for `m in [-N/2, N/2)`, in centered order.
    pub fn axis_wavevectors(&self) -> Vec<f64> {
        let dk = self.wavevector_spacing();
        let n = self.points_per_axis as i64;
        (-n / 2..n / 2).map(|m| m as f64 * dk).collect()
    }

    pub fn unravel(&self, index: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0usize; 3];
        let mut rem = index;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % n;
            rem /= n;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Position of a lattice point; unused trailing components are zero.
    pub fn coordinate(&self, index: usize) -> [f64; 3] {
        let idx = self.unravel(index);
        let dq = self.spacing();
        let half = self.box_length / 2.0;
        let mut q = [0.0; 3];
        for axis in 0..self.dim {
            q[axis] = -half + idx[axis] as f64 * dq;
        }
        q
    }

    pub fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    /// True when every component of `a` is an integer multiple of `dq`.
    pub fn is_commensurate(&self, a: &[f64]) -> bool {
        let dq = self.spacing();
        a.iter().all(|x| {
            let r = x / dq;
            (r - r.round()).abs() < 1e-9
        })
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// `make_grid(dim, N, L)`, the plain constructor with the default point cap.
pub fn make_grid(dim: usize, points_per_axis: usize, box_length: f64) -> Result<GridSpec> {
    GridSpec::new(dim, points_per_axis, box_length)
}

/// Complex samples on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// Functions of position share the sample container of wavefunctions.
pub type GridFunction = Wavefunction;

impl Wavefunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); grid.len()], grid }
    }

    pub fn constant(grid: GridSpec, c: Complex64) -> Self {
        Self { values: vec![c; grid.len()], grid }
    }

    /// Sample `f` at every lattice point. The closure receives a slice of
    /// length `dim`.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let q = grid.coordinate(i);
                f(&q[..dim])
            })
            .collect();
        Self { grid, values }
    }

    pub fn from_real_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::from_fn(grid, |q| Complex64::new(f(q), 0.0))
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

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid, values }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    pub fn conj(&self) -> Self {
        self.with_values(self.values.iter().map(|v| v.conj()).collect())
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: Complex64, other: &Wavefunction) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.with_values(
            self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        ))
    }

    pub fn sub(&self, other: &Wavefunction) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Pointwise product of two grid functions.
    pub fn pointwise_mul(&self, other: &Wavefunction) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    /// `||self - other||`
    pub fn distance(&self, other: &Wavefunction) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = pairwise_sum_by(self.values.len(), &|i| {
            (self.values[i] - other.values[i]).norm_sqr()
        });
        Ok((s * self.grid.cell_volume()).sqrt())
    }

    /// Probability mass on the outer `fraction` of the box along any axis.
    pub fn edge_mass(&self, fraction: f64) -> f64 {
        let half = self.grid.box_length() / 2.0;
        let inner = half * (1.0 - fraction);
        let dim = self.grid.dim();
        let s: f64 = pairwise_sum_by(self.values.len(), &|i| {
            let q = self.grid.coordinate(i);
            if q[..dim].iter().any(|x| x.abs() >= inner) {
                self.values[i].norm_sqr()
            } else {
                0.0
            }
        });
        s * self.grid.cell_volume()
    }
}

/// Gaussian wave packet `(2 pi lambda^2)^{-n/4} exp(-|q - c|^2 / 4 lambda^2) exp(i k0 q)`,
/// centered on the periodic image of `center` nearest each lattice point and
/// normalized by quadrature.
pub fn sample_gaussian(
    grid: &GridSpec,
    lambda: f64,
    center: &[f64],
    k0: &[f64],
) -> Result<Wavefunction> {
    grid.check_vector(center)?;
    grid.check_vector(k0)?;
    let min = 4.0 * grid.spacing();
    let max = grid.box_length() / 8.0;
    let slack = 1e-12 * max;
    if !(lambda >= min - slack && lambda <= max + slack) {
        return Err(Error::Unresolvable { lambda, min, max });
    }
    let k0_abs = k0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if k0_abs > grid.max_wavevector() / 2.0 {
        return Err(Error::BandLimit(format!(
            "|k0| = {k0_abs} exceeds half the Nyquist wavevector {}",
            grid.max_wavevector() / 2.0
        )));
    }
    let n = grid.dim() as f64;
    let amp = (2.0 * PI * lambda * lambda).powf(-n / 4.0);
    let l = grid.box_length();
    let psi = Wavefunction::from_fn(*grid, |q| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for j in 0..q.len() {
            let d = wrap_centered(q[j] - center[j], l);
            r2 += d * d;
            phase += k0[j] * q[j];
        }
        Complex64::from_polar(amp * (-r2 / (4.0 * lambda * lambda)).exp(), phase)
    });
    normalize(&psi)
}

/// `<phi|psi>`: antilinear in `phi`, linear in `psi`.
pub fn inner(phi: &Wavefunction, psi: &Wavefunction) -> Result<Complex64> {
    phi.grid.ensure_same(&psi.grid)?;
    let s: Complex64 =
        pairwise_sum_by(phi.values.len(), &|i| phi.values[i].conj() * psi.values[i]);
    Ok(s * phi.grid.cell_volume())
}

pub fn norm(psi: &Wavefunction) -> f64 {
    let sq: Vec<f64> = psi.values.iter().map(|v| v.norm_sqr()).collect();
    (pairwise_sum(&sq) * psi.grid.cell_volume()).sqrt()
}

pub fn normalize(psi: &Wavefunction) -> Result<Wavefunction> {
    let n = norm(psi);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(psi.scaled(Complex64::new(1.0 / n, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_grid_spacings() {
        let g = make_grid(1, 256, 40.0).unwrap();
        assert_eq!(g.spacing(), 0.15625);
        assert!((g.wavevector_spacing() - 2.0 * PI / 40.0).abs() < 1e-15);
        let prod = g.spacing() * g.wavevector_spacing() * 256.0;
        assert!((prod - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn smallest_3d_grid() {
        let g = make_grid(3, 4, 1.0).unwrap();
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(make_grid(1, 100, 10.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0, 64, 10.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(4, 64, 10.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(1, 64, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(1, 64, -2.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(1, 2, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(
            GridSpec::with_point_cap(3, 64, 1.0, 1000),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn ravel_roundtrip() {
        let g = make_grid(3, 8, 1.0).unwrap();
        for i in [0, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
        assert_eq!(g.unravel(8 * 8 + 2), [1, 0, 2]);
    }

    #[test]
    fn gaussian_is_normalized() {
        let g = make_grid(1, 512, 40.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.0], &[0.0]).unwrap();
        assert!((norm(&psi) - 1.0).abs() < 1e-10);
        // raw closed-form density integrates to one on this box as well
        let raw: f64 = g
            .axis_coordinates()
            .iter()
            .map(|q| (2.0 * PI).powf(-0.5) * (-q * q / 2.0).exp())
            .sum::<f64>()
            * g.spacing();
        assert!((raw - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_peak_value() {
        for dim in 1..=3 {
            let (n, l) = if dim == 3 { (128, 24.0) } else { (128, 16.0) };
            let g = make_grid(dim, n, l).unwrap();
            let zero = vec![0.0; dim];
            let psi = sample_gaussian(&g, 1.0, &zero, &zero).unwrap();
            let origin = g.ravel(&[n / 2, n / 2, n / 2]);
            let expect = (2.0 * PI).powf(-(dim as f64) / 4.0);
            assert!((psi.values()[origin].re - expect).abs() < 1e-8, "dim {dim}");
        }
    }

    #[test]
    fn gaussian_rejects_unresolvable_width() {
        let g = make_grid(1, 256, 40.0).unwrap();
        let dq = g.spacing();
        assert!(matches!(
            sample_gaussian(&g, dq, &[0.0], &[0.0]),
            Err(Error::Unresolvable { .. })
        ));
        assert!(matches!(
            sample_gaussian(&g, 6.0, &[0.0], &[0.0]),
            Err(Error::Unresolvable { .. })
        ));
        assert!(matches!(
            sample_gaussian(&g, 1.0, &[0.0], &[g.max_wavevector()]),
            Err(Error::BandLimit(_))
        ));
    }

    #[test]
    fn inner_product_conventions() {
        let g = make_grid(1, 256, 40.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.5], &[1.0]).unwrap();
        let phi = sample_gaussian(&g, 1.5, &[-0.5], &[0.0]).unwrap();
        assert!((inner(&psi, &psi).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
        let ab = inner(&phi, &psi).unwrap();
        let ba = inner(&psi, &phi).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        let z = c(0.3, -1.7);
        let lhs = inner(&psi.scaled(z), &psi).unwrap();
        assert!((lhs - z.conj()).norm() < 1e-12);
    }

    #[test]
    fn modulated_gaussians_are_nearly_orthogonal() {
        // closed-form overlap of e^{+ikq} and e^{-ikq} packets is exp(-lambda^2 (2k)^2 / 2)
        let g = make_grid(1, 512, 40.0).unwrap();
        let k = 3.0;
        let a = sample_gaussian(&g, 1.0, &[0.0], &[k]).unwrap();
        let b = sample_gaussian(&g, 1.0, &[0.0], &[-k]).unwrap();
        let ov = inner(&a, &b).unwrap();
        let expect = (-2.0f64 * k * k).exp();
        assert!((ov.re - expect).abs() < 1e-12 && ov.im.abs() < 1e-12);
        assert!(ov.norm() < 1e-7);
    }

    #[test]
    fn normalize_behaviour() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let psi = Wavefunction::from_real_fn(g, |q| (-q[0] * q[0]).exp());
        let a = normalize(&psi).unwrap();
        let b = normalize(&psi.scaled(c(2.0, 0.0))).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-15);
        assert!((norm(&a) - 1.0).abs() < 1e-12);
        assert_eq!(norm(&Wavefunction::zeros(g)), 0.0);
        assert!(matches!(normalize(&Wavefunction::zeros(g)), Err(Error::ZeroVector)));
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = Wavefunction::zeros(make_grid(1, 64, 10.0).unwrap());
        let b = Wavefunction::zeros(make_grid(1, 64, 12.0).unwrap());
        assert!(matches!(inner(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn commensurate_detection() {
        let g = make_grid(2, 64, 16.0).unwrap();
        assert!(g.is_commensurate(&[0.25, -1.0]));
        assert!(!g.is_commensurate(&[0.3, 0.0]));
    }
}
