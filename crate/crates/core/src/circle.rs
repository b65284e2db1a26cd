//! A particle on the circle: angle grid on `[0, 2 pi)`, the rotation group acting
//! by `U(b) psi(a) = psi(a - b)`, its generator `K` with integer spectrum, the free
//! dynamics `Omega = (c/2 kappa) K^2` and closed-form correlations of the
//! stationary states.
//!
//! Modes are `n in (-N/2, N/2]`; the mode `N/2` is kept only as a lattice mode and
//! is excluded from the basis.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::fft_nd;
use crate::numeric::{cis, is_power_of_two, pairwise_sum_by};

/// Largest grid accepted by [`k_matrix_eigenvalues`].
pub const CIRCLE_DENSE_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircleGrid {
    points: usize,
}

impl CircleGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 4 || !is_power_of_two(points) {
            return Err(Error::InvalidGrid(format!("circle points {points} must be a power of two >= 4")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.angle(j)).collect()
    }

    /// Mode number of FFT bin `j`, in `(-N/2, N/2]`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.points as i64;
        let j = j as i64;
        if j > n / 2 {
            j - n
        } else {
            j
        }
    }

    /// Modes `n` with `|n| < N/2`, in increasing order.
    pub fn basis_modes(&self) -> impl Iterator<Item = i64> {
        let h = (self.points / 2) as i64;
        -h + 1..h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleWavefunction {
    grid: CircleGrid,
    values: Vec<Complex64>,
}

impl CircleWavefunction {
    pub fn new(grid: CircleGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(Error::DimensionMismatch { expected: grid.points, got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: CircleGrid, f: F) -> Self {
        Self { grid, values: grid.angles().into_iter().map(f).collect() }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: CircleGrid, f: F) -> Self {
        Self::from_fn(grid, |a| Complex64::new(f(a), 0.0))
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn norm(&self) -> f64 {
        circle_inner(self, self).map_or(0.0, |z| z.re.max(0.0).sqrt())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm().powi(2) - 1.0).abs() < 1e-10
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        same_grid(self, other)?;
        let d = pairwise_sum_by(self.values.len(), &|i| (self.values[i] - other.values[i]).norm_sqr());
        Ok((d * self.grid.spacing()).sqrt())
    }

    /// `(2 pi)^{-1} integral f`, the angular mean.
    pub fn mean(&self) -> Complex64 {
        pairwise_sum_by(self.values.len(), &|i| self.values[i]) / self.grid.points as f64
    }
}

fn same_grid(a: &CircleWavefunction, b: &CircleWavefunction) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `<phi|psi> = sum conj(phi) psi (2 pi/N)`.
pub fn circle_inner(phi: &CircleWavefunction, psi: &CircleWavefunction) -> Result<Complex64> {
    same_grid(phi, psi)?;
    let s = pairwise_sum_by(phi.values.len(), &|i| phi.values[i].conj() * psi.values[i]);
    Ok(s * phi.grid.spacing())
}

/// `psi_n(a) = (2 pi)^{-1/2} e^{ina}`.
pub fn circle_basis(n: i64, grid: &CircleGrid) -> Result<CircleWavefunction> {
    let half = (grid.points / 2) as i64;
    if n.abs() >= half {
        return Err(Error::BandLimit(format!("mode {n} aliases on {} points", grid.points)));
    }
    let amp = (2.0 * PI).sqrt().recip();
    // exact phases from the integer product n j mod N
    let vals = (0..grid.points)
        .map(|j| {
            let r = (n * j as i64).rem_euclid(grid.points as i64);
            cis(2.0 * PI * r as f64 / grid.points as f64) * amp
        })
        .collect();
    CircleWavefunction::new(*grid, vals)
}

/// Multiply mode `n` by `factor(n)`.
pub fn circle_spectral_map<F: Fn(i64) -> Complex64>(psi: &CircleWavefunction, factor: F) -> CircleWavefunction {
    let n = psi.grid.points;
    let mut data = psi.values.clone();
    fft_nd(&mut data, n, 1, false);
    for (j, v) in data.iter_mut().enumerate() {
        *v *= factor(psi.grid.mode(j)) / n as f64;
    }
    fft_nd(&mut data, n, 1, true);
    CircleWavefunction { grid: psi.grid, values: data }
}

/// Fourier coefficients `c_n` with `psi = sum c_n psi_n`, ordered by FFT bin.
pub fn circle_modes(psi: &CircleWavefunction) -> Vec<(i64, Complex64)> {
    let n = psi.grid.points;
    let mut data = psi.values.clone();
    fft_nd(&mut data, n, 1, false);
    let scale = (2.0 * PI).sqrt() / n as f64;
    data.into_iter().enumerate().map(|(j, v)| (psi.grid.mode(j), v * scale)).collect()
}

/// `U(b) psi(a) = psi(a - b mod 2 pi)`, exact for any `b`.
pub fn circle_rotate(alpha_prime: f64, psi: &CircleWavefunction) -> CircleWavefunction {
    if alpha_prime == 0.0 {
        return psi.clone();
    }
    circle_spectral_map(psi, |n| cis(-(n as f64) * alpha_prime))
}

/// `K psi = -i psi'`, so `U(b) = e^{-ibK}`.
pub fn circle_k_apply(psi: &CircleWavefunction) -> CircleWavefunction {
    circle_spectral_map(psi, |n| Complex64::new(n as f64, 0.0))
}

/// Multiplication by the angle `a in [0, 2 pi)`.
pub fn circle_position_apply(psi: &CircleWavefunction) -> CircleWavefunction {
    let g = psi.grid;
    CircleWavefunction {
        grid: g,
        values: psi.values.iter().enumerate().map(|(j, v)| v * g.angle(j)).collect(),
    }
}

/// `||i[K, Q] psi - psi||`. Small only for states vanishing smoothly at the seam `a = 0`.
pub fn circle_ccr_residual(psi: &CircleWavefunction) -> Result<f64> {
    let kq = circle_k_apply(&circle_position_apply(psi));
    let qk = circle_position_apply(&circle_k_apply(psi));
    let vals = kq.values.iter().zip(&qk.values).map(|(a, b)| (a - b) * Complex64::new(0.0, 1.0)).collect();
    CircleWavefunction::new(psi.grid, vals)?.distance(psi)
}

fn check_dynamics(kappa: f64, c: f64) -> Result<()> {
    if kappa == 0.0 || !kappa.is_finite() || !(c > 0.0) {
        return Err(Error::InvalidParameter("need kappa != 0 and c > 0".into()));
    }
    Ok(())
}

/// Eigenvalue `n^2 c / 2 kappa` of `Omega` on `psi_n`.
pub fn circle_frequency(n: i64, kappa: f64, c: f64) -> f64 {
    (n * n) as f64 * c / (2.0 * kappa)
}

/// `e^{-i Omega t} psi` with `Omega = (c/2 kappa) K^2`.
pub fn circle_evolve(t: f64, psi: &CircleWavefunction, kappa: f64, c: f64) -> Result<CircleWavefunction> {
    check_dynamics(kappa, c)?;
    Ok(circle_spectral_map(psi, |n| cis(-circle_frequency(n, kappa, c) * t)))
}

/// Closed form `F(f, a1, a2) = e^{in(a1 - a2)} (2 pi)^{-1} integral f` in the state `psi_n`.
pub fn circle_correlation(f: &CircleWavefunction, alpha1: f64, alpha2: f64, n: i64) -> Complex64 {
    cis(n as f64 * (alpha1 - alpha2)) * f.mean()
}

/// `<U(a2)* psi | f U(a1)* psi>` evaluated directly.
pub fn circle_correlation_direct(
    f: &CircleWavefunction,
    alpha1: f64,
    alpha2: f64,
    psi: &CircleWavefunction,
) -> Result<Complex64> {
    same_grid(f, psi)?;
    let right = circle_rotate(-alpha1, psi);
    let left = circle_rotate(-alpha2, psi);
    let fr = CircleWavefunction {
        grid: psi.grid,
        values: right.values.iter().zip(&f.values).map(|(a, b)| a * b).collect(),
    };
    circle_inner(&left, &fr)
}

/// One row of the spectrum table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub n: i64,
    pub k_eigenvalue: f64,
    pub omega_eigenvalue: f64,
}

/// `(n, <psi_n|K psi_n>, <psi_n|Omega psi_n>)` for every basis mode.
pub fn circle_spectrum(grid: &CircleGrid, kappa: f64, c: f64) -> Result<Vec<SpectrumRow>> {
    check_dynamics(kappa, c)?;
    grid.basis_modes()
        .map(|n| {
            let psi = circle_basis(n, grid)?;
            let k = circle_inner(&psi, &circle_k_apply(&psi))?.re;
            let omega = circle_spectral_map(&psi, |m| Complex64::new(circle_frequency(m, kappa, c), 0.0));
            Ok(SpectrumRow { n, k_eigenvalue: k, omega_eigenvalue: circle_inner(&psi, &omega)?.re })
        })
        .collect()
}

/// Eigenvalues of the dense lattice matrix of `K`, sorted.
pub fn k_matrix_eigenvalues(grid: &CircleGrid) -> Result<Vec<f64>> {
    let n = grid.points;
    if n > CIRCLE_DENSE_LIMIT {
        return Err(Error::TooLarge { what: "dense K matrix".into(), size: n, limit: CIRCLE_DENSE_LIMIT });
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let col = circle_k_apply(&CircleWavefunction::new(*grid, e)?);
        for (i, v) in col.values.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    let herm = (&m + m.adjoint()).scale(0.5);
    let mut eig: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g64() -> CircleGrid {
        CircleGrid::new(64).unwrap()
    }

    #[test]
    fn basis_is_orthonormal() {
        let g = g64();
        for n in [-5, 0, 1, 2, 31] {
            let p = circle_basis(n, &g).unwrap();
            assert!((circle_inner(&p, &p).unwrap() - 1.0).norm() < 1e-14);
        }
        let (a, b) = (circle_basis(1, &g).unwrap(), circle_basis(2, &g).unwrap());
        assert!(circle_inner(&a, &b).unwrap().norm() < 1e-15);
        let zero = circle_basis(0, &g).unwrap();
        assert!(zero.values().iter().all(|v| (v.re - (2.0 * PI).sqrt().recip()).abs() < 1e-16 && v.im == 0.0));
        assert!(circle_basis(32, &g).is_err());
        assert!(CircleGrid::new(12).is_err());
    }

    #[test]
    fn rotation_acts_by_phase() {
        let g = g64();
        let p1 = circle_basis(1, &g).unwrap();
        assert_eq!(circle_rotate(0.0, &p1), p1);
        assert!(circle_rotate(2.0 * PI, &p1).distance(&p1).unwrap() < 1e-12);
        assert!(circle_rotate(PI, &p1).distance(&p1.scaled(Complex64::new(-1.0, 0.0))).unwrap() < 1e-12);
        for n in [-7, 3, 20] {
            let p = circle_basis(n, &g).unwrap();
            let expect = p.scaled(cis(-(n as f64) * 0.37));
            assert!(circle_rotate(0.37, &p).distance(&expect).unwrap() < 1e-12);
        }
        // lattice rotation is a plain index shift
        let f = CircleWavefunction::from_real_fn(g, |a| (a.sin() * 2.0).exp());
        let rolled = circle_rotate(3.0 * g.spacing(), &f);
        for j in 0..64 {
            assert!((rolled.values()[j] - f.values()[(j + 61) % 64]).norm() < 1e-12);
        }
    }

    #[test]
    fn k_and_frequency_spectrum() {
        let g = g64();
        let p3 = circle_basis(3, &g).unwrap();
        assert!(circle_k_apply(&p3).distance(&p3.scaled(Complex64::new(3.0, 0.0))).unwrap() < 1e-12);
        let rows = circle_spectrum(&g, 1.5, 2.0).unwrap();
        assert_eq!(rows.len(), 63);
        let at = |n: i64| rows.iter().find(|r| r.n == n).unwrap();
        assert!((at(2).omega_eigenvalue - 4.0 * 2.0 / 3.0).abs() < 1e-12);
        assert!((at(-2).omega_eigenvalue - at(2).omega_eigenvalue).abs() < 1e-12);
        assert!(at(0).omega_eigenvalue.abs() < 1e-12);
        for r in &rows {
            assert!((r.k_eigenvalue - r.n as f64).abs() < 1e-12);
        }
        let eig = k_matrix_eigenvalues(&g).unwrap();
        for (e, n) in eig.iter().zip(-31..=32) {
            assert!((e - n as f64).abs() < 1e-10, "{e} vs {n}");
        }
    }

    #[test]
    fn stationary_states() {
        let g = g64();
        let (kappa, c, t) = (1.3, 1.0, 2.7);
        for n in [0, 1, -4, 9] {
            let p = circle_basis(n, &g).unwrap();
            let out = circle_evolve(t, &p, kappa, c).unwrap();
            let phase = cis(-((n * n) as f64) * c * t / (2.0 * kappa));
            assert!(out.distance(&p.scaled(phase)).unwrap() < 1e-12);
            assert!((circle_inner(&p, &out).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(circle_evolve(1.0, &circle_basis(1, &g).unwrap(), 0.0, 1.0).is_err());
    }

    #[test]
    fn correlation_closed_form() {
        let g = g64();
        let f = CircleWavefunction::from_fn(g, |a| {
            Complex64::new(0.7 + (2.0 * a).cos() - 0.4 * (3.0 * a).sin(), 0.3 * a.cos())
        });
        let psi = circle_basis(2, &g).unwrap();
        let closed = circle_correlation(&f, 0.3, 1.1, 2);
        let direct = circle_correlation_direct(&f, 0.3, 1.1, &psi).unwrap();
        assert!((closed - direct).norm() < 1e-10);
        assert!((circle_correlation(&f, 0.5, 0.5, 2) - f.mean()).norm() < 1e-15);
        let one = CircleWavefunction::from_real_fn(g, |_| 1.0);
        assert!((circle_correlation(&one, 0.3, 1.1, 2) - cis(2.0 * -0.8)).norm() < 1e-15);
    }

    #[test]
    fn ccr_holds_only_away_from_the_seam() {
        let g = CircleGrid::new(256).unwrap();
        // negligible with all its derivatives at the seam
        let bump = CircleWavefunction::from_real_fn(g, |a| (-(a - PI).powi(2) / (2.0 * 0.35f64.powi(2))).exp());
        let r = circle_ccr_residual(&bump).unwrap();
        assert!(r < 1e-8, "{r:e}");
        let p1 = circle_basis(1, &g).unwrap();
        assert!(circle_ccr_residual(&p1).unwrap() > 0.1);
    }
}
