//! The Gaussian-smeared projection `E` of the uniqueness argument, its dense
//! matrix forms, the compression coefficient `lambda(f, a)` and the correlation
//! witness for vectors in the range of `E`.
//!
//! `E = (2 pi)^{-n/2} integral da e^{-|a|^2/4} G_a shift(a)`, `G_a(q) = g(q - a/2)`,
//! `g(q) = 2^{n/2} e^{-|q|^2}`. Its kernel is `phi0(q) phi0(r)` with
//! `phi0(q) = pi^{-n/4} e^{-|q|^2/2}`, so `E` is the rank-one projection on the
//! ground state.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{forward, SpectralFunction};
use crate::grid::{inner, normalize, GridFunction, GridSpec, Wavefunction};
use crate::numeric::{cis, pairwise_sum_by};
use crate::operators::{roll, shift, weyl_composition_phase};
use crate::states::CorrelationOracle;

/// Quadrature cutoff for the `a` integral; the weight `e^{-a^2/4}` is below `1e-15` beyond.
pub const A_MAX: f64 = 12.0;
/// Largest grid accepted by [`vn_apply`].
pub const APPLY_LIMIT: usize = 1024;
/// Largest grid accepted by the dense matrix builds.
pub const DENSE_LIMIT: usize = 256;
/// Largest spacing for which the `a` quadrature resolves the unit-width Gaussians.
pub const MAX_SPACING: f64 = 0.5;

/// `E` on a one-dimensional grid, with its `a`-lattice quadrature.
#[derive(Clone, Debug)]
pub struct VNProjection {
    grid: GridSpec,
    /// Lattice steps `m` with `a = m dq`.
    steps: Vec<i64>,
    /// `(2 pi)^{-1/2} dq e^{-a^2/4}` per step.
    weights: Vec<f64>,
}

impl VNProjection {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("the projection is built on one-dimensional grids".into()));
        }
        if grid.points_per_axis() > APPLY_LIMIT {
            return Err(Error::TooLarge {
                what: "projection grid".into(),
                size: grid.points_per_axis(),
                limit: APPLY_LIMIT,
            });
        }
        let dq = grid.spacing();
        if dq > MAX_SPACING {
            return Err(Error::InvalidGrid(format!("spacing {dq} exceeds {MAX_SPACING}")));
        }
        if grid.box_length() < 2.0 * A_MAX {
            return Err(Error::InvalidGrid(format!(
                "box length {} is below 2 A_MAX = {}",
                grid.box_length(),
                2.0 * A_MAX
            )));
        }
        let reach = (A_MAX / dq).floor() as i64;
        let steps: Vec<i64> = (-reach..=reach).collect();
        let weights = steps
            .iter()
            .map(|&m| {
                let a = m as f64 * dq;
                dq * (-a * a / 4.0).exp() / (2.0 * PI).sqrt()
            })
            .collect();
        Ok(Self { grid: *grid, steps, weights })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of `a` quadrature nodes.
    pub fn nodes(&self) -> usize {
        self.steps.len()
    }

    /// Bound on the discarded quadrature mass, `2 e^{-A_MAX^2/4} / A_MAX`.
    pub fn truncation_bound(&self) -> f64 {
        2.0 * (-A_MAX * A_MAX / 4.0).exp() / A_MAX
    }
}

/// `g(q) = 2^{n/2} e^{-|q|^2}`.
pub fn vn_probe(grid: &GridSpec) -> GridFunction {
    let amp = 2f64.powf(grid.dim() as f64 / 2.0);
    Wavefunction::from_real_fn(*grid, |q| amp * (-q.iter().map(|x| x * x).sum::<f64>()).exp())
}

/// The ground state `pi^{-n/4} e^{-|q|^2/2}` spanning the range of `E`.
pub fn ground_state(grid: &GridSpec) -> Wavefunction {
    let amp = PI.powf(-(grid.dim() as f64) / 4.0);
    Wavefunction::from_real_fn(*grid, |q| amp * (-q.iter().map(|x| x * x).sum::<f64>() / 2.0).exp())
}

/// `E psi`, summing the lattice shifts in a fixed pairwise order per point.
pub fn vn_apply(proj: &VNProjection, psi: &Wavefunction) -> Result<Wavefunction> {
    proj.grid.ensure_same(psi.grid())?;
    let n = proj.grid.points_per_axis() as i64;
    let dq = proj.grid.spacing();
    let q = proj.grid.axis_coordinates();
    let vals = psi.values();
    let sqrt2 = 2f64.sqrt();
    let out = (0..n as usize)
        .map(|i| {
            pairwise_sum_by(proj.steps.len(), &|s| {
                let m = proj.steps[s];
                let a = m as f64 * dq;
                let g = sqrt2 * (-(q[i] - a / 2.0).powi(2)).exp();
                let src = (i as i64 - m).rem_euclid(n) as usize;
                vals[src] * (proj.weights[s] * g)
            })
        })
        .collect();
    Ok(psi.with_values(out))
}

/// `normalize(E seed)`, a unit vector in the range of `E`.
pub fn range_vector(proj: &VNProjection, seed: &Wavefunction) -> Result<Wavefunction> {
    let e = vn_apply(proj, seed)?;
    let size = e.norm();
    if size < 1e-8 {
        return Err(Error::InvalidParameter(format!("seed has ||E seed|| = {size:e} < 1e-8")));
    }
    normalize(&e)
}

fn dense_guard(grid: &GridSpec) -> Result<usize> {
    let n = grid.points_per_axis();
    if grid.dim() != 1 || n > DENSE_LIMIT {
        return Err(Error::TooLarge { what: "dense matrix build".into(), size: grid.len(), limit: DENSE_LIMIT });
    }
    Ok(n)
}

/// Matrix of a linear map on sample vectors, built column by column.
pub fn dense_matrix<F>(grid: &GridSpec, op: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(&Wavefunction) -> Result<Wavefunction>,
{
    let n = dense_guard(grid)?;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = Wavefunction::zeros(*grid);
        e.values_mut()[j] = Complex64::new(1.0, 0.0);
        let col = op(&e)?;
        for (i, v) in col.values().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

/// `E` through the multiplication-times-shift form.
pub fn projection_matrix(proj: &VNProjection) -> Result<DMatrix<Complex64>> {
    dense_matrix(&proj.grid, |psi| vn_apply(proj, psi))
}

/// `E` through the Weyl integral
/// `(2 pi)^{-n} integral da e^{-|a|^2/4} integral dk e^{-|k|^2/4} weyl(k, a)`,
/// with the `k` integral done as a lattice sum.
pub fn projection_matrix_weyl(proj: &VNProjection) -> Result<DMatrix<Complex64>> {
    let n = dense_guard(&proj.grid)?;
    let dq = proj.grid.spacing();
    let dk = proj.grid.wavevector_spacing();
    let q = proj.grid.axis_coordinates();
    let ks = proj.grid.axis_wavevectors();
    let mut m = DMatrix::zeros(n, n);
    for (s, &step) in proj.steps.iter().enumerate() {
        let a = step as f64 * dq;
        // weights carry (2 pi)^{-1/2} dq e^{-a^2/4}; the k sum carries the other (2 pi)^{-1/2}
        let w = proj.weights[s] / (2.0 * PI).sqrt();
        for (i, qi) in q.iter().enumerate() {
            let ksum = pairwise_sum_by(ks.len(), &|l| {
                let k = ks[l];
                cis(k * (qi - a / 2.0)) * (dk * (-k * k / 4.0).exp())
            });
            let j = (i as i64 - step).rem_euclid(n as i64) as usize;
            m[(i, j)] += ksum * w;
        }
    }
    Ok(m)
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `lambda(f, a) = e^{-|a|^2/4} integral dk f~(k) e^{-|k|^2/4} e^{ik.a/2}`, the
/// coefficient in `E f shift(a) E = lambda(f, a) E`.
pub fn lambda_coeff(f_tilde: &SpectralFunction, a: &[f64]) -> Result<Complex64> {
    let grid = *f_tilde.grid();
    grid.check_vector(a)?;
    let dim = grid.dim();
    let dkn = grid.wavevector_cell_volume();
    let a2: f64 = a.iter().map(|x| x * x).sum();
    let sum = pairwise_sum_by(f_tilde.values().len(), &|i| {
        let k = f_tilde.wavevector(i);
        let k2: f64 = k[..dim].iter().map(|x| x * x).sum();
        let ka: f64 = k[..dim].iter().zip(a).map(|(x, y)| x * y).sum();
        f_tilde.values()[i] * cis(ka / 2.0) * (-k2 / 4.0).exp()
    });
    Ok(sum * dkn * (-a2 / 4.0).exp())
}

/// `lambda(f, 0) = integral dq f(q) phi0(q)^2` by direct position quadrature.
pub fn lambda_at_origin_direct(f: &GridFunction) -> Complex64 {
    let grid = *f.grid();
    let dim = grid.dim();
    let amp = PI.powf(-(dim as f64) / 2.0);
    pairwise_sum_by(grid.len(), &|i| {
        let q = grid.coordinate(i);
        let q2: f64 = q[..dim].iter().map(|x| x * x).sum();
        f.values()[i] * amp * (-q2).exp()
    }) * grid.cell_volume()
}

/// `F(f, a, b) = <shift(b)* psi | f shift(a)* psi>` for `psi` in the range of `E`.
pub fn uniqueness_witness(psi: &Wavefunction, f: &GridFunction, a: &[f64], b: &[f64]) -> Result<Complex64> {
    psi.shift_correlation(f, a, b)
}

/// Closed form `xi(b, -a) lambda(f_b, b - a)` of the witness, where `f_b(q) = f(q - b)`
/// is `f` transported by `shift(b)` and `xi` is the Weyl composition phase of two
/// pure shifts.
pub fn witness_closed_form(f_tilde: &SpectralFunction, a: &[f64], b: &[f64]) -> Result<Complex64> {
    let dim = f_tilde.grid().dim();
    let zero = vec![0.0; dim];
    let minus_a: Vec<f64> = a.iter().map(|x| -x).collect();
    let xi = weyl_composition_phase(&zero, b, &zero, &minus_a);
    let moved = shifted_spectrum(f_tilde, b);
    let ba: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    Ok(xi * lambda_coeff(&moved, &ba)?)
}

/// Spectrum of `f(q - b)`: `e^{-ik.b} f~(k)`.
fn shifted_spectrum(f_tilde: &SpectralFunction, b: &[f64]) -> SpectralFunction {
    let mut out = f_tilde.clone();
    let dim = f_tilde.grid().dim();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let k = f_tilde.wavevector(i);
        let kb: f64 = k[..dim].iter().zip(b).map(|(x, y)| x * y).sum();
        *v *= cis(-kb);
    }
    out
}

/// Diagnostics of the projection on one grid.
#[derive(Clone, Debug, Serialize)]
pub struct VnReport {
    pub points: usize,
    pub box_length: f64,
    /// `||E^2 - E||`.
    pub idempotency: f64,
    /// `||E - E*||`.
    pub symmetry: f64,
    /// Second singular value over the first.
    pub rank_gap: f64,
    /// `||E_shift - E_weyl||` between the two constructions.
    pub construction_gap: f64,
    /// `||E f shift(a) E - lambda(f, a) E||` for each probe.
    pub compression: Vec<CompressionCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressionCheck {
    pub probe: String,
    pub shift: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub error: f64,
}

/// `||E f shift(a) E - lambda(f, a) E||` in operator norm.
pub fn compression_error(e: &DMatrix<Complex64>, f: &GridFunction, a: f64) -> Result<(Complex64, f64)> {
    let grid = *f.grid();
    let lam = lambda_coeff(&forward(f), &[a])?;
    let fs = dense_matrix(&grid, |psi| {
        let moved = if grid.is_commensurate(&[a]) {
            roll(psi, &[(a / grid.spacing()).round() as i64])?
        } else {
            shift(&[a], psi)?
        };
        moved.pointwise_mul(f)
    })?;
    let lhs = e * fs * e;
    Ok((lam, operator_norm(&(lhs - e.map(|x| x * lam)))))
}

/// Full dense check: idempotency, symmetry, rank, agreement of the two
/// constructions, and compression for a Gaussian probe and a lattice plane wave.
pub fn vn_check(grid: &GridSpec) -> Result<VnReport> {
    let proj = VNProjection::new(grid)?;
    let e = projection_matrix(&proj)?;
    let ew = projection_matrix_weyl(&proj)?;
    let sv = singular_values(&e);
    let k1 = 3.0 * grid.wavevector_spacing();
    let probes = [
        ("gaussian".to_string(), vn_probe(grid), 0.7),
        ("gaussian".to_string(), vn_probe(grid), 0.0),
        ("plane-wave".to_string(), Wavefunction::from_fn(*grid, |q| cis(k1 * q[0])), -1.2),
    ];
    let mut compression = Vec::new();
    for (name, f, a) in probes {
        let (lam, error) = compression_error(&e, &f, a)?;
        compression.push(CompressionCheck { probe: name, shift: a, lambda_re: lam.re, lambda_im: lam.im, error });
    }
    Ok(VnReport {
        points: grid.points_per_axis(),
        box_length: grid.box_length(),
        idempotency: operator_norm(&(&e * &e - &e)),
        symmetry: operator_norm(&(&e - e.adjoint())),
        rank_gap: sv.get(1).copied().unwrap_or(0.0) / sv[0],
        construction_gap: operator_norm(&(&e - &ew)),
        compression,
    })
}

/// `|<u, v>| / (||u|| ||v||)`, equal to one for parallel vectors.
pub fn parallelism(u: &Wavefunction, v: &Wavefunction) -> Result<f64> {
    Ok(inner(u, v)?.norm() / (u.norm() * v.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_gaussian};

    fn desk() -> GridSpec {
        make_grid(1, 128, 32.0).unwrap()
    }

    #[test]
    fn projection_kernel_is_ground_state_outer_product() {
        let g = desk();
        let proj = VNProjection::new(&g).unwrap();
        let e = projection_matrix(&proj).unwrap();
        let phi = ground_state(&g);
        let dq = g.spacing();
        let mut worst: f64 = 0.0;
        for i in 0..128 {
            for j in 0..128 {
                let expect = phi.values()[i] * phi.values()[j] * dq;
                worst = worst.max((e[(i, j)] - expect).norm());
            }
        }
        assert!(worst < 1e-14, "{worst:e}");
    }

    #[test]
    fn projection_properties_dense() {
        let report = vn_check(&desk()).unwrap();
        assert!(report.idempotency < 1e-8);
        assert!(report.symmetry < 1e-10);
        assert!(report.rank_gap < 1e-6);
        assert!(report.construction_gap < 1e-8, "{:e}", report.construction_gap);
        for c in &report.compression {
            assert!(c.error < 1e-6, "{} {}: {:e}", c.probe, c.shift, c.error);
        }
    }

    #[test]
    fn apply_is_projection_and_symmetric() {
        let g = make_grid(1, 256, 32.0).unwrap();
        let proj = VNProjection::new(&g).unwrap();
        let phi = sample_gaussian(&g, 1.3, &[0.8], &[0.4]).unwrap();
        let psi = sample_gaussian(&g, 0.9, &[-0.5], &[-1.0]).unwrap();
        let ep = vn_apply(&proj, &phi).unwrap();
        assert!(vn_apply(&proj, &ep).unwrap().distance(&ep).unwrap() < 1e-8);
        let lhs = inner(&phi, &vn_apply(&proj, &psi).unwrap()).unwrap();
        let rhs = inner(&ep, &psi).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
        let epsi = vn_apply(&proj, &psi).unwrap();
        assert!((parallelism(&ep, &epsi).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn orthogonal_to_ground_state_is_annihilated() {
        let g = desk();
        let proj = VNProjection::new(&g).unwrap();
        let odd = Wavefunction::from_real_fn(g, |q| q[0] * (-q[0] * q[0] / 2.0).exp());
        assert!(vn_apply(&proj, &odd).unwrap().norm() < 1e-12);
        // dense rank-one oracle agrees with the fast path
        let e = projection_matrix(&proj).unwrap();
        let seed = sample_gaussian(&g, 1.5, &[0.3], &[0.2]).unwrap();
        let v = nalgebra::DVector::from_column_slice(seed.values());
        let dense = &e * v;
        let fast = vn_apply(&proj, &seed).unwrap();
        let err = dense.iter().zip(fast.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
        assert!(matches!(range_vector(&proj, &odd), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn lambda_examples() {
        let g = desk();
        let unit = SpectralFunction::point_mass(g, &[0], Complex64::new(1.0, 0.0)).unwrap();
        assert!((lambda_coeff(&unit, &[0.0]).unwrap() - 1.0).norm() < 1e-15);
        let probe = vn_probe(&g);
        let spectral = lambda_coeff(&forward(&probe), &[0.0]).unwrap();
        let direct = lambda_at_origin_direct(&probe);
        assert!((spectral - direct).norm() < 1e-10);
        assert!((direct - 1.0).norm() < 1e-12);
    }

    #[test]
    fn witness_matches_closed_form() {
        let g = desk();
        let proj = VNProjection::new(&g).unwrap();
        let psi = range_vector(&proj, &sample_gaussian(&g, 1.2, &[0.4], &[0.3]).unwrap()).unwrap();
        let k1 = 2.0 * g.wavevector_spacing();
        let f = Wavefunction::from_fn(g, |q| cis(k1 * q[0]) * (-q[0] * q[0] / 6.0).exp());
        let ft = forward(&f);
        let at_origin = uniqueness_witness(&psi, &f, &[0.0], &[0.0]).unwrap();
        assert!((at_origin - lambda_coeff(&ft, &[0.0]).unwrap()).norm() < 1e-10);
        for (a, b) in [(0.5, -0.25), (1.5, 0.75), (-2.0, 1.0)] {
            let direct = uniqueness_witness(&psi, &f, &[a], &[b]).unwrap();
            let closed = witness_closed_form(&ft, &[a], &[b]).unwrap();
            assert!((direct - closed).norm() < 1e-6, "{a} {b}");
        }
    }

    #[test]
    fn guards() {
        assert!(VNProjection::new(&make_grid(2, 64, 32.0).unwrap()).is_err());
        assert!(VNProjection::new(&make_grid(1, 32, 32.0).unwrap()).is_err());
        assert!(VNProjection::new(&make_grid(1, 128, 16.0).unwrap()).is_err());
        assert!(VNProjection::new(&make_grid(1, 2048, 64.0).unwrap()).is_err());
        let proj = VNProjection::new(&make_grid(1, 512, 64.0).unwrap()).unwrap();
        assert!(projection_matrix(&proj).is_err());
        assert!(proj.truncation_bound() < 1e-10);
    }
}
