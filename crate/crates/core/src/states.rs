//! Expectation values, correlation functions, the characteristic and Wigner
//! functions of a pure state, and the inversion formulas that rebuild them from
//! shift-only correlation data.
//!
//! `F(f, x, y) = <U(y)* psi | f | U(x)* psi>`,
//! `chi(k, q) = <psi | weyl(k, q) psi> = integral dy e^{iky} conj psi(y + q/2) psi(y - q/2)`,
//! `rho(q, k) = integral dy e^{iky} conj psi(q + y/2) psi(q - y/2)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{centered_index, fft_axis, fft_nd, forward, wavevector_of};
use crate::grid::{inner, GridFunction, GridSpec, Wavefunction};
use crate::numeric::{cis, dot, pairwise_sum_by};
use crate::operators::{euclidean_adjoint, position_apply, roll, shift, EuclideanElement, Rotation};

/// `<f> = integral dq f(q) |psi(q)|^2`.
pub fn expectation(f: &GridFunction, psi: &Wavefunction) -> Result<Complex64> {
    psi.grid().ensure_same(f.grid())?;
    let (fv, pv) = (f.values(), psi.values());
    let s: Complex64 = pairwise_sum_by(pv.len(), &|i| fv[i] * pv[i].norm_sqr());
    Ok(s * psi.grid().cell_volume())
}

/// `<Q>` of a normalized state.
pub fn position_mean(psi: &Wavefunction) -> Result<Vec<f64>> {
    (0..psi.grid().dim())
        .map(|j| Ok(inner(psi, &position_apply(j, psi)?)?.re))
        .collect()
}

/// Position variance along each axis.
pub fn position_variance(psi: &Wavefunction) -> Result<Vec<f64>> {
    let mean = position_mean(psi)?;
    (0..psi.grid().dim())
        .map(|j| {
            let qpsi = position_apply(j, psi)?;
            Ok(inner(&qpsi, &qpsi)?.re - mean[j] * mean[j])
        })
        .collect()
}

/// The data of one correlation function value `F(f, x, y)`.
#[derive(Clone, Debug)]
pub struct CorrelationQuery {
    pub f: GridFunction,
    pub x: EuclideanElement,
    pub y: EuclideanElement,
}

impl CorrelationQuery {
    pub fn shifts(f: GridFunction, a: &[f64], b: &[f64]) -> Self {
        Self { f, x: EuclideanElement::translation(a), y: EuclideanElement::translation(b) }
    }
}

/// `F(f, x, y) = <U(y)* psi | f | U(x)* psi>`.
pub fn correlation(query: &CorrelationQuery, psi: &Wavefunction) -> Result<Complex64> {
    psi.grid().ensure_same(query.f.grid())?;
    let right = euclidean_adjoint(&query.x, psi)?;
    let left = if query.y == query.x { right.clone() } else { euclidean_adjoint(&query.y, psi)? };
    inner(&left, &right.pointwise_mul(&query.f)?)
}

/// Source of shift-only correlation data `F(f, a, b)` for a fixed hidden state.
pub trait CorrelationOracle {
    fn grid(&self) -> &GridSpec;

    fn shift_correlation(&self, f: &GridFunction, a: &[f64], b: &[f64]) -> Result<Complex64>;

    /// `F(f, a, b)` for every pair of lattice points, `a`-major.
    fn shift_table(&self, f: &GridFunction) -> Result<Vec<Complex64>> {
        let grid = *self.grid();
        let dim = grid.dim();
        let n = grid.len();
        let mut out = Vec::with_capacity(n * n);
        for ia in 0..n {
            let a = grid.coordinate(ia);
            for ib in 0..n {
                let b = grid.coordinate(ib);
                out.push(self.shift_correlation(f, &a[..dim], &b[..dim])?);
            }
        }
        Ok(out)
    }
}

impl CorrelationOracle for Wavefunction {
    fn grid(&self) -> &GridSpec {
        Wavefunction::grid(self)
    }

    fn shift_correlation(&self, f: &GridFunction, a: &[f64], b: &[f64]) -> Result<Complex64> {
        correlation(&CorrelationQuery::shifts(f.clone(), a, b), self)
    }

    // One FFT cross-correlation per row: T(a, b) = sum_q dq^n h_a(q) conj psi(q + b)
    // with h_a(q) = f(q) psi(q + a).
    fn shift_table(&self, f: &GridFunction) -> Result<Vec<Complex64>> {
        let grid = *Wavefunction::grid(self);
        grid.ensure_same(f.grid())?;
        let (np, dim, len) = (grid.points_per_axis(), grid.dim(), grid.len());
        let mid = (np / 2) as i64;
        let mut w: Vec<Complex64> = self.values().iter().map(|v| v.conj()).collect();
        fft_nd(&mut w, np, dim, false);
        let scale = grid.cell_volume() / len as f64;
        let mut out = Vec::with_capacity(len * len);
        for ia in 0..len {
            let idx = grid.unravel(ia);
            let steps: Vec<i64> = (0..dim).map(|j| -(idx[j] as i64 - mid)).collect();
            let moved = roll(self, &steps)?;
            let mut h: Vec<Complex64> = moved
                .values()
                .iter()
                .zip(f.values())
                .map(|(p, fv)| (p * fv).conj())
                .collect();
            fft_nd(&mut h, np, dim, false);
            for (x, y) in h.iter_mut().zip(&w) {
                *x = x.conj() * y;
            }
            fft_nd(&mut h, np, dim, true);
            // h now holds c(r) for raw lattice offsets r; b = coordinate(ib) is offset ib - N/2
            for ib in 0..len {
                let bidx = grid.unravel(ib);
                let mut r = [0usize; 3];
                for j in 0..dim {
                    r[j] = (bidx[j] + np - np / 2) % np;
                }
                out.push(h[grid.ravel(&r)] * scale);
            }
        }
        Ok(out)
    }
}

/// `conj psi(y + q/2) psi(y - q/2)` sampled at every lattice point `y`.
fn half_shift_product(psi: &Wavefunction, q: &[f64]) -> Result<Vec<Complex64>> {
    let half: Vec<f64> = q.iter().map(|x| x / 2.0).collect();
    let minus: Vec<f64> = half.iter().map(|x| -x).collect();
    let plus = shift(&minus, psi)?; // psi(y + q/2)
    let back = shift(&half, psi)?; // psi(y - q/2)
    Ok(plus.values().iter().zip(back.values()).map(|(a, b)| a.conj() * b).collect())
}

fn fourier_sum(grid: &GridSpec, h: &[Complex64], k: &[f64], factor: f64) -> Complex64 {
    let dim = grid.dim();
    let s: Complex64 = pairwise_sum_by(h.len(), &|i| {
        let y = grid.coordinate(i);
        h[i] * cis(factor * dot(k, &y[..dim]))
    });
    s * grid.cell_volume()
}

/// Characteristic function `chi(k, q)`.
pub fn characteristic(psi: &Wavefunction, k: &[f64], q: &[f64]) -> Result<Complex64> {
    psi.grid().check_vector(k)?;
    psi.grid().check_vector(q)?;
    let h = half_shift_product(psi, q)?;
    Ok(fourier_sum(psi.grid(), &h, k, 1.0))
}

/// `conj phi(s) phi(-s)` with `phi = psi(. + q)`; the reflection `s -> -s` is an
/// exact index map on the lattice.
fn reflected_product(psi: &Wavefunction, q: &[f64]) -> Result<Vec<Complex64>> {
    let minus: Vec<f64> = q.iter().map(|x| -x).collect();
    let phi = shift(&minus, psi)?;
    let grid = *psi.grid();
    let n = grid.points_per_axis();
    let v = phi.values();
    Ok((0..v.len())
        .map(|i| {
            let mut idx = grid.unravel(i);
            for x in idx.iter_mut().take(grid.dim()) {
                *x = (n - *x) % n;
            }
            v[i].conj() * v[grid.ravel(&idx)]
        })
        .collect())
}

/// Wigner function `rho(q, k)`. The imaginary part is roundoff and is discarded.
///
/// On the periodic lattice `rho` carries an image of the state displaced by `L/2`;
/// integrate over `q` only across the half box that holds the state.
pub fn wigner(psi: &Wavefunction, q: &[f64], k: &[f64]) -> Result<f64> {
    psi.grid().check_vector(k)?;
    psi.grid().check_vector(q)?;
    let h = reflected_product(psi, q)?;
    let scale = 2f64.powi(psi.grid().dim() as i32);
    Ok(fourier_sum(psi.grid(), &h, k, 2.0).re * scale)
}

/// `rho(q, k)` at every `k = m pi/L`, `m` in `[-N/2, N/2)` per axis (centered order).
/// On this lattice `(2 pi)^{-n} sum_k (pi/L)^n rho(q, k) = |psi(q)|^2` exactly for
/// lattice `q`.
pub fn wigner_row(psi: &Wavefunction, q: &[f64]) -> Result<Vec<f64>> {
    psi.grid().check_vector(q)?;
    let grid = *psi.grid();
    let (n, dim) = (grid.points_per_axis(), grid.dim());
    let mut h = reflected_product(psi, q)?;
    // e^{2iks} with k = m pi/L, s = (j - N/2) dq equals e^{2 pi i m j/N} (-1)^m
    fft_nd(&mut h, n, dim, true);
    let scale = 2f64.powi(dim as i32) * grid.cell_volume();
    Ok((0..grid.len())
        .map(|c| {
            let idx = grid.unravel(c);
            let mut raw = [0usize; 3];
            let mut sign = 1.0;
            for j in 0..dim {
                let m = idx[j] as i64 - (n / 2) as i64;
                raw[j] = m.rem_euclid(n as i64) as usize;
                if m.rem_euclid(2) == 1 {
                    sign = -sign;
                }
            }
            h[grid.ravel(&raw)].re * sign * scale
        })
        .collect())
}

/// Wavevectors `m pi/L` used by [`wigner_row`] along one axis.
pub fn wigner_row_wavevectors(grid: &GridSpec) -> Vec<f64> {
    let n = grid.points_per_axis() as i64;
    let step = PI / grid.box_length();
    (-n / 2..n / 2).map(|m| m as f64 * step).collect()
}

/// Smallest eigenvalue of the twisted matrix
/// `A_{j,j'} = e^{i(k_j.q_{j'} - k_{j'}.q_j)/2} chi(k_{j'} - k_j, q_{j'} - q_j)`.
/// When `chi` comes from a state `psi`, `A` is the Gram matrix of the vectors
/// `weyl(k_j, -q_j) conj(psi)` and is therefore positive semidefinite.
pub fn twisted_posdef_min_eig(
    chi: &dyn Fn(&[f64], &[f64]) -> Complex64,
    points: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64> {
    if points.is_empty() || points.len() > 64 {
        return Err(Error::InvalidParameter(format!(
            "need between 1 and 64 points, got {}",
            points.len()
        )));
    }
    let dim = points[0].0.len();
    if points.iter().any(|(k, q)| k.len() != dim || q.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: 0 });
    }
    let m = points.len();
    let a = DMatrix::from_fn(m, m, |j, jp| {
        let (kj, qj) = &points[j];
        let (kp, qp) = &points[jp];
        let dk: Vec<f64> = kp.iter().zip(kj).map(|(x, y)| x - y).collect();
        let dq: Vec<f64> = qp.iter().zip(qj).map(|(x, y)| x - y).collect();
        cis((dot(kj, qp) - dot(kp, qj)) / 2.0) * chi(&dk, &dq)
    });
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = (&a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-10 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let herm = (&a + a.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigenvalues();
    Ok(eig.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Largest `|k|` accepted by [`chi_from_correlations`]: `e^{|k|^2/2}` stays below ~3000.
pub const AMPLIFICATION_BUDGET: f64 = 4.0;

/// The Gaussian probe `g(q) = (2 pi)^{-n/2} e^{-|q|^2/2}`.
pub fn gaussian_probe(grid: &GridSpec) -> GridFunction {
    let amp = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0);
    Wavefunction::from_real_fn(*grid, |q| amp * (-q.iter().map(|x| x * x).sum::<f64>() / 2.0).exp())
}

/// Rebuild `chi(k, d)` from shift-only correlations with the Gaussian probe:
/// `chi(k, d) = e^{|k|^2/2} integral dc e^{ic.k} F(g, c - d/2, c + d/2)`.
pub fn chi_from_correlations(
    oracle: &dyn CorrelationOracle,
    k: &[f64],
    d: &[f64],
) -> Result<Complex64> {
    let grid = *oracle.grid();
    grid.check_vector(k)?;
    grid.check_vector(d)?;
    let kabs = dot(k, k).sqrt();
    if kabs > AMPLIFICATION_BUDGET {
        return Err(Error::AmplificationBudget { k: kabs, max: AMPLIFICATION_BUDGET });
    }
    let g = gaussian_probe(&grid);
    let dim = grid.dim();
    let mut terms = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let c = grid.coordinate(i);
        let c = &c[..dim];
        let a: Vec<f64> = c.iter().zip(d).map(|(x, y)| x - y / 2.0).collect();
        let b: Vec<f64> = c.iter().zip(d).map(|(x, y)| x + y / 2.0).collect();
        terms.push(cis(dot(c, k)) * oracle.shift_correlation(&g, &a, &b)?);
    }
    let s: Complex64 = pairwise_sum_by(terms.len(), &|i| terms[i]);
    Ok(s * grid.cell_volume() * (kabs * kabs / 2.0).exp())
}

/// Largest `N^{2n}` accepted by [`rotation_correlation_reduction`].
pub const REDUCTION_LIMIT: usize = 1 << 22;

/// Pairs `(k, k')` whose probe weight falls below this fraction of its peak are dropped.
const PROBE_CUTOFF: f64 = 1.522_997_974_471_263e-8; // e^{-18}

/// `F(f, (a, L), (b, M))` rebuilt from the shift-only table `F(g, a', b')`.
///
/// The table determines `P(k, k') = psi~(k) conj psi~(k')` wherever the probe
/// spectrum is appreciable, and then
/// `F = (2 pi)^n sum dk dk' P(k, k') e^{ik.a} e^{-ik'.b} f~(M^T k' - L^T k)`.
/// Rotations must be lattice symmetries.
pub fn rotation_correlation_reduction(
    f: &GridFunction,
    x: &EuclideanElement,
    y: &EuclideanElement,
    oracle: &dyn CorrelationOracle,
) -> Result<Complex64> {
    let grid = *oracle.grid();
    grid.ensure_same(f.grid())?;
    let (np, dim, len) = (grid.points_per_axis(), grid.dim(), grid.len());
    if len * len > REDUCTION_LIMIT {
        return Err(Error::TooLarge {
            what: "rotation reduction table".into(),
            size: len * len,
            limit: REDUCTION_LIMIT,
        });
    }
    let lt = lattice_transpose(&x.rotation, dim)?;
    let mt = lattice_transpose(&y.rotation, dim)?;

    let g = gaussian_probe(&grid);
    let mut table = oracle.shift_table(&g)?;
    // sum_a e^{-ik.a} (forward) over the first n axes, sum_b e^{ik'.b} (inverse) over the rest
    for axis in 0..2 * dim {
        fft_axis(&mut table, np, 2 * dim, axis, axis >= dim);
    }
    let g_tilde = forward(&g);
    let peak = g_tilde.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let f_tilde = forward(f);
    let dq2 = grid.cell_volume().powi(2);
    let dk2 = grid.wavevector_cell_volume().powi(2);
    let two_pi_n = (2.0 * PI).powi(dim as i32);

    let modes = |c: usize| -> [i64; 3] {
        let idx = grid.unravel(c);
        let mut m = [0i64; 3];
        for j in 0..dim {
            m[j] = idx[j] as i64 - (np / 2) as i64;
        }
        m
    };
    let mut terms = Vec::with_capacity(len * len);
    for ck in 0..len {
        let m = modes(ck);
        let k = wavevector_of(&grid, ck);
        let lm = permute_modes(&lt, &m, dim);
        for ckp in 0..len {
            let mp = modes(ckp);
            let diff: Vec<i64> = (0..dim).map(|j| mp[j] - m[j]).collect();
            let gv = g_tilde.values()[centered_index(&grid, &diff)?];
            if gv.norm() < PROBE_CUTOFF * peak {
                continue;
            }
            let mut raw = [0usize; 6];
            let mut parity = 0i64;
            for j in 0..dim {
                raw[j] = m[j].rem_euclid(np as i64) as usize;
                raw[dim + j] = mp[j].rem_euclid(np as i64) as usize;
                parity += m[j] + mp[j];
            }
            let flat = raw[..2 * dim].iter().fold(0usize, |acc, &r| acc * np + r);
            let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let tr = table[flat] * sign * dq2;
            let p = tr / (two_pi_n.powi(3) * gv);
            let kp = wavevector_of(&grid, ckp);
            let mmp = permute_modes(&mt, &mp, dim);
            let arg: Vec<i64> = (0..dim).map(|j| mmp[j] - lm[j]).collect();
            let fv = f_tilde.values()[centered_index(&grid, &arg)?];
            let phase = cis(dot(&k[..dim], &x.shift) - dot(&kp[..dim], &y.shift));
            terms.push(p * phase * fv);
        }
    }
    let s: Complex64 = pairwise_sum_by(terms.len(), &|i| terms[i]);
    Ok(s * dk2 * two_pi_n)
}

fn lattice_transpose(r: &Rotation, dim: usize) -> Result<[(usize, f64); 3]> {
    if r.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: r.dim() });
    }
    r.inverse().lattice_permutation().ok_or_else(|| {
        Error::Unsupported("rotation reduction needs lattice-symmetry rotations".into())
    })
}

fn permute_modes(perm: &[(usize, f64); 3], m: &[i64; 3], dim: usize) -> [i64; 3] {
    let mut out = [0i64; 3];
    for i in 0..dim {
        let (src, sign) = perm[i];
        out[i] = if sign > 0.0 { m[src] } else { -m[src] };
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSpaceKind {
    /// Samples `chi(k, q)`; `first` holds `k`, `second` holds `q`.
    Characteristic,
    /// Samples `rho(q, k)`; `first` holds `q`, `second` holds `k`.
    Wigner,
}

/// Sampled characteristic or Wigner values with their sample points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseSpaceTable {
    pub kind: PhaseSpaceKind,
    pub grid: GridSpec,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
}

/// Default samples per phase-space axis.
pub const TABLE_POINTS: usize = 33;

/// `points` values symmetric about zero spanning `[-extent, extent]`.
pub fn symmetric_axis(points: usize, extent: f64) -> Vec<f64> {
    if points <= 1 {
        return vec![0.0];
    }
    let half = (points - 1) as f64 / 2.0;
    let step = extent / half;
    (0..points).map(|i| (i as f64 - half) * step).collect()
}

fn axis_vector(dim: usize, x: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = x;
    v
}

/// Position standard deviation along axis 0, the table's length scale.
pub fn effective_width(psi: &Wavefunction) -> Result<f64> {
    Ok(position_variance(psi)?[0].max(0.0).sqrt())
}

impl PhaseSpaceTable {
    /// `chi(k, q)` on the product of `k_axis` and `q_axis`, both along axis 0.
    pub fn characteristic(psi: &Wavefunction, k_axis: &[f64], q_axis: &[f64]) -> Result<Self> {
        let grid = *psi.grid();
        let dim = grid.dim();
        let (mut first, mut second, mut values) = (Vec::new(), Vec::new(), Vec::new());
        let mut rows = Vec::with_capacity(q_axis.len());
        for &q in q_axis {
            let qv = axis_vector(dim, q);
            let h = half_shift_product(psi, &qv)?;
            rows.push(k_axis.iter().map(|&k| fourier_sum(&grid, &h, &axis_vector(dim, k), 1.0)).collect::<Vec<_>>());
        }
        for (ik, &k) in k_axis.iter().enumerate() {
            for (iq, &q) in q_axis.iter().enumerate() {
                first.push(axis_vector(dim, k));
                second.push(axis_vector(dim, q));
                values.push(rows[iq][ik]);
            }
        }
        Ok(Self { kind: PhaseSpaceKind::Characteristic, grid, first, second, values })
    }

    /// `rho(q, k)` on the product of `q_axis` and `k_axis`, both along axis 0.
    pub fn wigner(psi: &Wavefunction, q_axis: &[f64], k_axis: &[f64]) -> Result<Self> {
        let grid = *psi.grid();
        let dim = grid.dim();
        let scale = 2f64.powi(dim as i32);
        let (mut first, mut second, mut values) = (Vec::new(), Vec::new(), Vec::new());
        for &q in q_axis {
            let qv = axis_vector(dim, q);
            let h = reflected_product(psi, &qv)?;
            for &k in k_axis {
                let v = fourier_sum(&grid, &h, &axis_vector(dim, k), 2.0).re * scale;
                first.push(qv.clone());
                second.push(axis_vector(dim, k));
                values.push(Complex64::new(v, 0.0));
            }
        }
        Ok(Self { kind: PhaseSpaceKind::Wigner, grid, first, second, values })
    }

    /// Default characteristic table: 33 x 33 samples over `|k| <= 4/w`, `|q| <= 4w`
    /// where `w` is the position standard deviation.
    pub fn default_characteristic(psi: &Wavefunction) -> Result<Self> {
        let w = effective_width(psi)?;
        if !(w > 0.0) {
            return Err(Error::InvalidParameter("state has zero width".into()));
        }
        Self::characteristic(
            psi,
            &symmetric_axis(TABLE_POINTS, 4.0 / w),
            &symmetric_axis(TABLE_POINTS, 4.0 * w),
        )
    }

    /// Default Wigner table, with `q` centered on the state's mean position.
    pub fn default_wigner(psi: &Wavefunction) -> Result<Self> {
        let w = effective_width(psi)?;
        if !(w > 0.0) {
            return Err(Error::InvalidParameter("state has zero width".into()));
        }
        let mean = position_mean(psi)?[0];
        let q_axis: Vec<f64> = symmetric_axis(TABLE_POINTS, 4.0 * w).iter().map(|q| q + mean).collect();
        Self::wigner(psi, &q_axis, &symmetric_axis(TABLE_POINTS, 4.0 / w))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Max of `|conj chi(k, q) - chi(-k, -q)|` over stored symmetric pairs.
    pub fn symmetry_residual(&self) -> f64 {
        let key = |a: &[f64], b: &[f64]| -> Vec<u64> {
            a.iter().chain(b).map(|x| (x + 0.0).to_bits()).collect()
        };
        let index: HashMap<Vec<u64>, usize> = (0..self.len())
            .map(|i| (key(&self.first[i], &self.second[i]), i))
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let nf: Vec<f64> = self.first[i].iter().map(|x| -x).collect();
            let ns: Vec<f64> = self.second[i].iter().map(|x| -x).collect();
            if let Some(&j) = index.get(&key(&nf, &ns)) {
                worst = worst.max((self.values[i].conj() - self.values[j]).norm());
            }
        }
        worst
    }

    /// Value at the origin of phase space, when sampled.
    pub fn value_at_origin(&self) -> Option<Complex64> {
        (0..self.len())
            .find(|&i| self.first[i].iter().chain(&self.second[i]).all(|&x| x == 0.0))
            .map(|i| self.values[i])
    }

    /// CSV with columns `k1.., q1.., re, im` (characteristic) or `q1.., k1.., re, im` (Wigner).
    pub fn to_csv(&self) -> String {
        let dim = self.grid.dim();
        let (a, b) = match self.kind {
            PhaseSpaceKind::Characteristic => ("k", "q"),
            PhaseSpaceKind::Wigner => ("q", "k"),
        };
        let mut cols: Vec<String> = (1..=dim).map(|j| format!("{a}{j}")).collect();
        cols.extend((1..=dim).map(|j| format!("{b}{j}")));
        cols.push("re".into());
        cols.push("im".into());
        let mut out = cols.join(",");
        out.push('\n');
        for i in 0..self.len() {
            for x in self.first[i].iter().chain(&self.second[i]) {
                let _ = write!(out, "{x:.16e},");
            }
            let _ = writeln!(out, "{:.16e},{:.16e}", self.values[i].re, self.values[i].im);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}
