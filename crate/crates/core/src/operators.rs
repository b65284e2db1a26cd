//! The standard representation: multiplication operators, shift and rotation
//! unitaries, the generators `K` and `Q`, Weyl operators, and the residual
//! diagnostics for covariance, canonical commutation and picture equivalence.
//!
//! Conventions: `K_j = -i d/dq_j` (multiplication by `k_j` in k-space),
//! `shift(a) = e^{-i a.K}` so `shift(a)psi(q) = psi(q - a)`, and
//! `weyl(k, a) = e^{i(k.Q - a.K)} = e^{-ik.a/2} e^{ik.Q} shift(a)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{fft_lines, forward, raw_wavevectors, spectral_multiply};
use crate::grid::{GridFunction, GridSpec, Wavefunction};
use crate::numeric::{cis, dot};

const ORTHO_TOL: f64 = 1e-10;

/// A proper rotation of `R^dim`, stored as a 3x3 block with the unused part
/// set to the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { dim, m }
    }

    /// Build from `dim` rows of length `dim`, checking `M^T M = I` and `det M = 1`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if !(1..=3).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidRotation("expected a square matrix of size 1..=3".into()));
        }
        let mut out = Self::identity(dim);
        for (dst, src) in out.m.iter_mut().zip(rows) {
            dst[..dim].copy_from_slice(src);
        }
        out.validate()?;
        Ok(out)
    }

    pub fn from_matrix(dim: usize, m: [[f64; 3]; 3]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidRotation(format!("dimension {dim}")));
        }
        let mut out = Self::identity(dim);
        for (dst, src) in out.m.iter_mut().zip(&m).take(dim) {
            dst[..dim].copy_from_slice(&src[..dim]);
        }
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|l| self.m[l][i] * self.m[l][j]).sum();
                dev = dev.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        if !dev.is_finite() || dev > ORTHO_TOL {
            return Err(Error::InvalidRotation(format!("not orthogonal (deviation {dev:e})")));
        }
        let det = self.determinant();
        if (det - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidRotation(format!("determinant {det}")));
        }
        Ok(())
    }

    /// Rotation of the plane by `angle` (counter-clockwise).
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut r = Self::identity(2);
        r.m[0][0] = c;
        r.m[0][1] = -s;
        r.m[1][0] = s;
        r.m[1][1] = c;
        r
    }

    /// Right-handed rotation of `R^3` by `angle` about coordinate axis `axis` (0, 1 or 2).
    pub fn about_axis(axis: usize, angle: f64) -> Result<Self> {
        if axis > 2 {
            return Err(Error::InvalidRotation(format!("axis {axis}")));
        }
        let (s, c) = angle.sin_cos();
        let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut r = Self::identity(3);
        r.m[i][i] = c;
        r.m[i][j] = -s;
        r.m[j][i] = s;
        r.m[j][j] = c;
        Ok(r)
    }

    /// Rodrigues rotation about the (normalized) `axis` by `angle`.
    pub fn axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = dot(&axis, &axis).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidRotation("zero rotation axis".into()));
        }
        let n = [axis[0] / len, axis[1] / len, axis[2] / len];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let m = [
            [c + n[0] * n[0] * t, n[0] * n[1] * t - n[2] * s, n[0] * n[2] * t + n[1] * s],
            [n[1] * n[0] * t + n[2] * s, c + n[1] * n[1] * t, n[1] * n[2] * t - n[0] * s],
            [n[2] * n[0] * t - n[1] * s, n[2] * n[1] * t + n[0] * s, c + n[2] * n[2] * t],
        ];
        Ok(Self { dim: 3, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.m[i][..self.dim].to_vec()).collect()
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Rotation) -> Result<Rotation> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|l| self.m[i][l] * other.m[l][j]).sum();
            }
        }
        Ok(Self { dim: self.dim, m })
    }

    pub fn inverse(&self) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.m[j][i];
            }
        }
        Self { dim: self.dim, m }
    }

    /// `M v` for a vector of length `dim`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.m[i][j] * v[j]).sum()).collect()
    }

    /// Rotation angle in `[0, pi]` (planar rotations report `|angle|`).
    pub fn angle(&self) -> f64 {
        match self.dim {
            1 => 0.0,
            2 => self.m[1][0].atan2(self.m[0][0]).abs(),
            _ => {
                let tr = self.m[0][0] + self.m[1][1] + self.m[2][2];
                ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
            }
        }
    }

    /// Max-entry distance between two rotations.
    pub fn distance(&self, other: &Rotation) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }

    /// For a signed axis permutation, `(source axis, sign)` per row so that
    /// `(M v)_i = sign_i * v[source_i]`.
    pub fn lattice_permutation(&self) -> Option<[(usize, f64); 3]> {
        let mut out = [(0usize, 1.0); 3];
        for (i, slot) in out.iter_mut().enumerate().take(self.dim) {
            let mut found = None;
            for j in 0..self.dim {
                let x = self.m[i][j];
                if (x.abs() - 1.0).abs() < 1e-12 {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((j, x.signum()));
                } else if x.abs() > 1e-12 {
                    return None;
                }
            }
            *slot = found?;
        }
        Some(out)
    }

    pub fn is_lattice_symmetry(&self) -> bool {
        self.lattice_permutation().is_some()
    }
}

/// Element `(a, L)` of the euclidean group, acting as `U(a, L) psi(q) = psi(L^{-1}(q - a))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanElement {
    pub shift: Vec<f64>,
    pub rotation: Rotation,
}

impl EuclideanElement {
    pub fn new(shift: Vec<f64>, rotation: Rotation) -> Result<Self> {
        if shift.len() != rotation.dim() {
            return Err(Error::DimensionMismatch { expected: rotation.dim(), got: shift.len() });
        }
        Ok(Self { shift, rotation })
    }

    pub fn identity(dim: usize) -> Self {
        Self { shift: vec![0.0; dim], rotation: Rotation::identity(dim) }
    }

    pub fn translation(a: &[f64]) -> Self {
        Self { shift: a.to_vec(), rotation: Rotation::identity(a.len()) }
    }

    pub fn rotation(r: Rotation) -> Self {
        Self { shift: vec![0.0; r.dim()], rotation: r }
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }

    /// Group law `(b, M)(a, L) = (b + M a, M L)`.
    pub fn compose(&self, other: &EuclideanElement) -> Result<EuclideanElement> {
        let ma = self.rotation.apply(&other.shift);
        let shift = self.shift.iter().zip(&ma).map(|(b, x)| b + x).collect();
        Ok(Self { shift, rotation: self.rotation.compose(&other.rotation)? })
    }

    pub fn inverse(&self) -> EuclideanElement {
        let rinv = self.rotation.inverse();
        let shift = rinv.apply(&self.shift).into_iter().map(|x| -x).collect();
        Self { shift, rotation: rinv }
    }

    pub fn is_identity(&self) -> bool {
        self.shift.iter().all(|&x| x == 0.0) && self.rotation == Rotation::identity(self.dim())
    }
}

/// `f psi`, pointwise.
pub fn multiply(f: &GridFunction, psi: &Wavefunction) -> Result<Wavefunction> {
    f.pointwise_mul(psi)
}

/// `shift(a) psi(q) = psi(q - a)`, spectrally: `psi~(k) -> e^{-ik.a} psi~(k)`.
pub fn shift(a: &[f64], psi: &Wavefunction) -> Result<Wavefunction> {
    psi.grid().check_vector(a)?;
    if a.iter().all(|&x| x == 0.0) {
        return Ok(psi.clone());
    }
    Ok(spectral_multiply(psi, |k| cis(-dot(k, a))))
}

/// Exact circular index shift: `out[j] = psi[j - steps]` per axis.
pub fn roll(psi: &Wavefunction, steps: &[i64]) -> Result<Wavefunction> {
    let grid = *psi.grid();
    if steps.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: steps.len() });
    }
    let n = grid.points_per_axis() as i64;
    let src = psi.values();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for (i, v) in out.iter_mut().enumerate() {
        let mut idx = grid.unravel(i);
        for axis in 0..grid.dim() {
            idx[axis] = (idx[axis] as i64 - steps[axis]).rem_euclid(n) as usize;
        }
        *v = src[grid.ravel(&idx)];
    }
    Ok(psi.with_values(out))
}

/// `psi(M q)` for a signed axis permutation `M`, as an exact index map.
fn pullback_lattice(perm: &[(usize, f64); 3], psi: &Wavefunction) -> Wavefunction {
    let grid = *psi.grid();
    let n = grid.points_per_axis();
    let src = psi.values();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for (i, v) in out.iter_mut().enumerate() {
        let idx = grid.unravel(i);
        let mut from = [0usize; 3];
        for axis in 0..grid.dim() {
            let (p, sign) = perm[axis];
            // centered coordinate c = j - N/2 negates as j -> N - j (mod N)
            from[axis] = if sign > 0.0 { idx[p] } else { (n - idx[p]) % n };
        }
        *v = src[grid.ravel(&from)];
    }
    psi.with_values(out)
}

/// `psi(q + c q_m e_l)`: shift every line along axis `l` by `-c q_m`, spectrally.
fn shear_pullback(psi: &Wavefunction, l: usize, m: usize, c: f64) -> Wavefunction {
    let grid = *psi.grid();
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let inner = n.pow((dim - 1 - l) as u32);
    let outer = grid.len() / (n * inner);
    let ks = raw_wavevectors(&grid);
    let coords = grid.axis_coordinates();
    let src = psi.values();

    let mut lines = vec![Complex64::new(0.0, 0.0); grid.len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            let line = (o * inner + i) * n;
            for j in 0..n {
                lines[line + j] = src[base + j * inner];
            }
        }
    }
    fft_lines(&mut lines, n, false);
    let scale = 1.0 / n as f64;
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            let qm = coords[grid.unravel(base)[m]];
            let line = (o * inner + i) * n;
            for (p, k) in ks.iter().enumerate() {
                lines[line + p] *= cis(k * c * qm) * scale;
            }
        }
    }
    fft_lines(&mut lines, n, true);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            let line = (o * inner + i) * n;
            for j in 0..n {
                out[base + j * inner] = lines[line + j];
            }
        }
    }
    psi.with_values(out)
}

/// `psi` with the coordinates `(q_i, q_j)` replaced by `R(phi) (q_i, q_j)`.
fn pullback_plane(psi: &Wavefunction, i: usize, j: usize, phi: f64) -> Wavefunction {
    let quarters = (phi / FRAC_PI_2).round();
    let r = phi - quarters * FRAC_PI_2;
    let mut out = psi.clone();
    let turns = (quarters as i64).rem_euclid(4);
    if turns != 0 {
        // R(turns * pi/2) restricted to the (i, j) plane as a signed permutation
        let mut perm = [(0usize, 1.0), (1, 1.0), (2, 1.0)];
        match turns {
            1 => {
                perm[i] = (j, -1.0);
                perm[j] = (i, 1.0);
            }
            2 => {
                perm[i] = (i, -1.0);
                perm[j] = (j, -1.0);
            }
            _ => {
                perm[i] = (j, 1.0);
                perm[j] = (i, -1.0);
            }
        }
        out = pullback_lattice(&perm, &out);
    }
    if r != 0.0 {
        // R(r) = X Y X, X = [[1, -tan(r/2)], [0, 1]], Y = [[1, 0], [sin r, 1]]
        let t = (r / 2.0).tan();
        out = shear_pullback(&out, i, j, -t);
        out = shear_pullback(&out, j, i, r.sin());
        out = shear_pullback(&out, i, j, -t);
    }
    out
}

/// `rotate(L) psi(q) = psi(L^{-1} q)`. Signed axis permutations are exact
/// index maps; other rotations go through Fourier shears and are accurate for
/// band-limited, interior-supported states.
pub fn rotate(rotation: &Rotation, psi: &Wavefunction) -> Result<Wavefunction> {
    let grid = *psi.grid();
    if grid.dim() != rotation.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: rotation.dim() });
    }
    if grid.dim() == 1 {
        return Err(Error::Unsupported("rotations need dimension >= 2".into()));
    }
    let inv = rotation.inverse();
    if let Some(perm) = inv.lattice_permutation() {
        return Ok(pullback_lattice(&perm, psi));
    }
    if grid.dim() == 2 {
        let phi = inv.entry(1, 0).atan2(inv.entry(0, 0));
        return Ok(pullback_plane(psi, 0, 1, phi));
    }
    // L^{-1} = Rz(alpha) Ry(beta) Rz(gamma)
    let b = inv.matrix();
    let sb = (b[0][2] * b[0][2] + b[1][2] * b[1][2]).sqrt();
    let beta = sb.atan2(b[2][2]);
    let (alpha, gamma) = if sb < 1e-12 {
        if b[2][2] > 0.0 {
            (b[1][0].atan2(b[0][0]), 0.0)
        } else {
            ((-b[1][0]).atan2(b[1][1]), 0.0)
        }
    } else {
        (b[1][2].atan2(b[0][2]), b[2][1].atan2(-b[2][0]))
    };
    // psi(A B C q) = op_C(op_B(op_A psi)); Ry(beta) acts on (q0, q2) as R(-beta)
    let mut out = pullback_plane(psi, 0, 1, alpha);
    out = pullback_plane(&out, 0, 2, -beta);
    out = pullback_plane(&out, 0, 1, gamma);
    Ok(out)
}

/// `U(a, L) = shift(a) rotate(L)`.
pub fn euclidean(x: &EuclideanElement, psi: &Wavefunction) -> Result<Wavefunction> {
    let rotated = if x.rotation == Rotation::identity(x.dim()) {
        psi.clone()
    } else {
        rotate(&x.rotation, psi)?
    };
    shift(&x.shift, &rotated)
}

/// `U(a, L)* = rotate(L^{-1}) shift(-a)`.
pub fn euclidean_adjoint(x: &EuclideanElement, psi: &Wavefunction) -> Result<Wavefunction> {
    euclidean(&x.inverse(), psi)
}

/// `K_j psi = -i d psi/dq_j`, as multiplication by `k_j` in k-space.
pub fn wavevector_apply(axis: usize, psi: &Wavefunction) -> Result<Wavefunction> {
    check_axis(psi.grid(), axis)?;
    Ok(spectral_multiply(psi, |k| Complex64::new(k[axis], 0.0)))
}

/// `Q_j psi(q) = q_j psi(q)` with the principal coordinate in `[-L/2, L/2)`.
pub fn position_apply(axis: usize, psi: &Wavefunction) -> Result<Wavefunction> {
    check_axis(psi.grid(), axis)?;
    let grid = *psi.grid();
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * grid.coordinate(i)[axis])
        .collect();
    Ok(psi.with_values(values))
}

fn check_axis(grid: &GridSpec, axis: usize) -> Result<()> {
    if axis >= grid.dim() {
        return Err(Error::InvalidParameter(format!("axis {axis} >= dimension {}", grid.dim())));
    }
    Ok(())
}

/// `weyl(k, a) = e^{-ik.a/2} e^{ik.Q} shift(a)`.
pub fn weyl(k: &[f64], a: &[f64], psi: &Wavefunction) -> Result<Wavefunction> {
    psi.grid().check_vector(k)?;
    let shifted = shift(a, psi)?;
    let grid = *psi.grid();
    let dim = grid.dim();
    let global = cis(-dot(k, a) / 2.0);
    if k.iter().all(|&x| x == 0.0) {
        return Ok(shifted.scaled(global));
    }
    let values = shifted
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let q = grid.coordinate(i);
            v * global * cis(dot(k, &q[..dim]))
        })
        .collect();
    Ok(psi.with_values(values))
}

/// The phase in `weyl(k,a) weyl(k',a') = e^{i(k.a' - k'.a)/2} weyl(k+k', a+a')`.
pub fn weyl_composition_phase(k: &[f64], a: &[f64], k2: &[f64], a2: &[f64]) -> Complex64 {
    cis((dot(k, a2) - dot(k2, a)) / 2.0)
}

/// `||(i[K_j, Q_j] - 1) psi|| / ||psi||` for every axis.
pub fn ccr_residual(psi: &Wavefunction) -> Result<Vec<f64>> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let i = Complex64::new(0.0, 1.0);
    (0..psi.grid().dim())
        .map(|axis| {
            let kq = wavevector_apply(axis, &position_apply(axis, psi)?)?;
            let qk = position_apply(axis, &wavevector_apply(axis, psi)?)?;
            let comm = kq.sub(&qk)?.scaled(i);
            Ok(comm.distance(psi)? / norm)
        })
        .collect()
}

/// Tagged description of an operator on wavefunctions.
#[derive(Clone, Debug)]
pub enum Operator {
    Identity,
    Multiply(GridFunction),
    Shift(Vec<f64>),
    Rotate(Rotation),
    Euclidean(EuclideanElement),
    Wavevector(usize),
    Position(usize),
    Weyl { k: Vec<f64>, a: Vec<f64> },
    /// Product in written order: `Chain([A, B]) = A B`, so `B` acts first.
    Chain(Vec<Operator>),
    /// Linear combination `sum c_i A_i`.
    Sum(Vec<(Complex64, Operator)>),
}

impl Operator {
    pub fn apply(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        match self {
            Operator::Identity => Ok(psi.clone()),
            Operator::Multiply(f) => multiply(f, psi),
            Operator::Shift(a) => shift(a, psi),
            Operator::Rotate(r) => rotate(r, psi),
            Operator::Euclidean(x) => euclidean(x, psi),
            Operator::Wavevector(j) => wavevector_apply(*j, psi),
            Operator::Position(j) => position_apply(*j, psi),
            Operator::Weyl { k, a } => weyl(k, a, psi),
            Operator::Chain(ops) => {
                let mut out = psi.clone();
                for op in ops.iter().rev() {
                    out = op.apply(&out)?;
                }
                Ok(out)
            }
            Operator::Sum(terms) => {
                let mut acc = Wavefunction::zeros(*psi.grid());
                for (c, op) in terms {
                    acc = acc.add_scaled(*c, &op.apply(psi)?)?;
                }
                Ok(acc)
            }
        }
    }

    /// True for handles that are unitary by construction.
    pub fn is_unitary(&self) -> bool {
        match self {
            Operator::Identity
            | Operator::Shift(_)
            | Operator::Rotate(_)
            | Operator::Euclidean(_)
            | Operator::Weyl { .. } => true,
            Operator::Chain(ops) => ops.iter().all(Operator::is_unitary),
            _ => false,
        }
    }

    pub fn adjoint(&self) -> Operator {
        match self {
            Operator::Identity => Operator::Identity,
            Operator::Multiply(f) => Operator::Multiply(f.conj()),
            Operator::Shift(a) => Operator::Shift(a.iter().map(|x| -x).collect()),
            Operator::Rotate(r) => Operator::Rotate(r.inverse()),
            Operator::Euclidean(x) => Operator::Euclidean(x.inverse()),
            Operator::Wavevector(j) => Operator::Wavevector(*j),
            Operator::Position(j) => Operator::Position(*j),
            Operator::Weyl { k, a } => Operator::Weyl {
                k: k.iter().map(|x| -x).collect(),
                a: a.iter().map(|x| -x).collect(),
            },
            Operator::Chain(ops) => Operator::Chain(ops.iter().rev().map(Operator::adjoint).collect()),
            Operator::Sum(terms) => {
                Operator::Sum(terms.iter().map(|(c, op)| (c.conj(), op.adjoint())).collect())
            }
        }
    }
}

/// A one-parameter unitary flow `t -> e^{-i Omega t}`.
pub trait Evolution {
    fn evolve(&self, t: f64, psi: &Wavefunction) -> Result<Wavefunction>;

    /// Closed form of `A_t = e^{i Omega t} A e^{-i Omega t}`, when known.
    fn heisenberg(&self, _op: &Operator, _t: f64) -> Option<Operator> {
        None
    }
}

/// `||A psi_t - (A_t psi)_t||` with `psi_t = evolve(t, psi)`. Uses the flow's
/// closed-form Heisenberg operator when available and the conjugation
/// `evolve(-t) A evolve(t)` otherwise.
pub fn heisenberg_picture_check(
    op: &Operator,
    psi: &Wavefunction,
    t: f64,
    flow: &dyn Evolution,
) -> Result<f64> {
    let lhs = op.apply(&flow.evolve(t, psi)?)?;
    let at_psi = match flow.heisenberg(op, t) {
        Some(at) => at.apply(psi)?,
        None => flow.evolve(-t, &op.apply(&flow.evolve(t, psi)?)?)?,
    };
    let rhs = flow.evolve(t, &at_psi)?;
    lhs.distance(&rhs)
}

/// `||U(x) f U(x)* psi - g psi||` with `g = U(x) f` the transported function.
pub fn covariance_residual(
    f: &GridFunction,
    x: &EuclideanElement,
    psi: &Wavefunction,
) -> Result<f64> {
    let lhs = euclidean(x, &multiply(f, &euclidean_adjoint(x, psi)?)?)?;
    let g = euclidean(x, f)?;
    lhs.distance(&multiply(&g, psi)?)
}

/// Spectral mean `<K_j>` computed from `|psi~|^2`.
pub fn wavevector_mean(psi: &Wavefunction) -> Vec<f64> {
    let tf = forward(psi);
    let grid = *psi.grid();
    let mut num = vec![0.0; grid.dim()];
    let mut den = 0.0;
    for (i, v) in tf.values().iter().enumerate() {
        let w = v.norm_sqr();
        let k = tf.wavevector(i);
        for axis in 0..grid.dim() {
            num[axis] += w * k[axis];
        }
        den += w;
    }
    num.iter().map(|x| x / den).collect()
}

/// Planar or single-axis rotation by a multiple of `pi/2`, snapped to exact entries.
pub fn quarter_turn(dim: usize, axis: usize, quarters: i64) -> Result<Rotation> {
    let angle = quarters as f64 * FRAC_PI_2;
    let mut r = match dim {
        2 => Rotation::planar(angle),
        3 => Rotation::about_axis(axis, angle)?,
        _ => return Err(Error::Unsupported("quarter turns need dimension 2 or 3".into())),
    };
    for row in r.m.iter_mut() {
        for x in row.iter_mut() {
            *x = x.round();
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner, make_grid, sample_gaussian};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian_1d() -> Wavefunction {
        let g = make_grid(1, 512, 40.0).unwrap();
        sample_gaussian(&g, 1.0, &[0.3], &[0.5]).unwrap()
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let psi = gaussian_1d();
        let one = Wavefunction::constant(*psi.grid(), c(1.0, 0.0));
        assert_eq!(multiply(&one, &psi).unwrap(), psi);
    }

    #[test]
    fn plane_wave_expectation_in_gaussian() {
        let g = make_grid(1, 512, 40.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.0], &[0.0]).unwrap();
        let k = 4.0 * g.wavevector_spacing();
        let f = Wavefunction::from_fn(g, |q| cis(k * q[0]));
        let ev = inner(&psi, &multiply(&f, &psi).unwrap()).unwrap();
        assert!((ev - c((-k * k / 2.0).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn commensurate_shift_is_a_roll() {
        let psi = gaussian_1d();
        let dq = psi.grid().spacing();
        let a = shift(&[7.0 * dq], &psi).unwrap();
        let b = roll(&psi, &[7]).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-13);
    }

    #[test]
    fn shift_moves_the_mean() {
        let psi = gaussian_1d();
        let out = shift(&[1.234], &psi).unwrap();
        let q = inner(&out, &position_apply(0, &out).unwrap()).unwrap().re;
        assert!((q - (0.3 + 1.234)).abs() < 1e-10);
    }

    #[test]
    fn rotate_rejects_one_dimension() {
        let psi = gaussian_1d();
        assert!(matches!(rotate(&Rotation::identity(1), &psi), Err(Error::Unsupported(_))));
    }

    #[test]
    fn quarter_turns_are_exact() {
        let g = make_grid(3, 32, 8.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.5, -1.0, 1.5], &[0.0, 0.3, 0.0]).unwrap();
        let r = quarter_turn(3, 2, 1).unwrap();
        let mut out = psi.clone();
        for _ in 0..4 {
            out = rotate(&r, &out).unwrap();
        }
        assert_eq!(out, psi);
        // radial state is invariant
        let radial = sample_gaussian(&g, 1.0, &[0.0; 3], &[0.0; 3]).unwrap();
        let z = quarter_turn(3, 0, 1).unwrap();
        assert_eq!(rotate(&z, &radial).unwrap(), radial);
        assert_eq!(rotate(&r, &radial).unwrap(), radial);
    }

    #[test]
    fn lattice_rotation_moves_the_center() {
        let g = make_grid(2, 64, 16.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[2.0, 0.0], &[0.0, 0.0]).unwrap();
        let out = rotate(&quarter_turn(2, 0, 1).unwrap(), &psi).unwrap();
        let expect = sample_gaussian(&g, 1.0, &[0.0, 2.0], &[0.0, 0.0]).unwrap();
        assert!(out.distance(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn general_rotation_matches_resampled_gaussian() {
        let g = make_grid(2, 128, 24.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[1.5, -0.5], &[0.4, 0.0]).unwrap();
        for angle in [0.3, 1.1, 2.5, -2.0] {
            let r = Rotation::planar(angle);
            let out = rotate(&r, &psi).unwrap();
            let c = r.apply(&[1.5, -0.5]);
            let k = r.apply(&[0.4, 0.0]);
            let expect = sample_gaussian(&g, 1.0, &c, &k).unwrap();
            let d = out.distance(&expect).unwrap();
            assert!(d < 1e-6, "angle {angle}: {d:e}");
        }
    }

    #[test]
    fn general_3d_rotation_matches_resampled_gaussian() {
        let g = make_grid(3, 128, 24.0).unwrap();
        let center = [1.0, -0.5, 0.8];
        let psi = sample_gaussian(&g, 1.0, &center, &[0.0; 3]).unwrap();
        let r = Rotation::axis_angle([1.0, 2.0, -0.5], 0.9).unwrap();
        let out = rotate(&r, &psi).unwrap();
        let expect = sample_gaussian(&g, 1.0, &r.apply(&center), &[0.0; 3]).unwrap();
        let d = out.distance(&expect).unwrap();
        assert!(d < 1e-6, "{d:e}");
    }

    #[test]
    fn plane_wave_is_a_wavevector_eigenfunction() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let k0 = 3.0 * g.wavevector_spacing();
        let psi = Wavefunction::from_fn(g, |q| cis(k0 * q[0]));
        let kpsi = wavevector_apply(0, &psi).unwrap();
        assert!(kpsi.distance(&psi.scaled(c(k0, 0.0))).unwrap() < 1e-12);
    }

    #[test]
    fn position_mean_of_gaussian() {
        let g = make_grid(2, 128, 20.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.7, -1.2], &[0.0, 0.0]).unwrap();
        for (axis, c0) in [0.7, -1.2].iter().enumerate() {
            let m = inner(&psi, &position_apply(axis, &psi).unwrap()).unwrap();
            assert!((m.re - c0).abs() < 1e-8);
        }
    }

    #[test]
    fn weyl_special_cases() {
        let psi = gaussian_1d();
        let g = *psi.grid();
        let k = 2.0 * g.wavevector_spacing();
        let a = weyl(&[0.0], &[0.9], &psi).unwrap();
        assert!(a.distance(&shift(&[0.9], &psi).unwrap()).unwrap() < 1e-15);
        let b = weyl(&[k], &[0.0], &psi).unwrap();
        let f = Wavefunction::from_fn(g, |q| cis(k * q[0]));
        assert!(b.distance(&multiply(&f, &psi).unwrap()).unwrap() < 1e-15);
        assert_eq!(weyl(&[0.0], &[0.0], &psi).unwrap(), psi);
    }

    #[test]
    fn ccr_holds_for_gaussians_and_fails_at_nyquist() {
        let psi = gaussian_1d();
        assert!(ccr_residual(&psi).unwrap()[0] < 1e-8);
        let g = *psi.grid();
        let kmax = g.max_wavevector();
        let bad = Wavefunction::from_fn(g, |q| {
            c((-q[0] * q[0] / 2.0).exp(), 0.0) * cis(kmax * q[0])
        });
        assert!(ccr_residual(&bad).unwrap()[0] > 1e-2);
    }

    #[test]
    fn adjoint_of_handles_inverts_unitaries() {
        let g = make_grid(2, 128, 24.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.5, 0.0], &[0.3, -0.2]).unwrap();
        let dk = g.wavevector_spacing();
        let ops = vec![
            Operator::Shift(vec![0.4, -1.1]),
            Operator::Rotate(quarter_turn(2, 0, 1).unwrap()),
            Operator::Weyl { k: vec![2.0 * dk, -dk], a: vec![-0.3, 0.5] },
            Operator::Euclidean(
                EuclideanElement::new(vec![1.0, 0.5], quarter_turn(2, 0, 3).unwrap()).unwrap(),
            ),
        ];
        for op in ops {
            assert!(op.is_unitary());
            let out = op.adjoint().apply(&op.apply(&psi).unwrap()).unwrap();
            let d = out.distance(&psi).unwrap();
            assert!(d < 1e-12, "{op:?}: {d:e}");
        }
    }

    #[test]
    fn chain_applies_rightmost_first() {
        let psi = gaussian_1d();
        let op = Operator::Chain(vec![Operator::Position(0), Operator::Shift(vec![1.0])]);
        let expect = position_apply(0, &shift(&[1.0], &psi).unwrap()).unwrap();
        assert_eq!(op.apply(&psi).unwrap(), expect);
    }

    #[test]
    fn euclidean_group_law() {
        let x = EuclideanElement::new(vec![1.0, 2.0], Rotation::planar(0.4)).unwrap();
        let y = EuclideanElement::new(vec![-0.5, 0.3], Rotation::planar(-1.3)).unwrap();
        let xy = x.compose(&y).unwrap();
        let back = xy.compose(&y.inverse()).unwrap();
        assert!(back.rotation.distance(&x.rotation) < 1e-14);
        assert!(back.shift.iter().zip(&x.shift).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).is_err());
        assert!(Rotation::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).is_err());
        let r = Rotation::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!(r.is_lattice_symmetry());
        assert!(!Rotation::planar(0.1).is_lattice_symmetry());
        let z = Rotation::about_axis(2, FRAC_PI_2).unwrap();
        let v = z.apply(&[1.0, 0.0, 0.0]);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }
}
