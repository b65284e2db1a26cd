//! SU(2) as the double cover of SO(3), the continuous section `v(L)`, the sign
//! multiplier it induces, path lifting, and two-component spinor fields.
//!
//! The covering map `Xi` is fixed by `u M(q) u* = M(Xi(u) q)` with
//! `M(q) = q.sigma`. With this definition `Xi(e^{-i a sigma_3/2})` is the
//! right-handed rotation by `a` about axis 3.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner, GridFunction, Wavefunction};
use crate::operators::{rotate, shift, EuclideanElement, Rotation};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrix `sigma_j`, `j` in 1..=3.
pub fn pauli(j: usize) -> Result<Mat2> {
    match j {
        1 => Ok([[ZERO, ONE], [ONE, ZERO]]),
        2 => Ok([[ZERO, -I], [I, ZERO]]),
        3 => Ok([[ONE, ZERO], [ZERO, -ONE]]),
        _ => Err(Error::InvalidParameter(format!("pauli index {j} outside 1..=3"))),
    }
}

/// `M(q) = q_1 sigma_1 + q_2 sigma_2 + q_3 sigma_3`.
pub fn m_of_q(q: [f64; 3]) -> Mat2 {
    [
        [Complex64::new(q[2], 0.0), Complex64::new(q[0], -q[1])],
        [Complex64::new(q[0], q[1]), Complex64::new(-q[2], 0.0)],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat_trace(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

pub fn mat_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn mat_dist(a: &Mat2, b: &Mat2) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// A unitary 2x2 matrix with determinant one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Element {
    m: Mat2,
}

impl SU2Element {
    pub fn new(m: Mat2) -> Result<Self> {
        let u = Self { m };
        let dev = mat_dist(&mat_mul(&mat_adjoint(&m), &m), &[[ONE, ZERO], [ZERO, ONE]]);
        if !(dev < 1e-10) {
            return Err(Error::InvalidParameter(format!("matrix not unitary (deviation {dev:e})")));
        }
        let det = mat_det(&m);
        if (det - ONE).norm() > 1e-10 {
            return Err(Error::InvalidParameter(format!("determinant {det} is not 1")));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// `w - i (x sigma_1 + y sigma_2 + z sigma_3)` for a unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            m: [
                [Complex64::new(w, -z), Complex64::new(-y, -x)],
                [Complex64::new(y, -x), Complex64::new(w, z)],
            ],
        }
    }

    /// `exp(-i angle n.sigma / 2)`; covers the right-handed rotation by `angle` about `n`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidParameter("zero rotation axis".into()));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(Self::from_quaternion(c, s * axis[0] / len, s * axis[1] / len, s * axis[2] / len))
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn mul(&self, other: &SU2Element) -> SU2Element {
        Self { m: mat_mul(&self.m, &other.m) }
    }

    pub fn adjoint(&self) -> SU2Element {
        Self { m: mat_adjoint(&self.m) }
    }

    pub fn neg(&self) -> SU2Element {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        Self { m }
    }

    pub fn trace(&self) -> Complex64 {
        mat_trace(&self.m)
    }

    /// Max-entry distance.
    pub fn distance(&self, other: &SU2Element) -> f64 {
        mat_dist(&self.m, &other.m)
    }
}

/// `Xi(u)_{ij} = tr(sigma_i u sigma_j u*) / 2`.
pub fn covering_map(u: &SU2Element) -> Result<Rotation> {
    SU2Element::new(u.m)?;
    let ud = mat_adjoint(&u.m);
    let mut r = [[0.0; 3]; 3];
    for j in 0..3 {
        let conj = mat_mul(&mat_mul(&u.m, &pauli(j + 1)?), &ud);
        for (i, row) in r.iter_mut().enumerate() {
            row[j] = mat_trace(&mat_mul(&pauli(i + 1)?, &conj)).re / 2.0;
        }
    }
    Rotation::from_matrix(3, r)
}

/// The section `v(L)`: the preimage with positive trace, and at angle `pi` the one
/// whose first nonzero entry (reading order) has positive real part, or failing
/// that positive imaginary part.
pub fn section(rotation: &Rotation) -> Result<SU2Element> {
    if rotation.dim() != 3 {
        return Err(Error::InvalidRotation("the spin cover needs a rotation of R^3".into()));
    }
    let r = rotation.matrix();
    let t = r[0][0] + r[1][1] + r[2][2];
    let cands = [1.0 + t, 1.0 + 2.0 * r[0][0] - t, 1.0 + 2.0 * r[1][1] - t, 1.0 + 2.0 * r[2][2] - t];
    let best = (0..4).fold(0, |b, i| if cands[i] > cands[b] { i } else { b });
    let s = 0.5 * cands[best].max(0.0).sqrt();
    let f = 4.0 * s;
    let (mut w, mut x, mut y, mut z) = match best {
        0 => (s, (r[2][1] - r[1][2]) / f, (r[0][2] - r[2][0]) / f, (r[1][0] - r[0][1]) / f),
        1 => ((r[2][1] - r[1][2]) / f, s, (r[0][1] + r[1][0]) / f, (r[0][2] + r[2][0]) / f),
        2 => ((r[0][2] - r[2][0]) / f, (r[0][1] + r[1][0]) / f, s, (r[1][2] + r[2][1]) / f),
        _ => ((r[1][0] - r[0][1]) / f, (r[0][2] + r[2][0]) / f, (r[1][2] + r[2][1]) / f, s),
    };
    let len = (w * w + x * x + y * y + z * z).sqrt();
    w /= len;
    x /= len;
    y /= len;
    z /= len;
    if w.abs() <= 1e-14 {
        w = 0.0;
        let u = SU2Element::from_quaternion(0.0, x, y, z);
        let lead = u.m.iter().flatten().find(|e| e.norm() > 1e-14).copied().unwrap_or(ONE);
        let flip = if lead.re.abs() > 1e-14 { lead.re < 0.0 } else { lead.im < 0.0 };
        if flip {
            x = -x;
            y = -y;
            z = -z;
        }
    } else if w < 0.0 {
        w = -w;
        x = -x;
        y = -y;
        z = -z;
    }
    Ok(SU2Element::from_quaternion(w, x, y, z))
}

/// `xi(L, L') = v(L) v(L') v(L L')*`, which is `+-1`.
pub fn multiplier(a: &Rotation, b: &Rotation) -> Result<i8> {
    let ab = a.compose(b)?;
    let m = section(a)?.mul(&section(b)?).mul(&section(&ab)?.adjoint()).matrix();
    let off = m[0][1].norm().max(m[1][0].norm());
    let diag = (m[0][0] - m[1][1]).norm();
    let real = m[0][0].im.abs();
    if off > 1e-8 || diag > 1e-8 || real > 1e-8 || (m[0][0].re.abs() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("multiplier is not +-1: {m:?}")));
    }
    Ok(if m[0][0].re > 0.0 { 1 } else { -1 })
}

/// A sampled path of rotations starting at the identity.
#[derive(Clone, Debug)]
pub struct RotationPath {
    rotations: Vec<Rotation>,
}

/// Largest geodesic step accepted between consecutive path samples.
pub const MAX_PATH_STEP: f64 = std::f64::consts::FRAC_PI_2;

impl RotationPath {
    pub fn new(rotations: Vec<Rotation>) -> Result<Self> {
        let first = rotations
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty rotation path".into()))?;
        if first.dim() != 3 || first.distance(&Rotation::identity(3)) > 1e-12 {
            return Err(Error::InvalidParameter("rotation path must start at the identity".into()));
        }
        for pair in rotations.windows(2) {
            let step = pair[0].inverse().compose(&pair[1])?.angle();
            if step > MAX_PATH_STEP + 1e-12 {
                return Err(Error::AmbiguousLift { angle: step });
            }
        }
        Ok(Self { rotations })
    }

    /// `steps + 1` samples of the rotation about `axis` from angle 0 to `total`.
    pub fn winding(axis: [f64; 3], total: f64, steps: usize) -> Result<Self> {
        let steps = steps.max(1);
        let rotations = (0..=steps)
            .map(|i| Rotation::axis_angle(axis, total * i as f64 / steps as f64))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rotations)
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn is_closed(&self) -> bool {
        self.rotations.last().is_none_or(|r| r.distance(&Rotation::identity(3)) < 1e-10)
    }
}

/// Continuous lift of a rotation path to SU(2) starting at the identity.
pub fn lift_path(path: &RotationPath) -> Result<SU2Element> {
    let mut u = SU2Element::identity();
    for r in &path.rotations[1..] {
        let w = section(r)?;
        let overlap = u.adjoint().mul(&w).trace().re;
        u = if overlap >= 0.0 { w } else { w.neg() };
    }
    Ok(u)
}

/// Two-component wavefunction `|psi_0, psi_1>` on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    pub up: Wavefunction,
    pub down: Wavefunction,
}

impl SpinorField {
    pub fn new(up: Wavefunction, down: Wavefunction) -> Result<Self> {
        up.grid().ensure_same(down.grid())?;
        Ok(Self { up, down })
    }

    /// `||psi_0||^2 + ||psi_1||^2`.
    pub fn norm_sq(&self) -> f64 {
        self.up.norm().powi(2) + self.down.norm().powi(2)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if !(n > 0.0) {
            return Err(Error::ZeroVector);
        }
        let s = Complex64::new(1.0 / n, 0.0);
        Ok(Self { up: self.up.scaled(s), down: self.down.scaled(s) })
    }

    pub fn components(&self) -> [&Wavefunction; 2] {
        [&self.up, &self.down]
    }

    /// `(u_00 psi_0 + u_01 psi_1, u_10 psi_0 + u_11 psi_1)`.
    pub fn mix(&self, m: &Mat2) -> Result<Self> {
        let zero = Wavefunction::zeros(*self.up.grid());
        let up = zero.add_scaled(m[0][0], &self.up)?.add_scaled(m[0][1], &self.down)?;
        let down = zero.add_scaled(m[1][0], &self.up)?.add_scaled(m[1][1], &self.down)?;
        Ok(Self { up, down })
    }

    pub fn distance(&self, other: &SpinorField) -> Result<f64> {
        Ok((self.up.distance(&other.up)?.powi(2) + self.down.distance(&other.down)?.powi(2)).sqrt())
    }
}

/// Shift plus SU(2) element: `U(a, u) = shift(a) (u (x) rotate(Xi(u)))`.
#[derive(Clone, Debug)]
pub struct SpinElement {
    pub shift: Vec<f64>,
    pub spin: SU2Element,
}

impl SpinElement {
    /// Uses the section `v(L)` for the spin part.
    pub fn from_euclidean(x: &EuclideanElement) -> Result<Self> {
        Ok(Self { shift: x.shift.clone(), spin: section(&x.rotation)? })
    }

    pub fn lifted(shift: Vec<f64>, spin: SU2Element) -> Self {
        Self { shift, spin }
    }

    pub fn rotation(&self) -> Result<Rotation> {
        covering_map(&self.spin)
    }
}

fn rotate_components(r: &Rotation, field: &SpinorField) -> Result<SpinorField> {
    if r.distance(&Rotation::identity(3)) == 0.0 {
        return Ok(field.clone());
    }
    Ok(SpinorField { up: rotate(r, &field.up)?, down: rotate(r, &field.down)? })
}

/// `U(a, u) Psi`.
pub fn spinor_apply(x: &SpinElement, field: &SpinorField) -> Result<SpinorField> {
    let rotated = rotate_components(&x.rotation()?, field)?.mix(&x.spin.matrix())?;
    Ok(SpinorField { up: shift(&x.shift, &rotated.up)?, down: shift(&x.shift, &rotated.down)? })
}

/// `U(a, u)* Psi = (u* (x) rotate(Xi(u)^{-1})) shift(-a) Psi`.
pub fn spinor_apply_adjoint(x: &SpinElement, field: &SpinorField) -> Result<SpinorField> {
    let minus: Vec<f64> = x.shift.iter().map(|v| -v).collect();
    let moved = SpinorField { up: shift(&minus, &field.up)?, down: shift(&minus, &field.down)? };
    rotate_components(&x.rotation()?.inverse(), &moved)?.mix(&x.spin.adjoint().matrix())
}

/// `U(L) Psi = v(L) (rotate(L) psi_0, rotate(L) psi_1)`.
pub fn spinor_rotate(rotation: &Rotation, field: &SpinorField) -> Result<SpinorField> {
    spinor_apply(&SpinElement::from_euclidean(&EuclideanElement::rotation(*rotation))?, field)
}

/// `U(a, L) = shift(a) U(L)` on spinors.
pub fn spinor_euclid(x: &EuclideanElement, field: &SpinorField) -> Result<SpinorField> {
    spinor_apply(&SpinElement::from_euclidean(x)?, field)
}

/// `F(f, x, y) = <U(y)* Psi | f | U(x)* Psi>` summed over components.
pub fn spinor_correlation(
    f: &GridFunction,
    x: &SpinElement,
    y: &SpinElement,
    field: &SpinorField,
) -> Result<Complex64> {
    let right = spinor_apply_adjoint(x, field)?;
    let left = spinor_apply_adjoint(y, field)?;
    Ok(inner(&left.up, &right.up.pointwise_mul(f)?)? + inner(&left.down, &right.down.pointwise_mul(f)?)?)
}

/// The same correlation through `Tr(u* X w)` with
/// `X_{j,j'} = <U_s(y)* psi_j' | f | U_s(x)* psi_j>` built from spatial parts only.
pub fn spinor_correlation_trace(
    f: &GridFunction,
    x: &SpinElement,
    y: &SpinElement,
    field: &SpinorField,
) -> Result<Complex64> {
    let spatial = |e: &SpinElement, psi: &Wavefunction| -> Result<Wavefunction> {
        let minus: Vec<f64> = e.shift.iter().map(|v| -v).collect();
        let moved = shift(&minus, psi)?;
        let r = e.rotation()?;
        if r.distance(&Rotation::identity(3)) == 0.0 {
            Ok(moved)
        } else {
            rotate(&r.inverse(), &moved)
        }
    };
    let comps = field.components();
    let right: Vec<Wavefunction> =
        comps.iter().map(|p| spatial(x, p)?.pointwise_mul(f)).collect::<Result<_>>()?;
    let left: Vec<Wavefunction> = comps.iter().map(|p| spatial(y, p)).collect::<Result<_>>()?;
    let mut xm = [[ZERO; 2]; 2];
    for j in 0..2 {
        for jp in 0..2 {
            xm[j][jp] = inner(&left[jp], &right[j])?;
        }
    }
    let prod = mat_mul(&mat_mul(&mat_adjoint(&x.spin.matrix()), &xm), &y.spin.matrix());
    Ok(mat_trace(&prod))
}
