//! The Galilei group `(a, L, t, v)`, its projective representation on a free
//! particle, and the diagnostics built on it: the multiplier and its operator
//! residual, mass extraction, boosted frames and time reversal.
//!
//! Free dynamics: `Omega = (c/2 kappa)|K|^2 + beta.K + d`, with `beta = 0` outside
//! diagnostics. `evolve(t) = e^{-i Omega t}` maps a state to its value at time `t`,
//! and the group acts as `U(a, L, t, v) = shift(a - tv) rotate(L) boost(L^{-1} v) e^{i Omega t}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{forward, spectral_multiply};
use crate::grid::{inner, Wavefunction};
use crate::numeric::{cis, dot, norm_sq};
use crate::operators::{position_apply, rotate, shift, wavevector_apply, Evolution, Operator, Rotation};
use crate::states::position_mean;

/// Element `(a, L, t, v)`: shift, rotation, time and velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct GalileiElement {
    pub shift: Vec<f64>,
    pub rotation: Rotation,
    pub time: f64,
    pub velocity: Vec<f64>,
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

impl GalileiElement {
    pub fn new(shift: Vec<f64>, rotation: Rotation, time: f64, velocity: Vec<f64>) -> Result<Self> {
        let dim = rotation.dim();
        for v in [&shift, &velocity] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        Ok(Self { shift, rotation, time, velocity })
    }

    pub fn identity(dim: usize) -> Self {
        Self { shift: vec![0.0; dim], rotation: Rotation::identity(dim), time: 0.0, velocity: vec![0.0; dim] }
    }

    pub fn translation(a: &[f64]) -> Self {
        Self { shift: a.to_vec(), ..Self::identity(a.len()) }
    }

    pub fn boost(v: &[f64]) -> Self {
        Self { velocity: v.to_vec(), ..Self::identity(v.len()) }
    }

    pub fn time_translation(dim: usize, t: f64) -> Self {
        Self { time: t, ..Self::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }

    /// Max-component distance between two elements.
    pub fn distance(&self, other: &GalileiElement) -> f64 {
        let vec_dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        vec_dist(&self.shift, &other.shift)
            .max(vec_dist(&self.velocity, &other.velocity))
            .max((self.time - other.time).abs())
            .max(self.rotation.distance(&other.rotation))
    }
}

/// Group law `(b, M, s, w)(a, L, t, v) = (b + M a + t w, M L, s + t, w + M v)`.
pub fn compose(g2: &GalileiElement, g1: &GalileiElement) -> Result<GalileiElement> {
    let m = &g2.rotation;
    let shift = add(&axpy(g1.time, &g2.velocity, &g2.shift), &m.apply(&g1.shift));
    let velocity = add(&g2.velocity, &m.apply(&g1.velocity));
    Ok(GalileiElement {
        shift,
        rotation: m.compose(&g1.rotation)?,
        time: g2.time + g1.time,
        velocity,
    })
}

/// `(a, L, t, v)^{-1} = (-L^{-1}(a - t v), L^{-1}, -t, -L^{-1} v)`.
pub fn inverse_element(g: &GalileiElement) -> GalileiElement {
    let inv = g.rotation.inverse();
    let a_tv = axpy(-g.time, &g.velocity, &g.shift);
    GalileiElement {
        shift: inv.apply(&a_tv).into_iter().map(|x| -x).collect(),
        rotation: inv,
        time: -g.time,
        velocity: inv.apply(&g.velocity).into_iter().map(|x| -x).collect(),
    }
}

/// Free-particle dynamics `Omega = (c/2 kappa)|K|^2 + beta.K + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeDynamics {
    pub kappa: f64,
    pub c: f64,
    pub d: f64,
    beta: Option<Vec<f64>>,
}

impl FreeDynamics {
    /// `kappa` may be negative (time-reversed flow) but not zero.
    pub fn new(kappa: f64, c: f64, d: f64) -> Result<Self> {
        if kappa == 0.0 || !kappa.is_finite() {
            return Err(Error::InvalidParameter("kappa must be finite and nonzero".into()));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter("c must be positive".into()));
        }
        if !d.is_finite() {
            return Err(Error::InvalidParameter("d must be finite".into()));
        }
        Ok(Self { kappa, c, d, beta: None })
    }

    /// `kappa` with `c = 1`, `d = 0`.
    pub fn with_kappa(kappa: f64) -> Result<Self> {
        Self::new(kappa, 1.0, 0.0)
    }

    /// Adds a linear term `beta.K` to the frequency. Only meaningful for
    /// demonstrating that the multiplier then depends on the state.
    pub fn with_drift(mut self, beta: Vec<f64>) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn drift(&self) -> Option<&[f64]> {
        self.beta.as_deref()
    }

    /// `c |k|^2 / 2 kappa + beta.k + d`.
    pub fn frequency(&self, k: &[f64]) -> f64 {
        let drift = self.beta.as_ref().map_or(0.0, |b| dot(b, k));
        self.c * norm_sq(k) / (2.0 * self.kappa) + drift + self.d
    }

    /// `tc/kappa`, the coefficient of `K` in the Heisenberg position.
    pub fn spreading(&self, t: f64) -> f64 {
        t * self.c / self.kappa
    }

    /// The same dynamics with `kappa -> -kappa`.
    pub fn reversed_mass(&self) -> Self {
        Self { kappa: -self.kappa, ..self.clone() }
    }

    fn heisenberg_op(&self, op: &Operator, t: f64) -> Option<Operator> {
        let tau = self.spreading(t);
        let drifted = self.beta.as_ref().is_some_and(|b| b.iter().any(|&x| x != 0.0));
        let beta_t = |k: &[f64]| self.beta.as_ref().map_or(0.0, |b| dot(b, k)) * t;
        match op {
            Operator::Identity | Operator::Shift(_) | Operator::Wavevector(_) => Some(op.clone()),
            Operator::Rotate(_) | Operator::Euclidean(_) if !drifted => Some(op.clone()),
            Operator::Rotate(_) | Operator::Euclidean(_) => None,
            Operator::Position(j) => {
                let mut terms = vec![
                    (Complex64::new(1.0, 0.0), Operator::Position(*j)),
                    (Complex64::new(tau, 0.0), Operator::Wavevector(*j)),
                ];
                if let Some(b) = self.beta.as_ref().and_then(|b| b.get(*j)) {
                    terms.push((Complex64::new(b * t, 0.0), Operator::Identity));
                }
                Some(Operator::Sum(terms))
            }
            Operator::Weyl { k, a } => {
                let a_t = a.iter().zip(k).map(|(x, kj)| x - tau * kj).collect();
                Some(Operator::Sum(vec![(cis(beta_t(k)), Operator::Weyl { k: k.clone(), a: a_t })]))
            }
            Operator::Multiply(f) => {
                // f = sum_k dk^n f~(k) e^{ik.Q}, and e^{ik.Q} evolves into weyl(k, -tau k)
                let tf = forward(f);
                let dkn = f.grid().wavevector_cell_volume();
                let dim = f.grid().dim();
                let terms = tf
                    .values()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm() > 0.0)
                    .map(|(i, v)| {
                        let k = tf.wavevector(i)[..dim].to_vec();
                        let a = k.iter().map(|x| -tau * x).collect();
                        (v * dkn * cis(beta_t(&k)), Operator::Weyl { k, a })
                    })
                    .collect();
                Some(Operator::Sum(terms))
            }
            Operator::Chain(ops) => {
                ops.iter().map(|o| self.heisenberg_op(o, t)).collect::<Option<Vec<_>>>().map(Operator::Chain)
            }
            Operator::Sum(terms) => terms
                .iter()
                .map(|(c, o)| self.heisenberg_op(o, t).map(|h| (*c, h)))
                .collect::<Option<Vec<_>>>()
                .map(Operator::Sum),
        }
    }
}

impl Evolution for FreeDynamics {
    fn evolve(&self, t: f64, psi: &Wavefunction) -> Result<Wavefunction> {
        evolve(t, psi, self)
    }

    fn heisenberg(&self, op: &Operator, t: f64) -> Option<Operator> {
        self.heisenberg_op(op, t)
    }
}

/// `psi_t = e^{-i Omega t} psi`, exact phase multiplication in k-space.
pub fn evolve(t: f64, psi: &Wavefunction, dynamics: &FreeDynamics) -> Result<Wavefunction> {
    if let Some(b) = dynamics.drift() {
        psi.grid().check_vector(b)?;
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    Ok(spectral_multiply(psi, |k| cis(-dynamics.frequency(k) * t)))
}

/// `Omega psi`.
pub fn frequency_apply(psi: &Wavefunction, dynamics: &FreeDynamics) -> Wavefunction {
    spectral_multiply(psi, |k| Complex64::new(dynamics.frequency(k), 0.0))
}

/// Boost `R(v) psi = e^{i kappa (v/c).Q} psi`.
pub fn boost(v: &[f64], psi: &Wavefunction, dynamics: &FreeDynamics) -> Result<Wavefunction> {
    let grid = *psi.grid();
    grid.check_vector(v)?;
    let kick: Vec<f64> = v.iter().map(|x| dynamics.kappa * x / dynamics.c).collect();
    let size = norm_sq(&kick).sqrt();
    if size > grid.max_wavevector() / 2.0 {
        return Err(Error::BandLimit(format!(
            "boost wavevector {size} exceeds half the Nyquist wavevector {}",
            grid.max_wavevector() / 2.0
        )));
    }
    if size == 0.0 {
        return Ok(psi.clone());
    }
    let dim = grid.dim();
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| x * cis(dot(&kick, &grid.coordinate(i)[..dim])))
        .collect();
    Ok(psi.with_values(values))
}

/// `U(a, L, t, v) psi = shift(a - tv) rotate(L) boost(L^{-1} v) e^{i Omega t} psi`.
pub fn galilei_apply(g: &GalileiElement, psi: &Wavefunction, dynamics: &FreeDynamics) -> Result<Wavefunction> {
    psi.grid().check_vector(&g.shift)?;
    let mut out = evolve(-g.time, psi, dynamics)?;
    out = boost(&g.rotation.inverse().apply(&g.velocity), &out, dynamics)?;
    if g.rotation != Rotation::identity(g.dim()) {
        out = rotate(&g.rotation, &out)?;
    }
    shift(&axpy(-g.time, &g.velocity, &g.shift), &out)
}

/// `U(a, L, t, v)* psi`.
pub fn galilei_apply_adjoint(
    g: &GalileiElement,
    psi: &Wavefunction,
    dynamics: &FreeDynamics,
) -> Result<Wavefunction> {
    psi.grid().check_vector(&g.shift)?;
    let back: Vec<f64> = axpy(-g.time, &g.velocity, &g.shift).iter().map(|x| -x).collect();
    let mut out = shift(&back, psi)?;
    if g.rotation != Rotation::identity(g.dim()) {
        out = rotate(&g.rotation.inverse(), &out)?;
    }
    let v: Vec<f64> = g.rotation.inverse().apply(&g.velocity).iter().map(|x| -x).collect();
    out = boost(&v, &out, dynamics)?;
    evolve(g.time, &out, dynamics)
}

/// `xi = exp(i (kappa/c) [w.M a - s|v|^2/2 - (s + t) w.M v])` for
/// `g2 = (b, M, s, w)`, `g1 = (a, L, t, v)`.
pub fn galilei_multiplier(g2: &GalileiElement, g1: &GalileiElement, dynamics: &FreeDynamics) -> Complex64 {
    cis(multiplier_exponent(g2, g1, dynamics))
}

/// The real exponent of [`galilei_multiplier`].
pub fn multiplier_exponent(g2: &GalileiElement, g1: &GalileiElement, dynamics: &FreeDynamics) -> f64 {
    let (m, w, s) = (&g2.rotation, &g2.velocity, g2.time);
    let ma = m.apply(&g1.shift);
    let mv = m.apply(&g1.velocity);
    dynamics.kappa / dynamics.c
        * (dot(w, &ma) - s * norm_sq(&g1.velocity) / 2.0 - (s + g1.time) * dot(w, &mv))
}

/// `||U(g2) U(g1) psi - xi(g2, g1) U(g2 g1) psi||`.
pub fn multiplier_residual(
    g2: &GalileiElement,
    g1: &GalileiElement,
    psi: &Wavefunction,
    dynamics: &FreeDynamics,
) -> Result<f64> {
    let lhs = galilei_apply(g2, &galilei_apply(g1, psi, dynamics)?, dynamics)?;
    let rhs = galilei_apply(&compose(g2, g1)?, psi, dynamics)?
        .scaled(galilei_multiplier(g2, g1, dynamics));
    lhs.distance(&rhs)
}

/// Result of fitting `<Q>_t = <Q>_0 + (c t/kappa) <K>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFit {
    /// Fitted velocity `d<Q>/dt` per axis.
    pub slope: Vec<f64>,
    /// `<K>` per axis.
    pub wavevector_mean: Vec<f64>,
    /// Fitted `kappa`, absent when `<K> = 0`.
    pub kappa: Option<f64>,
    /// Largest deviation of `<Q>_t` from the fitted line.
    pub residual: f64,
}

impl MassFit {
    /// Mass in units of `hbar/c`: `m = hbar kappa / c`.
    pub fn mass_in_hbar_over_c(&self) -> Option<f64> {
        self.kappa
    }
}

/// Largest probability allowed in the outer 10% of the box during mass extraction.
pub const EDGE_MASS_LIMIT: f64 = 1e-10;

/// Fit `<Q_j>` over `times` and recover `kappa = c <K_j> / slope_j` along the axis
/// with the largest `|<K_j>|`.
pub fn mass_extraction(psi: &Wavefunction, dynamics: &FreeDynamics, times: &[f64]) -> Result<MassFit> {
    if times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two time samples".into()));
    }
    let dim = psi.grid().dim();
    let mut means = Vec::with_capacity(times.len());
    for &t in times {
        let psi_t = evolve(t, psi, dynamics)?;
        let edge = psi_t.edge_mass(0.1);
        if edge > EDGE_MASS_LIMIT {
            return Err(Error::EdgeContact(edge));
        }
        means.push(position_mean(&psi_t)?);
    }
    let kmean: Vec<f64> = (0..dim)
        .map(|j| Ok(inner(psi, &wavevector_apply(j, psi)?)?.re))
        .collect::<Result<_>>()?;
    let n = times.len() as f64;
    let tbar = times.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - tbar).powi(2)).sum();
    let mut slope = vec![0.0; dim];
    let mut residual: f64 = 0.0;
    for j in 0..dim {
        let qbar = means.iter().map(|m| m[j]).sum::<f64>() / n;
        let stq: f64 = times.iter().zip(&means).map(|(t, m)| (t - tbar) * (m[j] - qbar)).sum();
        slope[j] = stq / stt;
        for (t, m) in times.iter().zip(&means) {
            residual = residual.max((m[j] - (qbar + slope[j] * (t - tbar))).abs());
        }
    }
    let axis = (0..dim).fold(0, |b, j| if kmean[j].abs() > kmean[b].abs() { j } else { b });
    let kappa = if kmean[axis].abs() > 1e-12 && slope[axis] != 0.0 {
        Some(dynamics.c * kmean[axis] / slope[axis])
    } else {
        None
    };
    Ok(MassFit { slope, wavevector_mean: kmean, kappa, residual })
}

/// `<Q>` at time `t` seen from a frame moving with velocity `v` whose origin
/// coincides with the lab at `t = 0`. The frame state is
/// `shift(-tv) boost(-v) evolve(t) psi = U(0, I, -t, -v) psi`.
pub fn boosted_frame_position(
    psi: &Wavefunction,
    v: &[f64],
    t: f64,
    dynamics: &FreeDynamics,
) -> Result<Vec<f64>> {
    let dim = psi.grid().dim();
    let back: Vec<f64> = v.iter().map(|x| -x).collect();
    let g = GalileiElement::new(vec![0.0; dim], Rotation::identity(dim), -t, back)?;
    position_mean(&galilei_apply(&g, psi, dynamics)?)
}

/// Time reversal `psi -> conj psi`.
pub fn time_reverse(psi: &Wavefunction) -> Wavefunction {
    psi.conj()
}

/// Closed-form Heisenberg solution of the free particle:
/// `K_t = K`, `Q_t = Q + (tc/kappa) K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergSolution {
    pub q_from_q: f64,
    pub q_from_k: f64,
    pub k_from_q: f64,
    pub k_from_k: f64,
}

pub fn heisenberg_free_solution(t: f64, dynamics: &FreeDynamics) -> HeisenbergSolution {
    HeisenbergSolution { q_from_q: 1.0, q_from_k: dynamics.spreading(t), k_from_q: 0.0, k_from_k: 1.0 }
}

/// Max over axes of `|<psi|Q_t psi> - <psi_t|Q psi_t>|` and the same for `K`.
pub fn heisenberg_discrepancy(psi: &Wavefunction, t: f64, dynamics: &FreeDynamics) -> Result<f64> {
    let sol = heisenberg_free_solution(t, dynamics);
    let psi_t = evolve(t, psi, dynamics)?;
    let mut worst: f64 = 0.0;
    for j in 0..psi.grid().dim() {
        let q = inner(psi, &position_apply(j, psi)?)?.re;
        let k = inner(psi, &wavevector_apply(j, psi)?)?.re;
        let q_t = inner(&psi_t, &position_apply(j, &psi_t)?)?.re;
        let k_t = inner(&psi_t, &wavevector_apply(j, &psi_t)?)?.re;
        worst = worst.max((sol.q_from_q * q + sol.q_from_k * k - q_t).abs());
        worst = worst.max((sol.k_from_q * q + sol.k_from_k * k - k_t).abs());
    }
    Ok(worst)
}

/// `||i d psi_t/dt - Omega psi_t||` with a fourth-order centered difference, step `h`.
pub fn schrodinger_residual(psi: &Wavefunction, t: f64, h: f64, dynamics: &FreeDynamics) -> Result<f64> {
    let at = |s: f64| evolve(t + s, psi, dynamics);
    let (p2, p1, m1, m2) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
    let w = 1.0 / (12.0 * h);
    let deriv = m2
        .scaled(Complex64::new(w, 0.0))
        .add_scaled(Complex64::new(-8.0 * w, 0.0), &m1)?
        .add_scaled(Complex64::new(8.0 * w, 0.0), &p1)?
        .add_scaled(Complex64::new(-w, 0.0), &p2)?;
    let lhs = deriv.scaled(Complex64::new(0.0, 1.0));
    lhs.distance(&frequency_apply(&at(0.0)?, dynamics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_gaussian};
    use crate::operators::{heisenberg_picture_check, quarter_turn};
    use crate::states::position_variance;

    fn setup() -> (Wavefunction, FreeDynamics) {
        let g = make_grid(1, 512, 64.0).unwrap();
        (sample_gaussian(&g, 1.0, &[0.0], &[0.0]).unwrap(), FreeDynamics::with_kappa(1.0).unwrap())
    }

    #[test]
    fn group_law_examples() {
        let g = GalileiElement::new(vec![1.0, 2.0], Rotation::planar(0.4), 0.5, vec![0.3, -0.1]).unwrap();
        let e = GalileiElement::identity(2);
        assert_eq!(compose(&g, &e).unwrap(), g);
        assert!(compose(&g, &inverse_element(&g)).unwrap().distance(&e) < 1e-15);
        assert!(inverse_element(&inverse_element(&g)).distance(&g) < 1e-15);
        assert_eq!(inverse_element(&GalileiElement::boost(&[0.7])), GalileiElement::boost(&[-0.7]));
        let (b, m, s, w) = (vec![0.5, 0.0], Rotation::planar(1.0), 2.0, vec![0.1, 0.2]);
        let g2 = GalileiElement::new(b.clone(), m, s, w.clone()).unwrap();
        let g1 = GalileiElement::new(vec![1.0, -1.0], Rotation::identity(2), 0.3, vec![0.0, 0.0]).unwrap();
        let out = compose(&g2, &g1).unwrap();
        let ma = m.apply(&[1.0, -1.0]);
        for j in 0..2 {
            assert!((out.shift[j] - (b[j] + ma[j] + 0.3 * w[j])).abs() < 1e-15);
        }
        assert_eq!(out.time, 2.3);
        assert_eq!(out.velocity, w);
    }

    #[test]
    fn dynamics_rejects_zero_mass() {
        assert!(FreeDynamics::with_kappa(0.0).is_err());
        assert!(FreeDynamics::new(1.0, 0.0, 0.0).is_err());
        assert!(FreeDynamics::with_kappa(-1.0).is_ok());
    }

    #[test]
    fn boost_shifts_mean_wavevector() {
        let (psi, dy) = setup();
        assert_eq!(boost(&[0.0], &psi, &dy).unwrap(), psi);
        let out = boost(&[0.75], &psi, &dy).unwrap();
        let k = inner(&out, &wavevector_apply(0, &out).unwrap()).unwrap().re;
        assert!((k - 0.75).abs() < 1e-8);
        let two = boost(&[0.5], &boost(&[0.25], &psi, &dy).unwrap(), &dy).unwrap();
        assert!(two.distance(&out).unwrap() < 1e-14);
        assert!(matches!(boost(&[20.0], &psi, &dy), Err(Error::BandLimit(_))));
    }

    #[test]
    fn free_spreading_matches_closed_form() {
        let (psi, dy) = setup();
        for t in [0.5, 1.0, 2.5] {
            let var = position_variance(&evolve(t, &psi, &dy).unwrap()).unwrap()[0];
            assert!((var - (1.0 + t * t / 4.0)).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn plane_wave_phase_advance() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let k0 = 3.0 * g.wavevector_spacing();
        let psi = Wavefunction::from_fn(g, |q| cis(k0 * q[0]));
        let dy = FreeDynamics::new(1.5, 2.0, 0.0).unwrap();
        let t = 0.8;
        let expect = psi.scaled(cis(-k0 * k0 * 2.0 / 3.0 * t));
        assert!(evolve(t, &psi, &dy).unwrap().distance(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn evolution_group_law_and_equation() {
        let (psi, dy) = setup();
        let a = evolve(0.7, &evolve(1.1, &psi, &dy).unwrap(), &dy).unwrap();
        assert!(a.distance(&evolve(1.8, &psi, &dy).unwrap()).unwrap() < 1e-12);
        assert!(schrodinger_residual(&psi, 2.0, 1e-3, &dy).unwrap() < 1e-6);
    }

    #[test]
    fn shift_and_time_elements_act_as_expected() {
        let (psi, dy) = setup();
        let a = galilei_apply(&GalileiElement::translation(&[1.5]), &psi, &dy).unwrap();
        assert!(a.distance(&shift(&[1.5], &psi).unwrap()).unwrap() < 1e-15);
        let t = galilei_apply(&GalileiElement::time_translation(1, 0.6), &psi, &dy).unwrap();
        assert!(t.distance(&evolve(-0.6, &psi, &dy).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn boosted_time_element_matches_plane_wave_sum() {
        let g = make_grid(1, 256, 48.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.5], &[0.0]).unwrap();
        let dy = FreeDynamics::new(1.3, 1.0, 0.4).unwrap();
        let (t, v) = (0.9, 0.6);
        let out = galilei_apply(&GalileiElement::new(vec![0.0], Rotation::identity(1), t, vec![v]).unwrap(), &psi, &dy)
            .unwrap();
        let tf = forward(&psi);
        let dk = g.wavevector_spacing();
        let expect = Wavefunction::from_fn(g, |q| {
            let x = q[0] + t * v;
            let sum: Complex64 = (0..g.len())
                .map(|i| {
                    let k = tf.wavevector(i)[0];
                    tf.values()[i] * dk * cis(k * x + dy.frequency(&[k]) * t)
                })
                .sum();
            sum * cis(dy.kappa * v * x / dy.c)
        });
        assert!(out.distance(&expect).unwrap() < 1e-8);
    }

    #[test]
    fn multiplier_closed_form_cases() {
        let dy = FreeDynamics::new(1.7, 1.3, 0.0).unwrap();
        let a = GalileiElement::translation(&[0.8, -0.2]);
        let b = GalileiElement::translation(&[0.1, 0.4]);
        assert_eq!(galilei_multiplier(&a, &b, &dy), Complex64::new(1.0, 0.0));
        let w = GalileiElement::boost(&[0.3, 0.5]);
        let expect = cis(1.7 / 1.3 * (0.3 * 0.8 + 0.5 * -0.2));
        assert!((galilei_multiplier(&w, &a, &dy) - expect).norm() < 1e-15);
        let s = GalileiElement::time_translation(2, 0.7);
        let v = GalileiElement::boost(&[0.2, -0.1]);
        let expect = cis(-1.7 / 1.3 * 0.7 * 0.05 / 2.0);
        assert!((galilei_multiplier(&s, &v, &dy) - expect).norm() < 1e-15);
    }

    #[test]
    fn multiplier_residual_small_for_mixed_elements() {
        let g = make_grid(2, 128, 32.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.5, -0.3], &[0.2, 0.1]).unwrap();
        let dy = FreeDynamics::new(1.4, 1.0, 0.3).unwrap();
        let g1 = GalileiElement::new(vec![0.4, 0.1], quarter_turn(2, 0, 1).unwrap(), 0.5, vec![0.2, -0.3]).unwrap();
        let g2 = GalileiElement::new(vec![-0.2, 0.6], quarter_turn(2, 0, 3).unwrap(), -0.3, vec![0.1, 0.25]).unwrap();
        assert!(multiplier_residual(&g2, &g1, &psi, &dy).unwrap() < 1e-8);
        let e = GalileiElement::identity(2);
        assert!(multiplier_residual(&e, &e, &psi, &dy).unwrap() < 1e-15);
    }

    #[test]
    fn drift_term_breaks_the_multiplier() {
        let g = make_grid(1, 256, 48.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.0], &[0.0]).unwrap();
        let dy = FreeDynamics::with_kappa(1.0).unwrap().with_drift(vec![0.5]);
        let s = GalileiElement::time_translation(1, 0.8);
        let v = GalileiElement::boost(&[0.4]);
        assert!(multiplier_residual(&s, &v, &psi, &dy).unwrap() > 1e-3);
    }

    #[test]
    fn mass_extraction_recovers_kappa() {
        let g = make_grid(1, 512, 64.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.0], &[2.0]).unwrap();
        let times: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
        for kappa in [1.0, 2.0] {
            let dy = FreeDynamics::with_kappa(kappa).unwrap();
            let fit = mass_extraction(&psi, &dy, &times).unwrap();
            assert!((fit.slope[0] - 2.0 / kappa).abs() < 1e-6);
            assert!((fit.kappa.unwrap() - kappa).abs() < 1e-6 * kappa);
            assert!(fit.residual < 1e-8);
        }
        let still = sample_gaussian(&g, 1.0, &[0.0], &[0.0]).unwrap();
        let fit = mass_extraction(&still, &FreeDynamics::with_kappa(1.0).unwrap(), &times).unwrap();
        assert!(fit.slope[0].abs() < 1e-10 && fit.kappa.is_none());
        let fast = sample_gaussian(&g, 1.0, &[20.0], &[6.0]).unwrap();
        let far: Vec<f64> = vec![0.0, 2.0];
        assert!(matches!(
            mass_extraction(&fast, &FreeDynamics::with_kappa(1.0).unwrap(), &far),
            Err(Error::EdgeContact(_))
        ));
    }

    #[test]
    fn moving_frame_position() {
        let g = make_grid(1, 512, 64.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.2], &[0.5]).unwrap();
        let dy = FreeDynamics::with_kappa(1.0).unwrap();
        let (v, t) = (0.3, 1.0);
        let moved = boosted_frame_position(&psi, &[v], t, &dy).unwrap()[0];
        let rest = position_mean(&evolve(t, &psi, &dy).unwrap()).unwrap()[0];
        assert!((moved - (rest - t * v)).abs() < 1e-8);
        let at_zero = boosted_frame_position(&psi, &[v], 0.0, &dy).unwrap()[0];
        assert!((at_zero - 0.2).abs() < 1e-8);
        // U(0, I, t, v)* re-centres the frame at time t: the tv drift cancels
        let g = GalileiElement::new(vec![0.0], Rotation::identity(1), t, vec![v]).unwrap();
        let adj = position_mean(&galilei_apply_adjoint(&g, &psi, &dy).unwrap()).unwrap()[0];
        assert!((adj - rest).abs() < 1e-8);
    }

    #[test]
    fn time_reversal_properties() {
        let g = make_grid(1, 256, 40.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.3], &[0.8]).unwrap();
        let phi = sample_gaussian(&g, 1.5, &[-0.3], &[0.0]).unwrap();
        let z = Complex64::new(0.3, -0.9);
        assert!(time_reverse(&psi.scaled(z)).distance(&time_reverse(&psi).scaled(z.conj())).unwrap() < 1e-15);
        assert_eq!(time_reverse(&time_reverse(&psi)), psi);
        let lhs = inner(&time_reverse(&phi), &time_reverse(&psi)).unwrap();
        assert!((lhs - inner(&psi, &phi).unwrap()).norm() < 1e-12);
        let dy = FreeDynamics::with_kappa(1.0).unwrap();
        let a = time_reverse(&evolve(0.7, &time_reverse(&psi), &dy).unwrap());
        assert!(a.distance(&evolve(-0.7, &psi, &dy).unwrap()).unwrap() < 1e-10);
        let b = evolve(0.7, &time_reverse(&psi), &dy.reversed_mass()).unwrap();
        assert!(b.distance(&time_reverse(&evolve(0.7, &psi, &dy).unwrap())).unwrap() < 1e-10);
    }

    #[test]
    fn heisenberg_solution_and_pictures() {
        let g = make_grid(1, 256, 48.0).unwrap();
        let psi = sample_gaussian(&g, 1.0, &[0.4], &[1.5]).unwrap();
        let dy = FreeDynamics::new(1.3, 1.0, 0.0).unwrap();
        let sol = heisenberg_free_solution(0.0, &dy);
        assert_eq!((sol.q_from_q, sol.q_from_k, sol.k_from_k), (1.0, 0.0, 1.0));
        assert!((heisenberg_free_solution(0.6, &dy).q_from_k - 0.6 / 1.3).abs() < 1e-15);
        assert!(heisenberg_discrepancy(&psi, 0.6, &dy).unwrap() < 1e-8);
        let k = 2.0 * g.wavevector_spacing();
        let f = Wavefunction::from_real_fn(g, |q| (-q[0] * q[0] / 8.0).exp());
        for op in [
            Operator::Identity,
            Operator::Weyl { k: vec![k], a: vec![0.0] },
            Operator::Shift(vec![0.9]),
            Operator::Position(0),
            Operator::Multiply(f),
        ] {
            let d = heisenberg_picture_check(&op, &psi, 0.5, &dy).unwrap();
            assert!(d < 1e-10, "{d:e}");
        }
    }
}
