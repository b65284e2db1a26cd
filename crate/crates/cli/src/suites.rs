//! Invariant suites behind `check-invariants`. Each returns measured values
//! next to their tolerances; randomized cases draw from a seeded ChaCha stream.

use std::f64::consts::PI;

use covqm::circle::{circle_basis, circle_evolve, circle_inner, k_matrix_eigenvalues, CircleGrid};
use covqm::fourier::{forward, inverse};
use covqm::galilei::{
    compose, galilei_multiplier, heisenberg_discrepancy, inverse_element, mass_extraction, multiplier_residual,
    FreeDynamics, GalileiElement,
};
use covqm::operators::{ccr_residual, covariance_residual, quarter_turn, weyl, weyl_composition_phase};
use covqm::spin::{lift_path, multiplier, RotationPath, SU2Element};
use covqm::states::PhaseSpaceTable;
use covqm::uniqueness::vn_check;
use covqm::{make_grid, sample_gaussian, EuclideanElement, Rotation, Wavefunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Check;

/// Tolerance keys of `check-invariants` with their defaults.
pub const INVARIANT_TOLERANCES: &[(&str, f64)] = &[
    ("fourier_round_trip", 1e-12),
    ("ccr", 1e-8),
    ("weyl_phase", 1e-10),
    ("shift_covariance", 1e-12),
    ("rotation_covariance", 1e-10),
    ("chi_gaussian", 1e-8),
    ("vn_idempotency", 1e-8),
    ("vn_symmetry", 1e-10),
    ("vn_rank_gap", 1e-6),
    ("vn_compression", 1e-6),
    ("spin_half_turn", 1e-12),
    ("spin_windings", 1e-10),
    ("spin_cocycle", 1e-12),
    ("galilei_multiplier", 1e-8),
    ("galilei_cocycle", 1e-12),
    ("galilei_group", 1e-12),
    ("mass_extraction", 1e-6),
    ("heisenberg", 1e-8),
    ("circle_k_spectrum", 1e-10),
    ("circle_stationary", 1e-12),
];

pub fn random_rotation3(rng: &mut ChaCha8Rng) -> Result<Rotation, CliError> {
    let axis = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)];
    Ok(Rotation::axis_angle(axis, rng.gen_range(-PI..PI))?)
}

fn sym(rng: &mut ChaCha8Rng, r: f64) -> f64 {
    rng.gen_range(-r..r)
}

fn check(cfg: &RunConfig, name: &str, measured: f64) -> Check {
    Check::new(name, measured, cfg.tol(name))
}

pub fn run_all(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    out.extend(operators_suite(cfg, rng)?);
    out.extend(states_suite(cfg)?);
    out.extend(uniqueness_suite(cfg)?);
    out.extend(spin_suite(cfg, rng)?);
    out.extend(galilei_suite(cfg, rng)?);
    out.extend(circle_suite(cfg)?);
    Ok(out)
}

fn operators_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let g = make_grid(1, 512, 48.0)?;
    let dk = g.wavevector_spacing();
    let (mut round, mut ccr, mut phase, mut cov) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..8 {
        let psi = sample_gaussian(&g, rng.gen_range(0.8..1.5), &[sym(rng, 1.0)], &[sym(rng, 1.5)])?;
        round = round.max(inverse(&forward(&psi)).distance(&psi)?);
        ccr = ccr.max(ccr_residual(&psi)?[0]);
        let (k1, k2) = ((rng.gen_range(-20..20) as f64) * dk, (rng.gen_range(-20..20) as f64) * dk);
        let (a1, a2) = (sym(rng, 2.0), sym(rng, 2.0));
        let lhs = weyl(&[k1], &[a1], &weyl(&[k2], &[a2], &psi)?)?;
        let rhs = weyl(&[k1 + k2], &[a1 + a2], &psi)?.scaled(weyl_composition_phase(&[k1], &[a1], &[k2], &[a2]));
        phase = phase.max(lhs.distance(&rhs)?);
        let f = Wavefunction::from_real_fn(g, |q| (-(q[0] - 0.5).powi(2) / 3.0).exp() * (1.0 + 0.3 * q[0].sin()));
        let step = rng.gen_range(-40..40) as f64 * g.spacing();
        cov = cov.max(covariance_residual(&f, &EuclideanElement::translation(&[step]), &psi)?);
    }
    let g2 = make_grid(2, 64, 16.0)?;
    let psi2 = sample_gaussian(&g2, 1.0, &[0.4, -0.3], &[0.0, 0.0])?;
    let f2 = Wavefunction::from_real_fn(g2, |q| (-(q[0] * q[0] + 2.0 * q[1] * q[1]) / 4.0).exp());
    let mut rot = 0f64;
    for quarters in 1..4 {
        let x = EuclideanElement::new(vec![g2.spacing() * 3.0, -g2.spacing()], quarter_turn(2, 0, quarters)?)?;
        rot = rot.max(covariance_residual(&f2, &x, &psi2)?);
    }
    Ok(vec![
        check(cfg, "fourier_round_trip", round),
        check(cfg, "ccr", ccr),
        check(cfg, "weyl_phase", phase),
        check(cfg, "shift_covariance", cov),
        check(cfg, "rotation_covariance", rot),
    ])
}

/// Max relative error of the default characteristic table against the Gaussian closed form.
pub fn gaussian_chi_error(psi: &Wavefunction, lambda: f64) -> Result<(PhaseSpaceTable, f64), CliError> {
    let table = PhaseSpaceTable::default_characteristic(psi)?;
    let mut worst = 0f64;
    for i in 0..table.len() {
        let (k, q) = (table.first[i][0], table.second[i][0]);
        let reference = (-lambda * lambda * k * k / 2.0 - q * q / (8.0 * lambda * lambda)).exp();
        worst = worst.max((table.values[i] - reference).norm() / reference);
    }
    Ok((table, worst))
}

fn states_suite(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let g = make_grid(1, 512, 64.0)?;
    let mut worst = 0f64;
    for lambda in [0.5, 1.0, 2.0] {
        let psi = sample_gaussian(&g, lambda, &[0.0], &[0.0])?;
        worst = worst.max(gaussian_chi_error(&psi, lambda)?.1);
    }
    Ok(vec![check(cfg, "chi_gaussian", worst)])
}

fn uniqueness_suite(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let r = vn_check(&make_grid(1, 128, 32.0)?)?;
    let comp = r.compression.iter().map(|c| c.error).fold(0.0, f64::max);
    Ok(vec![
        check(cfg, "vn_idempotency", r.idempotency),
        check(cfg, "vn_symmetry", r.symmetry),
        check(cfg, "vn_rank_gap", r.rank_gap),
        check(cfg, "vn_compression", comp),
    ])
}

fn spin_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let half = Rotation::about_axis(2, PI)?;
    let xi = multiplier(&half, &half)?;
    let once = lift_path(&RotationPath::winding([0.0, 0.0, 1.0], 2.0 * PI, 16)?)?;
    let twice = lift_path(&RotationPath::winding([0.0, 0.0, 1.0], 4.0 * PI, 32)?)?;
    let winding = once.distance(&SU2Element::identity().neg()).max(twice.distance(&SU2Element::identity()));
    let mut cocycle = 0f64;
    for _ in 0..100 {
        let (a, b, c) = (random_rotation3(rng)?, random_rotation3(rng)?, random_rotation3(rng)?);
        let lhs = multiplier(&a, &b)? * multiplier(&a.compose(&b)?, &c)?;
        let rhs = multiplier(&a, &b.compose(&c)?)? * multiplier(&b, &c)?;
        cocycle = cocycle.max(f64::from(lhs - rhs).abs());
    }
    Ok(vec![
        check(cfg, "spin_half_turn", (f64::from(xi) + 1.0).abs()),
        check(cfg, "spin_windings", winding),
        check(cfg, "spin_cocycle", cocycle),
    ])
}

pub fn random_galilei(rng: &mut ChaCha8Rng, dim: usize) -> Result<GalileiElement, CliError> {
    let rotation = match dim {
        1 => Rotation::identity(1),
        2 => quarter_turn(2, 0, rng.gen_range(0..4))?,
        _ => random_rotation3(rng)?,
    };
    let shift = (0..dim).map(|_| sym(rng, 1.0)).collect();
    let velocity = (0..dim).map(|_| sym(rng, 0.3)).collect();
    Ok(GalileiElement::new(shift, rotation, sym(rng, 0.6), velocity)?)
}

fn galilei_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let dy = FreeDynamics::new(cfg.kappa, cfg.c, cfg.d)?;
    let g = make_grid(2, 128, 32.0)?;
    let psi = sample_gaussian(&g, 1.0, &[0.3, -0.2], &[0.2, 0.1])?;
    let mut resid = 0f64;
    for _ in 0..10 {
        let (a, b) = (random_galilei(rng, 2)?, random_galilei(rng, 2)?);
        resid = resid.max(multiplier_residual(&a, &b, &psi, &dy)?);
    }
    let (mut cocycle, mut group) = (0f64, 0f64);
    for _ in 0..100 {
        let (a, b, c) = (random_galilei(rng, 3)?, random_galilei(rng, 3)?, random_galilei(rng, 3)?);
        let lhs = galilei_multiplier(&a, &b, &dy) * galilei_multiplier(&compose(&a, &b)?, &c, &dy);
        let rhs = galilei_multiplier(&a, &compose(&b, &c)?, &dy) * galilei_multiplier(&b, &c, &dy);
        cocycle = cocycle.max((lhs - rhs).norm());
        let left = compose(&compose(&a, &b)?, &c)?;
        let right = compose(&a, &compose(&b, &c)?)?;
        group = group.max(left.distance(&right));
        group = group.max(compose(&a, &inverse_element(&a))?.distance(&GalileiElement::identity(3)));
    }
    let g1 = make_grid(1, 512, 64.0)?;
    let moving = sample_gaussian(&g1, 1.0, &[0.0], &[1.5])?;
    let times: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
    let fit = mass_extraction(&moving, &dy, &times)?;
    let mass_err = fit.kappa.map_or(f64::INFINITY, |k| ((k - cfg.kappa) / cfg.kappa).abs());
    let heis = heisenberg_discrepancy(&moving, 0.5, &dy)?;
    Ok(vec![
        check(cfg, "galilei_multiplier", resid),
        check(cfg, "galilei_cocycle", cocycle),
        check(cfg, "galilei_group", group),
        check(cfg, "mass_extraction", mass_err),
        check(cfg, "heisenberg", heis),
    ])
}

fn circle_suite(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let g = CircleGrid::new(64)?;
    let eig = k_matrix_eigenvalues(&g)?;
    let spectrum = eig.iter().zip(-31..=32).map(|(e, n)| (e - n as f64).abs()).fold(0.0, f64::max);
    let mut stationary = 0f64;
    for n in [-3i64, 0, 5] {
        let p = circle_basis(n, &g)?;
        let out = circle_evolve(1.7, &p, cfg.kappa, cfg.c)?;
        stationary = stationary.max((circle_inner(&p, &out)?.norm() - 1.0).abs());
    }
    Ok(vec![check(cfg, "circle_k_spectrum", spectrum), check(cfg, "circle_stationary", stationary)])
}
