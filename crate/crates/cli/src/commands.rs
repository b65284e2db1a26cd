//! One function per subcommand. Each writes its files through [`Writer`] and
//! returns whether every check passed.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::Path;

use covqm::circle::{circle_spectrum, CircleGrid};
use covqm::galilei::{galilei_multiplier, multiplier_residual, FreeDynamics, GalileiElement};
use covqm::io::{read_wavefunction, write_spectral, write_wavefunction};
use covqm::operators::{quarter_turn, wavevector_mean};
use covqm::spin::{lift_path, multiplier, section, spinor_correlation, RotationPath, SpinElement, SU2Element};
use covqm::states::{effective_width, position_mean, PhaseSpaceTable};
use covqm::uniqueness::vn_check;
use covqm::{forward, make_grid, sample_gaussian, GridSpec, Rotation, SpinorField, Wavefunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Check, Writer};
use crate::suites;

pub const DEMO_TOLERANCES: &[(&str, f64)] = &[("chi", 1e-8), ("wigner", 1e-6)];
pub const COCYCLE_TOLERANCES: &[(&str, f64)] = &[("residual", 1e-8)];
pub const SPIN_TOLERANCES: &[(&str, f64)] = &[("phase", 1e-8), ("winding", 1e-10)];
pub const VN_TOLERANCES: &[(&str, f64)] =
    &[("idempotency", 1e-8), ("symmetry", 1e-10), ("rank_gap", 1e-6), ("compression", 1e-6)];
pub const CIRCLE_TOLERANCES: &[(&str, f64)] = &[("k_integer", 1e-10)];
pub const NO_TOLERANCES: &[(&str, f64)] = &[];

/// Tolerance keys accepted by `command`.
pub fn tolerances_for(command: &str) -> &'static [(&'static str, f64)] {
    match command {
        "demo-gaussian" => DEMO_TOLERANCES,
        "check-invariants" => suites::INVARIANT_TOLERANCES,
        "cocycle-table" => COCYCLE_TOLERANCES,
        "spin-demo" => SPIN_TOLERANCES,
        "vn-check" => VN_TOLERANCES,
        "circle-spectrum" => CIRCLE_TOLERANCES,
        _ => NO_TOLERANCES,
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    pass: bool,
    checks: &'a [Check],
    #[serde(flatten)]
    details: T,
}

fn finish<T: Serialize>(w: &mut Writer, name: &str, checks: &[Check], details: T) -> Result<bool, CliError> {
    let pass = checks.iter().all(|c| c.pass);
    w.json(name, &Report { pass, checks, details })?;
    Ok(pass)
}

fn grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    Ok(make_grid(cfg.grid_dim, cfg.grid_n, cfg.box_length)?)
}

fn gaussian(cfg: &RunConfig) -> Result<Wavefunction, CliError> {
    let g = grid(cfg)?;
    let zero = vec![0.0; g.dim()];
    Ok(sample_gaussian(&g, cfg.lambda, &zero, &zero)?)
}

/// Append reference and error columns to a table's CSV.
fn with_reference(table: &PhaseSpaceTable, reference: &[f64], error: &[f64]) -> String {
    let csv = table.to_csv();
    let mut lines = csv.lines();
    let mut out = format!("{},reference,error\n", lines.next().unwrap_or(""));
    for (i, line) in lines.enumerate() {
        let _ = writeln!(out, "{line},{:.16e},{:.16e}", reference[i], error[i]);
    }
    out
}

pub fn demo_gaussian(cfg: &RunConfig) -> Result<bool, CliError> {
    let psi = gaussian(cfg)?;
    let (lambda, dim) = (cfg.lambda, cfg.grid_dim as i32);
    let chi = PhaseSpaceTable::default_characteristic(&psi)?;
    let (mut chi_ref, mut chi_err) = (Vec::new(), Vec::new());
    for i in 0..chi.len() {
        let (k, q) = (chi.first[i][0], chi.second[i][0]);
        let r = (-lambda * lambda * k * k / 2.0 - q * q / (8.0 * lambda * lambda)).exp();
        chi_err.push((chi.values[i] - r).norm() / r);
        chi_ref.push(r);
    }
    let rho = PhaseSpaceTable::default_wigner(&psi)?;
    let (mut rho_ref, mut rho_err) = (Vec::new(), Vec::new());
    for i in 0..rho.len() {
        let (q, k) = (rho.first[i][0], rho.second[i][0]);
        let r = 2f64.powi(dim) * (-q * q / (2.0 * lambda * lambda) - 2.0 * lambda * lambda * k * k).exp();
        rho_err.push((rho.values[i].re - r).abs());
        rho_ref.push(r);
    }
    let max_chi = chi_err.iter().copied().fold(0.0, f64::max);
    let max_rho = rho_err.iter().copied().fold(0.0, f64::max);
    let mut w = Writer::new(cfg)?;
    w.text("chi.csv", &with_reference(&chi, &chi_ref, &chi_err))?;
    w.text("wigner.csv", &with_reference(&rho, &rho_ref, &rho_err))?;
    let checks = [Check::new("chi", max_chi, cfg.tol("chi")), Check::new("wigner", max_rho, cfg.tol("wigner"))];
    finish(&mut w, "report.json", &checks, json!({ "max_chi_error": max_chi, "max_wigner_error": max_rho }))
}

pub fn check_invariants(cfg: &RunConfig) -> Result<bool, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let checks = suites::run_all(cfg, &mut rng)?;
    let mut w = Writer::new(cfg)?;
    finish(&mut w, "invariants.json", &checks, json!({}))
}

/// Random element for grid-level tests: rotations restricted to lattice symmetries.
fn lattice_galilei(rng: &mut ChaCha8Rng, dim: usize) -> Result<GalileiElement, CliError> {
    let rotation = match dim {
        1 => Rotation::identity(1),
        2 => quarter_turn(2, 0, rng.gen_range(0..4))?,
        _ => quarter_turn(3, rng.gen_range(0..3), rng.gen_range(0..4))?,
    };
    let mut draw = |r: f64| (0..dim).map(|_| rng.gen_range(-r..r)).collect::<Vec<f64>>();
    let shift = draw(1.0);
    let velocity = draw(0.3);
    let time = rng.gen_range(-0.6..0.6);
    Ok(GalileiElement::new(shift, rotation, time, velocity)?)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(";")
}

fn element_cells(g: &GalileiElement) -> String {
    let rot: Vec<f64> = g.rotation.rows().concat();
    format!("{},{},{:.16e},{}", join(&g.shift), join(&rot), g.time, join(&g.velocity))
}

pub const COCYCLE_ROWS: usize = 200;

pub fn cocycle_table(cfg: &RunConfig) -> Result<bool, CliError> {
    let dy = FreeDynamics::new(cfg.kappa, cfg.c, cfg.d)?;
    let g = grid(cfg)?;
    let zero = vec![0.0; g.dim()];
    let mut k0 = zero.clone();
    k0[0] = 0.2;
    let psi = sample_gaussian(&g, cfg.lambda, &zero, &k0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut body = String::from("row,g1_shift,g1_rotation,g1_time,g1_velocity,g2_shift,g2_rotation,g2_time,g2_velocity,xi_re,xi_im,residual\n");
    let mut worst = 0f64;
    for row in 0..COCYCLE_ROWS {
        let (g1, g2) = (lattice_galilei(&mut rng, g.dim())?, lattice_galilei(&mut rng, g.dim())?);
        let xi = galilei_multiplier(&g2, &g1, &dy);
        let r = multiplier_residual(&g2, &g1, &psi, &dy)?;
        worst = worst.max(r);
        let _ = writeln!(body, "{row},{},{},{:.16e},{:.16e},{:.16e}", element_cells(&g1), element_cells(&g2), xi.re, xi.im, r);
    }
    let mut w = Writer::new(cfg)?;
    w.text("cocycle.csv", &body)?;
    let checks = [Check::new("residual", worst, cfg.tol("residual"))];
    finish(&mut w, "cocycle.json", &checks, json!({ "rows": COCYCLE_ROWS, "max_residual": worst }))
}

fn named_rotations() -> Result<Vec<(&'static str, Rotation)>, CliError> {
    Ok(vec![
        ("identity", Rotation::identity(3)),
        ("z_half_turn", Rotation::about_axis(2, PI)?),
        ("z_quarter_turn", Rotation::about_axis(2, FRAC_PI_2)?),
        ("x_half_turn", Rotation::about_axis(0, PI)?),
        ("y_quarter_turn", Rotation::about_axis(1, FRAC_PI_2)?),
        ("diagonal_third_turn", Rotation::axis_angle([1.0, 1.0, 1.0], 2.0 * PI / 3.0)?),
        ("oblique", Rotation::axis_angle([0.3, -0.5, 0.8], 1.1)?),
    ])
}

#[derive(Serialize)]
struct Lift {
    rotation: &'static str,
    quaternion: [f64; 4],
}

#[derive(Serialize)]
struct PhaseRow {
    alpha: f64,
    beta: f64,
    component: &'static str,
    measured: [f64; 2],
    expected: [f64; 2],
    error: f64,
}

fn quaternion(u: &SU2Element) -> [f64; 4] {
    // u = w I - i (x sigma_1 + y sigma_2 + z sigma_3)
    let m = u.matrix();
    [m[0][0].re, -m[0][1].im, -m[0][1].re, -m[0][0].im]
}

pub fn spin_demo(cfg: &RunConfig) -> Result<bool, CliError> {
    let rotations = named_rotations()?;
    let mut csv = String::from("first,second,xi\n");
    let mut half_turn = 0i8;
    for (na, a) in &rotations {
        for (nb, b) in &rotations {
            let xi = multiplier(a, b)?;
            if *na == "z_half_turn" && *nb == "z_half_turn" {
                half_turn = xi;
            }
            let _ = writeln!(csv, "{na},{nb},{xi}");
        }
    }
    let lifts: Vec<Lift> = rotations
        .iter()
        .map(|(n, r)| Ok(Lift { rotation: n, quaternion: quaternion(&section(r)?) }))
        .collect::<Result<_, CliError>>()?;
    let once = lift_path(&RotationPath::winding([0.0, 0.0, 1.0], 2.0 * PI, 16)?)?;
    let twice = lift_path(&RotationPath::winding([0.0, 0.0, 1.0], 4.0 * PI, 32)?)?;
    let winding = once.distance(&SU2Element::identity().neg()).max(twice.distance(&SU2Element::identity()));

    // a state centered on the z axis is invariant under quarter turns about z,
    // which act as exact index maps
    let g = make_grid(3, cfg.grid_n, cfg.box_length)?;
    let psi = sample_gaussian(&g, cfg.lambda, &[0.0, 0.0, 0.5], &[0.0, 0.0, 0.0])?;
    let zero = Wavefunction::zeros(g);
    let one = Wavefunction::constant(g, Complex64::new(1.0, 0.0));
    let fields = [("up", SpinorField::new(psi.clone(), zero.clone())?, 1.0), ("down", SpinorField::new(zero, psi)?, -1.0)];
    let mut phases = Vec::new();
    let mut worst = 0f64;
    for (alpha, beta) in [(FRAC_PI_2, 0.0), (PI, FRAC_PI_2), (3.0 * FRAC_PI_2, -FRAC_PI_2), (2.0 * PI, 0.0), (3.0 * PI, FRAC_PI_2)] {
        let x = SpinElement::lifted(vec![0.0; 3], SU2Element::from_axis_angle([0.0, 0.0, 1.0], alpha)?);
        let y = SpinElement::lifted(vec![0.0; 3], SU2Element::from_axis_angle([0.0, 0.0, 1.0], beta)?);
        for (name, field, sign) in &fields {
            let got = spinor_correlation(&one, &x, &y, field)?;
            let expect = Complex64::from_polar(1.0, sign * (alpha - beta) / 2.0);
            let error = (got - expect).norm();
            worst = worst.max(error);
            phases.push(PhaseRow {
                alpha,
                beta,
                component: name,
                measured: [got.re, got.im],
                expected: [expect.re, expect.im],
                error,
            });
        }
    }
    let mut w = Writer::new(cfg)?;
    w.text("multipliers.csv", &csv)?;
    let checks = [
        Check::new("half_turn_multiplier", (f64::from(half_turn) + 1.0).abs(), 0.0),
        Check::new("winding", winding, cfg.tol("winding")),
        Check::new("phase", worst, cfg.tol("phase")),
    ];
    finish(&mut w, "spin.json", &checks, json!({ "lifts": lifts, "correlation_phases": phases }))
}

pub fn vn(cfg: &RunConfig) -> Result<bool, CliError> {
    let report = vn_check(&grid(cfg)?)?;
    let comp = report.compression.iter().map(|c| c.error).fold(0.0, f64::max);
    let checks = [
        Check::new("idempotency", report.idempotency, cfg.tol("idempotency")),
        Check::new("symmetry", report.symmetry, cfg.tol("symmetry")),
        Check::new("rank_gap", report.rank_gap, cfg.tol("rank_gap")),
        Check::new("compression", comp, cfg.tol("compression")),
    ];
    let mut w = Writer::new(cfg)?;
    finish(&mut w, "vn.json", &checks, report)
}

pub fn circle(cfg: &RunConfig) -> Result<bool, CliError> {
    let rows = circle_spectrum(&CircleGrid::new(cfg.grid_n)?, cfg.kappa, cfg.c)?;
    let mut csv = String::from("n,k,omega\n");
    let mut worst = 0f64;
    for r in &rows {
        worst = worst.max((r.k_eigenvalue - r.n as f64).abs());
        let _ = writeln!(csv, "{},{:.16e},{:.16e}", r.n, r.k_eigenvalue, r.omega_eigenvalue);
    }
    let mut w = Writer::new(cfg)?;
    w.text("spectrum.csv", &csv)?;
    let checks = [Check::new("k_integer", worst, cfg.tol("k_integer"))];
    finish(&mut w, "spectrum.json", &checks, json!({ "rows": rows.len() }))
}

pub fn export_wavefunction(cfg: &RunConfig) -> Result<bool, CliError> {
    let psi = gaussian(cfg)?;
    let mut w = Writer::new(cfg)?;
    let meta = crate::output::header(cfg);
    w.raw("wavefunction.txt", &write_wavefunction(&psi, Some(&meta)))?;
    w.raw("spectrum.txt", &write_spectral(&forward(&psi), Some(&meta)))?;
    Ok(true)
}

pub fn import_wavefunction(cfg: &RunConfig, input: &Path) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
    let psi = read_wavefunction(&text)?;
    let norm = psi.norm();
    let summary = json!({
        "grid": { "dim": psi.grid().dim(), "N": psi.grid().points_per_axis(), "L": psi.grid().box_length() },
        "norm": norm,
        "position_mean": position_mean(&psi)?,
        "wavevector_mean": wavevector_mean(&psi),
        "width": effective_width(&psi)?,
    });
    let mut w = Writer::new(cfg)?;
    w.json("import.json", &summary)?;
    if (norm - 1.0).abs() > 1e-8 {
        eprintln!("warning: imported wavefunction has norm {norm}");
    }
    Ok(true)
}
