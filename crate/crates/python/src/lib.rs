use covqm::circle::{circle_spectrum, CircleGrid};
use covqm::galilei::{evolve, galilei_apply, galilei_multiplier as multiplier_value};
use covqm::operators::{rotate, shift, weyl};
use covqm::spin::multiplier;
use covqm::states::{characteristic, position_mean, wigner};
use covqm::uniqueness::vn_check as run_vn_check;
use covqm::{forward, inverse, make_grid, sample_gaussian, FreeDynamics, GalileiElement, GridSpec, Rotation, SpectralFunction};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: covqm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rotation(rows: Vec<Vec<f64>>) -> PyResult<Rotation> {
    Rotation::from_rows(&rows).map_err(err)
}

fn dynamics(kappa: f64, c: f64, d: f64) -> PyResult<FreeDynamics> {
    FreeDynamics::new(kappa, c, d).map_err(err)
}

/// Periodic box `[-L/2, L/2)^dim` with `n` points per axis.
#[pyclass(name = "Grid", module = "covqm_py", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, n: usize, box_length: f64) -> PyResult<Self> {
        make_grid(dim, n, box_length).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points_per_axis()
    }

    #[getter]
    fn box_length(&self) -> f64 {
        self.0.box_length()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    #[getter]
    fn wavevector_spacing(&self) -> f64 {
        self.0.wavevector_spacing()
    }

    fn coordinates(&self) -> Vec<f64> {
        self.0.axis_coordinates()
    }

    fn wavevectors(&self) -> Vec<f64> {
        self.0.axis_wavevectors()
    }

    fn __repr__(&self) -> String {
        format!("Grid(dim={}, n={}, box_length={})", self.0.dim(), self.0.points_per_axis(), self.0.box_length())
    }
}

/// Lattice samples of a wavefunction, row-major over the axes.
#[pyclass(name = "Wavefunction", module = "covqm_py", from_py_object)]
#[derive(Clone)]
struct PyWavefunction(covqm::Wavefunction);

#[pymethods]
impl PyWavefunction {
    #[new]
    fn new(grid: PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        covqm::Wavefunction::new(grid.0, values).map(Self).map_err(err)
    }

    /// Normalized Gaussian packet of width `lam` centered at `center` with mean wavevector `k0`.
    #[staticmethod]
    fn gaussian(grid: PyGrid, lam: f64, center: Vec<f64>, k0: Vec<f64>) -> PyResult<Self> {
        sample_gaussian(&grid.0, lam, &center, &k0).map(Self).map_err(err)
    }

    /// Rebuild from centered spectral values.
    #[staticmethod]
    fn from_spectrum(grid: PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        let tf = SpectralFunction::new(grid.0, values).map_err(err)?;
        Ok(Self(inverse(&tf)))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    /// Centered spectral values of the forward transform.
    fn spectrum(&self) -> Vec<Complex64> {
        forward(&self.0).values().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inner(&self, other: &PyWavefunction) -> PyResult<Complex64> {
        covqm::inner(&self.0, &other.0).map_err(err)
    }

    fn distance(&self, other: &PyWavefunction) -> PyResult<f64> {
        self.0.distance(&other.0).map_err(err)
    }

    fn position_mean(&self) -> PyResult<Vec<f64>> {
        position_mean(&self.0).map_err(err)
    }

    fn shift(&self, a: Vec<f64>) -> PyResult<Self> {
        shift(&a, &self.0).map(Self).map_err(err)
    }

    fn rotate(&self, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        rotate(&rotation(rows)?, &self.0).map(Self).map_err(err)
    }

    fn weyl(&self, k: Vec<f64>, a: Vec<f64>) -> PyResult<Self> {
        weyl(&k, &a, &self.0).map(Self).map_err(err)
    }

    #[pyo3(signature = (t, kappa=1.0, c=1.0, d=0.0))]
    fn evolve(&self, t: f64, kappa: f64, c: f64, d: f64) -> PyResult<Self> {
        evolve(t, &self.0, &dynamics(kappa, c, d)?).map(Self).map_err(err)
    }

    /// `U(a, L, t, v)` with `L` given as rotation matrix rows.
    #[pyo3(signature = (shift, rotation_rows, t, velocity, kappa=1.0, c=1.0, d=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn galilei(
        &self,
        shift: Vec<f64>,
        rotation_rows: Vec<Vec<f64>>,
        t: f64,
        velocity: Vec<f64>,
        kappa: f64,
        c: f64,
        d: f64,
    ) -> PyResult<Self> {
        let g = GalileiElement::new(shift, rotation(rotation_rows)?, t, velocity).map_err(err)?;
        galilei_apply(&g, &self.0, &dynamics(kappa, c, d)?).map(Self).map_err(err)
    }

    fn characteristic(&self, k: Vec<f64>, q: Vec<f64>) -> PyResult<Complex64> {
        characteristic(&self.0, &k, &q).map_err(err)
    }

    fn wigner(&self, q: Vec<f64>, k: Vec<f64>) -> PyResult<f64> {
        wigner(&self.0, &q, &k).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

/// `(shift, rotation_rows, t, velocity)`.
type ElementTuple = (Vec<f64>, Vec<Vec<f64>>, f64, Vec<f64>);

/// Phase `xi` in `U(g2) U(g1) = xi U(g2 g1)`.
#[pyfunction]
#[pyo3(signature = (g2, g1, kappa=1.0, c=1.0, d=0.0))]
fn galilei_multiplier(
    g2: ElementTuple,
    g1: ElementTuple,
    kappa: f64,
    c: f64,
    d: f64,
) -> PyResult<Complex64> {
    let element = |(a, rows, t, v): ElementTuple| {
        GalileiElement::new(a, rotation(rows)?, t, v).map_err(err)
    };
    Ok(multiplier_value(&element(g2)?, &element(g1)?, &dynamics(kappa, c, d)?))
}

/// Sign `+1` or `-1` relating the lifts of two rotations and of their product.
#[pyfunction]
fn spin_multiplier(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<i8> {
    multiplier(&rotation(a)?, &rotation(b)?).map_err(err)
}

/// Projection diagnostics on a one-dimensional grid.
#[pyfunction]
fn vn_check<'py>(py: Python<'py>, n: usize, box_length: f64) -> PyResult<Bound<'py, PyDict>> {
    let report = run_vn_check(&make_grid(1, n, box_length).map_err(err)?).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("idempotency", report.idempotency)?;
    out.set_item("symmetry", report.symmetry)?;
    out.set_item("rank_gap", report.rank_gap)?;
    out.set_item("construction_gap", report.construction_gap)?;
    let worst = report.compression.iter().map(|c| c.error).fold(0.0, f64::max);
    out.set_item("compression", worst)?;
    Ok(out)
}

/// `(n, <K>, <Omega>)` for each basis mode on a circle of `n` points.
#[pyfunction]
#[pyo3(signature = (points, kappa=1.0, c=1.0))]
fn circle_modes(points: usize, kappa: f64, c: f64) -> PyResult<Vec<(i64, f64, f64)>> {
    let grid = CircleGrid::new(points).map_err(err)?;
    let rows = circle_spectrum(&grid, kappa, c).map_err(err)?;
    Ok(rows.into_iter().map(|r| (r.n, r.k_eigenvalue, r.omega_eigenvalue)).collect())
}

#[pymodule]
fn covqm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyWavefunction>()?;
    m.add_function(wrap_pyfunction!(galilei_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(spin_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(vn_check, m)?)?;
    m.add_function(wrap_pyfunction!(circle_modes, m)?)?;
    Ok(())
}
