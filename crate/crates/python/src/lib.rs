//! Python bindings exposing the simulator's main types and operations:
//! channel/coupling math, NOMA rates, the per-scheme solvers, and the CSV
//! sweep runner. Built as the `pinchsim_py` extension module.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pinchsim::benchmarks::{self, SchemeKind};
use pinchsim::coupling::{self, CouplingParams, RadiationMode};
use pinchsim::geometry::{self, Position3, SystemParams};
use pinchsim::harness::{self, ExperimentConfig};
use pinchsim::optimizer::{self, Solution, SolverOptions};
use pinchsim::rates::{self, GammaScale, SemanticParams};

fn err(e: pinchsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Position3", skip_from_py_object)]
#[derive(Clone)]
struct PyPosition3 {
    inner: Position3,
}

#[pymethods]
impl PyPosition3 {
    #[new]
    #[pyo3(signature = (x, y, z = 0.0))]
    fn new(x: f64, y: f64, z: f64) -> Self {
        Self { inner: Position3::new(x, y, z) }
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }

    #[getter]
    fn z(&self) -> f64 {
        self.inner.z
    }

    fn distance(&self, other: &PyPosition3) -> f64 {
        self.inner.distance(&other.inner)
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn __repr__(&self) -> String {
        format!("Position3({}, {}, {})", self.inner.x, self.inner.y, self.inner.z)
    }
}

#[pyclass(name = "SystemParams", skip_from_py_object)]
#[derive(Clone)]
struct PySystemParams {
    inner: SystemParams,
}

#[pymethods]
impl PySystemParams {
    /// 28 GHz reference setup; override region side, antenna count, and
    /// transmit power as needed.
    #[new]
    #[pyo3(signature = (d = 20.0, n = 3, p_max_dbm = 10.0))]
    fn new(d: f64, n: usize, p_max_dbm: f64) -> PyResult<Self> {
        let inner = SystemParams::defaults()
            .with_region_side(d)
            .with_antenna_count(n)
            .with_max_power(pinchsim::dbm_to_watts(p_max_dbm));
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn carrier_frequency(&self) -> f64 {
        self.inner.carrier_frequency
    }

    #[getter]
    fn region_side(&self) -> f64 {
        self.inner.region_side
    }

    #[getter]
    fn antenna_count(&self) -> usize {
        self.inner.antenna_count
    }

    #[getter]
    fn min_spacing(&self) -> f64 {
        self.inner.min_spacing
    }

    #[getter]
    fn noise_power(&self) -> f64 {
        self.inner.noise_power
    }

    #[getter]
    fn max_power(&self) -> f64 {
        self.inner.max_power
    }

    /// (lambda, guided lambda, reference path gain).
    fn wavelengths(&self) -> PyResult<(f64, f64, f64)> {
        let wl = geometry::wavelengths(&self.inner).map_err(err)?;
        Ok((wl.lambda, wl.guided, wl.path_gain))
    }
}

#[pyclass(name = "CouplingParams", skip_from_py_object)]
#[derive(Clone)]
struct PyCouplingParams {
    inner: CouplingParams,
}

#[pymethods]
impl PyCouplingParams {
    #[new]
    #[pyo3(signature = (spacings = None))]
    fn new(spacings: Option<Vec<f64>>) -> Self {
        let inner = CouplingParams::defaults().with_spacings(spacings.unwrap_or_default());
        Self { inner }
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.inner.omega0
    }

    #[getter]
    fn decay(&self) -> f64 {
        self.inner.decay
    }

    #[getter]
    fn antenna_length(&self) -> f64 {
        self.inner.antenna_length
    }

    #[getter]
    fn spacings(&self) -> Vec<f64> {
        self.inner.spacings.clone()
    }
}

#[pyclass(name = "SemanticParams", skip_from_py_object)]
#[derive(Clone)]
struct PySemanticParams {
    inner: SemanticParams,
}

#[pymethods]
impl PySemanticParams {
    #[new]
    #[pyo3(signature = (k = 5, sut_ratio = 1.0, a1 = 0.37, a2 = 0.98, c1 = 0.25, c2 = -0.7895, gamma_scale = "linear"))]
    fn new(
        k: u32,
        sut_ratio: f64,
        a1: f64,
        a2: f64,
        c1: f64,
        c2: f64,
        gamma_scale: &str,
    ) -> PyResult<Self> {
        let inner = SemanticParams {
            symbols_per_word: k,
            sut_ratio,
            lower_asymptote: a1,
            upper_asymptote: a2,
            growth_rate: c1,
            midpoint_offset: c2,
            gamma_scale: match gamma_scale {
                "linear" => GammaScale::Linear,
                "db" | "decibel" => GammaScale::Decibel,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "gamma_scale must be 'linear' or 'db', got '{other}'"
                    )))
                }
            },
        };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn rate_ceiling(&self) -> f64 {
        self.inner.rate_ceiling()
    }
}

#[pyclass(name = "SolverOptions", skip_from_py_object)]
#[derive(Clone)]
struct PySolverOptions {
    inner: SolverOptions,
}

#[pymethods]
impl PySolverOptions {
    #[new]
    #[pyo3(signature = (r_b_min = 0.5, delta_s = 0.02, delta_b = 0.02))]
    fn new(r_b_min: f64, delta_s: f64, delta_b: f64) -> PyResult<Self> {
        let inner = SolverOptions::defaults()
            .with_qos(r_b_min)
            .with_phase_precision(delta_s, delta_b);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn qos_min_rate(&self) -> f64 {
        self.inner.qos_min_rate
    }
}

#[pyclass(name = "Solution")]
struct PySolution {
    inner: Solution,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn antenna_xs(&self) -> Vec<f64> {
        self.inner.antenna_xs.clone()
    }

    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas.clone()
    }

    #[getter]
    fn power_split(&self) -> f64 {
        self.inner.power_split
    }

    #[getter]
    fn semantic_rate(&self) -> f64 {
        self.inner.semantic_rate
    }

    #[getter]
    fn bit_rate(&self) -> f64 {
        self.inner.bit_rate
    }

    #[getter]
    fn sic_rate(&self) -> f64 {
        self.inner.sic_rate
    }

    #[getter]
    fn feasible(&self) -> bool {
        self.inner.feasible
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(feasible={}, p_s={:.6}, r_s={:.6}, r_b={:.6})",
            self.inner.feasible, self.inner.power_split, self.inner.semantic_rate, self.inner.bit_rate
        )
    }
}

/// Spherical-wavefront channel coefficient as a Python complex.
#[pyfunction]
fn free_space_channel(user: &PyPosition3, antenna: &PyPosition3, lambda: f64) -> PyResult<Complex64> {
    geometry::free_space_channel(&user.inner, &antenna.inner, lambda).map_err(err)
}

/// Composite effective array gain towards a user.
#[pyfunction]
fn effective_gain(
    user: &PyPosition3,
    antenna_xs: Vec<f64>,
    betas: Vec<f64>,
    params: &PySystemParams,
) -> PyResult<Complex64> {
    let antennas: Vec<Position3> = antenna_xs
        .iter()
        .map(|&x| Position3::on_waveguide(x, params.inner.waveguide_height))
        .collect();
    geometry::effective_gain(&user.inner, &antennas, &betas, &params.inner).map_err(err)
}

#[pyfunction]
fn coupling_coefficient(spacing: f64, params: &PyCouplingParams) -> PyResult<f64> {
    coupling::coupling_coefficient(spacing, &params.inner).map_err(err)
}

/// (betas, residual) for the configured spacings.
#[pyfunction]
#[pyo3(signature = (params, mode = "cascaded"))]
fn radiation_profile(params: &PyCouplingParams, mode: &str) -> PyResult<(Vec<f64>, f64)> {
    let mode = match mode {
        "cascaded" => RadiationMode::Cascaded,
        "literal" => RadiationMode::Literal,
        other => {
            return Err(PyValueError::new_err(format!(
                "mode must be 'cascaded' or 'literal', got '{other}'"
            )))
        }
    };
    let prof = coupling::radiation_profile(&params.inner, mode).map_err(err)?;
    Ok((prof.betas, prof.residual))
}

#[pyfunction]
fn equal_power_spacings(n: usize, params: &PyCouplingParams) -> PyResult<Vec<f64>> {
    coupling::equal_power_spacings(n, &params.inner).map_err(err)
}

#[pyfunction]
fn bit_rate(p_s: f64, p_max: f64, g_b: Complex64, noise: f64) -> f64 {
    rates::bit_rate(p_s, p_max, g_b, noise)
}

#[pyfunction]
fn sic_rate(p_s: f64, p_max: f64, g_s: Complex64, noise: f64) -> f64 {
    rates::sic_rate(p_s, p_max, g_s, noise)
}

#[pyfunction]
fn semantic_similarity(gamma: f64, params: &PySemanticParams) -> f64 {
    rates::semantic_similarity(gamma, &params.inner)
}

#[pyfunction]
fn semantic_rate(p_s: f64, p_max: f64, g_s: Complex64, noise: f64, params: &PySemanticParams) -> f64 {
    rates::semantic_rate(p_s, p_max, g_s, noise, &params.inner)
}

/// Closed-form semantic power fraction, or None when infeasible.
#[pyfunction]
fn optimal_power_split(
    g_s: Complex64,
    g_b: Complex64,
    p_max: f64,
    noise: f64,
    r_b_min: f64,
) -> Option<f64> {
    optimizer::optimal_power_split(g_s, g_b, p_max, noise, r_b_min)
}

/// Solve one scenario under 'proportional_pass', 'equal_pass', or 'cas'.
#[pyfunction]
#[pyo3(signature = (scheme, user_s, user_b, params, options = None))]
fn solve(
    scheme: &str,
    user_s: &PyPosition3,
    user_b: &PyPosition3,
    params: &PySystemParams,
    options: Option<&PySolverOptions>,
) -> PyResult<PySolution> {
    let kind = SchemeKind::parse(scheme).map_err(err)?;
    let opts = options.map(|o| o.inner.clone()).unwrap_or_default();
    let sol = benchmarks::solve(
        kind,
        &user_s.inner,
        &user_b.inner,
        &params.inner,
        &CouplingParams::defaults(),
        &SemanticParams::defaults(),
        &opts,
    )
    .map_err(err)?;
    Ok(PySolution { inner: sol })
}

/// Draw one paired user drop (stream `trial` of the seed).
#[pyfunction]
fn sample_users(seed: u64, trial: u64, region_side: f64) -> (PyPosition3, PyPosition3) {
    let mut rng = harness::trial_rng(seed, trial);
    let (s, b) = harness::sample_users(&mut rng, region_side);
    (PyPosition3 { inner: s }, PyPosition3 { inner: b })
}

/// Run a power sweep and return the CSV text.
#[pyfunction]
#[pyo3(signature = (grid_dbm, trials, seed, d = 20.0, n = 3, schemes = None))]
fn sweep_power_csv(
    grid_dbm: Vec<f64>,
    trials: usize,
    seed: u64,
    d: f64,
    n: usize,
    schemes: Option<Vec<String>>,
) -> PyResult<String> {
    let mut cfg = ExperimentConfig::defaults();
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.system = cfg.system.with_region_side(d).with_antenna_count(n);
    cfg.grid = grid_dbm
        .into_iter()
        .map(harness::SweepPoint::Scalar)
        .collect();
    if let Some(names) = schemes {
        cfg.schemes = names
            .iter()
            .map(|s| SchemeKind::parse(s))
            .collect::<pinchsim::Result<Vec<_>>>()
            .map_err(err)?;
    }
    let records = harness::run_sweep(&cfg).map_err(err)?;
    Ok(harness::records_to_csv(&records))
}

#[pyfunction]
fn dbm_to_watts(dbm: f64) -> f64 {
    pinchsim::dbm_to_watts(dbm)
}

#[pymodule]
fn pinchsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPosition3>()?;
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyCouplingParams>()?;
    m.add_class::<PySemanticParams>()?;
    m.add_class::<PySolverOptions>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(free_space_channel, m)?)?;
    m.add_function(wrap_pyfunction!(effective_gain, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(radiation_profile, m)?)?;
    m.add_function(wrap_pyfunction!(equal_power_spacings, m)?)?;
    m.add_function(wrap_pyfunction!(bit_rate, m)?)?;
    m.add_function(wrap_pyfunction!(sic_rate, m)?)?;
    m.add_function(wrap_pyfunction!(semantic_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(semantic_rate, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_power_split, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(sample_users, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_power_csv, m)?)?;
    m.add_function(wrap_pyfunction!(dbm_to_watts, m)?)?;
    Ok(())
}
