//! Python bindings for the `mmwave_ent` crate.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mmwave_ent::fock::{self, FockDensityOp, TruncationPolicy};
use mmwave_ent::gaussian::{self, EbScheme};
use mmwave_ent::link::{self, AbsorptionModel, LinkEnvironment};
use mmwave_ent::scenario::{self, ScenarioKind, SweepSpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scheme_from(name: &str) -> PyResult<EbScheme> {
    EbScheme::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| {
            let names: Vec<_> = EbScheme::ALL.iter().map(|s| s.name()).collect();
            PyValueError::new_err(format!(
                "unknown scheme {name:?}, expected one of {names:?}"
            ))
        })
}

fn policy(cutoff: usize, tol: Option<f64>) -> TruncationPolicy {
    let mut p = TruncationPolicy::with_cutoff(cutoff);
    if let Some(t) = tol {
        p.convergence_tol = t;
    }
    p
}

#[pyclass(name = "Squeezing", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PySqueezing(gaussian::Squeezing);

#[pymethods]
impl PySqueezing {
    #[new]
    fn new(r: f64) -> PyResult<Self> {
        gaussian::Squeezing::new(r).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_db(db: f64) -> PyResult<Self> {
        gaussian::Squeezing::from_db(db)
            .map(Self)
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_variance(v: f64) -> PyResult<Self> {
        gaussian::Squeezing::from_variance(v)
            .map(Self)
            .map_err(value_err)
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    #[getter]
    fn db(&self) -> f64 {
        self.0.db()
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn __repr__(&self) -> String {
        format!("Squeezing(r={}, db={:.4})", self.0.r(), self.0.db())
    }
}

#[pyclass(name = "ThermalChannel", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyThermalChannel(gaussian::ThermalChannel);

#[pymethods]
impl PyThermalChannel {
    #[new]
    fn new(tau: f64, nbar: f64) -> PyResult<Self> {
        gaussian::ThermalChannel::new(tau, nbar)
            .map(Self)
            .map_err(value_err)
    }

    #[staticmethod]
    fn with_omega(tau: f64, omega: f64) -> PyResult<Self> {
        gaussian::ThermalChannel::with_omega(tau, omega)
            .map(Self)
            .map_err(value_err)
    }

    /// Channel of a line-of-sight link with absorption from the default table.
    #[staticmethod]
    #[pyo3(signature = (freq_ghz, temp_k, distance_m, aperture_m=1.0))]
    fn from_link(freq_ghz: f64, temp_k: f64, distance_m: f64, aperture_m: f64) -> PyResult<Self> {
        let env = LinkEnvironment::new(freq_ghz * 1e9, temp_k, distance_m, aperture_m)
            .map_err(value_err)?;
        link::channel_from_environment(&env, &AbsorptionModel::default_model())
            .map(Self)
            .map_err(value_err)
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau()
    }

    #[getter]
    fn nbar(&self) -> f64 {
        self.0.nbar()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    fn __repr__(&self) -> String {
        format!(
            "ThermalChannel(tau={}, nbar={})",
            self.0.tau(),
            self.0.nbar()
        )
    }
}

/// Two-mode Fock-space density operator.
#[pyclass(name = "FockState", frozen)]
struct PyFockState(FockDensityOp);

#[pymethods]
impl PyFockState {
    #[staticmethod]
    #[pyo3(signature = (squeezing, cutoff=12))]
    fn tmsv(squeezing: &PySqueezing, cutoff: usize) -> PyResult<Self> {
        fock::tmsv_density(squeezing.0, &policy(cutoff, None))
            .map(Self)
            .map_err(value_err)
    }

    #[staticmethod]
    #[pyo3(signature = (squeezing, kappa=1.0, cutoff=12))]
    fn pss(squeezing: &PySqueezing, kappa: f64, cutoff: usize) -> PyResult<Self> {
        fock::pss_density(squeezing.0, kappa, &policy(cutoff, None))
            .map(Self)
            .map_err(value_err)
    }

    #[staticmethod]
    fn noon(n: usize) -> PyResult<Self> {
        fock::noon_density(n).map(Self).map_err(value_err)
    }

    #[getter]
    fn cutoffs(&self) -> (usize, usize) {
        (self.0.cutoff1(), self.0.cutoff2())
    }

    #[getter]
    fn trace_deficit(&self) -> f64 {
        self.0.trace_deficit()
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn element(&self, m1: usize, m2: usize, n1: usize, n2: usize) -> PyResult<(f64, f64)> {
        if m1 > self.0.cutoff1()
            || n1 > self.0.cutoff1()
            || m2 > self.0.cutoff2()
            || n2 > self.0.cutoff2()
        {
            return Err(PyValueError::new_err("photon index beyond cutoff"));
        }
        let z = self.0.element(m1, m2, n1, n2);
        Ok((z.re, z.im))
    }

    fn mode2_distribution(&self) -> Vec<f64> {
        self.0.mode2_distribution()
    }

    /// Sends mode 2 through `channel`.
    #[pyo3(signature = (channel, cutoff=12))]
    fn evolve(&self, channel: &PyThermalChannel, cutoff: usize) -> PyResult<Self> {
        fock::evolve_mode2(&self.0, &channel.0, &policy(cutoff, None))
            .map(Self)
            .map_err(value_err)
    }

    fn log_negativity(&self) -> f64 {
        fock::log_negativity_fock(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "FockState(cutoffs=({}, {}), trace={:.12})",
            self.0.cutoff1(),
            self.0.cutoff2(),
            self.0.trace()
        )
    }
}

/// E_LN in bits of a TMSV after mode 2 crosses `channel` (exact CM route).
#[pyfunction]
fn tmsv_log_negativity(squeezing: &PySqueezing, channel: &PyThermalChannel) -> PyResult<f64> {
    let cm = gaussian::evolve_single_channel(&gaussian::tmsv_cm(squeezing.0), &channel.0);
    gaussian::log_negativity_cm(&cm).map_err(value_err)
}

#[pyfunction]
fn thermal_tms_log_negativity(squeezing: &PySqueezing, n1: f64, n2: f64) -> PyResult<f64> {
    let cm = gaussian::thermal_tms_cm(squeezing.0, n1, n2).map_err(value_err)?;
    gaussian::log_negativity_cm(&cm).map_err(value_err)
}

#[pyfunction]
fn direct_relay_log_negativity(
    squeezing: &PySqueezing,
    a: &PyThermalChannel,
    b: &PyThermalChannel,
) -> PyResult<f64> {
    gaussian::log_negativity_cm(&gaussian::direct_relay_cm(squeezing.0, &a.0, &b.0))
        .map_err(value_err)
}

#[pyfunction]
fn swap_relay_log_negativity(
    squeezing: &PySqueezing,
    a: &PyThermalChannel,
    b: &PyThermalChannel,
) -> PyResult<f64> {
    gaussian::log_negativity_cm(&gaussian::swap_relay_cm(squeezing.0, &a.0, &b.0))
        .map_err(value_err)
}

/// Entanglement-breaking transmissivity for `scheme` in
/// `{"single", "direct_relay", "swap_relay"}`.
#[pyfunction]
#[pyo3(signature = (omega, scheme="single"))]
fn eb_transmissivity(omega: f64, scheme: &str) -> PyResult<f64> {
    if !(omega >= 1.0) {
        return Err(PyValueError::new_err(format!(
            "omega must be >= 1, got {omega}"
        )));
    }
    Ok(gaussian::eb_transmissivity(scheme_from(scheme)?, omega))
}

#[pyfunction]
fn mean_photon_number(freq_ghz: f64, temp_k: f64) -> f64 {
    link::mean_photon_number(freq_ghz * 1e9, temp_k)
}

#[pyfunction]
#[pyo3(signature = (freq_ghz, temp_k, scheme="single"))]
fn eb_distance(freq_ghz: f64, temp_k: f64, scheme: &str) -> PyResult<f64> {
    let env = LinkEnvironment::new(freq_ghz * 1e9, temp_k, 0.0, 1.0).map_err(value_err)?;
    link::eb_distance(
        &env,
        &AbsorptionModel::default_model(),
        scheme_from(scheme)?,
    )
    .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (freq_ghz, distance_m, aperture_m=1.0, tx_power_dbm=0.0))]
fn friis_received_power(
    freq_ghz: f64,
    distance_m: f64,
    aperture_m: f64,
    tx_power_dbm: f64,
) -> PyResult<f64> {
    let env =
        LinkEnvironment::new(freq_ghz * 1e9, 300.0, distance_m, aperture_m).map_err(value_err)?;
    link::friis_received_power(&env, tx_power_dbm).map_err(value_err)
}

#[pyfunction]
fn half_beamwidth_deg(freq_ghz: f64, aperture_m: f64) -> f64 {
    link::half_beamwidth_deg(freq_ghz, aperture_m)
}

/// E_LN of a NOON state after one thermal-loss channel.
#[pyfunction]
fn noon_log_negativity(n: usize, channel: &PyThermalChannel) -> PyResult<f64> {
    fock::noon_log_negativity_after_channel(n, &channel.0, &TruncationPolicy::default())
        .map_err(value_err)
}

/// Runs a scenario sweep and returns its CSV text. `config` holds INI text in
/// the same format the CLI reads.
#[pyfunction]
#[pyo3(signature = (name, config=None))]
fn run_scenario(py: Python<'_>, name: &str, config: Option<&str>) -> PyResult<String> {
    let kind: ScenarioKind = name.parse().map_err(value_err)?;
    let spec = match config {
        Some(text) => SweepSpec::from_ini_str(kind, text).map_err(value_err)?,
        None => SweepSpec::default_for(kind),
    };
    let table = py
        .detach(|| scenario::run(&spec))
        .map_err(|e| match e.exit_code() {
            2 => value_err(e),
            _ => PyRuntimeError::new_err(e.to_string()),
        })?;
    table
        .to_csv_string()
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn scenario_names() -> Vec<&'static str> {
    ScenarioKind::ALL.iter().map(|k| k.name()).collect()
}

#[pymodule]
fn pymmwave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySqueezing>()?;
    m.add_class::<PyThermalChannel>()?;
    m.add_class::<PyFockState>()?;
    m.add_function(wrap_pyfunction!(tmsv_log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_tms_log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(direct_relay_log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(swap_relay_log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(eb_transmissivity, m)?)?;
    m.add_function(wrap_pyfunction!(mean_photon_number, m)?)?;
    m.add_function(wrap_pyfunction!(eb_distance, m)?)?;
    m.add_function(wrap_pyfunction!(friis_received_power, m)?)?;
    m.add_function(wrap_pyfunction!(half_beamwidth_deg, m)?)?;
    m.add_function(wrap_pyfunction!(noon_log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_names, m)?)?;
    Ok(())
}
