//! Python bindings: parameter records, single-SQUID simulation, spectra,
//! pulse metrics, switch-time predictions and scenarios.

use comb_forge::config::parse_config;
use comb_forge::dynamics;
use comb_forge::ensemble;
use comb_forge::pulses::voltage_pulse_metrics;
use comb_forge::scenario::{self, ScenarioId, ScenarioOptions};
use comb_forge::spectrum;
use comb_forge::{DriveConfig, SeriesKind, SimGrid, SquidParams, TimeSeries};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: comb_forge::Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    match e {
        comb_forge::Error::Io { .. } => PyIOError::new_err(msg),
        comb_forge::Error::NonConvergence { .. } => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

#[pyclass(name = "SquidParams", from_py_object)]
#[derive(Clone)]
struct PySquidParams {
    inner: SquidParams,
}

#[pymethods]
impl PySquidParams {
    #[new]
    #[pyo3(signature = (shunt_resistance=20.0, junction_capacitance=0.0, critical_current_sum=100e-6,
                        asymmetry=0.0, loop_inductance=0.0, area_perturbation=0.0))]
    fn new(
        shunt_resistance: f64,
        junction_capacitance: f64,
        critical_current_sum: f64,
        asymmetry: f64,
        loop_inductance: f64,
        area_perturbation: f64,
    ) -> PyResult<Self> {
        let inner = SquidParams {
            shunt_resistance,
            junction_capacitance,
            critical_current_sum,
            asymmetry,
            loop_inductance,
            area_perturbation,
        };
        inner.validate().map_err(to_py)?;
        Ok(PySquidParams { inner })
    }

    #[getter]
    fn shunt_resistance(&self) -> f64 {
        self.inner.shunt_resistance
    }
    #[getter]
    fn junction_capacitance(&self) -> f64 {
        self.inner.junction_capacitance
    }
    #[getter]
    fn critical_current_sum(&self) -> f64 {
        self.inner.critical_current_sum
    }
    #[getter]
    fn asymmetry(&self) -> f64 {
        self.inner.asymmetry
    }
    #[getter]
    fn loop_inductance(&self) -> f64 {
        self.inner.loop_inductance
    }
    #[getter]
    fn area_perturbation(&self) -> f64 {
        self.inner.area_perturbation
    }
    fn screening_beta(&self) -> f64 {
        self.inner.screening_beta()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "DriveConfig", from_py_object)]
#[derive(Clone)]
struct PyDriveConfig {
    inner: DriveConfig,
}

#[pymethods]
impl PyDriveConfig {
    #[new]
    #[pyo3(signature = (frequency=1e9, amplitude=0.9, bias=1e-3))]
    fn new(frequency: f64, amplitude: f64, bias: f64) -> PyResult<Self> {
        let inner = DriveConfig {
            frequency,
            amplitude,
            bias,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyDriveConfig { inner })
    }

    #[getter]
    fn frequency(&self) -> f64 {
        self.inner.frequency
    }
    #[getter]
    fn amplitude(&self) -> f64 {
        self.inner.amplitude
    }
    #[getter]
    fn bias(&self) -> f64 {
        self.inner.bias
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "SimGrid", from_py_object)]
#[derive(Clone)]
struct PySimGrid {
    inner: SimGrid,
}

#[pymethods]
impl PySimGrid {
    #[new]
    #[pyo3(signature = (steps_per_period=65536, periods_total=3, periods_transient=1, output_decimation=1))]
    fn new(
        steps_per_period: u32,
        periods_total: u32,
        periods_transient: u32,
        output_decimation: u32,
    ) -> PyResult<Self> {
        let inner = SimGrid::new(steps_per_period, periods_total, periods_transient)
            .and_then(|g| g.with_decimation(output_decimation))
            .map_err(to_py)?;
        Ok(PySimGrid { inner })
    }

    #[getter]
    fn steps_per_period(&self) -> u32 {
        self.inner.steps_per_period
    }
    #[getter]
    fn samples_per_period(&self) -> usize {
        self.inner.samples_per_period()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Uniformly sampled record: `t0 + i * dt` holds `values[i]`.
#[pyclass(name = "TimeSeries", skip_from_py_object)]
struct PyTimeSeries {
    inner: TimeSeries,
}

#[pymethods]
impl PyTimeSeries {
    #[new]
    #[pyo3(signature = (t0, dt, values, kind="voltage"))]
    fn new(t0: f64, dt: f64, values: Vec<f64>, kind: &str) -> PyResult<Self> {
        let kind = match kind {
            "voltage" => SeriesKind::Voltage,
            "phase" => SeriesKind::Phase,
            other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
        };
        Ok(PyTimeSeries {
            inner: TimeSeries::new(t0, dt, values, kind).map_err(to_py)?,
        })
    }

    #[getter]
    fn t0(&self) -> f64 {
        self.inner.t0
    }
    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }
    fn times(&self) -> Vec<f64> {
        (0..self.inner.len()).map(|i| self.inner.time(i)).collect()
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
fn effective_resistance(shunt: f64, load: f64, n: usize) -> f64 {
    ensemble::effective_resistance(shunt, load, n)
}

#[pyfunction]
fn external_flux(drive: &PyDriveConfig, area_perturbation: f64, tau: f64) -> f64 {
    dynamics::external_flux(&drive.inner, area_perturbation, tau)
}

#[pyfunction]
fn josephson_drive_term(phase: f64, flux_phase: f64, asymmetry: f64) -> f64 {
    dynamics::josephson_drive_term(phase, flux_phase, asymmetry)
}

/// Total flux in units of Phi_0 for the given phase and external flux.
#[pyfunction]
fn solve_total_flux(params: &PySquidParams, phase: f64, external: f64) -> PyResult<f64> {
    dynamics::solve_total_flux(&params.inner, phase, external).map_err(to_py)
}

/// Voltage across one SQUID over the retained window.
#[pyfunction]
#[pyo3(signature = (params, drive, grid, r_eff))]
fn simulate_squid(
    py: Python<'_>,
    params: &PySquidParams,
    drive: &PyDriveConfig,
    grid: &PySimGrid,
    r_eff: f64,
) -> PyResult<PyTimeSeries> {
    let (p, d, g) = (params.inner, drive.inner, grid.inner);
    let inner = py
        .detach(|| dynamics::simulate_squid(&p, &d, &g, r_eff))
        .map_err(to_py)?;
    Ok(PyTimeSeries { inner })
}

/// `[(k, f_Hz, P_W, parity), ...]` for k = 1..k_max.
#[pyfunction]
fn harmonic_power(
    series: &PyTimeSeries,
    drive_frequency: f64,
    k_max: usize,
    load_resistance: f64,
) -> PyResult<Vec<(usize, f64, f64, &'static str)>> {
    let s =
        spectrum::harmonic_power(&series.inner, drive_frequency, k_max, load_resistance).map_err(to_py)?;
    Ok(s.harmonics
        .iter()
        .map(|h| (h.k, h.frequency, h.power, h.parity.as_str()))
        .collect())
}

/// (peak_time_s, peak_V, fwhm_s, area_Wb, truncated)
type PulseRow = (f64, f64, f64, f64, bool);

#[pyfunction]
fn pulse_metrics(series: &PyTimeSeries, drive: &PyDriveConfig) -> PyResult<Vec<PulseRow>> {
    let pulses = voltage_pulse_metrics(&series.inner, &drive.inner).map_err(to_py)?;
    Ok(pulses
        .iter()
        .map(|p| (p.peak_time, p.peak_height, p.fwhm, p.signed_area, p.truncated))
        .collect())
}

/// `(exact, linearized)` switch time of the k-th node in seconds.
#[pyfunction]
fn predicted_switch_time(zeta: f64, drive: &PyDriveConfig, k: u32) -> PyResult<(f64, f64)> {
    let t = ensemble::predicted_switch_time(zeta, &drive.inner, k).map_err(to_py)?;
    Ok((t.exact, t.linearized))
}

#[pyfunction]
fn switch_time_spread(sigma: f64, drive: &PyDriveConfig) -> f64 {
    ensemble::switch_time_spread(sigma, &drive.inner)
}

#[pyfunction]
fn list_scenarios() -> Vec<&'static str> {
    ScenarioId::ids()
}

/// Runs a named scenario and returns its manifest as JSON text.
#[pyfunction]
#[pyo3(signature = (id, out_dir, quick=false, seed=None))]
fn run_scenario(
    py: Python<'_>,
    id: &str,
    out_dir: String,
    quick: bool,
    seed: Option<u64>,
) -> PyResult<String> {
    let id: ScenarioId = id.parse().map_err(to_py)?;
    let manifest = py
        .detach(|| scenario::run_scenario(id, &out_dir, ScenarioOptions { quick, seed }))
        .map_err(to_py)?;
    Ok(comb_forge::output::manifest_json(&manifest))
}

/// Runs a config given as JSON text plus `key=value` overrides.
#[pyfunction]
#[pyo3(signature = (config_json, out_dir, overrides=Vec::new()))]
fn simulate(py: Python<'_>, config_json: &str, out_dir: String, overrides: Vec<String>) -> PyResult<String> {
    let loaded = parse_config(config_json, "<python>", &overrides).map_err(to_py)?;
    let manifest = py
        .detach(|| scenario::run_config(&loaded, &out_dir))
        .map_err(to_py)?;
    Ok(comb_forge::output::manifest_json(&manifest))
}

#[pymodule]
#[pyo3(name = "comb_forge")]
fn comb_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FLUX_QUANTUM", comb_forge::FLUX_QUANTUM)?;
    m.add_class::<PySquidParams>()?;
    m.add_class::<PyDriveConfig>()?;
    m.add_class::<PySimGrid>()?;
    m.add_class::<PyTimeSeries>()?;
    m.add_function(wrap_pyfunction!(effective_resistance, m)?)?;
    m.add_function(wrap_pyfunction!(external_flux, m)?)?;
    m.add_function(wrap_pyfunction!(josephson_drive_term, m)?)?;
    m.add_function(wrap_pyfunction!(solve_total_flux, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_squid, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_power, m)?)?;
    m.add_function(wrap_pyfunction!(pulse_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_switch_time, m)?)?;
    m.add_function(wrap_pyfunction!(switch_time_spread, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
