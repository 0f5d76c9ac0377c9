//! Named figure-reproduction scenarios and the config-driven `simulate` run.
//!
//! Every scenario is a frozen overlay on the default [`RunConfig`] plus at
//! most one swept key. Outputs go to one directory together with the resolved
//! plan and a manifest listing each file with its SHA-256.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::config::{sha256_hex, LoadedConfig, OutputKind, RunConfig};
use crate::ensemble::{
    build_bins, build_grid, ensemble_spectrum, realization_spectrum, table_amplitudes, typical_voltage,
    BinTable, DisorderAxis,
};
use crate::error::{Error, Result};
use crate::output::{pulses_csv, spectrum_csv, table_csv, timeseries_csv, Manifest, OutputDir, VERSION};
use crate::params::TimeSeries;
use crate::pulses::voltage_pulse_metrics;
use crate::spectrum::{harmonic_power, Spectrum};

/// Realization count used by `--quick`.
pub const QUICK_REALIZATIONS: usize = 500;
const QUICK_WARNING: &str = "quick mode: 500 realizations, reduced-accuracy ensemble averages";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    Fig2InductancePulses,
    Fig3InductanceSpectrum,
    Fig4CapacitancePulses,
    Fig5AreaPulses,
    Fig6AreaSpectrum,
    Fig7AsymmetryPulses,
    Fig8RealisticSpectrum,
    NScalingSweep,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::Fig2InductancePulses,
        ScenarioId::Fig3InductanceSpectrum,
        ScenarioId::Fig4CapacitancePulses,
        ScenarioId::Fig5AreaPulses,
        ScenarioId::Fig6AreaSpectrum,
        ScenarioId::Fig7AsymmetryPulses,
        ScenarioId::Fig8RealisticSpectrum,
        ScenarioId::NScalingSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::Fig2InductancePulses => "fig2_inductance_pulses",
            ScenarioId::Fig3InductanceSpectrum => "fig3_inductance_spectrum",
            ScenarioId::Fig4CapacitancePulses => "fig4_capacitance_pulses",
            ScenarioId::Fig5AreaPulses => "fig5_area_pulses",
            ScenarioId::Fig6AreaSpectrum => "fig6_area_spectrum",
            ScenarioId::Fig7AsymmetryPulses => "fig7_asymmetry_pulses",
            ScenarioId::Fig8RealisticSpectrum => "fig8_realistic_spectrum",
            ScenarioId::NScalingSweep => "n_scaling_sweep",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ScenarioId::Fig2InductancePulses => "single-SQUID pulses for L_g in {0, 2, 5, 10} pH",
            ScenarioId::Fig3InductanceSpectrum => "array spectrum (N=50, 50 ohm) for L_g in {0, 2, 5, 10} pH",
            ScenarioId::Fig4CapacitancePulses => "single-SQUID pulses for C in {0, 0.1, 1, 2.5} pF",
            ScenarioId::Fig5AreaPulses => "typical array voltage for sigma_A in {0, 0.01, 0.02, 0.05}",
            ScenarioId::Fig6AreaSpectrum => "mean array spectrum for sigma_A in {0, 0.01, 0.02, 0.05}",
            ScenarioId::Fig7AsymmetryPulses => {
                "typical voltage and spectrum, r_0 = 0.01, sigma_r in {0, 0.0025, 0.005, 0.01}"
            }
            ScenarioId::Fig8RealisticSpectrum => {
                "L_g = 10 pH, sigma_A = 0.01, sigma_r = 0.005, r_0 = 0.01: single and mean spectra"
            }
            ScenarioId::NScalingSweep => "power at 20 GHz for N in {1, 2, 5, 50, 500}",
        }
    }

    pub fn ids() -> Vec<&'static str> {
        Self::ALL.iter().map(|s| s.as_str()).collect()
    }

    fn uses_ensemble(&self) -> bool {
        matches!(
            self,
            ScenarioId::Fig5AreaPulses
                | ScenarioId::Fig6AreaSpectrum
                | ScenarioId::Fig7AsymmetryPulses
                | ScenarioId::Fig8RealisticSpectrum
        )
    }

    /// The frozen config this scenario starts from.
    pub fn overlay(&self) -> RunConfig {
        let mut c = RunConfig::default();
        if self.uses_ensemble() {
            // bin tables hold one waveform per center; a 4096-point output grid
            // still resolves k = 200 with room to spare
            c.steps_per_period = 16_384;
            c.output_decimation = 4;
        }
        match self {
            ScenarioId::Fig7AsymmetryPulses => c.asymmetry = 0.01,
            ScenarioId::Fig8RealisticSpectrum => {
                c.loop_inductance_h = 10e-12;
                c.sigma_area = 0.01;
                c.sigma_asymmetry = 0.005;
                c.asymmetry = 0.01;
                // 51 x 51 cells fit the default budget of 10 000 simulations
                c.n_bins = 51;
            }
            _ => {}
        }
        c
    }

    /// Swept key and its values, if any.
    pub fn sweep(&self) -> Option<(&'static str, &'static [f64])> {
        const LG: &[f64] = &[0.0, 2e-12, 5e-12, 10e-12];
        const CAP: &[f64] = &[0.0, 100e-15, 1e-12, 2.5e-12];
        const SIGMA_A: &[f64] = &[0.0, 0.01, 0.02, 0.05];
        const SIGMA_R: &[f64] = &[0.0, 0.0025, 0.005, 0.01];
        const N: &[f64] = &[1.0, 2.0, 5.0, 50.0, 500.0];
        match self {
            ScenarioId::Fig2InductancePulses | ScenarioId::Fig3InductanceSpectrum => {
                Some(("loop_inductance_H", LG))
            }
            ScenarioId::Fig4CapacitancePulses => Some(("junction_capacitance_F", CAP)),
            ScenarioId::Fig5AreaPulses | ScenarioId::Fig6AreaSpectrum => Some(("sigma_area", SIGMA_A)),
            ScenarioId::Fig7AsymmetryPulses => Some(("sigma_asymmetry", SIGMA_R)),
            ScenarioId::Fig8RealisticSpectrum => None,
            ScenarioId::NScalingSweep => Some(("n_squids", N)),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownScenario {
                given: s.to_string(),
                valid: Self::ids().join(", "),
            })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScenarioOptions {
    pub quick: bool,
    pub seed: Option<u64>,
}

/// Everything that determines a scenario's outputs. Its canonical JSON is
/// what the manifest hash covers.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioPlan {
    pub scenario: ScenarioId,
    pub version: &'static str,
    pub quick: bool,
    pub base: RunConfig,
    pub sweep_key: Option<&'static str>,
    pub sweep_values: Vec<f64>,
}

impl ScenarioPlan {
    pub fn new(id: ScenarioId, options: ScenarioOptions) -> Self {
        let mut base = id.overlay();
        if let Some(seed) = options.seed {
            base.seed = seed;
        }
        if options.quick && id.uses_ensemble() {
            base.n_realizations = QUICK_REALIZATIONS;
        }
        let (sweep_key, sweep_values) = match id.sweep() {
            Some((k, v)) => (Some(k), v.to_vec()),
            None => (None, Vec::new()),
        };
        ScenarioPlan {
            scenario: id,
            version: VERSION,
            quick: options.quick,
            base,
            sweep_key,
            sweep_values,
        }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("plan serializes").as_bytes())
    }

    /// Configs for each sweep point, paired with a file-name label.
    pub fn points(&self) -> Result<Vec<(String, RunConfig)>> {
        let Some(key) = self.sweep_key else {
            return Ok(vec![(String::new(), self.base.clone())]);
        };
        self.sweep_values
            .iter()
            .map(|&x| {
                let mut c = self.base.clone();
                let label = match key {
                    "loop_inductance_H" => {
                        c.loop_inductance_h = x;
                        format!("Lg_{}pH", (x * 1e12).round())
                    }
                    "junction_capacitance_F" => {
                        c.junction_capacitance_f = x;
                        format!("C_{}fF", (x * 1e15).round())
                    }
                    "sigma_area" => {
                        c.sigma_area = x;
                        format!("sigmaA_{x:.4}")
                    }
                    "sigma_asymmetry" => {
                        c.sigma_asymmetry = x;
                        format!("sigmaR_{x:.4}")
                    }
                    "n_squids" => {
                        c.n_squids = x as usize;
                        format!("N_{}", x as usize)
                    }
                    _ => unreachable!("sweep keys are fixed"),
                };
                c.validate()?;
                Ok((label, c))
            })
            .collect()
    }
}

/// Runs a named scenario, writing its CSVs and `manifest.json` into `out_dir`.
pub fn run_scenario(id: ScenarioId, out_dir: impl AsRef<Path>, options: ScenarioOptions) -> Result<Manifest> {
    let started = Instant::now();
    let plan = ScenarioPlan::new(id, options);
    let points = plan.points()?;
    let mut out = OutputDir::create(out_dir)?;
    out.write_json("scenario_config.json", &plan)?;

    let mut warnings: Vec<String> = Vec::new();
    if options.quick && id.uses_ensemble() {
        warnings.push(QUICK_WARNING.to_string());
    }
    for (_, c) in &points {
        for w in c.warnings() {
            if !warnings.iter().any(|x| x == w) {
                warnings.push(w.to_string());
            }
        }
    }

    match id {
        ScenarioId::Fig2InductancePulses | ScenarioId::Fig4CapacitancePulses => {
            let mut rows = Vec::new();
            for (label, c) in &points {
                let array = c.array();
                let v = crate::dynamics::simulate_squid(
                    &c.squid(),
                    &c.drive(),
                    &c.grid(),
                    array.effective_resistance(),
                )?;
                let pulses = voltage_pulse_metrics(&v, &c.drive())?;
                out.write(&format!("waveform_{label}.csv"), &timeseries_csv(&v))?;
                out.write(&format!("pulses_{label}.csv"), &pulses_csv(&pulses))?;
                rows.push(summary_row(
                    c,
                    id,
                    &pulses[0],
                    v.values.iter().copied().fold(f64::INFINITY, f64::min),
                ));
            }
            let key = plan.sweep_key.expect("swept");
            out.write(
                "pulse_summary.csv",
                &table_csv(
                    &[key, "peak_time_s", "peak_V", "fwhm_s", "area_Wb", "min_V"],
                    &rows,
                ),
            )?;
        }
        ScenarioId::Fig3InductanceSpectrum => {
            for (label, c) in &points {
                let v = c.array().ideal_voltage()?;
                let s = harmonic_power(&v, c.drive_frequency_hz, c.k_max, c.load_resistance_ohm)?;
                out.write(&format!("spectrum_{label}.csv"), &spectrum_csv(&s))?;
            }
        }
        ScenarioId::Fig5AreaPulses | ScenarioId::Fig6AreaSpectrum | ScenarioId::Fig7AsymmetryPulses => {
            let axis = if id == ScenarioId::Fig7AsymmetryPulses {
                DisorderAxis::Asymmetry
            } else {
                DisorderAxis::Area
            };
            let pulses_wanted = id != ScenarioId::Fig6AreaSpectrum;
            let spectrum_wanted = id != ScenarioId::Fig5AreaPulses;
            for (label, c) in &points {
                let (spec, array) = (c.disorder(), c.array());
                let table = build_bins(axis, &spec, &array)?;
                if pulses_wanted {
                    let typical = typical_voltage(&table, &spec, &array).typical_voltage;
                    out.write(&format!("waveform_{label}.csv"), &timeseries_csv(&typical))?;
                    let pulses = voltage_pulse_metrics(&typical, &c.drive())?;
                    out.write(&format!("pulses_{label}.csv"), &pulses_csv(&pulses))?;
                }
                if spectrum_wanted {
                    let summary = ensemble_spectrum(&table, &spec, &array, c.k_max)?;
                    out.write(&format!("spectrum_{label}.csv"), &spectrum_csv(&summary.mean))?;
                }
            }
        }
        ScenarioId::Fig8RealisticSpectrum => {
            let c = &points[0].1;
            let (spec, array) = (c.disorder(), c.array());
            let table = build_grid(&spec, &array, c.bin_budget)?;
            let typical = typical_voltage(&table, &spec, &array).typical_voltage;
            out.write("waveform_typical.csv", &timeseries_csv(&typical))?;
            let single = single_realization_spectrum(&table, c, 0)?;
            out.write("spectrum_single.csv", &spectrum_csv(&single))?;
            let summary = ensemble_spectrum(&table, &spec, &array, c.k_max)?;
            out.write("spectrum_ensemble.csv", &spectrum_csv(&summary.mean))?;
            out.write(
                "spectrum_ensemble_std.csv",
                &std_csv(&summary.mean, &summary.std_dev),
            )?;
        }
        ScenarioId::NScalingSweep => {
            let mut rows = Vec::new();
            for (label, c) in &points {
                let array = c.array();
                let v = array.ideal_voltage()?;
                let s = harmonic_power(&v, c.drive_frequency_hz, c.k_max, c.load_resistance_ohm)?;
                out.write(&format!("spectrum_{label}.csv"), &spectrum_csv(&s))?;
                rows.push(vec![
                    c.n_squids as f64,
                    array.effective_resistance(),
                    s.power(20),
                    mean_square(&v) / c.load_resistance_ohm,
                ]);
            }
            out.write(
                "n_scaling.csv",
                &table_csv(&["N", "R_eff_ohm", "P20_W", "P_total_W"], &rows),
            )?;
        }
    }

    out.finish(Manifest {
        name: id.as_str().to_string(),
        version: VERSION.to_string(),
        config_sha256: plan.sha256(),
        seed: plan.base.seed,
        quick: options.quick,
        warnings,
        runtime_seconds: started.elapsed().as_secs_f64(),
        files: Vec::new(),
    })
}

fn summary_row(c: &RunConfig, id: ScenarioId, p: &crate::pulses::PulseMetrics, min_v: f64) -> Vec<f64> {
    let x = match id {
        ScenarioId::Fig4CapacitancePulses => c.junction_capacitance_f,
        _ => c.loop_inductance_h,
    };
    vec![x, p.peak_time, p.peak_height, p.fwhm, p.signed_area, min_v]
}

fn mean_square(v: &TimeSeries) -> f64 {
    v.values.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

fn std_csv(mean: &Spectrum, std_dev: &[f64]) -> String {
    let rows: Vec<Vec<f64>> = mean
        .harmonics
        .iter()
        .zip(std_dev)
        .map(|(h, s)| vec![h.k as f64, h.frequency, h.power, *s])
        .collect();
    table_csv(&["k", "f_Hz", "P_mean_W", "P_std_W"], &rows)
}

fn single_realization_spectrum(table: &BinTable, c: &RunConfig, realization: u64) -> Result<Spectrum> {
    let amplitudes = table_amplitudes(table, c.drive_frequency_hz, c.k_max)?;
    Ok(realization_spectrum(
        table,
        &amplitudes,
        &c.disorder(),
        &c.array(),
        realization,
    ))
}

/// Runs a loaded config: the ideal array when there is no disorder, otherwise
/// the binned ensemble (both axes at once when both spreads are nonzero).
pub fn run_config(loaded: &LoadedConfig, out_dir: impl AsRef<Path>) -> Result<Manifest> {
    let started = Instant::now();
    let c = &loaded.config;
    c.validate()?;
    let mut out = OutputDir::create(out_dir)?;
    out.write_json("resolved_config.json", &loaded.echo())?;
    let wants = |k: OutputKind| c.outputs.contains(&k);
    let array = c.array();

    if !c.is_disordered() {
        let v = array.ideal_voltage()?;
        if wants(OutputKind::Waveform) {
            out.write("waveform.csv", &timeseries_csv(&v))?;
        }
        if wants(OutputKind::Spectrum) {
            let s = harmonic_power(&v, c.drive_frequency_hz, c.k_max, c.load_resistance_ohm)?;
            out.write("spectrum.csv", &spectrum_csv(&s))?;
        }
        if wants(OutputKind::Pulses) {
            out.write("pulses.csv", &pulses_csv(&voltage_pulse_metrics(&v, &c.drive())?))?;
        }
    } else {
        let spec = c.disorder();
        let table = if c.sigma_area > 0.0 && c.sigma_asymmetry > 0.0 {
            build_grid(&spec, &array, c.bin_budget)?
        } else if c.sigma_area > 0.0 {
            build_bins(DisorderAxis::Area, &spec, &array)?
        } else {
            build_bins(DisorderAxis::Asymmetry, &spec, &array)?
        };
        let typical = typical_voltage(&table, &spec, &array).typical_voltage;
        if wants(OutputKind::Waveform) {
            out.write("waveform.csv", &timeseries_csv(&typical))?;
        }
        if wants(OutputKind::Spectrum) {
            let summary = ensemble_spectrum(&table, &spec, &array, c.k_max)?;
            out.write("spectrum.csv", &spectrum_csv(&summary.mean))?;
            out.write("spectrum_std.csv", &std_csv(&summary.mean, &summary.std_dev))?;
            out.write(
                "spectrum_single.csv",
                &spectrum_csv(&single_realization_spectrum(&table, c, 0)?),
            )?;
        }
        if wants(OutputKind::Pulses) {
            out.write(
                "pulses.csv",
                &pulses_csv(&voltage_pulse_metrics(&typical, &c.drive())?),
            )?;
        }
    }

    out.finish(Manifest {
        name: "simulate".to_string(),
        version: VERSION.to_string(),
        config_sha256: c.sha256(),
        seed: c.seed,
        quick: false,
        warnings: c.warnings().into_iter().map(String::from).collect(),
        runtime_seconds: started.elapsed().as_secs_f64(),
        files: Vec::new(),
    })
}
