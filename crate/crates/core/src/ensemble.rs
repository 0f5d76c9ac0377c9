//! Series arrays, load coupling and fabrication disorder.
//!
//! Each SQUID in a series array sees the effective shunt `R R_L / (R_L + N R)`
//! and otherwise evolves independently, so the array voltage is the sum of the
//! single-SQUID voltages. Disorder on the loop area (`zeta_A`) and on the
//! junction asymmetry (`r = r_0 + zeta_r`) is handled by binning: the 8-sigma
//! window of each disordered axis is cut into equal bins, one SQUID is
//! simulated per bin center, and every Gaussian draw is mapped to the waveform
//! of the nearest center.

use std::f64::consts::PI;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dynamics::simulate_squid;
use crate::error::{Error, Result};
use crate::params::{DriveConfig, SeriesKind, SimGrid, SquidParams, TimeSeries};
use crate::spectrum::{harmonic_amplitudes, Complex, Spectrum};

/// Half-width of the binned window, in standard deviations.
pub const WINDOW_SIGMAS: f64 = 4.0;
pub const DEFAULT_BIN_BUDGET: usize = 10_000;

/// Shunt resistance seen by each SQUID of an `n`-element array driving `r_load`.
pub fn effective_resistance(shunt: f64, r_load: f64, n: usize) -> f64 {
    shunt * r_load / (r_load + n as f64 * shunt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_squids: usize,
    pub load_resistance: f64,
    pub base: SquidParams,
    pub drive: DriveConfig,
    pub grid: SimGrid,
}

impl ArrayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_squids == 0 {
            return Err(Error::invalid("n_squids", "N >= 1 required"));
        }
        if !(self.load_resistance > 0.0 && self.load_resistance.is_finite()) {
            return Err(Error::invalid("load_resistance", "R_L > 0 required"));
        }
        self.base.validate()?;
        self.drive.validate()?;
        self.grid.validate()
    }

    /// Effective shunt from the nominal R; junction disorder never changes it.
    pub fn effective_resistance(&self) -> f64 {
        effective_resistance(self.base.shunt_resistance, self.load_resistance, self.n_squids)
    }

    /// Voltage of the ideal array, N times the nominal SQUID.
    pub fn ideal_voltage(&self) -> Result<TimeSeries> {
        self.validate()?;
        let v = simulate_squid(&self.base, &self.drive, &self.grid, self.effective_resistance())?;
        Ok(v.scaled(self.n_squids as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub sigma_area: f64,
    pub sigma_asymmetry: f64,
    /// Preferential asymmetry r_0 around which r is drawn.
    pub preferential_asymmetry: f64,
    pub n_bins: usize,
    pub n_realizations: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub const DEFAULT_BINS: usize = 201;
    pub const DEFAULT_REALIZATIONS: usize = 10_000;
    pub const DEFAULT_SEED: u64 = 2016;

    pub fn none() -> Self {
        DisorderSpec {
            sigma_area: 0.0,
            sigma_asymmetry: 0.0,
            preferential_asymmetry: 0.0,
            n_bins: Self::DEFAULT_BINS,
            n_realizations: Self::DEFAULT_REALIZATIONS,
            seed: Self::DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_area >= 0.0 && self.sigma_area.is_finite()) {
            return Err(Error::invalid("sigma_area", "sigma_A >= 0 required"));
        }
        if !(self.sigma_asymmetry >= 0.0 && self.sigma_asymmetry.is_finite()) {
            return Err(Error::invalid("sigma_asymmetry", "sigma_r >= 0 required"));
        }
        if !(self.preferential_asymmetry.abs() + WINDOW_SIGMAS * self.sigma_asymmetry < 1.0) {
            return Err(Error::invalid(
                "sigma_asymmetry",
                "|r_0| + 4 sigma_r < 1 required",
            ));
        }
        if !(1.0 - WINDOW_SIGMAS * self.sigma_area > 0.0) {
            return Err(Error::invalid("sigma_area", "1 - 4 sigma_A > 0 required"));
        }
        if self.n_bins == 0 {
            return Err(Error::invalid("n_bins", "n_bins >= 1 required"));
        }
        if self.n_realizations == 0 {
            return Err(Error::invalid("n_realizations", "N_real >= 1 required"));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<&'static str> {
        if self.n_realizations < Self::DEFAULT_REALIZATIONS
            && (self.sigma_area > 0.0 || self.sigma_asymmetry > 0.0)
        {
            vec!["reduced realization count: ensemble averages carry extra sampling noise"]
        } else {
            Vec::new()
        }
    }

    pub fn sigma(&self, axis: DisorderAxis) -> f64 {
        match axis {
            DisorderAxis::Area => self.sigma_area,
            DisorderAxis::Asymmetry => self.sigma_asymmetry,
        }
    }
}

impl Default for DisorderSpec {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderAxis {
    Area,
    Asymmetry,
}

impl DisorderAxis {
    fn index(self) -> u128 {
        match self {
            DisorderAxis::Area => 0,
            DisorderAxis::Asymmetry => 1,
        }
    }
}

/// Switch time of a SQUID with area deviation `zeta`, for node crossing `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchTime {
    pub exact: f64,
    pub linearized: f64,
}

/// Instant at which `(1 + zeta)(1 - eps cos 2 pi nu t) / 2` crosses one half
/// for the k-th time. Even crossings happen on the rising flux and move earlier
/// for larger loops; odd crossings happen on the falling flux and move later.
pub fn predicted_switch_time(zeta: f64, drive: &DriveConfig, k: u32) -> Result<SwitchTime> {
    let argument = zeta / (drive.amplitude * (1.0 + zeta));
    if !(argument.abs() <= 1.0) {
        return Err(Error::OutOfRange { argument });
    }
    let two_pi_nu = 2.0 * PI * drive.frequency;
    let t_k = drive.node_time(k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(SwitchTime {
        exact: t_k - sign * argument.asin() / two_pi_nu,
        linearized: t_k - sign * zeta / (two_pi_nu * drive.amplitude),
    })
}

/// Standard deviation of switch times for area spread `sigma`: sigma / (2 pi eps nu).
pub fn switch_time_spread(sigma: f64, drive: &DriveConfig) -> f64 {
    sigma / (2.0 * PI * drive.amplitude * drive.frequency)
}

/// Midpoints of `n_bins` equal bins over `[-4 sigma, 4 sigma]`; a single zero
/// center when `sigma == 0`.
pub fn bin_centers(sigma: f64, n_bins: usize) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![0.0];
    }
    let width = 2.0 * WINDOW_SIGMAS * sigma / n_bins as f64;
    (0..n_bins)
        .map(|i| -WINDOW_SIGMAS * sigma + (i as f64 + 0.5) * width)
        .collect()
}

/// Index of the bin containing `zeta`; draws beyond the window go to the
/// outermost bin.
fn nearest_bin(zeta: f64, sigma: f64, n_bins: usize) -> usize {
    if n_bins == 1 || sigma == 0.0 {
        return 0;
    }
    let width = 2.0 * WINDOW_SIGMAS * sigma / n_bins as f64;
    let pos = ((zeta + WINDOW_SIGMAS * sigma) / width).floor();
    if pos <= 0.0 {
        0
    } else {
        (pos as usize).min(n_bins - 1)
    }
}

/// Standard normal draw for one SQUID of one realization, from a ChaCha stream
/// keyed by `(seed, realization)` at a position fixed by `(squid, axis)`.
pub fn standard_normal(seed: u64, realization: u64, squid: u64, axis: DisorderAxis) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng.set_word_pos((squid as u128 * 2 + axis.index()) * 2);
    let bits = rng.next_u64() >> 11;
    let u = (bits as f64 + 0.5) / (1u64 << 53) as f64;
    Normal::standard().inverse_cdf(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Area,
    Asymmetry,
    Combined,
}

/// Precomputed single-SQUID waveforms on an (area x asymmetry) grid of bin
/// centers. A disordered axis carries `n_bins` centers, an ordered one the
/// single center 0.
#[derive(Debug, Clone)]
pub struct BinTable {
    pub kind: TableKind,
    pub sigma_area: f64,
    pub sigma_asymmetry: f64,
    pub area_centers: Vec<f64>,
    pub asymmetry_centers: Vec<f64>,
    /// Row-major: `waveforms[ia * asymmetry_centers.len() + ir]`.
    pub waveforms: Vec<TimeSeries>,
}

impl BinTable {
    pub fn len(&self) -> usize {
        self.waveforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waveforms.is_empty()
    }

    /// Bin centers along the table's disordered axis (area for combined tables).
    pub fn centers(&self) -> &[f64] {
        match self.kind {
            TableKind::Asymmetry => &self.asymmetry_centers,
            _ => &self.area_centers,
        }
    }

    pub fn cell(&self, zeta_area: f64, zeta_asymmetry: f64) -> usize {
        let ia = nearest_bin(zeta_area, self.sigma_area, self.area_centers.len());
        let ir = nearest_bin(zeta_asymmetry, self.sigma_asymmetry, self.asymmetry_centers.len());
        ia * self.asymmetry_centers.len() + ir
    }

    /// Sample-wise sum of the waveforms in `cells`, in the given order.
    pub fn sum_cells(&self, cells: &[usize]) -> TimeSeries {
        let template = &self.waveforms[0];
        let mut values = vec![0.0; template.len()];
        for &c in cells {
            for (acc, v) in values.iter_mut().zip(&self.waveforms[c].values) {
                *acc += v;
            }
        }
        TimeSeries {
            values,
            ..template.clone()
        }
    }
}

fn build_table(
    kind: TableKind,
    sigma_area: f64,
    sigma_asymmetry: f64,
    spec: &DisorderSpec,
    config: &ArrayConfig,
) -> Result<BinTable> {
    config.validate()?;
    spec.validate()?;
    let area_centers = bin_centers(sigma_area, spec.n_bins);
    let asymmetry_centers = bin_centers(sigma_asymmetry, spec.n_bins);
    let r_eff = config.effective_resistance();
    let n_r = asymmetry_centers.len();
    let cells: Vec<(f64, f64)> = area_centers
        .iter()
        .flat_map(|&a| asymmetry_centers.iter().map(move |&r| (a, r)))
        .collect();
    let waveforms = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(za, zr))| {
            let mut params = config.base;
            params.area_perturbation = config.base.area_perturbation + za;
            if sigma_asymmetry > 0.0 {
                params.asymmetry = spec.preferential_asymmetry + zr;
            }
            simulate_squid(&params, &config.drive, &config.grid, r_eff).map_err(|e| Error::Bin {
                index,
                center: if n_r > 1 { zr } else { za },
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinTable {
        kind,
        sigma_area,
        sigma_asymmetry,
        area_centers,
        asymmetry_centers,
        waveforms,
    })
}

/// Simulates one SQUID per bin center along `axis`. The area axis keeps the
/// nominal asymmetry; the asymmetry axis uses `r = r_0 + center`.
pub fn build_bins(axis: DisorderAxis, spec: &DisorderSpec, config: &ArrayConfig) -> Result<BinTable> {
    match axis {
        DisorderAxis::Area => build_table(TableKind::Area, spec.sigma_area, 0.0, spec, config),
        DisorderAxis::Asymmetry => build_table(TableKind::Asymmetry, 0.0, spec.sigma_asymmetry, spec, config),
    }
}

/// Two-axis table for simultaneous area and asymmetry disorder.
pub fn build_grid(spec: &DisorderSpec, config: &ArrayConfig, budget: usize) -> Result<BinTable> {
    let n_a = bin_centers(spec.sigma_area, spec.n_bins).len();
    let n_r = bin_centers(spec.sigma_asymmetry, spec.n_bins).len();
    if n_a * n_r > budget {
        return Err(Error::BudgetExceeded {
            required: n_a * n_r,
            cap: budget,
        });
    }
    build_table(
        TableKind::Combined,
        spec.sigma_area,
        spec.sigma_asymmetry,
        spec,
        config,
    )
}

/// Table cells drawn for the `n` SQUIDs of one realization.
pub fn realization_cells(table: &BinTable, spec: &DisorderSpec, n: usize, realization: u64) -> Vec<usize> {
    (0..n as u64)
        .map(|i| {
            let za = if table.sigma_area > 0.0 {
                table.sigma_area * standard_normal(spec.seed, realization, i, DisorderAxis::Area)
            } else {
                0.0
            };
            let zr = if table.sigma_asymmetry > 0.0 {
                table.sigma_asymmetry * standard_normal(spec.seed, realization, i, DisorderAxis::Asymmetry)
            } else {
                0.0
            };
            table.cell(za, zr)
        })
        .collect()
}

/// Array voltage of one disorder realization: the sum of the N drawn waveforms.
pub fn sample_realization(table: &BinTable, spec: &DisorderSpec, n: usize, realization: u64) -> TimeSeries {
    table.sum_cells(&realization_cells(table, spec, n, realization))
}

/// Realization of an array with both area and asymmetry disorder.
pub fn combined_disorder_realization(
    spec: &DisorderSpec,
    config: &ArrayConfig,
    realization: u64,
) -> Result<TimeSeries> {
    let grid = build_grid(spec, config, DEFAULT_BIN_BUDGET)?;
    Ok(sample_realization(&grid, spec, config.n_squids, realization))
}

/// Per-harmonic mean and standard deviation across realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub mean: Spectrum,
    pub std_dev: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub typical_voltage: TimeSeries,
    pub spectrum_summary: Option<SpectrumSummary>,
    pub seed: u64,
    pub n_realizations: usize,
    pub n_squids: usize,
    pub kind: TableKind,
}

/// Occupation count of each table cell, summed over all realizations.
fn cell_counts(table: &BinTable, spec: &DisorderSpec, n: usize) -> Vec<u64> {
    let per_realization: Vec<Vec<usize>> = (0..spec.n_realizations as u64)
        .into_par_iter()
        .map(|j| realization_cells(table, spec, n, j))
        .collect();
    let mut counts = vec![0u64; table.len()];
    for cells in &per_realization {
        for &c in cells {
            counts[c] += 1;
        }
    }
    counts
}

/// Ensemble-average array voltage over `spec.n_realizations` realizations.
///
/// The average of the realization sums equals the count-weighted sum of the
/// bin waveforms; counts are integers, so the result does not depend on how
/// realizations are scheduled.
pub fn typical_voltage(table: &BinTable, spec: &DisorderSpec, config: &ArrayConfig) -> EnsembleResult {
    let counts = cell_counts(table, spec, config.n_squids);
    let template = &table.waveforms[0];
    let mut values = vec![0.0; template.len()];
    let n_real = spec.n_realizations as f64;
    for (cell, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let weight = count as f64 / n_real;
        for (acc, v) in values.iter_mut().zip(&table.waveforms[cell].values) {
            *acc += weight * v;
        }
    }
    EnsembleResult {
        typical_voltage: TimeSeries {
            values,
            kind: SeriesKind::Voltage,
            ..template.clone()
        },
        spectrum_summary: None,
        seed: spec.seed,
        n_realizations: spec.n_realizations,
        n_squids: config.n_squids,
        kind: table.kind,
    }
}

/// Harmonic amplitudes of every table waveform, `[cell][k - 1]`.
pub fn table_amplitudes(table: &BinTable, drive_frequency: f64, k_max: usize) -> Result<Vec<Vec<Complex>>> {
    table
        .waveforms
        .iter()
        .map(|w| harmonic_amplitudes(w, drive_frequency, k_max))
        .collect()
}

/// Spectrum of one realization, assembled from per-cell harmonic amplitudes
/// (the transform is linear, so this equals the spectrum of the summed record).
pub fn realization_spectrum(
    table: &BinTable,
    amplitudes: &[Vec<Complex>],
    spec: &DisorderSpec,
    config: &ArrayConfig,
    realization: u64,
) -> Spectrum {
    let k_max = amplitudes[0].len();
    let mut acc = vec![Complex::default(); k_max];
    for c in realization_cells(table, spec, config.n_squids, realization) {
        for (a, x) in acc.iter_mut().zip(&amplitudes[c]) {
            *a += *x;
        }
    }
    Spectrum::from_amplitudes(
        &acc,
        config.drive.frequency,
        table.waveforms[0].duration(),
        config.load_resistance,
    )
}

/// Mean power spectrum over all realizations, with per-harmonic spread.
pub fn ensemble_spectrum(
    table: &BinTable,
    spec: &DisorderSpec,
    config: &ArrayConfig,
    k_max: usize,
) -> Result<SpectrumSummary> {
    let amplitudes = table_amplitudes(table, config.drive.frequency, k_max)?;
    let spectra: Vec<Spectrum> = (0..spec.n_realizations as u64)
        .into_par_iter()
        .map(|j| realization_spectrum(table, &amplitudes, spec, config, j))
        .collect();
    let mean = crate::spectrum::average_spectrum(&spectra)?;
    let n = spectra.len() as f64;
    let std_dev = (0..k_max)
        .map(|i| {
            let m = mean.harmonics[i].power;
            let var = spectra
                .iter()
                .map(|s| (s.harmonics[i].power - m).powi(2))
                .sum::<f64>()
                / n;
            var.sqrt()
        })
        .collect();
    Ok(SpectrumSummary { mean, std_dev })
}

/// Typical voltage together with the averaged spectrum.
pub fn run_ensemble(
    table: &BinTable,
    spec: &DisorderSpec,
    config: &ArrayConfig,
    k_max: usize,
) -> Result<EnsembleResult> {
    let mut result = typical_voltage(table, spec, config);
    result.spectrum_summary = Some(ensemble_spectrum(table, spec, config, k_max)?);
    Ok(result)
}
