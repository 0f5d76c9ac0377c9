//! Physical parameter records and the simulation grid.
//!
//! Everything here is plain data plus validation. Internal dynamics work in
//! dimensionless units (time `tau = 2 pi nu t`, flux in units of the flux
//! quantum, currents in units of `I_+`); SI values only appear in these records
//! and in the [`TimeSeries`] produced at the end of a run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetic flux quantum h/2e in webers.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    flux_quantum: f64,
}

impl PhysicalConstants {
    pub const fn new() -> Self {
        PhysicalConstants {
            flux_quantum: FLUX_QUANTUM,
        }
    }

    pub fn flux_quantum(&self) -> f64 {
        self.flux_quantum
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// Electrical identity of one dc SQUID.
///
/// The per-junction critical current is `I_+ / 2` (symmetric-junction
/// convention of the screening equation) and is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidParams {
    /// Shunt resistance R in ohms.
    pub shunt_resistance: f64,
    /// Junction capacitance C in farads.
    pub junction_capacitance: f64,
    /// Sum of the two junction critical currents I_+ in amperes.
    pub critical_current_sum: f64,
    /// Asymmetry r = (I_c1 - I_c2) / (I_c1 + I_c2).
    pub asymmetry: f64,
    /// Geometrical loop inductance L_g in henries.
    pub loop_inductance: f64,
    /// Relative area deviation zeta_A; the loop area is A_0 (1 + zeta_A).
    pub area_perturbation: f64,
}

impl SquidParams {
    /// Nb/AlOx/Nb junction values used throughout: R = 20 ohm, I_+ = 100 uA,
    /// symmetric, no capacitance or loop inductance.
    pub fn niobium() -> Self {
        SquidParams {
            shunt_resistance: 20.0,
            junction_capacitance: 0.0,
            critical_current_sum: 100e-6,
            asymmetry: 0.0,
            loop_inductance: 0.0,
            area_perturbation: 0.0,
        }
    }

    pub fn junction_critical_current(&self) -> f64 {
        0.5 * self.critical_current_sum
    }

    /// Screening strength L_g I_0 / Phi_0 (flux-quantum units).
    pub fn screening(&self) -> f64 {
        self.loop_inductance * self.junction_critical_current() / FLUX_QUANTUM
    }

    /// Contraction constant of the screening fixed point, pi L_g I_0 / Phi_0.
    pub fn screening_beta(&self) -> f64 {
        PI * self.screening()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shunt_resistance > 0.0 && self.shunt_resistance.is_finite()) {
            return Err(Error::invalid("shunt_resistance", "R > 0 required"));
        }
        if !(self.critical_current_sum > 0.0 && self.critical_current_sum.is_finite()) {
            return Err(Error::invalid("critical_current_sum", "I_+ > 0 required"));
        }
        if !(self.junction_capacitance >= 0.0 && self.junction_capacitance.is_finite()) {
            return Err(Error::invalid("junction_capacitance", "C >= 0 required"));
        }
        if !(self.loop_inductance >= 0.0 && self.loop_inductance.is_finite()) {
            return Err(Error::invalid("loop_inductance", "L_g >= 0 required"));
        }
        if !(self.asymmetry.abs() < 1.0) {
            return Err(Error::invalid("asymmetry", "|r| < 1 required"));
        }
        if !(1.0 + self.area_perturbation > 0.0) {
            return Err(Error::invalid("area_perturbation", "1 + zeta_A > 0 required"));
        }
        Ok(())
    }
}

impl Default for SquidParams {
    fn default() -> Self {
        Self::niobium()
    }
}

/// Sinusoidal flux drive and dc bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Drive frequency nu in hertz.
    pub frequency: f64,
    /// Relative flux oscillation amplitude epsilon.
    pub amplitude: f64,
    /// Dimensionless bias delta = I_B / I_+.
    pub bias: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::invalid("frequency", "nu > 0 required"));
        }
        // epsilon = 0 is the degenerate no-crossing drive; accepted and flagged.
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(Error::invalid("amplitude", "0 <= epsilon <= 1 required"));
        }
        if !(0.0..1.0).contains(&self.bias) {
            return Err(Error::invalid("bias", "0 <= delta < 1 required"));
        }
        Ok(())
    }

    /// Flags for degenerate but accepted drives.
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.amplitude == 0.0 {
            out.push("zero drive amplitude: flux never reaches a node, no pulses");
        }
        if self.bias == 0.0 {
            out.push("zero bias current: phase jumps have no preferred direction");
        }
        out
    }

    /// Bias current I_B = delta I_+ in amperes.
    pub fn bias_current(&self, params: &SquidParams) -> f64 {
        self.bias * params.critical_current_sum
    }

    /// Node-crossing time t_k = (2k + 1) / (4 nu).
    pub fn node_time(&self, k: u32) -> f64 {
        (2 * k + 1) as f64 / (4.0 * self.frequency)
    }
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            frequency: 1e9,
            amplitude: 0.9,
            bias: 1e-3,
        }
    }
}

/// Dimensionless time grid. One drive period spans `tau = 2 pi` and is cut into
/// an integer number of steps, so every record is commensurate with the drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimGrid {
    pub steps_per_period: u32,
    pub periods_total: u32,
    pub periods_transient: u32,
    /// Keep every n-th grid point in the output record. The voltage at a kept
    /// point is the backward difference over the kept spacing, so pulse areas
    /// are preserved exactly.
    pub output_decimation: u32,
}

impl SimGrid {
    pub const DEFAULT_STEPS_PER_PERIOD: u32 = 65_536;

    pub fn new(steps_per_period: u32, periods_total: u32, periods_transient: u32) -> Result<Self> {
        let grid = SimGrid {
            steps_per_period,
            periods_total,
            periods_transient,
            output_decimation: 1,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Builds a grid from a step size, which must divide 2 pi to one part in 1e9.
    pub fn from_step(d_tau: f64, periods_total: u32, periods_transient: u32) -> Result<Self> {
        if !(d_tau > 0.0 && d_tau.is_finite()) {
            return Err(Error::InvalidGrid(format!("d_tau = {d_tau} must be > 0")));
        }
        let ratio = 2.0 * PI / d_tau;
        let steps = ratio.round();
        if steps < 1.0 || steps > u32::MAX as f64 || ((ratio - steps) / steps).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!(
                "d_tau = {d_tau} does not divide 2 pi (2 pi / d_tau = {ratio})"
            )));
        }
        Self::new(steps as u32, periods_total, periods_transient)
    }

    pub fn with_decimation(mut self, decimation: u32) -> Result<Self> {
        self.output_decimation = decimation;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period == 0 {
            return Err(Error::InvalidGrid("steps_per_period must be > 0".into()));
        }
        if self.periods_total == 0 {
            return Err(Error::InvalidGrid("periods_total must be > 0".into()));
        }
        if self.periods_transient >= self.periods_total {
            return Err(Error::InvalidGrid(
                "periods_transient must be < periods_total".into(),
            ));
        }
        if self.output_decimation == 0 || !self.steps_per_period.is_multiple_of(self.output_decimation) {
            return Err(Error::InvalidGrid(format!(
                "output_decimation {} must divide steps_per_period {}",
                self.output_decimation, self.steps_per_period
            )));
        }
        Ok(())
    }

    pub fn d_tau(&self) -> f64 {
        2.0 * PI / self.steps_per_period as f64
    }

    pub fn total_steps(&self) -> u64 {
        self.steps_per_period as u64 * self.periods_total as u64
    }

    pub fn retained_periods(&self) -> u32 {
        self.periods_total - self.periods_transient
    }

    pub fn samples_per_period(&self) -> usize {
        (self.steps_per_period / self.output_decimation) as usize
    }

    pub fn retained_samples(&self) -> usize {
        self.samples_per_period() * self.retained_periods() as usize
    }
}

impl Default for SimGrid {
    fn default() -> Self {
        SimGrid {
            steps_per_period: Self::DEFAULT_STEPS_PER_PERIOD,
            periods_total: 3,
            periods_transient: 1,
            output_decimation: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Phase,
    Voltage,
}

/// Uniformly sampled record: `values[i]` is taken at `t0 + i * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub kind: SeriesKind,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, kind: SeriesKind) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "sample spacing must be > 0"));
        }
        if values.is_empty() {
            return Err(Error::invalid("values", "series must be non-empty"));
        }
        Ok(TimeSeries { t0, dt, values, kind })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> TimeSeries {
        TimeSeries {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Cached dimensionless coefficients of the phase equation
/// `c phi'' + phi' + alpha (f - delta) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperCoefficients {
    c: f64,
    alpha: f64,
}

impl StepperCoefficients {
    pub fn new(params: &SquidParams, drive: &DriveConfig, r_eff: f64) -> Self {
        StepperCoefficients {
            c: 2.0 * PI * r_eff * params.junction_capacitance * drive.frequency,
            alpha: params.critical_current_sum * r_eff / (FLUX_QUANTUM * drive.frequency),
        }
    }

    /// Direct construction, mainly for tests of the stepping kernels.
    pub fn from_raw(c: f64, alpha: f64) -> Self {
        StepperCoefficients { c, alpha }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}
