//! Harmonic analysis of commensurate voltage records.
//!
//! Fourier convention: `V(Omega) = sum_i V_i exp(+i Omega t_i) dt`, with the
//! frequency given in hertz and converted internally. A record spanning an
//! integer number `M` of drive periods puts every harmonic `k nu` exactly on a
//! transform bin of width `1/T`, so the power of harmonic `k` is the PSD
//! `|V(k nu)|^2 / T` integrated over that single bin, counted at `+k nu` and
//! `-k nu`, and divided by the load.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TimeSeries;

const COMMENSURATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }
}

impl std::ops::Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl std::ops::AddAssign for Complex {
    fn add_assign(&mut self, rhs: Complex) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl std::ops::Mul<f64> for Complex {
    type Output = Complex;
    fn mul(self, rhs: f64) -> Complex {
        Complex::new(self.re * rhs, self.im * rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: usize,
    pub frequency: f64,
    /// Power delivered to the load, watts.
    pub power: f64,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub drive_frequency: f64,
    pub load_resistance: f64,
    pub record_duration: f64,
    pub harmonics: Vec<Harmonic>,
}

impl Spectrum {
    pub fn k_max(&self) -> usize {
        self.harmonics.len()
    }

    /// Power of harmonic `k` (1-based).
    pub fn power(&self, k: usize) -> f64 {
        self.harmonics[k - 1].power
    }

    pub fn powers(&self) -> Vec<f64> {
        self.harmonics.iter().map(|h| h.power).collect()
    }

    /// Builds a spectrum from complex harmonic amplitudes `V(k nu)`, k = 1..
    pub fn from_amplitudes(
        amplitudes: &[Complex],
        drive_frequency: f64,
        record_duration: f64,
        load_resistance: f64,
    ) -> Spectrum {
        let harmonics = amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let k = i + 1;
                Harmonic {
                    k,
                    frequency: k as f64 * drive_frequency,
                    power: bin_power(*a, record_duration, load_resistance),
                    parity: Parity::of(k),
                }
            })
            .collect();
        Spectrum {
            drive_frequency,
            load_resistance,
            record_duration,
            harmonics,
        }
    }
}

/// One-sided power of a single commensurate bin: `2 |V|^2 / (T^2 R_L)`.
pub fn bin_power(amplitude: Complex, record_duration: f64, load_resistance: f64) -> f64 {
    2.0 * amplitude.norm_sqr() / (record_duration * record_duration * load_resistance)
}

/// Number of drive periods spanned by the record, if it is an integer.
pub fn commensurate_periods(series: &TimeSeries, drive_frequency: f64) -> Result<usize> {
    let periods = series.duration() * drive_frequency;
    let rounded = periods.round();
    if rounded < 1.0 || (periods - rounded).abs() > COMMENSURATE_TOLERANCE * rounded.max(1.0) {
        return Err(Error::NonCommensurate { periods });
    }
    Ok(rounded as usize)
}

/// Fourier amplitude of the record at `frequency` (Hz), volt-seconds.
///
/// The record must span an integer number of drive periods.
pub fn fourier_component(series: &TimeSeries, drive_frequency: f64, frequency: f64) -> Result<Complex> {
    commensurate_periods(series, drive_frequency)?;
    let omega = 2.0 * PI * frequency;
    let mut acc = Complex::default();
    for (i, &v) in series.values.iter().enumerate() {
        let (s, c) = (omega * series.time(i)).sin_cos();
        acc += Complex::new(v * c, v * s);
    }
    Ok(acc * series.dt)
}

/// Exact twiddle table for one drive period of `samples_per_period` points.
struct Twiddles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    fn new(n: usize) -> Self {
        let (sin, cos) = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).sin_cos()).unzip();
        Twiddles { cos, sin }
    }
}

/// Fourier amplitudes at harmonics k = 1..=k_max of a commensurate record.
///
/// The phase `k nu t_i` reduces to `k i / n` turns (plus an integer from `t0`
/// when `t0` is a whole number of periods), so the kernel is read from an exact
/// table rather than accumulated. Harmonics are evaluated independently.
pub fn harmonic_amplitudes(series: &TimeSeries, drive_frequency: f64, k_max: usize) -> Result<Vec<Complex>> {
    let periods = commensurate_periods(series, drive_frequency)?;
    let n = series.len() / periods;
    let limit = n / 4;
    if k_max > limit {
        return Err(Error::BandwidthExceeded { k_max, limit });
    }
    let table = Twiddles::new(n);
    let offset = Complex::from_phase(2.0 * PI * drive_frequency * series.t0);
    let amps = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut acc = Complex::default();
            let mut idx = 0usize;
            for &v in &series.values {
                acc.re += v * table.cos[idx];
                acc.im += v * table.sin[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            // exp(i k 2 pi nu t0) * acc * dt
            let rot = offset.powi(k);
            Complex::new(
                acc.re * rot.re - acc.im * rot.im,
                acc.re * rot.im + acc.im * rot.re,
            ) * series.dt
        })
        .collect();
    Ok(amps)
}

impl Complex {
    fn from_phase(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex::new(c, s)
    }

    fn powi(self, k: usize) -> Self {
        let theta = self.im.atan2(self.re) * k as f64;
        Complex::from_phase(theta)
    }
}

/// Per-harmonic power delivered to `load_resistance`.
pub fn harmonic_power(
    series: &TimeSeries,
    drive_frequency: f64,
    k_max: usize,
    load_resistance: f64,
) -> Result<Spectrum> {
    if !(load_resistance > 0.0) {
        return Err(Error::invalid("load_resistance", "R_L > 0 required"));
    }
    let amps = harmonic_amplitudes(series, drive_frequency, k_max)?;
    Ok(Spectrum::from_amplitudes(
        &amps,
        drive_frequency,
        series.duration(),
        load_resistance,
    ))
}

/// Power in every transform bin `m / T`, m = 0..=n/2, delivered to the load
/// (one-sided; DC and Nyquist counted once). Sums to `mean(V^2) / R_L`.
pub fn bin_powers(series: &TimeSeries, load_resistance: f64) -> Vec<(f64, f64)> {
    let n = series.len();
    let t = series.duration();
    let mut buffer: Vec<rustfft::num_complex::Complex<f64>> = series
        .values
        .iter()
        .map(|&v| rustfft::num_complex::Complex::new(v, 0.0))
        .collect();
    rustfft::FftPlanner::new()
        .plan_fft_forward(n)
        .process(&mut buffer);
    (0..=n / 2)
        .map(|m| {
            // |V(Omega)| is the same for either kernel sign on real input
            let single = buffer[m].norm_sqr() * series.dt * series.dt / (t * t * load_resistance);
            let power = if m == 0 || 2 * m == n {
                single
            } else {
                2.0 * single
            };
            (m as f64 / t, power)
        })
        .collect()
}

/// Arithmetic mean of per-harmonic powers.
pub fn average_spectrum(spectra: &[Spectrum]) -> Result<Spectrum> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::invalid("spectra", "at least one spectrum required"))?;
    for s in &spectra[1..] {
        if s.drive_frequency != first.drive_frequency {
            return Err(Error::MixedConfig("drive frequency"));
        }
        if s.k_max() != first.k_max() {
            return Err(Error::MixedConfig("k_max"));
        }
        if s.load_resistance != first.load_resistance {
            return Err(Error::MixedConfig("load resistance"));
        }
    }
    let n = spectra.len() as f64;
    let mut out = first.clone();
    for (j, h) in out.harmonics.iter_mut().enumerate() {
        h.power = spectra.iter().map(|s| s.harmonics[j].power).sum::<f64>() / n;
    }
    Ok(out)
}
