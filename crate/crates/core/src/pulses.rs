//! Pulse detection and shape metrics for voltage records.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DriveConfig, TimeSeries};

/// Samples above this fraction of the global peak belong to a pulse.
pub const DETECTION_FRACTION: f64 = 0.05;
/// A pulse's support ends where |V| drops below this fraction of its own peak.
pub const SUPPORT_FRACTION: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseMetrics {
    /// Peak time in seconds, refined by parabolic interpolation.
    pub peak_time: f64,
    /// Signed peak voltage.
    pub peak_height: f64,
    /// Full width at half maximum, seconds.
    pub fwhm: f64,
    /// Time integral of V over the pulse support, webers.
    pub signed_area: f64,
    /// The support touches the start or end of the record.
    pub truncated: bool,
}

pub fn voltage_pulse_metrics(series: &TimeSeries, drive: &DriveConfig) -> Result<Vec<PulseMetrics>> {
    if series.duration() * drive.frequency < 1.0 - 1e-9 {
        return Err(Error::invalid(
            "series",
            "record must span at least one drive period",
        ));
    }
    let v = &series.values;
    let global = series.max_abs();
    if global == 0.0 || !global.is_finite() {
        return Err(Error::NoPulses);
    }
    let threshold = DETECTION_FRACTION * global;
    let n = v.len();
    let mut pulses = Vec::new();
    let mut i = 0;
    while i < n {
        if v[i].abs() <= threshold {
            i += 1;
            continue;
        }
        let sign = v[i].signum();
        let run_start = i;
        while i < n && v[i].abs() > threshold && v[i].signum() == sign {
            i += 1;
        }
        let run_end = i;
        let peak = (run_start..run_end)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
            .expect("non-empty run");
        pulses.push(measure(series, peak));
    }
    if pulses.is_empty() {
        return Err(Error::NoPulses);
    }
    Ok(pulses)
}

fn measure(series: &TimeSeries, peak: usize) -> PulseMetrics {
    let v = &series.values;
    let n = v.len();
    let height = v[peak];
    let sign = height.signum();
    let inside = |j: usize| v[j] * sign >= SUPPORT_FRACTION * height.abs();

    let mut lo = peak;
    while lo > 0 && inside(lo - 1) {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < n && inside(hi + 1) {
        hi += 1;
    }
    let signed_area = v[lo..=hi].iter().sum::<f64>() * series.dt;

    // parabolic refinement of the peak position
    let mut offset = 0.0;
    if peak > 0 && peak + 1 < n {
        let (a, b, c) = (v[peak - 1] * sign, v[peak] * sign, v[peak + 1] * sign);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }

    let half = 0.5 * height.abs();
    let mut left = peak as f64;
    let mut j = peak;
    while j > 0 && v[j - 1] * sign >= half {
        j -= 1;
    }
    if j > 0 {
        let (y0, y1) = (v[j - 1] * sign, v[j] * sign);
        left = (j - 1) as f64 + (half - y0) / (y1 - y0);
    } else {
        left = left.min(0.0);
    }
    let mut right = peak as f64;
    let mut j = peak;
    while j + 1 < n && v[j + 1] * sign >= half {
        j += 1;
    }
    if j + 1 < n {
        let (y0, y1) = (v[j] * sign, v[j + 1] * sign);
        right = j as f64 + (y0 - half) / (y0 - y1);
    } else {
        right = right.max((n - 1) as f64);
    }

    PulseMetrics {
        peak_time: series.t0 + (peak as f64 + offset) * series.dt,
        peak_height: height,
        fwhm: (right - left) * series.dt,
        signed_area,
        truncated: lo == 0 || hi + 1 == n,
    }
}
