//! Production solver against independent references: adaptive integration,
//! bisection, and closed-form switch times.

mod common;

use std::f64::consts::PI;

use comb_forge::dynamics::{flux_residual, simulate_phase, simulate_squid, solve_total_flux};
use comb_forge::ensemble::{
    build_bins, predicted_switch_time, realization_cells, switch_time_spread, ArrayConfig, DisorderAxis,
    DisorderSpec,
};
use comb_forge::pulses::voltage_pulse_metrics;
use comb_forge::{DriveConfig, SimGrid, SquidParams, FLUX_QUANTUM};
use common::{bisect, Model, NB_R_EFF};

/// Max |phi_stepper - phi_reference| over three periods from rest.
fn phase_error(params: &SquidParams, r_eff: f64, steps: u32, decimation: u32) -> f64 {
    let drive = DriveConfig::default();
    let grid = SimGrid::new(steps, 3, 0)
        .unwrap()
        .with_decimation(decimation)
        .unwrap();
    let phase = simulate_phase(params, &drive, &grid, r_eff).unwrap();
    let mut model = Model::new(
        r_eff,
        params.critical_current_sum,
        params.junction_capacitance,
        params.loop_inductance,
        drive.frequency,
        drive.amplitude,
        drive.bias,
    );
    model.r = params.asymmetry;
    let spp = grid.samples_per_period();
    let checkpoints: Vec<f64> = (1..phase.len())
        .map(|j| j as f64 * 2.0 * PI / spp as f64)
        .collect();
    let reference = model.reference_phase(&checkpoints, 1e-11);
    phase.values[1..]
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn overdamped_stepper_matches_reference_on_fine_grid() {
    let err = phase_error(&SquidParams::niobium(), NB_R_EFF, 1 << 22, 1024);
    assert!(err < 1e-4, "max |dphi| = {err:e}");
}

#[test]
fn second_order_stepper_matches_reference_on_fine_grid() {
    let params = SquidParams {
        junction_capacitance: 1e-12,
        ..SquidParams::niobium()
    };
    let err = phase_error(&params, NB_R_EFF, 1 << 22, 1024);
    assert!(err < 1e-4, "max |dphi| = {err:e}");
}

#[test]
fn screened_stepper_matches_reference_on_fine_grid() {
    let params = SquidParams {
        loop_inductance: 10e-12,
        ..SquidParams::niobium()
    };
    let err = phase_error(&params, NB_R_EFF, 1 << 23, 2048);
    assert!(err < 1e-4, "max |dphi| = {err:e}");
}

#[test]
fn overdamped_stepper_is_first_order() {
    let params = SquidParams::niobium();
    let coarse = phase_error(&params, NB_R_EFF, 1 << 15, 32);
    let fine = phase_error(&params, NB_R_EFF, 1 << 16, 64);
    assert!(coarse / fine >= 1.9, "ratio {}", coarse / fine);
}

#[test]
fn screening_fixed_point_matches_bisection() {
    let params = SquidParams {
        loop_inductance: 10e-12,
        ..SquidParams::niobium()
    };
    let s = 10e-12 * 50e-6 / FLUX_QUANTUM;
    assert!((s - 0.24180).abs() < 1e-5);
    for (phase, external) in [(0.0, 0.45), (1.0, 0.05), (2.5, 0.95), (PI, 0.5)] {
        let flux = solve_total_flux(&params, phase, external).unwrap();
        let g = |x: f64| x - external + s * (PI * x).sin() * f64::cos(phase);
        let reference = bisect(g, external - s - 1e-3, external + s + 1e-3);
        assert!(
            (flux - reference).abs() < 1e-10,
            "phase {phase}: {flux} vs {reference}"
        );
        assert!(flux_residual(&params, phase, external, flux).abs() < 1e-12);
    }
}

#[test]
fn pulse_area_is_half_flux_quantum() {
    for l_g in [0.0, 10e-12] {
        let params = SquidParams {
            loop_inductance: l_g,
            ..SquidParams::niobium()
        };
        let drive = DriveConfig::default();
        let v = simulate_squid(&params, &drive, &SimGrid::default(), NB_R_EFF).unwrap();
        let pulses = voltage_pulse_metrics(&v, &drive).unwrap();
        assert_eq!(pulses.len(), 4);
        for p in &pulses {
            let ratio = p.signed_area.abs() / (FLUX_QUANTUM / 2.0);
            assert!((ratio - 1.0).abs() < 0.01, "L_g {l_g}: area ratio {ratio}");
        }
    }
}

/// Isolated SQUID: the peak follows the node crossing closely, so its shift
/// tracks the closed-form switch time.
#[test]
fn peak_shift_follows_switch_time() {
    let drive = DriveConfig::default();
    let grid = SimGrid::default();
    let peaks = |zeta: f64| {
        let params = SquidParams {
            area_perturbation: zeta,
            ..SquidParams::niobium()
        };
        let v = simulate_squid(&params, &drive, &grid, 20.0).unwrap();
        voltage_pulse_metrics(&v, &drive).unwrap()
    };
    let nominal = peaks(0.0);
    for zeta in [-0.03, -0.01, 0.01, 0.03] {
        let shifted = peaks(zeta);
        // retained window starts at one period: pulse j sits at node k = 2 + j
        for j in 0..2 {
            let k = 2 + j as u32;
            let predicted = predicted_switch_time(zeta, &drive, k).unwrap().exact
                - predicted_switch_time(0.0, &drive, k).unwrap().exact;
            let measured = shifted[j].peak_time - nominal[j].peak_time;
            assert!(
                (measured / predicted - 1.0).abs() < 0.05,
                "zeta {zeta}, k {k}: measured {measured:e}, predicted {predicted:e}"
            );
        }
    }
}

#[test]
fn switch_time_examples() {
    let drive = DriveConfig::default();
    let t0 = predicted_switch_time(0.0, &drive, 0).unwrap();
    assert!((t0.exact - 0.25e-9).abs() < 1e-18);
    let t = predicted_switch_time(0.01, &drive, 0).unwrap();
    assert!((t0.exact - t.linearized - 1.768e-12).abs() < 1e-15);
    assert!((t.exact - t.linearized).abs() < 0.02e-12);
    let later = predicted_switch_time(-0.01, &drive, 0).unwrap();
    assert!(t.exact < t0.exact && t0.exact < later.exact);
    assert!(predicted_switch_time(
        0.5,
        &DriveConfig {
            amplitude: 0.2,
            ..drive
        },
        0
    )
    .is_err());
    assert!((switch_time_spread(0.01, &drive) - 1.7684e-12).abs() < 1e-16);
    assert_eq!(switch_time_spread(0.0, &drive), 0.0);
}

/// Spread of first-pulse peak times over sampled SQUIDs vs lambda_A.
#[test]
fn peak_time_spread_matches_lambda() {
    let config = ArrayConfig {
        n_squids: 50,
        load_resistance: 1e12,
        base: SquidParams::niobium(),
        drive: DriveConfig::default(),
        grid: SimGrid::new(16384, 3, 1).unwrap(),
    };
    let spec = DisorderSpec {
        sigma_area: 0.01,
        n_realizations: 200,
        ..DisorderSpec::none()
    };
    let table = build_bins(DisorderAxis::Area, &spec, &config).unwrap();
    let peak: Vec<f64> = table
        .waveforms
        .iter()
        .map(|w| voltage_pulse_metrics(w, &config.drive).unwrap()[0].peak_time)
        .collect();
    let mut samples = Vec::new();
    for j in 0..spec.n_realizations as u64 {
        samples.extend(
            realization_cells(&table, &spec, config.n_squids, j)
                .into_iter()
                .map(|c| peak[c]),
        );
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std = (samples.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n).sqrt();
    let lambda = switch_time_spread(0.01, &config.drive);
    assert!(
        (std / lambda - 1.0).abs() < 0.1,
        "std {std:e} vs lambda {lambda:e}"
    );
    let center = peak[table.area_centers.len() / 2];
    assert!(
        (mean - center).abs() < 0.1 * lambda,
        "mean offset {:e}",
        mean - center
    );
}
