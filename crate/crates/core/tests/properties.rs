use std::f64::consts::PI;

use comb_forge::config::parse_config;
use comb_forge::dynamics::{external_flux, flux_residual, josephson_drive_term, solve_total_flux};
use comb_forge::ensemble::{bin_centers, effective_resistance};
use comb_forge::output::{fmt_f64, timeseries_csv};
use comb_forge::spectrum::harmonic_power;
use comb_forge::{DriveConfig, SeriesKind, SquidParams, TimeSeries};
use proptest::prelude::*;

proptest! {
    #[test]
    fn external_flux_is_periodic(tau in -20.0..20.0f64, zeta in -0.2..0.2f64, eps in 0.0..1.0f64) {
        let drive = DriveConfig { amplitude: eps, ..DriveConfig::default() };
        let a = external_flux(&drive, zeta, tau);
        let b = external_flux(&drive, zeta, tau + 2.0 * PI);
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a >= 0.0 && a <= 1.0 + zeta);
    }

    #[test]
    fn junction_current_bounded(phase in -10.0..10.0f64, x in -10.0..10.0f64, r in -0.999..0.999f64) {
        prop_assert!(josephson_drive_term(phase, x, r).abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn flux_solution_has_tiny_residual(
        phase in -PI..PI,
        external in 0.0..1.0f64,
        l_g in 0.0..13e-12f64,
    ) {
        let params = SquidParams { loop_inductance: l_g, ..SquidParams::niobium() };
        let flux = solve_total_flux(&params, phase, external).unwrap();
        prop_assert!(flux_residual(&params, phase, external, flux).abs() < 1e-12);
    }

    #[test]
    fn effective_resistance_decreases_with_n(r in 0.1..100.0f64, load in 0.1..1000.0f64, n in 1usize..1000) {
        let a = effective_resistance(r, load, n);
        let b = effective_resistance(r, load, n + 1);
        prop_assert!(a > 0.0 && b < a && a < r);
    }

    #[test]
    fn bin_centers_symmetric(sigma in 1e-4..0.2f64, n in 1usize..400) {
        let c = bin_centers(sigma, n);
        prop_assert_eq!(c.len(), n);
        for i in 0..n {
            prop_assert!((c[i] + c[n - 1 - i]).abs() < 1e-12 * sigma.max(1.0));
            prop_assert!(c[i].abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn timeseries_csv_round_trips(values in prop::collection::vec(-1e-3..1e-3f64, 1..50)) {
        let s = TimeSeries::new(1e-9, 1.0 / 65536e9, values.clone(), SeriesKind::Voltage).unwrap();
        let text = timeseries_csv(&s);
        prop_assert_eq!(text.lines().count(), values.len() + 1);
        for (line, v) in text.lines().skip(1).zip(&values) {
            let col: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            prop_assert_eq!(col, *v);
        }
    }

    #[test]
    fn single_tone_power(k in 1usize..60, amp in 1e-6..1e-3f64, phase in 0.0..std::f64::consts::TAU) {
        let spp = 512usize;
        let values: Vec<f64> = (0..2 * spp)
            .map(|i| amp * (2.0 * PI * k as f64 * i as f64 / spp as f64 + phase).cos())
            .collect();
        let s = TimeSeries::new(0.0, 1e-9 / spp as f64, values, SeriesKind::Voltage).unwrap();
        let spectrum = harmonic_power(&s, 1e9, 100, 50.0).unwrap();
        let expected = amp * amp / 100.0;
        prop_assert!((spectrum.power(k) / expected - 1.0).abs() < 1e-9);
        let leak = spectrum.harmonics.iter().filter(|h| h.k != k).map(|h| h.power).fold(0.0, f64::max);
        prop_assert!(leak < 1e-20 * expected.max(1.0));
    }

    #[test]
    fn valid_overrides_are_applied(sigma in 0.0..0.2f64, n in 1usize..1000) {
        let loaded = parse_config("{}", "mem", &[format!("sigma_area={sigma}"), format!("n_squids={n}")]).unwrap();
        prop_assert_eq!(loaded.config.sigma_area, sigma);
        prop_assert_eq!(loaded.config.n_squids, n);
    }
}
