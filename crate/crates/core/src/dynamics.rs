//! Single-SQUID time-domain solver.
//!
//! The phase obeys `c phi'' + phi' + alpha [f(phi, tau) - delta] = 0` with
//! `f = cos(phi_x) sin(phi) + r sin(phi_x) cos(phi)` and `phi_x = pi Phi / Phi_0`.
//! With a finite loop inductance the total flux `Phi` follows from the
//! screening equation `Phi = Phi_e - L_g I_0 sin(pi Phi / Phi_0) cos(phi)`,
//! solved at every step.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{
    DriveConfig, SeriesKind, SimGrid, SquidParams, StepperCoefficients, TimeSeries, FLUX_QUANTUM,
};

pub const FLUX_TOLERANCE: f64 = 1e-12;
pub const FLUX_MAX_ITERATIONS: usize = 200;

/// External flux in units of Phi_0: `(1 + zeta_A) (1 - eps cos tau) / 2`.
pub fn external_flux(drive: &DriveConfig, area_perturbation: f64, tau: f64) -> f64 {
    0.5 * (1.0 + area_perturbation) * (1.0 - drive.amplitude * tau.cos())
}

/// Josephson current of the SQUID in units of I_+.
pub fn josephson_drive_term(phase: f64, flux_phase: f64, asymmetry: f64) -> f64 {
    let (sin_x, cos_x) = flux_phase.sin_cos();
    let (sin_p, cos_p) = phase.sin_cos();
    cos_x * sin_p + asymmetry * sin_x * cos_p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSolution {
    /// Total flux in units of Phi_0.
    pub flux: f64,
    pub iterations: usize,
}

/// Total flux (units of Phi_0) for the given phase and external flux.
pub fn solve_total_flux(params: &SquidParams, phase: f64, external: f64) -> Result<f64> {
    solve_total_flux_from(params, phase, external, external).map(|s| s.flux)
}

/// Damped fixed-point solve of the screening equation, warm-started at `guess`.
///
/// The damping follows the local slope of the map, `omega = 1 / (1 - T'(x))`,
/// which keeps convergence fast as beta approaches 1. Steps that leave the
/// bracket `[Phi_e - s, Phi_e + s]` (always containing the root) bisect instead.
pub fn solve_total_flux_from(
    params: &SquidParams,
    phase: f64,
    external: f64,
    guess: f64,
) -> Result<FluxSolution> {
    let screening = params.screening();
    if screening == 0.0 {
        return Ok(FluxSolution {
            flux: external,
            iterations: 0,
        });
    }
    if !(phase.is_finite() && external.is_finite() && guess.is_finite()) {
        return Err(Error::invalid(
            "flux",
            "phase, external flux and guess must be finite",
        ));
    }
    let cos_phase = phase.cos();
    let (mut lo, mut hi) = (external - screening, external + screening);
    let mut flux = guess.clamp(lo, hi);
    let mut update = f64::INFINITY;
    for iterations in 0..FLUX_MAX_ITERATIONS {
        let mapped = external - screening * (PI * flux).sin() * cos_phase;
        update = mapped - flux;
        if update.abs() < FLUX_TOLERANCE {
            return Ok(FluxSolution { flux, iterations });
        }
        if update > 0.0 {
            lo = flux;
        } else {
            hi = flux;
        }
        let omega = 1.0 / (1.0 + PI * screening * (PI * flux).cos() * cos_phase);
        let next = flux + omega * update;
        flux = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        iterations: FLUX_MAX_ITERATIONS,
        update,
    })
}

/// Residual of the screening equation, in units of Phi_0.
pub fn flux_residual(params: &SquidParams, phase: f64, external: f64, flux: f64) -> f64 {
    flux - external + params.screening() * (PI * flux).sin() * phase.cos()
}

/// Explicit update of the second-order stencil
/// `c (p+ - 2p + p-)/dt^2 + (p - p-)/dt + alpha (f - delta) = 0`.
pub fn rcsj_step(
    prev: f64,
    curr: f64,
    coeffs: &StepperCoefficients,
    drive_term: f64,
    bias: f64,
    d_tau: f64,
) -> f64 {
    let velocity = (curr - prev) / d_tau;
    2.0 * curr - prev - d_tau * d_tau / coeffs.c() * (velocity + coeffs.alpha() * (drive_term - bias))
}

/// Forward-Euler update of the overdamped (c = 0) equation.
pub fn overdamped_step(
    curr: f64,
    coeffs: &StepperCoefficients,
    drive_term: f64,
    bias: f64,
    d_tau: f64,
) -> f64 {
    curr - d_tau * coeffs.alpha() * (drive_term - bias)
}

/// Number of sub-steps per grid step for the second-order stencil. The explicit
/// damping term is stable for `d_tau < 2c`; sub-steps keep `d_tau <= c`.
pub fn substeps(coeffs: &StepperCoefficients, d_tau: f64) -> u32 {
    if coeffs.c() > 0.0 && d_tau > coeffs.c() {
        (d_tau / coeffs.c()).ceil() as u32
    } else {
        1
    }
}

fn validate_inputs(params: &SquidParams, drive: &DriveConfig, grid: &SimGrid, r_eff: f64) -> Result<()> {
    params.validate()?;
    drive.validate()?;
    grid.validate()?;
    if !(r_eff > 0.0 && r_eff.is_finite()) {
        return Err(Error::invalid("r_eff", "effective resistance must be > 0"));
    }
    if params.loop_inductance > 0.0 && params.screening_beta() >= 1.0 {
        return Err(Error::invalid(
            "loop_inductance",
            format!(
                "pi L_g I_0 / Phi_0 = {:.4} must be < 1 for the flux fixed point",
                params.screening_beta()
            ),
        ));
    }
    Ok(())
}

/// Integrates the phase from `phi(0) = 0` at rest and returns the phase at every
/// output point of the grid (transient included), i.e. `retained + transient`
/// periods times samples-per-period, plus the initial point.
fn integrate_phase(
    params: &SquidParams,
    drive: &DriveConfig,
    grid: &SimGrid,
    r_eff: f64,
) -> Result<Vec<f64>> {
    validate_inputs(params, drive, grid, r_eff)?;
    let coeffs = StepperCoefficients::new(params, drive, r_eff);
    let sub = substeps(&coeffs, grid.d_tau());
    let inner_per_period = grid.steps_per_period as u64 * sub as u64;
    let d_tau = 2.0 * PI / inner_per_period as f64;
    let stride = grid.output_decimation as u64 * sub as u64;
    let total = inner_per_period * grid.periods_total as u64;

    let mut out = Vec::with_capacity((total / stride) as usize + 1);
    out.push(0.0);
    let second_order = coeffs.c() > 0.0;
    let screened = params.loop_inductance > 0.0;
    let (mut prev, mut curr) = (0.0_f64, 0.0_f64);
    let mut flux = external_flux(drive, params.area_perturbation, 0.0);

    for i in 0..total {
        // tau from the integer step index keeps the drive phase exact over long runs
        let tau = ((i % inner_per_period) as f64) * d_tau;
        let external = external_flux(drive, params.area_perturbation, tau);
        flux = if screened {
            solve_total_flux_from(params, curr, external, flux)?.flux
        } else {
            external
        };
        let f = josephson_drive_term(curr, PI * flux, params.asymmetry);
        let next = if second_order {
            rcsj_step(prev, curr, &coeffs, f, drive.bias, d_tau)
        } else {
            overdamped_step(curr, &coeffs, f, drive.bias, d_tau)
        };
        prev = curr;
        curr = next;
        if (i + 1) % stride == 0 {
            out.push(curr);
        }
    }
    Ok(out)
}

/// Phase record over the retained window, sampled on the output grid.
pub fn simulate_phase(
    params: &SquidParams,
    drive: &DriveConfig,
    grid: &SimGrid,
    r_eff: f64,
) -> Result<TimeSeries> {
    let phase = integrate_phase(params, drive, grid, r_eff)?;
    let spp = grid.samples_per_period();
    let start = grid.periods_transient as usize * spp;
    let dt = 1.0 / (drive.frequency * spp as f64);
    TimeSeries::new(
        grid.periods_transient as f64 / drive.frequency,
        dt,
        phase[start..start + grid.retained_samples()].to_vec(),
        SeriesKind::Phase,
    )
}

/// Voltage across one SQUID, `V = Phi_0 nu dphi/dtau`, taken as the backward
/// difference over the output spacing. Sample `j` sits at
/// `t = t0 + j dt` and differences against the preceding output point.
pub fn simulate_squid(
    params: &SquidParams,
    drive: &DriveConfig,
    grid: &SimGrid,
    r_eff: f64,
) -> Result<TimeSeries> {
    let phase = integrate_phase(params, drive, grid, r_eff)?;
    let spp = grid.samples_per_period();
    let start = grid.periods_transient as usize * spp;
    let d_tau_out = 2.0 * PI / spp as f64;
    let scale = FLUX_QUANTUM * drive.frequency / d_tau_out;
    let values = (start..start + grid.retained_samples())
        .map(|j| {
            // phi(-d_tau) = phi(0): zero initial velocity
            let before = if j == 0 { phase[0] } else { phase[j - 1] };
            scale * (phase[j] - before)
        })
        .collect();
    TimeSeries::new(
        grid.periods_transient as f64 / drive.frequency,
        1.0 / (drive.frequency * spp as f64),
        values,
        SeriesKind::Voltage,
    )
}
