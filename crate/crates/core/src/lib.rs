//! Simulation of dc-SQUID Josephson radiation comb generators and arrays.
//!
//! A dc SQUID driven by an oscillating flux through its first interference node
//! undergoes a phase jump of pi at each node crossing, producing a voltage pulse
//! of area Phi_0 / 2. Series arrays of such SQUIDs, coupled to a resistive load,
//! emit a comb of harmonics of the drive frequency. The crate covers:
//!
//! - [`dynamics`]: the single-SQUID RCSJ solver with loop inductance and
//!   junction capacitance,
//! - [`pulses`]: pulse detection and shape metrics,
//! - [`ensemble`]: load coupling, fabrication disorder and array averaging,
//! - [`spectrum`]: per-harmonic power delivered to the load,
//! - [`config`], [`scenario`], [`output`]: configuration files, the built-in
//!   figure scenarios and CSV/JSON emission.

pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod output;
pub mod params;
pub mod pulses;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
pub use params::{
    DriveConfig, PhysicalConstants, SeriesKind, SimGrid, SquidParams, StepperCoefficients, TimeSeries,
    FLUX_QUANTUM,
};
pub use spectrum::{Parity, Spectrum};
