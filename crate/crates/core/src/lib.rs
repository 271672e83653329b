//! Space-vector PWM harmonic elimination and torque-ripple analysis for a
//! two-level voltage-source inverter feeding an induction machine.
//!
//! * [`svpwm`] builds the CSV, ABC-I, ABC-II and SVHE switching sequences and
//!   their pole voltages.
//! * [`harmonic`] computes exact Fourier coefficients of switched waveforms,
//!   solves for the dwell-division coefficient `k` and evaluates THD.
//! * [`ripple`] integrates the error voltage into q/d stator-flux ripple and
//!   maps it to torque ripple.
//! * [`machine`] simulates the machine at no load to obtain line currents and
//!   electromagnetic torque.
//! * [`report`] runs sweeps over the modulation index.

pub mod error;
pub mod harmonic;
pub mod machine;
pub mod reference;
pub mod report;
pub mod ripple;
pub mod svpwm;
pub mod waveform;

pub use error::{Error, Result};
pub use harmonic::{
    fourier_coefficient, solve_k, spectrum, thd, EliminationSolution, SpectrumResult, Thd,
};
pub use machine::{simulate_no_load, SimConfig, SimResult};
pub use ripple::{FluxRippleWaveform, MachineParams};
pub use svpwm::{
    DriveConfig, DwellTimes, SequenceKind, SequenceSpec, SpaceVector, ThreePhaseWaveform,
};
pub use waveform::{PiecewiseConstant, PiecewiseLinear};
