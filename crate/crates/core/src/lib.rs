//! Dynamic-length FSK waveforms for joint communications and radar.
//!
//! The transmitter emits M-ary FSK subpulses continuously. The radar side
//! closes a waveform as soon as the tone histogram of the subpulses emitted
//! so far is flat enough (plus optional deterministic length bounds). This
//! crate provides:
//!
//! * [`fsk`]: waveform parameters, frequency sequences and synthesis
//! * [`stopper`]: the O(1) running flatness state and the stopping rule
//! * [`ambiguity`]: grid-point ambiguity sidelobes and their statistics
//! * [`rms`]: RMS time duration / bandwidth and the CRLB forms they feed
//! * [`hitting`]: the Brownian hitting-time model for the waveform length
//! * [`sim`]: radar channel, matched-filter estimation, FSK detection and
//!   the Monte Carlo MSE harness
//! * [`experiments`]: named experiments producing CSV result tables

pub mod ambiguity;
pub mod error;
pub mod experiments;
pub mod fsk;
pub mod hitting;
pub mod quad;
pub mod rms;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod stopper;

pub use error::{Error, Result};
pub use fsk::{FrequencySequence, SampledWaveform, WaveformParams};
pub use hitting::HittingModel;
pub use stopper::{SpectrumState, StopDecision, StoppingConfig};
