//! Steady states of multimode cavities coupled to a warm electromagnetic
//! environment and to cold mirrors.
//!
//! * [`bath`]: Bose statistics and detailed-balance rate pairs.
//! * [`rates`]: bare dissipation rates from macroscopic cavity parameters.
//! * [`steady`]: closed-form effective temperatures and occupations.
//! * [`lindblad`]: numerical steady state of three nonlinearly mixed modes.
//! * [`wigner`]: Gaussian phase-space cross-checks.

// `!(x > 0.0)` is how NaN gets rejected alongside bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod error;
pub mod lindblad;
pub mod rates;
pub mod steady;
pub mod units;
pub mod wigner;

pub use bath::{bose_einstein, rate_pair, ModeSpec, RateModel, RatePair, ReservoirLabel, ReservoirSpec};
pub use error::{Error, Result};
pub use steady::{effective_temperature, SteadyModeState, SweepResult, SweepSpec};
pub use units::{EnergyScale, Unit, UnitSystem};
