//! Numerical steady state of three cavity modes at ω, 2ω, 4ω with cubic
//! mode mixing, on a truncated Fock space.

pub mod decay;
pub mod density;
pub mod fock;
pub mod integrator;
pub mod liouvillian;
pub mod reference;
pub mod scan;
pub mod solver;
pub mod stats;
pub mod system;

pub use decay::{displaced_thermal, measure_coherence_decay, DecayFit};
pub use density::{DensityOperator, InvariantReport};
pub use fock::{build_mode_operators, FockTruncation, ModeOperators, SparseOp, MODES};
pub use liouvillian::{apply_liouvillian, Liouvillian, PairLayout};
pub use solver::{steady_state, steady_state_with, InitialState, SolverOptions, SteadyState};
pub use system::ThreeModeSystem;
pub use scan::{g_scan, g_scan_with, ScanOptions, ScanOutcome, ScanRow};
pub use stats::{mode_statistics, statistics_from_populations, ModeStatistics, POPULATION_FLOOR};
