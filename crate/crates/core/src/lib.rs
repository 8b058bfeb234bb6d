//! Simulation and stability certification for time-varying Friedkin-Johnsen
//! opinion dynamics,
//!
//! ```text
//! x[t+1] = Λ[t] W[t] x[t] + (I - Λ[t]) s,
//! ```
//!
//! driven by temporal-graph structure: defected windows, contraction
//! bounds, exponential-stability constants, the periodic decomposition into
//! time-invariant subsystems, and robustness thresholds.

pub mod certificates;
pub mod dynamics;
pub mod error;
pub mod pslti;
pub mod scenario;
pub mod stochastic;
pub mod temporal;

pub use error::{Error, Result};
pub use stochastic::{
    closed_form_solution, max_row_sum_norm, step_factor, transition_product, FactorPair,
    InfluenceMatrix, Matrix, OpinionVector, SusceptibilityMatrix, TransitionProduct, Vector,
};
pub use temporal::{
    detect_certificate, scan_partition, scan_windows, temporal_paths_exist, DefectReport,
    PathKind, TemporalEdge, TemporalGraphWindow, TemporalLayer,
};
