//! Independent ground truth for the rewrite rules: an exact nullifier
//! simulator and a finite-squeezing covariance checker.

pub mod covariance;
pub mod nullifier;

pub use covariance::{covariance_residual, log_slope, CovarianceState};
pub use nullifier::{
    apply_gate, canonical_graph_form, graph_to_nullifiers, oracle_measure, states_equal, Certificate, GraphForm,
    NullifierRow, NullifierSystem, OracleMeasurement, SymplecticGate,
};
