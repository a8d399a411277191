//! Exact rewrite rules for continuous-variable weighted graph states under
//! single-mode homodyne measurements.
//!
//! The crate has three layers:
//!
//! * the data model: [`WeightedGraph`], exact [`Rational`] weights,
//!   symbolic outcomes ([`OutcomeExpr`]) and local Gaussian byproducts
//!   ([`LocalGaussianRecord`]);
//! * the rewrite rules in [`rules`]: local complementation and the
//!   `x̂`, `x̂ + tanθ·p̂` and `p̂` measurement rules, each returning the new
//!   graph together with the byproduct that relates it to the physical
//!   post-measurement state;
//! * the [`oracle`]: an exact nullifier-subspace simulator and a
//!   finite-squeezing covariance checker that share no code with the rules.
//!
//! On top sit [`TrackedState`] for measurement sequences, the [`planner`]
//! and the [`verify`] harness. The guide under `book/` walks through the
//! concepts; its code snippets are compiled as doc-tests of this crate.
//!
//! ```
//! use cvgraph::{measure_x, v, OutcomeExpr, WeightedGraph};
//!
//! let chain = WeightedGraph::chain(3);
//! let r = measure_x(&chain, &v("2"), &OutcomeExpr::symbol("m")).unwrap();
//! assert_eq!(r.graph.edge_count(), 0);
//! assert_eq!(r.byproduct.len(), 2);
//! ```

pub mod action;
pub mod byproduct;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod outcome;
pub mod planner;
pub mod rational;
pub mod rules;
pub mod state;
pub mod verify;

pub use byproduct::{compose_byproduct, LocalGaussian, LocalGaussianRecord, Symplectic2};
pub use error::{Error, Result};
pub use graph::{parse_graph, serialize_graph, v, VertexId, WeightedGraph};
pub use outcome::{OutcomeConstraints, OutcomeExpr};
pub use planner::{plan, MeasurementPlan, PlanOutcome, PlanQuery, PlanStep};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use rules::{
    local_complement, local_complement_unitary, measure, measure_p, measure_theta, measure_x, MeasurementBasis,
    OutcomeKind, RewriteResult, Tan,
};
pub use state::TrackedState;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/byproducts.md")]
    mod byproducts {}
    #[doc = include_str!("../../../book/src/local-complementation.md")]
    mod local_complementation {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/covariance.md")]
    mod covariance {}
    #[doc = include_str!("../../../book/src/planner.md")]
    mod planner {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
