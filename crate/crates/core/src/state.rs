use crate::byproduct::{compose_byproduct, LocalGaussianRecord};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::outcome::{OutcomeConstraints, OutcomeExpr};
use crate::rational::Rational;
use crate::rules::{self, local_complement, local_complement_unitary, MeasurementBasis, OutcomeKind};

/// A physical state `D|G⟩`: a graph state with local byproducts applied,
/// plus the relations that deterministic outcomes imposed on the symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedState {
    pub graph: WeightedGraph,
    pub byproduct: LocalGaussianRecord,
    pub constraints: OutcomeConstraints,
}

impl TrackedState {
    pub fn new(graph: WeightedGraph) -> Self {
        TrackedState { graph, byproduct: LocalGaussianRecord::identity(), constraints: OutcomeConstraints::new() }
    }

    pub fn with_byproduct(graph: WeightedGraph, byproduct: LocalGaussianRecord) -> Result<Self> {
        for a in byproduct.vertices() {
            graph.check(a)?;
        }
        Ok(TrackedState { graph, byproduct, constraints: OutcomeConstraints::new() })
    }

    /// Measures the physical quadrature `basis` on `a`.
    ///
    /// The byproduct `ξ ↦ Sξ + d` on `a` turns the physical operator
    /// `q·ξ` into `(qS)·ξ + q·d` on the bare graph state, so the rule is
    /// applied in the basis of `qS` with the outcome shifted by `−q·d` and
    /// rescaled to that basis' representative. `b0` only matters when the
    /// transformed basis is `P`.
    pub fn measure(
        &self,
        a: &VertexId,
        basis: &MeasurementBasis,
        outcome: &OutcomeExpr,
        b0: Option<&VertexId>,
    ) -> Result<(TrackedState, OutcomeKind)> {
        self.graph.check(a)?;
        let local = self.byproduct.get(a);
        let s = local.symplectic.entries();
        let (alpha, beta) = basis.quadrature();
        let qa = &alpha * &s[0][0] + &beta * &s[1][0];
        let qb = &alpha * &s[0][1] + &beta * &s[1][1];
        let mut offset = local.displacement.0.scale(&alpha);
        offset.add_scaled(&local.displacement.1, &beta);
        let (frame_basis, scale) =
            MeasurementBasis::from_quadrature(&qa, &qb).expect("symplectic maps a nonzero quadrature to a nonzero one");
        let internal = (outcome - &offset).scale(&(Rational::from_integer(1.into()) / &scale));
        let b0 = if frame_basis == MeasurementBasis::P { b0 } else { None };

        let mut constraints = self.constraints.clone();
        let (result, kind) = if frame_basis == MeasurementBasis::P && self.graph.neighbors(a)?.is_empty() {
            // a is a momentum eigenstate: the outcome is forced
            let forced = constraints.apply(&offset);
            constraints.add(outcome, &forced).map_err(|_| Error::InconsistentOutcome {
                given: outcome.to_string(),
                forced: forced.to_string(),
            })?;
            let r = rules::measure(&self.graph, a, &frame_basis, &OutcomeExpr::zero(), b0)?;
            (r, OutcomeKind::Deterministic(forced))
        } else {
            let r = rules::measure(&self.graph, a, &frame_basis, &internal, b0)?;
            (r, OutcomeKind::Random)
        };
        let byproduct = compose_byproduct(&self.byproduct.without(a), &result.byproduct)
            .substitute(constraints.substitution());
        Ok((TrackedState { graph: result.graph, byproduct, constraints }, kind))
    }

    /// Rewrites the graph by local complementation without changing the
    /// physical state: the complementing unitary is undone in the byproduct.
    pub fn local_complement(&self, a: &VertexId, delta: &Rational) -> Result<TrackedState> {
        let u = local_complement_unitary(&self.graph, a, delta)?;
        let graph = local_complement(&self.graph, a, delta)?;
        Ok(TrackedState {
            graph,
            byproduct: compose_byproduct(&self.byproduct, &u.inverse()),
            constraints: self.constraints.clone(),
        })
    }
}
