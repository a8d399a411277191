//! Graphical rewrite rules for homodyne measurements on weighted graph
//! states.
//!
//! Every measurement rule has the same shape: apply local Gaussian
//! unitaries `V` that turn the measured quadrature into `x̂_a`, delete `a`
//! from the rewritten graph, translate the outcome into momentum shifts
//! on `a`'s former neighbors, and finally undo `V` on the surviving
//! modes. The last step is the byproduct that makes the reported
//! `(graph, byproduct)` pair equal to the physical post-measurement state.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::byproduct::{compose_byproduct, LocalGaussian, LocalGaussianRecord};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::outcome::OutcomeExpr;
use crate::rational::{format_rational, parse_rational, Rational};

/// A nonzero rational `tan θ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tan(Rational);

impl Tan {
    pub fn new(t: Rational) -> Option<Tan> {
        (!t.is_zero()).then_some(Tan(t))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Debug for Tan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Which quadrature is measured.
///
/// Outcomes are eigenvalues of the representative operator: `x̂` for
/// [`X`](Self::X), `p̂` for [`P`](Self::P) and `x̂ + tanθ·p̂` for
/// [`Theta`](Self::Theta). The rotated quadrature `cosθ·x̂ + sinθ·p̂` is
/// that operator times `cosθ`, so a detector reading `q` corresponds to
/// the outcome `q / cosθ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MeasurementBasis {
    X,
    P,
    Theta(Tan),
}

impl MeasurementBasis {
    /// θ basis from `tan θ`; zero collapses to [`X`](Self::X).
    pub fn theta(tan: Rational) -> Self {
        match Tan::new(tan) {
            Some(t) => MeasurementBasis::Theta(t),
            None => MeasurementBasis::X,
        }
    }

    /// Coefficients `(α, β)` of the representative operator `α x̂ + β p̂`.
    pub fn quadrature(&self) -> (Rational, Rational) {
        match self {
            MeasurementBasis::X => (Rational::one(), Rational::zero()),
            MeasurementBasis::P => (Rational::zero(), Rational::one()),
            MeasurementBasis::Theta(t) => (Rational::one(), t.0.clone()),
        }
    }

    /// Splits `α x̂ + β p̂` into `scale · representative(basis)`.
    /// Returns `None` for the zero quadrature.
    pub fn from_quadrature(alpha: &Rational, beta: &Rational) -> Option<(MeasurementBasis, Rational)> {
        if !alpha.is_zero() {
            Some((MeasurementBasis::theta(beta / alpha), alpha.clone()))
        } else if !beta.is_zero() {
            Some((MeasurementBasis::P, beta.clone()))
        } else {
            None
        }
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementBasis::X => f.write_str("x"),
            MeasurementBasis::P => f.write_str("p"),
            MeasurementBasis::Theta(t) => write!(f, "theta:{}", format_rational(&t.0)),
        }
    }
}

impl FromStr for MeasurementBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(MeasurementBasis::X),
            "p" => Ok(MeasurementBasis::P),
            _ => match s.strip_prefix("theta:") {
                Some(t) => Ok(MeasurementBasis::theta(parse_rational(t)?)),
                None => Err(Error::BadAction(s.to_string(), "unknown basis".into())),
            },
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OutcomeKind {
    Random,
    /// The outcome is forced to this value.
    Deterministic(OutcomeExpr),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteResult {
    pub graph: WeightedGraph,
    pub byproduct: LocalGaussianRecord,
    pub outcome_kind: OutcomeKind,
}

/// Local complementation at `a` with parameter `delta`.
///
/// Each edge between neighbors `b, c` of `a` becomes
/// `Ω_bc − Ω_ab·Ω_ac·δ`; resulting zero weights are deleted. Nothing
/// else changes.
pub fn local_complement(g: &WeightedGraph, a: &VertexId, delta: &Rational) -> Result<WeightedGraph> {
    let nbrs = g.neighbors(a)?;
    let mut out = g.clone();
    if delta.is_zero() {
        return Ok(out);
    }
    for (i, (b, wb)) in nbrs.iter().enumerate() {
        for (c, wc) in &nbrs[i + 1..] {
            let w = g.weight(b, c) - wb * wc * delta;
            out.set_weight(b, c, w)?;
        }
    }
    out.assert_invariants();
    Ok(out)
}

/// The local unitary `P_X(−δ)` on `a` times `P(Ω_ab²·δ)` on each
/// neighbor `b`, which maps `|G⟩` to `|LC_a(δ)(G)⟩`.
pub fn local_complement_unitary(g: &WeightedGraph, a: &VertexId, delta: &Rational) -> Result<LocalGaussianRecord> {
    let mut u = LocalGaussianRecord::identity();
    u.set(a.clone(), LocalGaussian::phase_x(-delta.clone()));
    for (b, w) in g.neighbors(a)? {
        u.set(b, LocalGaussian::phase(&w * &w * delta));
    }
    Ok(u)
}

/// Measuring `x̂_a` on `V|G⟩` where `rewritten = V·G` and `applied = V`.
fn delete_after(
    rewritten: &WeightedGraph,
    a: &VertexId,
    applied: &LocalGaussianRecord,
    outcome: &OutcomeExpr,
) -> Result<RewriteResult> {
    let mut shifts = LocalGaussianRecord::identity();
    for (b, w) in rewritten.neighbors(a)? {
        shifts.set(b, LocalGaussian::z_shift(outcome.scale(&w)));
    }
    let mut graph = rewritten.clone();
    graph.remove_vertex(a)?;
    let residual = applied.without(a).inverse();
    Ok(RewriteResult {
        graph,
        byproduct: compose_byproduct(&residual, &shifts),
        outcome_kind: OutcomeKind::Random,
    })
}

/// Position measurement: delete `a` and shift each former neighbor's
/// momentum by `Ω_ab · outcome`.
pub fn measure_x(g: &WeightedGraph, a: &VertexId, outcome: &OutcomeExpr) -> Result<RewriteResult> {
    delete_after(g, a, &LocalGaussianRecord::identity(), outcome)
}

/// Measurement of `x̂ + tanθ·p̂`: local complementation at `a` with
/// `δ = tanθ`, then deletion.
pub fn measure_theta(g: &WeightedGraph, a: &VertexId, tan_theta: &Rational, outcome: &OutcomeExpr) -> Result<RewriteResult> {
    if tan_theta.is_zero() {
        return measure_x(g, a, outcome);
    }
    let applied = local_complement_unitary(g, a, tan_theta)?;
    let rewritten = local_complement(g, a, tan_theta)?;
    debug_assert_eq!(applied.get(a).symplectic.entries()[0], [Rational::one(), tan_theta.clone()]);
    delete_after(&rewritten, a, &applied, outcome)
}

/// Momentum measurement.
///
/// Complements at a neighbor `b0` with `−1/Ω_{a b0}²` and then at `a` with
/// `1`, which turns `p̂_a` into `x̂_a`, then deletes `a`. `b0` defaults to
/// the neighbor with the smallest label. An isolated vertex is a momentum
/// eigenstate, so its outcome is forced to zero.
pub fn measure_p(
    g: &WeightedGraph,
    a: &VertexId,
    outcome: &OutcomeExpr,
    b0: Option<&VertexId>,
) -> Result<RewriteResult> {
    let nbrs = g.neighbors(a)?;
    let Some((first, _)) = nbrs.first() else {
        if let Some(b) = b0 {
            return Err(Error::NotNeighbor { vertex: a.clone(), b0: b.clone() });
        }
        if let Some(c) = outcome.as_constant() {
            if !c.is_zero() {
                return Err(Error::InconsistentOutcome { given: outcome.to_string(), forced: "0".into() });
            }
        }
        let mut graph = g.clone();
        graph.remove_vertex(a)?;
        return Ok(RewriteResult {
            graph,
            byproduct: LocalGaussianRecord::identity(),
            outcome_kind: OutcomeKind::Deterministic(OutcomeExpr::zero()),
        });
    };
    let b0 = match b0 {
        Some(b) => {
            g.check(b)?;
            if !nbrs.iter().any(|(c, _)| c == b) {
                return Err(Error::NotNeighbor { vertex: a.clone(), b0: b.clone() });
            }
            b.clone()
        }
        None => first.clone(),
    };
    let w = g.weight(a, &b0);
    let delta_b = -(Rational::one() / (&w * &w));
    let u1 = local_complement_unitary(g, &b0, &delta_b)?;
    let g1 = local_complement(g, &b0, &delta_b)?;
    let u2 = local_complement_unitary(&g1, a, &Rational::one())?;
    let g2 = local_complement(&g1, a, &Rational::one())?;
    let applied = compose_byproduct(&u2, &u1);
    debug_assert_eq!(applied.get(a).symplectic.entries()[0], [Rational::zero(), Rational::one()]);
    delete_after(&g2, a, &applied, outcome)
}

/// Dispatches on the basis. Rules assume an undisplaced graph state; see
/// [`TrackedState`](crate::TrackedState) for measuring states that carry
/// byproducts.
pub fn measure(
    g: &WeightedGraph,
    a: &VertexId,
    basis: &MeasurementBasis,
    outcome: &OutcomeExpr,
    b0: Option<&VertexId>,
) -> Result<RewriteResult> {
    match basis {
        MeasurementBasis::X => measure_x(g, a, outcome),
        MeasurementBasis::Theta(t) => measure_theta(g, a, t.value(), outcome),
        MeasurementBasis::P => measure_p(g, a, outcome, b0),
    }
}
