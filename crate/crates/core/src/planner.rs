//! Breadth-first search for measurement sequences that carve a target
//! graph out of a larger one.
//!
//! Every measurement deletes exactly one vertex, so a plan from `source`
//! to `target` always has `|source| − |target|` steps and only vertices
//! outside the target are ever measured. Matching compares labeled graphs
//! exactly and ignores byproducts; the byproduct left after each step is
//! reported so it can be corrected afterwards.

use std::collections::{HashSet, VecDeque};

use serde_json::{json, Value};

use crate::byproduct::LocalGaussianRecord;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::outcome::OutcomeExpr;
use crate::rules::MeasurementBasis;
use crate::state::TrackedState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub vertex: VertexId,
    pub basis: MeasurementBasis,
    pub outcome: OutcomeExpr,
}

/// An ordered list of single-mode measurements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasurementPlan {
    pub steps: Vec<PlanStep>,
}

impl MeasurementPlan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays the plan physically, returning the state after each step.
    pub fn replay(&self, source: &WeightedGraph) -> Result<Vec<TrackedState>> {
        let mut seen = HashSet::new();
        let mut cur = TrackedState::new(source.clone());
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            if !seen.insert(step.vertex.clone()) {
                return Err(Error::InvalidQuery(format!("vertex {} measured twice", step.vertex)));
            }
            cur = cur.measure(&step.vertex, &step.basis, &step.outcome, None)?.0;
            out.push(cur.clone());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct PlanQuery {
    pub source: WeightedGraph,
    pub target: WeightedGraph,
    pub max_depth: usize,
    pub bases: Vec<MeasurementBasis>,
}

/// Search result. `explored` counts expanded search states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanOutcome {
    Found { plan: MeasurementPlan, byproducts: Vec<LocalGaussianRecord>, explored: usize },
    NoPlan { explored: usize },
}

/// States expanded before the search gives up.
pub const NODE_LIMIT: usize = 200_000;

fn outcome_symbol(step: usize) -> OutcomeExpr {
    OutcomeExpr::symbol(&format!("m{}", step + 1))
}

/// Shortest plan turning `q.source` into exactly `q.target`.
///
/// Actions are tried in vertex label order, then in the order of
/// `q.bases`, so the result is deterministic. States are deduplicated by
/// graph plus the linear part of the byproducts, which is all that
/// affects future rewrites.
pub fn plan(q: &PlanQuery) -> Result<PlanOutcome> {
    for a in q.target.vertices() {
        if !q.source.contains(a) {
            return Err(Error::InvalidQuery(format!("target vertex {a} is not in the source")));
        }
    }
    if q.bases.is_empty() {
        return Err(Error::InvalidQuery("no measurement bases given".into()));
    }
    let depth = q.source.order() - q.target.order();
    if depth > q.max_depth {
        return Ok(PlanOutcome::NoPlan { explored: 0 });
    }
    let removable: Vec<VertexId> = q.source.vertices().filter(|a| !q.target.contains(a)).cloned().collect();

    struct Node {
        state: TrackedState,
        steps: Vec<PlanStep>,
        byproducts: Vec<LocalGaussianRecord>,
    }
    let key = |s: &TrackedState| (s.graph.to_json(), s.byproduct.linear_parts());
    let mut seen = HashSet::new();
    let start = TrackedState::new(q.source.clone());
    seen.insert(key(&start));
    let mut queue = VecDeque::from([Node { state: start, steps: vec![], byproducts: vec![] }]);
    let mut explored = 0;
    while let Some(node) = queue.pop_front() {
        explored += 1;
        if node.steps.len() == depth {
            if node.state.graph == q.target {
                let plan = MeasurementPlan { steps: node.steps };
                return Ok(PlanOutcome::Found { plan, byproducts: node.byproducts, explored });
            }
            continue;
        }
        if explored >= NODE_LIMIT {
            break;
        }
        for a in removable.iter().filter(|a| node.state.graph.contains(a)) {
            for basis in &q.bases {
                let outcome = outcome_symbol(node.steps.len());
                let Ok((next, _)) = node.state.measure(a, basis, &outcome, None) else {
                    continue;
                };
                if !seen.insert(key(&next)) {
                    continue;
                }
                let mut steps = node.steps.clone();
                steps.push(PlanStep { vertex: a.clone(), basis: basis.clone(), outcome });
                let mut byproducts = node.byproducts.clone();
                byproducts.push(next.byproduct.clone());
                queue.push_back(Node { state: next, steps, byproducts });
            }
        }
    }
    Ok(PlanOutcome::NoPlan { explored })
}

impl PlanOutcome {
    /// `{"steps":[{"vertex","basis","outcome","byproducts"}],"explored":n}`;
    /// `steps` is `null` when no plan exists.
    pub fn to_json(&self) -> Value {
        match self {
            PlanOutcome::Found { plan, byproducts, explored } => json!({
                "steps": plan.steps.iter().zip(byproducts).map(|(s, b)| json!({
                    "vertex": s.vertex.to_string(),
                    "basis": s.basis.to_string(),
                    "outcome": s.outcome.to_string(),
                    "byproducts": b.to_docs(),
                })).collect::<Vec<_>>(),
                "explored": explored,
            }),
            PlanOutcome::NoPlan { explored } => json!({ "steps": null, "explored": explored }),
        }
    }
}
