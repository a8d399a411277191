//! Seeded random instances and the rule-versus-oracle checks run by the
//! `verify` command and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::byproduct::LocalGaussianRecord;
use crate::error::Result;
use crate::graph::{v, GraphDoc, VertexId, WeightedGraph};
use crate::oracle::{canonical_graph_form, covariance_residual, graph_to_nullifiers, log_slope, oracle_measure, states_equal, GraphForm};
use crate::outcome::{OutcomeConstraints, OutcomeExpr};
use crate::planner::{MeasurementPlan, PlanStep};
use crate::rational::{rat, Rational};
use crate::rules::{self, MeasurementBasis, OutcomeKind};
use crate::state::TrackedState;

/// Deterministic generator for trial `index` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `±p/q` with `1 ≤ p, q ≤ 5`.
pub fn random_weight<R: Rng>(rng: &mut R) -> Rational {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(sign * rng.gen_range(1..=5), rng.gen_range(1..=5))
}

/// Labels `1..=n`, `n` uniform in `[min, max]`, each edge present with
/// probability 1/2.
pub fn random_graph<R: Rng>(rng: &mut R, min_vertices: usize, max_vertices: usize) -> WeightedGraph {
    let n = rng.gen_range(min_vertices..=max_vertices);
    let mut g = WeightedGraph::new();
    for i in 1..=n {
        g.add_vertex(v(&i.to_string()));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(0.5) {
                let w = random_weight(rng);
                g.set_weight(&v(&i.to_string()), &v(&j.to_string()), w).expect("labels exist");
            }
        }
    }
    g
}

/// The θ grid used by random trials: `tan θ ∈ {±2, ±1, ±1/2}`.
pub fn theta_grid() -> Vec<Rational> {
    vec![rat(2, 1), rat(-2, 1), rat(1, 1), rat(-1, 1), rat(1, 2), rat(-1, 2)]
}

/// `x`, `p` or `θ` with equal probability; `tan θ` uniform on the grid.
pub fn random_basis<R: Rng>(rng: &mut R) -> MeasurementBasis {
    match rng.gen_range(0..3) {
        0 => MeasurementBasis::X,
        1 => MeasurementBasis::P,
        _ => MeasurementBasis::theta(theta_grid().choose(rng).expect("grid is non-empty").clone()),
    }
}

pub fn random_vertex<R: Rng>(rng: &mut R, g: &WeightedGraph) -> VertexId {
    let all: Vec<&VertexId> = g.vertices().collect();
    (*all.choose(rng).expect("graph has vertices")).clone()
}

/// A rule application compared against direct projection.
#[derive(Clone, Debug)]
pub struct RuleCheck {
    pub equal: bool,
    pub rule: rules::RewriteResult,
    /// Post-measurement state of the oracle, for certificates.
    pub oracle_form: GraphForm,
}

/// Applies the rule for `(a, basis)` and checks its output, with the
/// byproduct applied, against the oracle's projection of the input state.
pub fn check_rule(
    g: &WeightedGraph,
    a: &VertexId,
    basis: &MeasurementBasis,
    outcome: &OutcomeExpr,
    b0: Option<&VertexId>,
) -> Result<RuleCheck> {
    let rule = rules::measure(g, a, basis, outcome, b0)?;
    let before = graph_to_nullifiers(g, &LocalGaussianRecord::identity())?;
    let projected = oracle_measure(&before, a, basis, outcome)?;
    let predicted = graph_to_nullifiers(&rule.graph, &rule.byproduct)?;
    let kinds_agree = match (&rule.outcome_kind, &projected.forced) {
        (OutcomeKind::Random, None) => true,
        (OutcomeKind::Deterministic(x), Some(y)) => x == y,
        _ => false,
    };
    let equal = kinds_agree && states_equal(&predicted, &projected.system)?;
    Ok(RuleCheck { equal, rule, oracle_form: canonical_graph_form(&projected.system) })
}

/// Measures `(a, basis_a)` and `(b, basis_b)` in both orders and compares
/// the final physical states under the oracle, after imposing every
/// relation that deterministic outcomes forced on the symbols.
pub fn check_order_independence(
    g: &WeightedGraph,
    first: (&VertexId, &MeasurementBasis),
    second: (&VertexId, &MeasurementBasis),
) -> Result<bool> {
    let (ma, mb) = (OutcomeExpr::symbol("ma"), OutcomeExpr::symbol("mb"));
    let start = TrackedState::new(g.clone());
    let ab = start.measure(first.0, first.1, &ma, None)?.0.measure(second.0, second.1, &mb, None)?.0;
    let ba = start.measure(second.0, second.1, &mb, None)?.0.measure(first.0, first.1, &ma, None)?.0;
    if ab.graph.vertices().ne(ba.graph.vertices()) {
        return Ok(false);
    }
    let mut constraints = OutcomeConstraints::new();
    constraints.merge(&ab.constraints)?;
    constraints.merge(&ba.constraints)?;
    let s = constraints.substitution();
    let left = graph_to_nullifiers(&ab.graph, &ab.byproduct)?.substitute(s);
    let right = graph_to_nullifiers(&ba.graph, &ba.byproduct)?.substitute(s);
    states_equal(&left, &right)
}

/// One line of the verification report.
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub graph: GraphDoc,
    pub action: String,
    pub symbolic_equal: bool,
    pub covariance_slope: Option<f64>,
    pub certificate: Option<Value>,
}

/// A random single measurement with the checks the report asks for.
pub fn run_trial(seed: u64, max_vertices: usize, r_list: Option<&[f64]>) -> Result<TrialReport> {
    let mut rng = rng(seed);
    let g = random_graph(&mut rng, 1, max_vertices.max(1));
    let a = random_vertex(&mut rng, &g);
    let basis = random_basis(&mut rng);
    let b0 = if basis == MeasurementBasis::P {
        g.neighbors(&a)?.choose(&mut rng).map(|(b, _)| b.clone())
    } else {
        None
    };
    let outcome = OutcomeExpr::symbol("m");
    let check = check_rule(&g, &a, &basis, &outcome, b0.as_ref())?;
    let mut action = format!("{a}:{basis}@m");
    if let Some(b) = &b0 {
        action.push_str(&format!(":b0={b}"));
    }
    let certificate = match &check.oracle_form {
        GraphForm::NotGraphForm(c) => Some(c.to_json(check.rule.graph.vertices().cloned().collect::<Vec<_>>().as_slice())),
        GraphForm::Graph(..) => None,
    };
    let covariance_slope = match r_list {
        Some(rs) if check.rule.graph.order() > 0 => {
            let value = match &check.rule.outcome_kind {
                OutcomeKind::Deterministic(v) => v.clone(),
                OutcomeKind::Random => OutcomeExpr::constant(rat(rng.gen_range(-8..=8), 4)),
            };
            let subst = [("m".to_string(), value.clone())].into_iter().collect();
            let byproduct = check.rule.byproduct.substitute(&subst);
            let plan = MeasurementPlan { steps: vec![PlanStep { vertex: a.clone(), basis: basis.clone(), outcome: value }] };
            let residuals: Vec<f64> = rs
                .iter()
                .map(|&r| covariance_residual(&g, &plan, &check.rule.graph, &byproduct, r))
                .collect::<Result<_>>()?;
            log_slope(rs, &residuals)
        }
        _ => None,
    };
    Ok(TrialReport {
        seed,
        graph: g.to_doc(),
        action,
        symbolic_equal: check.equal,
        covariance_slope,
        certificate,
    })
}

/// A seeded finite-squeezing instance: a graph, a plan with numeric
/// outcomes, and the tracked prediction for it.
#[derive(Clone, Debug)]
pub struct CovarianceCase {
    pub graph: WeightedGraph,
    pub plan: MeasurementPlan,
    pub predicted: TrackedState,
}

impl CovarianceCase {
    /// Draws graphs of 3 to 6 vertices and one or two measurements until
    /// the outcome is random at every step and at least two modes survive.
    pub fn random(seed: u64) -> CovarianceCase {
        let mut rng = rng(seed);
        loop {
            let g = random_graph(&mut rng, 3, 6);
            let steps = rng.gen_range(1..=2);
            let mut state = TrackedState::new(g.clone());
            let mut plan = MeasurementPlan::default();
            let mut ok = true;
            for _ in 0..steps {
                let a = random_vertex(&mut rng, &state.graph);
                let basis = random_basis(&mut rng);
                let outcome = OutcomeExpr::constant(rat(rng.gen_range(-8..=8), 4));
                match state.measure(&a, &basis, &outcome, None) {
                    Ok((next, OutcomeKind::Random)) => {
                        state = next;
                        plan.steps.push(PlanStep { vertex: a, basis, outcome });
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && state.graph.order() >= 2 {
                return CovarianceCase { graph: g, plan, predicted: state };
            }
        }
    }

    pub fn residual(&self, r: f64) -> Result<f64> {
        covariance_residual(&self.graph, &self.plan, &self.predicted.graph, &self.predicted.byproduct, r)
    }

    /// Slope of `ln(residual)` over `rs`.
    pub fn slope(&self, rs: &[f64]) -> Result<Option<f64>> {
        let residuals: Vec<f64> = rs.iter().map(|&r| self.residual(r)).collect::<Result<_>>()?;
        Ok(log_slope(rs, &residuals))
    }

    /// The same case with one predicted weight off by one: the first edge
    /// when there is one, otherwise a new unit edge between the first two
    /// surviving vertices.
    pub fn perturbed(&self) -> CovarianceCase {
        let mut out = self.clone();
        let g = &mut out.predicted.graph;
        let (a, b) = match g.edges().next() {
            Some((a, b, _)) => (a.clone(), b.clone()),
            None => {
                let mut it = g.vertices();
                (it.next().expect("two modes").clone(), it.next().expect("two modes").clone())
            }
        };
        let w = g.weight(&a, &b) + Rational::from_integer(1.into());
        g.set_weight(&a, &b, w).expect("vertices exist");
        out
    }
}
