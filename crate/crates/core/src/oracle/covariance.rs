//! Finite-squeezing cross-check in floating point.
//!
//! Builds the physical graph state from momentum-squeezed vacua
//! (`var p = e^{-2r}/2`, `var x = e^{2r}/2`) and `C_Z` couplings, conditions
//! on each homodyne outcome, undoes a predicted byproduct and reports how
//! far the predicted graph's nullifiers are from zero. A correct
//! prediction gives a residual of order `e^{-2r}`; a wrong one does not
//! shrink with `r`.

use nalgebra::{DMatrix, DVector};

use crate::byproduct::LocalGaussianRecord;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::planner::MeasurementPlan;
use crate::rational::{to_f64, Rational};

/// Gaussian state with interleaved coordinates `(x₀, p₀, x₁, p₁, …)`.
#[derive(Clone, Debug)]
pub struct CovarianceState {
    pub modes: Vec<VertexId>,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub squeezing: f64,
}

impl CovarianceState {
    /// Momentum-squeezed vacua coupled by `C_Z(Ω)` along every edge.
    pub fn graph_state(g: &WeightedGraph, r: f64) -> Self {
        let modes: Vec<VertexId> = g.vertices().cloned().collect();
        let n = modes.len();
        let mut cov = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            cov[(2 * i, 2 * i)] = (2.0 * r).exp() / 2.0;
            cov[(2 * i + 1, 2 * i + 1)] = (-2.0 * r).exp() / 2.0;
        }
        // all C_Z commute, so one linear map covers the whole graph
        let mut m = DMatrix::<f64>::identity(2 * n, 2 * n);
        let pos = |v: &VertexId| modes.binary_search(v).expect("edge endpoint");
        for (a, b, w) in g.edges() {
            let (i, j) = (pos(a), pos(b));
            let w = to_f64(w);
            m[(2 * i + 1, 2 * j)] += w;
            m[(2 * j + 1, 2 * i)] += w;
        }
        let covariance = &m * cov * m.transpose();
        CovarianceState { modes, mean: DVector::zeros(2 * n), covariance, squeezing: r }
    }

    fn index(&self, a: &VertexId) -> Result<usize> {
        self.modes.binary_search(a).map_err(|_| Error::UnknownVertex(a.clone()))
    }

    /// Conditions on `α x̂_a + β p̂_a = value` and traces out mode `a`.
    pub fn condition(&mut self, a: &VertexId, alpha: f64, beta: f64, value: f64) -> Result<()> {
        let i = self.index(a)?;
        let dim = self.mean.len();
        let mut q = DVector::zeros(dim);
        q[2 * i] = alpha;
        q[2 * i + 1] = beta;
        let vq = &self.covariance * &q;
        let var = q.dot(&vq);
        if !(var.is_finite() && var > 1e-300) {
            return Err(Error::SingularConditioning(a.clone()));
        }
        let gain = &vq / var;
        self.mean += &gain * (value - q.dot(&self.mean));
        self.covariance -= &vq * vq.transpose() / var;
        let keep: Vec<usize> = (0..dim).filter(|&k| k / 2 != i).collect();
        self.mean = DVector::from_iterator(keep.len(), keep.iter().map(|&k| self.mean[k]));
        self.covariance = self.covariance.select_rows(&keep).select_columns(&keep);
        self.modes.remove(i);
        Ok(())
    }

    /// Applies the inverse of `ξ ↦ Sξ + d` on every recorded mode.
    pub fn undo_byproduct(&mut self, d: &LocalGaussianRecord) -> Result<()> {
        let dim = self.mean.len();
        let mut l = DMatrix::identity(dim, dim);
        let mut shift = DVector::zeros(dim);
        for (a, op) in d.iter() {
            let i = self.index(a)?;
            let numeric = |e: &crate::outcome::OutcomeExpr| {
                e.as_constant().map(to_f64).ok_or_else(|| Error::NonNumericOutcome(e.to_string()))
            };
            let s = op.symplectic.entries();
            let f = |r: &Rational| to_f64(r);
            // S⁻¹ for a unit-determinant 2×2
            let inv = [[f(&s[1][1]), -f(&s[0][1])], [-f(&s[1][0]), f(&s[0][0])]];
            for (u, row) in inv.iter().enumerate() {
                for (w, val) in row.iter().enumerate() {
                    l[(2 * i + u, 2 * i + w)] = *val;
                }
            }
            shift[2 * i] = numeric(&op.displacement.0)?;
            shift[2 * i + 1] = numeric(&op.displacement.1)?;
        }
        self.mean = &l * (&self.mean - shift);
        self.covariance = &l * &self.covariance * l.transpose();
        Ok(())
    }

    /// `E[g²]` for the linear form `g` (variance plus squared mean).
    pub fn second_moment(&self, g: &DVector<f64>) -> f64 {
        let m = g.dot(&self.mean);
        g.dot(&(&self.covariance * g)) + m * m
    }

    /// Largest second moment over the nullifiers of `graph`.
    pub fn max_nullifier_moment(&self, graph: &WeightedGraph) -> Result<f64> {
        let modes: Vec<VertexId> = graph.vertices().cloned().collect();
        if modes != self.modes {
            return Err(Error::ModeMismatch);
        }
        let mut worst = 0.0f64;
        for (i, a) in modes.iter().enumerate() {
            let mut g = DVector::zeros(self.mean.len());
            g[2 * i + 1] = 1.0;
            for (b, w) in graph.neighbors(a)? {
                g[2 * self.index(&b)?] -= to_f64(&w);
            }
            worst = worst.max(self.second_moment(&g));
        }
        Ok(worst)
    }
}

/// Residual of a predicted post-measurement `(graph, byproduct)` at
/// squeezing `r`: the worst nullifier second moment of the physical state
/// after the plan's measurements and the inverse byproduct.
pub fn covariance_residual(
    g: &WeightedGraph,
    plan: &MeasurementPlan,
    predicted_graph: &WeightedGraph,
    predicted_byproduct: &LocalGaussianRecord,
    r: f64,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidQuery("squeezing must be positive".into()));
    }
    let mut state = CovarianceState::graph_state(g, r);
    for step in &plan.steps {
        let value = step
            .outcome
            .as_constant()
            .map(to_f64)
            .ok_or_else(|| Error::NonNumericOutcome(step.outcome.to_string()))?;
        let (alpha, beta) = step.basis.quadrature();
        state.condition(&step.vertex, to_f64(&alpha), to_f64(&beta), value)?;
    }
    state.undo_byproduct(predicted_byproduct)?;
    state.max_nullifier_moment(predicted_graph)
}

/// Least-squares slope of `ln(residual)` against `r`.
pub fn log_slope(rs: &[f64], residuals: &[f64]) -> Option<f64> {
    if rs.len() < 2 || rs.len() != residuals.len() || residuals.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let n = rs.len() as f64;
    let ys: Vec<f64> = residuals.iter().map(|v| v.ln()).collect();
    let (mx, my) = (rs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = rs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = rs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
