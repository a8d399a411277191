//! Exact affine-Lagrangian description of ideal Gaussian states.
//!
//! An ideal (infinitely squeezed) Gaussian pure state on `n` modes is
//! pinned down by `n` independent, mutually commuting linear relations
//! `s·x̂ + t·p̂ = c`. This module manipulates those relations directly and
//! does not use the graph rewrite rules; it is the reference they are
//! checked against.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::byproduct::LocalGaussianRecord;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::outcome::{AffineDoc, OutcomeExpr};
use crate::rational::{format_rational, Rational};
use crate::rules::MeasurementBasis;

/// One relation `s·x̂ + t·p̂ = c`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NullifierRow {
    pub s: Vec<Rational>,
    pub t: Vec<Rational>,
    pub c: OutcomeExpr,
}

impl NullifierRow {
    fn coeff(&self, col: usize, n: usize) -> &Rational {
        if col < n {
            &self.s[col]
        } else {
            &self.t[col - n]
        }
    }

    fn is_linear_zero(&self) -> bool {
        self.s.iter().chain(&self.t).all(Zero::is_zero)
    }

    fn scale(&mut self, k: &Rational) {
        self.s.iter_mut().chain(self.t.iter_mut()).for_each(|v| *v *= k);
        self.c = self.c.scale(k);
    }

    /// `self += k·other`
    fn add_scaled(&mut self, other: &NullifierRow, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (a, b) in self.s.iter_mut().zip(&other.s) {
            *a += b * k;
        }
        for (a, b) in self.t.iter_mut().zip(&other.t) {
            *a += b * k;
        }
        self.c.add_scaled(&other.c, k);
    }

    fn drop_mode(&mut self, i: usize) {
        self.s.remove(i);
        self.t.remove(i);
    }

    /// Symplectic form `s·t' − t·s'`.
    fn omega(&self, other: &NullifierRow) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.s.len() {
            acc += &self.s[i] * &other.t[i] - &self.t[i] * &other.s[i];
        }
        acc
    }

    pub fn display(&self, modes: &[VertexId]) -> String {
        let mut out = String::new();
        let cols = self
            .s
            .iter()
            .zip(modes)
            .map(|(k, m)| (k, format!("x{m}")))
            .chain(self.t.iter().zip(modes).map(|(k, m)| (k, format!("p{m}"))));
        for (k, name) in cols {
            if k.is_zero() {
                continue;
            }
            let sign = if k.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if k.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if !k.abs().is_one() {
                out.push_str(&format!("{}*", format_rational(&k.abs())));
            }
            out.push_str(&name);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} = {}", self.c)
    }

    fn to_doc(&self, modes: &[VertexId]) -> RowDoc {
        let nz = |v: &[Rational]| {
            v.iter()
                .zip(modes)
                .filter(|(k, _)| !k.is_zero())
                .map(|(k, m)| (m.to_string(), format_rational(k)))
                .collect()
        };
        RowDoc { x: nz(&self.s), p: nz(&self.t), constant: self.c.to_doc() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowDoc {
    pub x: BTreeMap<String, String>,
    pub p: BTreeMap<String, String>,
    #[serde(rename = "const")]
    pub constant: AffineDoc,
}

/// `n` independent commuting relations on `n` modes (modes in label order).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NullifierSystem {
    modes: Vec<VertexId>,
    rows: Vec<NullifierRow>,
}

fn inverse_2x2(m: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    [
        [&m[1][1] / &det, -(&m[0][1] / &det)],
        [-(&m[1][0] / &det), &m[0][0] / &det],
    ]
}

impl NullifierSystem {
    /// Validates independence, row count and isotropy.
    pub fn new(modes: Vec<VertexId>, rows: Vec<NullifierRow>) -> Result<Self> {
        let n = modes.len();
        if modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuery("modes must be distinct and in label order".into()));
        }
        if rows.len() != n || rows.iter().any(|r| r.s.len() != n || r.t.len() != n) {
            return Err(Error::InvalidQuery(format!("need {n} rows over {n} modes")));
        }
        let ns = NullifierSystem { modes, rows };
        if !ns.is_isotropic() {
            return Err(Error::InvalidQuery("rows do not commute".into()));
        }
        if ns.rref(false).rows.iter().any(NullifierRow::is_linear_zero) {
            return Err(Error::InvalidQuery("rows are linearly dependent".into()));
        }
        Ok(ns)
    }

    pub fn modes(&self) -> &[VertexId] {
        &self.modes
    }

    pub fn rows(&self) -> &[NullifierRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    fn index(&self, a: &VertexId) -> Result<usize> {
        self.modes.binary_search(a).map_err(|_| Error::UnknownVertex(a.clone()))
    }

    /// Every pair of rows has vanishing symplectic form.
    pub fn is_isotropic(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| self.rows[i + 1..].iter().all(|q| r.omega(q).is_zero()))
    }

    /// Row-reduced echelon form. Column order is all `x` then all `p`
    /// (`p_first == false`) or the reverse. Constants ride along.
    fn rref(&self, p_first: bool) -> NullifierSystem {
        let n = self.modes.len();
        let col = |j: usize| if p_first { (j + n) % (2 * n) } else { j };
        let mut rows = self.rows.clone();
        let mut r = 0;
        for j in 0..2 * n {
            let c = col(j);
            let Some(piv) = (r..rows.len()).find(|&i| !rows[i].coeff(c, n).is_zero()) else {
                continue;
            };
            rows.swap(r, piv);
            let inv = Rational::one() / rows[r].coeff(c, n);
            rows[r].scale(&inv);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r {
                    let k = -row.coeff(c, n).clone();
                    row.add_scaled(&pivot, &k);
                }
            }
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        NullifierSystem { modes: self.modes.clone(), rows }
    }

    /// Unique normal form: reduced row echelon over `x` columns then `p`
    /// columns, modes in label order.
    pub fn canonical(&self) -> NullifierSystem {
        self.rref(false)
    }

    pub fn substitute(&self, subst: &BTreeMap<String, OutcomeExpr>) -> NullifierSystem {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.c = r.c.substitute(subst);
        }
        out
    }

    /// Applies the phase-space map `ξ ↦ Mξ + d` on mode `i`: each row
    /// `r` becomes `r·M⁻¹` with constant `c + (r·M⁻¹)·d`.
    fn apply_local(&mut self, i: usize, m: &[[Rational; 2]; 2], d: (&OutcomeExpr, &OutcomeExpr)) {
        let inv = inverse_2x2(m);
        for row in &mut self.rows {
            let (s, t) = (row.s[i].clone(), row.t[i].clone());
            row.s[i] = &s * &inv[0][0] + &t * &inv[1][0];
            row.t[i] = &s * &inv[0][1] + &t * &inv[1][1];
            row.c.add_scaled(d.0, &row.s[i]);
            row.c.add_scaled(d.1, &row.t[i]);
        }
    }

    pub fn to_docs(&self) -> Vec<RowDoc> {
        self.rows.iter().map(|r| r.to_doc(&self.modes)).collect()
    }
}

impl fmt::Display for NullifierSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.display(&self.modes)).collect();
        write!(f, "{{{}}}", rows.join(", "))
    }
}

/// Nullifiers `p_a − Σ_b Ω_ab x_b = 0` of the graph state, transformed by
/// the local byproducts in `d`.
pub fn graph_to_nullifiers(g: &WeightedGraph, d: &LocalGaussianRecord) -> Result<NullifierSystem> {
    let modes: Vec<VertexId> = g.vertices().cloned().collect();
    let n = modes.len();
    let pos: BTreeMap<&VertexId, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<NullifierRow> = (0..n)
        .map(|i| {
            let mut t = vec![Rational::zero(); n];
            t[i] = Rational::one();
            NullifierRow { s: vec![Rational::zero(); n], t, c: OutcomeExpr::zero() }
        })
        .collect();
    for (a, b, w) in g.edges() {
        let (i, j) = (pos[a], pos[b]);
        rows[i].s[j] = -w.clone();
        rows[j].s[i] = -w.clone();
    }
    let mut ns = NullifierSystem { modes, rows };
    for (a, op) in d.iter() {
        let i = ns.index(a)?;
        ns.apply_local(i, op.symplectic.entries(), (&op.displacement.0, &op.displacement.1));
    }
    Ok(ns)
}

/// Gaussian gates, given by their Heisenberg action `U† ξ U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymplecticGate {
    /// `x ↦ −p`, `p ↦ x`
    Fourier(VertexId),
    /// `x ↦ p`, `p ↦ −x`
    InverseFourier(VertexId),
    /// `p ↦ p + η x`
    Phase(VertexId, Rational),
    /// `x ↦ x − η p`
    PhaseX(VertexId, Rational),
    /// `p₁ ↦ p₁ + Ω x₂`, `p₂ ↦ p₂ + Ω x₁`
    Cz(VertexId, VertexId, Rational),
    /// `x ↦ x + s`
    XShift(VertexId, OutcomeExpr),
    /// `p ↦ p + t`
    ZShift(VertexId, OutcomeExpr),
}

impl SymplecticGate {
    pub fn inverse(&self) -> SymplecticGate {
        use SymplecticGate::*;
        match self {
            Fourier(a) => InverseFourier(a.clone()),
            InverseFourier(a) => Fourier(a.clone()),
            Phase(a, e) => Phase(a.clone(), -e.clone()),
            PhaseX(a, e) => PhaseX(a.clone(), -e.clone()),
            Cz(a, b, w) => Cz(a.clone(), b.clone(), -w.clone()),
            XShift(a, s) => XShift(a.clone(), -s),
            ZShift(a, t) => ZShift(a.clone(), -t),
        }
    }
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Conjugates every relation by the gate.
pub fn apply_gate(ns: &NullifierSystem, gate: &SymplecticGate) -> Result<NullifierSystem> {
    let mut out = ns.clone();
    let zero = OutcomeExpr::zero();
    match gate {
        SymplecticGate::Fourier(a) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(0), r(-1)], [r(1), r(0)]], (&zero, &zero));
        }
        SymplecticGate::InverseFourier(a) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(0), r(1)], [r(-1), r(0)]], (&zero, &zero));
        }
        SymplecticGate::Phase(a, eta) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(1), r(0)], [eta.clone(), r(1)]], (&zero, &zero));
        }
        SymplecticGate::PhaseX(a, eta) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(1), -eta.clone()], [r(0), r(1)]], (&zero, &zero));
        }
        SymplecticGate::XShift(a, s) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(1), r(0)], [r(0), r(1)]], (s, &zero));
        }
        SymplecticGate::ZShift(a, t) => {
            let i = out.index(a)?;
            out.apply_local(i, &[[r(1), r(0)], [r(0), r(1)]], (&zero, t));
        }
        SymplecticGate::Cz(a, b, w) => {
            let (i, j) = (out.index(a)?, out.index(b)?);
            if i == j {
                return Err(Error::SelfLoop(a.clone()));
            }
            // rows transform by M⁻¹: p_i ↦ p_i − Ω x_j, p_j ↦ p_j − Ω x_i
            for row in &mut out.rows {
                let (ti, tj) = (row.t[i].clone(), row.t[j].clone());
                row.s[j] -= w * &ti;
                row.s[i] -= w * &tj;
            }
        }
    }
    Ok(out)
}

/// Result of projecting one quadrature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleMeasurement {
    pub system: NullifierSystem,
    /// `Some(v)` when the state already fixes the measured quadrature to `v`.
    pub forced: Option<OutcomeExpr>,
}

/// Solves `Σ y_i·row_i = target` over the linear parts.
fn solve_combination(rows: &[NullifierRow], target: &NullifierRow) -> Option<Vec<Rational>> {
    let k = rows.len();
    let n = target.s.len();
    // augmented columns: one per unknown y_i, then the target
    let mut eqs: Vec<Vec<Rational>> = (0..2 * n)
        .map(|c| {
            let mut e: Vec<Rational> = rows.iter().map(|r| r.coeff(c, n).clone()).collect();
            e.push(target.coeff(c, n).clone());
            e
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for col in 0..k {
        let Some(p) = (r0..eqs.len()).find(|&i| !eqs[i][col].is_zero()) else {
            continue;
        };
        eqs.swap(r0, p);
        let inv = Rational::one() / &eqs[r0][col];
        eqs[r0].iter_mut().for_each(|v| *v *= &inv);
        let pivot = eqs[r0].clone();
        for (i, e) in eqs.iter_mut().enumerate() {
            if i != r0 && !e[col].is_zero() {
                let f = e[col].clone();
                e.iter_mut().zip(&pivot).for_each(|(v, pv)| *v -= &f * pv);
            }
        }
        pivots.push((r0, col));
        r0 += 1;
    }
    if eqs[r0..].iter().any(|e| !e[k].is_zero()) {
        return None;
    }
    let mut y = vec![Rational::zero(); k];
    for (row, col) in pivots {
        y[col] = eqs[row][k].clone();
    }
    Some(y)
}

/// Projects the quadrature `basis` of mode `a` onto `outcome` by exact
/// elimination, returning the state of the remaining modes.
pub fn oracle_measure(
    ns: &NullifierSystem,
    a: &VertexId,
    basis: &MeasurementBasis,
    outcome: &OutcomeExpr,
) -> Result<OracleMeasurement> {
    let i = ns.index(a)?;
    let n = ns.modes.len();
    let (alpha, beta) = basis.quadrature();
    let commutator = |row: &NullifierRow| &row.s[i] * &beta - &row.t[i] * &alpha;
    let mut rows = ns.rows.clone();
    let mut modes = ns.modes.clone();

    let pivot = rows.iter().position(|row| !commutator(row).is_zero());
    let forced = match pivot {
        None => {
            let mut target = NullifierRow { s: vec![r(0); n], t: vec![r(0); n], c: OutcomeExpr::zero() };
            target.s[i] = alpha.clone();
            target.t[i] = beta.clone();
            let y = solve_combination(&rows, &target).ok_or_else(|| {
                Error::InvalidQuery("measured quadrature commutes with the state but is not fixed by it".into())
            })?;
            let mut value = OutcomeExpr::zero();
            for (yi, row) in y.iter().zip(&rows) {
                value.add_scaled(&row.c, yi);
            }
            if let Some(c) = outcome.as_constant() {
                if value.is_constant() && value.constant_part() != c {
                    return Err(Error::InconsistentOutcome { given: outcome.to_string(), forced: value.to_string() });
                }
            }
            // every row's a-part is a multiple of the quadrature; clear it
            let lam = |row: &NullifierRow| if alpha.is_zero() { &row.t[i] / &beta } else { &row.s[i] / &alpha };
            let p = rows.iter().position(|row| !lam(row).is_zero()).expect("quadrature lies in the row span");
            let prow = rows.remove(p);
            let lp = lam(&prow);
            for row in &mut rows {
                let k = -(lam(row) / &lp);
                row.add_scaled(&prow, &k);
            }
            Some(value)
        }
        Some(p) => {
            let prow = rows.remove(p);
            let fp = commutator(&prow);
            for row in &mut rows {
                let k = -(commutator(row) / &fp);
                row.add_scaled(&prow, &k);
                let lam = if alpha.is_zero() { &row.t[i] / &beta } else { &row.s[i] / &alpha };
                row.c.add_scaled(outcome, &-lam);
            }
            None
        }
    };
    for row in &mut rows {
        row.drop_mode(i);
    }
    modes.remove(i);
    let system = NullifierSystem { modes, rows };
    debug_assert!(system.is_isotropic());
    Ok(OracleMeasurement { system, forced })
}

/// Exact equality of the states described by two systems.
pub fn states_equal(n1: &NullifierSystem, n2: &NullifierSystem) -> Result<bool> {
    if n1.modes != n2.modes {
        return Err(Error::ModeMismatch);
    }
    Ok(n1.canonical() == n2.canonical())
}

/// Why a system is not a displaced graph state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A relation with no momentum terms, so the momentum block is singular.
    PositionOnly(NullifierRow),
    /// The recovered adjacency has a nonzero diagonal entry.
    SelfLoop { vertex: VertexId, weight: Rational },
}

impl Certificate {
    pub fn to_json(&self, modes: &[VertexId]) -> serde_json::Value {
        match self {
            Certificate::PositionOnly(row) => serde_json::json!({
                "kind": "position_only",
                "relation": row.display(modes),
                "row": row.to_doc(modes),
            }),
            Certificate::SelfLoop { vertex, weight } => serde_json::json!({
                "kind": "self_loop",
                "vertex": vertex.to_string(),
                "weight": format_rational(weight),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphForm {
    Graph(WeightedGraph, LocalGaussianRecord),
    NotGraphForm(Certificate),
}

/// Recovers `(graph, momentum shifts)` from a system when the momentum
/// block is invertible and the adjacency has a zero diagonal.
pub fn canonical_graph_form(ns: &NullifierSystem) -> GraphForm {
    use crate::byproduct::LocalGaussian;
    let n = ns.modes.len();
    let red = ns.rref(true);
    for (i, row) in red.rows.iter().enumerate() {
        if !row.t[i].is_one() || row.t.iter().enumerate().any(|(j, v)| j != i && !v.is_zero()) {
            let cert = red
                .rows
                .iter()
                .find(|r| r.t.iter().all(Zero::is_zero))
                .cloned()
                .expect("singular momentum block leaves a position-only row");
            return GraphForm::NotGraphForm(Certificate::PositionOnly(cert));
        }
    }
    let mut g = WeightedGraph::new();
    for m in &ns.modes {
        g.add_vertex(m.clone());
    }
    let mut shifts = LocalGaussianRecord::identity();
    for i in 0..n {
        let row = &red.rows[i];
        if !row.s[i].is_zero() {
            return GraphForm::NotGraphForm(Certificate::SelfLoop {
                vertex: ns.modes[i].clone(),
                weight: -row.s[i].clone(),
            });
        }
        for j in i + 1..n {
            g.set_weight(&ns.modes[i], &ns.modes[j], -row.s[j].clone()).expect("distinct modes");
        }
        shifts.set(ns.modes[i].clone(), LocalGaussian::z_shift(row.c.clone()));
    }
    GraphForm::Graph(g, shifts)
}
