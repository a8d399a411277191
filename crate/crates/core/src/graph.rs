//! Weighted graphs with exact rational edge weights.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// A vertex (mode) label.
///
/// Labels order "naturally": purely numeric labels compare by value and
/// sort before all other labels, which compare as strings. This is the
/// order used for canonical forms, default neighbor choices and planner
/// action enumeration.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VertexId(String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c == ':' || c == '@' || c.is_whitespace()) {
            return Err(Error::InvalidLabel(name));
        }
        Ok(VertexId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric_key(&self) -> Option<&str> {
        if self.0.bytes().all(|b| b.is_ascii_digit()) {
            Some(self.0.trim_start_matches('0'))
        } else {
            None
        }
    }
}

impl TryFrom<String> for VertexId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        VertexId::new(s)
    }
}

impl From<VertexId> for String {
    fn from(v: VertexId) -> String {
        v.0
    }
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric_key(), other.numeric_key()) {
            (Some(a), Some(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.cmp(b))
                .then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Shorthand for building labels in tests and examples. Panics on an
/// invalid label.
pub fn v(name: &str) -> VertexId {
    VertexId::new(name).expect("valid vertex label")
}

fn edge_key(a: &VertexId, b: &VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// An undirected graph whose edges carry nonzero rational weights.
///
/// Invariants: no self-loops, no stored zero weight, every endpoint is a
/// vertex. Edge keys are unordered pairs stored with the smaller label
/// first, so symmetry holds by construction.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<(VertexId, VertexId), Rational>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unweighted path `1 - 2 - ... - n` with unit weights.
    pub fn chain(n: usize) -> Self {
        let mut g = Self::new();
        for i in 1..=n {
            g.add_vertex(v(&i.to_string()));
        }
        for i in 1..n {
            g.set_weight(&v(&i.to_string()), &v(&(i + 1).to_string()), crate::rational::int(1))
                .expect("chain endpoints exist");
        }
        g
    }

    pub fn add_vertex(&mut self, a: VertexId) -> bool {
        self.vertices.insert(a)
    }

    pub fn contains(&self, a: &VertexId) -> bool {
        self.vertices.contains(a)
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &VertexId> + '_ {
        self.vertices.iter()
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, &Rational)> + '_ {
        self.edges.iter().map(|((a, b), w)| (a, b, w))
    }

    pub fn weight(&self, a: &VertexId, b: &VertexId) -> Rational {
        self.edges.get(&edge_key(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sets the weight of edge `a-b`; a zero weight removes the edge.
    pub fn set_weight(&mut self, a: &VertexId, b: &VertexId, w: Rational) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(a.clone()));
        }
        let key = edge_key(a, b);
        if w.is_zero() {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, w);
        }
        Ok(())
    }

    pub fn check(&self, a: &VertexId) -> Result<()> {
        if self.vertices.contains(a) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(a.clone()))
        }
    }

    /// Vertices sharing a nonzero edge with `a`, in label order.
    pub fn neighbors(&self, a: &VertexId) -> Result<Vec<(VertexId, Rational)>> {
        self.check(a)?;
        let mut out: Vec<(VertexId, Rational)> = self
            .edges
            .iter()
            .filter_map(|((x, y), w)| {
                if x == a {
                    Some((y.clone(), w.clone()))
                } else if y == a {
                    Some((x.clone(), w.clone()))
                } else {
                    None
                }
            })
            .collect();
        out.sort_by(|l, r| l.0.cmp(&r.0));
        Ok(out)
    }

    /// Removes `a` and every edge incident to it. Other labels are kept.
    pub fn remove_vertex(&mut self, a: &VertexId) -> Result<()> {
        self.check(a)?;
        self.vertices.remove(a);
        self.edges.retain(|(x, y), _| x != a && y != a);
        Ok(())
    }

    /// The subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> WeightedGraph {
        WeightedGraph {
            vertices: self.vertices.intersection(keep).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|((a, b), _)| keep.contains(a) && keep.contains(b))
                .map(|(k, w)| (k.clone(), w.clone()))
                .collect(),
        }
    }

    /// Whether the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(x) = stack.pop() {
            for (y, _) in self.neighbors(&x).expect("vertex exists") {
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    pub(crate) fn assert_invariants(&self) {
        for ((a, b), w) in &self.edges {
            debug_assert!(a < b, "edge key not ordered");
            debug_assert!(!w.is_zero(), "zero weight stored");
            debug_assert!(self.vertices.contains(a) && self.vertices.contains(b));
        }
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            modes: self.vertices.iter().map(|a| a.to_string()).collect(),
            edges: self
                .edges()
                .map(|(a, b, w)| EdgeDoc {
                    u: a.to_string(),
                    v: b.to_string(),
                    w: format_rational(w),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        let mut g = WeightedGraph::new();
        for m in &doc.modes {
            let id = VertexId::new(m.clone())?;
            if !g.add_vertex(id.clone()) {
                return Err(Error::DuplicateVertex(id));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &doc.edges {
            let a = VertexId::new(e.u.clone())?;
            let b = VertexId::new(e.v.clone())?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            g.check(&a)?;
            g.check(&b)?;
            if !seen.insert(edge_key(&a, &b)) {
                return Err(Error::DuplicateEdge(a, b));
            }
            let w = parse_rational(&e.w)?;
            g.set_weight(&a, &b, w)?;
        }
        g.assert_invariants();
        Ok(g)
    }

    /// Canonical JSON text; equal graphs serialize identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("graph document serializes")
    }

    /// Graphviz rendering: one node per vertex, one undirected edge per
    /// weighted edge labeled with its weight.
    pub fn to_dot(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut out = String::from("graph G {\n");
        for a in &self.vertices {
            out.push_str(&format!("  {};\n", quote(a.as_str())));
        }
        for (a, b, w) in self.edges() {
            out.push_str(&format!(
                "  {} -- {} [label={}];\n",
                quote(a.as_str()),
                quote(b.as_str()),
                quote(&format_rational(w))
            ));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Wire form of a graph: `{"modes":[..],"edges":[{"u","v","w"}..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub modes: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub w: String,
}

/// Parses the graph JSON schema into a normalized graph.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    WeightedGraph::from_doc(&doc)
}

pub fn serialize_graph(g: &WeightedGraph) -> String {
    g.to_json()
}
