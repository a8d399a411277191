//! Measurement action strings used by the command line and the HTTP API:
//!
//! ```text
//! <vertex>:x[@<outcome>]
//! <vertex>:p[@<outcome>][:b0=<vertex>]
//! <vertex>:theta:<tan>[@<outcome>]
//! ```
//!
//! An outcome is a symbol name or a rational literal. When it is missing
//! the caller supplies a fresh symbol.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::outcome::OutcomeExpr;
use crate::rules::MeasurementBasis;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub vertex: VertexId,
    pub basis: MeasurementBasis,
    pub outcome: Option<OutcomeExpr>,
    pub b0: Option<VertexId>,
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::BadAction(s.to_string(), why.to_string());
        let (vertex, rest) = s.split_once(':').ok_or_else(|| bad("expected <vertex>:<basis>"))?;
        let vertex = VertexId::new(vertex).map_err(|_| bad("invalid vertex label"))?;
        let (rest, b0) = match rest.rsplit_once(":b0=") {
            Some((r, b)) => (r, Some(VertexId::new(b).map_err(|_| bad("invalid b0 label"))?)),
            None => (rest, None),
        };
        let (basis, outcome) = match rest.split_once('@') {
            Some((b, o)) => (b, Some(OutcomeExpr::parse(o).map_err(|_| bad("invalid outcome"))?)),
            None => (rest, None),
        };
        let basis: MeasurementBasis = basis.parse().map_err(|_| bad("unknown basis"))?;
        if b0.is_some() && basis != MeasurementBasis::P {
            return Err(bad("b0 is only meaningful for p measurements"));
        }
        Ok(Action { vertex, basis, outcome, b0 })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.vertex, self.basis)?;
        if let Some(o) = &self.outcome {
            write!(f, "@{o}")?;
        }
        if let Some(b) = &self.b0 {
            write!(f, ":b0={b}")?;
        }
        Ok(())
    }
}

/// Hands out `m1, m2, …`, skipping names already in use.
#[derive(Debug, Default, Clone)]
pub struct FreshSymbols {
    next: usize,
    taken: std::collections::BTreeSet<String>,
}

impl FreshSymbols {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self, e: &OutcomeExpr) {
        self.taken.extend(e.terms().keys().cloned());
    }

    pub fn fresh(&mut self) -> OutcomeExpr {
        loop {
            self.next += 1;
            let name = format!("m{}", self.next);
            if self.taken.insert(name.clone()) {
                return OutcomeExpr::symbol(&name);
            }
        }
    }
}
