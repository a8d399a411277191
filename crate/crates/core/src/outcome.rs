//! Affine expressions in named measurement-outcome symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// `constant + Σ coeff·symbol`, exact. Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeExpr {
    constant: Rational,
    terms: BTreeMap<String, Rational>,
}

impl OutcomeExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        OutcomeExpr { constant: c, terms: BTreeMap::new() }
    }

    pub fn symbol(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), Rational::one());
        OutcomeExpr { constant: Rational::zero(), terms }
    }

    /// A symbol name or a rational literal.
    pub fn parse(s: &str) -> Result<Self> {
        if let Ok(r) = parse_rational(s) {
            return Ok(Self::constant(r));
        }
        let mut chars = s.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Self::symbol(s))
        } else {
            Err(Error::BadRational(s.to_string()))
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<String, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, sym: &str) -> Rational {
        self.terms.get(sym).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.is_constant().then_some(&self.constant)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        OutcomeExpr {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &OutcomeExpr, k: &Rational) {
        if k.is_zero() {
            return;
        }
        self.constant += &other.constant * k;
        for (s, c) in &other.terms {
            let entry = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
            *entry += c * k;
            if entry.is_zero() {
                self.terms.remove(s);
            }
        }
    }

    /// Replaces each symbol found in `subst` by its expression.
    pub fn substitute(&self, subst: &BTreeMap<String, OutcomeExpr>) -> Self {
        let mut out = OutcomeExpr::constant(self.constant.clone());
        for (s, c) in &self.terms {
            match subst.get(s) {
                Some(e) => out.add_scaled(e, c),
                None => out.add_scaled(&OutcomeExpr::symbol(s), c),
            }
        }
        out
    }

    pub fn to_doc(&self) -> AffineDoc {
        AffineDoc {
            constant: format_rational(&self.constant),
            terms: self.terms.iter().map(|(s, c)| (s.clone(), format_rational(c))).collect(),
        }
    }

    pub fn from_doc(doc: &AffineDoc) -> Result<Self> {
        let mut out = OutcomeExpr::constant(parse_rational(&doc.constant)?);
        for (s, c) in &doc.terms {
            out.add_scaled(&OutcomeExpr::symbol(s), &parse_rational(c)?);
        }
        Ok(out)
    }
}

impl From<Rational> for OutcomeExpr {
    fn from(c: Rational) -> Self {
        OutcomeExpr::constant(c)
    }
}

impl Add for &OutcomeExpr {
    type Output = OutcomeExpr;
    fn add(self, rhs: &OutcomeExpr) -> OutcomeExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &OutcomeExpr {
    type Output = OutcomeExpr;
    fn sub(self, rhs: &OutcomeExpr) -> OutcomeExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &OutcomeExpr {
    type Output = OutcomeExpr;
    fn neg(self) -> OutcomeExpr {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for OutcomeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{sign}{s}")?;
            } else {
                write!(f, "{sign}{}*{s}", format_rational(&mag))?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", format_rational(&self.constant))
        } else if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, "{sign}{}", format_rational(&self.constant.abs()))
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for OutcomeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OutcomeExpr({self})")
    }
}

/// Wire form `{"const": r, "terms": {symbol: r}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineDoc {
    #[serde(rename = "const")]
    pub constant: String,
    #[serde(default)]
    pub terms: BTreeMap<String, String>,
}

/// Linear relations among outcome symbols forced by deterministic
/// measurements, kept solved: each entry eliminates one symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeConstraints {
    solved: BTreeMap<String, OutcomeExpr>,
}

impl OutcomeConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.solved.is_empty()
    }

    pub fn substitution(&self) -> &BTreeMap<String, OutcomeExpr> {
        &self.solved
    }

    /// Adds `lhs = rhs`. The largest symbol left after substitution is
    /// eliminated. A contradiction between constants is an error.
    pub fn add(&mut self, lhs: &OutcomeExpr, rhs: &OutcomeExpr) -> Result<()> {
        let diff = (lhs - rhs).substitute(&self.solved);
        let Some((sym, coeff)) = diff.terms.iter().next_back().map(|(s, c)| (s.clone(), c.clone()))
        else {
            if diff.constant.is_zero() {
                return Ok(());
            }
            return Err(Error::InconsistentOutcome {
                given: lhs.to_string(),
                forced: rhs.to_string(),
            });
        };
        // sym = -(diff - coeff*sym)/coeff
        let mut rest = diff.clone();
        rest.terms.remove(&sym);
        let value = rest.scale(&(-Rational::one() / coeff));
        let single = BTreeMap::from([(sym.clone(), value.clone())]);
        for e in self.solved.values_mut() {
            *e = e.substitute(&single);
        }
        self.solved.insert(sym, value);
        Ok(())
    }

    pub fn merge(&mut self, other: &OutcomeConstraints) -> Result<()> {
        for (s, e) in &other.solved {
            self.add(&OutcomeExpr::symbol(s), e)?;
        }
        Ok(())
    }

    pub fn apply(&self, e: &OutcomeExpr) -> OutcomeExpr {
        e.substitute(&self.solved)
    }
}
