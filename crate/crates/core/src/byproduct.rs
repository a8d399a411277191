//! Single-mode Gaussian byproduct operators.
//!
//! A [`LocalGaussian`] is a phase-space map `ξ ↦ S·ξ + d` on the `(x, p)`
//! pair of one mode, where `S` is a 2×2 rational symplectic matrix and `d`
//! a displacement whose entries are affine in the outcome symbols. The map
//! is the Heisenberg action `U† ξ U` of the unitary, so it is also how the
//! quadrature means of a state transform under `U`. Global phases are not
//! represented.
//!
//! Conventions for the generators:
//!
//! | gate | `S` | `d` |
//! |------|-----|-----|
//! | `X(s) = exp(-i s p)` | `1` | `(s, 0)` |
//! | `Z(t) = exp(i t x)` | `1` | `(0, t)` |
//! | `P(η) = exp(i η x²/2)` | `[[1, 0], [η, 1]]` | `0` |
//! | `P_X(η) = exp(i η p²/2)` | `[[1, -η], [0, 1]]` | `0` |
//! | `F` | `[[0, -1], [1, 0]]` | `0` |

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::outcome::{AffineDoc, OutcomeExpr};
use crate::rational::{format_rational, int, parse_rational, Rational};

/// A 2×2 rational matrix with determinant exactly 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symplectic2([[Rational; 2]; 2]);

impl Symplectic2 {
    pub fn new(m: [[Rational; 2]; 2]) -> Option<Self> {
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        det.is_one().then_some(Symplectic2(m))
    }

    pub fn identity() -> Self {
        Symplectic2([[int(1), int(0)], [int(0), int(1)]])
    }

    pub fn entries(&self) -> &[[Rational; 2]; 2] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn mul(&self, rhs: &Symplectic2) -> Symplectic2 {
        let (a, b) = (&self.0, &rhs.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Symplectic2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn inverse(&self) -> Symplectic2 {
        let m = &self.0;
        Symplectic2([
            [m[1][1].clone(), -m[0][1].clone()],
            [-m[1][0].clone(), m[0][0].clone()],
        ])
    }

    pub fn apply(&self, d: &(OutcomeExpr, OutcomeExpr)) -> (OutcomeExpr, OutcomeExpr) {
        let m = &self.0;
        let mut x = d.0.scale(&m[0][0]);
        x.add_scaled(&d.1, &m[0][1]);
        let mut p = d.0.scale(&m[1][0]);
        p.add_scaled(&d.1, &m[1][1]);
        (x, p)
    }
}

impl fmt::Debug for Symplectic2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |i: usize, j: usize| format_rational(&self.0[i][j]);
        write!(f, "[[{}, {}], [{}, {}]]", r(0, 0), r(0, 1), r(1, 0), r(1, 1))
    }
}

/// One mode's byproduct: first the symplectic part, then the displacement.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LocalGaussian {
    pub symplectic: Symplectic2,
    pub displacement: (OutcomeExpr, OutcomeExpr),
}

impl LocalGaussian {
    pub fn identity() -> Self {
        LocalGaussian {
            symplectic: Symplectic2::identity(),
            displacement: (OutcomeExpr::zero(), OutcomeExpr::zero()),
        }
    }

    /// Position shift `X(s)`.
    pub fn x_shift(s: OutcomeExpr) -> Self {
        LocalGaussian { symplectic: Symplectic2::identity(), displacement: (s, OutcomeExpr::zero()) }
    }

    /// Momentum shift `Z(t)`.
    pub fn z_shift(t: OutcomeExpr) -> Self {
        LocalGaussian { symplectic: Symplectic2::identity(), displacement: (OutcomeExpr::zero(), t) }
    }

    /// Shear `P(η)`: `p ↦ p + η x`.
    pub fn phase(eta: Rational) -> Self {
        Self::linear(Symplectic2([[int(1), int(0)], [eta, int(1)]]))
    }

    /// Shear `P_X(η)`: `x ↦ x − η p`.
    pub fn phase_x(eta: Rational) -> Self {
        Self::linear(Symplectic2([[int(1), -eta], [int(0), int(1)]]))
    }

    pub fn fourier() -> Self {
        Self::linear(Symplectic2([[int(0), int(-1)], [int(1), int(0)]]))
    }

    pub fn linear(symplectic: Symplectic2) -> Self {
        LocalGaussian { symplectic, displacement: (OutcomeExpr::zero(), OutcomeExpr::zero()) }
    }

    pub fn is_identity(&self) -> bool {
        self.symplectic.is_identity() && self.displacement.0.is_zero() && self.displacement.1.is_zero()
    }

    /// `self ∘ earlier`: apply `earlier` first.
    pub fn after(&self, earlier: &LocalGaussian) -> LocalGaussian {
        let moved = self.symplectic.apply(&earlier.displacement);
        LocalGaussian {
            symplectic: self.symplectic.mul(&earlier.symplectic),
            displacement: (&moved.0 + &self.displacement.0, &moved.1 + &self.displacement.1),
        }
    }

    pub fn inverse(&self) -> LocalGaussian {
        let inv = self.symplectic.inverse();
        let d = inv.apply(&self.displacement);
        LocalGaussian { symplectic: inv, displacement: (-&d.0, -&d.1) }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, OutcomeExpr>) -> LocalGaussian {
        LocalGaussian {
            symplectic: self.symplectic.clone(),
            displacement: (self.displacement.0.substitute(subst), self.displacement.1.substitute(subst)),
        }
    }
}

/// Per-vertex byproducts; a vertex without an entry carries the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct LocalGaussianRecord {
    entries: BTreeMap<VertexId, LocalGaussian>,
}

impl LocalGaussianRecord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(a: VertexId, op: LocalGaussian) -> Self {
        let mut r = Self::default();
        r.set(a, op);
        r
    }

    pub fn get(&self, a: &VertexId) -> LocalGaussian {
        self.entries.get(a).cloned().unwrap_or_else(LocalGaussian::identity)
    }

    pub fn set(&mut self, a: VertexId, op: LocalGaussian) {
        if op.is_identity() {
            self.entries.remove(&a);
        } else {
            self.entries.insert(a, op);
        }
    }

    /// Applies `op` after whatever is already recorded on `a`.
    pub fn push(&mut self, a: VertexId, op: &LocalGaussian) {
        let next = op.after(&self.get(&a));
        self.set(a, next);
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-identity entries in label order.
    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &LocalGaussian)> + '_ {
        self.entries.iter()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> + '_ {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn inverse(&self) -> Self {
        LocalGaussianRecord {
            entries: self.entries.iter().map(|(a, op)| (a.clone(), op.inverse())).collect(),
        }
    }

    pub fn without(&self, a: &VertexId) -> Self {
        let mut out = self.clone();
        out.entries.remove(a);
        out
    }

    pub fn substitute(&self, subst: &BTreeMap<String, OutcomeExpr>) -> Self {
        let mut out = Self::default();
        for (a, op) in &self.entries {
            out.set(a.clone(), op.substitute(subst));
        }
        out
    }

    /// The symplectic parts only, for keys that ignore displacements.
    pub fn linear_parts(&self) -> Vec<(VertexId, Symplectic2)> {
        self.entries
            .iter()
            .filter(|(_, op)| !op.symplectic.is_identity())
            .map(|(a, op)| (a.clone(), op.symplectic.clone()))
            .collect()
    }

    pub fn to_docs(&self) -> Vec<ByproductDoc> {
        self.entries
            .iter()
            .map(|(a, op)| {
                let m = op.symplectic.entries();
                let row = |i: usize| [format_rational(&m[i][0]), format_rational(&m[i][1])];
                ByproductDoc {
                    vertex: a.to_string(),
                    symplectic: [row(0), row(1)],
                    displacement: DisplacementDoc {
                        x: op.displacement.0.to_doc(),
                        p: op.displacement.1.to_doc(),
                    },
                }
            })
            .collect()
    }

    pub fn from_docs(docs: &[ByproductDoc]) -> Result<Self> {
        let mut out = Self::default();
        for d in docs {
            let a = VertexId::new(d.vertex.clone())?;
            let e = |i: usize, j: usize| parse_rational(&d.symplectic[i][j]);
            let m = [[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]];
            let symplectic = Symplectic2::new(m).ok_or_else(|| Error::NotSymplectic(a.clone()))?;
            let op = LocalGaussian {
                symplectic,
                displacement: (
                    OutcomeExpr::from_doc(&d.displacement.x)?,
                    OutcomeExpr::from_doc(&d.displacement.p)?,
                ),
            };
            out.push(a, &op);
        }
        Ok(out)
    }
}

/// `later ∘ earlier`, vertex by vertex: symplectics multiply as
/// `later · earlier` and the earlier displacement is carried through the
/// later symplectic before the later displacement is added.
pub fn compose_byproduct(later: &LocalGaussianRecord, earlier: &LocalGaussianRecord) -> LocalGaussianRecord {
    let mut out = earlier.clone();
    for (a, op) in later.iter() {
        out.push(a.clone(), op);
    }
    out
}

/// Wire form of one vertex's byproduct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ByproductDoc {
    pub vertex: String,
    pub symplectic: [[String; 2]; 2],
    pub displacement: DisplacementDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementDoc {
    pub x: AffineDoc,
    pub p: AffineDoc,
}
