//! Operator expressions over convex sets.
//!
//! Conventions:
//!
//! * `Reflection(C)(x) = 2 P_C(x) - x`.
//! * `two_set_dr(first, second)` reflects into `first`, then into `second`, then averages with
//!   the identity: `x -> (x + R_second(R_first(x))) / 2`. The classical operator written
//!   `T_{B,A} = (Id + R_A R_B) / 2` is therefore `two_set_dr(B, A)`, and the string factor
//!   `T_{i,j}` is `two_set_dr(C_i, C_j)`.
//! * `r_set_dr([C_1, .., C_r])` reflects through the sets in list order before averaging, so for
//!   `r = 2` it evaluates exactly the same arithmetic as `two_set_dr`.
//! * `Composition([U_1, .., U_m])` applies `U_1` first.
//! * `ConvexCombination` sums its terms in listed order.

mod probe;

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexSet, Point};
use crate::vecops;

pub use probe::{probe_fne, probe_sqne, ProbeReport, FIXED_POINT_TOL};

/// Tolerance on `|sum(w) - 1|` for convex-combination weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Identity,
    Projection(ConvexSet),
    Reflection(ConvexSet),
    Relaxation {
        inner: Box<OperatorExpr>,
        lambda: f64,
    },
    TwoSetDr {
        first: ConvexSet,
        second: ConvexSet,
    },
    RSetDr(Vec<ConvexSet>),
    Composition(Vec<OperatorExpr>),
    ConvexCombination(Vec<(f64, OperatorExpr)>),
}

/// An immutable operator on R^n built from projections onto convex sets.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr {
    node: Node,
    dim: usize,
}

/// Checks `w_i > 0` and `|sum w - 1| <= WEIGHT_SUM_TOL`.
pub fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("weight list is empty".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidWeights(format!(
            "weights must be positive and finite, got {w}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!(
            "weights must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

impl OperatorExpr {
    pub fn identity(dim: usize) -> Self {
        Self {
            node: Node::Identity,
            dim,
        }
    }

    pub fn projection(set: ConvexSet) -> Self {
        let dim = set.dim();
        Self {
            node: Node::Projection(set),
            dim,
        }
    }

    pub fn reflection(set: ConvexSet) -> Self {
        let dim = set.dim();
        Self {
            node: Node::Reflection(set),
            dim,
        }
    }

    /// `(1 - lambda) Id + lambda op`, with `lambda` in `[0, 2]`.
    pub fn relax(inner: OperatorExpr, lambda: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&lambda) {
            return Err(Error::InvalidOperator(format!(
                "relaxation parameter must lie in [0, 2], got {lambda}"
            )));
        }
        let dim = inner.dim;
        Ok(Self {
            node: Node::Relaxation {
                inner: Box::new(inner),
                lambda,
            },
            dim,
        })
    }

    pub fn two_set_dr(first: ConvexSet, second: ConvexSet) -> Result<Self> {
        check_dim(first.dim(), second.dim())?;
        let dim = first.dim();
        Ok(Self {
            node: Node::TwoSetDr { first, second },
            dim,
        })
    }

    pub fn r_set_dr(sets: Vec<ConvexSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidOperator(format!(
                "r-set Douglas-Rachford needs at least 2 sets, got {}",
                sets.len()
            )));
        }
        let dim = sets[0].dim();
        for s in &sets[1..] {
            check_dim(dim, s.dim())?;
        }
        Ok(Self {
            node: Node::RSetDr(sets),
            dim,
        })
    }

    /// Applies the operators in list order (first element first).
    pub fn composition(ops: Vec<OperatorExpr>) -> Result<Self> {
        let dim = ops
            .first()
            .ok_or_else(|| Error::InvalidOperator("composition of zero operators".into()))?
            .dim;
        for op in &ops[1..] {
            check_dim(dim, op.dim)?;
        }
        Ok(Self {
            node: Node::Composition(ops),
            dim,
        })
    }

    pub fn convex_combination(terms: Vec<(f64, OperatorExpr)>) -> Result<Self> {
        let weights: Vec<f64> = terms.iter().map(|(w, _)| *w).collect();
        validate_weights(&weights)?;
        let dim = terms[0].1.dim;
        for (_, op) in &terms[1..] {
            check_dim(dim, op.dim)?;
        }
        Ok(Self {
            node: Node::ConvexCombination(terms),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim, x.dim())?;
        let out = self.eval(x.as_slice())?;
        Ok(Point::from_vec_unchecked(out))
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let out = match &self.node {
            Node::Identity => x.to_vec(),
            Node::Projection(s) => {
                let mut out = x.to_vec();
                s.project_slice(x, &mut out);
                out
            }
            Node::Reflection(s) => reflect(s, x),
            Node::Relaxation { inner, lambda } => {
                let y = inner.eval(x).map_err(|e| nest(e, self))?;
                let keep = 1.0 - lambda;
                x.iter()
                    .zip(&y)
                    .map(|(xi, yi)| keep * xi + lambda * yi)
                    .collect()
            }
            Node::TwoSetDr { first, second } => dr_chain([first, second], x),
            Node::RSetDr(sets) => dr_chain(sets.iter(), x),
            Node::Composition(ops) => {
                let mut cur = x.to_vec();
                for op in ops {
                    cur = op.eval(&cur).map_err(|e| nest(e, self))?;
                }
                cur
            }
            Node::ConvexCombination(terms) => {
                let mut acc = vec![0.0; x.len()];
                for (w, op) in terms {
                    let y = op.eval(x).map_err(|e| nest(e, self))?;
                    for (a, yi) in acc.iter_mut().zip(&y) {
                        *a += w * yi;
                    }
                }
                acc
            }
        };
        if !vecops::all_finite(&out) {
            return Err(Error::NonFinite {
                context: self.to_string(),
            });
        }
        Ok(out)
    }
}

fn nest(err: Error, parent: &OperatorExpr) -> Error {
    match err {
        Error::NonFinite { context } => Error::NonFinite {
            context: format!("{context} inside {}", parent.label()),
        },
        other => other,
    }
}

impl OperatorExpr {
    fn label(&self) -> String {
        match &self.node {
            Node::Identity => "Identity".into(),
            Node::Projection(s) => format!("Projection({})", s.kind_name()),
            Node::Reflection(s) => format!("Reflection({})", s.kind_name()),
            Node::Relaxation { lambda, .. } => format!("Relaxation(lambda={lambda})"),
            Node::TwoSetDr { first, second } => {
                format!("TwoSetDR({}, {})", first.kind_name(), second.kind_name())
            }
            Node::RSetDr(sets) => format!("RSetDR(r={})", sets.len()),
            Node::Composition(ops) => format!("Composition(len={})", ops.len()),
            Node::ConvexCombination(terms) => format!("ConvexCombination(len={})", terms.len()),
        }
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Relaxation { inner, lambda } => write!(f, "Relaxation({inner}, lambda={lambda})"),
            Node::RSetDr(sets) => {
                let names: Vec<_> = sets.iter().map(|s| s.kind_name()).collect();
                write!(f, "RSetDR({})", names.join(", "))
            }
            Node::Composition(ops) => {
                write!(f, "Composition[")?;
                for (i, op) in ops.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{op}")?;
                }
                write!(f, "]")
            }
            Node::ConvexCombination(terms) => {
                write!(f, "ConvexCombination[")?;
                for (i, (w, op)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{w}*{op}")?;
                }
                write!(f, "]")
            }
            _ => f.write_str(&self.label()),
        }
    }
}

/// `2 P_C(x) - x`.
pub(crate) fn reflect(set: &ConvexSet, x: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    set.project_slice(x, &mut p);
    for (pi, xi) in p.iter_mut().zip(x) {
        *pi = 2.0 * *pi - xi;
    }
    p
}

/// `(x + R_{C_r} ... R_{C_1} x) / 2` with the reflections taken in iteration order.
pub(crate) fn dr_chain<'a, I>(sets: I, x: &[f64]) -> Vec<f64>
where
    I: IntoIterator<Item = &'a ConvexSet>,
{
    let mut v = x.to_vec();
    for s in sets {
        v = reflect(s, &v);
    }
    for (vi, xi) in v.iter_mut().zip(x) {
        *vi = 0.5 * (xi + *vi);
    }
    v
}

pub fn apply(op: &OperatorExpr, x: &Point) -> Result<Point> {
    op.apply(x)
}

/// 2-set Douglas-Rachford operator; `first` is reflected into first.
pub fn two_set_dr(first: &ConvexSet, second: &ConvexSet) -> Result<OperatorExpr> {
    OperatorExpr::two_set_dr(first.clone(), second.clone())
}

pub fn r_set_dr(sets: &[ConvexSet]) -> Result<OperatorExpr> {
    OperatorExpr::r_set_dr(sets.to_vec())
}

pub fn relax(op: OperatorExpr, lambda: f64) -> Result<OperatorExpr> {
    OperatorExpr::relax(op, lambda)
}
