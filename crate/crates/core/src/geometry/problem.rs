use super::point::Point;
use super::sets::ConvexSet;
use crate::error::{check_dim, Error, Result};

/// An ordered family of closed convex sets in a common R^n, the target being a point in their
/// intersection.
///
/// `interior_point` is an optional certified common point. With `slack = s > 0` the closed ball of
/// radius `s` around it lies inside every set, so the intersection has nonempty interior. With
/// `slack` absent or zero the point is only certified to be a common point (useful for instances
/// whose intersection has empty interior).
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityProblem {
    dim: usize,
    sets: Vec<ConvexSet>,
    interior_point: Option<Point>,
    slack: Option<f64>,
}

impl FeasibilityProblem {
    pub fn new(
        sets: Vec<ConvexSet>,
        interior_point: Option<Point>,
        slack: Option<f64>,
    ) -> Result<Self> {
        let first = sets
            .first()
            .ok_or_else(|| Error::InvalidProblem("problem needs at least one set".into()))?;
        let dim = first.dim();
        for (i, s) in sets.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::InvalidProblem(format!(
                    "set {} has dimension {}, expected {dim}",
                    i + 1,
                    s.dim()
                )));
            }
        }
        if let Some(s) = slack {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "slack must be finite and nonnegative, got {s}"
                )));
            }
            if interior_point.is_none() {
                return Err(Error::InvalidProblem(
                    "slack given without interior_point".into(),
                ));
            }
        }
        if let Some(p) = &interior_point {
            check_dim(dim, p.dim())?;
            let radius = slack.unwrap_or(0.0);
            for (i, s) in sets.iter().enumerate() {
                if !s.contains_ball(p, radius)? {
                    return Err(Error::InvalidProblem(format!(
                        "interior_point with slack {radius} is not contained in set {} ({})",
                        i + 1,
                        s.kind_name()
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            sets,
            interior_point,
            slack,
        })
    }

    pub fn from_sets(sets: Vec<ConvexSet>) -> Result<Self> {
        Self::new(sets, None, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    /// 0-based access.
    pub fn set(&self, index: usize) -> &ConvexSet {
        &self.sets[index]
    }

    pub fn interior_point(&self) -> Option<&Point> {
        self.interior_point.as_ref()
    }

    pub fn slack(&self) -> Option<f64> {
        self.slack
    }

    /// True when a ball of positive radius inside every set has been certified.
    pub fn is_interior_certified(&self) -> bool {
        self.interior_point.is_some() && self.slack.is_some_and(|s| s > 0.0)
    }

    /// `max_i dist(C_i, x)`.
    pub fn max_residual(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.max_residual_slice(x.as_slice()))
    }

    pub(crate) fn max_residual_slice(&self, x: &[f64]) -> f64 {
        self.sets
            .iter()
            .map(|s| s.distance_slice(x))
            .fold(0.0, f64::max)
    }

    /// Same sets in a different order; indices are 0-based positions into the current list.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let sets = order
            .iter()
            .map(|&i| {
                self.sets.get(i).cloned().ok_or_else(|| {
                    Error::InvalidProblem(format!("set index {} out of range", i + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets, self.interior_point.clone(), self.slack)
    }
}
