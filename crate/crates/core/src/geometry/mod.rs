//! Closed convex sets with exact projections, and feasibility problems built from them.

mod point;
mod problem;
mod sets;

pub use point::Point;
pub use problem::FeasibilityProblem;
pub use sets::{
    AffineSubspace, Ball, BoxSet, ConvexSet, Halfspace, Hyperplane, AFFINE_CONSISTENCY_TOL,
    DEFAULT_MEMBERSHIP_TOL,
};

/// Nearest point of `set` to `x`.
pub fn project(set: &ConvexSet, x: &Point) -> crate::Result<Point> {
    set.project(x)
}

pub fn contains(set: &ConvexSet, x: &Point, tol: f64) -> crate::Result<bool> {
    set.contains(x, tol)
}

pub fn distance(set: &ConvexSet, x: &Point) -> crate::Result<f64> {
    set.distance(x)
}
