//! Douglas-Rachford algorithmic structures for convex feasibility problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: closed convex sets with exact projections and the [`FeasibilityProblem`] type.
//! * [`operators`]: composable operator expressions (reflections, relaxations, 2-set and r-set
//!   Douglas-Rachford operators, compositions, convex combinations) and sampling probes for
//!   firm nonexpansiveness and strong quasi-nonexpansiveness.
//! * [`algorithms`]: string-averaging, block-iterative and r-set Douglas-Rachford iterations plus
//!   the cyclic, simultaneous and cyclic-projection baselines, each producing a [`RunRecord`].
//! * [`diagnostics`]: verdicts over run records (Fejér monotonicity, asymptotic regularity,
//!   trajectory comparison) and the [`StopConfig`] shared by all schemes.
//! * [`harness`]: seeded instance generators, problem/run file formats and the property suites
//!   behind `drfeas verify`.

pub mod algorithms;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod harness;
pub mod operators;
mod vecops;

pub use algorithms::{BlockPlan, RunRecord, StopReason, StringPlan};
pub use diagnostics::{StopConfig, Verdict};
pub use error::{Error, Result};
pub use geometry::{ConvexSet, FeasibilityProblem, Point};
pub use operators::OperatorExpr;
