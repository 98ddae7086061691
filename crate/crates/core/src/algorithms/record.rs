use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ResidualTol,
    StepTol,
    MaxIters,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ResidualTol => "residual_tol",
            StopReason::StepTol => "step_tol",
            StopReason::MaxIters => "max_iters",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "residual_tol" => Ok(StopReason::ResidualTol),
            "step_tol" => Ok(StopReason::StepTol),
            "max_iters" => Ok(StopReason::MaxIters),
            other => Err(Error::Parse(format!("unknown stop reason `{other}`"))),
        }
    }
}

/// Per-iteration trace of one run.
///
/// With `K = iterations`: `residuals` and `fejer_distances` hold one entry per iterate
/// `x^0..x^K` (`fejer_distances` is empty when the run had no reference point), `step_norms`
/// holds `|x^{k+1} - x^k|` for `k = 0..K-1`. Iterates are kept for every index divisible by
/// `trace_stride` plus the final one; `iterate_indices` lists which.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub trace_stride: usize,
    pub iterates: Vec<Point>,
    pub iterate_indices: Vec<usize>,
    pub step_norms: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fejer_distances: Vec<f64>,
    pub reference_point: Option<Point>,
    /// Iterations per full sweep through the plan: the number of blocks for block-iterative
    /// runs, 1 otherwise.
    pub sweep_length: usize,
}

impl RunRecord {
    pub fn iterate_at(&self, k: usize) -> Option<&Point> {
        self.iterate_indices
            .binary_search(&k)
            .ok()
            .map(|i| &self.iterates[i])
    }

    pub fn final_iterate(&self) -> &Point {
        self.iterates.last().expect("a run record always holds x^0")
    }

    pub fn initial_iterate(&self) -> &Point {
        &self.iterates[0]
    }

    pub fn final_residual(&self) -> f64 {
        *self
            .residuals
            .last()
            .expect("a run record always holds r^0")
    }

    /// `y^j = x^{j M}` for every stored sweep boundary, `M = sweep_length`.
    pub fn sweep_iterates(&self) -> Vec<&Point> {
        let m = self.sweep_length.max(1);
        (0..=self.iterations / m)
            .filter_map(|j| self.iterate_at(j * m))
            .collect()
    }

    /// True when the iteration stopped on the residual or step criterion.
    pub fn converged(&self) -> bool {
        self.stop_reason != StopReason::MaxIters
    }
}
