//! Verdicts over run records.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::RunRecord;
use crate::error::{Error, Result};

/// Relative per-step slack used by [`check_fejer_default`]: `d_{k+1} <= d_k + 1e-12 (1 + d_k)`.
pub const FEJER_RELATIVE_SLACK: f64 = 1e-12;

/// Fraction of the step-norm sequence inspected by [`check_asymptotic_regularity`].
pub const REGULARITY_TAIL_FRACTION: f64 = 0.1;

/// Stopping rule shared by all iterative schemes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopConfig {
    /// Stop once `max_i dist(C_i, x^k) <= residual_tol`.
    pub residual_tol: f64,
    /// Stop once `|x^{k+1} - x^k| <= step_tol`. Block-iterative runs need this for a whole sweep
    /// of consecutive steps.
    pub step_tol: f64,
    pub max_iters: usize,
    /// Keep every `trace_stride`-th iterate in the record.
    pub trace_stride: usize,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            step_tol: 1e-12,
            max_iters: 100_000,
            trace_stride: 1,
        }
    }
}

impl StopConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if !(self.step_tol.is_finite() && self.step_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step_tol must be nonnegative, got {}",
                self.step_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if self.trace_stride == 0 {
            return Err(Error::InvalidConfig("trace_stride must be positive".into()));
        }
        Ok(())
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn with_step_tol(mut self, tol: f64) -> Self {
        self.step_tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_trace_stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride;
        self
    }
}

/// Outcome of a single check. `passed` holds exactly when `metric` is within `threshold` in the
/// direction the check defines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} metric={:e} threshold={:e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.metric,
            self.threshold,
            self.detail
        )
    }
}

/// Fejér monotonicity against the record's reference point: every consecutive pair must satisfy
/// `d_{k+1} <= d_k + slack`. The metric is the largest `d_{k+1} - d_k` (0 for a single entry).
pub fn check_fejer(rec: &RunRecord, slack: f64) -> Result<Verdict> {
    check_fejer_with(rec, |_| slack, format!("slack {slack:e}"))
}

/// Fejér check with the scale-aware slack `1e-12 (1 + d_k)`.
pub fn check_fejer_default(rec: &RunRecord) -> Result<Verdict> {
    check_fejer_with(
        rec,
        |d| FEJER_RELATIVE_SLACK * (1.0 + d),
        "slack 1e-12*(1+d_k)".into(),
    )
}

fn check_fejer_with(
    rec: &RunRecord,
    slack: impl Fn(f64) -> f64,
    slack_desc: String,
) -> Result<Verdict> {
    let d = &rec.fejer_distances;
    if d.is_empty() {
        return Err(Error::MissingData(
            "run record has no Fejér distances (no reference point)".into(),
        ));
    }
    let mut max_increase = 0.0_f64;
    let mut violations = 0usize;
    let mut first_violation = None;
    for (k, pair) in d.windows(2).enumerate() {
        let increase = pair[1] - pair[0];
        max_increase = max_increase.max(increase);
        if increase > slack(pair[0]) {
            violations += 1;
            first_violation.get_or_insert(k + 1);
        }
    }
    let threshold = slack(d.iter().cloned().fold(0.0, f64::max));
    let detail = match first_violation {
        None => format!("{} distances nonincreasing ({slack_desc})", d.len()),
        Some(k) => format!("{violations} increases beyond {slack_desc}, first at k={k}"),
    };
    Ok(Verdict {
        passed: violations == 0,
        metric: max_increase,
        threshold,
        detail,
    })
}

/// Passes iff the minimum step norm over the last 10% of steps (at least one step) is `<= tol`.
pub fn check_asymptotic_regularity(rec: &RunRecord, tol: f64) -> Verdict {
    let steps = &rec.step_norms;
    if steps.is_empty() {
        return Verdict {
            passed: false,
            metric: f64::INFINITY,
            threshold: tol,
            detail: "no steps recorded".into(),
        };
    }
    let tail = ((steps.len() as f64 * REGULARITY_TAIL_FRACTION).ceil() as usize).max(1);
    let metric = steps[steps.len() - tail..]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Verdict {
        passed: metric <= tol,
        metric,
        threshold: tol,
        detail: format!("min step norm over last {tail} of {} steps", steps.len()),
    }
}

/// Aligns `a.iterate_at(i * stride_a)` with `b.iterate_at(i * stride_b)` for every `i` for which
/// the iteration index exists in both runs, and passes iff the largest distance is
/// `<= per_iter_tol`. Errors when the runs yield different numbers of aligned iterates or when an
/// aligned iterate was thinned out of a record.
pub fn compare_trajectories(
    a: &RunRecord,
    b: &RunRecord,
    per_iter_tol: f64,
    stride_a: usize,
    stride_b: usize,
) -> Result<Verdict> {
    if stride_a == 0 || stride_b == 0 {
        return Err(Error::InvalidConfig("strides must be positive".into()));
    }
    let len_a = a.iterations / stride_a + 1;
    let len_b = b.iterations / stride_b + 1;
    if len_a != len_b {
        return Err(Error::LengthMismatch {
            left: len_a,
            right: len_b,
        });
    }
    let mut worst = 0.0_f64;
    let mut worst_at = 0;
    for i in 0..len_a {
        let xa = a.iterate_at(i * stride_a).ok_or_else(|| {
            Error::MissingData(format!("iterate {} not stored in first run", i * stride_a))
        })?;
        let xb = b.iterate_at(i * stride_b).ok_or_else(|| {
            Error::MissingData(format!("iterate {} not stored in second run", i * stride_b))
        })?;
        if xa.dim() != xb.dim() {
            return Err(Error::DimensionMismatch {
                expected: xa.dim(),
                found: xb.dim(),
            });
        }
        let d = xa.distance_to(xb);
        if d > worst || d.is_nan() {
            worst = d;
            worst_at = i;
        }
    }
    Ok(Verdict {
        passed: worst <= per_iter_tol,
        metric: worst,
        threshold: per_iter_tol,
        detail: format!("{len_a} aligned iterates, max deviation at aligned index {worst_at}"),
    })
}
