//! Sampling probes for operator classes. A probe cannot prove a property; it reports the worst
//! observed violation of the defining inequality over the supplied samples.

use super::OperatorExpr;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::vecops;

/// Relative tolerance `|T(z) - z| <= FIXED_POINT_TOL * (1 + |z|)` for points passed as fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    /// Largest value of (left side - right side) of the probed inequality. Positive means the
    /// inequality failed on at least one sample.
    pub max_violation: f64,
    /// The sample attaining `max_violation`, present only when it is positive. For
    /// [`probe_fne`] this is `(x, y)`; for [`probe_sqne`] it is `(x, z)`.
    pub witness: Option<(Point, Point)>,
    pub samples: usize,
}

fn sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Firm nonexpansiveness: worst `|Tx - Ty|^2 - <Tx - Ty, x - y>` over the sample pairs.
pub fn probe_fne(op: &OperatorExpr, samples: &[(Point, Point)]) -> Result<ProbeReport> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig(
            "probe_fne needs at least one sample pair".into(),
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_idx = 0;
    for (i, (x, y)) in samples.iter().enumerate() {
        let tx = op.apply(x)?;
        let ty = op.apply(y)?;
        let d: Vec<f64> = tx
            .as_slice()
            .iter()
            .zip(ty.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let e: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let violation = vecops::norm_sq(&d) - vecops::dot(&d, &e);
        if violation > worst {
            worst = violation;
            worst_idx = i;
        }
    }
    Ok(ProbeReport {
        max_violation: worst,
        witness: (worst > 0.0).then(|| samples[worst_idx].clone()),
        samples: samples.len(),
    })
}

/// Strong quasi-nonexpansiveness with constant `alpha`: worst
/// `|Tx - z|^2 + alpha |Tx - x|^2 - |x - z|^2` over all samples `x` and fixed points `z`.
/// `alpha = 0` probes plain quasi-nonexpansiveness.
pub fn probe_sqne(
    op: &OperatorExpr,
    fixed_points: &[Point],
    samples: &[Point],
    alpha: f64,
) -> Result<ProbeReport> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    if fixed_points.is_empty() || samples.is_empty() {
        return Err(Error::InvalidConfig(
            "probe_sqne needs at least one fixed point and one sample".into(),
        ));
    }
    for z in fixed_points {
        let tz = op.apply(z)?;
        let residual = tz.distance_to(z);
        let tolerance = FIXED_POINT_TOL * (1.0 + z.norm());
        if residual > tolerance {
            return Err(Error::NotFixedPoint {
                residual,
                tolerance,
            });
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = (0, 0);
    for (i, x) in samples.iter().enumerate() {
        let tx = op.apply(x)?;
        let step_sq = sq_diff(tx.as_slice(), x.as_slice());
        for (j, z) in fixed_points.iter().enumerate() {
            let violation = sq_diff(tx.as_slice(), z.as_slice()) + alpha * step_sq
                - sq_diff(x.as_slice(), z.as_slice());
            if violation > worst {
                worst = violation;
                worst_pair = (i, j);
            }
        }
    }
    Ok(ProbeReport {
        max_violation: worst,
        witness: (worst > 0.0).then(|| {
            (
                samples[worst_pair.0].clone(),
                fixed_points[worst_pair.1].clone(),
            )
        }),
        samples: samples.len() * fixed_points.len(),
    })
}
