//! Iterative schemes for the convex feasibility problem.
//!
//! Throughout, `T_{i,j}` denotes the 2-set Douglas-Rachford operator that reflects into `C_i`
//! first and `C_j` second, i.e. `operators::two_set_dr(C_i, C_j)`.
//!
//! * [`sa_dr`]: string averaging. Each string `(i_1, .., i_g)` is evaluated as
//!   `T_{i_g,i_1} T_{i_{g-1},i_g} .. T_{i_1,i_2}` (wrapping back to the first index) and the string
//!   end-points are combined with constant weights.
//! * [`bi_dr`]: block iterative. Blocks are visited cyclically (`t = k mod M`); within a block the
//!   pair operators `T_{i_l,i_{l+1}}` and the wrap-around `T_{i_g,i_1}` are all applied to the same
//!   iterate and then combined.
//! * [`r_set_dr_scheme`]: weighted sum of the prefix operators `T_{C_1..C_r}`, `r = 2..m`.
//! * [`cyclic_dr`], [`simultaneous_dr`], [`reference_cyclic_projections`]: baselines.
//!
//! All schemes share one stopping rule ([`StopConfig`]), checked after each step in the order
//! residual, step norm, iteration budget. At least one step is always taken.

mod plan;
mod record;

pub use plan::{BlockPlan, StringPlan};
pub use record::{RunRecord, StopReason};

use crate::diagnostics::StopConfig;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexSet, FeasibilityProblem, Point};
use crate::operators::{dr_chain, reflect, validate_weights, OperatorExpr};
use crate::vecops;

/// Runs `x^{k+1} = step(k, x^k)` under `cfg`, recording the trace.
/// True when each of the last `window` steps is at most `tol`. Block-iterative runs use the sweep
/// length as the window: one block can be at rest while another still moves the iterate.
fn stagnated(step_norms: &[f64], window: usize, tol: f64) -> bool {
    let window = window.max(1);
    step_norms.len() >= window
        && step_norms[step_norms.len() - window..]
            .iter()
            .all(|&s| s <= tol)
}

fn drive<F>(
    algorithm: &str,
    problem: &FeasibilityProblem,
    x0: &Point,
    cfg: &StopConfig,
    sweep_length: usize,
    mut step: F,
) -> Result<RunRecord>
where
    F: FnMut(usize, &[f64]) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    check_dim(problem.dim(), x0.dim())?;
    let reference = problem.interior_point().cloned();

    let mut rec = RunRecord {
        algorithm: algorithm.to_string(),
        iterations: 0,
        stop_reason: StopReason::MaxIters,
        trace_stride: cfg.trace_stride,
        iterates: vec![x0.clone()],
        iterate_indices: vec![0],
        step_norms: Vec::new(),
        residuals: vec![problem.max_residual_slice(x0.as_slice())],
        fejer_distances: Vec::new(),
        reference_point: reference.clone(),
        sweep_length,
    };
    if let Some(z) = &reference {
        rec.fejer_distances.push(x0.distance_to(z));
    }

    let mut x = x0.as_slice().to_vec();
    let mut k = 0;
    loop {
        let next = step(k, &x)?;
        if !vecops::all_finite(&next) {
            return Err(Error::NonFinite {
                context: format!("{algorithm} iterate {}", k + 1),
            });
        }
        k += 1;
        let step_norm = vecops::dist(&next, &x);
        let residual = problem.max_residual_slice(&next);
        rec.step_norms.push(step_norm);
        rec.residuals.push(residual);
        if let Some(z) = &reference {
            rec.fejer_distances.push(vecops::dist(&next, z.as_slice()));
        }
        x = next;

        let stop = if residual <= cfg.residual_tol {
            Some(StopReason::ResidualTol)
        } else if stagnated(&rec.step_norms, sweep_length, cfg.step_tol) {
            Some(StopReason::StepTol)
        } else if k >= cfg.max_iters {
            Some(StopReason::MaxIters)
        } else {
            None
        };
        if stop.is_some() || k % cfg.trace_stride == 0 {
            rec.iterates.push(Point::from_vec_unchecked(x.clone()));
            rec.iterate_indices.push(k);
        }
        if let Some(reason) = stop {
            rec.stop_reason = reason;
            rec.iterations = k;
            return Ok(rec);
        }
    }
}

fn check_plan_size(plan_sets: usize, problem: &FeasibilityProblem) -> Result<()> {
    if plan_sets != problem.num_sets() {
        return Err(Error::InvalidPlan(format!(
            "plan was built for {plan_sets} sets but the problem has {}",
            problem.num_sets()
        )));
    }
    Ok(())
}

/// `T_{i,j}(x)` with 1-based indices.
fn pair_dr(sets: &[ConvexSet], i: usize, j: usize, x: &[f64]) -> Vec<f64> {
    dr_chain([&sets[i - 1], &sets[j - 1]], x)
}

/// `T_{i_g,i_1} .. T_{i_2,i_3} T_{i_1,i_2} (x)`.
fn string_operator(sets: &[ConvexSet], string: &[usize], x: &[f64]) -> Vec<f64> {
    let g = string.len();
    let mut cur = x.to_vec();
    for l in 0..g {
        cur = pair_dr(sets, string[l], string[(l + 1) % g], &cur);
    }
    cur
}

fn accumulate(acc: &mut [f64], w: f64, y: &[f64]) {
    for (a, yi) in acc.iter_mut().zip(y) {
        *a += w * yi;
    }
}

/// String-averaging Douglas-Rachford.
pub fn sa_dr(
    problem: &FeasibilityProblem,
    plan: &StringPlan,
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    check_plan_size(plan.num_sets(), problem)?;
    let sets = problem.sets();
    drive("sa-dr", problem, x0, cfg, 1, |_, x| {
        let mut acc = vec![0.0; x.len()];
        for (string, &w) in plan.strings().iter().zip(plan.weights()) {
            accumulate(&mut acc, w, &string_operator(sets, string, x));
        }
        Ok(acc)
    })
}

/// Block-iterative Douglas-Rachford with the cyclic control `t(k) = k mod M`.
///
/// The record's `sweep_length` is `M`, so [`RunRecord::sweep_iterates`] yields `x^{jM}`.
pub fn bi_dr(
    problem: &FeasibilityProblem,
    plan: &BlockPlan,
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    check_plan_size(plan.num_sets(), problem)?;
    let sets = problem.sets();
    let num_blocks = plan.num_blocks();
    drive("bi-dr", problem, x0, cfg, num_blocks, |k, x| {
        let t = k % num_blocks;
        let block = &plan.blocks()[t];
        let g = block.len();
        let mut acc = vec![0.0; x.len()];
        for (l, &w) in plan.weights()[t].iter().enumerate() {
            accumulate(&mut acc, w, &pair_dr(sets, block[l], block[(l + 1) % g], x));
        }
        Ok(acc)
    })
}

/// `x^{k+1} = sum_{r=2}^{m} w_r T_{C_1..C_r}(x^k)`; `weights[0]` is `w_2`.
pub fn r_set_dr_scheme(
    problem: &FeasibilityProblem,
    weights: &[f64],
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    let m = problem.num_sets();
    if m < 2 {
        return Err(Error::InvalidProblem(format!(
            "the r-set scheme needs at least 2 sets, got {m}"
        )));
    }
    if weights.len() != m - 1 {
        return Err(Error::InvalidWeights(format!(
            "expected {} weights (r = 2..{m}), got {}",
            m - 1,
            weights.len()
        )));
    }
    validate_weights(weights)?;
    let sets = problem.sets();
    drive("rset-dr", problem, x0, cfg, 1, |_, x| {
        // V_r = R_{C_r} V_{r-1}; the prefix chain is shared across r.
        let mut v = reflect(&sets[0], x);
        let mut acc = vec![0.0; x.len()];
        for (r, &w) in weights.iter().enumerate() {
            v = reflect(&sets[r + 1], &v);
            let t: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| 0.5 * (xi + vi)).collect();
            accumulate(&mut acc, w, &t);
        }
        Ok(acc)
    })
}

/// Plain fixed-point iteration `x^{k+1} = op(x^k)`.
pub fn fixed_point_iteration(
    name: &str,
    problem: &FeasibilityProblem,
    op: &OperatorExpr,
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    check_dim(problem.dim(), op.dim())?;
    drive(name, problem, x0, cfg, 1, |_, x| {
        Ok(op.apply(&Point::from_vec_unchecked(x.to_vec()))?.into_vec())
    })
}

/// Cyclic Douglas-Rachford: `x^{k+1} = T_{m,1} T_{m-1,m} .. T_{1,2} x^k`.
///
/// Built as an operator expression rather than through the string code path, so comparing it
/// with single-string [`sa_dr`] checks two independent evaluations of the same operator.
pub fn cyclic_dr(problem: &FeasibilityProblem, x0: &Point, cfg: &StopConfig) -> Result<RunRecord> {
    let m = problem.num_sets();
    if m < 2 {
        return Err(Error::InvalidProblem(format!(
            "cyclic Douglas-Rachford needs at least 2 sets, got {m}"
        )));
    }
    let sets = problem.sets();
    let factors = (0..m)
        .map(|i| OperatorExpr::two_set_dr(sets[i].clone(), sets[(i + 1) % m].clone()))
        .collect::<Result<Vec<_>>>()?;
    let op = OperatorExpr::composition(factors)?;
    fixed_point_iteration("cyclic-dr", problem, &op, x0, cfg)
}

/// The string plan behind [`simultaneous_dr`]: strings `(i, i+1)` for `i = 1..m-1` and the
/// wrap-around `(m, 1)`.
pub fn simultaneous_plan(num_sets: usize, weights: Vec<f64>) -> Result<StringPlan> {
    if num_sets < 2 {
        return Err(Error::InvalidProblem(format!(
            "simultaneous Douglas-Rachford needs at least 2 sets, got {num_sets}"
        )));
    }
    let strings = (1..=num_sets).map(|i| vec![i, i % num_sets + 1]).collect();
    StringPlan::new(strings, weights, num_sets)
}

/// Simultaneous Douglas-Rachford: string averaging over the `m` consecutive pairs
/// `(1,2), (2,3), .., (m,1)`, each string of length two, with one weight per pair.
///
/// Each string contributes `T_{j,i}(T_{i,j}(x))`. A single [`bi_dr`] block over all sets averages
/// the single factors `T_{i,i+1}(x)` instead, so the two are different iterations.
pub fn simultaneous_dr(
    problem: &FeasibilityProblem,
    weights: &[f64],
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    let plan = simultaneous_plan(problem.num_sets(), weights.to_vec())?;
    let mut rec = sa_dr(problem, &plan, x0, cfg)?;
    rec.algorithm = "sdr".into();
    Ok(rec)
}

/// Cyclic projections `x^{k+1} = P_{C_m} .. P_{C_1} x^k`, evaluated directly from the set
/// projections. Serves as an oracle for the Douglas-Rachford schemes.
pub fn reference_cyclic_projections(
    problem: &FeasibilityProblem,
    x0: &Point,
    cfg: &StopConfig,
) -> Result<RunRecord> {
    let sets = problem.sets();
    drive("pocs", problem, x0, cfg, 1, |_, x| {
        let mut cur = x.to_vec();
        for s in sets {
            let mut next = cur.clone();
            s.project_slice(&cur, &mut next);
            cur = next;
        }
        Ok(cur)
    })
}

#[cfg(test)]
mod tests;
