//! Seeded property suites. Each case reduces a property to a [`Verdict`]; `drfeas verify` exits
//! nonzero when any verdict fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generate::{default_start, generate, InstanceSpec};
use super::io::run_to_csv;
use crate::algorithms::{
    bi_dr, cyclic_dr, r_set_dr_scheme, sa_dr, BlockPlan, RunRecord, StringPlan,
};
use crate::diagnostics::{
    check_asymptotic_regularity, check_fejer, check_fejer_default, compare_trajectories,
    StopConfig, Verdict,
};
use crate::error::{Error, Result};
use crate::geometry::{FeasibilityProblem, Point};
use crate::operators::{probe_fne, probe_sqne, r_set_dr, two_set_dr, OperatorExpr};
use crate::vecops;

pub const SUITES: [&str; 4] = ["geometry", "operators", "algorithms", "diagnostics"];

#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub suite: &'static str,
    pub name: String,
    pub verdict: Verdict,
}

/// Runs one suite by name, or every suite for `"all"` (suites run on separate threads; results
/// come back in [`SUITES`] order).
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<SuiteCase>> {
    match name {
        "geometry" => geometry_suite(seed),
        "operators" => operators_suite(seed),
        "algorithms" => algorithms_suite(seed),
        "diagnostics" => diagnostics_suite(seed),
        "all" => std::thread::scope(|scope| {
            let handles: Vec<_> = SUITES
                .iter()
                .map(|s| scope.spawn(move || run_suite(s, seed)))
                .collect();
            let mut cases = Vec::new();
            for h in handles {
                cases.extend(h.join().expect("suite thread panicked")?);
            }
            Ok(cases)
        }),
        other => Err(Error::InvalidConfig(format!(
            "unknown suite `{other}`; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

fn case(suite: &'static str, name: impl Into<String>, verdict: Verdict) -> SuiteCase {
    SuiteCase {
        suite,
        name: name.into(),
        verdict,
    }
}

fn at_most(metric: f64, threshold: f64, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed: metric <= threshold,
        metric,
        threshold,
        detail: detail.into(),
    }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Point {
    Point::new((0..n).map(|_| rng.random_range(-scale..scale)).collect()).expect("finite")
}

fn sample_instances(seed: u64, count: u64) -> Result<Vec<FeasibilityProblem>> {
    (0..count)
        .map(|i| {
            let s = seed.wrapping_mul(1000).wrapping_add(i);
            let dim = 2 + (i as usize % 9);
            let spec = match i % 3 {
                0 => InstanceSpec::polytope(dim, 3 + (i as usize % 4), 0.3, s),
                1 => InstanceSpec::ball_box_mix(dim, 2, 2, 0.2, s),
                _ => InstanceSpec::lines_through_point(dim.max(2), 3, s),
            };
            generate(&spec)
        })
        .collect()
}

fn geometry_suite(seed: u64) -> Result<Vec<SuiteCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut char_worst = f64::NEG_INFINITY;
    let mut fne_worst = f64::NEG_INFINITY;
    let mut lip_worst = f64::NEG_INFINITY;
    let mut member_worst = 0.0_f64;
    let mut idem_worst = 0.0_f64;
    for problem in sample_instances(seed, 9)? {
        let n = problem.dim();
        for set in problem.sets() {
            for _ in 0..100 {
                let x = random_point(&mut rng, n, 8.0);
                let y = random_point(&mut rng, n, 8.0);
                let px = set.project(&x)?;
                let py = set.project(&y)?;
                // py is a member of the set; characterization of px against it.
                let lhs: f64 = (0..n)
                    .map(|j| {
                        (x.as_slice()[j] - px.as_slice()[j]) * (py.as_slice()[j] - px.as_slice()[j])
                    })
                    .sum();
                char_worst = char_worst.max(lhs / ((1.0 + x.norm()) * (1.0 + py.norm())));
                let d: Vec<f64> = (0..n)
                    .map(|j| px.as_slice()[j] - py.as_slice()[j])
                    .collect();
                let e: Vec<f64> = (0..n).map(|j| x.as_slice()[j] - y.as_slice()[j]).collect();
                fne_worst = fne_worst.max(vecops::norm_sq(&d) - vecops::dot(&d, &e));
                let gap = (set.distance(&x)? - set.distance(&y)?).abs() - x.distance_to(&y);
                lip_worst = lip_worst.max(gap);
                member_worst = member_worst.max(set.residual(&px)? / (1.0 + x.norm()));
                idem_worst = idem_worst.max(set.project(&px)?.distance_to(&px) / (1.0 + x.norm()));
            }
        }
    }
    const S: &str = "geometry";
    Ok(vec![
        case(
            S,
            "projection characterization",
            at_most(char_worst, 1e-10, "scaled <x-Px, z-Px>"),
        ),
        case(
            S,
            "projection firmly nonexpansive",
            at_most(fne_worst, 1e-10, "|Px-Py|^2 - <Px-Py, x-y>"),
        ),
        case(
            S,
            "distance 1-Lipschitz",
            at_most(lip_worst, 1e-10, "|d(x)-d(y)| - |x-y|"),
        ),
        case(
            S,
            "projection lands in set",
            at_most(member_worst, 1e-12, "residual(Px)/(1+|x|)"),
        ),
        case(
            S,
            "projection idempotent",
            at_most(idem_worst, 1e-12, "|P(Px)-Px|/(1+|x|)"),
        ),
    ])
}

fn operators_suite(seed: u64) -> Result<Vec<SuiteCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0b5e);
    let mut fne_worst = f64::NEG_INFINITY;
    let mut sqne_worst = f64::NEG_INFINITY;
    let mut combo_worst = f64::NEG_INFINITY;
    let mut fixed_worst = 0.0_f64;
    let mut r2_mismatches = 0usize;
    for problem in sample_instances(seed, 6)? {
        let n = problem.dim();
        let sets = problem.sets();
        let z = problem
            .interior_point()
            .expect("generated instances carry a point")
            .clone();
        let pairs: Vec<(Point, Point)> = (0..200)
            .map(|_| {
                (
                    random_point(&mut rng, n, 6.0),
                    random_point(&mut rng, n, 6.0),
                )
            })
            .collect();
        let xs: Vec<Point> = pairs.iter().map(|(x, _)| x.clone()).collect();
        let mut ops = Vec::new();
        for a in sets {
            for b in sets {
                ops.push(two_set_dr(a, b)?);
            }
        }
        for r in 2..=sets.len() {
            ops.push(r_set_dr(&sets[..r])?);
        }
        for op in &ops {
            fne_worst = fne_worst.max(probe_fne(op, &pairs)?.max_violation);
            sqne_worst =
                sqne_worst.max(probe_sqne(op, std::slice::from_ref(&z), &xs, 1.0)?.max_violation);
            fixed_worst = fixed_worst.max(op.apply(&z)?.distance_to(&z));
        }
        let terms = vec![
            (0.25, ops[0].clone()),
            (0.25, ops[1].clone()),
            (0.5, ops[ops.len() - 1].clone()),
        ];
        let combo = OperatorExpr::convex_combination(terms)?;
        combo_worst = combo_worst.max(probe_fne(&combo, &pairs)?.max_violation);
        let two = two_set_dr(&sets[0], &sets[1])?;
        let r = r_set_dr(&sets[..2])?;
        for x in &xs {
            if two.apply(x)? != r.apply(x)? {
                r2_mismatches += 1;
            }
        }
    }
    const S: &str = "operators";
    Ok(vec![
        case(
            S,
            "DR operators firmly nonexpansive",
            at_most(fne_worst, 1e-9, "max FNE violation"),
        ),
        case(
            S,
            "DR operators 1-SQNE",
            at_most(sqne_worst, 1e-9, "max SQNE violation, alpha=1"),
        ),
        case(
            S,
            "convex combination firmly nonexpansive",
            at_most(combo_worst, 1e-9, "max FNE violation"),
        ),
        case(
            S,
            "common point is fixed",
            at_most(fixed_worst, 1e-10, "|T(z)-z|"),
        ),
        case(
            S,
            "r=2 agrees with 2-set DR",
            at_most(r2_mismatches as f64, 0.0, "mismatching samples"),
        ),
    ])
}

fn polytope_runs(seed: u64) -> Result<(FeasibilityProblem, Vec<RunRecord>)> {
    let problem = generate(&InstanceSpec::polytope(5, 10, 0.3, seed))?;
    let x0 = default_start(&problem, seed);
    // Runs continue past the 1e-6 feasibility target so the step norms can settle.
    let cfg = StopConfig::default()
        .with_residual_tol(1e-10)
        .with_max_iters(10_000);
    let strings = StringPlan::with_equal_weights(vec![(1..=5).collect(), (6..=10).collect()], 10)?;
    let blocks = BlockPlan::with_equal_weights(vec![(1..=5).collect(), (6..=10).collect()], 10)?;
    let runs = vec![
        sa_dr(&problem, &strings, &x0, &cfg)?,
        bi_dr(&problem, &blocks, &x0, &cfg)?,
        r_set_dr_scheme(&problem, &[1.0 / 9.0; 9], &x0, &cfg)?,
    ];
    Ok((problem, runs))
}

fn algorithms_suite(seed: u64) -> Result<Vec<SuiteCase>> {
    const S: &str = "algorithms";
    let mut cases = Vec::new();
    let (_, runs) = polytope_runs(seed)?;
    for rec in &runs {
        cases.push(case(
            S,
            format!("{} reaches feasibility", rec.algorithm),
            at_most(rec.final_residual(), 1e-6, "final max-set residual"),
        ));
        cases.push(case(
            S,
            format!("{} Fejér monotone", rec.algorithm),
            check_fejer_default(rec)?,
        ));
        cases.push(case(
            S,
            format!("{} asymptotically regular", rec.algorithm),
            check_asymptotic_regularity(rec, 1e-8),
        ));
    }

    let problem = generate(&InstanceSpec::lines_through_point(4, 3, seed))?;
    let x0 = default_start(&problem, seed);
    let cfg = StopConfig::default()
        .with_max_iters(300)
        .with_residual_tol(1e-300)
        .with_step_tol(0.0);
    let single = sa_dr(
        &problem,
        &StringPlan::single_string(problem.num_sets())?,
        &x0,
        &cfg,
    )?;
    let cyclic = cyclic_dr(&problem, &x0, &cfg)?;
    cases.push(case(
        S,
        "single-string SA-DR equals cyclic DR",
        compare_trajectories(&single, &cyclic, 1e-12, 1, 1)?,
    ));

    let lines = generate(&InstanceSpec::lines_through_point(2, 2, seed))?;
    let p = lines
        .interior_point()
        .expect("lines carry their meeting point")
        .clone();
    let blocks = BlockPlan::with_equal_weights(vec![vec![1, 2]], 2)?;
    let rec = bi_dr(
        &lines,
        &blocks,
        &default_start(&lines, seed),
        &StopConfig::default().with_residual_tol(1e-12),
    )?;
    let y = lines
        .set(0)
        .project(rec.sweep_iterates().last().expect("nonempty"))?;
    cases.push(case(
        S,
        "BI-DR projected limit on two lines",
        at_most(y.distance_to(&p), 1e-6, "|P_C1(y*) - p|"),
    ));
    Ok(cases)
}

fn diagnostics_suite(seed: u64) -> Result<Vec<SuiteCase>> {
    const S: &str = "diagnostics";
    let (_, first) = polytope_runs(seed)?;
    let (_, second) = polytope_runs(seed)?;
    let identical = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| run_to_csv(a) == run_to_csv(b))
        .count();
    let mut cases = vec![case(
        S,
        "same seed gives byte-identical traces",
        Verdict {
            passed: identical == first.len(),
            metric: (first.len() - identical) as f64,
            threshold: 0.0,
            detail: format!("{identical}/{} traces identical", first.len()),
        },
    )];
    let rec = &first[0];
    cases.push(case(
        S,
        "self comparison",
        compare_trajectories(rec, rec, 0.0, 1, 1)?,
    ));

    let mut perturbed = rec.clone();
    let last = perturbed.fejer_distances.len() - 1;
    perturbed.fejer_distances[last] += 1.0;
    let negative = check_fejer(&perturbed, 0.0)?;
    cases.push(case(
        S,
        "Fejér check flags an increasing distance",
        Verdict {
            passed: !negative.passed && negative.metric > 0.0,
            metric: negative.metric,
            threshold: 0.0,
            detail: "negative control: the inner verdict must fail".into(),
        },
    ));
    Ok(cases)
}
