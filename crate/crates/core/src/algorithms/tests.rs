use super::*;
use crate::harness::{default_start, generate, InstanceSpec};

fn pt(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

/// C1 = (-inf, 1], C2 = [-1, inf).
fn line_pair(interior: bool) -> FeasibilityProblem {
    let sets = vec![
        ConvexSet::halfspace(vec![1.0], 1.0).unwrap(),
        ConvexSet::halfspace(vec![-1.0], 1.0).unwrap(),
    ];
    if interior {
        FeasibilityProblem::new(sets, Some(pt(&[0.0])), Some(0.5)).unwrap()
    } else {
        FeasibilityProblem::from_sets(sets).unwrap()
    }
}

fn coordinate_hyperplanes() -> FeasibilityProblem {
    let sets = (0..3)
        .map(|i| {
            let mut a = vec![0.0; 3];
            a[i] = 1.0;
            ConvexSet::hyperplane(a, 0.0).unwrap()
        })
        .collect();
    FeasibilityProblem::from_sets(sets).unwrap()
}

#[test]
fn sa_dr_line_pair_hand_trace() {
    let problem = line_pair(true);
    let plan = StringPlan::new(vec![vec![1, 2]], vec![1.0], 2).unwrap();
    let rec = sa_dr(&problem, &plan, &pt(&[5.0]), &StopConfig::default()).unwrap();
    // T_{1,2}(5) = 3, then T_{2,1}(3) = (3 + R_C1(3)) / 2 = (3 - 1) / 2 = 1.
    assert_eq!(rec.iterate_at(1).unwrap().as_slice(), &[1.0]);
    assert_eq!(rec.iterations, 1);
    assert_eq!(rec.residuals, vec![4.0, 0.0]);
    assert_eq!(rec.fejer_distances, vec![5.0, 1.0]);
    assert_eq!(rec.step_norms, vec![4.0]);
    assert_eq!(rec.stop_reason, StopReason::ResidualTol);
}

#[test]
fn bi_dr_line_pair_hand_trace() {
    let problem = line_pair(true);
    let plan = BlockPlan::new(vec![vec![1, 2]], vec![vec![0.5, 0.5]], 2).unwrap();
    let cfg = StopConfig::default().with_max_iters(1);
    let rec = bi_dr(&problem, &plan, &pt(&[5.0]), &cfg).unwrap();
    // z1 = T_{1,2}(5) = 3, z2 = T_{2,1}(5) = 1, x1 = 2.
    assert_eq!(rec.final_iterate().as_slice(), &[2.0]);
    assert_eq!(rec.stop_reason, StopReason::MaxIters);
}

#[test]
fn feasible_start_is_stationary() {
    let problem = generate(&InstanceSpec::polytope(3, 6, 0.4, 2)).unwrap();
    let p = problem.interior_point().unwrap().clone();
    let cfg = StopConfig::default();
    let strings = StringPlan::with_equal_weights(vec![vec![1, 2, 3], vec![4, 5, 6]], 6).unwrap();
    let blocks = BlockPlan::with_equal_weights(vec![vec![1, 2, 3], vec![4, 5, 6]], 6).unwrap();
    let runs = [
        sa_dr(&problem, &strings, &p, &cfg).unwrap(),
        bi_dr(&problem, &blocks, &p, &cfg).unwrap(),
        r_set_dr_scheme(&problem, &[0.2; 5], &p, &cfg).unwrap(),
        cyclic_dr(&problem, &p, &cfg).unwrap(),
        simultaneous_dr(&problem, &[1.0 / 6.0; 6], &p, &cfg).unwrap(),
        reference_cyclic_projections(&problem, &p, &cfg).unwrap(),
    ];
    for rec in runs {
        assert_eq!(rec.iterations, 1, "{}", rec.algorithm);
        // Weights like 1/3 do not sum to one exactly in floating point.
        assert!(rec.step_norms[0] <= 1e-15, "{}", rec.algorithm);
        assert!(
            rec.final_iterate().distance_to(&p) <= 1e-15,
            "{}",
            rec.algorithm
        );
    }
}

#[test]
fn single_string_matches_cyclic_dr() {
    let problem = generate(&InstanceSpec::ball_box_mix(3, 2, 2, 0.1, 17)).unwrap();
    let x0 = default_start(&problem, 1);
    let cfg = StopConfig::default()
        .with_max_iters(200)
        .with_residual_tol(1e-300)
        .with_step_tol(0.0);
    let a = sa_dr(&problem, &StringPlan::single_string(4).unwrap(), &x0, &cfg).unwrap();
    let b = cyclic_dr(&problem, &x0, &cfg).unwrap();
    assert_eq!(a.iterations, b.iterations);
    for k in 0..=a.iterations {
        let d = a
            .iterate_at(k)
            .unwrap()
            .distance_to(b.iterate_at(k).unwrap());
        assert!(d <= 1e-12, "k={k}: {d}");
    }
}

#[test]
fn line_pair_cyclic_dr_first_step() {
    let rec = cyclic_dr(&line_pair(false), &pt(&[5.0]), &StopConfig::default()).unwrap();
    assert_eq!(rec.iterate_at(1).unwrap().as_slice(), &[1.0]);
    let rec = reference_cyclic_projections(&line_pair(false), &pt(&[5.0]), &StopConfig::default())
        .unwrap();
    assert_eq!(rec.iterate_at(1).unwrap().as_slice(), &[1.0]);
    assert_eq!(rec.stop_reason, StopReason::ResidualTol);
}

#[test]
fn start_in_first_set_turns_cyclic_dr_into_cyclic_projections() {
    let problem = generate(&InstanceSpec::polytope(4, 5, 0.2, 9)).unwrap();
    let x0 = problem.set(0).project(&default_start(&problem, 9)).unwrap();
    let cfg = StopConfig::default()
        .with_max_iters(100)
        .with_residual_tol(1e-300)
        .with_step_tol(0.0);
    let dr = cyclic_dr(&problem, &x0, &cfg).unwrap();
    // One cyclic DR sweep from a point of C1 equals P_C1 P_Cm .. P_C2.
    let rotated = problem.reordered(&[1, 2, 3, 4, 0]).unwrap();
    let pocs = reference_cyclic_projections(&rotated, &x0, &cfg).unwrap();
    for k in 0..=dr.iterations {
        let d = dr
            .iterate_at(k)
            .unwrap()
            .distance_to(pocs.iterate_at(k).unwrap());
        assert!(d <= 1e-10, "k={k}: {d}");
    }
}

#[test]
fn r_set_scheme_on_coordinate_hyperplanes() {
    let problem = coordinate_hyperplanes();
    let w = [0.3, 0.7];
    let cfg = StopConfig::default().with_max_iters(1);
    let rec = r_set_dr_scheme(&problem, &w, &pt(&[1.0, 2.0, 3.0]), &cfg).unwrap();
    // r=2 gives (0, 0, x3), r=3 gives 0.
    assert_eq!(rec.final_iterate().as_slice(), &[0.0, 0.0, 0.3 * 3.0]);
    let rec = r_set_dr_scheme(&problem, &w, &pt(&[1.0, 2.0, 3.0]), &StopConfig::default()).unwrap();
    assert!(rec.final_residual() <= 1e-8);
    assert!(rec.final_iterate().norm() <= 1e-8);
    // Geometric decay by w_2 per step.
    for k in 1..rec.iterations {
        let a = rec.iterate_at(k).unwrap().norm();
        let b = rec.iterate_at(k + 1).unwrap().norm();
        assert!((b - 0.3 * a).abs() <= 1e-15 * a.max(1.0));
    }
}

#[test]
fn r_set_scheme_with_two_sets_is_plain_dr() {
    let problem = generate(&InstanceSpec::ball_box_mix(3, 1, 1, 0.1, 4)).unwrap();
    let x0 = default_start(&problem, 4);
    let cfg = StopConfig::default().with_max_iters(300);
    let scheme = r_set_dr_scheme(&problem, &[1.0], &x0, &cfg).unwrap();
    let op = OperatorExpr::two_set_dr(problem.set(0).clone(), problem.set(1).clone()).unwrap();
    let plain = fixed_point_iteration("dr", &problem, &op, &x0, &cfg).unwrap();
    assert_eq!(scheme.iterates, plain.iterates);
    assert_eq!(scheme.step_norms, plain.step_norms);
}

#[test]
fn simultaneous_dr_on_line_pair() {
    let plan = simultaneous_plan(3, vec![0.2, 0.3, 0.5]).unwrap();
    assert_eq!(plan.strings(), &[vec![1, 2], vec![2, 3], vec![3, 1]]);
    // Strings (1,2) and (2,1): T_{2,1} T_{1,2} (5) = 1 and T_{1,2} T_{2,1} (5) = T_{1,2}(1) = 1.
    let rec = simultaneous_dr(
        &line_pair(false),
        &[0.5, 0.5],
        &pt(&[5.0]),
        &StopConfig::default(),
    )
    .unwrap();
    assert_eq!(rec.iterate_at(1).unwrap().as_slice(), &[1.0]);
    assert_eq!(rec.algorithm, "sdr");
}

#[test]
fn bi_dr_visits_blocks_cyclically() {
    let problem = generate(&InstanceSpec::polytope(2, 4, 0.3, 5)).unwrap();
    let x0 = pt(&[9.0, -7.0]);
    let plan = BlockPlan::with_equal_weights(vec![vec![1, 2], vec![3, 4], vec![2, 3]], 4).unwrap();
    let cfg = StopConfig::default()
        .with_residual_tol(1e-300)
        .with_step_tol(0.0)
        .with_max_iters(3);
    let rec = bi_dr(&problem, &plan, &x0, &cfg).unwrap();
    assert_eq!(rec.iterations, 3);
    assert_eq!(rec.sweep_length, 3);
    let sets = problem.sets();
    let mut x = x0.as_slice().to_vec();
    for k in 0..rec.iterations {
        let block = &plan.blocks()[k % 3];
        let z1 = crate::operators::dr_chain([&sets[block[0] - 1], &sets[block[1] - 1]], &x);
        let z2 = crate::operators::dr_chain([&sets[block[1] - 1], &sets[block[0] - 1]], &x);
        x = z1.iter().zip(&z2).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        assert_eq!(rec.iterate_at(k + 1).unwrap().as_slice(), x.as_slice());
    }
    let sweeps: Vec<_> = rec.sweep_iterates().into_iter().cloned().collect();
    assert_eq!(sweeps.len(), rec.iterations / 3 + 1);
    assert_eq!(&sweeps[1], rec.iterate_at(3).unwrap());
}

#[test]
fn projected_dr_limit_lies_in_both_sets() {
    // Ball and a tangent-ish line: nonempty intersection with empty interior inside the line.
    let a = ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
    let b = ConvexSet::hyperplane(vec![1.0, 1.0], 1.0).unwrap();
    let problem = FeasibilityProblem::from_sets(vec![a.clone(), b.clone()]).unwrap();
    let op = OperatorExpr::two_set_dr(a.clone(), b.clone()).unwrap();
    let cfg = StopConfig::default()
        .with_residual_tol(1e-300)
        .with_step_tol(1e-15);
    let rec = fixed_point_iteration("dr", &problem, &op, &pt(&[4.0, -3.0]), &cfg).unwrap();
    let shadow = a.project(rec.final_iterate()).unwrap();
    assert_eq!(a.distance(&shadow).unwrap(), 0.0);
    assert!(b.distance(&shadow).unwrap() <= 1e-6);
}

#[test]
fn plan_validation() {
    assert!(matches!(
        StringPlan::new(vec![vec![1]], vec![1.0], 1),
        Err(Error::InvalidPlan(_))
    ));
    let err = StringPlan::with_equal_weights(vec![vec![1, 2], vec![2, 3]], 4).unwrap_err();
    assert!(err.to_string().contains("missing: 4"), "{err}");
    assert!(StringPlan::new(vec![vec![1, 5]], vec![1.0], 4).is_err());
    assert!(StringPlan::new(vec![vec![0, 1]], vec![1.0], 1).is_err());
    assert!(matches!(
        StringPlan::new(vec![vec![1, 2], vec![2, 1]], vec![0.5, 0.6], 2),
        Err(Error::InvalidWeights(_))
    ));
    assert!(BlockPlan::new(vec![vec![1, 2]], vec![vec![1.0]], 2).is_err());
    assert!(BlockPlan::new(vec![vec![1, 2]], vec![vec![0.5, 0.4]], 2).is_err());
    // Repeated indices are allowed.
    assert!(StringPlan::new(vec![vec![1, 2, 1]], vec![1.0], 2).is_ok());

    let problem = line_pair(false);
    let plan = StringPlan::single_string(3).unwrap();
    assert!(sa_dr(&problem, &plan, &pt(&[0.0]), &StopConfig::default()).is_err());
}

#[test]
fn r_set_scheme_argument_checks() {
    let problem = line_pair(false);
    assert!(r_set_dr_scheme(&problem, &[0.5, 0.5], &pt(&[0.0]), &StopConfig::default()).is_err());
    let single = FeasibilityProblem::from_sets(vec![problem.set(0).clone()]).unwrap();
    assert!(r_set_dr_scheme(&single, &[], &pt(&[0.0]), &StopConfig::default()).is_err());
    assert!(cyclic_dr(&single, &pt(&[0.0]), &StopConfig::default()).is_err());
}

#[test]
fn trace_stride_thins_iterates() {
    let problem = generate(&InstanceSpec::lines_through_point(2, 2, 0)).unwrap();
    let cfg = StopConfig::default()
        .with_max_iters(25)
        .with_residual_tol(1e-300)
        .with_trace_stride(10);
    let rec = sa_dr(
        &problem,
        &StringPlan::single_string(2).unwrap(),
        &pt(&[3.0, 4.0]),
        &cfg,
    )
    .unwrap();
    assert_eq!(rec.iterate_indices, vec![0, 10, 20, 25]);
    assert_eq!(rec.residuals.len(), 26);
    assert_eq!(rec.step_norms.len(), 25);
    assert!(rec.iterate_at(5).is_none());
}

#[test]
fn invalid_inputs_are_errors() {
    let problem = line_pair(false);
    let plan = StringPlan::single_string(2).unwrap();
    assert!(matches!(
        sa_dr(&problem, &plan, &pt(&[0.0, 1.0]), &StopConfig::default()),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(sa_dr(
        &problem,
        &plan,
        &pt(&[0.0]),
        &StopConfig::default().with_max_iters(0)
    )
    .is_err());
}
