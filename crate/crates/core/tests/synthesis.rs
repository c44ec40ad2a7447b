use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsmrc_core::linalg::{inverse, Mat};
use tsmrc_core::mrc::{
    assemble_lmis, augment, build_reference_model, combine_gains, design_plants, synthesize, verify_dregion,
    vertex_hinf, Design, ReferenceKind, Synthesis, SynthesisSpec, REFERENCE_POLE_TOL,
};
use tsmrc_core::sdp::{eig_margin, solve, Sense, SolveOptions, SolveStatus};
use tsmrc_core::ts::{build_grid, build_submodels, MembershipGrid, PerUnitModel};
use tsmrc_core::turbine::{calibrate_surface, TurbineParams};
use tsmrc_core::Error;

fn plants(design: Design) -> (Vec<PerUnitModel>, MembershipGrid) {
    let params = TurbineParams::default();
    let surface = calibrate_surface(&params).unwrap();
    let points = build_grid(&params, &surface, 12.0, 24.0, 13).unwrap();
    let subs = build_submodels(design.model_kind(), &points, &params, &surface).unwrap();
    let grid = MembershipGrid::from_points(&points).unwrap();
    (design_plants(design, &subs, &params.bases()).unwrap(), grid)
}

fn run(design: Design, spec: &SynthesisSpec) -> Synthesis {
    let (p, grid) = plants(design);
    synthesize(design, &p, &grid, spec, &SolveOptions::default()).unwrap()
}

fn assert_reverified(s: &Synthesis) {
    let y = &s.solution.values;
    for (block, family) in s.lmi.problem.blocks().iter().zip(&s.lmi.families) {
        let e = eig_margin(&block.expr.eval(y)).unwrap();
        let ok = match block.sense {
            Sense::Positive => e.min > 0.0,
            Sense::Negative => e.max < 0.0,
        };
        assert!(ok, "{family} block {} has extremes {e:?}", block.label);
    }
}

#[test]
fn speed_design_is_feasible_and_reverifies() {
    let s = run(Design::Speed, &SynthesisSpec::speed());
    assert_eq!(s.solution.status, SolveStatus::Feasible);
    assert_eq!(s.lmi.problem.blocks().len(), 149);
    assert!(s.schedule.gains.iter().all(|k| k.shape() == (1, 3)));
    assert_reverified(&s);
}

#[test]
fn torque_design_meets_region_and_gain_bound() {
    let spec = SynthesisSpec::torque();
    let s = run(Design::Torque, &spec);
    assert_eq!(s.lmi.problem.blocks().len(), 149);
    assert!(s.schedule.gains.iter().all(|k| k.shape() == (2, 8)));
    assert_reverified(&s);

    let grid = s.schedule.grid().unwrap();
    let report = verify_dregion(&s.augmented, &s.schedule, &spec.region(), &grid.active_pairs(), 1e-6);
    assert!(report.is_clean(), "{:?}", report.violations);
    for (i, aug) in s.augmented.iter().enumerate() {
        let norm = vertex_hinf(aug, &s.schedule.gains[i], i).unwrap();
        assert!(norm <= spec.gamma * (1.0 + 1e-3), "vertex {i}: {norm}");
    }

    // V = x'X⁻¹x decreases along every active pair
    let p = inverse(&s.x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &(i, j) in &grid.active_pairs() {
        let acl = s.augmented[i].closed_loop(&s.schedule.gains[j]);
        let lyap = acl.transpose() * &p + &p * &acl;
        for _ in 0..100 {
            let x = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
            assert!((x.transpose() * &lyap * &x)[(0, 0)] < 0.0);
        }
    }
}

#[test]
fn combined_schedule_keeps_region_and_reference_poles() {
    let speed = run(Design::Speed, &SynthesisSpec::speed());
    let torque = run(Design::Torque, &SynthesisSpec::torque());
    let combined = combine_gains(&speed.schedule, &torque.schedule).unwrap();

    let (p4, grid) = plants(Design::Torque);
    let reference = build_reference_model(ReferenceKind::SpeedAndTorque, &[10.0, 0.3]).unwrap();
    let aug = augment(&p4, &reference).unwrap();
    let region = SynthesisSpec::speed().region().union(&SynthesisSpec::torque().region());
    let report = verify_dregion(&aug, &combined, &region, &grid.active_pairs(), 1e-6);
    assert!(report.is_clean(), "{:?}", report.violations);
    for s in &report.spectra {
        assert_eq!(s.reference.len(), 2);
        assert!(s.reference.iter().any(|z| (z.re + 0.1).abs() < REFERENCE_POLE_TOL));
        assert!(s.reference.iter().any(|z| (z.re + 1.0 / 0.3).abs() < REFERENCE_POLE_TOL));
    }

    // opening the pitch loop leaves the torque row acting alone: the shaped
    // spectrum does not depend on which reference model is attached
    let torque_ref = build_reference_model(ReferenceKind::SpeedAndTorque, &[4.0, 0.3]).unwrap();
    let aug_t = augment(&p4, &torque_ref).unwrap();
    let mut opened = combined.clone();
    for k in &mut opened.gains {
        k.row_mut(0).fill(0.0);
    }
    let pairs = [(6, 6)];
    let a = verify_dregion(&aug, &opened, &region, &pairs, 1e-6);
    let b = verify_dregion(&aug_t, &opened, &region, &pairs, 1e-6);
    let sorted = |v: &[num_complex::Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        v
    };
    for (x, y) in sorted(&a.spectra[0].shaped).iter().zip(sorted(&b.spectra[0].shaped).iter()) {
        assert!((x - y).norm() < 1e-9);
    }
}

#[test]
fn collapsed_strip_is_infeasible() {
    let (p, grid) = plants(Design::Torque);
    let spec = SynthesisSpec { alpha_min: 1.0, alpha_max: 1.0, ..SynthesisSpec::torque() };
    let reference = build_reference_model(ReferenceKind::SpeedAndTorque, &spec.taus).unwrap();
    let lmi = assemble_lmis(&augment(&p, &reference).unwrap(), &grid.active_pairs(), &spec).unwrap();
    let s = solve(&lmi.problem, &SolveOptions::default()).unwrap();
    assert_eq!(s.status, SolveStatus::Infeasible);
}

#[test]
fn unreachable_decay_rate_names_its_family() {
    let (p, grid) = plants(Design::Torque);
    let spec = SynthesisSpec { alpha_min: 50.0, alpha_max: 100.0, ..SynthesisSpec::torque() };
    match synthesize(Design::Torque, &p, &grid, &spec, &SolveOptions::default()) {
        Err(Error::Infeasible { family, spec, .. }) => {
            assert!(!family.is_empty());
            assert!(spec.contains("50"));
        }
        other => panic!("expected infeasible, got {:?}", other.map(|s| s.solution.status)),
    }
}

#[test]
fn empty_pair_set_rejected() {
    let (p, _) = plants(Design::Speed);
    let reference = build_reference_model(ReferenceKind::SpeedOnly, &[10.0]).unwrap();
    let aug = augment(&p, &reference).unwrap();
    assert!(matches!(assemble_lmis(&aug, &[], &SynthesisSpec::speed()), Err(Error::EmptyPairs)));
}

#[test]
fn bounded_real_block_without_reference_input_is_a_stability_lmi() {
    let (p, _) = plants(Design::Speed);
    let reference = build_reference_model(ReferenceKind::SpeedOnly, &[10.0]).unwrap();
    let mut aug = augment(&p[..1], &reference).unwrap();
    aug[0].e = Mat::zeros(3, 1);
    let lmi = assemble_lmis(&aug, &[(0, 0)], &SynthesisSpec::speed()).unwrap();
    let block = &lmi.problem.blocks()[4];
    // with Ē = 0 the middle row and column are constant −γ²I and zeros
    let y = vec![0.3; lmi.problem.scalar_count()];
    let v = block.expr.eval(&y);
    assert_eq!(v[(3, 3)], -9.0);
    assert!((0..3).chain(4..5).all(|k| v[(3, k)] == 0.0));
}
