use pu_core::embedding::*;
use pu_core::linalg::{rel_diff, symmetric_eigenvalues};
use pu_core::model::{blend_j, PuParams};
use pu_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p12() -> PuParams {
    PuParams::new(1.0, 2.0).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12 * b.abs().max(1.0)
}

#[test]
fn ta1_reference_row() {
    let m = reference_family(Family::Ta1, Branch::Plus, FreeParams::coupled(1.0, 2.0, 1.0), &p12()).unwrap();
    assert_eq!((m.mu0, m.mu2, m.nu0, m.nu2), (4.0, 0.5, 2.0, 0.25));
    assert_eq!(m.status, MapStatus::Singular);
}

#[test]
fn tb1_reference_row_leaves_phi2_residual() {
    let m = reference_family(Family::Tb1, Branch::Plus, FreeParams::with_b_x(1.0, 2.0, 1.0), &p12()).unwrap();
    assert_eq!((m.mu0, m.mu2, m.nu0, m.nu2), (3.0, 1.0, -2.0, 0.0));
    assert_eq!((m.model.a_y, m.model.b_y), (-0.25, 1.5));
    let v = verify_map(&m);
    assert!(matches!(v.phi1.kind, ImageKind::Proportional(k) if close(k, 1.0)));
    let c = v.phi1.coefficients;
    assert!(close(c[4], 1.0) && close(c[2], 5.0) && close(c[0], 4.0));
    assert_eq!(v.phi2.kind, ImageKind::Neither);
    let r = v.phi2.coefficients;
    assert!(close(r[2], 1.5) && r[0].abs() < 1e-12 && r[4].abs() < 1e-12, "{r:?}");
    assert!(!v.contract_satisfied);
}

#[test]
fn tb1_solved_and_reconciled() {
    let free = FreeParams::with_b_x(1.0, 2.0, 1.0);
    let rec = reconcile_family(Family::Tb1, Branch::Plus, free, &p12());
    assert!(rec.reference_discrepant);
    let s = rec.solved.unwrap();
    assert!(rec.solved_verification.unwrap().contract_satisfied);
    assert!(close(s.model.a_y, 0.5) && close(s.model.b_y, 1.5));
    let d: Vec<_> = rec
        .deltas
        .iter()
        .filter(|d| d.delta.abs() > 1e-12)
        .map(|d| d.name)
        .collect();
    assert_eq!(d, ["a_y"]);

    let pb = pullback_hamiltonian(&s).unwrap();
    let t = pb.tabulated.unwrap();
    assert_eq!((t.c1, t.c2), (-3.0, -1.0));
    let f = pb.fitted.unwrap();
    assert!(close(f.c1, -3.0) && close(f.c2, 4.0), "{f:?}");
}

#[test]
fn family_a_opposite_signs_solves() {
    let free = FreeParams::coupled(1.0, -1.0, 0.0);
    for b in [Branch::Plus, Branch::Minus] {
        let m = solve_family(Family::Ta2, b, free, &p12()).unwrap();
        let v = verify_map(&m);
        assert!(v.contract_satisfied && v.max_relative_residual < 1e-12);
        let pf = pushforward_poisson(&m).unwrap();
        assert_eq!(pf.dq_dqd, 0.0);
        assert!(pf.proportional_to_j1);
    }
}

#[test]
fn solve_errors() {
    let p = p12();
    let bad = FreeParams::coupled(0.0, 1.0, 0.0);
    assert!(matches!(
        solve_family(Family::Ta2, Branch::Plus, bad, &p),
        Err(Error::NoSolution(_))
    ));
    // tau = 0 at b_x = a_x w^2.
    let t0 = FreeParams::with_b_x(1.0, 4.0, 0.0);
    assert!(matches!(
        solve_family(Family::Tb1, Branch::Plus, t0, &p),
        Err(Error::NonUnique { dimension: 2 })
    ));
    let g0 = FreeParams::with_b_x(1.0, 2.0, 0.0);
    assert!(matches!(
        solve_family(Family::Tb1, Branch::Plus, g0, &p),
        Err(Error::NoSolution(_))
    ));
    let c = FreeParams::coupled(1.0, 1.0, 2.0);
    assert!(matches!(
        solve_family(Family::Ta2, Branch::Plus, c, &p),
        Err(Error::ComplexBranch { .. })
    ));
    assert!(matches!(
        reference_family(Family::Tb1, Branch::Plus, t0, &p),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn degenerate_families_are_reported() {
    let p = p12();
    let tb2 = solve_family(Family::Tb2, Branch::Minus, FreeParams::with_b_y(1.0, 2.0, 0.5), &p).unwrap();
    assert_eq!(tb2.status, MapStatus::Degenerate);
    assert!(verify_map(&tb2).contract_satisfied);
    assert!(matches!(pushforward_poisson(&tb2), Err(Error::SingularMap { .. })));
    let pb = pullback_hamiltonian(&tb2).unwrap();
    assert!(pb.fitted.is_none() && pb.tabulated.is_some());

    let ta1 = solve_family(Family::Ta1, Branch::Plus, FreeParams::coupled(1.0, 2.0, 1.0), &p).unwrap();
    assert_eq!(ta1.status, MapStatus::Singular);
    assert!(verify_map(&ta1).rank_deficient);
    assert!(pullback_hamiltonian(&ta1).unwrap().fitted.is_none());
}

#[test]
fn proportional_transform_is_neither() {
    let model = TwoDimModel {
        a_x: 1.0,
        a_y: 1.0,
        b_x: 1.0,
        b_y: 1.0,
        g: 0.5,
    };
    let m = TransformMap::new(Family::Ta2, Branch::Plus, 1.0, 0.0, 1.0, 0.0, model, p12());
    let v = verify_map(&m);
    assert_eq!((v.phi1.kind, v.phi2.kind), (ImageKind::Neither, ImageKind::Neither));
    assert!(v.rank_deficient && !v.contract_satisfied);
}

#[test]
fn pushforward_round_trip() {
    let m = solve_family(Family::Ta2, Branch::Plus, FreeParams::coupled(1.3, 0.7, 0.2), &p12()).unwrap();
    let pf = pushforward_poisson(&m).unwrap();
    let back = m.jac * pf.tensor.matrix() * m.jac.transpose();
    assert!((back - canonical_2d()).norm() < 1e-13);
    assert!((pf.dq_dqd - pf.dq_dqd_closed_form).abs() < 1e-12 * pf.dq_dqd.abs().max(1.0));
    assert!(pf.dq_dqd > 0.0);
}

fn draw(rng: &mut ChaCha8Rng, family: Family) -> (PuParams, FreeParams) {
    let mag = |rng: &mut ChaCha8Rng| {
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        s * rng.random_range(0.2..3.0)
    };
    let w1: f64 = rng.random_range(0.3..3.0);
    let w2 = loop {
        let w: f64 = rng.random_range(0.3..3.0);
        if (w - w1).abs() > 0.05 {
            break w;
        }
    };
    let p = PuParams::new(w1, w2).unwrap();
    let ax = mag(rng);
    let g = rng.random_range(-1.0..1.0);
    let free = match family {
        Family::Ta1 | Family::Ta2 => {
            // Every fourth draw sits on the a_y = -a_x locus.
            let ay = if rng.random_range(0..4) == 0 { -ax } else { mag(rng) };
            FreeParams::coupled(ax, ay, g)
        }
        Family::Tb1 => FreeParams::with_b_x(ax, rng.random_range(-3.0..3.0), g),
        Family::Tb2 => FreeParams::with_b_y(ax, mag(rng), g),
    };
    (p, free)
}

#[test]
fn random_draws_honour_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for family in [Family::Ta1, Family::Ta2, Family::Tb1, Family::Tb2] {
        let mut done = 0;
        while done < 50 {
            let (p, free) = draw(&mut rng, family);
            let branch = if done % 2 == 0 { Branch::Plus } else { Branch::Minus };
            let m = match solve_family(family, branch, free, &p) {
                Ok(m) => m,
                Err(Error::ComplexBranch { .. }) => continue,
                Err(e) => panic!("{family:?} {free:?}: {e}"),
            };
            done += 1;
            let v = verify_map(&m);
            assert!(v.contract_satisfied, "{family:?} {free:?} {v:?}");
            assert!(v.max_relative_residual < 1e-12);
            let expected = match family {
                Family::Ta1 => MapStatus::Singular,
                Family::Tb2 => MapStatus::Degenerate,
                _ => MapStatus::Regular,
            };
            assert_eq!(m.status, expected);
            if m.status != MapStatus::Regular {
                continue;
            }
            let pf = pushforward_poisson(&m).unwrap();
            let (ax, ay) = (m.model.a_x, m.model.a_y);
            if ax * ay > 0.0 {
                assert!(pf.dq_dqd.abs() > 1e-10);
            }
            if pf.dq_dqd.abs() <= 1e-10 * pf.tensor.matrix().norm() {
                assert!(ax * ay < 0.0);
            }
            if pf.proportional_to_j1 {
                let e = symmetric_eigenvalues(&m.model.hamiltonian_hessian().unwrap());
                assert!(e[0] < 0.0);
            }
            let pb = pullback_hamiltonian(&m).unwrap();
            let c = pb.fitted.unwrap();
            let bj = blend_j(&p, c.c1, c.c2).unwrap();
            assert!(
                rel_diff(bj.tensor.matrix(), pf.tensor.matrix()) < 1e-9,
                "{family:?} {free:?}"
            );
        }
    }
}

#[test]
fn positivity_matches_inequality_on_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (p, _) = draw(&mut rng, Family::Ta2);
        let (w1, w2) = (p.omega1().powi(2), p.omega2().powi(2));
        for i in 0..50 {
            for j in 0..50 {
                let a = -3.0 + 6.0 * (i as f64 + 0.5) / 50.0;
                let b = -3.0 * w1.max(w2) + 6.0 * w1.max(w2) * (j as f64 + 0.5) / 50.0;
                if (a * w1 - b).abs() < 1e-10 || (a * w2 - b).abs() < 1e-10 {
                    continue;
                }
                let h = sum_of_squares(&p, a, b).unwrap();
                assert_eq!(positivity(&h).positive_definite, sum_of_squares_predicate(&p, a, b));
                assert!(fit_blend(&p, &h).residual < 1e-10);
            }
        }
    }
}
