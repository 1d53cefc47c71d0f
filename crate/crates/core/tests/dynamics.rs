use proptest::prelude::*;
use pu_core::config::FIGURE_INITIAL_OSTRO;
use pu_core::dynamics::*;
use pu_core::model::*;
use pu_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p12() -> PuParams {
    PuParams::new(1.0, 2.0).unwrap()
}

fn figure_state(p: &PuParams) -> JetState {
    let o = FIGURE_INITIAL_OSTRO;
    ostro_to_jet(p, &OstroState::new(o[0], o[1], o[2], o[3]))
}

fn settings(t_end: f64) -> IntegratorSettings {
    IntegratorSettings {
        t_end,
        tol: 1e-10,
        ..Default::default()
    }
}

#[test]
fn free_cosine_oracle() {
    let p = p12();
    let t = integrate(
        &p,
        &free_vector_field(&p),
        JetState::new(1.0, 0.0, -1.0, 0.0),
        &settings(100.0),
    )
    .unwrap();
    assert!(t.bounded());
    assert_eq!(t.times.len(), 1001);
    assert!(t.times.windows(2).all(|w| w[0] < w[1]));
    let worst = t
        .times
        .iter()
        .zip(&t.states)
        .map(|(s, z)| (z.q - s.cos()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
    assert!(t.meta.h1_drift < 1e-8, "{}", t.meta.h1_drift);
}

#[test]
fn zero_is_a_fixed_point() {
    let p = p12();
    let t = integrate(
        &p,
        &interacting_vector_field(&p, Potential::quartic(1.0)),
        JetState::ZERO,
        &settings(20.0),
    )
    .unwrap();
    assert!(t.states.iter().all(|z| *z == JetState::ZERO));
}

#[test]
fn settings_are_validated() {
    let p = p12();
    let f = free_vector_field(&p);
    for s in [
        IntegratorSettings {
            sample_rate: 0.0,
            ..settings(1.0)
        },
        IntegratorSettings {
            tol: 1e-2,
            ..settings(1.0)
        },
        IntegratorSettings {
            tol: 1e-14,
            ..settings(1.0)
        },
        settings(-1.0),
    ] {
        assert!(matches!(
            integrate(&p, &f, JetState::ZERO, &s),
            Err(Error::InvalidArgument(_))
        ));
    }
}

#[test]
fn strong_coupling_escapes() {
    let p = p12();
    let z0 = figure_state(&p);
    let v = runaway_scan(&p, &Potential::quartic(100.0), z0, &settings(200.0)).unwrap();
    assert!(!v.bounded);
    let te = v.escape_time.unwrap();
    assert!(te > 0.0 && te < 200.0);
    assert!(v.max_norm >= v.escape_radius);
    assert!(
        runaway_scan(&p, &Potential::Free, z0, &settings(200.0))
            .unwrap()
            .bounded
    );

    let tight = IntegratorSettings {
        escape_radius: Some(0.1),
        ..settings(10.0)
    };
    assert!(matches!(
        runaway_scan(&p, &Potential::Free, z0, &tight),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn escape_truncates_trajectory() {
    let p = p12();
    let t = integrate(
        &p,
        &interacting_vector_field(&p, Potential::quartic(10.0)),
        figure_state(&p),
        &settings(200.0),
    )
    .unwrap();
    // Bounded at t_end = 200 for this coupling; a longer horizon is not needed here.
    assert!(t.bounded());
    let t = integrate(
        &p,
        &interacting_vector_field(&p, Potential::quartic(50.0)),
        figure_state(&p),
        &settings(200.0),
    )
    .unwrap();
    let te = t.meta.escape_time.unwrap();
    assert!(*t.times.last().unwrap() <= te);
    assert!(t.times.len() < 2001);
}

#[test]
fn interacting_energy_conserved_and_h2_broken() {
    let p = p12();
    let z0 = figure_state(&p);
    let mut h2_max: f64 = 0.0;
    for lambda in [0.5, 2.0, 5.0] {
        let t = integrate(
            &p,
            &interacting_vector_field(&p, Potential::quartic(lambda)),
            z0,
            &settings(200.0),
        )
        .unwrap();
        assert!(t.bounded());
        assert!(t.meta.hint_drift < 1e-7, "{lambda}: {}", t.meta.hint_drift);
        h2_max = h2_max.max(t.meta.h2_drift);
    }
    assert!(h2_max > 1e-2);
}

#[test]
fn chart_equivalence() {
    let p = PuParams::new(0.8, 1.7).unwrap();
    let w = Potential::quartic(0.7);
    let z0 = JetState::new(0.4, -0.2, 0.1, 0.3);
    let s = settings(30.0);
    let a = integrate(&p, &interacting_vector_field(&p, w.clone()), z0, &s).unwrap();
    let b = integrate_ostrogradsky(&p, &w, jet_to_ostro(&p, &z0), &s).unwrap();
    assert_eq!(a.times, b.times);
    for (x, y) in a.ostro_states().iter().zip(b.ostro_states()) {
        assert!((x.to_vector() - y.to_vector()).norm() < 1e-7);
    }
}

#[test]
fn threshold_degenerate_ranges() {
    let p = p12();
    let z0 = figure_state(&p);
    assert!(matches!(
        threshold_search(&p, z0, &settings(200.0), 0.0, ScanOptions::default()),
        Err(Error::AllBounded { .. })
    ));
    assert!(matches!(
        threshold_search(&p, z0, &settings(200.0), -1.0, ScanOptions::default()),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn threshold_bracket_is_consistent() {
    let p = p12();
    let z0 = figure_state(&p);
    let s = settings(200.0);
    let r = threshold_search(&p, z0, &s, 40.0, ScanOptions::default()).unwrap();
    let (lo, hi) = r.bracket.unwrap();
    assert!(hi - lo < 1e-6 * hi);
    assert!(runaway_scan(&p, &Potential::quartic(lo), z0, &s).unwrap().bounded);
    assert!(!runaway_scan(&p, &Potential::quartic(hi), z0, &s).unwrap().bounded);
    let again = threshold_search(&p, z0, &s, 40.0, ScanOptions::default()).unwrap();
    assert_eq!(again.lambda_star, r.lambda_star);
}

#[test]
fn csv_export() {
    let p = p12();
    let t = integrate(&p, &free_vector_field(&p), figure_state(&p), &settings(1.0)).unwrap();
    let mut buf = Vec::new();
    write_csv(&t, &t.meta.settings, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("# pu-core "));
    assert!(lines[1].starts_with("# config {"));
    assert_eq!(lines[2], "t,q,qd,qdd,qddd,x1,x2,p1,p2,H1,H2,Hint");
    assert_eq!(lines.len(), 3 + 11);
    assert!(lines[3].starts_with("0,0,0,-0.5,-0.5,0,0,0.5,-0.5,"));
}

/// H1 and H2 drift below 1e-8 over t in [0, 100] at tol 1e-10, for 20 states
/// in [-1, 1]^4 and 5 frequency pairs in (0.5, 2.5).
#[test]
fn free_drift_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut failures = Vec::new();
    for _ in 0..5 {
        let w1: f64 = rng.random_range(0.5..2.5);
        let w2 = loop {
            let w: f64 = rng.random_range(0.5..2.5);
            if (w - w1).abs() > 0.05 {
                break w;
            }
        };
        let p = PuParams::new(w1, w2).unwrap();
        for _ in 0..20 {
            let z0 = JetState::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let t = integrate(&p, &free_vector_field(&p), z0, &settings(100.0)).unwrap();
            let m = mode_decompose(&p, &z0);
            let oracle = t
                .times
                .iter()
                .zip(&t.states)
                .map(|(s, z)| (reconstruct(&p, &m, *s).to_vector() - z.to_vector()).norm())
                .fold(0.0, f64::max);
            assert!(oracle < 1e-6, "closed-form mismatch {oracle}");
            if t.meta.h1_drift >= 1e-8 || t.meta.h2_drift >= 1e-8 {
                failures.push((w1, w2, t.meta.h1_drift, t.meta.h2_drift));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} of 100 runs drift >= 1e-8: {:?}",
        failures.len(),
        &failures[..failures.len().min(5)]
    );
}

fn state() -> impl Strategy<Value = JetState> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c, d)| JetState::new(a, b, c, d))
}

fn freqs() -> impl Strategy<Value = PuParams> {
    (0.1..10.0f64, 0.1..10.0f64)
        .prop_filter("distinct", |(a, b)| (a - b).abs() > 0.05)
        .prop_map(|(a, b)| PuParams::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mode_round_trip(p in freqs(), z in state()) {
        let back = reconstruct(&p, &mode_decompose(&p, &z), 0.0);
        let err = (back.to_vector() - z.to_vector()).norm();
        prop_assert!(err < 1e-12 * z.norm().max(1.0), "{}", err);
    }

    #[test]
    fn hamiltonians_have_no_cross_terms(p in freqs(), z in state()) {
        let m = mode_decompose(&p, &z);
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let z1 = reconstruct(&p, &ModeAmplitudes { a1: m.a1, a2: zero }, 0.0);
        let z2 = reconstruct(&p, &ModeAmplitudes { a1: zero, a2: m.a2 }, 0.0);
        for h in [h1(&p), h2(&p)] {
            let (whole, parts) = (h.eval_jet(&z), h.eval_jet(&z1) + h.eval_jet(&z2));
            let scale = h.eval_jet(&z1).abs() + h.eval_jet(&z2).abs();
            prop_assert!((whole - parts).abs() <= 1e-12 * scale.max(1.0), "{} vs {}", whole, parts);
        }
        let e = mode_energy(&p, &m);
        let scale = e.e1.abs() + e.e2.abs();
        prop_assert!((e.total - h1(&p).eval_jet(&z)).abs() <= 1e-10 * scale.max(1.0));
    }
}
