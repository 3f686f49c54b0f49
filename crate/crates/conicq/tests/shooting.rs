use conicq::ode::{integrate, round_sphere_state, Direction, Event, FootballState};
use conicq::shooting::{
    bracket_q0_with, extract_alpha, find_q0, membership, membership_report, reconstruct, solve_for_beta,
    MembershipResult, ShootingConfig, ShootingError, Side,
};

fn closed_form(t: f64) -> [f64; 4] {
    let th = t.tanh();
    let s2 = 1.0 / t.cosh().powi(2);
    [-th, -s2, 2.0 * th * (s2 + 2.0), 6.0 * s2 * s2]
}

#[test]
fn trapped_set_is_downward_closed() {
    for p in [-0.25, -0.5, -1.0, -2.0, -3.0] {
        let cfg = ShootingConfig::new(p);
        let lo = -4.0 * p;
        let ladder: Vec<f64> = (0..40).map(|i| lo * (0.5 + 3.0 * i as f64 / 39.0)).collect();
        let results: Vec<MembershipResult> = ladder.iter().map(|&q| membership(p, q, &cfg).unwrap()).collect();
        let last_in = results.iter().rposition(|r| matches!(r, MembershipResult::InQ { .. }));
        let first_out = results.iter().position(|r| matches!(r, MembershipResult::Escaped { .. }));
        let (Some(a), Some(b)) = (last_in, first_out) else { panic!("ladder at p={p} did not straddle q0: {results:?}") };
        assert!(a < b, "p={p}: trapped at q={} above escape at q={}", ladder[a], ladder[b]);
        assert!(results[..=a].iter().all(|r| !matches!(r, MembershipResult::Escaped { .. })));
        assert!(results[b..].iter().all(|r| !matches!(r, MembershipResult::InQ { .. })));
    }
}

#[test]
fn bracket_steps_stay_consistent() {
    for p in [-0.5, -1.0, -2.0] {
        let cfg = ShootingConfig::new(p);
        let mut seen: Vec<(f64, Side)> = Vec::new();
        let br = bracket_q0_with(&cfg, |q, r| seen.push((q, r.side()))).unwrap();
        let max_below = seen.iter().filter(|(_, s)| *s == Side::Below).map(|(q, _)| *q).fold(f64::MIN, f64::max);
        let min_above = seen.iter().filter(|(_, s)| *s == Side::Above).map(|(q, _)| *q).fold(f64::MAX, f64::min);
        assert!(max_below < min_above, "p={p}");
        assert_eq!(br.lo, max_below);
        assert_eq!(br.hi, min_above);
        assert_eq!(membership(p, br.lo, &cfg).unwrap().side(), Side::Below);
        assert_eq!(membership(p, br.hi, &cfg).unwrap().side(), Side::Above);
    }
}

#[test]
fn solutions_start_in_gauge_and_satisfy_invariants() {
    for p in [-0.25, -0.5, -1.0, -2.0] {
        let sol = find_q0(&ShootingConfig::new(p)).unwrap();
        let s0 = sol.trajectory.first();
        assert_eq!((s0.x1, s0.x2, s0.x3), (0.0, p, 0.0));
        assert!((8.0 * extract_alpha(p, sol.q0).powi(2) - 2.0 * p * p - sol.q0).abs() < 1e-12 * sol.q0.max(1.0));
        assert!((sol.c - (2.0 * p * p + sol.q0)).abs() < 1e-12 * sol.c);
        assert!((sol.alpha + sol.trajectory.last().x1).abs() <= 1e-4);
        let m = reconstruct(&sol);
        assert!(m.gbc_relative <= 1e-3, "p={p}: {}", m.gbc_relative);
        // x4 = x3', so the integral telescopes to the x3 limits
        assert!((m.integral_sampled - (m.x3_plus - m.x3_minus)).abs() < 1e-6);
        assert!((m.integral_x4 - 8.0 * sol.alpha).abs() < 1e-4 * sol.alpha);
        assert!(sol.trajectory.states.iter().all(|s| s.x4().is_finite() && s.x4() > 0.0));
    }
}

#[test]
fn translated_sphere_renormalizes_to_gauge() {
    for tau in [0.5, 1.3, -0.8] {
        let c = closed_form(tau);
        let start = FootballState::new(c[0], c[1], c[2], c[3].ln());
        let dir = if tau > 0.0 { Direction::Rising } else { Direction::Falling };
        let span = (0.0, -2.0 * tau);
        let t = integrate(start, span, 1e-10, &[Event::x1_level(0.0, dir)]).unwrap();
        let hit = t.events.first().expect("x1 crosses zero");
        assert!((hit.t + tau).abs() < 1e-6, "tau={tau}: crossing at {}", hit.t);
        let g = hit.state;
        let want = round_sphere_state(0.0);
        for (a, b) in [(g.x1, want.x1), (g.x2, want.x2), (g.x3, want.x3), (g.w4, want.w4)] {
            assert!((a - b).abs() < 1e-6, "tau={tau}");
        }
        let again = integrate(FootballState::new(0.0, g.x2, 0.0, g.w4), (0.0, 3.0), 1e-10, &[]).unwrap();
        for i in 0..=30 {
            let s = again.sample(0.1 * i as f64).unwrap();
            let w = closed_form(0.1 * i as f64);
            assert!((s.x1 - w[0]).abs() < 1e-6 && (s.x2 - w[1]).abs() < 1e-6 && (s.x3 - w[2]).abs() < 1e-6);
        }
    }
}

#[test]
fn beta_targets() {
    let t = ShootingConfig::new(-1.0);
    let s = solve_for_beta(0.0, &t).unwrap();
    assert!((s.p + 1.0).abs() < 1e-6 && (s.q0 - 6.0).abs() < 1e-5);
    let s = solve_for_beta(-0.5, &t).unwrap();
    assert!((s.c - 2.0).abs() < 1e-6, "c = {}", s.c);
    assert!((reconstruct(&s).total_curvature_pi2 - 8.0).abs() < 1e-3 * 8.0);
    assert!(matches!(solve_for_beta(-1.0, &t), Err(ShootingError::InvalidTarget { .. })));
}

#[test]
fn undecided_reports_noise_and_trend() {
    let cfg = ShootingConfig::new(-1.0);
    let r = membership_report(-1.0, 6.0, &cfg).unwrap();
    assert!(r.result.is_undecided());
    assert!(r.q_noise > 0.0 && r.q_noise < 1e-3);
}

#[test]
fn concurrent_solves_match_sequential() {
    let ps = [-0.3, -0.7, -1.5];
    let seq: Vec<f64> = ps.iter().map(|&p| find_q0(&ShootingConfig::new(p)).unwrap().q0).collect();
    let par: Vec<f64> = std::thread::scope(|s| {
        let hs: Vec<_> = ps.iter().map(|&p| s.spawn(move || find_q0(&ShootingConfig::new(p)).unwrap().q0)).collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(seq, par);
}
