//! Engine against hand-derived values and against the closed-form maps.

use pco_core::engine::{phase_distance, run_window_map, simulate};
use pco_core::graphs::{gen_random_aperiodic, gen_random_undirected};
use pco_core::maps::{iterate_sr, range_of, sf_next_fire_times, sr_time_map};
use pco_core::prc::PrcSpec;
use pco_core::{DirectedGraph, GraphSequence, InitPhases, PhaseVector, SimConfig};
use proptest::prelude::*;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| phase_distance(*x, *y) < tol)
}

#[test]
fn complete_triangle_window_by_hand() {
    // A fires at 0.001, B at 0.05, C at 0.08. The last resets land at
    // 0.18 on A and B and at 0.15 on C, so C leads by 0.03:
    // H = (0.92, 0.92, 0.95).
    let g = DirectedGraph::complete(3);
    let phases = [0.999, 0.95, 0.92];
    let hand = [0.92, 0.92, 0.95];
    let engine = run_window_map(&phases, &g, &PrcSpec::StrongReset { b0: 0.6 }, 0.1).unwrap();
    let map = sr_time_map(&PhaseVector::new(phases.to_vec()), &g, 0.1, 0.6).unwrap();
    assert!(close(&engine, &hand, 1e-9), "{engine:?}");
    assert!(close(map.as_slice(), &hand, 1e-12), "{map:?}");
}

#[test]
fn star_leaves_fire_one_delay_after_the_centre() {
    // leaves at 0.46 on arrival, past B0 = 0.3, so strong firing fires them
    let star = DirectedGraph::star(5);
    let phases = vec![0.99, 0.4, 0.4, 0.4, 0.4];
    let mut cfg = SimConfig::new(
        PrcSpec::StrongFire { b0: 0.3 },
        GraphSequence::fixed(star),
        0.05,
        InitPhases::Explicit { phases },
    );
    cfg.horizon = 0.5;
    cfg.stop_on_convergence = false;
    let first = simulate(&cfg).unwrap().first_fire_times(0.0);
    let expected = [0.01, 0.06, 0.06, 0.06, 0.06];
    for (f, e) in first.iter().zip(expected) {
        assert!((f.unwrap() - e).abs() < 1e-9, "{first:?}");
    }
}

#[test]
fn sr_map_keeps_rotating_on_a_directed_cycle() {
    let seq = GraphSequence::fixed(DirectedGraph::directed_cycle(4));
    let start = PhaseVector::new(vec![1.0, 0.9, 0.8, 0.75]);
    let traj = iterate_sr(&start, &seq, 0.1, 0.5, 40).unwrap();
    for v in &traj {
        assert!(range_of(v.as_slice()) > 0.2);
    }
}

/// Phases in the window frame whose range stays below ρ₀(B0, B0).
fn basin_state(n: usize, tau: f64, b0: f64) -> impl Strategy<Value = Vec<f64>> {
    let basin = (b0 - tau).min(1.0 - b0 + tau);
    (0.0..basin, prop::collection::vec(0.0f64..1.0, n - 1)).prop_map(|(w, u)| {
        let mut p = vec![1.0];
        p.extend(u.into_iter().map(|x| 1.0 - w * x));
        p
    })
}

fn case() -> impl Strategy<Value = (usize, f64, f64, u64)> {
    (3usize..9, prop::sample::select(vec![0.05, 0.1, 0.2]), any::<u64>())
        .prop_flat_map(|(n, tau, seed)| (Just(n), Just(tau), (2.0 * tau)..0.8, Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sr_engine_matches_h(((n, tau, b0, seed), phases) in case().prop_flat_map(|c| (Just(c), basin_state(c.0, c.1, c.2)))) {
        let g = gen_random_aperiodic(n, 0.4, seed).unwrap();
        let engine = run_window_map(&phases, &g, &PrcSpec::StrongReset { b0 }, tau).unwrap();
        let map = sr_time_map(&PhaseVector::new(phases), &g, tau, b0).unwrap();
        prop_assert!(close(&engine, map.as_slice(), 1e-9), "{engine:?} vs {map:?}");
    }

    #[test]
    fn sf_engine_matches_lambda(((n, tau, b0, seed), phases) in case().prop_flat_map(|c| (Just(c), basin_state(c.0, c.1, c.2)))) {
        let g = gen_random_undirected(n, 0.5, seed).unwrap();
        let mut cfg = SimConfig::new(
            PrcSpec::StrongFire { b0 },
            GraphSequence::fixed(g.clone()),
            tau,
            InitPhases::Explicit { phases: phases.clone() },
        );
        cfg.horizon = 1.0 + tau;
        cfg.stop_on_convergence = false;
        let fired = simulate(&cfg).unwrap().first_fire_times(0.0);
        let lambda = sf_next_fire_times(&PhaseVector::new(phases), &g, tau, b0, 0.0).unwrap();
        for (f, l) in fired.iter().zip(&lambda) {
            prop_assert!((f.unwrap() - l).abs() < 1e-9, "{fired:?} vs {lambda:?}");
        }
    }
}
