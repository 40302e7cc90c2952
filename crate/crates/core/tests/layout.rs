use std::f64::consts::PI;

use proptest::prelude::*;
use testscope_core::layout::{default_params, layout, LayoutParams, WeightedEdge};
use testscope_core::views::Position;
use testscope_testkit::random_graph;

/// Worst radius-to-sqrt(n)·L ratio observed on the random graphs was about
/// 3.98 (gravity 1/16 suggests 4); this leaves headroom.
const GRAVITY_BOUND: f64 = 4.5;
/// Star layouts measured at 44° minimum leaf separation or more.
const STAR_MIN_SEPARATION_DEG: f64 = 25.0;

fn dist(a: Position, b: Position) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

fn edge(from: usize, to: usize) -> WeightedEdge {
    WeightedEdge { from, to, weight: 1.0 }
}

fn params(n: usize, seed: u64) -> LayoutParams {
    LayoutParams {
        seed,
        ..default_params(n)
    }
}

#[test]
fn single_node_sits_at_origin() {
    let r = layout(1, &[], &default_params(1), None);
    assert_eq!(r.positions, [Position { x: 0.0, y: 0.0 }]);
    assert!(r.converged);
    assert_eq!(r.rounds, 1);
}

#[test]
fn two_nodes_settle_within_a_fifth_of_edge_length() {
    for seed in 0..10 {
        let p = params(2, seed);
        let r = layout(2, &[edge(0, 1)], &p, None);
        let d = dist(r.positions[0], r.positions[1]);
        let ratio = d / p.desired_edge_length;
        assert!((0.8..=1.2).contains(&ratio), "seed {seed}: distance {d}");
    }
}

#[test]
fn star_leaves_spread_out() {
    let edges: Vec<_> = (1..=8).map(|leaf| edge(0, leaf)).collect();
    for seed in 0..10 {
        let r = layout(9, &edges, &params(9, seed), None);
        let hub = r.positions[0];
        let mut angles: Vec<f64> = r.positions[1..]
            .iter()
            .map(|p| (p.y - hub.y).atan2(p.x - hub.x))
            .collect();
        angles.sort_by(f64::total_cmp);
        let mut min_gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            min_gap = min_gap.min(w[1] - w[0]);
        }
        let deg = min_gap.to_degrees();
        assert!(deg >= STAR_MIN_SEPARATION_DEG, "seed {seed}: {deg}°");
    }
}

#[test]
fn random_graphs_stay_finite_and_bounded() {
    for seed in 0..50 {
        let (n, edges) = random_graph(seed, 500);
        let p = params(n, seed);
        let r = layout(n, &edges, &p, None);
        assert_eq!(r.positions.len(), n);
        let (mut cx, mut cy) = (0.0, 0.0);
        for q in &r.positions {
            assert!(q.x.is_finite() && q.y.is_finite(), "seed {seed}");
            cx += q.x;
            cy += q.y;
        }
        let c = Position { x: cx / n as f64, y: cy / n as f64 };
        let bound = GRAVITY_BOUND * (n as f64).sqrt() * p.desired_edge_length;
        for q in &r.positions {
            assert!(dist(*q, c) <= bound, "seed {seed}: radius {} > {bound}", dist(*q, c));
        }
    }
}

#[test]
fn layout_is_bitwise_deterministic() {
    for seed in [0, 7, 99] {
        let (n, edges) = random_graph(seed, 200);
        let a = layout(n, &edges, &params(n, seed), None);
        let b = layout(n, &edges, &params(n, seed), None);
        let bits = |r: &testscope_core::layout::LayoutResult| -> Vec<(u64, u64)> {
            r.positions.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!((a.rounds, a.converged), (b.rounds, b.converged));
    }
}

fn pairwise(ps: &[Position]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            out.push(dist(ps[i], ps[j]));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn shifting_initial_positions_keeps_distances() {
    for seed in 0..5 {
        let (n, edges) = random_graph(seed + 100, 60);
        let start = layout(n, &[], &LayoutParams { max_rounds: 1, ..params(n, seed) }, None).positions;
        let shifted: Vec<Position> = start.iter().map(|p| Position { x: p.x + 1234.5, y: p.y - 987.25 }).collect();
        let a = layout(n, &edges, &params(n, seed), Some(&start));
        let b = layout(n, &edges, &params(n, seed), Some(&shifted));
        for (x, y) in pairwise(&a.positions).iter().zip(pairwise(&b.positions)) {
            assert!((x - y).abs() <= 1e-6, "seed {seed}: {x} vs {y}");
        }
    }
}

proptest! {
    #[test]
    fn defaults_are_valid_for_any_size(n in 1usize..=100_000) {
        let p = default_params(n);
        prop_assert!(p.validate().is_ok());
        prop_assert_eq!(u64::from(p.max_rounds), u64::from(default_params(0).max_rounds) + n as u64);
    }
}
