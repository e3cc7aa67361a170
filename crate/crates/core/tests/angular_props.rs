mod common;

use common::*;
use hyperemb::angular::{optimize, optimize_round, AngularOrder};
use hyperemb::likelihood::logarithmic_loss;
use hyperemb::{Embedding, EpsoParams64, Graph, OptimizerSchedule, PolarCoord64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (Graph, Embedding<f64>) {
    let g = random_connected_graph(rng, n, 0.12);
    let p = EpsoParams64::pso(n, rng.random_range(1.0..3.0), rng.random_range(0.4..0.95), rng.random_range(0.1..0.8)).unwrap();
    let r_max = 2.0 * (n as f64).ln();
    (g, Embedding::from_coords(random_coords(rng, n, r_max), p))
}

fn with_thetas(emb: &Embedding<f64>, th: &[f64]) -> Vec<PolarCoord64> {
    emb.coords.iter().zip(th).map(|(c, &t)| PolarCoord64::new(c.r, t.rem_euclid(TAU))).collect()
}

/// Golden-section search of `f` over `[a, b]`.
fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let k = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-13 {
        let c = b - k * (b - a);
        let d = a + k * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

#[test]
fn three_node_optimum_is_left_alone() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let p = EpsoParams64::pso(3, 1.0, 0.7, 0.4).unwrap();
    let base = Embedding::from_coords(
        vec![PolarCoord64::new(0.0, 0.0), PolarCoord64::new(1.2, 0.0), PolarCoord64::new(1.9, 0.0)],
        p,
    );
    let loss = |th: &[f64]| oracle_loss(&g, &with_thetas(&base, th), &p);

    // brute-force grid for the two free angles, node 1 pinned at 0
    let steps = 720;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for a in 0..steps {
        for c in 0..steps {
            let th = [TAU * a as f64 / steps as f64, 0.0, TAU * c as f64 / steps as f64];
            let v = loss(&th);
            if v < best.0 {
                best = (v, th[0], th[2]);
            }
        }
    }
    // polish one coordinate at a time around the grid optimum
    let mut th = [best.1, 0.0, best.2];
    let h = TAU / steps as f64;
    for _ in 0..50 {
        for u in [0, 2] {
            let at = |x: f64| {
                let mut t = th;
                t[u] = x;
                loss(&t)
            };
            th[u] = golden(at, th[u] - h, th[u] + h);
        }
    }
    let opt = loss(&th);
    for u in 0..3 {
        for k in 0..3600 {
            let mut t = th;
            t[u] = TAU * k as f64 / 3600.0;
            assert!(loss(&t) >= opt - 1e-12 * opt);
        }
    }

    let start = Embedding::from_coords(with_thetas(&base, &th), p);
    for swapping in [false, true] {
        let (out, stats) = optimize_round(&g, &start, swapping, 6).unwrap();
        assert_eq!(stats.accepted, 0);
        assert_eq!(out.coords, start.coords);
    }
}

#[test]
fn loss_never_rises_across_rounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let sched = OptimizerSchedule::new(3, 2, 6).unwrap();
    for case in 0..100 {
        let n = rng.random_range(3..=40);
        let (g, emb) = random_instance(&mut rng, n);
        let (out, trace) = optimize(&g, &emb, &sched).unwrap();
        let mut prev = trace.initial_loss;
        for (k, &l) in trace.losses().iter().enumerate() {
            assert!(l <= prev, "case {case} round {k}: {l} > {prev}");
            prev = l;
        }
        let before = logarithmic_loss(&g, &emb).unwrap().total;
        let after = logarithmic_loss(&g, &out).unwrap().total;
        assert!(after <= before, "case {case}: {after} > {before}");
    }
}

#[test]
fn fixed_rounds_keep_order_and_radii() {
    let mut rng = ChaCha8Rng::seed_from_u64(127);
    let mut reordered = 0;
    for _ in 0..40 {
        let n = rng.random_range(5..=40);
        let (g, emb) = random_instance(&mut rng, n);
        let order = AngularOrder::new(&emb.thetas()).cyclic_from_zero();

        let (fixed, stats) = optimize_round(&g, &emb, false, 6).unwrap();
        assert_eq!(AngularOrder::new(&fixed.thetas()).cyclic_from_zero(), order);
        assert_eq!(stats.candidate_evals, n * 6);

        let (swapped, stats) = optimize_round(&g, &emb, true, 6).unwrap();
        assert_eq!(stats.candidate_evals, n * 6);
        reordered += usize::from(AngularOrder::new(&swapped.thetas()).cyclic_from_zero() != order);

        for out in [&fixed, &swapped] {
            for (a, b) in out.coords.iter().zip(&emb.coords) {
                assert_eq!(a.r, b.r);
            }
            assert_eq!(out.radial_order, emb.radial_order);
        }
    }
    assert!(reordered > 0);
}

#[test]
fn evaluation_count_is_rounds_times_nodes_times_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    for (swap, fixed, q) in [(5, 3, 6), (2, 0, 1), (0, 4, 3), (0, 0, 6)] {
        let n = rng.random_range(5..=30);
        let (g, emb) = random_instance(&mut rng, n);
        let (out, trace) = optimize(&g, &emb, &OptimizerSchedule::new(swap, fixed, q).unwrap()).unwrap();
        assert_eq!(trace.candidate_evals(), (swap + fixed) * n * q);
        assert_eq!(trace.rounds.len(), swap + fixed);
        if swap + fixed == 0 {
            assert_eq!(out.coords, emb.coords);
        }
    }
}
