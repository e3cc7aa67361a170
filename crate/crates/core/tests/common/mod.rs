#![allow(dead_code)]

use std::collections::VecDeque;

use hyperemb::pso::pso_generate;
use hyperemb::{EpsoParams64, Graph, PolarCoord64, WeightedGraph64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Law of cosines, straight from the textbook form.
pub fn oracle_distance(a: PolarCoord64, b: PolarCoord64, zeta: f64) -> f64 {
    let dt = std::f64::consts::PI - (std::f64::consts::PI - (a.theta - b.theta).abs()).abs();
    let c = (zeta * a.r).cosh() * (zeta * b.r).cosh() - (zeta * a.r).sinh() * (zeta * b.r).sinh() * dt.cos();
    c.max(1.0).acosh() / zeta
}

/// Cutoff radius at birth index `i` for expected link count `m`.
pub fn oracle_cutoff(i: usize, p: &EpsoParams64, m: f64) -> f64 {
    let (z, b, t) = (p.zeta, p.beta, p.temperature);
    let r = 2.0 / z * (i as f64).ln();
    let ratio = if t == 0.0 {
        2.0 / std::f64::consts::PI
    } else {
        2.0 * t / (t * std::f64::consts::PI).sin()
    };
    if b < 1.0 {
        r - 2.0 / z * (ratio * (1.0 - (-z / 2.0 * (1.0 - b) * r).exp()) / (m * (1.0 - b))).ln()
    } else {
        r - 2.0 / z * (ratio / 2.0 * z * r / m).ln()
    }
}

fn ln1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Pairwise log-loss, one term at a time.
pub fn oracle_loss(g: &Graph, coords: &[PolarCoord64], p: &EpsoParams64) -> f64 {
    let n = coords.len();
    let r_n = oracle_cutoff(n, p, p.m);
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let x = oracle_distance(coords[i], coords[j], p.zeta);
            let z = p.zeta / (2.0 * p.temperature) * (x - r_n);
            // -ln p = ln(1 + e^z), -ln(1 - p) = ln(1 + e^-z)
            total += if g.has_edge(i, j) { ln1p_exp(z) } else { ln1p_exp(-z) };
        }
    }
    total
}

/// Random spanning tree plus independent extra edges.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < extra {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_coords(rng: &mut ChaCha8Rng, n: usize, r_max: f64) -> Vec<PolarCoord64> {
    (0..n)
        .map(|_| {
            PolarCoord64::new(
                rng.random::<f64>() * r_max,
                rng.random::<f64>() * std::f64::consts::TAU,
            )
        })
        .collect()
}

pub fn pso_params() -> EpsoParams64 {
    EpsoParams64::pso(100, 2.0, 2.0 / 3.0, 0.3).unwrap()
}

/// Largest component of a PSO network with N=100, m=2, β=2/3, T=0.3, with
/// the parameters resized to it.
pub fn pso_instance(seed: u64) -> (Graph, EpsoParams64) {
    let p = pso_params();
    let net = pso_generate(&p, seed).unwrap();
    let (g, _) = net.graph.largest_component();
    let n = g.n_nodes();
    (g, p.with_n_nodes(n))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    r
}

/// Lightest spanning tree weight over every (N-1)-subset of edges.
pub fn exhaustive_mst_weight(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let k = n - 1;
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..k).collect();
    if edges.len() < k {
        return best;
    }
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        let mut ok = true;
        let mut w = 0.0;
        for &e in &pick {
            let (u, v, x) = edges[e];
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                ok = false;
                break;
            }
            parent[a] = b;
            w += x;
        }
        if ok {
            best = best.min(w);
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < edges.len() - k + i {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Floyd–Warshall over the tree edges only.
pub fn tree_path_oracle(tree: &WeightedGraph64) -> Vec<Vec<f64>> {
    let n = tree.unweighted().n_nodes();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0.0;
    }
    for (u, nbrs) in tree.adjacency().iter().enumerate() {
        for &(v, w) in nbrs {
            d[u][v] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Walks one hop at a time with the textbook distance.
pub fn simulate_route(g: &Graph, coords: &[PolarCoord64], zeta: f64, s: usize, t: usize) -> Option<usize> {
    let d = |u: usize| oracle_distance(coords[u], coords[t], zeta);
    let mut cur = s;
    let mut hops = 0;
    while cur != t {
        if hops >= g.n_nodes() {
            return None;
        }
        let nbrs = g.neighbors(cur);
        let next = if nbrs.contains(&t) {
            t
        } else {
            let mut best = usize::MAX;
            for &w in nbrs {
                if best == usize::MAX || d(w) < d(best) || (d(w) == d(best) && w < best) {
                    best = w;
                }
            }
            if d(best) >= d(cur) {
                return None;
            }
            best
        };
        cur = next;
        hops += 1;
    }
    Some(hops)
}

pub fn bfs(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_nodes()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}
