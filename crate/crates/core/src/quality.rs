//! Embedding quality: greedy routing, densification curves and best-of-n
//! extreme value fits.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperbolic::hyperbolic_distance;
use crate::likelihood::Embedding;
use crate::scalar::Real;

/// Summary of one embedding. Serialises to the keys `method`, `seed`,
/// `rounds`, `logloss`, `gr_score` and `success_ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub method: String,
    pub seed: u64,
    pub rounds: usize,
    pub logloss: f64,
    pub gr_score: f64,
    pub success_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyRouting {
    pub gr_score: f64,
    pub success_ratio: f64,
}

/// Hop count of the greedy walk from `source` to `dest`, or `None` when it
/// gets stuck.
///
/// Each step goes to the neighbour closest to `dest` (lowest id on ties),
/// straight to `dest` when adjacent. The walk fails when no neighbour is
/// strictly closer than the current node or after `N` hops.
pub fn greedy_route<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    source: usize,
    dest: usize,
) -> Result<Option<usize>> {
    g.check_node(source)?;
    g.check_node(dest)?;
    check_sizes(g, emb)?;
    let zeta = emb.params.curvature();
    let target = emb.coords[dest];
    let dist = |u: usize| hyperbolic_distance(emb.coords[u], target, zeta);
    let mut cur = source;
    let mut hops = 0;
    while cur != dest {
        if hops >= g.n_nodes() {
            return Ok(None);
        }
        match next_hop(g.neighbors(cur), dest, dist(cur), dist) {
            Some(w) => cur = w,
            None => return Ok(None),
        }
        hops += 1;
    }
    Ok(Some(hops))
}

fn next_hop<F: Real>(
    nbrs: &[usize],
    dest: usize,
    here: F,
    dist: impl Fn(usize) -> F,
) -> Option<usize> {
    if nbrs.binary_search(&dest).is_ok() {
        return Some(dest);
    }
    let mut best: Option<(usize, F)> = None;
    // neighbour lists are sorted, so a strict `<` keeps the lowest id
    for &w in nbrs {
        let d = dist(w);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((w, d));
        }
    }
    best.filter(|&(_, d)| d < here).map(|(w, _)| w)
}

fn check_sizes<F: Real>(g: &Graph, emb: &Embedding<F>) -> Result<()> {
    if g.n_nodes() != emb.n_nodes() {
        return Err(Error::Size(format!(
            "graph has {} nodes, embedding {}",
            g.n_nodes(),
            emb.n_nodes()
        )));
    }
    Ok(())
}

/// Mean over ordered pairs of shortest-path over greedy-path length, failed
/// routes counting 0, plus the fraction of routes that arrive.
pub fn greedy_routing_score<F: Real>(g: &Graph, emb: &Embedding<F>) -> Result<GreedyRouting> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::Size("greedy routing needs N >= 2".into()));
    }
    check_sizes(g, emb)?;
    g.require_connected()?;
    let zeta = emb.params.curvature();
    let mut dist = vec![F::zero(); n];
    let mut next = vec![None; n];
    // greedy hop counts to the current destination; usize::MAX = unknown
    let mut hops = vec![usize::MAX; n];
    let mut trail = Vec::new();
    const FAILED: usize = usize::MAX - 1;
    let mut sum = 0.0;
    let mut arrived = 0usize;
    for dest in 0..n {
        let target = emb.coords[dest];
        for (u, d) in dist.iter_mut().enumerate() {
            *d = hyperbolic_distance(emb.coords[u], target, zeta);
        }
        for u in 0..n {
            next[u] = if u == dest {
                None
            } else {
                next_hop(g.neighbors(u), dest, dist[u], |w| dist[w])
            };
        }
        let sp = bfs(g, dest);
        hops.iter_mut().for_each(|h| *h = usize::MAX);
        hops[dest] = 0;
        for s in 0..n {
            // follow next hops until an outcome is known, then unwind
            let mut cur = s;
            trail.clear();
            let mut h = loop {
                if hops[cur] != usize::MAX {
                    break hops[cur];
                }
                if trail.len() >= n {
                    break FAILED;
                }
                trail.push(cur);
                match next[cur] {
                    Some(w) => cur = w,
                    None => {
                        trail.pop();
                        hops[cur] = FAILED;
                        break FAILED;
                    }
                }
            };
            while let Some(u) = trail.pop() {
                if h != FAILED {
                    h += 1;
                }
                hops[u] = h;
            }
            if s != dest && hops[s] != FAILED {
                arrived += 1;
                sum += sp[s] as f64 / hops[s] as f64;
            }
        }
    }
    let pairs = (n * (n - 1)) as f64;
    Ok(GreedyRouting {
        gr_score: sum / pairs,
        success_ratio: arrived as f64 / pairs,
    })
}

fn bfs(g: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_nodes()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Mean degree of the subgraph induced by the nodes of total degree above
/// each threshold; `None` when no node qualifies.
pub fn internal_degree_curve(g: &Graph, thresholds: &[usize]) -> Vec<(usize, Option<f64>)> {
    let k = g.total_degrees();
    thresholds
        .iter()
        .map(|&k_min| {
            let keep: Vec<bool> = k.iter().map(|&d| d > k_min).collect();
            let nodes = keep.iter().filter(|&&b| b).count();
            if nodes == 0 {
                return (k_min, None);
            }
            let links = g.edges().iter().filter(|&&(u, v)| keep[u] && keep[v]).count();
            (k_min, Some(2.0 * links as f64 / nodes as f64))
        })
        .collect()
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Expected extreme of `n_s` standard normal samples to leading orders:
/// `√(2 ln n) - (ln ln n + ln 4π - 2γ) / (2√(2 ln n))`.
pub fn gumbel_correction<F: Real>(n_s: usize) -> Result<F> {
    if n_s < 2 {
        return Err(Error::Domain(format!("g(n) needs n >= 2, got {n_s}")));
    }
    let ln_n = F::count(n_s).ln();
    let root = (F::lit(2.0) * ln_n).sqrt();
    let four_pi = F::lit(4.0) * F::PI();
    let shift = ln_n.ln() + four_pi.ln() - F::lit(2.0 * EULER_GAMMA);
    Ok(root - shift / (F::lit(2.0) * root))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Best is smallest (log-loss).
    Min,
    /// Best is largest (greedy routing).
    Max,
}

impl Direction {
    fn sign<F: Real>(self) -> F {
        match self {
            Direction::Min => -F::one(),
            Direction::Max => F::one(),
        }
    }
}

/// `μ ∓ σ g(n_s)` fitted to a best-so-far series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeValueFit<F> {
    pub mu: F,
    pub sigma: F,
    pub r_squared: F,
    pub direction: Direction,
}

impl<F: Real> ExtremeValueFit<F> {
    /// Predicted best after `n_s` trials; a single trial predicts `μ`.
    pub fn predict(&self, n_s: usize) -> F {
        if n_s < 2 {
            return self.mu;
        }
        let g = gumbel_correction::<F>(n_s).expect("n_s >= 2");
        self.mu + self.direction.sign::<F>() * self.sigma * g
    }
}

/// Least-squares fit of `μ - σ g(n_s)` (`Min`) or `μ + σ g(n_s)` (`Max`)
/// with `σ >= 0`.
pub fn fit_best_of_n<F: Real>(
    series: &[(usize, F)],
    direction: Direction,
) -> Result<ExtremeValueFit<F>> {
    if series.len() < 3 {
        return Err(Error::Size(format!(
            "best-of-n fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if let Some(&(n, _)) = series.iter().find(|p| p.0 < 2) {
        return Err(Error::Domain(format!("best-of-n fit needs n_s >= 2, got {n}")));
    }
    if let Some(&(n, _)) = series.iter().find(|p| !p.1.is_finite()) {
        return Err(Error::Data(format!("non-finite score at n_s = {n}")));
    }
    let sign = direction.sign::<F>();
    let xs: Vec<F> = series
        .iter()
        .map(|&(n, _)| sign * gumbel_correction::<F>(n).expect("checked"))
        .collect();
    let ys: Vec<F> = series.iter().map(|p| p.1).collect();
    let len = F::count(series.len());
    let mx = xs.iter().copied().sum::<F>() / len;
    let my = ys.iter().copied().sum::<F>() / len;
    let sxx: F = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: F = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let syy: F = ys.iter().map(|&y| (y - my) * (y - my)).sum();
    let slope = if sxx > F::zero() { sxy / sxx } else { F::zero() };
    let (mu, sigma) = if slope > F::zero() {
        (my - slope * mx, slope)
    } else {
        (my, F::zero())
    };
    let r_squared = if syy > F::zero() {
        let res: F = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let e = y - (mu + sigma * x);
                e * e
            })
            .sum();
        F::one() - res / syy
    } else {
        F::one()
    };
    Ok(ExtremeValueFit {
        mu,
        sigma,
        r_squared,
        direction,
    })
}

/// Running best of a score sequence.
pub fn cumulative_best(values: &[f64], direction: Direction) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut best: Option<f64> = None;
    for &v in values {
        let b = match (best, direction) {
            (None, _) => v,
            (Some(b), Direction::Min) => b.min(v),
            (Some(b), Direction::Max) => b.max(v),
        };
        best = Some(b);
        out.push(b);
    }
    out
}
