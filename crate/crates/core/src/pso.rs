//! Growing hyperbolic random graphs: PSO, generalised PSO with internal link
//! insertion and deletion, and the external-links-only E-PSO variant.
//!
//! Random stream layout, for reproducibility. Generators draw from a
//! `ChaCha8Rng` seeded with the caller's seed. At step `i` (1-based birth
//! index) the stream is consumed in this order:
//!
//! 1. one uniform draw for the angle of node `i`;
//! 2. generalised PSO only: the internal insertion draws, then the internal
//!    deletion draws (pair or internal link index, then the acceptance
//!    uniform);
//! 3. in the probabilistic regime, one uniform per older node `j = 1..i-1`
//!    in increasing order, deciding the external link `(i, j)`.
//!
//! The deterministic regimes (`T = 0`, or fewer predecessors than `m`)
//! consume nothing beyond the angle.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperbolic::{angular_difference, distance_from_parts, PolarCoord};
use crate::params::EpsoParams;
use crate::scalar::{logistic_tail, Real};

/// Cutoff distance `R_i` that makes the expected number of links from node
/// `i` to its predecessors equal to `m_eff`.
pub fn cutoff_radius<F: Real>(i: usize, p: &EpsoParams<F>, m_eff: F) -> Result<F> {
    if !(m_eff > F::zero()) {
        return Err(Error::Domain(format!(
            "effective m must be > 0 for the cutoff radius, got {m_eff}"
        )));
    }
    if i < 2 {
        return Err(Error::Domain(format!(
            "cutoff radius needs birth index >= 2, got {i}"
        )));
    }
    let two = F::lit(2.0);
    let t = p.temperature;
    // T / sin(Tπ), with its T -> 0 limit 1/π
    let thermal = if t == F::zero() {
        F::FRAC_1_PI()
    } else {
        t / (t * F::PI()).sin()
    };
    let r_ii = p.birth_radius(i);
    let inner = if p.beta < F::one() {
        let fade = F::one() - p.beta;
        let growth = -(-(p.zeta / two) * fade * r_ii).exp_m1();
        two * thermal * growth / (m_eff * fade)
    } else {
        thermal * p.zeta * r_ii / m_eff
    };
    Ok(r_ii - two / p.zeta * inner.ln())
}

/// Linking probability `1 / (1 + exp(ζ (x - R) / 2T))`.
pub fn connection_probability<F: Real>(x: F, cutoff: F, p: &EpsoParams<F>) -> Result<F> {
    if !(p.temperature > F::zero()) {
        return Err(Error::Domain(
            "connection probability needs T > 0; T = 0 uses the nearest-m rule".into(),
        ));
    }
    Ok(logistic_tail(
        p.zeta * (x - cutoff) / (F::lit(2.0) * p.temperature),
    ))
}

/// Expected number of internal links the node born at `i` collects by the
/// end of growth, for `L = p.ell` links per step.
///
/// The removable singularities at `β = 1/2` and `β = 1` are evaluated by
/// their limits; elsewhere `exp_m1` keeps the differences accurate near them.
pub fn expected_internal_links<F: Real>(i: usize, p: &EpsoParams<F>) -> F {
    let n = p.n_nodes;
    if p.ell == F::zero() || i >= n || i == 0 {
        return F::zero();
    }
    let two = F::lit(2.0);
    let nf = F::count(n);
    let fi = F::count(i);
    let ln_n = nf.ln();
    let ln_i = fi.ln();
    let ln_ratio = (nf / fi).ln();
    let fade = F::one() - p.beta;
    let skew = two * p.beta - F::one();

    // [(N/i)^(2β-1) - 1] / (2β-1)
    let spread = if skew == F::zero() {
        ln_ratio
    } else {
        (skew * ln_ratio).exp_m1() / skew
    };
    // (1-β)(1 - i^-(1-β)) / (1 - N^-(1-β))^2
    let weight = if fade == F::zero() {
        ln_i / (ln_n * ln_n)
    } else {
        let num = -(-fade * ln_i).exp_m1();
        let den = -(-fade * ln_n).exp_m1();
        fade * num / (den * den)
    };
    two * p.ell * weight * spread
}

/// Network grown by one of the generators, with the coordinates every node
/// holds at the end of growth. Node ids are birth order minus one.
#[derive(Debug, Clone)]
pub struct GeneratedNetwork<F> {
    pub graph: Graph,
    pub true_coords: Vec<PolarCoord<F>>,
    /// Internal insertions or deletions that found no eligible pair.
    pub skipped_internal: usize,
}

impl<F: Real> GeneratedNetwork<F> {
    pub fn birth_order(&self) -> impl Iterator<Item = usize> {
        0..self.graph.n_nodes()
    }
}

/// PSO model (`ell` is ignored; no internal links).
pub fn pso_generate<F: Real>(p: &EpsoParams<F>, seed: u64) -> Result<GeneratedNetwork<F>> {
    p.validate()?;
    Growth::new(*p, seed).run(ExternalCount::Constant, 0, 0)
}

/// Generalised PSO: per step `l_plus` internal links inserted and `l_minus`
/// removed between older nodes, in addition to the external links.
///
/// Only internal links are ever removed, so at `T = 0` with
/// `l_plus == l_minus` each inserted link is the one deleted and the
/// network equals the PSO one.
pub fn gpso_generate<F: Real>(
    p: &EpsoParams<F>,
    l_plus: usize,
    l_minus: usize,
    seed: u64,
) -> Result<GeneratedNetwork<F>> {
    p.validate()?;
    Growth::new(*p, seed).run(ExternalCount::Constant, l_plus, l_minus)
}

/// What E-PSO does when `m + L̄_i` is negative at some birth index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeficitPolicy {
    /// Refuse the parameters up front.
    #[default]
    Reject,
    /// Nodes with a negative expected count get no external links.
    ClampAtZero,
}

/// E-PSO: external links only, with expected count `m + L̄_i` at step `i`.
pub fn epso_generate<F: Real>(p: &EpsoParams<F>, seed: u64) -> Result<GeneratedNetwork<F>> {
    epso_generate_with(p, seed, DeficitPolicy::Reject)
}

pub fn epso_generate_with<F: Real>(
    p: &EpsoParams<F>,
    seed: u64,
    policy: DeficitPolicy,
) -> Result<GeneratedNetwork<F>> {
    p.validate()?;
    if policy == DeficitPolicy::Reject {
        if let Some(i) =
            (1..=p.n_nodes).find(|&i| p.m + expected_internal_links(i, p) < F::zero())
        {
            return Err(Error::Parameter(format!(
                "m + L_i is negative at birth index {i} (m = {}, L = {})",
                p.m, p.ell
            )));
        }
    }
    Growth::new(*p, seed).run(ExternalCount::Epso, 0, 0)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ExternalCount {
    Constant,
    Epso,
}

struct Growth<F> {
    p: EpsoParams<F>,
    rng: ChaCha8Rng,
    theta: Vec<F>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    // links created by internal insertion, the only ones deletion touches
    internal: Vec<(usize, usize)>,
    // scratch for the current step: ζ r_ji and sinh(ζ r_ji)
    zr: Vec<F>,
    sinh_zr: Vec<F>,
    skipped: usize,
}

impl<F: Real> Growth<F> {
    fn new(p: EpsoParams<F>, seed: u64) -> Self {
        Self {
            p,
            rng: ChaCha8Rng::seed_from_u64(seed),
            theta: Vec::with_capacity(p.n_nodes),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            internal: Vec::new(),
            zr: Vec::with_capacity(p.n_nodes),
            sinh_zr: Vec::with_capacity(p.n_nodes),
            skipped: 0,
        }
    }

    fn uniform(&mut self) -> F {
        F::lit(self.rng.random::<f64>())
    }

    fn run(
        mut self,
        count: ExternalCount,
        l_plus: usize,
        l_minus: usize,
    ) -> Result<GeneratedNetwork<F>> {
        let n = self.p.n_nodes;
        let inv_zeta = F::one() / self.p.zeta;
        for i in 1..=n {
            let theta = self.uniform() * F::TAU();
            self.theta.push(theta);

            // positions at time i, index = birth - 1; the new node last
            self.zr.clear();
            self.sinh_zr.clear();
            for j in 1..=i {
                let zr = self.p.zeta * self.p.faded_radius(j, i);
                self.zr.push(zr);
                self.sinh_zr.push(zr.sinh());
            }

            if i >= 3 && (l_plus > 0 || l_minus > 0) {
                self.internal_step(i, l_plus, l_minus, inv_zeta)?;
            }

            let m_i = match count {
                ExternalCount::Constant => self.p.m,
                ExternalCount::Epso => self.p.m + expected_internal_links(i, &self.p),
            };
            self.external_step(i, m_i, inv_zeta)?;
        }

        let graph = Graph::from_edges(n, self.edges.iter().copied())?;
        let true_coords = (1..=n)
            .map(|i| PolarCoord::new(self.p.faded_radius(i, n), self.theta[i - 1]))
            .collect();
        Ok(GeneratedNetwork {
            graph,
            true_coords,
            skipped_internal: self.skipped,
        })
    }

    fn distance(&self, a: usize, b: usize, inv_zeta: F) -> F {
        distance_from_parts(
            self.zr[a],
            self.sinh_zr[a],
            self.zr[b],
            self.sinh_zr[b],
            angular_difference(self.theta[a], self.theta[b]),
            inv_zeta,
        )
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        let key = (a.min(b), a.max(b));
        self.edge_index.insert(key, self.edges.len());
        self.edges.push(key);
    }

    fn remove_edge(&mut self, key: (usize, usize)) {
        if let Some(idx) = self.edge_index.remove(&key) {
            self.edges.swap_remove(idx);
            if idx < self.edges.len() {
                self.edge_index.insert(self.edges[idx], idx);
            }
        }
    }

    /// Links of the node born at `i` (index `i - 1`) to its predecessors.
    fn external_step(&mut self, i: usize, m_i: F, inv_zeta: F) -> Result<()> {
        let new = i - 1;
        let previous = i - 1;
        let m_round = m_i.round().to_usize().unwrap_or(0);
        if previous <= m_round {
            for j in 0..previous {
                self.add_edge(j, new);
            }
            return Ok(());
        }
        if self.p.temperature == F::zero() {
            let mut by_distance: Vec<(F, usize)> = (0..previous)
                .map(|j| (self.distance(new, j, inv_zeta), j))
                .collect();
            by_distance.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            for &(_, j) in by_distance.iter().take(m_round) {
                self.add_edge(j, new);
            }
            return Ok(());
        }
        if m_i <= F::zero() {
            return Ok(());
        }
        let cutoff = cutoff_radius(i, &self.p, m_i)?;
        let scale = self.p.zeta / (F::lit(2.0) * self.p.temperature);
        for j in 0..previous {
            let x = self.distance(new, j, inv_zeta);
            let prob = logistic_tail(scale * (x - cutoff));
            if self.uniform() < prob {
                self.add_edge(j, new);
            }
        }
        Ok(())
    }

    /// Internal insertions and deletions among the `i - 1` older nodes, run
    /// before node `i` links in. Pairs are tried without replacement within
    /// a step.
    fn internal_step(&mut self, i: usize, l_plus: usize, l_minus: usize, inv_zeta: F) -> Result<()> {
        let old = i - 1;
        let hot = self.p.temperature > F::zero();
        let (cutoff, scale) = if hot && self.p.m > F::zero() {
            (
                cutoff_radius(i, &self.p, self.p.m)?,
                self.p.zeta / (F::lit(2.0) * self.p.temperature),
            )
        } else {
            (F::zero(), F::zero())
        };
        let any_links = self.p.m > F::zero();
        let link_prob = move |x: F| -> F {
            if any_links {
                logistic_tail(scale * (x - cutoff))
            } else {
                F::zero()
            }
        };

        // insertions
        let total_pairs = old * (old - 1) / 2;
        let mut tried: HashSet<(usize, usize)> = HashSet::new();
        for _ in 0..l_plus {
            let free = total_pairs - self.edges.len();
            if !hot {
                let best = (0..old)
                    .flat_map(|a| (a + 1..old).map(move |b| (a, b)))
                    .filter(|k| !self.edge_index.contains_key(k))
                    .map(|(a, b)| (self.distance(a, b, inv_zeta), a, b))
                    .min_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
                match best {
                    Some((_, a, b)) => {
                        self.add_edge(a, b);
                        self.internal.push((a, b));
                    }
                    None => self.skipped += 1,
                }
                continue;
            }
            let mut placed = false;
            while tried.len() < free {
                let a = self.rng.random_range(0..old);
                let b = self.rng.random_range(0..old);
                if a == b {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if self.edge_index.contains_key(&key) || tried.contains(&key) {
                    continue;
                }
                let prob = link_prob(self.distance(a, b, inv_zeta));
                if self.uniform() < prob {
                    self.add_edge(a, b);
                    self.internal.push(key);
                    placed = true;
                    break;
                }
                tried.insert(key);
            }
            if !placed {
                self.skipped += 1;
            }
        }

        // deletions, among internal links only
        let mut kept: HashSet<(usize, usize)> = HashSet::new();
        for _ in 0..l_minus {
            if !hot {
                let worst = self
                    .internal
                    .iter()
                    .enumerate()
                    .map(|(idx, &(a, b))| (self.distance(a, b, inv_zeta), a, b, idx))
                    .max_by(|x, y| {
                        x.0.partial_cmp(&y.0)
                            .unwrap_or(std::cmp::Ordering::Equal)
                            .then((y.1, y.2).cmp(&(x.1, x.2)))
                    });
                match worst {
                    Some((_, a, b, idx)) => {
                        self.internal.swap_remove(idx);
                        self.remove_edge((a, b));
                    }
                    None => self.skipped += 1,
                }
                continue;
            }
            let mut removed = false;
            while kept.len() < self.internal.len() {
                let idx = self.rng.random_range(0..self.internal.len());
                let key = self.internal[idx];
                if kept.contains(&key) {
                    continue;
                }
                let keep_prob = link_prob(self.distance(key.0, key.1, inv_zeta));
                if self.uniform() >= keep_prob {
                    self.internal.swap_remove(idx);
                    self.remove_edge(key);
                    removed = true;
                    break;
                }
                kept.insert(key);
            }
            if !removed {
                self.skipped += 1;
            }
        }
        Ok(())
    }
}
