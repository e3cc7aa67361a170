//! Angular refinement of an embedding by local log-loss search.
//!
//! Each round visits the nodes innermost first. A node tries `q` positions
//! spread evenly over the arc between its angular neighbours of a given
//! rank (second neighbours in swapping rounds, first neighbours otherwise)
//! and jumps to the best one if that lowers the loss. Moves take effect
//! immediately. Radii are never touched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperbolic::normalize_angle;
use crate::likelihood::{Embedding, LossModel};
use crate::quality::greedy_routing_score;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSchedule {
    pub swap_rounds: usize,
    pub noswap_rounds: usize,
    /// Candidate positions per node and round.
    pub q: usize,
    /// Stop once a round improves the loss by less than this fraction.
    pub stop_rel_tol: Option<f64>,
    /// Record the greedy routing score after every round.
    pub track_gr: bool,
}

impl Default for OptimizerSchedule {
    fn default() -> Self {
        Self {
            swap_rounds: 5,
            noswap_rounds: 3,
            q: 6,
            stop_rel_tol: None,
            track_gr: false,
        }
    }
}

impl OptimizerSchedule {
    pub fn new(swap_rounds: usize, noswap_rounds: usize, q: usize) -> Result<Self> {
        let s = Self {
            swap_rounds,
            noswap_rounds,
            q,
            ..Self::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 1 {
            return Err(Error::Parameter("q must be >= 1".into()));
        }
        if let Some(t) = self.stop_rel_tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Parameter(format!(
                    "stop tolerance must be finite and >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn total_rounds(&self) -> usize {
        self.swap_rounds + self.noswap_rounds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub swapping: bool,
    pub loss_after: f64,
    pub accepted: usize,
    pub candidate_evals: usize,
    pub greedy_routing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub initial_loss: f64,
    pub rounds: Vec<RoundStats>,
}

impl OptimizationTrace {
    pub fn losses(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.loss_after).collect()
    }

    pub fn candidate_evals(&self) -> usize {
        self.rounds.iter().map(|r| r.candidate_evals).sum()
    }

    /// Relative loss change of each round against the one before it.
    pub fn relative_changes(&self) -> Vec<f64> {
        let mut prev = self.initial_loss;
        self.rounds
            .iter()
            .map(|r| {
                let rel = if prev == 0.0 {
                    0.0
                } else {
                    (prev - r.loss_after) / prev
                };
                prev = r.loss_after;
                rel
            })
            .collect()
    }
}

/// Nodes sorted by `(θ, id)` with the inverse permutation, kept current as
/// nodes move.
#[derive(Debug, Clone)]
pub struct AngularOrder {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl AngularOrder {
    pub fn new<F: Real>(thetas: &[F]) -> Self {
        let mut order: Vec<usize> = (0..thetas.len()).collect();
        order.sort_by(|&a, &b| key_cmp(thetas, a, b));
        let mut pos = vec![0; thetas.len()];
        for (k, &u) in order.iter().enumerate() {
            pos[u] = k;
        }
        Self { order, pos }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Node `steps` places after `node` (positive) or before it (negative),
    /// cyclically.
    pub fn neighbor(&self, node: usize, steps: isize) -> usize {
        let n = self.order.len() as isize;
        let k = (self.pos[node] as isize + steps).rem_euclid(n);
        self.order[k as usize]
    }

    /// Re-seats `node` after its angle changed.
    pub fn update<F: Real>(&mut self, thetas: &[F], node: usize) {
        let old = self.pos[node];
        self.order.remove(old);
        let new = self
            .order
            .partition_point(|&u| key_cmp(thetas, u, node) == std::cmp::Ordering::Less);
        self.order.insert(new, node);
        let (lo, hi) = (old.min(new), old.max(new));
        for k in lo..=hi {
            self.pos[self.order[k]] = k;
        }
    }

    /// Cyclic order starting from node 0, for order-preservation checks.
    pub fn cyclic_from_zero(&self) -> Vec<usize> {
        if self.order.is_empty() {
            return Vec::new();
        }
        let start = self.pos[0];
        (0..self.order.len())
            .map(|k| self.order[(start + k) % self.order.len()])
            .collect()
    }
}

fn key_cmp<F: Real>(thetas: &[F], a: usize, b: usize) -> std::cmp::Ordering {
    thetas[a]
        .partial_cmp(&thetas[b])
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.cmp(&b))
}

/// `q` angles at arc fractions `k/(q+1)` between the `rank`-th neighbours
/// of `node` on either side, along the arc that contains `node`.
pub fn candidate_positions<F: Real>(
    emb: &Embedding<F>,
    node: usize,
    rank: usize,
    q: usize,
) -> Result<Vec<F>> {
    let thetas = emb.thetas();
    candidates_in(&AngularOrder::new(&thetas), &thetas, node, rank, q)
}

fn candidates_in<F: Real>(
    order: &AngularOrder,
    thetas: &[F],
    node: usize,
    rank: usize,
    q: usize,
) -> Result<Vec<F>> {
    let n = thetas.len();
    if rank == 0 || n < 2 * rank + 1 {
        return Err(Error::Size(format!(
            "rank-{rank} arcs need at least {} nodes, got {n}",
            2 * rank + 1
        )));
    }
    let tau = F::TAU();
    let before = thetas[order.neighbor(node, -(rank as isize))];
    let after = thetas[order.neighbor(node, rank as isize)];
    let here = thetas[node];
    let d1 = ccw(before, here, tau);
    let d2 = ccw(here, after, tau);
    let arc = d1 + d2;
    let parts = F::count(q + 1);
    Ok((1..=q)
        .map(|k| normalize_angle(before + arc * F::count(k) / parts))
        .collect())
}

/// Counter-clockwise angle from `from` to `to`, in `[0, 2π)`.
fn ccw<F: Real>(from: F, to: F, tau: F) -> F {
    let d = (to - from) % tau;
    if d < F::zero() {
        d + tau
    } else {
        d
    }
}

/// One sweep over all nodes in radial order; `thetas` and `order` are
/// updated in place.
fn sweep<F: Real>(
    model: &LossModel<'_, F>,
    radial_order: &[usize],
    thetas: &mut [F],
    order: &mut AngularOrder,
    rank: usize,
    q: usize,
) -> (usize, usize) {
    let n = thetas.len();
    let rank = if n < 2 * rank + 1 { 1 } else { rank };
    if n < 3 {
        return (0, 0);
    }
    // moves must beat the incumbent by more than summation noise
    let slack = F::epsilon().sqrt() * F::lit(0.01);
    let mut accepted = 0;
    let mut evals = 0;
    for &node in radial_order {
        let candidates =
            candidates_in(order, thetas, node, rank, q).expect("node count checked above");
        let prof = model.profile(node);
        let current = model.profile_loss(&prof, thetas[node], thetas);
        let mut best = current;
        let mut best_theta = None;
        for theta in candidates {
            evals += 1;
            let value = model.profile_loss(&prof, theta, thetas);
            if value < best {
                best = value;
                best_theta = Some(theta);
            }
        }
        if let Some(theta) = best_theta {
            if current - best > slack * current.abs() {
                thetas[node] = theta;
                order.update(thetas, node);
                accepted += 1;
            }
        }
    }
    (accepted, evals)
}

/// A single round on `emb`; returns the updated embedding and its stats.
pub fn optimize_round<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    swapping: bool,
    q: usize,
) -> Result<(Embedding<F>, RoundStats)> {
    let sched = OptimizerSchedule {
        swap_rounds: usize::from(swapping),
        noswap_rounds: usize::from(!swapping),
        q,
        stop_rel_tol: None,
        track_gr: false,
    };
    let (out, trace) = optimize(g, emb, &sched)?;
    let stats = trace.rounds.into_iter().next().unwrap_or(RoundStats {
        swapping,
        loss_after: trace.initial_loss,
        accepted: 0,
        candidate_evals: 0,
        greedy_routing: None,
    });
    Ok((out, stats))
}

/// Runs the swapping rounds, then the non-swapping rounds.
pub fn optimize<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    sched: &OptimizerSchedule,
) -> Result<(Embedding<F>, OptimizationTrace)> {
    sched.validate()?;
    let model = LossModel::new(g, emb)?;
    let mut thetas = emb.thetas();
    let initial_loss = if g.n_nodes() >= 2 {
        model.loss(&thetas).total.to_f64_lossy()
    } else {
        0.0
    };
    let mut trace = OptimizationTrace {
        initial_loss,
        rounds: Vec::new(),
    };
    let mut out = emb.clone();
    if g.n_nodes() <= 2 {
        return Ok((out, trace));
    }
    let mut order = AngularOrder::new(&thetas);
    let mut prev = initial_loss;
    let plan = std::iter::repeat_n(true, sched.swap_rounds)
        .chain(std::iter::repeat_n(false, sched.noswap_rounds));
    for swapping in plan {
        let rank = if swapping { 2 } else { 1 };
        let (accepted, evals) = sweep(
            &model,
            &emb.radial_order,
            &mut thetas,
            &mut order,
            rank,
            sched.q,
        );
        let loss_after = model.loss(&thetas).total.to_f64_lossy();
        let greedy_routing = if sched.track_gr {
            for (c, &t) in out.coords.iter_mut().zip(&thetas) {
                c.theta = t;
            }
            Some(greedy_routing_score(g, &out)?.gr_score)
        } else {
            None
        };
        trace.rounds.push(RoundStats {
            swapping,
            loss_after,
            accepted,
            candidate_evals: evals,
            greedy_routing,
        });
        let rel = if prev == 0.0 {
            0.0
        } else {
            (prev - loss_after) / prev
        };
        prev = loss_after;
        if let Some(tol) = sched.stop_rel_tol {
            if rel < tol {
                break;
            }
        }
    }
    for (c, &t) in out.coords.iter_mut().zip(&thetas) {
        c.theta = t;
    }
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::PolarCoord;
    use crate::likelihood::logarithmic_loss;
    use crate::params::EpsoParams;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle(n: usize) -> Embedding<f64> {
        let p = EpsoParams::pso(n, 1.0, 0.6, 0.3).unwrap();
        let coords = (0..n)
            .map(|k| PolarCoord::new(1.0 + k as f64 * 0.1, 2.0 * PI * k as f64 / n as f64))
            .collect();
        Embedding::from_coords(coords, p)
    }

    #[test]
    fn five_node_rank_one() {
        let emb = circle(5);
        let gap = 2.0 * PI / 5.0;
        let c = candidate_positions(&emb, 2, 1, 3).unwrap();
        let here = emb.coords[2].theta;
        assert_relative_eq!(c[0], here - gap / 2.0, epsilon = 1e-12);
        assert_relative_eq!(c[1], here, epsilon = 1e-12);
        assert_relative_eq!(c[2], here + gap / 2.0, epsilon = 1e-12);
        // the wrap-around node 0
        let c0 = candidate_positions(&emb, 0, 1, 3).unwrap();
        assert_relative_eq!(c0[0], 2.0 * PI - gap / 2.0, epsilon = 1e-12);
        assert_eq!(c0[1], 0.0);
        assert_relative_eq!(c0[2], gap / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_two_arc_contains_rank_one_arc() {
        let emb = circle(7);
        let mid = candidate_positions(&emb, 3, 1, 1).unwrap();
        assert_relative_eq!(mid[0], emb.coords[3].theta, epsilon = 1e-12);
        let one = candidate_positions(&emb, 3, 1, 3).unwrap();
        let two = candidate_positions(&emb, 3, 2, 3).unwrap();
        assert!(two[0] < one[0] && two[2] > one[2]);
        assert!(one[0] > emb.coords[2].theta && one[2] < emb.coords[4].theta);
        assert!(candidate_positions(&emb, 3, 4, 1).is_err());
    }

    #[test]
    fn empty_schedule_is_identity() {
        let emb = circle(6);
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let sched = OptimizerSchedule::new(0, 0, 6).unwrap();
        let (out, trace) = optimize(&g, &emb, &sched).unwrap();
        assert_eq!(out, emb);
        assert!(trace.rounds.is_empty());
        assert!(OptimizerSchedule::new(1, 1, 0).is_err());
    }

    #[test]
    fn rounds_lower_the_loss_and_keep_radii() {
        let n = 12;
        let ring: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 5) % n)).collect();
        let g = Graph::from_edges(n, ring).unwrap();
        let emb = circle(n);
        let before = logarithmic_loss(&g, &emb).unwrap().total;
        let (out, trace) = optimize(&g, &emb, &OptimizerSchedule::default()).unwrap();
        let after = logarithmic_loss(&g, &out).unwrap().total;
        assert!(after < before);
        assert_eq!(trace.losses().last().copied().unwrap(), after);
        for w in trace.losses().windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (a, b) in emb.coords.iter().zip(&out.coords) {
            assert_eq!(a.r, b.r);
        }
        assert_eq!(trace.candidate_evals(), 8 * n * 6);
    }

    #[test]
    fn noswap_rounds_keep_cyclic_order() {
        let n = 15;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i * 7 + 3) % n)).filter(|e| e.0 != e.1).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        let emb = circle(n);
        let before = AngularOrder::new(&emb.thetas()).cyclic_from_zero();
        let sched = OptimizerSchedule::new(0, 4, 6).unwrap();
        let (out, trace) = optimize(&g, &emb, &sched).unwrap();
        assert!(trace.rounds.iter().any(|r| r.accepted > 0));
        assert_eq!(AngularOrder::new(&out.thetas()).cyclic_from_zero(), before);
    }

    #[test]
    fn stop_tolerance_ends_early() {
        let n = 10;
        let g = Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        let emb = circle(n);
        let mut sched = OptimizerSchedule::new(20, 0, 6).unwrap();
        sched.stop_rel_tol = Some(0.5);
        let (_, trace) = optimize(&g, &emb, &sched).unwrap();
        assert!(trace.rounds.len() < 20);
    }

    #[test]
    fn order_updates_match_fresh_sort() {
        let mut thetas = vec![0.5, 1.0, 4.0, 2.0, 6.0];
        let mut order = AngularOrder::new(&thetas);
        for (node, theta) in [(2, 0.1), (0, 5.5), (4, 1.0), (1, 3.0)] {
            thetas[node] = theta;
            order.update(&thetas, node);
            assert_eq!(order.order(), AngularOrder::new(&thetas).order());
        }
    }
}
