//! E-PSO logarithmic loss and everything that feeds it: degree-ordered
//! radial coordinates, single-node loss deltas, and a box-constrained
//! gradient search over `(m, β, T)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeKind, Graph};
use crate::hyperbolic::{acosh_clamped, angular_difference, PolarCoord};
use crate::params::EpsoParams;
use crate::pso::{connection_probability, cutoff_radius};
use crate::scalar::{softplus, Real};

/// Node coordinates together with the radial order they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding<F> {
    pub coords: Vec<PolarCoord<F>>,
    /// Innermost node first.
    pub radial_order: Vec<usize>,
    pub params: EpsoParams<F>,
}

impl<F: Real> Embedding<F> {
    /// Wraps externally produced coordinates; the radial order is read off
    /// the radii (ties by node id).
    pub fn from_coords(coords: Vec<PolarCoord<F>>, params: EpsoParams<F>) -> Self {
        let mut radial_order: Vec<usize> = (0..coords.len()).collect();
        radial_order.sort_by(|&a, &b| {
            coords[a]
                .r
                .partial_cmp(&coords[b].r)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Self {
            coords,
            radial_order,
            params,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn thetas(&self) -> Vec<F> {
        self.coords.iter().map(|c| c.theta).collect()
    }

    pub fn set_theta(&mut self, node: usize, theta: F) {
        self.coords[node] = PolarCoord::new(self.coords[node].r, theta);
    }

    /// Same angles and radial order, radii recomputed for `params`.
    pub fn with_params(&self, params: EpsoParams<F>) -> Self {
        let mut coords = self.coords.clone();
        for (rank0, &node) in self.radial_order.iter().enumerate() {
            coords[node].r = params.faded_radius(rank0 + 1, params.n_nodes);
        }
        Self {
            coords,
            radial_order: self.radial_order.clone(),
            params,
        }
    }
}

/// `LL = edge_term + non_edge_term`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown<F> {
    pub total: F,
    pub edge_term: F,
    pub non_edge_term: F,
}

/// Connection probability of the finished network, `1/(1+exp(ζ(x-R_N)/2T))`
/// with `R_N` computed from `m`.
pub fn global_connection_probability<F: Real>(x: F, p: &EpsoParams<F>) -> Result<F> {
    let cutoff = final_cutoff(p)?;
    connection_probability(x, cutoff, p)
}

/// `R_N` for the loss; a single-node network borrows `R_2`.
pub fn final_cutoff<F: Real>(p: &EpsoParams<F>) -> Result<F> {
    cutoff_radius(p.n_nodes.max(2), p, p.m)
}

/// Nodes by descending degree of `kind`, equal degrees in an order drawn
/// from `tie_seed`.
pub fn degree_order(g: &Graph, kind: DegreeKind, tie_seed: u64) -> Result<Vec<usize>> {
    let degrees = g.degrees(kind)?.values;
    let mut order: Vec<usize> = (0..g.n_nodes()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(tie_seed));
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]));
    Ok(order)
}

/// Radii from degree rank: rank `i*` gets `β(2/ζ) ln i* + (1-β)(2/ζ) ln N`.
/// Angles are left at zero.
pub fn assign_radial_coordinates<F: Real>(
    g: &Graph,
    p: &EpsoParams<F>,
    kind: DegreeKind,
    tie_seed: u64,
) -> Result<Embedding<F>> {
    if g.n_nodes() == 0 {
        return Err(Error::Size("empty graph".into()));
    }
    let params = p.with_n_nodes(g.n_nodes());
    let radial_order = degree_order(g, kind, tie_seed)?;
    let mut coords = vec![PolarCoord::new(F::zero(), F::zero()); g.n_nodes()];
    for (rank0, &node) in radial_order.iter().enumerate() {
        coords[node].r = params.faded_radius(rank0 + 1, params.n_nodes);
    }
    Ok(Embedding {
        coords,
        radial_order,
        params,
    })
}

/// Precomputed per-node state for repeated loss evaluations on a fixed set
/// of radii: `ζr`, `sinh(ζr)`, the cutoff and the logistic scale.
#[derive(Debug, Clone)]
pub struct LossModel<'g, F> {
    graph: &'g Graph,
    zr: Vec<F>,
    sinh_zr: Vec<F>,
    inv_zeta: F,
    cutoff: F,
    scale: F,
    cap: F,
}

impl<'g, F: Real> LossModel<'g, F> {
    pub fn new(graph: &'g Graph, emb: &Embedding<F>) -> Result<Self> {
        let p = &emb.params;
        if graph.n_nodes() != emb.n_nodes() {
            return Err(Error::Size(format!(
                "graph has {} nodes, embedding {}",
                graph.n_nodes(),
                emb.n_nodes()
            )));
        }
        if !(p.temperature > F::zero()) {
            return Err(Error::Domain("the logarithmic loss needs T > 0".into()));
        }
        if let Some(bad) = emb.coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Data(format!("node {bad} has a non-finite coordinate")));
        }
        let zr: Vec<F> = emb.coords.iter().map(|c| p.zeta * c.r).collect();
        let sinh_zr = zr.iter().map(|z| z.sinh()).collect();
        Ok(Self {
            graph,
            zr,
            sinh_zr,
            inv_zeta: F::one() / p.zeta,
            cutoff: final_cutoff(p)?,
            scale: p.zeta / (F::lit(2.0) * p.temperature),
            cap: -F::prob_floor().ln(),
        })
    }

    /// `-ln p̃` for a linked pair, `-ln(1 - p̃)` otherwise, with `p̃` kept at
    /// least the probability floor away from 0 and 1.
    #[inline]
    fn pair_term(&self, a: usize, b: usize, theta_a: F, theta_b: F, linked: bool) -> F {
        let base = (self.zr[a] - self.zr[b]).cosh();
        let cross = F::lit(2.0) * self.sinh_zr[a] * self.sinh_zr[b];
        self.term(base, cross, angular_difference(theta_a, theta_b), linked)
    }

    /// Pair term from `cosh(ζr_a - ζr_b)` and `2 sinh(ζr_a) sinh(ζr_b)`.
    #[inline]
    fn term(&self, base: F, cross: F, dtheta: F, linked: bool) -> F {
        let half = (dtheta * F::lit(0.5)).sin();
        let x = acosh_clamped(base + cross * half * half) * self.inv_zeta;
        let z = self.scale * (x - self.cutoff);
        let term = if linked { softplus(z) } else { softplus(-z) };
        term.min(self.cap)
    }

    /// Angle-independent part of the terms involving `node`.
    pub fn profile(&self, node: usize) -> NodeProfile<F> {
        let n = self.zr.len();
        let mut linked = vec![false; n];
        for &w in self.graph.neighbors(node) {
            linked[w] = true;
        }
        let two_sinh = F::lit(2.0) * self.sinh_zr[node];
        NodeProfile {
            node,
            base: (0..n).map(|j| (self.zr[node] - self.zr[j]).cosh()).collect(),
            cross: (0..n).map(|j| two_sinh * self.sinh_zr[j]).collect(),
            linked,
        }
    }

    /// Same value as [`Self::node_loss`], from a prepared profile.
    pub fn profile_loss(&self, prof: &NodeProfile<F>, theta: F, thetas: &[F]) -> F {
        let mut sum = F::zero();
        for (j, &theta_j) in thetas.iter().enumerate() {
            if j != prof.node {
                sum = sum
                    + self.term(
                        prof.base[j],
                        prof.cross[j],
                        angular_difference(theta, theta_j),
                        prof.linked[j],
                    );
            }
        }
        sum
    }

    /// Sum of the `N - 1` terms that involve `node`, with `node` placed at
    /// `theta` and everybody else at `thetas`.
    pub fn node_loss(&self, node: usize, theta: F, thetas: &[F]) -> F {
        let nbrs = self.graph.neighbors(node);
        let mut next = 0;
        let mut sum = F::zero();
        for (j, &theta_j) in thetas.iter().enumerate() {
            let linked = next < nbrs.len() && nbrs[next] == j;
            if linked {
                next += 1;
            }
            if j != node {
                sum = sum + self.pair_term(node, j, theta, theta_j, linked);
            }
        }
        sum
    }

    pub fn loss(&self, thetas: &[F]) -> LossBreakdown<F> {
        let n = thetas.len();
        let mut edge_term = F::zero();
        let mut non_edge_term = F::zero();
        for i in 0..n {
            let nbrs = self.graph.neighbors(i);
            let mut next = nbrs.partition_point(|&w| w <= i);
            for j in i + 1..n {
                let linked = next < nbrs.len() && nbrs[next] == j;
                if linked {
                    next += 1;
                    edge_term = edge_term + self.pair_term(i, j, thetas[i], thetas[j], true);
                } else {
                    non_edge_term =
                        non_edge_term + self.pair_term(i, j, thetas[i], thetas[j], false);
                }
            }
        }
        LossBreakdown {
            total: edge_term + non_edge_term,
            edge_term,
            non_edge_term,
        }
    }

    /// Loss change from moving `node` to `new_theta`, from its `N - 1` terms.
    pub fn move_delta(&self, node: usize, new_theta: F, thetas: &[F]) -> F {
        self.node_loss(node, new_theta, thetas) - self.node_loss(node, thetas[node], thetas)
    }
}

/// Full logarithmic loss of an embedding.
pub fn logarithmic_loss<F: Real>(g: &Graph, emb: &Embedding<F>) -> Result<LossBreakdown<F>> {
    if g.n_nodes() < 2 {
        return Err(Error::Size("the logarithmic loss needs N >= 2".into()));
    }
    let model = LossModel::new(g, emb)?;
    Ok(model.loss(&emb.thetas()))
}

/// Cached radial factors of the pair terms of one node.
#[derive(Debug, Clone)]
pub struct NodeProfile<F> {
    node: usize,
    base: Vec<F>,
    cross: Vec<F>,
    linked: Vec<bool>,
}

/// Loss change for moving one node, using a prepared [`LossModel`].
pub fn loss_delta_for_move<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    node: usize,
    new_theta: F,
    cache: &LossModel<'_, F>,
) -> Result<F> {
    g.check_node(node)?;
    Ok(cache.move_delta(node, new_theta, &emb.thetas()))
}

/// Box for the `(m, β, T)` search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds<F> {
    pub m: (F, F),
    pub beta: (F, F),
    pub temperature: (F, F),
}

impl<F: Real> ParamBounds<F> {
    /// `m ∈ [1, 2⟨k⟩]`, `β, T ∈ [0.1, 0.99]`.
    pub fn for_graph(g: &Graph) -> Self {
        let k = F::lit(g.mean_degree());
        Self {
            m: (F::one(), (F::lit(2.0) * k).max(F::one())),
            beta: (F::lit(0.1), F::lit(0.99)),
            temperature: (F::lit(0.1), F::lit(0.99)),
        }
    }

    fn lower(&self) -> [F; 3] {
        [self.m.0, self.beta.0, self.temperature.0]
    }

    fn upper(&self) -> [F; 3] {
        [self.m.1, self.beta.1, self.temperature.1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSearch<F> {
    pub bounds: ParamBounds<F>,
    /// Fraction of the distance to the bound taken by the first step.
    pub step_factor: F,
    /// Stop once the step, measured in box-normalised units, is below this.
    pub tol: F,
    pub max_iter: usize,
    /// Keep `m` at its start value and search `(β, T)` only.
    pub fix_m: bool,
}

impl<F: Real> ParamSearch<F> {
    pub fn for_graph(g: &Graph) -> Self {
        Self {
            bounds: ParamBounds::for_graph(g),
            step_factor: F::lit(0.1),
            tol: F::lit(1e-4),
            max_iter: 500,
            fix_m: false,
        }
    }
}

/// Outcome of [`minimize_in_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSearch<F> {
    pub x: [F; 3],
    pub value: F,
    pub iterations: usize,
    pub converged: bool,
    pub trajectory: Vec<[F; 3]>,
}

/// Gradient descent in a box with per-direction step scaling.
///
/// The first step along each free coordinate covers `step_factor` times the
/// distance to the bound the negative partial points at. Later steps move
/// by `c_d * ∂f/∂x_d`, with `c_d` the first step length over the first
/// partial's magnitude. Points leaving the box are clamped to it. A step
/// that does not lower `f` is rejected and all scales are halved, so the
/// value never increases. Partials come from central differences with
/// relative step `1e-4`.
pub fn minimize_in_box<F: Real>(
    mut f: impl FnMut([F; 3]) -> F,
    start: [F; 3],
    lower: [F; 3],
    upper: [F; 3],
    free: [bool; 3],
    step_factor: F,
    tol: F,
    max_iter: usize,
) -> Result<BoxSearch<F>> {
    if !(step_factor > F::zero() && step_factor < F::one()) {
        return Err(Error::Parameter(format!(
            "step factor must lie in (0, 1), got {step_factor}"
        )));
    }
    let clamp = |x: [F; 3]| -> [F; 3] {
        let mut y = x;
        for d in 0..3 {
            y[d] = y[d].max(lower[d]).min(upper[d]);
        }
        y
    };
    let mut x = clamp(start);
    let mut value = f(x);
    if !value.is_finite() {
        return Err(Error::Data(format!(
            "objective is not finite at the start point ({value})"
        )));
    }
    let gradient = |x: [F; 3], f: &mut dyn FnMut([F; 3]) -> F| -> [F; 3] {
        let mut g = [F::zero(); 3];
        for d in 0..3 {
            if !free[d] {
                continue;
            }
            let h = F::lit(1e-4) * x[d].abs().max(F::lit(1e-3));
            let mut hi = x;
            let mut lo = x;
            hi[d] = hi[d] + h;
            lo[d] = lo[d] - h;
            g[d] = (f(hi) - f(lo)) / (h + h);
        }
        g
    };

    let mut trajectory = vec![x];
    let first = gradient(x, &mut f);
    let mut scale = [F::zero(); 3];
    let mut step = [F::zero(); 3];
    for d in 0..3 {
        if !free[d] || first[d] == F::zero() {
            continue;
        }
        let room = if first[d] > F::zero() {
            x[d] - lower[d]
        } else {
            upper[d] - x[d]
        };
        let len = step_factor * room;
        // at the bound already: fall back to a box-sized scale so later
        // steps can still move inward
        let len_for_scale = if len > F::zero() {
            len
        } else {
            step_factor * (upper[d] - lower[d])
        };
        scale[d] = len_for_scale / first[d].abs();
        step[d] = -first[d].signum() * len;
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let next = clamp([x[0] + step[0], x[1] + step[1], x[2] + step[2]]);
        let moved: F = (0..3)
            .map(|d| {
                let span = (upper[d] - lower[d]).max(F::epsilon());
                let s = (next[d] - x[d]) / span;
                s * s
            })
            .sum::<F>()
            .sqrt();
        iterations += 1;
        if moved < tol {
            converged = true;
            break;
        }
        let trial = f(next);
        if trial < value {
            x = next;
            value = trial;
            trajectory.push(x);
        } else {
            // uphill or flat: shrink and retry from the same point
            for d in 0..3 {
                scale[d] = scale[d] / F::lit(2.0);
                step[d] = step[d] / F::lit(2.0);
            }
            if iterations >= max_iter {
                break;
            }
            continue;
        }
        if iterations >= max_iter {
            break;
        }
        let grad = gradient(x, &mut f);
        for d in 0..3 {
            step[d] = -scale[d] * grad[d];
        }
    }
    Ok(BoxSearch {
        x,
        value,
        iterations,
        converged,
        trajectory,
    })
}

/// Fits `(m, β, T)` by minimising the loss of `emb`'s angles and radial
/// order; radii follow `β` and the cutoff follows `m`, `β` and `T`. The
/// returned `ell` is `⟨k⟩/2 - m`.
pub fn estimate_parameters<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    start: (F, F, F),
    search: &ParamSearch<F>,
) -> Result<EpsoParams<F>> {
    let thetas = emb.thetas();
    let base = emb.params.with_n_nodes(g.n_nodes());
    let objective = |x: [F; 3]| -> F {
        let mut p = base;
        p.m = x[0];
        p.beta = x[1];
        p.temperature = x[2];
        let trial = emb.with_params(p);
        match LossModel::new(g, &trial) {
            Ok(model) => model.loss(&thetas).total,
            Err(_) => F::infinity(),
        }
    };
    let found = minimize_in_box(
        objective,
        [start.0, start.1, start.2],
        search.bounds.lower(),
        search.bounds.upper(),
        [!search.fix_m, true, true],
        search.step_factor,
        search.tol,
        search.max_iter,
    )?;
    let half_k = F::lit(g.mean_degree() / 2.0);
    EpsoParams::new(
        base.zeta,
        g.n_nodes(),
        found.x[0],
        half_k - found.x[0],
        found.x[1],
        found.x[2],
    )
}
