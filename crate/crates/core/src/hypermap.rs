//! Degree-ordered insertion baseline.
//!
//! Nodes enter by descending degree. The first sits at the centre; each
//! later node takes its birth radius, the nodes already placed fade
//! outwards, and its angle is the grid point minimising the loss of its
//! pairs with everybody already placed. Final radii follow the degree
//! rank, as in [`assign_radial_coordinates`](crate::likelihood::assign_radial_coordinates).

use crate::error::{Error, Result};
use crate::graph::{DegreeKind, Graph};
use crate::hyperbolic::{acosh_clamped, angular_difference, PolarCoord};
use crate::likelihood::{degree_order, Embedding};
use crate::params::EpsoParams;
use crate::pso::{cutoff_radius, expected_internal_links};
use crate::scalar::{softplus, Real};

/// Smallest expected link count used for the insertion-time cutoff.
const MIN_EXPECTED_LINKS: f64 = 1e-6;

pub const DEFAULT_ANGLE_GRID: usize = 360;

/// Local loss of placing the `i`-th inserted node (1-based) at each grid
/// angle, given the angles of the nodes inserted before it.
pub fn insertion_losses<F: Real>(
    g: &Graph,
    p: &EpsoParams<F>,
    order: &[usize],
    thetas: &[F],
    i: usize,
    angle_grid: usize,
) -> Result<Vec<F>> {
    let grid = grid_angles::<F>(angle_grid);
    if i < 2 {
        return Ok(vec![F::zero(); grid.len()]);
    }
    let two = F::lit(2.0);
    let node = order[i - 1];
    let m_eff = (p.m + expected_internal_links(i, p)).max(F::lit(MIN_EXPECTED_LINKS));
    let cutoff = cutoff_radius(i, p, m_eff)?;
    let scale = p.zeta / (two * p.temperature);
    let cap = -F::prob_floor().ln();
    let zr_new = p.zeta * p.birth_radius(i);
    let sinh_new = zr_new.sinh();
    // earlier nodes at time i; the first stays at the centre
    let placed: Vec<(F, F, F, bool)> = (1..i)
        .map(|j| {
            let zr = if j == 1 {
                F::zero()
            } else {
                p.zeta * p.faded_radius(j, i)
            };
            let u = order[j - 1];
            (
                (zr_new - zr).cosh(),
                two * sinh_new * zr.sinh(),
                thetas[u],
                g.has_edge(node, u),
            )
        })
        .collect();
    Ok(grid
        .iter()
        .map(|&theta| {
            placed
                .iter()
                .map(|&(base, cross, theta_j, linked)| {
                    let half = (angular_difference(theta, theta_j) / two).sin();
                    let x = acosh_clamped(base + cross * half * half) / p.zeta;
                    let z = scale * (x - cutoff);
                    let t = if linked { softplus(z) } else { softplus(-z) };
                    t.min(cap)
                })
                .sum()
        })
        .collect())
}

fn grid_angles<F: Real>(angle_grid: usize) -> Vec<F> {
    let step = F::TAU() / F::count(angle_grid);
    (0..angle_grid).map(|k| step * F::count(k)).collect()
}

/// Insertion embedding; `angle_grid` evenly spaced trial angles per node,
/// the first of several equal minima winning.
pub fn hypermap_embed<F: Real>(
    g: &Graph,
    p: &EpsoParams<F>,
    kind: DegreeKind,
    tie_seed: u64,
    angle_grid: usize,
) -> Result<Embedding<F>> {
    if angle_grid < 1 {
        return Err(Error::Parameter("angle grid must have at least 1 point".into()));
    }
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::Size("empty graph".into()));
    }
    g.require_connected()?;
    let params = p.with_n_nodes(n);
    if n > 1 && !(params.temperature > F::zero()) {
        return Err(Error::Domain("insertion needs T > 0".into()));
    }
    let order = degree_order(g, kind, tie_seed)?;
    let grid = grid_angles::<F>(angle_grid);
    let mut thetas = vec![F::zero(); n];
    for i in 2..=n {
        let losses = insertion_losses(g, &params, &order, &thetas, i, angle_grid)?;
        let mut best = 0;
        for (k, &l) in losses.iter().enumerate() {
            if l < losses[best] {
                best = k;
            }
        }
        thetas[order[i - 1]] = grid[best];
    }
    let mut coords = vec![PolarCoord::new(F::zero(), F::zero()); n];
    for (rank0, &node) in order.iter().enumerate() {
        coords[node] = PolarCoord::new(params.faded_radius(rank0 + 1, n), thetas[node]);
    }
    Ok(Embedding {
        coords,
        radial_order: order,
        params,
    })
}
