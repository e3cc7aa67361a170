//! Coalescent embedding front end: repulsion-attraction edge weights,
//! minimum-curvilinear distances along the minimum spanning tree, a rank-2
//! truncated SVD and the equidistant angular adjustment.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{minimum_spanning_tree, DegreeKind, Graph, WeightedGraph};
use crate::likelihood::{assign_radial_coordinates, Embedding};
use crate::params::EpsoParams;
use crate::scalar::Real;

/// Dense symmetric `N x N` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Real> SimilarityMatrix<F> {
    /// Checks shape, symmetry, a zero diagonal and nonnegative entries.
    pub fn from_row_major(n: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Size(format!(
                "{} entries for a {n} x {n} matrix",
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != F::zero() {
                return Err(Error::Data(format!("nonzero diagonal entry at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if a != b || !(a >= F::zero()) {
                    return Err(Error::Data(format!(
                        "entries ({i}, {j}) and ({j}, {i}) must be equal and nonnegative"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    fn to_f64_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64_lossy())
    }
}

/// Repulsion-attraction weight `(k_i + k_j + k_i k_j) / (1 + CN_ij)` on
/// every edge, from total degrees.
pub fn ra_preweight<F: Real>(g: &Graph) -> WeightedGraph<F> {
    let k = g.total_degrees();
    let edges = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (ku, kv) = (F::count(k[u]), F::count(k[v]));
            let cn = g.common_neighbors(u, v).expect("edge endpoints are valid");
            (u, v, (ku + kv + ku * kv) / (F::one() + F::count(cn)))
        })
        .collect();
    WeightedGraph::new(g.n_nodes(), edges).expect("weights from a valid graph")
}

/// Path-weight sums between all node pairs along the minimum spanning tree
/// of `wg`.
pub fn curvilinear_distance_matrix<F: Real>(wg: &WeightedGraph<F>) -> Result<SimilarityMatrix<F>> {
    let tree = minimum_spanning_tree(wg)?;
    let n = tree.n_nodes;
    let adj = tree.adjacency();
    let mut data = vec![F::zero(); n * n];
    let mut stack = Vec::with_capacity(n);
    let mut seen = vec![usize::MAX; n];
    for s in 0..n {
        let row = &mut data[s * n..(s + 1) * n];
        seen[s] = s;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &(w, weight) in &adj[u] {
                if seen[w] != s {
                    seen[w] = s;
                    row[w] = row[u] + weight;
                    stack.push(w);
                }
            }
        }
    }
    // tree paths are unique, so the two directions agree up to summation
    // order; copy the upper triangle to make the matrix exactly symmetric
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    Ok(SimilarityMatrix { n, data })
}

/// Top two singular triplets, `sigma[0] >= sigma[1] >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd<F> {
    pub sigma: [F; 2],
    /// Left singular vectors.
    pub u: [Vec<F>; 2],
    /// Right singular vectors, each with its largest-magnitude entry
    /// positive.
    pub v: [Vec<F>; 2],
}

impl<F: Real> TruncatedSvd<F> {
    /// `U2 Σ2 V2ᵀ` entry `(i, j)`.
    pub fn reconstruct(&self, i: usize, j: usize) -> F {
        self.sigma[0] * self.u[0][i] * self.v[0][j] + self.sigma[1] * self.u[1][i] * self.v[1][j]
    }
}

/// Rank-2 truncated SVD of the symmetric matrix `d`.
///
/// For a symmetric matrix the singular values are the absolute eigenvalues,
/// the right vectors the eigenvectors and the left vectors the eigenvectors
/// times the eigenvalue sign, so a symmetric eigensolver does the work. The
/// decomposition runs in double precision.
pub fn truncated_svd_rank2<F: Real>(d: &SimilarityMatrix<F>) -> Result<TruncatedSvd<F>> {
    let n = d.n_nodes();
    if n < 2 {
        return Err(Error::Size(format!("SVD needs N >= 2, got {n}")));
    }
    let eig = SymmetricEigen::new(d.to_f64_matrix());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        lb.abs()
            .partial_cmp(&la.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(lb.partial_cmp(&la).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.cmp(&b))
    });
    let triplet = |k: usize| -> (F, Vec<F>, Vec<F>) {
        let lambda = eig.eigenvalues[k];
        let col = eig.eigenvectors.column(k);
        let mut v: Vec<f64> = col.iter().copied().collect();
        let lead = v
            .iter()
            .copied()
            .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let sign = if lambda < 0.0 { -1.0 } else { 1.0 };
        let u = v.iter().map(|&x| F::lit(sign * x)).collect();
        let v = v.into_iter().map(F::lit).collect();
        (F::lit(lambda.abs()), u, v)
    };
    let (s0, u0, v0) = triplet(idx[0]);
    let (s1, u1, v1) = triplet(idx[1]);
    Ok(TruncatedSvd {
        sigma: [s0, s1],
        u: [u0, u1],
        v: [v0, v1],
    })
}

/// Per-node angular score, the second coordinate of `√Σ Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAngularScores<F>(pub Vec<F>);

pub fn extract_raw_angular<F: Real>(svd: &TruncatedSvd<F>) -> RawAngularScores<F> {
    let scale = svd.sigma[1].max(F::zero()).sqrt();
    RawAngularScores(svd.v[1].iter().map(|&x| scale * x).collect())
}

/// Rank `k` by ascending score (ties by node id) gets `2πk/N`.
pub fn equidistant_adjust<F: Real>(scores: &RawAngularScores<F>) -> Result<Vec<F>> {
    let s = &scores.0;
    if let Some(bad) = s.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("angular score of node {bad} is not finite")));
    }
    let n = s.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap().then(a.cmp(&b)));
    let mut angles = vec![F::zero(); n];
    let gap = F::TAU() / F::count(n.max(1));
    for (k, &node) in order.iter().enumerate() {
        angles[node] = gap * F::count(k);
    }
    Ok(angles)
}

/// Equidistant ncMCE angles of a connected graph.
pub fn ncmce_angles<F: Real>(g: &Graph) -> Result<Vec<F>> {
    g.require_connected()?;
    let d = curvilinear_distance_matrix(&ra_preweight::<F>(g))?;
    let svd = truncated_svd_rank2(&d)?;
    equidistant_adjust(&extract_raw_angular(&svd))
}

/// ncMCE angles on degree-ordered radii.
pub fn ncmce_embed<F: Real>(
    g: &Graph,
    p: &EpsoParams<F>,
    kind: DegreeKind,
    tie_seed: u64,
) -> Result<Embedding<F>> {
    let angles = ncmce_angles::<F>(g)?;
    let mut emb = assign_radial_coordinates(g, p, kind, tie_seed)?;
    for (node, theta) in angles.into_iter().enumerate() {
        emb.set_theta(node, theta);
    }
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ra_weights() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        for e in ra_preweight::<f64>(&tri).edges {
            assert_eq!(e.2, 4.0);
        }
        let single = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(ra_preweight::<f64>(&single).edges[0].2, 3.0);
        // node 0: k=2, node 1: k=3, one common neighbour (2)
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3)]).unwrap();
        let w = ra_preweight::<f64>(&g);
        let e01 = w.edges.iter().find(|e| (e.0, e.1) == (0, 1)).unwrap();
        assert_eq!(e01.2, 5.5);
    }

    #[test]
    fn path_sums() {
        let wg = WeightedGraph::new(3, vec![(0, 1, 3.0), (1, 2, 5.0)]).unwrap();
        let d = curvilinear_distance_matrix(&wg).unwrap();
        assert_eq!(d.get(0, 2), 8.0);
        assert_eq!(d.get(2, 0), 8.0);
        assert_eq!(d.get(1, 1), 0.0);
        let split = WeightedGraph::new(3, vec![(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            curvilinear_distance_matrix(&split),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn rank_one_exact() {
        // s u uᵀ with s = 3 and u ∝ (1, 2, 2)
        let u = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let data: Vec<f64> = (0..9).map(|k| 3.0 * u[k / 3] * u[k % 3]).collect();
        let d = SimilarityMatrix { n: 3, data };
        let svd = truncated_svd_rank2(&d).unwrap();
        assert_relative_eq!(svd.sigma[0], 3.0, epsilon = 1e-12);
        assert!(svd.sigma[1].abs() < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(svd.reconstruct(i, j), d.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn three_node_path_matches_closed_form() {
        // D = [[0,1,3],[1,0,2],[3,2,0]]; reference from a 50-digit
        // symmetric eigensolver
        let d = SimilarityMatrix::from_row_major(
            3,
            vec![0.0, 1.0, 3.0, 1.0, 0.0, 2.0, 3.0, 2.0, 0.0],
        )
        .unwrap();
        let svd = truncated_svd_rank2(&d).unwrap();
        assert_relative_eq!(svd.sigma[0], 4.113_090_584_324_951, max_relative = 1e-12);
        assert_relative_eq!(svd.sigma[1], 3.201_911_776_678_708, max_relative = 1e-12);
        let scores = extract_raw_angular(&svd).0;
        let expected = [-1.093_019_723_107_992, -0.489_163_258_561_813_8, 1.329_638_660_707_798];
        for (s, e) in scores.iter().zip(expected) {
            assert_relative_eq!(*s, e, max_relative = 1e-10);
        }
    }

    #[test]
    fn too_small_for_svd() {
        let d = SimilarityMatrix::<f64>::from_row_major(1, vec![0.0]).unwrap();
        assert!(matches!(truncated_svd_rank2(&d), Err(Error::Size(_))));
    }

    #[test]
    fn equidistant_examples() {
        let a = equidistant_adjust(&RawAngularScores(vec![0.9, -0.3, 0.1, 2.0])).unwrap();
        let expect = [PI, 0.0, PI / 2.0, 1.5 * PI];
        for (x, e) in a.iter().zip(expect) {
            assert_relative_eq!(*x, e, epsilon = 1e-15);
        }
        assert_eq!(equidistant_adjust(&RawAngularScores(vec![5.0])).unwrap(), vec![0.0]);
        let tied = equidistant_adjust(&RawAngularScores(vec![1.0; 3])).unwrap();
        assert!(tied[0] < tied[1] && tied[1] < tied[2]);
        assert!(matches!(
            equidistant_adjust(&RawAngularScores(vec![0.0, f64::NAN])),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn zero_sigma_gives_zero_scores() {
        let svd = TruncatedSvd {
            sigma: [1.0, 0.0],
            u: [vec![1.0, 0.0], vec![0.0, 1.0]],
            v: [vec![1.0, 0.0], vec![0.5, -0.5]],
        };
        assert_eq!(extract_raw_angular(&svd).0, vec![0.0, 0.0]);
    }

    #[test]
    fn scaling_keeps_order() {
        let base = vec![0.0, 1.0, 3.0, 4.0, 1.0, 0.0, 2.0, 3.5, 3.0, 2.0, 0.0, 1.5, 4.0, 3.5, 1.5, 0.0];
        let d = SimilarityMatrix::from_row_major(4, base.clone()).unwrap();
        let d7 = SimilarityMatrix::from_row_major(4, base.iter().map(|x| 7.0 * x).collect()).unwrap();
        let s = extract_raw_angular(&truncated_svd_rank2(&d).unwrap()).0;
        let s7 = extract_raw_angular(&truncated_svd_rank2(&d7).unwrap()).0;
        for (a, b) in s.iter().zip(&s7) {
            assert_relative_eq!(*b, 7f64.sqrt() * a, max_relative = 1e-10);
        }
        assert_eq!(
            equidistant_adjust(&RawAngularScores(s)).unwrap(),
            equidistant_adjust(&RawAngularScores(s7)).unwrap()
        );
    }

    #[test]
    fn embed_is_deterministic() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let p = EpsoParams::pso(6, 1.0, 0.6, 0.3).unwrap();
        let a = ncmce_embed(&g, &p, DegreeKind::Total, 4).unwrap();
        let b = ncmce_embed(&g, &p, DegreeKind::Total, 4).unwrap();
        assert_eq!(a, b);
        let mut thetas = a.thetas();
        thetas.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in thetas.windows(2) {
            assert_relative_eq!(w[1] - w[0], PI / 3.0, epsilon = 1e-12);
        }
    }
}
