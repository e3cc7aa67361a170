//! End-to-end embedding runs: method dispatch, quality reports, the
//! estimate-then-embed protocol and repeated runs over tie permutations.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angular::{optimize, OptimizationTrace, OptimizerSchedule};
use crate::error::{Error, Result};
use crate::graph::{DegreeKind, Graph};
use crate::hypermap::{hypermap_embed, DEFAULT_ANGLE_GRID};
use crate::likelihood::{estimate_parameters, logarithmic_loss, Embedding, ParamSearch};
use crate::ncmce::ncmce_embed;
use crate::params::EpsoParams;
use crate::quality::{cumulative_best, greedy_routing_score, Direction, QualityReport};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmbedMethod {
    #[serde(rename = "ncmce")]
    Ncmce,
    #[serde(rename = "ncmce-opt")]
    NcmceOpt,
    #[serde(rename = "hypermap")]
    Hypermap,
}

impl EmbedMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedMethod::Ncmce => "ncmce",
            EmbedMethod::NcmceOpt => "ncmce-opt",
            EmbedMethod::Hypermap => "hypermap",
        }
    }
}

impl fmt::Display for EmbedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ncmce" => Ok(EmbedMethod::Ncmce),
            "ncmce-opt" => Ok(EmbedMethod::NcmceOpt),
            "hypermap" => Ok(EmbedMethod::Hypermap),
            other => Err(Error::Parameter(format!(
                "unknown method `{other}` (expected ncmce, ncmce-opt or hypermap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedConfig {
    pub method: EmbedMethod,
    pub kind: DegreeKind,
    pub tie_seed: u64,
    /// Used by `ncmce-opt` only.
    pub schedule: OptimizerSchedule,
    /// Used by `hypermap` only.
    pub angle_grid: usize,
}

impl EmbedConfig {
    pub fn new(method: EmbedMethod, tie_seed: u64) -> Self {
        Self {
            method,
            kind: DegreeKind::Total,
            tie_seed,
            schedule: OptimizerSchedule::default(),
            angle_grid: DEFAULT_ANGLE_GRID,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome<F> {
    pub embedding: Embedding<F>,
    pub trace: Option<OptimizationTrace>,
    pub report: QualityReport,
}

/// Embeds `g` with `cfg.method` and scores the result.
pub fn embed<F: Real>(g: &Graph, p: &EpsoParams<F>, cfg: &EmbedConfig) -> Result<EmbedOutcome<F>> {
    g.require_connected()?;
    let p = p.with_n_nodes(g.n_nodes());
    let (embedding, trace) = match cfg.method {
        EmbedMethod::Ncmce => (ncmce_embed(g, &p, cfg.kind, cfg.tie_seed)?, None),
        EmbedMethod::NcmceOpt => {
            let start = ncmce_embed(g, &p, cfg.kind, cfg.tie_seed)?;
            let (emb, trace) = optimize(g, &start, &cfg.schedule)?;
            (emb, Some(trace))
        }
        EmbedMethod::Hypermap => (
            hypermap_embed(g, &p, cfg.kind, cfg.tie_seed, cfg.angle_grid)?,
            None,
        ),
    };
    let rounds = trace.as_ref().map_or(0, |t| t.rounds.len());
    let report = evaluate(g, &embedding, cfg.method.as_str(), cfg.tie_seed, rounds)?;
    Ok(EmbedOutcome {
        embedding,
        trace,
        report,
    })
}

/// Log-loss and greedy routing of an embedding, with run metadata.
pub fn evaluate<F: Real>(
    g: &Graph,
    emb: &Embedding<F>,
    method: &str,
    seed: u64,
    rounds: usize,
) -> Result<QualityReport> {
    let logloss = logarithmic_loss(g, emb)?.total.to_f64_lossy();
    let gr = greedy_routing_score(g, emb)?;
    Ok(QualityReport {
        method: method.to_string(),
        seed,
        rounds,
        logloss,
        gr_score: gr.gr_score,
        success_ratio: gr.success_ratio,
    })
}

/// Fits `(m, β, T)` on a plain ncMCE embedding built with `start`'s
/// parameters, starting the search from `start`.
pub fn estimate_from_ncmce<F: Real>(
    g: &Graph,
    start: &EpsoParams<F>,
    kind: DegreeKind,
    tie_seed: u64,
    search: &ParamSearch<F>,
) -> Result<EpsoParams<F>> {
    let p = start.with_n_nodes(g.n_nodes());
    let emb = ncmce_embed(g, &p, kind, tie_seed)?;
    estimate_parameters(g, &emb, (p.m, p.beta, p.temperature), search)
}

/// Per-trial reports and running bests of repeated embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatOutcome {
    pub reports: Vec<QualityReport>,
    pub best_ll: Vec<f64>,
    pub best_gr: Vec<f64>,
}

/// Tie seed of every trial of a repeat run.
pub fn trial_seeds(seed: u64, n_s: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_s).map(|_| rng.next_u64()).collect()
}

/// `n_s` embeddings that differ only in the tie permutation of the radial
/// order; each report carries its own tie seed.
pub fn repeat_embeddings<F: Real>(
    g: &Graph,
    p: &EpsoParams<F>,
    cfg: &EmbedConfig,
    n_s: usize,
    seed: u64,
) -> Result<RepeatOutcome> {
    if n_s < 1 {
        return Err(Error::Parameter("number of trials must be >= 1".into()));
    }
    let reports = trial_seeds(seed, n_s)
        .into_iter()
        .map(|tie_seed| {
            let trial = EmbedConfig { tie_seed, ..*cfg };
            embed(g, p, &trial).map(|o| o.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let ll: Vec<f64> = reports.iter().map(|r| r.logloss).collect();
    let gr: Vec<f64> = reports.iter().map(|r| r.gr_score).collect();
    Ok(RepeatOutcome {
        best_ll: cumulative_best(&ll, Direction::Min),
        best_gr: cumulative_best(&gr, Direction::Max),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Graph {
        Graph::from_edges(
            7,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (0, 3), (1, 5)],
        )
        .unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for m in [EmbedMethod::Ncmce, EmbedMethod::NcmceOpt, EmbedMethod::Hypermap] {
            assert_eq!(m.as_str().parse::<EmbedMethod>().unwrap(), m);
        }
        assert!("mercator".parse::<EmbedMethod>().is_err());
    }

    #[test]
    fn optimised_is_no_worse() {
        let g = small();
        let p = EpsoParams::pso(7, 1.5, 0.6, 0.3).unwrap();
        let plain = embed(&g, &p, &EmbedConfig::new(EmbedMethod::Ncmce, 1)).unwrap();
        let opt = embed(&g, &p, &EmbedConfig::new(EmbedMethod::NcmceOpt, 1)).unwrap();
        assert!(opt.report.logloss <= plain.report.logloss);
        assert_eq!(opt.report.rounds, 8);
        assert!(opt.report.gr_score <= opt.report.success_ratio);
    }

    #[test]
    fn repeat_bests_are_monotone() {
        let g = small();
        let p = EpsoParams::pso(7, 1.5, 0.6, 0.3).unwrap();
        let out = repeat_embeddings(&g, &p, &EmbedConfig::new(EmbedMethod::Ncmce, 0), 4, 11).unwrap();
        assert_eq!(out.reports.len(), 4);
        for w in out.best_ll.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in out.best_gr.windows(2) {
            assert!(w[1] >= w[0]);
        }
        let one = repeat_embeddings(&g, &p, &EmbedConfig::new(EmbedMethod::Ncmce, 0), 1, 11).unwrap();
        assert_eq!(one.reports[0], out.reports[0]);
    }
}
