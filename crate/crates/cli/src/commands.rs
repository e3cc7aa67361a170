use std::fs;
use std::path::Path;

use hyperemb::angular::OptimizerSchedule;
use hyperemb::coords::CoordinateFile;
use hyperemb::likelihood::ParamSearch;
use hyperemb::pipeline::{self, estimate_from_ncmce, repeat_embeddings, EmbedConfig};
use hyperemb::pso::{epso_generate_with, gpso_generate, pso_generate, DeficitPolicy};
use hyperemb::quality::{fit_best_of_n, Direction};
use hyperemb::{DegreeKind, Embedding, EpsoParams, ExtremeValueFit, Graph, QualityReport};
use serde::Serialize;

use crate::{
    svg, EmbedArgs, EvaluateArgs, Failure, GenerateArgs, InputArgs, Model, ParamArgs, RenderArgs,
    RepeatArgs, ScheduleArgs,
};

type CmdResult = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("reading {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::data(format!("writing {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn load_graph(input: &InputArgs) -> Result<Graph, Failure> {
    let g = Graph::parse_edge_list(&read_text(&input.graph)?, input.directed)?;
    if input.largest_component {
        let (sub, _) = g.largest_component();
        return Ok(sub);
    }
    Ok(g)
}

fn need(value: Option<f64>, flag: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::parameter(format!("missing {flag}")))
}

fn schedule(args: &ScheduleArgs) -> Result<OptimizerSchedule, Failure> {
    let s = OptimizerSchedule {
        swap_rounds: args.swap_rounds,
        noswap_rounds: args.noswap_rounds,
        q: args.q,
        stop_rel_tol: args.stop_tol,
        track_gr: false,
    };
    s.validate()?;
    if args.angle_grid < 1 {
        return Err(Failure::parameter("--angle-grid must be >= 1"));
    }
    Ok(s)
}

/// Parameters given in full, or fitted on an ncMCE embedding starting from
/// whatever was given (`m = ⟨k⟩/2`, `β = T = 0.5` otherwise).
fn resolve_params(
    g: &Graph,
    pa: &ParamArgs,
    estimate: bool,
    kind: DegreeKind,
    tie_seed: u64,
) -> Result<EpsoParams<f64>, Failure> {
    let n = g.n_nodes();
    let half_k = g.mean_degree() / 2.0;
    if let (false, Some(m), Some(beta), Some(t)) = (estimate, pa.m, pa.beta, pa.temperature) {
        let ell = pa.ell.unwrap_or(half_k - m);
        return Ok(EpsoParams::new(pa.zeta, n, m, ell, beta, t)?);
    }
    g.require_connected()?;
    let m0 = pa.m.unwrap_or(half_k).max(1.0);
    let start = EpsoParams::new(
        pa.zeta,
        n,
        m0,
        half_k - m0,
        pa.beta.unwrap_or(0.5),
        pa.temperature.unwrap_or(0.5),
    )?;
    let mut est = estimate_from_ncmce(g, &start, kind, tie_seed, &ParamSearch::for_graph(g))?;
    if let Some(ell) = pa.ell {
        est.ell = ell;
        est.validate()?;
    }
    Ok(est)
}

fn embed_config(
    method: crate::Method,
    input: &InputArgs,
    sched: &ScheduleArgs,
    tie_seed: u64,
) -> Result<EmbedConfig, Failure> {
    Ok(EmbedConfig {
        method: method.into(),
        kind: input.degree_kind.into(),
        tie_seed,
        schedule: schedule(sched)?,
        angle_grid: sched.angle_grid,
    })
}

pub fn generate(a: &GenerateArgs) -> CmdResult {
    let pa = &a.params;
    let m = need(pa.m, "--m")?;
    let beta = need(pa.beta, "--beta")?;
    let t = need(pa.temperature, "-T")?;
    let ell = pa.ell.unwrap_or(0.0);
    let p = EpsoParams::new(pa.zeta, a.nodes, m, ell, beta, t)?;
    if a.l_minus > 0 && !matches!(a.model, Model::Gpso) {
        return Err(Failure::parameter("--l-minus is only used by the gpso model"));
    }
    let net = match a.model {
        Model::Pso => {
            if ell != 0.0 {
                return Err(Failure::parameter("--L is not used by the pso model"));
            }
            pso_generate(&p, a.seed)?
        }
        Model::Gpso => {
            if ell.fract() != 0.0 || ell < 0.0 {
                return Err(Failure::parameter(format!(
                    "gpso needs a whole number L >= 0 of net internal links per step, got L = {ell} (epso accepts negative L)"
                )));
            }
            gpso_generate(&p, ell as usize + a.l_minus, a.l_minus, a.seed)?
        }
        Model::Epso => {
            let policy = if a.clamp_deficit {
                DeficitPolicy::ClampAtZero
            } else {
                DeficitPolicy::Reject
            };
            epso_generate_with(&p, a.seed, policy)?
        }
    };
    let g = &net.graph;
    let isolated = (0..g.n_nodes()).filter(|&u| g.neighbors(u).is_empty()).count();
    if isolated > 0 {
        eprintln!("warning: {isolated} isolated nodes are not in the edge list");
    }
    let model = match a.model {
        Model::Pso => "pso",
        Model::Gpso => "gpso",
        Model::Epso => "epso",
    };
    let mut text = format!(
        "# {model} N={} m={m} L={ell} beta={beta} T={t} zeta={} seed={}\n",
        a.nodes, pa.zeta, a.seed
    );
    if a.l_minus > 0 {
        text.insert_str(text.len() - 1, &format!(" l_minus={}", a.l_minus));
    }
    text.push_str(&g.to_edge_list());
    write_or_print(a.out.as_deref(), &text)?;
    if let Some(path) = &a.truth {
        let emb = Embedding::from_coords(net.true_coords.clone(), p);
        write_text(path, &CoordinateFile::from_embedding(g, &emb).emit())?;
    }
    Ok(())
}

pub fn embed(a: &EmbedArgs) -> CmdResult {
    let g = load_graph(&a.input)?;
    g.require_connected()?;
    let cfg = embed_config(a.method, &a.input, &a.schedule, a.seed)?;
    let p = resolve_params(&g, &a.params, a.estimate_params, cfg.kind, a.seed)?;
    let out = pipeline::embed(&g, &p, &cfg)?;
    write_text(&a.out, &CoordinateFile::from_embedding(&g, &out.embedding).emit())?;
    if let Some(path) = &a.params_out {
        write_text(path, &to_json(&out.embedding.params))?;
    }
    write_or_print(a.report.as_deref(), &to_json(&out.report))
}

pub fn evaluate(a: &EvaluateArgs) -> CmdResult {
    let g = load_graph(&a.input)?;
    let file = CoordinateFile::parse(&read_text(&a.coords)?)?;
    let p = match &a.params_file {
        Some(path) => {
            let p: EpsoParams<f64> = serde_json::from_str(&read_text(path)?)
                .map_err(|e| Failure::data(format!("parsing {}: {e}", path.display())))?;
            let p = p.with_n_nodes(g.n_nodes());
            p.validate()?;
            p
        }
        None => {
            let pa = &a.params;
            let m = need(pa.m, "--m or --params")?;
            let ell = pa.ell.unwrap_or(g.mean_degree() / 2.0 - m);
            EpsoParams::new(
                pa.zeta,
                g.n_nodes(),
                m,
                ell,
                need(pa.beta, "--beta or --params")?,
                need(pa.temperature, "-T or --params")?,
            )?
        }
    };
    let emb = file.to_embedding(&g, p)?;
    let report = pipeline::evaluate(&g, &emb, &a.method, a.seed, a.rounds)?;
    write_or_print(a.report.as_deref(), &to_json(&report))
}

/// One CSV line of a repeat run; predictions are empty until the fit has
/// three points.
#[derive(Debug, Serialize)]
struct RepeatRow {
    n_s: usize,
    best_ll: f64,
    best_gr: f64,
    pred_ll: Option<f64>,
    pred_gr: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RepeatSummary<'a> {
    seed: u64,
    params: EpsoParams<f64>,
    trials: &'a [QualityReport],
    fit_ll: Option<ExtremeValueFit<f64>>,
    fit_gr: Option<ExtremeValueFit<f64>>,
}

fn fit_series(best: &[f64], direction: Direction) -> Result<Option<ExtremeValueFit<f64>>, Failure> {
    let series: Vec<(usize, f64)> = best.iter().copied().enumerate().skip(1).map(|(k, v)| (k + 1, v)).collect();
    if series.len() < 3 {
        return Ok(None);
    }
    Ok(Some(fit_best_of_n(&series, direction)?))
}

pub fn repeat(a: &RepeatArgs) -> CmdResult {
    let g = load_graph(&a.input)?;
    g.require_connected()?;
    let cfg = embed_config(a.method, &a.input, &a.schedule, a.seed)?;
    let p = resolve_params(&g, &a.params, a.estimate_params, cfg.kind, a.seed)?;
    let out = repeat_embeddings(&g, &p, &cfg, a.trials, a.seed)?;
    let fit_ll = fit_series(&out.best_ll, Direction::Min)?;
    let fit_gr = fit_series(&out.best_gr, Direction::Max)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    for (k, (&best_ll, &best_gr)) in out.best_ll.iter().zip(&out.best_gr).enumerate() {
        let n_s = k + 1;
        w.serialize(RepeatRow {
            n_s,
            best_ll,
            best_gr,
            pred_ll: fit_ll.map(|f| f.predict(n_s)),
            pred_gr: fit_gr.map(|f| f.predict(n_s)),
        })
        .map_err(|e| Failure::data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    write_or_print(a.out.as_deref(), &text)?;
    if let Some(path) = &a.reports {
        let summary = RepeatSummary {
            seed: a.seed,
            params: p,
            trials: &out.reports,
            fit_ll,
            fit_gr,
        };
        write_text(path, &to_json(&summary))?;
    }
    Ok(())
}

pub fn render(a: &RenderArgs) -> CmdResult {
    if !(a.radius.is_finite() && a.radius > 0.0) {
        return Err(Failure::parameter(format!("--radius must be > 0, got {}", a.radius)));
    }
    let file = CoordinateFile::parse(&read_text(&a.coords)?)?;
    let index: std::collections::HashMap<&str, usize> = file
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| (r.label.as_str(), k))
        .collect();
    if index.len() != file.records.len() {
        return Err(Failure::data("coordinate file lists a node twice"));
    }
    let mut edges = Vec::new();
    if let Some(path) = &a.graph {
        let g = Graph::parse_edge_list(&read_text(path)?, a.directed)?;
        let mut skipped = 0;
        for &(u, v) in g.edges() {
            match (index.get(g.label(u)), index.get(g.label(v))) {
                (Some(&x), Some(&y)) => edges.push((x, y)),
                _ => skipped += 1,
            }
        }
        if skipped > 0 {
            eprintln!("warning: {skipped} edges touch nodes without coordinates and are not drawn");
        }
    }
    write_text(&a.out, &svg::render(&file, &edges, a.radius))
}
