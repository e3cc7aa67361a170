//! Plain-text coordinate files.
//!
//! ```text
//! # id r theta
//! a 1.2000000000000000e0 3.1415926535897931e0
//! b 4.0000000000000000e0 0.0000000000000000e0 #ff0000
//! ```
//!
//! One line per node: label, radius, angle and an optional colour token.
//! Numbers are written with 17 significant digits, enough for an exact
//! round trip of `f64`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperbolic::PolarCoord;
use crate::likelihood::Embedding;
use crate::params::EpsoParams;
use crate::scalar::Real;

pub const HEADER: &str = "# id r theta";

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateRecord {
    pub label: String,
    pub r: f64,
    pub theta: f64,
    pub color: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoordinateFile {
    pub records: Vec<CoordinateRecord>,
}

impl CoordinateFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if !(3..=4).contains(&tokens.len()) {
                return Err(bad(format!(
                    "expected `id r theta [color]`, found {} fields",
                    tokens.len()
                )));
            }
            let number = |tok: &str, what: &str| -> Result<f64> {
                match tok.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(bad(format!("{what} `{tok}` is not a finite number"))),
                }
            };
            let r = number(tokens[1], "radius")?;
            if r < 0.0 {
                return Err(bad(format!("radius {r} is negative")));
            }
            records.push(CoordinateRecord {
                label: tokens[0].to_string(),
                r,
                theta: number(tokens[2], "angle")?,
                color: tokens.get(3).map(|c| c.to_string()),
            });
        }
        Ok(Self { records })
    }

    pub fn emit(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for rec in &self.records {
            write!(out, "{} {:.16e} {:.16e}", rec.label, rec.r, rec.theta).unwrap();
            if let Some(c) = &rec.color {
                write!(out, " {c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Records in node id order, labelled from the graph.
    pub fn from_embedding<F: Real>(g: &Graph, emb: &Embedding<F>) -> Self {
        let records = emb
            .coords
            .iter()
            .enumerate()
            .map(|(u, c)| CoordinateRecord {
                label: g.label(u).to_string(),
                r: c.r.to_f64_lossy(),
                theta: c.theta.to_f64_lossy(),
                color: None,
            })
            .collect();
        Self { records }
    }

    /// Coordinates for every node of `g`, matched by label.
    pub fn to_embedding<F: Real>(&self, g: &Graph, params: EpsoParams<F>) -> Result<Embedding<F>> {
        let by_label = self.label_index()?;
        let mut coords = Vec::with_capacity(g.n_nodes());
        for u in 0..g.n_nodes() {
            let rec = by_label
                .get(g.label(u))
                .map(|&k| &self.records[k])
                .ok_or_else(|| Error::Data(format!("no coordinates for node `{}`", g.label(u))))?;
            coords.push(PolarCoord::new(F::lit(rec.r), F::lit(rec.theta)));
        }
        Ok(Embedding::from_coords(coords, params.with_n_nodes(g.n_nodes())))
    }

    /// Colour token per graph node, if the file has one.
    pub fn colors_for(&self, g: &Graph) -> Result<Vec<Option<String>>> {
        let by_label = self.label_index()?;
        Ok((0..g.n_nodes())
            .map(|u| {
                by_label
                    .get(g.label(u))
                    .and_then(|&k| self.records[k].color.clone())
            })
            .collect())
    }

    fn label_index(&self) -> Result<HashMap<&str, usize>> {
        let mut by_label = HashMap::new();
        for (k, rec) in self.records.iter().enumerate() {
            if by_label.insert(rec.label.as_str(), k).is_some() {
                return Err(Error::Data(format!("node `{}` listed twice", rec.label)));
            }
        }
        Ok(by_label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let file = CoordinateFile {
            records: vec![
                CoordinateRecord {
                    label: "a".into(),
                    r: 0.1 + 0.2,
                    theta: std::f64::consts::PI,
                    color: None,
                },
                CoordinateRecord {
                    label: "b".into(),
                    r: 1e-300,
                    theta: 6.283_185_307_179_585,
                    color: Some("#00ff00".into()),
                },
            ],
        };
        let text = file.emit();
        assert!(text.starts_with(HEADER));
        assert_eq!(CoordinateFile::parse(&text).unwrap(), file);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = CoordinateFile::parse("# id r theta\na 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(CoordinateFile::parse("a x 1.0").is_err());
        assert!(CoordinateFile::parse("a -1 1.0").is_err());
    }

    #[test]
    fn missing_node_is_named() {
        let g = Graph::parse_edge_list("a b\nb c\n", false).unwrap();
        let file = CoordinateFile::parse("a 1 0\nb 1 1\n").unwrap();
        let p = EpsoParams::pso(3, 1.0, 0.5, 0.1).unwrap();
        let err = file.to_embedding(&g, p).unwrap_err();
        assert!(err.to_string().contains("`c`"));
    }
}
