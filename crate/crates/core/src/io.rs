//! Sample CSVs, graph files, decomposition files, and scenario JSON.
//!
//! The CSV column contract: `id,h,f` required, then optional coordinate
//! columns `x1..xd`, optional `mu` (defaults to 1), optional membership `m`,
//! optional `end` label. Graph files list `u v` edge lines, then a
//! `# levels` line, then `id m` lines. Scenario files bundle a domain, the
//! expressions to evaluate on it, and an operation list, so any CLI run can
//! be checked in and replayed.

use crate::error::Error;
use crate::expr::Expr;
use crate::multiend::{End, EndDecomposition};
use crate::space::{ExhaustedSpace, Graph};
use crate::weights::Weight;
use crate::Result;
use serde::Deserialize;
use std::path::Path;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source: e }
}

fn csv_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Csv { path: path.display().to_string(), msg: msg.into() }
}

#[derive(Debug, Clone)]
pub struct LoadedSample {
    pub space: ExhaustedSpace,
    pub f: Vec<f64>,
    /// `end` column when present; empty string means core.
    pub end_labels: Option<Vec<String>>,
}

pub fn load_sample_csv(path: &Path) -> Result<LoadedSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|hd| hd == name);
    let id_col = col("id").ok_or_else(|| csv_err(path, "missing required column `id`"))?;
    let h_col = col("h").ok_or_else(|| csv_err(path, "missing required column `h`"))?;
    let f_col = col("f").ok_or_else(|| csv_err(path, "missing required column `f`"))?;
    let mu_col = col("mu");
    let m_col = col("m");
    let end_col = col("end");
    // coordinate columns x1..xd, required consecutive from 1
    let mut coord_cols: Vec<(usize, usize)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, hd)| {
            hd.strip_prefix('x').and_then(|rest| rest.parse::<usize>().ok()).map(|k| (k, i))
        })
        .collect();
    coord_cols.sort();
    for (want, (k, _)) in coord_cols.iter().enumerate() {
        if *k != want + 1 {
            return Err(csv_err(path, format!("coordinate columns must be x1..xd, found x{k}")));
        }
    }
    let mut ids = Vec::new();
    let mut h = Vec::new();
    let mut f = Vec::new();
    let mut mu = Vec::new();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut membership = Vec::new();
    let mut end_labels = Vec::new();
    for (row_ix, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e.to_string()))?;
        let cell = |c: usize| -> Result<&str> {
            record.get(c).ok_or_else(|| {
                csv_err(path, format!("row {}: missing field {}", row_ix + 2, headers.get(c).unwrap_or("?")))
            })
        };
        let num = |c: usize| -> Result<f64> {
            let raw = cell(c)?;
            raw.parse::<f64>().map_err(|_| {
                csv_err(
                    path,
                    format!(
                        "row {}, column `{}`: expected a number, got {raw:?}",
                        row_ix + 2,
                        headers.get(c).unwrap_or("?")
                    ),
                )
            })
        };
        ids.push(cell(id_col)?.to_string());
        h.push(num(h_col)?);
        f.push(num(f_col)?);
        if let Some(c) = mu_col {
            mu.push(num(c)?);
        }
        if !coord_cols.is_empty() {
            let mut point = Vec::with_capacity(coord_cols.len());
            for (_, c) in &coord_cols {
                point.push(num(*c)?);
            }
            coords.push(point);
        }
        if let Some(c) = m_col {
            let raw = cell(c)?;
            let m: u32 = raw.parse().map_err(|_| {
                csv_err(
                    path,
                    format!("row {}, column `m`: expected a level index, got {raw:?}", row_ix + 2),
                )
            })?;
            membership.push(m);
        }
        if let Some(c) = end_col {
            end_labels.push(cell(c)?.to_string());
        }
    }
    let n = ids.len();
    let space = ExhaustedSpace::new(
        ids,
        h,
        if mu_col.is_some() { mu } else { vec![1.0; n] },
        if coord_cols.is_empty() { None } else { Some(coords) },
        if m_col.is_some() { Some(membership) } else { None },
    )?;
    space.check_sample(&f)?;
    Ok(LoadedSample {
        space,
        f,
        end_labels: if end_col.is_some() { Some(end_labels) } else { None },
    })
}

/// Writes a sample back out; floats use the shortest representation that
/// reparses to the same bits, so load-then-dump is lossless.
pub fn dump_sample_csv(path: &Path, space: &ExhaustedSpace, f: &[f64]) -> Result<()> {
    space.check_sample(f)?;
    let mut out = String::new();
    out.push_str("id,h,f");
    let dim = space.coords.as_ref().map_or(0, |c| c[0].len());
    for k in 1..=dim {
        out.push_str(&format!(",x{k}"));
    }
    out.push_str(",mu");
    if space.membership.is_some() {
        out.push_str(",m");
    }
    out.push('\n');
    for i in 0..space.len() {
        out.push_str(&format!("{},{},{}", space.ids[i], space.h[i], f[i]));
        if let Some(coords) = &space.coords {
            for v in &coords[i] {
                out.push_str(&format!(",{v}"));
            }
        }
        out.push_str(&format!(",{}", space.mu[i]));
        if let Some(m) = &space.membership {
            out.push_str(&format!(",{}", m[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Graph file: `u v` edge lines, then `# levels`, then `id m` lines.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut edge_lines: Vec<(String, String)> = Vec::new();
    let mut node_ids: Vec<String> = Vec::new();
    let mut levels: Vec<u32> = Vec::new();
    let mut in_levels = false;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line[1..].trim() == "levels" {
                in_levels = true;
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let a = parts.next();
        let b = parts.next();
        let (a, b) = match (a, b, parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(csv_err(path, format!("line {}: expected two tokens", ln + 1)));
            }
        };
        if in_levels {
            let m: u32 = b.parse().map_err(|_| {
                csv_err(path, format!("line {}: level for {a:?} is not an integer: {b:?}", ln + 1))
            })?;
            node_ids.push(a.to_string());
            levels.push(m);
        } else {
            edge_lines.push((a.to_string(), b.to_string()));
        }
    }
    if !in_levels {
        return Err(csv_err(path, "no `# levels` section"));
    }
    let index = |id: &str| -> Result<usize> {
        node_ids
            .iter()
            .position(|n| n == id)
            .ok_or_else(|| csv_err(path, format!("edge references unknown node {id:?}")))
    };
    let mut edges = Vec::with_capacity(edge_lines.len());
    for (a, b) in &edge_lines {
        edges.push((index(a)?, index(b)?));
    }
    Graph::new(node_ids, edges, levels)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecFile {
    core: Vec<String>,
    ends: Vec<DecEnd>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecEnd {
    label: String,
    ids: Vec<String>,
    h: Vec<f64>,
    weight: String,
}

pub fn load_decomposition(path: &Path) -> Result<EndDecomposition> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: DecFile = serde_json::from_str(&text)
        .map_err(|e| Error::Json { path: path.display().to_string(), msg: e.to_string() })?;
    let mut ends = Vec::with_capacity(file.ends.len());
    for end in file.ends {
        ends.push(End {
            label: end.label,
            ids: end.ids,
            h: end.h,
            weight: Weight::parse_spec(&end.weight)?,
        });
    }
    Ok(EndDecomposition { core_ids: file.core, ends })
}

/// Builds a decomposition from a CSV `end` column: empty labels (or "core")
/// form the core, every other label an end with the global h restricted to
/// it and a shared weight.
pub fn decomposition_from_labels(
    space: &ExhaustedSpace,
    labels: &[String],
    weight: &Weight,
) -> Result<EndDecomposition> {
    if labels.len() != space.len() {
        return Err(Error::input("end-label column length disagrees with the sample"));
    }
    let mut core_ids = Vec::new();
    let mut ends: Vec<End> = Vec::new();
    for i in 0..space.len() {
        let label = labels[i].as_str();
        if label.is_empty() || label == "core" {
            core_ids.push(space.ids[i].clone());
            continue;
        }
        let end = match ends.iter_mut().find(|e| e.label == label) {
            Some(e) => e,
            None => {
                ends.push(End {
                    label: label.to_string(),
                    ids: Vec::new(),
                    h: Vec::new(),
                    weight: weight.clone(),
                });
                ends.last_mut().unwrap()
            }
        };
        end.ids.push(space.ids[i].clone());
        end.h.push(space.h[i]);
    }
    if ends.is_empty() {
        return Err(Error::input("end column names no ends"));
    }
    Ok(EndDecomposition { core_ids, ends })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Grid {
        from: f64,
        to: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
    Csv(String),
    Graph(String),
    /// Log-spaced magnitudes on both sides of 0: x = ±|x|, |x| from min_abs
    /// to max_abs, count_per_side points each side.
    TwoSidedLog {
        min_abs: f64,
        max_abs: f64,
        count_per_side: usize,
    },
}

/// A number fixes the centering constant; the string "sharp" asks for the
/// minimax center.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CenterSpec {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineEnd {
    pub label: String,
    /// Point belongs to the end iff this expression of x is > 0.
    pub member_expr: String,
    pub h_expr: String,
    pub weight: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OpSpec {
    Norm {
        #[serde(default)]
        certify: bool,
        #[serde(default)]
        tails: bool,
    },
    Rate {
        scale: String,
        #[serde(default)]
        tol: Option<f64>,
    },
    Tails {
        ladder: Vec<f64>,
    },
    Ends {
        window: u32,
    },
    Aniso {},
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub domain: DomainSpec,
    #[serde(default)]
    pub f_expr: Option<String>,
    #[serde(default)]
    pub h_expr: Option<String>,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default, rename = "L")]
    pub l: Option<CenterSpec>,
    /// Path to a decomposition file.
    #[serde(default)]
    pub dec: Option<String>,
    /// Inline end definitions over the synthesized grid.
    #[serde(default)]
    pub ends: Option<Vec<InlineEnd>>,
    pub ops: Vec<OpSpec>,
    pub out: String,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Json { path: path.display().to_string(), msg: e.to_string() })
}

/// A realized scenario: either a sample with optional decomposition, or a
/// level graph for ends detection.
pub enum Realized {
    Sample {
        space: ExhaustedSpace,
        f: Vec<f64>,
        /// Underlying grid coordinates when the domain was synthesized.
        xs: Option<Vec<f64>>,
        dec: Option<EndDecomposition>,
    },
    Graph(Graph),
}

fn lingrid(from: f64, to: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(from < to) {
        return Err(Error::input(format!(
            "grid needs from < to and count >= 2, got {from}:{to}:{count}"
        )));
    }
    Ok((0..count).map(|i| from + (to - from) * i as f64 / (count - 1) as f64).collect())
}

fn loggrid(from: f64, to: f64, count: usize) -> Result<Vec<f64>> {
    if from <= 0.0 {
        return Err(Error::input(format!("log spacing needs from > 0, got {from}")));
    }
    if count < 2 || !(from < to) {
        return Err(Error::input(format!(
            "grid needs from < to and count >= 2, got {from}:{to}:{count}"
        )));
    }
    let ratio = to / from;
    Ok((0..count).map(|i| from * ratio.powf(i as f64 / (count - 1) as f64)).collect())
}

/// Cell measures for a sorted 1-D grid: half the gap to each neighbor,
/// one-sided at the boundary.
fn half_gap_measure(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { (xs[i] - xs[i - 1]) / 2.0 } else { 0.0 };
            let right = if i + 1 < n { (xs[i + 1] - xs[i]) / 2.0 } else { 0.0 };
            if i == 0 {
                right
            } else if i + 1 == n {
                left
            } else {
                left + right
            }
        })
        .collect()
}

fn eval_on(expr_src: &str, xs: &[f64]) -> Result<Vec<f64>> {
    let expr = Expr::parse(expr_src, &["x"])?;
    xs.iter().map(|x| expr.eval(&[*x])).collect()
}

fn synthesize(xs: Vec<f64>, mu: Vec<f64>, sc: &Scenario) -> Result<Realized> {
    let f_src = sc
        .f_expr
        .as_deref()
        .ok_or_else(|| Error::input("synthesized domains need f_expr"))?;
    let f = eval_on(f_src, &xs)?;
    let h = eval_on(sc.h_expr.as_deref().unwrap_or("x"), &xs)?;
    let ids: Vec<String> = (0..xs.len()).map(|i| i.to_string()).collect();
    let coords: Vec<Vec<f64>> = xs.iter().map(|x| vec![*x]).collect();
    let space = ExhaustedSpace::new(ids.clone(), h, mu, Some(coords), None)?;
    let dec = match (&sc.dec, &sc.ends) {
        (Some(_), Some(_)) => {
            return Err(Error::input("give either a decomposition path or inline ends, not both"))
        }
        (Some(path), None) => Some(load_decomposition(Path::new(path))?),
        (None, Some(inline)) => {
            let mut ends = Vec::with_capacity(inline.len());
            for spec in inline {
                let member = eval_on(&spec.member_expr, &xs)?;
                let mut ids_in = Vec::new();
                let mut xs_in = Vec::new();
                for (i, m) in member.iter().enumerate() {
                    if *m > 0.0 {
                        ids_in.push(ids[i].clone());
                        xs_in.push(xs[i]);
                    }
                }
                let h_in = eval_on(&spec.h_expr, &xs_in)?;
                ends.push(End {
                    label: spec.label.clone(),
                    ids: ids_in,
                    h: h_in,
                    weight: Weight::parse_spec(&spec.weight)?,
                });
            }
            let mut in_end = vec![false; xs.len()];
            for end in &ends {
                for id in &end.ids {
                    in_end[id.parse::<usize>().unwrap()] = true;
                }
            }
            let core_ids: Vec<String> =
                ids.iter().zip(&in_end).filter(|(_, b)| !**b).map(|(id, _)| id.clone()).collect();
            Some(EndDecomposition { core_ids, ends })
        }
        (None, None) => None,
    };
    Ok(Realized::Sample { space, f, xs: Some(xs), dec })
}

/// Loads the data a scenario describes. Relative file references resolve
/// against `base_dir` (normally the scenario file's directory).
pub fn realize_scenario(sc: &Scenario, base_dir: &Path) -> Result<Realized> {
    let resolve = |p: &str| -> std::path::PathBuf {
        let pb = Path::new(p);
        if pb.is_absolute() {
            pb.to_path_buf()
        } else {
            base_dir.join(pb)
        }
    };
    match &sc.domain {
        DomainSpec::Grid { from, to, count, spacing } => {
            let xs = match spacing {
                Spacing::Linear => lingrid(*from, *to, *count)?,
                Spacing::Log => loggrid(*from, *to, *count)?,
            };
            let mu = match spacing {
                Spacing::Linear => vec![(to - from) / (*count as f64 - 1.0); *count],
                Spacing::Log => half_gap_measure(&xs),
            };
            synthesize(xs, mu, sc)
        }
        DomainSpec::TwoSidedLog { min_abs, max_abs, count_per_side } => {
            let side = loggrid(*min_abs, *max_abs, *count_per_side)?;
            let mu_side = half_gap_measure(&side);
            let mut xs: Vec<f64> = side.iter().rev().map(|x| -x).collect();
            xs.extend(side.iter());
            let mut mu: Vec<f64> = mu_side.iter().rev().cloned().collect();
            mu.extend(mu_side.iter());
            synthesize(xs, mu, sc)
        }
        DomainSpec::Csv(path) => {
            if sc.f_expr.is_some() || sc.h_expr.is_some() {
                return Err(Error::input(
                    "CSV domains carry their own f and h columns; drop f_expr/h_expr",
                ));
            }
            let loaded = load_sample_csv(&resolve(path))?;
            let dec = match (&sc.dec, &loaded.end_labels) {
                (Some(p), _) => Some(load_decomposition(&resolve(p))?),
                (None, Some(labels)) => {
                    let w = match &sc.weight {
                        Some(spec) => Weight::parse_spec(spec)?,
                        None => Weight::polynomial(1.0)?,
                    };
                    Some(decomposition_from_labels(&loaded.space, labels, &w)?)
                }
                (None, None) => None,
            };
            Ok(Realized::Sample { space: loaded.space, f: loaded.f, xs: None, dec })
        }
        DomainSpec::Graph(path) => Ok(Realized::Graph(load_graph(&resolve(path))?)),
    }
}
