//! Report serialization.
//!
//! Reports are plain JSON written by hand so that field order, float
//! formatting and the divergence conventions are pinned: identical runs
//! must produce byte-identical files. Every float is emitted with 16
//! significant digits; infinities and values beyond the divergence cap
//! become the strings "+inf"/"-inf", NaN becomes null.

use crate::error::Error;
use crate::norms::tails::DIVERGENCE_CAP;
use crate::Result;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    /// Numeric constructor applying the report conventions for values that
    /// have no honest float rendering.
    pub fn num(v: f64) -> Json {
        if v.is_nan() {
            Json::Null
        } else if v > DIVERGENCE_CAP {
            Json::Str("+inf".into())
        } else if v < -DIVERGENCE_CAP {
            Json::Str("-inf".into())
        } else {
            Json::Num(v)
        }
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn opt_num(v: Option<f64>) -> Json {
        v.map_or(Json::Null, Json::num)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write_into(&mut out, 0);
        out.push('\n');
        out
    }

    fn write_into(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(v) => {
                let _ = write!(out, "{v:.16e}");
            }
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write_into(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, val)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    val.write_into(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Top-level report: a version tag and one entry per executed operation.
pub fn report(runs: Vec<Json>) -> Json {
    Json::Obj(vec![
        ("version".into(), Json::str("1")),
        ("runs".into(), Json::Arr(runs)),
    ])
}

pub fn write_json(path: &Path, json: &Json) -> Result<()> {
    std::fs::write(path, json.render())
        .map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Numbered sibling of the report path: first table lands at stem.csv, the
/// next at stem_2.csv, and so on.
pub fn sibling_csv_path(out: &Path, n: usize) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "report".to_string(), |s| s.to_string_lossy().into_owned());
    let name = if n <= 1 { format!("{stem}.csv") } else { format!("{stem}_{n}.csv") };
    out.with_file_name(name)
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::input(format!(
                "table row has {} fields under a {}-column header",
                row.len(),
                header.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}
