//! Shared argument types, the report envelope, and output handling.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use pagesim::engine::Algorithm;
use pagesim::graph::{AccessGraph, GraphClass, GraphJson};

/// Process exit codes: 0 ok, 1 usage, 2 validation failure, 3 budget refusal.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: msg.into(),
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// `class:N` (e.g. `path:4`) or a JSON graph file.
#[derive(Debug, Clone)]
pub enum GraphArg {
    Classed(GraphClass, u32),
    File(PathBuf),
}

impl GraphArg {
    pub fn resolve(&self) -> Result<AccessGraph, CliError> {
        match self {
            GraphArg::Classed(class, n) => {
                AccessGraph::new(*class, *n).map_err(|e| CliError::usage(format!("bad graph: {e}")))
            }
            GraphArg::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                let json: GraphJson = serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("bad graph file: {e}")))?;
                AccessGraph::try_from(json)
                    .map_err(|e| CliError::usage(format!("bad graph file: {e}")))
            }
        }
    }
}

impl FromStr for GraphArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (class, n) = s
            .split_once(':')
            .ok_or_else(|| format!("expected class:N, got `{s}`"))?;
        let class: GraphClass = class
            .parse()
            .map_err(|_| format!("unknown graph class `{class}`"))?;
        let n: u32 = n.parse().map_err(|_| format!("bad vertex count `{n}`"))?;
        Ok(GraphArg::Classed(class, n))
    }
}

pub fn graph_label(g: &AccessGraph) -> String {
    format!("{}:{}", g.class(), g.n_vertices())
}

/// One algorithm name (any case).
pub fn parse_alg(s: &str) -> Result<Algorithm, String> {
    s.trim().parse::<Algorithm>().map_err(|e| e.to_string())
}

/// `A,B` ordered algorithm pair.
pub fn parse_pair(s: &str) -> Result<(Algorithm, Algorithm), String> {
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((parse_alg(a)?, parse_alg(b)?)),
        _ => Err(format!("expected exactly two algorithms, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

/// Where and how a command's report goes. Text and CSV emit the payload
/// alone; JSON wraps it in a metadata envelope (whose timestamp is the one
/// nondeterministic field).
pub struct Output {
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    timestamp_unix: u64,
    config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Envelope<'a, P: Serialize> {
    meta: Meta,
    payload: &'a P,
}

impl Output {
    pub fn new(json: bool, csv: bool, out: Option<PathBuf>) -> Self {
        let format = if json {
            OutputFormat::Json
        } else if csv {
            OutputFormat::Csv
        } else {
            OutputFormat::Text
        };
        Output { format, out }
    }

    pub fn emit(&self, text: String) -> Result<(), CliError> {
        match &self.out {
            None => {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
                Ok(())
            }
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        }
    }

    /// Serializes the payload inside the report envelope.
    pub fn emit_json<P: Serialize>(
        &self,
        config: serde_json::Value,
        seed: Option<u64>,
        payload: &P,
    ) -> Result<(), CliError> {
        let envelope = Envelope {
            meta: Meta {
                tool: "pagesim",
                version: env!("CARGO_PKG_VERSION"),
                timestamp_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                config,
                seed,
            },
            payload,
        };
        let text = serde_json::to_string_pretty(&envelope).expect("payload serializes");
        self.emit(text)
    }
}

/// Column-aligned plain-text table.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String], widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:<width$}", cell, width = widths[i]));
        }
        line.trim_end().to_string()
    };
    let header_cells: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    out.push_str(&fmt_row(&header_cells, &widths));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row, &widths));
        out.push('\n');
    }
    out
}
