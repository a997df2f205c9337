//! File formats and report emission.
//!
//! * Edge list: one edge per line, two tokens separated by whitespace and/or
//!   a comma; blank lines and lines starting with `#` are skipped.
//! * Vertex list: one label per line (declares isolated vertices).
//! * Outcomes: CSV with a header, columns `node_label,value`.
//! * Types: CSV with a header, columns `node_label,type_label`.
//!
//! Reports are written as versioned JSON or as a header plus one CSV row.
//! Floats use the shortest representation that parses back to the same bits.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dgp::TrueGc;
use crate::error::{Error, Result};
use crate::estimator::{ConcordanceEstimate, OutcomeVector};
use crate::graph::{build_graph, DegreeStats, Graph};
use crate::homophily::HomophilyEstimate;
use crate::permutation::{InferenceResult, OneSidedTest};
use crate::sim::{GraphSpec, SimulationReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Labels listed in an alignment error.
const MAX_REPORTED_LABELS: usize = 10;

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_edge_list(text: &str, source: &str) -> Result<Vec<(String, String)>> {
    data_lines(text)
        .map(|(line, l)| {
            let tokens: Vec<&str> = l
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            match tokens.as_slice() {
                [a, b] => Ok(((*a).to_owned(), (*b).to_owned())),
                _ => Err(Error::Parse {
                    path: source.to_owned(),
                    line,
                    message: format!("expected two vertex labels, found {}", tokens.len()),
                }),
            }
        })
        .collect()
}

pub fn parse_vertex_list(text: &str) -> Vec<String> {
    data_lines(text).map(|(_, l)| l.to_owned()).collect()
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(String, String)>> {
    parse_edge_list(&fs::read_to_string(path)?, &display(path))
}

pub fn read_vertex_list(path: &Path) -> Result<Vec<String>> {
    Ok(parse_vertex_list(&fs::read_to_string(path)?))
}

pub fn load_graph(edges: &Path, vertices: Option<&Path>) -> Result<Graph> {
    let pairs = read_edge_list(edges)?;
    let declared = vertices.map(read_vertex_list).transpose()?;
    let g = build_graph(&pairs, declared.as_deref())?;
    if g.duplicates_collapsed() > 0 {
        log::info!(
            "{}: collapsed {} duplicate or reversed edge(s)",
            display(edges),
            g.duplicates_collapsed()
        );
    }
    Ok(g)
}

/// Read a two-column labelled CSV and align its rows to graph vertices.
fn read_labelled_column<T>(
    text: &str,
    source: &str,
    g: &Graph,
    parse: impl Fn(&str) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut slots: Vec<Option<T>> = (0..g.n()).map(|_| None).collect();
    let mut unmatched = Vec::new();
    let mut unmatched_count = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: source.to_owned(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let parse_err = |message: String| Error::Parse {
            path: source.to_owned(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(parse_err(format!("expected 2 columns, found {}", record.len())));
        }
        let label = &record[0];
        let value = parse(&record[1]).map_err(parse_err)?;
        match g.id_of(label) {
            Some(id) if slots[id].is_some() => {
                return Err(parse_err(format!("duplicate row for vertex {label:?}")));
            }
            Some(id) => slots[id] = Some(value),
            None => {
                unmatched_count += 1;
                if unmatched.len() < MAX_REPORTED_LABELS {
                    unmatched.push(label.to_owned());
                }
            }
        }
    }
    if unmatched_count > 0 {
        return Err(Error::Alignment {
            count: unmatched_count,
            labels: unmatched,
        });
    }
    let missing: Vec<usize> = (0..g.n()).filter(|&i| slots[i].is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::Alignment {
            count: missing.len(),
            labels: missing
                .iter()
                .take(MAX_REPORTED_LABELS)
                .map(|&i| format!("{} (no value)", g.label(i)))
                .collect(),
        });
    }
    Ok(slots.into_iter().flatten().collect())
}

pub fn parse_outcomes(text: &str, source: &str, g: &Graph) -> Result<OutcomeVector> {
    let values = read_labelled_column(text, source, g, |s| {
        let v: f64 = s.parse().map_err(|_| format!("invalid number {s:?}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value {s:?}"))
        }
    })?;
    OutcomeVector::new(values)
}

pub fn parse_types(text: &str, source: &str, g: &Graph) -> Result<Vec<String>> {
    read_labelled_column(text, source, g, |s| Ok(s.to_owned()))
}

pub fn read_outcomes(path: &Path, g: &Graph) -> Result<OutcomeVector> {
    parse_outcomes(&fs::read_to_string(path)?, &display(path), g)
}

pub fn read_types(path: &Path, g: &Graph) -> Result<Vec<String>> {
    parse_types(&fs::read_to_string(path)?, &display(path), g)
}

/// A graph with aligned per-vertex data.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: Graph,
    pub outcomes: Option<OutcomeVector>,
    pub types: Option<Vec<String>>,
}

impl Dataset {
    /// External label ↔ internal id map, in id order.
    pub fn label_map(&self) -> &[String] {
        self.graph.labels()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DatasetPaths<'a> {
    pub graph: Option<&'a Path>,
    pub vertices: Option<&'a Path>,
    pub outcomes: Option<&'a Path>,
    pub types: Option<&'a Path>,
}

pub fn load_dataset(paths: DatasetPaths<'_>) -> Result<Dataset> {
    let graph_path = paths
        .graph
        .ok_or_else(|| Error::Config("an edge-list file is required".into()))?;
    let graph = load_graph(graph_path, paths.vertices)?;
    let outcomes = paths.outcomes.map(|p| read_outcomes(p, &graph)).transpose()?;
    let types = paths.types.map(|p| read_types(p, &graph)).transpose()?;
    let stats = graph.degree_stats();
    log::info!(
        "loaded graph: n = {}, |E| = {}, average degree = {:.4}, max degree = {}",
        stats.n,
        stats.edges,
        stats.d_av,
        stats.d_mx
    );
    Ok(Dataset {
        graph,
        outcomes,
        types,
    })
}

/// Edge-list text for `g`, one `label label` pair per line, sorted by id.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, j) in g.edges() {
        out.push_str(g.label(i));
        out.push(' ');
        out.push_str(g.label(j));
        out.push('\n');
    }
    out
}

pub fn format_vertex_list(g: &Graph) -> String {
    g.labels().iter().map(|l| format!("{l}\n")).collect()
}

pub fn format_outcomes(g: &Graph, y: &OutcomeVector) -> String {
    let mut out = String::from("node_label,value\n");
    for (label, v) in g.labels().iter().zip(y.values()) {
        out.push_str(&format!("{label},{v}\n"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Types that can be written as a single CSV row.
pub trait CsvRecord {
    fn csv_header() -> Vec<&'static str>;
    fn csv_values(&self) -> Vec<String>;
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    kind: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

/// Something that can be emitted as a report.
pub trait Report: Serialize + CsvRecord {
    const KIND: &'static str;
}

pub fn render<T: Report>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope {
                schema_version: SCHEMA_VERSION,
                kind: T::KIND,
                body: value,
            })?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(T::csv_header()).map_err(csv_err)?;
            w.write_record(value.csv_values()).map_err(csv_err)?;
            let bytes = w
                .into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Write a report to `path`, or to stdout when `path` is `None`.
pub fn emit_report<T: Report>(value: &T, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(value, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

impl CsvRecord for InferenceResult {
    fn csv_header() -> Vec<&'static str> {
        vec![
            "c_hat",
            "ci_lower",
            "ci_upper",
            "p_value",
            "alpha",
            "B",
            "seed",
            "method",
            "n",
            "sigma_plus",
            "t_obs",
            "critical_value",
            "degenerate_draws",
        ]
    }

    fn csv_values(&self) -> Vec<String> {
        vec![
            self.c_hat.to_string(),
            self.ci_lower.to_string(),
            self.ci_upper.to_string(),
            self.p_value.to_string(),
            self.alpha.to_string(),
            self.n_permutations.to_string(),
            opt(self.seed),
            self.method.as_str().to_owned(),
            self.n.to_string(),
            self.sigma_plus.to_string(),
            self.t_obs.to_string(),
            self.critical_value.to_string(),
            self.degenerate_draw_count.to_string(),
        ]
    }
}

impl Report for InferenceResult {
    const KIND: &'static str = "inference_result";
}

impl CsvRecord for OneSidedTest {
    fn csv_header() -> Vec<&'static str> {
        vec![
            "t1",
            "critical_value",
            "reject",
            "p_value",
            "alpha",
            "B",
            "seed",
            "method",
            "degenerate_draws",
        ]
    }

    fn csv_values(&self) -> Vec<String> {
        vec![
            self.t1.to_string(),
            self.critical_value.to_string(),
            self.reject.to_string(),
            self.p_value.to_string(),
            self.alpha.to_string(),
            self.n_permutations.to_string(),
            opt(self.seed),
            self.method.as_str().to_owned(),
            self.degenerate_draw_count.to_string(),
        ]
    }
}

impl Report for OneSidedTest {
    const KIND: &'static str = "one_sided_test";
}

/// Scalar summary of a [`ConcordanceEstimate`] (the per-vertex vectors are omitted).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub n: usize,
    pub gamma_hat: f64,
    pub gamma_hat_c: f64,
    pub c_hat: f64,
    pub v_hat: f64,
}

impl From<&ConcordanceEstimate> for EstimateSummary {
    fn from(e: &ConcordanceEstimate) -> Self {
        Self {
            n: e.residuals.len(),
            gamma_hat: e.gamma_hat,
            gamma_hat_c: e.gamma_hat_c,
            c_hat: e.c_hat,
            v_hat: e.v_hat,
        }
    }
}

impl CsvRecord for EstimateSummary {
    fn csv_header() -> Vec<&'static str> {
        vec!["n", "gamma_hat", "gamma_hat_c", "c_hat", "v_hat"]
    }

    fn csv_values(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.gamma_hat.to_string(),
            self.gamma_hat_c.to_string(),
            self.c_hat.to_string(),
            self.v_hat.to_string(),
        ]
    }
}

impl Report for EstimateSummary {
    const KIND: &'static str = "estimate";
}

impl CsvRecord for HomophilyEstimate {
    fn csv_header() -> Vec<&'static str> {
        vec!["ih", "ih_prime", "h", "h_prime", "w"]
    }

    fn csv_values(&self) -> Vec<String> {
        [self.ih, self.ih_prime, self.h, self.h_prime, self.w]
            .iter()
            .map(f64::to_string)
            .collect()
    }
}

impl Report for HomophilyEstimate {
    const KIND: &'static str = "homophily";
}

impl CsvRecord for DegreeStats {
    fn csv_header() -> Vec<&'static str> {
        vec![
            "n",
            "edges",
            "d_mx",
            "d_av",
            "d_avi",
            "d_med",
            "d_mx2",
            "denseness_ratio",
            "isolated",
        ]
    }

    fn csv_values(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.edges.to_string(),
            self.d_mx.to_string(),
            self.d_av.to_string(),
            self.d_avi.to_string(),
            self.d_med.to_string(),
            self.d_mx2.to_string(),
            self.denseness_ratio.to_string(),
            self.isolated.to_string(),
        ]
    }
}

impl Report for DegreeStats {
    const KIND: &'static str = "degree_stats";
}

impl CsvRecord for TrueGc {
    fn csv_header() -> Vec<&'static str> {
        vec!["true_gc", "gamma", "gamma_c", "std_error", "replications"]
    }

    fn csv_values(&self) -> Vec<String> {
        vec![
            self.value.to_string(),
            self.gamma.to_string(),
            self.gamma_c.to_string(),
            opt(self.std_error),
            self.replications.to_string(),
        ]
    }
}

impl Report for TrueGc {
    const KIND: &'static str = "true_gc";
}

impl CsvRecord for SimulationReport {
    fn csv_header() -> Vec<&'static str> {
        vec![
            "family",
            "n",
            "lambda",
            "m",
            "c",
            "mc_reps",
            "permutations",
            "alpha",
            "master_seed",
            "d_av",
            "d_mx",
            "true_gc",
            "true_gc_std_error",
            "coverage_perm",
            "coverage_asym",
            "mean_ci_length",
            "mean_ci_length_asym",
            "rejection_rate",
            "completed_reps",
            "degenerate_count",
            "degenerate_draws",
            "wall_time",
        ]
    }

    fn csv_values(&self) -> Vec<String> {
        let (family, lambda, m) = match &self.config.graph {
            GraphSpec::ErdosRenyi { lambda, .. } => ("erdos_renyi", Some(*lambda), None),
            GraphSpec::BarabasiAlbert { m, .. } => ("barabasi_albert", None, Some(*m)),
            GraphSpec::EdgeFile { .. } => ("edge_file", None, None),
        };
        let c = &self.config;
        vec![
            family.to_owned(),
            self.graph_stats.n.to_string(),
            opt(lambda),
            opt(m),
            c.c.to_string(),
            c.mc_reps.to_string(),
            c.permutations.to_string(),
            c.alpha.to_string(),
            c.master_seed.to_string(),
            self.graph_stats.d_av.to_string(),
            self.graph_stats.d_mx.to_string(),
            self.true_gc.to_string(),
            opt(self.true_gc_std_error),
            self.coverage_perm.to_string(),
            self.coverage_asym.to_string(),
            self.mean_ci_length.to_string(),
            self.mean_ci_length_asym.to_string(),
            self.rejection_rate.to_string(),
            self.completed_reps.to_string(),
            self.degenerate_count.to_string(),
            self.degenerate_draws.to_string(),
            self.wall_time.to_string(),
        ]
    }
}

impl Report for SimulationReport {
    const KIND: &'static str = "simulation_report";
}

/// Sidecar written next to a generated edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSidecar<C> {
    pub generator: String,
    pub config: C,
    pub degree_stats: DegreeStats,
}
