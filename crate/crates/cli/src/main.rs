use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use netconcord::io::{self, DatasetPaths, EstimateSummary, Format, GraphSidecar, Report};
use netconcord::permutation::{DEFAULT_ALPHA, DEFAULT_PERMUTATIONS};
use netconcord::{
    degree_stats_of_edges, exec, generate_outcomes, inbreeding_homophily, infer,
    true_gc_monte_carlo, BaConfig, Complement, DegreeStats, DgpConfig, ErConfig, Error,
    Execution, Graph, InferenceOptions, SimulationConfig,
};

#[derive(Parser, Debug)]
#[command(name = "netconcord", version, about = "Graph concordance estimation and inference")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for the parallel engines (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Run every engine sequentially.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point estimate of the graph concordance.
    Estimate(EstimateArgs),
    /// Permutation confidence interval (and the normal-approximation interval).
    Ci(InferenceArgs),
    /// One-sided permutation test of C <= 0 against C > 0.
    Test(InferenceArgs),
    /// Inbreeding homophily of a categorical type.
    Homophily(HomophilyArgs),
    /// Degree statistics and the denseness heuristic.
    Diagnose(DiagnoseArgs),
    /// Generate an Erdős–Rényi or Barabási–Albert graph.
    GenGraph(GenGraphArgs),
    /// Draw outcomes from the edge-sequential Gaussian process.
    GenOutcomes(GenOutcomesArgs),
    /// Monte Carlo true concordance for the Gaussian process on a fixed graph.
    TrueGc(TrueGcArgs),
    /// Run coverage experiments from a JSON config (one object or an array).
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Edge-list file: one `label label` pair per line.
    #[arg(long)]
    graph: PathBuf,

    /// Optional vertex list, needed to declare isolated vertices.
    #[arg(long)]
    vertices: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    graph: GraphArgs,

    /// Outcome CSV with header `node_label,value`.
    #[arg(long)]
    outcomes: PathBuf,

    /// Set the non-neighbor term to zero.
    #[arg(long)]
    zero_gamma_c: bool,
}

#[derive(Args, Debug)]
struct InferenceArgs {
    #[command(flatten)]
    estimate: EstimateArgs,

    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    permutations: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Enumerate all n! permutations (n <= 8).
    #[arg(long)]
    exact: bool,

    /// Report the normal-approximation interval instead (ci only).
    #[arg(long)]
    asymptotic: bool,
}

#[derive(Args, Debug)]
struct HomophilyArgs {
    #[command(flatten)]
    graph: GraphArgs,

    /// Type CSV with header `node_label,value`.
    #[arg(long)]
    types: PathBuf,

    /// The type whose homophily is measured.
    #[arg(long)]
    type_label: String,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[command(flatten)]
    graph: GraphArgs,

    /// Warn when d_mx2^4 / n exceeds this value.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Er,
    Ba,
}

#[derive(Args, Debug)]
struct GenGraphArgs {
    #[arg(long, value_enum)]
    family: Family,

    #[arg(long)]
    n: usize,

    /// Mean degree (Erdős–Rényi).
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,

    /// Edges per new vertex (Barabási–Albert).
    #[arg(long, default_value_t = 1)]
    m: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenOutcomesArgs {
    #[command(flatten)]
    graph: GraphArgs,

    /// Dependence strength in [0, 1).
    #[arg(long)]
    c: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TrueGcArgs {
    #[command(flatten)]
    graph: GraphArgs,

    #[arg(long)]
    c: f64,

    #[arg(long, default_value_t = 200_000)]
    reps: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
}

struct Ctx {
    format: Format,
    output: Option<PathBuf>,
    execution: Execution,
}

impl Ctx {
    fn emit<T: Report>(&self, value: &T) -> netconcord::Result<()> {
        io::emit_report(value, self.format, self.output.as_deref())
    }

    fn write_text(&self, text: &str) -> netconcord::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_degeneracy() {
        3
    } else if matches!(e, Error::Io(_)) {
        1
    } else {
        2
    }
}

fn run(cli: Cli) -> netconcord::Result<()> {
    if cli.threads > 0 {
        exec::configure_threads(cli.threads)?;
    }
    let ctx = Ctx {
        format: cli.format.into(),
        output: cli.output,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match cli.command {
        Command::Estimate(a) => estimate(&ctx, &a),
        Command::Ci(a) => ci(&ctx, &a),
        Command::Test(a) => test(&ctx, &a),
        Command::Homophily(a) => homophily(&ctx, &a),
        Command::Diagnose(a) => diagnose(&ctx, &a),
        Command::GenGraph(a) => gen_graph(&ctx, &a),
        Command::GenOutcomes(a) => gen_outcomes(&ctx, &a),
        Command::TrueGc(a) => true_gc(&ctx, &a),
        Command::Simulate(a) => simulate(&ctx, &a),
    }
}

fn load(graph: &GraphArgs, outcomes: Option<&Path>, types: Option<&Path>) -> netconcord::Result<io::Dataset> {
    io::load_dataset(DatasetPaths {
        graph: Some(&graph.graph),
        vertices: graph.vertices.as_deref(),
        outcomes,
        types,
    })
}

fn complement(zero: bool) -> Complement {
    if zero {
        Complement::Zero
    } else {
        Complement::Estimated
    }
}

fn estimate(ctx: &Ctx, a: &EstimateArgs) -> netconcord::Result<()> {
    let data = load(&a.graph, Some(&a.outcomes), None)?;
    let y = data.outcomes.expect("outcomes requested");
    let est = netconcord::estimate_gc_with(&data.graph, &y, complement(a.zero_gamma_c))?;
    ctx.emit(&EstimateSummary::from(&est))
}

fn run_inference(ctx: &Ctx, a: &InferenceArgs) -> netconcord::Result<netconcord::Inference> {
    let data = load(&a.estimate.graph, Some(&a.estimate.outcomes), None)?;
    let y = data.outcomes.expect("outcomes requested");
    let opts = InferenceOptions {
        alpha: a.alpha,
        permutations: a.permutations,
        seed: a.seed,
        exact: a.exact,
        complement: complement(a.estimate.zero_gamma_c),
        execution: ctx.execution,
    };
    infer(&data.graph, &y, &opts)
}

fn ci(ctx: &Ctx, a: &InferenceArgs) -> netconcord::Result<()> {
    let inf = run_inference(ctx, a)?;
    if a.asymptotic {
        ctx.emit(&inf.asymptotic)
    } else {
        ctx.emit(&inf.interval)
    }
}

fn test(ctx: &Ctx, a: &InferenceArgs) -> netconcord::Result<()> {
    let inf = run_inference(ctx, a)?;
    ctx.emit(&inf.test)
}

fn homophily(ctx: &Ctx, a: &HomophilyArgs) -> netconcord::Result<()> {
    let data = load(&a.graph, None, Some(&a.types))?;
    let types = data.types.expect("types requested");
    ctx.emit(&inbreeding_homophily(&data.graph, &types, &a.type_label)?)
}

/// Degree statistics even for graphs the estimators would reject.
fn diagnose_stats(a: &GraphArgs) -> netconcord::Result<DegreeStats> {
    match io::load_graph(&a.graph, a.vertices.as_deref()) {
        Ok(g) => Ok(g.degree_stats()),
        Err(e @ (Error::CompleteGraph | Error::ClosedNeighborhood { .. })) => {
            log::warn!("{e}; estimators will reject this graph");
            let mut labels: Vec<String> = match &a.vertices {
                Some(p) => io::read_vertex_list(p)?,
                None => Vec::new(),
            };
            let edges = io::read_edge_list(&a.graph)?;
            let id = |l: &str, labels: &mut Vec<String>| match labels.iter().position(|x| x == l) {
                Some(i) => i,
                None => {
                    labels.push(l.to_owned());
                    labels.len() - 1
                }
            };
            let pairs: Vec<(usize, usize)> = edges
                .iter()
                .map(|(u, v)| (id(u, &mut labels), id(v, &mut labels)))
                .collect();
            degree_stats_of_edges(labels.len(), &pairs)
        }
        Err(e) => Err(e),
    }
}

fn diagnose(ctx: &Ctx, a: &DiagnoseArgs) -> netconcord::Result<()> {
    let stats = diagnose_stats(&a.graph)?;
    if stats.denseness_ratio > a.threshold {
        eprintln!(
            "warning: d_mx2^4 / n = {:.4} exceeds {}; the graph may be too dense for the normal approximation (heuristic only)",
            stats.denseness_ratio, a.threshold
        );
    }
    ctx.emit(&stats)
}

#[derive(Serialize)]
#[serde(untagged)]
enum GeneratorConfig {
    Er(ErConfig),
    Ba(BaConfig),
}

fn gen_graph(ctx: &Ctx, a: &GenGraphArgs) -> netconcord::Result<()> {
    let (name, config, g) = match a.family {
        Family::Er => {
            let cfg = ErConfig {
                n: a.n,
                lambda: a.lambda,
                seed: a.seed,
            };
            ("erdos_renyi", GeneratorConfig::Er(cfg), cfg.generate()?)
        }
        Family::Ba => {
            let cfg = BaConfig::new(a.n, a.m, a.seed);
            ("barabasi_albert", GeneratorConfig::Ba(cfg), cfg.generate()?)
        }
    };
    let sidecar = GraphSidecar {
        generator: name.to_owned(),
        config,
        degree_stats: g.degree_stats(),
    };
    let sidecar_json = serde_json::to_string_pretty(&sidecar)? + "\n";
    match &ctx.output {
        Some(path) => {
            fs::write(path, io::format_edge_list(&g))?;
            fs::write(with_suffix(path, "vertices"), io::format_vertex_list(&g))?;
            fs::write(with_suffix(path, "json"), sidecar_json)?;
        }
        None => {
            print!("{}", io::format_edge_list(&g));
            eprint!("{sidecar_json}");
        }
    }
    Ok(())
}

/// `edges.txt` -> `edges.txt.<suffix>`
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn load_graph(a: &GraphArgs) -> netconcord::Result<Graph> {
    io::load_graph(&a.graph, a.vertices.as_deref())
}

fn gen_outcomes(ctx: &Ctx, a: &GenOutcomesArgs) -> netconcord::Result<()> {
    let g = load_graph(&a.graph)?;
    let y = generate_outcomes(&g, &DgpConfig { c: a.c, seed: a.seed })?;
    ctx.write_text(&io::format_outcomes(&g, &y))
}

fn true_gc(ctx: &Ctx, a: &TrueGcArgs) -> netconcord::Result<()> {
    let g = load_graph(&a.graph)?;
    let t = true_gc_monte_carlo(&g, a.c, a.reps, a.seed, ctx.execution)?;
    match t.std_error {
        Some(se) => eprintln!("true GC = {:.6} (MC standard error {:.6})", t.value, se),
        None => eprintln!("true GC = {:.6}", t.value),
    }
    ctx.emit(&t)
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> netconcord::Result<()> {
    let text = fs::read_to_string(&a.config)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let configs: Vec<SimulationConfig> = match value {
        serde_json::Value::Array(items) => items
            .into_iter()
            .map(serde_json::from_value)
            .collect::<Result<_, _>>()?,
        other => vec![serde_json::from_value(other)?],
    };
    let mut reports = Vec::with_capacity(configs.len());
    for (k, cfg) in configs.iter().enumerate() {
        log::info!("cell {}/{}", k + 1, configs.len());
        reports.push(netconcord::sim::run_coverage_experiment_with(cfg, ctx.execution)?);
    }
    if reports.len() == 1 {
        return ctx.emit(&reports[0]);
    }
    let text = match ctx.format {
        Format::Csv => {
            let mut out = String::new();
            for (k, r) in reports.iter().enumerate() {
                let rendered = io::render(r, Format::Csv)?;
                let body = if k == 0 {
                    rendered.as_str()
                } else {
                    rendered.split_once('\n').map_or("", |(_, rows)| rows)
                };
                out.push_str(body);
            }
            out
        }
        Format::Json => {
            let docs: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| io::render(r, Format::Json).and_then(|s| Ok(serde_json::from_str(&s)?)))
                .collect::<netconcord::Result<_>>()?;
            serde_json::to_string_pretty(&docs)? + "\n"
        }
    };
    ctx.write_text(&text)
}
