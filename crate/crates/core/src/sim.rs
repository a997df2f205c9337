//! Coverage experiments on a fixed random graph.
//!
//! The graph is generated once. The true concordance is estimated by Monte
//! Carlo over the outcome process, then each replication draws outcomes,
//! builds the permutation and normal-approximation intervals, and records
//! coverage and length. Replications that cannot be studentized are counted
//! separately and left out of every average.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dgp::{self, OutcomeProcess};
use crate::error::{Error, Result};
use crate::estimator::{Complement, OutcomeVector};
use crate::exec::Execution;
use crate::graph::{DegreeStats, Graph};
use crate::io;
use crate::permutation::{self, InferenceOptions};
use crate::random_graphs::{BaConfig, ErConfig};
use crate::rng::{derive_seed, substream, Purpose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    ErdosRenyi {
        n: usize,
        lambda: f64,
    },
    BarabasiAlbert {
        n: usize,
        m: usize,
    },
    EdgeFile {
        path: PathBuf,
        #[serde(default)]
        vertices: Option<PathBuf>,
    },
}

impl GraphSpec {
    pub fn build(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::ErdosRenyi { n, lambda } => ErConfig {
                n: *n,
                lambda: *lambda,
                seed,
            }
            .generate(),
            GraphSpec::BarabasiAlbert { n, m } => BaConfig::new(*n, *m, seed).generate(),
            GraphSpec::EdgeFile { path, vertices } => {
                io::load_graph(path, vertices.as_deref())
            }
        }
    }
}

fn default_mc_reps() -> usize {
    500
}
fn default_permutations() -> usize {
    300
}
fn default_alpha() -> f64 {
    permutation::DEFAULT_ALPHA
}
fn default_true_gc_reps() -> usize {
    200_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub graph: GraphSpec,
    pub c: f64,
    #[serde(default = "default_mc_reps")]
    pub mc_reps: usize,
    #[serde(default = "default_permutations")]
    pub permutations: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_true_gc_reps")]
    pub true_gc_reps: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl SimulationConfig {
    pub fn new(graph: GraphSpec, c: f64, master_seed: u64) -> Self {
        Self {
            graph,
            c,
            mc_reps: default_mc_reps(),
            permutations: default_permutations(),
            alpha: default_alpha(),
            true_gc_reps: default_true_gc_reps(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mc_reps == 0 {
            return Err(Error::Config("mc_reps must be at least 1".into()));
        }
        if self.permutations == 0 {
            return Err(Error::Config("permutations must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.c) {
            return Err(Error::Config(format!("c must lie in [0, 1), got {}", self.c)));
        }
        if self.c != 0.0 && self.true_gc_reps < 2 {
            return Err(Error::Config("true_gc_reps must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub graph_stats: DegreeStats,
    pub true_gc: f64,
    /// Monte Carlo standard error of `true_gc`; absent when it is known exactly.
    pub true_gc_std_error: Option<f64>,
    pub coverage_perm: f64,
    pub coverage_asym: f64,
    pub mean_ci_length: f64,
    pub mean_ci_length_asym: f64,
    /// Share of replications in which the one-sided test rejects `C ≤ 0`.
    pub rejection_rate: f64,
    pub completed_reps: usize,
    /// Replications whose observed statistic could not be studentized.
    pub degenerate_count: usize,
    /// Permutation draws excluded from critical values, over all replications.
    pub degenerate_draws: usize,
    pub wall_time: f64,
}

/// Per-replication record.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Replication {
    covered_perm: bool,
    covered_asym: bool,
    length_perm: f64,
    length_asym: f64,
    reject: bool,
    degenerate_draws: usize,
}

pub fn run_coverage_experiment(cfg: &SimulationConfig) -> Result<SimulationReport> {
    run_coverage_experiment_with(cfg, Execution::default())
}

pub fn run_coverage_experiment_with(
    cfg: &SimulationConfig,
    execution: Execution,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let graph = cfg
        .graph
        .build(derive_seed(cfg.master_seed, Purpose::Graph, 0))?;
    run_on_graph(&graph, cfg, execution)
}

/// Run the experiment on an already built graph.
pub fn run_on_graph(
    graph: &Graph,
    cfg: &SimulationConfig,
    execution: Execution,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let started = Instant::now();
    let graph_stats = graph.degree_stats();

    // With c = 0 the outcomes are i.i.d. and the concordance is exactly zero.
    let (true_gc, true_gc_std_error) = if cfg.c == 0.0 {
        (0.0, None)
    } else {
        let t = dgp::true_gc_monte_carlo(
            graph,
            cfg.c,
            cfg.true_gc_reps,
            derive_seed(cfg.master_seed, Purpose::TrueGc, 0),
            execution,
        )?;
        (t.value, t.std_error)
    };

    let process = OutcomeProcess::new(graph, cfg.c)?;
    let reps: Vec<Option<Replication>> = execution.map_indexed(cfg.mc_reps, |r| {
        let mut rng = substream(cfg.master_seed, Purpose::Outcomes, r as u64);
        let y = OutcomeVector::new(process.sample(&mut rng)).ok()?;
        let opts = InferenceOptions {
            alpha: cfg.alpha,
            permutations: cfg.permutations,
            seed: derive_seed(cfg.master_seed, Purpose::Replication, r as u64),
            exact: false,
            complement: Complement::Estimated,
            execution: Execution::Sequential,
        };
        match permutation::infer(graph, &y, &opts) {
            Ok(inf) => Some(Replication {
                covered_perm: inf.interval.covers(true_gc),
                covered_asym: inf.asymptotic.covers(true_gc),
                length_perm: inf.interval.length(),
                length_asym: inf.asymptotic.length(),
                reject: inf.test.reject,
                degenerate_draws: inf.interval.degenerate_draw_count,
            }),
            Err(e) if e.is_degeneracy() => {
                log::debug!("replication {r} skipped: {e}");
                None
            }
            Err(e) => {
                log::warn!("replication {r} failed: {e}");
                None
            }
        }
    });

    let done: Vec<Replication> = reps.iter().flatten().copied().collect();
    let completed = done.len();
    let share = |f: fn(&Replication) -> bool| {
        if completed == 0 {
            0.0
        } else {
            done.iter().filter(|r| f(r)).count() as f64 / completed as f64
        }
    };
    let average = |f: fn(&Replication) -> f64| {
        if completed == 0 {
            0.0
        } else {
            crate::sum::sum(done.iter().map(f)) / completed as f64
        }
    };

    Ok(SimulationReport {
        config: cfg.clone(),
        graph_stats,
        true_gc,
        true_gc_std_error,
        coverage_perm: share(|r| r.covered_perm),
        coverage_asym: share(|r| r.covered_asym),
        mean_ci_length: average(|r| r.length_perm),
        mean_ci_length_asym: average(|r| r.length_asym),
        rejection_rate: share(|r| r.reject),
        completed_reps: completed,
        degenerate_count: cfg.mc_reps - completed,
        degenerate_draws: done.iter().map(|r| r.degenerate_draws).sum(),
        wall_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(c: f64) -> SimulationConfig {
        SimulationConfig {
            mc_reps: 20,
            permutations: 40,
            true_gc_reps: 200,
            ..SimulationConfig::new(GraphSpec::ErdosRenyi { n: 40, lambda: 2.0 }, c, 5)
        }
    }

    #[test]
    fn zero_reps_is_config_error() {
        let cfg = SimulationConfig {
            mc_reps: 0,
            ..small(0.0)
        };
        assert!(matches!(run_coverage_experiment(&cfg), Err(Error::Config(_))));
        let cfg = SimulationConfig {
            permutations: 0,
            ..small(0.0)
        };
        assert!(matches!(run_coverage_experiment(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn report_is_reproducible_across_execution_modes() {
        let mut a = run_coverage_experiment_with(&small(0.3), Execution::Sequential).unwrap();
        let mut b = run_coverage_experiment_with(&small(0.3), Execution::Parallel).unwrap();
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.coverage_perm));
        assert!(a.mean_ci_length >= 0.0);
        assert_eq!(a.completed_reps + a.degenerate_count, 20);
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg: SimulationConfig = serde_json::from_str(
            r#"{"graph": {"family": "barabasi_albert", "n": 300, "m": 3}, "c": 0.6}"#,
        )
        .unwrap();
        assert_eq!(cfg.mc_reps, 500);
        assert_eq!(cfg.permutations, 300);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.graph, GraphSpec::BarabasiAlbert { n: 300, m: 3 });
    }
}
