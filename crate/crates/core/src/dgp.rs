//! Edge-sequential Gaussian outcome process and Monte Carlo true concordance.
//!
//! Outcomes start i.i.d. standard normal. Edges `(i, j)` with `i < j` are
//! visited in lexicographic order; each one draws a fresh `Z ~ N(0, 1)` and
//! replaces both endpoints by `√(1 − c²)·Y + c·Z`. Every update keeps unit
//! variance and only vertices sharing an edge ever share a factor.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::OutcomeVector;
use crate::exec::Execution;
use crate::graph::Graph;
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    /// Dependence strength in `[0, 1)`.
    pub c: f64,
    pub seed: u64,
}

fn check_strength(c: f64) -> Result<()> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Config(format!(
            "dependence strength must lie in [0, 1), got {c}"
        )));
    }
    Ok(())
}

/// Reusable sampler: the sorted edge list is computed once per graph.
#[derive(Debug, Clone)]
pub struct OutcomeProcess {
    n: usize,
    edges: Vec<(usize, usize)>,
    c: f64,
    keep: f64,
}

impl OutcomeProcess {
    pub fn new(g: &Graph, c: f64) -> Result<Self> {
        check_strength(c)?;
        Ok(Self {
            n: g.n(),
            edges: g.edges().collect(),
            c,
            keep: (1.0 - c * c).sqrt(),
        })
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, y: &mut Vec<f64>) {
        y.clear();
        y.extend((0..self.n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        for &(i, j) in &self.edges {
            let z: f64 = rng.sample(StandardNormal);
            y[i] = self.keep * y[i] + self.c * z;
            y[j] = self.keep * y[j] + self.c * z;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.n);
        self.sample_into(rng, &mut y);
        y
    }
}

pub fn generate_outcomes(g: &Graph, cfg: &DgpConfig) -> Result<OutcomeVector> {
    let process = OutcomeProcess::new(g, cfg.c)?;
    let mut rng = substream(cfg.seed, Purpose::Outcomes, 0);
    OutcomeVector::new(process.sample(&mut rng))
}

/// Monte Carlo estimate of the population concordance and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueGc {
    pub value: f64,
    pub gamma: f64,
    pub gamma_c: f64,
    /// Batch-means standard error; `None` with fewer than two batches.
    pub std_error: Option<f64>,
    pub replications: usize,
}

/// Per-vertex raw moment sums over a batch of replications.
#[derive(Debug, Clone)]
struct Moments {
    count: usize,
    y: Vec<f64>,
    yy: Vec<f64>,
    nbr: Vec<f64>,
    y_nbr: Vec<f64>,
    rest: Vec<f64>,
    y_rest: Vec<f64>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            count: 0,
            y: vec![0.0; n],
            yy: vec![0.0; n],
            nbr: vec![0.0; n],
            y_nbr: vec![0.0; n],
            rest: vec![0.0; n],
            y_rest: vec![0.0; n],
        }
    }

    fn add_sample(&mut self, g: &Graph, y: &[f64]) {
        let n = g.n();
        let total: f64 = y.iter().sum();
        for i in 0..n {
            let nbrs = g.neighbors(i);
            let nbr_sum: f64 = nbrs.iter().map(|&j| y[j]).sum();
            let nbr_mean = if nbrs.is_empty() {
                0.0
            } else {
                nbr_sum / nbrs.len() as f64
            };
            let rest_mean = (total - y[i] - nbr_sum) / (n - 1 - nbrs.len()) as f64;
            self.y[i] += y[i];
            self.yy[i] += y[i] * y[i];
            self.nbr[i] += nbr_mean;
            self.y_nbr[i] += y[i] * nbr_mean;
            self.rest[i] += rest_mean;
            self.y_rest[i] += y[i] * rest_mean;
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        for (dst, src) in [
            (&mut self.y, &other.y),
            (&mut self.yy, &other.yy),
            (&mut self.nbr, &other.nbr),
            (&mut self.y_nbr, &other.y_nbr),
            (&mut self.rest, &other.rest),
            (&mut self.y_rest, &other.y_rest),
        ] {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }

    /// `(γ, γᶜ)` from sample covariances computed per vertex, then averaged.
    fn gammas(&self) -> (f64, f64) {
        let r = self.count as f64;
        let cov = |sxy: f64, sx: f64, sy: f64| (sxy - sx * sy / r) / (r - 1.0);
        let n = self.y.len();
        let mut var_sum = 0.0;
        let mut cov_nbr = 0.0;
        let mut cov_rest = 0.0;
        for i in 0..n {
            var_sum += cov(self.yy[i], self.y[i], self.y[i]);
            cov_nbr += cov(self.y_nbr[i], self.y[i], self.nbr[i]);
            cov_rest += cov(self.y_rest[i], self.y[i], self.rest[i]);
        }
        // (1/(n v²)) Σ Cov with v² = (1/n) Σ Var reduces to Σ Cov / Σ Var
        (cov_nbr / var_sum, cov_rest / var_sum)
    }
}

const TRUE_GC_BATCHES: usize = 50;

/// Estimate `C = γ − γᶜ` for the edge-sequential process on a fixed graph by
/// replacing population moments with moments over `replications` draws.
///
/// Replication `r` uses substream `r` of `seed`; replications are grouped
/// into a fixed number of batches that run in parallel and are merged in
/// batch order.
pub fn true_gc_monte_carlo(
    g: &Graph,
    c: f64,
    replications: usize,
    seed: u64,
    execution: Execution,
) -> Result<TrueGc> {
    if replications < 2 {
        return Err(Error::Config(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    let process = OutcomeProcess::new(g, c)?;
    let batches = TRUE_GC_BATCHES.min(replications / 2).max(1);
    let n = g.n();
    let parts = execution.map_indexed(batches, |b| {
        let start = b * replications / batches;
        let end = (b + 1) * replications / batches;
        let mut moments = Moments::new(n);
        let mut y = Vec::with_capacity(n);
        for r in start..end {
            let mut rng = substream(seed, Purpose::TrueGc, r as u64);
            process.sample_into(&mut rng, &mut y);
            moments.add_sample(g, &y);
        }
        moments
    });

    let mut total = Moments::new(n);
    for part in &parts {
        total.merge(part);
    }
    let (gamma, gamma_c) = total.gammas();

    let std_error = (batches >= 2).then(|| {
        let values: Vec<f64> = parts
            .iter()
            .map(|m| {
                let (a, b) = m.gammas();
                a - b
            })
            .collect();
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    });

    Ok(TrueGc {
        value: gamma - gamma_c,
        gamma,
        gamma_c,
        std_error,
        replications,
    })
}
