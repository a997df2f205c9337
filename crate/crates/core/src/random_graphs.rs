//! Erdős–Rényi and Barabási–Albert generators for the coverage studies.
//!
//! Draws that fail graph validation (complete graph, or a vertex adjacent to
//! every other vertex) are discarded and regenerated from the next attempt
//! substream of the same seed.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{substream, Purpose};

const MAX_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErConfig {
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(default = "default_seed_graph_size")]
    pub seed_graph_size: usize,
    #[serde(default = "default_seed_lambda")]
    pub seed_lambda: f64,
}

fn default_seed_graph_size() -> usize {
    20
}

fn default_seed_lambda() -> f64 {
    1.0
}

impl BaConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            seed,
            seed_graph_size: default_seed_graph_size(),
            seed_lambda: default_seed_lambda(),
        }
    }
}

/// Each unordered pair becomes an edge independently with probability `λ/(n − 1)`.
pub fn erdos_renyi(n: usize, lambda: f64, seed: u64) -> Result<Graph> {
    ErConfig { n, lambda, seed }.generate()
}

pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    BaConfig::new(n, m, seed).generate()
}

fn er_edges<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 {
        return edges;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn retry<F>(seed: u64, what: &str, mut attempt: F) -> Result<Graph>
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<Graph>,
{
    for k in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, Purpose::Graph, k);
        match attempt(&mut rng) {
            Ok(g) => return Ok(g),
            Err(e @ (Error::CompleteGraph | Error::ClosedNeighborhood { .. })) => {
                log::warn!("{what} draw {k} rejected ({e}); resampling");
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config(format!(
        "{what}: no valid graph after {MAX_ATTEMPTS} attempts"
    )))
}

impl ErConfig {
    pub fn generate(&self) -> Result<Graph> {
        let ErConfig { n, lambda, seed } = *self;
        if n < 2 {
            return Err(Error::Config(format!("Erdős–Rényi needs n >= 2, got {n}")));
        }
        if !(lambda >= 0.0) || lambda > (n - 1) as f64 {
            return Err(Error::Config(format!(
                "Erdős–Rényi needs 0 <= lambda <= n - 1 = {}, got {lambda}",
                n - 1
            )));
        }
        let p = lambda / (n - 1) as f64;
        retry(seed, "Erdős–Rényi", |rng| {
            Graph::from_edges(n, &er_edges(n, p, rng))
        })
    }
}

impl BaConfig {
    /// Grow from an Erdős–Rényi seed graph; every new vertex attaches to `m`
    /// distinct existing vertices chosen with probability proportional to
    /// their current degree.
    ///
    /// If fewer than `m` existing vertices have positive degree (possible
    /// with a sparse seed), the remaining targets are drawn uniformly from
    /// the degree-zero vertices.
    pub fn generate(&self) -> Result<Graph> {
        let BaConfig {
            n,
            m,
            seed,
            seed_graph_size,
            seed_lambda,
        } = *self;
        if seed_graph_size < 2 {
            return Err(Error::Config("seed graph needs at least 2 vertices".into()));
        }
        if n <= seed_graph_size {
            return Err(Error::Config(format!(
                "Barabási–Albert needs n > {seed_graph_size}, got {n}"
            )));
        }
        if m == 0 || m > seed_graph_size {
            return Err(Error::Config(format!(
                "Barabási–Albert needs 1 <= m <= {seed_graph_size}, got {m}"
            )));
        }
        if seed_lambda < 0.0 || seed_lambda > (seed_graph_size - 1) as f64 {
            return Err(Error::Config(format!(
                "seed graph lambda {seed_lambda} out of range"
            )));
        }
        let p = seed_lambda / (seed_graph_size - 1) as f64;
        retry(seed, "Barabási–Albert", |rng| {
            let mut edges = er_edges(seed_graph_size, p, rng);
            let mut degree = vec![0usize; n];
            // each vertex appears once per incident edge end
            let mut ends: Vec<usize> = Vec::with_capacity(2 * (edges.len() + n * m));
            for &(a, b) in &edges {
                degree[a] += 1;
                degree[b] += 1;
                ends.push(a);
                ends.push(b);
            }
            let mut chosen = vec![false; n];
            let mut targets = Vec::with_capacity(m);
            let mut positive = degree.iter().filter(|&&d| d > 0).count();
            for v in seed_graph_size..n {
                targets.clear();
                if positive <= m {
                    targets.extend((0..v).filter(|&u| degree[u] > 0));
                    let zero: Vec<usize> = (0..v).filter(|&u| degree[u] == 0).collect();
                    targets.extend(zero.choose_multiple(rng, m - targets.len()).copied());
                } else {
                    while targets.len() < m {
                        let u = ends[rng.random_range(0..ends.len())];
                        if !chosen[u] {
                            chosen[u] = true;
                            targets.push(u);
                        }
                    }
                }
                for &u in &targets {
                    chosen[u] = false;
                    if degree[u] == 0 {
                        positive += 1;
                    }
                    edges.push((u, v));
                    degree[u] += 1;
                    degree[v] += 1;
                    ends.push(u);
                    ends.push(v);
                }
                positive += 1;
            }
            Graph::from_edges(n, &edges)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_gives_empty_graph() {
        for seed in 0..5 {
            let g = erdos_renyi(50, 0.0, seed).unwrap();
            assert_eq!(g.edge_count(), 0);
        }
    }

    #[test]
    fn er_config_errors() {
        assert!(matches!(erdos_renyi(10, 9.5, 0), Err(Error::Config(_))));
        assert!(matches!(erdos_renyi(1, 0.0, 0), Err(Error::Config(_))));
        assert!(matches!(erdos_renyi(10, -1.0, 0), Err(Error::Config(_))));
    }

    #[test]
    fn generators_are_reproducible() {
        assert_eq!(erdos_renyi(100, 2.0, 9).unwrap(), erdos_renyi(100, 2.0, 9).unwrap());
        assert_ne!(erdos_renyi(100, 2.0, 9).unwrap(), erdos_renyi(100, 2.0, 10).unwrap());
        assert_eq!(barabasi_albert(80, 2, 4).unwrap(), barabasi_albert(80, 2, 4).unwrap());
    }

    #[test]
    fn ba_edge_count_identity() {
        for seed in 0..20 {
            for m in 1..=3 {
                let g = barabasi_albert(120, m, seed).unwrap();
                let seed_edges = g.edges().filter(|&(_, j)| j < 20).count();
                assert_eq!(g.edge_count(), seed_edges + (120 - 20) * m);
                for v in 20..120 {
                    let older = g.neighbors(v).iter().filter(|&&u| u < v).count();
                    assert_eq!(older, m);
                }
            }
        }
    }

    #[test]
    fn ba_config_errors() {
        assert!(matches!(barabasi_albert(20, 1, 0), Err(Error::Config(_))));
        assert!(matches!(barabasi_albert(50, 0, 0), Err(Error::Config(_))));
        assert!(matches!(barabasi_albert(50, 21, 0), Err(Error::Config(_))));
    }

    #[test]
    fn ba_uniform_fallback_when_seed_has_no_edges() {
        let cfg = BaConfig {
            seed_lambda: 0.0,
            ..BaConfig::new(40, 3, 1)
        };
        let g = cfg.generate().unwrap();
        assert_eq!(g.edge_count(), 20 * 3);
    }
}
