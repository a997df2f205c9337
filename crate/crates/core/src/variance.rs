//! Dependency-graph variance estimation and studentization.
//!
//! Each vertex contributes `q̂_i = ê_i(â_i − ê_i γ̂)`, centered at the mean
//! `q̄_i` of its degree class. The variance estimate pairs every centered
//! contribution with those of all vertices within two edges:
//!
//! ```text
//! σ̂² = (1/n) Σ_i r_i (r_i + Σ_{k ∈ N₂(i)} r_k),   r = q̂ − q̄
//! ```
//!
//! When `σ̂² ≤ 0` the diagonal-only `σ̂₁² = mean(r²)` is used instead. A `σ̂²`
//! within [`DEGENERACY_TOLERANCE`] of zero counts as nonpositive: exact zeros
//! arise from symmetric data and come out of floating point as `±1e-18`.
//! Cost is `O(Σ_i |N₂(i)|)` on the cached two-hop index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::ConcordanceEstimate;
use crate::graph::Graph;
use crate::sum::{self, NeumaierSum};

/// Below this the scale normalizer is treated as zero. Residuals have unit
/// variance, so this is an absolute threshold on a unit-scale quantity.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub sigma2: f64,
    pub sigma2_fallback: f64,
    pub sigma2_plus: f64,
    pub q_hat: Vec<f64>,
    pub q_bar: Vec<f64>,
}

impl VarianceEstimate {
    pub fn sigma_plus(&self) -> f64 {
        self.sigma2_plus.sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma2_plus <= DEGENERACY_TOLERANCE
    }
}

pub fn q_values(g: &Graph, est: &ConcordanceEstimate) -> Vec<f64> {
    debug_assert_eq!(est.residuals.len(), g.n());
    est.residuals
        .iter()
        .zip(&est.a_hat)
        .map(|(&e, &a)| e * (a - e * est.gamma_hat))
        .collect()
}

/// Mean of `q_hat` over each vertex's degree class, broadcast back to vertices.
pub fn degree_class_means(g: &Graph, q_hat: &[f64]) -> Vec<f64> {
    let class_means: Vec<f64> = g
        .degree_classes()
        .iter()
        .map(|class| {
            sum::sum(class.members.iter().map(|&j| q_hat[j])) / class.members.len() as f64
        })
        .collect();
    (0..g.n()).map(|i| class_means[g.class_of(i)]).collect()
}

/// Compute `σ̂²`, `σ̂₁²` and `σ̂₊²` without rejecting degenerate values.
pub fn variance_components(g: &Graph, q_hat: Vec<f64>, q_bar: Vec<f64>) -> VarianceEstimate {
    let n = g.n() as f64;
    let two_hop = g.two_neighborhoods();
    let centered: Vec<f64> = q_hat.iter().zip(&q_bar).map(|(q, m)| q - m).collect();

    let mut cross = NeumaierSum::new();
    let mut diag = NeumaierSum::new();
    for (i, &r) in centered.iter().enumerate() {
        let ring = sum::sum(two_hop.row(i).iter().map(|&k| centered[k]));
        diag.add(r * r);
        cross.add(r * ring);
    }
    let sigma2_fallback = diag.value() / n;
    let sigma2 = sum::sum([diag.value(), cross.value()]) / n;
    let sigma2_plus = if sigma2 > DEGENERACY_TOLERANCE {
        sigma2
    } else {
        sigma2_fallback
    };
    VarianceEstimate {
        sigma2,
        sigma2_fallback,
        sigma2_plus,
        q_hat,
        q_bar,
    }
}

/// As [`variance_components`], failing when the statistic cannot be studentized.
pub fn variance_estimate(g: &Graph, q_hat: &[f64], q_bar: &[f64]) -> Result<VarianceEstimate> {
    let v = variance_components(g, q_hat.to_vec(), q_bar.to_vec());
    if v.is_degenerate() {
        return Err(Error::DegenerateVariance(format!(
            "scale normalizer is zero (sigma2 = {:e}, fallback = {:e}); \
             every q-value equals its degree-class mean",
            v.sigma2, v.sigma2_fallback
        )));
    }
    Ok(v)
}

/// `q̂`, `q̄` and the variance estimate for a concordance estimate in one step.
pub fn studentize(g: &Graph, est: &ConcordanceEstimate) -> Result<VarianceEstimate> {
    let q_hat = q_values(g, est);
    let q_bar = degree_class_means(g, &q_hat);
    variance_estimate(g, &q_hat, &q_bar)
}

/// `T = √n (Ĉ − c₀)/σ̂₊`.
pub fn t_statistic(c_hat: f64, c_null: f64, sigma_plus: f64, n: usize) -> Result<f64> {
    if !(sigma_plus > 0.0) {
        return Err(Error::DegenerateVariance(format!(
            "cannot studentize with scale {sigma_plus}"
        )));
    }
    Ok((n as f64).sqrt() * (c_hat - c_null) / sigma_plus)
}
