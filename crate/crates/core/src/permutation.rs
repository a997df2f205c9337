//! Permutation inference for graph concordance.
//!
//! Each draw relabels the standardized residuals (`ê_i → ê_{π(i)}`) while
//! keeping the graph fixed, then recomputes the whole studentized statistic
//! `T_π = √n Ĉ_π / σ̂₊,π`, including its own variance estimate. The critical
//! value is the strict `1 − α` quantile of `|T_π|` (two-sided) or `T_π`
//! (one-sided).
//!
//! Sampled draws use the substream `(seed, j)` for draw `j`, so the result
//! does not depend on thread count. Draws whose scale normalizer is zero are
//! flagged and left out of the critical-value pool.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimator::{self, Complement, ConcordanceEstimate, OutcomeVector};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::rng::{substream, Purpose};
use crate::variance::{self, VarianceEstimate};

/// Largest graph for which all `n!` relabelings are enumerated.
pub const MAX_EXACT_N: usize = 8;

pub const DEFAULT_PERMUTATIONS: usize = 1000;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// `π[i]` is the vertex whose residual lands on vertex `i`.
pub type Permutation = Vec<usize>;

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `b` uniform permutations of `0..n`, draw `j` taken from substream `j` of `seed`.
pub fn sample_permutations(n: usize, b: usize, seed: u64) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::Config("cannot permute an empty vertex set".into()));
    }
    if b == 0 {
        return Err(Error::Config("number of permutations must be positive".into()));
    }
    Ok((0..b)
        .map(|j| random_permutation(n, &mut substream(seed, Purpose::Permutation, j as u64)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationDraw {
    /// NaN when `degenerate`.
    pub t_pi: f64,
    pub c_hat_pi: f64,
    pub sigma_plus_pi: f64,
    pub degenerate: bool,
}

pub fn permutation_statistic(g: &Graph, residuals: &[f64], pi: &[usize]) -> PermutationDraw {
    permutation_statistic_with(g, residuals, pi, Complement::Estimated)
}

pub fn permutation_statistic_with(
    g: &Graph,
    residuals: &[f64],
    pi: &[usize],
    complement: Complement,
) -> PermutationDraw {
    debug_assert_eq!(pi.len(), residuals.len());
    let relabeled: Vec<f64> = pi.iter().map(|&p| residuals[p]).collect();
    let est = estimator::estimate_from_residuals(g, relabeled, 1.0, complement);
    let q_hat = variance::q_values(g, &est);
    let q_bar = variance::degree_class_means(g, &q_hat);
    let var = variance::variance_components(g, q_hat, q_bar);
    let sigma_plus = var.sigma_plus();
    let degenerate = var.is_degenerate();
    PermutationDraw {
        t_pi: if degenerate {
            f64::NAN
        } else {
            (g.n() as f64).sqrt() * est.c_hat / sigma_plus
        },
        c_hat_pi: est.c_hat,
        sigma_plus_pi: sigma_plus,
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Permutation,
    ExactPermutation,
    Asymptotic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Permutation => "permutation",
            Method::ExactPermutation => "exact_permutation",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sided {
    Two,
    One,
}

/// The permutation distribution of `T_π` for one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationDistribution {
    pub draws: Vec<PermutationDraw>,
    pub method: Method,
    pub seed: Option<u64>,
}

impl PermutationDistribution {
    pub fn sampled(
        g: &Graph,
        residuals: &[f64],
        b: usize,
        seed: u64,
        complement: Complement,
        execution: Execution,
    ) -> Result<Self> {
        if b == 0 {
            return Err(Error::Config("number of permutations must be positive".into()));
        }
        // build the two-hop index once, before workers race for it
        g.two_neighborhoods();
        let n = g.n();
        let draws = execution.map_indexed(b, |j| {
            let mut rng = substream(seed, Purpose::Permutation, j as u64);
            let pi = random_permutation(n, &mut rng);
            permutation_statistic_with(g, residuals, &pi, complement)
        });
        Ok(Self {
            draws,
            method: Method::Permutation,
            seed: Some(seed),
        })
    }

    /// All `n!` relabelings, in lexicographic order of `π`.
    pub fn exact(
        g: &Graph,
        residuals: &[f64],
        complement: Complement,
        execution: Execution,
    ) -> Result<Self> {
        let n = g.n();
        if n > MAX_EXACT_N {
            return Err(Error::Config(format!(
                "exact enumeration needs n <= {MAX_EXACT_N}, graph has {n} vertices"
            )));
        }
        g.two_neighborhoods();
        let perms: Vec<Permutation> = (0..n).permutations(n).collect();
        let draws = execution.map_indexed(perms.len(), |j| {
            permutation_statistic_with(g, residuals, &perms[j], complement)
        });
        Ok(Self {
            draws,
            method: Method::ExactPermutation,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn degenerate_count(&self) -> usize {
        self.draws.iter().filter(|d| d.degenerate).count()
    }

    /// Signed `T_π` of the non-degenerate draws.
    pub fn statistics(&self) -> Vec<f64> {
        self.draws
            .iter()
            .filter(|d| !d.degenerate)
            .map(|d| d.t_pi)
            .collect()
    }

    /// Randomization p-value for "statistic at least as extreme as `observed`".
    ///
    /// Sampled: `(1 + k)/(B + 1)`. Exact: `k/B`, the enumeration already
    /// containing the identity.
    fn p_value(&self, observed: f64, sided: Sided) -> Result<f64> {
        let stats = self.statistics();
        if stats.is_empty() {
            return Err(all_degenerate(self.len()));
        }
        let extreme = match sided {
            Sided::Two => stats.iter().filter(|t| t.abs() >= observed.abs()).count(),
            Sided::One => stats.iter().filter(|&&t| t >= observed).count(),
        };
        Ok(match self.method {
            Method::ExactPermutation => (extreme.max(1)) as f64 / stats.len() as f64,
            _ => (1 + extreme) as f64 / (stats.len() + 1) as f64,
        })
    }
}

fn all_degenerate(total: usize) -> Error {
    Error::Inference(format!(
        "all {total} permutation draws have a zero scale normalizer"
    ))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// `inf{c : #{s ≤ c}/B > 1 − α}` over `|s|` (two-sided) or `s` (one-sided):
/// the smallest order statistic whose empirical CDF strictly exceeds `1 − α`.
pub fn critical_value(stats: &[f64], alpha: f64, sided: Sided) -> Result<f64> {
    check_alpha(alpha)?;
    if stats.is_empty() {
        return Err(Error::Inference(
            "no usable permutation statistics to compute a critical value".into(),
        ));
    }
    let mut sorted: Vec<f64> = match sided {
        Sided::Two => stats.iter().map(|s| s.abs()).collect(),
        Sided::One => stats.to_vec(),
    };
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    let level = 1.0 - alpha;
    let fraction = |k: usize| k as f64 / b as f64;
    let mut k = ((b as f64) * level).floor() as usize;
    while fraction(k) <= level {
        k += 1;
    }
    while k > 1 && fraction(k - 1) > level {
        k -= 1;
    }
    Ok(sorted[k - 1])
}

/// A confidence interval together with the observed statistic for `C = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub method: Method,
    pub n: usize,
    pub c_hat: f64,
    pub sigma_plus: f64,
    /// `T₁ = √n Ĉ/σ̂₊`.
    pub t_obs: f64,
    pub critical_value: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// Two-sided p-value for `C = 0`.
    pub p_value: f64,
    pub alpha: f64,
    pub n_permutations: usize,
    pub seed: Option<u64>,
    pub degenerate_draw_count: usize,
}

impl InferenceResult {
    pub fn length(&self) -> f64 {
        self.ci_upper - self.ci_lower
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_lower <= value && value <= self.ci_upper
    }
}

/// Outcome of the one-sided permutation test of `C ≤ 0` against `C > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedTest {
    pub method: Method,
    pub t1: f64,
    pub critical_value: f64,
    pub reject: bool,
    pub p_value: f64,
    pub alpha: f64,
    pub n_permutations: usize,
    pub seed: Option<u64>,
    pub degenerate_draw_count: usize,
}

fn sigma_plus_checked(var: &VarianceEstimate) -> Result<f64> {
    if var.is_degenerate() {
        return Err(Error::DegenerateVariance(
            "scale normalizer is zero; interval cannot be formed".into(),
        ));
    }
    Ok(var.sigma_plus())
}

/// `[Ĉ − c_α σ̂₊/√n, Ĉ + c_α σ̂₊/√n]`.
pub fn confidence_interval(
    est: &ConcordanceEstimate,
    var: &VarianceEstimate,
    dist: &PermutationDistribution,
    alpha: f64,
) -> Result<InferenceResult> {
    let n = est.residuals.len();
    let sigma_plus = sigma_plus_checked(var)?;
    let stats = dist.statistics();
    if stats.is_empty() {
        return Err(all_degenerate(dist.len()));
    }
    let c_alpha = critical_value(&stats, alpha, Sided::Two)?;
    let t_obs = variance::t_statistic(est.c_hat, 0.0, sigma_plus, n)?;
    let half = c_alpha * sigma_plus / (n as f64).sqrt();
    Ok(InferenceResult {
        method: dist.method,
        n,
        c_hat: est.c_hat,
        sigma_plus,
        t_obs,
        critical_value: c_alpha,
        ci_lower: est.c_hat - half,
        ci_upper: est.c_hat + half,
        p_value: dist.p_value(t_obs, Sided::Two)?,
        alpha,
        n_permutations: dist.len(),
        seed: dist.seed,
        degenerate_draw_count: dist.degenerate_count(),
    })
}

/// Reject `C ≤ 0` iff `T₁ > c_{α,1}`.
pub fn test_positive_gc(t1: f64, dist: &PermutationDistribution, alpha: f64) -> Result<OneSidedTest> {
    let stats = dist.statistics();
    if stats.is_empty() {
        return Err(all_degenerate(dist.len()));
    }
    let c_alpha = critical_value(&stats, alpha, Sided::One)?;
    Ok(OneSidedTest {
        method: dist.method,
        t1,
        critical_value: c_alpha,
        reject: t1 > c_alpha,
        p_value: dist.p_value(t1, Sided::One)?,
        alpha,
        n_permutations: dist.len(),
        seed: dist.seed,
        degenerate_draw_count: dist.degenerate_count(),
    })
}

/// Normal-approximation interval `Ĉ ± z_{1−α/2} σ̂₊/√n`, for comparison.
pub fn asymptotic_ci(
    est: &ConcordanceEstimate,
    var: &VarianceEstimate,
    alpha: f64,
) -> Result<InferenceResult> {
    check_alpha(alpha)?;
    let n = est.residuals.len();
    let sigma_plus = sigma_plus_checked(var)?;
    let normal = Normal::standard();
    let z = normal.inverse_cdf(1.0 - alpha / 2.0).max(0.0);
    let t_obs = variance::t_statistic(est.c_hat, 0.0, sigma_plus, n)?;
    let half = z * sigma_plus / (n as f64).sqrt();
    Ok(InferenceResult {
        method: Method::Asymptotic,
        n,
        c_hat: est.c_hat,
        sigma_plus,
        t_obs,
        critical_value: z,
        ci_lower: est.c_hat - half,
        ci_upper: est.c_hat + half,
        p_value: 2.0 * normal.sf(t_obs.abs()),
        alpha,
        n_permutations: 0,
        seed: None,
        degenerate_draw_count: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceOptions {
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
    pub exact: bool,
    pub complement: Complement,
    pub execution: Execution,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            permutations: DEFAULT_PERMUTATIONS,
            seed: 0,
            exact: false,
            complement: Complement::Estimated,
            execution: Execution::default(),
        }
    }
}

/// Everything computed for one data set.
#[derive(Debug, Clone)]
pub struct Inference {
    pub estimate: ConcordanceEstimate,
    pub variance: VarianceEstimate,
    pub distribution: PermutationDistribution,
    pub interval: InferenceResult,
    pub test: OneSidedTest,
    pub asymptotic: InferenceResult,
}

pub fn infer(g: &Graph, y: &OutcomeVector, opts: &InferenceOptions) -> Result<Inference> {
    check_alpha(opts.alpha)?;
    let estimate = estimator::estimate_gc_with(g, y, opts.complement)?;
    let variance = variance::studentize(g, &estimate)?;
    let distribution = if opts.exact {
        PermutationDistribution::exact(g, &estimate.residuals, opts.complement, opts.execution)?
    } else {
        PermutationDistribution::sampled(
            g,
            &estimate.residuals,
            opts.permutations,
            opts.seed,
            opts.complement,
            opts.execution,
        )?
    };
    let interval = confidence_interval(&estimate, &variance, &distribution, opts.alpha)?;
    let test = test_positive_gc(interval.t_obs, &distribution, opts.alpha)?;
    let asymptotic = asymptotic_ci(&estimate, &variance, opts.alpha)?;
    Ok(Inference {
        estimate,
        variance,
        distribution,
        interval,
        test,
        asymptotic,
    })
}
