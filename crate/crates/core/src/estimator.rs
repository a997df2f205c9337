//! Point estimation of graph concordance.
//!
//! Outcomes are standardized to residuals `ê`, each vertex gets the mean
//! residual of its neighbors (`â`) and of its non-neighbors (`âᶜ`), and the
//! concordance estimate is `Ĉ = γ̂ − γ̂ᶜ` with `γ̂ = mean(ê·â)` and
//! `γ̂ᶜ = mean(ê·âᶜ)`.
//!
//! Two independent routes are provided: [`estimate_gc`] walks vertices one
//! at a time, [`estimate_gc_matrix`] works with whole vectors through a
//! sparse adjacency product. They must agree to 1e-10 relative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sum::{self, NeumaierSum};

/// Per-vertex real outcomes aligned to graph vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeVector(Vec<f64>);

impl OutcomeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "outcome at vertex {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    fn check_against(&self, g: &Graph) -> Result<()> {
        if self.len() != g.n() {
            return Err(Error::Config(format!(
                "outcome vector has {} entries but graph has {} vertices",
                self.len(),
                g.n()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for OutcomeVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// How the non-neighbor correlation `γ̂ᶜ` enters the estimate.
///
/// Under a dependency graph the population `γᶜ` is zero; `Zero` imposes that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complement {
    #[default]
    Estimated,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceEstimate {
    pub gamma_hat: f64,
    pub gamma_hat_c: f64,
    pub c_hat: f64,
    pub residuals: Vec<f64>,
    pub v_hat: f64,
    pub a_hat: Vec<f64>,
    pub a_hat_c: Vec<f64>,
}

/// Center and scale outcomes: `ê_i = (Y_i − Ȳ)/v̂` with `v̂² = mean((Y − Ȳ)²)`.
///
/// The residuals are re-centered once more so their mean is zero to rounding.
pub fn standardize(y: &[f64]) -> Result<(Vec<f64>, f64)> {
    if y.len() < 2 {
        return Err(Error::Config(format!(
            "need at least two outcomes to standardize, got {}",
            y.len()
        )));
    }
    let n = y.len() as f64;
    let mean = sum::mean(y);
    let var = sum::sum(y.iter().map(|v| (v - mean) * (v - mean))) / n;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if var <= (4.0 * f64::EPSILON * scale).powi(2) || y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateVariance(
            "outcomes are constant; residuals cannot be standardized".into(),
        ));
    }
    let v_hat = var.sqrt();
    let mut residuals: Vec<f64> = y.iter().map(|v| (v - mean) / v_hat).collect();
    let drift = sum::mean(&residuals);
    for e in &mut residuals {
        *e -= drift;
    }
    Ok((residuals, v_hat))
}

/// Neighbor and non-neighbor residual averages.
///
/// `â_i = 0` for isolated vertices. `âᶜ_i` divides by `n − 1 − d(i)`, which
/// graph construction guarantees is positive.
pub fn neighbor_averages(g: &Graph, residuals: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    debug_assert_eq!(residuals.len(), n);
    let total = sum::sum(residuals.iter().copied());
    let mut a_hat = Vec::with_capacity(n);
    let mut a_hat_c = Vec::with_capacity(n);
    for (i, &e_i) in residuals.iter().enumerate() {
        let nbrs = g.neighbors(i);
        let nbr_sum = sum::sum(nbrs.iter().map(|&j| residuals[j]));
        let d = nbrs.len();
        a_hat.push(if d == 0 { 0.0 } else { nbr_sum / d as f64 });
        let mut rest = NeumaierSum::new();
        rest.add(total);
        rest.add(-e_i);
        rest.add(-nbr_sum);
        a_hat_c.push(rest.value() / (n - 1 - d) as f64);
    }
    (a_hat, a_hat_c)
}

/// Build the estimate from already standardized residuals.
///
/// This is the entry point for permuted residuals, which are relabeled but
/// never re-standardized.
pub fn estimate_from_residuals(
    g: &Graph,
    residuals: Vec<f64>,
    v_hat: f64,
    complement: Complement,
) -> ConcordanceEstimate {
    let n = g.n() as f64;
    let (a_hat, a_hat_c) = neighbor_averages(g, &residuals);
    let gamma_hat = sum::sum(residuals.iter().zip(&a_hat).map(|(e, a)| e * a)) / n;
    let gamma_hat_c = match complement {
        Complement::Estimated => {
            sum::sum(residuals.iter().zip(&a_hat_c).map(|(e, a)| e * a)) / n
        }
        Complement::Zero => 0.0,
    };
    ConcordanceEstimate {
        gamma_hat,
        gamma_hat_c,
        c_hat: gamma_hat - gamma_hat_c,
        residuals,
        v_hat,
        a_hat,
        a_hat_c,
    }
}

pub fn estimate_gc(g: &Graph, y: &OutcomeVector) -> Result<ConcordanceEstimate> {
    estimate_gc_with(g, y, Complement::Estimated)
}

pub fn estimate_gc_with(
    g: &Graph,
    y: &OutcomeVector,
    complement: Complement,
) -> Result<ConcordanceEstimate> {
    y.check_against(g)?;
    let (residuals, v_hat) = standardize(y.values())?;
    Ok(estimate_from_residuals(g, residuals, v_hat, complement))
}

/// Vectorized route: `ê_A = (A ê) ⊙ d⁻¹`, `ê_Aᶜ = (Aᶜ ê) ⊙ (dᶜ)⁻¹` with
/// `Aᶜ = 11ᵀ − I − A`, and `Ĉ = 1ᵀ(ê ⊙ (ê_A − ê_Aᶜ))/n`.
pub fn estimate_gc_matrix(g: &Graph, y: &OutcomeVector) -> Result<ConcordanceEstimate> {
    y.check_against(g)?;
    let (e, v_hat) = standardize(y.values())?;
    let n = g.n();
    let nf = n as f64;

    let degrees = g.degrees();
    let d_inv: Vec<f64> = degrees
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / d as f64 })
        .collect();
    let d_inv_c: Vec<f64> = degrees.iter().map(|&d| 1.0 / (n - 1 - d) as f64).collect();

    let a_e = g.adjacency().matvec(&e);
    let total = sum::sum(e.iter().copied());
    let ac_e: Vec<f64> = e
        .iter()
        .zip(&a_e)
        .map(|(&ei, &aei)| sum::sum([total, -ei, -aei]))
        .collect();

    let e_a = hadamard(&a_e, &d_inv);
    let e_ac = hadamard(&ac_e, &d_inv_c);
    // 1ᵀ(ê ⊙ (ê_A − ê_Aᶜ))/n, split so that Ĉ = γ̂ − γ̂ᶜ holds exactly
    let gamma_hat = sum::sum(hadamard(&e, &e_a)) / nf;
    let gamma_hat_c = sum::sum(hadamard(&e, &e_ac)) / nf;

    Ok(ConcordanceEstimate {
        gamma_hat,
        gamma_hat_c,
        c_hat: gamma_hat - gamma_hat_c,
        residuals: e,
        v_hat,
        a_hat: e_a,
        a_hat_c: e_ac,
    })
}

fn hadamard(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching() -> Graph {
        Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()
    }

    fn path4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn y(values: &[f64]) -> OutcomeVector {
        OutcomeVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn standardize_examples() {
        assert!(matches!(
            standardize(&[1.0, 1.0]),
            Err(Error::DegenerateVariance(_))
        ));
        let (e, v) = standardize(&[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert_eq!(e, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(v, 1.0);
        let (e, v) = standardize(&[0.0, 1.0, 2.0]).unwrap();
        assert!((v * v - 2.0 / 3.0).abs() < 1e-15);
        let r = 1.5f64.sqrt();
        for (got, want) in e.iter().zip([-r, 0.0, r]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn standardize_rejects_near_constant_float_noise() {
        assert!(standardize(&[0.1, 0.1, 0.1]).is_err());
        assert!(standardize(&[5.0]).is_err());
    }

    #[test]
    fn neighbor_averages_examples() {
        let (a, ac) = neighbor_averages(&matching(), &[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(a, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(ac, vec![-1.0, -1.0, 1.0, 1.0]);

        let (a, ac) = neighbor_averages(&path4(), &[-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(a, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(ac, vec![0.0, -1.0, -1.0, 0.0]);

        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let (a, _) = neighbor_averages(&g, &[1.0, 1.0, -2.0]);
        assert_eq!(a[2], 0.0);
    }

    #[test]
    fn estimate_examples_both_routes() {
        for est in [
            estimate_gc(&matching(), &y(&[1.0, 1.0, -1.0, -1.0])).unwrap(),
            estimate_gc_matrix(&matching(), &y(&[1.0, 1.0, -1.0, -1.0])).unwrap(),
        ] {
            assert_eq!(est.gamma_hat, 1.0);
            assert_eq!(est.gamma_hat_c, -1.0);
            assert_eq!(est.c_hat, 2.0);
        }
        for est in [
            estimate_gc(&path4(), &y(&[0.0, 1.0, 1.0, 0.0])).unwrap(),
            estimate_gc_matrix(&path4(), &y(&[0.0, 1.0, 1.0, 0.0])).unwrap(),
        ] {
            assert_eq!(est.gamma_hat, -0.5);
            assert_eq!(est.gamma_hat_c, -0.5);
            assert_eq!(est.c_hat, 0.0);
        }
    }

    #[test]
    fn zero_complement_mode() {
        let est =
            estimate_gc_with(&matching(), &y(&[1.0, 1.0, -1.0, -1.0]), Complement::Zero).unwrap();
        assert_eq!(est.gamma_hat_c, 0.0);
        assert_eq!(est.c_hat, 1.0);
    }

    #[test]
    fn length_mismatch_and_nonfinite_rejected() {
        assert!(estimate_gc(&matching(), &y(&[1.0, 2.0, 3.0])).is_err());
        assert!(OutcomeVector::new(vec![1.0, f64::NAN]).is_err());
    }
}
