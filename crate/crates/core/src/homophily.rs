//! Plug-in inbreeding homophily.
//!
//! With `Y_i = 1{type(i) = t}` and `Ȳ_i` the neighbor mean of `Y`:
//!
//! * `H  = Σ Y_i Ȳ_i d(i) / Σ Y_i d(i)` (share of type-t edge ends that land on type t)
//! * `H' = Σ Y_i Ȳ_i / Σ Y_i` (the same, each vertex weighted equally)
//! * `w  = mean(Y)`
//!
//! and `IH = (H − w)/(1 − w)`, `IH' = (H' − w)/(1 − w)`. Expectations in the
//! population definitions are replaced by sample values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomophilyEstimate {
    pub ih: f64,
    pub ih_prime: f64,
    pub h: f64,
    pub h_prime: f64,
    pub w: f64,
}

pub fn inbreeding_homophily<S: AsRef<str>>(
    g: &Graph,
    types: &[S],
    target: &str,
) -> Result<HomophilyEstimate> {
    if types.len() != g.n() {
        return Err(Error::Config(format!(
            "type vector has {} entries but graph has {} vertices",
            types.len(),
            g.n()
        )));
    }
    let y: Vec<f64> = types
        .iter()
        .map(|t| if t.as_ref() == target { 1.0 } else { 0.0 })
        .collect();
    let w = sum::mean(&y);
    if w == 0.0 || w == 1.0 {
        return Err(Error::DegenerateType { share: w });
    }

    let y_bar: Vec<f64> = (0..g.n())
        .map(|i| {
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                0.0
            } else {
                sum::sum(nbrs.iter().map(|&j| y[j])) / nbrs.len() as f64
            }
        })
        .collect();

    let typed_ends = sum::sum((0..g.n()).map(|i| y[i] * g.degree(i) as f64));
    if typed_ends == 0.0 {
        return Err(Error::NoTypedEdges);
    }
    let h = sum::sum((0..g.n()).map(|i| y[i] * y_bar[i] * g.degree(i) as f64)) / typed_ends;
    let h_prime = sum::sum(y.iter().zip(&y_bar).map(|(a, b)| a * b)) / sum::sum(y.iter().copied());

    Ok(HomophilyEstimate {
        ih: (h - w) / (1.0 - w),
        ih_prime: (h_prime - w) / (1.0 - w),
        h,
        h_prime,
        w,
    })
}
