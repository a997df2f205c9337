//! Straight-from-definition reference computations on dense adjacency
//! matrices. Deliberately naive: no CSR, no caching, no compensated sums.

#![allow(dead_code)]

use netconcord::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<bool>>;

pub fn dense(g: &Graph) -> Dense {
    let n = g.n();
    let mut a = vec![vec![false; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = true;
        a[j][i] = true;
    }
    a
}

pub fn degree(a: &Dense, i: usize) -> usize {
    a[i].iter().filter(|&&x| x).count()
}

/// Vertices `j != i` with a positive entry in row `i` of `I + A + A²`.
pub fn two_hop(a: &Dense, i: usize) -> Vec<usize> {
    let n = a.len();
    (0..n)
        .filter(|&j| j != i && (a[i][j] || (0..n).any(|k| a[i][k] && a[k][j])))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub e: Vec<f64>,
    pub gamma: f64,
    pub gamma_c: f64,
    pub c_hat: f64,
    pub sigma2: f64,
    pub sigma2_1: f64,
    pub sigma2_plus: f64,
    pub t: f64,
}

pub fn residuals(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let v = (y.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    y.iter().map(|x| (x - mean) / v).collect()
}

/// All quantities from already standardized residuals `e`.
pub fn from_residuals(a: &Dense, e: &[f64]) -> Reference {
    let n = a.len();
    let mut ah = vec![0.0; n];
    let mut ac = vec![0.0; n];
    for i in 0..n {
        let (mut s, mut d, mut sc, mut dc) = (0.0, 0usize, 0.0, 0usize);
        for j in 0..n {
            if j == i {
                continue;
            }
            if a[i][j] {
                s += e[j];
                d += 1;
            } else {
                sc += e[j];
                dc += 1;
            }
        }
        ah[i] = if d == 0 { 0.0 } else { s / d as f64 };
        ac[i] = sc / dc as f64;
    }
    let gamma = (0..n).map(|i| e[i] * ah[i]).sum::<f64>() / n as f64;
    let gamma_c = (0..n).map(|i| e[i] * ac[i]).sum::<f64>() / n as f64;
    let q: Vec<f64> = (0..n).map(|i| e[i] * (ah[i] - e[i] * gamma)).collect();
    let qbar: Vec<f64> = (0..n)
        .map(|i| {
            let di = degree(a, i);
            let class: Vec<usize> = (0..n).filter(|&j| degree(a, j) == di).collect();
            class.iter().map(|&j| q[j]).sum::<f64>() / class.len() as f64
        })
        .collect();
    let r: Vec<f64> = (0..n).map(|i| q[i] - qbar[i]).collect();
    let mut sigma2 = 0.0;
    for i in 0..n {
        let mut inner = r[i];
        for j in two_hop(a, i) {
            inner += r[j];
        }
        sigma2 += r[i] * inner;
    }
    sigma2 /= n as f64;
    let sigma2_1 = r.iter().map(|x| x * x).sum::<f64>() / n as f64;
    // same numerical-zero convention as the library
    let sigma2_plus = if sigma2 > netconcord::variance::DEGENERACY_TOLERANCE {
        sigma2
    } else {
        sigma2_1
    };
    let c_hat = gamma - gamma_c;
    Reference {
        e: e.to_vec(),
        gamma,
        gamma_c,
        c_hat,
        sigma2,
        sigma2_1,
        sigma2_plus,
        t: (n as f64).sqrt() * c_hat / sigma2_plus.sqrt(),
    }
}

pub fn reference(a: &Dense, y: &[f64]) -> Reference {
    from_residuals(a, &residuals(y))
}

/// Reference `T_π`: relabel the residuals, keep the graph.
pub fn t_pi(a: &Dense, e: &[f64], pi: &[usize]) -> Reference {
    let ep: Vec<f64> = pi.iter().map(|&k| e[k]).collect();
    from_residuals(a, &ep)
}

pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() < 1e-14
}
