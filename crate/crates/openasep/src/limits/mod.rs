//! Boundary limits of `μ_n`: Bernoulli products, `λ_m`, `η_m`, total
//! variation bounds, `θ` and the `n / ln n` budget.

mod boundary;
mod scan;

pub use boundary::{
    eta_measure, eta_measure_with, lambda_epsilon, lambda_measure, lambda_measure_with, rate_budget, budget_check,
    theta_from_support, BudgetReport, LimitOptions,
};
pub use scan::{convergence_scan, convergence_scan_with, ConvergenceRow, ScanOptions, ScanReport, ScanTarget};

use serde::{Deserialize, Serialize};

use crate::asep_exact::BinaryMeasure;
use crate::error::{Error, Result};
use crate::real::Real;

/// `Ber_m(ρ)`.
pub fn bernoulli_product(m: usize, rho: f64) -> BinaryMeasure {
    BinaryMeasure::product(&vec![rho; m])
}

/// `½ Σ |μ - ν|`.
pub fn tv_distance(mu: &BinaryMeasure, nu: &BinaryMeasure) -> Result<f64> {
    if mu.m != nu.m {
        return Err(Error::Domain(format!("lattice lengths differ: {} vs {}", mu.m, nu.m)));
    }
    Ok(0.5 * mu.weights.iter().zip(&nu.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Generating-function bound on `d_TV` from the values on a tensor grid of
/// node pairs `0 < t_{i,0} < t_{i,1}`.
pub fn gf_tv_bound(mu: &BinaryMeasure, nu: &BinaryMeasure, pairs: &[(f64, f64)]) -> Result<f64> {
    let m = mu.m;
    if nu.m != m || pairs.len() != m {
        return Err(Error::Domain("grid and measures disagree on m".into()));
    }
    if pairs.iter().any(|&(a, b)| !(a > 0.0 && b > a)) {
        return Err(Error::Domain("node pairs need 0 < t0 < t1".into()));
    }
    let pref: f64 = pairs.iter().map(|&(a, b)| (1.0 + b) / (b - a)).product();
    let mut sum = 0.0;
    let mut t = vec![0.0; m];
    for sel in 0..1usize << m {
        for (i, &(a, b)) in pairs.iter().enumerate() {
            t[i] = if sel >> i & 1 == 1 { b } else { a };
        }
        sum += (mu.generating_function(&t)? - nu.generating_function(&t)?).abs();
    }
    Ok(0.5 * pref * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Nodes in `[1, 1+ε)`.
    AtOrAboveOne,
    /// Nodes in `(1-ε, 1]`.
    AtOrBelowOne,
}

/// Interleaved nodes `t_{i,υ} = base + (2i - 1 + υ) ε / (2m + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGrid {
    pub m: usize,
    pub epsilon: f64,
    pub side: Side,
    /// `nodes[i-1] = (t_{i,0}, t_{i,1})`.
    pub nodes: Vec<(f64, f64)>,
}

impl NodeGrid {
    pub fn new(m: usize, epsilon: f64, side: Side) -> Result<Self> {
        if m == 0 || !(epsilon > 0.0) {
            return Err(Error::Domain(format!("grid needs m ≥ 1 and ε > 0, got m={m} ε={epsilon}")));
        }
        let base = match side {
            Side::AtOrAboveOne => 1.0,
            Side::AtOrBelowOne => 1.0 - epsilon,
        };
        let den = (2 * m + 1) as f64;
        let at = |k: usize| base + k as f64 * epsilon / den;
        let nodes = (1..=m).map(|i| (at(2 * i - 1), at(2 * i))).collect();
        Ok(NodeGrid { m, epsilon, side, nodes })
    }

    /// The selection `(t_{1,υ_1}, …, t_{m,υ_m})` with `υ_i` bit `i-1` of `sel`.
    pub fn select(&self, sel: usize) -> Vec<f64> {
        self.nodes.iter().enumerate().map(|(i, &(a, b))| if sel >> i & 1 == 1 { b } else { a }).collect()
    }
}

/// Weight below which recovered probabilities are reported as negative.
pub const NEGATIVE_TOL: f64 = 1e-8;

/// Recovers the measure whose generating function takes the given values on
/// the grid, by two-node interpolation in each coordinate.
pub fn measure_from_gf<R, F>(mut eval: F, grid: &NodeGrid) -> Result<BinaryMeasure>
where
    R: Real,
    F: FnMut(&[R]) -> Result<R>,
{
    let m = grid.m;
    let nodes: Vec<(R, R)> = grid.nodes.iter().map(|&(a, b)| (R::from_f64(a), R::from_f64(b))).collect();
    let mut v = Vec::with_capacity(1 << m);
    let mut t = vec![R::zero(); m];
    for sel in 0..1usize << m {
        for (i, &(a, b)) in nodes.iter().enumerate() {
            t[i] = if sel >> i & 1 == 1 { b } else { a };
        }
        v.push(eval(&t)?);
    }
    // g = c0 + c1 t per coordinate: c1 = (g1 - g0)/(t1 - t0), c0 = g0 - c1 t0
    for (i, &(a, b)) in nodes.iter().enumerate() {
        let bit = 1usize << i;
        for w in 0..1usize << m {
            if w & bit == 0 {
                let (g0, g1) = (v[w], v[w | bit]);
                let c1 = (g1 - g0) / (b - a);
                v[w] = g0 - c1 * a;
                v[w | bit] = c1;
            }
        }
    }
    let mut weights: Vec<f64> = v.iter().map(|x| x.to_f64()).collect();
    for (word, w) in weights.iter_mut().enumerate() {
        if *w < 0.0 {
            if *w < -NEGATIVE_TOL {
                return Err(Error::NegativeMass { word, weight: *w });
            }
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Domain(format!("recovered weights sum to {total}")));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    BinaryMeasure::probability(m, weights)
}

/// Site-and-value flip `τ_i ↦ 1 - τ_{m+1-i}`, the same map as particle-hole
/// duality.
pub fn flip(mu: &BinaryMeasure) -> BinaryMeasure {
    mu.particle_hole_dual()
}

/// `Ber_m(ρ*)` with `ρ*` the site-1 density of `mu`, and its distance to `mu`.
pub fn product_approximation(mu: &BinaryMeasure) -> Result<(BinaryMeasure, f64)> {
    let prod = bernoulli_product(mu.m, mu.site_density(1));
    let d = tv_distance(mu, &prod)?;
    Ok((prod, d))
}

#[cfg(test)]
mod tests;
