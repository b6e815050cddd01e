//! Generator of open ASEP on `{1..n}` and its stationary vector.

use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::measure::BinaryMeasure;
use super::OpenAsepRates;
use crate::error::{Error, Result};
use crate::real::{DoubleDouble, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Largest lattice accepted.
    pub cap: usize,
    /// Iterative refinement with double-double residuals.
    pub extended: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cap: 14, extended: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySolution {
    pub measure: BinaryMeasure,
    /// `‖π Q‖_∞`.
    pub residual: f64,
    /// Smallest singular value of the normalized square system.
    pub sigma_min: f64,
}

/// Outgoing transitions `(target, rate)` of every state.
pub fn generator_transitions(n: usize, r: &OpenAsepRates) -> Vec<Vec<(usize, f64)>> {
    let size = 1usize << n;
    let last = 1usize << (n - 1);
    (0..size)
        .map(|w| {
            let mut out = Vec::with_capacity(n + 2);
            let mut push = |to: usize, rate: f64| {
                if rate > 0.0 {
                    out.push((to, rate));
                }
            };
            if w & 1 == 0 {
                push(w | 1, r.alpha);
            } else {
                push(w & !1, r.gamma);
            }
            if w & last != 0 {
                push(w & !last, r.beta);
            } else {
                push(w | last, r.delta);
            }
            for i in 0..n - 1 {
                let (here, next) = (w >> i & 1, w >> (i + 1) & 1);
                let swapped = w ^ (0b11 << i);
                if here == 1 && next == 0 {
                    push(swapped, 1.0);
                } else if here == 0 && next == 1 {
                    push(swapped, r.q);
                }
            }
            out
        })
        .collect()
}

fn residual_inf(trans: &[Vec<(usize, f64)>], pi: &[f64]) -> f64 {
    let mut r = vec![0.0; pi.len()];
    for (j, out) in trans.iter().enumerate() {
        for &(k, rate) in out {
            r[j] -= pi[j] * rate;
            r[k] += pi[j] * rate;
        }
    }
    r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `M π - e_0` in double-double, where `M` is `Qᵀ` with row 0 replaced by ones.
fn system_residual_dd(trans: &[Vec<(usize, f64)>], pi: &[f64]) -> Vec<f64> {
    let mut r = vec![DoubleDouble::zero(); pi.len()];
    for (j, out) in trans.iter().enumerate() {
        let p = DoubleDouble::from_f64(pi[j]);
        for &(k, rate) in out {
            let flow = p * DoubleDouble::from_f64(rate);
            r[j] -= flow;
            r[k] += flow;
        }
    }
    let total = pi.iter().fold(DoubleDouble::zero(), |acc, &v| acc + DoubleDouble::from_f64(v));
    r[0] = total - DoubleDouble::one();
    r.iter().map(|v| v.to_f64()).collect()
}

fn col(v: &[f64]) -> Mat<f64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

/// Stationary measure with diagnostics.
pub fn stationary_solve(n: usize, rates: &OpenAsepRates, opts: &SolveOptions) -> Result<StationarySolution> {
    rates.validate()?;
    if n == 0 {
        return Err(Error::Domain("lattice needs at least one site".into()));
    }
    if n > opts.cap {
        return Err(Error::CapExceeded(format!("n={n} exceeds solver cap {}", opts.cap)));
    }
    let size = 1usize << n;
    let trans = generator_transitions(n, rates);
    let mut m = Mat::<f64>::zeros(size, size);
    for (j, out) in trans.iter().enumerate() {
        for &(k, rate) in out {
            if k != 0 {
                m.write(k, j, m.read(k, j) + rate);
            }
            if j != 0 {
                m.write(j, j, m.read(j, j) - rate);
            }
        }
    }
    for j in 0..size {
        m.write(0, j, 1.0);
    }
    let scale = trans.iter().map(|o| o.iter().map(|e| e.1).sum::<f64>()).fold(1.0f64, f64::max);
    let lu = m.partial_piv_lu();
    let mut rhs = vec![0.0; size];
    rhs[0] = 1.0;
    let x = lu.solve(&col(&rhs));
    let mut pi: Vec<f64> = (0..size).map(|i| x.read(i, 0)).collect();
    if opts.extended {
        for _ in 0..3 {
            let r = system_residual_dd(&trans, &pi);
            let d = lu.solve(&col(&r));
            for (i, p) in pi.iter_mut().enumerate() {
                *p -= d.read(i, 0);
            }
        }
    }

    // inverse iteration on (MᵀM)^{-1}
    let mut v: Vec<f64> = (0..size).map(|i| 1.0 + 0.5 * ((i * 7919 % 13) as f64 - 6.0) / 6.0).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    for _ in 0..30 {
        let w = lu.solve_transpose(&col(&v));
        let u = lu.solve(&w);
        let uv: Vec<f64> = (0..size).map(|i| u.read(i, 0)).collect();
        let nu = norm(&uv);
        let converged = ((nu - lambda) / nu).abs() < 1e-6;
        lambda = nu;
        v = uv.iter().map(|x| x / nu).collect();
        if converged {
            break;
        }
    }
    let sigma_min = 1.0 / lambda.sqrt();
    if !(sigma_min > 1e-12 * scale) {
        return Err(Error::SolveFailed(format!("normalized system is singular (σ_min = {sigma_min:e})")));
    }

    let residual = residual_inf(&trans, &pi);
    if !(residual <= 1e-8 * scale) {
        return Err(Error::SolveFailed(format!("stationarity residual {residual:e}")));
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    let measure = BinaryMeasure::probability(n, pi)?;
    Ok(StationarySolution { measure, residual, sigma_min })
}

/// `μ_n` for the given rates with default options.
pub fn stationary_measure(n: usize, rates: &OpenAsepRates) -> Result<BinaryMeasure> {
    Ok(stationary_solve(n, rates, &SolveOptions::default())?.measure)
}
