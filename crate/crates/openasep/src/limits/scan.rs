//! Distance from `μ_n` marginals to their limits over a list of `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{eta_measure_with, lambda_epsilon, lambda_measure_with, theta_from_support, LimitOptions};
use super::{bernoulli_product, tv_distance};
use crate::asep_exact::{
    characterization_epsilon, phase_of, stationary_solve, BinaryMeasure, BoundaryParams, Phase, SolveOptions, Which,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub m: usize,
    pub tv: f64,
    pub theta_pow: f64,
    pub fitted_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanTarget {
    /// First `m` sites against `Ber_m(1/(1+C))` (LD) or `λ_m` (HD).
    First,
    /// Last `m` sites against `η_m`.
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub target: ScanTarget,
    pub solve: SolveOptions,
    pub limit: LimitOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { target: ScanTarget::First, solve: SolveOptions::default(), limit: LimitOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub params: BoundaryParams,
    pub target: ScanTarget,
    pub limit_name: String,
    pub theta: f64,
    pub epsilon: Option<f64>,
    pub fitted_h: f64,
    pub limit: BinaryMeasure,
    pub rows: Vec<ConvergenceRow>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,m,tv,theta_pow,fitted_bound\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:.12e},{:.12e},{:.12e}\n", r.n, r.m, r.tv, r.theta_pow, r.fitted_bound));
        }
        s
    }
}

pub fn convergence_scan(params: &BoundaryParams, n_list: &[usize], m: usize) -> Result<ScanReport> {
    convergence_scan_with(params, n_list, m, &ScanOptions::default())
}

pub fn convergence_scan_with(
    params: &BoundaryParams,
    n_list: &[usize],
    m: usize,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let phase = phase_of(params.a, params.c);
    let theta = theta_from_support(params)?;
    if let Some(&n) = n_list.iter().find(|&&n| n < m) {
        return Err(Error::Domain(format!("n={n} is smaller than m={m}")));
    }
    let (limit, name, eps) = match (opts.target, phase) {
        (ScanTarget::First, Phase::LowDensity) => {
            (bernoulli_product(m, 1.0 / (1.0 + params.c)), format!("Ber_{m}(1/(1+C))"), None)
        }
        (ScanTarget::First, Phase::HighDensity) => {
            (lambda_measure_with(params, m, &opts.limit)?, format!("lambda_{m}"), Some(lambda_epsilon(params)))
        }
        (ScanTarget::Last, _) => (
            eta_measure_with(params, m, &opts.limit)?,
            format!("eta_{m}"),
            Some(characterization_epsilon(params)),
        ),
        (_, other) => return Err(Error::Phase(format!("scan needs LD or HD, got {other}"))),
    };
    let rates = params.to_rates();
    let which = match opts.target {
        ScanTarget::First => Which::First,
        ScanTarget::Last => Which::Last,
    };
    let tvs: Vec<Result<f64>> = n_list
        .par_iter()
        .map(|&n| {
            let mu = stationary_solve(n, &rates, &opts.solve)?.measure;
            tv_distance(&mu.marginal(which, m)?, &limit)
        })
        .collect();
    let mut rows = Vec::with_capacity(n_list.len());
    for (&n, tv) in n_list.iter().zip(tvs) {
        let tv = tv?;
        rows.push(ConvergenceRow { n, m, tv, theta_pow: theta.powi(n as i32), fitted_bound: 0.0 });
    }
    let mf = m as f64;
    let fitted_h = rows
        .iter()
        .map(|r| if r.tv > 0.0 { (r.tv / r.theta_pow).powf(1.0 / (3.0 * mf)) / mf } else { 0.0 })
        .fold(0.0, f64::max);
    for r in &mut rows {
        r.fitted_bound = r.theta_pow * (fitted_h * mf).powf(3.0 * mf);
    }
    Ok(ScanReport { params: *params, target: opts.target, limit_name: name, theta, epsilon: eps, fitted_h, limit, rows })
}
