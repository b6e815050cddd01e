//! `η_m`, `λ_m`, `θ` and the rate budget.

use serde::{Deserialize, Serialize};

use super::{measure_from_gf, NodeGrid, Side};
use crate::asep_exact::{characterization_epsilon, phase_of, Backend, BinaryMeasure, BoundaryParams, Phase};
use crate::aw_measure::{
    chain_integrate_nested, chain_integrate_projection, multi_integrate_nested, multi_integrate_projection,
    pi_marginal, MultiAwSpec, PointKind, Poly, SupportPoint, Tolerances,
};
use crate::error::{Error, Result};
use crate::real::{DoubleDouble, Precision, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    pub backend: Backend,
    pub precision: Precision,
    pub tol: Tolerances,
    /// Halvings of ε (each with doubled precision) after a negative weight.
    pub retries: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            backend: Backend::Projection,
            precision: Precision::from_env(),
            tol: Tolerances::default(),
            retries: 3,
        }
    }
}

fn resonant(x: f64, q: f64) -> bool {
    if q == 0.0 {
        return (x - 1.0).abs() <= 1e-9;
    }
    let l = x.ln() / q.ln();
    (l - l.round()).abs() <= 1e-9 * l.abs().max(1.0)
}

fn with_retries<F>(eps0: f64, side: Side, m: usize, opts: &LimitOptions, mut once: F) -> Result<BinaryMeasure>
where
    F: FnMut(&NodeGrid, Precision) -> Result<BinaryMeasure>,
{
    let mut eps = eps0;
    let mut prec = opts.precision;
    let mut attempt = 0;
    loop {
        let grid = NodeGrid::new(m, eps, side)?;
        match once(&grid, prec) {
            Err(Error::NegativeMass { .. }) if attempt < opts.retries => {
                attempt += 1;
                eps *= 0.5;
                prec = prec.doubled().unwrap_or(prec);
            }
            other => return other,
        }
    }
}

fn check_eta(p: &BoundaryParams) -> Result<()> {
    p.validate()?;
    if !(p.a.max(p.c) > 1.0) {
        return Err(Error::Phase(format!("η_m needs max(A, C) > 1, got A={} C={}", p.a, p.c)));
    }
    if p.a >= 1.0 && p.c >= 1.0 && resonant(p.a / p.c, p.q) {
        return Err(Error::Phase(format!("A/C = {} is a power of q", p.a / p.c)));
    }
    Ok(())
}

fn eta_once<R: Real>(p: &BoundaryParams, grid: &NodeGrid, opts: &LimitOptions) -> Result<BinaryMeasure> {
    let f = R::from_f64;
    let (a, b, c, d, q) = (f(p.a), f(p.b), f(p.c), f(p.d), f(p.q));
    let pi1 = pi_marginal(a, b, c, d, q, R::one(), &opts.tol)?;
    let top = pi1
        .top_atom()
        .ok_or_else(|| Error::Phase("π_1 has no atom at the top of its support".into()))?;
    let start = SupportPoint { x: top.location, kind: PointKind::Atom { root: top.root } };
    let norm = f(2.0) + f(2.0) * top.location;
    let eval = |t: &[R]| -> Result<R> {
        let spec = MultiAwSpec::new(a, b, c, d, q, t.to_vec());
        let factors: Vec<Poly<R>> = t.iter().map(|&ti| Poly::affine(R::one() + ti, f(2.0) * ti.sqrt())).collect();
        let v = match opts.backend {
            Backend::Nested => chain_integrate_nested(&spec, &factors, R::one(), start, &opts.tol)?,
            Backend::Projection => chain_integrate_projection(&spec, &factors, R::one(), start, &opts.tol)?,
        };
        Ok(v / norm.powi(t.len() as i32))
    };
    measure_from_gf(eval, grid)
}

/// `η_m`, the limit of `μ_n` on the last `m` sites.
pub fn eta_measure(params: &BoundaryParams, m: usize) -> Result<BinaryMeasure> {
    eta_measure_with(params, m, &LimitOptions::default())
}

pub fn eta_measure_with(params: &BoundaryParams, m: usize, opts: &LimitOptions) -> Result<BinaryMeasure> {
    check_eta(params)?;
    let eps = characterization_epsilon(params);
    with_retries(eps, Side::AtOrAboveOne, m, opts, |grid, prec| match prec {
        Precision::Double => eta_once::<f64>(params, grid, opts),
        Precision::DoubleDouble => eta_once::<DoubleDouble>(params, grid, opts),
    })
}

fn check_lambda(p: &BoundaryParams) -> Result<()> {
    p.validate()?;
    if !(p.a > 1.0 && p.a > p.c) {
        return Err(Error::Phase(format!("λ_m needs A > 1 and A > C, got A={} C={}", p.a, p.c)));
    }
    if p.c >= 1.0 && resonant(p.c / p.a, p.q) {
        return Err(Error::Phase(format!("C/A = {} is a power of q", p.c / p.a)));
    }
    Ok(())
}

/// `ε` for `λ_m`: the time-reversed measure has parameters `(C, D, A, 1/A)`
/// and times `1/t`, so the rule is applied to `(C, D, A)` and mapped back
/// through `t ↦ 1/t`.
pub fn lambda_epsilon(p: &BoundaryParams) -> f64 {
    let rev = BoundaryParams { a: p.c, b: p.d, c: p.a, d: 0.0, q: p.q };
    let e = characterization_epsilon(&rev);
    e / (1.0 + e)
}

fn lambda_once<R: Real>(p: &BoundaryParams, grid: &NodeGrid, opts: &LimitOptions) -> Result<BinaryMeasure> {
    let f = R::from_f64;
    let (a, c, d, q) = (f(p.a), f(p.c), f(p.d), f(p.q));
    let m = grid.m as i32;
    let one = R::one();
    let pref = a.powi(m) / (one + a).powi(2 * m);
    let eval = |t: &[R]| -> Result<R> {
        let spec = MultiAwSpec::new(a, one / a, c, d, q, t.to_vec());
        let factors: Vec<Poly<R>> = t.iter().map(|&ti| Poly::affine(one + ti, f(2.0) * ti.sqrt())).collect();
        let v = match opts.backend {
            Backend::Nested => multi_integrate_nested(&spec, &factors, &opts.tol)?,
            Backend::Projection => multi_integrate_projection(&spec, &factors, &opts.tol)?,
        };
        Ok(pref * v)
    };
    measure_from_gf(eval, grid)
}

/// `λ_m`, the high density limit of `μ_n` on the first `m` sites.
pub fn lambda_measure(params: &BoundaryParams, m: usize) -> Result<BinaryMeasure> {
    lambda_measure_with(params, m, &LimitOptions::default())
}

pub fn lambda_measure_with(params: &BoundaryParams, m: usize, opts: &LimitOptions) -> Result<BinaryMeasure> {
    check_lambda(params)?;
    let eps = lambda_epsilon(params);
    with_retries(eps, Side::AtOrBelowOne, m, opts, |grid, prec| match prec {
        Precision::Double => lambda_once::<f64>(params, grid, opts),
        Precision::DoubleDouble => lambda_once::<DoubleDouble>(params, grid, opts),
    })
}

/// `θ = (1 + y_0^*) / (1 + y_0)` from the support of `π_1`.
pub fn theta_from_support(params: &BoundaryParams) -> Result<f64> {
    params.validate()?;
    match phase_of(params.a, params.c) {
        Phase::LowDensity | Phase::HighDensity => {}
        other => return Err(Error::Phase(format!("θ needs LD or HD, got {other}"))),
    }
    let f = DoubleDouble::from_f64;
    let tol = Tolerances::default();
    let pi1 = pi_marginal(f(params.a), f(params.b), f(params.c), f(params.d), f(params.q), DoubleDouble::one(), &tol)?;
    let top = pi1.top_atom().ok_or_else(|| Error::Phase("π_1 has no top atom".into()))?;
    let y0 = top.location;
    let below = pi1.support_atoms().map(|a| a.location).find(|&x| x < y0);
    let ystar = below.map_or(DoubleDouble::one(), |x| x.max(DoubleDouble::one()));
    Ok(((DoubleDouble::one() + ystar) / (DoubleDouble::one() + y0)).to_f64())
}

/// `s = -ln(θ) / 3`.
pub fn rate_budget(theta: f64) -> f64 {
    -theta.ln() / 3.0
}

/// Behaviour of `θ^n (H m_n)^{3 m_n}` along `m_n = max(1, ⌊s n / ln n⌋)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub theta: f64,
    pub h: f64,
    pub s: f64,
    pub n_max: usize,
    /// From this `n` on, the values at the jumps of `m_n` decrease strictly;
    /// between jumps the sequence always decreases.
    pub n_star: Option<usize>,
    pub log10_at_n_max: f64,
    /// First `n` with every later value below `1e-6`.
    pub below_from: Option<usize>,
}

impl BudgetReport {
    pub fn pass(&self) -> bool {
        self.n_star.is_some_and(|n| n <= self.n_max / 2) && self.log10_at_n_max < -6.0 && self.below_from.is_some()
    }
}

pub fn budget_check(theta: f64, h: f64, n_max: usize) -> Result<BudgetReport> {
    if !(theta > 0.0 && theta < 1.0) || !(h > 0.0) || n_max < 3 {
        return Err(Error::Domain(format!("budget needs θ in (0,1), H > 0, n_max ≥ 3; got {theta}, {h}, {n_max}")));
    }
    let s = rate_budget(theta);
    let m_of = |n: usize| ((s * n as f64 / (n as f64).ln()).floor() as usize).max(1);
    let log_e = |n: usize| {
        let m = m_of(n) as f64;
        n as f64 * theta.ln() + 3.0 * m * (h * m).ln()
    };
    let vals: Vec<(usize, f64)> = (2..=n_max).map(|n| (n, log_e(n))).collect();
    // peaks: first n of each constant stretch of m_n
    let peaks: Vec<(usize, f64)> = vals
        .iter()
        .enumerate()
        .filter(|(i, (n, _))| *i == 0 || m_of(*n) != m_of(*n - 1))
        .map(|(_, v)| *v)
        .collect();
    let mut n_star = None;
    for i in (0..peaks.len()).rev() {
        if i + 1 < peaks.len() && peaks[i + 1].1 >= peaks[i].1 {
            break;
        }
        n_star = Some(peaks[i].0);
    }
    let thr = -6.0 * std::f64::consts::LN_10;
    let mut below_from = None;
    for &(n, v) in vals.iter().rev() {
        if v >= thr {
            break;
        }
        below_from = Some(n);
    }
    Ok(BudgetReport {
        theta,
        h,
        s,
        n_max,
        n_star,
        log10_at_n_max: vals.last().map_or(0.0, |v| v.1 / std::f64::consts::LN_10),
        below_from,
    })
}
