//! Generating functions of `μ_n` on the last `m` sites as ratios of
//! Askey-Wilson integrals.

use serde::{Deserialize, Serialize};

use super::BoundaryParams;
use crate::aw_measure::{multi_integrate_nested, multi_integrate_projection, pi_marginal, MultiAwSpec, Poly, Tolerances};
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Nested,
    Projection,
}

/// Non-resonance conditions under which the integral formula holds directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationConditions {
    /// Some `l ≥ 0` has `q^l ABCD = 1`.
    pub abcd_resonant: bool,
    /// `A, C ≥ 1` and `A/C = q^l` for some integer `l`.
    pub ac_resonant: bool,
}

impl CharacterizationConditions {
    pub fn hold(&self) -> bool {
        !self.abcd_resonant && !self.ac_resonant
    }
}

const RES_TOL: f64 = 1e-9;

pub fn characterization_conditions(p: &BoundaryParams) -> CharacterizationConditions {
    let abcd = p.a * p.b * p.c * p.d;
    let mut abcd_resonant = false;
    let mut v = abcd;
    for _ in 0..=200 {
        if (v - 1.0).abs() <= RES_TOL {
            abcd_resonant = true;
        }
        if p.q == 0.0 || v.abs() < 0.5 {
            break;
        }
        v *= p.q;
    }
    let ac_resonant = p.a >= 1.0
        && p.c >= 1.0
        && if p.q == 0.0 {
            (p.a / p.c - 1.0).abs() <= RES_TOL
        } else {
            let l = (p.a / p.c).ln() / p.q.ln();
            (l - l.round()).abs() <= RES_TOL * l.abs().max(1.0)
        };
    CharacterizationConditions { abcd_resonant, ac_resonant }
}

/// `ε` with `1 + ε < min(1/q, 1/B²)`, `1 + ε < 1/A²` when `A < 1`, and
/// `[1, 1+ε)` free of `C q^l / A` when `A, C ≥ 1`; capped at 1 and shrunk by
/// the factor 0.9.
pub fn characterization_epsilon(p: &BoundaryParams) -> f64 {
    let mut bound = f64::INFINITY;
    if p.q > 0.0 {
        bound = bound.min(1.0 / p.q);
    }
    if p.b != 0.0 {
        bound = bound.min(1.0 / (p.b * p.b));
    }
    if p.a > 0.0 && p.a < 1.0 {
        bound = bound.min(1.0 / (p.a * p.a));
    }
    let mut eps = (bound - 1.0).min(1.0);
    if p.a >= 1.0 && p.c >= 1.0 {
        let base = p.c / p.a;
        if p.q == 0.0 {
            if base > 1.0 {
                eps = eps.min(base - 1.0);
            }
        } else {
            // the C q^l / A just above 1 has l near log(A/C) / log q
            let l0 = ((p.a / p.c).ln() / p.q.ln()).floor() as i64;
            for l in l0 - 2..=l0 + 2 {
                let v = base * p.q.powi(l as i32);
                if v > 1.0 {
                    eps = eps.min(v - 1.0);
                }
            }
        }
    }
    0.9 * eps
}

/// Right side of the integral formula for `E_{μ_n}[Π t_i^{τ_{n-m+i}}]`,
/// `1 ≤ t_1 ≤ … ≤ t_m < 1 + ε`.
pub fn theorem_rhs<R: Real>(p: &BoundaryParams, n: usize, t: &[R], backend: Backend, tol: &Tolerances) -> Result<R> {
    p.validate()?;
    let m = t.len();
    if m == 0 || m >= n {
        return Err(Error::Domain(format!("need 1 ≤ m < n, got m={m} n={n}")));
    }
    let cond = characterization_conditions(p);
    if !cond.hold() {
        return Err(Error::Domain(format!(
            "integral formula holds here only by continuity (ABCD resonant: {}, A/C resonant: {})",
            cond.abcd_resonant, cond.ac_resonant
        )));
    }
    let eps = characterization_epsilon(p);
    let one = R::one();
    let top = R::from_f64(1.0 + eps);
    if t[0] < one || t[m - 1] >= top || t.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain(format!("times must be ordered inside [1, {})", 1.0 + eps)));
    }
    let f = R::from_f64;
    let (a, b, c, d, q) = (f(p.a), f(p.b), f(p.c), f(p.d), f(p.q));
    let two = f(2.0);
    let mut times = vec![one];
    times.extend_from_slice(t);
    let spec = MultiAwSpec::new(a, b, c, d, q, times);
    let mut factors = vec![Poly::affine_pow(two, two, n - m)];
    factors.extend(t.iter().map(|&ti| Poly::affine(one + ti, two * ti.sqrt())));
    let num = match backend {
        Backend::Nested => multi_integrate_nested(&spec, &factors, tol)?,
        Backend::Projection => multi_integrate_projection(&spec, &factors, tol)?,
    };
    let pi1 = pi_marginal(a, b, c, d, q, one, tol)?;
    let den = pi1.integrate(|x| (two + two * x).powi(n as i32))?;
    if den == R::zero() {
        return Err(Error::DivisionByZero("normalizing integral vanishes".into()));
    }
    Ok(num / den)
}
