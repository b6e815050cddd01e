//! Integration against multi-time measures `π_{t_1..t_m}`.
//!
//! Two backends: backward nested quadrature through the kernels, and the
//! projection backend that carries the integrand as coefficients in the
//! time-dependent polynomial basis `p_j(·; t)`.

use std::collections::HashMap;

use super::kernel::{kernel_measure, pi_marginal};
use super::{PointKind, SupportPoint, Tolerances};
use crate::error::{Error, Result};
use crate::qseries::{qpoch_finite, AwParams, AwRecurrence};
use crate::real::Real;

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<R> {
    pub coeffs: Vec<R>,
}

impl<R: Real> Poly<R> {
    /// `u + v x`.
    pub fn affine(u: R, v: R) -> Self {
        Poly { coeffs: vec![u, v] }
    }

    pub fn constant(c: R) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `(u + v x)^n`.
    pub fn affine_pow(u: R, v: R, n: usize) -> Self {
        let mut p = Poly::constant(R::one());
        for _ in 0..n {
            p = p.mul(&Poly::affine(u, v));
        }
        p
    }

    pub fn mul(&self, o: &Poly<R>) -> Poly<R> {
        let mut c = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: R) -> R {
        self.coeffs.iter().rev().fold(R::zero(), |acc, &c| acc * x + c)
    }
}

/// `π_{t_1..t_m}` for parameters `(A,B,C,D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAwSpec<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
    pub q: R,
    pub times: Vec<R>,
}

impl<R: Real> MultiAwSpec<R> {
    pub fn new(a: R, b: R, c: R, d: R, q: R, times: Vec<R>) -> Self {
        MultiAwSpec { a, b, c, d, q, times }
    }

    pub fn m(&self) -> usize {
        self.times.len()
    }

    fn validate(&self, nfactors: usize) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::Domain("multi-time spec needs at least one time".into()));
        }
        if nfactors != self.times.len() {
            return Err(Error::Domain(format!(
                "{} factors for {} times",
                nfactors,
                self.times.len()
            )));
        }
        if !(self.times[0] > R::zero()) || self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("times must be positive and nondecreasing".into()));
        }
        Ok(())
    }

    fn params_at(&self, t: R) -> AwParams<R> {
        let st = t.sqrt();
        AwParams::real(self.a * st, self.b * st, self.c / st, self.d / st, self.q)
    }
}

enum Start<R> {
    Marginal,
    Point { s: R, x: SupportPoint<R> },
}

/// Barycentric Chebyshev interpolant on `[-1, 1]`.
struct Cheb<R> {
    nodes: Vec<R>,
    weights: Vec<R>,
    values: Vec<R>,
}

impl<R: Real> Cheb<R> {
    fn nodes(k: usize) -> (Vec<R>, Vec<R>) {
        let pi = R::pi();
        (0..k)
            .map(|j| {
                let th = pi * R::from_i64(2 * j as i64 + 1) / R::from_i64(2 * k as i64);
                let (s, c) = th.sin_cos();
                (c, if j % 2 == 0 { s } else { -s })
            })
            .unzip()
    }

    fn eval(&self, x: R) -> R {
        let (mut num, mut den) = (R::zero(), R::zero());
        for ((&n, &w), &v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let d = x - n;
            if d == R::zero() {
                return v;
            }
            num += w * v / d;
            den += w / d;
        }
        num / den
    }
}

enum Inner<R> {
    Unbuilt,
    Direct,
    Interp(Cheb<R>),
}

struct Nested<'a, R: Real> {
    spec: &'a MultiAwSpec<R>,
    factors: &'a [Poly<R>],
    tol: &'a Tolerances,
    cache: Vec<HashMap<(u64, u64, bool), R>>,
    inner: Vec<Inner<R>>,
}

impl<'a, R: Real> Nested<'a, R> {
    /// `h_level(x) = g_level(x) ∫ h_{level+1}(y) P(x, dy)`.
    fn h(&mut self, level: usize, pt: &SupportPoint<R>) -> Result<R> {
        let g = self.factors[level].eval(pt.x);
        if level + 1 == self.factors.len() || g == R::zero() {
            return Ok(g);
        }
        if self.tol.nested_nodes > 0 && matches!(pt.kind, PointKind::Continuous { .. }) {
            if let Inner::Unbuilt = self.inner[level] {
                self.inner[level] = self.build_inner(level)?;
            }
            if let Inner::Interp(c) = &self.inner[level] {
                return Ok(g * c.eval(pt.x));
            }
        }
        Ok(g * self.inner_direct(level, pt)?)
    }

    /// Interpolates the inner integral on the continuous part, or falls back
    /// to direct evaluation when a check point disagrees.
    fn build_inner(&mut self, level: usize) -> Result<Inner<R>> {
        let (nodes, weights) = Cheb::nodes(self.tol.nested_nodes);
        let mut values = Vec::with_capacity(nodes.len());
        for &x in &nodes {
            values.push(self.inner_direct(level, &SupportPoint::from_x(x))?);
        }
        let cheb = Cheb { nodes, weights, values };
        let scale = cheb.values.iter().fold(R::one(), |m, v| m.max(v.abs()));
        for probe in [0.3137, -0.8219] {
            let x = R::from_f64(probe);
            let want = self.inner_direct(level, &SupportPoint::from_x(x))?;
            if ((cheb.eval(x) - want).abs() / scale).to_f64() > 1e-10 {
                return Ok(Inner::Direct);
            }
        }
        Ok(Inner::Interp(cheb))
    }

    fn inner_direct(&mut self, level: usize, pt: &SupportPoint<R>) -> Result<R> {
        let (k0, k1) = pt.x.key();
        let key = (k0, k1, matches!(pt.kind, PointKind::Atom { .. }));
        if let Some(v) = self.cache[level].get(&key) {
            return Ok(*v);
        }
        let (s, t) = (self.spec.times[level], self.spec.times[level + 1]);
        let val = if s == t {
            self.h(level + 1, pt)?
        } else {
            let sp = self.spec;
            let k = kernel_measure(sp.a, sp.b, sp.q, s, t, pt, self.tol, true)?;
            k.integrate_points(|y| self.h(level + 1, y))?
        };
        self.cache[level].insert(key, val);
        Ok(val)
    }
}

fn nested<R: Real>(spec: &MultiAwSpec<R>, factors: &[Poly<R>], start: Start<R>, tol: &Tolerances) -> Result<R> {
    spec.validate(factors.len())?;
    if factors.len() > tol.nested_cap {
        return Err(Error::CapExceeded(format!(
            "nested integration over {} times exceeds cap {}",
            factors.len(),
            tol.nested_cap
        )));
    }
    let mut st = Nested {
        spec,
        factors,
        tol,
        cache: vec![HashMap::new(); factors.len()],
        inner: factors.iter().map(|_| Inner::Unbuilt).collect(),
    };
    let t0 = spec.times[0];
    match start {
        Start::Marginal => {
            let pi = pi_marginal(spec.a, spec.b, spec.c, spec.d, spec.q, t0, tol)?;
            pi.integrate_points(|y| st.h(0, y))
        }
        Start::Point { s, x } => {
            if s > t0 {
                return Err(Error::Domain("chain start time exceeds first time".into()));
            }
            let k = kernel_measure(spec.a, spec.b, spec.q, s, t0, &x, tol, true)?;
            k.integrate_points(|y| st.h(0, y))
        }
    }
}

/// `∫ Π g_i(x_i) π_{t_1..t_m}(dx)` by backward nested integration.
///
/// Factors may be arbitrary polynomials; affine factors are the usual case.
pub fn multi_integrate_nested<R: Real>(spec: &MultiAwSpec<R>, factors: &[Poly<R>], tol: &Tolerances) -> Result<R> {
    nested(spec, factors, Start::Marginal, tol)
}

/// `∫ Π g_i(x_i) P_{s,t_1}(x, dx_1) P_{t_1,t_2}(x_1, dx_2) ...`.
pub fn chain_integrate_nested<R: Real>(
    spec: &MultiAwSpec<R>,
    factors: &[Poly<R>],
    s: R,
    x: SupportPoint<R>,
    tol: &Tolerances,
) -> Result<R> {
    nested(spec, factors, Start::Point { s, x }, tol)
}

/// Recurrence at time `t` plus the scalings `κ_j` with `p_j(·;t) = κ_j P_j`.
struct TimeBasis<R> {
    rec: AwRecurrence<R>,
    kappa: Vec<R>,
}

impl<R: Real> TimeBasis<R> {
    fn new(spec: &MultiAwSpec<R>, t: R, deg: usize) -> Result<Self> {
        let rec = AwRecurrence::new(&spec.params_at(t), deg + 1)?;
        let st = t.sqrt();
        let abt = spec.a * spec.b * t;
        let mut kappa = Vec::with_capacity(deg + 2);
        for j in 0..=deg + 1 {
            let den = qpoch_finite(abt, spec.q, j);
            let k = st.powi(j as i32) * rec.lead[j] / den;
            if !k.is_finite() || k == R::zero() {
                return Err(Error::ExpansionSingular(format!("degree {j} basis scale {k:e} at t={t}")));
            }
            kappa.push(k);
        }
        Ok(TimeBasis { rec, kappa })
    }

    /// Coefficients of `x · Σ c_j p_j`.
    fn mul_x(&self, c: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            out[j + 1] += cj * self.kappa[j] / self.kappa[j + 1];
            out[j] += cj * self.rec.b[j];
            if j > 0 {
                out[j - 1] += cj * self.rec.u[j] * self.kappa[j] / self.kappa[j - 1];
            }
        }
        out
    }

    fn mul_poly(&self, c: &[R], g: &Poly<R>) -> Vec<R> {
        let mut acc: Vec<R> = c.iter().map(|&v| v * *g.coeffs.last().unwrap()).collect();
        for &gk in g.coeffs.iter().rev().skip(1) {
            acc = self.mul_x(&acc);
            for (i, &v) in c.iter().enumerate() {
                acc[i] += gk * v;
            }
        }
        acc
    }

    fn eval(&self, c: &[R], x: R) -> R {
        let deg = c.len() - 1;
        let p = self.rec.monic_values(x, deg);
        (0..=deg).fold(R::zero(), |acc, j| acc + c[j] * self.kappa[j] * p[j])
    }
}

fn projection<R: Real>(spec: &MultiAwSpec<R>, factors: &[Poly<R>], start: Start<R>, tol: &Tolerances) -> Result<R> {
    spec.validate(factors.len())?;
    let total: usize = factors.iter().map(|g| g.degree()).sum();
    let mut c = vec![R::one()];
    let mut basis = None;
    for i in (0..factors.len()).rev() {
        let b = TimeBasis::new(spec, spec.times[i], total)?;
        c = b.mul_poly(&c, &factors[i]);
        basis = Some(b);
    }
    let b0 = basis.unwrap();
    match start {
        Start::Marginal => {
            let pi = pi_marginal(spec.a, spec.b, spec.c, spec.d, spec.q, spec.times[0], tol)?;
            pi.integrate(|x| b0.eval(&c, x))
        }
        Start::Point { s, x } => {
            let bs = TimeBasis::new(spec, s, total)?;
            Ok(bs.eval(&c, x.x))
        }
    }
}

/// Same integral as [`multi_integrate_nested`] via the projection formula.
pub fn multi_integrate_projection<R: Real>(spec: &MultiAwSpec<R>, factors: &[Poly<R>], tol: &Tolerances) -> Result<R> {
    projection(spec, factors, Start::Marginal, tol)
}

/// Same integral as [`chain_integrate_nested`] via the projection formula.
pub fn chain_integrate_projection<R: Real>(
    spec: &MultiAwSpec<R>,
    factors: &[Poly<R>],
    s: R,
    x: SupportPoint<R>,
    tol: &Tolerances,
) -> Result<R> {
    projection(spec, factors, Start::Point { s, x }, tol)
}

/// `p_j(x; t) = t^{j/2} (ABt)_j^{-1} w_j(x; A√t, B√t, C/√t, D/√t)`.
#[allow(clippy::too_many_arguments)]
pub fn scaled_polynomial<R: Real>(j: usize, x: R, a: R, b: R, c: R, d: R, q: R, t: R) -> Result<R> {
    let spec = MultiAwSpec::new(a, b, c, d, q, vec![t]);
    let basis = TimeBasis::new(&spec, t, j)?;
    let p = basis.rec.monic_values(x, j);
    Ok(basis.kappa[j] * p[j])
}
