//! q-Pochhammer symbols and Askey-Wilson polynomials.
//!
//! Products over parameter sets that may contain a complex-conjugate pair are
//! handled through [`Gen`], which stores such a pair by its sum and product so
//! every factor stays real.

use crate::error::{Error, Result};
use crate::real::Real;

/// `(z;q)_n = Π_{j<n} (1 - z q^j)`.
pub fn qpoch_finite<R: Real>(z: R, q: R, n: usize) -> R {
    let mut acc = R::one();
    let mut zq = z;
    for _ in 0..n {
        acc *= R::one() - zq;
        zq *= q;
    }
    acc
}

/// Truncation index: smallest `N` with `|z| q^N ≤ tol (1-q) / 2`.
pub fn truncation_index<R: Real>(zabs: R, q: R, tol: R) -> Result<usize> {
    if q >= R::one() || q < R::zero() {
        return Err(Error::Nonconvergent(format!("q = {} outside [0,1)", q)));
    }
    let bound = tol * (R::one() - q) / R::from_f64(2.0);
    let mut n = 0usize;
    let mut v = zabs;
    while v > bound {
        v *= q;
        n += 1;
        if n > 1_000_000 {
            return Err(Error::Nonconvergent(format!("q = {} too close to 1", q)));
        }
    }
    Ok(n)
}

/// `(z;q)_∞` truncated with the geometric tail rule.
pub fn qpoch_infinite<R: Real>(z: R, q: R, tol: R) -> Result<R> {
    let n = truncation_index(z.abs(), q, tol)?;
    Ok(qpoch_finite(z, q, n))
}

/// A parameter, or a conjugate pair of parameters carried by sum and product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gen<R> {
    Real(R),
    Pair { sum: R, prod: R },
}

impl<R: Real> Gen<R> {
    /// Largest modulus among the members.
    pub fn modulus(&self) -> R {
        match *self {
            Gen::Real(x) => x.abs(),
            Gen::Pair { prod, .. } => prod.abs().sqrt(),
        }
    }

    /// `Π_members (1 - u v)`.
    #[inline]
    pub fn factor(&self, u: R) -> R {
        match *self {
            Gen::Real(x) => R::one() - u * x,
            Gen::Pair { sum, prod } => R::one() - u * sum + u * u * prod,
        }
    }

    /// `Π_members (v - w)`.
    #[inline]
    pub fn shifted(&self, w: R) -> R {
        match *self {
            Gen::Real(x) => x - w,
            Gen::Pair { sum, prod } => w * w - w * sum + prod,
        }
    }

    pub fn scaled(&self, s: R) -> Gen<R> {
        match *self {
            Gen::Real(x) => Gen::Real(x * s),
            Gen::Pair { sum, prod } => Gen::Pair { sum: sum * s, prod: prod * s * s },
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Gen::Real(_) => 1,
            Gen::Pair { .. } => 2,
        }
    }

    /// Product of all members.
    pub fn product(&self) -> R {
        match *self {
            Gen::Real(x) => x,
            Gen::Pair { prod, .. } => prod,
        }
    }
}

/// `Π_members (v;q)_n`.
pub fn qpoch_gen_finite<R: Real>(g: &Gen<R>, q: R, n: usize) -> R {
    let mut acc = R::one();
    let mut qk = R::one();
    for _ in 0..n {
        acc *= g.factor(qk);
        qk *= q;
    }
    acc
}

/// `Π_members (v;q)_∞`.
pub fn qpoch_gen_infinite<R: Real>(g: &Gen<R>, q: R, tol: R) -> Result<R> {
    let n = truncation_index(g.modulus(), q, tol)?;
    Ok(qpoch_gen_finite(g, q, n))
}

/// Product over a list of generators.
pub fn qpoch_set_infinite<R: Real>(set: &[Gen<R>], q: R, tol: R) -> Result<R> {
    let mut acc = R::one();
    for g in set {
        acc *= qpoch_gen_infinite(g, q, tol)?;
    }
    Ok(acc)
}

pub fn qpoch_set_finite<R: Real>(set: &[Gen<R>], q: R, n: usize) -> R {
    set.iter().fold(R::one(), |acc, g| acc * qpoch_gen_finite(g, q, n))
}

/// Pairwise products `{fg : f,g distinct members}` of a conjugation-closed set.
pub fn pair_products<R: Real>(set: &[Gen<R>]) -> Vec<Gen<R>> {
    let mut out = Vec::new();
    for (i, g) in set.iter().enumerate() {
        if let Gen::Pair { prod, .. } = g {
            out.push(Gen::Real(*prod));
        }
        for h in &set[i + 1..] {
            match (g, h) {
                (Gen::Real(x), Gen::Real(y)) => out.push(Gen::Real(*x * *y)),
                (Gen::Real(x), p @ Gen::Pair { .. }) | (p @ Gen::Pair { .. }, Gen::Real(x)) => {
                    out.push(p.scaled(*x))
                }
                (Gen::Pair { .. }, Gen::Pair { .. }) => {
                    unreachable!("at most one conjugate pair is supported")
                }
            }
        }
    }
    out
}

/// Askey-Wilson parameters `(a,b,c,d)` with `a,b` real and `c,d` real or conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwParams<R> {
    pub a: R,
    pub b: R,
    pub cd: CdPair<R>,
    pub q: R,
}

/// Alias matching the polynomial-side name.
pub type AwPolyParams<R> = AwParams<R>;

/// The `(c,d)` slot: two reals or one complex value with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdPair<R> {
    Real(R, R),
    Conjugate { re: R, im: R },
}

impl<R: Real> CdPair<R> {
    pub fn sum(&self) -> R {
        match *self {
            CdPair::Real(c, d) => c + d,
            CdPair::Conjugate { re, .. } => re + re,
        }
    }
    pub fn prod(&self) -> R {
        match *self {
            CdPair::Real(c, d) => c * d,
            CdPair::Conjugate { re, im } => re * re + im * im,
        }
    }
    pub fn gens(&self) -> Vec<Gen<R>> {
        match *self {
            CdPair::Real(c, d) => vec![Gen::Real(c), Gen::Real(d)],
            CdPair::Conjugate { .. } => vec![Gen::Pair { sum: self.sum(), prod: self.prod() }],
        }
    }
}

impl<R: Real> AwParams<R> {
    pub fn real(a: R, b: R, c: R, d: R, q: R) -> Self {
        AwParams { a, b, cd: CdPair::Real(c, d), q }
    }

    pub fn from_f64(a: f64, b: f64, c: f64, d: f64, q: f64) -> Self {
        Self::real(R::from_f64(a), R::from_f64(b), R::from_f64(c), R::from_f64(d), R::from_f64(q))
    }

    /// All four parameters as a conjugation-closed generator list.
    pub fn gens(&self) -> Vec<Gen<R>> {
        let mut v = vec![Gen::Real(self.a), Gen::Real(self.b)];
        v.extend(self.cd.gens());
        v
    }

    pub fn abcd(&self) -> R {
        self.a * self.b * self.cd.prod()
    }

    /// Elementary symmetric functions of `(b,c,d)`.
    fn sym_bcd(&self) -> (R, R, R) {
        let (sg, rho) = (self.cd.sum(), self.cd.prod());
        (self.b + sg, self.b * sg + rho, self.b * rho)
    }
}

fn nonzero<R: Real>(v: R, what: &str, tol: R) -> Result<R> {
    if v.abs() <= tol {
        Err(Error::RecurrenceSingular(format!("{what} = {v:e}")))
    } else {
        Ok(v)
    }
}

/// Monic Jacobi coefficients: `x P_n = P_{n+1} + b_n P_n + u_n P_{n-1}`,
/// together with the leading coefficient of `w_n` (`lead[n] = 2^n (abcd q^{n-1};q)_n`).
#[derive(Debug, Clone)]
pub struct AwRecurrence<R> {
    pub b: Vec<R>,
    pub u: Vec<R>,
    pub lead: Vec<R>,
}

const SINGULAR_TOL: f64 = 1e-14;

impl<R: Real> AwRecurrence<R> {
    /// Coefficients up to degree `max_deg`.
    pub fn new(p: &AwParams<R>, max_deg: usize) -> Result<Self> {
        let q = p.q;
        let a = p.a;
        let (s1, s2, s3) = p.sym_bcd();
        let e = a * s3;
        let one = R::one();
        let half = R::from_f64(0.5);
        let tol = R::from_f64(SINGULAR_TOL);
        let qp = |k: i32| q.powi(k);

        // alpha_n = A_n * a, the part of the upper coefficient regular at a = 0
        let cubic = |n: i32| {
            one - a * qp(n) * s1 + a * a * qp(2 * n) * s2 - a * a * a * qp(3 * n) * s3
        };
        let mut alpha = Vec::with_capacity(max_deg + 1);
        let mut b = Vec::with_capacity(max_deg + 1);
        let mut u = vec![R::zero(); max_deg + 1];

        let d0 = nonzero(one - e, "1 - abcd", tol)?;
        alpha.push(cubic(0) / d0);
        b.push(half * ((s1 - s3 - a * s2 + a * a * s3) / d0 + a));

        for n in 1..=max_deg as i32 {
            let dn = nonzero(one - e * qp(2 * n - 1), "1 - abcd q^(2n-1)", tol)?
                * nonzero(one - e * qp(2 * n), "1 - abcd q^(2n)", tol)?;
            let dc = nonzero(one - e * qp(2 * n - 2), "1 - abcd q^(2n-2)", tol)?
                * (one - e * qp(2 * n - 1));
            let num = -s3 * qp(2 * n - 1) * (one + q) + qp(n) * s1 + s3 * qp(n - 1)
                + a * (s3 * s3 * qp(4 * n - 1) - qp(2 * n) * s2 - s1 * s3 * qp(2 * n - 1))
                + a * a * (qp(3 * n) * s3 + s2 * s3 * qp(3 * n - 1))
                - a * a * a * s3 * s3 * qp(4 * n - 1);
            let w = qp(n - 1);
            let c_over_a = (one - qp(n)) * (one - w * s2 + w * w * s1 * s3 - w * w * w * s3 * s3) / dc;
            alpha.push(cubic(n) * (one - e * qp(n - 1)) / dn);
            b.push(half * (num / dn + a - a * c_over_a));
            u[n as usize] = R::from_f64(0.25) * alpha[(n - 1) as usize] * c_over_a;
        }

        let mut lead = Vec::with_capacity(max_deg + 1);
        lead.push(one);
        for n in 1..=max_deg {
            let mut c = R::from_f64(2.0).powi(n as i32);
            for j in 0..n {
                c *= one - e * qp((n - 1 + j) as i32);
            }
            lead.push(c);
        }
        b.truncate(max_deg + 1);
        Ok(AwRecurrence { b, u, lead })
    }

    /// Monic polynomials `P_0..P_deg` at `x`.
    pub fn monic_values(&self, x: R, deg: usize) -> Vec<R> {
        let mut out = Vec::with_capacity(deg + 1);
        out.push(R::one());
        if deg >= 1 {
            out.push(x - self.b[0]);
        }
        for n in 1..deg {
            let next = (x - self.b[n]) * out[n] - self.u[n] * out[n - 1];
            out.push(next);
        }
        out
    }

    /// `w_0..w_deg` at `x`.
    pub fn values(&self, x: R, deg: usize) -> Vec<R> {
        let mut v = self.monic_values(x, deg);
        for (n, val) in v.iter_mut().enumerate() {
            *val *= self.lead[n];
        }
        v
    }
}

/// `w_j(x; a,b,c,d)`.
pub fn aw_polynomial<R: Real>(j: usize, x: R, params: &AwParams<R>) -> Result<R> {
    if j == 0 {
        return Ok(R::one());
    }
    let rec = AwRecurrence::new(params, j)?;
    Ok(rec.values(x, j)[j])
}

/// `∫ w_j² dν` for the normalized measure.
pub fn aw_norm<R: Real>(j: usize, params: &AwParams<R>) -> Result<R> {
    if j == 0 {
        return Ok(R::one());
    }
    let q = params.q;
    let e = params.abcd();
    let one = R::one();
    let tol = R::from_f64(SINGULAR_TOL);
    let den1 = one - q.powi(2 * j as i32 - 1) * e;
    let den2 = qpoch_finite(e, q, j);
    if den1.abs() <= tol || den2.abs() <= tol {
        return Err(Error::DivisionByZero(format!(
            "aw_norm({j}): 1 - q^(2j-1) abcd = {den1:e}, (abcd)_j = {den2:e}"
        )));
    }
    let mut set = vec![Gen::Real(q)];
    set.extend(pair_products(&params.gens()));
    let num = (one - q.powi(j as i32 - 1) * e) * qpoch_set_finite(&set, q, j);
    Ok(num / (den1 * den2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;

    #[test]
    fn finite_examples() {
        assert_eq!(qpoch_finite(0.3, 0.5, 0), 1.0);
        assert!((qpoch_finite(0.5, 0.5, 2) - 0.375f64).abs() < 1e-15);
        assert!((qpoch_finite(-1.0, 0.5, 3) - 3.75f64).abs() < 1e-15);
    }

    #[test]
    fn infinite_examples() {
        assert!((qpoch_infinite(0.7, 0.0, 1e-12).unwrap() - 0.3f64).abs() < 1e-15);
        assert_eq!(qpoch_infinite(0.0, 0.5, 1e-12).unwrap(), 1.0);
        let v = qpoch_infinite(0.5, 0.5, 1e-12).unwrap();
        let oracle = qpoch_finite(0.5, 0.5, 120);
        assert!((v - oracle).abs() < 1e-12 * oracle);
        assert!((qpoch_finite(0.5, 0.5, 60) - oracle).abs() < 1e-15);
        assert!((v - 0.288788095087).abs() < 1e-11);
        assert!(qpoch_infinite(0.5, 1.0, 1e-12).is_err());
    }

    fn hyper_4phi3(n: usize, x: f64, a: f64, b: f64, c: f64, d: f64, q: f64) -> f64 {
        // a^{-n} (ab,ac,ad)_n 4phi3(q^-n, abcd q^{n-1}, a e^{iθ}, a e^{-iθ}; ab, ac, ad; q, q)
        let mut sum = 0.0;
        for k in 0..=n {
            let mut t = 1.0;
            for j in 0..k {
                let qj = q.powi(j as i32);
                t *= (1.0 - q.powi(-(n as i32)) * qj) * (1.0 - a * b * c * d * q.powi(n as i32 - 1) * qj);
                t *= 1.0 - 2.0 * a * qj * x + a * a * qj * qj;
                t /= 1.0 - q.powi(j as i32 + 1);
            }
            t *= q.powi(k as i32);
            let tail = qpoch_finite(a * b * q.powi(k as i32), q, n - k)
                * qpoch_finite(a * c * q.powi(k as i32), q, n - k)
                * qpoch_finite(a * d * q.powi(k as i32), q, n - k);
            sum += t * tail;
        }
        sum / a.powi(n as i32)
    }

    #[test]
    fn recurrence_matches_basic_hypergeometric_form() {
        let (a, b, c, d, q) = (0.7, -0.3, 0.45, 0.2, 0.4);
        let p = AwParams::<f64>::real(a, b, c, d, q);
        for n in 0..6 {
            for &x in &[-0.9, -0.2, 0.3, 0.8, 1.4] {
                let r = aw_polynomial(n, x, &p).unwrap();
                let h = hyper_4phi3(n, x, a, b, c, d, q);
                assert!((r - h).abs() < 1e-9 * (1.0 + h.abs()), "n={n} x={x} {r} {h}");
            }
        }
    }

    #[test]
    fn recurrence_regular_when_a_is_zero() {
        // continuous q-Hermite: monic u_n = (1 - q^n)/4, b_n = 0
        let p = AwParams::<f64>::real(0.0, 0.0, 0.0, 0.0, 0.3);
        let rec = AwRecurrence::new(&p, 5).unwrap();
        for n in 1..=5 {
            assert!(rec.b[n].abs() < 1e-15);
            assert!((rec.u[n] - 0.25 * (1.0 - 0.3f64.powi(n as i32))).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_under_permutations() {
        let vals = [1.6, -0.4, 0.3, -0.7];
        let q = 0.35;
        let perms = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0], [2, 0, 1, 3]];
        for j in 1..6 {
            for i in 0..20 {
                let x = -1.5 + 0.15 * i as f64;
                let base = aw_polynomial(j, x, &AwParams::real(vals[0], vals[1], vals[2], vals[3], q)).unwrap();
                for p in perms {
                    let v = aw_polynomial(
                        j,
                        x,
                        &AwParams::real(vals[p[0]], vals[p[1]], vals[p[2]], vals[p[3]], q),
                    )
                    .unwrap();
                    assert!((v - base).abs() <= 1e-10 * base.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn conjugate_pair_matches_complex_expansion() {
        // c = r e^{iφ}: compare against (c,d) replaced by real parameters with same sum/product
        let p = AwParams::<DoubleDouble> {
            a: DoubleDouble::from_f64(1.3),
            b: DoubleDouble::from_f64(-0.2),
            cd: CdPair::Conjugate { re: DoubleDouble::from_f64(0.3), im: DoubleDouble::from_f64(0.5) },
            q: DoubleDouble::from_f64(0.5),
        };
        let n1 = aw_norm(2, &p).unwrap().to_f64();
        assert!(n1.is_finite());
        assert_eq!(aw_norm(0, &p).unwrap().to_f64(), 1.0);
        assert!((aw_norm(1, &AwParams::<f64>::real(2.0, 0.0, 0.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_singular_reports_error() {
        let p = AwParams::<f64>::real(2.0, 0.5, 1.0, 1.0, 0.5);
        assert!(matches!(aw_norm(1, &p), Err(Error::DivisionByZero(_))));
    }
}
