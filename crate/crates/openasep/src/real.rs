//! Working-precision scalars.
//!
//! The numeric core is generic over [`Real`]. Two backends exist:
//!
//! - `f64` (53 bits), used for fast paths and as a cross-check.
//! - [`DoubleDouble`] (106 bits), the default working precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Scalar type used throughout the q-series and measure code.
pub trait Real:
    Copy
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Mantissa bits carried by the type.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;
    /// Unit roundoff.
    fn epsilon() -> Self;
    /// 32-point Gauss-Legendre rule on [-1, 1] as (node, weight) pairs.
    fn gl32() -> &'static [(Self, Self)];
    /// Bit pattern used as a memoization key.
    fn key(self) -> (u64, u64);

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    #[inline]
    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut base = self;
        let mut e = n as u32;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
    #[inline]
    fn signum_i(self) -> i8 {
        if self > Self::zero() {
            1
        } else if self < Self::zero() {
            -1
        } else {
            0
        }
    }
}

fn gauss_legendre<R: Real>(n: usize) -> Vec<(R, R)> {
    let mut out = Vec::with_capacity(n);
    let two = R::from_f64(2.0);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = R::from_f64(guess);
        let mut dp = R::one();
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            let mut p0 = R::one();
            let mut p1 = x;
            for k in 2..=n {
                let kk = R::from_i64(k as i64);
                let p2 = ((two * kk - R::one()) * x * p1 - (kk - R::one()) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = R::from_i64(n as i64) * (x * p1 - p0) / (x * x - R::one());
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= R::epsilon() * R::from_f64(4.0) {
                // one more polish step for the derivative at the final node
                let mut p0 = R::one();
                let mut p1 = x;
                for k in 2..=n {
                    let kk = R::from_i64(k as i64);
                    let p2 = ((two * kk - R::one()) * x * p1 - (kk - R::one()) * p0) / kk;
                    p0 = p1;
                    p1 = p2;
                }
                dp = R::from_i64(n as i64) * (x * p1 - p0) / (x * x - R::one());
                break;
            }
        }
        let w = two / ((R::one() - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

impl Real for f64 {
    const BITS: u32 = 53;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn gl32() -> &'static [(Self, Self)] {
        static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
        RULE.get_or_init(|| {
            gauss_legendre::<DoubleDouble>(32)
                .into_iter()
                .map(|(x, w)| (x.hi, w.hi))
                .collect()
        })
    }
    #[inline]
    fn key(self) -> (u64, u64) {
        (self.to_bits(), 0)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2, giving about 106 bits.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    const PI: DoubleDouble = DoubleDouble::new(std::f64::consts::PI, 1.2246467991473532e-16);
    const FRAC_PI_2: DoubleDouble = DoubleDouble::new(std::f64::consts::FRAC_PI_2, 6.123233995736766e-17);
    // third term of pi/2 for argument reduction
    const FRAC_PI_2_TAIL: f64 = -1.4973849048591698e-33;

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (h, l) = quick_two_sum(p1, p2);
        DoubleDouble::new(h, l)
    }

    fn round(self) -> Self {
        let mut hi = self.hi.round();
        let mut lo = 0.0;
        if hi == self.hi {
            lo = self.lo.round();
            let (h, l) = quick_two_sum(hi, lo);
            hi = h;
            lo = l;
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            if self.lo < 0.0 && hi > self.hi {
                hi -= 1.0;
            } else if self.lo > 0.0 && hi < self.hi {
                hi += 1.0;
            }
        }
        DoubleDouble::new(hi, lo)
    }

    /// Taylor series for |r| ≤ π/4.
    fn sin_cos_reduced(r: Self) -> (Self, Self) {
        let r2 = r * r;
        let eps = 1e-34;
        let mut term = r;
        let mut s = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
            s += term;
            k += 2.0;
            if term.hi.abs() < eps {
                break;
            }
        }
        let mut term = DoubleDouble::from_f64(1.0);
        let mut c = term;
        let mut k = 0.0;
        loop {
            term = -(term * r2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
            c += term;
            k += 2.0;
            if term.hi.abs() < eps {
                break;
            }
        }
        (s, c)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e}, {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl fmt::LowerExp for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&self.hi, f)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (h, l) = quick_two_sum(s1, s2 + t2);
        DoubleDouble::new(h, l)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (h, l) = quick_two_sum(p1, p2);
        DoubleDouble::new(h, l)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        DoubleDouble::new(h, l) + DoubleDouble::from_f64(q3)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}
impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}
impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}
impl DivAssign for DoubleDouble {
    #[inline]
    fn div_assign(&mut self, b: Self) {
        *self = *self / b;
    }
}

impl Real for DoubleDouble {
    const BITS: u32 = 106;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return DoubleDouble::from_f64(0.0);
        }
        if self.hi < 0.0 {
            return DoubleDouble::from_f64(f64::NAN);
        }
        let q = self.hi.sqrt();
        let (p, e) = two_prod(q, q);
        let r = (self - DoubleDouble::new(p, e)).hi;
        let (h, l) = quick_two_sum(q, r / (2.0 * q));
        DoubleDouble::new(h, l)
    }
    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sin_cos(self) -> (Self, Self) {
        let k = (self / DoubleDouble::FRAC_PI_2).round();
        let r = self - DoubleDouble::FRAC_PI_2 * k - DoubleDouble::from_f64(DoubleDouble::FRAC_PI_2_TAIL * k.hi);
        let (s, c) = DoubleDouble::sin_cos_reduced(r);
        match (k.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
    #[inline]
    fn epsilon() -> Self {
        DoubleDouble::from_f64(4.93038065763132e-32)
    }
    fn gl32() -> &'static [(Self, Self)] {
        static RULE: OnceLock<Vec<(DoubleDouble, DoubleDouble)>> = OnceLock::new();
        RULE.get_or_init(|| gauss_legendre::<DoubleDouble>(32))
    }
    #[inline]
    fn key(self) -> (u64, u64) {
        (self.hi.to_bits(), self.lo.to_bits())
    }
}

/// Working precision selected from a requested bit count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Precision {
    Double,
    #[default]
    DoubleDouble,
}

impl Precision {
    /// Environment variable consulted for the default precision.
    pub const ENV_VAR: &'static str = "OPENASEP_PRECISION_BITS";

    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            0..=52 => Err(Error::Domain(format!(
                "precision_bits={bits} is below double precision"
            ))),
            53..=64 => Ok(Precision::Double),
            65..=106 => Ok(Precision::DoubleDouble),
            // the widest backend is double-double; requests above it are served at 106 bits
            _ => Ok(Precision::DoubleDouble),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::DoubleDouble => 106,
        }
    }

    /// The next wider backend, if any.
    pub fn doubled(self) -> Option<Self> {
        match self {
            Precision::Double => Some(Precision::DoubleDouble),
            Precision::DoubleDouble => None,
        }
    }

    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .and_then(|b| Self::from_bits(b).ok())
            .unwrap_or_default()
    }
}
