//! Measures on `{0,1}^m`. Site `i` is bit `i-1` of the word index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Probability,
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Last,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMeasure {
    pub m: usize,
    pub kind: MeasureKind,
    pub weights: Vec<f64>,
}

const SUM_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

impl BinaryMeasure {
    /// Validates length and normalization; probability weights in
    /// `[-1e-12, 0)` are clamped to zero.
    pub fn new(m: usize, kind: MeasureKind, mut weights: Vec<f64>) -> Result<Self> {
        if m == 0 || m > 30 {
            return Err(Error::Domain(format!("lattice length {m} out of range")));
        }
        if weights.len() != 1 << m {
            return Err(Error::Domain(format!("{} weights for m={m}", weights.len())));
        }
        let total: f64 = weights.iter().sum();
        if !((total - 1.0).abs() <= SUM_TOL) {
            return Err(Error::Domain(format!("weights sum to {total}")));
        }
        if kind == MeasureKind::Probability {
            for (word, w) in weights.iter_mut().enumerate() {
                if *w < 0.0 {
                    if *w < -CLAMP_TOL {
                        return Err(Error::NegativeMass { word, weight: *w });
                    }
                    *w = 0.0;
                }
            }
        }
        Ok(BinaryMeasure { m, kind, weights })
    }

    pub fn probability(m: usize, weights: Vec<f64>) -> Result<Self> {
        Self::new(m, MeasureKind::Probability, weights)
    }

    /// Point mass on one word.
    pub fn point(m: usize, word: usize) -> Self {
        let mut w = vec![0.0; 1 << m];
        w[word] = 1.0;
        BinaryMeasure { m, kind: MeasureKind::Probability, weights: w }
    }

    /// Product measure with site densities `rho[i]`.
    pub fn product(rho: &[f64]) -> Self {
        let m = rho.len();
        let weights = (0..1usize << m)
            .map(|w| (0..m).map(|i| if w >> i & 1 == 1 { rho[i] } else { 1.0 - rho[i] }).product())
            .collect();
        BinaryMeasure { m, kind: MeasureKind::Probability, weights }
    }

    pub fn bit(word: usize, site: usize) -> bool {
        word >> (site - 1) & 1 == 1
    }

    /// Sums out the complementary sites.
    pub fn marginal(&self, which: Which, m: usize) -> Result<Self> {
        if m == 0 || m > self.m {
            return Err(Error::Domain(format!("marginal of {m} sites from {}", self.m)));
        }
        let mut out = vec![0.0; 1 << m];
        let mask = (1usize << m) - 1;
        let shift = self.m - m;
        for (w, &p) in self.weights.iter().enumerate() {
            let k = match which {
                Which::First => w & mask,
                Which::Last => w >> shift,
            };
            out[k] += p;
        }
        Ok(BinaryMeasure { m, kind: self.kind, weights: out })
    }

    /// `E[Π t_i^{τ_i}]`.
    pub fn generating_function(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.m {
            return Err(Error::Domain(format!("{} arguments for m={}", t.len(), self.m)));
        }
        // contract the highest site first
        let mut v = self.weights.clone();
        for i in (0..self.m).rev() {
            let half = 1 << i;
            for w in 0..half {
                v[w] += t[i] * v[w + half];
            }
            v.truncate(half);
        }
        Ok(v[0])
    }

    /// `τ̂_i = 1 - τ_{m+1-i}`.
    pub fn particle_hole_dual(&self) -> Self {
        let m = self.m;
        let full = (1usize << m) - 1;
        let mut out = vec![0.0; 1 << m];
        for (w, &p) in self.weights.iter().enumerate() {
            let mut r = 0usize;
            for i in 0..m {
                if w >> i & 1 == 1 {
                    r |= 1 << (m - 1 - i);
                }
            }
            out[full ^ r] = p;
        }
        BinaryMeasure { m, kind: self.kind, weights: out }
    }

    /// `P(τ_site = 1)`.
    pub fn site_density(&self, site: usize) -> f64 {
        self.weights.iter().enumerate().filter(|(w, _)| Self::bit(*w, site)).map(|(_, p)| p).sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn word_string(&self, word: usize) -> String {
        (1..=self.m).map(|i| if Self::bit(word, i) { '1' } else { '0' }).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: BinaryMeasure = serde_json::from_str(s).map_err(|e| Error::Domain(e.to_string()))?;
        Self::new(m.m, m.kind, m.weights)
    }

    /// `word,weight` lines; the word lists sites 1..m left to right.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("word,weight\n");
        for (w, p) in self.weights.iter().enumerate() {
            s.push_str(&format!("{},{:.17e}\n", self.word_string(w), p));
        }
        s
    }

    pub fn from_csv(s: &str, kind: MeasureKind) -> Result<Self> {
        let mut rows = Vec::new();
        for line in s.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let (word, val) = line
                .split_once(',')
                .ok_or_else(|| Error::Domain(format!("bad csv line {line:?}")))?;
            let idx = word.chars().enumerate().try_fold(0usize, |acc, (i, ch)| match ch {
                '0' => Ok(acc),
                '1' => Ok(acc | 1 << i),
                _ => Err(Error::Domain(format!("bad word {word:?}"))),
            })?;
            let v: f64 = val.trim().parse().map_err(|_| Error::Domain(format!("bad weight {val:?}")))?;
            rows.push((word.len(), idx, v));
        }
        let m = rows.first().map(|r| r.0).unwrap_or(0);
        let mut weights = vec![0.0; 1 << m.min(30)];
        for (len, idx, v) in rows {
            if len != m {
                return Err(Error::Domain("mixed word lengths".into()));
            }
            weights[idx] = v;
        }
        Self::new(m, kind, weights)
    }
}
