//! Gillespie simulation of open ASEP, an independent check on the exact
//! solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asep_exact::{OpenAsepRates, Which};
use crate::error::{Error, Result};

/// Number of time batches used for the standard error.
pub const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    /// `τ_site = 1`, sites counted from 1.
    Occupation(usize),
    /// The `m` sites at one end show `word` (site `i` of the block is bit `i-1`).
    Word { which: WhichEnd, m: usize, word: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WhichEnd {
    First,
    Last,
}

impl From<Which> for WhichEnd {
    fn from(w: Which) -> Self {
        match w {
            Which::First => WhichEnd::First,
            Which::Last => WhichEnd::Last,
        }
    }
}

impl Statistic {
    pub fn label(&self) -> String {
        match *self {
            Statistic::Occupation(i) => format!("tau_{i}"),
            Statistic::Word { which, m, word } => {
                let w: String = (0..m).map(|i| if word >> i & 1 == 1 { '1' } else { '0' }).collect();
                let end = match which {
                    WhichEnd::First => "first",
                    WhichEnd::Last => "last",
                };
                format!("{end}{m}={w}")
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Statistic::Occupation(i) => (1..=n).contains(&i),
            Statistic::Word { m, word, .. } => m >= 1 && m <= n && word < 1 << m,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("statistic {self:?} does not fit n={n}")))
        }
    }

    fn value(&self, n: usize, state: usize) -> f64 {
        let hit = match *self {
            Statistic::Occupation(i) => state >> (i - 1) & 1 == 1,
            Statistic::Word { which: WhichEnd::First, m, word } => state & ((1 << m) - 1) == word,
            Statistic::Word { which: WhichEnd::Last, m, word } => state >> (n - m) == word,
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub label: String,
    pub mean: f64,
    pub stderr: f64,
    /// Jumps observed after burn-in.
    pub samples: u64,
    pub seed: u64,
    pub burn_in: f64,
}

impl McEstimate {
    /// One JSON line with `label, mean, stderr, samples, seed`.
    pub fn json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            label: &'a str,
            mean: f64,
            stderr: f64,
            samples: u64,
            seed: u64,
        }
        let line = Line { label: &self.label, mean: self.mean, stderr: self.stderr, samples: self.samples, seed: self.seed };
        serde_json::to_string(&line).expect("estimate serializes")
    }
}

/// `20 n / (smallest positive boundary rate)`.
pub fn default_burn_in(n: usize, r: &OpenAsepRates) -> f64 {
    let min = [r.alpha, r.beta, r.gamma, r.delta].into_iter().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    20.0 * n as f64 / min
}

/// Time averages of several statistics along one trajectory started empty.
pub fn simulate_estimates(
    n: usize,
    rates: &OpenAsepRates,
    stats: &[Statistic],
    total_time: f64,
    burn_in: f64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    rates.validate()?;
    if n == 0 || n > 30 {
        return Err(Error::Domain(format!("lattice length {n} out of range")));
    }
    if !(total_time > burn_in && burn_in >= 0.0) {
        return Err(Error::Domain(format!("need total_time > burn_in ≥ 0, got {total_time}, {burn_in}")));
    }
    for s in stats {
        s.check(n)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch_len = (total_time - burn_in) / BATCHES as f64;
    let mut sums = vec![vec![0.0; BATCHES]; stats.len()];
    let mut state = 0usize;
    let mut time = 0.0;
    let mut samples = 0u64;
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(n + 2);
    loop {
        out.clear();
        outgoing(n, rates, state, &mut out);
        let total: f64 = out.iter().map(|e| e.1).sum();
        let hold = -(1.0 - rng.gen::<f64>()).ln() / total;
        let next_time = time + hold;
        // credit [time, next_time) ∩ [burn_in, total_time) to the batches it overlaps
        let mut lo = time.max(burn_in);
        let hi = next_time.min(total_time);
        while lo < hi {
            let mut b = (((lo - burn_in) / batch_len) as usize).min(BATCHES - 1);
            if b < BATCHES - 1 && burn_in + (b + 1) as f64 * batch_len <= lo {
                b += 1;
            }
            let end = if b == BATCHES - 1 { hi } else { hi.min(burn_in + (b + 1) as f64 * batch_len) };
            for (k, s) in stats.iter().enumerate() {
                sums[k][b] += s.value(n, state) * (end - lo);
            }
            lo = end;
        }
        if next_time >= total_time {
            break;
        }
        if next_time >= burn_in {
            samples += 1;
        }
        time = next_time;
        let mut u = rng.gen::<f64>() * total;
        let mut pick = out[out.len() - 1].0;
        for &(to, rate) in &out {
            if u < rate {
                pick = to;
                break;
            }
            u -= rate;
        }
        state = pick;
    }
    Ok(stats
        .iter()
        .zip(sums)
        .map(|(s, batch)| {
            let means: Vec<f64> = batch.iter().map(|v| v / batch_len).collect();
            let mean = means.iter().sum::<f64>() / BATCHES as f64;
            let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
            McEstimate {
                label: s.label(),
                mean,
                stderr: (var / BATCHES as f64).sqrt(),
                samples,
                seed,
                burn_in,
            }
        })
        .collect())
}

pub fn simulate_estimate(
    n: usize,
    rates: &OpenAsepRates,
    statistic: Statistic,
    total_time: f64,
    burn_in: f64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(simulate_estimates(n, rates, &[statistic], total_time, burn_in, seed)?.remove(0))
}

/// Independent replicas, seeds `seed, seed+1, …`, run concurrently.
pub fn simulate_replicas(
    n: usize,
    rates: &OpenAsepRates,
    stats: &[Statistic],
    total_time: f64,
    burn_in: f64,
    seed: u64,
    replicas: usize,
) -> Result<Vec<Vec<McEstimate>>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|k| simulate_estimates(n, rates, stats, total_time, burn_in, seed.wrapping_add(k)))
        .collect()
}

/// Enabled moves of one state, recomputed per event.
fn outgoing(n: usize, r: &OpenAsepRates, w: usize, out: &mut Vec<(usize, f64)>) {
    let last = 1usize << (n - 1);
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
        let swapped = w ^ (0b11 << i);
        match (w >> i & 1, w >> (i + 1) & 1) {
            (1, 0) => push(swapped, 1.0),
            (0, 1) => push(swapped, r.q),
            _ => {}
        }
    }
}
