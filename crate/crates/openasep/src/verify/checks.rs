//! Residual computations behind the named checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asep_exact::{
    characterization_conditions, characterization_epsilon, classify_phase, on_ac_line, phase_of, region_of,
    stationary_measure, theorem_rhs, Backend, BinaryMeasure, BoundaryParams, OpenAsepRates, Phase, Region, Which,
};
use crate::asep_mc::{default_burn_in, simulate_estimates, Statistic, WhichEnd};
use crate::aw_measure::{
    build_from_params, check_admissible, multi_integrate_nested, pi_marginal, scaled_polynomial, transition_kernel,
    AwSignedMeasure, KernelSpec, MultiAwSpec, PointKind, Poly, SupportPoint, Tolerances,
};
use crate::error::{Error, Result};
use crate::limits::{
    bernoulli_product, budget_check, convergence_scan_with, eta_measure_with, flip, gf_tv_bound, lambda_measure_with,
    product_approximation, theta_from_support, tv_distance, LimitOptions, ScanOptions,
};
use crate::qseries::{aw_norm, aw_polynomial, AwParams};
use crate::real::{DoubleDouble as Dd, Real};

fn dd(v: f64) -> Dd {
    Dd::from_f64(v)
}

fn atom_points<R: Real>(m: &AwSignedMeasure<R>) -> Vec<SupportPoint<R>> {
    m.support_atoms().map(|a| SupportPoint { x: a.location, kind: PointKind::Atom { root: a.root } }).collect()
}

/// `|∫ dν - 1|`.
pub fn mass_residual(p: AwParams<Dd>, tol: &Tolerances) -> Result<f64> {
    let loose = Tolerances { mass: f64::INFINITY, ..*tol };
    let m = build_from_params(p, &loose)?;
    Ok((m.total_mass() - Dd::one()).abs().to_f64())
}

/// Largest `|∫ w_j w_k dν - δ_jk h_j|`, each scaled by the `L²(|ν|)` norms
/// of `w_j` and `w_k`, over `j, k ≤ jmax`.
pub fn orthogonality_residual(p: AwParams<Dd>, jmax: usize, tol: &Tolerances) -> Result<f64> {
    let m = build_from_params(p, tol)?;
    let sign = dd(m.density_sign as f64);
    let abs_int = |g: &dyn Fn(Dd) -> Dd| -> Result<Dd> {
        let atoms = m.atoms.iter().fold(Dd::zero(), |acc, a| acc + a.mass.abs() * g(a.location));
        Ok(atoms + sign * m.continuous_integral(|pt| Ok(g(pt.x)))?)
    };
    // surfaces recurrence errors once, so the closures below can unwrap
    aw_polynomial(jmax, Dd::zero(), &p)?;
    let w = |j: usize, x: Dd| aw_polynomial(j, x, &p).unwrap_or(Dd::zero());
    let norms: Vec<f64> = (0..=jmax).map(|j| abs_int(&|x| w(j, x) * w(j, x)).map(|v| v.to_f64().sqrt())).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for j in 0..=jmax {
        for k in j..=jmax {
            let v = m.integrate(|x| w(j, x) * w(k, x))?;
            let want = if j == k { aw_norm(j, &p)? } else { Dd::zero() };
            let scale = (norms[j] * norms[k]).max(f64::MIN_POSITIVE);
            worst = worst.max((v - want).abs().to_f64() / scale);
        }
    }
    Ok(worst)
}

/// Largest `|∫ p_j(y;t) P_{s,t}(x,dy) - p_j(x;s)| / max(1, |p_j(x;s)|)` over
/// `j ≤ jmax`, the atoms of `U_s` and the given continuous points.
pub fn projection_residual(p: &BoundaryParams, s: f64, t: f64, jmax: usize, xs: &[f64], tol: &Tolerances) -> Result<f64> {
    let (a, b, c, d, q) = (dd(p.a), dd(p.b), dd(p.c), dd(p.d), dd(p.q));
    let (s, t) = (dd(s), dd(t));
    let pis = pi_marginal(a, b, c, d, q, s, tol)?;
    let mut pts = atom_points(&pis);
    if pis.has_continuous {
        pts.extend(xs.iter().map(|&x| SupportPoint::from_x(dd(x))));
    }
    let mut worst = 0.0f64;
    for x in pts {
        let k = transition_kernel(&KernelSpec { a, b, q, s, t, x, support: Some((c, d)) }, tol)?;
        for j in 0..=jmax {
            let lhs = k.integrate_points(|y| scaled_polynomial(j, y.x, a, b, c, d, q, t))?;
            let rhs = scaled_polynomial(j, x.x, a, b, c, d, q, s)?;
            worst = worst.max((lhs - rhs).abs().to_f64() / rhs.abs().to_f64().max(1.0));
        }
    }
    Ok(worst)
}

/// Relative gap between the nested integral under `(A,B,C,D; t)` and under
/// `(C,D,A,B; 1/t reversed)` with the factors reversed.
pub fn time_reversal_residual(p: &BoundaryParams, times: &[f64], factors: &[(f64, f64)], tol: &Tolerances) -> Result<f64> {
    let (a, b, c, d, q) = (dd(p.a), dd(p.b), dd(p.c), dd(p.d), dd(p.q));
    let fwd = MultiAwSpec::new(a, b, c, d, q, times.iter().map(|&t| dd(t)).collect());
    let rev = MultiAwSpec::new(c, d, a, b, q, times.iter().rev().map(|&t| dd(1.0 / t)).collect());
    let gf: Vec<Poly<Dd>> = factors.iter().map(|&(u, v)| Poly::affine(dd(u), dd(v))).collect();
    let gr: Vec<Poly<Dd>> = gf.iter().rev().cloned().collect();
    let x = multi_integrate_nested(&fwd, &gf, tol)?.to_f64();
    let y = multi_integrate_nested(&rev, &gr, tol)?.to_f64();
    Ok((x - y).abs() / x.abs().max(1.0))
}

/// Least-squares slope of `log TV(P_{s,t}(x,·))` against `log(t-s)` for
/// `t-s = 2^-3 … 2^-10`, minimized over the atoms `x` of `U_s`, with the
/// largest `TV (t-s)²` seen.
pub fn kernel_tv_slope(p: &BoundaryParams, s: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let (a, b, c, d, q) = (p.a, p.b, p.c, p.d, p.q);
    let pis = pi_marginal(a, b, c, d, q, s, tol)?;
    let atoms = atom_points(&pis);
    if atoms.is_empty() {
        return Err(Error::Domain("U_s has no atoms".into()));
    }
    let mut slope = f64::INFINITY;
    let mut bound = 0.0f64;
    for x in atoms {
        let mut pts = Vec::new();
        for k in 3..=10 {
            let h = 0.5f64.powi(k);
            let m = transition_kernel(&KernelSpec { a, b, q, s, t: s + h, x, support: Some((c, d)) }, tol)?;
            let tv = m.total_variation()?;
            bound = bound.max(tv * h * h);
            pts.push((h.ln(), tv.ln()));
        }
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slope = slope.min(sxy / sxx);
    }
    Ok((slope, bound))
}

/// `D` values in `(-1, 0]` with `q^l ABCD` within `rel` of 1, on both sides.
pub fn near_resonant_d(a: f64, b: f64, c: f64, q: f64, rel: f64) -> Vec<f64> {
    let abc = a * b * c;
    let mut out = Vec::new();
    if abc == 0.0 {
        return out;
    }
    for l in 0..60 {
        let ql = if l == 0 { 1.0 } else { q.powi(l) };
        if ql == 0.0 {
            break;
        }
        let d0 = 1.0 / (abc * ql);
        for d in [d0 * (1.0 - rel), d0 * (1.0 + rel)] {
            if d > -1.0 && d <= 0.0 {
                out.push(d);
            }
        }
    }
    out
}

/// `TV(π_1)(1 - BD) / |π_1({y_0(1)})|` for each `D`.
pub fn atom_ratios(a: f64, b: f64, c: f64, q: f64, ds: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    ds.iter()
        .map(|&d| {
            let pi1 = pi_marginal(dd(a), dd(b), dd(c), dd(d), dd(q), Dd::one(), tol)?;
            let top = pi1.top_atom().ok_or_else(|| Error::Phase("π_1 has no top atom".into()))?;
            Ok((pi1.total_variation()? * (Dd::one() - dd(b) * dd(d)) / top.mass.abs()).to_f64())
        })
        .collect()
}

/// Rate pairs ordered so the second system holds more particles.
pub fn random_ordered_pair(rng: &mut ChaCha8Rng) -> (OpenAsepRates, OpenAsepRates) {
    let mut u = || rng.gen_range(0.05..1.5);
    let (a1, b1, g1, d1) = (u(), u(), u() * 0.3, u() * 0.3);
    let (da, db, dg, ddl) = (u() * 0.5, u() * 0.5, u() * 0.2, u() * 0.2);
    let q = rng.gen_range(0.0..0.9);
    let lo = OpenAsepRates { alpha: a1, beta: b1 + db, gamma: g1 + dg, delta: d1, q };
    let hi = OpenAsepRates { alpha: a1 + da, beta: b1, gamma: g1, delta: d1 + ddl, q };
    (lo, hi)
}

/// `max_t (E_lo[Π t^τ] - E_hi[Π t^τ])⁺` over `t ∈ {1, 1.2}^n`.
pub fn sandwich_residual(n: usize, lo: &OpenAsepRates, hi: &OpenAsepRates) -> Result<f64> {
    let (ml, mh) = (stationary_measure(n, lo)?, stationary_measure(n, hi)?);
    let mut worst = 0.0f64;
    for sel in 0..1usize << n {
        let t: Vec<f64> = (0..n).map(|i| if sel >> i & 1 == 1 { 1.2 } else { 1.0 }).collect();
        worst = worst.max(ml.generating_function(&t)? - mh.generating_function(&t)?);
    }
    Ok(worst)
}

fn random_measure(rng: &mut ChaCha8Rng, m: usize) -> BinaryMeasure {
    let mut w: Vec<f64> = (0..1usize << m).map(|_| rng.gen::<f64>().powi(3)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    BinaryMeasure::probability(m, w).expect("normalized")
}

/// `max (tv - bound)⁺` over random measure pairs and random valid grids.
pub fn gf_bound_residual(m: usize, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..pairs {
        let mu = random_measure(&mut rng, m);
        let nu = if k == 0 { mu.clone() } else { random_measure(&mut rng, m) };
        let grid: Vec<(f64, f64)> = (0..m)
            .map(|_| {
                let a = rng.gen_range(0.1..3.0);
                (a, a + rng.gen_range(0.05..2.0))
            })
            .collect();
        let bound = gf_tv_bound(&mu, &nu, &grid)?;
        let tv = tv_distance(&mu, &nu)?;
        if k == 0 && bound != 0.0 {
            return Err(Error::Domain(format!("bound {bound} for identical measures")));
        }
        worst = worst.max(tv - bound);
    }
    Ok(worst)
}

/// The θ formula with `max(A,1)` and `max(C,1)` terms, where the `qC` (LD) or
/// `qA` (HD) term only enters when that atom exists.
pub fn theta_closed_form(p: &BoundaryParams) -> Result<f64> {
    let (big, small) = match phase_of(p.a, p.c) {
        Phase::LowDensity => (p.c, p.a),
        Phase::HighDensity => (p.a, p.c),
        other => return Err(Error::Phase(format!("θ needs LD or HD, got {other}"))),
    };
    let j = |x: f64| x + 1.0 / x;
    let mut num = 2.0f64.max(j(small.max(1.0)));
    if p.q * big >= 1.0 {
        num = num.max(j(p.q * big));
    }
    Ok((2.0 + num) / (2.0 + j(big)))
}

/// Largest relative gap between the exact generating function of `μ_{n,m}`
/// and the integral formula, over a few ordered `t` tuples and both backends.
pub fn characterization_residual(p: &BoundaryParams, n: usize, m: usize, tol: &Tolerances) -> Result<f64> {
    let eps = characterization_epsilon(p);
    let mu = stationary_measure(n, &p.to_rates())?.marginal(Which::Last, m)?;
    let tuples: Vec<Vec<f64>> = vec![
        (0..m).map(|i| 1.0 + eps * (i + 1) as f64 / (m + 2) as f64).collect(),
        (0..m).map(|i| 1.0 + eps * (0.1 + 0.8 * i as f64 / m as f64)).collect(),
        (0..m).map(|i| if i + 1 == m { 1.0 + 0.95 * eps } else { 1.0 }).collect(),
    ];
    let mut worst = 0.0f64;
    for t in tuples {
        let want = mu.generating_function(&t)?;
        let tt: Vec<Dd> = t.iter().map(|&v| dd(v)).collect();
        for backend in [Backend::Projection, Backend::Nested] {
            let got = theorem_rhs(p, n, &tt, backend, tol)?.to_f64();
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    Ok(worst)
}

/// `max |dual μ(A,B,C,D) - μ(C,D,A,B)|`.
pub fn particle_hole_residual(p: &BoundaryParams, n: usize) -> Result<f64> {
    let mu = stationary_measure(n, &p.to_rates())?.particle_hole_dual();
    let nu = stationary_measure(n, &p.swapped().to_rates())?;
    Ok(mu.weights.iter().zip(&nu.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Kernels from atoms and continuous points of `U_s` stay inside `U_t`; in
/// HD the kernel from the top atom is the point mass at `y_0(t)`.
pub fn support_residual(p: &BoundaryParams, s: f64, t: f64, tol: &Tolerances) -> Result<f64> {
    let (a, b, c, d, q) = (dd(p.a), dd(p.b), dd(p.c), dd(p.d), dd(p.q));
    let (s, t) = (dd(s), dd(t));
    let pis = pi_marginal(a, b, c, d, q, s, tol)?;
    let pit = pi_marginal(a, b, c, d, q, t, tol)?;
    let in_ut = |y: Dd| {
        (pit.has_continuous && y.abs() <= Dd::one())
            || pit.support_atoms().any(|u| (u.location - y).abs().to_f64() <= 1e-10)
    };
    let mut worst = 0.0f64;
    let mut starts: Vec<SupportPoint<Dd>> = atom_points(&pis);
    if pis.has_continuous {
        starts.extend([-0.7, 0.1, 0.6].iter().map(|&x| SupportPoint::from_x(dd(x))));
    }
    for x in starts {
        let k = transition_kernel(&KernelSpec { a, b, q, s, t, x, support: Some((c, d)) }, tol)?;
        if k.support_atoms().filter(|at| at.mass.abs().to_f64() > 1e-14).any(|at| !in_ut(at.location)) {
            worst = worst.max(1.0);
        }
    }
    if phase_of(p.a, p.c) == Phase::HighDensity {
        if let (Some(top_s), Some(top_t)) = (pis.top_atom(), pit.top_atom()) {
            let x = SupportPoint { x: top_s.location, kind: PointKind::Atom { root: top_s.root } };
            let k = transition_kernel(&KernelSpec { a, b, q, s, t, x, support: Some((c, d)) }, tol)?;
            for at in &k.atoms {
                let want = if (at.location - top_t.location).abs().to_f64() <= 1e-10 { 1.0 } else { 0.0 };
                worst = worst.max((at.mass.to_f64() - want).abs());
            }
            worst = worst.max(k.continuous_mass.abs().to_f64());
        }
    }
    Ok(worst)
}

/// Worst `(tv(n)/tv(n-2)) / θ²` over the largest three `n` of the scan;
/// zero when every distance is below `1e-9`.
pub fn convergence_ratio(p: &BoundaryParams, n_list: &[usize], m: usize, opts: &ScanOptions) -> Result<(f64, Vec<f64>)> {
    let rep = convergence_scan_with(p, n_list, m, opts)?;
    let tvs: Vec<f64> = rep.rows.iter().map(|r| r.tv).collect();
    if tvs.iter().all(|&v| v <= 1e-9) {
        return Ok((0.0, tvs));
    }
    let th2 = rep.theta * rep.theta;
    let k = tvs.len();
    let worst = (k.saturating_sub(3).max(1)..k).map(|i| tvs[i] / tvs[i - 1] / th2).fold(0.0, f64::max);
    Ok((worst, tvs))
}

fn marginal_gap(big: &BinaryMeasure, small: &BinaryMeasure, which: Which) -> Result<f64> {
    tv_distance(&big.marginal(which, small.m)?, small)
}

/// `λ_{m+1}` against `λ_m`, `m < mmax`.
pub fn lambda_consistency(p: &BoundaryParams, mmax: usize, opts: &LimitOptions) -> Result<f64> {
    let ls: Vec<BinaryMeasure> = (1..=mmax).map(|m| lambda_measure_with(p, m, opts)).collect::<Result<_>>()?;
    ls.windows(2).map(|w| marginal_gap(&w[1], &w[0], Which::First)).try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// `η_{m+1}` against `η_m`, `m < mmax`. `η_m` describes the sites next to the
/// right boundary, so the comparison drops the leftmost site of `η_{m+1}`.
pub fn eta_consistency(p: &BoundaryParams, mmax: usize, opts: &LimitOptions) -> Result<f64> {
    let es: Vec<BinaryMeasure> = (1..=mmax).map(|m| eta_measure_with(p, m, opts)).collect::<Result<_>>()?;
    es.windows(2).map(|w| marginal_gap(&w[1], &w[0], Which::Last)).try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// HD: `η_m` against `Ber_m(A/(1+A))`.
pub fn eta_identification(p: &BoundaryParams, m: usize, opts: &LimitOptions) -> Result<f64> {
    tv_distance(&eta_measure_with(p, m, opts)?, &bernoulli_product(m, p.a / (1.0 + p.a)))
}

/// `λ_m(A,B,C,D)` against the flip of `η_m(C,D,A,B)`.
pub fn duality_bridge(p: &BoundaryParams, m: usize, opts: &LimitOptions) -> Result<f64> {
    let lam = lambda_measure_with(p, m, opts)?;
    let eta = eta_measure_with(&p.swapped(), m, opts)?;
    tv_distance(&lam, &flip(&eta))
}

/// Distance of the boundary limit (`λ_m` in HD, `η_m` in LD) to its own
/// product approximation, and on the `AC = 1` line also the largest distance
/// of `μ_n` to `Ber_n(A/(1+A))` for `n ≤ nmax`.
pub fn product_distance(p: &BoundaryParams, m: usize, nmax: usize, opts: &LimitOptions) -> Result<f64> {
    let lim = match phase_of(p.a, p.c) {
        Phase::HighDensity => lambda_measure_with(p, m, opts)?,
        Phase::LowDensity => eta_measure_with(p, m, opts)?,
        other => return Err(Error::Phase(format!("needs LD or HD, got {other}"))),
    };
    let (_, mut d) = product_approximation(&lim)?;
    if on_ac_line(p.a, p.c) {
        let rho = p.a / (1.0 + p.a);
        d = d.max(tv_distance(&lim, &bernoulli_product(m, rho))?);
        for n in 1..=nmax {
            d = d.max(tv_distance(&stationary_measure(n, &p.to_rates())?, &bernoulli_product(n, rho))?);
        }
    }
    Ok(d)
}

/// Largest `|mean - exact| / stderr` over the words of the first-2 marginal.
pub fn mc_residual(p: &BoundaryParams, n: usize, total_time: f64, seed: u64) -> Result<f64> {
    let r = p.to_rates();
    let exact = stationary_measure(n, &r)?.marginal(Which::First, 2)?;
    let stats: Vec<Statistic> = (0..4).map(|w| Statistic::Word { which: WhichEnd::First, m: 2, word: w }).collect();
    let est = simulate_estimates(n, &r, &stats, total_time, default_burn_in(n, &r), seed)?;
    Ok(est
        .iter()
        .zip(&exact.weights)
        .map(|(e, &w)| (e.mean - w).abs() / e.stderr.max(1e-300))
        .fold(0.0, f64::max))
}

/// Round trip through the rate map.
pub fn rate_map_residual(p: &BoundaryParams) -> Result<f64> {
    let back = p.to_rates().to_boundary();
    Ok([(back.a, p.a), (back.b, p.b), (back.c, p.c), (back.d, p.d)]
        .iter()
        .map(|&(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max))
}

/// Zero when the classification matches the defining inequalities and `θ`
/// lies in `(0,1)`.
pub fn phase_residual(p: &BoundaryParams) -> Result<f64> {
    let info = classify_phase(p.a, p.c, p.q)?;
    let (a, c) = (p.a, p.c);
    let phase = if a > 1.0 && a > c {
        Phase::HighDensity
    } else if c > 1.0 && c > a {
        Phase::LowDensity
    } else if a < 1.0 && c < 1.0 {
        Phase::MaximalCurrent
    } else {
        Phase::Boundary
    };
    let region = if a * c < 1.0 {
        Region::Fan
    } else if a * c > 1.0 {
        Region::Shock
    } else {
        Region::Boundary
    };
    let mut bad = info.phase != phase || info.region != region || region_of(a, c) != region;
    if let Some(th) = info.theta {
        bad |= !(th > 0.0 && th < 1.0);
    }
    Ok(if bad { 1.0 } else { 0.0 })
}

/// Budget expression at `n_max` when the decreasing tail starts by
/// `n_max / 2`, infinity otherwise.
pub fn budget_residual(p: &BoundaryParams, h: f64, n_max: usize) -> Result<f64> {
    let rep = budget_check(theta_from_support(p)?, h, n_max)?;
    Ok(if rep.pass() { 10f64.powf(rep.log10_at_n_max) } else { f64::INFINITY })
}

/// Random admissible quadruples for the measure-level checks.
pub fn quadruple_grid(count: usize, seed: u64) -> Vec<AwParams<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = [-3.5, -2.2, -1.4, -0.8, -0.4, 0.0, 0.3, 0.7, 1.3, 2.1, 3.2];
    let qs = [0.0, 0.2, 0.5, 0.7];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pick = || choices[rng.gen_range(0..choices.len())] * rng.gen_range(0.9..1.1);
        let (a, b, c, d) = (pick(), pick(), pick(), pick());
        let q = qs[rng.gen_range(0..qs.len())];
        let p = AwParams::from_f64(a, b, c, d, q);
        if check_admissible(&p, 1e-6).pass() {
            out.push(p);
        }
    }
    out
}

/// Widens `f64` parameters to double-double.
pub fn to_dd(p: &AwParams<f64>) -> AwParams<Dd> {
    use crate::qseries::CdPair;
    let cd = match p.cd {
        CdPair::Real(c, d) => CdPair::Real(dd(c), dd(d)),
        CdPair::Conjugate { re, im } => CdPair::Conjugate { re: dd(re), im: dd(im) },
    };
    AwParams { a: dd(p.a), b: dd(p.b), cd, q: dd(p.q) }
}

/// Whether the integral formula applies directly at `p`.
pub fn characterization_applies(p: &BoundaryParams) -> bool {
    characterization_conditions(p).hold()
}
