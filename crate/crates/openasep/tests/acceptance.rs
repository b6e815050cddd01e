//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false` so the lines always reach the test log. The
//! process exits nonzero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use openasep::asep_exact::{stationary_measure, BinaryMeasure, BoundaryParams};
use openasep::aw_measure::{build_from_params, Tolerances};
use openasep::limits::{
    bernoulli_product, budget_check, eta_measure_with, gf_tv_bound, lambda_measure_with, product_approximation,
    theta_from_support, tv_distance, LimitOptions, ScanOptions, ScanTarget,
};
use openasep::verify::{
    atom_ratios, characterization_applies, characterization_residual, convergence_ratio, gf_bound_residual,
    kernel_tv_slope, lambda_consistency, mass_residual, mc_residual, near_resonant_d, orthogonality_residual,
    particle_hole_residual, phase_cells, projection_residual, quadruple_grid, random_ordered_pair, sandwich_residual,
    time_reversal_residual, to_dd,
};
use openasep::Result;

const SEED: u64 = 20240;

/// Criteria expected to fail, with the measured reason in the README.
/// Criterion 6: the two-step ratios meet the θ² rate, but d_TV at n = 12 is
/// about 1.9e-3, not below 1e-3.
const KNOWN_FAILURES: &[usize] = &[6];

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Result<Verdict>;

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn bp(a: f64, b: f64, c: f64, d: f64, q: f64) -> BoundaryParams {
    BoundaryParams::new(a, b, c, d, q).unwrap()
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn limit_opts() -> LimitOptions {
    LimitOptions::default()
}

fn c1_mass() -> Result<Verdict> {
    let quads = quadruple_grid(200, SEED);
    let loose = Tolerances { mass: f64::INFINITY, ..tol() };
    let (mut worst, mut min_atoms, mut max_atoms, mut pos, mut neg) = (0.0f64, usize::MAX, 0, 0, 0);
    for q in &quads {
        worst = worst.max(mass_residual(to_dd(q), &tol())?);
        let m = build_from_params(to_dd(q), &loose)?;
        min_atoms = min_atoms.min(m.atoms.len());
        max_atoms = max_atoms.max(m.atoms.len());
        if m.has_continuous {
            if m.density_sign > 0 {
                pos += 1;
            } else if m.density_sign < 0 {
                neg += 1;
            }
        }
    }
    let spans = min_atoms == 0 && max_atoms >= 4 && pos > 0 && neg > 0;
    verdict(
        worst <= 1e-8 && spans,
        format!(
            "{} quadruples, max |mass-1| = {worst:.2e}, atoms {min_atoms}..{max_atoms}, density + {pos} / - {neg}",
            quads.len()
        ),
    )
}

fn c2_orthogonality() -> Result<Verdict> {
    let quads = quadruple_grid(200, SEED);
    let mut worst = 0.0f64;
    for q in &quads {
        worst = worst.max(orthogonality_residual(to_dd(q), 6, &tol())?);
    }
    verdict(worst <= 1e-8, format!("j,k <= 6 on {} quadruples, max residual {worst:.2e}", quads.len()))
}

fn c3_projection() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst = 0.0f64;
    let cells = phase_cells();
    for (_, p) in &cells {
        let s = rng.gen_range(1.0..1.09);
        let t = rng.gen_range(s + 0.002..1.1);
        let xs: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.95..0.95)).collect();
        worst = worst.max(projection_residual(p, s, t, 5, &xs, &tol())?);
    }
    verdict(worst <= 1e-8, format!("j <= 5 at {} points, atoms + 5 interior x, max {worst:.2e}", cells.len()))
}

fn c4_characterization() -> Result<Verdict> {
    let cells: Vec<(&str, BoundaryParams)> = phase_cells().into_iter().filter(|(l, _)| !l.starts_with("MC")).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, p) in &cells {
        if !characterization_applies(p) {
            continue;
        }
        for n in [2, 4, 7, 10] {
            for m in 1..=3.min(n - 1) {
                worst = worst.max(characterization_residual(p, n, m, &tol())?);
                count += 1;
            }
        }
    }
    verdict(
        worst <= 1e-6,
        format!("{count} (point, n, m) cases over LD/HD x fan/shock, both backends, max rel {worst:.2e}"),
    )
}

fn c5_time_reversal() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let cells = phase_cells();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let p = &cells[k % cells.len()].1;
        let m = 1 + k % 3;
        let mut times: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..1.1)).collect();
        times.sort_by(f64::total_cmp);
        let f: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
        worst = worst.max(time_reversal_residual(p, &times, &f, &tol())?);
    }
    verdict(worst <= 1e-8, format!("20 functionals, m <= 3, max {worst:.2e}"))
}

fn scan_opts() -> ScanOptions {
    ScanOptions { target: ScanTarget::First, limit: limit_opts(), ..Default::default() }
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_tvs(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ")
}

fn c6_ld_convergence() -> Result<Verdict> {
    let p = bp(0.5, 0.0, 3.0, 0.0, 0.5);
    let theta = theta_from_support(&p)?;
    let (r, tvs) = convergence_ratio(&p, &[4, 6, 8, 10, 12], 2, &scan_opts())?;
    let last = *tvs.last().unwrap();
    verdict(
        decreasing(&tvs) && r <= 1.2 && last <= 1e-3,
        format!("theta {theta:.6}, tv {}, worst ratio/theta^2 {r:.3}, final {last:.2e} (needs <= 1e-3)", fmt_tvs(&tvs)),
    )
}

fn c7_hd_convergence() -> Result<Verdict> {
    let p = bp(3.0, 0.0, 0.6, 0.0, 0.5);
    let (r, tvs) = convergence_ratio(&p, &[4, 6, 8, 10, 12], 2, &scan_opts())?;
    let cons = lambda_consistency(&p, 3, &limit_opts())?;
    verdict(
        decreasing(&tvs) && r <= 1.2 && cons <= 1e-8,
        format!("tv {}, worst ratio/theta^2 {r:.3}, lambda_2 vs lambda_3 {cons:.2e}", fmt_tvs(&tvs)),
    )
}

fn c8_ac_one() -> Result<Verdict> {
    let opts = limit_opts();
    let mut exact = 0.0f64;
    for p in [bp(2.0, 0.0, 0.5, 0.0, 0.5), bp(1.0 / 3.0, 0.0, 3.0, 0.0, 0.0)] {
        let rho = p.a / (1.0 + p.a);
        for n in 1..=10 {
            exact = exact.max(tv_distance(&stationary_measure(n, &p.to_rates())?, &bernoulli_product(n, rho))?);
        }
        let lim = if p.a > 1.0 { lambda_measure_with(&p, 2, &opts)? } else { eta_measure_with(&p, 2, &opts)? };
        exact = exact.max(tv_distance(&lim, &bernoulli_product(2, rho))?);
    }
    // η on the HD side of the line is the same product
    let p = bp(2.0, 0.0, 0.5, 0.0, 0.5);
    exact = exact.max(tv_distance(&eta_measure_with(&p, 2, &opts)?, &bernoulli_product(2, 2.0 / 3.0))?);
    let mut off = f64::INFINITY;
    for p in [bp(2.0, 0.0, 0.4, 0.0, 0.5), bp(3.0, 0.0, 0.5, 0.0, 0.5)] {
        off = off.min(product_approximation(&lambda_measure_with(&p, 2, &opts)?)?.1);
    }
    verdict(
        exact <= 1e-9 && off > 1e-4,
        format!("AC = 1 max distance {exact:.2e}; AC in {{0.8, 1.5}} min distance to product {off:.2e}"),
    )
}

fn c9_gf_bound() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for m in 1..=4 {
        worst = worst.max(gf_bound_residual(m, 100, SEED + m as u64)?);
    }
    let example = gf_tv_bound(&bernoulli_product(1, 0.5), &BinaryMeasure::point(1, 0), &[(1.0, 2.0)])?;
    verdict(
        worst <= 1e-12 && example == 0.75,
        format!("max (tv - bound)+ over 400 pairs {worst:.2e}; worked example {example}"),
    )
}

fn c10_kernel_scaling() -> Result<Verdict> {
    let mut slope = f64::INFINITY;
    let mut bound = 0.0f64;
    for p in [bp(3.0, 0.0, 0.6, 0.0, 0.5), bp(0.5, 0.0, 3.0, 0.0, 0.5)] {
        let (s, b) = kernel_tv_slope(&p, 1.0, &tol())?;
        slope = slope.min(s);
        bound = bound.max(b);
    }
    verdict(slope >= -2.1, format!("min log-log slope {slope:.3}, max TV*(t-s)^2 {bound:.3e}"))
}

fn c11_atom_ratio() -> Result<Verdict> {
    let regular: Vec<f64> = (0..20).map(|k| -(k as f64) / 20.0).collect();
    let mut worst = 0.0f64;
    let mut near_total = 0;
    for (a, b, c, q) in [(5.0, -0.9, 0.5, 0.5), (4.0, -0.6, 0.5, 0.0), (3.0, -0.5, 0.6, 0.5)] {
        let near = near_resonant_d(a, b, c, q, 1e-6);
        near_total += near.len();
        let reg = atom_ratios(a, b, c, q, &regular, &tol())?;
        let nr = atom_ratios(a, b, c, q, &near, &tol())?;
        let fit = reg.iter().cloned().fold(0.0, f64::max);
        let all = reg.iter().chain(&nr).cloned().fold(0.0, f64::max);
        worst = worst.max(all / fit);
    }
    verdict(
        worst <= 2.0 && near_total > 0,
        format!("{near_total} near-resonant D values, max ratio / fitted constant {worst:.3}"),
    )
}

fn c12_duality_sandwich() -> Result<Verdict> {
    let mut dual = 0.0f64;
    for (_, p) in phase_cells() {
        for n in 1..=8 {
            dual = dual.max(particle_hole_residual(&p, n)?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 12);
    let mut sand = 0.0f64;
    for k in 0..20 {
        let (lo, hi) = random_ordered_pair(&mut rng);
        sand = sand.max(sandwich_residual(4 + k % 5, &lo, &hi)?);
    }
    verdict(
        dual <= 1e-10 && sand <= 1e-10,
        format!("duality max {dual:.2e} for n <= 8; sandwich violation {sand:.2e} over 20 pairs"),
    )
}

fn c13_monte_carlo() -> Result<Verdict> {
    let mut worst = 0.0f64;
    let points = [bp(3.0, 0.0, 0.6, 0.0, 0.5), bp(0.3, 0.0, 2.0, 0.0, 0.0), bp(0.5, -0.2, 0.6, -0.1, 0.5)];
    for (k, p) in points.iter().enumerate() {
        worst = worst.max(mc_residual(p, 6, 20_000.0, SEED + 13 + k as u64)?);
    }
    verdict(worst <= 4.0, format!("first-2 words at n = 6, 3 points, max |z| {worst:.2}"))
}

fn c14_budget() -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut pass = true;
    for theta in [0.5, 0.75] {
        for h in [1.0, 10.0] {
            let r = budget_check(theta, h, 10_000)?;
            pass &= r.pass();
            parts.push(format!(
                "theta {theta} H {h}: N = {}, log10 at 1e4 = {:.1}",
                r.n_star.map_or("-".into(), |n| n.to_string()),
                r.log10_at_n_max
            ));
        }
    }
    verdict(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(usize, Criterion); 14] = [
        (1, c1_mass),
        (2, c2_orthogonality),
        (3, c3_projection),
        (4, c4_characterization),
        (5, c5_time_reversal),
        (6, c6_ld_convergence),
        (7, c7_hd_convergence),
        (8, c8_ac_one),
        (9, c9_gf_bound),
        (10, c10_kernel_scaling),
        (11, c11_atom_ratio),
        (12, c12_duality_sandwich),
        (13, c13_monte_carlo),
        (14, c14_budget),
    ];
    let mut unexpected = Vec::new();
    for (k, f) in criteria {
        let start = Instant::now();
        let v = f().unwrap_or_else(|e| Verdict { pass: false, detail: format!("error: {e}") });
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {status}  {} ({:.1} s)", v.detail, start.elapsed().as_secs_f64());
        if !v.pass && !KNOWN_FAILURES.contains(&k) {
            unexpected.push(k);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures (known: {KNOWN_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
