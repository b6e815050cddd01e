//! Adaptive composite Gauss-Legendre quadrature on θ-panels.

use crate::error::{Error, Result};
use crate::real::Real;

fn panel<R: Real, F>(f: &mut F, a: R, b: R) -> Result<R>
where
    F: FnMut(R) -> Result<R>,
{
    let half = (b - a) * R::from_f64(0.5);
    let mid = a + half;
    let mut acc = R::zero();
    for &(x, w) in R::gl32() {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

#[allow(clippy::too_many_arguments)]
fn refine<R: Real, F>(f: &mut F, a: R, b: R, whole: R, tol: R, gfloor: R, depth: u32, max_depth: u32) -> Result<R>
where
    F: FnMut(R) -> Result<R>,
{
    let mid = (a + b) * R::from_f64(0.5);
    let l = panel(f, a, mid)?;
    let r = panel(f, mid, b)?;
    let sum = l + r;
    let floor = (R::from_f64(64.0) * R::epsilon() * (l.abs() + r.abs())).max(gfloor);
    let err = (sum - whole).abs();
    if err <= tol.max(floor) {
        return Ok(sum);
    }
    if !err.is_finite() {
        return Err(Error::QuadratureNonconverged(format!("non-finite integrand on [{a}, {b}]")));
    }
    if depth >= max_depth {
        return Err(Error::QuadratureNonconverged(format!(
            "panel [{a:e}, {b:e}] still differs by {err:e} at depth {depth}"
        )));
    }
    let half_tol = tol * R::from_f64(0.5);
    Ok(refine(f, a, mid, l, half_tol, gfloor, depth + 1, max_depth)?
        + refine(f, mid, b, r, half_tol, gfloor, depth + 1, max_depth)?)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, bisecting each segment
/// between consecutive breakpoints until successive estimates agree to `tol`
/// times `min(1, ∫ |f|)`, the integral taken from the coarse panels.
pub(crate) fn adaptive<R: Real, F>(mut f: F, breaks: &[R], tol: R, max_depth: u32) -> Result<R>
where
    F: FnMut(R) -> Result<R>,
{
    let wholes: Vec<R> = breaks.windows(2).map(|w| panel(&mut f, w[0], w[1])).collect::<Result<_>>()?;
    let scale = wholes.iter().fold(R::zero(), |acc, w| acc + w.abs());
    let segs = wholes.len().max(1);
    let seg_tol = tol * scale.min(R::one()) / R::from_i64(segs as i64);
    let mut acc = R::zero();
    for (w, &whole) in breaks.windows(2).zip(&wholes) {
        // rounding in the integrand itself limits how far panels can agree
        let gfloor = R::from_f64(16.0) * R::epsilon() * whole.abs();
        acc += refine(&mut f, w[0], w[1], whole, seg_tol, gfloor, 0, max_depth)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_peaked_function() {
        // ∫_0^π dθ / (1 - 2ρ cos θ + ρ²) = π / (1 - ρ²)
        let rho = 0.999;
        let v = adaptive(
            |t: f64| Ok(1.0 / (1.0 - 2.0 * rho * t.cos() + rho * rho)),
            &[0.0, std::f64::consts::PI],
            1e-12,
            48,
        )
        .unwrap();
        let exact = std::f64::consts::PI / (1.0 - rho * rho);
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
