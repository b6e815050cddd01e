//! Time-indexed marginals `π_t` and transition kernels `P_{s,t}(x, dy)`.

use super::{build_from_params, build_unit_mass, AwSignedMeasure, PointKind, SupportPoint, Tolerances};
use crate::error::{Error, Result};
use crate::qseries::{AwParams, CdPair};
use crate::real::Real;

/// `π_t = ν(A√t, B√t, C/√t, D/√t)`.
pub fn pi_marginal<R: Real>(a: R, b: R, c: R, d: R, q: R, t: R, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    if !(t > R::zero()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let st = t.sqrt();
    build_from_params(AwParams::real(a * st, b * st, c / st, d / st, q), tol)
}

/// Conditioning data for `P_{s,t}(x, ·)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelSpec<R> {
    pub a: R,
    pub b: R,
    pub q: R,
    pub s: R,
    pub t: R,
    pub x: SupportPoint<R>,
    /// `(C, D)`, when given, is used to verify that `x` lies in `U_s`.
    pub support: Option<(R, R)>,
}

pub(crate) fn kernel_params<R: Real>(a: R, b: R, q: R, s: R, t: R, x: &SupportPoint<R>) -> AwParams<R> {
    let st = t.sqrt();
    let r = (s / t).sqrt();
    let cd = match x.kind {
        PointKind::Atom { root } => CdPair::Real(r * root, r / root),
        PointKind::Continuous { sin } if sin == R::zero() => CdPair::Real(r * x.x, r * x.x),
        PointKind::Continuous { sin } => CdPair::Conjugate { re: r * x.x, im: r * sin.abs() },
    };
    AwParams { a: a * st, b: b * st, cd, q }
}

/// Kernel without the support check. With `unit_mass` the continuous mass
/// is inferred from the atoms rather than integrated.
#[allow(clippy::too_many_arguments)]
pub(crate) fn kernel_measure<R: Real>(
    a: R,
    b: R,
    q: R,
    s: R,
    t: R,
    x: &SupportPoint<R>,
    tol: &Tolerances,
    unit_mass: bool,
) -> Result<AwSignedMeasure<R>> {
    let params = kernel_params(a, b, q, s, t, x);
    if s == t {
        return Ok(AwSignedMeasure::point_mass(params, *x, tol));
    }
    if unit_mass {
        build_unit_mass(params, tol)
    } else {
        build_from_params(params, tol)
    }
}

/// Whether `x` lies in the support `U` of `m` within `1e-10`.
pub fn in_support<R: Real>(m: &AwSignedMeasure<R>, x: R) -> bool {
    let tol = 1e-10 * x.abs().to_f64().max(1.0);
    if m.has_continuous && x.abs() <= R::one() {
        return true;
    }
    m.support_atoms().any(|a| (a.location - x).abs().to_f64() <= tol)
}

/// `P_{s,t}(x, ·)`; the point mass at `x` when `s = t`.
pub fn transition_kernel<R: Real>(spec: &KernelSpec<R>, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    if spec.s > spec.t {
        return Err(Error::Domain(format!("kernel requires s ≤ t, got s={} t={}", spec.s, spec.t)));
    }
    if let Some((c, d)) = spec.support {
        let pis = pi_marginal(spec.a, spec.b, c, d, spec.q, spec.s, tol)?;
        if !in_support(&pis, spec.x.x) {
            return Err(Error::XNotInSupport(spec.x.x.to_f64()));
        }
    }
    kernel_measure(spec.a, spec.b, spec.q, spec.s, spec.t, &spec.x, tol, false)
}
