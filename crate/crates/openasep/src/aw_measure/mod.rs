//! Askey-Wilson signed measures `ν(dx; a,b,c,d)`.
//!
//! A measure has finitely many atoms outside `(-1,1)` and a density on
//! `(-1,1)` whose sign is fixed. Integration over the continuous part uses the
//! substitution `x = cos θ` and adaptive Gauss-Legendre panels.

mod kernel;
mod multi;
mod quadrature;

pub use kernel::{pi_marginal, transition_kernel, KernelSpec};
pub use multi::{
    chain_integrate_nested, chain_integrate_projection, multi_integrate_nested,
    multi_integrate_projection, scaled_polynomial, MultiAwSpec, Poly,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{pair_products, qpoch_gen_finite, qpoch_gen_infinite, qpoch_set_infinite, AwParams, CdPair, Gen};
use crate::real::Real;

/// Numerical tolerances shared by measure construction and integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative truncation tolerance for infinite products.
    pub product: f64,
    /// Adaptive quadrature tolerance, scaled by `min(1, ∫ |integrand|)`.
    pub quadrature: f64,
    /// Allowed deviation of the total mass from 1.
    pub mass: f64,
    /// Admissibility tolerance δ_Ω.
    pub delta_omega: f64,
    /// Atoms with smaller |mass| do not count as support points.
    pub support_mass: f64,
    /// Maximum panel bisection depth.
    pub max_depth: u32,
    /// Maximum number of times in nested integration.
    pub nested_cap: usize,
    /// Chebyshev nodes for inner functions of nested integration on
    /// `[-1, 1]`; 0 evaluates every quadrature node directly.
    pub nested_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            product: 1e-30,
            quadrature: 1e-12,
            mass: 1e-8,
            delta_omega: 1e-9,
            support_mass: 1e-12,
            max_depth: 48,
            nested_cap: 6,
            nested_nodes: 16,
        }
    }
}

/// Outcome of one Ω condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pass: bool,
    /// Distance to violation (relative for (2), absolute for (3)).
    pub margin: f64,
    /// The `l` attaining the margin, for conditions (2) and (3).
    pub nearest_l: Option<i64>,
    pub warning: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub conditions: [ConditionReport; 3],
}

impl AdmissibilityReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
    pub fn warnings(&self) -> Vec<String> {
        self.conditions
            .iter()
            .enumerate()
            .filter(|(_, c)| c.warning)
            .map(|(i, c)| format!("condition ({}) near violation: {}", i + 1, c.detail))
            .collect()
    }
    fn failure(&self) -> String {
        self.conditions
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.pass)
            .map(|(i, c)| format!("condition ({}): {}", i + 1, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

const L_RANGE: i64 = 60;

/// Checks the three Ω conditions.
pub fn check_admissible<R: Real>(p: &AwParams<R>, delta: f64) -> AdmissibilityReport {
    let q = p.q.to_f64();
    let ab = (p.a * p.b).to_f64();
    let cdp = p.cd.prod().to_f64();
    let c1_margin = (1.0 - ab).min(1.0 - cdp);
    let c1 = ConditionReport {
        pass: ab < 1.0 && cdp < 1.0,
        margin: c1_margin,
        nearest_l: None,
        warning: c1_margin > 0.0 && c1_margin < 10.0 * delta,
        detail: format!("ab = {ab}, cd = {cdp}"),
    };

    let mut large: Vec<(char, f64)> = vec![('a', p.a.to_f64()), ('b', p.b.to_f64())];
    if let CdPair::Real(c, d) = p.cd {
        large.push(('c', c.to_f64()));
        large.push(('d', d.to_f64()));
    }
    large.retain(|(_, v)| v.abs() >= 1.0);
    let mut c2 = ConditionReport {
        pass: true,
        margin: f64::INFINITY,
        nearest_l: None,
        warning: false,
        detail: "no pair of parameters with modulus ≥ 1".into(),
    };
    for i in 0..large.len() {
        for j in 0..large.len() {
            if i == j {
                continue;
            }
            let (ne, e) = large[i];
            let (nf, f) = large[j];
            let ratio = e / f;
            if ratio <= 0.0 {
                continue;
            }
            let ls: Vec<i64> = if q == 0.0 { vec![0] } else { (-L_RANGE..=L_RANGE).collect() };
            for l in ls {
                let ql = if q == 0.0 { 1.0 } else { q.powi(l as i32) };
                let m = (ratio / ql - 1.0).abs();
                if m < c2.margin {
                    c2.margin = m;
                    c2.nearest_l = Some(l);
                    c2.detail = format!("{ne}/{nf} = {ratio} vs q^{l} = {ql}");
                }
            }
        }
    }
    c2.pass = c2.margin >= delta;
    c2.warning = c2.pass && c2.margin < 10.0 * delta;

    let e = p.abcd().to_f64();
    let mut c3 = ConditionReport {
        pass: true,
        margin: f64::INFINITY,
        nearest_l: None,
        warning: false,
        detail: format!("abcd = {e}"),
    };
    let lmax = if q == 0.0 { 0 } else { L_RANGE };
    for l in 0..=lmax {
        let ql = if q == 0.0 { 1.0 } else { q.powi(l as i32) };
        let m = (1.0 - ql * e).abs();
        if m < c3.margin {
            c3.margin = m;
            c3.nearest_l = Some(l);
            c3.detail = format!("q^{l} abcd = {}", ql * e);
        }
    }
    c3.pass = c3.margin >= delta;
    c3.warning = c3.pass && c3.margin < 10.0 * delta;
    AdmissibilityReport { conditions: [c1, c2, c3] }
}

/// A parameter quadruple with its admissibility report.
#[derive(Debug, Clone, PartialEq)]
pub struct AwQuadruple<R> {
    pub params: AwParams<R>,
    pub admissibility: AdmissibilityReport,
}

impl<R: Real> AwQuadruple<R> {
    pub fn new(params: AwParams<R>, delta: f64) -> Self {
        let admissibility = check_admissible(&params, delta);
        AwQuadruple { params, admissibility }
    }
}

/// Which parameter generated an atom. `X` marks the point mass of a kernel with `s = t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
    C,
    D,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<R> {
    pub location: R,
    pub mass: R,
    pub generator: Generator,
    pub k: usize,
    /// `e q^k`, so that `location = (root + 1/root) / 2`.
    pub root: R,
}

/// A point of a support, carrying what a kernel conditioned on it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint<R> {
    pub x: R,
    pub kind: PointKind<R>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointKind<R> {
    /// `x = (root + 1/root)/2` with `|root| ≥ 1`.
    Atom { root: R },
    /// `x = cos θ` with the given `sin θ ≥ 0`.
    Continuous { sin: R },
}

impl<R: Real> SupportPoint<R> {
    /// Builds the point from a bare location.
    pub fn from_x(x: R) -> Self {
        let one = R::one();
        if x.abs() < one {
            let s = ((one - x) * (one + x)).sqrt();
            SupportPoint { x, kind: PointKind::Continuous { sin: s } }
        } else {
            let r = (x * x - one).sqrt();
            let root = if x > R::zero() { x + r } else { x - r };
            SupportPoint { x, kind: PointKind::Atom { root } }
        }
    }
}

/// Point of the `θ` grid with accurate `1 ∓ x`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Angle<R> {
    pub x: R,
    pub sin: R,
    pub omx: R,
    pub opx: R,
}

impl<R: Real> Angle<R> {
    pub fn from_theta(theta: R) -> Self {
        let half = theta * R::from_f64(0.5);
        let (sh, ch) = half.sin_cos();
        let two = R::from_f64(2.0);
        let omx = two * sh * sh;
        let opx = two * ch * ch;
        let sin = two * sh * ch;
        Angle { x: (opx - omx) * R::from_f64(0.5), sin, omx, opx }
    }
    pub fn from_x(x: R) -> Self {
        let one = R::one();
        let omx = one - x;
        let opx = one + x;
        Angle { x, sin: (omx * opx).sqrt(), omx, opx }
    }
}

#[derive(Debug, Clone)]
struct Density<R> {
    /// `(q,ab,ac,ad,bc,bd,cd)_∞ / (2π (abcd)_∞)`.
    scale: R,
    qk: Vec<R>,
    reals: Vec<R>,
    pair: Option<(R, R, R)>,
}

impl<R: Real> Density<R> {
    fn new(p: &AwParams<R>, tol: &Tolerances) -> Result<Self> {
        let q = p.q;
        let ptol = R::from_f64(tol.product);
        let gens = p.gens();
        let mut num_set = vec![Gen::Real(q)];
        num_set.extend(pair_products(&gens));
        let num = qpoch_set_infinite(&num_set, q, ptol)?;
        let den = qpoch_gen_infinite(&Gen::Real(p.abcd()), q, ptol)?;
        let scale = num / (den * R::from_f64(2.0) * R::pi());

        let maxmod = gens.iter().fold(R::one(), |m, g| m.max(g.modulus()));
        let n = crate::qseries::truncation_index(maxmod, q, ptol)?.max(1);
        let mut qk = Vec::with_capacity(n);
        let mut r = R::one();
        for _ in 0..n {
            qk.push(r);
            r *= q;
        }
        let mut reals = vec![p.a, p.b];
        let pair = match p.cd {
            CdPair::Real(c, d) => {
                reals.push(c);
                reals.push(d);
                None
            }
            CdPair::Conjugate { re, im } => Some((re, im.abs(), p.cd.prod().sqrt())),
        };
        Ok(Density { scale, qk, reals, pair })
    }

    /// `f(x) sin θ`, the integrand in θ before multiplying by a test function.
    fn weight(&self, ang: &Angle<R>) -> R {
        let one = R::one();
        let two = R::from_f64(2.0);
        let four = R::from_f64(4.0);
        let s2 = ang.sin * ang.sin;
        let mut num = one;
        let mut den = one;
        for &r in &self.qk {
            let omr = one - r;
            num *= omr * omr + four * r * s2;
            for &e in &self.reals {
                let er = e * r;
                den *= if er >= R::zero() {
                    let t = one - er;
                    t * t + two * er * ang.omx
                } else {
                    let t = one + er;
                    t * t - two * er * ang.opx
                };
            }
            if let Some((re, im, rho)) = self.pair {
                let t = one - rho * r;
                let base = t * t;
                let cx = re * ang.x;
                let cs = im * ang.sin;
                den *= (base + two * r * (rho - (cx - cs))) * (base + two * r * (rho - (cx + cs)));
            }
        }
        self.scale * num / den
    }
}

/// Askey-Wilson signed measure: atoms plus a fixed-sign density on (-1,1).
#[derive(Debug, Clone)]
pub struct AwSignedMeasure<R> {
    pub quadruple: AwQuadruple<R>,
    /// Atoms sorted by decreasing location.
    pub atoms: Vec<Atom<R>>,
    pub has_continuous: bool,
    pub density_sign: i8,
    pub support_top: R,
    pub support_second: R,
    /// `∫_{-1}^{1} f`.
    pub continuous_mass: R,
    pub tol: Tolerances,
    density: Option<Density<R>>,
    breakpoints: Vec<R>,
}

/// Builds `ν(dx; a,b,c,d)` after checking admissibility.
pub fn build_measure<R: Real>(quadruple: AwQuadruple<R>, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    if !quadruple.admissibility.pass() {
        return Err(Error::Inadmissible(quadruple.admissibility.failure()));
    }
    build_unchecked(quadruple, tol)
}

/// Convenience wrapper taking bare parameters.
pub fn build_from_params<R: Real>(params: AwParams<R>, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    build_measure(AwQuadruple::new(params, tol.delta_omega), tol)
}

fn labelled_gens<R: Real>(p: &AwParams<R>) -> Vec<(Generator, Gen<R>)> {
    let mut v = vec![(Generator::A, Gen::Real(p.a)), (Generator::B, Gen::Real(p.b))];
    match p.cd {
        CdPair::Real(c, d) => {
            v.push((Generator::C, Gen::Real(c)));
            v.push((Generator::D, Gen::Real(d)));
        }
        CdPair::Conjugate { .. } => v.push((Generator::C, Gen::Pair { sum: p.cd.sum(), prod: p.cd.prod() })),
    }
    v
}

fn atoms_of<R: Real>(p: &AwParams<R>, tol: &Tolerances) -> Result<Vec<Atom<R>>> {
    let q = p.q;
    let one = R::one();
    let ptol = R::from_f64(tol.product);
    let gens = labelled_gens(p);
    let mut atoms = Vec::new();
    for (i, (label, g)) in gens.iter().enumerate() {
        let e = match g {
            Gen::Real(e) if e.abs() >= one => *e,
            _ => continue,
        };
        let others: Vec<Gen<R>> = gens.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, (_, g))| *g).collect();
        let prod_others = others.iter().fold(one, |acc, g| acc * g.product());
        let inv_e = one / e;

        // p_0 = (e^{-2}, fg, fh, gh)_∞ / (f/e, g/e, h/e, efgh)_∞
        let mut num = qpoch_gen_infinite(&Gen::Real(inv_e * inv_e), q, ptol)?;
        for pp in pair_products(&others) {
            num *= qpoch_gen_infinite(&pp, q, ptol)?;
        }
        let mut den = qpoch_gen_infinite(&Gen::Real(e * prod_others), q, ptol)?;
        for g in &others {
            den *= qpoch_gen_infinite(&g.scaled(inv_e), q, ptol)?;
        }
        let p0 = num / den;

        let mut k = 0usize;
        let mut u = e;
        let mut qk = one;
        loop {
            if u.abs() < one {
                break;
            }
            let mass = if k == 0 {
                p0
            } else {
                let e2 = e * e;
                let mut numk = qk * (one - e2 * qk * qk);
                let mut ql = q;
                for _ in 1..k {
                    numk *= one - e2 * ql;
                    ql *= q;
                }
                for g in &others {
                    numk *= qpoch_gen_finite(&g.scaled(e), q, k);
                }
                let mut denk = qpoch_gen_finite(&Gen::Real(q), q, k) * e.powi(k as i32);
                let mut ql = q;
                for _ in 1..=k {
                    for g in &others {
                        denk *= g.shifted(ql * e);
                    }
                    ql *= q;
                }
                p0 * numk / denk
            };
            atoms.push(Atom { location: (u + one / u) * R::from_f64(0.5), mass, generator: *label, k, root: u });
            if q == R::zero() {
                break;
            }
            k += 1;
            qk *= q;
            u = e * qk;
        }
    }
    atoms.sort_by(|x, y| y.location.partial_cmp(&x.location).unwrap_or(std::cmp::Ordering::Equal));
    Ok(atoms)
}

pub(crate) fn build_unchecked<R: Real>(quadruple: AwQuadruple<R>, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    build_inner(quadruple, tol, true)
}

/// Builds with the continuous mass taken as `1 - Σ atoms` instead of being
/// integrated; used for kernels inside nested integration.
pub(crate) fn build_unit_mass<R: Real>(params: AwParams<R>, tol: &Tolerances) -> Result<AwSignedMeasure<R>> {
    let quadruple = AwQuadruple::new(params, tol.delta_omega);
    if !quadruple.admissibility.pass() {
        return Err(Error::Inadmissible(quadruple.admissibility.failure()));
    }
    build_inner(quadruple, tol, false)
}

fn build_inner<R: Real>(quadruple: AwQuadruple<R>, tol: &Tolerances, integrate_mass: bool) -> Result<AwSignedMeasure<R>> {
    let p = quadruple.params;
    let atoms = atoms_of(&p, tol)?;
    let density = Density::new(&p, tol)?;
    let mut breakpoints = vec![R::zero(), R::pi()];
    if let CdPair::Conjugate { re, im } = p.cd {
        // near-pole of the conjugate pair sits at θ = arg c
        let phi = R::from_f64(im.abs().to_f64().atan2(re.to_f64()));
        if phi > R::zero() && phi < R::pi() {
            breakpoints.insert(1, phi);
        }
    }
    let mut m = AwSignedMeasure {
        quadruple,
        atoms,
        has_continuous: true,
        density_sign: density.scale.signum_i(),
        support_top: R::one(),
        support_second: R::one(),
        continuous_mass: R::zero(),
        tol: *tol,
        density: Some(density),
        breakpoints,
    };
    m.continuous_mass = if integrate_mass {
        m.continuous_integral(|_| Ok(R::one()))?
    } else {
        R::one() - m.atom_mass_total()
    };
    let smt = R::from_f64(tol.support_mass);
    m.has_continuous = m.continuous_mass.abs() > smt;
    if !m.has_continuous {
        m.density_sign = 0;
    }
    m.set_support();
    let total = m.total_mass();
    let dev = (total - R::one()).abs().to_f64();
    if !(dev <= tol.mass) {
        return Err(Error::MassCheckFailed { deviation: dev, tol: tol.mass });
    }
    Ok(m)
}

impl<R: Real> AwSignedMeasure<R> {
    /// The unit point mass at `point`.
    pub fn point_mass(params: AwParams<R>, point: SupportPoint<R>, tol: &Tolerances) -> Self {
        let root = match point.kind {
            PointKind::Atom { root } => root,
            PointKind::Continuous { .. } => R::zero(),
        };
        let quadruple = AwQuadruple::new(params, tol.delta_omega);
        let mut m = AwSignedMeasure {
            quadruple,
            atoms: vec![Atom { location: point.x, mass: R::one(), generator: Generator::X, k: 0, root }],
            has_continuous: false,
            density_sign: 0,
            support_top: point.x,
            support_second: point.x,
            continuous_mass: R::zero(),
            tol: *tol,
            density: None,
            breakpoints: vec![],
        };
        m.set_support();
        m
    }

    fn set_support(&mut self) {
        let smt = R::from_f64(self.tol.support_mass);
        let mut pts: Vec<R> = self.atoms.iter().filter(|a| a.mass.abs() > smt).map(|a| a.location).collect();
        if self.has_continuous {
            pts.push(R::one());
        }
        pts.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
        let top = pts.first().copied().unwrap_or(R::one());
        let second = pts.iter().copied().find(|&v| v < top);
        self.support_top = top;
        self.support_second = match second {
            Some(v) if self.has_continuous => v.max(R::one()),
            Some(v) => v,
            None if self.has_continuous => R::one(),
            None => top,
        };
    }

    pub fn params(&self) -> &AwParams<R> {
        &self.quadruple.params
    }

    pub fn atom_mass_total(&self) -> R {
        self.atoms.iter().fold(R::zero(), |acc, a| acc + a.mass)
    }

    pub fn total_mass(&self) -> R {
        self.atom_mass_total() + self.continuous_mass
    }

    /// Atoms whose mass exceeds the support threshold.
    pub fn support_atoms(&self) -> impl Iterator<Item = &Atom<R>> {
        let smt = R::from_f64(self.tol.support_mass);
        self.atoms.iter().filter(move |a| a.mass.abs() > smt)
    }

    /// The top support atom, if the top of the support is an atom.
    pub fn top_atom(&self) -> Option<&Atom<R>> {
        self.support_atoms().next().filter(|a| a.location == self.support_top)
    }

    /// `f(x)` for `|x| < 1`.
    pub fn density_at(&self, x: R) -> Result<R> {
        if x.abs() >= R::one() {
            return Err(Error::Domain(format!("density_at requires |x| < 1, got {x}")));
        }
        match &self.density {
            None => Ok(R::zero()),
            Some(d) => {
                let ang = Angle::from_x(x);
                Ok(d.weight(&ang) / ang.sin)
            }
        }
    }

    /// `∫_{-1}^{1} f g`.
    pub fn continuous_integral<F>(&self, mut g: F) -> Result<R>
    where
        F: FnMut(&SupportPoint<R>) -> Result<R>,
    {
        let d = match &self.density {
            None => return Ok(R::zero()),
            Some(d) => d,
        };
        quadrature::adaptive(
            |theta| {
                let ang = Angle::from_theta(theta);
                let w = d.weight(&ang);
                if w == R::zero() {
                    return Ok(R::zero());
                }
                let pt = SupportPoint { x: ang.x, kind: PointKind::Continuous { sin: ang.sin } };
                Ok(w * g(&pt)?)
            },
            &self.breakpoints,
            R::from_f64(self.tol.quadrature),
            self.tol.max_depth,
        )
    }

    /// `Σ_atoms p g(y) + ∫ f g` with `g` receiving full support points.
    pub fn integrate_points<F>(&self, mut g: F) -> Result<R>
    where
        F: FnMut(&SupportPoint<R>) -> Result<R>,
    {
        let mut acc = R::zero();
        for a in &self.atoms {
            if a.mass == R::zero() {
                continue;
            }
            let pt = match a.generator {
                Generator::X if a.location.abs() < R::one() => SupportPoint::from_x(a.location),
                _ => SupportPoint { x: a.location, kind: PointKind::Atom { root: a.root } },
            };
            acc += a.mass * g(&pt)?;
        }
        Ok(acc + self.continuous_integral(g)?)
    }

    /// `∫ g dν`.
    pub fn integrate<F: Fn(R) -> R>(&self, g: F) -> Result<R> {
        self.integrate_points(|p| Ok(g(p.x)))
    }

    /// `Σ |p| + |∫ f|`, after a sampled check that the density keeps one sign.
    pub fn total_variation(&self) -> Result<R> {
        if let Some(d) = &self.density {
            let mut seen = 0i8;
            for i in 0..50 {
                let theta = R::pi() * R::from_f64((i as f64 + 0.5) / 50.0);
                let s = d.weight(&Angle::from_theta(theta)).signum_i();
                if s != 0 {
                    if seen != 0 && s != seen {
                        return Err(Error::SignInconsistent(format!("sample {i} of 50")));
                    }
                    seen = s;
                }
            }
        }
        Ok(self.atoms.iter().fold(R::zero(), |acc, a| acc + a.mass.abs()) + self.continuous_mass.abs())
    }

    /// Serializable summary with values rounded to `f64`.
    pub fn to_doc(&self) -> MeasureDoc {
        let p = &self.quadruple.params;
        let (c, d) = match p.cd {
            CdPair::Real(c, d) => (Complex::real(c.to_f64()), Complex::real(d.to_f64())),
            CdPair::Conjugate { re, im } => (
                Complex { re: re.to_f64(), im: im.to_f64() },
                Complex { re: re.to_f64(), im: -im.to_f64() },
            ),
        };
        MeasureDoc {
            quadruple: QuadrupleDoc { a: p.a.to_f64(), b: p.b.to_f64(), c, d, q: p.q.to_f64() },
            admissible: self.quadruple.admissibility.pass(),
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomDoc { location: a.location.to_f64(), mass: a.mass.to_f64(), generator: a.generator, k: a.k })
                .collect(),
            has_continuous: self.has_continuous,
            continuous_mass: self.continuous_mass.to_f64(),
            density_sign: self.density_sign,
            support_top: self.support_top.to_f64(),
            support_second: self.support_second.to_f64(),
            tolerances: self.tol,
            precision_bits: R::BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleDoc {
    pub a: f64,
    pub b: f64,
    pub c: Complex,
    pub d: Complex,
    pub q: f64,
}

impl QuadrupleDoc {
    /// Parameters described by the document.
    pub fn params<R: Real>(&self) -> AwParams<R> {
        let cd = if self.c.im == 0.0 && self.d.im == 0.0 {
            CdPair::Real(R::from_f64(self.c.re), R::from_f64(self.d.re))
        } else {
            CdPair::Conjugate { re: R::from_f64(self.c.re), im: R::from_f64(self.c.im.abs()) }
        };
        AwParams { a: R::from_f64(self.a), b: R::from_f64(self.b), cd, q: R::from_f64(self.q) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDoc {
    pub location: f64,
    pub mass: f64,
    pub generator: Generator,
    pub k: usize,
}

/// JSON form of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub quadruple: QuadrupleDoc,
    pub admissible: bool,
    pub atoms: Vec<AtomDoc>,
    pub has_continuous: bool,
    pub continuous_mass: f64,
    pub density_sign: i8,
    pub support_top: f64,
    pub support_second: f64,
    pub tolerances: Tolerances,
    pub precision_bits: u32,
}

#[cfg(test)]
mod tests;
