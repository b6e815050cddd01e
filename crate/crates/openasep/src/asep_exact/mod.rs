//! Exact open ASEP: rate maps, phases, the stationary solve, marginals,
//! duality and generating functions.

mod characterization;
mod measure;
mod solver;

pub use characterization::{
    characterization_conditions, characterization_epsilon, theorem_rhs, Backend, CharacterizationConditions,
};
pub use measure::{BinaryMeasure, MeasureKind, Which};
pub use solver::{generator_transitions, stationary_measure, stationary_solve, SolveOptions, StationarySolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jump rates: right hops 1, left hops `q`, injection `α` / removal `γ` on
/// the left, removal `β` / injection `δ` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenAsepRates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub q: f64,
}

impl OpenAsepRates {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, q: f64) -> Result<Self> {
        let r = OpenAsepRates { alpha, beta, gamma, delta, q };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::Domain(format!("need α, β > 0, got α={} β={}", self.alpha, self.beta)));
        }
        if !(self.gamma >= 0.0 && self.delta >= 0.0) {
            return Err(Error::Domain(format!("need γ, δ ≥ 0, got γ={} δ={}", self.gamma, self.delta)));
        }
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::Domain(format!("need 0 ≤ q < 1, got {}", self.q)));
        }
        Ok(())
    }

    pub fn to_boundary(&self) -> BoundaryParams {
        rates_to_boundary(self)
    }
}

/// `(A, B, C, D, q)` with `A, C ≥ 0` and `B, D ∈ (-1, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub q: f64,
}

impl BoundaryParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<Self> {
        let p = BoundaryParams { a, b, c, d, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.c >= 0.0) {
            return Err(Error::Domain(format!("need A, C ≥ 0, got A={} C={}", self.a, self.c)));
        }
        let in_range = |v: f64| v > -1.0 && v <= 0.0;
        if !(in_range(self.b) && in_range(self.d)) {
            return Err(Error::Domain(format!("need B, D in (-1, 0], got B={} D={}", self.b, self.d)));
        }
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::Domain(format!("need 0 ≤ q < 1, got {}", self.q)));
        }
        Ok(())
    }

    pub fn to_rates(&self) -> OpenAsepRates {
        boundary_to_rates(self)
    }

    /// `(C, D, A, B)`.
    pub fn swapped(&self) -> Self {
        BoundaryParams { a: self.c, b: self.d, c: self.a, d: self.b, q: self.q }
    }
}

/// `φ_±(x, y)`, evaluated without cancellation.
pub fn phi_pm(x: f64, y: f64, q: f64) -> (f64, f64) {
    let u = 1.0 - q - x + y;
    let disc = (u * u + 4.0 * x * y).sqrt();
    if u >= 0.0 {
        let plus = (u + disc) / (2.0 * x);
        let minus = if y == 0.0 { 0.0 } else { -2.0 * y / (u + disc) };
        (plus, minus)
    } else {
        let minus = (u - disc) / (2.0 * x);
        let plus = if y == 0.0 { 0.0 } else { 2.0 * y / (disc - u) };
        (plus, minus)
    }
}

pub fn rates_to_boundary(r: &OpenAsepRates) -> BoundaryParams {
    let (a, b) = phi_pm(r.beta, r.delta, r.q);
    let (c, d) = phi_pm(r.alpha, r.gamma, r.q);
    BoundaryParams { a, b, c, d, q: r.q }
}

pub fn boundary_to_rates(p: &BoundaryParams) -> OpenAsepRates {
    let s = 1.0 - p.q;
    let cd = (1.0 + p.c) * (1.0 + p.d);
    let ab = (1.0 + p.a) * (1.0 + p.b);
    OpenAsepRates {
        alpha: s / cd,
        beta: s / ab,
        // `+ 0.0` keeps zero rates from printing as -0
        gamma: -s * p.c * p.d / cd + 0.0,
        delta: -s * p.a * p.b / ab + 0.0,
        q: p.q,
    }
}

/// Both parameterizations of one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub rates: OpenAsepRates,
    pub boundary: BoundaryParams,
}

impl From<BoundaryParams> for ParamsDoc {
    fn from(p: BoundaryParams) -> Self {
        ParamsDoc { rates: p.to_rates(), boundary: p }
    }
}

impl From<OpenAsepRates> for ParamsDoc {
    fn from(r: OpenAsepRates) -> Self {
        ParamsDoc { rates: r, boundary: r.to_boundary() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "LD")]
    LowDensity,
    #[serde(rename = "HD")]
    HighDensity,
    #[serde(rename = "MC")]
    MaximalCurrent,
    #[serde(rename = "boundary")]
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Fan,
    Shock,
    Boundary,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::LowDensity => "LD",
            Phase::HighDensity => "HD",
            Phase::MaximalCurrent => "MC",
            Phase::Boundary => "boundary",
        })
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::Fan => "fan",
            Region::Shock => "shock",
            Region::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInfo {
    pub phase: Phase,
    pub region: Region,
    pub theta: Option<f64>,
    pub budget_s: Option<f64>,
}

/// Relative tolerance for phase and region boundaries.
pub const PHASE_TOL: f64 = 1e-9;

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= PHASE_TOL * x.abs().max(y.abs()).max(1.0)
}

/// Whether `AC = 1` within [`PHASE_TOL`].
pub fn on_ac_line(a: f64, c: f64) -> bool {
    near(a * c, 1.0)
}

pub fn phase_of(a: f64, c: f64) -> Phase {
    if near(a, 1.0) || near(c, 1.0) {
        return Phase::Boundary;
    }
    if a < 1.0 && c < 1.0 {
        Phase::MaximalCurrent
    } else if near(a, c) {
        Phase::Boundary
    } else if a > 1.0 && a > c {
        Phase::HighDensity
    } else if c > 1.0 && c > a {
        Phase::LowDensity
    } else {
        Phase::Boundary
    }
}

pub fn region_of(a: f64, c: f64) -> Region {
    if on_ac_line(a, c) {
        Region::Boundary
    } else if a * c < 1.0 {
        Region::Fan
    } else {
        Region::Shock
    }
}

/// Phase, region and, in LD/HD, `θ` from the `π_1` support with `B = D = 0`.
pub fn classify_phase(a: f64, c: f64, q: f64) -> Result<PhaseInfo> {
    let phase = phase_of(a, c);
    let region = region_of(a, c);
    let (theta, budget_s) = match phase {
        Phase::LowDensity | Phase::HighDensity => {
            let th = crate::limits::theta_from_support(&BoundaryParams::new(a, 0.0, c, 0.0, q)?)?;
            (Some(th), Some(crate::limits::rate_budget(th)))
        }
        _ => (None, None),
    };
    Ok(PhaseInfo { phase, region, theta, budget_s })
}
