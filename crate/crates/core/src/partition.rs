//! The per-particle factor `Y` of the canonical partition integral
//! `Z_C = (V^N / N!) (e^{-βm} Y)^N` and `ln Z_C` for the four phase-space
//! treatments of the monatomic perfect gas.
//!
//! `Y/m³` depends on `βm` alone, so every function here works with the
//! dimensionless `beta_m` and returns `Y/m³`. In units of `m` every integrand
//! has the form `4π ∫₀^∞ g(ρ) e^{-βm ε(ρ)} dρ` with `ε = √(1+ρ²) - 1`:
//!
//! | approach        | `g(ρ)`         |
//! |-----------------|----------------|
//! | full covariant  | `ρ²/(1+ρ²)`    |
//! | semi-covariant  | `ρ²/√(1+ρ²)`   |
//! | Jüttner         | `ρ²`           |
//!
//! The non-relativistic factor uses `g = ρ²`, `ε = ρ²/2`.
//!
//! ## Quadrature
//!
//! The exponent is extracted before integrating, so nothing overflows for
//! large `βm`. The Laguerre variable is linear in momentum, `ρ = R + v/a`:
//! for `βm ≥ 2` the whole range is one Laguerre sum (`R = 0`,
//! `a = min(βm, 6√βm)`). Below that the integrand carries two scales (the
//! mass at `ρ ~ 1` and the thermal tail at `ρ ~ 1/βm`), so `[0, R]` with
//! `R = 8` goes to a Gauss-Legendre rule of the same order and only the tail
//! is Laguerre-weighted with `a = βm`. The full covariant weight also has an
//! algebraic `1/ρ²` piece that a Laguerre tail resolves badly; there the
//! integrand is split as described on [`QuadraturePlan::BesselSplit`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{
    bessel_k_scaled, gauss_laguerre_rule, gauss_legendre_rule, ln_gamma, QuadratureRule, SpecFunError,
    MAX_ORDER,
};

/// Relative change between order `n` and `2n` above which a result is flagged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

const SPLIT_BETA_M: f64 = 2.0;
const HEAD_LENGTH: f64 = 8.0;
const TAIL_SCALE_SQRT: f64 = 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("{what} must be positive and finite, got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("the non-relativistic treatment has no ultra-relativistic limit")]
    NoUltraRelativisticLimit,
    #[error("asymptotic expansion needs beta_m >= 10, got {0}")]
    AsymptoticInvalid(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// The phase-space treatments compared in the figure of `Y` against `βm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproachKind {
    /// On-shell constraints with covariant time fixations.
    FullCovariant,
    /// On-shell constraints with `q⁰ = τ`.
    SemiCovariant,
    Juttner,
    NonRelativistic,
}

impl ApproachKind {
    pub const ALL: [ApproachKind; 4] =
        [Self::FullCovariant, Self::SemiCovariant, Self::Juttner, Self::NonRelativistic];
    pub const RELATIVISTIC: [ApproachKind; 3] = [Self::FullCovariant, Self::SemiCovariant, Self::Juttner];

    /// Short label used in CSV columns and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            Self::FullCovariant => "full",
            Self::SemiCovariant => "semi",
            Self::Juttner => "juttner",
            Self::NonRelativistic => "nonrel",
        }
    }

    fn weight(self, rho: f64, energy: f64) -> f64 {
        let rho2 = rho * rho;
        match self {
            Self::FullCovariant => rho2 / (energy * energy),
            Self::SemiCovariant => rho2 / energy,
            Self::Juttner | Self::NonRelativistic => rho2,
        }
    }

    /// Kinetic energy in units of `m`.
    fn kinetic(self, rho: f64, energy: f64) -> f64 {
        match self {
            Self::NonRelativistic => 0.5 * rho * rho,
            _ => rho * rho / (energy + 1.0),
        }
    }
}

impl fmt::Display for ApproachKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ApproachKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "full-covariant" | "full_covariant" | "fullcovariant" => Ok(Self::FullCovariant),
            "semi" | "semi-covariant" | "semi_covariant" | "semicovariant" => Ok(Self::SemiCovariant),
            "juttner" | "jüttner" | "juettner" => Ok(Self::Juttner),
            "nonrel" | "non-relativistic" | "non_relativistic" | "nonrelativistic" => Ok(Self::NonRelativistic),
            other => Err(format!("unknown approach '{other}' (expected full, semi, juttner or nonrel)")),
        }
    }
}

/// A monatomic perfect gas: `N` particles of rest mass `m` in rest-frame volume `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasSpec {
    n_particles: u64,
    mass: f64,
    volume: f64,
}

impl GasSpec {
    pub fn new(n_particles: u64, mass: f64, volume: f64) -> Result<Self, PartitionError> {
        if n_particles == 0 {
            return Err(PartitionError::Domain { what: "particle number", value: 0.0 });
        }
        positive("mass", mass)?;
        positive("volume", volume)?;
        Ok(Self { n_particles, mass, volume })
    }

    pub fn n_particles(&self) -> u64 {
        self.n_particles
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }
}

fn positive(what: &'static str, value: f64) -> Result<f64, PartitionError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(PartitionError::Domain { what, value })
    }
}

/// Where the energy scale starts in `e^{-βE}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyOrigin {
    /// `E = Σ p⁰`, giving `Z_C = (V^N/N!)(e^{-βm} Y)^N`.
    #[default]
    IncludingRestMass,
    /// `E = Σ (p⁰ - m)`, giving `Z_C = (V^N/N!) Y^N`.
    RestMassSubtracted,
}

/// The order-doubling check flagged a result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyWarning {
    pub order: usize,
    pub doubled_order: usize,
    pub relative_change: f64,
}

/// `Y/m³` with the outcome of the convergence check (quadrature paths only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YValue {
    pub y_over_m3: f64,
    pub warning: Option<AccuracyWarning>,
}

/// How the momentum integral is discretised at one `βm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraturePlan {
    /// Gauss-Legendre on `[0, head]` (skipped when `head = 0`) plus a
    /// Laguerre sum over `ρ = head + v/scale`.
    Laguerre { head: f64, scale: f64 },
    /// Full covariant integrand below the split: `ρ²/(1+ρ²) = 1 - 1/(1+ρ²)`,
    /// the first part being `e^x K_1(x)`; the second is Legendre on
    /// `[0, head]` and on `s ∈ (0, 1)` with `ρ = head/s`.
    BesselSplit { head: f64 },
}

impl QuadraturePlan {
    pub fn for_beta_m(approach: ApproachKind, beta_m: f64) -> Self {
        if beta_m >= SPLIT_BETA_M {
            Self::Laguerre { head: 0.0, scale: beta_m.min(TAIL_SCALE_SQRT * beta_m.sqrt()) }
        } else if approach == ApproachKind::FullCovariant {
            Self::BesselSplit { head: HEAD_LENGTH }
        } else {
            Self::Laguerre { head: HEAD_LENGTH, scale: beta_m }
        }
    }
}

/// `Y/m³` together with the mean and variance of the kinetic energy `ε`
/// (units of `m`) under the normalised Boltzmann weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub y_over_m3: f64,
    pub mean_kinetic: f64,
    pub var_kinetic: f64,
}

fn check_beta_m(beta_m: f64) -> Result<f64, PartitionError> {
    positive("beta_m", beta_m)
}

/// Legendre points `(ρ, ln(weight · dρ))` on `[0, head]`.
fn head_points(head: f64, rule: &QuadratureRule, points: &mut Vec<(f64, f64)>) -> Result<(), PartitionError> {
    let legendre = gauss_legendre_rule(rule.order())?;
    let half = 0.5 * head;
    for (&t, &w) in legendre.nodes().iter().zip(legendre.weights()) {
        points.push((half * (t + 1.0), (half * w).ln()));
    }
    Ok(())
}

/// Sample points `(ρ, log weight)`: the integral is
/// `Σ exp(log_w + ln g(ρ) - βm ε(ρ))`.
fn laguerre_points(head: f64, scale: f64, rule: &QuadratureRule) -> Result<Vec<(f64, f64)>, PartitionError> {
    let mut points = Vec::with_capacity(2 * rule.order());
    if head > 0.0 {
        head_points(head, rule, &mut points)?;
    }
    // e^{v} undoes the Laguerre weight; kept in the exponent so large nodes
    // do not overflow before the Boltzmann factor is applied
    for (v, w) in rule.iter() {
        points.push((head + v / scale, w.ln() + v - scale.ln()));
    }
    Ok(points)
}

fn split_points(head: f64, rule: &QuadratureRule) -> Result<Vec<(f64, f64)>, PartitionError> {
    let mut points = Vec::with_capacity(2 * rule.order());
    head_points(head, rule, &mut points)?;
    let legendre = gauss_legendre_rule(rule.order())?;
    for (&t, &w) in legendre.nodes().iter().zip(legendre.weights()) {
        let s = 0.5 * (t + 1.0);
        // dρ = head/s² ds
        points.push((head / s, (0.5 * w * head / (s * s)).ln()));
    }
    Ok(points)
}

/// Raw sums `Σ t`, `Σ t ε`, `Σ t ε²` for integrand `exp(ln g - βm ε)`.
fn raw_sums(
    points: &[(f64, f64)],
    beta_m: f64,
    log_g: impl Fn(f64, f64) -> f64,
    kinetic: impl Fn(f64, f64) -> f64,
) -> Result<[f64; 3], PartitionError> {
    let mut sums = [0.0; 3];
    for &(rho, log_w) in points {
        let energy = (1.0 + rho * rho).sqrt();
        let eps = kinetic(rho, energy);
        let term = (log_w + log_g(rho, energy) - beta_m * eps).exp();
        if !term.is_finite() {
            return Err(SpecFunError::NonFinite { node: rho, value: term }.into());
        }
        sums[0] += term;
        sums[1] += term * eps;
        sums[2] += term * eps * eps;
    }
    Ok(sums)
}

/// Moments of the integrand on a fixed plan. For fixed `plan` the result is
/// an analytic function of `beta_m`, which is what finite-difference
/// cross-checks need.
pub fn moments_with_plan(
    approach: ApproachKind,
    beta_m: f64,
    rule: &QuadratureRule,
    plan: QuadraturePlan,
) -> Result<Moments, PartitionError> {
    check_beta_m(beta_m)?;
    match plan {
        QuadraturePlan::Laguerre { head, scale } => {
            let points = laguerre_points(head, scale, rule)?;
            let [s0, s1, _] =
                raw_sums(&points, beta_m, |r, e| approach.weight(r, e).ln(), |r, e| approach.kinetic(r, e))?;
            let mean = s1 / s0;
            // second pass: the variance is small next to mean² at large βm
            let mut var = 0.0;
            for &(rho, log_w) in &points {
                let energy = (1.0 + rho * rho).sqrt();
                let eps = approach.kinetic(rho, energy);
                let term = (log_w + approach.weight(rho, energy).ln() - beta_m * eps).exp();
                var += term * (eps - mean).powi(2);
            }
            Ok(Moments { y_over_m3: 4.0 * PI * s0, mean_kinetic: mean, var_kinetic: var / s0 })
        }
        QuadraturePlan::BesselSplit { head } => {
            let points = split_points(head, rule)?;
            let [j0, j1, j2] =
                raw_sums(&points, beta_m, |_, e| -2.0 * e.ln(), |r, e| ApproachKind::FullCovariant.kinetic(r, e))?;
            // ∫e^{-xε}dρ = e^x K_1(x) and its first two derivatives in x,
            // via K_1' = -(K_0 + K_2)/2 and K_1'' = (3K_1 + K_3)/4
            let k0 = bessel_k_scaled(0, beta_m)?;
            let k1 = bessel_k_scaled(1, beta_m)?;
            let k2 = bessel_k_scaled(2, beta_m)?;
            let k3 = k1 + 4.0 / beta_m * k2;
            let d1 = -0.5 * (k0 + k2);
            let a0 = k1;
            let a1 = -(k1 + d1);
            let a2 = k1 + 2.0 * d1 + 0.25 * (3.0 * k1 + k3);
            let m0 = a0 - j0;
            let mean = (a1 - j1) / m0;
            let var = (a2 - j2) / m0 - mean * mean;
            Ok(Moments { y_over_m3: 4.0 * PI * m0, mean_kinetic: mean, var_kinetic: var })
        }
    }
}

pub fn moments(approach: ApproachKind, beta_m: f64, rule: &QuadratureRule) -> Result<Moments, PartitionError> {
    let plan = QuadraturePlan::for_beta_m(approach, check_beta_m(beta_m)?);
    moments_with_plan(approach, beta_m, rule, plan)
}

/// `Y/m³` by quadrature for any approach.
pub fn y_over_m3_quadrature(approach: ApproachKind, beta_m: f64, rule: &QuadratureRule) -> Result<f64, PartitionError> {
    Ok(moments(approach, beta_m, rule)?.y_over_m3)
}

/// Quadrature result plus the order-doubling check.
pub fn y_over_m3_checked(approach: ApproachKind, beta_m: f64, rule: &QuadratureRule) -> Result<YValue, PartitionError> {
    let value = y_over_m3_quadrature(approach, beta_m, rule)?;
    let doubled_order = (2 * rule.order()).min(MAX_ORDER);
    if doubled_order == rule.order() {
        return Ok(YValue { y_over_m3: value, warning: None });
    }
    let doubled = y_over_m3_quadrature(approach, beta_m, &gauss_laguerre_rule(doubled_order)?)?;
    let relative_change = (value / doubled - 1.0).abs();
    let warning = (relative_change > CONVERGENCE_TOL).then_some(AccuracyWarning {
        order: rule.order(),
        doubled_order,
        relative_change,
    });
    Ok(YValue { y_over_m3: value, warning })
}

/// `Y/m³` for one approach: the Bessel closed forms for the semi-covariant
/// and Jüttner treatments, `(2π/βm)^{3/2}` without relativity, and the
/// quadrature (with its convergence check) for the full covariant one.
pub fn y_over_m3(approach: ApproachKind, beta_m: f64, rule: &QuadratureRule) -> Result<YValue, PartitionError> {
    check_beta_m(beta_m)?;
    let closed = |y| Ok(YValue { y_over_m3: y, warning: None });
    match approach {
        ApproachKind::FullCovariant => y_over_m3_checked(approach, beta_m, rule),
        ApproachKind::SemiCovariant => closed(4.0 * PI * bessel_k_scaled(1, beta_m)? / beta_m),
        ApproachKind::Juttner => closed(4.0 * PI * bessel_k_scaled(2, beta_m)? / beta_m),
        ApproachKind::NonRelativistic => closed(y_nonrel_leading(beta_m)),
    }
}

/// `(2π/βm)^{3/2}`.
pub fn y_nonrel_leading(beta_m: f64) -> f64 {
    (2.0 * PI / beta_m).powf(1.5)
}

/// `ln Z_C = N ln V - ln N! + N (ln Y - βm)`, never leaving log space.
pub fn ln_z_canonical(
    gas: &GasSpec,
    approach: ApproachKind,
    beta: f64,
    rule: &QuadratureRule,
) -> Result<f64, PartitionError> {
    ln_z_canonical_with(gas, approach, beta, rule, EnergyOrigin::IncludingRestMass)
}

pub fn ln_z_canonical_with(
    gas: &GasSpec,
    approach: ApproachKind,
    beta: f64,
    rule: &QuadratureRule,
    origin: EnergyOrigin,
) -> Result<f64, PartitionError> {
    positive("beta", beta)?;
    let beta_m = beta * gas.mass;
    let y = y_over_m3(approach, beta_m, rule)?.y_over_m3;
    Ok(ln_z_from_y(gas, beta_m, y, origin)?)
}

pub(crate) fn ln_z_from_y(gas: &GasSpec, beta_m: f64, y_over_m3: f64, origin: EnergyOrigin) -> Result<f64, SpecFunError> {
    let n = gas.n_particles as f64;
    let ln_y = y_over_m3.ln() + 3.0 * gas.mass.ln();
    let per_particle = match origin {
        EnergyOrigin::IncludingRestMass => ln_y - beta_m,
        EnergyOrigin::RestMassSubtracted => ln_y,
    };
    Ok(n * gas.volume.ln() - ln_gamma(n + 1.0)? + n * per_particle)
}

/// Ultra-relativistic `Y/m³ = e^{βm}·bracket/m³` with bracket `4π/βm`,
/// `4π/(βm)²` and `8π/(βm)³` for the full covariant, semi-covariant and
/// Jüttner treatments.
pub fn y_ultra_relativistic(approach: ApproachKind, beta_m: f64) -> Result<f64, PartitionError> {
    check_beta_m(beta_m)?;
    let ln_bracket = match approach {
        ApproachKind::FullCovariant => (4.0 * PI).ln() - beta_m.ln(),
        ApproachKind::SemiCovariant => (4.0 * PI).ln() - 2.0 * beta_m.ln(),
        ApproachKind::Juttner => (8.0 * PI).ln() - 3.0 * beta_m.ln(),
        ApproachKind::NonRelativistic => return Err(PartitionError::NoUltraRelativisticLimit),
    };
    Ok((beta_m + ln_bracket).exp())
}

/// Large-`βm` form of `Y/m³` from `K_n(x) ≈ √(π/2x) e^{-x} (1 + (4n²-1)/8x)`.
/// The full covariant treatment shares the leading order only.
pub fn y_nonrel_asymptotic(approach: ApproachKind, beta_m: f64) -> Result<f64, PartitionError> {
    if !(beta_m >= 10.0) || !beta_m.is_finite() {
        return Err(PartitionError::AsymptoticInvalid(beta_m));
    }
    let leading = y_nonrel_leading(beta_m);
    let correction = match approach {
        ApproachKind::SemiCovariant => 3.0 / (8.0 * beta_m),
        ApproachKind::Juttner => 15.0 / (8.0 * beta_m),
        ApproachKind::FullCovariant | ApproachKind::NonRelativistic => 0.0,
    };
    Ok(leading * (1.0 + correction))
}
