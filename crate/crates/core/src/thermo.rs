//! Thermodynamics of the perfect gas from `ln Y`, with Stirling's form of
//! `ln N!` in the extensive quantities.
//!
//! Write `x = βm` and `d₁ = ∂ln Y/∂x`, `d₂ = ∂²ln Y/∂x²`. Then
//!
//! ```text
//! F   = -NT (ln(V/N) + ln Y - x + 1)
//! S   =  N  (ln(V/N) + ln Y - x d₁ + 1)
//! P   =  NT / V
//! ⟨E⟩ =  N m (1 - d₁)
//! c_V =  N x² d₂
//! ```
//!
//! `-d₁` is the mean kinetic energy per particle in units of `m` and `d₂` its
//! variance, so `c_V ≥ 0` by construction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{
    self, ln_z_from_y, moments, moments_with_plan, y_over_m3, y_ultra_relativistic, AccuracyWarning, ApproachKind,
    EnergyOrigin, GasSpec, PartitionError, QuadraturePlan,
};
use crate::specfun::{bessel_k_scaled, QuadratureRule, SpecFunError};

/// Relative disagreement between the two derivative methods that is reported as an error.
pub const DERIVATIVE_AGREEMENT_TOL: f64 = 1e-4;
const FIRST_DIFF_STEP: f64 = 1e-5;
const SECOND_DIFF_STEP: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("{what} must be positive and finite, got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("derivative order must be 1 or 2, got {0}")]
    DerivativeOrder(u8),
    #[error("derivative of order {order} at beta_m = {beta_m}: analytic {analytic} vs finite difference {finite_difference}")]
    Accuracy { order: u8, beta_m: f64, analytic: f64, finite_difference: f64 },
    #[error("no ultra-relativistic closed form for the non-relativistic gas")]
    NoClosedForm,
}

impl From<SpecFunError> for ThermoError {
    fn from(e: SpecFunError) -> Self {
        Self::Partition(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoReport {
    pub approach: ApproachKind,
    pub beta_m: f64,
    pub temperature: f64,
    pub y_over_m3: f64,
    pub ln_z: f64,
    pub free_energy: f64,
    pub entropy: f64,
    pub pressure: f64,
    pub avg_energy: f64,
    pub specific_heat: f64,
    pub energy_origin: EnergyOrigin,
    pub warning: Option<AccuracyWarning>,
}

/// `∂ln Y/∂x` and `∂²ln Y/∂x²` at `x = βm`, analytic and finite-difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativePair {
    pub analytic: f64,
    pub finite_difference: f64,
}

impl DerivativePair {
    pub fn relative_disagreement(&self) -> f64 {
        ((self.analytic - self.finite_difference) / self.analytic).abs()
    }
}

fn positive(what: &'static str, value: f64) -> Result<f64, ThermoError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ThermoError::Domain { what, value })
    }
}

/// `ln(e^x K_n(x) / x)` up to the constant `ln 4π`.
fn ln_bessel_y(n: u32, x: f64) -> Result<f64, SpecFunError> {
    Ok(bessel_k_scaled(n, x)?.ln() - x.ln())
}

/// Derivatives of `ln(e^x K_n(x)/x)` from `K'_n = -(K_{n-1} + K_{n+1})/2`
/// and `K''_n = (K_{n-2} + 2K_n + K_{n+2})/4`.
fn bessel_derivatives(n: u32, x: f64) -> Result<(f64, f64), SpecFunError> {
    // scaled K_0..K_4; the common e^x cancels in every ratio
    let mut k = [0.0; 5];
    for (i, slot) in k.iter_mut().enumerate().take(3) {
        *slot = bessel_k_scaled(i as u32, x)?;
    }
    k[3] = k[1] + 4.0 / x * k[2];
    k[4] = k[2] + 6.0 / x * k[3];
    let at = |i: i32| k[i.unsigned_abs() as usize];
    let n = n as i32;
    let kn = at(n);
    let d = -(at(n - 1) + at(n + 1)) / (2.0 * kn);
    let dd = (at(n - 2) + 2.0 * kn + at(n + 2)) / (4.0 * kn);
    Ok((1.0 + d - 1.0 / x, dd - d * d + 1.0 / (x * x)))
}

fn analytic_derivatives(approach: ApproachKind, beta_m: f64, rule: &QuadratureRule) -> Result<(f64, f64), ThermoError> {
    Ok(match approach {
        ApproachKind::FullCovariant => {
            let m = moments(approach, beta_m, rule)?;
            (-m.mean_kinetic, m.var_kinetic)
        }
        ApproachKind::SemiCovariant => bessel_derivatives(1, beta_m)?,
        ApproachKind::Juttner => bessel_derivatives(2, beta_m)?,
        ApproachKind::NonRelativistic => (-1.5 / beta_m, 1.5 / (beta_m * beta_m)),
    })
}

/// `ln Y/m³` as a smooth function of `x` near `centre`: the quadrature plan
/// is frozen at `centre` so the difference quotient never straddles a change
/// of plan.
fn ln_y_near(approach: ApproachKind, centre: f64, rule: &QuadratureRule) -> impl Fn(f64) -> Result<f64, ThermoError> + '_ {
    let plan = QuadraturePlan::for_beta_m(approach, centre);
    move |x| {
        Ok(match approach {
            ApproachKind::FullCovariant => moments_with_plan(approach, x, rule, plan)?.y_over_m3.ln(),
            ApproachKind::SemiCovariant => ln_bessel_y(1, x)?,
            ApproachKind::Juttner => ln_bessel_y(2, x)?,
            ApproachKind::NonRelativistic => partition::y_nonrel_leading(x).ln(),
        })
    }
}

fn finite_difference(approach: ApproachKind, x: f64, order: u8, rule: &QuadratureRule) -> Result<f64, ThermoError> {
    let f = ln_y_near(approach, x, rule);
    match order {
        1 => {
            let d = |h: f64| -> Result<f64, ThermoError> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
            let h = FIRST_DIFF_STEP * x;
            Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
        }
        2 => {
            let f0 = f(x)?;
            let d = |h: f64| -> Result<f64, ThermoError> { Ok((f(x + h)? - 2.0 * f0 + f(x - h)?) / (h * h)) };
            let h = SECOND_DIFF_STEP * x;
            Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
        }
        other => Err(ThermoError::DerivativeOrder(other)),
    }
}

/// Both derivative estimates without the agreement check.
pub fn derivative_pair(
    approach: ApproachKind,
    beta_m: f64,
    rule: &QuadratureRule,
    derivative_order: u8,
) -> Result<DerivativePair, ThermoError> {
    positive("beta_m", beta_m)?;
    let (d1, d2) = analytic_derivatives(approach, beta_m, rule)?;
    let analytic = match derivative_order {
        1 => d1,
        2 => d2,
        other => return Err(ThermoError::DerivativeOrder(other)),
    };
    let finite_difference = finite_difference(approach, beta_m, derivative_order, rule)?;
    Ok(DerivativePair { analytic, finite_difference })
}

/// `(1/m) ∂ln Y/∂β` or `(1/m²) ∂²ln Y/∂β²`, i.e. derivatives in `x = βm`.
///
/// The full covariant value comes from moments of the quadrature, the
/// Bessel-function cases from Bessel identities. A central difference with
/// one Richardson step checks either; disagreement above
/// [`DERIVATIVE_AGREEMENT_TOL`] is an error.
pub fn d_ln_y_dbeta(
    approach: ApproachKind,
    beta_m: f64,
    rule: &QuadratureRule,
    derivative_order: u8,
) -> Result<f64, ThermoError> {
    let pair = derivative_pair(approach, beta_m, rule, derivative_order)?;
    if !(pair.relative_disagreement() <= DERIVATIVE_AGREEMENT_TOL) {
        return Err(ThermoError::Accuracy {
            order: derivative_order,
            beta_m,
            analytic: pair.analytic,
            finite_difference: pair.finite_difference,
        });
    }
    Ok(pair.analytic)
}

pub fn thermo_report(
    gas: &GasSpec,
    approach: ApproachKind,
    temperature: f64,
    rule: &QuadratureRule,
) -> Result<ThermoReport, ThermoError> {
    thermo_report_with(gas, approach, temperature, rule, EnergyOrigin::IncludingRestMass)
}

/// As [`thermo_report`]; with [`EnergyOrigin::RestMassSubtracted`] `Nm` is
/// removed from both `⟨E⟩` and `F` (and from the exponent of `ln Z_C`).
pub fn thermo_report_with(
    gas: &GasSpec,
    approach: ApproachKind,
    temperature: f64,
    rule: &QuadratureRule,
    origin: EnergyOrigin,
) -> Result<ThermoReport, ThermoError> {
    let t = positive("temperature", temperature)?;
    let m = gas.mass();
    let x = m / t;
    let y = y_over_m3(approach, x, rule)?;
    let d1 = d_ln_y_dbeta(approach, x, rule, 1)?;
    let d2 = d_ln_y_dbeta(approach, x, rule, 2)?;

    let n = gas.n_particles() as f64;
    let ln_v_per_n = gas.volume().ln() - n.ln();
    let ln_y = y.y_over_m3.ln() + 3.0 * m.ln();
    let rest = match origin {
        EnergyOrigin::IncludingRestMass => 0.0,
        EnergyOrigin::RestMassSubtracted => n * m,
    };
    Ok(ThermoReport {
        approach,
        beta_m: x,
        temperature: t,
        y_over_m3: y.y_over_m3,
        ln_z: ln_z_from_y(gas, x, y.y_over_m3, origin)?,
        free_energy: -n * t * (ln_v_per_n + ln_y - x + 1.0) - rest,
        entropy: n * (ln_v_per_n + ln_y - x * d1 + 1.0),
        pressure: n * t / gas.volume(),
        avg_energy: n * m * (1.0 - d1) - rest,
        specific_heat: n * x * x * d2,
        energy_origin: origin,
        warning: y.warning,
    })
}

/// Closed forms of the ultra-relativistic limit, with `c = ln 4πm³` (full and
/// semi-covariant) or `ln 8πm³` (Jüttner) and `k = 1, 2, 3`:
/// `F = -NT[ln(V/N) + c - k ln x + 1]`, `S = N[ln(V/N) + c - k ln x + k + 1]`,
/// `⟨E⟩ = kNT`, `c_V = kN`.
pub fn table1_closed_forms(approach: ApproachKind, gas: &GasSpec, temperature: f64) -> Result<ThermoReport, ThermoError> {
    let t = positive("temperature", temperature)?;
    let (k, prefactor) = match approach {
        ApproachKind::FullCovariant => (1.0, 4.0 * PI),
        ApproachKind::SemiCovariant => (2.0, 4.0 * PI),
        ApproachKind::Juttner => (3.0, 8.0 * PI),
        ApproachKind::NonRelativistic => return Err(ThermoError::NoClosedForm),
    };
    let m = gas.mass();
    let x = m / t;
    let n = gas.n_particles() as f64;
    let base = gas.volume().ln() - n.ln() + prefactor.ln() + 3.0 * m.ln() - k * x.ln();
    let y = y_ultra_relativistic(approach, x)?;
    Ok(ThermoReport {
        approach,
        beta_m: x,
        temperature: t,
        y_over_m3: y,
        ln_z: ln_z_from_y(gas, x, y, EnergyOrigin::IncludingRestMass)?,
        free_energy: -n * t * (base + 1.0),
        entropy: n * (base + k + 1.0),
        pressure: n * t / gas.volume(),
        avg_energy: k * n * t,
        specific_heat: k * n,
        energy_origin: EnergyOrigin::IncludingRestMass,
        warning: None,
    })
}
