//! Modified Bessel functions of the second kind, orders 0 to 2, from
//! `K_n(x) = ∫₀^∞ e^{-x cosh ξ} cosh(nξ) dξ`.
//!
//! The integrand is entire in ξ, so a panel Gauss-Legendre sum converges
//! geometrically. Everything is evaluated in the scaled form `e^x K_n(x)`,
//! which stays O(1)-ish for large arguments.

use std::sync::OnceLock;

use super::{gauss_legendre_rule, LegendreRule, SpecFunError};

/// Above roughly this argument `K_n(x)` is below the smallest normal `f64`.
pub const BESSEL_UNDERFLOW_ARG: f64 = 705.0;

const PANEL_POINTS: usize = 24;
// e^{-41} ≈ 1.6e-18: the discarded tail is below 1e-16 of the peak integrand
const TAIL_LOG_DROP: f64 = 41.0;
const MAX_PANELS: usize = 4096;

fn panel_rule() -> &'static LegendreRule {
    static RULE: OnceLock<LegendreRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(PANEL_POINTS).expect("fixed order is valid"))
}

/// `K_n(x)` in linear scale with an underflow flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK {
    pub value: f64,
    /// Set when the true value is below `f64::MIN_POSITIVE` and `value` was flushed to 0.
    pub underflow: bool,
}

fn check(n: u32, x: f64) -> Result<(), SpecFunError> {
    if n > 2 {
        return Err(SpecFunError::Domain { what: "Bessel order", value: n as f64 });
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain { what: "Bessel argument", value: x });
    }
    Ok(())
}

/// Log of the scaled integrand, `-x(cosh ξ - 1) + ln cosh(nξ)`.
fn log_integrand(n: f64, x: f64, xi: f64) -> f64 {
    let s = (0.5 * xi).sinh();
    let nxi = n * xi;
    // ln cosh(t) = |t| + ln((1 + e^{-2|t|})/2)
    let log_cosh = nxi + (0.5 * (1.0 + (-2.0 * nxi).exp())).ln();
    -2.0 * x * s * s + log_cosh
}

fn d_log_integrand(n: f64, x: f64, xi: f64) -> f64 {
    -x * xi.sinh() + n * (n * xi).tanh()
}

/// `e^x K_n(x)` for `n ∈ {0, 1, 2}` and finite `x > 0`.
pub fn bessel_k_scaled(n: u32, x: f64) -> Result<f64, SpecFunError> {
    check(n, x)?;
    let nf = n as f64;
    let rule = panel_rule();
    let width = (1.5 / x.sqrt()).min(0.5);
    let mut sum = 0.0;
    let mut peak = f64::NEG_INFINITY;
    let mut a = 0.0;
    for _ in 0..MAX_PANELS {
        let b = a + width;
        sum += rule.integrate(a, b, |xi| log_integrand(nf, x, xi).exp());
        peak = peak.max(log_integrand(nf, x, a)).max(log_integrand(nf, x, b));
        a = b;
        if d_log_integrand(nf, x, b) < 0.0 && log_integrand(nf, x, b) < peak - TAIL_LOG_DROP {
            return Ok(sum);
        }
    }
    // unreachable for finite positive x: the cosh term always wins eventually
    Err(SpecFunError::Domain { what: "Bessel argument", value: x })
}

/// `K_n(x)`. Values below `f64::MIN_POSITIVE` come back as 0 with `underflow` set.
pub fn bessel_k(n: u32, x: f64) -> Result<BesselK, SpecFunError> {
    let scaled = bessel_k_scaled(n, x)?;
    let log_value = scaled.ln() - x;
    if log_value < f64::MIN_POSITIVE.ln() {
        return Ok(BesselK { value: 0.0, underflow: true });
    }
    Ok(BesselK { value: log_value.exp(), underflow: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: u32, x: f64) -> f64 {
        bessel_k(n, x).unwrap().value
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    // 40-digit reference values (mpmath besselk)
    const REFERENCE: &[(f64, [f64; 3])] = &[
        (0.01, [4.7212447301610949651, 99.973894118296247643, 19999.500068389410624]),
        (0.1, [2.4270690247020166125, 9.8538447808706061348, 199.50396464211413931]),
        (1.0, [0.42102443824070833334, 0.60190723019723457474, 1.6248388986351774828]),
        (2.0, [0.11389387274953343565, 0.13986588181652242728, 0.25375975456605586294]),
        (10.0, [1.7780062316167651811e-5, 1.8648773453825584597e-5, 2.1509817006932768731e-5]),
        (50.0, [3.4101677497894955139e-23, 3.4441022267175556126e-23, 3.5479318388581977384e-23]),
        (100.0, [4.6566282291759020189e-45, 4.6798537356369092866e-45, 4.7502253038886402047e-45]),
        (500.0, [3.9923216091177928774e-219, 3.9963119385460033495e-219, 4.0083068568719768908e-219]),
        (700.0, [4.669776431685376881e-306, 4.6731107967079661091e-306, 4.6831281768188282127e-306]),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, ks) in REFERENCE {
            for n in 0..3u32 {
                let got = k(n, x);
                assert!(rel(got, ks[n as usize]) < 1e-10, "K{n}({x}) = {got}, want {}", ks[n as usize]);
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        for &x in &[0.1, 1.0, 10.0, 100.0] {
            let lhs = bessel_k_scaled(2, x).unwrap();
            let rhs = bessel_k_scaled(0, x).unwrap() + 2.0 * bessel_k_scaled(1, x).unwrap() / x;
            assert!(rel(lhs, rhs) < 1e-10, "x={x}");
        }
    }

    #[test]
    fn two_term_asymptotic_at_fifty() {
        let x = 50.0;
        let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 3.0 / (8.0 * x));
        // next term of the series is (4-1)(4-9)/(2!(8x)^2)
        let next = (3.0 * 5.0 / (2.0 * (8.0 * x).powi(2))).abs();
        assert!(rel(k(1, x), asym) <= next);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_k(1, 0.0), Err(SpecFunError::Domain { .. })));
        assert!(bessel_k(1, -2.0).is_err());
        assert!(bessel_k(3, 1.0).is_err());
        assert!(bessel_k_scaled(0, f64::NAN).is_err());
    }

    #[test]
    fn underflow_is_flagged() {
        let v = bessel_k(1, 800.0).unwrap();
        assert!(v.underflow);
        assert_eq!(v.value, 0.0);
        assert!(!bessel_k(1, 700.0).unwrap().underflow);
        // the scaled form is still usable there
        let s = bessel_k_scaled(1, 800.0).unwrap();
        assert!(rel(s, (std::f64::consts::PI / 1600.0).sqrt() * (1.0 + 3.0 / 6400.0)) < 1e-5);
    }

    #[test]
    fn positive_and_decreasing() {
        let grid: Vec<f64> = (0..200).map(|i| 0.01 * 1.05f64.powi(i)).collect();
        for n in 0..3u32 {
            let vals: Vec<f64> = grid.iter().map(|&x| k(n, x)).collect();
            assert!(vals.iter().all(|&v| v > 0.0));
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "K{n} not decreasing");
        }
    }
}
