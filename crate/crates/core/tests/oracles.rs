//! Checks against independent numerical oracles: adaptive Simpson on
//! finite-interval substitutions, written here without any library code.

use std::f64::consts::PI;

use covstat::partition::{y_nonrel_asymptotic, y_over_m3, y_over_m3_quadrature};
use covstat::specfun::{bessel_k, gauss_laguerre_rule, integrate_laguerre};
use covstat::ApproachKind;

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫₀^∞ g(x) dx` through `x = t/(1-t)`; `g` must decay fast enough that the
/// transformed integrand vanishes at `t = 1`.
fn half_line(g: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        g(t / s) / (s * s)
    };
    adaptive_simpson(&f, 0.0, 1.0, tol)
}

#[test]
fn laguerre_error_on_reciprocal_shrinks_monotonically() {
    let oracle = half_line(|x| (-x).exp() / (1.0 + x), 1e-13);
    // e·E₁(1)
    assert!((oracle - 0.596_347_362_323_194_1).abs() < 1e-11, "{oracle}");
    let mut last = f64::INFINITY;
    for order in 5..=60 {
        let got = integrate_laguerre(|x| 1.0 / (1.0 + x), &gauss_laguerre_rule(order).unwrap()).unwrap();
        let err = (got - oracle).abs();
        assert!(err < last, "order {order}: {err:e} after {last:e}");
        last = err;
    }
    assert!(last < 1e-6, "{last:e}");
}

#[test]
fn full_covariant_against_simpson() {
    let rule = gauss_laguerre_rule(64).unwrap();
    for x in [0.05, 0.5, 1.0, 3.0, 20.0] {
        let oracle = 4.0
            * PI
            * half_line(
                |rho| {
                    let e = (1.0 + rho * rho).sqrt();
                    rho * rho / (e * e) * (-x * rho * rho / (e + 1.0)).exp()
                },
                1e-13,
            );
        let got = y_over_m3(ApproachKind::FullCovariant, x, &rule).unwrap().y_over_m3;
        assert!((got / oracle - 1.0).abs() < 1e-8, "βm {x}: {got} vs {oracle}");
    }
}

#[test]
fn semi_covariant_quadrature_against_simpson() {
    let rule = gauss_laguerre_rule(40).unwrap();
    for x in [0.2, 2.0, 15.0] {
        let oracle = 4.0
            * PI
            * half_line(
                |rho| {
                    let e = (1.0 + rho * rho).sqrt();
                    rho * rho / e * (-x * rho * rho / (e + 1.0)).exp()
                },
                1e-13,
            );
        let got = y_over_m3_quadrature(ApproachKind::SemiCovariant, x, &rule).unwrap();
        assert!((got / oracle - 1.0).abs() < 1e-8, "βm {x}: {got} vs {oracle}");
    }
}

#[test]
fn k1_integral_by_sinh_substitution() {
    // ∫ρ²/E e^{-βE} dρ with m = 1, β = 2; ρ = sinh u turns it into ∫sinh²u e^{-2cosh u} du
    let direct = half_line(|rho| rho * rho / (1.0 + rho * rho).sqrt() * (-2.0 * (1.0 + rho * rho).sqrt()).exp(), 1e-14);
    let sinh = half_line(|u| if u > 20.0 { 0.0 } else { u.sinh().powi(2) * (-2.0 * u.cosh()).exp() }, 1e-14);
    let k1 = bessel_k(1, 2.0).unwrap().value;
    assert!((direct / (0.5 * k1) - 1.0).abs() < 1e-9, "{direct} {}", 0.5 * k1);
    assert!((sinh / (0.5 * k1) - 1.0).abs() < 1e-9, "{sinh} {}", 0.5 * k1);
}

#[test]
fn juttner_over_semi_at_one_hundred() {
    let rule = gauss_laguerre_rule(40).unwrap();
    let y = |a| y_over_m3(a, 100.0, &rule).unwrap().y_over_m3;
    let ratio = y(ApproachKind::Juttner) / y(ApproachKind::SemiCovariant);
    assert!((ratio - (1.0 + 12.0 / 800.0)).abs() < 1e-3, "{ratio}");
}

#[test]
fn full_covariant_near_its_asymptotic_form() {
    let rule = gauss_laguerre_rule(64).unwrap();
    let exact = y_over_m3(ApproachKind::FullCovariant, 50.0, &rule).unwrap().y_over_m3;
    let asym = y_nonrel_asymptotic(ApproachKind::FullCovariant, 50.0).unwrap();
    assert!((exact / asym - 1.0).abs() <= 5.0 / 50.0);
}
