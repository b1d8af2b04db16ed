use std::f64::consts::PI;

use super::SpecFunError;

// Lanczos coefficients for g = 7, n = 9 (Godfrey)
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// Bernoulli-number terms B_{2k} / (2k(2k-1)) of the Stirling series
const STIRLING: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
];

const STIRLING_FROM: f64 = 15.0;

/// `ln Γ(x)` for `x > 0`. Lanczos below 15, Stirling series above.
pub fn ln_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || x.is_nan() {
        return Err(SpecFunError::Domain { what: "ln_gamma argument", value: x });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x >= STIRLING_FROM {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut series = 0.0;
        let mut pow = inv;
        for c in STIRLING {
            series += c * pow;
            pow *= inv2;
        }
        return Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series);
    }
    // Γ(x) = Γ(x+1)/x keeps the Lanczos sum on its accurate branch
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_integers() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!((ln_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-14);
        let mut fact = 1.0f64;
        for n in 1..30u32 {
            fact *= n as f64;
            let got = ln_gamma(n as f64 + 1.0).unwrap();
            assert!((got - fact.ln()).abs() < 1e-13 * fact.ln().max(1.0), "n={n}");
        }
    }

    #[test]
    fn half_integer() {
        let got = ln_gamma(0.5).unwrap();
        assert!((got - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn recurrence() {
        for &x in &[0.5, 3.7, 42.0, 0.013, 14.9, 15.1, 99.5] {
            let ratio = (ln_gamma(x + 1.0).unwrap() - ln_gamma(x).unwrap()).exp();
            assert!((ratio / x - 1.0).abs() < 1e-12, "x={x}: {ratio}");
        }
    }

    #[test]
    fn domain() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }
}
