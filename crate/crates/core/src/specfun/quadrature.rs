use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpecFunError;

/// Largest supported rule order.
pub const MAX_ORDER: usize = 128;

// the recurrence itself is only good to a few 1e-14 near the smallest roots
const ROOT_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 100;

/// Gauss-Laguerre rule for `∫₀^∞ e^{-x} f(x) dx ≈ Σ wᵢ f(xᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Strictly increasing, all positive.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Values of `L_n(x)` and `L_{n-1}(x)` from the three-term recurrence.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    if n == 0 {
        return (prev, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Nodes are the zeros of `L_order`, found by Newton iteration from the usual
/// asymptotic starting guesses; weights are `xᵢ / ((n+1) L_{n+1}(xᵢ))²`.
pub fn gauss_laguerre_rule(order: usize) -> Result<QuadratureRule, SpecFunError> {
    if order == 0 || order > MAX_ORDER {
        return Err(SpecFunError::Order(order));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (ln, lnm1) = laguerre_pair(n, z);
            // x L_n'(x) = n (L_n - L_{n-1})
            let deriv = nf * (ln - lnm1) / z;
            let dz = ln / deriv;
            z -= dz;
            if dz.abs() <= ROOT_TOL * z.abs() {
                let (ln, lnm1) = laguerre_pair(n, z);
                z -= ln * z / (nf * (ln - lnm1));
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() || (i > 0 && z <= nodes[i - 1]) {
            return Err(SpecFunError::RootNotConverged { order: n, index: i });
        }
        let (ln1, _) = laguerre_pair(n + 1, z);
        let denom = (nf + 1.0) * ln1;
        nodes.push(z);
        weights.push(z / (denom * denom));
    }
    // the three-term recurrence leaves ~1e-11 relative error on the weights
    // of the smallest nodes for n ≳ 60; pin the zeroth moment exactly
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(QuadratureRule { order: n, nodes, weights })
}

/// Applies `rule` to `f`, approximating `∫₀^∞ e^{-x} f(x) dx`.
pub fn integrate_laguerre<F>(f: F, rule: &QuadratureRule) -> Result<f64, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    let mut sum = 0.0;
    for (x, w) in rule.iter() {
        let v = f(x);
        if !v.is_finite() {
            return Err(SpecFunError::NonFinite { node: x, value: v });
        }
        sum += w * v;
    }
    Ok(sum)
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LegendreRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
    }
}

pub fn gauss_legendre_rule(order: usize) -> Result<LegendreRule, SpecFunError> {
    if order == 0 || order > MAX_ORDER {
        return Err(SpecFunError::Order(order));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, d) = legendre_with_derivative(n, x);
            deriv = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= ROOT_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(SpecFunError::RootNotConverged { order: n, index: i });
        }
        let (_, d) = legendre_with_derivative(n, x);
        deriv = if d.is_finite() { d } else { deriv };
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(LegendreRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn order_one() {
        let r = gauss_laguerre_rule(1).unwrap();
        assert!((r.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_closed_form() {
        let r = gauss_laguerre_rule(2).unwrap();
        let s = 2f64.sqrt();
        assert!((r.nodes()[0] - (2.0 - s)).abs() < 1e-14);
        assert!((r.nodes()[1] - (2.0 + s)).abs() < 1e-14);
        assert!((r.weights()[0] - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((r.weights()[1] - (2.0 - s) / 4.0).abs() < 1e-14);
        // ∫e^{-x} = 1 and ∫x e^{-x} = 1 fix the two weights
        let w = r.weights();
        assert!((w[0] + w[1] - 1.0).abs() < 1e-15);
        assert!((w[0] * r.nodes()[0] + w[1] * r.nodes()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_orders() {
        assert_eq!(gauss_laguerre_rule(0), Err(SpecFunError::Order(0)));
        assert_eq!(gauss_laguerre_rule(129), Err(SpecFunError::Order(129)));
        assert!(gauss_legendre_rule(0).is_err());
    }

    #[test]
    fn every_order_satisfies_rule_invariants() {
        for n in 1..=MAX_ORDER {
            let r = gauss_laguerre_rule(n).unwrap();
            assert_eq!(r.nodes().len(), n);
            assert_eq!(r.weights().len(), n);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]), "order {n}");
            assert!(r.nodes().iter().all(|&x| x > 0.0));
            assert!(r.weights().iter().all(|&w| w > 0.0), "order {n}");
            let total: f64 = r.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "order {n}: {total}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        for n in 1..=MAX_ORDER {
            let r = gauss_laguerre_rule(n).unwrap();
            for k in 0..=(2 * n - 1).min(20) as u32 {
                let got = integrate_laguerre(|x| x.powi(k as i32), &r).unwrap();
                let exact = factorial(k);
                assert!((got / exact - 1.0).abs() < 1e-10, "n={n} k={k}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn gamma_four_at_order_fifteen() {
        let r = gauss_laguerre_rule(15).unwrap();
        let got = integrate_laguerre(|x| x.powi(3), &r).unwrap();
        assert!((got - 6.0).abs() <= 1e-10);
        let got = integrate_laguerre(|x| x * x, &r).unwrap();
        assert!((got - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let r = gauss_laguerre_rule(4).unwrap();
        let first = r.nodes()[0];
        let err = integrate_laguerre(|x| if x == first { f64::NAN } else { 1.0 }, &r).unwrap_err();
        assert!(matches!(err, SpecFunError::NonFinite { node, .. } if node == first));
    }

    #[test]
    fn legendre_exactness() {
        for n in [1usize, 2, 5, 20, 64, 128] {
            let r = gauss_legendre_rule(n).unwrap();
            let total: f64 = r.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            for k in 0..(2 * n).min(30) {
                let got = r.integrate(0.0, 1.0, |x| x.powi(k as i32));
                assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }
}
