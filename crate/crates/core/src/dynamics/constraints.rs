//! Constraint residuals, their analytic gradients, and the pair quantities
//! of the interacting gas.

use super::{DynamicsError, GasModel, LennardJonesParams, SystemState, SEPARATION_FLOOR};
use crate::minkowski::FourVector;

/// `∂F/∂q_i^μ` and `∂F/∂p_i^μ` for every particle (covariant components).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGradient {
    pub dq: Vec<FourVector>,
    pub dp: Vec<FourVector>,
}

impl PhaseGradient {
    pub fn zeros(n: usize) -> Self {
        Self { dq: vec![FourVector::ZERO; n], dp: vec![FourVector::ZERO; n] }
    }

    pub fn len(&self) -> usize {
        self.dq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dq.is_empty()
    }
}

/// Relative geometry of a pair: `d = q_i - q_j`, `P = p_i + p_j`.
#[derive(Debug, Clone, Copy)]
struct Pair {
    d: FourVector,
    p: FourVector,
    /// `d·d`
    s: f64,
    /// `d·P`
    t: f64,
    /// `P·P`
    n: f64,
}

impl Pair {
    fn new(state: &SystemState, i: usize, j: usize) -> Result<Self, DynamicsError> {
        let (a, b) = (&state.particles[i], &state.particles[j]);
        let d = a.q - b.q;
        let p = a.p + b.p;
        let n = p.norm_sq();
        if !(n > 0.0) {
            return Err(DynamicsError::DegeneratePair { i, j, p_sq: n });
        }
        Ok(Self { d, p, s: d.norm_sq(), t: d.dot(&p), n })
    }

    fn q_t_sq(&self) -> f64 {
        self.s - self.t * self.t / self.n
    }

    /// `∂q_T²/∂d_μ`, equal to `∂/∂q_i` and minus `∂/∂q_j`.
    fn grad_d(&self) -> FourVector {
        (2.0 * (self.d - (self.t / self.n) * self.p)).lower()
    }

    /// `∂q_T²/∂P_μ`, shared by `p_i` and `p_j`.
    fn grad_p(&self) -> FourVector {
        let r = self.t / self.n;
        (2.0 * r * (r * self.p - self.d)).lower()
    }
}

fn check_pair(state: &SystemState, i: usize, j: usize) -> Result<(), DynamicsError> {
    let n = state.len();
    if i >= n || j >= n {
        return Err(DynamicsError::InvalidInput { what: "particle index out of range", value: i.max(j) as f64 });
    }
    if i == j {
        return Err(DynamicsError::InvalidInput { what: "pair needs two distinct particles", value: i as f64 });
    }
    Ok(())
}

/// `q_T² = q_ij² - (q_ij·p_ij)²/p_ij²` with `q_ij = q_i - q_j`, `p_ij = p_i + p_j`.
pub fn transverse_distance_sq(i: usize, j: usize, state: &SystemState) -> Result<f64, DynamicsError> {
    check_pair(state, i, j)?;
    Ok(Pair::new(state, i, j)?.q_t_sq())
}

/// `r_T² = -q_T²`, rejecting non-spacelike and too-close pairs.
fn transverse_r_sq(pair: &Pair, lj: &LennardJonesParams, i: usize, j: usize) -> Result<f64, DynamicsError> {
    let q_t_sq = pair.q_t_sq();
    if !(q_t_sq < 0.0) {
        return Err(DynamicsError::CausallyDegenerate { i, j, q_t_sq });
    }
    let r_sq = -q_t_sq;
    let floor = SEPARATION_FLOOR * lj.sigma();
    if r_sq < floor * floor {
        return Err(DynamicsError::SeparationTooSmall { i, j, distance: r_sq.sqrt() });
    }
    Ok(r_sq)
}

/// `Ṽ_ij = 2 m_i κ [(σ/r_T)¹² - (σ/r_T)⁶]` with `r_T = √(-q_T²)`.
pub fn lj_tilde(i: usize, j: usize, state: &SystemState, lj: &LennardJonesParams) -> Result<f64, DynamicsError> {
    check_pair(state, i, j)?;
    let pair = Pair::new(state, i, j)?;
    let r_sq = transverse_r_sq(&pair, lj, i, j)?;
    Ok(2.0 * state.particles[i].m * lj.potential(r_sq))
}

/// Gradient of [`lj_tilde`] with respect to all phase-space coordinates.
pub fn lj_tilde_gradient(
    i: usize,
    j: usize,
    state: &SystemState,
    lj: &LennardJonesParams,
) -> Result<PhaseGradient, DynamicsError> {
    check_pair(state, i, j)?;
    let pair = Pair::new(state, i, j)?;
    let r_sq = transverse_r_sq(&pair, lj, i, j)?;
    // dṼ/dq_T² = -2m dV/d(r²)
    let g = -2.0 * state.particles[i].m * lj.d_potential_d_r_sq(r_sq);
    let mut grad = PhaseGradient::zeros(state.len());
    let gd = g * pair.grad_d();
    let gp = g * pair.grad_p();
    grad.dq[i] += gd;
    grad.dq[j] -= gd;
    grad.dp[i] += gp;
    grad.dp[j] += gp;
    Ok(grad)
}

/// `ω_ij = e^{q_ij²/σ²} / (q_ij²/σ²)`, sign included as written.
pub fn weighting(i: usize, j: usize, state: &SystemState, sigma: f64) -> Result<f64, DynamicsError> {
    check_pair(state, i, j)?;
    let d = state.particles[i].q - state.particles[j].q;
    omega(d.norm_sq(), sigma, i, j).map(|w| w.0)
}

/// `(ω, dω/ds)` at `s = q_ij²`.
fn omega(s: f64, sigma: f64, i: usize, j: usize) -> Result<(f64, f64), DynamicsError> {
    let sigma_sq = sigma * sigma;
    if s == 0.0 || !s.is_finite() {
        return Err(DynamicsError::SingularWeight { i, j });
    }
    let w = sigma_sq / s * (s / sigma_sq).exp();
    Ok((w, w * (1.0 / sigma_sq - 1.0 / s)))
}

/// Residuals `[φ₁..φ_N, χ₁..χ_N]`.
pub fn constraint_values(model: &GasModel, state: &SystemState) -> Result<Vec<f64>, DynamicsError> {
    Ok(evaluate(model, state, false)?.0)
}

/// Gradients of every residual, in the order of [`constraint_values`].
pub fn constraint_gradients(model: &GasModel, state: &SystemState) -> Result<Vec<PhaseGradient>, DynamicsError> {
    Ok(evaluate(model, state, true)?.1)
}

pub(crate) fn evaluate(
    model: &GasModel,
    state: &SystemState,
    with_gradients: bool,
) -> Result<(Vec<f64>, Vec<PhaseGradient>), DynamicsError> {
    model.check(state)?;
    let n = state.len();
    let mut values = Vec::with_capacity(2 * n);
    let mut grads = if with_gradients { vec![PhaseGradient::zeros(n); 2 * n] } else { Vec::new() };

    for (i, a) in state.particles.iter().enumerate() {
        values.push((a.p.norm_sq() - a.m * a.m) / (2.0 * a.m));
        if with_gradients {
            grads[i].dp[i] = a.p.lower() * (1.0 / a.m);
        }
    }

    match model {
        GasModel::PerfectSimple => {
            for (i, a) in state.particles.iter().enumerate() {
                values.push(a.q.t - state.tau);
                if with_gradients {
                    grads[n + i].dq[i] = FourVector::new(1.0, 0.0, 0.0, 0.0);
                }
            }
        }
        GasModel::PerfectCovariant => {
            for (i, a) in state.particles.iter().enumerate() {
                values.push(a.p.dot(&a.q) / a.m - state.tau);
                if with_gradients {
                    grads[n + i].dq[i] = a.p.lower() * (1.0 / a.m);
                    grads[n + i].dp[i] = a.q.lower() * (1.0 / a.m);
                }
            }
        }
        GasModel::RealGas { lj } => {
            real_gas_potential(state, lj, &mut values, with_gradients.then_some(&mut grads))?;
            real_gas_fixations(state, lj, &mut values, with_gradients.then_some(&mut grads))?;
        }
    }
    Ok((values, grads))
}

/// Subtracts `Σ_j Ṽ_ij/(2m_i) = Σ_j V(r_T,ij)` from each `φ_i`.
fn real_gas_potential(
    state: &SystemState,
    lj: &LennardJonesParams,
    values: &mut [f64],
    mut grads: Option<&mut Vec<PhaseGradient>>,
) -> Result<(), DynamicsError> {
    let n = state.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let pair = Pair::new(state, i, j)?;
            let r_sq = transverse_r_sq(&pair, lj, i, j)?;
            let v = lj.potential(r_sq);
            values[i] -= v;
            values[j] -= v;
            if let Some(grads) = grads.as_deref_mut() {
                // d(-V)/dq_T² = +dV/d(r²)
                let g = lj.d_potential_d_r_sq(r_sq);
                let gd = g * pair.grad_d();
                let gp = g * pair.grad_p();
                for k in [i, j] {
                    grads[k].dq[i] += gd;
                    grads[k].dq[j] -= gd;
                    grads[k].dp[i] += gp;
                    grads[k].dp[j] += gp;
                }
            }
        }
    }
    Ok(())
}

/// `χ_i = (1/m_i) Σ_j ω_ij p_ij·q_ij` for `i < N`, then `χ_N = Û·Q - τ`.
fn real_gas_fixations(
    state: &SystemState,
    lj: &LennardJonesParams,
    values: &mut Vec<f64>,
    mut grads: Option<&mut Vec<PhaseGradient>>,
) -> Result<(), DynamicsError> {
    let n = state.len();
    for i in 0..n - 1 {
        let inv_m = 1.0 / state.particles[i].m;
        let mut chi = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let pair = Pair::new(state, i, j)?;
            let (w, dw) = omega(pair.s, lj.sigma(), i, j)?;
            chi += w * pair.t;
            if let Some(grads) = grads.as_deref_mut() {
                let gd = (inv_m * (2.0 * dw * pair.t * pair.d + w * pair.p)).lower();
                let gp = (inv_m * w * pair.d).lower();
                let g = &mut grads[n + i];
                g.dq[i] += gd;
                g.dq[j] -= gd;
                g.dp[i] += gp;
                g.dp[j] += gp;
            }
        }
        values.push(inv_m * chi);
    }

    let total_p = state.particles.iter().fold(FourVector::ZERO, |acc, a| acc + a.p);
    let centre = (1.0 / n as f64) * state.particles.iter().fold(FourVector::ZERO, |acc, a| acc + a.q);
    let norm_sq = total_p.norm_sq();
    if !(norm_sq > 0.0 && total_p.t > 0.0) {
        return Err(DynamicsError::TotalMomentumNotTimelike);
    }
    let norm = norm_sq.sqrt();
    let u = (1.0 / norm) * total_p;
    let uq = u.dot(&centre);
    values.push(uq - state.tau);
    if let Some(grads) = grads {
        let gq = (1.0 / n as f64) * u.lower();
        let gp = ((1.0 / norm) * (centre - uq * u)).lower();
        let g = &mut grads[2 * n - 1];
        for k in 0..n {
            g.dq[k] = gq;
            g.dp[k] = gp;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Particle;
    use crate::minkowski::Boost;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn on_shell(m: f64, x: [f64; 3], p: [f64; 3], t: f64) -> Particle {
        let e = (m * m + p.iter().map(|v| v * v).sum::<f64>()).sqrt();
        Particle { q: FourVector::from_parts(t, x), p: FourVector::from_parts(e, p), m }
    }

    fn lj() -> LennardJonesParams {
        LennardJonesParams::new(0.3, 1.0).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> SystemState {
        // loose lattice so every pair is well separated and spacelike
        let particles = (0..n)
            .map(|k| {
                let x = [1.6 * k as f64 + rng.random_range(-0.2..0.2), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
                let p = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
                let mut a = on_shell(rng.random_range(0.8..1.5), x, p, rng.random_range(-0.1..0.1));
                a.p.t *= rng.random_range(0.99..1.01);
                a
            })
            .collect();
        SystemState::new(particles, 0.3)
    }

    /// Central differences of every residual in every coordinate.
    fn check_gradients(model: &GasModel, state: &SystemState) {
        let grads = constraint_gradients(model, state).unwrap();
        let n = state.len();
        for which in 0..2 {
            for k in 0..n {
                for mu in 0..4 {
                    let h = 1e-6;
                    let shifted = |delta: f64| {
                        let mut s = state.clone();
                        let v = if which == 0 { &mut s.particles[k].q } else { &mut s.particles[k].p };
                        v[mu] += delta;
                        constraint_values(model, &s).unwrap()
                    };
                    let (plus, minus) = (shifted(h), shifted(-h));
                    for c in 0..2 * n {
                        let fd = (plus[c] - minus[c]) / (2.0 * h);
                        let g = &grads[c];
                        let an = if which == 0 { g.dq[k][mu] } else { g.dp[k][mu] };
                        let scale = an.abs().max(fd.abs()).max(1e-3);
                        assert!(
                            (an - fd).abs() <= 1e-6 * scale,
                            "{} constraint {c}, particle {k}, {} component {mu}: {an} vs {fd}",
                            model.label(),
                            if which == 0 { "q" } else { "p" }
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rest_particle_covariant() {
        let state = SystemState::new(vec![on_shell(2.0, [0.3, 0.0, 0.0], [0.0; 3], 1.5)], 1.5);
        let v = constraint_values(&GasModel::PerfectCovariant, &state).unwrap();
        assert!(v.iter().all(|r| r.abs() < 1e-15), "{v:?}");
    }

    #[test]
    fn off_shell_probe() {
        let m = 1.7;
        let state = SystemState::new(vec![Particle { q: FourVector::ZERO, p: FourVector::new(2.0 * m, 0.0, 0.0, 0.0), m }], 0.0);
        let v = constraint_values(&GasModel::PerfectSimple, &state).unwrap();
        assert!((v[0] - 1.5 * m).abs() < 1e-14);
    }

    #[test]
    fn distant_pair_matches_free_shell() {
        let state = SystemState::new(
            vec![on_shell(1.0, [0.0; 3], [0.1, 0.0, 0.0], 0.0), on_shell(1.0, [50.0, 0.0, 0.0], [-0.1, 0.0, 0.0], 0.0)],
            0.0,
        );
        let mut s = state.clone();
        s.particles[0].p.t += 1e-3;
        let real = constraint_values(&GasModel::RealGas { lj: lj() }, &s).unwrap();
        let free = constraint_values(&GasModel::PerfectSimple, &s).unwrap();
        // V(50σ) ≈ -κ 50⁻⁶
        let bound = 0.3 * 50f64.powi(-6) * 1.01;
        assert!((real[0] - free[0]).abs() <= bound);
        assert!((real[0] - free[0]).abs() > 0.0);
    }

    #[test]
    fn cms_transverse_distance() {
        let state = SystemState::new(
            vec![on_shell(1.0, [0.0, 0.0, 0.0], [0.3, 0.1, 0.0], 2.0), on_shell(1.0, [1.0, 2.0, -0.5], [-0.3, -0.1, 0.0], 2.0)],
            0.0,
        );
        let q = transverse_distance_sq(0, 1, &state).unwrap();
        assert!((q + (1.0 + 4.0 + 0.25)).abs() < 1e-13);
    }

    #[test]
    fn longitudinal_displacement_drops_out() {
        let a = on_shell(1.0, [0.0; 3], [0.2, 0.0, 0.0], 0.0);
        let mut b = on_shell(1.0, [1.0, 0.5, 0.0], [0.1, 0.3, 0.0], 0.0);
        let base = SystemState::new(vec![a, b], 0.0);
        let q0 = transverse_distance_sq(0, 1, &base).unwrap();
        b.q += 0.77 * (a.p + b.p);
        let shifted = SystemState::new(vec![a, b], 0.0);
        assert!((transverse_distance_sq(0, 1, &shifted).unwrap() - q0).abs() < 1e-12);
    }

    #[test]
    fn lj_values_at_zero_and_minimum() {
        let m = 1.3;
        let lj = lj();
        let pair = |r: f64| {
            SystemState::new(vec![on_shell(m, [0.0; 3], [0.0; 3], 0.0), on_shell(m, [r, 0.0, 0.0], [0.0; 3], 0.0)], 0.0)
        };
        assert!(lj_tilde(0, 1, &pair(1.0), &lj).unwrap().abs() < 1e-15);
        let r_min = 2f64.powf(1.0 / 6.0);
        let v_min = lj_tilde(0, 1, &pair(r_min), &lj).unwrap();
        assert!((v_min + m * 0.3 / 2.0).abs() < 1e-14);
        // 1-D scan: nothing lower nearby
        for k in 1..=200 {
            let r = 0.9 + 0.004 * k as f64;
            assert!(lj_tilde(0, 1, &pair(r), &lj).unwrap() >= v_min - 1e-15, "r={r}");
        }
    }

    #[test]
    fn lj_guards() {
        let lj = lj();
        let close = SystemState::new(
            vec![on_shell(1.0, [0.0; 3], [0.0; 3], 0.0), on_shell(1.0, [1e-8, 0.0, 0.0], [0.0; 3], 0.0)],
            0.0,
        );
        assert!(matches!(lj_tilde(0, 1, &close, &lj), Err(DynamicsError::SeparationTooSmall { .. })));
        let coincident = SystemState::new(vec![on_shell(1.0, [0.0; 3], [0.0; 3], 0.0); 2], 0.0);
        assert!(matches!(lj_tilde(0, 1, &coincident, &lj), Err(DynamicsError::CausallyDegenerate { .. })));
        assert!(transverse_distance_sq(0, 0, &close).is_err());
    }

    #[test]
    fn weighting_values() {
        let state = |x: f64| {
            SystemState::new(vec![on_shell(1.0, [0.0; 3], [0.0; 3], 0.0), on_shell(1.0, [x, 0.0, 0.0], [0.0; 3], 0.0)], 0.0)
        };
        let w = weighting(0, 1, &state(2.0), 2.0).unwrap();
        assert!((w + (-1f64).exp()).abs() < 1e-15);
        let grid: Vec<f64> = (1..26).map(|k| weighting(0, 1, &state(0.5 * k as f64), 1.0).unwrap().abs()).collect();
        assert!(grid.windows(2).skip(1).all(|w| w[1] < w[0]));
        assert!(weighting(0, 1, &state(30.0), 1.0).unwrap().abs() < 1e-300);
        let lightlike = SystemState::new(
            vec![on_shell(1.0, [0.0; 3], [0.0; 3], 0.0), on_shell(1.0, [1.0, 0.0, 0.0], [0.0; 3], 1.0)],
            0.0,
        );
        assert_eq!(weighting(0, 1, &lightlike, 1.0), Err(DynamicsError::SingularWeight { i: 0, j: 1 }));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(2..5);
            let state = random_state(&mut rng, n);
            check_gradients(&GasModel::RealGas { lj: lj() }, &state);
        }
        for _ in 0..10 {
            let state = random_state(&mut rng, 3);
            check_gradients(&GasModel::PerfectSimple, &state);
            check_gradients(&GasModel::PerfectCovariant, &state);
        }
    }

    #[test]
    fn lj_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lj = lj();
        for _ in 0..100 {
            let state = random_state(&mut rng, 2);
            let g = lj_tilde_gradient(0, 1, &state, &lj).unwrap();
            for k in 0..2 {
                for mu in 0..4 {
                    let h = 1e-6;
                    let f = |delta: f64, on_q: bool| {
                        let mut s = state.clone();
                        if on_q {
                            s.particles[k].q[mu] += delta;
                        } else {
                            s.particles[k].p[mu] += delta;
                        }
                        lj_tilde(0, 1, &s, &lj).unwrap()
                    };
                    for (on_q, an) in [(true, g.dq[k][mu]), (false, g.dp[k][mu])] {
                        let fd = (f(h, on_q) - f(-h, on_q)) / (2.0 * h);
                        assert!((an - fd).abs() <= 1e-6 * an.abs().max(fd.abs()).max(1e-3), "{an} vs {fd}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pair_scalars_are_boost_invariant(
            seed in any::<u64>(),
            v in prop::array::uniform3(-0.55f64..0.55),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let state = random_state(&mut rng, 2);
            let boosted = state.boosted(&Boost::new(v).unwrap());
            let a = transverse_distance_sq(0, 1, &state).unwrap();
            let b = transverse_distance_sq(0, 1, &boosted).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
            let a = weighting(0, 1, &state, 1.0).unwrap();
            let b = weighting(0, 1, &boosted, 1.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        }
    }
}
