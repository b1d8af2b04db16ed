//! RK4 in `τ`, Newton projection back onto the constraint surface, and
//! construction of initial states.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::bracket::flow_derivatives;
use super::constraints::{evaluate, transverse_distance_sq};
use super::{DynamicsError, GasModel, Particle, SystemState};
use crate::minkowski::FourVector;

/// Absolute residual the projection drives every constraint below.
pub const PROJECTION_TOL: f64 = 1e-12;
pub const MAX_PROJECTION_ITERATIONS: usize = 20;
// once Newton corrections are at rounding level the residual cannot improve further
const ROUNDOFF_FLOOR: f64 = 1e-10;
const MAX_INIT_ATTEMPTS: usize = 200;

pub fn total_momentum(state: &SystemState) -> FourVector {
    state.particles.iter().fold(FourVector::ZERO, |acc, a| acc + a.p)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton iteration on `(p_i⁰, q_i⁰)` that zeroes all `2N` residuals; the
/// spatial components are not touched.
pub fn project(model: &GasModel, state: &SystemState) -> Result<SystemState, DynamicsError> {
    Ok(project_with_trace(model, state)?.0)
}

/// As [`project`], also returning the max-norm residual before each iteration.
pub fn project_with_trace(model: &GasModel, state: &SystemState) -> Result<(SystemState, Vec<f64>), DynamicsError> {
    let n = state.len();
    let mut current = state.clone();
    let mut trace = Vec::new();
    for _ in 0..=MAX_PROJECTION_ITERATIONS {
        let (values, grads) = evaluate(model, &current, true)?;
        let residual = max_abs(&values);
        trace.push(residual);
        if !residual.is_finite() {
            break;
        }
        if residual <= PROJECTION_TOL {
            return Ok((current, trace));
        }
        if trace.len() > MAX_PROJECTION_ITERATIONS {
            break;
        }
        let jac = DMatrix::from_fn(2 * n, 2 * n, |c, k| if k < n { grads[c].dp[k].t } else { grads[c].dq[k - n].t });
        let Some(delta) = jac.lu().solve(&DVector::from_vec(values)) else {
            return Err(DynamicsError::SingularMatrix);
        };
        let mut largest_relative: f64 = 0.0;
        for (k, a) in current.particles.iter_mut().enumerate() {
            a.p.t -= delta[k];
            a.q.t -= delta[n + k];
            largest_relative = largest_relative
                .max(delta[k].abs() / a.p.t.abs().max(1.0))
                .max(delta[n + k].abs() / a.q.t.abs().max(1.0));
        }
        if largest_relative <= 4.0 * f64::EPSILON && residual <= ROUNDOFF_FLOOR {
            return Ok((current, trace));
        }
    }
    Err(DynamicsError::ProjectionFailed { trace })
}

fn displaced(state: &SystemState, flow: &super::Flow, h: f64) -> SystemState {
    let particles = state
        .particles
        .iter()
        .zip(flow.dq.iter().zip(&flow.dp))
        .map(|(a, (dq, dp))| Particle { q: a.q + h * *dq, p: a.p + h * *dp, m: a.m })
        .collect();
    SystemState::new(particles, state.tau + h)
}

/// One classical RK4 step of length `dtau` followed by [`project`].
pub fn step(model: &GasModel, state: &SystemState, dtau: f64) -> Result<SystemState, DynamicsError> {
    if !(dtau > 0.0 && dtau.is_finite()) {
        return Err(DynamicsError::InvalidInput { what: "dtau must be positive", value: dtau });
    }
    let k1 = flow_derivatives(model, state)?;
    let k2 = flow_derivatives(model, &displaced(state, &k1, 0.5 * dtau))?;
    let k3 = flow_derivatives(model, &displaced(state, &k2, 0.5 * dtau))?;
    let k4 = flow_derivatives(model, &displaced(state, &k3, dtau))?;
    let w = dtau / 6.0;
    let particles = state
        .particles
        .iter()
        .enumerate()
        .map(|(i, a)| Particle {
            q: a.q + w * (k1.dq[i] + 2.0 * k2.dq[i] + 2.0 * k3.dq[i] + k4.dq[i]),
            p: a.p + w * (k1.dp[i] + 2.0 * k2.dp[i] + 2.0 * k3.dp[i] + k4.dp[i]),
            m: a.m,
        })
        .collect();
    let next = project(model, &SystemState::new(particles, state.tau + dtau))?;
    if let Some(i) = next.particles.iter().position(|a| !(a.p.t > 0.0)) {
        return Err(DynamicsError::NegativeEnergy(i));
    }
    Ok(next)
}

/// Parameters for [`init_state`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitOptions {
    pub n: usize,
    pub seed: u64,
    /// Side of the cube the spatial positions are drawn from.
    pub box_size: f64,
    /// Standard deviation of each spatial momentum component.
    pub momentum_scale: f64,
    pub tau0: f64,
    pub mass: f64,
}

impl Default for InitOptions {
    fn default() -> Self {
        Self { n: 2, seed: 0, box_size: 3.0, momentum_scale: 0.1, tau0: 0.0, mass: 1.0 }
    }
}

/// A state on the constraint surface at `τ = tau0`. Perfect gases get `p⁰`
/// and `q⁰` in closed form; the real gas starts from the free values and is
/// projected, redrawing configurations whose transverse separations fall
/// below `σ` or fail to converge.
pub fn init_state(model: &GasModel, opts: &InitOptions) -> Result<SystemState, DynamicsError> {
    if opts.n < model.min_particles() {
        return Err(DynamicsError::TooFewParticles(model.label(), model.min_particles()));
    }
    for (what, v) in [
        ("box size must be positive", opts.box_size),
        ("mass must be positive", opts.mass),
        ("momentum scale must be non-negative", opts.momentum_scale + f64::MIN_POSITIVE),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(DynamicsError::InvalidInput { what, value: v });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = Normal::new(0.0, opts.momentum_scale)
        .map_err(|_| DynamicsError::InvalidInput { what: "momentum scale", value: opts.momentum_scale })?;
    let m = opts.mass;
    for _ in 0..MAX_INIT_ATTEMPTS {
        let particles: Vec<Particle> = (0..opts.n)
            .map(|_| {
                let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..opts.box_size));
                let p: [f64; 3] = std::array::from_fn(|_| normal.sample(&mut rng));
                let p_sq: f64 = p.iter().map(|v| v * v).sum();
                let energy = (m * m + p_sq).sqrt();
                let t = match model {
                    GasModel::PerfectCovariant => {
                        (m * opts.tau0 + x.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>()) / energy
                    }
                    _ => opts.tau0,
                };
                Particle { q: FourVector::from_parts(t, x), p: FourVector::from_parts(energy, p), m }
            })
            .collect();
        let state = SystemState::new(particles, opts.tau0);
        let GasModel::RealGas { lj } = model else {
            return project(model, &state);
        };
        if !all_separated(&state, lj.sigma()) {
            continue;
        }
        match project(model, &state) {
            Ok(s) if all_separated(&s, lj.sigma()) => return Ok(s),
            _ => continue,
        }
    }
    Err(DynamicsError::InitFailed { attempts: MAX_INIT_ATTEMPTS })
}

fn all_separated(state: &SystemState, sigma: f64) -> bool {
    let n = state.len();
    (0..n).all(|i| {
        ((i + 1)..n).all(|j| matches!(transverse_distance_sq(i, j, state), Ok(q) if -q >= sigma * sigma))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{constraint_values, LennardJonesParams};

    fn real() -> GasModel {
        GasModel::RealGas { lj: LennardJonesParams::new(0.1, 1.0).unwrap() }
    }

    #[test]
    fn init_satisfies_constraints() {
        for model in [GasModel::PerfectSimple, GasModel::PerfectCovariant] {
            let s = init_state(&model, &InitOptions { n: 6, seed: 4, tau0: 2.5, ..Default::default() }).unwrap();
            let r = constraint_values(&model, &s).unwrap();
            assert!(max_abs(&r) <= 1e-12, "{r:?}");
        }
        let s = init_state(&real(), &InitOptions { n: 2, seed: 4, ..Default::default() }).unwrap();
        let r = constraint_values(&real(), &s).unwrap();
        assert!(r.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-10);
        assert!(-transverse_distance_sq(0, 1, &s).unwrap() >= 1.0);
    }

    #[test]
    fn init_is_deterministic() {
        let opts = InitOptions { n: 3, seed: 99, ..Default::default() };
        for model in [GasModel::PerfectCovariant, real()] {
            assert_eq!(init_state(&model, &opts).unwrap(), init_state(&model, &opts).unwrap());
        }
        let other = InitOptions { seed: 100, ..opts };
        assert_ne!(init_state(&real(), &opts).unwrap(), init_state(&real(), &other).unwrap());
    }

    #[test]
    fn init_rejects_bad_input() {
        assert!(init_state(&real(), &InitOptions { n: 1, ..Default::default() }).is_err());
        assert!(init_state(&GasModel::PerfectSimple, &InitOptions { box_size: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn projection_fixed_point() {
        let model = GasModel::PerfectCovariant;
        let s = init_state(&model, &InitOptions { n: 3, seed: 1, ..Default::default() }).unwrap();
        assert_eq!(project(&model, &s).unwrap(), s);
    }

    #[test]
    fn projection_moves_only_energy() {
        let model = GasModel::PerfectSimple;
        let s = init_state(&model, &InitOptions { n: 2, seed: 2, ..Default::default() }).unwrap();
        let mut bent = s.clone();
        bent.particles[0].p.t += 1e-5;
        let fixed = project(&model, &bent).unwrap();
        assert!((fixed.particles[0].p.t - s.particles[0].p.t).abs() < 1e-14);
        assert_eq!(fixed.particles[0].q, s.particles[0].q);
        assert_eq!(fixed.particles[0].p.spatial(), s.particles[0].p.spatial());
    }

    #[test]
    fn real_gas_projection_converges_quadratically() {
        let model = real();
        let s = init_state(&model, &InitOptions { n: 2, seed: 8, ..Default::default() }).unwrap();
        let mut bent = s.clone();
        bent.particles[0].p.t += 1e-4;
        bent.particles[1].q.t -= 1e-4;
        bent.particles[1].p.t -= 1e-4;
        let (fixed, trace) = project_with_trace(&model, &bent).unwrap();
        assert!(max_abs(&constraint_values(&model, &fixed).unwrap()) <= PROJECTION_TOL);
        assert!(trace.len() <= 5, "{trace:?}");
        // each residual is bounded by a constant times the square of the previous one
        for w in trace.windows(2).filter(|w| w[1] > 1e-13) {
            assert!(w[1] <= 10.0 * w[0] * w[0], "{trace:?}");
        }
    }

    #[test]
    fn projection_failure_reports_residuals() {
        let model = real();
        let s = init_state(&model, &InitOptions { n: 2, seed: 8, ..Default::default() }).unwrap();
        let mut wild = s.clone();
        // a large time offset overflows the e^{s/σ²} weighting
        wild.particles[0].q.t += 40.0;
        match project(&model, &wild) {
            Err(DynamicsError::ProjectionFailed { trace }) => assert!(!trace[0].is_finite()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_rejects_bad_dtau() {
        let s = init_state(&GasModel::PerfectSimple, &InitOptions::default()).unwrap();
        assert!(step(&GasModel::PerfectSimple, &s, 0.0).is_err());
        assert!(step(&GasModel::PerfectSimple, &s, f64::NAN).is_err());
    }

    #[test]
    fn free_particle_energy_is_constant() {
        let model = GasModel::PerfectSimple;
        let mut s = init_state(&model, &InitOptions { n: 3, seed: 6, ..Default::default() }).unwrap();
        let e0: Vec<f64> = s.particles.iter().map(|a| a.p.t).collect();
        for _ in 0..100 {
            s = step(&model, &s, 0.05).unwrap();
        }
        for (a, e) in s.particles.iter().zip(e0) {
            assert!((a.p.t - e).abs() <= 4.0 * f64::EPSILON * e);
        }
        assert!((s.tau - 5.0).abs() < 1e-12);
    }
}
