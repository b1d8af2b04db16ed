//! Newtonian reference integrator for the slow-particle limit of the real gas.
//!
//! Each particle's mass shell carries the full sum `Σ_j V(r_ij²)` over its
//! partners, so the limiting Hamiltonian counts every pair twice:
//! `H = Σ p²/2m + Σ_i Σ_{j≠i} V(r_ij²)`.

use serde::{Deserialize, Serialize};

use super::{DynamicsError, LennardJonesParams, SystemState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonianState {
    pub x: Vec<[f64; 3]>,
    pub p: Vec<[f64; 3]>,
    pub t: f64,
}

impl NewtonianState {
    /// Spatial parts of a relativistic state, with `t` set to its `τ`.
    pub fn from_system(state: &SystemState) -> Self {
        Self {
            x: state.particles.iter().map(|a| a.q.spatial()).collect(),
            p: state.particles.iter().map(|a| a.p.spatial()).collect(),
            t: state.tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonianSystem {
    pub masses: Vec<f64>,
    pub lj: LennardJonesParams,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn axpy(a: &[[f64; 3]], h: f64, d: &[[f64; 3]]) -> Vec<[f64; 3]> {
    a.iter().zip(d).map(|(a, d)| [a[0] + h * d[0], a[1] + h * d[1], a[2] + h * d[2]]).collect()
}

impl NewtonianSystem {
    pub fn new(masses: Vec<f64>, lj: LennardJonesParams) -> Result<Self, DynamicsError> {
        if let Some(&m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(DynamicsError::InvalidInput { what: "mass must be positive", value: m });
        }
        Ok(Self { masses, lj })
    }

    pub fn energy(&self, s: &NewtonianState) -> f64 {
        let kinetic: f64 =
            s.p.iter().zip(&self.masses).map(|(p, m)| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2.0 * m)).sum();
        let mut potential = 0.0;
        for i in 0..s.x.len() {
            for j in (i + 1)..s.x.len() {
                let d = sub(s.x[i], s.x[j]);
                potential += 2.0 * self.lj.potential(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
            }
        }
        kinetic + potential
    }

    fn rates(&self, x: &[[f64; 3]], p: &[[f64; 3]]) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
        let n = x.len();
        let dx = p.iter().zip(&self.masses).map(|(p, m)| [p[0] / m, p[1] / m, p[2] / m]).collect();
        let mut dp = vec![[0.0; 3]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = sub(x[i], x[j]);
                let r_sq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                // -∂/∂x_i of 2V(r²)
                let f = -4.0 * self.lj.d_potential_d_r_sq(r_sq);
                for k in 0..3 {
                    dp[i][k] += f * d[k];
                    dp[j][k] -= f * d[k];
                }
            }
        }
        (dx, dp)
    }

    pub fn step(&self, s: &NewtonianState, dt: f64) -> Result<NewtonianState, DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::InvalidInput { what: "dt must be positive", value: dt });
        }
        if s.x.len() != self.masses.len() || s.p.len() != self.masses.len() {
            return Err(DynamicsError::InvalidInput { what: "state size differs from mass count", value: s.x.len() as f64 });
        }
        let (k1x, k1p) = self.rates(&s.x, &s.p);
        let (k2x, k2p) = self.rates(&axpy(&s.x, 0.5 * dt, &k1x), &axpy(&s.p, 0.5 * dt, &k1p));
        let (k3x, k3p) = self.rates(&axpy(&s.x, 0.5 * dt, &k2x), &axpy(&s.p, 0.5 * dt, &k2p));
        let (k4x, k4p) = self.rates(&axpy(&s.x, dt, &k3x), &axpy(&s.p, dt, &k3p));
        let combine = |base: &[[f64; 3]], k1: &[[f64; 3]], k2: &[[f64; 3]], k3: &[[f64; 3]], k4: &[[f64; 3]]| {
            (0..base.len())
                .map(|i| std::array::from_fn(|c| base[i][c] + dt / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c])))
                .collect::<Vec<[f64; 3]>>()
        };
        Ok(NewtonianState {
            x: combine(&s.x, &k1x, &k2x, &k3x, &k4x),
            p: combine(&s.p, &k1p, &k2p, &k3p, &k4p),
            t: s.t + dt,
        })
    }
}
