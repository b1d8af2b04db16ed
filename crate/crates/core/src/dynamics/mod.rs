//! Constrained Hamiltonian dynamics of `N` relativistic particles.
//!
//! Each model supplies `2N` constraints `ψ = (φ₁..φ_N, χ₁..χ_N)`: mass-shell
//! conditions and time fixations. The Dirac Hamiltonian `H = Σ λ_k ψ_k`
//! generates the flow in the evolution parameter `τ`; the multipliers follow
//! from requiring `dψ/dτ ≈ 0`.
//!
//! Gradients are stored as `∂/∂q^μ` and `∂/∂p^μ`, i.e. with covariant
//! components, in a [`FourVector`] used as a plain component array. The
//! Poisson bracket contracts them with the metric.

mod bracket;
mod constraints;
mod integrate;
mod newtonian;

pub use bracket::{
    c_matrix, conservation_rate, flow_derivatives, multipliers, poisson_bracket, BracketMatrix, ConstraintFunction,
    Flow, InvariantEnergy, PhaseFunction, TotalMomentum,
};
pub use constraints::{
    constraint_gradients, constraint_values, lj_tilde, lj_tilde_gradient, transverse_distance_sq, weighting,
    PhaseGradient,
};
pub use integrate::{init_state, project, project_with_trace, step, total_momentum, InitOptions, MAX_PROJECTION_ITERATIONS, PROJECTION_TOL};
pub use newtonian::{NewtonianState, NewtonianSystem};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minkowski::FourVector;

/// Condition number of the bracket matrix above which a warning is attached.
pub const CONDITION_WARNING: f64 = 1e12;
/// Separations below this fraction of `σ` are rejected before the `r⁻¹²` term overflows.
pub const SEPARATION_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{what}: {value}")]
    InvalidInput { what: &'static str, value: f64 },
    #[error("the {0} model needs at least {1} particles")]
    TooFewParticles(&'static str, usize),
    #[error("pair ({i}, {j}): total momentum is lightlike (p² = {p_sq})")]
    DegeneratePair { i: usize, j: usize, p_sq: f64 },
    #[error("pair ({i}, {j}): transverse separation is not spacelike (q_T² = {q_t_sq})")]
    CausallyDegenerate { i: usize, j: usize, q_t_sq: f64 },
    #[error("pair ({i}, {j}): separation {distance} is below the hard floor")]
    SeparationTooSmall { i: usize, j: usize, distance: f64 },
    #[error("pair ({i}, {j}): lightlike separation makes the time-fixation weight singular")]
    SingularWeight { i: usize, j: usize },
    #[error("total momentum is not timelike")]
    TotalMomentumNotTimelike,
    #[error("bracket matrix is singular")]
    SingularMatrix,
    #[error("phase function has no analytic gradient")]
    MissingGradient,
    #[error("projection did not converge; residual history {trace:?}")]
    ProjectionFailed { trace: Vec<f64> },
    #[error("particle {0} has non-positive energy")]
    NegativeEnergy(usize),
    #[error("state initialisation failed after {attempts} attempts")]
    InitFailed { attempts: usize },
}

/// One particle: contravariant position and momentum, rest mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub q: FourVector,
    pub p: FourVector,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub particles: Vec<Particle>,
    pub tau: f64,
}

impl SystemState {
    pub fn new(particles: Vec<Particle>, tau: f64) -> Self {
        Self { particles, tau }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Applies the same Lorentz boost to every position and momentum.
    pub fn boosted(&self, boost: &crate::minkowski::Boost) -> Self {
        let particles =
            self.particles.iter().map(|p| Particle { q: boost.apply(&p.q), p: boost.apply(&p.p), m: p.m }).collect();
        Self { particles, tau: self.tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LennardJonesParams {
    kappa: f64,
    sigma: f64,
}

impl LennardJonesParams {
    pub fn new(kappa: f64, sigma: f64) -> Result<Self, DynamicsError> {
        for (what, v) in [("kappa must be positive", kappa), ("sigma must be positive", sigma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DynamicsError::InvalidInput { what, value: v });
            }
        }
        Ok(Self { kappa, sigma })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `κ(y⁶ - y³)` with `y = σ²/r²`: the non-relativistic pair potential.
    pub fn potential(&self, r_sq: f64) -> f64 {
        let y = self.sigma * self.sigma / r_sq;
        self.kappa * (y.powi(6) - y.powi(3))
    }

    /// `dV/d(r²)`.
    pub fn d_potential_d_r_sq(&self, r_sq: f64) -> f64 {
        let y = self.sigma * self.sigma / r_sq;
        -self.kappa * (6.0 * y.powi(7) - 3.0 * y.powi(4)) / (self.sigma * self.sigma)
    }
}

/// Which constraint set drives the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GasModel {
    /// Mass shells with `χ_i = q_i⁰ - τ`.
    PerfectSimple,
    /// Mass shells with `χ_i = p_i·q_i/m_i - τ`.
    PerfectCovariant,
    /// Lennard-Jones mass shells, pair time fixations weighted by `ω_ij`,
    /// and the global fixation `χ_N = Û·Q - τ`.
    RealGas { lj: LennardJonesParams },
}

impl GasModel {
    pub fn label(&self) -> &'static str {
        match self {
            Self::PerfectSimple => "perfect_simple",
            Self::PerfectCovariant => "perfect_covariant",
            Self::RealGas { .. } => "real_gas",
        }
    }

    pub fn lj(&self) -> Option<&LennardJonesParams> {
        match self {
            Self::RealGas { lj } => Some(lj),
            _ => None,
        }
    }

    pub fn min_particles(&self) -> usize {
        match self {
            Self::RealGas { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn check(&self, state: &SystemState) -> Result<(), DynamicsError> {
        if state.len() < self.min_particles() {
            return Err(DynamicsError::TooFewParticles(self.label(), self.min_particles()));
        }
        Ok(())
    }
}
