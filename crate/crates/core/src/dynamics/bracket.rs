//! Poisson brackets, the constraint bracket matrix, Lagrange multipliers and
//! the resulting flow.

use nalgebra::{DMatrix, DVector};

use super::constraints::{evaluate, PhaseGradient};
use super::{DynamicsError, GasModel, SystemState, CONDITION_WARNING};
use crate::minkowski::FourVector;

/// A scalar on phase space with an analytic gradient.
pub trait PhaseFunction {
    fn value(&self, state: &SystemState) -> Result<f64, DynamicsError>;

    fn gradient(&self, _state: &SystemState) -> Result<PhaseGradient, DynamicsError> {
        Err(DynamicsError::MissingGradient)
    }
}

/// Constraint `ψ_index` of a model (`0..N` mass shells, `N..2N` time fixations).
#[derive(Debug, Clone, Copy)]
pub struct ConstraintFunction<'a> {
    pub model: &'a GasModel,
    pub index: usize,
}

impl PhaseFunction for ConstraintFunction<'_> {
    fn value(&self, state: &SystemState) -> Result<f64, DynamicsError> {
        self.pick(evaluate(self.model, state, false)?.0)
    }

    fn gradient(&self, state: &SystemState) -> Result<PhaseGradient, DynamicsError> {
        self.pick(evaluate(self.model, state, true)?.1)
    }
}

impl ConstraintFunction<'_> {
    fn pick<T>(&self, mut v: Vec<T>) -> Result<T, DynamicsError> {
        if self.index >= v.len() {
            return Err(DynamicsError::InvalidInput { what: "constraint index out of range", value: self.index as f64 });
        }
        Ok(v.swap_remove(self.index))
    }
}

/// Component `μ` of the total four-momentum `P^μ = Σ p_i^μ`.
#[derive(Debug, Clone, Copy)]
pub struct TotalMomentum(pub usize);

impl PhaseFunction for TotalMomentum {
    fn value(&self, state: &SystemState) -> Result<f64, DynamicsError> {
        Ok(state.particles.iter().map(|a| a.p[self.0]).sum())
    }

    fn gradient(&self, state: &SystemState) -> Result<PhaseGradient, DynamicsError> {
        let mut g = PhaseGradient::zeros(state.len());
        for dp in &mut g.dp {
            dp[self.0] = 1.0;
        }
        Ok(g)
    }
}

/// `E = √(P·P)`, the total energy in the rest frame of the system.
#[derive(Debug, Clone, Copy)]
pub struct InvariantEnergy;

impl PhaseFunction for InvariantEnergy {
    fn value(&self, state: &SystemState) -> Result<f64, DynamicsError> {
        let p = super::total_momentum(state);
        Ok(p.norm_sq().sqrt())
    }

    fn gradient(&self, state: &SystemState) -> Result<PhaseGradient, DynamicsError> {
        let p = super::total_momentum(state);
        let u = (1.0 / p.norm_sq().sqrt()) * p;
        let mut g = PhaseGradient::zeros(state.len());
        for dp in &mut g.dp {
            *dp = u.lower();
        }
        Ok(g)
    }
}

/// `{A,B} = Σ_i (∂A/∂p_i^μ ∂B/∂q_iμ - ∂A/∂q_i^μ ∂B/∂p_iμ)`.
pub(crate) fn bracket_of(a: &PhaseGradient, b: &PhaseGradient) -> f64 {
    a.dp.iter().zip(&b.dq).map(|(x, y)| x.dot(y)).sum::<f64>()
        - a.dq.iter().zip(&b.dp).map(|(x, y)| x.dot(y)).sum::<f64>()
}

pub fn poisson_bracket(
    a: &dyn PhaseFunction,
    b: &dyn PhaseFunction,
    state: &SystemState,
) -> Result<f64, DynamicsError> {
    Ok(bracket_of(&a.gradient(state)?, &b.gradient(state)?))
}

/// The constraint bracket matrix with its 1-norm condition number.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketMatrix {
    pub matrix: DMatrix<f64>,
    pub condition: f64,
}

impl BracketMatrix {
    pub fn near_singular(&self) -> bool {
        !(self.condition <= CONDITION_WARNING)
    }
}

/// Everything the flow needs at one state.
struct Linearisation {
    grads: Vec<PhaseGradient>,
    c: DMatrix<f64>,
    /// `-∂ψ_j/∂τ` for the columns of `c`
    rhs: DVector<f64>,
    /// indices into `grads` of the constraints that generate the motion
    generators: std::ops::Range<usize>,
}

fn linearise(model: &GasModel, state: &SystemState) -> Result<Linearisation, DynamicsError> {
    let grads = evaluate(model, state, true)?.1;
    let n = state.len();
    Ok(match model {
        GasModel::PerfectSimple | GasModel::PerfectCovariant => {
            let c = DMatrix::from_fn(n, n, |i, j| bracket_of(&grads[i], &grads[n + j]));
            Linearisation { grads, c, rhs: DVector::from_element(n, 1.0), generators: 0..n }
        }
        GasModel::RealGas { .. } => {
            let c = DMatrix::from_fn(2 * n, 2 * n, |i, j| bracket_of(&grads[i], &grads[j]));
            let mut rhs = DVector::zeros(2 * n);
            rhs[2 * n - 1] = 1.0;
            Linearisation { grads, c, rhs, generators: 0..2 * n - 1 }
        }
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn condition_and_inverse(c: &DMatrix<f64>) -> Result<(f64, DMatrix<f64>), DynamicsError> {
    let inv = c.clone().lu().try_inverse().ok_or(DynamicsError::SingularMatrix)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::SingularMatrix);
    }
    Ok((one_norm(c) * one_norm(&inv), inv))
}

/// `C_ij = {φ_i, χ_j}` (N×N) for the perfect gas, `{ψ_i, ψ_j}` (2N×2N) for the real gas.
pub fn c_matrix(model: &GasModel, state: &SystemState) -> Result<BracketMatrix, DynamicsError> {
    let lin = linearise(model, state)?;
    let (condition, _) = condition_and_inverse(&lin.c)?;
    Ok(BracketMatrix { matrix: lin.c, condition })
}

/// Solves the consistency conditions `Σ_i λ_i C_ij = -∂ψ_j/∂τ`.
fn solve(lin: &Linearisation) -> Result<(DVector<f64>, f64), DynamicsError> {
    let (condition, inv) = condition_and_inverse(&lin.c)?;
    Ok((inv.transpose() * &lin.rhs, condition))
}

/// One multiplier per row of [`c_matrix`]: `N` for the perfect gas
/// (`m_i/p_i⁰` or `m_i²/p_i²`), `2N` for the real gas with the last, which
/// belongs to the τ-dependent `χ_N`, zero up to rounding.
pub fn multipliers(model: &GasModel, state: &SystemState) -> Result<Vec<f64>, DynamicsError> {
    let lin = linearise(model, state)?;
    Ok(solve(&lin)?.0.iter().copied().collect())
}

/// `dq/dτ`, `dp/dτ` (contravariant) with the multipliers used.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub dq: Vec<FourVector>,
    pub dp: Vec<FourVector>,
    pub lambda: Vec<f64>,
    pub condition: f64,
}

/// `dq_i/dτ = Σ λ_k ∂ψ_k/∂p_iμ`, `dp_i/dτ = -Σ λ_k ∂ψ_k/∂q_iμ`, summed over
/// the τ-independent constraints.
pub fn flow_derivatives(model: &GasModel, state: &SystemState) -> Result<Flow, DynamicsError> {
    let lin = linearise(model, state)?;
    let (lambda, condition) = solve(&lin)?;
    let n = state.len();
    let mut dq = vec![FourVector::ZERO; n];
    let mut dp = vec![FourVector::ZERO; n];
    for k in lin.generators.clone() {
        let g = &lin.grads[k];
        let l = lambda[k];
        for i in 0..n {
            // raising an index is the same sign flip as lowering
            dq[i] += l * g.dp[i].lower();
            dp[i] -= l * g.dq[i].lower();
        }
    }
    Ok(Flow { dq, dp, lambda: lambda.iter().copied().collect(), condition })
}

/// `Σ_k λ_k {X, ψ_k}` over the generating constraints. A `τ`-independent `X`
/// with this sum ≈ 0 is conserved, and a distribution built from such `X`
/// satisfies the equilibrium condition.
pub fn conservation_rate(model: &GasModel, state: &SystemState, x: &dyn PhaseFunction) -> Result<f64, DynamicsError> {
    let lin = linearise(model, state)?;
    let (lambda, _) = solve(&lin)?;
    let gx = x.gradient(state)?;
    Ok(lin.generators.clone().map(|k| lambda[k] * bracket_of(&gx, &lin.grads[k])).sum())
}
