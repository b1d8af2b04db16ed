//! Covariant equilibrium statistics of the relativistic monatomic perfect gas,
//! together with the constrained Hamiltonian particle dynamics it rests on.
//!
//! All quantities use natural units (`ħ = c = k = 1`). Energies, masses and
//! temperatures share one energy unit; lengths and times are its inverse.
//!
//! * [`minkowski`]: four-vectors with metric `(+,-,-,-)` and pure boosts.
//! * [`specfun`]: Gauss-Laguerre / Gauss-Legendre rules, `K_0..K_2`, `ln Γ`.
//! * [`partition`]: the per-particle factor `Y` and `ln Z_C` for four phase-space treatments.
//! * [`thermo`]: free energy, entropy, pressure, mean energy and heat capacity.
//! * [`dynamics`]: constraints, Poisson brackets, Lagrange multipliers and the
//!   τ-integrator for the free and Lennard-Jones interacting gas.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tabulated constants are kept digit for digit as published.
#![allow(clippy::excessive_precision)]

pub mod dynamics;
pub mod minkowski;
pub mod partition;
pub mod specfun;
pub mod thermo;

pub use minkowski::FourVector;
pub use partition::{ApproachKind, GasSpec};
pub use specfun::QuadratureRule;
pub use thermo::ThermoReport;
