//! Special functions and quadrature used by the partition integrals.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{bessel_k, bessel_k_scaled, BesselK, BESSEL_UNDERFLOW_ARG};
pub use gamma::ln_gamma;
pub use quadrature::{
    gauss_laguerre_rule, gauss_legendre_rule, integrate_laguerre, LegendreRule, QuadratureRule,
    MAX_ORDER,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("quadrature order {0} outside 1..={MAX_ORDER}")]
    Order(usize),
    #[error("integrand is not finite at node {node} (value {value})")]
    NonFinite { node: f64, value: f64 },
    #[error("Newton iteration for root {index} of the degree-{order} polynomial did not converge")]
    RootNotConverged { order: usize, index: usize },
}
