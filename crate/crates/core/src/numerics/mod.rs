//! Numeric kernels shared by every physics module: special functions,
//! deterministic adaptive quadrature, fixed-step Runge-Kutta and central
//! difference gradients.
//!
//! Everything here is a pure function of its inputs.

mod gradient;
mod ode;
mod quadrature;
mod special;

pub use gradient::central_gradient;
pub use ode::rk4_step;
pub use quadrature::{
    integrate, integrate_1d, integrate_3d_radial, integrate_3d_separable, Domain, Integrand,
    QuadratureResult,
};
pub use special::{dawson, dawson_over_x, erf, erf_over_x, erfc};

use crate::error::{Error, Result};

/// Accuracy knobs shared by the quadrature and differentiation kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    pub max_quad_nodes: usize,
}

impl Tolerances {
    pub fn new(abs_tol: f64, rel_tol: f64, fd_step: f64, max_quad_nodes: usize) -> Result<Self> {
        let tol = Self {
            abs_tol,
            rel_tol,
            fd_step,
            max_quad_nodes,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.fd_step > 1e-9 && self.fd_step < 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "fd_step must lie in (1e-9, 1e-2), got {}",
                self.fd_step
            )));
        }
        if self.max_quad_nodes == 0 {
            return Err(Error::InvalidConfig("max_quad_nodes must be positive".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            fd_step: 1e-5,
            max_quad_nodes: 4_000_000,
        }
    }
}
