//! Three-velocity discrete kinetic model.
//!
//! Conserved state `U = (rho, m, z)` with `m = rho*v`, flux `F = (m, z, m)`
//! and source `S = (0, 0, (rho^2 + m^2 - 2*rho*z) / (2*eps))`. The
//! equilibrium closure is `z = (rho + rho*v^2)/2 = (rho^2 + m^2)/(2*rho)`,
//! and the `eps -> 0` limit is the 2x2 system
//! `rho_t + m_x = 0`, `m_t + ((rho + rho v^2)/2)_x = 0`.

use super::Model;
use crate::error::ModelError;
use crate::state::{Mat, StateVec};

#[derive(Clone, Copy, Debug, Default)]
pub struct Broadwell;

impl Broadwell {
    fn check_admissible(&self, u: &StateVec<3>) -> Result<(), ModelError> {
        if !(u[0] > 0.0) {
            return Err(ModelError::Inadmissible {
                model: self.name(),
                what: format!("density must be positive (rho = {})", u[0]),
            });
        }
        Ok(())
    }

    /// Equilibrium value of the auxiliary variable given density and momentum.
    pub fn z_equilibrium(rho: f64, m: f64) -> f64 {
        (rho * rho + m * m) / (2.0 * rho)
    }
}

impl Model<3> for Broadwell {
    fn name(&self) -> &'static str {
        "broadwell"
    }

    fn component_names(&self) -> [&'static str; 3] {
        ["rho", "m", "z"]
    }

    fn flux(&self, u: &StateVec<3>) -> Result<StateVec<3>, ModelError> {
        Ok(StateVec([u[1], u[2], u[1]]))
    }

    fn source(&self, u: &StateVec<3>, eps: f64) -> StateVec<3> {
        let (rho, m, z) = (u[0], u[1], u[2]);
        StateVec([0.0, 0.0, (rho * rho + m * m - 2.0 * rho * z) / (2.0 * eps)])
    }

    fn source_jacobian(&self, u: &StateVec<3>, eps: f64) -> Mat<3> {
        let (rho, m, z) = (u[0], u[1], u[2]);
        Mat([
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [(rho - z) / eps, m / eps, -rho / eps],
        ])
    }

    fn max_wavespeed(&self, _u: &StateVec<3>) -> Result<f64, ModelError> {
        // dF/dU is constant with eigenvalues {-1, 0, 1}.
        Ok(1.0)
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<3>,
        dt: f64,
        eps: f64,
    ) -> Result<StateVec<3>, ModelError> {
        self.check_admissible(b)?;
        let (rho, m) = (b[0], b[1]);
        let z_eq = Self::z_equilibrium(rho, m);
        let r = dt * rho / eps;
        Ok(StateVec([rho, m, z_eq + (b[2] - z_eq) / (1.0 + r)]))
    }

    fn equilibrium(&self, u: &StateVec<3>) -> StateVec<3> {
        StateVec([u[0], u[1], Self::z_equilibrium(u[0], u[1])])
    }

    fn positivity_component(&self) -> Option<usize> {
        Some(0)
    }

    fn is_admissible(&self, u: &StateVec<3>) -> bool {
        u[0] > 0.0
    }

    fn relaxed_limit_flux(&self, reduced: &[f64]) -> Result<Vec<f64>, ModelError> {
        if reduced.len() != 2 {
            return Err(ModelError::RelaxedLimitDimension {
                expected: 2,
                got: reduced.len(),
            });
        }
        let (rho, m) = (reduced[0], reduced[1]);
        if !(rho > 0.0) {
            return Err(ModelError::Inadmissible {
                model: self.name(),
                what: format!("density must be positive (rho = {rho})"),
            });
        }
        Ok(vec![m, Self::z_equilibrium(rho, m)])
    }
}
