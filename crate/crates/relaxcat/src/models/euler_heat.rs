//! Compressible gas dynamics with relaxation of temperature toward a
//! thermal bath.
//!
//! Conserved state `U = (rho, m, rhoE)` with a gamma-law pressure
//! `p = (gamma-1)*rho*e` and the energy sink `-K*rho*(T - T0)`. The
//! temperature follows from `e = R*T/(gamma-1)`. The coupling constant
//! defaults to `K = 1/eps` so the source carries the same stiffness
//! convention as the other models; a fixed `K` can be set instead.

use super::Model;
use crate::error::ModelError;
use crate::state::{Mat, StateVec};

#[derive(Clone, Copy, Debug)]
pub struct EulerHeat {
    pub gamma: f64,
    /// Specific gas constant.
    pub r_gas: f64,
    /// Bath temperature the energy relaxes toward.
    pub t_bath: f64,
    /// Fixed coupling constant; `None` means `K = 1/eps`.
    pub k_fixed: Option<f64>,
}

impl Default for EulerHeat {
    fn default() -> Self {
        EulerHeat {
            gamma: 1.4,
            r_gas: 1.0,
            t_bath: 1.0,
            k_fixed: None,
        }
    }
}

impl EulerHeat {
    fn coupling(&self, eps: f64) -> f64 {
        self.k_fixed.unwrap_or(1.0 / eps)
    }

    /// Internal energy per unit mass.
    pub fn internal_energy(&self, u: &StateVec<3>) -> f64 {
        (u[2] - u[1] * u[1] / (2.0 * u[0])) / u[0]
    }

    pub fn pressure(&self, u: &StateVec<3>) -> f64 {
        (self.gamma - 1.0) * u[0] * self.internal_energy(u)
    }

    pub fn temperature(&self, u: &StateVec<3>) -> f64 {
        (self.gamma - 1.0) * self.internal_energy(u) / self.r_gas
    }

    /// Total energy density of a state with primitive (rho, velocity, p).
    pub fn total_energy(&self, rho: f64, vel: f64, p: f64) -> f64 {
        p / (self.gamma - 1.0) + 0.5 * rho * vel * vel
    }

    fn check_admissible(&self, u: &StateVec<3>) -> Result<(), ModelError> {
        if !(u[0] > 0.0) {
            return Err(ModelError::Inadmissible {
                model: self.name(),
                what: format!("density must be positive (rho = {})", u[0]),
            });
        }
        let p = self.pressure(u);
        if !(p > 0.0) {
            return Err(ModelError::Inadmissible {
                model: self.name(),
                what: format!("pressure must be positive (p = {p})"),
            });
        }
        Ok(())
    }
}

impl Model<3> for EulerHeat {
    fn name(&self) -> &'static str {
        "euler_heat"
    }

    fn component_names(&self) -> [&'static str; 3] {
        ["rho", "m", "rhoE"]
    }

    fn flux(&self, u: &StateVec<3>) -> Result<StateVec<3>, ModelError> {
        self.check_admissible(u)?;
        let vel = u[1] / u[0];
        let p = self.pressure(u);
        Ok(StateVec([u[1], u[1] * vel + p, vel * (u[2] + p)]))
    }

    fn source(&self, u: &StateVec<3>, eps: f64) -> StateVec<3> {
        let k = self.coupling(eps);
        StateVec([0.0, 0.0, -k * u[0] * (self.temperature(u) - self.t_bath)])
    }

    fn source_jacobian(&self, u: &StateVec<3>, eps: f64) -> Mat<3> {
        // s = -K*(gamma-1)/R * (rhoE - m^2/(2 rho)) + K*rho*T0
        let k = self.coupling(eps);
        let c = k * (self.gamma - 1.0) / self.r_gas;
        let (rho, m) = (u[0], u[1]);
        Mat([
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [
                -c * m * m / (2.0 * rho * rho) + k * self.t_bath,
                c * m / rho,
                -c,
            ],
        ])
    }

    fn max_wavespeed(&self, u: &StateVec<3>) -> Result<f64, ModelError> {
        self.check_admissible(u)?;
        let vel = u[1] / u[0];
        let p = self.pressure(u);
        Ok(vel.abs() + (self.gamma * p / u[0]).sqrt())
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<3>,
        dt: f64,
        eps: f64,
    ) -> Result<StateVec<3>, ModelError> {
        if !(b[0] > 0.0) {
            return Err(ModelError::Inadmissible {
                model: self.name(),
                what: format!("density must be positive (rho = {})", b[0]),
            });
        }
        // rhoE is linear in itself once rho and m are fixed.
        let a = dt * self.coupling(eps) * (self.gamma - 1.0) / self.r_gas;
        let eq = self.equilibrium(b);
        Ok(StateVec([b[0], b[1], eq[2] + (b[2] - eq[2]) / (1.0 + a)]))
    }

    fn equilibrium(&self, u: &StateVec<3>) -> StateVec<3> {
        // T = T0, i.e. e = R*T0/(gamma-1), kinetic part preserved.
        let (rho, m) = (u[0], u[1]);
        let re = rho * self.r_gas * self.t_bath / (self.gamma - 1.0) + m * m / (2.0 * rho);
        StateVec([rho, m, re])
    }

    fn positivity_component(&self) -> Option<usize> {
        Some(0)
    }

    fn is_admissible(&self, u: &StateVec<3>) -> bool {
        u[0] > 0.0 && self.pressure(u) > 0.0
    }

    fn pad_admissible(&self, u: &StateVec<3>) -> bool {
        // Negative pressure makes the sound speed undefined, so the
        // physical detector also screens it.
        self.is_admissible(u)
    }
}
