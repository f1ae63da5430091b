//! Model adapters used by reduction tests and the amplification analysis:
//! switch off the source (pure conservation law) or the flux (pure ODE),
//! and a scalar linear-decay law for amplification-factor checks.

use super::Model;
use crate::error::ModelError;
use crate::state::{Mat, StateVec};

/// Same flux as the inner model, identically zero source. Semi-implicit
/// steppers reduce to their fully explicit form on this wrapper.
#[derive(Clone, Copy, Debug)]
pub struct ZeroSource<M>(pub M);

impl<M: Model<D>, const D: usize> Model<D> for ZeroSource<M> {
    fn name(&self) -> &'static str {
        "zero_source"
    }

    fn component_names(&self) -> [&'static str; D] {
        self.0.component_names()
    }

    fn flux(&self, u: &StateVec<D>) -> Result<StateVec<D>, ModelError> {
        self.0.flux(u)
    }

    fn source(&self, _u: &StateVec<D>, _eps: f64) -> StateVec<D> {
        StateVec::ZERO
    }

    fn source_jacobian(&self, _u: &StateVec<D>, _eps: f64) -> Mat<D> {
        Mat::ZERO
    }

    fn max_wavespeed(&self, u: &StateVec<D>) -> Result<f64, ModelError> {
        self.0.max_wavespeed(u)
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<D>,
        _dt: f64,
        _eps: f64,
    ) -> Result<StateVec<D>, ModelError> {
        Ok(*b)
    }

    fn equilibrium(&self, u: &StateVec<D>) -> StateVec<D> {
        *u
    }

    fn positivity_component(&self) -> Option<usize> {
        self.0.positivity_component()
    }

    fn is_admissible(&self, u: &StateVec<D>) -> bool {
        self.0.is_admissible(u)
    }

    fn pad_admissible(&self, u: &StateVec<D>) -> bool {
        self.0.pad_admissible(u)
    }
}

/// Same source as the inner model, identically zero flux. Turns any
/// stepper into a pure ODE integrator so amplification factors can be
/// read off directly.
#[derive(Clone, Copy, Debug)]
pub struct ZeroFlux<M>(pub M);

impl<M: Model<D>, const D: usize> Model<D> for ZeroFlux<M> {
    fn name(&self) -> &'static str {
        "zero_flux"
    }

    fn component_names(&self) -> [&'static str; D] {
        self.0.component_names()
    }

    fn flux(&self, _u: &StateVec<D>) -> Result<StateVec<D>, ModelError> {
        Ok(StateVec::ZERO)
    }

    fn source(&self, u: &StateVec<D>, eps: f64) -> StateVec<D> {
        self.0.source(u, eps)
    }

    fn source_jacobian(&self, u: &StateVec<D>, eps: f64) -> Mat<D> {
        self.0.source_jacobian(u, eps)
    }

    fn max_wavespeed(&self, _u: &StateVec<D>) -> Result<f64, ModelError> {
        Ok(0.0)
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<D>,
        dt: f64,
        eps: f64,
    ) -> Result<StateVec<D>, ModelError> {
        self.0.solve_implicit_source(b, dt, eps)
    }

    fn equilibrium(&self, u: &StateVec<D>) -> StateVec<D> {
        self.0.equilibrium(u)
    }

    fn positivity_component(&self) -> Option<usize> {
        self.0.positivity_component()
    }

    fn is_admissible(&self, u: &StateVec<D>) -> bool {
        self.0.is_admissible(u)
    }

    fn pad_admissible(&self, u: &StateVec<D>) -> bool {
        self.0.pad_admissible(u)
    }
}

/// Scalar law `u_t + u_x = lambda*u`. The stiffness parameter of the
/// `Model` interface is ignored; `lambda` is held in the struct.
#[derive(Clone, Copy, Debug)]
pub struct LinearDecay {
    pub lambda: f64,
}

impl Model<1> for LinearDecay {
    fn name(&self) -> &'static str {
        "linear_decay"
    }

    fn component_names(&self) -> [&'static str; 1] {
        ["u"]
    }

    fn flux(&self, u: &StateVec<1>) -> Result<StateVec<1>, ModelError> {
        Ok(*u)
    }

    fn source(&self, u: &StateVec<1>, _eps: f64) -> StateVec<1> {
        StateVec([self.lambda * u[0]])
    }

    fn source_jacobian(&self, _u: &StateVec<1>, _eps: f64) -> Mat<1> {
        Mat([[self.lambda]])
    }

    fn max_wavespeed(&self, _u: &StateVec<1>) -> Result<f64, ModelError> {
        Ok(1.0)
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<1>,
        dt: f64,
        _eps: f64,
    ) -> Result<StateVec<1>, ModelError> {
        let denom = 1.0 - dt * self.lambda;
        if denom.abs() < 1e-300 {
            return Err(ModelError::SingularImplicitSystem);
        }
        Ok(StateVec([b[0] / denom]))
    }

    fn equilibrium(&self, _u: &StateVec<1>) -> StateVec<1> {
        StateVec([0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::XinJin;

    #[test]
    fn zero_source_solve_is_identity() {
        let m = ZeroSource(XinJin::linear(0.7));
        let b = StateVec([1.0, -3.0]);
        assert_eq!(m.solve_implicit_source(&b, 5.0, 1e-12).unwrap(), b);
        assert_eq!(m.source(&b, 1e-12), StateVec::ZERO);
    }

    #[test]
    fn zero_flux_keeps_source() {
        let m = ZeroFlux(XinJin::linear(0.7));
        let u = StateVec([1.0, 0.0]);
        assert_eq!(m.flux(&u).unwrap(), StateVec::ZERO);
        assert_eq!(m.source(&u, 1.0), StateVec([0.0, 0.7]));
    }

    #[test]
    fn linear_decay_implicit_euler() {
        let m = LinearDecay { lambda: -2.0 };
        let u = m.solve_implicit_source(&StateVec([1.0]), 0.5, 1.0).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
    }
}
