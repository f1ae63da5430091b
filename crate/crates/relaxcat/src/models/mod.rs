//! Balance-law model definitions: flux, stiff source, Jacobians, wavespeeds,
//! equilibria, and the cell-local implicit solves every semi-implicit scheme
//! builds on.
//!
//! A model describes the system `U_t + F(U)_x = S(U, eps)` where the source
//! carries a stiffness parameter `eps`; `eps -> 0` drives the state onto the
//! equilibrium manifold `S(U, eps) = 0`.

mod broadwell;
mod euler_heat;
pub mod wrappers;
mod xin_jin;

pub use broadwell::Broadwell;
pub use euler_heat::EulerHeat;
pub use xin_jin::{LinearG, Relaxation, XinJin};

use crate::error::ModelError;
use crate::state::{solve_linear, Mat, StateVec};

/// A hyperbolic balance law with a (possibly stiff) relaxation source.
///
/// All operations are pure; implementations must be safe to evaluate
/// concurrently across cells.
pub trait Model<const D: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    fn component_names(&self) -> [&'static str; D];

    /// Physical flux `F(U)`. Fails on inadmissible states where the flux
    /// itself is undefined (e.g. vacuum).
    fn flux(&self, u: &StateVec<D>) -> Result<StateVec<D>, ModelError>;

    /// Source term `S(U, eps)`.
    fn source(&self, u: &StateVec<D>, eps: f64) -> StateVec<D>;

    /// Analytic Jacobian `dS/dU` at `u`.
    fn source_jacobian(&self, u: &StateVec<D>, eps: f64) -> Mat<D>;

    /// Spectral radius of `dF/dU` at `u`.
    fn max_wavespeed(&self, u: &StateVec<D>) -> Result<f64, ModelError>;

    /// Solve `U = b + dt * S(U, eps)` for `U`.
    ///
    /// The default runs damped Newton off the analytic Jacobian; concrete
    /// models override it with closed forms where the source structure
    /// permits one.
    fn solve_implicit_source(
        &self,
        b: &StateVec<D>,
        dt: f64,
        eps: f64,
    ) -> Result<StateVec<D>, ModelError> {
        newton_implicit_source(self, b, dt, eps)
    }

    /// Projection of `u` onto the equilibrium manifold; components without
    /// a source constraint are preserved.
    fn equilibrium(&self, u: &StateVec<D>) -> StateVec<D>;

    /// Index of the component whose positivity is physically required, if any.
    fn positivity_component(&self) -> Option<usize> {
        None
    }

    /// Whether a state is physically admissible.
    fn is_admissible(&self, u: &StateVec<D>) -> bool {
        let _ = u;
        true
    }

    /// Physical-admissibility check used by the a-posteriori detector.
    /// Defaults to positivity of the declared component; models with more
    /// structure (e.g. pressure) extend it.
    fn pad_admissible(&self, u: &StateVec<D>) -> bool {
        match self.positivity_component() {
            Some(c) => u[c] > 0.0,
            None => true,
        }
    }

    /// Flux of the `eps -> 0` limit system, acting on the reduced state.
    /// Only models with a closed relaxed limit provide one.
    fn relaxed_limit_flux(&self, reduced: &[f64]) -> Result<Vec<f64>, ModelError> {
        let _ = reduced;
        Err(ModelError::RelaxedLimitUnsupported { model: self.name() })
    }
}

/// Damped Newton for `U - b - dt*W*S(U) = 0`, starting from `b`; the
/// optional weight matrix serves source treatments that fold a Jacobian
/// correction into the solve.
///
/// Sources that are linear in their own components converge on the first
/// iteration, so this doubles as the exact solve for such models.
/// Termination is on the residual where it is measurable and on the
/// Newton increment where it is not: at stiffness `dt/eps >> 1` the
/// residual evaluation amplifies cancellation noise by `dt/eps` and can
/// sit far above any fixed tolerance while the iterate itself is already
/// exact to roundoff.
pub fn newton_weighted_source<M, const D: usize>(
    model: &M,
    b: &StateVec<D>,
    dt: f64,
    weight: Option<&Mat<D>>,
    eps: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let tol = 1e-13 * (1.0 + b.abs_max());
    let apply_weight = |v: StateVec<D>| match weight {
        Some(w) => w.matvec(&v),
        None => v,
    };
    let residual = |u: &StateVec<D>| *u - *b - dt * apply_weight(model.source(u, eps));

    let mut u = *b;
    for _ in 0..50 {
        let r = residual(&u);
        let r_norm = r.abs_max();
        if r_norm <= tol {
            return Ok(u);
        }
        let js = match weight {
            Some(w) => w.matmul(&model.source_jacobian(&u, eps)),
            None => model.source_jacobian(&u, eps),
        };
        let jac = Mat::identity().add(&js.scale(-dt));
        let delta = solve_linear(&jac, &r).ok_or(ModelError::SingularImplicitSystem)?;
        if delta.abs_max() <= 1e-12 * (1.0 + u.abs_max()) {
            return Ok(u - delta);
        }
        // Backtracking on the residual norm, full step first.
        let mut lambda = 1.0;
        let mut trial = u - delta;
        let mut r_trial = residual(&trial).abs_max();
        while r_trial >= r_norm && lambda > 1e-8 {
            lambda *= 0.5;
            trial = u - lambda * delta;
            r_trial = residual(&trial).abs_max();
        }
        u = trial;
    }
    let r_final = residual(&u).abs_max();
    if r_final <= tol {
        Ok(u)
    } else {
        Err(ModelError::StiffSolveFailed {
            residual: r_final,
            iterations: 50,
        })
    }
}

/// Damped Newton for the unweighted relation `U = b + dt*S(U, eps)`.
pub fn newton_implicit_source<M, const D: usize>(
    model: &M,
    b: &StateVec<D>,
    dt: f64,
    eps: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    newton_weighted_source(model, b, dt, None, eps)
}

/// Central finite-difference Jacobian of the source; the independent check
/// the analytic Jacobians are validated against.
pub fn fd_source_jacobian<M, const D: usize>(model: &M, u: &StateVec<D>, eps: f64) -> Mat<D>
where
    M: Model<D> + ?Sized,
{
    let mut jac = Mat::ZERO;
    for j in 0..D {
        let h = 1e-6 * (1.0 + u[j].abs());
        let mut up = *u;
        let mut dn = *u;
        up[j] += h;
        dn[j] -= h;
        let sp = model.source(&up, eps);
        let sn = model.source(&dn, eps);
        for i in 0..D {
            jac.0[i][j] = (sp[i] - sn[i]) / (2.0 * h);
        }
    }
    jac
}
