//! Two-component linear-transport relaxation system.
//!
//! State `U = (u, v)` with flux `F = (v, u)` and source
//! `S = (0, -(v - g(u))/eps)`. As `eps -> 0` the system relaxes to the
//! scalar conservation law `u_t + g(u)_x = 0`.

use super::Model;
use crate::error::ModelError;
use crate::state::{Mat, StateVec};

/// Relaxation closure `v = g(u)` together with its derivative.
pub trait Relaxation: Send + Sync {
    fn g(&self, u: f64) -> f64;
    fn g_prime(&self, u: f64) -> f64;
}

/// Linear closure `g(u) = a*u`. The subcharacteristic condition requires
/// `|a| < 1`.
#[derive(Clone, Copy, Debug)]
pub struct LinearG {
    pub a: f64,
}

impl Relaxation for LinearG {
    fn g(&self, u: f64) -> f64 {
        self.a * u
    }

    fn g_prime(&self, _u: f64) -> f64 {
        self.a
    }
}

#[derive(Clone, Copy, Debug)]
pub struct XinJin<G: Relaxation = LinearG> {
    pub relax: G,
}

impl XinJin<LinearG> {
    pub fn linear(a: f64) -> Self {
        XinJin {
            relax: LinearG { a },
        }
    }
}

impl<G: Relaxation> XinJin<G> {
    pub fn new(relax: G) -> Self {
        XinJin { relax }
    }
}

impl<G: Relaxation> Model<2> for XinJin<G> {
    fn name(&self) -> &'static str {
        "xin_jin"
    }

    fn component_names(&self) -> [&'static str; 2] {
        ["u", "v"]
    }

    fn flux(&self, u: &StateVec<2>) -> Result<StateVec<2>, ModelError> {
        Ok(StateVec([u[1], u[0]]))
    }

    fn source(&self, u: &StateVec<2>, eps: f64) -> StateVec<2> {
        StateVec([0.0, -(u[1] - self.relax.g(u[0])) / eps])
    }

    fn source_jacobian(&self, u: &StateVec<2>, eps: f64) -> Mat<2> {
        Mat([[0.0, 0.0], [self.relax.g_prime(u[0]) / eps, -1.0 / eps]])
    }

    fn max_wavespeed(&self, _u: &StateVec<2>) -> Result<f64, ModelError> {
        // dF/dU = [[0,1],[1,0]] has eigenvalues +-1 for every state.
        Ok(1.0)
    }

    fn solve_implicit_source(
        &self,
        b: &StateVec<2>,
        dt: f64,
        eps: f64,
    ) -> Result<StateVec<2>, ModelError> {
        // v is linear in itself once u = b_u is fixed:
        //   v = g(b_u) + (b_v - g(b_u)) / (1 + dt/eps),
        // which tends to the equilibrium projection as dt/eps grows.
        let ge = self.relax.g(b[0]);
        let r = dt / eps;
        Ok(StateVec([b[0], ge + (b[1] - ge) / (1.0 + r)]))
    }

    fn equilibrium(&self, u: &StateVec<2>) -> StateVec<2> {
        StateVec([u[0], self.relax.g(u[0])])
    }

    fn relaxed_limit_flux(&self, reduced: &[f64]) -> Result<Vec<f64>, ModelError> {
        if reduced.len() != 1 {
            return Err(ModelError::RelaxedLimitDimension {
                expected: 1,
                got: reduced.len(),
            });
        }
        Ok(vec![self.relax.g(reduced[0])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_swaps_components() {
        let m = XinJin::linear(0.7);
        assert_eq!(m.flux(&StateVec([2.0, 1.0])).unwrap(), StateVec([1.0, 2.0]));
    }

    #[test]
    fn source_vanishes_on_equilibrium() {
        let m = XinJin::linear(0.7);
        let s = m.source(&StateVec([1.0, 0.7]), 0.3);
        assert_eq!(s, StateVec([0.0, 0.0]));
    }

    #[test]
    fn jacobian_linear_case() {
        let m = XinJin::linear(0.7);
        let j = m.source_jacobian(&StateVec([1.0, 0.0]), 1.0);
        assert_eq!(j, Mat([[0.0, 0.0], [0.7, -1.0]]));
    }

    #[test]
    fn stiff_solve_projects_onto_equilibrium() {
        let m = XinJin::linear(0.7);
        // dt/eps = 1e14 collapses v onto g(u).
        let u = m
            .solve_implicit_source(&StateVec([1.0, 0.0]), 1.0, 1e-14)
            .unwrap();
        assert!((u[1] - 0.7).abs() < 1e-13);
        assert_eq!(u[0], 1.0);
    }

    #[test]
    fn equilibrium_map() {
        let m = XinJin::linear(0.7);
        assert_eq!(m.equilibrium(&StateVec([2.0, 0.0])), StateVec([2.0, 1.4]));
    }

    #[test]
    fn relaxed_flux_is_g() {
        let m = XinJin::linear(0.7);
        assert_eq!(m.relaxed_limit_flux(&[2.0]).unwrap(), vec![1.4]);
        assert!(m.relaxed_limit_flux(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn flux_jacobian_eigenvalues_are_unit() {
        // Numerical dF/dU, then eigenvalues from trace/determinant.
        let m = XinJin::linear(0.3);
        for &(u, v) in &[(1.0, 0.2), (-0.5, 2.0), (3.0, -1.0)] {
            let s = StateVec([u, v]);
            let h = 1e-6;
            let mut a = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut up = s;
                let mut dn = s;
                up[j] += h;
                dn[j] -= h;
                let fp = m.flux(&up).unwrap();
                let fn_ = m.flux(&dn).unwrap();
                for i in 0..2 {
                    a[i][j] = (fp[i] - fn_[i]) / (2.0 * h);
                }
            }
            let tr = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let disc = (tr * tr / 4.0 - det).sqrt();
            let l1 = tr / 2.0 + disc;
            let l2 = tr / 2.0 - disc;
            assert!((l1 - 1.0).abs() < 1e-9 && (l2 + 1.0).abs() < 1e-9);
        }
    }
}
