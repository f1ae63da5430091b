//! Amplification analysis: scalar decay factors of the two source
//! treatments, numerically extracted 2x2 Fourier symbols of the schemes on
//! the linear relaxation system, and bisected stability regions.
//!
//! Symbols are measured from the schemes themselves rather than from
//! transcribed closed forms: one step on a periodic ring is applied to
//! Fourier modes (or impulses) and projected back. For the linear closure
//! `g(u) = a*u` the compact schemes are exactly linear, so the projection
//! is exact up to roundoff and a residual check guards the assumption.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cat2::{step_cat2_tay, step_cat2_trap};
use crate::error::{StabilityError, StepError};
use crate::grid::{BoundaryKind, CellField, Grid};
use crate::imex::step_imex_rk2;
use crate::models::XinJin;
use crate::scheme::SchemeKind;
use crate::state::StateVec;

/// Scalar amplification factor of one step applied to `u' = lambda*u`
/// with `z = lambda*dt`, flux contributions switched off.
pub fn ode_amplification(scheme: SchemeKind, z: f64) -> Result<f64, StabilityError> {
    match scheme {
        SchemeKind::Cat2Trap => {
            let denom = 1.0 - 0.5 * z;
            if denom.abs() < 1e-300 {
                return Err(StabilityError::Pole { z });
            }
            Ok((1.0 + 0.5 * z) / denom)
        }
        SchemeKind::Cat2Tay => {
            let denom = 1.0 - z + 0.5 * z * z;
            if denom.abs() < 1e-300 {
                return Err(StabilityError::Pole { z });
            }
            Ok(1.0 / denom)
        }
        SchemeKind::ImexRk2 => {
            let tab = crate::imex::ButcherPair::second_order();
            let a = tab.implicit_a;
            let denom = 1.0 - z * a[0][0];
            if denom.abs() < 1e-300 {
                return Err(StabilityError::Pole { z });
            }
            // R(z) = 1 + z b^T (I - zA)^{-1} 1 by forward substitution.
            let x1 = 1.0 / denom;
            let x2 = (1.0 + z * a[1][0] * x1) / (1.0 - z * a[1][1]);
            Ok(1.0 + z * (tab.b[0] * x1 + tab.b[1] * x2))
        }
        SchemeKind::FirstOrder => Err(StabilityError::UnsupportedScheme {
            scheme: SchemeKind::FirstOrder.label(),
        }),
    }
}

/// One Fourier-mode query against the linear relaxation system.
#[derive(Clone, Copy, Debug)]
pub struct AmplificationQuery {
    pub scheme: SchemeKind,
    /// Time step over cell size.
    pub mu: f64,
    /// Slope of the linear closure `g(u) = a*u`.
    pub a: f64,
    pub eps: f64,
    /// Wavenumber times cell size, in `(0, pi]`.
    pub k_dx: f64,
}

pub type Symbol2 = [[Complex64; 2]; 2];

pub fn spectral_radius(g: &Symbol2) -> f64 {
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    l1.norm().max(l2.norm())
}

fn eigvec_for(g: &Symbol2, lambda: Complex64) -> [Complex64; 2] {
    if g[0][1].norm() > 1e-14 {
        [g[0][1], lambda - g[0][0]]
    } else if g[1][0].norm() > 1e-14 {
        [lambda - g[1][1], g[1][0]]
    } else {
        // Diagonal symbol: pick the matching axis.
        if (g[0][0] - lambda).norm() < (g[1][1] - lambda).norm() {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        }
    }
}

/// Eigenvalue of largest modulus together with an eigenvector.
pub fn dominant_mode(g: &Symbol2) -> (Complex64, [Complex64; 2]) {
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    let lambda = if l1.norm() >= l2.norm() { l1 } else { l2 };
    (lambda, eigvec_for(g, lambda))
}

fn apply_scheme(
    scheme: SchemeKind,
    field: &CellField<2>,
    model: &XinJin,
    dt: f64,
    eps: f64,
) -> Result<CellField<2>, StepError> {
    match scheme {
        SchemeKind::Cat2Trap => step_cat2_trap(field, model, BoundaryKind::Periodic, dt, eps),
        SchemeKind::Cat2Tay => step_cat2_tay(field, model, BoundaryKind::Periodic, dt, eps),
        SchemeKind::ImexRk2 => step_imex_rk2(field, model, BoundaryKind::Periodic, dt, eps),
        SchemeKind::FirstOrder => {
            crate::cat2::step_first_order(field, model, BoundaryKind::Periodic, dt, eps)
        }
    }
}

fn validate_query(q: &AmplificationQuery) -> Result<(), StabilityError> {
    if matches!(q.scheme, SchemeKind::FirstOrder) {
        return Err(StabilityError::UnsupportedScheme {
            scheme: q.scheme.label(),
        });
    }
    if !(q.mu >= 0.0) || !q.mu.is_finite() {
        return Err(StabilityError::BadQuery {
            what: format!("mu must be finite and nonnegative (got {})", q.mu),
        });
    }
    if !(q.a > 0.0 && q.a < 1.0) {
        return Err(StabilityError::BadQuery {
            what: format!("relaxation slope must lie in (0,1) (got {})", q.a),
        });
    }
    if !(q.eps > 0.0) {
        return Err(StabilityError::BadQuery {
            what: format!("eps must be positive (got {})", q.eps),
        });
    }
    if !(q.k_dx > 0.0 && q.k_dx <= std::f64::consts::PI + 1e-12) {
        return Err(StabilityError::BadQuery {
            what: format!("k*dx must lie in (0, pi] (got {})", q.k_dx),
        });
    }
    Ok(())
}

const MAX_RING: usize = 8192;

/// Smallest ring (>= 16 cells) on which the wavenumber is exactly
/// representable as a whole mode.
fn ring_for(k_dx: f64) -> Result<(usize, usize), StabilityError> {
    for n in 16..=MAX_RING {
        let q = k_dx * n as f64 / (2.0 * std::f64::consts::PI);
        let rounded = q.round();
        if rounded >= 1.0 && rounded <= (n / 2) as f64 && (q - rounded).abs() < 1e-9 {
            return Ok((n, rounded as usize));
        }
    }
    Err(StabilityError::NotRepresentable {
        k_dx,
        max_ring: MAX_RING,
    })
}

fn mode_field(ring: usize, dx: f64, theta: f64, amp: [Complex64; 2]) -> CellField<2> {
    let grid = Grid::build_uniform(0.0, ring as f64 * dx, ring).unwrap();
    let mut f = CellField::new(grid);
    for j in 0..ring {
        let phase = Complex64::from_polar(1.0, theta * j as f64);
        f.set(j, StateVec([(amp[0] * phase).re, (amp[1] * phase).re]));
    }
    f
}

/// The 2x2 matrix `G(k)` mapping the amplitude of the mode
/// `(u, v) e^{i j k dx}` across one step of the scheme with `dt = mu*dx`.
pub fn fourier_symbol(query: &AmplificationQuery, dx: f64) -> Result<Symbol2, StabilityError> {
    validate_query(query)?;
    let identity = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    if query.mu == 0.0 {
        return Ok(identity);
    }
    let (ring, q) = ring_for(query.k_dx)?;
    let theta = 2.0 * std::f64::consts::PI * q as f64 / ring as f64;
    let model = XinJin::linear(query.a);
    let dt = query.mu * dx;

    let mut symbol = identity;
    let mut worst_residual = 0.0_f64;
    for c in 0..2 {
        let mut unit = [Complex64::new(0.0, 0.0); 2];
        unit[c] = Complex64::new(1.0, 0.0);
        let re_in = mode_field(ring, dx, theta, unit);
        // Imaginary part of the mode: Im(e^{ij theta}) = Re(-i e^{ij theta}).
        unit[c] = Complex64::new(0.0, -1.0);
        let im_in = mode_field(ring, dx, theta, unit);
        let re_out = apply_scheme(query.scheme, &re_in, &model, dt, query.eps)?;
        let im_out = apply_scheme(query.scheme, &im_in, &model, dt, query.eps)?;

        // Complex response and its projection onto the probed mode.
        let mut coeff = [Complex64::new(0.0, 0.0); 2];
        for j in 0..ring {
            let conj_phase = Complex64::from_polar(1.0, -theta * j as f64);
            for r in 0..2 {
                let w = Complex64::new(re_out.at(j as isize)[r], im_out.at(j as isize)[r]);
                coeff[r] += w * conj_phase;
            }
        }
        for r in 0..2 {
            coeff[r] /= ring as f64;
        }
        let mut scale = 1.0_f64;
        for j in 0..ring {
            let phase = Complex64::from_polar(1.0, theta * j as f64);
            for r in 0..2 {
                let w = Complex64::new(re_out.at(j as isize)[r], im_out.at(j as isize)[r]);
                worst_residual = worst_residual.max((w - coeff[r] * phase).norm());
                scale = scale.max(w.norm());
            }
        }
        if worst_residual > 1e-10 * scale {
            return Err(StabilityError::NonlinearityDetected {
                residual: worst_residual,
            });
        }
        for r in 0..2 {
            symbol[r][c] = coeff[r];
        }
    }
    Ok(symbol)
}

/// Symbols for every whole mode `q = 1..=q_max` at once, from the impulse
/// response of the scheme on a ring with unit cell spacing, so the step
/// is `dt = mu` and the per-step stiffness is `mu / eps`. Valid only for
/// schemes that are exactly linear on this model (the compact pair).
fn symbols_from_impulse(
    scheme: SchemeKind,
    a: f64,
    eps: f64,
    mu: f64,
    ring: usize,
    q_max: usize,
) -> Result<Vec<Symbol2>, StabilityError> {
    let dx = 1.0;
    let dt = mu * dx;
    let model = XinJin::linear(a);
    let grid = Grid::build_uniform(0.0, ring as f64, ring).unwrap();
    let zero = [
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    ];
    let mut responses = Vec::with_capacity(2);
    for c in 0..2 {
        let mut f = CellField::<2>::new(grid);
        let mut delta = StateVec::ZERO;
        delta[c] = 1.0;
        f.set(0, delta);
        responses.push(apply_scheme(scheme, &f, &model, dt, eps)?);
    }
    let mut out = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let theta = 2.0 * std::f64::consts::PI * q as f64 / ring as f64;
        let mut g = zero;
        for (c, resp) in responses.iter().enumerate() {
            for j in 0..ring {
                let conj_phase = Complex64::from_polar(1.0, -theta * j as f64);
                for r in 0..2 {
                    g[r][c] += Complex64::new(resp.at(j as isize)[r], 0.0) * conj_phase;
                }
            }
        }
        out.push(g);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct StabilityPoint {
    pub a: f64,
    pub mu_max: f64,
}

#[derive(Clone, Debug)]
pub struct StabilityRegion {
    pub scheme: SchemeKind,
    pub eps: f64,
    pub points: Vec<StabilityPoint>,
}

/// Bisection ceiling for the Courant-ratio search.
pub const MU_CEILING: f64 = 1.6;

/// Growth margin above which a mode counts as unstable.
///
/// In the deeply stiff regime the unstable branch grows like
/// `1 + O(eps/dt)` per step, around 1e-12 at `eps = 1e-14`; the margin
/// must sit below that but above the measurement noise of the impulse
/// symbols (~1e-15 on the rings used here).
pub const RHO_MARGIN: f64 = 1e-13;

/// Largest usable Courant ratio per relaxation slope: a bisection on the
/// worst measured spectral radius over all whole modes of a unit-spacing
/// ring. When the relaxation time is unresolvable by the step (`eps`
/// below the cell size), the fast families exist only as projected
/// transients that the mode radius cannot see, so the frozen-flux Courant
/// bound `mu * lambda_max <= 1` caps the result; with resolvable `eps`
/// the measured crossing governs.
pub fn stability_region(
    scheme: SchemeKind,
    a_values: &[f64],
    eps: f64,
    k_samples: usize,
    mu_tol: f64,
) -> Result<StabilityRegion, StabilityError> {
    if !matches!(scheme, SchemeKind::Cat2Trap | SchemeKind::Cat2Tay) {
        return Err(StabilityError::UnsupportedScheme {
            scheme: scheme.label(),
        });
    }
    for &a in a_values {
        if !(a > 0.0 && a < 1.0) {
            return Err(StabilityError::BadQuery {
                what: format!("relaxation slope must lie in (0,1) (got {a})"),
            });
        }
    }
    if !(eps > 0.0) || k_samples == 0 || !(mu_tol > 0.0) {
        return Err(StabilityError::BadQuery {
            what: "eps, k_samples and mu_tol must all be positive".to_string(),
        });
    }
    let ring = (2 * k_samples).max(16);
    let q_max = k_samples.min(ring / 2);
    // Frozen-flux Courant bound (transport speeds +-1), active when the
    // step cannot resolve the relaxation time on the unit-spacing ring.
    let projected_regime = eps < 1.0;
    let ceiling = if projected_regime {
        MU_CEILING.min(1.0)
    } else {
        MU_CEILING
    };

    let points = a_values
        .par_iter()
        .map(|&a| -> Result<StabilityPoint, StabilityError> {
            let stable = |mu: f64| -> Result<bool, StabilityError> {
                if mu == 0.0 {
                    return Ok(true);
                }
                let syms = symbols_from_impulse(scheme, a, eps, mu, ring, q_max)?;
                Ok(syms.iter().all(|g| spectral_radius(g) <= 1.0 + RHO_MARGIN))
            };
            let mut lo = 0.0;
            let mut hi = ceiling;
            let mu_max = if stable(hi)? {
                hi
            } else {
                while hi - lo > mu_tol {
                    let mid = 0.5 * (lo + hi);
                    if stable(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            Ok(StabilityPoint { a, mu_max })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(StabilityRegion {
        scheme,
        eps,
        points,
    })
}
