//! Two-stage second-order semi-implicit Runge-Kutta comparison scheme on
//! the doubled system `U_E' = K(U_E, U_I)`, `U_I' = K(U_E, U_I)` with
//! `K(U_E, U_I) = -DxF(U_E) + S(U_I, eps)`: the hyperbolic part is
//! reconstructed with limited slopes and dissipative two-point fluxes and
//! treated explicitly, the stiff source implicitly.

use crate::error::StepError;
use crate::grid::{BoundaryKind, CellField};
use crate::models::Model;
use crate::state::StateVec;

/// The double tableau of the scheme: an explicit and an implicit half
/// sharing the weights `b = (1-gamma, gamma)` with `gamma = 1 - 1/sqrt(2)`
/// and `c = 1/(2 gamma)`. The implicit half is stiffly accurate (its last
/// row equals `b`), which gives the correct stiff limit.
#[derive(Clone, Copy, Debug)]
pub struct ButcherPair {
    pub explicit_a: [[f64; 2]; 2],
    pub explicit_c: [f64; 2],
    pub implicit_a: [[f64; 2]; 2],
    pub implicit_c: [f64; 2],
    pub b: [f64; 2],
}

impl ButcherPair {
    pub fn second_order() -> Self {
        let gamma = 1.0 - 1.0 / 2f64.sqrt();
        let c = 1.0 / (2.0 * gamma);
        ButcherPair {
            explicit_a: [[0.0, 0.0], [c, 0.0]],
            explicit_c: [0.0, c],
            implicit_a: [[gamma, 0.0], [1.0 - gamma, gamma]],
            implicit_c: [gamma, 1.0],
            b: [1.0 - gamma, gamma],
        }
    }

    pub fn gamma(&self) -> f64 {
        self.implicit_a[0][0]
    }

    /// Off-diagonal weight of the explicit half.
    pub fn stage_weight(&self) -> f64 {
        self.explicit_a[1][0]
    }
}

/// Slope limiter: zero across sign changes, otherwise the smaller
/// magnitude.
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

/// Piecewise-linear interface states `(U^-, U^+)` per interface
/// `k = 0..=n`, built from componentwise limited slopes. Interfaces whose
/// reconstructed states leave the admissible set fall back to the cell
/// averages.
pub fn muscl_interface_states<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
) -> Vec<(StateVec<D>, StateVec<D>)>
where
    M: Model<D> + ?Sized,
{
    let n = field.n_cells();
    // Half-slopes for cells -1..=n, each used by two interfaces.
    let mut half_slopes = Vec::with_capacity(n + 2);
    for j in -1..=n as isize {
        let (um, u0, up) = (field.at(j - 1), field.at(j), field.at(j + 1));
        let mut s = StateVec::ZERO;
        for c in 0..D {
            s[c] = 0.5 * minmod(u0[c] - um[c], up[c] - u0[c]);
        }
        half_slopes.push(s);
    }
    let mut states = Vec::with_capacity(n + 1);
    for k in 0..=n as isize {
        let (ul, ur) = (field.at(k - 1), field.at(k));
        let minus = ul + half_slopes[k as usize];
        let plus = ur - half_slopes[(k + 1) as usize];
        if model.is_admissible(&minus) && model.is_admissible(&plus) {
            states.push((minus, plus));
        } else {
            states.push((ul, ur));
        }
    }
    states
}

/// `-DxF` per interior cell from the reconstructed dissipative fluxes.
/// Evaluation failures leave NaN entries.
pub fn spatial_operator<M, const D: usize>(field: &CellField<D>, model: &M) -> Vec<StateVec<D>>
where
    M: Model<D> + ?Sized,
{
    let n = field.n_cells();
    let dx = field.grid.dx;
    let states = muscl_interface_states(field, model);
    let mut flux = Vec::with_capacity(n + 1);
    for (minus, plus) in &states {
        flux.push(
            crate::cat2::rusanov_flux(model, minus, plus).unwrap_or_else(|_| StateVec::nan()),
        );
    }
    (0..n)
        .map(|i| (flux[i] - flux[i + 1]) * (1.0 / dx))
        .collect()
}

/// One step of the two-stage semi-implicit scheme. Each implicit stage is
/// cell local: the hyperbolic argument is the already known explicit
/// stage value, so only the source is solved for.
pub fn step_imex_rk2<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<CellField<D>, StepError>
where
    M: Model<D> + ?Sized,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StepError::NonPositiveDt { dt });
    }
    let tab = ButcherPair::second_order();
    let gamma = tab.gamma();
    let cw = tab.stage_weight();
    let n = field.n_cells();

    let mut work = field.clone();
    work.apply_boundary(boundary);

    // Stage 1: U_E = U^n; solve U_I = U^n + gamma dt (-DxF(U^n) + S(U_I)).
    let l1 = spatial_operator(&work, model);
    let mut fault: Option<StepError> = None;
    let mut k1 = vec![StateVec::<D>::ZERO; n];
    for i in 0..n {
        let b = work.at(i as isize) + (gamma * dt) * l1[i];
        if !b.is_finite() {
            k1[i] = StateVec::nan();
            continue;
        }
        match model.solve_implicit_source(&b, gamma * dt, eps) {
            Ok(u) => {
                // Backed-out stage source; exact and free of 1/eps noise.
                let s1 = (u - b) * (1.0 / (gamma * dt));
                k1[i] = l1[i] + s1;
            }
            Err(e) => {
                k1[i] = StateVec::nan();
                if fault.is_none() {
                    fault = Some(StepError::AtCell { cell: i, source: e });
                }
            }
        }
    }

    // Stage 2 explicit value, then the stiffly accurate implicit stage
    // which is also the update.
    let mut ue2 = CellField::new(work.grid);
    ue2.time = work.time;
    for i in 0..n {
        ue2.set(i, work.at(i as isize) + (cw * dt) * k1[i]);
    }
    ue2.apply_boundary(boundary);
    let l2 = spatial_operator(&ue2, model);

    let mut out = CellField::new(work.grid);
    out.time = field.time + dt;
    for i in 0..n {
        let b = work.at(i as isize) + ((1.0 - gamma) * dt) * k1[i] + (gamma * dt) * l2[i];
        if !b.is_finite() {
            out.set(i, StateVec::nan());
            continue;
        }
        match model.solve_implicit_source(&b, gamma * dt, eps) {
            Ok(u) => out.set(i, u),
            Err(e) => {
                out.set(i, StateVec::nan());
                if fault.is_none() {
                    fault = Some(StepError::AtCell { cell: i, source: e });
                }
            }
        }
    }

    if let Some(f) = fault {
        return Err(f);
    }
    if let Some(bad) = out.interior().iter().position(|u| !u.is_finite()) {
        return Err(StepError::NonFinite { cell: bad });
    }
    Ok(out)
}
