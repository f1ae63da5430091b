//! One-step compact approximate-Taylor machinery: interface predictors,
//! the shared four-point flux, the two semi-implicit cell updates, and the
//! robust first-order fallback.
//!
//! The conservative update is always
//! `U_i^{n+1} = U_i^n - (dt/dx) (Flux_{i+1/2} - Flux_{i-1/2}) + source part`.
//! Interfaces are indexed `k = 0..=n`, interface `k` sitting between cells
//! `k-1` and `k`; one ghost layer covers the whole stencil.

use crate::error::{ModelError, StepError};
use crate::grid::{BoundaryKind, CellField};
use crate::models::Model;
use crate::state::{Mat, StateVec};

/// Which high-order source treatment a step uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HighOrderKind {
    /// Implicit-explicit trapezoidal source average.
    Trap,
    /// Taylor-corrected source with stiff decay.
    Tay,
}

/// One flux vector per interface; both adjacent cells consume the same
/// value, so conservation holds by construction.
#[derive(Clone, Debug)]
pub struct InterfaceFluxes<const D: usize> {
    /// `flux[k]` lives between cells `k-1` and `k`; length `n_cells + 1`.
    pub flux: Vec<StateVec<D>>,
}

/// Space-time predictor states at each interface, for the two cells
/// touching it.
#[derive(Clone, Debug)]
pub struct PredictorStates<const D: usize> {
    /// `states[k][s]` predicts cell `k-1+s` one step ahead; length `n_cells + 1`.
    pub states: Vec<[StateVec<D>; 2]>,
    /// First failure encountered, if any; the affected entries are NaN.
    pub fault: Option<StepError>,
}

/// Divided-difference estimate of the first time derivative at an
/// interface: `-(F(U_right) - F(U_left)) / dx`. The same value serves both
/// predictor positions.
pub fn first_time_derivative<M, const D: usize>(
    model: &M,
    u_left: &StateVec<D>,
    u_right: &StateVec<D>,
    dx: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let fl = model.flux(u_left)?;
    let fr = model.flux(u_right)?;
    Ok((fl - fr) * (1.0 / dx))
}

/// Cached cell fluxes for cells `-1 ..= n`; index `j + 1` holds cell `j`.
/// Evaluation failures leave NaN and report the first fault.
fn cell_flux_cache<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
) -> (Vec<StateVec<D>>, Option<StepError>)
where
    M: Model<D> + ?Sized,
{
    let n = field.n_cells();
    let mut cache = Vec::with_capacity(n + 2);
    let mut fault = None;
    for j in -1..=(n as isize) {
        match model.flux(&field.at(j)) {
            Ok(f) => cache.push(f),
            Err(e) => {
                cache.push(StateVec::nan());
                if fault.is_none() {
                    fault = Some(StepError::AtCell {
                        cell: j.clamp(0, n as isize - 1) as usize,
                        source: e,
                    });
                }
            }
        }
    }
    (cache, fault)
}

/// Interface predictors including the implicit source contribution:
/// solve `P = U + dt*U1 + dt*S(P, eps)` per interface and side. With a
/// source-free model this reduces to the explicit predictor `U + dt*U1`.
pub fn predictor_states<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    dt: f64,
    eps: f64,
) -> PredictorStates<D>
where
    M: Model<D> + ?Sized,
{
    let (fc, fault) = cell_flux_cache(field, model);
    predictor_states_cached(field, model, &fc, fault, dt, eps)
}

fn predictor_states_cached<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    fc: &[StateVec<D>],
    mut fault: Option<StepError>,
    dt: f64,
    eps: f64,
) -> PredictorStates<D>
where
    M: Model<D> + ?Sized,
{
    let n = field.n_cells();
    let dx = field.grid.dx;
    let mut states = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // fc[k] is F(cell k-1), fc[k+1] is F(cell k).
        let u1 = (fc[k] - fc[k + 1]) * (1.0 / dx);
        let mut pair = [StateVec::nan(); 2];
        for (s, slot) in pair.iter_mut().enumerate() {
            let b = field.at(k as isize - 1 + s as isize) + dt * u1;
            if !b.is_finite() {
                continue;
            }
            match model.solve_implicit_source(&b, dt, eps) {
                Ok(p) => *slot = p,
                Err(e) => {
                    if fault.is_none() {
                        fault = Some(StepError::AtInterface {
                            interface: k,
                            source: e,
                        });
                    }
                }
            }
        }
        states.push(pair);
    }
    PredictorStates { states, fault }
}

/// Four-point interface flux: the average of the two cell fluxes and the
/// two predictor fluxes.
pub fn cat2_flux<M, const D: usize>(
    field: &CellField<D>,
    predictors: &PredictorStates<D>,
    model: &M,
) -> InterfaceFluxes<D>
where
    M: Model<D> + ?Sized,
{
    let (fc, _) = cell_flux_cache(field, model);
    cat2_flux_cached(predictors, model, &fc, field.n_cells())
}

fn cat2_flux_cached<M, const D: usize>(
    predictors: &PredictorStates<D>,
    model: &M,
    fc: &[StateVec<D>],
    n: usize,
) -> InterfaceFluxes<D>
where
    M: Model<D> + ?Sized,
{
    let mut flux = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let [p0, p1] = predictors.states[k];
        let fp0 = model.flux(&p0).unwrap_or_else(|_| StateVec::nan());
        let fp1 = model.flux(&p1).unwrap_or_else(|_| StateVec::nan());
        flux.push((fc[k] + fc[k + 1] + fp0 + fp1) * 0.25);
    }
    InterfaceFluxes { flux }
}

/// Local dissipative two-point flux:
/// `(F(UL) + F(UR) - alpha (UR - UL)) / 2` with `alpha` the larger of the
/// two local wavespeeds.
pub fn rusanov_flux<M, const D: usize>(
    model: &M,
    u_left: &StateVec<D>,
    u_right: &StateVec<D>,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let fl = model.flux(u_left)?;
    let fr = model.flux(u_right)?;
    let alpha = model
        .max_wavespeed(u_left)?
        .max(model.max_wavespeed(u_right)?);
    Ok((fl + fr - alpha * (*u_right - *u_left)) * 0.5)
}

/// Trapezoidal cell update: solve
/// `U - (dt/2) S(U) = U^n - mu (Flux_R - Flux_L) + (dt/2) S(U^n)`.
pub(crate) fn trap_cell_update<M, const D: usize>(
    model: &M,
    work: &CellField<D>,
    i: usize,
    flux_l: &StateVec<D>,
    flux_r: &StateVec<D>,
    dt: f64,
    eps: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let mu = dt / work.grid.dx;
    let u_n = work.at(i as isize);
    let b = u_n - mu * (*flux_r - *flux_l) + (0.5 * dt) * model.source(&u_n, eps);
    if !b.is_finite() {
        return Ok(StateVec::nan());
    }
    model.solve_implicit_source(&b, 0.5 * dt, eps)
}

/// Taylor-corrected cell update. The old-time source is replaced by
/// `S(U^{n+1}) - dt * J^n (S(U^{n+1}) - DxF^n)` with a central-difference
/// `DxF^n`, which yields
/// `U = b + dt (I - (dt/2) J^n) S(U)`,
/// `b = U^n - mu (Flux_R - Flux_L) + (dt^2/2) J^n DxF^n`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn tay_cell_update<M, const D: usize>(
    model: &M,
    work: &CellField<D>,
    flux_cache: &[StateVec<D>],
    i: usize,
    flux_l: &StateVec<D>,
    flux_r: &StateVec<D>,
    dt: f64,
    eps: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let dx = work.grid.dx;
    let mu = dt / dx;
    let u_n = work.at(i as isize);
    // flux_cache[j + 1] holds F(cell j).
    let dxf = (flux_cache[i + 2] - flux_cache[i]) * (1.0 / (2.0 * dx));
    let jac_n = model.source_jacobian(&u_n, eps);
    let b = u_n - mu * (*flux_r - *flux_l) + (0.5 * dt * dt) * jac_n.matvec(&dxf);
    if !b.is_finite() {
        return Ok(StateVec::nan());
    }
    // The weight matrix I - (dt/2) J^n folds the Taylor correction into
    // the implicit solve. When the source lives in a single row, W*S is a
    // scalar rescaling of the source, so the relation is the plain
    // implicit solve with an effective step (the models' closed forms).
    match jacobian_structure(&jac_n) {
        JacStructure::Zero => model.solve_implicit_source(&b, dt, eps),
        JacStructure::SingleRow(d) => {
            let dt_eff = dt * (1.0 - 0.5 * dt * jac_n.0[d][d]);
            if dt_eff > 0.0 {
                model.solve_implicit_source(&b, dt_eff, eps)
            } else {
                let weight = Mat::identity().add(&jac_n.scale(-0.5 * dt));
                crate::models::newton_weighted_source(model, &b, dt, Some(&weight), eps)
            }
        }
        JacStructure::General => {
            let weight = Mat::identity().add(&jac_n.scale(-0.5 * dt));
            crate::models::newton_weighted_source(model, &b, dt, Some(&weight), eps)
        }
    }
}

enum JacStructure {
    /// Identically zero at this state: the weight matrix is the identity.
    Zero,
    /// Exactly one row carries source coupling.
    SingleRow(usize),
    General,
}

fn jacobian_structure<const D: usize>(jac: &Mat<D>) -> JacStructure {
    let mut hit = None;
    for (i, row) in jac.0.iter().enumerate() {
        if row.iter().any(|x| *x != 0.0) {
            if hit.is_some() {
                return JacStructure::General;
            }
            hit = Some(i);
        }
    }
    match hit {
        Some(i) => JacStructure::SingleRow(i),
        None => JacStructure::Zero,
    }
}

/// First-order cell update: dissipative fluxes with an implicit-Euler
/// source, `U - dt S(U) = U^n - mu (Flux_R - Flux_L)`.
pub(crate) fn first_order_cell_update<M, const D: usize>(
    model: &M,
    work: &CellField<D>,
    i: usize,
    flux_l: &StateVec<D>,
    flux_r: &StateVec<D>,
    dt: f64,
    eps: f64,
) -> Result<StateVec<D>, ModelError>
where
    M: Model<D> + ?Sized,
{
    let mu = dt / work.grid.dx;
    let b = work.at(i as isize) - mu * (*flux_r - *flux_l);
    if !b.is_finite() {
        return Ok(StateVec::nan());
    }
    model.solve_implicit_source(&b, dt, eps)
}

/// Everything one step produces, before faults are turned into hard
/// errors. The a-posteriori wrapper consumes this form so its detectors
/// can repair failed cells instead of aborting.
pub(crate) struct RawStep<const D: usize> {
    pub field: CellField<D>,
    pub fluxes: InterfaceFluxes<D>,
    /// Ghost-filled copy of the input the step was computed from.
    pub work: CellField<D>,
    pub flux_cache: Vec<StateVec<D>>,
    pub fault: Option<StepError>,
}

pub(crate) fn cat2_step_raw<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    kind: HighOrderKind,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> RawStep<D>
where
    M: Model<D> + ?Sized,
{
    let mut work = field.clone();
    work.apply_boundary(boundary);
    let (flux_cache, cache_fault) = cell_flux_cache(&work, model);
    let preds = predictor_states_cached(&work, model, &flux_cache, cache_fault, dt, eps);
    let fluxes = cat2_flux_cached(&preds, model, &flux_cache, work.n_cells());
    let mut fault = preds.fault.clone();

    let n = work.n_cells();
    let mut out = CellField::new(work.grid);
    out.time = field.time + dt;
    for i in 0..n {
        let (fl, fr) = (fluxes.flux[i], fluxes.flux[i + 1]);
        let updated = match kind {
            HighOrderKind::Trap => trap_cell_update(model, &work, i, &fl, &fr, dt, eps),
            HighOrderKind::Tay => tay_cell_update(model, &work, &flux_cache, i, &fl, &fr, dt, eps),
        };
        match updated {
            Ok(v) => out.set(i, v),
            Err(e) => {
                out.set(i, StateVec::nan());
                if fault.is_none() {
                    fault = Some(StepError::AtCell { cell: i, source: e });
                }
            }
        }
    }
    RawStep {
        field: out,
        fluxes,
        work,
        flux_cache,
        fault,
    }
}

pub(crate) fn first_order_step_raw<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> RawStep<D>
where
    M: Model<D> + ?Sized,
{
    let mut work = field.clone();
    work.apply_boundary(boundary);
    let n = work.n_cells();
    let mut fault = None;
    let mut flux = Vec::with_capacity(n + 1);
    for k in 0..=n {
        match rusanov_flux(model, &work.at(k as isize - 1), &work.at(k as isize)) {
            Ok(f) => flux.push(f),
            Err(e) => {
                flux.push(StateVec::nan());
                if fault.is_none() {
                    fault = Some(StepError::AtInterface {
                        interface: k,
                        source: e,
                    });
                }
            }
        }
    }
    let fluxes = InterfaceFluxes { flux };
    let mut out = CellField::new(work.grid);
    out.time = field.time + dt;
    for i in 0..n {
        let (fl, fr) = (fluxes.flux[i], fluxes.flux[i + 1]);
        match first_order_cell_update(model, &work, i, &fl, &fr, dt, eps) {
            Ok(v) => out.set(i, v),
            Err(e) => {
                out.set(i, StateVec::nan());
                if fault.is_none() {
                    fault = Some(StepError::AtCell { cell: i, source: e });
                }
            }
        }
    }
    let (flux_cache, _) = cell_flux_cache(&work, model);
    RawStep {
        field: out,
        fluxes,
        work,
        flux_cache,
        fault,
    }
}

fn finalize<const D: usize>(raw: RawStep<D>) -> Result<CellField<D>, StepError> {
    if let Some(fault) = raw.fault {
        return Err(fault);
    }
    if let Some(bad) = raw.field.interior().iter().position(|u| !u.is_finite()) {
        return Err(StepError::NonFinite { cell: bad });
    }
    Ok(raw.field)
}

fn check_dt(dt: f64) -> Result<(), StepError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(StepError::NonPositiveDt { dt })
    }
}

/// One semi-implicit step with the trapezoidal source treatment.
pub fn step_cat2_trap<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<CellField<D>, StepError>
where
    M: Model<D> + ?Sized,
{
    check_dt(dt)?;
    finalize(cat2_step_raw(
        field,
        model,
        HighOrderKind::Trap,
        boundary,
        dt,
        eps,
    ))
}

/// One semi-implicit step with the Taylor-corrected source treatment.
pub fn step_cat2_tay<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<CellField<D>, StepError>
where
    M: Model<D> + ?Sized,
{
    check_dt(dt)?;
    finalize(cat2_step_raw(
        field,
        model,
        HighOrderKind::Tay,
        boundary,
        dt,
        eps,
    ))
}

/// One step of the robust fallback: dissipative two-point fluxes on cell
/// averages with an implicit-Euler source.
pub fn step_first_order<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<CellField<D>, StepError>
where
    M: Model<D> + ?Sized,
{
    check_dt(dt)?;
    finalize(first_order_step_raw(field, model, boundary, dt, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::models::wrappers::{LinearDecay, ZeroFlux, ZeroSource};
    use crate::models::{Broadwell, XinJin};
    use proptest::prelude::*;

    /// Scalar model with an odd nonlinear flux, for symmetry checks.
    struct OddCubic;

    impl Model<1> for OddCubic {
        fn name(&self) -> &'static str {
            "odd_cubic"
        }
        fn component_names(&self) -> [&'static str; 1] {
            ["u"]
        }
        fn flux(&self, u: &StateVec<1>) -> Result<StateVec<1>, ModelError> {
            Ok(StateVec([u[0] * u[0] * u[0]]))
        }
        fn source(&self, _u: &StateVec<1>, _eps: f64) -> StateVec<1> {
            StateVec::ZERO
        }
        fn source_jacobian(&self, _u: &StateVec<1>, _eps: f64) -> Mat<1> {
            Mat::ZERO
        }
        fn max_wavespeed(&self, u: &StateVec<1>) -> Result<f64, ModelError> {
            Ok(3.0 * u[0] * u[0])
        }
        fn solve_implicit_source(
            &self,
            b: &StateVec<1>,
            _dt: f64,
            _eps: f64,
        ) -> Result<StateVec<1>, ModelError> {
            Ok(*b)
        }
        fn equilibrium(&self, u: &StateVec<1>) -> StateVec<1> {
            *u
        }
    }

    fn advection() -> ZeroSource<LinearDecay> {
        ZeroSource(LinearDecay { lambda: 0.0 })
    }

    #[test]
    fn time_derivative_examples() {
        let xj = XinJin::linear(0.7);
        let c = StateVec([1.0, 0.7]);
        assert_eq!(
            first_time_derivative(&xj, &c, &c, 0.1).unwrap(),
            StateVec([0.0, 0.0])
        );
        let d =
            first_time_derivative(&xj, &StateVec([1.0, 0.0]), &StateVec([1.0, 0.1]), 0.1).unwrap();
        assert_eq!(d, StateVec([-1.0, 0.0]));
        let bw = Broadwell;
        let cb = StateVec([1.0, 0.5, 0.625]);
        assert_eq!(
            first_time_derivative(&bw, &cb, &cb, 0.25).unwrap(),
            StateVec([0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn zero_source_predictor_is_explicit() {
        let model = ZeroSource(XinJin::linear(0.7));
        let grid = Grid::build_uniform(0.0, 1.0, 8).unwrap();
        let mut field = CellField::<2>::from_fn(grid, |x| StateVec([x.sin() + 2.0, x.cos()]));
        field.apply_boundary(BoundaryKind::Periodic);
        let dt = 0.003;
        let preds = predictor_states(&field, &model, dt, 1.0);
        assert!(preds.fault.is_none());
        for k in 0..=8usize {
            let ul = field.at(k as isize - 1);
            let ur = field.at(k as isize);
            let u1 = first_time_derivative(&model, &ul, &ur, grid.dx).unwrap();
            assert_eq!(preds.states[k][0], ul + dt * u1);
            assert_eq!(preds.states[k][1], ur + dt * u1);
        }
    }

    #[test]
    fn equilibrium_constant_field_predictors_are_stationary() {
        let model = XinJin::linear(0.7);
        let grid = Grid::build_uniform(0.0, 1.0, 8).unwrap();
        let eq = model.equilibrium(&StateVec([1.3, 0.0]));
        let mut field = CellField::<2>::from_fn(grid, |_| eq);
        field.apply_boundary(BoundaryKind::Periodic);
        let preds = predictor_states(&field, &model, 0.01, 1e-6);
        for pair in &preds.states {
            assert_eq!(pair[0], eq);
            assert_eq!(pair[1], eq);
        }
    }

    #[test]
    fn stiff_predictor_projects_unprepared_data() {
        let model = XinJin::linear(0.7);
        let grid = Grid::build_uniform(0.0, 1.0, 8).unwrap();
        // Constant u, v far off the equilibrium manifold.
        let mut field = CellField::<2>::from_fn(grid, |_| StateVec([1.5, -0.3]));
        field.apply_boundary(BoundaryKind::Periodic);
        let preds = predictor_states(&field, &model, 0.1, 1e-14);
        for pair in &preds.states {
            for p in pair {
                assert!((p[1] - 0.7 * 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_equilibrium_flux_is_pointwise_flux() {
        let model = Broadwell;
        let grid = Grid::build_uniform(0.0, 1.0, 6).unwrap();
        let eq = model.equilibrium(&StateVec([1.0, 0.5, 0.0]));
        let mut field = CellField::<3>::from_fn(grid, |_| eq);
        field.apply_boundary(BoundaryKind::Periodic);
        let preds = predictor_states(&field, &model, 0.01, 0.1);
        let fluxes = cat2_flux(&field, &preds, &model);
        let f = model.flux(&eq).unwrap();
        for k in 0..=6usize {
            assert_eq!(fluxes.flux[k], f);
        }
    }

    #[test]
    fn linear_advection_flux_is_lax_wendroff() {
        // f(u) = u on a ramp: the four-point flux must equal
        // (u_i + u_{i+1})/2 - (dt/(2 dx)) (u_{i+1} - u_i).
        let model = advection();
        let grid = Grid::build_uniform(0.0, 1.0, 10).unwrap();
        let mut field = CellField::<1>::from_fn(grid, |x| StateVec([x]));
        field.apply_boundary(BoundaryKind::NeumannZero);
        let dt = 0.04;
        let preds = predictor_states(&field, &model, dt, 1.0);
        let fluxes = cat2_flux(&field, &preds, &model);
        for k in 1..10usize {
            let ul = field.at(k as isize - 1)[0];
            let ur = field.at(k as isize)[0];
            let lw = 0.5 * (ul + ur) - dt / (2.0 * grid.dx) * (ur - ul);
            assert!(
                (fluxes.flux[k][0] - lw).abs() <= 1e-15 * (1.0 + lw.abs()),
                "interface {k}: {} vs {}",
                fluxes.flux[k][0],
                lw
            );
        }
    }

    #[test]
    fn antisymmetric_odd_flux_structure() {
        // Brute-force four-cell check: with u_R = -u_L around the middle
        // interface and an odd flux the two cell-flux terms cancel, so the
        // interface flux reduces to the average of the predictor fluxes.
        let model = OddCubic;
        let grid = Grid::build_uniform(0.0, 1.0, 4).unwrap();
        let vals = [-0.9, -0.4, 0.4, 0.9];
        let mut field = CellField::<1>::new(grid);
        for (i, v) in vals.iter().enumerate() {
            field.set(i, StateVec([*v]));
        }
        field.apply_boundary(BoundaryKind::NeumannZero);
        let dt = 0.05;
        let preds = predictor_states(&field, &model, dt, 1.0);
        let fluxes = cat2_flux(&field, &preds, &model);
        let f = |u: f64| u * u * u;
        // Middle interface k=2 between cells 1 and 2.
        let u1 = -(f(vals[2]) - f(vals[1])) / grid.dx;
        let p0 = vals[1] + dt * u1;
        let p1 = vals[2] + dt * u1;
        let expected = 0.25 * (f(vals[1]) + f(vals[2]) + f(p0) + f(p1));
        assert!((fluxes.flux[2][0] - expected).abs() < 1e-15);
        assert!((fluxes.flux[2][0] - 0.25 * (f(p0) + f(p1))).abs() < 1e-15);
    }

    /// Test-side explicit one-step update, written straight from the
    /// conservative formulas, used as the oracle for source-free reduction.
    fn explicit_cat2_oracle<M: Model<D>, const D: usize>(
        field: &CellField<D>,
        model: &M,
        boundary: BoundaryKind,
        dt: f64,
    ) -> CellField<D> {
        let mut work = field.clone();
        work.apply_boundary(boundary);
        let n = work.n_cells();
        let dx = work.grid.dx;
        let mu = dt / dx;
        let mut flux = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let ul = work.at(k as isize - 1);
            let ur = work.at(k as isize);
            let fl = model.flux(&ul).unwrap();
            let fr = model.flux(&ur).unwrap();
            let u1 = (fl - fr) * (1.0 / dx);
            let p0 = ul + dt * u1;
            let p1 = ur + dt * u1;
            let fp0 = model.flux(&p0).unwrap();
            let fp1 = model.flux(&p1).unwrap();
            flux.push((fl + fr + fp0 + fp1) * 0.25);
        }
        let mut out = CellField::new(work.grid);
        out.time = field.time + dt;
        for i in 0..n {
            let u_n = work.at(i as isize);
            out.set(i, u_n - mu * (flux[i + 1] - flux[i]));
        }
        out
    }

    #[test]
    fn source_free_steps_reduce_to_explicit_form() {
        let model = ZeroSource(XinJin::linear(0.7));
        let grid = Grid::build_uniform(0.0, 1.0, 32).unwrap();
        let field = CellField::<2>::from_fn(grid, |x| {
            StateVec([
                1.0 + (2.0 * std::f64::consts::PI * x).sin(),
                (2.0 * std::f64::consts::PI * x).cos(),
            ])
        });
        let dt = 0.9 * grid.dx;
        let oracle = explicit_cat2_oracle(&field, &model, BoundaryKind::Periodic, dt);
        let trap = step_cat2_trap(&field, &model, BoundaryKind::Periodic, dt, 1.0).unwrap();
        let tay = step_cat2_tay(&field, &model, BoundaryKind::Periodic, dt, 1.0).unwrap();
        for i in 0..32usize {
            for c in 0..2 {
                let scale = 1.0 + oracle.at(i as isize)[c].abs();
                assert!((trap.at(i as isize)[c] - oracle.at(i as isize)[c]).abs() <= 1e-15 * scale);
                assert!((tay.at(i as isize)[c] - oracle.at(i as isize)[c]).abs() <= 1e-15 * scale);
            }
        }
    }

    fn single_cell_ode_step(kind: HighOrderKind, lambda: f64, dt: f64, u0: f64) -> f64 {
        let model = ZeroFlux(LinearDecay { lambda });
        let grid = Grid::build_uniform(0.0, 1.0, 4).unwrap();
        let field = CellField::<1>::from_fn(grid, |_| StateVec([u0]));
        let stepped = match kind {
            HighOrderKind::Trap => {
                step_cat2_trap(&field, &model, BoundaryKind::Periodic, dt, 1.0).unwrap()
            }
            HighOrderKind::Tay => {
                step_cat2_tay(&field, &model, BoundaryKind::Periodic, dt, 1.0).unwrap()
            }
        };
        stepped.at(0)[0]
    }

    #[test]
    fn ode_mode_trap_amplification() {
        // z = -2 annihilates the solution: (1 + z/2)/(1 - z/2) = 0.
        let u1 = single_cell_ode_step(HighOrderKind::Trap, -2.0, 1.0, 3.0);
        assert!(u1.abs() < 1e-15);
    }

    #[test]
    fn ode_mode_tay_amplification() {
        // z = -2: 1/(1 - z + z^2/2) = 1/5.
        let u1 = single_cell_ode_step(HighOrderKind::Tay, -2.0, 1.0, 3.0);
        assert!((u1 - 3.0 / 5.0).abs() < 1e-14);
        // Strong stiff decay.
        let u2 = single_cell_ode_step(HighOrderKind::Tay, -1e8, 1.0, 1.0);
        assert!(u2.abs() < 1e-7);
    }

    #[test]
    fn ode_mode_matches_closed_forms_across_decay_range() {
        use crate::scheme::SchemeKind;
        use crate::stability::ode_amplification;
        for exp in 0..=16 {
            let z = -(10f64.powi(exp - 8));
            let trap = single_cell_ode_step(HighOrderKind::Trap, z, 1.0, 1.0);
            let r_trap = ode_amplification(SchemeKind::Cat2Trap, z).unwrap();
            assert!(
                (trap - r_trap).abs() <= 1e-12 * (1.0 + r_trap.abs()),
                "trap at z={z}: {trap} vs {r_trap}"
            );
            let tay = single_cell_ode_step(HighOrderKind::Tay, z, 1.0, 1.0);
            let r_tay = ode_amplification(SchemeKind::Cat2Tay, z).unwrap();
            assert!(
                (tay - r_tay).abs() <= 1e-12 * (1.0 + r_tay.abs()),
                "tay at z={z}: {tay} vs {r_tay}"
            );
        }
    }

    #[test]
    fn equilibrium_constant_field_is_fixed_point() {
        let model = Broadwell;
        let grid = Grid::build_uniform(0.0, 1.0, 8).unwrap();
        let eq = model.equilibrium(&StateVec([1.2, -0.4, 0.0]));
        let field = CellField::<3>::from_fn(grid, |_| eq);
        for eps in [1.0, 1e-6, 1e-14] {
            for dt in [1e-4, 0.01] {
                let trap = step_cat2_trap(&field, &model, BoundaryKind::Periodic, dt, eps).unwrap();
                let tay = step_cat2_tay(&field, &model, BoundaryKind::Periodic, dt, eps).unwrap();
                let fo = step_first_order(&field, &model, BoundaryKind::Periodic, dt, eps).unwrap();
                for i in 0..8usize {
                    for c in 0..3 {
                        let scale = 1.0 + eq[c].abs();
                        assert!((trap.at(i as isize)[c] - eq[c]).abs() <= 1e-15 * scale);
                        assert!((tay.at(i as isize)[c] - eq[c]).abs() <= 1e-15 * scale);
                        assert!((fo.at(i as isize)[c] - eq[c]).abs() <= 1e-15 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn rusanov_examples() {
        let xj = XinJin::linear(0.7);
        let u = StateVec([2.0, 1.4]);
        assert_eq!(rusanov_flux(&xj, &u, &u).unwrap(), xj.flux(&u).unwrap());
        let got = rusanov_flux(&xj, &StateVec([2.0, 1.4]), &StateVec([1.0, 0.7])).unwrap();
        assert!((got[0] - 1.55).abs() < 1e-15);
        assert!((got[1] - 1.85).abs() < 1e-15);
    }

    #[test]
    fn first_order_reduces_to_upwind_for_unit_advection() {
        let model = advection();
        let grid = Grid::build_uniform(0.0, 1.0, 10).unwrap();
        let mut field = CellField::<1>::from_fn(grid, |x| StateVec([x]));
        field.apply_boundary(BoundaryKind::NeumannZero);
        let dt = 0.05;
        let stepped = step_first_order(&field, &model, BoundaryKind::NeumannZero, dt, 1.0).unwrap();
        let mu = dt / grid.dx;
        for i in 1..10usize {
            let upwind = field.at(i as isize)[0]
                - mu * (field.at(i as isize)[0] - field.at(i as isize - 1)[0]);
            assert!((stepped.at(i as isize)[0] - upwind).abs() < 1e-14);
        }
    }

    #[test]
    fn first_order_keeps_density_positive_on_riemann_data() {
        let model = Broadwell;
        let grid = Grid::build_uniform(-1.0, 1.0, 50).unwrap();
        let field = CellField::<3>::from_fn(grid, |x| {
            if x <= 0.2 {
                StateVec([2.0, 1.0, 1.0])
            } else {
                StateVec([1.0, 0.13962, 1.0])
            }
        });
        let dt = 0.9 * grid.dx;
        let stepped =
            step_first_order(&field, &model, BoundaryKind::NeumannZero, dt, 1e-8).unwrap();
        for u in stepped.interior() {
            assert!(u[0] > 0.0);
        }
    }

    #[test]
    fn smooth_bump_advects_right() {
        // Locks the sign convention of the conservative update.
        let model = advection();
        let grid = Grid::build_uniform(0.0, 1.0, 64).unwrap();
        let bump = |x: f64| (-200.0 * (x - 0.3) * (x - 0.3)).exp();
        let field = CellField::<1>::from_fn(grid, |x| StateVec([bump(x)]));
        let mut f = field.clone();
        let dt = 0.5 * grid.dx;
        for _ in 0..20 {
            f = step_cat2_trap(&f, &model, BoundaryKind::Periodic, dt, 1.0).unwrap();
        }
        let center = |field: &CellField<1>| {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..64usize {
                num += grid.cell_center(i) * field.at(i as isize)[0];
                den += field.at(i as isize)[0];
            }
            num / den
        };
        assert!(center(&f) > center(&field) + 5.0 * grid.dx);
    }

    #[test]
    fn nonpositive_dt_rejected() {
        let model = XinJin::linear(0.7);
        let grid = Grid::build_uniform(0.0, 1.0, 8).unwrap();
        let field = CellField::<2>::from_fn(grid, |_| StateVec([1.0, 0.7]));
        assert!(matches!(
            step_cat2_trap(&field, &model, BoundaryKind::Periodic, 0.0, 1.0),
            Err(StepError::NonPositiveDt { .. })
        ));
    }

    proptest! {
        #[test]
        fn conservation_of_source_free_components(seed in 0u64..500) {
            // Random periodic fields; the flux-difference form must keep
            // component sums to roundoff for every stepper.
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut rng = move || {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64
            };
            let grid = Grid::build_uniform(0.0, 1.0, 24).unwrap();
            let xj = XinJin::linear(0.7);
            let mut xf = CellField::<2>::new(grid);
            for i in 0..24usize {
                xf.set(i, StateVec([0.5 + rng(), rng() - 0.5]));
            }
            // Rough but positivity-safe kinetic data: random jumps this
            // size stay admissible for one step without the adaptive
            // fallback.
            let bw = Broadwell;
            let mut bf = CellField::<3>::new(grid);
            for i in 0..24usize {
                let rho = 1.2 + 0.3 * rng();
                let m = 0.2 * (rng() - 0.5);
                let z = Broadwell::z_equilibrium(rho, m) + 0.2 * (rng() - 0.5);
                bf.set(i, StateVec([rho, m, z]));
            }
            let dt = 0.45 * grid.dx;
            let eps = 10f64.powf(-14.0 * rng());

            let sum_before = xf.conserved_sum(0);
            for stepped in [
                step_cat2_trap(&xf, &xj, BoundaryKind::Periodic, dt, eps).unwrap(),
                step_cat2_tay(&xf, &xj, BoundaryKind::Periodic, dt, eps).unwrap(),
                step_first_order(&xf, &xj, BoundaryKind::Periodic, dt, eps).unwrap(),
            ] {
                let sum_after = stepped.conserved_sum(0);
                prop_assert!((sum_after - sum_before).abs() <= 1e-12 * sum_before.abs().max(1.0));
            }

            for c in [0usize, 1] {
                let before = bf.conserved_sum(c);
                for stepped in [
                    step_cat2_trap(&bf, &bw, BoundaryKind::Periodic, dt, eps).unwrap(),
                    step_cat2_tay(&bf, &bw, BoundaryKind::Periodic, dt, eps).unwrap(),
                    step_first_order(&bf, &bw, BoundaryKind::Periodic, dt, eps).unwrap(),
                ] {
                    let after = stepped.conserved_sum(c);
                    prop_assert!((after - before).abs() <= 1e-12 * before.abs().max(1.0));
                }
            }
        }
    }
}
