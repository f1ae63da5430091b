//! Uniform 1D mesh with ghost cells, boundary fills, and CFL time-step
//! selection.

use crate::error::GridError;
use crate::models::Model;
use crate::state::StateVec;

/// Ghost depth on each side. Two layers cover the widest stencil in the
/// crate (piecewise-linear reconstruction and the detection neighborhood).
pub const N_GHOST: usize = 2;

/// Uniform mesh on `[x_left, x_right]` with `n_cells` cells. Cell centers
/// sit at `x_left + (i + 1/2) * dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid {
    pub fn build_uniform(x_left: f64, x_right: f64, n_cells: usize) -> Result<Grid, GridError> {
        if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(GridError::BadDomain { x_left, x_right });
        }
        if n_cells < 4 {
            return Err(GridError::TooFewCells { n_cells });
        }
        Ok(Grid {
            x_left,
            x_right,
            n_cells,
            dx: (x_right - x_left) / n_cells as f64,
        })
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    pub fn n_ghost(&self) -> usize {
        N_GHOST
    }
}

/// How ghost cells are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Wrap modulo `n_cells`.
    Periodic,
    /// Copy the nearest interior cell outward (zero-gradient).
    NeumannZero,
}

/// The discrete solution at one time level: interior cells plus `N_GHOST`
/// ghost layers on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField<const D: usize> {
    pub grid: Grid,
    pub time: f64,
    data: Vec<StateVec<D>>,
}

impl<const D: usize> CellField<D> {
    pub fn new(grid: Grid) -> Self {
        CellField {
            grid,
            time: 0.0,
            data: vec![StateVec::ZERO; grid.n_cells + 2 * N_GHOST],
        }
    }

    /// Sample an initial condition at cell centers.
    pub fn from_fn(grid: Grid, ic: impl Fn(f64) -> StateVec<D>) -> Self {
        let mut field = Self::new(grid);
        for i in 0..grid.n_cells {
            field.set(i, ic(grid.cell_center(i)));
        }
        field
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells
    }

    /// Access by signed index; `-N_GHOST .. n_cells + N_GHOST` is valid.
    #[inline]
    pub fn at(&self, i: isize) -> StateVec<D> {
        self.data[(i + N_GHOST as isize) as usize]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: StateVec<D>) {
        self.data[i + N_GHOST] = v;
    }

    pub fn interior(&self) -> &[StateVec<D>] {
        &self.data[N_GHOST..N_GHOST + self.grid.n_cells]
    }

    /// All cells including the ghost layers; interior cell `i` sits at
    /// index `i + N_GHOST`.
    pub fn with_ghosts(&self) -> &[StateVec<D>] {
        &self.data
    }

    pub fn interior_mut(&mut self) -> &mut [StateVec<D>] {
        let n = self.grid.n_cells;
        &mut self.data[N_GHOST..N_GHOST + n]
    }

    /// Fill ghost layers; interior cells are untouched.
    pub fn apply_boundary(&mut self, kind: BoundaryKind) {
        let n = self.grid.n_cells;
        for g in 0..N_GHOST {
            let (left, right) = match kind {
                BoundaryKind::Periodic => {
                    // Left ghost -1-g mirrors interior n-1-g, right ghost n+g mirrors g.
                    (self.data[N_GHOST + n - 1 - g], self.data[N_GHOST + g])
                }
                BoundaryKind::NeumannZero => (self.data[N_GHOST], self.data[N_GHOST + n - 1]),
            };
            self.data[N_GHOST - 1 - g] = left;
            self.data[N_GHOST + n + g] = right;
        }
    }

    /// `sum_i U_i[component] * dx` over the interior.
    pub fn conserved_sum(&self, component: usize) -> f64 {
        self.interior().iter().map(|u| u[component]).sum::<f64>() * self.grid.dx
    }

    pub fn interior_is_finite(&self) -> bool {
        self.interior().iter().all(|u| u.is_finite())
    }
}

/// CFL time step `cfl * dx / max_i lambda_max(U_i)` over interior cells.
pub fn compute_dt<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    cfl: f64,
) -> Result<f64, GridError>
where
    M: Model<D> + ?Sized,
{
    if !(cfl > 0.0) {
        return Err(GridError::NonPositiveCfl { cfl });
    }
    let mut lambda_max = 0.0_f64;
    for u in field.interior() {
        if let Ok(l) = model.max_wavespeed(u) {
            lambda_max = lambda_max.max(l);
        }
    }
    if lambda_max <= 0.0 || !lambda_max.is_finite() {
        return Err(GridError::DegenerateWavespeed);
    }
    Ok(cfl * field.grid.dx / lambda_max)
}
