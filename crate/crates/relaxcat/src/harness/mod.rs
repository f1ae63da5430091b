//! Experiment driver: advances a case from `t = 0` to its final time with
//! CFL-adaptive or fixed steps, optional order adaptation, per-step
//! diagnostics, and wall-clock timing.

pub mod cases;
pub mod metrics;
pub mod reference;

pub use cases::{find_case, registry, CaseKind, ModelFamily, TestCase};
pub use metrics::{eoc_study, l1_error, l1_error_vs, restrict_to, EocRow, EocTable};
pub use reference::{reference_solution_2, reference_solution_3, RefCache, CACHE_DIR_ENV};

use std::time::Instant;

use crate::cat2::{step_cat2_tay, step_cat2_trap, step_first_order, HighOrderKind};
use crate::error::HarnessError;
use crate::grid::{compute_dt, BoundaryKind, CellField, Grid};
use crate::imex::step_imex_rk2;
use crate::models::{Broadwell, EulerHeat, Model, XinJin};
use crate::mood::{mood_step, MoodConfig};
use crate::scheme::{SchemeKind, SchemeSpec};
use crate::state::StateVec;

/// Time-step selection: adapt to the fastest wave each step, or march
/// with a constant step. Both clip the last step onto the final time.
#[derive(Clone, Copy, Debug)]
pub enum TimeControl {
    CflAdaptive(f64),
    FixedDt(f64),
}

#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub time: TimeControl,
    pub mood: Option<MoodConfig>,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.mood.is_some() && !matches!(self.scheme, SchemeKind::Cat2Trap | SchemeKind::Cat2Tay)
        {
            return Err(HarnessError::BadRunConfig {
                what: format!(
                    "order adaptation wraps only the compact schemes, not {}",
                    self.scheme.label()
                ),
            });
        }
        match self.time {
            TimeControl::CflAdaptive(cfl) if !(cfl > 0.0 && cfl.is_finite()) => {
                Err(HarnessError::BadRunConfig {
                    what: format!("CFL number must be positive (got {cfl})"),
                })
            }
            TimeControl::FixedDt(dt) if !(dt > 0.0 && dt.is_finite()) => {
                Err(HarnessError::BadRunConfig {
                    what: format!("fixed time step must be positive (got {dt})"),
                })
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        SchemeSpec {
            kind: self.scheme,
            mood: self.mood.is_some(),
        }
        .label()
    }
}

/// One row of the per-step diagnostics log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiag {
    pub step: usize,
    /// Time reached after this step.
    pub t: f64,
    pub dt: f64,
    pub cad: usize,
    pub pad: usize,
    pub nad: usize,
}

#[derive(Clone, Debug)]
pub struct SimResult<const D: usize> {
    pub field: CellField<D>,
    pub diags: Vec<StepDiag>,
    pub wall_seconds: f64,
}

const STEP_LIMIT: usize = 10_000_000;

/// Advance one case configuration from `t = 0` to `t_final`.
pub fn simulate<M, const D: usize>(
    model: &M,
    ic: &dyn Fn(f64) -> StateVec<D>,
    grid: Grid,
    boundary: BoundaryKind,
    t_final: f64,
    cfg: &SchemeConfig,
    eps: f64,
) -> Result<SimResult<D>, HarnessError>
where
    M: Model<D> + ?Sized,
{
    cfg.validate()?;
    if !(t_final > 0.0) || !(eps > 0.0) {
        return Err(HarnessError::BadRunConfig {
            what: format!("t_final and eps must be positive (got {t_final}, {eps})"),
        });
    }
    let start = Instant::now();
    let mut field = CellField::from_fn(grid, ic);
    let mut diags = Vec::new();
    let mut t = 0.0_f64;
    let mut step = 0usize;
    while t_final - t > 1e-14 * t_final {
        if step >= STEP_LIMIT {
            return Err(HarnessError::BadRunConfig {
                what: format!("exceeded {STEP_LIMIT} steps before reaching t_final"),
            });
        }
        let mut dt = match cfg.time {
            TimeControl::CflAdaptive(cfl) => compute_dt(&field, model, cfl)?,
            TimeControl::FixedDt(fixed) => fixed,
        };
        let clipped = t + dt >= t_final;
        if clipped {
            dt = t_final - t;
        }
        let mut stats = (0usize, 0usize, 0usize);
        field = match (cfg.mood.as_ref(), cfg.scheme) {
            (Some(mc), SchemeKind::Cat2Trap) | (Some(mc), SchemeKind::Cat2Tay) => {
                let kind = if cfg.scheme == SchemeKind::Cat2Trap {
                    HighOrderKind::Trap
                } else {
                    HighOrderKind::Tay
                };
                let (next, report) = mood_step(&field, model, kind, mc, boundary, dt, eps)
                    .map_err(|e| HarnessError::StepFailed { time: t, source: e })?;
                let totals = report.totals();
                stats = (totals.cad, totals.pad, totals.nad);
                next
            }
            (_, SchemeKind::Cat2Trap) => step_cat2_trap(&field, model, boundary, dt, eps)
                .map_err(|e| HarnessError::StepFailed { time: t, source: e })?,
            (_, SchemeKind::Cat2Tay) => step_cat2_tay(&field, model, boundary, dt, eps)
                .map_err(|e| HarnessError::StepFailed { time: t, source: e })?,
            (_, SchemeKind::ImexRk2) => step_imex_rk2(&field, model, boundary, dt, eps)
                .map_err(|e| HarnessError::StepFailed { time: t, source: e })?,
            (_, SchemeKind::FirstOrder) => step_first_order(&field, model, boundary, dt, eps)
                .map_err(|e| HarnessError::StepFailed { time: t, source: e })?,
        };
        t = if clipped { t_final } else { t + dt };
        field.time = t;
        step += 1;
        diags.push(StepDiag {
            step,
            t,
            dt,
            cad: stats.0,
            pad: stats.1,
            nad: stats.2,
        });
    }
    Ok(SimResult {
        field,
        diags,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// A completed run in column form, ready for CSV emission; the state
/// dimension is erased so every case reports through one type.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub case_name: String,
    pub scheme_label: String,
    pub n_cells: usize,
    pub eps: f64,
    pub x: Vec<f64>,
    pub component_names: Vec<String>,
    /// `components[c][i]` is component `c` at cell `i`.
    pub components: Vec<Vec<f64>>,
    pub diags: Vec<StepDiag>,
    pub wall_seconds: f64,
}

impl RunReport {
    fn from_sim<const D: usize>(
        case: &TestCase,
        cfg: &SchemeConfig,
        eps: f64,
        names: [&'static str; D],
        sim: SimResult<D>,
    ) -> RunReport {
        let grid = sim.field.grid;
        RunReport {
            case_name: case.name.to_string(),
            scheme_label: cfg.label().to_string(),
            n_cells: grid.n_cells,
            eps,
            x: (0..grid.n_cells).map(|i| grid.cell_center(i)).collect(),
            component_names: names.iter().map(|s| s.to_string()).collect(),
            components: (0..D)
                .map(|c| sim.field.interior().iter().map(|u| u[c]).collect())
                .collect(),
            diags: sim.diags,
            wall_seconds: sim.wall_seconds,
        }
    }

    pub fn dt_history(&self) -> Vec<f64> {
        self.diags.iter().map(|d| d.dt).collect()
    }
}

/// Run one case at one resolution and stiffness.
pub fn run(
    case: &TestCase,
    cfg: &SchemeConfig,
    n_cells: usize,
    eps: f64,
) -> Result<RunReport, HarnessError> {
    let grid = Grid::build_uniform(case.x_left, case.x_right, n_cells)?;
    match case.family() {
        ModelFamily::XinJin => {
            let model = XinJin::linear(case.xin_jin_a);
            let sim = simulate(
                &model,
                &|x| case.initial_state_2(x),
                grid,
                case.boundary,
                case.t_final,
                cfg,
                eps,
            )?;
            Ok(RunReport::from_sim(
                case,
                cfg,
                eps,
                model.component_names(),
                sim,
            ))
        }
        ModelFamily::Broadwell => {
            let model = Broadwell;
            let sim = simulate(
                &model,
                &|x| case.initial_state_3(x),
                grid,
                case.boundary,
                case.t_final,
                cfg,
                eps,
            )?;
            Ok(RunReport::from_sim(
                case,
                cfg,
                eps,
                model.component_names(),
                sim,
            ))
        }
        ModelFamily::EulerHeat => {
            let model = EulerHeat::default();
            let sim = simulate(
                &model,
                &|x| case.initial_state_3(x),
                grid,
                case.boundary,
                case.t_final,
                cfg,
                eps,
            )?;
            Ok(RunReport::from_sim(
                case,
                cfg,
                eps,
                model.component_names(),
                sim,
            ))
        }
    }
}
