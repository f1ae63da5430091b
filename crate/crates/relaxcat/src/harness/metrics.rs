//! Error norms, conservative grid restriction, and convergence tables.

use rayon::prelude::*;

use crate::error::HarnessError;
use crate::grid::{CellField, Grid};
use crate::harness::cases::{ModelFamily, TestCase};
use crate::harness::reference::{reference_solution_2, reference_solution_3, RefCache};
use crate::harness::{simulate, SchemeConfig};
use crate::models::{Broadwell, EulerHeat, XinJin};
use crate::state::StateVec;

fn domains_match(a: &Grid, b: &Grid) -> bool {
    let span = (a.x_right - a.x_left).abs().max(1.0);
    (a.x_left - b.x_left).abs() <= 1e-12 * span && (a.x_right - b.x_right).abs() <= 1e-12 * span
}

/// Conservative restriction of a fine field onto a coarser grid over the
/// same domain. Integer refinement ratios use plain block averaging; other
/// ratios integrate a central-slope piecewise-linear reconstruction over
/// each coarse cell, which stays conservative and second-order on smooth
/// data.
pub fn restrict_to<const D: usize>(
    fine: &CellField<D>,
    coarse: Grid,
) -> Result<CellField<D>, HarnessError> {
    let nf = fine.n_cells();
    let nc = coarse.n_cells;
    if !domains_match(&fine.grid, &coarse) {
        return Err(HarnessError::IncompatibleGrids {
            what: format!(
                "domains differ: [{}, {}] vs [{}, {}]",
                fine.grid.x_left, fine.grid.x_right, coarse.x_left, coarse.x_right
            ),
        });
    }
    if nf < nc {
        return Err(HarnessError::IncompatibleGrids {
            what: format!("reference has {nf} cells, cannot restrict onto {nc}"),
        });
    }
    let mut out = CellField::new(coarse);
    out.time = fine.time;
    if nf.is_multiple_of(nc) {
        let r = nf / nc;
        for i in 0..nc {
            let mut acc = StateVec::ZERO;
            for j in 0..r {
                acc += fine.at((i * r + j) as isize);
            }
            out.set(i, acc * (1.0 / r as f64));
        }
        return Ok(out);
    }

    // One-sided slopes at the edges, central elsewhere (per unit of x).
    let slope = |j: usize| -> StateVec<D> {
        let jj = j as isize;
        if j == 0 {
            (fine.at(1) - fine.at(0)) * (1.0 / fine.grid.dx)
        } else if j == nf - 1 {
            (fine.at(jj) - fine.at(jj - 1)) * (1.0 / fine.grid.dx)
        } else {
            (fine.at(jj + 1) - fine.at(jj - 1)) * (1.0 / (2.0 * fine.grid.dx))
        }
    };
    let ratio = nf as f64 / nc as f64;
    for i in 0..nc {
        // Coarse cell i covers fine-index interval [i*ratio, (i+1)*ratio).
        let lo_idx = i as f64 * ratio;
        let hi_idx = (i + 1) as f64 * ratio;
        let j_first = lo_idx.floor() as usize;
        let j_last = (hi_idx.ceil() as usize).min(nf);
        let mut acc = StateVec::ZERO;
        for j in j_first..j_last {
            let lo = lo_idx.max(j as f64);
            let hi = hi_idx.min(j as f64 + 1.0);
            if hi <= lo {
                continue;
            }
            let len = hi - lo;
            // Offset of the overlap midpoint from the fine cell center.
            let mid_off = (0.5 * (lo + hi) - (j as f64 + 0.5)) * fine.grid.dx;
            acc += (fine.at(j as isize) + slope(j) * mid_off) * len;
        }
        out.set(i, acc * (1.0 / ratio));
    }
    Ok(out)
}

/// L1 distance between a numerical field and a reference on the same or a
/// finer grid: `sum |diff| * dx` over the numerical grid.
pub fn l1_error<const D: usize>(
    numerical: &CellField<D>,
    reference: &CellField<D>,
    component: usize,
) -> Result<f64, HarnessError> {
    let restricted;
    let reference = if reference.n_cells() == numerical.n_cells() {
        if !domains_match(&reference.grid, &numerical.grid) {
            return Err(HarnessError::IncompatibleGrids {
                what: "same resolution but different domains".to_string(),
            });
        }
        reference
    } else {
        restricted = restrict_to(reference, numerical.grid)?;
        &restricted
    };
    let dx = numerical.grid.dx;
    Ok(numerical
        .interior()
        .iter()
        .zip(reference.interior())
        .map(|(a, b)| (a[component] - b[component]).abs())
        .sum::<f64>()
        * dx)
}

/// L1 distance to a pointwise exact profile sampled at cell centers.
pub fn l1_error_vs<const D: usize>(
    numerical: &CellField<D>,
    exact: impl Fn(f64) -> f64,
    component: usize,
) -> f64 {
    let g = numerical.grid;
    (0..g.n_cells)
        .map(|i| (numerical.at(i as isize)[component] - exact(g.cell_center(i))).abs())
        .sum::<f64>()
        * g.dx
}

#[derive(Clone, Debug)]
pub struct EocRow {
    pub scheme: String,
    pub eps: f64,
    pub n_cells: usize,
    pub l1: f64,
    /// Defined between successive grid doublings only.
    pub eoc: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct EocTable {
    pub rows: Vec<EocRow>,
}

impl EocTable {
    /// Observed orders for one stiffness value, in grid order.
    pub fn eocs_for(&self, eps: f64) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.eps == eps)
            .filter_map(|r| r.eoc)
            .collect()
    }
}

/// Grid-refinement study of a scheme on one case against a fine reference
/// produced by the comparison scheme (cached on disk).
pub fn eoc_study(
    case: &TestCase,
    cfg: &SchemeConfig,
    grids: &[usize],
    eps_list: &[f64],
    reference_n: usize,
    cache: &RefCache,
) -> Result<EocTable, HarnessError> {
    if grids.is_empty() {
        return Err(HarnessError::BadRunConfig {
            what: "empty grid list".to_string(),
        });
    }
    let max_n = *grids.iter().max().unwrap();
    if reference_n < 4 * max_n {
        return Err(HarnessError::BadRunConfig {
            what: format!("reference grid {reference_n} is finer than 4 x {max_n} required"),
        });
    }

    let mut rows = Vec::new();
    for &eps in eps_list {
        let errors: Vec<f64> = match case.family() {
            ModelFamily::XinJin => {
                let model = XinJin::linear(case.xin_jin_a);
                let reference = reference_solution_2(case, reference_n, eps, cache)?;
                grids
                    .par_iter()
                    .map(|&n| -> Result<f64, HarnessError> {
                        let grid = Grid::build_uniform(case.x_left, case.x_right, n)?;
                        let sim = simulate(
                            &model,
                            &|x| case.initial_state_2(x),
                            grid,
                            case.boundary,
                            case.t_final,
                            cfg,
                            eps,
                        )?;
                        l1_error(&sim.field, &reference, 0)
                    })
                    .collect::<Result<_, _>>()?
            }
            ModelFamily::Broadwell => {
                let model = Broadwell;
                let reference = reference_solution_3(case, reference_n, eps, cache)?;
                grids
                    .par_iter()
                    .map(|&n| -> Result<f64, HarnessError> {
                        let grid = Grid::build_uniform(case.x_left, case.x_right, n)?;
                        let sim = simulate(
                            &model,
                            &|x| case.initial_state_3(x),
                            grid,
                            case.boundary,
                            case.t_final,
                            cfg,
                            eps,
                        )?;
                        l1_error(&sim.field, &reference, 0)
                    })
                    .collect::<Result<_, _>>()?
            }
            ModelFamily::EulerHeat => {
                let model = EulerHeat::default();
                let reference = reference_solution_3(case, reference_n, eps, cache)?;
                grids
                    .par_iter()
                    .map(|&n| -> Result<f64, HarnessError> {
                        let grid = Grid::build_uniform(case.x_left, case.x_right, n)?;
                        let sim = simulate(
                            &model,
                            &|x| case.initial_state_3(x),
                            grid,
                            case.boundary,
                            case.t_final,
                            cfg,
                            eps,
                        )?;
                        l1_error(&sim.field, &reference, 0)
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        for (k, (&n, &err)) in grids.iter().zip(errors.iter()).enumerate() {
            let eoc = if k > 0 && n == 2 * grids[k - 1] && errors[k - 1] > 0.0 && err > 0.0 {
                Some((errors[k - 1] / err).log2())
            } else {
                None
            };
            rows.push(EocRow {
                scheme: cfg.label().to_string(),
                eps,
                n_cells: n,
                l1: err,
                eoc,
            });
        }
    }
    Ok(EocTable { rows })
}
