//! A-posteriori order adaptation: compute a high-order candidate step,
//! detect troubled cells, and locally recompute them with the robust
//! first-order scheme while keeping interface fluxes single-valued.
//!
//! Three detectors run cheapest-first on every candidate cell:
//! numeric validity (NaN/Inf), physical admissibility (positivity and,
//! where the model requires it, pressure), and a relaxed discrete maximum
//! principle on the previous time level.

use crate::cat2::{
    cat2_step_raw, first_order_cell_update, rusanov_flux, tay_cell_update, trap_cell_update,
    HighOrderKind,
};
use crate::error::StepError;
use crate::grid::{BoundaryKind, CellField};
use crate::models::Model;
use crate::state::StateVec;

#[derive(Clone, Copy, Debug)]
pub struct MoodConfig {
    /// Absolute floor of the maximum-principle relaxation.
    pub eps1: f64,
    /// Relative factor applied to the local oscillation.
    pub eps2: f64,
    /// Conserved component the numerical detector watches.
    pub detection_component: usize,
    pub enable_pad: bool,
    /// Detection rounds before everything left is accepted; two rungs
    /// (high order, then first order) need two rounds.
    pub max_cascade_rounds: usize,
}

impl Default for MoodConfig {
    fn default() -> Self {
        MoodConfig {
            eps1: 1e-4,
            eps2: 1e-3,
            detection_component: 0,
            enable_pad: true,
            max_cascade_rounds: 2,
        }
    }
}

impl MoodConfig {
    pub fn with_tolerances(eps1: f64, eps2: f64) -> Self {
        MoodConfig {
            eps1,
            eps2,
            ..MoodConfig::default()
        }
    }
}

/// Outcome of detection for one cell: which detector fired first, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellFlag {
    Accepted,
    CadFail,
    PadFail,
    NadFail,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundStats {
    pub cad: usize,
    pub pad: usize,
    pub nad: usize,
}

impl RoundStats {
    pub fn total(&self) -> usize {
        self.cad + self.pad + self.nad
    }
}

#[derive(Clone, Debug)]
pub struct DetectionReport {
    /// First detector that fired per cell, across all rounds.
    pub flags: Vec<CellFlag>,
    /// Number of distinct cells that were recomputed.
    pub recomputed_cells: usize,
    pub rounds: Vec<RoundStats>,
}

impl DetectionReport {
    pub fn totals(&self) -> RoundStats {
        let mut t = RoundStats::default();
        for r in &self.rounds {
            t.cad += r.cad;
            t.pad += r.pad;
            t.nad += r.nad;
        }
        t
    }
}

/// Numeric validity: flags cells holding NaN or infinite components.
pub fn detect_cad<const D: usize>(candidate: &CellField<D>) -> Vec<bool> {
    candidate
        .interior()
        .iter()
        .map(|u| !u.is_finite())
        .collect()
}

/// Physical admissibility of candidate cells.
pub fn detect_pad<M, const D: usize>(candidate: &CellField<D>, model: &M) -> Vec<bool>
where
    M: Model<D> + ?Sized,
{
    candidate
        .interior()
        .iter()
        .map(|u| !model.pad_admissible(u))
        .collect()
}

/// Relaxed discrete maximum principle: the candidate value must stay
/// inside the hull of the previous solution over the three-cell stencil,
/// widened by `delta = max(eps1, eps2 * (local max - local min))`.
pub fn detect_nad<const D: usize>(
    candidate: &CellField<D>,
    previous: &CellField<D>,
    cfg: &MoodConfig,
) -> Vec<bool> {
    let n = candidate.n_cells();
    let c = cfg.detection_component;
    let mut flags = Vec::with_capacity(n);
    for i in 0..n as isize {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in i - 1..=i + 1 {
            let w = previous.at(j)[c];
            lo = lo.min(w);
            hi = hi.max(w);
        }
        let delta = cfg.eps1.max(cfg.eps2 * (hi - lo));
        let w_star = candidate.at(i)[c];
        flags.push(!(w_star >= lo - delta && w_star <= hi + delta));
    }
    flags
}

/// Run the detector chain (cheapest first) over the given cells; cells
/// outside `subset` (when provided) stay `Accepted`.
fn detect_round<M, const D: usize>(
    candidate: &CellField<D>,
    previous: &CellField<D>,
    model: &M,
    cfg: &MoodConfig,
    subset: Option<&[usize]>,
) -> (Vec<CellFlag>, RoundStats)
where
    M: Model<D> + ?Sized,
{
    let n = candidate.n_cells();
    let c = cfg.detection_component;
    let mut flags = vec![CellFlag::Accepted; n];
    let mut stats = RoundStats::default();
    // Interior cell i has its previous three-cell stencil at padded
    // indices i+1 .. i+3.
    let prev = previous.with_ghosts();
    let mut check = |i: usize, u: &StateVec<D>| {
        if !u.is_finite() {
            flags[i] = CellFlag::CadFail;
            stats.cad += 1;
            return;
        }
        if cfg.enable_pad && !model.pad_admissible(u) {
            flags[i] = CellFlag::PadFail;
            stats.pad += 1;
            return;
        }
        let (a, b, d) = (prev[i + 1][c], prev[i + 2][c], prev[i + 3][c]);
        let lo = a.min(b).min(d);
        let hi = a.max(b).max(d);
        let delta = cfg.eps1.max(cfg.eps2 * (hi - lo));
        let w_star = u[c];
        if !(w_star >= lo - delta && w_star <= hi + delta) {
            flags[i] = CellFlag::NadFail;
            stats.nad += 1;
        }
    };
    match subset {
        Some(cells) => cells
            .iter()
            .for_each(|&i| check(i, &candidate.at(i as isize))),
        None => candidate
            .interior()
            .iter()
            .enumerate()
            .for_each(|(i, u)| check(i, u)),
    }
    (flags, stats)
}

/// One adaptive step: high-order candidate, detection, local conservative
/// recomputation, one re-detection round, unconditional acceptance of the
/// first-order rung.
pub fn mood_step<M, const D: usize>(
    field: &CellField<D>,
    model: &M,
    kind: HighOrderKind,
    cfg: &MoodConfig,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<(CellField<D>, DetectionReport), StepError>
where
    M: Model<D> + ?Sized,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StepError::NonPositiveDt { dt });
    }
    let raw = cat2_step_raw(field, model, kind, boundary, dt, eps);
    repair_candidate(raw, model, kind, cfg, boundary, dt, eps)
}

/// Detection and local recomputation on an already computed candidate.
pub(crate) fn repair_candidate<M, const D: usize>(
    raw: crate::cat2::RawStep<D>,
    model: &M,
    kind: HighOrderKind,
    cfg: &MoodConfig,
    boundary: BoundaryKind,
    dt: f64,
    eps: f64,
) -> Result<(CellField<D>, DetectionReport), StepError>
where
    M: Model<D> + ?Sized,
{
    let n = raw.work.n_cells();
    let prev = &raw.work;

    let (mut flags, stats1) = detect_round(&raw.field, prev, model, cfg, None);
    if stats1.total() == 0 {
        // Null effect: the candidate is returned untouched.
        return Ok((
            raw.field,
            DetectionReport {
                flags,
                recomputed_cells: 0,
                rounds: vec![stats1],
            },
        ));
    }

    let periodic = boundary == BoundaryKind::Periodic;
    let mut fluxes = raw.fluxes.flux.clone();
    let mut demoted = vec![false; n + 1];
    // Whether a cell's source treatment has dropped to implicit Euler.
    let mut first_order = vec![false; n];

    let demote = |demoted: &mut Vec<bool>, k: usize| {
        demoted[k] = true;
        // Interfaces 0 and n are the same physical interface on a ring.
        if periodic && k == 0 {
            demoted[n] = true;
        }
        if periodic && k == n {
            demoted[0] = true;
        }
    };

    for i in 0..n {
        if flags[i] != CellFlag::Accepted {
            first_order[i] = true;
            demote(&mut demoted, i);
            demote(&mut demoted, i + 1);
        }
    }

    let apply_demotions = |fluxes: &mut Vec<StateVec<D>>,
                           demoted: &[bool],
                           already: &[bool]|
     -> Result<(), StepError> {
        for k in 0..=n {
            if demoted[k] && !already[k] {
                let f = rusanov_flux(model, &prev.at(k as isize - 1), &prev.at(k as isize))
                    .map_err(|e| StepError::AtInterface {
                        interface: k,
                        source: e,
                    })?;
                fluxes[k] = f;
            }
        }
        Ok(())
    };
    apply_demotions(&mut fluxes, &demoted, &vec![false; n + 1])?;

    let recompute_cell = |out: &mut CellField<D>,
                          i: usize,
                          fluxes: &[StateVec<D>],
                          to_first_order: bool|
     -> Result<(), StepError> {
        let (fl, fr) = (fluxes[i], fluxes[i + 1]);
        if to_first_order {
            // Nothing lower in the cascade: failures here are fatal.
            let v = first_order_cell_update(model, prev, i, &fl, &fr, dt, eps)
                .map_err(|e| StepError::AtCell { cell: i, source: e })?;
            out.set(i, v);
        } else {
            let updated = match kind {
                HighOrderKind::Trap => trap_cell_update(model, prev, i, &fl, &fr, dt, eps),
                HighOrderKind::Tay => {
                    tay_cell_update(model, prev, &raw.flux_cache, i, &fl, &fr, dt, eps)
                }
            };
            // High-order failures poison the cell; the next round demotes it.
            out.set(i, updated.unwrap_or_else(|_| StateVec::nan()));
        }
        Ok(())
    };

    let mut out = raw.field.clone();
    let mut recomputed = vec![false; n];
    let round1: Vec<usize> = (0..n).filter(|&i| demoted[i] || demoted[i + 1]).collect();
    for &i in &round1 {
        recompute_cell(&mut out, i, &fluxes, first_order[i])?;
        recomputed[i] = true;
    }

    let mut rounds = vec![stats1];
    if cfg.max_cascade_rounds > 1 {
        let (flags2, stats2) = detect_round(&out, prev, model, cfg, Some(&round1));
        rounds.push(stats2);
        if stats2.total() > 0 {
            let before = demoted.clone();
            for (i, f2) in flags2.iter().enumerate() {
                if *f2 != CellFlag::Accepted {
                    if flags[i] == CellFlag::Accepted {
                        flags[i] = *f2;
                    }
                    first_order[i] = true;
                    demote(&mut demoted, i);
                    demote(&mut demoted, i + 1);
                }
            }
            apply_demotions(&mut fluxes, &demoted, &before)?;
            // Every cell next to a touched interface sees the final fluxes.
            for i in 0..n {
                let near_new = (demoted[i] && !before[i]) || (demoted[i + 1] && !before[i + 1]);
                if near_new || flags2[i] != CellFlag::Accepted {
                    recompute_cell(&mut out, i, &fluxes, first_order[i])?;
                    recomputed[i] = true;
                }
            }
        }
    }

    // Safety net: anything still non-finite drops to the first-order rung
    // with the final single-valued fluxes.
    for i in 0..n {
        if !out.at(i as isize).is_finite() {
            recompute_cell(&mut out, i, &fluxes, true)?;
            recomputed[i] = true;
            if let Some(bad) = out.interior().iter().position(|u| !u.is_finite()) {
                if bad == i {
                    return Err(StepError::NonFinite { cell: i });
                }
            }
        }
    }

    let report = DetectionReport {
        flags,
        recomputed_cells: recomputed.iter().filter(|r| **r).count(),
        rounds,
    };
    Ok((out, report))
}
