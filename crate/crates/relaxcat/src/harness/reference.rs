//! Fine-grid reference solutions produced by the comparison scheme and
//! cached on disk, keyed by a content hash of the run configuration.

use std::path::{Path, PathBuf};

use crate::csvio;
use crate::error::HarnessError;
use crate::grid::{CellField, Grid};
use crate::harness::cases::{ModelFamily, TestCase};
use crate::harness::{simulate, SchemeConfig, TimeControl};
use crate::models::{Broadwell, EulerHeat, Model, XinJin};
use crate::scheme::SchemeKind;
use crate::state::StateVec;

pub const CACHE_DIR_ENV: &str = "RELAXCAT_CACHE_DIR";

/// Where cached references live. Resolved once so concurrent runs agree.
#[derive(Clone, Debug)]
pub struct RefCache {
    pub dir: PathBuf,
}

impl RefCache {
    pub fn at(dir: impl Into<PathBuf>) -> Self {
        RefCache { dir: dir.into() }
    }

    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) => RefCache { dir: dir.into() },
            None => RefCache {
                dir: PathBuf::from(".relaxcat_cache"),
            },
        }
    }
}

fn fnv1a64(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn cache_path(cache: &RefCache, case: &TestCase, n_fine: usize, eps: f64, cfl: f64) -> PathBuf {
    let key = format!(
        "case={};n={};eps={:e};scheme=imex_rk2;cfl={};t_final={};domain=[{},{}]",
        case.name, n_fine, eps, cfl, case.t_final, case.x_left, case.x_right
    );
    cache.dir.join(format!(
        "ref_{}_{}_{:016x}.csv",
        case.name,
        n_fine,
        fnv1a64(&key)
    ))
}

fn cache_io(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::CacheIo {
        path: path.display().to_string(),
        source,
    }
}

fn load_cached<const D: usize>(
    path: &Path,
    case: &TestCase,
    n_fine: usize,
) -> Result<Option<CellField<D>>, HarnessError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(cache_io(path, e)),
    };
    let parsed = csvio::parse_solution_csv(&text).map_err(|e| HarnessError::CacheCorrupt {
        path: path.display().to_string(),
        what: e.to_string(),
    })?;
    if parsed.x.len() != n_fine || parsed.columns.len() != D {
        return Err(HarnessError::CacheCorrupt {
            path: path.display().to_string(),
            what: format!(
                "expected {} rows x {} components, found {} x {}",
                n_fine,
                D,
                parsed.x.len(),
                parsed.columns.len()
            ),
        });
    }
    let grid = Grid::build_uniform(case.x_left, case.x_right, n_fine)?;
    if (parsed.x[0] - grid.cell_center(0)).abs() > 1e-9 * grid.dx.max(1.0) {
        return Err(HarnessError::CacheCorrupt {
            path: path.display().to_string(),
            what: "cell centers do not match the case domain".to_string(),
        });
    }
    let mut field = CellField::new(grid);
    field.time = case.t_final;
    for i in 0..n_fine {
        let mut u = StateVec::ZERO;
        for c in 0..D {
            u[c] = parsed.columns[c][i];
        }
        field.set(i, u);
    }
    Ok(Some(field))
}

fn store_cached<const D: usize>(
    path: &Path,
    model_names: [&'static str; D],
    field: &CellField<D>,
) -> Result<(), HarnessError> {
    let grid = field.grid;
    let x: Vec<f64> = (0..grid.n_cells).map(|i| grid.cell_center(i)).collect();
    let names: Vec<String> = model_names.iter().map(|s| s.to_string()).collect();
    let columns: Vec<Vec<f64>> = (0..D)
        .map(|c| field.interior().iter().map(|u| u[c]).collect())
        .collect();
    let text = csvio::solution_to_csv(&x, &names, &columns);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| cache_io(path, e))?;
    }
    // Write-then-rename keeps concurrent producers from seeing torn files.
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, text).map_err(|e| cache_io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| cache_io(path, e))?;
    Ok(())
}

fn reference_typed<M, const D: usize>(
    case: &TestCase,
    model: &M,
    ic: &dyn Fn(f64) -> StateVec<D>,
    n_fine: usize,
    eps: f64,
    cache: &RefCache,
) -> Result<CellField<D>, HarnessError>
where
    M: Model<D>,
{
    let cfl = case.cfl_for(SchemeKind::ImexRk2);
    let path = cache_path(cache, case, n_fine, eps, cfl);
    if let Some(field) = load_cached::<D>(&path, case, n_fine)? {
        return Ok(field);
    }
    let grid = Grid::build_uniform(case.x_left, case.x_right, n_fine)?;
    let cfg = SchemeConfig {
        scheme: SchemeKind::ImexRk2,
        time: TimeControl::CflAdaptive(cfl),
        mood: None,
    };
    let sim = simulate(model, ic, grid, case.boundary, case.t_final, &cfg, eps)?;
    store_cached(&path, model.component_names(), &sim.field)?;
    Ok(sim.field)
}

/// Reference for the two-component cases.
pub fn reference_solution_2(
    case: &TestCase,
    n_fine: usize,
    eps: f64,
    cache: &RefCache,
) -> Result<CellField<2>, HarnessError> {
    debug_assert_eq!(case.family(), ModelFamily::XinJin);
    let model = XinJin::linear(case.xin_jin_a);
    reference_typed(
        case,
        &model,
        &|x| case.initial_state_2(x),
        n_fine,
        eps,
        cache,
    )
}

/// Reference for the three-component cases.
pub fn reference_solution_3(
    case: &TestCase,
    n_fine: usize,
    eps: f64,
    cache: &RefCache,
) -> Result<CellField<3>, HarnessError> {
    match case.family() {
        ModelFamily::Broadwell => {
            let model = Broadwell;
            reference_typed(
                case,
                &model,
                &|x| case.initial_state_3(x),
                n_fine,
                eps,
                cache,
            )
        }
        ModelFamily::EulerHeat => {
            let model = EulerHeat::default();
            reference_typed(
                case,
                &model,
                &|x| case.initial_state_3(x),
                n_fine,
                eps,
                cache,
            )
        }
        ModelFamily::XinJin => Err(HarnessError::BadRunConfig {
            what: format!("case {} is two-component", case.name),
        }),
    }
}
