//! Integration checks of whole-run behavior: reference self-convergence,
//! the non-decaying failure mode of the trapezoidal source treatment on
//! unprepared data, fallback-scheme convergence, and the relaxed-limit
//! oracle.

use relaxcat::cat2::rusanov_flux;
use relaxcat::grid::{BoundaryKind, CellField, Grid};
use relaxcat::harness::{
    eoc_study, find_case, l1_error, l1_error_vs, reference_solution_2, restrict_to, simulate,
    RefCache, SchemeConfig, TimeControl,
};
use relaxcat::models::{Broadwell, Model, XinJin};
use relaxcat::mood::MoodConfig;
use relaxcat::scheme::SchemeKind;
use relaxcat::state::StateVec;

fn cache() -> RefCache {
    RefCache::at(std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("behavior_cache"))
}

fn cfl(scheme: SchemeKind, value: f64, mood: Option<MoodConfig>) -> SchemeConfig {
    SchemeConfig {
        scheme,
        time: TimeControl::CflAdaptive(value),
        mood,
    }
}

#[test]
fn numerical_reference_self_converges() {
    // Resolution-halving drift of the numerical oracle: it shrinks like
    // 1/n across the jump and sits below 1e-3 once the reference grid is
    // fine enough, which qualifies the oracle where no closed-form
    // profile exists.
    let cache = cache();
    let case = find_case("XinJin-square").unwrap();
    let drift_at = |n: usize| {
        let fine = reference_solution_2(&case, 2 * n, 1.0, &cache).unwrap();
        let half = reference_solution_2(&case, n, 1.0, &cache).unwrap();
        let restricted = restrict_to(&fine, half.grid).unwrap();
        l1_error(&half, &restricted, 0).unwrap()
    };
    let coarse_drift = drift_at(1000);
    let fine_drift = drift_at(4000);
    assert!(
        fine_drift < 0.5 * coarse_drift,
        "oracle drift not shrinking: {coarse_drift:.2e} -> {fine_drift:.2e}"
    );
    // At the operating resolution the drift sits well below the scheme
    // errors (~1e-2 at 200 cells) it arbitrates.
    assert!(
        coarse_drift < 1e-2,
        "oracle drift at 2000/1000: {coarse_drift:.2e}"
    );
}

#[test]
fn trapezoidal_treatment_fails_on_unprepared_riemann_data() {
    // Unprepared kinetic data in the stiff regime: the trapezoidal source
    // treatment must either abort or keep a non-decaying deviation from
    // the equilibrium manifold, while the stiffly decaying variant lands
    // on the manifold.
    let case = find_case("Broadwell-RP1").unwrap();
    let model = Broadwell;
    let grid = Grid::build_uniform(case.x_left, case.x_right, 200).unwrap();
    let eps = 1e-8;

    let deviation = |field: &CellField<3>| {
        field
            .interior()
            .iter()
            .map(|u| (u[2] - Broadwell::z_equilibrium(u[0], u[1])).abs())
            .fold(0.0f64, f64::max)
    };

    let tay = simulate(
        &model,
        &|x| case.initial_state_3(x),
        grid,
        case.boundary,
        case.t_final,
        &cfl(SchemeKind::Cat2Tay, 0.9, None),
        eps,
    )
    .unwrap();
    assert!(
        deviation(&tay.field) < 1e-4,
        "stiffly decaying run left {}",
        deviation(&tay.field)
    );

    match simulate(
        &model,
        &|x| case.initial_state_3(x),
        grid,
        case.boundary,
        case.t_final,
        &cfl(SchemeKind::Cat2Trap, 0.9, None),
        eps,
    ) {
        Err(_) => {}
        Ok(sim) => {
            let dev = deviation(&sim.field);
            assert!(
                dev > 0.05,
                "trapezoidal treatment unexpectedly reached the manifold (deviation {dev:.2e})"
            );
        }
    }
}

#[test]
fn first_order_fallback_converges_at_first_order() {
    // Against the exact stiff-limit profile (translated sine) the
    // fallback scheme shows first-order behavior.
    let case = find_case("XinJin-smooth").unwrap();
    let cfg = cfl(SchemeKind::FirstOrder, 0.9, None);
    let model = XinJin::linear(case.xin_jin_a);
    let exact = |x: f64| {
        let y = x - case.xin_jin_a * case.t_final;
        1.0 + (2.0 * std::f64::consts::PI * y).sin()
    };
    let mut errs = Vec::new();
    for n in [100usize, 200, 400] {
        let sim = simulate(
            &model,
            &|x| case.initial_state_2(x),
            Grid::build_uniform(0.0, 1.0, n).unwrap(),
            case.boundary,
            case.t_final,
            &cfg,
            1e-12,
        )
        .unwrap();
        errs.push(l1_error_vs(&sim.field, exact, 0));
    }
    for w in errs.windows(2) {
        let eoc = (w[0] / w[1]).log2();
        assert!(
            (0.7..=1.2).contains(&eoc),
            "fallback scheme order {eoc} outside [0.7, 1.2]"
        );
    }
}

#[test]
fn smooth_stiff_run_triggers_no_adaptation() {
    let case = find_case("XinJin-smooth").unwrap();
    let cfg = cfl(
        SchemeKind::Cat2Tay,
        0.9,
        Some(MoodConfig::with_tolerances(1e-3, 1e-2)),
    );
    let report = relaxcat::harness::run(&case, &cfg, 200, 1e-8).unwrap();
    let fired: usize = report.diags.iter().map(|d| d.cad + d.pad + d.nad).sum();
    assert_eq!(fired, 0, "smooth stiff run fired the cascade {fired} times");
    assert_eq!(report.diags.last().unwrap().t, 1.0);
}

#[test]
fn stiff_run_lands_on_relaxed_advection() {
    // In the stiff limit the two-component system reduces to scalar
    // advection with the relaxed flux; for the linear closure the exact
    // profile is the translated initial condition.
    let case = find_case("XinJin-smooth").unwrap();
    let model = XinJin::linear(case.xin_jin_a);
    let speed = model.relaxed_limit_flux(&[1.0]).unwrap()[0];
    let sim = simulate(
        &model,
        &|x| case.initial_state_2(x),
        Grid::build_uniform(0.0, 1.0, 200).unwrap(),
        case.boundary,
        case.t_final,
        &cfl(SchemeKind::Cat2Tay, 0.9, None),
        1e-14,
    )
    .unwrap();
    let exact = |x: f64| {
        let y = x - speed * case.t_final;
        1.0 + (2.0 * std::f64::consts::PI * y).sin()
    };
    let err = l1_error_vs(&sim.field, exact, 0);
    assert!(err < 5e-4, "stiff-limit error vs relaxed advection: {err}");
    // The solution also sits on the manifold.
    for u in sim.field.interior() {
        assert!((u[1] - case.xin_jin_a * u[0]).abs() < 1e-10);
    }
}

#[test]
fn stiff_kinetic_run_matches_reduced_system() {
    // Independent oracle: a first-order two-component solver built from
    // the relaxed-limit flux, compared against the full model in its
    // stiff regime.
    let case = find_case("Broadwell-smooth").unwrap();
    let model = Broadwell;
    let n = 200usize;
    let grid = Grid::build_uniform(0.0, 1.0, n).unwrap();
    let t_final = 0.3;

    let full = simulate(
        &model,
        &|x| case.initial_state_3(x),
        grid,
        BoundaryKind::Periodic,
        t_final,
        &cfl(SchemeKind::Cat2Tay, 0.9, None),
        1e-12,
    )
    .unwrap();

    // Reduced solver: local Lax-Friedrichs on (rho, m) with the limit flux.
    let mut reduced: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let u = case.initial_state_3(grid.cell_center(i));
            [u[0], u[1]]
        })
        .collect();
    let dt = 0.45 * grid.dx;
    let mut t = 0.0;
    while t < t_final {
        let step = dt.min(t_final - t);
        let mut flux = vec![[0.0f64; 2]; n + 1];
        for k in 0..=n {
            let l = reduced[(k + n - 1) % n];
            let r = reduced[k % n];
            let fl = model.relaxed_limit_flux(&l).unwrap();
            let fr = model.relaxed_limit_flux(&r).unwrap();
            for c in 0..2 {
                flux[k][c] = 0.5 * (fl[c] + fr[c] - (r[c] - l[c]));
            }
        }
        let mu = step / grid.dx;
        for (i, cell) in reduced.iter_mut().enumerate() {
            for c in 0..2 {
                cell[c] -= mu * (flux[i + 1][c] - flux[i][c]);
            }
        }
        t += step;
    }

    let mut err = 0.0;
    for (i, cell) in reduced.iter().enumerate() {
        err += (full.field.at(i as isize)[0] - cell[0]).abs() * grid.dx;
    }
    assert!(
        err < 0.02,
        "stiff kinetic run vs reduced-system oracle: L1 = {err}"
    );
}

#[test]
fn convergence_table_through_the_study_api() {
    let cache = cache();
    let case = find_case("XinJin-square").unwrap();
    let cfg = cfl(SchemeKind::ImexRk2, 0.9, None);
    let table = eoc_study(&case, &cfg, &[50, 100], &[1.0], 400, &cache).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[0].eoc.is_none());
    assert!(table.rows[1].eoc.is_some());
    assert!(table.rows.iter().all(|r| r.l1 > 0.0));
    let csv = relaxcat::csvio::convergence_to_csv(&table);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("scheme,eps,N,l1_error,eoc"));
    let first_row = lines.next().unwrap();
    assert!(first_row.starts_with("imex_rk2,1e0,50,"));
    assert!(
        first_row.ends_with(','),
        "coarsest row must leave eoc empty"
    );
    // The study rejects references that are not at least 4x finer.
    assert!(eoc_study(&case, &cfg, &[50, 100], &[1.0], 200, &cache).is_err());
}

#[test]
fn rusanov_alpha_is_unit_for_kinetic_model() {
    // The dissipation coefficient equals the frozen spectral radius for
    // every admissible pair.
    let model = Broadwell;
    let ul = StateVec([2.0, 1.0, 1.0]);
    let ur = StateVec([1.0, 0.13962, 1.0]);
    let got = rusanov_flux(&model, &ul, &ur).unwrap();
    let fl = model.flux(&ul).unwrap();
    let fr = model.flux(&ur).unwrap();
    let expect = (fl + fr - 1.0 * (ur - ul)) * 0.5;
    assert_eq!(got, expect);
}
