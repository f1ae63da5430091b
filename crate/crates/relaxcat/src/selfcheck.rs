//! Built-in smoke suite behind the CLI's `--seed-check` flag: closed-form
//! values every module must reproduce, runnable without any configuration.

use crate::cat2::{first_time_derivative, rusanov_flux};
use crate::grid::{compute_dt, BoundaryKind, CellField, Grid};
use crate::imex::{minmod, ButcherPair};
use crate::models::{Broadwell, EulerHeat, Model, XinJin};
use crate::mood::{detect_nad, MoodConfig};
use crate::scheme::SchemeKind;
use crate::stability::ode_amplification;
use crate::state::StateVec;

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
}

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Run every check; failures do not stop the suite.
pub fn seed_check() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut check = |name: &'static str, passed: bool| out.push(CheckOutcome { name, passed });

    let xj = XinJin::linear(0.7);
    let bw = Broadwell;
    let eh = EulerHeat::default();

    check(
        "grid spacing on [0,1] with 200 cells",
        Grid::build_uniform(0.0, 1.0, 200).map(|g| g.dx) == Ok(0.005),
    );
    check(
        "grid spacing on [-1,1] with 200 cells",
        Grid::build_uniform(-1.0, 1.0, 200).map(|g| g.dx) == Ok(0.01),
    );
    check(
        "grid rejects 2 cells",
        Grid::build_uniform(0.0, 1.0, 2).is_err(),
    );

    {
        let g = Grid::build_uniform(0.0, 1.0, 4).unwrap();
        let mut f = CellField::<1>::new(g);
        for (i, v) in [1.0, 2.0, 3.0, 4.0].iter().enumerate() {
            f.set(i, StateVec([*v]));
        }
        f.apply_boundary(BoundaryKind::Periodic);
        check(
            "periodic ghosts wrap",
            f.at(-1)[0] == 4.0 && f.at(-2)[0] == 3.0 && f.at(4)[0] == 1.0 && f.at(5)[0] == 2.0,
        );
        f.apply_boundary(BoundaryKind::NeumannZero);
        check(
            "neumann ghosts copy edges",
            f.at(-1)[0] == 1.0 && f.at(-2)[0] == 1.0 && f.at(4)[0] == 4.0 && f.at(5)[0] == 4.0,
        );
    }

    {
        let g = Grid::build_uniform(0.0, 1.0, 200).unwrap();
        let f = CellField::<2>::from_fn(g, |_| StateVec([1.0, 0.7]));
        check(
            "unit-speed CFL step",
            compute_dt(&f, &xj, 0.9).map(|dt| approx(dt, 0.0045, 1e-15)) == Ok(true),
        );
        let gb = Grid::build_uniform(-1.0, 1.0, 200).unwrap();
        let fb = CellField::<3>::from_fn(gb, |_| StateVec([1.0, 0.5, 0.625]));
        check(
            "kinetic CFL step",
            compute_dt(&fb, &bw, 0.9).map(|dt| approx(dt, 0.009, 1e-15)) == Ok(true),
        );
        let fe = CellField::<3>::from_fn(g, |_| StateVec([1.0, 0.0, 2.5]));
        check(
            "sound-speed CFL step",
            compute_dt(&fe, &eh, 0.4).map(|dt| approx(dt, 0.4 * 0.005 / 1.4f64.sqrt(), 1e-15))
                == Ok(true),
        );
    }

    check(
        "two-component flux swap",
        xj.flux(&StateVec([2.0, 1.0])) == Ok(StateVec([1.0, 2.0])),
    );
    check(
        "kinetic flux",
        bw.flux(&StateVec([2.0, 1.0, 1.0])) == Ok(StateVec([1.0, 1.0, 1.0])),
    );
    check(
        "gas flux at rest",
        eh.flux(&StateVec([1.0, 0.0, 2.5]))
            .map(|f| f[0] == 0.0 && approx(f[1], 1.0, 1e-14) && f[2] == 0.0)
            == Ok(true),
    );
    check(
        "source vanishes on the manifold",
        xj.source(&StateVec([1.0, 0.7]), 0.3) == StateVec([0.0, 0.0]),
    );
    check(
        "kinetic source arithmetic",
        bw.source(&StateVec([2.0, 1.0, 1.0]), 0.5) == StateVec([0.0, 0.0, 1.0]),
    );
    check(
        "linear source jacobian",
        xj.source_jacobian(&StateVec([1.0, 0.0]), 1.0).0 == [[0.0, 0.0], [0.7, -1.0]],
    );
    check(
        "kinetic source jacobian row",
        bw.source_jacobian(&StateVec([1.0, 0.5, 0.625]), 1.0).0[2] == [0.375, 0.5, -1.0],
    );

    check(
        "stiff solve projects v",
        xj.solve_implicit_source(&StateVec([1.0, 0.0]), 1.0, 1e-14)
            .map(|u| approx(u[1], 0.7, 1e-13))
            == Ok(true),
    );
    check(
        "stiff solve projects z",
        bw.solve_implicit_source(&StateVec([1.0, 0.5, 0.0]), 1.0, 1e-14)
            .map(|u| approx(u[2], 0.625, 1e-13))
            == Ok(true),
    );
    check(
        "zero-step solve is identity",
        bw.solve_implicit_source(&StateVec([1.0, 0.5, 0.3]), 0.0, 1.0)
            == Ok(StateVec([1.0, 0.5, 0.3])),
    );

    check(
        "equilibrium closures",
        xj.equilibrium(&StateVec([2.0, 0.0])) == StateVec([2.0, 1.4])
            && approx(bw.equilibrium(&StateVec([1.0, 0.5, 0.0]))[2], 0.625, 1e-15)
            && approx(eh.equilibrium(&StateVec([1.0, 0.0, 7.0]))[2], 2.5, 1e-14),
    );
    check(
        "relaxed-limit fluxes",
        xj.relaxed_limit_flux(&[2.0]) == Ok(vec![1.4])
            && bw.relaxed_limit_flux(&[1.0, 0.5]) == Ok(vec![0.5, 0.625])
            && bw.relaxed_limit_flux(&[2.0, 0.0]) == Ok(vec![0.0, 1.0])
            && eh.relaxed_limit_flux(&[1.0, 0.0]).is_err(),
    );

    check(
        "time-derivative stencil",
        first_time_derivative(&xj, &StateVec([1.0, 0.0]), &StateVec([1.0, 0.1]), 0.1)
            == Ok(StateVec([-1.0, 0.0])),
    );
    check(
        "minmod selector",
        minmod(1.0, 2.0) == 1.0 && minmod(-1.0, 2.0) == 0.0 && minmod(-3.0, -2.0) == -2.0,
    );
    {
        let got = rusanov_flux(&xj, &StateVec([2.0, 1.4]), &StateVec([1.0, 0.7]));
        check(
            "dissipative flux arithmetic",
            got.map(|f| approx(f[0], 1.55, 1e-15) && approx(f[1], 1.85, 1e-15)) == Ok(true),
        );
    }

    {
        let g = Grid::build_uniform(0.0, 1.0, 5).unwrap();
        let mut prev = CellField::<1>::new(g);
        for (i, v) in [0.9, 1.0, 1.5, 1.2, 1.1].iter().enumerate() {
            prev.set(i, StateVec([*v]));
        }
        prev.apply_boundary(BoundaryKind::NeumannZero);
        let mut cand = prev.clone();
        cand.set(2, StateVec([1.6]));
        let cfg = MoodConfig::with_tolerances(1e-3, 1e-2);
        check(
            "maximum-principle bound arithmetic",
            detect_nad(&cand, &prev, &cfg)[2],
        );
    }

    check(
        "trapezoidal amplification",
        ode_amplification(SchemeKind::Cat2Trap, 0.0) == Ok(1.0)
            && ode_amplification(SchemeKind::Cat2Trap, -1e8).map(|r| approx(r, -1.0, 1e-6))
                == Ok(true),
    );
    check(
        "taylor amplification decays",
        ode_amplification(SchemeKind::Cat2Tay, -1e8).map(|r| r.abs() < 1e-7) == Ok(true),
    );
    {
        let tab = ButcherPair::second_order();
        check(
            "tableau constants",
            approx(tab.gamma(), 0.2928932188134524, 1e-15)
                && approx(tab.stage_weight() * 2.0 * tab.gamma(), 1.0, 1e-15),
        );
    }

    check(
        "case registry populated",
        crate::harness::registry().len() >= 6
            && crate::harness::find_case("Broadwell-RP1").is_ok()
            && crate::harness::find_case("nope").is_err(),
    );

    out
}
