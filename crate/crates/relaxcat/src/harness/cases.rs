//! Built-in experiment definitions: initial data, domains, boundary
//! handling, stiffness menus, and per-case detector tolerances.

use crate::error::HarnessError;
use crate::grid::BoundaryKind;
use crate::state::StateVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    XinJinSmooth,
    XinJinSquare,
    XinJinSquareLong,
    BroadwellSmooth,
    BroadwellRp1,
    BroadwellRp2,
    EulerHeatRp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFamily {
    XinJin,
    Broadwell,
    EulerHeat,
}

#[derive(Clone, Debug)]
pub struct TestCase {
    pub name: &'static str,
    pub kind: CaseKind,
    pub x_left: f64,
    pub x_right: f64,
    pub boundary: BoundaryKind,
    pub t_final: f64,
    /// Default Courant number; the comparison scheme may carry its own.
    pub cfl: f64,
    pub rk2_cfl: Option<f64>,
    pub eps_values: Vec<f64>,
    pub mood_eps1: f64,
    pub mood_eps2: f64,
    /// Whether the initial data lies on the equilibrium manifold.
    pub well_prepared: bool,
    /// Relaxation slope for the two-component cases.
    pub xin_jin_a: f64,
}

impl TestCase {
    pub fn family(&self) -> ModelFamily {
        match self.kind {
            CaseKind::XinJinSmooth | CaseKind::XinJinSquare | CaseKind::XinJinSquareLong => {
                ModelFamily::XinJin
            }
            CaseKind::BroadwellSmooth | CaseKind::BroadwellRp1 | CaseKind::BroadwellRp2 => {
                ModelFamily::Broadwell
            }
            CaseKind::EulerHeatRp => ModelFamily::EulerHeat,
        }
    }

    pub fn dim(&self) -> usize {
        match self.family() {
            ModelFamily::XinJin => 2,
            _ => 3,
        }
    }

    /// Courant number for a given scheme label; the comparison scheme may
    /// use its own, tighter value.
    pub fn cfl_for(&self, scheme: crate::scheme::SchemeKind) -> f64 {
        match scheme {
            crate::scheme::SchemeKind::ImexRk2 => self.rk2_cfl.unwrap_or(self.cfl),
            _ => self.cfl,
        }
    }

    pub fn initial_state_2(&self, x: f64) -> StateVec<2> {
        let a = self.xin_jin_a;
        match self.kind {
            CaseKind::XinJinSmooth => {
                let u = 1.0 + (2.0 * std::f64::consts::PI * x).sin();
                StateVec([u, a * u])
            }
            CaseKind::XinJinSquare | CaseKind::XinJinSquareLong => {
                let u = if x > 0.25 && x < 0.5 { 2.0 } else { 1.0 };
                StateVec([u, a * u])
            }
            _ => unreachable!("two-component initial data requested for {:?}", self.kind),
        }
    }

    pub fn initial_state_3(&self, x: f64) -> StateVec<3> {
        match self.kind {
            CaseKind::BroadwellSmooth => {
                let s = (2.0 * std::f64::consts::PI * x).sin();
                let rho = 1.0 + 0.3 * s;
                let v = 0.5 + 0.1 * s;
                StateVec([rho, rho * v, 0.5 * rho * (1.0 + v * v)])
            }
            CaseKind::BroadwellRp1 => {
                if x <= 0.2 {
                    StateVec([2.0, 1.0, 1.0])
                } else {
                    StateVec([1.0, 0.13962, 1.0])
                }
            }
            CaseKind::BroadwellRp2 => {
                if x <= 0.0 {
                    StateVec([1.0, 0.0, 1.0])
                } else {
                    StateVec([0.2, 0.0, 1.0])
                }
            }
            CaseKind::EulerHeatRp => {
                // Default shock-tube data; gamma-law energy with gamma = 1.4.
                let (rho, p) = if x <= 0.5 { (1.0, 1.0) } else { (0.125, 0.1) };
                StateVec([rho, 0.0, p / 0.4])
            }
            _ => unreachable!("three-component initial data requested for {:?}", self.kind),
        }
    }
}

fn eps_decades(from_exp: i32, to_exp: i32) -> Vec<f64> {
    (to_exp..=from_exp).rev().map(|e| 10f64.powi(e)).collect()
}

/// All built-in cases.
pub fn registry() -> Vec<TestCase> {
    vec![
        TestCase {
            name: "XinJin-smooth",
            kind: CaseKind::XinJinSmooth,
            x_left: 0.0,
            x_right: 1.0,
            boundary: BoundaryKind::Periodic,
            t_final: 1.0,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: eps_decades(0, -14),
            mood_eps1: 1e-3,
            mood_eps2: 1e-2,
            well_prepared: true,
            xin_jin_a: 0.7,
        },
        TestCase {
            name: "XinJin-square",
            kind: CaseKind::XinJinSquare,
            x_left: 0.0,
            x_right: 1.0,
            boundary: BoundaryKind::Periodic,
            t_final: 0.35,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: vec![1.0, 1e-8],
            mood_eps1: 1e-4,
            mood_eps2: 1e-3,
            well_prepared: true,
            xin_jin_a: 0.7,
        },
        TestCase {
            name: "XinJin-square-long",
            kind: CaseKind::XinJinSquareLong,
            x_left: 0.0,
            x_right: 1.0,
            boundary: BoundaryKind::Periodic,
            t_final: 3.0,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: vec![1.0, 1e-8],
            mood_eps1: 1e-4,
            mood_eps2: 1e-3,
            well_prepared: true,
            xin_jin_a: 0.7,
        },
        TestCase {
            name: "Broadwell-smooth",
            kind: CaseKind::BroadwellSmooth,
            x_left: 0.0,
            x_right: 1.0,
            boundary: BoundaryKind::Periodic,
            t_final: 1.0,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: eps_decades(0, -14),
            mood_eps1: 1e-3,
            mood_eps2: 1e-2,
            well_prepared: true,
            xin_jin_a: 0.0,
        },
        TestCase {
            name: "Broadwell-RP1",
            kind: CaseKind::BroadwellRp1,
            x_left: -1.0,
            x_right: 1.0,
            boundary: BoundaryKind::NeumannZero,
            t_final: 0.5,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: vec![1.0, 0.02, 1e-8],
            mood_eps1: 1e-4,
            mood_eps2: 1e-3,
            well_prepared: false,
            xin_jin_a: 0.0,
        },
        TestCase {
            name: "Broadwell-RP2",
            kind: CaseKind::BroadwellRp2,
            x_left: -1.0,
            x_right: 1.0,
            boundary: BoundaryKind::NeumannZero,
            t_final: 0.25,
            cfl: 0.9,
            rk2_cfl: None,
            eps_values: vec![1e-8],
            mood_eps1: 1e-4,
            mood_eps2: 1e-3,
            well_prepared: false,
            xin_jin_a: 0.0,
        },
        TestCase {
            name: "EulerHeat-RP",
            kind: CaseKind::EulerHeatRp,
            x_left: 0.0,
            x_right: 1.0,
            boundary: BoundaryKind::NeumannZero,
            t_final: 0.3,
            cfl: 0.7,
            rk2_cfl: Some(0.4),
            eps_values: vec![1e-8],
            mood_eps1: 1e-4,
            mood_eps2: 1e-3,
            well_prepared: false,
            xin_jin_a: 0.0,
        },
    ]
}

pub fn find_case(name: &str) -> Result<TestCase, HarnessError> {
    registry()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| HarnessError::UnknownCase(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Broadwell, Model};

    #[test]
    fn registry_has_all_named_cases() {
        let names: Vec<&str> = registry().iter().map(|c| c.name).collect();
        assert!(names.len() >= 6);
        for expected in [
            "XinJin-smooth",
            "XinJin-square",
            "Broadwell-smooth",
            "Broadwell-RP1",
            "Broadwell-RP2",
            "EulerHeat-RP",
        ] {
            assert!(names.contains(&expected), "missing case {expected}");
        }
        assert!(find_case("no-such-case").is_err());
    }

    #[test]
    fn smooth_case_is_exactly_well_prepared() {
        let case = find_case("XinJin-smooth").unwrap();
        for i in 0..200 {
            let x = (i as f64 + 0.5) / 200.0;
            let u = case.initial_state_2(x);
            assert_eq!(u[1], 0.7 * u[0]);
        }
    }

    #[test]
    fn rp1_is_not_well_prepared() {
        let case = find_case("Broadwell-RP1").unwrap();
        assert!(!case.well_prepared);
        let left = case.initial_state_3(0.0);
        let eq = Broadwell.equilibrium(&left);
        // Left state carries z = 1 while equilibrium demands 1.25.
        assert!((left[2] - 1.0).abs() < 1e-15);
        assert!((eq[2] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn euler_case_uses_scheme_dependent_cfl() {
        let case = find_case("EulerHeat-RP").unwrap();
        assert_eq!(case.cfl_for(crate::scheme::SchemeKind::Cat2Tay), 0.7);
        assert_eq!(case.cfl_for(crate::scheme::SchemeKind::ImexRk2), 0.4);
    }

    #[test]
    fn stiffness_menus() {
        let smooth = find_case("XinJin-smooth").unwrap();
        assert_eq!(smooth.eps_values.len(), 15);
        assert_eq!(smooth.eps_values[0], 1.0);
        assert_eq!(*smooth.eps_values.last().unwrap(), 1e-14);
    }
}
