use crate::constraint::ConstraintType;
use crate::control::{Actuator, BarrierKind};
use crate::manifold::{FeedbackLaw, ManifoldSpec, Skew, SkewedLaw};
use crate::observer::ObserverConfig;
use crate::plant::PlantId;

use super::config::{ConstraintSection, ControllerSection, ScenarioConfig, SimulationSection};

pub const PRESET_NAMES: [&str; 5] = ["finite", "finiteSat", "fixedveSat", "hofixed", "hofixedSat"];

fn scenario(
    name: &str,
    plant: PlantId,
    k_u: f64,
    constraint: ConstraintSection,
    laws: Vec<SkewedLaw>,
    observer_gains: Vec<f64>,
    (u_min, u_max): (f64, f64),
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        plant,
        eps_z: 0.1,
        output_dir: None,
        controller: ControllerSection { k_u, barrier: BarrierKind::LogRatio, rho_e: Some(0.01) },
        constraint,
        manifold: ManifoldSpec { laws },
        observer: ObserverConfig { gains: observer_gains, mu: 0.01 },
        actuator: Actuator { u_min, u_max },
        simulation: SimulationSection::default(),
    }
}

fn finite(name: &str, bounds: (f64, f64)) -> ScenarioConfig {
    scenario(
        name,
        PlantId::SecondOrder,
        5.0,
        ConstraintSection {
            kind: ConstraintType::Lamc,
            k_0: 2.0,
            t_s: 1.0,
            eps_x: Some(0.1),
            eps_y: None,
        },
        vec![SkewedLaw { base: FeedbackLaw::FiniteTime { k_c: 1.0, p: 0.5 }, skew: Skew::None }],
        vec![4.0, 4.0],
        bounds,
    )
}

fn fixed_ve_sat() -> ScenarioConfig {
    scenario(
        "fixedveSat",
        PlantId::SecondOrder,
        2.0,
        ConstraintSection {
            kind: ConstraintType::Lomc,
            k_0: 2.0,
            t_s: 1.0,
            eps_x: None,
            eps_y: Some(0.15),
        },
        vec![SkewedLaw {
            base: FeedbackLaw::VarExpFixedTime { k_c: 1.5, r_b: 0.5, r_1: 2.0, r_t: 3.0 },
            skew: Skew::Ssmd { eps_s: 0.15, eps_z: 0.1 },
        }],
        vec![4.0, 4.0],
        (-2.0, 3.0),
    )
}

fn hofixed(name: &str, bounds: (f64, f64)) -> ScenarioConfig {
    scenario(
        name,
        PlantId::ThirdOrder,
        30.0,
        ConstraintSection {
            kind: ConstraintType::Lomc,
            k_0: 2.0,
            t_s: 1.0,
            eps_x: None,
            eps_y: Some(5.0),
        },
        vec![
            SkewedLaw {
                base: FeedbackLaw::FixedTime { alpha: 1.0, beta: 0.5, p: 0.5, q: 2.0 },
                skew: Skew::Nsmd { eps_s: 0.2, eps_z: 0.1, k_pp: 0.1 },
            },
            SkewedLaw {
                base: FeedbackLaw::FixedTime { alpha: 2.0, beta: 1.0, p: 0.5, q: 2.0 },
                skew: Skew::Nsmd { eps_s: 5.0, eps_z: 0.2, k_pp: 1.0 },
            },
        ],
        vec![4.0, 6.0, 4.0],
        bounds,
    )
}

/// The benchmark scenario with the given name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "finite" => Some(finite("finite", (-100.0, 100.0))),
        "finiteSat" => Some(finite("finiteSat", (-2.5, 3.0))),
        "fixedveSat" => Some(fixed_ve_sat()),
        "hofixed" => Some(hofixed("hofixed", (-100.0, 100.0))),
        "hofixedSat" => Some(hofixed("hofixedSat", (-7.0, 9.0))),
        _ => None,
    }
}
