use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constraint::{BoundarySchedule, ConstraintType};
use crate::control::{Actuator, BarrierKind};
use crate::error::{invalid, Error, Result};
use crate::manifold::ManifoldSpec;
use crate::observer::ObserverConfig;
use crate::plant::{ControlDesign, Plant, PlantId, SimSettings};

use super::presets::preset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub k_u: f64,
    #[serde(default)]
    pub barrier: BarrierKind,
    /// Expansion margin of the flexible boundaries; rigid boundaries when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_e: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub kind: ConstraintType,
    pub k_0: f64,
    pub t_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_y: Option<f64>,
}

impl ConstraintSection {
    pub fn schedule(&self) -> BoundarySchedule {
        BoundarySchedule { eps_x: self.eps_x, eps_y: self.eps_y, k_0: self.k_0, t_s: self.t_s }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub dt: f64,
    pub horizon: f64,
    pub decimation: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let s = SimSettings::default();
        Self { dt: s.dt, horizon: s.horizon, decimation: s.decimation }
    }
}

/// A complete closed-loop scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub plant: PlantId,
    /// Prescribed tracking accuracy used for settling measurement.
    pub eps_z: f64,
    /// Where `run` writes `<name>.csv` unless overridden.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub controller: ControllerSection,
    pub constraint: ConstraintSection,
    pub manifold: ManifoldSpec,
    pub observer: ObserverConfig,
    pub actuator: Actuator,
    #[serde(default)]
    pub simulation: SimulationSection,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.plant.order();
        if !(self.eps_z > 0.0 && self.eps_z.is_finite()) {
            return Err(invalid(format!("eps_z must be positive, got {}", self.eps_z)));
        }
        let c = &self.controller;
        if !(c.k_u > 0.0 && c.k_u.is_finite()) {
            return Err(invalid(format!("controller.k_u must be positive, got {}", c.k_u)));
        }
        if let Some(rho) = c.rho_e {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(invalid(format!("controller.rho_e must be positive, got {rho}")));
            }
        }
        let b = &self.constraint;
        if !(b.k_0 > 1.0 && b.k_0.is_finite()) {
            return Err(invalid(format!("constraint.k_0 must exceed 1, got {}", b.k_0)));
        }
        if !(b.t_s > 0.0 && b.t_s.is_finite()) {
            return Err(invalid(format!("constraint.t_s must be positive, got {}", b.t_s)));
        }
        for (needed, value, key) in [
            (b.kind.uses_lateral(), b.eps_x, "eps_x"),
            (b.kind.uses_vertical(), b.eps_y, "eps_y"),
        ] {
            match value {
                None if needed => {
                    return Err(invalid(format!("constraint.{key} is required for {:?}", b.kind)))
                }
                Some(_) if !needed => {
                    return Err(invalid(format!("constraint.{key} is not used by {:?}", b.kind)))
                }
                Some(v) if !(v > 0.0 && v.is_finite()) => {
                    return Err(invalid(format!("constraint.{key} must be positive, got {v}")))
                }
                _ => {}
            }
        }
        self.manifold.validate()?;
        if self.manifold.order() != n {
            return Err(invalid(format!(
                "manifold order {} does not match plant order {n}",
                self.manifold.order()
            )));
        }
        self.observer.validate()?;
        if self.observer.order() != n {
            return Err(invalid(format!(
                "observer has {} gains, plant order is {n}",
                self.observer.order()
            )));
        }
        self.actuator.validate()?;
        let settings = self.settings();
        settings.validate()?;
        if settings.dt > self.observer.mu / 20.0 {
            return Err(invalid(format!(
                "simulation.dt = {} exceeds observer.mu / 20 = {}",
                settings.dt,
                self.observer.mu / 20.0
            )));
        }
        Ok(())
    }

    pub fn settings(&self) -> SimSettings {
        let s = &self.simulation;
        SimSettings { dt: s.dt, horizon: s.horizon, decimation: s.decimation }
    }

    pub fn design(&self) -> ControlDesign {
        ControlDesign {
            k_u: self.controller.k_u,
            barrier: self.controller.barrier,
            constraint: self.constraint.kind,
            schedule: self.constraint.schedule(),
            manifold: self.manifold.clone(),
            rho_e: self.controller.rho_e,
        }
    }

    /// Scenarios named `*Sat` are expected to drive the actuator into its
    /// limits.
    pub fn is_saturated_variant(&self) -> bool {
        self.name.ends_with("Sat")
    }
}

/// Resolves a preset name, or else reads a TOML scenario file.
pub fn load_config(name_or_path: &str) -> Result<ScenarioConfig> {
    if let Some(cfg) = preset(name_or_path) {
        return Ok(cfg);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Config(format!(
            "`{name_or_path}` is neither a preset nor an existing file"
        )));
    }
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml(&text)
}
