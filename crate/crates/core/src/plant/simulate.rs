use crate::constraint::{BoundaryOffsets, BoundarySchedule, ConstraintType};
use crate::control::{Actuator, BarrierKind, ControllerParams, ManifoldConstraintController};
use crate::error::{invalid, Error, Result};
use crate::manifold::ManifoldSpec;
use crate::observer::ObserverConfig;

use super::{rk4_step, Plant};

/// Controller design; the boundary offsets are sized from the initial
/// observer estimate when the simulation starts.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlDesign {
    pub k_u: f64,
    pub barrier: BarrierKind,
    pub constraint: ConstraintType,
    pub schedule: BoundarySchedule,
    pub manifold: ManifoldSpec,
    pub rho_e: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub horizon: f64,
    /// Emit a record every `decimation` integration steps.
    pub decimation: usize,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self { dt: 1e-4, horizon: 10.0, decimation: 10 }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.decimation == 0 {
            return Err(invalid("decimation must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// One logged sample of the closed loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub z_true: Vec<f64>,
    pub z_hat: Vec<f64>,
    /// Manifold value `s`.
    pub s: f64,
    /// Lateral constraint coordinate (LaMC/OMC); NaN under LoMC.
    pub s_fn: f64,
    /// Constrained coordinate (`s` under LoMC, `s_fn` otherwise).
    pub coordinate: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub nominal_upper: f64,
    pub xi: f64,
    pub v: f64,
    pub u: f64,
    /// Analytic total gain `G`.
    pub gain: f64,
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    pub records: Vec<SimRecord>,
    pub clamp_events: u64,
    pub expanded_steps: u64,
    pub steps: usize,
    pub actuator: Actuator,
}

fn check_finite(values: &[f64], prefix: &str, t: f64) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Diverged {
            quantity: format!("{prefix}{}", i + 1),
            value: values[i],
            t,
        }),
        None => Ok(()),
    }
}

/// Runs the output-feedback closed loop.
///
/// Each step reads `z_1`, evaluates the controller on the step-start
/// estimate, saturates, and advances plant and observer jointly with RK4
/// while holding `u`. `noise(t)` is added to the measured `z_1` and held
/// over the step.
pub fn simulate<P: Plant>(
    plant: &P,
    design: &ControlDesign,
    observer: &ObserverConfig,
    actuator: &Actuator,
    settings: &SimSettings,
    mut noise: impl FnMut(f64) -> f64,
) -> Result<SimOutput> {
    settings.validate()?;
    observer.validate()?;
    actuator.validate()?;
    let n = plant.order();
    if observer.order() != n || design.manifold.order() != n {
        return Err(invalid(format!(
            "plant order {n}, observer order {} and manifold order {} must agree",
            observer.order(),
            design.manifold.order()
        )));
    }
    if settings.dt > observer.mu / 20.0 {
        return Err(invalid(format!(
            "dt = {} is too large for observer mu = {} (need dt <= mu / 20)",
            settings.dt, observer.mu
        )));
    }

    let x0 = plant.initial_state();
    let z_hat0 = observer.init(plant.output_error(&x0, 0.0) + noise(0.0)).z_hat;
    let boundary = BoundaryOffsets::init(design.constraint, &design.schedule, &z_hat0, &design.manifold)?;
    let mut controller = ManifoldConstraintController::new(ControllerParams {
        k_u: design.k_u,
        barrier: design.barrier,
        boundary,
        manifold: design.manifold.clone(),
        rho_e: design.rho_e,
    })?;

    let lateral = design.constraint != ConstraintType::Lomc;
    let steps = settings.steps();
    let mut records = Vec::with_capacity(steps / settings.decimation + 1);
    let mut state: Vec<f64> = x0.into_iter().chain(z_hat0).collect();

    for k in 0..=steps {
        let t = k as f64 * settings.dt;
        let (x, z_hat) = state.split_at(n);
        let (v, diag) = controller.control_v(z_hat, t)?;
        if !v.is_finite() {
            return Err(Error::Diverged { quantity: "v".into(), value: v, t });
        }
        let u = actuator.saturate(v);

        if k % settings.decimation == 0 {
            let s = diag.s[n - 1];
            records.push(SimRecord {
                t,
                z_true: plant.true_errors(x, t).into_inner(),
                z_hat: z_hat.to_vec(),
                s,
                s_fn: if lateral { diag.coordinate } else { f64::NAN },
                coordinate: diag.coordinate,
                bound_lower: -diag.bound_upper,
                bound_upper: diag.bound_upper,
                nominal_upper: diag.nominal_upper,
                xi: diag.xi,
                v,
                u,
                gain: plant.total_gain(x, t),
                clamped: diag.clamped,
            });
        }
        if k == steps {
            break;
        }

        let disturbance = noise(t);
        state = rk4_step(
            |tau, y| {
                let (x, z_hat) = y.split_at(n);
                let z1 = plant.output_error(x, tau) + disturbance;
                let mut dy = plant.deriv(x, tau, u);
                dy.extend(observer.deriv(z_hat, z1));
                dy
            },
            &state,
            t,
            settings.dt,
        );
        let t_next = (k + 1) as f64 * settings.dt;
        check_finite(&state[..n], "x", t_next)?;
        check_finite(&state[n..], "zhat", t_next)?;
    }

    Ok(SimOutput {
        records,
        clamp_events: controller.clamp_events(),
        expanded_steps: controller.flex_state().map_or(0, |f| f.expanded_steps),
        steps,
        actuator: *actuator,
    })
}
