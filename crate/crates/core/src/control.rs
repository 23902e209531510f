//! Barrier map, manifold constraint controller, actuator saturation and
//! the analytic settling-time bounds.

use serde::{Deserialize, Serialize};

use crate::constraint::{BoundaryOffsets, FlexState};
use crate::error::{domain, invalid, Result};
use crate::manifold::{FeedbackLaw, ManifoldSpec, Skew};

/// `xi` is pulled back to `±XI_LIMIT` before the barrier map.
pub const XI_LIMIT: f64 = 1.0 - 1e-12;

/// Odd, strictly increasing bijection `(-1, 1) -> R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    /// `ln((1 + xi) / (1 - xi))`
    #[default]
    LogRatio,
    /// `xi / ((1 + xi)(1 - xi))`
    RationalBarrier,
}

pub fn gamma(kind: BarrierKind, xi: f64) -> Result<f64> {
    if !(xi.abs() < 1.0) {
        return Err(domain(format!("barrier argument {xi} outside (-1, 1)")));
    }
    Ok(match kind {
        BarrierKind::LogRatio => ((1.0 + xi) / (1.0 - xi)).ln(),
        BarrierKind::RationalBarrier => xi / ((1.0 + xi) * (1.0 - xi)),
    })
}

/// Actuator with hard output limits `u_min < 0 < u_max` (either may be
/// infinite).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Actuator {
    pub u_min: f64,
    pub u_max: f64,
}

impl Actuator {
    pub fn new(u_min: f64, u_max: f64) -> Result<Self> {
        let a = Self { u_min, u_max };
        a.validate()?;
        Ok(a)
    }

    pub fn unbounded() -> Self {
        Self { u_min: f64::NEG_INFINITY, u_max: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        if self.u_min < 0.0 && 0.0 < self.u_max {
            Ok(())
        } else {
            Err(invalid(format!(
                "actuator limits must satisfy u_min < 0 < u_max, got ({}, {})",
                self.u_min, self.u_max
            )))
        }
    }

    pub fn saturate(&self, v: f64) -> f64 {
        v.clamp(self.u_min, self.u_max)
    }

    pub fn is_saturated(&self, v: f64) -> bool {
        v <= self.u_min || v >= self.u_max
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerParams {
    pub k_u: f64,
    pub barrier: BarrierKind,
    pub boundary: BoundaryOffsets,
    pub manifold: ManifoldSpec,
    /// Flexible-boundary margin; `None` selects the rigid controller.
    pub rho_e: Option<f64>,
}

/// Quantities computed alongside one control evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub s: Vec<f64>,
    pub s_dot_prev: f64,
    /// Constrained coordinate (`s` for LoMC, lateral distance otherwise).
    pub coordinate: f64,
    /// Half-width in use (flexible when enabled).
    pub bound_upper: f64,
    /// Nominal half-width.
    pub nominal_upper: f64,
    /// Constraint variable fed to the barrier map, after clamping.
    pub xi: f64,
    /// Rigid constraint variable.
    pub xi_raw: f64,
    pub clamped: bool,
    pub blend: f64,
}

/// `v = -k_u Γ(xi)` with `xi` taken against the flexible boundaries when
/// `rho_e` is set.
#[derive(Clone, Debug)]
pub struct ManifoldConstraintController {
    params: ControllerParams,
    flex: Option<FlexState>,
    clamp_events: u64,
}

impl ManifoldConstraintController {
    pub fn new(params: ControllerParams) -> Result<Self> {
        if !(params.k_u > 0.0 && params.k_u.is_finite()) {
            return Err(invalid(format!("k_u must be positive, got {}", params.k_u)));
        }
        params.manifold.validate()?;
        let flex = params.rho_e.map(FlexState::new).transpose()?;
        Ok(Self { params, flex, clamp_events: 0 })
    }

    pub fn params(&self) -> &ControllerParams {
        &self.params
    }

    pub fn flex_state(&self) -> Option<&FlexState> {
        self.flex.as_ref()
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    pub fn control_v(&mut self, z_hat: &[f64], t: f64) -> Result<(f64, StepDiagnostics)> {
        let p = &self.params;
        let (geometry, xi, bound_upper, blend) = match self.flex.as_mut() {
            Some(state) => {
                let f = p.boundary.xi_flex(state, &p.manifold, z_hat, t)?;
                (f.geometry, f.xi, f.scale_flex, f.blend)
            }
            None => {
                let g = p.boundary.evaluate(&p.manifold, z_hat, t)?;
                let xi = g.xi();
                let scale = g.scale;
                (g, xi, scale, 0.0)
            }
        };
        if xi.is_nan() {
            return Err(domain(format!("constraint variable is NaN at t = {t}")));
        }
        let clamped = xi.abs() > XI_LIMIT;
        let xi_used = xi.clamp(-XI_LIMIT, XI_LIMIT);
        if clamped {
            self.clamp_events += 1;
            if let Some(st) = self.flex.as_mut() {
                st.clamp_events += 1;
            }
        }
        let v = -p.k_u * gamma(p.barrier, xi_used)?;
        let xi_raw = geometry.xi();
        let diag = StepDiagnostics {
            s_dot_prev: geometry.manifold.s_dot_prev,
            coordinate: geometry.coordinate,
            nominal_upper: geometry.scale,
            s: geometry.manifold.s,
            bound_upper,
            xi: xi_used,
            xi_raw,
            clamped,
            blend,
        };
        Ok((v, diag))
    }
}

/// Finite-time manifold with lateral constraint:
/// `T_s + |z_1(0)|^{1-p} / (k_c (1 - p))`.
pub fn finite_time_settling_bound(z1_0: f64, k_c: f64, p: f64, t_s: f64) -> f64 {
    t_s + z1_0.abs().powf(1.0 - p) / (k_c * (1.0 - p))
}

/// Variable-exponent fixed-time manifold:
/// `T_s + 1 / (k_c (r_1 - 1)) + 1 / (k_c e^{-a/(2e)} (1 - r_b))`.
pub fn var_exp_settling_bound(k_c: f64, r_b: f64, r_1: f64, r_t: f64, t_s: f64) -> f64 {
    let b = (r_1 - r_b) / (r_t - r_1);
    let a = (r_t - r_b) * b;
    let e = std::f64::consts::E;
    t_s + 1.0 / (k_c * (r_1 - 1.0)) + 1.0 / (k_c * (-a / (2.0 * e)).exp() * (1.0 - r_b))
}

/// Recursive fixed-time manifold:
/// `T_s + Σ (1 / (alpha_i (1 - p_i)) + 1 / (beta_i (q_i - 1)))`.
pub fn recursive_fixed_time_settling_bound(laws: &[(f64, f64, f64, f64)], t_s: f64) -> f64 {
    t_s + laws
        .iter()
        .map(|&(alpha, beta, p, q)| 1.0 / (alpha * (1.0 - p)) + 1.0 / (beta * (q - 1.0)))
        .sum::<f64>()
}

/// Analytic upper bound on the time for `|z_1|` to reach its prescribed
/// accuracy, when the manifold matches one of the analysed designs.
pub fn settling_bound(manifold: &ManifoldSpec, z1_0: f64, t_s: f64) -> Option<f64> {
    match manifold.laws.as_slice() {
        [law] => match (law.base, law.skew) {
            (FeedbackLaw::FiniteTime { k_c, p }, Skew::None) => {
                Some(finite_time_settling_bound(z1_0, k_c, p, t_s))
            }
            (FeedbackLaw::VarExpFixedTime { k_c, r_b, r_1, r_t }, _) => {
                Some(var_exp_settling_bound(k_c, r_b, r_1, r_t, t_s))
            }
            (FeedbackLaw::FixedTime { alpha, beta, p, q }, _) => {
                Some(recursive_fixed_time_settling_bound(&[(alpha, beta, p, q)], t_s))
            }
            _ => None,
        },
        laws => {
            let params: Option<Vec<_>> = laws
                .iter()
                .map(|l| match l.base {
                    FeedbackLaw::FixedTime { alpha, beta, p, q } => Some((alpha, beta, p, q)),
                    _ => None,
                })
                .collect();
            params.map(|ps| recursive_fixed_time_settling_bound(&ps, t_s))
        }
    }
}
