//! Constraint region geometry on the `(s_{n-1}, ds_{n-1}/dt)` phase plane.
//!
//! The zero manifold `y = h(x)` (with `h = h_{n-1}`) is translated by
//! symmetric, shrinking offsets to form an upper boundary
//! `y = h(x - x_U) + y_U` and a lower boundary `y = h(x + x_U) - y_U`.
//! Three translation types are supported:
//!
//! | type   | offsets          | normalised coordinate                     |
//! |--------|------------------|-------------------------------------------|
//! | `Lomc` | vertical only    | `s / y_U`                                 |
//! | `Lamc` | lateral only     | `(s_{n-1} - h_v(ds_{n-1})) / x_U`         |
//! | `Omc`  | both, oblique    | `(s_{n-1} - x_c) / x_U`                   |
//!
//! where `(x_c, y_c)` is the point of the zero manifold reached along the
//! direction `(x_U, y_U)`.
//!
//! The flexible variant widens the boundaries whenever the state comes
//! within `rho_e` of them, so that the normalised coordinate stays inside
//! `(-1, 1)`; once the state is back deeper than `rho_e` the nominal
//! boundaries are used again unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::manifold::{ManifoldEval, ManifoldSpec};
use crate::numeric::root_decreasing;
use crate::xfun::{trans_s, PerfFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintType {
    /// Oblique translation.
    Omc,
    /// Longitudinal (vertical) translation.
    Lomc,
    /// Lateral (horizontal) translation.
    Lamc,
}

impl ConstraintType {
    pub fn uses_lateral(self) -> bool {
        matches!(self, ConstraintType::Omc | ConstraintType::Lamc)
    }

    pub fn uses_vertical(self) -> bool {
        matches!(self, ConstraintType::Omc | ConstraintType::Lomc)
    }
}

/// Shrinking schedule of the boundary offsets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySchedule {
    /// Final lateral offset; required by `Lamc` and `Omc`.
    pub eps_x: Option<f64>,
    /// Final vertical offset; required by `Lomc` and `Omc`.
    pub eps_y: Option<f64>,
    /// Initial enlargement factor, `> 1`.
    pub k_0: f64,
    /// Time at which the offsets reach their final values.
    pub t_s: f64,
}

/// Symmetric boundary offsets `x_U = -x_L`, `y_U = -y_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryOffsets {
    ctype: ConstraintType,
    x_fn: Option<PerfFn>,
    y_fn: Option<PerfFn>,
}

/// Where a state sits relative to the translated boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Inside,
    OutsideUpper,
    OutsideLower,
}

/// Geometry of one error state against the nominal boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintEval {
    pub manifold: ManifoldEval,
    pub x_upper: f64,
    pub y_upper: f64,
    /// Signed coordinate normalised by `scale` to give `xi`
    /// (`s` for `Lomc`, the lateral distance for `Lamc`/`Omc`).
    pub coordinate: f64,
    /// Nominal half-width of the region in the units of `coordinate`.
    pub scale: f64,
    /// `(x_c, y_c)` for `Omc`.
    pub intersection: Option<(f64, f64)>,
    /// Distance from the zero manifold used by the flexible boundaries.
    pub distance: f64,
    /// Distance from the zero manifold to the nominal boundary.
    pub distance_nominal: f64,
}

impl ConstraintEval {
    /// Rigid constraint variable.
    pub fn xi(&self) -> f64 {
        self.coordinate / self.scale
    }
}

/// Per-simulation state of the error-driven flexible boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct FlexState {
    pub rho_e: f64,
    pub last_x_upper_flex: f64,
    pub last_y_upper_flex: f64,
    pub d_sc: f64,
    pub d_u: f64,
    pub blend: f64,
    /// Steps where `xi` had to be pulled back inside `(-1, 1)`.
    pub clamp_events: u64,
    /// Steps where the flexible boundary was wider than the nominal one.
    pub expanded_steps: u64,
}

impl FlexState {
    pub fn new(rho_e: f64) -> Result<Self> {
        if !(rho_e > 0.0 && rho_e.is_finite()) {
            return Err(invalid(format!("rho_e must be positive, got {rho_e}")));
        }
        Ok(Self {
            rho_e,
            last_x_upper_flex: 0.0,
            last_y_upper_flex: 0.0,
            d_sc: 0.0,
            d_u: 0.0,
            blend: 0.0,
            clamp_events: 0,
            expanded_steps: 0,
        })
    }
}

/// Result of evaluating the flexible constraint variable.
#[derive(Clone, Debug, PartialEq)]
pub struct FlexEval {
    pub geometry: ConstraintEval,
    /// Flexible constraint variable, before any clamping.
    pub xi: f64,
    pub x_upper_flex: f64,
    pub y_upper_flex: f64,
    /// Flexible half-width in the units of `geometry.coordinate`.
    pub scale_flex: f64,
    pub blend: f64,
}

impl BoundaryOffsets {
    /// Builds offsets from explicit envelopes, checking that they match the
    /// constraint type.
    pub fn from_envelopes(
        ctype: ConstraintType,
        x_fn: Option<PerfFn>,
        y_fn: Option<PerfFn>,
    ) -> Result<Self> {
        if ctype.uses_lateral() != x_fn.is_some() || ctype.uses_vertical() != y_fn.is_some() {
            return Err(invalid(format!(
                "{ctype:?} needs lateral offset: {}, vertical offset: {}",
                ctype.uses_lateral(),
                ctype.uses_vertical()
            )));
        }
        Ok(Self { ctype, x_fn, y_fn })
    }

    /// Sizes the offsets from the initial (estimated) error state so that
    /// the state starts well inside the region.
    pub fn init(
        ctype: ConstraintType,
        schedule: &BoundarySchedule,
        z0: &[f64],
        manifold: &ManifoldSpec,
    ) -> Result<Self> {
        if !(schedule.k_0 > 1.0 && schedule.k_0.is_finite()) {
            return Err(invalid(format!("k_0 must exceed 1, got {}", schedule.k_0)));
        }
        let m0 = manifold.eval(z0)?;
        let law = manifold.last_law();

        let x_fn = if ctype.uses_lateral() {
            let eps_x = schedule
                .eps_x
                .ok_or_else(|| invalid(format!("{ctype:?} needs eps_x")))?;
            let s_x0 = (law.inverse(m0.s_dot_prev)? - m0.s_prev()).abs();
            Some(PerfFn::new(schedule.k_0 * s_x0.max(eps_x), eps_x, schedule.t_s)?)
        } else {
            None
        };
        let y_fn = if ctype.uses_vertical() {
            let eps_y = schedule
                .eps_y
                .ok_or_else(|| invalid(format!("{ctype:?} needs eps_y")))?;
            let s_y0 = (law.value(m0.s_prev()) - m0.s_dot_prev).abs();
            Some(PerfFn::new(schedule.k_0 * s_y0.max(eps_y), eps_y, schedule.t_s)?)
        } else {
            None
        };
        Self::from_envelopes(ctype, x_fn, y_fn)
    }

    pub fn ctype(&self) -> ConstraintType {
        self.ctype
    }

    pub fn lateral_envelope(&self) -> Option<&PerfFn> {
        self.x_fn.as_ref()
    }

    pub fn vertical_envelope(&self) -> Option<&PerfFn> {
        self.y_fn.as_ref()
    }

    pub fn x_upper(&self, t: f64) -> f64 {
        self.x_fn.map_or(0.0, |f| f.value(t))
    }

    pub fn y_upper(&self, t: f64) -> f64 {
        self.y_fn.map_or(0.0, |f| f.value(t))
    }

    /// Solves `x_U (h(x_c) - ds) = y_U (x_c - s)` for the oblique
    /// intersection, returning `(x_c, h(x_c))`.
    pub fn omc_intersection(
        &self,
        manifold: &ManifoldSpec,
        s_prev: f64,
        s_dot_prev: f64,
        t: f64,
    ) -> Result<(f64, f64)> {
        let (x_u, y_u) = (self.x_upper(t), self.y_upper(t));
        if !(x_u > 0.0) {
            return Err(invalid("oblique intersection needs a positive lateral offset"));
        }
        let law = manifold.last_law();
        let x_c = root_decreasing(
            |x| x_u * (law.value(x) - s_dot_prev) - y_u * (x - s_prev),
            s_prev,
        )?;
        Ok((x_c, law.value(x_c)))
    }

    /// Nominal geometry of `z` at time `t`.
    pub fn evaluate(&self, manifold: &ManifoldSpec, z: &[f64], t: f64) -> Result<ConstraintEval> {
        let m = manifold.eval(z)?;
        let (x_u, y_u) = (self.x_upper(t), self.y_upper(t));
        let (s_prev, s_dot) = (m.s_prev(), m.s_dot_prev);
        let (coordinate, scale, intersection, distance, distance_nominal) = match self.ctype {
            ConstraintType::Lomc => {
                let s = m.manifold();
                (s, y_u, None, s.abs(), y_u)
            }
            ConstraintType::Lamc => {
                let s_fn = s_prev - manifold.last_law().inverse(s_dot)?;
                (s_fn, x_u, None, s_fn.abs(), x_u)
            }
            ConstraintType::Omc => {
                let (x_c, y_c) = self.omc_intersection(manifold, s_prev, s_dot, t)?;
                let d_sc = (s_prev - x_c).hypot(s_dot - y_c);
                (s_prev - x_c, x_u, Some((x_c, y_c)), d_sc, x_u.hypot(y_u))
            }
        };
        Ok(ConstraintEval {
            manifold: m,
            x_upper: x_u,
            y_upper: y_u,
            coordinate,
            scale,
            intersection,
            distance,
            distance_nominal,
        })
    }

    /// Rigid constraint variable `xi`.
    pub fn xi_raw(&self, manifold: &ManifoldSpec, z: &[f64], t: f64) -> Result<f64> {
        Ok(self.evaluate(manifold, z, t)?.xi())
    }

    /// Flexible constraint variable against boundaries widened by the
    /// error-driven blend `S((d - (D - rho_e)) / rho_e)`.
    pub fn xi_flex(
        &self,
        state: &mut FlexState,
        manifold: &ManifoldSpec,
        z: &[f64],
        t: f64,
    ) -> Result<FlexEval> {
        let geometry = self.evaluate(manifold, z, t)?;
        let flex = self.expand(state.rho_e, geometry);
        state.last_x_upper_flex = flex.x_upper_flex;
        state.last_y_upper_flex = flex.y_upper_flex;
        state.d_sc = flex.geometry.distance;
        state.d_u = flex.geometry.distance_nominal;
        state.blend = flex.blend;
        if flex.blend > 0.0 {
            state.expanded_steps += 1;
        }
        Ok(flex)
    }

    fn expand(&self, rho_e: f64, geometry: ConstraintEval) -> FlexEval {
        let (d, d_nom) = (geometry.distance, geometry.distance_nominal);
        let blend = trans_s((d - (d_nom - rho_e)) / rho_e);
        let (x_flex, y_flex, scale_flex) = if blend == 0.0 {
            (geometry.x_upper, geometry.y_upper, geometry.scale)
        } else {
            match self.ctype {
                ConstraintType::Lomc => {
                    let y = (1.0 - blend) * geometry.y_upper + blend * (d + rho_e);
                    (geometry.x_upper, y, y)
                }
                ConstraintType::Lamc => {
                    let x = (1.0 - blend) * geometry.x_upper + blend * (d + rho_e);
                    (x, geometry.y_upper, x)
                }
                ConstraintType::Omc => {
                    let grow = (1.0 - blend) + blend * (d + rho_e) / d_nom;
                    let x = grow * geometry.x_upper;
                    (x, grow * geometry.y_upper, x)
                }
            }
        };
        FlexEval {
            xi: geometry.coordinate / scale_flex,
            x_upper_flex: x_flex,
            y_upper_flex: y_flex,
            scale_flex,
            blend,
            geometry,
        }
    }

    /// Classifies `z` using the translation function
    /// `s_m(x, y) = ds_{n-1} - h(s_{n-1} - x) - y`.
    pub fn region_membership(&self, manifold: &ManifoldSpec, z: &[f64], t: f64) -> Result<Region> {
        let m = manifold.eval(z)?;
        let law = manifold.last_law();
        let (x_u, y_u) = (self.x_upper(t), self.y_upper(t));
        let s_m = |x: f64, y: f64| m.s_dot_prev - law.value(m.s_prev() - x) - y;
        if s_m(x_u, y_u) >= 0.0 {
            Ok(Region::OutsideUpper)
        } else if s_m(-x_u, -y_u) <= 0.0 {
            Ok(Region::OutsideLower)
        } else {
            Ok(Region::Inside)
        }
    }
}
