//! Smooth transition functions and the prescribed performance envelope.
//!
//! Three transition shapes are provided:
//!
//! * [`trans_t`], single-ended: `0` for `z <= 0`, rises to `1` at `z = 1`.
//! * [`trans_s`], double-ended: `0` for `z <= 0`, `1` for `z >= 1`.
//! * [`trans_u`], interval: `trans_s(|z|)`, even, flat at the origin.
//!
//! `trans_s` and `trans_u` are flat to every order at their joins, as is
//! `trans_t` at `z = 0`; their derivatives there are exactly zero. `trans_t`
//! is only defined up to `z = 1`, where its slope is `1`; the constant
//! extension beyond is a convenience for callers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Exponent arguments are clamped to this magnitude before `exp`.
const EXP_LIMIT: f64 = 700.0;

/// Single-ended transition `exp((z-1)/z)` on `(0, 1)`.
///
/// Extended with the value `1` above `z = 1`.
pub fn trans_t(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        ((z - 1.0) / z).max(-EXP_LIMIT).exp()
    }
}

/// Derivative of [`trans_t`], taken from the left at `z = 1`.
pub fn trans_t_deriv(z: f64) -> f64 {
    if z <= 0.0 || z > 1.0 {
        return 0.0;
    }
    let arg = (z - 1.0) / z;
    if arg < -EXP_LIMIT {
        return 0.0;
    }
    arg.exp() / (z * z)
}

/// Double-ended transition `1 / (exp((1-2z)/(z(1-z))) + 1)` on `(0, 1)`.
pub fn trans_s(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        let arg = ((1.0 - 2.0 * z) / (z * (1.0 - z))).clamp(-EXP_LIMIT, EXP_LIMIT);
        1.0 / (arg.exp() + 1.0)
    }
}

pub fn trans_s_deriv(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        return 0.0;
    }
    let w = z * (1.0 - z);
    let arg = (1.0 - 2.0 * z) / w;
    if arg.abs() > EXP_LIMIT {
        return 0.0;
    }
    // e^a / (e^a + 1)^2 == 1 / (4 cosh^2(a/2))
    let c = (0.5 * arg).cosh();
    let logistic_slope = 0.25 / (c * c);
    logistic_slope * (2.0 * z * z - 2.0 * z + 1.0) / (w * w)
}

/// Interval transition `trans_s(|z|)`.
pub fn trans_u(z: f64) -> f64 {
    trans_s(z.abs())
}

pub fn trans_u_deriv(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    z.signum() * trans_s_deriv(z.abs())
}

/// Prescribed performance envelope
/// `rho(t) = (rho0 - eps) * trans_t((T - t) / T) + eps`.
///
/// Starts at `rho0`, decays monotonically and sits at `eps` from `t_rho` on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfFn {
    rho0: f64,
    eps: f64,
    t_rho: f64,
}

impl PerfFn {
    pub fn new(rho0: f64, eps: f64, t_rho: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("performance accuracy must be positive, got {eps}")));
        }
        if !(rho0 > eps && rho0.is_finite()) {
            return Err(invalid(format!(
                "performance initial bound {rho0} must exceed accuracy {eps}"
            )));
        }
        if !(t_rho > 0.0 && t_rho.is_finite()) {
            return Err(invalid(format!("performance horizon must be positive, got {t_rho}")));
        }
        Ok(Self { rho0, eps, t_rho })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn t_rho(&self) -> f64 {
        self.t_rho
    }

    pub fn value(&self, t: f64) -> f64 {
        if t >= self.t_rho {
            return self.eps;
        }
        (self.rho0 - self.eps) * trans_t((self.t_rho - t) / self.t_rho) + self.eps
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t >= self.t_rho {
            return 0.0;
        }
        -(self.rho0 - self.eps) * trans_t_deriv((self.t_rho - t) / self.t_rho) / self.t_rho
    }
}
