//! High-gain differentiator estimating `[z_1, .., z_n]` from `z_1` alone.
//!
//! ```text
//! d/dt ẑ_i = ẑ_{i+1} + (a_i / mu^i) (z_1 - ẑ_1),   i < n
//! d/dt ẑ_n =           (a_n / mu^n) (z_1 - ẑ_1)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    /// `a_1 .. a_n`; `p^n + a_1 p^{n-1} + .. + a_n` must be Hurwitz.
    pub gains: Vec<f64>,
    /// Small positive time-scale, `0 < mu <= 1`.
    pub mu: f64,
}

impl ObserverConfig {
    pub fn new(gains: Vec<f64>, mu: f64) -> Result<Self> {
        let cfg = Self { gains, mu };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn order(&self) -> usize {
        self.gains.len()
    }

    /// Routh–Hurwitz check, orders 1 to 3.
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(invalid(format!("observer mu must lie in (0, 1], got {}", self.mu)));
        }
        if self.gains.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid(format!("observer gains must be positive, got {:?}", self.gains)));
        }
        match self.gains.as_slice() {
            [_] | [_, _] => Ok(()),
            [a1, a2, a3] if a1 * a2 > *a3 => Ok(()),
            [_, _, _] => Err(invalid(format!(
                "observer polynomial is not Hurwitz (need a1 a2 > a3), gains {:?}",
                self.gains
            ))),
            g => Err(invalid(format!("observer order must be 1 to 3, got {}", g.len()))),
        }
    }

    /// Diagonal of `H_mu`: `a_i / mu^i`.
    pub fn injection_gains(&self) -> Vec<f64> {
        self.gains
            .iter()
            .enumerate()
            .map(|(i, a)| a / self.mu.powi(i as i32 + 1))
            .collect()
    }

    /// Initial estimate `(z_1(0), 0, .., 0)`.
    pub fn init(&self, z1_0: f64) -> ObserverState {
        let mut z_hat = vec![0.0; self.order()];
        z_hat[0] = z1_0;
        ObserverState { z_hat }
    }

    pub fn deriv(&self, z_hat: &[f64], z1_meas: f64) -> Vec<f64> {
        let n = self.order();
        let innovation = z1_meas - z_hat[0];
        self.injection_gains()
            .into_iter()
            .enumerate()
            .map(|(i, h)| {
                let chain = if i + 1 < n { z_hat[i + 1] } else { 0.0 };
                chain + h * innovation
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObserverState {
    pub z_hat: Vec<f64>,
}
