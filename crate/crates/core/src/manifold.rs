//! Negative feedback laws, skewed manifold designs and the iterative
//! fully actuated manifold.
//!
//! A manifold of order `n` is built from `n - 1` strictly decreasing laws
//! `h_1 .. h_{n-1}`:
//!
//! ```text
//! s_1 = z_1
//! s_i = d/dt s_{i-1} - h_{i-1}(s_{i-1}),   i = 2..n
//! ```
//!
//! Orders 2 and 3 are supported. For `n = 3` the chain rule needs the first
//! derivative of `h_1`; higher orders would need higher derivatives.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{root_decreasing, signed_pow};
use crate::xfun::{trans_s, trans_s_deriv, trans_u, trans_u_deriv};

/// Fully actuated tracking error vector `[z_1, .., z_n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorState(Vec<f64>);

impl ErrorState {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(order: usize) -> Self {
        Self(vec![0.0; order])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ErrorState {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ErrorState {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Base (unskewed) negative feedback law `h_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeedbackLaw {
    /// `-b s`
    Linear { b: f64 },
    /// `-k_c ⌈s⌋^p`, `0 < p < 1`
    FiniteTime { k_c: f64, p: f64 },
    /// `-k_c ⌈s⌋^{p(s)}` with a smooth exponent running from `r_b` at the
    /// origin through `r_1` at `|s| = 1` towards `r_t`.
    VarExpFixedTime { k_c: f64, r_b: f64, r_1: f64, r_t: f64 },
    /// `-alpha ⌈s⌋^p - beta ⌈s⌋^q`, `0 < p < 1 < q`
    FixedTime { alpha: f64, beta: f64, p: f64, q: f64 },
}

/// The variable exponent `p(s) = a s^2 / (1 + b s^2) + r_b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarExponent {
    pub r_b: f64,
    pub r_1: f64,
    pub r_t: f64,
}

impl VarExponent {
    /// `(a, b)` chosen so that `p(0) = r_b`, `p(±1) = r_1`, `p(∞) = r_t`.
    pub fn coefficients(&self) -> (f64, f64) {
        let b = (self.r_1 - self.r_b) / (self.r_t - self.r_1);
        let a = (self.r_t - self.r_b) * b;
        (a, b)
    }

    pub fn at(&self, s: f64) -> f64 {
        let (a, b) = self.coefficients();
        let s2 = s * s;
        a * s2 / (1.0 + b * s2) + self.r_b
    }

    pub fn slope(&self, s: f64) -> f64 {
        let (a, b) = self.coefficients();
        let den = 1.0 + b * s * s;
        2.0 * a * s / (den * den)
    }
}

/// Exponent of the variable-exponent fixed-time law at `s`.
pub fn var_exp(r_b: f64, r_1: f64, r_t: f64, s: f64) -> f64 {
    VarExponent { r_b, r_1, r_t }.at(s)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl FeedbackLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FeedbackLaw::Linear { b } => positive("b", b),
            FeedbackLaw::FiniteTime { k_c, p } => {
                positive("k_c", k_c)?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("finite-time exponent must lie in (0, 1), got {p}")));
                }
                Ok(())
            }
            FeedbackLaw::VarExpFixedTime { k_c, r_b, r_1, r_t } => {
                positive("k_c", k_c)?;
                if !(r_b > 0.0 && r_b < 1.0 && 1.0 < r_1 && r_1 < r_t && r_t.is_finite()) {
                    return Err(invalid(format!(
                        "variable exponents need 0 < r_b < 1 < r_1 < r_t, got r_b = {r_b}, r_1 = {r_1}, r_t = {r_t}"
                    )));
                }
                Ok(())
            }
            FeedbackLaw::FixedTime { alpha, beta, p, q } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
                if !(p > 0.0 && p < 1.0 && q > 1.0 && q.is_finite()) {
                    return Err(invalid(format!(
                        "fixed-time exponents need 0 < p < 1 < q, got p = {p}, q = {q}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            FeedbackLaw::Linear { b } => -b * s,
            FeedbackLaw::FiniteTime { k_c, p } => -k_c * signed_pow(s, p),
            FeedbackLaw::VarExpFixedTime { k_c, r_b, r_1, r_t } => {
                let p = VarExponent { r_b, r_1, r_t }.at(s);
                -k_c * signed_pow(s, p)
            }
            FeedbackLaw::FixedTime { alpha, beta, p, q } => {
                -alpha * signed_pow(s, p) - beta * signed_pow(s, q)
            }
        }
    }

    /// `dh/ds`. Laws with a sub-linear exponent return `-inf` at `s = 0`.
    pub fn deriv(&self, s: f64) -> f64 {
        let m = s.abs();
        match *self {
            FeedbackLaw::Linear { b } => -b,
            FeedbackLaw::FiniteTime { k_c, p } => -k_c * p * m.powf(p - 1.0),
            FeedbackLaw::VarExpFixedTime { k_c, r_b, r_1, r_t } => {
                if m == 0.0 {
                    return f64::NEG_INFINITY;
                }
                // d/dm m^{p(m)} = m^p (p'(m) ln m + p / m); the law is odd so
                // its derivative is even in s.
                let e = VarExponent { r_b, r_1, r_t };
                let p = e.at(m);
                -k_c * m.powf(p) * (e.slope(m) * m.ln() + p / m)
            }
            FeedbackLaw::FixedTime { alpha, beta, p, q } => {
                -alpha * p * m.powf(p - 1.0) - beta * q * m.powf(q - 1.0)
            }
        }
    }
}

/// Vertical skew applied on top of a base law.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Skew {
    #[default]
    None,
    /// Smooth skew: `h_p(s) + T_1(s) eps_s`.
    Ssmd { eps_s: f64, eps_z: f64 },
    /// Nonsingular skew: blends the smooth skew with a linear segment of
    /// slope `-k_p` inside `|s| < eps_z`.
    Nsmd { eps_s: f64, eps_z: f64, k_pp: f64 },
}

/// A base law with an optional skew: one link `h_m` of the manifold chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewedLaw {
    pub base: FeedbackLaw,
    #[serde(default)]
    pub skew: Skew,
}

/// `T_1 = 1 - 2 S((s + eps_z) / (2 eps_z))` and its derivative.
fn offset_blend(s: f64, eps_z: f64) -> (f64, f64) {
    let arg = (s + eps_z) / (2.0 * eps_z);
    (1.0 - 2.0 * trans_s(arg), -trans_s_deriv(arg) / eps_z)
}

/// `T_2 = U(s / eps_z)` and its derivative.
fn core_blend(s: f64, eps_z: f64) -> (f64, f64) {
    (trans_u(s / eps_z), trans_u_deriv(s / eps_z) / eps_z)
}

impl SkewedLaw {
    pub fn new(base: FeedbackLaw, skew: Skew) -> Result<Self> {
        let law = Self { base, skew };
        law.validate()?;
        Ok(law)
    }

    pub fn unskewed(base: FeedbackLaw) -> Result<Self> {
        Self::new(base, Skew::None)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        match self.skew {
            Skew::None => Ok(()),
            Skew::Ssmd { eps_s, eps_z } => {
                positive("eps_s", eps_s)?;
                positive("eps_z", eps_z)
            }
            Skew::Nsmd { eps_s, eps_z, k_pp } => {
                positive("eps_s", eps_s)?;
                positive("eps_z", eps_z)?;
                positive("k_pp", k_pp)
            }
        }
    }

    /// Slope magnitude `k_p = k_pp (eps_s - h_p(eps_z)) / eps_z` of the
    /// nonsingular core; `None` for other skews.
    pub fn nsmd_slope(&self) -> Option<f64> {
        match self.skew {
            Skew::Nsmd { eps_s, eps_z, k_pp } => {
                Some(k_pp * (eps_s - self.base.value(eps_z)) / eps_z)
            }
            _ => None,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match self.skew {
            Skew::None => self.base.value(s),
            Skew::Ssmd { eps_s, eps_z } => {
                let (t1, _) = offset_blend(s, eps_z);
                self.base.value(s) + t1 * eps_s
            }
            Skew::Nsmd { eps_s, eps_z, .. } => {
                let k_p = self.nsmd_slope().unwrap_or_default();
                let (t1, _) = offset_blend(s, eps_z);
                let (t2, _) = core_blend(s, eps_z);
                let outer = if t2 == 0.0 {
                    0.0
                } else {
                    t2 * (self.base.value(s) + t1 * eps_s)
                };
                outer - (1.0 - t2) * k_p * s
            }
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match self.skew {
            Skew::None => self.base.deriv(s),
            Skew::Ssmd { eps_s, eps_z } => {
                let (_, dt1) = offset_blend(s, eps_z);
                self.base.deriv(s) + dt1 * eps_s
            }
            Skew::Nsmd { eps_s, eps_z, .. } => {
                let k_p = self.nsmd_slope().unwrap_or_default();
                let (t1, dt1) = offset_blend(s, eps_z);
                let (t2, dt2) = core_blend(s, eps_z);
                // T_2 is flat to all orders at 0, so it dominates the
                // singular base slope there.
                let outer = if t2 == 0.0 {
                    0.0
                } else {
                    dt2 * (self.base.value(s) + t1 * eps_s)
                        + t2 * (self.base.deriv(s) + dt1 * eps_s)
                };
                outer + dt2 * k_p * s - (1.0 - t2) * k_p
            }
        }
    }

    /// Inverse `h_v` with `h_m(h_v(y)) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        match (self.skew, self.base) {
            (Skew::None, FeedbackLaw::Linear { b }) => Ok(-y / b),
            (Skew::None, FeedbackLaw::FiniteTime { k_c, p }) => Ok(-signed_pow(y / k_c, 1.0 / p)),
            _ => root_decreasing(|x| self.value(x) - y, 0.0),
        }
    }
}

/// The chain of laws `h_1 .. h_{n-1}` defining an order-`n` manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub laws: Vec<SkewedLaw>,
}

/// Manifold values for one error state.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldEval {
    /// `s_1 .. s_n`; the last entry is the manifold value `s`.
    pub s: Vec<f64>,
    /// Time derivative of `s_{n-1}`.
    pub s_dot_prev: f64,
}

impl ManifoldEval {
    pub fn manifold(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn s_prev(&self) -> f64 {
        self.s[self.s.len() - 2]
    }
}

impl ManifoldSpec {
    pub fn new(laws: Vec<SkewedLaw>) -> Result<Self> {
        let spec = Self { laws };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        if !(2..=3).contains(&n) {
            return Err(invalid(format!("manifold order must be 2 or 3, got {n}")));
        }
        self.laws.iter().try_for_each(SkewedLaw::validate)
    }

    pub fn order(&self) -> usize {
        self.laws.len() + 1
    }

    /// The law `h_{n-1}` closing the chain; the constraint geometry lives
    /// on its phase plane.
    pub fn last_law(&self) -> &SkewedLaw {
        &self.laws[self.laws.len() - 1]
    }

    pub fn eval(&self, z: &[f64]) -> Result<ManifoldEval> {
        let n = self.order();
        if z.len() != n {
            return Err(invalid(format!(
                "error state has {} components but the manifold has order {n}",
                z.len()
            )));
        }
        match n {
            2 => {
                let h1 = &self.laws[0];
                Ok(ManifoldEval {
                    s: vec![z[0], z[1] - h1.value(z[0])],
                    s_dot_prev: z[1],
                })
            }
            3 => {
                let (h1, h2) = (&self.laws[0], &self.laws[1]);
                let s1 = z[0];
                let s2 = z[1] - h1.value(s1);
                let chain = if z[1] == 0.0 { 0.0 } else { h1.deriv(s1) * z[1] };
                let s2_dot = z[2] - chain;
                Ok(ManifoldEval {
                    s: vec![s1, s2, s2_dot - h2.value(s2)],
                    s_dot_prev: s2_dot,
                })
            }
            _ => Err(invalid(format!("manifold order must be 2 or 3, got {n}"))),
        }
    }
}
