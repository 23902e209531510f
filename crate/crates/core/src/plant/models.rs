use serde::{Deserialize, Serialize};

use crate::manifold::ErrorState;

/// A strict-feedback plant tracking a reference with its first output.
pub trait Plant {
    fn order(&self) -> usize;

    fn initial_state(&self) -> Vec<f64>;

    /// Reference `y_d(t)`.
    fn reference(&self, t: f64) -> f64;

    fn deriv(&self, x: &[f64], t: f64, u: f64) -> Vec<f64>;

    /// Exact error state `z_i = y^{(i-1)} - y_d^{(i-1)}` (logging and
    /// validation only; the controller never sees it).
    fn true_errors(&self, x: &[f64], t: f64) -> ErrorState;

    /// Total control gain `G = Π g_i`.
    fn total_gain(&self, x: &[f64], t: f64) -> f64;

    /// Measured tracking error `z_1`.
    fn output_error(&self, x: &[f64], t: f64) -> f64 {
        x[0] - self.reference(t)
    }
}

/// The two benchmark plants, both tracking `y_d = sin t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantId {
    /// ```text
    /// x1' = (1 + 0.1 cos x1 + 0.1 sin t) x2 - x1 + sin t
    /// x2' = (2 + 0.2 sin(x1 x2) + 0.1 cos t) u - (x1^2 - 1) x2 + sin t + cos 2t
    /// ```
    SecondOrder,
    /// ```text
    /// x1' = (1 + 0.1 sin x1 + 0.1 cos t) x2 - x1 + cos t
    /// x2' = (1 + 0.1 cos(x1 x2) + 0.1 sin t) x3 - (x1^2 - 1) x2 + sin t
    /// x3' = (2 + 0.2 sin(x1 x2 x3) + 0.1 cos t) u - (x1^2 + x2) x3 + 10 sin t + 10 cos 2t
    /// ```
    ThirdOrder,
}

impl PlantId {
    /// Gain `g_i` multiplying the next state (or `u` for the last row).
    pub fn gains(&self, x: &[f64], t: f64) -> Vec<f64> {
        match self {
            PlantId::SecondOrder => vec![
                1.0 + 0.1 * x[0].cos() + 0.1 * t.sin(),
                2.0 + 0.2 * (x[0] * x[1]).sin() + 0.1 * t.cos(),
            ],
            PlantId::ThirdOrder => vec![
                1.0 + 0.1 * x[0].sin() + 0.1 * t.cos(),
                1.0 + 0.1 * (x[0] * x[1]).cos() + 0.1 * t.sin(),
                2.0 + 0.2 * (x[0] * x[1] * x[2]).sin() + 0.1 * t.cos(),
            ],
        }
    }

    /// Unmatched drift `f_i`.
    pub fn drifts(&self, x: &[f64], t: f64) -> Vec<f64> {
        match self {
            PlantId::SecondOrder => vec![
                -x[0] + t.sin(),
                -(x[0] * x[0] - 1.0) * x[1] + t.sin() + (2.0 * t).cos(),
            ],
            PlantId::ThirdOrder => vec![
                -x[0] + t.cos(),
                -(x[0] * x[0] - 1.0) * x[1] + t.sin(),
                -(x[0] * x[0] + x[1]) * x[2] + 10.0 * t.sin() + 10.0 * (2.0 * t).cos(),
            ],
        }
    }
}

impl Plant for PlantId {
    fn order(&self) -> usize {
        match self {
            PlantId::SecondOrder => 2,
            PlantId::ThirdOrder => 3,
        }
    }

    fn initial_state(&self) -> Vec<f64> {
        match self {
            PlantId::SecondOrder => vec![-1.0, 0.5],
            PlantId::ThirdOrder => vec![1.0, -0.2, 0.4],
        }
    }

    fn reference(&self, t: f64) -> f64 {
        t.sin()
    }

    fn deriv(&self, x: &[f64], t: f64, u: f64) -> Vec<f64> {
        let g = self.gains(x, t);
        let f = self.drifts(x, t);
        let n = x.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 < n { x[i + 1] } else { u };
                g[i] * next + f[i]
            })
            .collect()
    }

    fn true_errors(&self, x: &[f64], t: f64) -> ErrorState {
        match self {
            PlantId::SecondOrder => {
                let x1_dot = self.deriv(x, t, 0.0)[0];
                ErrorState::new(vec![x[0] - t.sin(), x1_dot - t.cos()])
            }
            PlantId::ThirdOrder => {
                // x1' = g1 x2 + f1 does not depend on u, nor does x2'.
                let xd = self.deriv(x, t, 0.0);
                let g1 = 1.0 + 0.1 * x[0].sin() + 0.1 * t.cos();
                let g1_dot = 0.1 * x[0].cos() * xd[0] - 0.1 * t.sin();
                let f1_dot = -xd[0] - t.sin();
                let x1_ddot = g1_dot * x[1] + g1 * xd[1] + f1_dot;
                ErrorState::new(vec![x[0] - t.sin(), xd[0] - t.cos(), x1_ddot + t.sin()])
            }
        }
    }

    fn total_gain(&self, x: &[f64], t: f64) -> f64 {
        self.gains(x, t).iter().product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_rhs_at_initial_state() {
        let p = PlantId::SecondOrder;
        let d = p.deriv(&p.initial_state(), 0.0, 0.0);
        let expected_x1 = (1.0 + 0.1 * (-1.0f64).cos()) * 0.5 + 1.0;
        assert!((d[0] - expected_x1).abs() < 1e-15);
        assert!((d[0] - 1.52702).abs() < 1e-5);
        assert!((d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn third_order_rhs_at_initial_state() {
        let p = PlantId::ThirdOrder;
        let x0 = p.initial_state();
        let g = p.gains(&x0, 0.0);
        assert!((g[0] - 1.18415).abs() < 1e-5);
        let d = p.deriv(&x0, 0.0, 0.0);
        assert!((d[0] - g[0] * -0.2).abs() < 1e-15);
        // x2' = (1 + 0.1 cos(-0.2)) 0.4 - 0 + 0
        assert!((d[1] - (1.0 + 0.1 * (-0.2f64).cos()) * 0.4).abs() < 1e-15);
    }

    #[test]
    fn control_enters_only_the_last_row() {
        for p in [PlantId::SecondOrder, PlantId::ThirdOrder] {
            let x = p.initial_state();
            let a = p.deriv(&x, 0.3, 0.0);
            let b = p.deriv(&x, 0.3, 1.0);
            let n = p.order();
            assert_eq!(a[..n - 1], b[..n - 1]);
            let g = p.gains(&x, 0.3)[n - 1];
            assert!((b[n - 1] - a[n - 1] - g).abs() < 1e-14);
        }
    }

    #[test]
    fn true_errors_at_start() {
        let p = PlantId::SecondOrder;
        let z = p.true_errors(&p.initial_state(), 0.0);
        assert_eq!(z[0], -1.0);
        assert!((z[1] - 0.52702).abs() < 1e-5);
        let p = PlantId::ThirdOrder;
        assert_eq!(p.true_errors(&p.initial_state(), 0.0)[0], 1.0);
    }

    #[test]
    fn total_gain_is_product() {
        let p = PlantId::ThirdOrder;
        let x = [0.3, -0.1, 0.7];
        let g = p.gains(&x, 1.1);
        assert_eq!(p.total_gain(&x, 1.1), g[0] * g[1] * g[2]);
    }
}
