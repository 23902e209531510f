/// One classical fourth-order Runge–Kutta step of `dx/dt = f(t, x)`.
pub fn rk4_step<F>(mut f: F, x: &[f64], t: f64, dt: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let shifted = |k: &[f64], scale: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(xi, ki)| xi + scale * ki).collect()
    };
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * dt, &shifted(&k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, &shifted(&k2, 0.5 * dt));
    let k4 = f(t + dt, &shifted(&k3, dt));
    x.iter()
        .enumerate()
        .map(|(i, xi)| xi + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}
