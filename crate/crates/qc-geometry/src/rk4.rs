//! Classical fixed-step fourth-order Runge-Kutta on flat state vectors.
//!
//! Every ODE in this crate (momentum flow, group coordinates, frame
//! evolution, Jacobi systems) is integrated with the same scheme so that
//! results are bit-reproducible across entry points.

use nalgebra::DVector;

/// One RK4 step of `x' = f(t, x)`. Negative `dt` integrates backwards.
pub fn step<F>(t: f64, x: &DVector<f64>, dt: f64, f: F) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * dt, &(x + &k1 * (0.5 * dt)));
    let k3 = f(t + 0.5 * dt, &(x + &k2 * (0.5 * dt)));
    let k4 = f(t + dt, &(x + &k3 * dt));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Number of whole `dt` steps that cover `[0, t_end]` (nearest multiple).
pub fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt).round() as usize).max(1)
}
