//! Embedded Dormand-Prince 5(4) integrator for complex state vectors,
//! with mixed absolute/relative error control per unit time (so `rtol`
//! bounds the local error density, not the per-step error) and FSAL
//! reuse. This is the time-dependent workhorse; time-independent
//! generators go through [`crate::expm`] instead, and the two paths
//! cross-check each other in the tests.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_steps: 20_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn axpy(y: &Array1<C64>, pairs: &[(f64, &Array1<C64>)], h: f64) -> Array1<C64> {
    let mut out = y.clone();
    for (w, k) in pairs {
        out.zip_mut_with(*k, |o, v| *o += v * (w * h));
    }
    out
}

/// Integrate dy/dt = rhs(t, y) from `grid[0]`, returning the state at
/// every grid time (the first entry is `y0` itself). Steps are clamped
/// so each output time is hit exactly.
pub fn integrate<F>(
    rhs: &F,
    grid: &[f64],
    y0: Array1<C64>,
    opts: &AdaptiveOptions,
) -> Result<Vec<Array1<C64>>>
where
    F: Fn(f64, &Array1<C64>) -> Array1<C64>,
{
    assert!(!grid.is_empty(), "output grid must be nonempty");
    assert!(
        grid.windows(2).all(|w| w[1] > w[0]),
        "output grid must be strictly increasing"
    );
    let dim = y0.len();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.clone());
    if grid.len() == 1 {
        return Ok(out);
    }

    let span = grid[grid.len() - 1] - grid[0];
    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = span * 1e-3;
    let mut steps = 0usize;

    for &target in &grid[1..] {
        loop {
            let remaining = target - t;
            if remaining <= 4.0 * f64::EPSILON * target.abs().max(1.0) {
                break;
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::IntegrationFailure {
                    t_reached: t,
                    reason: "step budget exhausted",
                });
            }
            let clamped = h >= remaining;
            let hs = if clamped { remaining } else { h };
            if hs <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure {
                    t_reached: t,
                    reason: "step size underflow",
                });
            }

            let k2 = rhs(t + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
            let k3 = rhs(t + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
            let k4 = rhs(
                t + C4 * hs,
                &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs),
            );
            let k5 = rhs(
                t + C5 * hs,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
            );
            let k6 = rhs(
                t + hs,
                &axpy(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    hs,
                ),
            );
            let y5 = axpy(
                &y,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                hs,
            );
            let k7 = rhs(t + hs, &y5);

            // scaled RMS of the embedded error estimate
            let mut acc = 0.0;
            for i in 0..dim {
                let err =
                    k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7;
                let err = (err * hs).norm();
                let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
                let r = err / sc;
                acc += r * r;
            }
            // error density: local error divided by the step length
            let err_norm = (acc / dim as f64).sqrt() / hs;

            let fac = if err_norm == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err_norm.powf(-0.25)).clamp(FAC_MIN, FAC_MAX)
            };

            if err_norm <= 1.0 {
                t += hs;
                y = y5;
                k1 = k7;
                if !clamped {
                    h = hs * fac;
                }
            } else {
                h = hs * fac;
            }
        }
        t = target;
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_phase_rotation_is_exact_to_tolerance() {
        // dy/dt = -i w y  ->  y(t) = e^{-i w t}
        let w = 2.5;
        let rhs = |_t: f64, y: &Array1<C64>| y.mapv(|v| v * c(0.0, -w));
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 0.7).collect();
        let y0 = Array1::from_vec(vec![c(1.0, 0.0)]);
        let states = integrate(&rhs, &grid, y0, &AdaptiveOptions::default()).unwrap();
        for (t, s) in grid.iter().zip(&states) {
            let exact = c(0.0, -w * t).exp();
            assert!((s[0] - exact).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn time_dependent_scalar_matches_quadrature() {
        // dy/dt = -i (a t) y  ->  y(t) = exp(-i a t^2 / 2)
        let a = 1.7;
        let rhs = move |t: f64, y: &Array1<C64>| y.mapv(|v| v * c(0.0, -a * t));
        let grid = [-2.0, -0.5, 0.0, 1.0, 2.0];
        let y0 = Array1::from_vec(vec![c(0.0, -a * 4.0 / 2.0).exp()]);
        let states = integrate(&rhs, &grid, y0, &AdaptiveOptions::default()).unwrap();
        for (t, s) in grid.iter().zip(&states) {
            let exact = c(0.0, -a * t * t / 2.0).exp();
            assert!((s[0] - exact).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn norm_is_preserved_for_hermitian_generator() {
        let n = 9;
        let rhs = |_t: f64, y: &Array1<C64>| {
            let mut dy = Array1::zeros(n);
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                if i + 1 < n {
                    acc += y[i + 1];
                }
                if i > 0 {
                    acc += y[i - 1];
                }
                dy[i] = acc * c(0.0, -1.0);
            }
            dy
        };
        let mut y0 = Array1::zeros(n);
        y0[n / 2] = c(1.0, 0.0);
        let grid = [0.0, 1.5, 3.0];
        let states = integrate(&rhs, &grid, y0, &AdaptiveOptions::default()).unwrap();
        for s in &states {
            let norm: f64 = s.iter().map(|v| v.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn step_budget_exhaustion_reports_time_reached() {
        let rhs = |_t: f64, y: &Array1<C64>| y.mapv(|v| v * c(-1e9, 0.0));
        let y0 = Array1::from_vec(vec![c(1.0, 0.0)]);
        let opts = AdaptiveOptions {
            max_steps: 50,
            ..Default::default()
        };
        let err = integrate(&rhs, &[0.0, 1.0], y0, &opts).unwrap_err();
        match err {
            Error::IntegrationFailure { t_reached, .. } => {
                assert!((0.0..1.0).contains(&t_reached));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
