//! Adaptive Dormand–Prince 5(4) integration with step-size control and
//! event location.

use alloc::format;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-13,
            atol: 1e-14,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

impl Dopri5 {
    /// One step of size `h`; returns the fifth-order solution and the scaled
    /// error norm.
    pub fn step<F, const N: usize>(&self, f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut out = *y;
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut inc = 0.0;
            let mut err = 0.0;
            for s in 0..7 {
                inc += B[s] * k[s][i];
                err += E[s] * k[s][i];
            }
            out[i] += h * inc;
            let sc = self.atol + self.rtol * y[i].abs().max(out[i].abs());
            err_sq += (h * err / sc) * (h * err / sc);
        }
        (out, (err_sq / N as f64).sqrt())
    }

    /// Integrates from `t0` to exactly `t1` (`t1 > t0`). `h` carries the
    /// suggested step size between calls.
    pub fn integrate_to<F, const N: usize>(
        &self,
        f: &F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        h: &mut f64,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut t = t0;
        let mut y = y0;
        let mut steps = 0;
        while t < t1 {
            let last = t + *h >= t1;
            let hs = if last { t1 - t } else { *h };
            let (yn, err) = self.accept(f, t, &y, hs, h, &mut steps)?;
            if let Some(yn) = yn {
                y = yn;
                t = if last && hs == t1 - t { t1 } else { t + hs };
            }
            let _ = err;
        }
        Ok(y)
    }

    fn accept<F, const N: usize>(
        &self,
        f: &F,
        t: f64,
        y: &[f64; N],
        hs: f64,
        h: &mut f64,
        steps: &mut usize,
    ) -> Result<(Option<[f64; N]>, f64)>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        *steps += 1;
        if *steps > self.max_steps {
            return Err(Error::IntegrationFailure(format!(
                "more than {} steps",
                self.max_steps
            )));
        }
        let (yn, err) = self.step(f, t, y, hs);
        if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
            *h = hs * 0.25;
            if *h < self.h_min {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at t = {t}"
                )));
            }
            return Ok((None, err));
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            // do not let a short landing step shrink the running step
            *h = (hs * factor).max(*h * factor.min(1.0));
            Ok((Some(yn), err))
        } else {
            *h = hs * factor;
            if *h < self.h_min {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at t = {t}"
                )));
            }
            Ok((None, err))
        }
    }

    /// Integrates until `event(y)` changes sign from negative to positive
    /// (after the first accepted step) and returns the located crossing.
    pub fn integrate_until<F, G, const N: usize>(
        &self,
        f: &F,
        t0: f64,
        y0: [f64; N],
        event: G,
        t_max: f64,
        h: &mut f64,
    ) -> Result<(f64, [f64; N])>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: Fn(&[f64; N]) -> f64,
    {
        let mut t = t0;
        let mut y = y0;
        let mut steps = 0;
        let mut g_prev = event(&y);
        while t < t_max {
            let hs = *h;
            let (yn, _) = self.accept(f, t, &y, hs, h, &mut steps)?;
            let Some(yn) = yn else { continue };
            let g_new = event(&yn);
            if g_prev < 0.0 && g_new >= 0.0 {
                let (tc, yc) = self.locate(f, t, &y, hs, g_prev, g_new, &event);
                return Ok((tc, yc));
            }
            t += hs;
            y = yn;
            g_prev = g_new;
        }
        Err(Error::IntegrationFailure(format!(
            "event not reached before t = {t_max}"
        )))
    }

    #[allow(clippy::too_many_arguments)]
    fn locate<F, G, const N: usize>(
        &self,
        f: &F,
        t: f64,
        y: &[f64; N],
        h: f64,
        g0: f64,
        g1: f64,
        event: &G,
    ) -> (f64, [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: Fn(&[f64; N]) -> f64,
    {
        // Illinois false position on the step length.
        let (mut a, mut b) = (0.0, h);
        let (mut ga, mut gb) = (g0, g1);
        let mut side = 0;
        let mut best = (h, self.step(f, t, y, h).0);
        for _ in 0..200 {
            let s = if gb != ga {
                b - gb * (b - a) / (gb - ga)
            } else {
                0.5 * (a + b)
            };
            let s = if s <= a || s >= b { 0.5 * (a + b) } else { s };
            let ys = self.step(f, t, y, s).0;
            let gs = event(&ys);
            best = (s, ys);
            if gs == 0.0 || (b - a) <= 4.0 * f64::EPSILON * (t.abs() + h) {
                break;
            }
            if gs < 0.0 {
                a = s;
                ga = gs;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            } else {
                b = s;
                gb = gs;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            }
            if gs.abs() < 1e-17 {
                break;
            }
        }
        (t + best.0, best.1)
    }
}
