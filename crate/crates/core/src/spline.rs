//! Periodic cubic splines on uniform grids.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    period: f64,
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    /// `values[i]` is the sample at `i * period / values.len()`.
    pub fn new(values: Vec<f64>, period: f64) -> Self {
        let n = values.len();
        assert!(n >= 3, "periodic spline needs at least 3 samples");
        let h = period / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                6.0 * (values[(i + 1) % n] - 2.0 * values[i] + values[(i + n - 1) % n]) / (h * h)
            })
            .collect();
        let second = solve_cyclic(1.0, 4.0, 1.0, &rhs);
        PeriodicSpline {
            period,
            h,
            values,
            second,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn locate(&self, t: f64) -> (usize, usize, f64) {
        let n = self.values.len();
        let tt = t - self.period * (t / self.period).floor();
        let mut i = (tt / self.h).floor() as usize;
        if i >= n {
            i = n - 1;
        }
        let s = tt - i as f64 * self.h;
        (i, (i + 1) % n, s)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, j, s) = self.locate(t);
        let h = self.h;
        let (mi, mj) = (self.second[i], self.second[j]);
        let r = h - s;
        mi * r * r * r / (6.0 * h)
            + mj * s * s * s / (6.0 * h)
            + (self.values[i] - mi * h * h / 6.0) * r / h
            + (self.values[j] - mj * h * h / 6.0) * s / h
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (i, j, s) = self.locate(t);
        let h = self.h;
        let (mi, mj) = (self.second[i], self.second[j]);
        let r = h - s;
        -mi * r * r / (2.0 * h) + mj * s * s / (2.0 * h) - (self.values[i] - mi * h * h / 6.0) / h
            + (self.values[j] - mj * h * h / 6.0) / h
    }
}

/// Cyclic tridiagonal solve with constant bands (Sherman–Morrison).
fn solve_cyclic(lower: f64, diag: f64, upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut d = vec![diag; n];
    d[0] = diag - gamma;
    d[n - 1] = diag - lower * upper / gamma;
    let x = thomas(lower, &d, upper, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = upper;
    let z = thomas(lower, &d, upper, &u);
    let fact = (x[0] + lower * x[n - 1] / gamma) / (1.0 + z[0] + lower * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(lower: f64, diag: &[f64], upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper / beta;
        beta = diag[i] - lower * c[i];
        x[i] = (rhs[i] - lower * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i + 1] * x[i + 1];
    }
    x
}
