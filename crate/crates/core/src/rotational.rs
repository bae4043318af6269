//! S¹-invariant minimal tori in S³ (Otsuki tori) by rotation-number shooting.
//!
//! A surface `(P₁, P₂, P₃ cos φ, P₃ sin φ)` with profile `P` in the open upper
//! hemisphere of `S²` is minimal iff `P` is a geodesic of `P₃² g_{S²}`. In polar
//! coordinates `P = (sin u cos v, sin u sin v, cos u)` that metric is
//! `cos²u du² + cos²u sin²u dv²`. Along a unit-speed geodesic the Clairaut
//! constant `c = cos²u sin²u v'` is conserved and fixes the energy level of
//! the radial oscillation; `c = 1/2` is the circle `u = π/4` (Clifford torus).
//! The profile closes up after `q` radial periods when the angle advanced per
//! period is `2π p/q`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_minimality, FamilyKind, GeometryFamily, ParamDomain, RawPoint};
use crate::ode::Dopri5;
use crate::spline::PeriodicSpline;
use crate::{Error, Result};

/// Clairaut constant of the circular profile (the Clifford torus).
pub const CIRCULAR_ENERGY: f64 = 0.5;

/// Default number of profile samples per radial period.
pub const DEFAULT_SAMPLES: usize = 1024;

type State = [f64; 4];

/// Geodesic equations of `cos²u du² + cos²u sin²u dv²`, state `(u, v, u', v')`.
fn rhs(_t: f64, y: &State) -> State {
    let [u, _v, du, dv] = *y;
    let (ddu, ddv) = accelerations(u, du, dv);
    [du, dv, ddu, ddv]
}

fn accelerations(u: f64, du: f64, dv: f64) -> (f64, f64) {
    let tan_u = u.tan();
    let ddu = tan_u * du * du + tan_u * (2.0 * u).cos() * dv * dv;
    let ddv = -4.0 * du * dv / (2.0 * u).tan();
    (ddu, ddv)
}

fn orbit_metric(u: f64) -> f64 {
    let (s, c) = (u.sin(), u.cos());
    c * c * s * s
}

fn clairaut(y: &State) -> f64 {
    orbit_metric(y[0]) * y[3]
}

fn check_energy(energy: f64) -> Result<()> {
    if !(energy > 0.0 && energy < CIRCULAR_ENERGY) {
        return Err(Error::OutOfWindow(energy));
    }
    Ok(())
}

/// Start at the outer turning point `u_max` with `u' = 0`.
fn initial_state(energy: f64) -> State {
    let u_max = 0.5 * (PI - (2.0 * energy).asin());
    [u_max, 0.0, 0.0, energy / orbit_metric(u_max)]
}

fn integrator() -> Dopri5 {
    Dopri5::default()
}

/// Time and state at the inner turning point (half a radial period).
fn half_period(energy: f64) -> Result<(f64, State)> {
    check_energy(energy)?;
    let y0 = initial_state(energy);
    let ode = integrator();
    let mut h = 1e-3;
    // first zero of u' from below: the inner turning point
    ode.integrate_until(&rhs, 0.0, y0, |y| y[2], 1e3, &mut h)
}

/// Angle advanced over one radial oscillation divided by `2π`.
///
/// `energy` is the Clairaut constant `c ∈ (0, 1/2)`; the circular value
/// `1/2` and everything outside the interval are rejected.
pub fn rotation_number(energy: f64) -> Result<f64> {
    let (_, y) = half_period(energy)?;
    Ok(2.0 * y[1] / (2.0 * PI))
}

/// Rotation numbers on a grid of energies approaching the circular value.
#[derive(Debug, Clone, Serialize)]
pub struct WindowScan {
    pub energies: Vec<f64>,
    pub rotation_numbers: Vec<f64>,
    pub monotone: bool,
}

impl WindowScan {
    pub fn window(&self) -> (f64, f64) {
        let lo = self
            .rotation_numbers
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .rotation_numbers
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Energies `1/2 - δ` with `δ` log-spaced from `1e-6` to `0.45`, ascending.
pub fn scan_window(points: usize) -> Result<WindowScan> {
    let points = points.max(4);
    let (dlo, dhi) = (1e-6_f64.ln(), 0.45_f64.ln());
    let mut energies: Vec<f64> = (0..points)
        .map(|i| CIRCULAR_ENERGY - (dhi + (dlo - dhi) * i as f64 / (points - 1) as f64).exp())
        .collect();
    energies.sort_by(f64::total_cmp);
    let rotation_numbers = energies
        .iter()
        .map(|&e| rotation_number(e))
        .collect::<Result<Vec<_>>>()?;
    let monotone = rotation_numbers.windows(2).all(|w| w[1] > w[0]);
    Ok(WindowScan {
        energies,
        rotation_numbers,
        monotone,
    })
}

/// One radial period of a profile geodesic, sampled uniformly in time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub period: f64,
    /// `[t, u, v, u', v']`
    pub samples: Vec<[f64; 5]>,
    pub clairaut: f64,
    pub p: u32,
    pub q: u32,
    /// `max(|u(T)-u(0)|, |u'(T)-u'(0)|, |v(T)-v(0)-2πp/q|)`
    pub closure_residual: f64,
    /// Largest relative drift of the Clairaut constant along the samples.
    pub clairaut_drift: f64,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Integrates one period at the given energy and samples it.
pub fn profile_for_energy(energy: f64, samples: usize, p: u32, q: u32) -> Result<ProfileCurve> {
    if samples < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 samples, got {samples}"
        )));
    }
    let (t_half, _) = half_period(energy)?;
    let period = 2.0 * t_half;
    let ode = integrator();
    let mut y = initial_state(energy);
    let mut h = 1e-3;
    let mut out = Vec::with_capacity(samples);
    let dt = period / samples as f64;
    let mut drift: f64 = 0.0;
    out.push([0.0, y[0], y[1], y[2], y[3]]);
    for i in 1..=samples {
        let t0 = (i - 1) as f64 * dt;
        let t1 = if i == samples { period } else { i as f64 * dt };
        y = ode.integrate_to(&rhs, t0, y, t1, &mut h)?;
        drift = drift.max(((clairaut(&y) - energy) / energy).abs());
        if i < samples {
            out.push([t1, y[0], y[1], y[2], y[3]]);
        }
    }
    let y0 = initial_state(energy);
    let target = 2.0 * PI * p as f64 / q as f64;
    let closure_residual = (y[0] - y0[0])
        .abs()
        .max((y[2] - y0[2]).abs())
        .max((y[1] - y0[1] - target).abs());
    Ok(ProfileCurve {
        period,
        samples: out,
        clairaut: energy,
        p,
        q,
        closure_residual,
        clairaut_drift: drift,
    })
}

/// Finds the energy whose rotation number is `p/q` and returns the profile.
pub fn find_otsuki(p: u32, q: u32, tol: f64) -> Result<ProfileCurve> {
    find_otsuki_with(p, q, tol, DEFAULT_SAMPLES)
}

pub fn find_otsuki_with(p: u32, q: u32, tol: f64, samples: usize) -> Result<ProfileCurve> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!(
            "p/q = {p}/{q} must be a reduced positive fraction"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let target = p as f64 / q as f64;
    let scan = scan_window(24)?;
    if !scan.monotone {
        return Err(Error::Convergence(
            "rotation number is not monotone on the scan".into(),
        ));
    }
    let (lo, hi) = scan.window();
    if !(target > lo && target < hi) {
        return Err(Error::NoSolution(format!(
            "rotation number {p}/{q} outside the scanned window ({lo:.6}, {hi:.6})"
        )));
    }
    let k = scan
        .rotation_numbers
        .windows(2)
        .position(|w| w[0] <= target && target <= w[1])
        .unwrap();
    let energy = bracketed_root(
        |e| rotation_number(e).map(|r| r - target),
        scan.energies[k],
        scan.energies[k + 1],
        scan.rotation_numbers[k] - target,
        scan.rotation_numbers[k + 1] - target,
        tol,
    )?;
    profile_for_energy(energy, samples, p, q)
}

/// Secant steps inside a sign-changing bracket, bisecting whenever the
/// secant point leaves the bracket or fails to halve it.
fn bracketed_root<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Convergence("bracket does not change sign".into()));
    }
    let mut width = (b - a).abs();
    for _ in 0..200 {
        let mut x = b - fb * (b - a) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(x > lo && x < hi) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx * fa < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        let new_width = (b - a).abs();
        if new_width > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm.abs() <= tol {
                return Ok(m);
            }
            if fm * fa < 0.0 {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
        }
        width = (b - a).abs();
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Err(Error::Convergence(format!(
        "root finder stagnated in [{a}, {b}]"
    )))
}

/// Smooth doubly periodic parametrization `X(t, φ)` built from a profile.
#[derive(Debug, Clone)]
pub struct RotationalSurface {
    pub profile_period: f64,
    pub p: u32,
    pub q: u32,
    /// `dv/dt` averaged over a period, so that `v = w(t) + slope·t`.
    slope: f64,
    u: PeriodicSpline,
    du: PeriodicSpline,
    w: PeriodicSpline,
    dv: PeriodicSpline,
}

impl RotationalSurface {
    pub fn from_profile(profile: &ProfileCurve) -> Result<Self> {
        if profile.samples.len() < 16 || !(profile.period > 0.0) || profile.q == 0 {
            return Err(Error::InvalidParameter(
                "profile has too few samples or a bad period".into(),
            ));
        }
        let period = profile.period;
        let slope = 2.0 * PI * profile.p as f64 / (profile.q as f64 * period);
        let col = |k: usize| profile.samples.iter().map(|s| s[k]).collect::<Vec<f64>>();
        let w: Vec<f64> = profile
            .samples
            .iter()
            .map(|s| s[2] - slope * s[0])
            .collect();
        Ok(RotationalSurface {
            profile_period: period,
            p: profile.p,
            q: profile.q,
            slope,
            u: PeriodicSpline::new(col(1), period),
            du: PeriodicSpline::new(col(3), period),
            w: PeriodicSpline::new(w, period),
            dv: PeriodicSpline::new(col(4), period),
        })
    }

    /// Length of the closed profile parameter interval, `q·T`.
    pub fn t_period(&self) -> f64 {
        self.q as f64 * self.profile_period
    }

    pub fn raw(&self, t: f64, phi: f64) -> RawPoint {
        let u = self.u.eval(t);
        let du = self.du.eval(t);
        let dv = self.dv.eval(t);
        let v = self.w.eval(t) + self.slope * t;
        let (ddu, ddv) = accelerations(u, du, dv);

        let (su, cu, sv, cv) = (u.sin(), u.cos(), v.sin(), v.cos());
        let pos = [su * cv, su * sv, cu];
        let p_u = [cu * cv, cu * sv, -su];
        let p_v = [-su * sv, su * cv, 0.0];
        let p_uv = [-cu * sv, cu * cv, 0.0];
        let p_vv = [-su * cv, -su * sv, 0.0];
        let mut d1 = [0.0; 3];
        let mut d2 = [0.0; 3];
        for i in 0..3 {
            d1[i] = du * p_u[i] + dv * p_v[i];
            d2[i] = ddu * p_u[i] + ddv * p_v[i] - du * du * pos[i]
                + 2.0 * du * dv * p_uv[i]
                + dv * dv * p_vv[i];
        }
        let speed = (d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]).sqrt();
        let cross = |a: &[f64; 3], b: &[f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let nrm = cross(&pos, &d1).map(|c| c / speed);
        let dspeed = (d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]) / speed;
        let pc = cross(&pos, &d2);
        let dnrm: [f64; 3] = core::array::from_fn(|i| pc[i] / speed - nrm[i] * dspeed / speed);

        let (sp, cp) = (phi.sin(), phi.cos());
        let lift = |a: &[f64; 3]| alloc::vec![a[0], a[1], a[2] * cp, a[2] * sp];
        let spin = |s: f64| alloc::vec![0.0, 0.0, -s * sp, s * cp];
        RawPoint {
            x: lift(&pos),
            dx: alloc::vec![lift(&d1), spin(pos[2])],
            nu: lift(&nrm),
            dnu: alloc::vec![lift(&dnrm), spin(nrm[2])],
        }
    }
}

/// Wraps a profile as a geometry family and rejects it unless the sampled
/// mean curvature stays below `1e-6`.
pub fn build_surface(profile: &ProfileCurve, nt: usize, nphi: usize) -> Result<GeometryFamily> {
    if nt < 16 || nphi < 16 {
        return Err(Error::InvalidParameter(format!(
            "resolution {nt}x{nphi} below 16"
        )));
    }
    let surf = RotationalSurface::from_profile(profile)?;
    let tp = surf.t_period();
    let family = GeometryFamily {
        name: format!("otsuki(p={},q={})", profile.p, profile.q),
        n: 2,
        domain: ParamDomain {
            lower: alloc::vec![0.0, 0.0],
            upper: alloc::vec![tp, 2.0 * PI],
            periodic: alloc::vec![true, true],
        },
        kind: FamilyKind::Rotational(Arc::new(surf)),
    };
    let samples: Vec<Vec<f64>> = (0..nt)
        .flat_map(|i| {
            (0..nphi).map(move |j| {
                alloc::vec![
                    tp * (i as f64 + 0.5) / nt as f64,
                    2.0 * PI * j as f64 / nphi as f64
                ]
            })
        })
        .collect();
    let h = check_minimality(&family, &samples)?;
    if !(h <= 1e-6) {
        return Err(Error::GenerationFailed(format!(
            "max |trace A| = {h:e} exceeds 1e-6"
        )));
    }
    Ok(family)
}

/// Label of a rotational family, e.g. `otsuki(p=2,q=3)`.
pub fn label(p: u32, q: u32) -> String {
    format!("otsuki(p={p},q={q})")
}

/// Latitude of the circular profile.
pub const CIRCULAR_LATITUDE: f64 = FRAC_PI_4;
