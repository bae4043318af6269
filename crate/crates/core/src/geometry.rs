//! Analytic minimal hypersurfaces of `S^{n+1} ⊂ R^{n+2}`.
//!
//! A [`GeometryFamily`] supplies, at each parameter point, the position, the
//! unit normal and their coordinate derivatives. Everything else (the
//! orthonormal tangent frame, the shape operator `A(w) = -D_w ν`, `|A|²`
//! and the area element) is derived from those in [`GeometryFamily::eval_frame`].

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use serde::Serialize;

use crate::linalg::dot;
use crate::quadrature::gauss_legendre;
use crate::rotational::RotationalSurface;
use crate::{Error, Result};

/// Axis-aligned parameter box. Periodic coordinates wrap at `upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl ParamDomain {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| x >= lo && x <= hi)
    }

    /// Maps periodic coordinates back into `[lower, upper)`.
    pub fn wrap(&self, u: &mut [f64]) {
        for (a, x) in u.iter_mut().enumerate() {
            if self.periodic[a] {
                let p = self.upper[a] - self.lower[a];
                let d = *x - self.lower[a];
                *x = self.lower[a] + (d - p * (d / p).floor());
                if *x >= self.upper[a] {
                    *x = self.lower[a];
                }
            }
        }
    }

    pub fn is_doubly_periodic(&self) -> bool {
        self.dim() == 2 && self.periodic.iter().all(|&p| p)
    }
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// Totally geodesic `S^n = S^{n+1} ∩ {x_{n+2} = 0}`.
    Equator,
    /// `S^k(r) × S^{n-k}(s)` with `r² = k/n`, `s² = (n-k)/n`.
    Clifford {
        k: usize,
        r: f64,
        s: f64,
    },
    Rotational(Arc<RotationalSurface>),
}

/// Position, normal and their coordinate derivatives at one parameter point.
#[derive(Debug, Clone)]
pub struct RawPoint {
    pub x: Vec<f64>,
    pub dx: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
    pub dnu: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct GeometryFamily {
    pub name: String,
    /// Surface dimension `n`; the ambient space is `R^{n+2}`.
    pub n: usize,
    pub domain: ParamDomain,
    pub kind: FamilyKind,
}

/// Orthonormal frame `{x, ν, e_1..e_n}` with the shape operator in the `e_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramePoint {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub nu: Vec<f64>,
    pub tangent_basis: Vec<Vec<f64>>,
    /// Row-major `n×n`, `a[i*n+j] = ⟨A e_i, e_j⟩`.
    pub a: Vec<f64>,
    pub asq: f64,
    pub area_element: f64,
    /// `e_i = Σ_a coframe[i*n+a] ∂_a x`
    #[serde(skip)]
    pub coframe: Vec<f64>,
}

impl FramePoint {
    pub fn n(&self) -> usize {
        self.tangent_basis.len()
    }

    pub fn trace_a(&self) -> f64 {
        let n = self.n();
        (0..n).map(|i| self.a[i * n + i]).sum()
    }

    /// `l_v = ⟨x, v⟩`
    pub fn l(&self, v: &[f64]) -> f64 {
        dot(&self.x, v)
    }

    /// `f_v = ⟨ν, v⟩`
    pub fn f(&self, v: &[f64]) -> f64 {
        dot(&self.nu, v)
    }

    /// Tangential part `v^T = v - f_v ν - l_v x`.
    pub fn tangential(&self, v: &[f64]) -> Vec<f64> {
        let (l, f) = (self.l(v), self.f(v));
        v.iter()
            .zip(&self.x)
            .zip(&self.nu)
            .map(|((vi, xi), ni)| vi - f * ni - l * xi)
            .collect()
    }

    /// Applies the shape operator to a tangent vector given in ambient coordinates.
    pub fn shape_apply(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n();
        let c: Vec<f64> = self.tangent_basis.iter().map(|e| dot(e, w)).collect();
        let mut out = vec![0.0; w.len()];
        for i in 0..n {
            let coef: f64 = (0..n).map(|j| self.a[i * n + j] * c[j]).sum();
            for (o, e) in out.iter_mut().zip(&self.tangent_basis[i]) {
                *o += coef * e;
            }
        }
        out
    }

    /// Largest deviation of the Gram matrix of `{x, ν, e_i}` from the identity.
    pub fn frame_defect(&self) -> f64 {
        let mut all: Vec<&[f64]> = vec![&self.x, &self.nu];
        all.extend(self.tangent_basis.iter().map(|e| e.as_slice()));
        let mut worst: f64 = 0.0;
        for i in 0..all.len() {
            for j in 0..all.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(all[i], all[j]) - target).abs());
            }
        }
        worst
    }
}

/// Hyperspherical chart of the unit `S^m ⊂ R^{m+1}` and its derivatives.
///
/// Angles `θ_0..θ_{m-2} ∈ [0, π]`, last angle in `[0, 2π)`.
pub(crate) fn sphere_chart(angles: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = angles.len();
    let (s, c): (Vec<f64>, Vec<f64>) = angles.iter().map(|a| (a.sin(), a.cos())).unzip();
    let mut y = vec![0.0; m + 1];
    for (j, yj) in y.iter_mut().enumerate() {
        let prod: f64 = s[..j].iter().product();
        *yj = if j < m { prod * c[j] } else { prod };
    }
    let mut dy = vec![vec![0.0; m + 1]; m];
    for (i, dyi) in dy.iter_mut().enumerate() {
        for (j, d) in dyi.iter_mut().enumerate() {
            *d = if i < j {
                let prod: f64 = (0..j).map(|l| if l == i { c[l] } else { s[l] }).product();
                if j < m {
                    prod * c[j]
                } else {
                    prod
                }
            } else if i == j {
                let prod: f64 = s[..j].iter().product();
                -prod * s[j]
            } else {
                0.0
            };
        }
    }
    (y, dy)
}

fn sphere_domain(m: usize, lower: &mut Vec<f64>, upper: &mut Vec<f64>, periodic: &mut Vec<bool>) {
    for _ in 0..m - 1 {
        lower.push(0.0);
        upper.push(PI);
        periodic.push(false);
    }
    lower.push(0.0);
    upper.push(2.0 * PI);
    periodic.push(true);
}

/// Totally geodesic equator `S^n ⊂ S^{n+1}`.
pub fn equator(n: usize) -> Result<GeometryFamily> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "equator needs n ≥ 2, got {n}"
        )));
    }
    let (mut lower, mut upper, mut periodic) = (Vec::new(), Vec::new(), Vec::new());
    sphere_domain(n, &mut lower, &mut upper, &mut periodic);
    Ok(GeometryFamily {
        name: format!("equator(n={n})"),
        n,
        domain: ParamDomain {
            lower,
            upper,
            periodic,
        },
        kind: FamilyKind::Equator,
    })
}

/// Clifford minimal hypersurface `S^k(√(k/n)) × S^{n-k}(√((n-k)/n))`.
pub fn clifford(n: usize, k: usize) -> Result<GeometryFamily> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "clifford needs n ≥ 2, got {n}"
        )));
    }
    if k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "clifford needs 1 ≤ k ≤ n-1, got k={k}, n={n}"
        )));
    }
    let r = (k as f64 / n as f64).sqrt();
    let s = ((n - k) as f64 / n as f64).sqrt();
    let (mut lower, mut upper, mut periodic) = (Vec::new(), Vec::new(), Vec::new());
    sphere_domain(k, &mut lower, &mut upper, &mut periodic);
    sphere_domain(n - k, &mut lower, &mut upper, &mut periodic);
    Ok(GeometryFamily {
        name: format!("clifford(n={n},k={k})"),
        n,
        domain: ParamDomain {
            lower,
            upper,
            periodic,
        },
        kind: FamilyKind::Clifford { k, r, s },
    })
}

impl GeometryFamily {
    pub fn ambient_dim(&self) -> usize {
        self.n + 2
    }

    pub fn surface_dim(&self) -> usize {
        self.n
    }

    pub fn raw(&self, u: &[f64]) -> Result<RawPoint> {
        let n = self.n;
        match &self.kind {
            FamilyKind::Equator => {
                let (y, dy) = sphere_chart(u);
                let mut x = y;
                x.push(0.0);
                let dx = dy
                    .into_iter()
                    .map(|mut d| {
                        d.push(0.0);
                        d
                    })
                    .collect();
                let mut nu = vec![0.0; n + 2];
                nu[n + 1] = 1.0;
                Ok(RawPoint {
                    x,
                    dx,
                    nu,
                    dnu: vec![vec![0.0; n + 2]; n],
                })
            }
            FamilyKind::Clifford { k, r, s } => {
                let (k, r, s) = (*k, *r, *s);
                let (y, dy) = sphere_chart(&u[..k]);
                let (z, dz) = sphere_chart(&u[k..]);
                let x: Vec<f64> = y
                    .iter()
                    .map(|v| r * v)
                    .chain(z.iter().map(|v| s * v))
                    .collect();
                let nu: Vec<f64> = y
                    .iter()
                    .map(|v| -s * v)
                    .chain(z.iter().map(|v| r * v))
                    .collect();
                let zeros_z = vec![0.0; n - k + 1];
                let zeros_y = vec![0.0; k + 1];
                let mut dx = Vec::with_capacity(n);
                let mut dnu = Vec::with_capacity(n);
                for d in &dy {
                    dx.push(
                        d.iter()
                            .map(|v| r * v)
                            .chain(zeros_z.iter().copied())
                            .collect(),
                    );
                    dnu.push(
                        d.iter()
                            .map(|v| -s * v)
                            .chain(zeros_z.iter().copied())
                            .collect(),
                    );
                }
                for d in &dz {
                    dx.push(
                        zeros_y
                            .iter()
                            .copied()
                            .chain(d.iter().map(|v| s * v))
                            .collect(),
                    );
                    dnu.push(
                        zeros_y
                            .iter()
                            .copied()
                            .chain(d.iter().map(|v| r * v))
                            .collect(),
                    );
                }
                Ok(RawPoint { x, dx, nu, dnu })
            }
            FamilyKind::Rotational(surf) => Ok(surf.raw(u[0], u[1])),
        }
    }

    pub fn eval_frame(&self, u: &[f64]) -> Result<FramePoint> {
        let n = self.n;
        if !self.domain.contains(u) || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("{u:?} not in {}", self.name)));
        }
        let raw = self.raw(u)?;
        let scale = raw
            .dx
            .iter()
            .map(|d| dot(d, d).sqrt())
            .fold(0.0_f64, f64::max);

        // Gram–Schmidt on the coordinate derivatives in coordinate order.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut coframe = vec![0.0; n * n];
        let mut area_element = 1.0;
        for a in 0..n {
            let mut e = raw.dx[a].clone();
            let mut c = vec![0.0; n];
            c[a] = 1.0;
            for _ in 0..2 {
                for (b, eb) in basis.iter().enumerate() {
                    let proj = dot(&e, eb);
                    for (ei, ebi) in e.iter_mut().zip(eb) {
                        *ei -= proj * ebi;
                    }
                    for q in 0..n {
                        c[q] -= proj * coframe[b * n + q];
                    }
                }
            }
            let norm = dot(&e, &e).sqrt();
            if !(norm > 1e-10 * scale.max(1e-300)) {
                return Err(Error::SingularPoint(format!("{u:?} in {}", self.name)));
            }
            area_element *= norm;
            for ei in e.iter_mut() {
                *ei /= norm;
            }
            for q in 0..n {
                coframe[a * n + q] = c[q] / norm;
            }
            basis.push(e);
        }

        let mut a_mat = vec![0.0; n * n];
        let dnu_frame: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut d = vec![0.0; n + 2];
                for q in 0..n {
                    let cq = coframe[i * n + q];
                    for (di, v) in d.iter_mut().zip(&raw.dnu[q]) {
                        *di += cq * v;
                    }
                }
                d
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                a_mat[i * n + j] = -dot(&dnu_frame[i], &basis[j]);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (a_mat[i * n + j] + a_mat[j * n + i]);
                a_mat[i * n + j] = m;
                a_mat[j * n + i] = m;
            }
        }
        let asq = a_mat.iter().map(|v| v * v).sum();
        Ok(FramePoint {
            u: u.to_vec(),
            x: raw.x,
            nu: raw.nu,
            tangent_basis: basis,
            a: a_mat,
            asq,
            area_element,
            coframe,
        })
    }

    /// Tensor grid of interior sample points: cell midpoints along bounded
    /// coordinates, uniform nodes along periodic ones.
    pub fn sample_points(&self, res: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.domain.dim())
            .map(|a| {
                let (lo, hi) = (self.domain.lower[a], self.domain.upper[a]);
                let h = (hi - lo) / res as f64;
                (0..res)
                    .map(|i| {
                        if self.domain.periodic[a] {
                            lo + i as f64 * h
                        } else {
                            lo + (i as f64 + 0.5) * h
                        }
                    })
                    .collect()
            })
            .collect();
        tensor_grid(&axes)
    }

    /// `∫_M g dA` by Gauss–Legendre along bounded coordinates and the
    /// trapezoidal rule along periodic ones (`res` nodes per axis).
    pub fn integrate<F>(&self, res: usize, mut g: F) -> Result<f64>
    where
        F: FnMut(&FramePoint) -> f64,
    {
        let dim = self.domain.dim();
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..dim)
            .map(|a| {
                let (lo, hi) = (self.domain.lower[a], self.domain.upper[a]);
                if self.domain.periodic[a] {
                    let h = (hi - lo) / res as f64;
                    ((0..res).map(|i| lo + i as f64 * h).collect(), vec![h; res])
                } else {
                    gauss_legendre(res, lo, hi)
                }
            })
            .collect();
        let mut idx = vec![0usize; dim];
        let mut total = 0.0;
        let mut u = vec![0.0; dim];
        loop {
            let mut w = 1.0;
            for a in 0..dim {
                u[a] = rules[a].0[idx[a]];
                w *= rules[a].1[idx[a]];
            }
            let fp = self.eval_frame(&u)?;
            total += w * fp.area_element * g(&fp);
            let mut a = 0;
            loop {
                if a == dim {
                    return Ok(total);
                }
                idx[a] += 1;
                if idx[a] < res {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    /// `|M|`
    pub fn area(&self, res: usize) -> Result<f64> {
        self.integrate(res, |_| 1.0)
    }

    /// `∫|A|² / (n|M|)` by parameter-space quadrature.
    pub fn asq_ratio(&self, res: usize) -> Result<f64> {
        let area = self.area(res)?;
        let asq = self.integrate(res, |fp| fp.asq)?;
        Ok(asq / (self.n as f64 * area))
    }
}

fn tensor_grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(pts.len() * axis.len());
        for p in &pts {
            for &v in axis {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Scalar field `u ↦ l_v(u) = ⟨x(u), v⟩`.
pub fn l_func<'a>(family: &'a GeometryFamily, v: &'a [f64]) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |u| Ok(dot(&family.raw(u)?.x, v))
}

/// Scalar field `u ↦ f_v(u) = ⟨ν(u), v⟩`.
pub fn f_func<'a>(family: &'a GeometryFamily, v: &'a [f64]) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |u| Ok(dot(&family.raw(u)?.nu, v))
}

/// Centered-difference check of `∇l_v = v^T` and `∇f_v = -A(v^T)`.
///
/// Returns `(‖∇_h l_v - v^T‖, ‖∇_h f_v + A(v^T)‖)`.
pub fn gradient_check(family: &GeometryFamily, v: &[f64], u: &[f64], h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step h must be positive, got {h}"
        )));
    }
    let n = family.n;
    let fp = family.eval_frame(u)?;
    let mut dl = vec![0.0; n];
    let mut df = vec![0.0; n];
    for a in 0..n {
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        up[a] += h;
        um[a] -= h;
        for w in [&mut up, &mut um] {
            family.domain.wrap(w);
            if !family.domain.contains(w) {
                return Err(Error::Domain(format!("stencil leaves the domain at {u:?}")));
            }
        }
        let (rp, rm) = (family.raw(&up)?, family.raw(&um)?);
        dl[a] = (dot(&rp.x, v) - dot(&rm.x, v)) / (2.0 * h);
        df[a] = (dot(&rp.nu, v) - dot(&rm.nu, v)) / (2.0 * h);
    }
    let mut grad_l = vec![0.0; n + 2];
    let mut grad_f = vec![0.0; n + 2];
    for i in 0..n {
        let cl: f64 = (0..n).map(|a| fp.coframe[i * n + a] * dl[a]).sum();
        let cf: f64 = (0..n).map(|a| fp.coframe[i * n + a] * df[a]).sum();
        for (k, e) in fp.tangent_basis[i].iter().enumerate() {
            grad_l[k] += cl * e;
            grad_f[k] += cf * e;
        }
    }
    let vt = fp.tangential(v);
    let avt = fp.shape_apply(&vt);
    let r1 = grad_l
        .iter()
        .zip(&vt)
        .map(|(g, t)| (g - t) * (g - t))
        .sum::<f64>()
        .sqrt();
    let r2 = grad_f
        .iter()
        .zip(&avt)
        .map(|(g, t)| (g + t) * (g + t))
        .sum::<f64>()
        .sqrt();
    Ok((r1, r2))
}

/// `max |trace A|` over the sample points.
pub fn check_minimality(family: &GeometryFamily, samples: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in samples {
        worst = worst.max(family.eval_frame(u)?.trace_a().abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_eigs_2x2(a: &[f64]) -> (f64, f64) {
        let (p, q, r) = (a[0], a[1], a[3]);
        let m = 0.5 * (p + r);
        let d = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        (m - d, m + d)
    }

    #[test]
    fn equator_rejects_low_dimension() {
        assert!(matches!(equator(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn clifford_rejects_bad_k() {
        assert!(matches!(clifford(3, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(clifford(3, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn equator_is_totally_geodesic() {
        let fam = equator(2).unwrap();
        for u in fam.sample_points(7) {
            let fp = fam.eval_frame(&u).unwrap();
            assert_eq!(fp.asq, 0.0);
            assert!(fp.a.iter().all(|&v| v == 0.0));
            assert!(fp.frame_defect() < 1e-12);
        }
        let fam3 = equator(3).unwrap();
        let fp = fam3.eval_frame(&[1.0, 0.5, 2.0]).unwrap();
        assert_eq!(fp.trace_a(), 0.0);
    }

    #[test]
    fn equator_area_is_four_pi() {
        let fam = equator(2).unwrap();
        let area = fam.area(64).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-6, "{area}");
    }

    #[test]
    fn equator_pole_is_singular() {
        let fam = equator(2).unwrap();
        assert!(matches!(
            fam.eval_frame(&[0.0, 1.0]),
            Err(Error::SingularPoint(_))
        ));
        assert!(matches!(fam.eval_frame(&[4.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn clifford_torus_radii_and_curvatures() {
        let fam = clifford(2, 1).unwrap();
        match fam.kind {
            FamilyKind::Clifford { r, s, .. } => {
                // r² = s² = 1/2
                assert!((r * r - 0.5).abs() < 1e-15);
                assert!((s * s - 0.5).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        for u in fam.sample_points(9) {
            let fp = fam.eval_frame(&u).unwrap();
            assert!((fp.asq - 2.0).abs() < 1e-12);
            assert!(
                fp.x.iter()
                    .zip(&fp.nu)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
                    < 1e-12
            );
            let (lo, hi) = sym_eigs_2x2(&fp.a);
            assert!((lo + 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn clifford_4_2_has_asq_four() {
        let fam = clifford(4, 2).unwrap();
        for u in fam.sample_points(3) {
            let fp = fam.eval_frame(&u).unwrap();
            assert!((fp.asq - 4.0).abs() < 1e-12);
            assert!(fp.trace_a().abs() < 1e-12);
            assert!(fp.frame_defect() < 1e-12);
        }
    }

    #[test]
    fn clifford_principal_curvatures_general() {
        // √((n-k)/k) with multiplicity k, -√(k/(n-k)) with multiplicity n-k
        let (n, k) = (5usize, 2usize);
        let fam = clifford(n, k).unwrap();
        let fp = fam.eval_frame(&[1.1, 0.4, 0.9, 2.0, 1.3]).unwrap();
        let p = ((n - k) as f64 / k as f64).sqrt();
        let q = -(k as f64 / (n - k) as f64).sqrt();
        for i in 0..n {
            let expect = if i < k { p } else { q };
            assert!((fp.a[i * n + i] - expect).abs() < 1e-12);
        }
        assert!((fp.asq - n as f64).abs() < 1e-12);
    }

    #[test]
    fn minimality_of_analytic_families() {
        let fam = clifford(3, 1).unwrap();
        let pts = fam.sample_points(32);
        assert!(check_minimality(&fam, &pts).unwrap() <= 1e-10);
        let eq = equator(2).unwrap();
        assert_eq!(check_minimality(&eq, &eq.sample_points(16)).unwrap(), 0.0);
    }

    #[test]
    fn test_functions() {
        let fam = equator(2).unwrap();
        let axis = [0.0, 0.0, 0.0, 1.0];
        let zero = [0.0; 4];
        for u in fam.sample_points(5) {
            assert_eq!(l_func(&fam, &axis)(&u).unwrap(), 0.0);
            assert_eq!(f_func(&fam, &axis)(&u).unwrap().abs(), 1.0);
            assert_eq!(l_func(&fam, &zero)(&u).unwrap(), 0.0);
            assert_eq!(f_func(&fam, &zero)(&u).unwrap(), 0.0);
        }
    }

    #[test]
    fn gradient_identities_converge_at_second_order() {
        let fam = clifford(2, 1).unwrap();
        let v = [0.3, -0.5, 0.7, 0.2];
        let u = [0.7, 2.1];
        let (a1, b1) = gradient_check(&fam, &v, &u, 1e-3).unwrap();
        assert!(a1 <= 1e-5 && b1 <= 1e-5, "{a1} {b1}");
        let (a0, b0) = gradient_check(&fam, &v, &u, 2e-2).unwrap();
        let (a2, b2) = gradient_check(&fam, &v, &u, 1e-2).unwrap();
        assert!((a0 / a2 - 4.0).abs() < 0.1 && (b0 / b2 - 4.0).abs() < 0.1);
        assert_eq!(
            gradient_check(&fam, &[0.0; 4], &u, 1e-3).unwrap(),
            (0.0, 0.0)
        );
        assert!(gradient_check(&fam, &v, &u, 0.0).is_err());
    }

    #[test]
    fn gradient_on_equator_has_vanishing_normal_part() {
        let fam = equator(2).unwrap();
        let v = [0.1, 0.2, 0.3, 0.9];
        let (_, r2) = gradient_check(&fam, &v, &[1.0, 1.0], 1e-3).unwrap();
        assert!(r2 < 1e-14);
    }
}
