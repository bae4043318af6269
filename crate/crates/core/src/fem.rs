//! Triangle meshes of surfaces in `S³` (`n = 2`) and assembly of the P1
//! matrices whose pencil `(K - W, M)` discretizes the Jacobi operator
//! `J = -Δ - n - |A|²`.
//!
//! Elements are flat triangles with vertices on the surface. Geometric
//! fields (`ν`, `|A|²`) are sampled analytically at the quadrature nodes when
//! a source family is available.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use serde::Serialize;

use crate::geometry::GeometryFamily;
use crate::linalg::{rcm_ordering, CsrMatrix, TripletBuilder};
use crate::quadrature::TRIANGLE_RULE;
use crate::{Error, Result};

pub type Vec4 = [f64; 4];

#[inline]
fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn sub4(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn to_vec4(v: &[f64]) -> Vec4 {
    [v[0], v[1], v[2], v[3]]
}

/// How the normals on a mesh were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalMode {
    /// Evaluated from an analytic family.
    Analytic,
    /// Rebuilt per triangle from vertex positions (imported meshes); `f_v`
    /// fields are lower accuracy in this mode.
    Reconstructed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadPoint {
    pub weight: f64,
    pub position: Vec4,
    pub normal: Vec4,
    pub asq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec4>,
    pub vertex_normals: Vec<Vec4>,
    pub vertex_asq: Vec<f64>,
    pub triangles: Vec<[usize; 3]>,
    pub quad_points: Vec<[QuadPoint; 3]>,
    /// Surface dimension (always 2 here).
    pub n: usize,
    pub normal_mode: NormalMode,
    pub source: Option<String>,
}

fn triangle_gram(p: &[Vec4; 3]) -> (f64, f64, f64) {
    let e1 = sub4(&p[1], &p[0]);
    let e2 = sub4(&p[2], &p[0]);
    (dot4(&e1, &e1), dot4(&e1, &e2), dot4(&e2, &e2))
}

fn triangle_area(p: &[Vec4; 3]) -> f64 {
    let (g11, g12, g22) = triangle_gram(p);
    0.5 * (g11 * g22 - g12 * g12).max(0.0).sqrt()
}

fn barycentric(p: &[Vec4; 3], b: &[f64; 3]) -> Vec4 {
    core::array::from_fn(|k| b[0] * p[0][k] + b[1] * p[1][k] + b[2] * p[2][k])
}

/// Unit vector orthogonal to `a`, `b`, `c` in `R⁴` with `det[a, b, c, n] > 0`.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let m3 = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    let n = [-m3(1, 2, 3), m3(0, 2, 3), -m3(0, 1, 3), m3(0, 1, 2)];
    let len = dot4(&n, &n).sqrt();
    n.map(|v| v / len)
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Each directed edge appears at most once and every edge is shared by
    /// exactly two triangles with opposite directions.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// `|M|` as the sum of quadrature weights.
    pub fn area(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Quadrature of a field sampled at the quadrature nodes.
    pub fn integrate<F: Fn(&QuadPoint) -> f64>(&self, g: F) -> f64 {
        self.quad_points
            .iter()
            .flat_map(|qs| qs.iter())
            .map(|q| q.weight * g(q))
            .sum()
    }

    pub fn max_asq(&self) -> f64 {
        self.quad_points
            .iter()
            .flat_map(|qs| qs.iter())
            .fold(0.0_f64, |m, q| m.max(q.asq))
    }

    /// Mean squared mesh size `|M| / V`.
    pub fn h_squared(&self) -> f64 {
        self.area() / self.vertex_count() as f64
    }

    /// Replaces the `|A|²` field by `scale·|A|²` (vertices and quadrature
    /// nodes). The result is no longer minimal; used for synthetic potentials.
    pub fn with_scaled_asq(&self, scale: f64) -> SurfaceMesh {
        let mut m = self.clone();
        for a in m.vertex_asq.iter_mut() {
            *a *= scale;
        }
        for qs in m.quad_points.iter_mut() {
            for q in qs.iter_mut() {
                q.asq *= scale;
            }
        }
        m.source = m.source.map(|s| format!("{s} with |A|² scaled by {scale}"));
        m
    }

    /// Builds a mesh from raw data with normals reconstructed per triangle
    /// and `|A|²` interpolated from vertex values.
    pub fn from_data(
        vertices: Vec<Vec4>,
        triangles: Vec<[usize; 3]>,
        vertex_asq: Vec<f64>,
    ) -> Result<SurfaceMesh> {
        if vertex_asq.len() != vertices.len() {
            return Err(Error::InvalidParameter(format!(
                "Asq has {} values for {} vertices",
                vertex_asq.len(),
                vertices.len()
            )));
        }
        let mut verts = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let r = dot4(v, v).sqrt();
            if !((r - 1.0).abs() <= 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "vertex {i} has norm {r}, expected 1"
                )));
            }
            verts.push(v.map(|c| c / r));
        }
        if let Some(t) = triangles
            .iter()
            .find(|t| t.iter().any(|&k| k >= verts.len()))
        {
            return Err(Error::InvalidParameter(format!(
                "triangle {t:?} references a missing vertex"
            )));
        }
        let mut vnormals = vec![[0.0; 4]; verts.len()];
        let mut quad_points = Vec::with_capacity(triangles.len());
        for (ti, t) in triangles.iter().enumerate() {
            let p = [verts[t[0]], verts[t[1]], verts[t[2]]];
            let area = triangle_area(&p);
            if !(area >= 1e-14) {
                return Err(Error::DegenerateElement { index: ti, area });
            }
            let c = barycentric(&p, &[1.0 / 3.0; 3]);
            let cl = dot4(&c, &c).sqrt();
            let nrm = cross4(&c.map(|v| v / cl), &sub4(&p[1], &p[0]), &sub4(&p[2], &p[0]));
            for &k in t {
                for d in 0..4 {
                    vnormals[k][d] += area * nrm[d];
                }
            }
            quad_points.push(core::array::from_fn(|q| {
                let (b, w) = TRIANGLE_RULE[q];
                QuadPoint {
                    weight: w * area,
                    position: barycentric(&p, &b),
                    normal: nrm,
                    asq: b[0] * vertex_asq[t[0]]
                        + b[1] * vertex_asq[t[1]]
                        + b[2] * vertex_asq[t[2]],
                }
            }));
        }
        for (k, nv) in vnormals.iter_mut().enumerate() {
            let x = verts[k];
            let d = dot4(nv, &x);
            for i in 0..4 {
                nv[i] -= d * x[i];
            }
            let l = dot4(nv, nv).sqrt();
            if l > 0.0 {
                *nv = nv.map(|v| v / l);
            }
        }
        Ok(SurfaceMesh {
            vertices: verts,
            vertex_normals: vnormals,
            vertex_asq,
            triangles,
            quad_points,
            n: 2,
            normal_mode: NormalMode::Reconstructed,
            source: None,
        })
    }
}

/// Structured `nt × nphi` grid on a doubly periodic family, two triangles per
/// cell, seams identified through the vertex index map.
pub fn mesh_torus(family: &GeometryFamily, nt: usize, nphi: usize) -> Result<SurfaceMesh> {
    if nt < 8 || nphi < 8 {
        return Err(Error::InvalidParameter(format!(
            "torus resolution {nt}x{nphi} below 8"
        )));
    }
    if family.n != 2 || !family.domain.is_doubly_periodic() {
        return Err(Error::InvalidParameter(format!(
            "{} is not a doubly periodic surface in S³",
            family.name
        )));
    }
    let d = &family.domain;
    let ht = (d.upper[0] - d.lower[0]) / nt as f64;
    let hp = (d.upper[1] - d.lower[1]) / nphi as f64;
    let param = |i: f64, j: f64| [d.lower[0] + i * ht, d.lower[1] + j * hp];
    let idx = |i: usize, j: usize| (i % nt) * nphi + (j % nphi);

    let mut vertices = Vec::with_capacity(nt * nphi);
    let mut vertex_normals = Vec::with_capacity(nt * nphi);
    let mut vertex_asq = Vec::with_capacity(nt * nphi);
    for i in 0..nt {
        for j in 0..nphi {
            let fp = family.eval_frame(&param(i as f64, j as f64))?;
            vertices.push(to_vec4(&fp.x));
            vertex_normals.push(to_vec4(&fp.nu));
            vertex_asq.push(fp.asq);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nt * nphi);
    let mut tri_params: Vec<[[f64; 2]; 3]> = Vec::with_capacity(2 * nt * nphi);
    for i in 0..nt {
        for j in 0..nphi {
            let (fi, fj) = (i as f64, j as f64);
            let c00 = param(fi, fj);
            let c10 = param(fi + 1.0, fj);
            let c11 = param(fi + 1.0, fj + 1.0);
            let c01 = param(fi, fj + 1.0);
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            tri_params.push([c00, c10, c11]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            tri_params.push([c00, c11, c01]);
        }
    }
    let mut quad_points = Vec::with_capacity(triangles.len());
    for (ti, (t, pp)) in triangles.iter().zip(&tri_params).enumerate() {
        let p = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
        let area = triangle_area(&p);
        if !(area >= 1e-14) {
            return Err(Error::DegenerateElement { index: ti, area });
        }
        let mut qs = [QuadPoint {
            weight: 0.0,
            position: [0.0; 4],
            normal: [0.0; 4],
            asq: 0.0,
        }; 3];
        for (q, (b, w)) in qs.iter_mut().zip(TRIANGLE_RULE.iter()) {
            let mut u = [
                b[0] * pp[0][0] + b[1] * pp[1][0] + b[2] * pp[2][0],
                b[0] * pp[0][1] + b[1] * pp[1][1] + b[2] * pp[2][1],
            ];
            d.wrap(&mut u);
            let fp = family.eval_frame(&u)?;
            *q = QuadPoint {
                weight: w * area,
                position: barycentric(&p, b),
                normal: to_vec4(&fp.nu),
                asq: fp.asq,
            };
        }
        quad_points.push(qs);
    }
    Ok(SurfaceMesh {
        vertices,
        vertex_normals,
        vertex_asq,
        triangles,
        quad_points,
        n: 2,
        normal_mode: NormalMode::Analytic,
        source: Some(format!("{} {nt}x{nphi}", family.name)),
    })
}

/// Icosphere with `subdivisions` midpoint refinements, placed in the
/// equatorial `S² = S³ ∩ {x₄ = 0}`.
pub fn mesh_sphere(subdivisions: usize) -> Result<SurfaceMesh> {
    if subdivisions < 1 {
        return Err(Error::InvalidParameter(
            "sphere mesh needs at least one subdivision".into(),
        ));
    }
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let l = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / l, p[1] / l, p[2] / l]
    };
    for p in pts.iter_mut() {
        *p = normalize(*p);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (pa, pb) = (pts[a], pts[b]);
                pts.push(normalize([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]));
                pts.len() - 1
            })
        };
        for f in &faces {
            let ab = mid(f[0], f[1], &mut pts);
            let bc = mid(f[1], f[2], &mut pts);
            let ca = mid(f[2], f[0], &mut pts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    let vertices: Vec<Vec4> = pts.iter().map(|p| [p[0], p[1], p[2], 0.0]).collect();
    let axis = [0.0, 0.0, 0.0, 1.0];
    let mut quad_points = Vec::with_capacity(faces.len());
    for (ti, t) in faces.iter().enumerate() {
        let p = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
        let area = triangle_area(&p);
        if !(area >= 1e-14) {
            return Err(Error::DegenerateElement { index: ti, area });
        }
        quad_points.push(core::array::from_fn(|q| {
            let (b, w) = TRIANGLE_RULE[q];
            QuadPoint {
                weight: w * area,
                position: barycentric(&p, &b),
                normal: axis,
                asq: 0.0,
            }
        }));
    }
    Ok(SurfaceMesh {
        vertex_normals: vec![axis; vertices.len()],
        vertex_asq: vec![0.0; vertices.len()],
        vertices,
        triangles: faces,
        quad_points,
        n: 2,
        normal_mode: NormalMode::Analytic,
        source: Some(format!(
            "equator(n=2) icosphere subdivisions={subdivisions}"
        )),
    })
}

/// Stiffness `K`, mass `M` and potential-weighted mass `W` (weight `n + |A|²`).
/// The stability form is `B = K - W`.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorSet {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub weighted: CsrMatrix,
    pub n: usize,
    /// Largest `n + |A|²` over the quadrature nodes.
    pub max_potential: f64,
    /// Fill-reducing ordering shared by every factorization of this pencil.
    #[serde(skip)]
    pub ordering: Vec<usize>,
}

impl OperatorSet {
    pub fn dim(&self) -> usize {
        self.mass.n
    }

    /// `B = K - W`
    pub fn stability(&self) -> CsrMatrix {
        self.stiffness.add_scaled(1.0, &self.weighted, -1.0)
    }

    /// `|A|²`-weighted mass `W - nM`.
    pub fn asq_mass(&self) -> CsrMatrix {
        self.weighted.add_scaled(1.0, &self.mass, -(self.n as f64))
    }

    /// `K - W - σM`
    pub fn shifted(&self, sigma: f64) -> CsrMatrix {
        self.stability().add_scaled(1.0, &self.mass, -sigma)
    }

    /// `∫ g h` of two nodal functions.
    pub fn l2(&self, g: &[f64], h: &[f64]) -> f64 {
        self.mass.bilinear(g, h)
    }

    /// `∫ g J(h)` in weak form.
    pub fn form(&self, g: &[f64], h: &[f64]) -> f64 {
        self.stiffness.bilinear(g, h) - self.weighted.bilinear(g, h)
    }

    /// Rayleigh quotient `gᵀKg / gᵀMg` of the Laplacian.
    pub fn laplace_quotient(&self, g: &[f64]) -> f64 {
        self.stiffness.quad(g) / self.mass.quad(g)
    }
}

pub fn assemble(mesh: &SurfaceMesh) -> Result<OperatorSet> {
    let nv = mesh.vertex_count();
    let nn = mesh.n as f64;
    let cap = 9 * mesh.triangles.len();
    let mut kb = TripletBuilder::with_capacity(nv, cap);
    let mut mb = TripletBuilder::with_capacity(nv, cap);
    let mut wb = TripletBuilder::with_capacity(nv, cap);
    let grads = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut max_potential: f64 = 0.0;
    for (ti, (t, qs)) in mesh.triangles.iter().zip(&mesh.quad_points).enumerate() {
        let p = [
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        ];
        let (g11, g12, g22) = triangle_gram(&p);
        let det = g11 * g22 - g12 * g12;
        let area = 0.5 * det.max(0.0).sqrt();
        if !(area >= 1e-14) {
            return Err(Error::DegenerateElement { index: ti, area });
        }
        // inverse metric of the affine chart
        let inv = [g22 / det, -g12 / det, g11 / det];
        for a in 0..3 {
            for b in 0..3 {
                let (da, db) = (grads[a], grads[b]);
                let k = area
                    * (da[0] * (inv[0] * db[0] + inv[1] * db[1])
                        + da[1] * (inv[1] * db[0] + inv[2] * db[1]));
                let mut m = 0.0;
                let mut w = 0.0;
                for (q, (bary, _)) in qs.iter().zip(TRIANGLE_RULE.iter()) {
                    let phi = q.weight * bary[a] * bary[b];
                    m += phi;
                    w += phi * (nn + q.asq);
                }
                kb.push(t[a], t[b], k);
                mb.push(t[a], t[b], m);
                wb.push(t[a], t[b], w);
            }
        }
        for q in qs {
            max_potential = max_potential.max(nn + q.asq);
        }
    }
    let stiffness = kb.build();
    let ordering = rcm_ordering(&stiffness);
    Ok(OperatorSet {
        stiffness,
        mass: mb.build(),
        weighted: wb.build(),
        n: mesh.n,
        max_potential,
        ordering,
    })
}

/// Vertex interpolation of a field given position and normal.
pub fn project<F: Fn(&Vec4, &Vec4) -> f64>(mesh: &SurfaceMesh, field: F) -> Vec<f64> {
    mesh.vertices
        .iter()
        .zip(&mesh.vertex_normals)
        .map(|(x, nu)| field(x, nu))
        .collect()
}

/// Nodal `l_v`.
pub fn project_l(mesh: &SurfaceMesh, v: &Vec4) -> Vec<f64> {
    project(mesh, |x, _| dot4(x, v))
}

/// Nodal `f_v`.
pub fn project_f(mesh: &SurfaceMesh, v: &Vec4) -> Vec<f64> {
    project(mesh, |_, nu| dot4(nu, v))
}

pub fn unit(k: usize) -> Vec4 {
    let mut e = [0.0; 4];
    e[k] = 1.0;
    e
}
