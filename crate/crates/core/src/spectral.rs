//! Lowest eigenpairs and inertia of the pencil `(K - W, M)`.
//!
//! Two independent counting paths: shift-invert subspace iteration with
//! Rayleigh–Ritz for eigenpairs, and the signature of an `LDLᵀ`
//! factorization of `K - W - σM` for counts (Sylvester's law of inertia).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fem::{OperatorSet, SurfaceMesh};
use crate::linalg::{axpy, dot, sym_eigen, sym_gen_eigen, CsrMatrix, EnvelopeLdlt};
use crate::{Error, Result};

/// Systems up to this size may be solved densely.
pub const DENSE_LIMIT: usize = 3000;

/// `h²` of the 64×64 Clifford torus mesh, where the default band is 0.05.
const REFERENCE_H2: f64 = 2.0 * core::f64::consts::PI * core::f64::consts::PI / 4096.0;

/// Zero band `0.05 · h² / h²₆₄` with `h² = |M| / V`.
pub fn default_zero_tol(mesh: &SurfaceMesh) -> f64 {
    0.05 * mesh.h_squared() / REFERENCE_H2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    SubspaceIteration,
    Dense,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    pub nullity: usize,
    pub zero_tol: f64,
    pub lambda1: f64,
    /// `‖(K - W)x - λMx‖` in the `M⁻¹` norm for `M`-normalized `x`.
    pub residuals: Vec<f64>,
    /// True when the largest computed eigenvalue lies above the zero band, so
    /// `index` and `nullity` are not truncated by `count`.
    pub complete: bool,
    pub iterations: usize,
    pub method: SolverMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl EigenReport {
    fn new(
        eigenvalues: Vec<f64>,
        residuals: Vec<f64>,
        vectors: Vec<Vec<f64>>,
        zero_tol: f64,
        iterations: usize,
        method: SolverMethod,
    ) -> Self {
        let index = eigenvalues.iter().filter(|&&l| l < -zero_tol).count();
        let nullity = eigenvalues.iter().filter(|&&l| l.abs() <= zero_tol).count();
        let complete = eigenvalues.last().is_some_and(|&l| l > zero_tol);
        EigenReport {
            lambda1: eigenvalues[0],
            eigenvalues,
            index,
            nullity,
            zero_tol,
            residuals,
            complete,
            iterations,
            method,
            vectors: Some(vectors),
        }
    }

    pub fn without_vectors(mut self) -> Self {
        self.vectors = None;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Residual target in the `M⁻¹` norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra subspace vectors beyond `count`; at least 10.
    pub guard: usize,
    pub seed: u64,
    /// Use the dense solver whenever the system fits below [`DENSE_LIMIT`].
    pub force_dense: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 2000,
            guard: 10,
            seed: 0,
            force_dense: false,
        }
    }
}

/// The `count` algebraically smallest eigenpairs of `(K - W, M)`.
pub fn lowest_eigs(ops: &OperatorSet, count: usize, zero_tol: f64) -> Result<EigenReport> {
    lowest_eigs_with(ops, count, zero_tol, &SolverOptions::default())
}

pub fn lowest_eigs_with(
    ops: &OperatorSet,
    count: usize,
    zero_tol: f64,
    opts: &SolverOptions,
) -> Result<EigenReport> {
    let n = ops.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "count {count} outside 1..={n}"
        )));
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zero_tol {zero_tol} must be nonnegative"
        )));
    }
    let p = (count + opts.guard.max(10).max(count)).min(n);
    if opts.force_dense || p == n {
        if n > DENSE_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "dense solve of {n} unknowns exceeds {DENSE_LIMIT}"
            )));
        }
        return dense_lowest(ops, count, zero_tol);
    }
    subspace_iteration(ops, count, p, zero_tol, opts)
}

fn dense_lowest(ops: &OperatorSet, count: usize, zero_tol: f64) -> Result<EigenReport> {
    let eig = dense_eigs(ops)?;
    let b = ops.stability();
    let mfac = EnvelopeLdlt::factor(&ops.mass, &ops.ordering, 1e-14)?;
    let vectors: Vec<Vec<f64>> = (0..count).map(|j| eig.vector(j)).collect();
    let values = eig.values[..count].to_vec();
    let residuals = vectors
        .iter()
        .zip(&values)
        .map(|(x, &l)| {
            let mut r = b.mul_vec(x);
            axpy(-l, &ops.mass.mul_vec(x), &mut r);
            dot(&r, &mfac.solve(&r)).max(0.0).sqrt()
        })
        .collect();
    Ok(EigenReport::new(
        values,
        residuals,
        vectors,
        zero_tol,
        0,
        SolverMethod::Dense,
    ))
}

/// Full dense spectrum of the pencil with `M`-orthonormal vectors.
pub fn dense_eigs(ops: &OperatorSet) -> Result<crate::linalg::SymEigen> {
    let n = ops.dim();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "dense solve of {n} unknowns exceeds {DENSE_LIMIT}"
        )));
    }
    sym_gen_eigen(&ops.stability().to_dense(), &ops.mass.to_dense(), n)
}

/// `M`-orthonormalizes the columns in place (two passes of classical
/// Gram–Schmidt). Collapsed columns are replaced by random vectors.
fn m_orthonormalize(
    mass: &CsrMatrix,
    cols: &mut [Vec<f64>],
    mcols: &mut [Vec<f64>],
    rng: &mut ChaCha8Rng,
) {
    let n = mass.n;
    for j in 0..cols.len() {
        let mut attempts = 0;
        loop {
            let before = mass.quad(&cols[j]).max(0.0).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let c = dot(&mcols[i], &cols[j]);
                    let (head, tail) = cols.split_at_mut(j);
                    axpy(-c, &head[i], &mut tail[0]);
                }
            }
            mass.mul_vec_into(&cols[j], &mut mcols[j]);
            let norm = dot(&cols[j], &mcols[j]).max(0.0).sqrt();
            if norm > 1e-10 * before && norm > 0.0 {
                let inv = 1.0 / norm;
                cols[j].iter_mut().for_each(|v| *v *= inv);
                mcols[j].iter_mut().for_each(|v| *v *= inv);
                break;
            }
            attempts += 1;
            assert!(attempts < 8, "cannot complete an M-orthonormal basis");
            cols[j] = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        }
    }
}

fn combine(basis: &[Vec<f64>], z: &[f64], p: usize) -> Vec<Vec<f64>> {
    let n = basis[0].len();
    (0..p)
        .map(|j| {
            let mut out = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                let c = z[i * p + j];
                if c != 0.0 {
                    axpy(c, b, &mut out);
                }
            }
            out
        })
        .collect()
}

fn factor_shift(ops: &OperatorSet, b: &CsrMatrix, sigma: f64) -> Result<EnvelopeLdlt> {
    EnvelopeLdlt::factor(&b.add_scaled(1.0, &ops.mass, -sigma), &ops.ordering, 1e-13)
}

fn subspace_iteration(
    ops: &OperatorSet,
    count: usize,
    p: usize,
    zero_tol: f64,
    opts: &SolverOptions,
) -> Result<EigenReport> {
    let n = ops.dim();
    let b = ops.stability();
    let mass = &ops.mass;
    let mfac = EnvelopeLdlt::factor(mass, &ops.ordering, 1e-14)?;
    // K ≥ 0 and W ≤ max_potential·M, so this shift is below the spectrum.
    let mut sigma = -ops.max_potential - 1.0;
    let mut fac = factor_shift(ops, &b, sigma)?;
    if fac.negative_count() != 0 {
        return Err(Error::NumericalFailure(format!(
            "initial shift {sigma} is not below the spectrum"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut reshifts = 0;
    let mut theta = vec![0.0; p];
    let mut residuals = vec![f64::INFINITY; count];
    let mut mx = vec![vec![0.0; n]; p];
    for it in 1..=opts.max_iter {
        let mut y: Vec<Vec<f64>> = x
            .iter()
            .map(|xi| {
                mass.mul_vec_into(xi, &mut mx[0]);
                fac.solve(&mx[0])
            })
            .collect();
        let mut my = vec![vec![0.0; n]; p];
        m_orthonormalize(mass, &mut y, &mut my, &mut rng);
        let by: Vec<Vec<f64>> = y.iter().map(|v| b.mul_vec(v)).collect();
        let mut h = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = 0.5 * (dot(&y[i], &by[j]) + dot(&y[j], &by[i]));
                h[i * p + j] = v;
                h[j * p + i] = v;
            }
        }
        let eig = sym_eigen(&h, p)?;
        theta.copy_from_slice(&eig.values);
        x = combine(&y, &eig.vectors, p);
        let bx = combine(&by, &eig.vectors[..], p);
        mx = combine(&my, &eig.vectors, p);
        for j in 0..count {
            let mut r = bx[j].clone();
            axpy(-theta[j], &mx[j], &mut r);
            residuals[j] = dot(&r, &mfac.solve(&r)).max(0.0).sqrt();
        }
        if residuals.iter().all(|&r| r <= opts.tol) {
            let vectors = x.into_iter().take(count).collect();
            return Ok(EigenReport::new(
                theta[..count].to_vec(),
                residuals,
                vectors,
                zero_tol,
                it,
                SolverMethod::SubspaceIteration,
            ));
        }
        // Move the pole just below the lowest Ritz value once it has settled.
        if (it == 3 || it == 12) && reshifts < 2 {
            let spread = (theta[count - 1] - theta[0]).abs();
            let gap = (0.02 * spread)
                .max(1e-3 * (1.0 + theta[0].abs()))
                .max(residuals[0]);
            let candidate = theta[0] - gap;
            if candidate > sigma {
                if let Ok(f) = factor_shift(ops, &b, candidate) {
                    if f.negative_count() == 0 {
                        fac = f;
                        sigma = candidate;
                    }
                }
            }
            reshifts += 1;
        }
    }
    let worst = residuals.iter().fold(0.0_f64, |m, &r| m.max(r));
    Err(Error::Convergence(format!(
        "subspace iteration stalled after {} iterations, worst residual {worst:e}",
        opts.max_iter
    )))
}

/// Number of eigenvalues of the pencil strictly below `sigma`.
pub fn inertia_below(ops: &OperatorSet, sigma: f64) -> Result<usize> {
    let b = ops.stability();
    let attempts = 6;
    let mut last = String::new();
    for k in 0..attempts {
        let s = sigma - k as f64 * 1e-9 * (1.0 + sigma.abs());
        match EnvelopeLdlt::factor(&b.add_scaled(1.0, &ops.mass, -s), &ops.ordering, 1e-12) {
            Ok(f) => return Ok(f.negative_count()),
            Err(e) => last = format!("{e}"),
        }
    }
    let _ = last;
    Err(Error::ShiftRetryExhausted(attempts))
}

/// Smallest eigenpair with `ρ` normalized to unit `M`-norm, `Σ Mρ > 0`.
pub fn first_eigfunction(ops: &OperatorSet) -> Result<(f64, Vec<f64>)> {
    let report = lowest_eigs(ops, 1, 0.0)?;
    let lambda1 = report.lambda1;
    let mut rho = report
        .vectors
        .and_then(|v| v.into_iter().next())
        .ok_or_else(|| Error::NumericalFailure("solver returned no eigenvector".into()))?;
    let total: f64 = ops.mass.mul_vec(&rho).iter().sum();
    if total < 0.0 {
        rho.iter_mut().for_each(|v| *v = -*v);
    }
    let (lo, hi) = rho
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !(lo > 0.0) {
        return Err(Error::GroundStateSign(lo / hi));
    }
    Ok((lambda1, rho))
}
