//! Small dense symmetric eigenproblems.
//!
//! Householder tridiagonalization followed by the implicit QL algorithm (the
//! classic `tred2`/`tql2` pair). Matrices are row-major `n*n` slices.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
///
/// `vectors` is row-major with eigenvector `j` stored in column `j`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymEigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }
}

pub fn sym_eigen(a: &[f64], n: usize) -> Result<SymEigen> {
    assert_eq!(a.len(), n * n, "matrix must be n*n");
    if n == 0 {
        return Ok(SymEigen {
            n,
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = 0.5 * (a[i * n + j] + a[j * n + i]);
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new] = v[r * n + old];
        }
    }
    Ok(SymEigen { n, values, vectors })
}

fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NumericalFailure("tql2 did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Cholesky factor (lower, row-major) of a symmetric positive definite matrix.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NumericalFailure(
                        "matrix is not positive definite".into(),
                    ));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `A x = λ B x` for symmetric `A` and symmetric positive definite `B`.
/// Eigenvectors are `B`-orthonormal.
pub fn sym_gen_eigen(a: &[f64], b: &[f64], n: usize) -> Result<SymEigen> {
    let l = cholesky(b, n)?;
    // C = L^{-1} A L^{-T}
    let mut y = a.to_vec();
    // Y = L^{-1} A (forward substitution on each column)
    for col in 0..n {
        for i in 0..n {
            let mut s = y[i * n + col];
            for k in 0..i {
                s -= l[i * n + k] * y[k * n + col];
            }
            y[i * n + col] = s / l[i * n + i];
        }
    }
    // C = Y L^{-T}, i.e. C^T = L^{-1} Y^T
    let mut c = vec![0.0; n * n];
    for row in 0..n {
        for i in 0..n {
            let mut s = y[row * n + i];
            for k in 0..i {
                s -= l[i * n + k] * c[row * n + k];
            }
            c[row * n + i] = s / l[i * n + i];
        }
    }
    let mut eig = sym_eigen(&c, n)?;
    // x = L^{-T} z
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = eig.vectors[i * n + col];
            for k in (i + 1)..n {
                s -= l[k * n + i] * eig.vectors[k * n + col];
            }
            eig.vectors[i * n + col] = s / l[i * n + i];
        }
    }
    Ok(eig)
}

/// Inertia of the pencil `(b, g)` on a possibly rank-deficient Gram matrix.
///
/// `g` is diagonalized and only directions with eigenvalue above
/// `rank_tol * max_eigenvalue` are kept; `b` is reduced to that subspace with
/// the `g`-orthonormal basis `V Λ^{-1/2}`.
#[derive(Debug, Clone)]
pub struct ReducedPencil {
    pub rank: usize,
    /// Eigenvalues of the reduced pencil, ascending.
    pub values: Vec<f64>,
    /// Coefficients (in the original basis) of the reduced eigenvectors;
    /// entry `k` has length `n` and is `g`-normalized.
    pub coefficients: Vec<Vec<f64>>,
    pub gram_eigenvalues: Vec<f64>,
}

pub fn reduced_pencil(b: &[f64], g: &[f64], n: usize, rank_tol: f64) -> Result<ReducedPencil> {
    let ge = sym_eigen(g, n)?;
    let gmax = ge.values.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let keep: Vec<usize> = (0..n)
        .filter(|&j| gmax > 0.0 && ge.values[j] > rank_tol * gmax)
        .collect();
    let rank = keep.len();
    // Z = V_keep Λ_keep^{-1/2}, n x rank
    let mut z = vec![0.0; n * rank];
    for (c, &j) in keep.iter().enumerate() {
        let s = 1.0 / ge.values[j].sqrt();
        for i in 0..n {
            z[i * rank + c] = ge.vectors[i * n + j] * s;
        }
    }
    let mut bz = vec![0.0; n * rank];
    for i in 0..n {
        for c in 0..rank {
            let mut s = 0.0;
            for k in 0..n {
                s += b[i * n + k] * z[k * rank + c];
            }
            bz[i * rank + c] = s;
        }
    }
    let mut red = vec![0.0; rank * rank];
    for r in 0..rank {
        for c in 0..rank {
            let mut s = 0.0;
            for k in 0..n {
                s += z[k * rank + r] * bz[k * rank + c];
            }
            red[r * rank + c] = s;
        }
    }
    let re = sym_eigen(&red, rank)?;
    let coefficients = (0..rank)
        .map(|j| {
            (0..n)
                .map(|i| {
                    (0..rank)
                        .map(|c| z[i * rank + c] * re.vectors[c * rank + j])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(ReducedPencil {
        rank,
        values: re.values,
        coefficients,
        gram_eigenvalues: ge.values,
    })
}
