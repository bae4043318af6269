//! Reverse Cuthill–McKee ordering and envelope (skyline) `LDLᵀ` factorization.
//!
//! No pivoting: the factorization is a congruence, so the signs of `D` give
//! the inertia of the matrix (Sylvester). Tiny pivots are reported as
//! singularity so callers can move the shift.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::CsrMatrix;
use crate::{Error, Result};

/// Returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n)
        .map(|i| a.row(i).filter(|&(j, _)| j != i).count())
        .collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(start) = (0..n)
        .filter(|&i| !visited[i])
        .min_by_key(|&i| (degree[i], i))
    {
        let start = pseudo_peripheral(a, &degree, start);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut nbrs: Vec<usize> = a.row(i).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, start: usize) -> (Vec<usize>, usize) {
    let mut level = vec![usize::MAX; a.n];
    let mut queue = VecDeque::new();
    level[start] = 0;
    queue.push_back(start);
    let mut last = start;
    while let Some(i) = queue.pop_front() {
        last = i;
        for (j, _) in a.row(i) {
            if level[j] == usize::MAX {
                level[j] = level[i] + 1;
                queue.push_back(j);
            }
        }
    }
    let depth = level[last];
    (level, depth)
}

fn pseudo_peripheral(a: &CsrMatrix, degree: &[usize], mut start: usize) -> usize {
    let (mut level, mut depth) = bfs_levels(a, start);
    for _ in 0..8 {
        let cand = (0..a.n)
            .filter(|&i| level[i] == depth)
            .min_by_key(|&i| (degree[i], i))
            .unwrap_or(start);
        let (l2, d2) = bfs_levels(a, cand);
        if d2 <= depth {
            break;
        }
        start = cand;
        level = l2;
        depth = d2;
    }
    start
}

/// `P A Pᵀ = L D Lᵀ` with `L` stored row-wise over each row's envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeLdlt {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    /// strictly-lower entries of row i, columns first[i]..i
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl EnvelopeLdlt {
    /// Factorizes `a` using the given ordering. `pivot_tol` is relative to the
    /// largest absolute diagonal entry.
    pub fn factor(a: &CsrMatrix, perm: &[usize], pivot_tol: f64) -> Result<Self> {
        let n = a.n;
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            let mut f = new;
            for (j, _) in a.row(old) {
                f = f.min(inv[j]);
            }
            first[new] = f;
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; offset[n]];
        let mut diag = vec![0.0; n];
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in a.row(old) {
                let jn = inv[j];
                if jn < new {
                    lower[offset[new] + jn - first[new]] = v;
                } else if jn == new {
                    diag[new] = v;
                }
            }
        }
        let scale = diag
            .iter()
            .fold(0.0_f64, |m, d| m.max(d.abs()))
            .max(f64::MIN_POSITIVE);

        // Row i holds g_ij = l_ij d_j while it is being built.
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = lower.split_at_mut(offset[i]);
            let row = &mut rest[..i - fi];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &done[offset[j] + k0 - fj..offset[j] + j - fj];
                let gi = &row[k0 - fi..j - fi];
                let s: f64 = gi.iter().zip(lj).map(|(g, l)| g * l).sum();
                row[j - fi] -= s;
            }
            let mut di = diag[i];
            for (k, gk) in row.iter_mut().enumerate() {
                let lk = *gk / diag[fi + k];
                di -= *gk * lk;
                *gk = lk;
            }
            if !di.is_finite() || di.abs() <= pivot_tol * scale {
                return Err(Error::NumericalFailure(format!(
                    "pivot {di:e} at row {i} below tolerance"
                )));
            }
            diag[i] = di;
        }
        Ok(EnvelopeLdlt {
            n,
            perm: perm.to_vec(),
            first,
            offset,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative pivots, i.e. negative eigenvalues of the matrix.
    pub fn negative_count(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            for (yk, l) in y[fi..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_eigen, TripletBuilder};

    fn cycle_matrix(n: usize, shift: f64) -> CsrMatrix {
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.push(i, i, 2.0 - shift);
            t.push(i, (i + 1) % n, -1.0);
            t.push((i + 1) % n, i, -1.0);
        }
        t.build()
    }

    #[test]
    fn solve_matches_matvec() {
        let a = cycle_matrix(40, -0.5);
        let perm = rcm_ordering(&a);
        let f = EnvelopeLdlt::factor(&a, &perm, 1e-14).unwrap();
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let y = f.solve(&b);
        for (xi, yi) in x.iter().zip(&y) {
            assert!((xi - yi).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_matches_dense_spectrum() {
        // indefinite shift
        let a = cycle_matrix(30, 1.3);
        let perm = rcm_ordering(&a);
        let f = EnvelopeLdlt::factor(&a, &perm, 1e-14).unwrap();
        let eig = sym_eigen(&a.to_dense(), 30).unwrap();
        let neg = eig.values.iter().filter(|&&v| v < 0.0).count();
        assert_eq!(f.negative_count(), neg);
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = cycle_matrix(17, 0.0);
        let mut p = rcm_ordering(&a);
        p.sort_unstable();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }

    #[test]
    fn singular_matrix_is_reported() {
        // cycle Laplacian has the constant vector in its kernel
        let a = cycle_matrix(10, 0.0);
        let perm: Vec<usize> = (0..10).collect();
        assert!(EnvelopeLdlt::factor(&a, &perm, 1e-12).is_err());
    }
}
