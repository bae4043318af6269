//! Exact spectra of round spheres and the Jacobi spectra of equators and
//! Clifford hypersurfaces `S^k(√(k/n)) × S^{n-k}(√((n-k)/n))`.
//!
//! Jacobi eigenvalues on the Clifford product are rationals
//! `n·μ_j/k + n·μ_l/(n-k) - 2n`; they are grouped by their exact numerator
//! over the common denominator `k(n-k)`, so multiplicities never depend on
//! floating-point comparisons.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// Ascending eigenvalues with multiplicities; complete below `cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    pub cutoff: f64,
}

impl SpectrumTable {
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| core::iter::repeat_n(e.eigenvalue, e.multiplicity as usize))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiSpectrum {
    pub table: SpectrumTable,
    pub index: u64,
    pub nullity: u64,
    pub lambda1: f64,
}

fn binomial(a: i64, b: i64) -> u64 {
    if b < 0 || a < b {
        return 0;
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    (0..b).fold(1u64, |acc, i| acc * (a - i) / (i + 1))
}

/// Dimension of degree-`j` harmonic polynomials in `m + 1` variables.
pub fn harmonic_dimension(m: usize, j: usize) -> u64 {
    let (m, j) = (m as i64, j as i64);
    binomial(j + m, m) - binomial(j + m - 2, m)
}

/// `j(j + m - 1)`, the `j`-th distinct Laplacian eigenvalue of the unit `S^m`.
pub fn sphere_eigenvalue(m: usize, j: usize) -> u64 {
    (j * (j + m - 1)) as u64
}

pub fn sphere_spectrum(m: usize, jmax: usize) -> Result<SpectrumTable> {
    if m < 1 {
        return Err(Error::InvalidDimension(
            "sphere dimension must be at least 1".into(),
        ));
    }
    let entries = (0..=jmax)
        .map(|j| SpectrumEntry {
            eigenvalue: sphere_eigenvalue(m, j) as f64,
            multiplicity: harmonic_dimension(m, j),
        })
        .collect();
    let next = sphere_eigenvalue(m, jmax + 1) as f64;
    Ok(SpectrumTable {
        entries,
        cutoff: next,
    })
}

/// Largest `j` with `j(j + m - 1) ≤ bound`.
fn degree_bound(m: usize, bound: i64) -> usize {
    let mut j = 0;
    while (sphere_eigenvalue(m, j + 1) as i64) <= bound {
        j += 1;
    }
    j
}

fn table_from_groups(groups: &BTreeMap<i64, u64>, denom: i64, cutoff: f64) -> JacobiSpectrum {
    let index = groups.range(..0).map(|(_, &m)| m).sum();
    let nullity = groups.get(&0).copied().unwrap_or(0);
    let lambda1 = *groups.keys().next().expect("nonempty spectrum") as f64 / denom as f64;
    let entries = groups
        .iter()
        .map(|(&num, &m)| SpectrumEntry {
            eigenvalue: num as f64 / denom as f64,
            multiplicity: m,
        })
        .filter(|e| e.eigenvalue < cutoff)
        .collect();
    JacobiSpectrum {
        table: SpectrumTable { entries, cutoff },
        index,
        nullity,
        lambda1,
    }
}

pub fn clifford_jacobi(n: usize, k: usize, cutoff: f64) -> Result<JacobiSpectrum> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "n = {n} must be at least 2"
        )));
    }
    if k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside 1..={}",
            n - 1
        )));
    }
    if !cutoff.is_finite() {
        return Err(Error::InvalidParameter("cutoff must be finite".into()));
    }
    let (ni, ki, li) = (n as i64, k as i64, (n - k) as i64);
    let denom = ki * li;
    // Enumerate through at least 1 so index and nullity are always complete.
    let limit = cutoff.max(1.0);
    // numerator < limit·denom  ⇔  n[(n-k)μ_j + kμ_l] < limit·denom + 2nk(n-k)
    let rhs = (limit * denom as f64).ceil() as i64 + 2 * ni * denom;
    let mut groups: BTreeMap<i64, u64> = BTreeMap::new();
    for j in 0..=degree_bound(k, rhs / (ni * li)) {
        let mu_j = sphere_eigenvalue(k, j) as i64;
        for l in 0..=degree_bound(n - k, rhs / (ni * ki)) {
            let mu_l = sphere_eigenvalue(n - k, l) as i64;
            let num = ni * (li * mu_j + ki * mu_l - 2 * denom);
            if (num as f64) < limit * denom as f64 {
                *groups.entry(num).or_insert(0) +=
                    harmonic_dimension(k, j) * harmonic_dimension(n - k, l);
            }
        }
    }
    Ok(table_from_groups(&groups, denom, cutoff))
}

pub fn equator_jacobi(n: usize, cutoff: f64) -> Result<JacobiSpectrum> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "n = {n} must be at least 2"
        )));
    }
    if !cutoff.is_finite() {
        return Err(Error::InvalidParameter("cutoff must be finite".into()));
    }
    let limit = cutoff.max(1.0);
    let mut groups: BTreeMap<i64, u64> = BTreeMap::new();
    let jmax = degree_bound(n, (limit + n as f64).ceil() as i64);
    for j in 0..=jmax {
        let num = sphere_eigenvalue(n, j) as i64 - n as i64;
        if (num as f64) < limit {
            groups.insert(num, harmonic_dimension(n, j));
        }
    }
    Ok(table_from_groups(&groups, 1, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Counts monomials of degree `j` in `m + 1` variables.
    fn monomials(vars: usize, j: usize) -> u64 {
        if vars == 0 {
            return (j == 0) as u64;
        }
        (0..=j).map(|e| monomials(vars - 1, j - e)).sum()
    }

    #[test]
    fn harmonic_dimension_matches_monomial_count() {
        // harmonic = homogeneous degree j minus r²·(degree j-2)
        for m in 1..6 {
            for j in 0..8 {
                let brute = monomials(m + 1, j) - if j >= 2 { monomials(m + 1, j - 2) } else { 0 };
                assert_eq!(harmonic_dimension(m, j), brute, "m {m} j {j}");
            }
        }
    }

    #[test]
    fn two_sphere_table() {
        let t = sphere_spectrum(2, 3).unwrap();
        let pairs: Vec<(f64, u64)> = t
            .entries
            .iter()
            .map(|e| (e.eigenvalue, e.multiplicity))
            .collect();
        assert_eq!(pairs, vec![(0.0, 1), (2.0, 3), (6.0, 5), (12.0, 7)]);
    }

    #[test]
    fn circle_and_first_nonzero() {
        let t = sphere_spectrum(1, 5).unwrap();
        for (j, e) in t.entries.iter().enumerate() {
            assert_eq!(e.eigenvalue, (j * j) as f64);
            assert_eq!(e.multiplicity, if j == 0 { 1 } else { 2 });
        }
        for m in 1..10 {
            let e = sphere_spectrum(m, 1).unwrap().entries[1];
            assert_eq!((e.eigenvalue, e.multiplicity), (m as f64, (m + 1) as u64));
        }
        assert!(sphere_spectrum(0, 2).is_err());
    }

    #[test]
    fn clifford_torus_matches_flat_torus_enumeration() {
        let cutoff = 40.0;
        let cf = clifford_jacobi(2, 1, cutoff).unwrap();
        let mut groups: BTreeMap<i64, u64> = BTreeMap::new();
        for p in -10i64..=10 {
            for q in -10i64..=10 {
                let v = 2 * (p * p + q * q) - 4;
                if (v as f64) < cutoff {
                    *groups.entry(v).or_insert(0) += 1;
                }
            }
        }
        let flat: Vec<(f64, u64)> = groups.iter().map(|(&v, &m)| (v as f64, m)).collect();
        let got: Vec<(f64, u64)> = cf
            .table
            .entries
            .iter()
            .map(|e| (e.eigenvalue, e.multiplicity))
            .collect();
        assert_eq!(got, flat);
        assert_eq!((cf.index, cf.nullity, cf.lambda1), (5, 4, -4.0));
    }

    #[test]
    fn clifford_and_equator_indices_for_all_dimensions() {
        for n in 2..=12 {
            for k in 1..n {
                let c = clifford_jacobi(n, k, 0.0).unwrap();
                assert_eq!(c.index, (n + 3) as u64, "n {n} k {k}");
                assert_eq!(c.lambda1, -2.0 * n as f64);
            }
            let e = equator_jacobi(n, 0.0).unwrap();
            assert_eq!(
                (e.index, e.nullity, e.lambda1),
                (1, (n + 1) as u64, -(n as f64))
            );
            assert_eq!(e.table.entries[0].multiplicity, 1);
        }
    }

    #[test]
    fn brute_force_negative_modes() {
        // (10,3): enumerate (j,l) directly in floating point
        let (n, k) = (10usize, 3usize);
        let (r2, s2) = (k as f64 / n as f64, (n - k) as f64 / n as f64);
        let mut count = 0;
        for j in 0..6 {
            for l in 0..6 {
                let v = sphere_eigenvalue(k, j) as f64 / r2
                    + sphere_eigenvalue(n - k, l) as f64 / s2
                    - 2.0 * n as f64;
                if v < -1e-9 {
                    count += harmonic_dimension(k, j) * harmonic_dimension(n - k, l);
                }
            }
        }
        assert_eq!(count, 13);
        assert_eq!(clifford_jacobi(10, 3, 0.0).unwrap().index, 13);
        assert_eq!(clifford_jacobi(4, 2, 0.0).unwrap().index, 7);
    }

    #[test]
    fn table_is_strictly_increasing_and_complete() {
        let c = clifford_jacobi(5, 2, 30.0).unwrap();
        assert!(c
            .table
            .entries
            .windows(2)
            .all(|w| w[0].eigenvalue < w[1].eigenvalue));
        assert!(c
            .table
            .entries
            .iter()
            .all(|e| e.multiplicity >= 1 && e.eigenvalue < 30.0));
        let bigger = clifford_jacobi(5, 2, 60.0).unwrap();
        let below: Vec<_> = bigger
            .table
            .entries
            .iter()
            .filter(|e| e.eigenvalue < 30.0)
            .copied()
            .collect();
        assert_eq!(below, c.table.entries);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            clifford_jacobi(3, 3, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            clifford_jacobi(1, 1, 1.0),
            Err(Error::InvalidDimension(_))
        ));
        assert!(equator_jacobi(1, 1.0).is_err());
    }
}
