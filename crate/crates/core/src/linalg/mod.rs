//! Dense and sparse linear algebra used by the spectral and trial-space code.

pub mod dense;
pub mod ldlt;
pub mod sparse;

pub use dense::{reduced_pencil, sym_eigen, sym_gen_eigen, ReducedPencil, SymEigen};
pub use ldlt::{rcm_ordering, EnvelopeLdlt};
pub use sparse::{CsrMatrix, TripletBuilder};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
