//! Numerical core for computing the Morse index of the Jacobi operator
//! `J f = -Δf - n f - |A|² f` on compact minimal hypersurfaces of round spheres.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation; file formats, the command line and threading live in the
//! `mhs` companion crate.
//!
//! Module map:
//!
//! * [`geometry`]: analytic families (equators, Clifford hypersurfaces,
//!   rotational tori) with positions, normals and shape operators.
//! * [`rotational`]: shooting for S¹-invariant minimal tori in S³.
//! * [`fem`]: triangle meshes of surfaces in S³ and P1 assembly of the
//!   stiffness, mass and potential matrices.
//! * [`spectral`]: lowest eigenpairs of the pencil `(K - W, M)` and Sylvester
//!   inertia counts.
//! * [`closedform`]: exact spectra of equators and Clifford hypersurfaces.
//! * [`paperlab`]: trial spaces built from `ρ`, `l_v`, `f_v` and the
//!   index-bound checks that use them.
#![no_std]
// `!(x > 0.0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod closedform;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod ode;
pub mod paperlab;
pub mod quadrature;
pub mod rotational;
pub mod spectral;
pub mod spline;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
