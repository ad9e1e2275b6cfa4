//! Exact arithmetic for a discrete orthogonal polynomial ensemble on a
//! q-quadratic lattice.
//!
//! The crate computes gap probabilities of a determinantal point process
//! whose correlation kernel is built from q-Racah orthogonal polynomials,
//! and cross-checks them along five independent routes:
//!
//! 1. direct enumeration of configurations,
//! 2. a Fredholm determinant of the Christoffel-Darboux kernel,
//! 3. a discrete Riemann-Hilbert recursion in the gap endpoint,
//! 4. a connection-matrix (Lax pair) recursion driven by rank-one updates,
//! 5. iteration of a discrete Painleve system on an affine Weyl lattice.
//!
//! Everything runs over exact scalars: arbitrary-precision rationals or a
//! quadratic extension of them. A small dyadic big-float backend exists only
//! for infinite-product normalization constants. The crate also contains the
//! combinatorial side of the story: boxed plane partitions (lozenge tilings
//! of a hexagon) whose slice marginals are distributed by the same weights.

pub mod bigfloat;
pub mod connection;
pub mod drhp;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod mat2;
pub mod oracle;
pub mod orthopoly;
pub mod painleve;
pub mod pipeline;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod tiling;

pub use error::{CoreError, Result};
pub use scalar::{QuadExt, Scalar};
