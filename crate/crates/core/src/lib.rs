//! Exact-arithmetic toolkit for the separating redundancy of linear codes.
//!
//! A parity-check matrix H for an \[n,k,d\]_q code is S-separating when the
//! submatrix H(S) (rows vanishing on the coordinate set S, restricted to the
//! remaining columns) is a parity-check matrix for the punctured code, and
//! l-separating when that holds for every |S| <= l. The l-separating
//! redundancy s_l is the row count of a smallest l-separating matrix.
//!
//! This crate provides:
//!
//! - [`field`] / [`matrix`]: GF(q) arithmetic and dense exact linear algebra;
//! - [`code`]: code parameter records, preset codes, dual enumeration;
//! - [`separation`]: separation verdicts, witnesses, and an exhaustive
//!   ground-truth oracle for tiny codes;
//! - [`bounds`]: exact evaluation of every general lower/upper bound on s_l
//!   from code parameters alone, in big-integer/rational arithmetic with an
//!   optional certified interval backend;
//! - [`covering`]: covering designs (verification, Schoenheim lower bounds,
//!   greedy construction, external tables);
//! - [`construct`]: builders of actual l-separating matrices, always run
//!   through the verifier;
//! - [`geometry`]: the affine-plane AG(2,2^h) incidence machinery and its
//!   certified 5-separating construction.
//!
//! All numeric results are exact integers or rationals; nothing is ever
//! rounded through floating point.

pub mod bounds;
pub mod code;
pub mod construct;
pub mod covering;
pub mod error;
pub mod field;
pub mod geometry;
pub mod matrix;
pub mod numeric;
pub mod separation;
pub mod subsets;

pub use code::{CodeParams, LinearCode, Preset};
pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use matrix::GFMatrix;

/// Pin the global worker-thread count (otherwise all cores are used).
/// Results are deterministic regardless of the count; this only bounds
/// parallelism. Returns false when a pool was already installed.
pub fn configure_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

/// Exact scalar used by default throughout the bound evaluators.
pub type Exact = num_rational::BigRational;
/// Certified interval scalar for the fast bound backend.
pub type Certified = numeric::Interval;
