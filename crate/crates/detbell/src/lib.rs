//! Exact evaluation and cross-checking of determinant and permanent
//! formulas, with the machinery the formulas connect to: set-partition
//! combinatorics, tensor-rank and Waring-rank decomposition builders with
//! brute-force verifiers, tensor-rank lower bounds, an axis-aligned
//! lattice-tiling construction, and a backtracking search over rank-1
//! matrices on GF(2).
//!
//! All arithmetic is exact: arbitrary-precision integers and rationals,
//! prime fields, and GF(2). No floating point appears in any code path.

pub mod cli;
pub mod combinatorics;
pub mod det_formulas;
pub mod f2_search;
pub mod geometry;
pub mod poly;
pub mod scalar;
pub mod tensor_decomp;
pub mod waring;

pub use scalar::{Domain, Matrix, Scalar};
