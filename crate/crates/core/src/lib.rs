//! Random k-uniform hypergraphs, their signed incidence matrices, and exact
//! integer cokernels.
//!
//! The crate samples hypergraphs from `H_k(n, p)` and `H_k(n, m)`, builds the
//! incidence matrix with alternating (or all-ones) signs, computes Smith
//! normal forms over arbitrary-precision integers, and runs the
//! add-one-edge-at-a-time cokernel process together with Monte Carlo sweeps.

pub mod cli;
pub mod error;
pub mod exactla;
pub mod experiment;
pub mod matrix;
pub mod model;
pub mod torsion;
pub mod verify;

pub use error::{Error, Result};
pub use exactla::{
    cokernel, rank_mod_q, rank_rational, smith_normal_form, CokernelSummary, SmithForm,
};
pub use matrix::{incidence_matrix, ColumnVector, SignPattern, SparseIntMatrix};
pub use model::{sample_gnm, sample_gnp, Hypergraph, RandomSpec};
