//! The `(A,q)`-numerical range of square complex matrices over a weighted
//! semi-inner product `<x, y>_A = y^H A x`: radius and Crawford number
//! estimators, closed forms, the inequality laws between them, and
//! convergence traces for operator sequences.

pub mod error;
pub mod exact;
pub mod format;
pub mod laws;
pub mod pairset;
pub mod radius;
pub mod random;
pub mod semispace;
pub mod sequences;

pub use error::{Error, Result};
pub use pairset::{complete_pair, pair_residual, sample_pairs, UnitPair};
pub use radius::{
    a_crawford, a_crawford_with, a_radius, a_radius_with, aq_crawford, aq_radius, gaps, oracle_grid, Budget,
    Direction, Estimate, GapValue,
};
pub use semispace::{
    a_adjoint, a_inner, a_norm_vec, a_opnorm, direct_sum, kron, reduce, reduce_compressed, CMatrix, CVector,
    MatrixJson, QParam, Weight,
};
