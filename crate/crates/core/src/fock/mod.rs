//! Truncated bosonic Fock space and the coherent-state linearization of
//! polynomial ODE systems.
//!
//! A system `du/dt = K(u)` becomes the linear equation `d|u⟩/dt = K̂|u⟩`
//! for its coherent embedding, with `K̂ = Σ_j a_j⁺ K_j(a)`. Truncating by
//! total occupation keeps the first row of `K̂` zero, so the vacuum
//! amplitude of an evolved state never moves.

mod basis;
mod bogolubov;
mod evolve;
mod operator;

pub use basis::{basis_size, coherent_embed, BasisInfo, FockBasis, TruncatedFockVector, MAX_BASIS};
pub use bogolubov::{bogolubov_poisson, gram_matrix, gram_min_eigenvalue, normal_ordered_moment};
pub use evolve::{conservation_pair, evolve, evolve_series, expm, extract, PairSample, Propagator, Scheme};
pub use operator::{
    ladder_matrices, liouvillian_build, number_operator, Monomial, NormalOrderedOperator, NormalOrderedTerm,
    PolynomialSystem, SparseMatrix,
};
