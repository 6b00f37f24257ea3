//! Normalized cyclic chains over a label alphabet, Chern characters, and
//! cochains evaluated on operators.

pub mod alphabet;
pub mod chain;
pub mod chern;
pub mod coeff;
pub mod cochain;

pub use alphabet::{GroupAlphabet, MonomialAlphabet, MultiplicationOracle};
pub use chain::{boundary_B, boundary_b, chain_from_json, chain_to_json, CyclicChain, Word, UNIT};
pub use chern::{
    check_inverse, chern_idempotent, chern_idempotent_unchecked, chern_invertible, chern_invertible_unnormalized,
    odd_prefactor, LabelMatrix, LinComb,
};
pub use coeff::{factorial, Coeff};
pub use cochain::{pair, CochainFn, CyclicCochain};
