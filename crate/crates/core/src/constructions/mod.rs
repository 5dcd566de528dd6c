//! Explicit constructions: a discrete closed sequence encoding a bounded
//! countable set, and a Cantor-like discrete set whose closure is not a
//! finite union of discrete sets.

pub mod cantor;
pub mod ex1;

pub use cantor::{
    cantor_build, cantor_verify, enumerate_words, non_isolation_witness, witness_bound,
    CantorInstance, CantorReport, Word, WordRecord,
};
pub use ex1::{ex1_claim_check, ex1_decode, ex1_encode, ClaimReport, Ex1Instance};
