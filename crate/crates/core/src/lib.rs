//! Exact invariants of pseudo-periodic mapping classes and of the
//! singular fibers they bound.
//!
//! The crate computes, over exact rationals:
//!
//! - fractional Dehn twist coefficients and screw numbers of negative-twist
//!   pseudo-periodic mapping classes, given combinatorially;
//! - the delta invariants of a singular fiber from its decorated dual
//!   graph, split by node type;
//! - the dual graph of the fiber bounded by a given monodromy, and the
//!   cross-check that both computations of delta agree exactly;
//! - uniform lower bounds for non-zero twist coefficients, verified by
//!   exhaustive enumeration of chains at desk scale.
//!
//! Entry points: [`fiber::FiberGraph`] for graph-side analysis,
//! [`monodromy::MonodromyData`] for the mapping-class side,
//! [`enumeration`] for exhaustive scans and the seeded corpus generator.

pub mod chain;
pub mod chain_calculus;
pub mod enumeration;
pub mod error;
pub mod fiber;
pub mod monodromy;
pub mod rational;
pub mod valency;

pub use chain::{normalize_seq, ChainKind, ChainSeq, NegativeTwistChain};
pub use chain_calculus::{
    chain_h, chain_valencies, fdtc_from_chain, fdtc_from_screw, hj_expand, hj_valency,
    screw_number, semistable_node_count, synthesize_chain, ChainReport, SearchCaps,
};
pub use error::{Error, Result};
pub use rational::Rational;
pub use valency::{remainder_sigma, Valency};
