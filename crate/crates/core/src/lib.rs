//! Maltsev and majority polymorphisms of finite digraphs.
//!
//! A digraph is Maltsev when it admits a ternary polymorphism `m` with
//! `m(x,y,y) = x` and `m(x,x,y) = y`. This crate decides that property by
//! repeatedly collapsing a rectangular digraph onto its factor `G⁺` until a
//! disjoint union of directed cycles (or an edgeless digraph) is reached, and
//! it lifts explicit majority and Maltsev tables back up the same chain.
//!
//! Module map:
//!
//! * [`digraph`]: the [`Digraph`] type, the text format and vertex classes.
//! * [`structure`]: rectangularity, the `R⁺`/`R⁻` partitions, factor
//!   digraphs and the class bijection `X ↦ X⁺`.
//! * [`decide`]: the recursive Maltsev decision with a replayable certificate.
//! * [`synth`]: ternary operation tables, identity/polymorphism checks and
//!   the lifting construction.
//! * [`oracle`]: brute-force search for polymorphism tables and homomorphisms.
//! * [`census`]: enumeration and counting of small digraphs.
//! * [`csp`]: path-consistency solving of pinned homomorphism problems.

pub mod census;
pub mod csp;
pub mod decide;
pub mod digraph;
mod error;
pub mod oracle;
mod search;
pub mod structure;
pub mod synth;

pub use census::{
    count_maltsev, count_maltsev_sharded, enumerate_digraphs, smallest_rectangular_non_maltsev,
    CensusRow, EnumerationMode,
};
pub use csp::{random_instance, solve_csp_consistency, CspInstance, CspVerdict, PairSystem};
pub use decide::{decide_maltsev, is_disjoint_union_of_cycles, BaseKind, MaltsevCertificate};
pub use digraph::{Digraph, VertexClass, VertexClassification};
pub use error::{Error, Result};
pub use oracle::{find_homomorphism_bruteforce, find_polymorphism_bruteforce};
pub use structure::{
    factor, is_rectangular, phi, r_classes, rectangularity_violation, verify_phi_isomorphism,
    ClassBijection, Decomposition, FactorGraph, Partition, RectangularityWitness, Side,
};
pub use synth::{
    synth_majority, synth_maltsev, verify_identities, verify_polymorphism, OpKind, TernaryOp,
};
