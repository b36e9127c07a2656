//! Finite closure-space domain verifier.
//!
//! A generalized closure space is a carrier set together with a closure
//! operator `gamma` and a post-composed map `tau`; the composite
//! `hull(A) = tau(gamma(A))` behaves like "interior of closure" in a
//! topological space. Augmenting such a space with a family of finite
//! subsets singles out the *regular open* sets, and the regular opens
//! ordered by inclusion form a continuous domain. This crate builds those
//! structures on finite carriers (plus one symbolic rational-ray carrier),
//! checks every axiom exhaustively, and verifies the representation
//! theorems connecting them to finite posets:
//!
//! * every finite poset is order-isomorphic to the regular opens of its
//!   derived space (`poset::FinPoset::roundtrip`),
//! * locally consistent spaces generate L-domains, consistent spaces
//!   generate bounded complete domains (`subclass`),
//! * approximable mappings between spaces correspond exactly to
//!   Scott-continuous functions between the regular-open posets
//!   (`morphism`), giving an equivalence of categories checkable
//!   instance by instance.
//!
//! Everything is deterministic: subsets are bit vectors with a canonical
//! order, reports are serializable values, and the counterexample miner
//! replays byte-identically from a seed.

pub mod closure;
pub mod fixtures;
pub mod format;
pub mod miner;
pub mod morphism;
pub mod poset;
pub mod ray;
pub mod report;
pub mod set;
pub mod space;
pub mod subclass;

pub use report::{Report, Violation, Witness};
pub use set::{Subset, SubsetFamily, Universe, DEFAULT_CAP};

/// Library-wide error type. Validation failures that carry witnesses are
/// reported through [`report::Report`] instead; these errors are for
/// misuse of an operation or unparseable input.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("universe mismatch: operands belong to different universes")]
    UniverseMismatch,
    #[error("enumeration cap exceeded: universe of size {n} with cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("tau is undefined at {set}")]
    TauUndefined { set: String },
    #[error("not a closure system: {reason}")]
    NotAClosureSystem { reason: String },
    #[error("not a closure operator: {reason}")]
    NotAClosureOperator { reason: String },
    #[error("not a topology: {reason}")]
    NotATopology { reason: String },
    #[error("space has not been validated")]
    Unvalidated,
    #[error("invalid universe: {reason}")]
    InvalidUniverse { reason: String },
    #[error("unknown element label {label:?}")]
    UnknownLabel { label: String },
    #[error("relation is not a partial order: {reason}")]
    NotAPartialOrder { reason: String },
    #[error("map is not monotone: {x} maps above {y} fails")]
    NotMonotone { x: String, y: String },
    #[error("map is not Scott-continuous")]
    NotScottContinuous,
    #[error("poset is empty")]
    EmptyPoset,
    #[error("{set} is not a valid basis: {reason}")]
    InvalidBasis { set: String, reason: String },
    #[error("family is empty")]
    EmptyFamily,
    #[error("{set} is not a member of the family")]
    NotInFamily { set: String },
    #[error("{set} is not contained in the hull {hull}")]
    MNotInHull { set: String, hull: String },
    #[error("{set} is not a regular open set")]
    NotRegular { set: String },
    #[error("source/target spaces do not match: {reason}")]
    SpaceMismatch { reason: String },
    #[error("family member {set} has no greatest element")]
    NoGreatestElement { set: String },
    #[error("sup does not exist for {set}")]
    SupMissing { set: String },
    #[error("the family member is empty")]
    EmptyF,
    #[error("{value} lies outside the hull {hull}")]
    MOutsideHull { value: String, hull: String },
    #[error("parse error: {message}")]
    Parse { message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(message: impl Into<String>) -> Self {
        Error::Parse { message: message.into() }
    }
}
