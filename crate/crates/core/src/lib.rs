//! Subgraph pattern matching over typed property graphs.
//!
//! A [`GraphStore`] holds typed vertices and edges with integer properties.
//! A [`Pattern`] is a conjunction of vertex, edge and constraint atoms
//! grouped into named subpatterns, projected onto one root variable. The
//! [`Matcher`] evaluates a pattern with one of three strategies:
//!
//! * [`Strategy::Unified`]: one left-to-right backtracking join over all atoms;
//! * [`Strategy::Subpattern`]: each subpattern materialized separately, then joined;
//! * [`Strategy::Bruteforce`]: an index-free reference evaluator.
//!
//! [`generate`] builds seeded graphs with exactly one planted match.

pub mod batch;
pub mod bench;
pub mod engine;
pub mod generator;
pub mod graph;
pub mod io;
mod lexer;
pub mod metrics;
mod par;
pub mod pattern;
pub mod relations;

pub use engine::{
    match_bruteforce, match_subpattern, match_unified, Binding, CertifyError, MatchError, MatchResult, MatchStats,
    Matcher, Strategy, Value,
};
pub use generator::{generate, mutate_to_distractor, plant_minimal, GenConfig, GenError, GenReport};
pub use graph::{
    EdgeRecord, EdgeType, GraphError, GraphStore, ObjectId, PropertyValue, Schema, VertexRecord, VertexType,
};
pub use par::Exec;
pub use pattern::{builtin_agile_lite, parse_pattern, unparse, Atom, ConstraintKind, Pattern, Term, Var};
pub use relations::{KeyEquality, Relations};
