//! Confluence modulo equations for equational generalized term rewriting
//! systems (EGTRSs).
//!
//! An EGTRS bundles a signature, a replacement map, conditional equations,
//! definite Horn clauses and conditional rewrite rules. This crate generates
//! the conditional pairs that summarize the critical peaks of such a system,
//! decides their feasibility and joinability with a bounded deduction engine,
//! and folds the results into a verdict.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, reports and the
//! command line live in the companion `egtrs-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod deduction;
pub mod joinability;
pub mod pairs;
pub mod relations;
pub mod system;
pub mod terms;
pub mod theory;

pub use analysis::{analyze, AnalysisError, Annotations, Options, Report, RouteChoice, Verdict};
pub use deduction::{Bounds, Engine, Feasibility, Truth};
pub use joinability::{JoinMode, JoinVerdict};
pub use pairs::{ConditionalPair, Family};
pub use system::{Atom, Egtrs, Equation, HornClause, Pred, Rule};
pub use terms::{Position, ReplacementMap, Subst, Sym, Term};
