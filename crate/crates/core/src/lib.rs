//! Toolkit for hyperproperty logics over sets of traces and transition
//! systems.
//!
//! The crate provides:
//!
//! * a shared formula AST for HyperLTL (prenex trace quantification) and
//!   HyperCTL* (path quantification under temporal operators), with
//!   parsing, printing, prenexing, and alternation-class analysis;
//! * exact HyperLTL evaluation over finite sets of ultimately periodic
//!   traces, including the expansion-table characterisation of the
//!   quantifier-free fragment;
//! * universe-relative HyperCTL* evaluation over transition systems,
//!   together with an equivalent two-player model-checking game;
//! * generators for the classic reduction formulas of the field: the
//!   recurrent-tiling family, FO[<] word encodings with stretch-invariant
//!   translation and simplification, boundedness/split-model combinators,
//!   and the arithmetic encodings (addition/multiplication trace families,
//!   their topological closure, subset structures, and translations to and
//!   from fragments of higher-order arithmetic);
//! * a bounded satisfiability semi-decider that enumerates candidate
//!   trace-set models in a fixed canonical order.

pub mod arith;
pub mod error;
pub mod fo;
pub mod formula;
pub mod kripke;
pub mod oracle;
pub mod search;
pub mod syntax;
pub mod tiling;
pub mod trace;

pub use error::{Error, Result, SourceSpan};
pub use formula::{
    classify_prenex, polarity_analysis, prenex, temporal_depth, Formula, PrenexClass,
};
