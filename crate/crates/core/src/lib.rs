//! HyperLTL verification toolkit.
//!
//! The crate covers the whole pipeline for hyperproperties over finite
//! Kripke structures: parsing sentences ([`formula`]), explicit-state
//! systems ([`kripke`]), Büchi automata over tuple alphabets
//! ([`automata`]), model checking ([`modelcheck`]), satisfiability
//! ([`satcheck`]), finite-trace runtime monitoring ([`monitor`]) and
//! generators for well-known information-flow specifications ([`speclib`]).

pub mod automata;
pub mod formula;
pub mod kripke;
mod limits;
pub mod modelcheck;
pub mod monitor;
pub mod satcheck;
pub mod speclib;

pub use formula::{
    classify, parse_formula, Body, FormulaError, FragmentInfo, IndexedAtom, QuantifiedFormula,
    Quantifier, TraceVariable,
};
pub use kripke::{parse_kripke, KripkeError, KripkeStructure, UltimatelyPeriodicTrace};
pub use limits::{Limits, ResourceLimit};
pub use modelcheck::{Strategy, Verdict};
