//! Structural operational semantics with data.
//!
//! The crate takes transition system specifications whose configurations
//! carry a global store, curries the store into triple labels, decides strong
//! and stateless bisimilarity on finite fragments, checks the commutativity
//! rule format, and decides equality of finite processes with data through
//! head normal forms and a generated axiom schema for GSOS operators.
//!
//! | module | contents |
//! |---|---|
//! | [`term`] | signatures, terms, substitutions, matching |
//! | [`tss`] | rules, validation, one-step derivation, LTS exploration |
//! | [`curry`] | currying, label closure, curried derivation |
//! | [`bisim`] | partition refinement, strong and stateless bisimilarity |
//! | [`formats`] | the commutativity format |
//! | [`axioms`] | the store calculus, head normal forms, ground equality, axiom schemas |
//! | [`syntax`] | the `.sos` spec-file language and LTS export |
//! | [`linda`] | the Linda case study |
//! | [`cli`] | the `sosd` command line driver |

pub mod axioms;
pub mod bisim;
pub mod cli;
pub mod curry;
pub mod formats;
pub mod linda;
pub mod syntax;
pub mod term;
pub mod tss;

pub use term::{Signature, Sort, Subst, Symbol, Term};
pub use tss::{Bounds, CurriedLabel, Lts, Rule, Tss};
