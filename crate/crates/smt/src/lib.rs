//! Spec language, linear term syntax and query plumbing for the `smt` tool.

pub mod cli;
pub mod diag;
pub mod lex;
pub mod spec;
pub mod syntax;

pub use diag::{Diagnostic, Span};
pub use spec::{parse_document, Document, Spec};
pub use syntax::{print_term, read_term};
