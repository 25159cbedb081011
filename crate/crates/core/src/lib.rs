//! Syntactic math text.
//!
//! Two-dimensional arrangements of symbols, objects as equivalence classes of
//! arrangements under a user-adjustable equivalence, context-hole filling,
//! name binding with α-conversion and capture-avoiding substitution, and
//! production rules evaluated as depth-bounded least fixed points.
//!
//! Everything lives in a [`Universe`]: it owns the intern table (every object
//! is identified by an [`ObjId`]), the symbol alphabet, name groups, binder
//! declarations, the equivalence registry and the constructor registry.
//! Grammars ([`grammar::Grammar`]) are evaluated against a universe.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod canon;
pub mod context;
pub mod equiv;
mod error;
pub mod fill;
pub mod grammar;
pub mod names;
pub mod parse;
pub mod pattern;
pub mod relation;
pub mod term;
mod universe;

pub use error::{Error, Result};
pub use term::{Arrangement, Deco, Item, Nat, ObjId, Position, Scripts, Sym};
pub use context::{Assoc, ConstructorDecl};
pub use equiv::{EquivAxiom, Schema};
pub use grammar::{Cond, Decorate, Engine, Grammar, Membership, Options, RelDecl, RelRule, RelStepper, SetDecl, Truth};
pub use names::GroupId;
pub use pattern::{Env, MatchMode, MetaId, Sort};
pub use relation::{Rewrite, Stepper};
pub use universe::{EquivVersion, Object, Universe};
