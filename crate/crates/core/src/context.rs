//! Primitive constructor declarations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::term::{Arrangement, Item, ObjId, Sym};
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assoc {
    Left,
    Right,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDecl {
    /// The constructor as an object: an arrangement whose immediate
    /// objects are all holes.
    pub pattern: ObjId,
    pub arity: usize,
    /// Higher binds tighter.
    pub prec: Option<u32>,
    pub assoc: Option<Assoc>,
}

impl ConstructorDecl {
    /// The pattern starts with a hole.
    pub fn open_left(&self, u: &Universe) -> bool {
        matches!(u.arrangement(self.pattern).items().first(), Some(Item::Obj(_)))
    }

    /// The pattern ends with a hole.
    pub fn open_right(&self, u: &Universe) -> bool {
        matches!(u.arrangement(self.pattern).items().last(), Some(Item::Obj(_)))
    }
}

impl Universe {
    /// Declares the primitive constructor that `arr` is an instance of:
    /// `arr` with every immediate object replaced by a hole. Declaring the
    /// same pattern again returns the existing declaration.
    pub fn declare_constructor(&mut self, arr: &Arrangement) -> Result<ObjId> {
        let pat = arr.pattern();
        if pat.is_empty() || pat.as_bare_pointer().is_some() {
            return Err(Error::NotDecomposable);
        }
        if pat.objs().is_empty() {
            return Err(Error::NotDecomposable);
        }
        let id = self.intern_raw(pat.clone());
        if self.ctor_ix.contains_key(&id) {
            return Ok(id);
        }
        let arity = pat.objs().len();
        self.ctor_ix.insert(id, self.ctors.len());
        self.ctors.push(ConstructorDecl { pattern: id, arity, prec: None, assoc: None });
        let mut syms = Vec::new();
        collect_syms(&pat, &mut syms);
        self.ctor_syms.extend(syms);
        Ok(id)
    }

    pub fn set_constructor_syntax(&mut self, pattern: ObjId, prec: Option<u32>, assoc: Option<Assoc>) -> Result<()> {
        let i = *self.ctor_ix.get(&pattern).ok_or(Error::NotDecomposable)?;
        let d = &mut self.ctors[i];
        if prec.is_some() {
            d.prec = prec;
        }
        if assoc.is_some() {
            d.assoc = assoc;
        }
        Ok(())
    }

    /// Drops the associativity of a declared constructor.
    pub fn clear_assoc(&mut self, pattern: ObjId) {
        if let Some(&i) = self.ctor_ix.get(&pattern) {
            self.ctors[i].assoc = None;
        }
    }

    pub fn constructors(&self) -> &[ConstructorDecl] {
        &self.ctors
    }

    pub fn constructor(&self, pattern: ObjId) -> Option<&ConstructorDecl> {
        self.ctor_ix.get(&pattern).map(|i| &self.ctors[*i])
    }

    /// The declared constructor an object is an instance of, if any.
    pub fn top_constructor(&mut self, id: ObjId) -> Option<&ConstructorDecl> {
        if id.is_hole() {
            return None;
        }
        let pat = self.arrangement(id).pattern();
        let pid = self.intern_raw(pat);
        self.constructor(pid)
    }

    /// Whether a glyph occurs in some declared constructor.
    pub fn is_constructor_sym(&self, s: Sym) -> bool {
        self.ctor_syms.contains(&s)
    }
}

fn collect_syms(a: &Arrangement, out: &mut Vec<Sym>) {
    for it in a.items() {
        match it {
            Item::Sym(s) => out.push(*s),
            Item::Deco(_, b) => collect_syms(b, out),
            Item::Scripted(b, sc) => {
                collect_syms(b, out);
                for (_, x) in sc.iter() {
                    collect_syms(x, out);
                }
            }
            _ => {}
        }
    }
}
