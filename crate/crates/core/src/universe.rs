use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::context::ConstructorDecl;
use crate::equiv::Schema;
use crate::error::{Error, Result};
use crate::names::{Binding, Group};
use crate::pattern::{Computed, Meta, Placeholder};
use crate::term::{Arrangement, Item, ObjId, Sym};

/// Identifies a state of the equivalence registry. Objects formed under an
/// older version are re-canonicalized before being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivVersion(pub u64);

/// Read-only view of an interned object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Object<'a> {
    Hole,
    Class { arrangement: &'a Arrangement, version: EquivVersion },
}

pub(crate) const NEVER: u64 = u64::MAX;

pub(crate) struct Node {
    pub(crate) arr: Arrangement,
    pub(crate) arity: usize,
    pub(crate) meta: bool,
    /// Version under which `arr` was produced by canonicalization.
    pub(crate) canonical_at: u64,
}

/// Owner of every interned glyph and object plus the registries that
/// give objects their meaning: name groups, bindings, equivalences,
/// constructors and template placeholders.
pub struct Universe {
    glyphs: Vec<String>,
    glyph_ix: HashMap<String, Sym>,
    pub(crate) nodes: Vec<Node>,
    index: HashMap<Arrangement, ObjId>,
    pub(crate) version: u64,

    pub(crate) canon_memo: HashMap<(ObjId, bool), ObjId>,
    pub(crate) fv_memo: HashMap<ObjId, Result<alloc::collections::BTreeSet<ObjId>>>,
    pub(crate) names_memo: HashMap<ObjId, alloc::collections::BTreeSet<ObjId>>,
    pub(crate) split_memo: HashMap<ObjId, alloc::rc::Rc<Vec<(ObjId, ObjId)>>>,

    pub(crate) groups: Vec<Group>,
    pub(crate) group_of_base: HashMap<Sym, usize>,
    pub(crate) binders: HashMap<ObjId, Vec<Binding>>,
    pub(crate) alpha: bool,
    pub(crate) schemas: Vec<Schema>,

    pub(crate) metas: Vec<Meta>,
    pub(crate) computed: Vec<Computed>,
    pub(crate) placeholders: HashMap<Sym, Placeholder>,

    pub(crate) ctors: Vec<ConstructorDecl>,
    pub(crate) ctor_ix: HashMap<ObjId, usize>,
    pub(crate) ctor_syms: HashSet<Sym>,
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new()
    }
}

/// Glyph prefix reserved for template placeholders.
pub(crate) const RESERVED: char = '\u{1}';

impl Universe {
    pub fn new() -> Universe {
        let mut u = Universe {
            glyphs: Vec::new(),
            glyph_ix: HashMap::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
            version: 0,
            canon_memo: HashMap::new(),
            fv_memo: HashMap::new(),
            names_memo: HashMap::new(),
            split_memo: HashMap::new(),
            groups: Vec::new(),
            group_of_base: HashMap::new(),
            binders: HashMap::new(),
            alpha: false,
            schemas: Vec::new(),
            metas: Vec::new(),
            computed: Vec::new(),
            placeholders: HashMap::new(),
            ctors: Vec::new(),
            ctor_ix: HashMap::new(),
            ctor_syms: HashSet::new(),
        };
        // Slot 0 is the hole; its arrangement is never looked at.
        u.nodes.push(Node { arr: Arrangement::empty(), arity: 1, meta: false, canonical_at: NEVER });
        u
    }

    // ---- glyphs ----

    /// Registers (or looks up) a glyph.
    pub fn sym(&mut self, glyph: &str) -> Result<Sym> {
        if glyph.is_empty() || glyph == "[" || glyph == "]" || glyph == "□" || glyph.starts_with(RESERVED) {
            return Err(Error::InvalidSymbol(glyph.to_string()));
        }
        Ok(self.sym_unchecked(glyph))
    }

    pub(crate) fn sym_unchecked(&mut self, glyph: &str) -> Sym {
        if let Some(s) = self.glyph_ix.get(glyph) {
            return *s;
        }
        let s = Sym(self.glyphs.len() as u32);
        self.glyphs.push(glyph.to_string());
        self.glyph_ix.insert(glyph.to_string(), s);
        s
    }

    pub fn lookup_sym(&self, glyph: &str) -> Option<Sym> {
        self.glyph_ix.get(glyph).copied()
    }

    pub fn glyph(&self, s: Sym) -> &str {
        &self.glyphs[s.0 as usize]
    }

    // ---- interning ----

    pub fn version(&self) -> EquivVersion {
        EquivVersion(self.version)
    }

    pub(crate) fn bump(&mut self) -> EquivVersion {
        self.version += 1;
        self.canon_memo.clear();
        self.fv_memo.clear();
        self.split_memo.clear();
        EquivVersion(self.version)
    }

    pub fn object(&self, id: ObjId) -> Object<'_> {
        if id.is_hole() {
            return Object::Hole;
        }
        let n = &self.nodes[id.0 as usize];
        Object::Class { arrangement: &n.arr, version: EquivVersion(if n.canonical_at == NEVER { 0 } else { n.canonical_at }) }
    }

    /// The stored arrangement (empty for the hole).
    pub fn arrangement(&self, id: ObjId) -> &Arrangement {
        &self.nodes[id.0 as usize].arr
    }

    pub fn contains(&self, id: ObjId) -> bool {
        (id.0 as usize) < self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interns an arrangement as given, without canonicalizing it.
    pub(crate) fn intern_raw(&mut self, arr: Arrangement) -> ObjId {
        if let Some(id) = self.index.get(&arr) {
            return *id;
        }
        let mut arity = 0;
        let mut meta = false;
        arr.for_each_obj(&mut |o| {
            let n = &self.nodes[o.0 as usize];
            arity += n.arity;
            meta |= n.meta;
        });
        meta |= self.has_placeholder_sym(&arr);
        let id = ObjId(self.nodes.len() as u32);
        self.nodes.push(Node { arr: arr.clone(), arity, meta, canonical_at: NEVER });
        self.index.insert(arr, id);
        id
    }

    fn has_placeholder_sym(&self, arr: &Arrangement) -> bool {
        arr.items().iter().any(|it| match it {
            Item::Sym(s) => self.placeholders.contains_key(s),
            Item::Deco(_, b) => self.has_placeholder_sym(b),
            Item::Scripted(b, sc) => self.has_placeholder_sym(b) || sc.iter().any(|(_, a)| self.has_placeholder_sym(a)),
            _ => false,
        })
    }

    /// Interns an arrangement that is already canonical.
    ///
    /// The caller guarantees `canonical` is the representative the
    /// canonicalizer would produce; interning the canonical form of any
    /// equivalent arrangement returns the same id.
    pub fn intern(&mut self, canonical: Arrangement) -> ObjId {
        let id = self.intern_raw(canonical);
        self.mark_canonical(id, self.alpha);
        id
    }

    pub(crate) fn mark_canonical(&mut self, id: ObjId, alpha: bool) {
        if alpha == self.alpha {
            self.nodes[id.0 as usize].canonical_at = self.version;
        }
    }

    pub(crate) fn check_refs(&self, arr: &Arrangement) -> Result<()> {
        let mut bad = None;
        arr.for_each_obj(&mut |o| {
            if (o.0 as usize) >= self.nodes.len() {
                bad = Some(o);
            }
        });
        match bad {
            Some(o) => Err(Error::UnknownObject(o)),
            None => Ok(()),
        }
    }

    /// `⟦A⟧`: the object whose class contains `arr` under the current
    /// equivalence.
    pub fn make_object(&mut self, arr: Arrangement) -> Result<ObjId> {
        self.make_object_mode(arr, self.alpha)
    }

    pub(crate) fn make_object_mode(&mut self, arr: Arrangement, alpha: bool) -> Result<ObjId> {
        if arr.as_bare_pointer().is_some() {
            return Err(Error::IllFormed("an object cannot be a bare pointer"));
        }
        self.check_refs(&arr)?;
        let arr = arr.try_map_objs(&mut |o| self.canonical_mode(o, alpha))?;
        let arr = self.normalize(arr, alpha)?;
        let id = self.intern_raw(arr);
        self.mark_canonical(id, alpha);
        Ok(id)
    }

    /// The id of the canonical representative of `id`'s class under the
    /// current equivalence.
    pub fn canonical(&mut self, id: ObjId) -> Result<ObjId> {
        self.canonical_mode(id, self.alpha)
    }

    pub(crate) fn canonical_mode(&mut self, id: ObjId, alpha: bool) -> Result<ObjId> {
        if id.is_hole() {
            return Ok(id);
        }
        if alpha == self.alpha && self.nodes[id.0 as usize].canonical_at == self.version {
            return Ok(id);
        }
        if let Some(c) = self.canon_memo.get(&(id, alpha)) {
            return Ok(*c);
        }
        let arr = self.nodes[id.0 as usize].arr.clone();
        let c = self.make_object_mode(arr, alpha)?;
        self.canon_memo.insert((id, alpha), c);
        self.canon_memo.insert((c, alpha), c);
        Ok(c)
    }

    /// Object equality under the current equivalence.
    pub fn equal(&mut self, a: ObjId, b: ObjId) -> Result<bool> {
        Ok(a == b || self.canonical(a)? == self.canonical(b)?)
    }

    /// Number of holes reachable from the object.
    pub fn arity(&self, id: ObjId) -> usize {
        self.nodes[id.0 as usize].arity
    }

    /// Number of holes reachable from an arrangement.
    pub fn arity_of(&self, arr: &Arrangement) -> usize {
        let mut n = 0;
        arr.for_each_obj(&mut |o| n += self.arity(o));
        n
    }

    pub fn is_context(&self, id: ObjId) -> bool {
        self.arity(id) > 0
    }

    /// Whether the object mentions a template placeholder.
    pub fn has_meta(&self, id: ObjId) -> bool {
        self.nodes[id.0 as usize].meta
    }

    /// The hole is well formed; other objects are well formed when they
    /// are canonical under the current equivalence, all their parts are
    /// and a hole-containing class is a singleton.
    pub fn is_well_formed(&mut self, id: ObjId) -> bool {
        let mut seen = HashSet::new();
        self.well_formed_rec(id, &mut seen)
    }

    fn well_formed_rec(&mut self, id: ObjId, seen: &mut HashSet<ObjId>) -> bool {
        if id.is_hole() || !seen.insert(id) {
            return true;
        }
        if self.arrangement(id).as_bare_pointer().is_some() {
            return false;
        }
        match self.canonical(id) {
            Ok(c) if c == id => {}
            _ => return false,
        }
        if self.arity(id) > 0 && !self.class_is_singleton(id) {
            return false;
        }
        let kids = self.arrangement(id).objs();
        kids.into_iter().all(|k| self.well_formed_rec(k, seen))
    }

    /// Shorthand for `⟦s⟧` with a registered glyph.
    pub fn atom(&mut self, glyph: &str) -> Result<ObjId> {
        let s = self.sym(glyph)?;
        self.make_object(Arrangement::sym(s))
    }

    /// `⟦ε⟧`.
    pub fn epsilon(&mut self) -> ObjId {
        self.make_object(Arrangement::empty()).expect("the empty arrangement is an object")
    }

    /// The glyph when the object is a lone symbol.
    pub fn atom_glyph(&self, id: ObjId) -> Option<&str> {
        match self.arrangement(id).items() {
            [Item::Sym(s)] if !id.is_hole() => Some(self.glyph(*s)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hole_and_symbols() {
        let mut u = Universe::new();
        assert_eq!(u.arity(ObjId::HOLE), 1);
        assert!(u.is_well_formed(ObjId::HOLE));
        assert!(matches!(u.sym("["), Err(Error::InvalidSymbol(_))));
        assert!(matches!(u.sym("□"), Err(Error::InvalidSymbol(_))));
        assert!(matches!(u.sym("\u{1}x"), Err(Error::InvalidSymbol(_))));
        let a = u.sym("a").unwrap();
        assert_eq!(u.sym("a").unwrap(), a);
        assert_ne!(u.sym("b").unwrap(), a);
    }

    #[test]
    fn intern_is_stable_and_distinguishes_glyphs() {
        let mut u = Universe::new();
        let a = u.atom("a").unwrap();
        assert_eq!(u.atom("a").unwrap(), a);
        assert_ne!(u.atom("b").unwrap(), a);
        let arr = u.arrangement(a).clone();
        assert_eq!(u.intern(arr), a);
    }

    #[test]
    fn bare_pointer_is_ill_formed() {
        let mut u = Universe::new();
        let a = u.atom("a").unwrap();
        assert!(matches!(u.make_object(Arrangement::obj(a)), Err(Error::IllFormed(_))));
        assert!(matches!(u.make_object(Arrangement::obj(ObjId(999))), Err(Error::IllFormed(_))));
        let mut two = Arrangement::obj(a);
        two.push(Item::Obj(ObjId(999))).unwrap();
        assert_eq!(u.make_object(two), Err(Error::UnknownObject(ObjId(999))));
    }

    #[test]
    fn arity_counts_reachable_holes() {
        let mut u = Universe::new();
        let mut a = Arrangement::obj(ObjId::HOLE);
        a.push(Item::Obj(ObjId::HOLE)).unwrap();
        let two = u.make_object(a).unwrap();
        assert_eq!(u.arity(two), 2);
        let x = u.sym("x").unwrap();
        let mut b = Arrangement::sym(x);
        b.push(Item::Obj(two)).unwrap();
        let b = b.scripted(alloc::vec![(crate::Position::Sup, Arrangement::obj(ObjId::HOLE))]).unwrap();
        let three = u.make_object(b).unwrap();
        assert_eq!(u.arity(three), 3);
        let z = u.atom("z").unwrap();
        assert_eq!(u.arity(z), 0);
    }

    #[test]
    fn coercion_is_idempotent() {
        let mut u = Universe::new();
        let a = u.atom("a").unwrap();
        let mut arr = Arrangement::obj(a);
        arr.push(Item::Obj(a)).unwrap();
        let o = u.make_object(arr).unwrap();
        let again = u.arrangement(o).clone();
        assert_eq!(u.make_object(again).unwrap(), o);
    }
}
