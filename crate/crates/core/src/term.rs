//! Arrangements: the two-dimensional layouts objects are classes of.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type Nat = num_bigint::BigUint;

/// Interned glyph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub(crate) u32);

impl Sym {
    pub fn index(self) -> u32 {
        self.0
    }
}

/// Handle for an interned object. Ids are only meaningful for the
/// [`Universe`](crate::Universe) that issued them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub(crate) u32);

impl ObjId {
    /// The hole object.
    pub const HOLE: ObjId = ObjId(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_hole(self) -> bool {
        self == ObjId::HOLE
    }
}

/// Script positions, in the order filling visits them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Sup,
    Sub,
    PreSup,
    PreSub,
    Above,
    Below,
}

impl Position {
    pub const ALL: [Position; 6] = [
        Position::Sup,
        Position::Sub,
        Position::PreSup,
        Position::PreSub,
        Position::Above,
        Position::Below,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Deco {
    Over,
    Under,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Sym(Sym),
    Nat(Nat),
    Obj(ObjId),
    Deco(Deco, Arrangement),
    /// A non-empty base with at least one script attached.
    Scripted(Box<Arrangement>, Scripts),
}

/// Script map, kept sorted by position with no repeats.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scripts(Vec<(Position, Arrangement)>);

impl Scripts {
    pub fn new(mut entries: Vec<(Position, Arrangement)>) -> Result<Scripts> {
        if entries.is_empty() || entries.iter().any(|(_, a)| a.is_empty()) {
            return Err(Error::EmptyArrangement);
        }
        entries.sort_by_key(|(p, _)| *p);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateScript);
        }
        Ok(Scripts(entries))
    }

    pub fn get(&self, pos: Position) -> Option<&Arrangement> {
        self.0.iter().find(|(p, _)| *p == pos).map(|(_, a)| a)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Position, &Arrangement)> {
        self.0.iter().map(|(p, a)| (*p, a))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn try_map(&self, f: &mut impl FnMut(&Arrangement) -> Result<Arrangement>) -> Result<Scripts> {
        let mut out = Vec::with_capacity(self.0.len());
        for (p, a) in &self.0 {
            out.push((*p, f(a)?));
        }
        Ok(Scripts(out))
    }
}

/// A left-to-right sequence of items. Scripts live on [`Item::Scripted`],
/// so appending after a scripted arrangement keeps the scripts attached to
/// what they were attached to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrangement {
    items: Vec<Item>,
}

impl Arrangement {
    pub fn empty() -> Arrangement {
        Arrangement { items: Vec::new() }
    }

    pub fn from_items(items: Vec<Item>) -> Result<Arrangement> {
        for it in &items {
            check_item(it)?;
        }
        Ok(Arrangement { items })
    }

    pub fn sym(s: Sym) -> Arrangement {
        Arrangement { items: alloc::vec![Item::Sym(s)] }
    }

    pub fn obj(o: ObjId) -> Arrangement {
        Arrangement { items: alloc::vec![Item::Obj(o)] }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn push(&mut self, item: Item) -> Result<()> {
        check_item(&item)?;
        self.items.push(item);
        Ok(())
    }

    pub fn append(&mut self, other: Arrangement) {
        self.items.extend(other.items);
    }

    /// Wraps `body` in a decoration.
    pub fn decorated(kind: Deco, body: Arrangement) -> Result<Arrangement> {
        if body.is_empty() {
            return Err(Error::EmptyArrangement);
        }
        Ok(Arrangement { items: alloc::vec![Item::Deco(kind, body)] })
    }

    /// Attaches scripts to the whole of `self`, nesting if `self` already
    /// carries scripts.
    pub fn scripted(self, scripts: Vec<(Position, Arrangement)>) -> Result<Arrangement> {
        if self.is_empty() {
            return Err(Error::EmptyArrangement);
        }
        let scripts = Scripts::new(scripts)?;
        Ok(Arrangement { items: alloc::vec![Item::Scripted(Box::new(self), scripts)] })
    }

    /// The object when the arrangement is nothing but one pointer.
    pub fn as_bare_pointer(&self) -> Option<ObjId> {
        match self.items.as_slice() {
            [Item::Obj(o)] => Some(*o),
            _ => None,
        }
    }

    /// Visits immediate object references in fill order.
    pub fn for_each_obj(&self, f: &mut impl FnMut(ObjId)) {
        for it in &self.items {
            match it {
                Item::Obj(o) => f(*o),
                Item::Deco(_, body) => body.for_each_obj(f),
                Item::Scripted(base, scripts) => {
                    base.for_each_obj(f);
                    for (_, a) in scripts.iter() {
                        a.for_each_obj(f);
                    }
                }
                Item::Sym(_) | Item::Nat(_) => {}
            }
        }
    }

    pub fn objs(&self) -> Vec<ObjId> {
        let mut v = Vec::new();
        self.for_each_obj(&mut |o| v.push(o));
        v
    }

    /// Rebuilds with every immediate object reference replaced, in fill order.
    pub fn try_map_objs(&self, f: &mut impl FnMut(ObjId) -> Result<ObjId>) -> Result<Arrangement> {
        let mut items = Vec::with_capacity(self.items.len());
        for it in &self.items {
            items.push(match it {
                Item::Obj(o) => Item::Obj(f(*o)?),
                Item::Deco(k, body) => Item::Deco(*k, body.try_map_objs(f)?),
                Item::Scripted(base, scripts) => {
                    let base = base.try_map_objs(f)?;
                    let scripts = scripts.try_map(&mut |a| a.try_map_objs(f))?;
                    Item::Scripted(Box::new(base), scripts)
                }
                other => other.clone(),
            });
        }
        Ok(Arrangement { items })
    }

    pub fn map_objs(&self, f: &mut impl FnMut(ObjId) -> ObjId) -> Arrangement {
        self.try_map_objs(&mut |o| Ok(f(o))).expect("infallible")
    }

    /// Same shape with every immediate object reference replaced by the hole.
    pub fn pattern(&self) -> Arrangement {
        self.map_objs(&mut |_| ObjId::HOLE)
    }
}

fn check_item(it: &Item) -> Result<()> {
    match it {
        Item::Deco(_, body) if body.is_empty() => Err(Error::EmptyArrangement),
        Item::Scripted(base, s) if base.is_empty() || s.is_empty() => Err(Error::EmptyArrangement),
        _ => Ok(()),
    }
}

impl From<Item> for Arrangement {
    fn from(it: Item) -> Arrangement {
        Arrangement { items: alloc::vec![it] }
    }
}
