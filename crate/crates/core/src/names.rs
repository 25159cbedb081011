//! Name groups, binding declarations, free names and name swapping.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::term::{Arrangement, Item, Nat, ObjId, Position};
use crate::universe::Universe;

/// Handle for a declared family `base_0, base_1, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId(pub(crate) usize);

#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub(crate) base: String,
    /// Created on behalf of a metavariable nobody declared; a later
    /// explicit declaration adopts it instead of colliding.
    pub(crate) implicit: bool,
}

/// A constructor binds the name in hole `binder` across the holes in
/// `scope` (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub binder: usize,
    pub scope: Vec<usize>,
}

impl Universe {
    /// Declares the family `base_i` to be a name group.
    pub fn declare_name_group(&mut self, base: &str) -> Result<GroupId> {
        let s = self.sym(base)?;
        if let Some(&g) = self.group_of_base.get(&s) {
            if self.groups[g].implicit {
                self.groups[g].implicit = false;
                return Ok(GroupId(g));
            }
            return Err(Error::OverlappingGroup(base.to_string()));
        }
        let g = self.groups.len();
        self.groups.push(Group { base: base.to_string(), implicit: false });
        self.group_of_base.insert(s, g);
        self.bump();
        Ok(GroupId(g))
    }

    /// The group backing a presumed-fresh family, created on first use.
    pub fn implicit_group(&mut self, base: &str) -> Result<GroupId> {
        let s = self.sym(base)?;
        if let Some(&g) = self.group_of_base.get(&s) {
            return Ok(GroupId(g));
        }
        let g = self.groups.len();
        self.groups.push(Group { base: base.to_string(), implicit: true });
        self.group_of_base.insert(s, g);
        self.bump();
        Ok(GroupId(g))
    }

    pub fn group(&self, base: &str) -> Option<GroupId> {
        let s = self.lookup_sym(base)?;
        self.group_of_base.get(&s).map(|g| GroupId(*g))
    }

    pub fn group_base(&self, g: GroupId) -> &str {
        &self.groups[g.0].base
    }

    pub fn group_is_implicit(&self, g: GroupId) -> bool {
        self.groups[g.0].implicit
    }

    pub fn groups(&self) -> impl Iterator<Item = GroupId> + '_ {
        (0..self.groups.len()).map(GroupId)
    }

    /// The name `base_index` of a group.
    pub fn name(&mut self, g: GroupId, index: u64) -> Result<ObjId> {
        let base = self.groups[g.0].base.clone();
        let s = self.sym(&base)?;
        let arr = Arrangement::sym(s).scripted(alloc::vec![(Position::Sub, Item::Nat(Nat::from(index)).into())])?;
        self.make_object(arr)
    }

    /// Group and index when the object is a name.
    pub fn name_info(&self, id: ObjId) -> Option<(GroupId, u64)> {
        if id.is_hole() {
            return None;
        }
        let [Item::Scripted(base, scripts)] = self.arrangement(id).items() else { return None };
        let [Item::Sym(s)] = base.items() else { return None };
        let g = *self.group_of_base.get(s)?;
        if scripts.len() != 1 {
            return None;
        }
        let [Item::Nat(n)] = scripts.get(Position::Sub)?.items() else { return None };
        let i = u64::try_from(n).ok()?;
        Some((GroupId(g), i))
    }

    pub fn is_name(&self, id: ObjId) -> bool {
        self.name_info(id).is_some()
    }

    /// Declares that `pattern` binds the name in hole `binder` across the
    /// holes in `scope`.
    pub fn declare_binder(&mut self, pattern: ObjId, binder: usize, scope: &[usize]) -> Result<()> {
        let arr = self.arrangement(pattern).clone();
        let n = arr.objs().len();
        if pattern.is_hole() || n == 0 || arr.objs().iter().any(|o| !o.is_hole()) {
            return Err(Error::NotDecomposable);
        }
        if binder == 0 || binder > n {
            return Err(Error::BadBinder(binder));
        }
        if let Some(&j) = scope.iter().find(|&&j| j == 0 || j > n) {
            return Err(Error::BadBinder(j));
        }
        let mut scope = scope.to_vec();
        scope.sort_unstable();
        scope.dedup();
        let entry = Binding { binder, scope };
        let list = self.binders.entry(pattern).or_default();
        if !list.contains(&entry) {
            list.push(entry);
            self.bump();
        }
        Ok(())
    }

    pub fn bindings(&self, pattern: ObjId) -> &[Binding] {
        self.binders.get(&pattern).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Names bound by the constructor occurrence in each argument position.
    pub(crate) fn bound_sets(&self, ctor: ObjId, args: &[ObjId]) -> Vec<BTreeSet<ObjId>> {
        let mut sets = alloc::vec![BTreeSet::new(); args.len()];
        for b in self.bindings(ctor) {
            let x = args[b.binder - 1];
            if self.is_name(x) {
                for &j in &b.scope {
                    sets[j - 1].insert(x);
                }
            }
        }
        sets
    }

    /// Names bound by the constructor occurrence, over all positions.
    pub(crate) fn binder_names(&self, ctor: ObjId, args: &[ObjId]) -> BTreeSet<ObjId> {
        self.bindings(ctor).iter().map(|b| args[b.binder - 1]).filter(|x| self.is_name(*x)).collect()
    }

    pub(crate) fn fv_of_pcd(&mut self, ctor: ObjId, args: &[ObjId], alpha: bool) -> Result<BTreeSet<ObjId>> {
        let bound = self.bound_sets(ctor, args);
        let mut out = BTreeSet::new();
        for (a, s) in args.iter().zip(bound) {
            for n in self.free_names_mode(*a, alpha)? {
                if !s.contains(&n) {
                    out.insert(n);
                }
            }
        }
        Ok(out)
    }

    /// Free names; undefined when decompositions disagree.
    pub fn free_names(&mut self, id: ObjId) -> Result<BTreeSet<ObjId>> {
        let alpha = self.alpha;
        self.free_names_mode(id, alpha)
    }

    pub(crate) fn free_names_mode(&mut self, id: ObjId, alpha: bool) -> Result<BTreeSet<ObjId>> {
        if id.is_hole() || self.has_meta(id) {
            return Ok(BTreeSet::new());
        }
        if self.is_name(id) {
            return Ok(BTreeSet::from([id]));
        }
        if alpha == self.alpha {
            if let Some(r) = self.fv_memo.get(&id) {
                return r.clone();
            }
        }
        let r = self.free_names_uncached(id, alpha);
        if alpha == self.alpha {
            self.fv_memo.insert(id, r.clone());
        }
        r
    }

    fn free_names_uncached(&mut self, id: ObjId, alpha: bool) -> Result<BTreeSet<ObjId>> {
        let arr = self.arrangement(id).clone();
        let args = arr.objs();
        if args.is_empty() {
            return Ok(BTreeSet::new());
        }
        let ctor = self.intern_raw(arr.pattern());
        let fv = self.fv_of_pcd(ctor, &args, alpha)?;
        if alpha {
            for (c, seq) in self.alpha_variants(ctor, &args, &fv, &BTreeSet::new(), alpha)? {
                if self.fv_of_pcd(c, &seq, alpha)? != fv {
                    return Err(Error::UndefinedFreeNames);
                }
            }
        }
        Ok(fv)
    }

    /// Every name occurring anywhere inside the object.
    pub fn names_in(&mut self, id: ObjId) -> BTreeSet<ObjId> {
        if let Some(s) = self.names_memo.get(&id) {
            return s.clone();
        }
        let mut out = BTreeSet::new();
        if self.is_name(id) {
            out.insert(id);
        } else if !id.is_hole() {
            for k in self.arrangement(id).objs() {
                out.extend(self.names_in(k));
            }
        }
        self.names_memo.insert(id, out.clone());
        out
    }

    fn check_swap(&self, x: ObjId, y: ObjId) -> Result<()> {
        let gx = self.name_info(x).ok_or(Error::NotAName)?.0;
        let gy = self.name_info(y).ok_or(Error::NotAName)?.0;
        if gx != gy {
            return Err(Error::NotSameGroup);
        }
        Ok(())
    }

    /// Exchanges every occurrence of `x` with `y` and vice versa.
    pub fn swap_names(&mut self, x: ObjId, y: ObjId, t: ObjId) -> Result<ObjId> {
        self.check_swap(x, y)?;
        let alpha = self.alpha;
        let mut memo = HashMap::new();
        self.swap_obj(x, y, t, alpha, &mut memo)
    }

    /// Arrangement form of [`Universe::swap_names`].
    pub fn swap_names_arr(&mut self, x: ObjId, y: ObjId, a: &Arrangement) -> Result<Arrangement> {
        self.check_swap(x, y)?;
        let alpha = self.alpha;
        self.swap_arr_mode(a, x, y, alpha)
    }

    pub(crate) fn swap_arr_mode(&mut self, a: &Arrangement, x: ObjId, y: ObjId, alpha: bool) -> Result<Arrangement> {
        let mut memo = HashMap::new();
        a.try_map_objs(&mut |o| self.swap_obj(x, y, o, alpha, &mut memo))
    }

    fn swap_obj(&mut self, x: ObjId, y: ObjId, t: ObjId, alpha: bool, memo: &mut HashMap<ObjId, ObjId>) -> Result<ObjId> {
        if t == x {
            return Ok(y);
        }
        if t == y {
            return Ok(x);
        }
        if t.is_hole() {
            return Ok(t);
        }
        if let Some(r) = memo.get(&t) {
            return Ok(*r);
        }
        let names = self.names_in(t);
        let r = if !names.contains(&x) && !names.contains(&y) {
            t
        } else {
            let arr = self.arrangement(t).clone();
            let arr = arr.try_map_objs(&mut |o| self.swap_obj(x, y, o, alpha, memo))?;
            self.make_object_mode(arr, alpha)?
        };
        memo.insert(t, r);
        Ok(r)
    }

    /// Primitive constructor decompositions of the object with renamed
    /// binders: one variant in which every top-level binder not free in
    /// the whole is renamed to a fresh name outside `avoid`.
    pub(crate) fn alpha_variants(
        &mut self,
        ctor: ObjId,
        args: &[ObjId],
        fv: &BTreeSet<ObjId>,
        avoid: &BTreeSet<ObjId>,
        alpha: bool,
    ) -> Result<Vec<(ObjId, Vec<ObjId>)>> {
        let binders: Vec<ObjId> = self.binder_names(ctor, args).into_iter().filter(|x| !fv.contains(x)).collect();
        if binders.is_empty() {
            return Ok(Vec::new());
        }
        let mut used: BTreeSet<ObjId> = avoid.clone();
        used.extend(fv.iter().copied());
        for a in args {
            used.extend(self.names_in(*a));
        }
        let mut seq = args.to_vec();
        for x in binders {
            let (g, _) = self.name_info(x).expect("binder is a name");
            let mut i = 0u64;
            let y = loop {
                let cand = self.name(g, i)?;
                if !used.contains(&cand) {
                    break cand;
                }
                i += 1;
            };
            used.insert(y);
            let mut memo = HashMap::new();
            for s in seq.iter_mut() {
                *s = self.swap_obj(x, y, *s, alpha, &mut memo)?;
            }
        }
        Ok(alloc::vec![(ctor, seq)])
    }
}
