//! Canonicalization under the composed equivalence, and the bounded
//! class exploration used for matching modulo schemas.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashSet;

use crate::error::{Error, Result};
use crate::pattern::MatchMode;
use crate::term::{Arrangement, Item, ObjId};
use crate::universe::Universe;

const NORMALIZE_LIMIT: usize = 10_000;

impl Universe {
    /// Rewrites an arrangement whose children are canonical into the
    /// canonical representative of its class.
    pub(crate) fn normalize(&mut self, arr: Arrangement, alpha: bool) -> Result<Arrangement> {
        if !alpha && self.schemas.is_empty() {
            return Ok(arr);
        }
        if self.arity_of(&arr) > 0 || self.arr_has_meta(&arr) {
            return Ok(arr);
        }
        let mut cur = arr;
        for _ in 0..NORMALIZE_LIMIT {
            let mut changed = false;
            if alpha {
                if let Some(next) = self.alpha_step(&cur, alpha)? {
                    cur = next;
                    changed = true;
                }
            }
            if let Some(next) = self.schema_step(&cur, alpha)? {
                cur = next;
                changed = true;
            }
            if !changed {
                return Ok(cur);
            }
        }
        Err(Error::BoundExceeded(NORMALIZE_LIMIT))
    }

    pub(crate) fn arr_has_meta(&self, arr: &Arrangement) -> bool {
        let mut m = false;
        arr.for_each_obj(&mut |o| m |= self.has_meta(o));
        m || arr.items().iter().any(|it| matches!(it, Item::Sym(s) if self.placeholders.contains_key(s)))
    }

    /// Renames each binder of the top constructor to the lowest name of its
    /// group that is not free in the whole.
    fn alpha_step(&mut self, arr: &Arrangement, alpha: bool) -> Result<Option<Arrangement>> {
        let pat = self.intern_raw(arr.pattern());
        let Some(bindings) = self.binders.get(&pat).cloned() else {
            return Ok(None);
        };
        let args = arr.objs();
        let fv = self.fv_of_pcd(pat, &args, alpha)?;
        let mut cur = arr.clone();
        let mut taken: BTreeSet<ObjId> = BTreeSet::new();
        let mut changed = false;
        for b in bindings {
            let x = cur.objs()[b.binder - 1];
            let Some((g, _)) = self.name_info(x) else { continue };
            if fv.contains(&x) || taken.contains(&x) {
                continue;
            }
            let mut i = 0u64;
            let y = loop {
                let cand = self.name(g, i)?;
                if !fv.contains(&cand) && !taken.contains(&cand) {
                    break cand;
                }
                i += 1;
            };
            taken.insert(y);
            if y != x {
                cur = self.swap_arr_mode(&cur, x, y, alpha)?;
                changed = true;
            }
        }
        Ok(if changed { Some(cur) } else { None })
    }

    fn schema_step(&mut self, arr: &Arrangement, alpha: bool) -> Result<Option<Arrangement>> {
        if self.schemas.is_empty() {
            return Ok(None);
        }
        let here = self.intern_raw(arr.clone());
        for i in 0..self.schemas.len() {
            let s = self.schemas[i].clone();
            for env in self.match_t(s.orient_from, here, MatchMode::RAW)? {
                if let Some((a, b)) = s.guard {
                    let a = self.instantiate_mode(a, &env, alpha)?;
                    let b = self.instantiate_mode(b, &env, alpha)?;
                    if self.cmp_objects(a, b) != Ordering::Less {
                        continue;
                    }
                }
                let res = self.instantiate_mode(s.orient_to, &env, alpha)?;
                let next = self.arrangement(res).clone();
                if next != *arr {
                    return Ok(Some(next));
                }
            }
        }
        Ok(None)
    }

    /// Whether no schema relates this object's arrangement to a different
    /// one. Hole-containing objects are never related by renaming.
    pub fn class_is_singleton(&mut self, id: ObjId) -> bool {
        if id.is_hole() {
            return true;
        }
        for i in 0..self.schemas.len() {
            let s = self.schemas[i].clone();
            for (from, to) in [(s.lhs, s.rhs), (s.rhs, s.lhs)] {
                let Ok(envs) = self.match_t(from, id, MatchMode::RAW) else { return false };
                for env in envs {
                    match self.instantiate_raw(to, &env) {
                        Ok(other) if other == id => {}
                        _ => return false,
                    }
                }
            }
        }
        true
    }

    /// Members of the object's class reachable by applying schema axioms in
    /// either direction at any position, as raw (uncanonicalized) objects.
    /// Renaming variants are not included. At most `bound` are returned.
    pub fn class_members(&mut self, id: ObjId, bound: usize) -> Result<Vec<ObjId>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(id);
        queue.push_back(id);
        while let Some(n) = queue.pop_front() {
            out.push(n);
            if out.len() >= bound {
                break;
            }
            for m in self.schema_neighbors(n, bound)? {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        Ok(out)
    }

    fn schema_neighbors(&mut self, id: ObjId, bound: usize) -> Result<Vec<ObjId>> {
        let mut out = Vec::new();
        if id.is_hole() || self.schemas.is_empty() {
            return Ok(out);
        }
        for i in 0..self.schemas.len() {
            let s = self.schemas[i].clone();
            for (from, to) in [(s.lhs, s.rhs), (s.rhs, s.lhs)] {
                for env in self.match_t(from, id, MatchMode::RAW)? {
                    if let Ok(m) = self.instantiate_raw(to, &env) {
                        out.push(m);
                    }
                }
            }
        }
        let arr = self.arrangement(id).clone();
        let kids = arr.objs();
        for (k, c) in kids.iter().enumerate() {
            if self.arity(*c) > 0 || self.atom_like(*c) {
                continue;
            }
            for m in self.schema_neighbors(*c, bound)? {
                let mut j = 0;
                let next = arr.map_objs(&mut |o| {
                    let r = if j == k { m } else { o };
                    j += 1;
                    r
                });
                out.push(self.intern_raw(next));
                if out.len() > bound {
                    return Ok(out);
                }
            }
        }
        Ok(out)
    }

    fn atom_like(&self, id: ObjId) -> bool {
        self.arrangement(id).objs().is_empty()
    }

    /// Structural total order on objects: the hole first, then arrangements
    /// compared item by item; glyphs compare by their text.
    pub fn cmp_objects(&self, a: ObjId, b: ObjId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (a.is_hole(), b.is_hole()) {
            (true, _) => return Ordering::Less,
            (_, true) => return Ordering::Greater,
            _ => {}
        }
        self.cmp_arr(self.arrangement(a), self.arrangement(b))
    }

    pub fn cmp_arr(&self, a: &Arrangement, b: &Arrangement) -> Ordering {
        for (x, y) in a.items().iter().zip(b.items()) {
            let o = self.cmp_item(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }

    fn cmp_item(&self, x: &Item, y: &Item) -> Ordering {
        fn rank(i: &Item) -> u8 {
            match i {
                Item::Sym(_) => 0,
                Item::Nat(_) => 1,
                Item::Obj(_) => 2,
                Item::Deco(..) => 3,
                Item::Scripted(..) => 4,
            }
        }
        match (x, y) {
            (Item::Sym(a), Item::Sym(b)) => self.glyph(*a).cmp(self.glyph(*b)),
            (Item::Nat(a), Item::Nat(b)) => a.cmp(b),
            (Item::Obj(a), Item::Obj(b)) => self.cmp_objects(*a, *b),
            (Item::Deco(k1, a), Item::Deco(k2, b)) => k1.cmp(k2).then_with(|| self.cmp_arr(a, b)),
            (Item::Scripted(a, sa), Item::Scripted(b, sb)) => self.cmp_arr(a, b).then_with(|| {
                for ((p1, a1), (p2, a2)) in sa.iter().zip(sb.iter()) {
                    let o = p1.cmp(&p2).then_with(|| self.cmp_arr(a1, a2));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                sa.len().cmp(&sb.len())
            }),
            _ => rank(x).cmp(&rank(y)),
        }
    }
}
