//! Building objects from flat arrangements by splicing declared
//! constructors together.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::context::{Assoc, ConstructorDecl};
use crate::error::{Error, Result};
use crate::term::{Arrangement, Item, ObjId};
use crate::universe::Universe;

const SPAN_CANDIDATES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cand {
    obj: ObjId,
    ctor: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    /// Child in the parent's leading hole, with its own trailing hole
    /// facing the rest of the parent.
    Left,
    /// Child in the parent's trailing hole, leading hole facing the parent.
    Right,
}

/// Whether `child` may sit in `parent`'s hole on the given edge.
fn allowed(parent: &ConstructorDecl, child: &ConstructorDecl, edge: Edge) -> bool {
    let by_assoc = |a: Option<Assoc>| match a {
        Some(Assoc::Left) => edge == Edge::Left,
        Some(Assoc::Right) => edge == Edge::Right,
        _ => true,
    };
    if parent.pattern == child.pattern {
        return by_assoc(parent.assoc);
    }
    match (parent.prec, child.prec) {
        (Some(p), Some(c)) if c > p => true,
        (Some(p), Some(c)) if c < p => false,
        (Some(_), Some(_)) if parent.assoc == child.assoc => by_assoc(parent.assoc),
        _ => true,
    }
}

fn unambiguous(parent: &ConstructorDecl, child: &ConstructorDecl, edge: Edge) -> bool {
    let by_assoc = |a: Option<Assoc>| match a {
        Some(Assoc::Left) => edge == Edge::Left,
        Some(Assoc::Right) => edge == Edge::Right,
        _ => false,
    };
    if parent.pattern == child.pattern {
        return by_assoc(parent.assoc);
    }
    match (parent.prec, child.prec) {
        (Some(p), Some(c)) if c > p => true,
        (Some(p), Some(c)) if c < p => false,
        (Some(_), Some(_)) if parent.assoc == child.assoc => by_assoc(parent.assoc),
        _ => false,
    }
}

struct Parser<'a> {
    items: &'a [Item],
    memo: HashMap<(usize, usize), Vec<Cand>>,
}

impl Universe {
    /// The object an arrangement denotes by splicing declared constructors.
    /// With `declare`, an arrangement no declared constructor accounts for
    /// declares its own pattern.
    pub fn parse_arrangement(&mut self, arr: &Arrangement, declare: bool) -> Result<ObjId> {
        if let Some(o) = arr.as_bare_pointer() {
            return Ok(o);
        }
        if arr.objs().is_empty() {
            return self.make_object(arr.clone());
        }
        let mut p = Parser { items: arr.items(), memo: HashMap::new() };
        let cands = self.parse_span(&mut p, 0, arr.len())?;
        let mut objs: Vec<ObjId> = Vec::new();
        for c in cands {
            if !objs.contains(&c.obj) {
                objs.push(c.obj);
            }
        }
        match objs.len() {
            1 => Ok(objs[0]),
            0 if declare => {
                self.declare_constructor(arr)?;
                self.make_object(arr.clone())
            }
            0 => Err(Error::NoParse),
            _ => Err(Error::AmbiguousParse),
        }
    }

    /// Whether `child` must be parenthesized in hole item `hole_item` of
    /// `parent` for the text to parse back uniquely. `leading` and
    /// `trailing` say whether text precedes or follows the parent itself.
    /// Stricter than the parser: undeclared precedence or associativity
    /// always parenthesizes.
    pub fn needs_parens(&self, parent: ObjId, hole_item: usize, child: ObjId, leading: bool, trailing: bool) -> bool {
        let pat = self.arrangement(parent).pattern();
        let pchild = self.arrangement(child).pattern();
        let Some(cd) = self.ctor_ix_of(&pchild).map(|i| &self.ctors[i]) else { return false };
        let Some(pd) = self.ctor_ix_of(&pat).map(|i| &self.ctors[i]) else { return true };
        let n = pat.len();
        if cd.open_right(self) {
            if hole_item + 1 < n {
                if hole_item != 0 || !unambiguous(pd, cd, Edge::Left) {
                    return hole_item == 0;
                }
            } else if trailing {
                return true;
            }
        }
        if cd.open_left(self) {
            if hole_item > 0 {
                if hole_item + 1 != n || !unambiguous(pd, cd, Edge::Right) {
                    return hole_item + 1 == n;
                }
            } else if leading {
                return true;
            }
        }
        false
    }

    fn ctor_ix_of(&self, pat: &Arrangement) -> Option<usize> {
        self.ctors.iter().position(|c| self.arrangement(c.pattern) == pat)
    }

    fn parse_span(&mut self, p: &mut Parser<'_>, i: usize, j: usize) -> Result<Vec<Cand>> {
        if let Some(c) = p.memo.get(&(i, j)) {
            return Ok(c.clone());
        }
        let mut out: Vec<Cand> = Vec::new();
        if j == i + 1 {
            if let Item::Obj(o) = &p.items[i] {
                out.push(Cand { obj: *o, ctor: None });
            }
        }
        for ci in 0..self.ctors.len() {
            let pat = self.arrangement(self.ctors[ci].pattern).clone();
            let mut assignments = Vec::new();
            self.match_pattern(p, pat.items(), 0, i, j, Vec::new(), &mut assignments)?;
            for kids in assignments {
                if !self.precedence_ok(ci, &pat, &kids) {
                    continue;
                }
                let objs: Vec<ObjId> = kids.iter().map(|k| k.1.obj).collect();
                let mut it = objs.into_iter();
                let built = pat.map_objs(&mut |_| it.next().expect("one child per hole"));
                let Ok(obj) = self.make_object(built) else { continue };
                let c = Cand { obj, ctor: Some(ci) };
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            if out.len() > SPAN_CANDIDATES {
                break;
            }
        }
        p.memo.insert((i, j), out.clone());
        Ok(out)
    }

    fn precedence_ok(&self, ci: usize, pat: &Arrangement, kids: &[(Option<usize>, Cand)]) -> bool {
        let parent = &self.ctors[ci];
        let n = pat.len();
        for (pos, cand) in kids {
            let (Some(pos), Some(cc)) = (pos, cand.ctor) else { continue };
            let child = &self.ctors[cc];
            if *pos == 0 && child.open_right(self) && !allowed(parent, child, Edge::Left) {
                return false;
            }
            if *pos + 1 == n && child.open_left(self) && !allowed(parent, child, Edge::Right) {
                return false;
            }
        }
        true
    }

    /// Matches pattern items `pat[k..]` against `p.items[at..end]`. Each
    /// child records the pattern item it came from when that item is a
    /// top-level hole.
    #[allow(clippy::too_many_arguments)]
    fn match_pattern(
        &mut self,
        p: &mut Parser<'_>,
        pat: &[Item],
        k: usize,
        at: usize,
        end: usize,
        acc: Vec<(Option<usize>, Cand)>,
        out: &mut Vec<Vec<(Option<usize>, Cand)>>,
    ) -> Result<()> {
        if k == pat.len() {
            if at == end {
                out.push(acc);
            }
            return Ok(());
        }
        if at >= end {
            return Ok(());
        }
        let rest_min = pat.len() - k - 1;
        if end < at + 1 + rest_min {
            return Ok(());
        }
        match &pat[k] {
            Item::Obj(_) => {
                let last = end - rest_min;
                for q in at + 1..=last {
                    for c in self.parse_span(p, at, q)? {
                        let mut next = acc.clone();
                        next.push((Some(k), c));
                        self.match_pattern(p, pat, k + 1, q, end, next, out)?;
                    }
                }
            }
            other => {
                let mut nested = Vec::new();
                if item_fits(other, &p.items[at], &mut nested) {
                    let mut next = acc;
                    next.extend(nested.into_iter().map(|o| (None, Cand { obj: o, ctor: None })));
                    self.match_pattern(p, pat, k + 1, at + 1, end, next, out)?;
                }
            }
        }
        Ok(())
    }
}

/// Structural fit of one pattern item; holes nested inside decorations and
/// scripts take single object references.
fn item_fits(pat: &Item, it: &Item, kids: &mut Vec<ObjId>) -> bool {
    match (pat, it) {
        (Item::Obj(_), Item::Obj(o)) => {
            kids.push(*o);
            true
        }
        (Item::Sym(a), Item::Sym(b)) => a == b,
        (Item::Nat(a), Item::Nat(b)) => a == b,
        (Item::Deco(k1, a), Item::Deco(k2, b)) => k1 == k2 && arr_fits(a, b, kids),
        (Item::Scripted(a, sa), Item::Scripted(b, sb)) => {
            sa.len() == sb.len()
                && arr_fits(a, b, kids)
                && sa.iter().zip(sb.iter()).all(|((p1, x), (p2, y))| p1 == p2 && arr_fits(x, y, kids))
        }
        _ => false,
    }
}

fn arr_fits(a: &Arrangement, b: &Arrangement, kids: &mut Vec<ObjId>) -> bool {
    a.len() == b.len() && a.items().iter().zip(b.items()).all(|(x, y)| item_fits(x, y, kids))
}
