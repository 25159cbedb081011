//! Context-hole filling.

use alloc::rc::Rc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::term::{Arrangement, ObjId};
use crate::universe::Universe;

struct Cursor<'a> {
    args: &'a [ObjId],
    next: usize,
}

impl Universe {
    /// Fills the holes reachable from `target` left to right. The number of
    /// replacements must equal the arity.
    pub fn fill(&mut self, target: ObjId, args: &[ObjId]) -> Result<ObjId> {
        let holes = self.arity(target);
        if holes != args.len() {
            return Err(Error::ArityMismatch { holes, replacements: args.len() });
        }
        let mut cur = Cursor { args, next: 0 };
        let out = self.fill_obj(target, &mut cur)?;
        debug_assert_eq!(cur.next, args.len());
        Ok(out)
    }

    /// Arrangement form of [`Universe::fill`].
    pub fn fill_arrangement(&mut self, target: &Arrangement, args: &[ObjId]) -> Result<Arrangement> {
        let holes = self.arity_of(target);
        if holes != args.len() {
            return Err(Error::ArityMismatch { holes, replacements: args.len() });
        }
        let mut cur = Cursor { args, next: 0 };
        target.try_map_objs(&mut |o| self.fill_obj(o, &mut cur))
    }

    fn fill_obj(&mut self, o: ObjId, cur: &mut Cursor<'_>) -> Result<ObjId> {
        if o.is_hole() {
            let r = cur.args[cur.next];
            cur.next += 1;
            return Ok(r);
        }
        if self.arity(o) == 0 {
            return Ok(o);
        }
        if !self.class_is_singleton(o) {
            return Err(Error::OpaqueClassDescent);
        }
        let arr = self.arrangement(o).clone();
        let arr = arr.try_map_objs(&mut |c| self.fill_obj(c, cur))?;
        self.make_object(arr)
    }

    /// Every way to write `t` as `C⟨s⟩` with `C` of arity one: `s` ranges
    /// over the subobject occurrences holding all of `t`'s holes,
    /// outermost first.
    pub fn one_hole_splits(&mut self, t: ObjId) -> Result<Rc<Vec<(ObjId, ObjId)>>> {
        if let Some(v) = self.split_memo.get(&t) {
            return Ok(v.clone());
        }
        let mut out = alloc::vec![(ObjId::HOLE, t)];
        if !t.is_hole() {
            let total = self.arity(t);
            let arr = self.arrangement(t).clone();
            let kids = arr.objs();
            for (k, c) in kids.iter().enumerate() {
                if self.arity(*c) != total {
                    continue;
                }
                let inner = self.one_hole_splits(*c)?;
                for (ctx, s) in inner.iter() {
                    let mut j = 0;
                    let next = arr.map_objs(&mut |o| {
                        let r = if j == k { *ctx } else { o };
                        j += 1;
                        r
                    });
                    let Ok(c2) = self.make_object(next) else { continue };
                    if self.class_is_singleton(c2) {
                        out.push((c2, *s));
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.split_memo.insert(t, out.clone());
        Ok(out)
    }
}
