//! The equivalence registry: renaming of bound names and user schemas,
//! plus capture-avoiding substitution.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::term::ObjId;
use crate::universe::{EquivVersion, Universe};

/// A schema axiom `lhs ≈ rhs` over templates, decided by rewriting
/// `orient_from` to `orient_to` (when the optional `lt` guard holds)
/// until nothing applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub lhs: ObjId,
    pub rhs: ObjId,
    pub orient_from: ObjId,
    pub orient_to: ObjId,
    pub guard: Option<(ObjId, ObjId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivAxiom {
    Alpha,
    Schema(Schema),
}

impl Universe {
    pub fn register_equivalence(&mut self, ax: EquivAxiom) -> Result<EquivVersion> {
        match ax {
            EquivAxiom::Alpha => {
                if !self.alpha {
                    self.alpha = true;
                    return Ok(self.bump());
                }
                Ok(self.version())
            }
            EquivAxiom::Schema(s) => {
                for side in [s.lhs, s.rhs, s.orient_from, s.orient_to] {
                    if self.arity(side) > 0 && s.lhs != s.rhs {
                        return Err(Error::HoleEquivalenceViolation);
                    }
                }
                let g1 = self.concrete_groups(s.lhs);
                let g2 = self.concrete_groups(s.rhs);
                if g1 != g2 {
                    return Err(Error::CrossGroupSchema);
                }
                if !self.schemas.contains(&s) {
                    self.schemas.push(s);
                    return Ok(self.bump());
                }
                Ok(self.version())
            }
        }
    }

    pub fn modulo_alpha(&self) -> bool {
        self.alpha
    }

    pub fn schemas(&self) -> &[Schema] {
        &self.schemas
    }

    fn concrete_groups(&mut self, id: ObjId) -> BTreeSet<usize> {
        self.names_in(id).into_iter().filter_map(|n| self.name_info(n)).map(|(g, _)| g.0).collect()
    }

    /// Swap-generated α-equivalence, decided by canonical renaming whether
    /// or not renaming is part of the current equivalence.
    pub fn alpha_equivalent(&mut self, a: ObjId, b: ObjId) -> Result<bool> {
        Ok(a == b || self.canonical_mode(a, true)? == self.canonical_mode(b, true)?)
    }

    /// Primitive constructor decompositions: the canonical one, plus (when
    /// renaming is in force) one whose binders are fresh for `avoid`.
    /// Atomic objects decompose as themselves with no arguments.
    pub fn decompose_avoiding(&mut self, id: ObjId, avoid: &BTreeSet<ObjId>) -> Result<Vec<(ObjId, Vec<ObjId>)>> {
        if id.is_hole() {
            return Err(Error::NoDecomposition);
        }
        let id = self.canonical(id)?;
        let arr = self.arrangement(id).clone();
        let args = arr.objs();
        if args.is_empty() {
            return Ok(alloc::vec![(id, Vec::new())]);
        }
        let ctor = self.intern_raw(arr.pattern());
        let mut out = alloc::vec![(ctor, args.clone())];
        if self.alpha && self.arity(id) == 0 {
            let fv = self.free_names(id)?;
            out.extend(self.alpha_variants(ctor, &args, &fv, avoid, true)?);
        }
        Ok(out)
    }

    pub fn decompose(&mut self, id: ObjId) -> Result<Vec<(ObjId, Vec<ObjId>)>> {
        self.decompose_avoiding(id, &BTreeSet::new())
    }

    /// `O[x := R]`. Identity when `x` is not free in `O`. Otherwise a
    /// decomposition whose constructor binds `x` or a name free in `R`
    /// contributes nothing, and the defined ones must agree.
    pub fn substitute(&mut self, o: ObjId, x: ObjId, r: ObjId) -> Result<ObjId> {
        if !self.is_name(x) {
            return Err(Error::NotAName);
        }
        let fv_r = self.free_names(r)?;
        let mut memo = HashMap::new();
        self.subst_rec(o, x, r, &fv_r, &mut memo)
    }

    fn subst_rec(
        &mut self,
        o: ObjId,
        x: ObjId,
        r: ObjId,
        fv_r: &BTreeSet<ObjId>,
        memo: &mut HashMap<ObjId, Result<ObjId>>,
    ) -> Result<ObjId> {
        if o == x {
            return Ok(r);
        }
        if o.is_hole() || self.is_name(o) || self.has_meta(o) {
            return Ok(o);
        }
        if let Some(res) = memo.get(&o) {
            return res.clone();
        }
        let res = if self.free_names(o)?.contains(&x) { self.subst_pcds(o, x, r, fv_r, memo) } else { Ok(o) };
        memo.insert(o, res.clone());
        res
    }

    fn subst_pcds(
        &mut self,
        o: ObjId,
        x: ObjId,
        r: ObjId,
        fv_r: &BTreeSet<ObjId>,
        memo: &mut HashMap<ObjId, Result<ObjId>>,
    ) -> Result<ObjId> {
        let mut avoid = fv_r.clone();
        avoid.insert(x);
        let pcds = self.decompose_avoiding(o, &avoid)?;
        let mut result: Option<ObjId> = None;
        for (c, args) in pcds {
            if args.is_empty() {
                return Ok(o);
            }
            let bound = self.binder_names(c, &args);
            if bound.iter().any(|n| avoid.contains(n)) {
                continue;
            }
            let mut new_args = Vec::with_capacity(args.len());
            let mut defined = true;
            for a in &args {
                match self.subst_rec(*a, x, r, fv_r, memo) {
                    Ok(v) => new_args.push(v),
                    Err(Error::SubstUndefined) => {
                        defined = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !defined {
                continue;
            }
            let v = self.fill(c, &new_args)?;
            match result {
                None => result = Some(v),
                Some(prev) if self.equal(prev, v)? => {}
                Some(_) => return Err(Error::SubstUndefined),
            }
        }
        result.ok_or(Error::SubstUndefined)
    }
}
