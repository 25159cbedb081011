//! Depth-indexed evaluation of the elaborated rules.
//!
//! Stratum `d` of a set is what its alternatives produce when each set
//! metavariable ranges over stratum `d` of sets declared earlier and
//! stratum `d - 1` of the set itself and those declared later; names range
//! over the first `fresh` names of their group. Strata can be materialized
//! by enumeration, or queried one object at a time by matching the object
//! against the alternatives.

use alloc::rc::Rc;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use super::cond::{labels, Truth};
use super::{Alt, Cond, Grammar};
use crate::error::{Error, Result};
use crate::names::GroupId;
use crate::pattern::{Env, MatchMode, MetaId, Sort};
use crate::term::ObjId;
use crate::universe::Universe;

/// Largest stratum a single set may reach during enumeration.
pub const DEFAULT_STRATUM_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    /// Derivable, but not within the requested depth and name pool.
    UnknownAtDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Level {
    Stratum(usize),
    Any,
}

pub struct Engine {
    pub u: Universe,
    pub(crate) g: Grammar,
    fresh: u64,
    cap: usize,
    strata: Vec<Vec<Vec<ObjId>>>,
    index: Vec<Vec<HashSet<ObjId>>>,
    /// Sets of stratum `d` already materialized, in declaration order.
    complete: Vec<usize>,
    stable_at: Option<usize>,
    seen_version: u64,
    in_memo: HashMap<(ObjId, usize, usize), bool>,
    rec_yes: HashSet<(ObjId, usize)>,
    rec_no: HashSet<(ObjId, usize)>,
    rec_stack: HashSet<(ObjId, usize)>,
    cutoffs: usize,
    match_memo: HashMap<(ObjId, ObjId), Rc<Vec<Env>>>,
    pub(crate) carrier_memo: HashMap<(ObjId, usize), bool>,
}

impl Engine {
    pub fn new(u: Universe, g: Grammar) -> Engine {
        let seen_version = u.version().0;
        Engine {
            u,
            g,
            fresh: 3,
            cap: DEFAULT_STRATUM_CAP,
            strata: Vec::new(),
            index: Vec::new(),
            complete: Vec::new(),
            stable_at: None,
            seen_version,
            in_memo: HashMap::new(),
            rec_yes: HashSet::new(),
            rec_no: HashSet::new(),
            rec_stack: HashSet::new(),
            cutoffs: 0,
            match_memo: HashMap::new(),
            carrier_memo: HashMap::new(),
        }
    }

    /// Size of the name pool per group.
    pub fn with_fresh(mut self, n: u64) -> Engine {
        self.fresh = n;
        self.reset();
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Engine {
        self.cap = cap;
        self.reset();
        self
    }

    pub fn grammar(&self) -> &Grammar {
        &self.g
    }

    pub fn fresh(&self) -> u64 {
        self.fresh
    }

    /// Depth from which every stratum equals the previous one, once seen.
    pub fn stable_depth(&self) -> Option<usize> {
        self.stable_at
    }

    fn reset(&mut self) {
        self.strata.clear();
        self.index.clear();
        self.complete.clear();
        self.stable_at = None;
        self.in_memo.clear();
        self.rec_yes.clear();
        self.rec_no.clear();
        self.match_memo.clear();
        self.carrier_memo.clear();
        self.seen_version = self.u.version().0;
    }

    /// Drops cached results when the equivalence changed underneath.
    pub(crate) fn sync(&mut self) {
        if self.u.version().0 != self.seen_version {
            self.reset();
        }
    }

    pub fn pool(&mut self, g: GroupId) -> Result<Vec<ObjId>> {
        (0..self.fresh).map(|i| self.u.name(g, i)).collect()
    }

    /// Stratum `depth` of the named set, sorted by object id.
    pub fn enumerate(&mut self, set: &str, depth: usize) -> Result<Vec<ObjId>> {
        let s = self.g.set_index(set)?;
        self.recalculate(depth)?;
        Ok(self.strata[depth][s].clone())
    }

    /// Materializes strata `0..=depth` of every set.
    pub fn recalculate(&mut self, depth: usize) -> Result<()> {
        self.sync();
        let n = self.g.sets.len();
        if self.strata.is_empty() {
            self.strata.push(alloc::vec![Vec::new(); n]);
            self.index.push(alloc::vec![HashSet::new(); n]);
            self.complete.push(n);
        }
        while self.strata.len() <= depth {
            let r = self.strata.len();
            if self.stable_at.is_some() {
                let (s, i) = (self.strata[r - 1].clone(), self.index[r - 1].clone());
                self.strata.push(s);
                self.index.push(i);
                self.complete.push(n);
                continue;
            }
            self.strata.push(alloc::vec![Vec::new(); n]);
            self.index.push(alloc::vec![HashSet::new(); n]);
            self.complete.push(0);
            let mut grew = false;
            for s in 0..n {
                let mut members = self.compute(s, r)?;
                members.sort();
                let idx: HashSet<ObjId> = members.iter().copied().collect();
                if let Some(lost) = self.strata[r - 1][s].iter().find(|x| !idx.contains(*x)) {
                    let _ = lost;
                    return Err(Error::NoLeastFixpoint { set: self.g.sets[s].name.clone(), depth: r - 1, next: r });
                }
                grew |= members.len() != self.strata[r - 1][s].len();
                self.strata[r][s] = members;
                self.index[r][s] = idx;
                self.complete[r] = s + 1;
            }
            if !grew {
                self.stable_at = Some(r - 1);
            }
        }
        Ok(())
    }

    fn depth_for(owner: usize, other: usize, d: usize) -> usize {
        if other < owner {
            d
        } else {
            d - 1
        }
    }

    fn domain(&mut self, m: MetaId, owner: usize, r: usize) -> Result<Vec<ObjId>> {
        match self.u.meta_sort(m) {
            Sort::Set(s) => Ok(self.strata[Self::depth_for(owner, s, r)][s].clone()),
            Sort::Group(g) => self.pool(g),
            Sort::Any => Err(Error::UnboundMetavariable(self.u.meta_name(m).into())),
        }
    }

    fn compute(&mut self, s: usize, r: usize) -> Result<Vec<ObjId>> {
        let alts = self.g.sets[s].alts.clone();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut budget = self.cap.saturating_mul(64);
        for alt in &alts {
            let mut domains = Vec::new();
            for &m in &alt.metas {
                domains.push(self.domain(m, s, r)?);
            }
            let cond_metas = alt.cond.metas(&self.u);
            let ready = alt.metas.iter().rposition(|m| cond_metas.contains(m)).map_or(0, |p| p + 1);
            let mut walk = Walk { alt, owner: s, r, domains: &domains, ready, out: &mut out, seen: &mut seen, budget: &mut budget };
            self.product(&mut walk, 0, Env::new())?;
        }
        Ok(out)
    }

    fn product(&mut self, w: &mut Walk<'_>, k: usize, env: Env) -> Result<()> {
        if k == w.ready && self.eval(&w.alt.cond, &env, Level::Stratum(w.r), w.owner)? != Truth::True {
            return Ok(());
        }
        if k == w.alt.metas.len() {
            if *w.budget == 0 {
                return Err(Error::BoundExceeded(self.cap));
            }
            *w.budget -= 1;
            let v = match self.u.instantiate(w.alt.template, &env) {
                Ok(v) => v,
                Err(e) if skippable(&e) => return Ok(()),
                Err(e) => return Err(e),
            };
            if w.seen.insert(v) {
                w.out.push(v);
                if w.out.len() > self.cap {
                    return Err(Error::BoundExceeded(self.cap));
                }
            }
            return Ok(());
        }
        let m = w.alt.metas[k];
        for i in 0..w.domains[k].len() {
            let v = w.domains[k][i];
            self.product(w, k + 1, env.clone().with(m, v))?;
        }
        Ok(())
    }

    /// Whether `t` is in the given stratum, without materializing it.
    pub(crate) fn in_stratum(&mut self, t: ObjId, s: usize, d: usize) -> Result<bool> {
        let d = match self.stable_at {
            Some(k) if d > k => k,
            _ => d,
        };
        if d == 0 {
            return Ok(false);
        }
        if d < self.strata.len() && self.complete[d] > s {
            return Ok(self.index[d][s].contains(&t));
        }
        if let Some(&b) = self.in_memo.get(&(t, s, d)) {
            return Ok(b);
        }
        let found = self.derives(t, s, Level::Stratum(d))?;
        self.in_memo.insert((t, s, d), found);
        Ok(found)
    }

    /// Whether `t` is in the set at all: any depth, any name.
    pub(crate) fn recognize(&mut self, t: ObjId, s: usize) -> Result<bool> {
        let key = (t, s);
        if self.rec_yes.contains(&key) {
            return Ok(true);
        }
        if self.rec_no.contains(&key) {
            return Ok(false);
        }
        if !self.rec_stack.insert(key) {
            self.cutoffs += 1;
            return Ok(false);
        }
        let before = self.cutoffs;
        let found = self.derives(t, s, Level::Any);
        self.rec_stack.remove(&key);
        let found = found?;
        if found {
            self.rec_yes.insert(key);
        } else if self.cutoffs == before {
            self.rec_no.insert(key);
        }
        Ok(found)
    }

    fn derives(&mut self, t: ObjId, s: usize, lv: Level) -> Result<bool> {
        let alts = self.g.sets[s].alts.clone();
        for alt in &alts {
            for env in self.matches(alt.template, t)?.iter() {
                if self.admits(alt, env, s, lv, t)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn admits(&mut self, alt: &Alt, env: &Env, owner: usize, lv: Level, t: ObjId) -> Result<bool> {
        let mut env = env.clone();
        let mut open = Vec::new();
        for &m in &alt.metas {
            match env.get(m) {
                Some(v) => {
                    if !self.sort_ok(m, v, owner, lv)? {
                        return Ok(false);
                    }
                }
                None => open.push(m),
            }
        }
        if !open.is_empty() {
            // Metavariables fixed by neither the object nor the template
            // range over their name pools.
            let mut envs = alloc::vec![env];
            for m in open {
                let Sort::Group(g) = self.u.meta_sort(m) else {
                    return Err(Error::Unsupported("set metavariable occurring only in a condition"));
                };
                let names = match lv {
                    Level::Any => return Err(Error::Unsupported("unbounded name search in a condition")),
                    Level::Stratum(_) => self.pool(g)?,
                };
                envs = envs.into_iter().flat_map(|e| names.iter().map(move |n| e.clone().with(m, *n))).collect();
            }
            for e in envs {
                if self.eval(&alt.cond, &e, lv, owner)? == Truth::True && self.rebuilds(alt.template, &e, t)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        env = env.clone();
        Ok(self.eval(&alt.cond, &env, lv, owner)? == Truth::True && self.rebuilds(alt.template, &env, t)?)
    }

    fn rebuilds(&mut self, template: ObjId, env: &Env, t: ObjId) -> Result<bool> {
        match self.u.instantiate(template, env) {
            Ok(v) => Ok(v == t),
            Err(e) if skippable(&e) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub(crate) fn sort_ok(&mut self, m: MetaId, v: ObjId, owner: usize, lv: Level) -> Result<bool> {
        match self.u.meta_sort(m) {
            Sort::Any => Ok(true),
            Sort::Group(g) => Ok(match self.u.name_info(v) {
                Some((g2, i)) => g2 == g && (lv == Level::Any || i < self.fresh),
                None => false,
            }),
            Sort::Set(s) => match lv {
                Level::Stratum(d) => self.in_stratum(v, s, Self::depth_for(owner, s, d)),
                Level::Any => self.recognize(v, s),
            },
        }
    }

    pub(crate) fn matches(&mut self, template: ObjId, t: ObjId) -> Result<Rc<Vec<Env>>> {
        if let Some(v) = self.match_memo.get(&(template, t)) {
            return Ok(v.clone());
        }
        let envs = Rc::new(self.u.match_t(template, t, MatchMode::SEMANTIC)?);
        self.match_memo.insert((template, t), envs.clone());
        Ok(envs)
    }

    fn inst(&mut self, t: ObjId, env: &Env) -> Result<Option<ObjId>> {
        match self.u.instantiate(t, env) {
            Ok(v) => Ok(Some(v)),
            Err(e) if skippable(&e) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Evaluates a side condition; `owner` is the set whose alternative
    /// carries it.
    pub(crate) fn eval(&mut self, c: &Cond, env: &Env, lv: Level, owner: usize) -> Result<Truth> {
        Ok(match c {
            Cond::True => Truth::True,
            Cond::False => Truth::False,
            Cond::In(t, set) => {
                let s = self.g.set_index(set)?;
                let Some(v) = self.inst(*t, env)? else { return Ok(Truth::False) };
                match lv {
                    Level::Any => Truth::from_bool(self.recognize(v, s)?),
                    Level::Stratum(d) => {
                        if self.in_stratum(v, s, Self::depth_for(owner, s, d))? {
                            Truth::True
                        } else if !self.recognize(v, s)? {
                            Truth::False
                        } else {
                            Truth::Unknown
                        }
                    }
                }
            }
            Cond::NotIn(t, set) => !self.eval(&Cond::In(*t, set.clone()), env, lv, owner)?,
            Cond::Eq(a, b) | Cond::Neq(a, b) => {
                let (Some(x), Some(y)) = (self.inst(*a, env)?, self.inst(*b, env)?) else { return Ok(Truth::False) };
                let same = Truth::from_bool(x == y);
                if matches!(c, Cond::Eq(..)) {
                    same
                } else {
                    !same
                }
            }
            Cond::FreeIn(x, t) | Cond::NotFreeIn(x, t) => {
                let (Some(x), Some(t)) = (self.inst(*x, env)?, self.inst(*t, env)?) else { return Ok(Truth::False) };
                if !self.u.is_name(x) {
                    return Err(Error::IllTypedCondition("free-in needs a name on the left"));
                }
                let free = Truth::from_bool(self.u.free_names(t)?.contains(&x));
                if matches!(c, Cond::FreeIn(..)) {
                    free
                } else {
                    !free
                }
            }
            Cond::LabIn(l, r) | Cond::NotLabIn(l, r) => {
                let (Some(l), Some(r)) = (self.inst(*l, env)?, self.inst(*r, env)?) else { return Ok(Truth::False) };
                let has = Truth::from_bool(labels(&self.u, r).contains(&l));
                if matches!(c, Cond::LabIn(..)) {
                    has
                } else {
                    !has
                }
            }
            Cond::And(a, b) => {
                let x = self.eval(a, env, lv, owner)?;
                if x == Truth::False {
                    return Ok(x);
                }
                x.and(self.eval(b, env, lv, owner)?)
            }
            Cond::Or(a, b) => {
                let x = self.eval(a, env, lv, owner)?;
                if x == Truth::True {
                    return Ok(x);
                }
                x.or(self.eval(b, env, lv, owner)?)
            }
            Cond::Not(a) => !self.eval(a, env, lv, owner)?,
        })
    }

    /// Membership of `t` in stratum `depth` of the named set.
    pub fn member(&mut self, t: ObjId, set: &str, depth: usize) -> Result<Membership> {
        self.sync();
        let s = self.g.set_index(set)?;
        let t = self.u.canonical(t)?;
        if self.in_stratum(t, s, depth)? {
            return Ok(Membership::Yes);
        }
        if matches!(self.stable_at, Some(k) if k <= depth) || !self.recognize(t, s)? {
            return Ok(Membership::No);
        }
        Ok(Membership::UnknownAtDepth)
    }

    /// Whether `t` belongs to the named set at some depth.
    pub fn derivable(&mut self, t: ObjId, set: &str) -> Result<bool> {
        self.sync();
        let s = self.g.set_index(set)?;
        let t = self.u.canonical(t)?;
        self.recognize(t, s)
    }

    /// Truth of a condition under an environment, at the given stratum of
    /// the set `owner`, or unbounded when `depth` is `None`.
    pub fn condition(&mut self, c: &Cond, env: &Env, owner: &str, depth: Option<usize>) -> Result<Truth> {
        self.sync();
        let s = self.g.set_index(owner)?;
        let lv = depth.map_or(Level::Any, Level::Stratum);
        self.eval(c, env, lv, s)
    }
}

struct Walk<'a> {
    alt: &'a Alt,
    owner: usize,
    r: usize,
    domains: &'a [Vec<ObjId>],
    ready: usize,
    out: &'a mut Vec<ObjId>,
    seen: &'a mut HashSet<ObjId>,
    budget: &'a mut usize,
}

/// Instantiation failures that just mean the alternative yields nothing.
pub(crate) fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::SubstUndefined | Error::ArityMismatch { .. } | Error::OpaqueClassDescent | Error::IllFormed(_) | Error::UndefinedFreeNames | Error::NotAName
    )
}
