//! Templates: objects with metavariable placeholders, instantiated under an
//! environment or matched against objects to produce environments.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::names::GroupId;
use crate::term::{Arrangement, Item, ObjId, Sym};
use crate::universe::{Universe, RESERVED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaId(pub(crate) u32);

/// What a metavariable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Any,
    Group(GroupId),
    /// A declared set, by the grammar's index.
    Set(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Meta {
    pub(crate) name: String,
    pub(crate) base: String,
    pub(crate) sort: Sort,
    pub(crate) object: ObjId,
}

#[derive(Debug, Clone)]
pub(crate) enum Computed {
    Fill { target: ObjId, args: Vec<ObjId> },
    Subst { body: ObjId, var: ObjId, repl: ObjId },
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Placeholder {
    Meta(MetaId),
    Computed(usize),
}

/// Metavariable assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Env {
    pairs: Vec<(MetaId, ObjId)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn get(&self, m: MetaId) -> Option<ObjId> {
        self.pairs.iter().find(|(k, _)| *k == m).map(|(_, v)| *v)
    }

    pub fn bind(&mut self, m: MetaId, v: ObjId) {
        match self.pairs.iter_mut().find(|(k, _)| *k == m) {
            Some(p) => p.1 = v,
            None => self.pairs.push((m, v)),
        }
    }

    pub fn with(mut self, m: MetaId, v: ObjId) -> Env {
        self.bind(m, v);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (MetaId, ObjId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// How matching treats objects: `canon` compares and binds canonical ids,
/// `modulo` also tries the other arrangements of a class under schemas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchMode {
    pub canon: bool,
    pub modulo: bool,
}

impl MatchMode {
    pub const RAW: MatchMode = MatchMode { canon: false, modulo: false };
    pub const SEMANTIC: MatchMode = MatchMode { canon: true, modulo: true };
}

const CLASS_BOUND: usize = 128;

impl Universe {
    /// The metavariable called `name` (e.g. `e1`), ranging by default over
    /// anything; `base` (e.g. `e`) is what sorts are resolved by.
    pub fn meta(&mut self, name: &str, base: &str) -> MetaId {
        if let Some(i) = self.metas.iter().position(|m| m.name == name) {
            return MetaId(i as u32);
        }
        let id = MetaId(self.metas.len() as u32);
        let s = self.sym_unchecked(&format!("{RESERVED}m{}", id.0));
        self.placeholders.insert(s, Placeholder::Meta(id));
        let object = self.intern_raw(Arrangement::sym(s));
        self.metas.push(Meta { name: name.into(), base: base.into(), sort: Sort::Any, object });
        id
    }

    pub fn meta_object(&self, m: MetaId) -> ObjId {
        self.metas[m.0 as usize].object
    }

    pub fn meta_name(&self, m: MetaId) -> &str {
        &self.metas[m.0 as usize].name
    }

    pub fn meta_base(&self, m: MetaId) -> &str {
        &self.metas[m.0 as usize].base
    }

    pub fn meta_sort(&self, m: MetaId) -> Sort {
        self.metas[m.0 as usize].sort
    }

    pub fn set_meta_sort(&mut self, m: MetaId, sort: Sort) {
        self.metas[m.0 as usize].sort = sort;
    }

    pub fn all_metas(&self) -> impl Iterator<Item = MetaId> {
        (0..self.metas.len() as u32).map(MetaId)
    }

    fn placeholder(&self, id: ObjId) -> Option<Placeholder> {
        match self.arrangement(id).items() {
            [Item::Sym(s)] if !id.is_hole() => self.placeholders.get(s).copied(),
            _ => None,
        }
    }

    pub fn meta_of(&self, id: ObjId) -> Option<MetaId> {
        match self.placeholder(id)? {
            Placeholder::Meta(m) => Some(m),
            Placeholder::Computed(_) => None,
        }
    }

    fn computed_object(&mut self, c: Computed) -> ObjId {
        let k = self.computed.len();
        self.computed.push(c);
        let s: Sym = self.sym_unchecked(&format!("{RESERVED}c{k}"));
        self.placeholders.insert(s, Placeholder::Computed(k));
        self.intern_raw(Arrangement::sym(s))
    }

    /// Template for `target⟨args⟩`, computed on instantiation.
    pub fn fill_template(&mut self, target: ObjId, args: Vec<ObjId>) -> ObjId {
        self.computed_object(Computed::Fill { target, args })
    }

    /// Template for `body[var := repl]`, computed on instantiation.
    pub fn subst_template(&mut self, body: ObjId, var: ObjId, repl: ObjId) -> ObjId {
        self.computed_object(Computed::Subst { body, var, repl })
    }

    /// Metavariables of a template, in order of first occurrence.
    pub fn metas_in(&self, t: ObjId) -> Vec<MetaId> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.metas_rec(t, &mut out, &mut seen);
        out
    }

    fn metas_rec(&self, t: ObjId, out: &mut Vec<MetaId>, seen: &mut HashSet<ObjId>) {
        if t.is_hole() || !self.has_meta(t) || !seen.insert(t) {
            return;
        }
        match self.placeholder(t) {
            Some(Placeholder::Meta(m)) => {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            Some(Placeholder::Computed(k)) => match self.computed[k].clone() {
                Computed::Fill { target, args } => {
                    self.metas_rec(target, out, seen);
                    for a in args {
                        self.metas_rec(a, out, seen);
                    }
                }
                Computed::Subst { body, var, repl } => {
                    for x in [body, var, repl] {
                        self.metas_rec(x, out, seen);
                    }
                }
            },
            None => {
                for k in self.arrangement(t).objs() {
                    self.metas_rec(k, out, seen);
                }
            }
        }
    }

    /// Number of occurrences of a metavariable.
    pub fn count_meta(&self, t: ObjId, m: MetaId) -> usize {
        if t.is_hole() || !self.has_meta(t) {
            return 0;
        }
        match self.placeholder(t) {
            Some(Placeholder::Meta(x)) => usize::from(x == m),
            Some(Placeholder::Computed(k)) => match &self.computed[k] {
                Computed::Fill { target, args } => {
                    self.count_meta(*target, m) + args.iter().map(|a| self.count_meta(*a, m)).sum::<usize>()
                }
                Computed::Subst { body, var, repl } => [*body, *var, *repl].iter().map(|x| self.count_meta(*x, m)).sum(),
            },
            None => self.arrangement(t).objs().into_iter().map(|k| self.count_meta(k, m)).sum(),
        }
    }

    /// Gives each occurrence of `m` its own metavariable `name#k`
    /// (k = 1, 2, ... in fill order), with the same base and sort.
    pub fn split_meta_occurrences(&mut self, t: ObjId, m: MetaId) -> Result<ObjId> {
        let mut k = 0usize;
        self.split_rec(t, m, &mut k)
    }

    fn split_rec(&mut self, t: ObjId, m: MetaId, k: &mut usize) -> Result<ObjId> {
        if t.is_hole() || !self.has_meta(t) {
            return Ok(t);
        }
        match self.placeholder(t) {
            Some(Placeholder::Meta(x)) if x == m => {
                *k += 1;
                let name = format!("{}#{}", self.meta_name(m), k);
                let base = String::from(self.meta_base(m));
                let sort = self.meta_sort(m);
                let n = self.meta(&name, &base);
                self.set_meta_sort(n, sort);
                Ok(self.meta_object(n))
            }
            Some(Placeholder::Meta(_)) => Ok(t),
            Some(Placeholder::Computed(c)) => match self.computed[c].clone() {
                Computed::Fill { target, args } => {
                    let target = self.split_rec(target, m, k)?;
                    let mut out = Vec::new();
                    for a in args {
                        out.push(self.split_rec(a, m, k)?);
                    }
                    Ok(self.fill_template(target, out))
                }
                Computed::Subst { body, var, repl } => {
                    let body = self.split_rec(body, m, k)?;
                    let var = self.split_rec(var, m, k)?;
                    let repl = self.split_rec(repl, m, k)?;
                    Ok(self.subst_template(body, var, repl))
                }
            },
            None => {
                let arr = self.arrangement(t).clone();
                let arr = arr.try_map_objs(&mut |o| self.split_rec(o, m, k))?;
                self.make_object(arr)
            }
        }
    }

    /// Evaluates a template.
    pub fn instantiate(&mut self, t: ObjId, env: &Env) -> Result<ObjId> {
        let alpha = self.alpha;
        self.instantiate_mode(t, env, alpha)
    }

    pub(crate) fn instantiate_mode(&mut self, t: ObjId, env: &Env, alpha: bool) -> Result<ObjId> {
        let mut memo = HashMap::new();
        self.inst_rec(t, env, Some(alpha), &mut memo)
    }

    /// Evaluates a template without canonicalizing the result.
    pub(crate) fn instantiate_raw(&mut self, t: ObjId, env: &Env) -> Result<ObjId> {
        let mut memo = HashMap::new();
        self.inst_rec(t, env, None, &mut memo)
    }

    fn inst_rec(&mut self, t: ObjId, env: &Env, alpha: Option<bool>, memo: &mut HashMap<ObjId, ObjId>) -> Result<ObjId> {
        if t.is_hole() || !self.has_meta(t) {
            return Ok(t);
        }
        if let Some(v) = memo.get(&t) {
            return Ok(*v);
        }
        let v = match self.placeholder(t) {
            Some(Placeholder::Meta(m)) => {
                env.get(m).ok_or_else(|| Error::UnboundMetavariable(self.meta_name(m).into()))?
            }
            Some(Placeholder::Computed(k)) => {
                if alpha.is_none() {
                    return Err(Error::Unsupported("computed templates in equivalence schemas"));
                }
                match self.computed[k].clone() {
                    Computed::Fill { target, args } => {
                        let target = self.inst_rec(target, env, alpha, memo)?;
                        let mut vals = Vec::with_capacity(args.len());
                        for a in args {
                            vals.push(self.inst_rec(a, env, alpha, memo)?);
                        }
                        self.fill(target, &vals)?
                    }
                    Computed::Subst { body, var, repl } => {
                        let body = self.inst_rec(body, env, alpha, memo)?;
                        let var = self.inst_rec(var, env, alpha, memo)?;
                        let repl = self.inst_rec(repl, env, alpha, memo)?;
                        self.substitute(body, var, repl)?
                    }
                }
            }
            None => {
                let arr = self.arrangement(t).clone();
                let arr = arr.try_map_objs(&mut |o| self.inst_rec(o, env, alpha, memo))?;
                match alpha {
                    Some(a) => self.make_object_mode(arr, a)?,
                    None => {
                        if arr.as_bare_pointer().is_some() {
                            return Err(Error::IllFormed("an object cannot be a bare pointer"));
                        }
                        self.intern_raw(arr)
                    }
                }
            }
        };
        memo.insert(t, v);
        Ok(v)
    }

    fn all_bound(&self, t: ObjId, env: &Env) -> bool {
        self.metas_in(t).iter().all(|m| env.get(*m).is_some())
    }

    /// All environments extending the empty one under which `t`
    /// instantiates to `o`. Set sorts are not checked here.
    pub fn match_t(&mut self, t: ObjId, o: ObjId, mode: MatchMode) -> Result<Vec<Env>> {
        self.match_env(t, o, Env::new(), mode)
    }

    pub fn match_env(&mut self, t: ObjId, o: ObjId, env: Env, mode: MatchMode) -> Result<Vec<Env>> {
        let mut out = Vec::new();
        self.match_rec(t, o, env, mode, &mut out)?;
        Ok(out)
    }

    fn same(&mut self, a: ObjId, b: ObjId, mode: MatchMode) -> Result<bool> {
        if mode.canon {
            self.equal(a, b)
        } else {
            Ok(a == b)
        }
    }

    fn match_rec(&mut self, t: ObjId, o: ObjId, env: Env, mode: MatchMode, out: &mut Vec<Env>) -> Result<()> {
        let o = if mode.canon { self.canonical(o)? } else { o };
        if t.is_hole() || !self.has_meta(t) {
            if self.same(t, o, mode)? {
                out.push(env);
            }
            return Ok(());
        }
        match self.placeholder(t) {
            Some(Placeholder::Meta(m)) => {
                if let Some(v) = env.get(m) {
                    if self.same(v, o, mode)? {
                        out.push(env);
                    }
                    return Ok(());
                }
                let ok = match self.meta_sort(m) {
                    Sort::Group(g) => matches!(self.name_info(o), Some((h, _)) if h == g),
                    Sort::Any | Sort::Set(_) => true,
                };
                if ok {
                    out.push(env.with(m, o));
                }
                Ok(())
            }
            Some(Placeholder::Computed(k)) => {
                if self.all_bound(t, &env) {
                    match self.instantiate(t, &env) {
                        Ok(v) if self.same(v, o, mode)? => out.push(env),
                        _ => {}
                    }
                    return Ok(());
                }
                match self.computed[k].clone() {
                    Computed::Fill { target, args } if args.len() == 1 => {
                        let splits = self.one_hole_splits(o)?;
                        for (ctx, sub) in splits.iter() {
                            for e1 in self.match_env(target, *ctx, env.clone(), mode)? {
                                self.match_rec(args[0], *sub, e1, mode, out)?;
                            }
                        }
                        Ok(())
                    }
                    Computed::Fill { .. } => Err(Error::Unsupported("matching a fill with several unknown arguments")),
                    Computed::Subst { .. } => Err(Error::Unsupported("matching a substitution with unknown parts")),
                }
            }
            None => {
                if o.is_hole() {
                    return Ok(());
                }
                let cands = if mode.modulo && !self.schemas.is_empty() {
                    self.class_members(o, CLASS_BOUND)?
                } else {
                    alloc::vec![o]
                };
                let ta = self.arrangement(t).clone();
                let start = out.len();
                for c in cands {
                    let oa = self.arrangement(c).clone();
                    for e in self.match_arr(&ta, &oa, alloc::vec![env.clone()], mode)? {
                        if !out[start..].contains(&e) {
                            out.push(e);
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn match_arr(&mut self, ta: &Arrangement, oa: &Arrangement, envs: Vec<Env>, mode: MatchMode) -> Result<Vec<Env>> {
        if ta.len() != oa.len() {
            return Ok(Vec::new());
        }
        let mut envs = envs;
        for (ti, oi) in ta.items().iter().zip(oa.items()) {
            if envs.is_empty() {
                break;
            }
            envs = match (ti, oi) {
                (Item::Sym(a), Item::Sym(b)) if a == b => envs,
                (Item::Nat(a), Item::Nat(b)) if a == b => envs,
                (Item::Obj(a), Item::Obj(b)) => {
                    let mut next = Vec::new();
                    for e in envs {
                        self.match_rec(*a, *b, e, mode, &mut next)?;
                    }
                    next
                }
                (Item::Deco(k1, a), Item::Deco(k2, b)) if k1 == k2 => self.match_arr(a, b, envs, mode)?,
                (Item::Scripted(a, sa), Item::Scripted(b, sb)) if sa.len() == sb.len() => {
                    let mut e = self.match_arr(a, b, envs, mode)?;
                    for ((p1, x), (p2, y)) in sa.iter().zip(sb.iter()) {
                        if p1 != p2 {
                            e.clear();
                            break;
                        }
                        e = self.match_arr(x, y, e, mode)?;
                    }
                    e
                }
                _ => Vec::new(),
            };
        }
        Ok(envs)
    }
}
