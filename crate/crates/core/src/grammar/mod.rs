//! Production rules and their least-fixed-point reading.
//!
//! Rules are collected in document order and elaborated once: a rule
//! that starts with `...` (or a stream of single-alternative rules) adds
//! to the alternatives in force, an `override` rule replaces them. The
//! sets are then evaluated as depth-indexed strata of a Kleene iteration.

mod cond;
mod engine;
mod rel;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::names::GroupId;
use crate::pattern::{MetaId, Sort};
use crate::term::ObjId;
use crate::universe::Universe;

pub use cond::Truth;
pub use engine::{Engine, Membership, DEFAULT_STRATUM_CAP};
pub use rel::RelStepper;

/// Side condition over templates. Set references are by name (or by the
/// base of a metavariable ranging over the set) and resolved when
/// evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    True,
    False,
    In(ObjId, String),
    NotIn(ObjId, String),
    Eq(ObjId, ObjId),
    Neq(ObjId, ObjId),
    /// Name is free in the object.
    FreeIn(ObjId, ObjId),
    NotFreeIn(ObjId, ObjId),
    /// Label occurs in the field list.
    LabIn(ObjId, ObjId),
    NotLabIn(ObjId, ObjId),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

impl Cond {
    pub fn and(a: Cond, b: Cond) -> Cond {
        match (a, b) {
            (Cond::True, c) | (c, Cond::True) => c,
            (a, b) => Cond::And(Box::new(a), Box::new(b)),
        }
    }

    /// Templates mentioned by the condition.
    pub fn templates(&self, out: &mut Vec<ObjId>) {
        match self {
            Cond::True | Cond::False => {}
            Cond::In(t, _) | Cond::NotIn(t, _) => out.push(*t),
            Cond::Eq(a, b) | Cond::Neq(a, b) | Cond::FreeIn(a, b) | Cond::NotFreeIn(a, b) | Cond::LabIn(a, b) | Cond::NotLabIn(a, b) => {
                out.push(*a);
                out.push(*b);
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.templates(out);
                b.templates(out);
            }
            Cond::Not(a) => a.templates(out),
        }
    }

    pub fn metas(&self, u: &Universe) -> Vec<MetaId> {
        let mut ts = Vec::new();
        self.templates(&mut ts);
        let mut out = Vec::new();
        for t in ts {
            for m in u.metas_in(t) {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub template: ObjId,
    pub cond: Cond,
}

/// One production rule as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDecl {
    pub name: String,
    /// Metavariable bases declared to range over the set.
    pub metavars: Vec<String>,
    pub alternatives: Vec<Alternative>,
    /// First alternative is `...`: add to the alternatives in force.
    pub merge: bool,
    /// Last alternative is `...`; informational only.
    pub open_end: bool,
    /// Conjoined to every alternative of this rule.
    pub global: Option<Cond>,
    /// Replace the alternatives in force.
    pub replace: bool,
}

impl SetDecl {
    pub fn new(name: &str, metavars: &[&str]) -> SetDecl {
        SetDecl {
            name: name.into(),
            metavars: metavars.iter().map(|s| (*s).into()).collect(),
            alternatives: Vec::new(),
            merge: false,
            open_end: false,
            global: None,
            replace: false,
        }
    }

    pub fn alt(mut self, template: ObjId) -> SetDecl {
        self.alternatives.push(Alternative { template, cond: Cond::True });
        self
    }

    pub fn alt_if(mut self, template: ObjId, cond: Cond) -> SetDecl {
        self.alternatives.push(Alternative { template, cond });
        self
    }
}

/// How repeated undecorated metavariables of a rule's own set are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decorate {
    /// Each occurrence ranges independently.
    #[default]
    Distinct,
    /// Occurrences denote the same object.
    Linked,
}

/// Elaboration settings outside the rules themselves.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub decorate: Decorate,
    /// Metavariable bases ranging over a name group.
    pub aliases: Vec<(String, GroupId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelRule {
    pub pattern: ObjId,
    pub template: ObjId,
    pub cond: Cond,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelDecl {
    pub name: String,
    pub rules: Vec<RelRule>,
    /// Close under every one-hole context mapping this set into itself.
    pub carrier: Option<String>,
    /// Explicit congruence contexts: templates with one hole.
    pub contexts: Vec<ObjId>,
}

#[derive(Debug, Clone)]
pub(crate) struct Alt {
    pub(crate) template: ObjId,
    pub(crate) cond: Cond,
    /// Template metavariables first, then those only in the condition.
    pub(crate) metas: Vec<MetaId>,
}

#[derive(Debug, Clone)]
pub(crate) struct SetInfo {
    pub(crate) name: String,
    pub(crate) alts: Vec<Alt>,
}

/// Elaborated rules: the alternatives in force for each set, in order of
/// first declaration.
#[derive(Debug, Clone, Default)]
pub struct Grammar {
    pub(crate) sets: Vec<SetInfo>,
    pub(crate) by_name: HashMap<String, usize>,
    pub(crate) by_metavar: HashMap<String, usize>,
    pub(crate) rels: Vec<RelDecl>,
}

impl Grammar {
    /// Applies the rules in order.
    pub fn elaborate(u: &mut Universe, rules: &[SetDecl], rels: &[RelDecl], opts: &Options) -> Result<Grammar> {
        let mut g = Grammar::default();
        let mut single_only: Vec<bool> = Vec::new();
        let mut pending: Vec<Vec<Alternative>> = Vec::new();
        for r in rules {
            let (idx, first) = match g.by_name.get(&r.name) {
                Some(&i) => (i, false),
                None => {
                    let i = g.sets.len();
                    g.sets.push(SetInfo { name: r.name.clone(), alts: Vec::new() });
                    g.by_name.insert(r.name.clone(), i);
                    single_only.push(true);
                    pending.push(Vec::new());
                    (i, true)
                }
            };
            for mv in &r.metavars {
                g.by_metavar.insert(mv.clone(), idx);
            }
            let mut own: Vec<&str> = g.by_metavar.iter().filter(|(_, i)| **i == idx).map(|(m, _)| m.as_str()).collect();
            own.sort_unstable();
            let alts = decorate_rule(u, r, &own, opts.decorate)?;
            if first {
                pending[idx] = alts;
                single_only[idx] = r.alternatives.len() <= 1;
            } else if r.merge || (single_only[idx] && r.alternatives.len() <= 1 && !r.replace) {
                pending[idx].extend(alts);
            } else if r.replace {
                pending[idx] = alts;
                single_only[idx] = r.alternatives.len() <= 1;
            } else {
                return Err(Error::DuplicateSetName(r.name.clone()));
            }
        }
        for (i, alts) in pending.into_iter().enumerate() {
            for a in alts {
                let mut metas = u.metas_in(a.template);
                for m in a.cond.metas(u) {
                    if !metas.contains(&m) {
                        metas.push(m);
                    }
                }
                g.sets[i].alts.push(Alt { template: a.template, cond: a.cond, metas });
            }
        }
        let mut merged: Vec<RelDecl> = Vec::new();
        for r in rels {
            match merged.iter_mut().find(|m| m.name == r.name) {
                Some(m) => {
                    m.rules.extend(r.rules.iter().cloned());
                    m.contexts.extend(r.contexts.iter().copied());
                    if r.carrier.is_some() {
                        m.carrier = r.carrier.clone();
                    }
                }
                None => merged.push(r.clone()),
            }
        }
        g.rels = merged;
        g.resolve_sorts(u, &opts.aliases)?;
        Ok(g)
    }

    /// Sorts for every metavariable the rules mention: a set when some rule
    /// declares its base, a name group when its base names one, and
    /// otherwise a presumed-fresh family of its own.
    fn resolve_sorts(&self, u: &mut Universe, aliases: &[(String, GroupId)]) -> Result<()> {
        let mut templates = Vec::new();
        for s in &self.sets {
            for a in &s.alts {
                templates.push(a.template);
                a.cond.templates(&mut templates);
            }
        }
        for r in &self.rels {
            for rule in &r.rules {
                templates.push(rule.pattern);
                templates.push(rule.template);
                rule.cond.templates(&mut templates);
            }
            templates.extend(r.contexts.iter().copied());
        }
        let mut seen = Vec::new();
        for t in templates {
            for m in u.metas_in(t) {
                if !seen.contains(&m) {
                    seen.push(m);
                }
            }
        }
        for m in seen {
            let base = String::from(u.meta_base(m));
            let sort = match self.by_metavar.get(&base) {
                Some(&i) if i != usize::MAX => Sort::Set(i),
                _ => match aliases.iter().find(|(a, _)| *a == base).map(|(_, g)| *g).or_else(|| u.group(&base)) {
                    Some(g) => Sort::Group(g),
                    None => Sort::Group(u.implicit_group(&base)?),
                },
            };
            u.set_meta_sort(m, sort);
        }
        Ok(())
    }

    pub fn set_names(&self) -> impl Iterator<Item = &str> {
        self.sets.iter().map(|s| s.name.as_str())
    }

    /// Index of a set by name, or by a metavariable ranging over it.
    pub fn set_index(&self, name: &str) -> Result<usize> {
        if let Some(&i) = self.by_name.get(name) {
            return Ok(i);
        }
        match self.by_metavar.get(name) {
            Some(&i) if i != usize::MAX => Ok(i),
            _ => Err(Error::UnknownSet(name.into())),
        }
    }

    pub fn set_name(&self, i: usize) -> &str {
        &self.sets[i].name
    }

    pub fn alternatives(&self, i: usize) -> impl Iterator<Item = (ObjId, &Cond)> {
        self.sets[i].alts.iter().map(|a| (a.template, &a.cond))
    }

    pub fn relations(&self) -> &[RelDecl] {
        &self.rels
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|r| r.name == name)
    }
}

/// Applies the global condition and gives repeated undecorated
/// occurrences of the rule's own metavariables distinct decorations when
/// every alternative uses them undecorated and no condition of the
/// alternative mentions them.
/// `own` lists every metavariable base ranging over the rule's set.
fn decorate_rule(u: &mut Universe, r: &SetDecl, own: &[&str], mode: Decorate) -> Result<Vec<Alternative>> {
    let mut out = Vec::new();
    for a in &r.alternatives {
        let cond = match &r.global {
            Some(g) => Cond::and(a.cond.clone(), g.clone()),
            None => a.cond.clone(),
        };
        out.push(Alternative { template: a.template, cond });
    }
    if mode == Decorate::Linked {
        return Ok(out);
    }
    for &base in own {
        let mut undecorated_only = true;
        for a in &r.alternatives {
            for m in u.metas_in(a.template) {
                if u.meta_base(m) == base && u.meta_name(m) != base {
                    undecorated_only = false;
                }
            }
        }
        if !undecorated_only {
            continue;
        }
        for a in out.iter_mut() {
            let Some(m) = u.metas_in(a.template).into_iter().find(|m| u.meta_name(*m) == base) else { continue };
            if u.count_meta(a.template, m) < 2 || a.cond.metas(u).contains(&m) {
                continue;
            }
            a.template = u.split_meta_occurrences(a.template, m)?;
        }
    }
    Ok(out)
}
