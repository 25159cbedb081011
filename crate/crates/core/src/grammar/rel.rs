//! One-step relations given by rules, closed under contexts.

use alloc::vec::Vec;

use super::engine::{skippable, Engine, Level};
use super::RelDecl;
use crate::error::{Error, Result};
use crate::relation::{Rewrite, Stepper};
use crate::term::ObjId;

const SAMPLE_DEPTH: usize = 2;
const SAMPLES: usize = 8;

/// Steps of a named relation: its rules at the root, then inside every
/// context admitted by the relation's carrier or congruence contexts.
pub struct RelStepper<'e> {
    e: &'e mut Engine,
    rel: usize,
}

impl<'e> RelStepper<'e> {
    pub fn new(e: &'e mut Engine, name: &str) -> Result<RelStepper<'e>> {
        let rel = e.g.relation_index(name).ok_or_else(|| Error::UnknownRelation(name.into()))?;
        Ok(RelStepper { e, rel })
    }

    pub fn engine(&mut self) -> &mut Engine {
        self.e
    }
}

impl Stepper for RelStepper<'_> {
    fn step(&mut self, t: ObjId) -> Result<Vec<Rewrite>> {
        self.e.sync();
        let t = self.e.u.canonical(t)?;
        let decl = self.e.g.rels[self.rel].clone();
        self.e.rel_step(&decl, t)
    }
}

impl Engine {
    pub(crate) fn rel_step(&mut self, decl: &RelDecl, t: ObjId) -> Result<Vec<Rewrite>> {
        let mut out: Vec<Rewrite> = Vec::new();
        let splits = self.u.one_hole_splits(t)?;
        for (c, s) in splits.iter() {
            let here = c.is_hole()
                || match &decl.carrier {
                    Some(set) => self.carrier_ok(*c, set)?,
                    None => false,
                };
            if !here {
                continue;
            }
            for (redex, contractum) in self.rel_base(decl, *s)? {
                let to = if c.is_hole() { contractum } else { self.u.fill(*c, &[contractum])? };
                push(&mut out, Rewrite { from: t, to, context: *c, redex, contractum });
            }
        }
        if decl.contexts.is_empty() {
            return Ok(out);
        }
        for (c, s) in splits.iter() {
            if c.is_hole() || !self.congruence(decl, *c)? {
                continue;
            }
            for r in self.rel_step(decl, *s)? {
                let to = self.u.fill(*c, &[r.to])?;
                let context = self.u.fill(*c, &[r.context])?;
                push(&mut out, Rewrite { from: t, to, context, redex: r.redex, contractum: r.contractum });
            }
        }
        Ok(out)
    }

    /// Root steps: `(redex, contractum)` pairs.
    fn rel_base(&mut self, decl: &RelDecl, s: ObjId) -> Result<Vec<(ObjId, ObjId)>> {
        let mut out = Vec::new();
        for rule in &decl.rules {
            let envs = self.matches(rule.pattern, s)?;
            for env in envs.iter() {
                if !self.env_sorts_ok(env)? || self.eval(&rule.cond, env, Level::Any, 0)? != super::Truth::True {
                    continue;
                }
                match self.u.instantiate(rule.template, env) {
                    Ok(v) => {
                        if !out.contains(&(s, v)) {
                            out.push((s, v));
                        }
                    }
                    Err(e) if skippable(&e) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }

    fn env_sorts_ok(&mut self, env: &crate::pattern::Env) -> Result<bool> {
        for (m, v) in env.iter() {
            if !self.sort_ok(m, v, 0, Level::Any)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn congruence(&mut self, decl: &RelDecl, c: ObjId) -> Result<bool> {
        for &ct in &decl.contexts {
            let envs = self.matches(ct, c)?;
            for env in envs.iter() {
                if self.env_sorts_ok(env)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Whether filling `c` with members of the set stays in the set, judged
    /// on a sample of the set's shallow members.
    fn carrier_ok(&mut self, c: ObjId, set: &str) -> Result<bool> {
        let s = self.g.set_index(set)?;
        if let Some(&b) = self.carrier_memo.get(&(c, s)) {
            return Ok(b);
        }
        self.recalculate(SAMPLE_DEPTH)?;
        let sample: Vec<ObjId> = self.enumerate(set, SAMPLE_DEPTH)?.into_iter().take(SAMPLES).collect();
        let mut ok = !sample.is_empty();
        for m in sample {
            let filled = match self.u.fill(c, &[m]) {
                Ok(v) => v,
                Err(e) if skippable(&e) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            if !self.recognize(filled, s)? {
                ok = false;
                break;
            }
        }
        self.carrier_memo.insert((c, s), ok);
        Ok(ok)
    }
}

fn push(out: &mut Vec<Rewrite>, r: Rewrite) {
    if !out.iter().any(|x| x.to == r.to && x.context == r.context && x.redex == r.redex) {
        out.push(r);
    }
}

