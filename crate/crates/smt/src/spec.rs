//! The spec language: a document of `;`-terminated statements read in
//! order.
//!
//! ```text
//! names x (v);
//! constructor [] [] prec 20 assoc left;
//! constructor \ [] . [] prec 10;
//! binder \ [] . [] binds 1 in {1, 2};
//! modulo alpha;
//! set exp (e) ::= x | \ x . e | e e;
//! rel beta on exp: (\ x . e1) e2 => e1[x := e2];
//! ```
//!
//! Templates stay as token ranges until elaboration, since what they parse
//! to depends on the constructors declared before them.

use std::ops::Range;

use smt_core::{
    Assoc, Cond, Decorate, Engine, EquivAxiom, Error, Grammar, ObjId, Options, RelDecl, RelRule, Schema, SetDecl, Universe,
};

use crate::diag::{Diagnostic, Span};
use crate::lex::{lex, Tok, Token};
use crate::syntax::{Mode, Reader};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondSrc {
    True,
    False,
    In { term: Range<usize>, set: String, negated: bool },
    Eq { lhs: Range<usize>, rhs: Range<usize>, negated: bool },
    FreeIn { name: Range<usize>, term: Range<usize>, negated: bool },
    LabIn { label: Range<usize>, fields: Range<usize>, negated: bool },
    And(Box<CondSrc>, Box<CondSrc>),
    Or(Box<CondSrc>, Box<CondSrc>),
    Not(Box<CondSrc>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltSrc {
    pub template: Range<usize>,
    pub cond: Option<CondSrc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Names { base: String, aliases: Vec<String> },
    Constructor { pattern: Range<usize>, prec: Option<u32>, assoc: Option<Assoc> },
    Binder { pattern: Range<usize>, binder: usize, scope: Vec<usize> },
    ModuloAlpha,
    Equiv { lhs: Range<usize>, rhs: Range<usize>, orient: Option<(Range<usize>, Range<usize>)>, guard: Option<(String, String)> },
    Set { name: String, metavars: Vec<String>, alts: Vec<AltSrc>, merge: bool, open_end: bool, global: Option<CondSrc>, replace: bool },
    Rel { name: String, carrier: Option<String>, lhs: Range<usize>, rhs: Range<usize>, cond: Option<CondSrc> },
    Cong { name: String, context: Range<usize> },
    Decorate(Decorate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub stmt: Stmt,
    pub span: Span,
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    pub tokens: Vec<Token>,
    pub statements: Vec<Statement>,
}

const KEYWORDS: [&str; 11] = ["where", "if", "in", "notin", "and", "or", "orient", "when", "prec", "assoc", "binds"];

fn is_stop(t: &Tok) -> bool {
    match t {
        Tok::Punct(p) => matches!(p.as_str(), "|" | ";" | "=>" | "<=>" | "::=" | "==" | "!="),
        Tok::Ident(s) => KEYWORDS.contains(&s.as_str()),
        _ => false,
    }
}

struct P<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl P<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => t.span,
            None => Span { line: 1, col: 1, ..Span::default() },
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic::syntax(self.span(), msg))
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(s)) if s == p)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.is_kw(kw);
        self.pos += hit as usize;
        hit
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        self.pos += hit as usize;
        hit
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), Diagnostic> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn number(&mut self) -> Result<usize, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                let n = s.parse().map_err(|_| Diagnostic::syntax(self.span(), "number too large"))?;
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Nat(n)) => {
                let n = usize::try_from(n).map_err(|_| Diagnostic::syntax(self.span(), "number too large"))?;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    /// Token extent of a template: up to the next terminator outside
    /// brackets.
    fn template(&mut self, what: &str) -> Result<Range<usize>, Diagnostic> {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            match t {
                Tok::LParen | Tok::LBrack | Tok::LBrace | Tok::Group | Tok::Script(_) | Tok::Deco(_) => depth += 1,
                Tok::RParen | Tok::RBrack | Tok::RBrace => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                t if depth == 0 && is_stop(t) => break,
                _ => {}
            }
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(format!("expected {what}"));
        }
        Ok(start..self.pos)
    }

    fn list(&mut self, open: Tok, close: Tok, mut f: impl FnMut(&mut Self) -> Result<(), Diagnostic>) -> Result<(), Diagnostic> {
        if self.peek() != Some(&open) {
            return self.err("expected a list");
        }
        self.pos += 1;
        loop {
            f(self)?;
            if self.eat_punct(",") {
                continue;
            }
            if self.peek() == Some(&close) {
                self.pos += 1;
                return Ok(());
            }
            return self.err("expected `,` or the end of the list");
        }
    }

    fn cond(&mut self) -> Result<CondSrc, Diagnostic> {
        let mut c = self.cond_and()?;
        while self.eat_kw("or") {
            c = CondSrc::Or(Box::new(c), Box::new(self.cond_and()?));
        }
        Ok(c)
    }

    fn cond_and(&mut self) -> Result<CondSrc, Diagnostic> {
        let mut c = self.cond_not()?;
        while self.eat_kw("and") {
            c = CondSrc::And(Box::new(c), Box::new(self.cond_not()?));
        }
        Ok(c)
    }

    fn cond_not(&mut self) -> Result<CondSrc, Diagnostic> {
        if self.eat_kw("not") {
            return Ok(CondSrc::Not(Box::new(self.cond_not()?)));
        }
        let after = |p: &Self| p.toks.get(p.pos + 1).map(|t| &t.tok);
        let ends = |t: Option<&Tok>| t.is_none_or(|t| is_stop(t) && !matches!(t, Tok::Punct(p) if p == "==" || p == "!="));
        if self.is_kw("true") && ends(after(self)) {
            self.pos += 1;
            return Ok(CondSrc::True);
        }
        if self.is_kw("false") && ends(after(self)) {
            self.pos += 1;
            return Ok(CondSrc::False);
        }
        let lhs = self.template("a term")?;
        if self.eat_punct("==") || self.is_punct("!=") {
            let negated = self.eat_punct("!=");
            let rhs = self.template("a term")?;
            return Ok(CondSrc::Eq { lhs, rhs, negated });
        }
        let negated = if self.eat_kw("in") {
            false
        } else if self.eat_kw("notin") {
            true
        } else {
            return self.err("expected `in`, `notin`, `==` or `!=`");
        };
        for (kw, lab) in [("fv", false), ("lab", true)] {
            if self.is_kw(kw) && matches!(self.toks.get(self.pos + 1), Some(Token { tok: Tok::LParen, glued: true, .. })) {
                self.pos += 2;
                let inner = self.template("a term")?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                return Ok(if lab {
                    CondSrc::LabIn { label: lhs, fields: inner, negated }
                } else {
                    CondSrc::FreeIn { name: lhs, term: inner, negated }
                });
            }
        }
        let set = self.ident("a set name")?;
        Ok(CondSrc::In { term: lhs, set, negated })
    }

    fn statement(&mut self) -> Result<Stmt, Diagnostic> {
        let kw = self.ident("a statement keyword")?;
        let stmt = match kw.as_str() {
            "names" => {
                let base = self.ident("a name-group base")?;
                let mut aliases = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.list(Tok::LParen, Tok::RParen, |p| {
                        aliases.push(p.ident("a metavariable")?);
                        Ok(())
                    })?;
                }
                Stmt::Names { base, aliases }
            }
            "constructor" => {
                let pattern = self.template("a constructor pattern")?;
                let mut prec = None;
                let mut assoc = None;
                loop {
                    if self.eat_kw("prec") {
                        prec = Some(u32::try_from(self.number()?).map_err(|_| Diagnostic::syntax(self.span(), "precedence too large"))?);
                    } else if self.eat_kw("assoc") {
                        assoc = Some(match self.ident("left, right or none")?.as_str() {
                            "left" => Assoc::Left,
                            "right" => Assoc::Right,
                            "none" => Assoc::None,
                            _ => return self.err("expected left, right or none"),
                        });
                    } else {
                        break;
                    }
                }
                Stmt::Constructor { pattern, prec, assoc }
            }
            "binder" => {
                let pattern = self.template("a constructor pattern")?;
                if !self.eat_kw("binds") {
                    return self.err("expected `binds`");
                }
                let binder = self.number()?;
                if !self.eat_kw("in") {
                    return self.err("expected `in`");
                }
                let mut scope = Vec::new();
                self.list(Tok::LBrace, Tok::RBrace, |p| {
                    scope.push(p.number()?);
                    Ok(())
                })?;
                Stmt::Binder { pattern, binder, scope }
            }
            "modulo" => {
                if !self.eat_kw("alpha") {
                    return self.err("expected `alpha`");
                }
                Stmt::ModuloAlpha
            }
            "equiv" => {
                let lhs = self.template("a term")?;
                self.expect_punct("<=>")?;
                let rhs = self.template("a term")?;
                let mut orient = None;
                if self.eat_kw("orient") {
                    let from = self.template("a term")?;
                    self.expect_punct("=>")?;
                    orient = Some((from, self.template("a term")?));
                }
                let mut guard = None;
                if self.eat_kw("when") {
                    let a = self.ident("a metavariable")?;
                    self.expect_punct("<")?;
                    guard = Some((a, self.ident("a metavariable")?));
                }
                Stmt::Equiv { lhs, rhs, orient, guard }
            }
            "override" | "set" => {
                let replace = kw == "override";
                if replace && self.ident("`set`")? != "set" {
                    return self.err("expected `set`");
                }
                let name = self.ident("a set name")?;
                let mut metavars = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.list(Tok::LParen, Tok::RParen, |p| {
                        metavars.push(p.ident("a metavariable")?);
                        Ok(())
                    })?;
                }
                self.expect_punct("::=")?;
                let (mut merge, mut open_end) = (false, false);
                let mut alts = Vec::new();
                loop {
                    if self.eat_punct("...") {
                        if alts.is_empty() && !merge {
                            merge = true;
                        } else {
                            open_end = true;
                        }
                    } else {
                        let template = self.template("an alternative")?;
                        let cond = if self.eat_kw("where") { Some(self.cond()?) } else { None };
                        alts.push(AltSrc { template, cond });
                    }
                    if !self.eat_punct("|") {
                        break;
                    }
                }
                let global = if self.eat_kw("if") { Some(self.cond()?) } else { None };
                Stmt::Set { name, metavars, alts, merge, open_end, global, replace }
            }
            "rel" => {
                let name = self.ident("a relation name")?;
                let carrier = if self.eat_kw("on") { Some(self.ident("a set name")?) } else { None };
                self.expect_punct(":")?;
                let lhs = self.template("a pattern")?;
                self.expect_punct("=>")?;
                let rhs = self.template("a template")?;
                let cond = if self.eat_kw("where") { Some(self.cond()?) } else { None };
                Stmt::Rel { name, carrier, lhs, rhs, cond }
            }
            "cong" => {
                let name = self.ident("a relation name")?;
                self.expect_punct(":")?;
                Stmt::Cong { name, context: self.template("a context")? }
            }
            "decorate" => match self.ident("linked or distinct")?.as_str() {
                "linked" => Stmt::Decorate(Decorate::Linked),
                "distinct" => Stmt::Decorate(Decorate::Distinct),
                _ => return self.err("expected linked or distinct"),
            },
            other => return Err(Diagnostic::syntax(self.toks[self.pos - 1].span, format!("unknown statement `{other}`"))),
        };
        if !self.eat_punct(";") {
            return self.err("expected `;`");
        }
        Ok(stmt)
    }
}

/// Parses the statement structure of a document.
pub fn parse_document(text: &str) -> Result<Document, Diagnostic> {
    let tokens = lex(text)?;
    let mut statements = Vec::new();
    let mut p = P { toks: &tokens, pos: 0 };
    while p.pos < tokens.len() {
        let span = p.span();
        let stmt = p.statement()?;
        statements.push(Statement { stmt, span });
    }
    Ok(Document { tokens, statements })
}

/// An elaborated spec, ready for queries.
pub struct Spec {
    pub file: String,
    pub document: Document,
    pub engine: Engine,
}

struct Elab<'d> {
    doc: &'d Document,
    u: Universe,
    equivs: usize,
}

impl Elab<'_> {
    fn read(&mut self, range: &Range<usize>, mode: Mode) -> Result<ObjId, Diagnostic> {
        let toks = &self.doc.tokens[..range.end];
        let never = |_: &Tok| false;
        let mut r = Reader::new(toks, range.start, &mut self.u, mode, &never);
        let o = r.object()?;
        if r.pos != range.end {
            return Err(Diagnostic::syntax(toks[r.pos].span, "unexpected token"));
        }
        Ok(o)
    }

    fn pattern(&mut self, range: &Range<usize>, span: Span) -> Result<ObjId, Diagnostic> {
        let toks = &self.doc.tokens[..range.end];
        let never = |_: &Tok| false;
        let mut r = Reader::new(toks, range.start, &mut self.u, Mode::Pattern, &never);
        let arr = r.pattern()?;
        if r.pos != range.end {
            return Err(Diagnostic::syntax(toks[r.pos].span, "unexpected token"));
        }
        self.u.declare_constructor(&arr).map_err(|e| Diagnostic::engine(span, &e))
    }

    fn template(&mut self, range: &Range<usize>) -> Result<ObjId, Diagnostic> {
        self.read(range, Mode::Template { prefix: String::new() })
    }

    fn cond(&mut self, c: &CondSrc) -> Result<Cond, Diagnostic> {
        Ok(match c {
            CondSrc::True => Cond::True,
            CondSrc::False => Cond::False,
            CondSrc::In { term, set, negated } => {
                let t = self.template(term)?;
                if *negated { Cond::NotIn(t, set.clone()) } else { Cond::In(t, set.clone()) }
            }
            CondSrc::Eq { lhs, rhs, negated } => {
                let (a, b) = (self.template(lhs)?, self.template(rhs)?);
                if *negated { Cond::Neq(a, b) } else { Cond::Eq(a, b) }
            }
            CondSrc::FreeIn { name, term, negated } => {
                let (a, b) = (self.template(name)?, self.template(term)?);
                if *negated { Cond::NotFreeIn(a, b) } else { Cond::FreeIn(a, b) }
            }
            CondSrc::LabIn { label, fields, negated } => {
                let (a, b) = (self.template(label)?, self.template(fields)?);
                if *negated { Cond::NotLabIn(a, b) } else { Cond::LabIn(a, b) }
            }
            CondSrc::And(a, b) => Cond::And(Box::new(self.cond(a)?), Box::new(self.cond(b)?)),
            CondSrc::Or(a, b) => Cond::Or(Box::new(self.cond(a)?), Box::new(self.cond(b)?)),
            CondSrc::Not(a) => Cond::Not(Box::new(self.cond(a)?)),
        })
    }
}

fn cond_sets<'c>(c: &'c CondSrc, out: &mut Vec<&'c str>) {
    match c {
        CondSrc::In { set, .. } => out.push(set),
        CondSrc::And(a, b) | CondSrc::Or(a, b) => {
            cond_sets(a, out);
            cond_sets(b, out);
        }
        CondSrc::Not(a) => cond_sets(a, out),
        _ => {}
    }
}

impl Spec {
    pub fn parse(text: &str, file: &str) -> Result<Spec, Diagnostic> {
        let document = parse_document(text).map_err(|d| d.in_file(file))?;
        let engine = elaborate(&document).map_err(|d| d.in_file(file))?;
        Ok(Spec { file: file.into(), document, engine })
    }

    pub fn load(path: &str) -> Result<Spec, Diagnostic> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Diagnostic::new(Span { line: 1, col: 1, ..Span::default() }, "IoError", e.to_string()).in_file(path))?;
        Spec::parse(&text, path)
    }

    pub fn with_fresh(self, n: u64) -> Spec {
        Spec { engine: self.engine.with_fresh(n), ..self }
    }

    pub fn with_cap(self, cap: usize) -> Spec {
        Spec { engine: self.engine.with_cap(cap), ..self }
    }

    /// Reads an object in the spec's syntax.
    pub fn term(&mut self, text: &str) -> Result<ObjId, Diagnostic> {
        crate::syntax::read_term(&mut self.engine.u, text)
    }

    pub fn print(&mut self, o: ObjId) -> String {
        crate::syntax::print_term(&mut self.engine.u, o)
    }
}

fn elaborate(doc: &Document) -> Result<Engine, Diagnostic> {
    let mut e = Elab { doc, u: Universe::new(), equivs: 0 };
    let mut sets = Vec::new();
    let mut set_spans = Vec::new();
    let mut rels: Vec<RelDecl> = Vec::new();
    let mut opts = Options::default();
    let mut checks: Vec<(Span, String)> = Vec::new();
    for st in &doc.statements {
        let span = st.span;
        let core = |e: Error| Diagnostic::engine(span, &e);
        match &st.stmt {
            Stmt::Names { base, aliases } => {
                let g = e.u.declare_name_group(base).map_err(core)?;
                for a in aliases {
                    opts.aliases.push((a.clone(), g));
                }
            }
            Stmt::Constructor { pattern, prec, assoc } => {
                let p = e.pattern(pattern, span)?;
                e.u.set_constructor_syntax(p, *prec, *assoc).map_err(core)?;
            }
            Stmt::Binder { pattern, binder, scope } => {
                let p = e.pattern(pattern, span)?;
                e.u.declare_binder(p, *binder, scope).map_err(core)?;
            }
            Stmt::ModuloAlpha => {
                e.u.register_equivalence(EquivAxiom::Alpha).map_err(core)?;
            }
            Stmt::Equiv { lhs, rhs, orient, guard } => {
                let mode = Mode::Template { prefix: format!("≈{}·", e.equivs) };
                e.equivs += 1;
                let l = e.read(lhs, mode.clone())?;
                let r = e.read(rhs, mode.clone())?;
                let (from, to) = match orient {
                    Some((f, t)) => (e.read(f, mode.clone())?, e.read(t, mode.clone())?),
                    None => (l, r),
                };
                let guard = match guard {
                    Some((a, b)) => {
                        let Mode::Template { prefix } = &mode else { unreachable!() };
                        let meta = |e: &mut Elab, id: &str| {
                            let (base, _) = crate::lex::split_decoration(id);
                            let m = e.u.meta(&format!("{prefix}{id}"), &format!("{prefix}{base}"));
                            e.u.meta_object(m)
                        };
                        Some((meta(&mut e, a), meta(&mut e, b)))
                    }
                    None => None,
                };
                e.u.register_equivalence(EquivAxiom::Schema(Schema { lhs: l, rhs: r, orient_from: from, orient_to: to, guard }))
                    .map_err(core)?;
            }
            Stmt::Set { name, metavars, alts, merge, open_end, global, replace } => {
                let mut d = SetDecl::new(name, &[]);
                d.metavars = metavars.clone();
                d.merge = *merge;
                d.open_end = *open_end;
                d.replace = *replace;
                for a in alts {
                    let t = e.template(&a.template)?;
                    let c = match &a.cond {
                        Some(c) => {
                            let mut names = Vec::new();
                            cond_sets(c, &mut names);
                            checks.extend(names.into_iter().map(|n| (span, n.to_string())));
                            e.cond(c)?
                        }
                        None => Cond::True,
                    };
                    d = d.alt_if(t, c);
                }
                if let Some(g) = global {
                    let mut names = Vec::new();
                    cond_sets(g, &mut names);
                    checks.extend(names.into_iter().map(|n| (span, n.to_string())));
                    d.global = Some(e.cond(g)?);
                }
                sets.push(d);
                set_spans.push(span);
            }
            Stmt::Rel { name, carrier, lhs, rhs, cond } => {
                let pattern = e.template(lhs)?;
                let template = e.template(rhs)?;
                let cond = match cond {
                    Some(c) => {
                        let mut names = Vec::new();
                        cond_sets(c, &mut names);
                        checks.extend(names.into_iter().map(|n| (span, n.to_string())));
                        e.cond(c)?
                    }
                    None => Cond::True,
                };
                if let Some(s) = carrier {
                    checks.push((span, s.clone()));
                }
                rels.push(RelDecl { name: name.clone(), rules: vec![RelRule { pattern, template, cond }], carrier: carrier.clone(), contexts: Vec::new() });
            }
            Stmt::Cong { name, context } => {
                let c = e.template(context)?;
                if e.u.arity(c) != 1 {
                    return Err(Diagnostic::engine(span, &Error::ArityMismatch { holes: e.u.arity(c), replacements: 1 }));
                }
                rels.push(RelDecl { name: name.clone(), contexts: vec![c], ..RelDecl::default() });
            }
            Stmt::Decorate(d) => opts.decorate = *d,
        }
    }
    let mut u = e.u;
    let g = match Grammar::elaborate(&mut u, &sets, &rels, &opts) {
        Ok(g) => g,
        Err(err) => {
            let span = match &err {
                Error::DuplicateSetName(n) => sets.iter().zip(&set_spans).filter(|(s, _)| s.name == *n).nth(1).map(|(_, sp)| *sp),
                _ => None,
            };
            let span = span.or(set_spans.first().copied()).or(doc.statements.first().map(|s| s.span)).unwrap_or_default();
            return Err(Diagnostic::engine(span, &err));
        }
    };
    for (span, name) in checks {
        g.set_index(&name).map_err(|err| Diagnostic::engine(span, &err))?;
    }
    Ok(Engine::new(u, g))
}
