//! Linear syntax for objects and templates.
//!
//! Parentheses are meta-level: `(…)` builds the object its contents denote
//! and contributes it as a single operand. `[]` is the hole, `#n` a
//! natural, `\eps` the empty arrangement, `X[a]` fills `X`'s hole and
//! `X[x := r]` substitutes.

use smt_core::{Arrangement, Item, ObjId, Position, Universe};

use crate::diag::{Diagnostic, Span};
use crate::lex::{escape_glyph, glyph_escape, lex, split_decoration, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// Identifiers are names, constructor symbols or atoms.
    Term,
    /// Identifiers are metavariables; `prefix` keeps them apart from
    /// metavariables of other declarations.
    Template { prefix: String },
    /// A flat constructor pattern: identifiers are symbols, no splicing.
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Closer {
    Top,
    Paren,
    Brace,
    Brack,
}

pub struct Reader<'a> {
    pub toks: &'a [Token],
    pub pos: usize,
    pub u: &'a mut Universe,
    mode: Mode,
    stop: &'a dyn Fn(&Tok) -> bool,
    /// Declare a constructor for an arrangement no declared one explains.
    declare: bool,
}

fn never(_: &Tok) -> bool {
    false
}

impl<'a> Reader<'a> {
    pub fn new(toks: &'a [Token], pos: usize, u: &'a mut Universe, mode: Mode, stop: &'a dyn Fn(&Tok) -> bool) -> Reader<'a> {
        Reader { toks, pos, u, mode, stop, declare: true }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => t.span,
            None => Span { line: 1, col: 1, ..Span::default() },
        }
    }

    fn core<T>(&self, span: Span, r: smt_core::Result<T>) -> Result<T, Diagnostic> {
        r.map_err(|e| Diagnostic::engine(span, &e))
    }

    /// The object (or pattern arrangement) up to the next terminator.
    pub fn object(&mut self) -> Result<ObjId, Diagnostic> {
        let span = self.span();
        let items = self.seq(Closer::Top)?;
        if items.is_empty() {
            return Err(Diagnostic::syntax(span, "expected a term"));
        }
        self.build(span, items)
    }

    /// A flat arrangement, for constructor patterns.
    pub fn pattern(&mut self) -> Result<Arrangement, Diagnostic> {
        let span = self.span();
        let items = self.seq(Closer::Top)?;
        self.core(span, Arrangement::from_items(items))
    }

    fn build(&mut self, span: Span, items: Vec<Item>) -> Result<ObjId, Diagnostic> {
        let arr = self.core(span, Arrangement::from_items(items))?;
        let r = self.u.parse_arrangement(&arr, self.declare);
        self.core(span, r)
    }

    fn seq(&mut self, closer: Closer) -> Result<Vec<Item>, Diagnostic> {
        let mut items = Vec::new();
        let mut braces = 0usize;
        while let Some(t) = self.peek() {
            match (t, closer) {
                (Tok::RParen, Closer::Paren) | (Tok::RBrack, Closer::Brack) => break,
                (Tok::RBrace, Closer::Brace) if braces == 0 => break,
                (Tok::Punct(p), Closer::Brack) if p == ":=" => break,
                (t, Closer::Top) if (self.stop)(t) => break,
                (Tok::RParen | Tok::RBrack, _) => break,
                (Tok::RBrace, _) if braces == 0 => break,
                _ => {}
            }
            match t {
                Tok::LBrace => {
                    braces += 1;
                    let s = self.sym(self.span(), "{")?;
                    self.pos += 1;
                    items.push(Item::Sym(s));
                    continue;
                }
                Tok::RBrace => {
                    braces -= 1;
                    let s = self.sym(self.span(), "}")?;
                    self.pos += 1;
                    items.push(Item::Sym(s));
                    continue;
                }
                Tok::Punct(p) if p == "<>" => {
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }
            let item = self.item()?;
            items.push(item);
        }
        if braces != 0 {
            return Err(Diagnostic::syntax(self.span(), "unbalanced `{`"));
        }
        Ok(items)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), Diagnostic> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Diagnostic::syntax(self.span(), format!("expected {what}")))
        }
    }

    fn item(&mut self) -> Result<Item, Diagnostic> {
        let span = self.span();
        let tok = self.peek().cloned().ok_or_else(|| Diagnostic::syntax(span, "unexpected end of input"))?;
        self.pos += 1;
        let mut item = match tok {
            Tok::Ident(id) => self.ident(span, &id)?,
            Tok::Quoted(s) => Item::Sym(self.sym(span, &s)?),
            Tok::Nat(n) => Item::Nat(n),
            Tok::Hole => Item::Obj(ObjId::HOLE),
            Tok::Escape(name) if name == "eps" => Item::Obj(self.u.epsilon()),
            Tok::Escape(name) => match escape_glyph(&name) {
                Some(g) => Item::Sym(self.sym(span, g)?),
                None => return Err(Diagnostic::syntax(span, format!("unknown escape `\\{name}`"))),
            },
            Tok::Punct(p) => Item::Sym(self.sym(span, if p == "->" { "→" } else { &p })?),
            Tok::LParen | Tok::Group => {
                if self.mode == Mode::Pattern {
                    return Err(Diagnostic::syntax(span, "constructor patterns are flat"));
                }
                let close = if tok == Tok::LParen { Closer::Paren } else { Closer::Brace };
                let items = self.seq(close)?;
                self.expect(if close == Closer::Paren { &Tok::RParen } else { &Tok::RBrace }, "a closing bracket")?;
                if items.is_empty() {
                    return Err(Diagnostic::syntax(span, "empty group; write `\\eps` for the empty arrangement"));
                }
                Item::Obj(self.build(span, items)?)
            }
            Tok::Deco(kind) => {
                let items = self.seq(Closer::Brace)?;
                self.expect(&Tok::RBrace, "`}`")?;
                let body = self.core(span, Arrangement::from_items(items))?;
                let d = self.core(span, Arrangement::decorated(kind, body))?;
                d.into_items().pop().expect("one item")
            }
            Tok::Script(_) => return Err(Diagnostic::syntax(span, "script with nothing to attach to")),
            Tok::LBrack => return Err(Diagnostic::syntax(span, "`[` must follow a term directly; quote it for a literal bracket")),
            Tok::RParen | Tok::RBrack | Tok::RBrace | Tok::LBrace => return Err(Diagnostic::syntax(span, "unbalanced bracket")),
        };
        while let Some(next) = self.toks.get(self.pos) {
            if !next.glued {
                break;
            }
            match next.tok {
                Tok::LBrack => {
                    self.pos += 1;
                    item = self.bracket(next.span, item)?;
                }
                Tok::Script(_) => {
                    let mut scripts = Vec::new();
                    while let Some(Token { tok: Tok::Script(p), glued: true, span }) = self.toks.get(self.pos) {
                        self.pos += 1;
                        let items = self.seq(Closer::Brace)?;
                        self.expect(&Tok::RBrace, "`}`")?;
                        scripts.push((*p, self.core(*span, Arrangement::from_items(items))?));
                    }
                    let base = Arrangement::from(item);
                    let arr = self.core(next.span, base.scripted(scripts))?;
                    item = arr.into_items().pop().expect("one item");
                }
                _ => break,
            }
        }
        Ok(item)
    }

    fn bracket(&mut self, span: Span, head: Item) -> Result<Item, Diagnostic> {
        let Item::Obj(target) = head else {
            return Err(Diagnostic::syntax(span, "only objects can be filled or substituted into"));
        };
        let first = self.seq(Closer::Brack)?;
        let first = self.build(span, first)?;
        let out = if self.peek() == Some(&Tok::Punct(":=".into())) {
            self.pos += 1;
            let repl = self.seq(Closer::Brack)?;
            let repl = self.build(span, repl)?;
            match self.mode {
                Mode::Term => {
                    let r = self.u.substitute(target, first, repl);
                    self.core(span, r)?
                }
                _ => self.u.subst_template(target, first, repl),
            }
        } else {
            match self.mode {
                Mode::Term => {
                    let r = self.u.fill(target, &[first]);
                    self.core(span, r)?
                }
                _ => self.u.fill_template(target, vec![first]),
            }
        };
        self.expect(&Tok::RBrack, "`]`")?;
        Ok(Item::Obj(out))
    }

    fn sym(&mut self, span: Span, g: &str) -> Result<smt_core::Sym, Diagnostic> {
        let r = self.u.sym(g);
        self.core(span, r)
    }

    fn ident(&mut self, span: Span, id: &str) -> Result<Item, Diagnostic> {
        if id.starts_with(|c: char| c.is_ascii_digit()) {
            return Ok(Item::Sym(self.sym(span, id)?));
        }
        match &self.mode {
            Mode::Pattern => Ok(Item::Sym(self.sym(span, id)?)),
            Mode::Template { prefix } => {
                let (base, _) = split_decoration(id);
                let m = self.u.meta(&format!("{prefix}{id}"), &format!("{prefix}{base}"));
                Ok(Item::Obj(self.u.meta_object(m)))
            }
            Mode::Term => {
                if let Some(n) = name_of(self.u, id) {
                    return Ok(Item::Obj(n));
                }
                let s = self.sym(span, id)?;
                if self.u.is_constructor_sym(s) {
                    Ok(Item::Sym(s))
                } else {
                    let r = self.u.atom(id);
                    Ok(Item::Obj(self.core(span, r)?))
                }
            }
        }
    }
}

/// `x12` as the name with index 12 of group `x`, when `x` is a group.
pub fn name_of(u: &mut Universe, id: &str) -> Option<ObjId> {
    let (base, dec) = split_decoration(id);
    if dec.is_empty() || !dec.bytes().all(|b| b.is_ascii_digit()) || (dec.len() > 1 && dec.starts_with('0')) {
        return None;
    }
    let g = u.group(base)?;
    u.name(g, dec.parse().ok()?).ok()
}

/// Reads a whole text as one object.
pub fn read_term(u: &mut Universe, text: &str) -> Result<ObjId, Diagnostic> {
    let toks = lex(text)?;
    let mut r = Reader::new(&toks, 0, u, Mode::Term, &never);
    let o = r.object()?;
    if r.pos != toks.len() {
        return Err(Diagnostic::syntax(toks[r.pos].span, "unexpected token"));
    }
    Ok(o)
}

fn read_back(u: &mut Universe, text: &str) -> Option<ObjId> {
    let toks = lex(text).ok()?;
    let mut r = Reader::new(&toks, 0, u, Mode::Term, &never);
    r.declare = false;
    let o = r.object().ok()?;
    (r.pos == toks.len()).then_some(o)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Parens {
    /// As few as precedence and associativity allow.
    Minimal,
    /// Also around children exposing one of the parent's symbols.
    Clash,
    /// Around every compound child.
    All,
}

/// Printed form that [`read_term`] maps back to the same object. Starts
/// from the fewest parentheses the precedence declarations allow and adds
/// more when a delimiter inside an operand would make the text ambiguous.
pub fn print_term(u: &mut Universe, o: ObjId) -> String {
    let mut out = String::new();
    for parens in [Parens::Minimal, Parens::Clash, Parens::All] {
        out.clear();
        Printer { u, parens }.obj(o, false, false, &mut out);
        if parens == Parens::All || read_back(u, &out) == Some(o) {
            break;
        }
    }
    out
}

struct Printer<'a> {
    u: &'a mut Universe,
    parens: Parens,
}

impl Printer<'_> {
    fn obj(&mut self, o: ObjId, leading: bool, trailing: bool, out: &mut String) {
        if o.is_hole() {
            out.push_str("[]");
            return;
        }
        if let Some(m) = self.u.meta_of(o) {
            out.push_str(self.u.meta_name(m));
            return;
        }
        if let Some((g, i)) = self.u.name_info(o) {
            out.push_str(self.u.group_base(g));
            out.push_str(&i.to_string());
            return;
        }
        let arr = self.u.arrangement(o).clone();
        if arr.is_empty() {
            out.push_str("\\eps");
            return;
        }
        if let Some(g) = self.u.atom_glyph(o).map(String::from) {
            self.atom(&g, out);
            return;
        }
        let n = arr.len();
        for (k, it) in arr.items().iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let lead = leading || k > 0;
            let trail = trailing || k + 1 < n;
            match it {
                Item::Obj(c) => self.child(o, k, *c, lead, trail, out),
                other => self.item(other, out),
            }
        }
    }

    fn child(&mut self, parent: ObjId, k: usize, c: ObjId, lead: bool, trail: bool, out: &mut String) {
        let bare_atom_ok = match self.u.atom_glyph(c) {
            Some(g) => {
                let g = g.to_string();
                match self.u.lookup_sym(&g) {
                    Some(s) => !self.u.is_constructor_sym(s) && is_plain_ident(&g) && name_of(self.u, &g).is_none(),
                    None => true,
                }
            }
            None => true,
        };
        let compound = !c.is_hole() && self.u.meta_of(c).is_none() && self.u.name_info(c).is_none() && self.u.arrangement(c).len() > 1;
        let unknown_ctor = compound && self.u.top_constructor(c).is_none();
        let mut paren = !bare_atom_ok || unknown_ctor || (compound && self.u.needs_parens(parent, k, c, lead, trail));
        if compound && !paren {
            paren = match self.parens {
                Parens::Minimal => false,
                Parens::All => true,
                Parens::Clash => {
                    let top = self.u.top_constructor(c).map(|d| d.pattern);
                    let same = top.is_some() && top == self.u.top_constructor(parent).map(|d| d.pattern);
                    !same && self.clashes(parent, c, lead, trail)
                }
            };
        }
        if paren {
            out.push('(');
            self.obj(c, false, false, out);
            out.push(')');
        } else {
            self.obj(c, lead, trail, out);
        }
    }

    /// Whether `c`, printed bare, shows a symbol that also delimits `parent`.
    fn clashes(&mut self, parent: ObjId, c: ObjId, lead: bool, trail: bool) -> bool {
        let mut text = String::new();
        self.obj(c, lead, trail, &mut text);
        let Ok(toks) = lex(&text) else { return true };
        let mut depth = 0usize;
        let mut shown = Vec::new();
        for t in &toks {
            match &t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => depth = depth.saturating_sub(1),
                tok if depth == 0 => shown.push(tok.clone()),
                _ => {}
            }
        }
        let mut own = String::new();
        for it in self.u.arrangement(parent).clone().items() {
            if let Item::Sym(_) = it {
                own.clear();
                self.item(it, &mut own);
                if lex(&own).is_ok_and(|t| t.iter().any(|t| shown.contains(&t.tok))) {
                    return true;
                }
            }
        }
        false
    }

    fn atom(&mut self, g: &str, out: &mut String) {
        let bare = g == "{"
            || g == "}"
            || (is_plain_ident(g) && name_of(self.u, g).is_none())
            || (g.chars().count() == 1 && !g.chars().any(|c| c.is_alphanumeric() || "()[]{}\"\\#^_/".contains(c)))
            || lex(g).is_ok_and(|t| t.len() == 1 && matches!(t[0].tok, Tok::Punct(_)));
        if let Some(e) = glyph_escape(g) {
            out.push_str(e);
        } else if bare {
            out.push_str(g);
        } else {
            out.push('"');
            out.push_str(&g.replace('\\', "\\\\").replace('"', "\\\""));
            out.push('"');
        }
    }

    fn arr(&mut self, a: &Arrangement, out: &mut String) {
        let n = a.len();
        for (k, it) in a.items().iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            match it {
                Item::Obj(c) => {
                    let wrap = !c.is_hole() && self.u.arrangement(*c).len() > 1 && self.u.name_info(*c).is_none();
                    if wrap {
                        out.push('(');
                    }
                    self.obj(*c, !wrap && k > 0, !wrap && k + 1 < n, out);
                    if wrap {
                        out.push(')');
                    }
                }
                other => self.item(other, out),
            }
        }
    }

    fn item(&mut self, it: &Item, out: &mut String) {
        match it {
            Item::Sym(s) => {
                let g = self.u.glyph(*s).to_string();
                self.atom(&g, out);
            }
            Item::Nat(n) => {
                out.push('#');
                out.push_str(&n.to_string());
            }
            Item::Obj(o) => self.obj(*o, false, false, out),
            Item::Deco(kind, body) => {
                out.push_str(match kind {
                    smt_core::Deco::Over => "\\over{",
                    smt_core::Deco::Under => "\\under{",
                });
                self.arr(body, out);
                out.push('}');
            }
            Item::Scripted(base, scripts) => {
                if base.len() == 1 {
                    self.arr(base, out);
                } else {
                    out.push('(');
                    self.arr(base, out);
                    out.push(')');
                }
                for (p, a) in scripts.iter() {
                    out.push_str(match p {
                        Position::Sup => "^{",
                        Position::Sub => "_{",
                        Position::PreSup => "\\presup{",
                        Position::PreSub => "\\presub{",
                        Position::Above => "\\above{",
                        Position::Below => "\\below{",
                    });
                    self.arr(a, out);
                    out.push('}');
                }
            }
        }
    }
}

fn is_plain_ident(g: &str) -> bool {
    lex(g).is_ok_and(|t| t.len() == 1 && t[0].tok == Tok::Ident(g.into()))
}
