//! Tokens shared by the spec language and the linear term syntax.

use smt_core::{Deco, Nat, Position};

use crate::diag::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Quoted(String),
    Nat(Nat),
    /// `[]`
    Hole,
    LBrack,
    RBrack,
    LParen,
    RParen,
    /// `{` as written; a symbol unless it closes a group.
    LBrace,
    RBrace,
    /// `\name`, or the empty name for a lone backslash.
    Escape(String),
    /// `^{`, `_{`, `\presup{` and friends.
    Script(Position),
    /// `\over{`, `\under{`.
    Deco(Deco),
    /// `obj{`
    Group,
    Punct(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// No whitespace separates this token from the previous one.
    pub glued: bool,
}

const MULTI: [&str; 9] = ["::=", "<=>", "...", "->", "=>", ":=", "==", "!=", "<>"];

fn ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || ('\u{300}'..='\u{36f}').contains(&c)
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut glued = false;
    let at = |k: usize| chars.get(k).map(|c| c.1);
    let off = |k: usize| chars.get(k).map_or(src.len(), |c| c.0);
    while i < chars.len() {
        let c = chars[i].1;
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            glued = false;
            continue;
        }
        if c == '/' && at(i + 1) == Some('/') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let bad = |msg: String| Diagnostic::syntax(Span { start: off(start), end: off(start + 1), line, col }, msg);
        let tok = if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match at(i) {
                    None | Some('\n') => return Err(bad("unterminated quoted symbol".into())),
                    Some('"') => break,
                    Some('\\') if matches!(at(i + 1), Some('"') | Some('\\')) => {
                        s.push(at(i + 1).unwrap_or_default());
                        i += 2;
                    }
                    Some(ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            if s.is_empty() {
                return Err(bad("empty quoted symbol".into()));
            }
            Tok::Quoted(s)
        } else if c == '#' && at(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            i += 1;
            let from = i;
            while at(i).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
            }
            let digits: String = chars[from..i].iter().map(|c| c.1).collect();
            Tok::Nat(digits.parse().map_err(|_| bad("bad natural".into()))?)
        } else if c == '\\' {
            i += 1;
            let from = i;
            while at(i).is_some_and(|d| d.is_ascii_alphabetic()) {
                i += 1;
            }
            let name: String = chars[from..i].iter().map(|c| c.1).collect();
            let brace = at(i) == Some('{');
            let grouped = match name.as_str() {
                "presup" => Some(Tok::Script(Position::PreSup)),
                "presub" => Some(Tok::Script(Position::PreSub)),
                "above" => Some(Tok::Script(Position::Above)),
                "below" => Some(Tok::Script(Position::Below)),
                "over" => Some(Tok::Deco(Deco::Over)),
                "under" => Some(Tok::Deco(Deco::Under)),
                _ => None,
            };
            match grouped {
                Some(t) if brace => {
                    i += 1;
                    t
                }
                Some(_) => return Err(bad(format!("`\\{name}` must be followed by `{{`"))),
                None => Tok::Escape(name),
            }
        } else if (c == '^' || c == '_') && at(i + 1) == Some('{') {
            i += 2;
            Tok::Script(if c == '^' { Position::Sup } else { Position::Sub })
        } else if c == '[' && at(i + 1) == Some(']') {
            i += 2;
            Tok::Hole
        } else if c.is_ascii_digit() {
            let from = i;
            while at(i).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
            }
            Tok::Ident(chars[from..i].iter().map(|c| c.1).collect())
        } else if ident_start(c) {
            let from = i;
            i += 1;
            loop {
                match at(i) {
                    Some(d) if ident_char(d) => i += 1,
                    Some('-') if at(i + 1).is_some_and(|d| d.is_alphanumeric()) && i > from => i += 2,
                    _ => break,
                }
            }
            let s: String = chars[from..i].iter().map(|c| c.1).collect();
            if s == "obj" && at(i) == Some('{') {
                i += 1;
                Tok::Group
            } else {
                Tok::Ident(s)
            }
        } else {
            let rest = &src[off(i)..];
            if let Some(m) = MULTI.iter().find(|m| rest.starts_with(**m)) {
                i += m.chars().count();
                Tok::Punct((*m).into())
            } else {
                i += 1;
                match c {
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    _ => Tok::Punct(c.into()),
                }
            }
        };
        let span = Span { start: off(start), end: off(i), line, col };
        col += i - start;
        out.push(Token { tok, span, glued });
        glued = true;
    }
    Ok(out)
}

/// Splits an identifier into its base and decoration: trailing digits and
/// primes.
pub fn split_decoration(id: &str) -> (&str, &str) {
    let cut = id.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'').len();
    if cut == 0 {
        (id, "")
    } else {
        id.split_at(cut)
    }
}

/// Glyphs for escapes other than the structural ones.
pub fn escape_glyph(name: &str) -> Option<&'static str> {
    Some(match name {
        "" | "lambda" => "λ",
        "Lambda" => "Λ",
        "to" => "→",
        "mu" => "μ",
        "nu" => "ν",
        "Pi" => "Π",
        "forall" => "∀",
        "exists" => "∃",
        "cdot" => "·",
        "langle" => "⟨",
        "rangle" => "⟩",
        "vdash" => "⊢",
        "rhd" => "⊳",
        _ => return None,
    })
}

/// Inverse of [`escape_glyph`] plus `->`, for printing.
pub fn glyph_escape(g: &str) -> Option<&'static str> {
    Some(match g {
        "λ" => "\\",
        "→" => "->",
        "Λ" => "\\Lambda",
        "μ" => "\\mu",
        "ν" => "\\nu",
        "Π" => "\\Pi",
        "∀" => "\\forall",
        "∃" => "\\exists",
        "·" => "\\cdot",
        "⟨" => "\\langle",
        "⟩" => "\\rangle",
        "⊢" => "\\vdash",
        "⊳" => "\\rhd",
        _ => return None,
    })
}
