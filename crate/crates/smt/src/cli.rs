//! The `smt` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use smt_core::relation::{normal_forms, reachable};
use smt_core::{Error, Membership, ObjId, RelStepper, Universe};

use crate::diag::{Diagnostic, Span};
use crate::spec::Spec;
use crate::syntax::{print_term, read_term};

pub const SCHEMA: &str = "smt/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "smt", version, about = "Query grammars of syntactic math text")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Stratum depth for membership and enumeration.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Names drawn from each name group.
    #[arg(long, global = true, default_value_t = 3)]
    pub fresh: u64,
    /// Step bound for reduce and normalize.
    #[arg(long, global = true, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Relation for reduce and normalize; optional when the spec has one.
    #[arg(long, global = true)]
    pub rel: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Is TERM in SET? Yes, No or UnknownAtDepth.
    Check { spec: String, set: String, term: String },
    /// Members of SET up to the depth.
    Enumerate { spec: String, set: String },
    /// Fill the holes of CONTEXT left to right.
    Fill {
        context: String,
        args: Vec<String>,
        /// Spec whose constructors and names the terms use.
        #[arg(long)]
        spec: Option<String>,
    },
    /// Free names of TERM.
    Fv { spec: String, term: String },
    /// TERM with NAME replaced by REPL, avoiding capture.
    Subst { spec: String, term: String, name: String, repl: String },
    /// Are A and B equal up to renaming of bound names?
    Alphaeq { spec: String, a: String, b: String },
    /// Rewrite frontiers of TERM, one per step.
    Reduce { spec: String, term: String },
    /// Normal forms reachable from TERM.
    Normalize { spec: String, term: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Failure {
    diag: Diagnostic,
    code: i32,
}

impl Failure {
    fn usage(diag: Diagnostic) -> Failure {
        Failure { diag, code: 2 }
    }

    fn engine(e: Error) -> Failure {
        let code = match e {
            Error::UnknownSet(_) | Error::UnknownRelation(_) => 2,
            _ => 3,
        };
        Failure { diag: Diagnostic::engine(Span::default(), &e), code }
    }
}

type Res<T> = Result<T, Failure>;

struct Answer {
    text: Vec<String>,
    json: Value,
    code: i32,
}

struct Ctx {
    color: bool,
    format: Format,
}

impl Ctx {
    fn paint(&self, s: &str, code: &str) -> String {
        if self.color && self.format == Format::Text {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.into()
        }
    }
}

fn load(cli: &Cli, path: &str) -> Res<Spec> {
    Spec::load(path).map(|s| s.with_fresh(cli.fresh)).map_err(Failure::usage)
}

fn term(spec: &mut Spec, text: &str) -> Res<ObjId> {
    spec.term(text).map_err(|d| Failure::usage(d.in_file("<term>")))
}

fn sorted(u: &mut Universe, objs: impl IntoIterator<Item = ObjId>) -> Vec<String> {
    let set: BTreeSet<String> = objs.into_iter().map(|o| print_term(u, o)).collect();
    set.into_iter().collect()
}

fn relation(cli: &Cli, spec: &Spec) -> Res<String> {
    if let Some(r) = &cli.rel {
        return Ok(r.clone());
    }
    let rels = spec.engine.grammar().relations();
    match rels {
        [one] => Ok(one.name.clone()),
        _ => Err(Failure::usage(Diagnostic::new(
            Span::default(),
            "UsageError",
            format!("the spec declares {} relations; choose one with --rel", rels.len()),
        ))),
    }
}

fn execute(cli: &Cli, ctx: &Ctx) -> Res<Answer> {
    let cmd = match &cli.cmd {
        Cmd::Check { .. } => "check",
        Cmd::Enumerate { .. } => "enumerate",
        Cmd::Fill { .. } => "fill",
        Cmd::Fv { .. } => "fv",
        Cmd::Subst { .. } => "subst",
        Cmd::Alphaeq { .. } => "alphaeq",
        Cmd::Reduce { .. } => "reduce",
        Cmd::Normalize { .. } => "normalize",
    };
    let head = json!({ "schema": SCHEMA, "command": cmd });
    let with = |mut v: Value, extra: Value| {
        if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
            a.extend(b);
        }
        v
    };
    match &cli.cmd {
        Cmd::Check { spec, set, term: t } => {
            let mut s = load(cli, spec)?;
            let o = term(&mut s, t)?;
            let m = s.engine.member(o, set, cli.depth).map_err(Failure::engine)?;
            let (word, code, paint) = match m {
                Membership::Yes => ("Yes", 0, "32"),
                Membership::No => ("No", 1, "31"),
                Membership::UnknownAtDepth => ("UnknownAtDepth", 1, "33"),
            };
            Ok(Answer {
                text: vec![ctx.paint(word, paint)],
                json: with(head, json!({ "set": set, "depth": cli.depth, "term": s.print(o), "result": word })),
                code,
            })
        }
        Cmd::Enumerate { spec, set } => {
            let mut s = load(cli, spec)?;
            let objs = s.engine.enumerate(set, cli.depth).map_err(Failure::engine)?;
            let terms = sorted(&mut s.engine.u, objs);
            Ok(Answer {
                json: with(head, json!({ "set": set, "depth": cli.depth, "fresh": cli.fresh, "terms": terms })),
                text: terms,
                code: 0,
            })
        }
        Cmd::Fill { context, args, spec } => {
            let mut u = match spec {
                Some(p) => load(cli, p)?.engine.u,
                None => Universe::new(),
            };
            let read = |u: &mut Universe, t: &str| read_term(u, t).map_err(|d| Failure::usage(d.in_file("<term>")));
            let c = read(&mut u, context)?;
            let mut vals = Vec::new();
            for a in args {
                vals.push(read(&mut u, a)?);
            }
            let out = u.fill(c, &vals).map_err(Failure::engine)?;
            let p = print_term(&mut u, out);
            Ok(Answer { json: with(head, json!({ "result": p })), text: vec![p], code: 0 })
        }
        Cmd::Fv { spec, term: t } => {
            let mut s = load(cli, spec)?;
            let o = term(&mut s, t)?;
            let names = s.engine.u.free_names(o).map_err(Failure::engine)?;
            let names = sorted(&mut s.engine.u, names);
            Ok(Answer { text: vec![format!("{{{}}}", names.join(", "))], json: with(head, json!({ "result": names })), code: 0 })
        }
        Cmd::Subst { spec, term: t, name, repl } => {
            let mut s = load(cli, spec)?;
            let o = term(&mut s, t)?;
            let x = term(&mut s, name)?;
            let r = term(&mut s, repl)?;
            let out = s.engine.u.substitute(o, x, r).map_err(Failure::engine)?;
            let p = s.print(out);
            Ok(Answer { json: with(head, json!({ "result": p })), text: vec![p], code: 0 })
        }
        Cmd::Alphaeq { spec, a, b } => {
            let mut s = load(cli, spec)?;
            let a = term(&mut s, a)?;
            let b = term(&mut s, b)?;
            let eq = s.engine.u.alpha_equivalent(a, b).map_err(Failure::engine)?;
            let word = if eq { ctx.paint("Yes", "32") } else { ctx.paint("No", "31") };
            Ok(Answer { text: vec![word], json: with(head, json!({ "result": eq })), code: if eq { 0 } else { 1 } })
        }
        Cmd::Reduce { spec, term: t } => {
            let mut s = load(cli, spec)?;
            let o = term(&mut s, t)?;
            let rel = relation(cli, &s)?;
            let mut st = RelStepper::new(&mut s.engine, &rel).map_err(Failure::engine)?;
            let reach = reachable(&mut st, o, cli.steps).map_err(Failure::engine)?;
            let mut text = Vec::new();
            let mut layers = Vec::new();
            for (k, layer) in reach.layers.iter().enumerate() {
                let terms = sorted(&mut s.engine.u, layer.iter().copied());
                text.extend(terms.iter().map(|t| format!("{k}: {t}")));
                layers.push(terms);
            }
            let normal = sorted(&mut s.engine.u, reach.normal.iter().copied());
            Ok(Answer {
                text,
                json: with(head, json!({ "relation": rel, "steps": cli.steps, "frontiers": layers, "normal": normal, "truncated": reach.truncated })),
                code: 0,
            })
        }
        Cmd::Normalize { spec, term: t } => {
            let mut s = load(cli, spec)?;
            let o = term(&mut s, t)?;
            let rel = relation(cli, &s)?;
            let mut st = RelStepper::new(&mut s.engine, &rel).map_err(Failure::engine)?;
            let (nf, truncated) = normal_forms(&mut st, o, cli.steps).map_err(Failure::engine)?;
            let terms = sorted(&mut s.engine.u, nf);
            let code = if terms.is_empty() { 1 } else { 0 };
            Ok(Answer {
                json: with(head, json!({ "relation": rel, "steps": cli.steps, "normal": terms, "truncated": truncated })),
                text: terms,
                code,
            })
        }
    }
}

/// Runs one invocation; `color` applies to text output only.
pub fn run<I, T>(args: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: rendered, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: rendered, code }
            };
        }
    };
    let ctx = Ctx { color, format: cli.format };
    match execute(&cli, &ctx) {
        Ok(a) => {
            let stdout = match cli.format {
                Format::Text => a.text.iter().map(|l| format!("{l}\n")).collect(),
                Format::Json => format!("{}\n", a.json),
            };
            Outcome { stdout, stderr: String::new(), code: a.code }
        }
        Err(f) => {
            let stderr = match cli.format {
                Format::Json => format!("{}\n", f.diag.to_json()),
                Format::Text => {
                    let line = f.diag.to_string();
                    let code = f.diag.code.clone();
                    format!("{}\n", line.replacen(&code, &ctx.paint(&code, "1;31"), 1))
                }
            };
            Outcome { stdout: String::new(), stderr, code: f.code }
        }
    }
}
