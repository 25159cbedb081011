//! Record reordering and label distinctness, and the effect of each kind
//! of set declaration on the generated sets.

use std::collections::BTreeSet;
use std::path::Path;

use smt::Spec;
use smt_core::relation::normal_forms;
use smt_core::{Membership, RelStepper};

use super::{corpus, ensure, inline, printed, term, Outcome};

fn normalize(s: &mut Spec, t: &str) -> Result<BTreeSet<String>, String> {
    let o = term(s, t);
    let mut st = RelStepper::new(&mut s.engine, "RCD").map_err(|e| e.to_string())?;
    let (nf, truncated) = normal_forms(&mut st, o, 10).map_err(|e| e.to_string())?;
    ensure!(!truncated, "{t}: normalization truncated");
    Ok(printed(s, nf))
}

fn one(t: &str) -> BTreeSet<String> {
    [t.to_string()].into()
}

pub fn records_suite() -> Outcome {
    let mut s = corpus("records.smt");
    let pairs = [
        (r"{ l1 = x1 , l2 = x2 , \eps }", r"{ l2 = x2 , l1 = x1 , \eps }"),
        (r"{ l1 = x1 x2 , l2 = \ x1 : ty0 . x1 , l0 = x0 , \eps }", r"{ l0 = x0 , l2 = \ x1 : ty0 . x1 , l1 = x1 x2 , \eps }"),
        (r"{ l1 : ty0 , l2 : ty1 -> ty0 , \eps }", r"{ l2 : ty1 -> ty0 , l1 : ty0 , \eps }"),
    ];
    for (a, b) in pairs {
        ensure!(term(&mut s, a) == term(&mut s, b), "{a} and {b} are different objects");
    }
    let swapped_values = [r"{ l1 = x1 , l2 = x2 , \eps }", r"{ l1 = x2 , l2 = x1 , \eps }"];
    ensure!(term(&mut s, swapped_values[0]) != term(&mut s, swapped_values[1]), "values moved without their labels");

    let checks = [
        (r"l1 = x1 , l1 = x2 , \eps", "Term-Records", Membership::No),
        (r"l1 = x1 , l2 = x2 , \eps", "Term-Records", Membership::Yes),
        (r"l0 : ty0 , l0 : ty1 , \eps", "Type-Records", Membership::No),
        (r"l0 : ty0 , l1 : ty1 , \eps", "Type-Records", Membership::Yes),
    ];
    for (t, set, want) in checks {
        let o = term(&mut s, t);
        let got = s.engine.member(o, set, 3).map_err(|e| e.to_string())?;
        ensure!(got == want, "{t} in {set}: {got:?}, expected {want:?}");
    }

    let mut small = corpus("records.smt").with_fresh(1);
    let members = small.engine.enumerate("Term-Records", 3).map_err(|e| e.to_string())?;
    let dup = term(&mut small, r"l0 = x0 , l0 = x0 , \eps");
    let single = term(&mut small, r"l0 = x0 , \eps");
    ensure!(!members.contains(&dup), "enumeration produced a duplicate label");
    ensure!(members.contains(&single), "enumeration lost {}", small.print(single));

    let cases = [
        (r"{ l2 = x2 , l1 = x1 , \eps } . l1", "x1"),
        (r"({ l1 = x1 , \eps } . l1) . l2", "x1 . l2"),
        (r"{ l2 = ({ l1 = x1 , \eps } . l1) , \eps }", r"{ l2 = x1 , \eps }"),
        (r"{ l1 = ({ l2 = x2 , \eps } . l2) , \eps } . l1", "x2"),
    ];
    for (t, want) in cases {
        let got = normalize(&mut s, t)?;
        ensure!(got == one(want), "{t} normalized to {got:?}, expected {want}");
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/records.smt");
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let bare: String = text.lines().filter(|l| !l.starts_with("cong")).map(|l| format!("{l}\n")).collect();
    let mut bare = inline(&bare);
    for (t, _) in &cases[1..3] {
        let o = term(&mut bare, t);
        let same = bare.print(o);
        let got = normalize(&mut bare, t)?;
        ensure!(got == one(&same), "without congruences {t} normalized to {got:?}");
    }
    Ok(format!("3 reorderings, 4 label checks, {} records at fresh 1, 4 normalizations", members.len()))
}

const BASE: &str = "names x;\nconstructor [] + [] prec 1 assoc left;\nconstructor - [] prec 5;\n";

fn sets(text: &str, fresh: u64, depth: usize) -> Result<BTreeSet<String>, String> {
    let mut s = inline(&format!("{BASE}{text}")).with_fresh(fresh);
    let objs = s.engine.enumerate("t", depth).map_err(|e| e.to_string())?;
    Ok(printed(&mut s, objs))
}

/// Terms over `fresh` names built from `x`, unary minus and (when `plus`)
/// binary plus, to the given depth, printed in the spec's notation.
fn expected(fresh: u64, depth: usize, minus: bool, plus: bool) -> BTreeSet<String> {
    #[derive(Clone)]
    enum E {
        V(u64),
        Neg(Box<E>),
        Add(Box<E>, Box<E>),
    }
    fn show(e: &E, prec: u8) -> String {
        match e {
            E::V(i) => format!("x{i}"),
            E::Neg(a) => format!("- {}", show(a, 5)),
            E::Add(a, b) => {
                let s = format!("{} + {}", show(a, 1), show(b, 2));
                if prec > 1 { format!("({s})") } else { s }
            }
        }
    }
    let mut layer: Vec<E> = Vec::new();
    for _ in 0..depth {
        let mut next: Vec<E> = (0..fresh).map(E::V).collect();
        if minus {
            next.extend(layer.iter().map(|a| E::Neg(Box::new(a.clone()))));
        }
        if plus {
            for a in &layer {
                next.extend(layer.iter().map(|b| E::Add(Box::new(a.clone()), Box::new(b.clone()))));
            }
        }
        layer = next;
    }
    layer.iter().map(|e| show(e, 0)).collect()
}

pub fn effects_suite() -> Outcome {
    for d in 0..=3 {
        let over = sets("set t (t) ::= x | t + t;\noverride set t (t) ::= x | - t;\n", 2, d)?;
        let fresh = sets("set t (t) ::= x | - t;\n", 2, d)?;
        ensure!(over == fresh, "override differs from a fresh declaration at depth {d}");
        ensure!(over == expected(2, d, true, false), "override at depth {d}: {over:?}");
    }

    let combined = sets("set t (t) ::= x | - t | t + t;\n", 2, 3)?;
    ensure!(combined == expected(2, 3, true, true), "combined rule: {} terms", combined.len());
    for stream in ["set t (t) ::= x;\nset t ::= - t;\nset t ::= t + t;\n", "set t (t) ::= x;\nset t ::= ... | - t | t + t;\n"] {
        let got = sets(stream, 2, 3)?;
        ensure!(got == combined, "merged stream {stream:?} gives {} terms, combined gives {}", got.len(), combined.len());
    }
    match Spec::parse(&format!("{BASE}set t (t) ::= x | - t;\nset t ::= x | t + t;\n"), "<inline>") {
        Err(d) if d.code == "DuplicateSetName" => {}
        other => return Err(format!("plain redeclaration: {:?}", other.err())),
    }

    let independent = sets("set t (t) ::= x | t + t;\n", 2, 2)?;
    let want: BTreeSet<String> = ["x0", "x1", "x0 + x0", "x0 + x1", "x1 + x0", "x1 + x1"].map(String::from).into();
    ensure!(independent == want, "t + t: {independent:?}");
    let linked = sets("decorate linked;\nset t (t) ::= x | t + t;\n", 2, 2)?;
    let want: BTreeSet<String> = ["x0", "x1", "x0 + x0", "x1 + x1"].map(String::from).into();
    ensure!(linked == want, "linked t + t: {linked:?}");
    Ok(format!("override equal at depths 0..3, merged streams {} terms, t + t 6 vs 4 linked", combined.len()))
}
