//! Call-by-need evaluation contexts. The decider enumerates A, Â and Ǎ
//! to depth 3 over two names and searches decompositions of a candidate
//! against the four E alternatives.

use std::collections::HashSet;

use smt::Spec;
use smt_core::relation::Stepper;
use smt_core::{Membership, ObjId, RelStepper};

use super::{corpus, ensure, term, Outcome};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum C {
    H,
    V(u8),
    L(u8, Box<C>),
    A(Box<C>, Box<C>),
}

use C::{A, H, L, V};

fn lam(x: u8, b: C) -> C {
    L(x, Box::new(b))
}

fn app(a: C, b: C) -> C {
    A(Box::new(a), Box::new(b))
}

impl C {
    fn fill(&self, t: &C) -> C {
        match self {
            H => t.clone(),
            V(_) => self.clone(),
            L(x, b) => lam(*x, b.fill(t)),
            A(a, b) => app(a.fill(t), b.fill(t)),
        }
    }

    fn has_hole(&self) -> bool {
        match self {
            H => true,
            V(_) => false,
            L(_, b) => b.has_hole(),
            A(a, b) => a.has_hole() || b.has_hole(),
        }
    }

    /// `s` with `self.fill(s) == t`, for a one-hole `self`.
    fn unfill<'t>(&self, t: &'t C) -> Option<&'t C> {
        match (self, t) {
            (H, _) => Some(t),
            (V(x), V(y)) if x == y => None,
            (L(x, b), L(y, c)) if x == y => b.unfill(c),
            (A(a, b), A(c, d)) => {
                if a.has_hole() {
                    (**b == **d).then_some(())?;
                    a.unfill(c)
                } else {
                    (**a == **c).then_some(())?;
                    b.unfill(d)
                }
            }
            _ => None,
        }
    }

    /// Every way to write `self` as `E[V(x)]`.
    fn abstract_one(&self, x: u8, out: &mut Vec<C>) {
        match self {
            V(y) if *y == x => out.push(H),
            H | V(_) => {}
            L(y, b) => {
                let mut inner = Vec::new();
                b.abstract_one(x, &mut inner);
                out.extend(inner.into_iter().map(|b| lam(*y, b)));
            }
            A(a, b) => {
                let mut inner = Vec::new();
                a.abstract_one(x, &mut inner);
                out.extend(inner.into_iter().map(|a2| app(a2, (**b).clone())));
                let mut inner = Vec::new();
                b.abstract_one(x, &mut inner);
                out.extend(inner.into_iter().map(|b2| app((**a).clone(), b2)));
            }
        }
    }

    fn text(&self) -> String {
        match self {
            H => "[]".into(),
            V(x) => format!("x{x}"),
            L(x, b) => format!(r"(\ x{x} . {})", b.text()),
            A(a, b) => format!("({} {})", a.text(), b.text()),
        }
    }
}

const NAMES: u8 = 2;

/// Terms of `se` by depth.
fn terms(depth: usize) -> Vec<Vec<C>> {
    let mut se = vec![Vec::new()];
    for d in 1..=depth {
        let prev: &Vec<C> = &se[d - 1];
        let mut out: Vec<C> = (0..NAMES).map(V).collect();
        for x in 0..NAMES {
            out.extend(prev.iter().map(|e| lam(x, e.clone())));
        }
        for a in prev {
            out.extend(prev.iter().map(|b| app(a.clone(), b.clone())));
        }
        se.push(out);
    }
    se
}

struct Contexts {
    a: Vec<C>,
    a_hat: Vec<C>,
    a_check: Vec<C>,
    a_set: HashSet<C>,
}

fn contexts() -> Contexts {
    let se = terms(2);
    let (mut a, mut a_hat, mut a_check) = (vec![H], vec![H], vec![H]);
    for e in &se[1..3] {
        let (mut na, mut nh, mut nc) = (vec![H], vec![H], vec![H]);
        for outer in &a {
            for x in 0..NAMES {
                for inner in &a {
                    for arg in e {
                        na.push(app(outer.fill(&lam(x, inner.clone())), arg.clone()));
                    }
                }
                for inner in &a_check {
                    for arg in e {
                        nc.push(app(outer.fill(&lam(x, inner.clone())), arg.clone()));
                    }
                }
            }
            for inner in &a_hat {
                for arg in e {
                    nh.push(app(outer.fill(inner), arg.clone()));
                }
            }
        }
        (a, a_hat, a_check) = (na, nh, nc);
    }
    let a_set = a.iter().cloned().collect();
    Contexts { a, a_hat, a_check, a_set }
}

fn in_e(cx: &Contexts, t: &C, fuel: usize) -> bool {
    if *t == H {
        return true;
    }
    if fuel == 0 || !t.has_hole() {
        return false;
    }
    if let A(f, arg) = t {
        if !arg.has_hole() && in_e(cx, f, fuel - 1) {
            return true;
        }
    }
    for a in cx.a.iter().filter(|a| **a != H) {
        if let Some(s) = a.unfill(t) {
            if in_e(cx, s, fuel - 1) {
                return true;
            }
        }
    }
    for hat in &cx.a_hat {
        let Some(A(p, e2)) = hat.unfill(t) else { continue };
        if !in_e(cx, e2, fuel - 1) {
            continue;
        }
        for a1 in &cx.a {
            let Some(L(x, body)) = a1.unfill(p) else { continue };
            for check in &cx.a_check {
                if !cx.a_set.contains(&hat.fill(check)) {
                    continue;
                }
                let Some(r) = check.unfill(body) else { continue };
                let mut es = Vec::new();
                r.abstract_one(*x, &mut es);
                if es.iter().any(|e| in_e(cx, e, fuel - 1)) {
                    return true;
                }
            }
        }
    }
    false
}

fn member(s: &mut Spec, t: &str, set: &str, depth: usize) -> Result<Membership, String> {
    let o = term(s, t);
    s.engine.member(o, set, depth).map_err(|e| format!("{t}: {e}"))
}

fn steps(s: &mut Spec, t: ObjId) -> Result<Vec<ObjId>, String> {
    let mut st = RelStepper::new(&mut s.engine, "R").map_err(|e| e.to_string())?;
    st.successors(t).map_err(|e| e.to_string())
}

pub fn cbn_suite() -> Outcome {
    let x = |i| V(i);
    let yes: Vec<C> = vec![
        H,
        app(H, x(1)),
        app(lam(0, H), x(1)),
        app(lam(0, app(H, x(0))), x(1)),
        app(lam(0, x(0)), H),
        app(lam(0, app(x(0), x(1))), H),
        app(lam(0, x(0)), app(H, x(1))),
        app(lam(0, app(lam(1, x(0)), x(1))), H),
        app(lam(1, app(lam(0, x(0)), H)), x(0)),
        app(app(lam(1, lam(0, x(0))), x(1)), H),
    ];
    let no: Vec<C> = vec![
        app(x(0), H),
        lam(0, H),
        app(lam(0, x(1)), H),
        app(app(lam(0, x(0)), x(1)), H),
        app(lam(0, app(x(1), x(0))), H),
        app(lam(0, lam(1, x(0))), H),
        app(x(1), app(H, x(0))),
        lam(1, app(H, x(0))),
        app(lam(0, app(x(0), x(0))), app(x(1), H)),
        app(lam(0, x(0)), lam(1, H)),
    ];
    let cx = contexts();
    for c in &yes {
        ensure!(in_e(&cx, c, 4), "decider rejects intended member {}", c.text());
    }
    for c in &no {
        ensure!(!in_e(&cx, c, 4), "decider accepts intended violator {}", c.text());
    }
    let mut s = corpus("cbn.smt");
    for c in &yes {
        let m = member(&mut s, &c.text(), "E", 5)?;
        ensure!(m == Membership::Yes, "{} is {m:?}, expected Yes", c.text());
    }
    for c in &no {
        let m = member(&mut s, &c.text(), "E", 5)?;
        ensure!(m != Membership::Yes, "{} is Yes, expected No or UnknownAtDepth", c.text());
    }

    let redexes = [
        (r"(\ x0 . x0 x1) (\ x1 . x1)", r"(\ x1 . x1) x1", Membership::No),
        (r"((\ x1 . \ x0 . x0) x1) (\ x1 . x1)", r"(\ x1 . \ x1 . x1) x1", Membership::Yes),
        (r"(\ x0 . (\ x1 . x0) x1) (\ x1 . x1)", r"(\ x1 . \ x1 . x1) x1", Membership::Yes),
    ];
    for (from, to, answer) in redexes {
        let t = term(&mut s, from);
        let want = term(&mut s, to);
        let got = steps(&mut s, t)?;
        ensure!(got == [want], "{from} stepped to {:?}", got.iter().map(|o| s.print(*o)).collect::<Vec<_>>());
        for (set, expect) in [("e", Membership::Yes), ("a", answer)] {
            let m = member(&mut s, to, set, 5)?;
            ensure!(m == expect, "{to} in {set}: {m:?}");
        }
        // `[] x0` is not in A, so no Â frame admits this one.
        let stuck = term(&mut s, r"(\ x0 . x0) (\ x1 . x1) x0");
        ensure!(steps(&mut s, stuck)?.is_empty(), "the rule fired under `[] x0`");
    }
    Ok(format!("10 members Yes, 10 violators not Yes (A/Â/Ǎ: {}/{}/{} contexts); 3 redexes step into se", cx.a.len(), cx.a_hat.len(), cx.a_check.len()))
}
