//! Plain λ-terms with named variables, and deciders written from the
//! definitions: swap closure for renaming, decomposition search for
//! substitution.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use smt::Spec;
use smt_core::{Error, ObjId};

use super::{corpus, ensure, term, Outcome};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lam {
    V(u8),
    L(u8, Rc<Lam>),
    A(Rc<Lam>, Rc<Lam>),
}

use Lam::{A, L, V};

pub fn lam(x: u8, b: Lam) -> Lam {
    L(x, Rc::new(b))
}

pub fn app(a: Lam, b: Lam) -> Lam {
    A(Rc::new(a), Rc::new(b))
}

impl Lam {
    /// Free variables as a bit set.
    pub fn fv(&self) -> u64 {
        match self {
            V(x) => 1 << x,
            L(x, b) => b.fv() & !(1 << x),
            A(a, b) => a.fv() | b.fv(),
        }
    }

    pub fn swap(&self, p: u8, q: u8) -> Lam {
        let s = |v: u8| if v == p { q } else if v == q { p } else { v };
        match self {
            V(x) => V(s(*x)),
            L(x, b) => lam(s(*x), b.swap(p, q)),
            A(a, b) => app(a.swap(p, q), b.swap(p, q)),
        }
    }

    /// Fully parenthesized source text.
    pub fn text(&self) -> String {
        match self {
            V(x) => format!("x{x}"),
            L(x, b) => format!(r"(\ x{x} . {})", b.text()),
            A(a, b) => format!("({} {})", a.text(), b.text()),
        }
    }

    /// Nameless form with free names kept.
    fn nameless(&self, env: &mut Vec<u8>) -> String {
        match self {
            V(x) => match env.iter().rev().position(|y| y == x) {
                Some(i) => format!("#{i}"),
                None => format!("x{x}"),
            },
            L(x, b) => {
                env.push(*x);
                let s = format!("(λ {})", b.nameless(env));
                env.pop();
                s
            }
            A(a, b) => format!("({} {})", a.nameless(env), b.nameless(env)),
        }
    }
}

/// All terms with at most `k` λ and application nodes over `n` names.
pub fn all_terms(k: usize, n: u8) -> Vec<Lam> {
    let mut by_size: Vec<Vec<Lam>> = vec![(0..n).map(V).collect()];
    for size in 1..=k {
        let mut out = Vec::new();
        for b in &by_size[size - 1] {
            for x in 0..n {
                out.push(lam(x, b.clone()));
            }
        }
        for i in 0..size {
            for a in &by_size[i] {
                for b in &by_size[size - 1 - i] {
                    out.push(app(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(out);
    }
    by_size.concat()
}

/// One renaming step anywhere: swap two names in a subterm in which
/// neither is free.
fn swap_steps(t: &Lam, n: u8, out: &mut Vec<Lam>) {
    let fv = t.fv();
    for p in 0..n {
        for q in p + 1..n {
            if fv & (1 << p) == 0 && fv & (1 << q) == 0 {
                let s = t.swap(p, q);
                if s != *t {
                    out.push(s);
                }
            }
        }
    }
    match t {
        V(_) => {}
        L(x, b) => {
            let mut inner = Vec::new();
            swap_steps(b, n, &mut inner);
            out.extend(inner.into_iter().map(|b| lam(*x, b)));
        }
        A(a, b) => {
            let mut inner = Vec::new();
            swap_steps(a, n, &mut inner);
            out.extend(inner.into_iter().map(|a2| app(a2, (**b).clone())));
            let mut inner = Vec::new();
            swap_steps(b, n, &mut inner);
            out.extend(inner.into_iter().map(|b2| app((**a).clone(), b2)));
        }
    }
}

/// Classes of the swap closure, exploring terms over `n` names.
pub struct SwapClasses {
    n: u8,
    class: HashMap<Lam, usize>,
    next: usize,
}

impl SwapClasses {
    pub fn new(n: u8) -> SwapClasses {
        SwapClasses { n, class: HashMap::new(), next: 0 }
    }

    pub fn of(&mut self, t: &Lam) -> usize {
        if let Some(c) = self.class.get(t) {
            return *c;
        }
        let c = self.next;
        self.next += 1;
        self.class.insert(t.clone(), c);
        let mut queue = VecDeque::from([t.clone()]);
        let mut steps = Vec::new();
        while let Some(u) = queue.pop_front() {
            steps.clear();
            swap_steps(&u, self.n, &mut steps);
            for s in steps.drain(..) {
                if !self.class.contains_key(&s) {
                    self.class.insert(s.clone(), c);
                    queue.push_back(s);
                }
            }
        }
        c
    }
}

/// Builds a term in a lambda spec through its constructors.
pub struct Builder {
    app: ObjId,
    lam: ObjId,
    names: Vec<ObjId>,
}

impl Builder {
    pub fn new(s: &mut Spec, n: u8) -> Builder {
        let app = term(s, "[] []");
        let lam = term(s, r"\ [] . []");
        let names = (0..n).map(|i| term(s, &format!("x{i}"))).collect();
        Builder { app, lam, names }
    }

    pub fn build(&self, s: &mut Spec, t: &Lam) -> ObjId {
        match t {
            V(x) => self.names[*x as usize],
            L(x, b) => {
                let b = self.build(s, b);
                s.engine.u.fill(self.lam, &[self.names[*x as usize], b]).unwrap()
            }
            A(a, b) => {
                let a = self.build(s, a);
                let b = self.build(s, b);
                s.engine.u.fill(self.app, &[a, b]).unwrap()
            }
        }
    }
}

pub fn alpha_suite() -> Outcome {
    let mut plain = corpus("lambda.smt");
    let mut alpha = corpus("lambda-alpha.smt");
    let a1 = term(&mut alpha, r"\ x1 . x1");
    let a2 = term(&mut alpha, r"\ x2 . x2");
    ensure!(a1 == a2, "modulo alpha: λx1.x1 and λx2.x2 differ");
    let p1 = term(&mut plain, r"\ x1 . x1");
    let p2 = term(&mut plain, r"\ x2 . x2");
    ensure!(p1 != p2, "without alpha: λx1.x1 and λx2.x2 coincide");

    let terms = all_terms(4, 3);
    let b = Builder::new(&mut alpha, 3);
    let mut oracle = SwapClasses::new(4);
    let mut obj_class: HashMap<ObjId, usize> = HashMap::new();
    let mut class_obj: HashMap<usize, ObjId> = HashMap::new();
    let mut disagreements = 0usize;
    for t in &terms {
        let o = b.build(&mut alpha, t);
        let c = oracle.of(t);
        if *obj_class.entry(o).or_insert(c) != c || *class_obj.entry(c).or_insert(o) != o {
            disagreements += 1;
        }
    }
    ensure!(disagreements == 0, "{disagreements} disagreements with the swap closure");
    Ok(format!("{} terms, {} classes, 0 disagreements", terms.len(), class_obj.len()))
}

/// Names a renamed binder may take in the decomposition search.
const POOL: u8 = 6;

/// Substitution by searching decompositions: a λ-node decomposes once per
/// admissible binder name (only its own binder without renaming). A
/// decomposition binding the replaced name or a name free in the
/// replacement is undefined; defined ones must agree.
pub fn oracle_subst(t: &Lam, x: u8, r: &Lam, alpha: bool) -> Option<Lam> {
    match t {
        V(y) if *y == x => Some(r.clone()),
        V(_) => Some(t.clone()),
        A(a, b) => Some(app(oracle_subst(a, x, r, alpha)?, oracle_subst(b, x, r, alpha)?)),
        L(..) if t.fv() & (1 << x) == 0 => Some(t.clone()),
        L(y, b) => {
            let fv_t = t.fv();
            let fv_r = r.fv();
            let binders: Vec<u8> = if alpha { (0..POOL).filter(|z| z == y || fv_t & (1 << z) == 0).collect() } else { vec![*y] };
            let mut result: Option<Lam> = None;
            for z in binders {
                if z == x || fv_r & (1 << z) != 0 {
                    continue;
                }
                let body = b.swap(*y, z);
                let Some(sub) = oracle_subst(&body, x, r, alpha) else { continue };
                let cand = lam(z, sub);
                match &result {
                    None => result = Some(cand),
                    Some(prev) => {
                        let same = if alpha { alpha_eq(prev, &cand) } else { *prev == cand };
                        if !same {
                            return None;
                        }
                    }
                }
            }
            result
        }
    }
}

pub fn alpha_eq(a: &Lam, b: &Lam) -> bool {
    a.nameless(&mut Vec::new()) == b.nameless(&mut Vec::new())
}

fn arb_lam() -> impl Strategy<Value = Lam> {
    let leaf = (0u8..3).prop_map(V);
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (0u8..3, inner.clone()).prop_map(|(x, b)| lam(x, b)),
            (inner.clone(), inner).prop_map(|(a, b)| app(a, b)),
        ]
    })
}

pub fn subst_suite() -> Outcome {
    let mut plain = corpus("lambda.smt");
    let mut alpha = corpus("lambda-alpha.smt");
    let capture = |s: &mut Spec| {
        let t = term(s, r"\ x1 . x2");
        let x = term(s, "x2");
        let r = term(s, "x1");
        s.engine.u.substitute(t, x, r)
    };
    let r = capture(&mut plain);
    ensure!(matches!(r, Err(Error::SubstUndefined)), "identity: (λx1.x2)[x2:=x1] gave {r:?}");
    let r = capture(&mut alpha).map_err(|e| format!("modulo alpha: {e}"))?;
    let want = term(&mut alpha, r"\ x5 . x1");
    ensure!(r == want, "modulo alpha: got {}", alpha.print(r));

    let pb = Builder::new(&mut plain, POOL);
    let ab = Builder::new(&mut alpha, POOL);
    let specs = RefCell::new((plain, alpha));
    let counts = RefCell::new([0usize; 4]);
    let config = Config { cases: 200, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (arb_lam(), 0u8..3, arb_lam(), any::<bool>());
    runner
        .run(&strategy, |(t, x, r, use_alpha)| {
            let mut specs = specs.borrow_mut();
            let (s, b) = if use_alpha { (&mut specs.1, &ab) } else { (&mut specs.0, &pb) };
            let (ot, ox, or) = (b.build(s, &t), b.build(s, &V(x)), b.build(s, &r));
            let got = s.engine.u.substitute(ot, ox, or);
            let want = oracle_subst(&t, x, &r, use_alpha);
            counts.borrow_mut()[use_alpha as usize * 2 + want.is_some() as usize] += 1;
            match (got, want) {
                (Err(Error::SubstUndefined), None) => Ok(()),
                (Ok(o), Some(w)) if o == b.build(s, &w) => Ok(()),
                (got, want) => Err(TestCaseError::fail(format!(
                    "{}[x{x} := {}] (alpha {use_alpha}): engine {:?}, oracle {:?}",
                    t.text(),
                    r.text(),
                    got.map(|o| s.print(o)),
                    want.map(|w| w.text())
                ))),
            }
        })
        .map_err(|e| e.to_string())?;
    let c = counts.into_inner();
    Ok(format!(
        "capture case undefined/defined; 200 random instances agree (identity: {} defined, {} undefined; alpha: {} defined, {} undefined)",
        c[1], c[0], c[3], c[2]
    ))
}
