//! Strata computed directly from the production rules. A set reads the
//! sets declared before it at the same depth and itself and later sets
//! one depth down.

use std::collections::{BTreeSet, HashMap};

use smt::Spec;
use smt_core::ObjId;

use super::{corpus, ensure, term, Outcome};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum T {
    Name(&'static str, u64),
    Eps,
    Node(&'static str, Vec<T>),
}

use T::{Eps, Name, Node};

type Strata = Vec<Vec<T>>;

fn names(g: &'static str, fresh: u64) -> Vec<T> {
    (0..fresh).map(|i| Name(g, i)).collect()
}

fn lambda(fresh: u64, depth: usize) -> Strata {
    let mut exp: Strata = vec![Vec::new()];
    for d in 1..=depth {
        let prev = &exp[d - 1];
        let mut out = names("x", fresh);
        for x in names("x", fresh) {
            for e in prev {
                out.push(Node("lam", vec![x.clone(), e.clone()]));
            }
        }
        for a in prev {
            for b in prev {
                out.push(Node("app", vec![a.clone(), b.clone()]));
            }
        }
        exp.push(out);
    }
    exp
}

fn types(fresh: u64, depth: usize) -> (Strata, Strata) {
    let mut var: Strata = vec![Vec::new()];
    let mut ty: Strata = vec![Vec::new()];
    for d in 1..=depth {
        var.push(names("ty", fresh));
        let mut out = var[d].clone();
        for a in &ty[d - 1] {
            for b in &ty[d - 1] {
                out.push(Node("arrow", vec![a.clone(), b.clone()]));
            }
        }
        ty.push(out);
    }
    (var, ty)
}

fn labels(fields: &T) -> Vec<T> {
    match fields {
        Node(_, kids) if kids.len() == 3 => {
            let mut out = labels(&kids[2]);
            out.push(kids[0].clone());
            out
        }
        _ => Vec::new(),
    }
}

struct Records {
    var: Strata,
    ty: Strata,
    texp: Strata,
    type_rec: Strata,
    record_type: Strata,
    term_rec: Strata,
}

fn records(fresh: u64, depth: usize) -> Records {
    let (var, ty) = types(fresh, depth);
    let mut r = Records { var, ty, texp: vec![vec![]], type_rec: vec![vec![]], record_type: vec![vec![]], term_rec: vec![vec![]] };
    for d in 1..=depth {
        let mut texp = names("x", fresh);
        for a in &r.texp[d - 1] {
            for b in &r.texp[d - 1] {
                texp.push(Node("app", vec![a.clone(), b.clone()]));
            }
        }
        for x in names("x", fresh) {
            for t in &r.ty[d] {
                for e in &r.texp[d - 1] {
                    texp.push(Node("tlam", vec![x.clone(), t.clone(), e.clone()]));
                }
            }
        }
        for f in &r.term_rec[d - 1] {
            texp.push(Node("braces", vec![f.clone()]));
        }
        for e in &r.texp[d - 1] {
            for l in names("l", fresh) {
                texp.push(Node("proj", vec![e.clone(), l]));
            }
        }
        let mut type_rec = vec![Eps];
        for l in names("l", fresh) {
            for t in &r.ty[d] {
                for rest in &r.type_rec[d - 1] {
                    if !labels(rest).contains(&l) {
                        type_rec.push(Node("tfield", vec![l.clone(), t.clone(), rest.clone()]));
                    }
                }
            }
        }
        let mut record_type = r.ty[d].clone();
        record_type.extend(type_rec.iter().map(|f| Node("braces", vec![f.clone()])));
        let mut term_rec = vec![Eps];
        for l in names("l", fresh) {
            for e in &texp {
                for rest in &r.term_rec[d - 1] {
                    if !labels(rest).contains(&l) {
                        term_rec.push(Node("field", vec![l.clone(), e.clone(), rest.clone()]));
                    }
                }
            }
        }
        r.texp.push(texp);
        r.type_rec.push(type_rec);
        r.record_type.push(record_type);
        r.term_rec.push(term_rec);
    }
    r
}

pub struct Build {
    ctx: HashMap<&'static str, ObjId>,
}

impl Build {
    pub fn new(s: &mut Spec, kinds: &[(&'static str, &str)]) -> Build {
        Build { ctx: kinds.iter().map(|(k, text)| (*k, term(s, text))).collect() }
    }

    pub fn obj(&self, s: &mut Spec, t: &T) -> ObjId {
        match t {
            Name(g, i) => term(s, &format!("{g}{i}")),
            Eps => s.engine.u.epsilon(),
            Node(k, kids) => {
                let args: Vec<ObjId> = kids.iter().map(|c| self.obj(s, c)).collect();
                s.engine.u.fill(self.ctx[k], &args).unwrap()
            }
        }
    }
}

/// Compares every stratum of every listed set and checks monotonicity.
fn compare(s: &mut Spec, b: &Build, sets: &[(&str, &Strata)]) -> Result<usize, String> {
    let mut compared = 0;
    for (name, strata) in sets {
        let mut prev: BTreeSet<ObjId> = BTreeSet::new();
        for (d, expected) in strata.iter().enumerate() {
            let want: BTreeSet<ObjId> = expected.iter().map(|t| b.obj(s, t)).collect();
            let got: BTreeSet<ObjId> = s.engine.enumerate(name, d).map_err(|e| format!("{name}^{d}: {e}"))?.into_iter().collect();
            if got != want {
                let extra: Vec<String> = got.difference(&want).take(3).map(|o| s.print(*o)).collect();
                let missing: Vec<String> = want.difference(&got).take(3).map(|o| s.print(*o)).collect();
                return Err(format!("{name}^{d}: {} vs {} expected; extra {extra:?}, missing {missing:?}", got.len(), want.len()));
            }
            ensure!(prev.is_subset(&got), "{name}^{} is not contained in {name}^{d}", d - 1);
            compared += got.len();
            prev = got;
        }
    }
    Ok(compared)
}

const LAMBDA_CTX: [(&str, &str); 2] = [("app", "[] []"), ("lam", r"\ [] . []")];

pub fn fixpoint_suite() -> Outcome {
    let mut total = 0;
    for file in ["lambda.smt", "lambda-alpha.smt"] {
        let mut s = corpus(file).with_fresh(3);
        let b = Build::new(&mut s, &LAMBDA_CTX);
        total += compare(&mut s, &b, &[("exp", &lambda(3, 3))])?;
    }
    let mut s = corpus("stlc.smt").with_fresh(3);
    let b = Build::new(&mut s, &[("arrow", "[] -> []")]);
    let (var, ty) = types(3, 3);
    total += compare(&mut s, &b, &[("Ty-Variable", &var), ("Simple-Type", &ty)])?;
    for (fresh, depth) in [(1, 3), (2, 2)] {
        let mut s = corpus("records.smt").with_fresh(fresh);
        let b = Build::new(
            &mut s,
            &[
                ("app", "[] []"),
                ("tlam", r"\ [] : [] . []"),
                ("arrow", "[] -> []"),
                ("braces", "{ [] }"),
                ("proj", "[] . []"),
                ("tfield", "[] : [] , []"),
                ("field", "[] = [] , []"),
            ],
        );
        let r = records(fresh, depth);
        total += compare(
            &mut s,
            &b,
            &[
                ("Ty-Variable", &r.var),
                ("Simple-Type", &r.ty),
                ("texp", &r.texp),
                ("Type-Records", &r.type_rec),
                ("Record-Type", &r.record_type),
                ("Term-Records", &r.term_rec),
            ],
        )?;
    }
    Ok(format!("lambda (both readings), stlc and records agree at depths 0-3; {total} members checked; monotone"))
}
