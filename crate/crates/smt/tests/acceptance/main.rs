//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every criterion must finish within `TIME_LIMIT`. Expected values come
//! from small generators and deciders written here against plain Rust
//! data, not from the engine.

mod cbn;
mod fixpoint;
mod oracle;
mod specs;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use smt::{read_term, Spec};
use smt_core::{Error, ObjId, Universe};

const TIME_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}
pub(crate) use ensure;

fn corpus(name: &str) -> Spec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    Spec::load(path.to_str().unwrap()).unwrap_or_else(|d| panic!("{d}"))
}

fn inline(text: &str) -> Spec {
    Spec::parse(text, "<inline>").unwrap_or_else(|d| panic!("{d}"))
}

fn term(s: &mut Spec, t: &str) -> ObjId {
    s.term(t).unwrap_or_else(|d| panic!("{t}: {d}"))
}

fn raw(u: &mut Universe, t: &str) -> ObjId {
    read_term(u, t).unwrap_or_else(|d| panic!("{t}: {d}"))
}

fn printed(s: &mut Spec, objs: impl IntoIterator<Item = ObjId>) -> BTreeSet<String> {
    objs.into_iter().map(|o| s.print(o)).collect()
}

/// Golden fills, plus arity mismatches.
fn fill_suite() -> Outcome {
    let mut u = Universe::new();
    // Square brackets are reserved for holes, so the substitution context
    // uses fullwidth ones.
    let cases: [(&str, &[&str], &str); 5] = [
        ("([] [])", &["O", "O"], "O O"),
        (r"\over{[]}", &["O"], r"\over{O}"),
        ("([] -> O1)", &["(O2 -> O2)"], "(O2 -> O2) -> O1"),
        ("([] ［ [] := [] ］)", &["O1", "O2", "O3"], "O1 ［ O2 := O3 ］"),
        ("[]", &["O"], "O"),
    ];
    for (ctx, args, want) in cases {
        let c = raw(&mut u, ctx);
        let args: Vec<ObjId> = args.iter().map(|a| raw(&mut u, a)).collect();
        let got = u.fill(c, &args).map_err(|e| format!("{ctx}: {e}"))?;
        let expected = raw(&mut u, want);
        ensure!(got == expected, "{ctx} filled with {args:?} is not {want}");
    }
    let c = raw(&mut u, "([] [])");
    let o = raw(&mut u, "O");
    for n in [0, 1, 3] {
        let r = u.fill(c, &vec![o; n]);
        ensure!(matches!(r, Err(Error::ArityMismatch { holes: 2, replacements }) if replacements == n), "{n} arguments gave {r:?}");
    }
    Ok("5 golden fills, 3 arity mismatches".into())
}

const LET_SPEC: &str = r#"
names x;
constructor [] [] prec 20 assoc left;
constructor let [] = [] "in" [] prec 5;
binder let [] = [] "in" [] binds 1 in {1, 3};
"#;

fn free_names_suite() -> Outcome {
    let mut lambda = corpus("lambda.smt");
    let t = term(&mut lambda, r"(\ x1 . (x1 x2)) x3");
    let fv = lambda.engine.u.free_names(t).map_err(|e| e.to_string())?;
    let g = lambda.engine.u.group("x").unwrap();
    let want: BTreeSet<ObjId> = [2, 3].iter().map(|i| lambda.engine.u.name(g, *i).unwrap()).collect();
    ensure!(fv == want, "lambda example: {:?}", printed(&mut lambda, fv));

    let mut lets = inline(LET_SPEC);
    let t = term(&mut lets, "let x1 = x3 in (x1 x2)");
    let fv = lets.engine.u.free_names(t).map_err(|e| e.to_string())?;
    let g = lets.engine.u.group("x").unwrap();
    let want: BTreeSet<ObjId> = [2, 3].iter().map(|i| lets.engine.u.name(g, *i).unwrap()).collect();
    ensure!(fv == want, "let example: {:?}", printed(&mut lets, fv));
    Ok("{x2, x3} twice".into())
}

const APP_LEFT: &str = "constructor [] [] prec 20 assoc left;\n";
const APP_PLAIN: &str = "constructor [] [] prec 20;\n";
const SPLICE: &str = "constructor \"⟨\" [] \"⟩\";\nconstructor ! [];\n";

fn parsing_suite() -> Outcome {
    let mut s = inline(APP_LEFT);
    let app = term(&mut s, "[] []");
    let [o1, o2, o3] = ["O1", "O2", "O3"].map(|a| term(&mut s, a));
    let inner = s.engine.u.fill(app, &[o1, o2]).unwrap();
    let want = s.engine.u.fill(app, &[inner, o3]).unwrap();
    let got = term(&mut s, "O1 O2 O3");
    ensure!(got == want, "O1 O2 O3 did not group to the left");
    ensure!(s.print(got) == "O1 O2 O3", "printed as {}", s.print(got));

    let mut plain = inline(APP_PLAIN);
    match plain.term("O1 O2 O3") {
        Err(d) if d.code == "AmbiguousParse" => {}
        other => return Err(format!("without associativity: {other:?}")),
    }

    let mut sp = inline(SPLICE);
    let outer = term(&mut sp, "⟨ [] ⟩");
    let bang = term(&mut sp, "! []");
    let o = term(&mut sp, "O'");
    let inner = sp.engine.u.fill(bang, &[o]).unwrap();
    let want = sp.engine.u.fill(outer, &[inner]).unwrap();
    let got = term(&mut sp, "⟨ ! O' ⟩");
    ensure!(got == want, "⟨!O'⟩ is not ⟨(!O')⟩");
    let ctors = sp.engine.u.constructors().len();
    ensure!(ctors == 2, "splicing declared {ctors} constructors");
    Ok("left grouping, AmbiguousParse, two-constructor splice".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("hole filling", fill_suite),
        ("free names", free_names_suite),
        ("alpha equivalence", oracle::alpha_suite),
        ("substitution", oracle::subst_suite),
        ("fixed points", fixpoint::fixpoint_suite),
        ("parsing", parsing_suite),
        ("call-by-need contexts", cbn::cbn_suite),
        ("records", specs::records_suite),
        ("rule effects", specs::effects_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let r = match r {
            Ok(_) if took > TIME_LIMIT => Err(format!("took {took:?}, limit {TIME_LIMIT:?}")),
            r => r,
        };
        match r {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({} ms)", i + 1, took.as_millis()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} ({} ms)", i + 1, took.as_millis());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
