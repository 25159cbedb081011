//! Bounded searches over one-step rewrite relations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::Result;
use crate::term::ObjId;

/// One rewrite `from → to` with its witness: `from = context⟨redex⟩`,
/// `to = context⟨contractum⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub from: ObjId,
    pub to: ObjId,
    pub context: ObjId,
    pub redex: ObjId,
    pub contractum: ObjId,
}

pub trait Stepper {
    /// All one-step rewrites of `t`.
    fn step(&mut self, t: ObjId) -> Result<Vec<Rewrite>>;

    fn successors(&mut self, t: ObjId) -> Result<Vec<ObjId>> {
        let mut out: Vec<ObjId> = Vec::new();
        for r in self.step(t)? {
            if !out.contains(&r.to) {
                out.push(r.to);
            }
        }
        Ok(out)
    }
}

/// Result of a breadth-first search from a start object.
#[derive(Debug, Clone, Default)]
pub struct Reach {
    /// Frontiers by distance; `layers[0]` is the start.
    pub layers: Vec<Vec<ObjId>>,
    /// Objects found to have no successors.
    pub normal: BTreeSet<ObjId>,
    /// The step bound cut the search short.
    pub truncated: bool,
}

impl Reach {
    pub fn all(&self) -> impl Iterator<Item = ObjId> + '_ {
        self.layers.iter().flatten().copied()
    }

    pub fn contains(&self, o: ObjId) -> bool {
        self.all().any(|x| x == o)
    }
}

/// Objects reachable in at most `max_steps` steps; cycles are detected by
/// identity.
pub fn reachable<S: Stepper + ?Sized>(s: &mut S, start: ObjId, max_steps: usize) -> Result<Reach> {
    let mut seen = HashSet::new();
    seen.insert(start);
    let mut r = Reach { layers: alloc::vec![alloc::vec![start]], ..Reach::default() };
    for depth in 0.. {
        let frontier = r.layers.last().cloned().unwrap_or_default();
        let mut next = Vec::new();
        for t in frontier {
            let succ = s.successors(t)?;
            if succ.is_empty() {
                r.normal.insert(t);
                continue;
            }
            if depth >= max_steps {
                r.truncated = true;
                continue;
            }
            for n in succ {
                if seen.insert(n) {
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        r.layers.push(next);
    }
    Ok(r)
}

/// Normal forms reachable within the bound, and whether the bound was hit.
pub fn normal_forms<S: Stepper + ?Sized>(s: &mut S, start: ObjId, max_steps: usize) -> Result<(BTreeSet<ObjId>, bool)> {
    let r = reachable(s, start, max_steps)?;
    Ok((r.normal, r.truncated))
}

/// Reflexive-transitive closure test: `Some(true)` when `b` is reached,
/// `Some(false)` when the search finished without it, `None` when cut off.
pub fn refl_trans<S: Stepper + ?Sized>(s: &mut S, a: ObjId, b: ObjId, max_steps: usize) -> Result<Option<bool>> {
    if a == b {
        return Ok(Some(true));
    }
    let r = reachable(s, a, max_steps)?;
    Ok(if r.contains(b) {
        Some(true)
    } else if r.truncated {
        None
    } else {
        Some(false)
    })
}

/// Reflexive-symmetric-transitive closure, semi-decided by a common
/// reduct: `Some(true)` when the two searches meet. Conversions that need
/// expansion steps are not found, so a miss is reported as `None`.
pub fn refl_sym_trans<S: Stepper + ?Sized>(s: &mut S, a: ObjId, b: ObjId, max_steps: usize) -> Result<Option<bool>> {
    if a == b {
        return Ok(Some(true));
    }
    let ra = reachable(s, a, max_steps)?;
    let rb = reachable(s, b, max_steps)?;
    let left: HashSet<ObjId> = ra.all().collect();
    Ok(if rb.all().any(|x| left.contains(&x)) { Some(true) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// i → i+1 below a limit, on raw ids.
    struct Count(u32);

    impl Stepper for Count {
        fn step(&mut self, t: ObjId) -> Result<Vec<Rewrite>> {
            if t.0 >= self.0 {
                return Ok(Vec::new());
            }
            let to = ObjId(t.0 + 1);
            Ok(alloc::vec![Rewrite { from: t, to, context: ObjId::HOLE, redex: t, contractum: to }])
        }
    }

    #[test]
    fn chain_search() {
        let mut s = Count(5);
        let (nf, cut) = normal_forms(&mut s, ObjId(1), 10).unwrap();
        assert_eq!(nf, BTreeSet::from([ObjId(5)]));
        assert!(!cut);
        let (nf, cut) = normal_forms(&mut s, ObjId(1), 2).unwrap();
        assert!(nf.is_empty());
        assert!(cut);
        assert_eq!(refl_trans(&mut s, ObjId(2), ObjId(2), 0).unwrap(), Some(true));
        assert_eq!(refl_trans(&mut s, ObjId(2), ObjId(4), 10).unwrap(), Some(true));
        assert_eq!(refl_trans(&mut s, ObjId(4), ObjId(2), 10).unwrap(), Some(false));
        assert_eq!(refl_sym_trans(&mut s, ObjId(4), ObjId(2), 10).unwrap(), Some(true));
    }
}
