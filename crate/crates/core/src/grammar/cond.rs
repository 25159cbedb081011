use alloc::collections::BTreeSet;

use crate::term::ObjId;
use crate::universe::Universe;

/// Three-valued outcome of a side condition. `Unknown` arises when a
/// membership test cannot be settled at the depth in question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

impl core::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

/// Labels of a field list: the leading child of each cell along the chain
/// of trailing children, until something that is not a cell.
pub(crate) fn labels(u: &Universe, mut r: ObjId) -> BTreeSet<ObjId> {
    let mut out = BTreeSet::new();
    for _ in 0..u.len() {
        if r.is_hole() {
            break;
        }
        let kids = u.arrangement(r).objs();
        if kids.len() < 2 {
            break;
        }
        out.insert(kids[0]);
        r = kids[kids.len() - 1];
    }
    out
}
