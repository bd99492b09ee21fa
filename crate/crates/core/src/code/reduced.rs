//! Bounded coset-leader weights, used as reduced weights of residual errors.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::bits::BitVec;
use crate::combin::for_each_combination;
use crate::matrix::GF2Matrix;

use super::{CssCode, PauliType, TargetState};

/// Reduced weight, exact up to the table's `w_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReducedWeight {
    Exact(usize),
    Over(usize),
}

impl ReducedWeight {
    /// True iff the weight is at least `w`.
    pub fn at_least(self, w: usize) -> bool {
        match self {
            ReducedWeight::Exact(x) => x >= w,
            ReducedWeight::Over(m) => m + 1 >= w,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            ReducedWeight::Exact(x) => Some(x),
            ReducedWeight::Over(_) => None,
        }
    }
}

impl fmt::Display for ReducedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducedWeight::Exact(x) => write!(f, "{x}"),
            ReducedWeight::Over(m) => write!(f, ">{m}"),
        }
    }
}

impl Serialize for ReducedWeight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReducedWeight::Exact(x) => s.serialize_u64(*x as u64),
            ReducedWeight::Over(m) => s.serialize_str(&format!(">{m}")),
        }
    }
}

/// Minimum weights of the cosets `e + G` for a fixed group `G`, answered
/// exactly up to `w_max`.
///
/// Cosets are keyed by `K · eᵀ` with `K` spanning `G^⊥`. A table holds the
/// lightest representative weight for every key reachable with at most
/// `⌈w_max/2⌉` flips; a query adds up to `⌊w_max/2⌋` further flips and looks
/// the remainder up.
#[derive(Clone)]
pub struct CosetWeightTable {
    n: usize,
    w_max: usize,
    half: usize,
    check: GF2Matrix,
    cols: Vec<BitVec>,
    table: HashMap<BitVec, u8>,
}

impl CosetWeightTable {
    pub fn new(group: &GF2Matrix, w_max: usize) -> Self {
        let n = group.num_cols();
        let check = group.kernel();
        let cols = check.transpose().rows().to_vec();
        let half = w_max.div_ceil(2);
        let mut table = HashMap::new();
        let r = check.num_rows();
        for w in 0..=half.min(n) {
            for_each_combination(n, w, |idx| {
                let mut s = BitVec::zeros(r);
                for &j in idx {
                    s.xor_assign(&cols[j]);
                }
                table.entry(s).or_insert(w as u8);
            });
        }
        Self {
            n,
            w_max,
            half,
            check,
            cols,
            table,
        }
    }

    pub fn for_code(code: &CssCode, pauli: PauliType, target: TargetState, w_max: usize) -> Self {
        Self::new(&code.stabilizing_group(pauli, target), w_max)
    }

    pub fn w_max(&self) -> usize {
        self.w_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn key(&self, e: &BitVec) -> BitVec {
        self.check.mul_vec_unchecked(e)
    }

    pub fn reduced_weight(&self, e: &BitVec) -> ReducedWeight {
        assert_eq!(e.len(), self.n);
        self.weight_of_key(&self.key(e))
    }

    pub fn weight_of_key(&self, s: &BitVec) -> ReducedWeight {
        if let Some(&w) = self.table.get(s) {
            return ReducedWeight::Exact(w as usize);
        }
        let rest = self.w_max - self.half;
        let mut best = usize::MAX;
        let mut probe = s.clone();
        for j in 1..=rest.min(self.n) {
            if j + self.half + 1 > best {
                break;
            }
            for_each_combination(self.n, j, |idx| {
                probe.clone_from(s);
                for &i in idx {
                    probe.xor_assign(&self.cols[i]);
                }
                if let Some(&w) = self.table.get(&probe) {
                    best = best.min(w as usize + j);
                }
            });
        }
        if best <= self.w_max {
            ReducedWeight::Exact(best)
        } else {
            ReducedWeight::Over(self.w_max)
        }
    }
}

/// One-shot reduced weight of `e` on the `|0_L⟩` state of `code`.
pub fn reduced_weight(code: &CssCode, e: &BitVec, pauli: PauliType, w_max: usize) -> ReducedWeight {
    CosetWeightTable::for_code(code, pauli, TargetState::Zero, w_max).reduced_weight(e)
}
