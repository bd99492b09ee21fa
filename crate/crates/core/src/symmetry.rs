//! The cyclic/Frobenius automorphisms `j ↦ 2^l · j + s (mod n)` of primitive BCH codes.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::matrix::GF2Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutomorphismElement {
    pub n: usize,
    pub m: usize,
    /// Cyclic shift `s` mod `n`.
    pub s: usize,
    /// Frobenius power `l` mod `m`.
    pub l: usize,
}

impl AutomorphismElement {
    pub fn new(n: usize, m: usize, s: usize, l: usize) -> Self {
        assert!(n > 0 && m > 0);
        Self {
            n,
            m,
            s: s % n,
            l: l % m,
        }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::new(n, m, 0, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0 && self.l == 0
    }

    fn scale(&self) -> usize {
        let mut a = 1usize;
        for _ in 0..self.l {
            a = a * 2 % self.n;
        }
        a
    }

    /// Image of coordinate `j`.
    pub fn map(&self, j: usize) -> usize {
        (self.scale() * j + self.s) % self.n
    }

    /// Realized permutation as an explicit table.
    pub fn permutation(&self) -> Vec<usize> {
        let a = self.scale();
        (0..self.n).map(|j| (a * j + self.s) % self.n).collect()
    }

    /// `out[π(j)] = v[j]`
    pub fn apply(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let a = self.scale();
        Ok(BitVec::from_indices(
            self.n,
            v.iter_ones().map(|j| (a * j + self.s) % self.n),
        ))
    }

    /// `π_{a∘b} = π_a ∘ π_b`
    pub fn compose(&self, b: &AutomorphismElement) -> AutomorphismElement {
        assert_eq!((self.n, self.m), (b.n, b.m), "elements of different groups");
        AutomorphismElement::new(
            self.n,
            self.m,
            self.s + self.scale() * b.s,
            self.l + b.l,
        )
    }

    pub fn inverse(&self) -> AutomorphismElement {
        let l_inv = (self.m - self.l) % self.m;
        let inv_scale = AutomorphismElement::new(self.n, self.m, 0, l_inv).scale();
        // π^{-1}(y) = 2^{-l} (y - s)
        AutomorphismElement::new(
            self.n,
            self.m,
            (self.n - inv_scale * self.s % self.n) % self.n,
            l_inv,
        )
    }

    /// Parses the canonical text form `R^s F^l` (either factor may be absent, `I` is the identity).
    pub fn parse(text: &str, n: usize, m: usize) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse automorphism {text:?}"));
        let cleaned = text.replace(['·', '*'], " ");
        let (mut s, mut l) = (0usize, 0usize);
        let mut seen_f = false;
        let mut any = false;
        for tok in cleaned.split_whitespace() {
            any = true;
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e = e.trim_matches(|c| c == '{' || c == '}');
                    (b, e.parse::<usize>().map_err(|_| bad())?)
                }
                None => (tok, 1),
            };
            match base {
                "I" => {}
                // R after F would need the conjugation rule; only R^s F^l is canonical
                "R" if !seen_f => s += exp,
                "F" => {
                    seen_f = true;
                    l += exp;
                }
                _ => return Err(bad()),
            }
        }
        if !any {
            return Err(bad());
        }
        Ok(Self::new(n, m, s, l))
    }
}

impl fmt::Display for AutomorphismElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.s {
            0 => None,
            s => Some(format!("R^{s}")),
        };
        let fr = match self.l {
            0 => None,
            1 => Some("F".to_string()),
            l => Some(format!("F^{l}")),
        };
        match (r, fr) {
            (None, None) => write!(f, "I"),
            (Some(r), None) => write!(f, "{r}"),
            (None, Some(fr)) => write!(f, "{fr}"),
            (Some(r), Some(fr)) => write!(f, "{r} {fr}"),
        }
    }
}

/// Every element of `C_n ⋊ F_m`, ordered by `(s, l)`.
pub fn all_elements(n: usize, m: usize) -> Vec<AutomorphismElement> {
    (0..n)
        .flat_map(|s| (0..m).map(move |l| AutomorphismElement::new(n, m, s, l)))
        .collect()
}

fn row_space_invariant(h: &GF2Matrix, perm: &[usize]) -> bool {
    h.permute_columns(perm).same_row_space(h)
}

/// True iff permuting coordinates by `perm` fixes both check row spaces.
pub fn verify_code_automorphism(code: &CssCode, perm: &AutomorphismElement) -> bool {
    if perm.n != code.n {
        return false;
    }
    let p = perm.permutation();
    row_space_invariant(&code.h_x, &p) && row_space_invariant(&code.h_z, &p)
}

/// Same test for an arbitrary coordinate permutation.
pub fn verify_permutation(code: &CssCode, perm: &[usize]) -> bool {
    perm.len() == code.n && row_space_invariant(&code.h_x, perm) && row_space_invariant(&code.h_z, perm)
}

impl FromStr for AutomorphismElement {
    type Err = Error;

    /// Parses `n m text`, e.g. `"31 5 R^6 F"`, mainly for command lines.
    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.splitn(3, ' ');
        let n = it.next().and_then(|v| v.parse().ok());
        let m = it.next().and_then(|v| v.parse().ok());
        match (n, m, it.next()) {
            (Some(n), Some(m), Some(rest)) => Self::parse(rest, n, m),
            _ => Err(Error::Invalid(format!("expected \"n m element\", got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::quantum_bch;
    use crate::gf2::FieldSpec;
    use proptest::prelude::*;

    #[test]
    fn shift_and_identity() {
        let v = BitVec::from_bit_str("1000000").unwrap();
        let r = AutomorphismElement::new(7, 3, 1, 0);
        assert_eq!(r.apply(&v).unwrap().to_string(), "0100000");
        assert_eq!(AutomorphismElement::identity(7, 3).apply(&v).unwrap(), v);
        assert!(r.apply(&BitVec::zeros(6)).is_err());
    }

    #[test]
    fn frobenius_orbits() {
        let f = AutomorphismElement::new(7, 3, 0, 1);
        assert_eq!(f.map(0), 0);
        assert_eq!((f.map(1), f.map(2), f.map(4)), (2, 4, 1));
    }

    #[test]
    fn composition_rules() {
        let ra = AutomorphismElement::new(7, 3, 3, 0);
        let rb = AutomorphismElement::new(7, 3, 6, 0);
        assert_eq!(ra.compose(&rb), AutomorphismElement::new(7, 3, 2, 0));
        let f = AutomorphismElement::new(7, 3, 0, 1);
        let r = AutomorphismElement::new(7, 3, 1, 0);
        let fr = f.compose(&r);
        assert_eq!(fr, AutomorphismElement::new(7, 3, 2, 1));
        for j in 0..7 {
            assert_eq!(fr.map(j), f.map(r.map(j)));
        }
        let e = AutomorphismElement::identity(7, 3);
        assert_eq!(e.compose(&fr), fr);
    }

    #[test]
    fn text_form() {
        for (t, s, l) in [("I", 0, 0), ("R^6", 6, 0), ("F", 0, 1), ("R^12 F", 12, 1), ("R^3 F^2", 3, 2)] {
            let a = AutomorphismElement::parse(t, 31, 5).unwrap();
            assert_eq!((a.s, a.l), (s, l));
            assert_eq!(a.to_string(), t);
        }
        assert!(AutomorphismElement::parse("F R^2", 31, 5).is_err());
        assert!(AutomorphismElement::parse("Q^2", 31, 5).is_err());
        assert!(AutomorphismElement::parse("", 31, 5).is_err());
        assert_eq!("31 5 R^12 F".parse::<AutomorphismElement>().unwrap().s, 12);
    }

    #[test]
    fn code_automorphisms() {
        let f = FieldSpec::new(5).unwrap();
        let code = quantum_bch(&f, 5).unwrap().1;
        assert!(verify_code_automorphism(&code, &AutomorphismElement::new(31, 5, 1, 0)));
        assert!(verify_code_automorphism(&code, &AutomorphismElement::new(31, 5, 0, 1)));
        let steane = quantum_bch(&FieldSpec::new(3).unwrap(), 3).unwrap().1;
        let mut swap: Vec<usize> = (0..7).collect();
        swap.swap(0, 1);
        assert!(!verify_permutation(&steane, &swap));
        let all = all_elements(7, 3);
        assert_eq!(all.len(), 21);
        let distinct: std::collections::HashSet<_> = all.iter().map(|a| a.permutation()).collect();
        assert_eq!(distinct.len(), 21);
        assert!(all.iter().all(|a| verify_code_automorphism(&steane, a)));
    }

    proptest! {
        #[test]
        fn group_laws(s1 in 0usize..31, l1 in 0usize..5, s2 in 0usize..31, l2 in 0usize..5, bits in proptest::collection::vec(any::<bool>(), 31)) {
            let a = AutomorphismElement::new(31, 5, s1, l1);
            let b = AutomorphismElement::new(31, 5, s2, l2);
            let ab = a.compose(&b);
            let v = BitVec::from_bools(&bits);
            prop_assert_eq!(ab.apply(&v).unwrap(), a.apply(&b.apply(&v).unwrap()).unwrap());
            prop_assert_eq!(a.apply(&v).unwrap().count_ones(), v.count_ones());
            prop_assert!(a.compose(&a.inverse()).is_identity());
            let mut p = a.permutation();
            p.sort_unstable();
            prop_assert_eq!(p, (0..31).collect::<Vec<_>>());
        }
    }
}
