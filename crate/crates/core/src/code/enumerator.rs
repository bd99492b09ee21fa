//! Weight enumerators: Gray-code enumeration, MacWilliams transform, and
//! low-weight codeword listing.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bits::BitVec;
use crate::combin::{binomial, binomial_u128, for_each_combination};
use crate::error::{Error, Result};
use crate::gf2::{cyclotomic_cosets, minimal_polynomial, BitPoly, FieldSpec};
use crate::matrix::GF2Matrix;

/// Largest dimension walked codeword by codeword.
pub const DEFAULT_ENUM_BUDGET: usize = 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightEnumerator {
    pub n: usize,
    pub counts: Vec<BigUint>,
}

impl WeightEnumerator {
    pub fn trivial(n: usize) -> Self {
        let mut counts = vec![BigUint::zero(); n + 1];
        counts[0] = BigUint::one();
        Self { n, counts }
    }

    pub fn count(&self, w: usize) -> BigUint {
        self.counts.get(w).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Dimension implied by the total count, if it is a power of two.
    pub fn dimension(&self) -> Option<usize> {
        let t = self.total();
        let d = (t.bits() as usize).checked_sub(1)?;
        (t == BigUint::one() << d).then_some(d)
    }

    /// Smallest nonzero weight, `None` for the zero code.
    pub fn min_distance(&self) -> Option<usize> {
        (1..=self.n).find(|&w| !self.counts[w].is_zero())
    }

    /// Entry-wise difference `self - sub`; fails if any entry goes negative.
    pub fn difference(&self, sub: &WeightEnumerator) -> Result<WeightEnumerator> {
        if self.n != sub.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: sub.n,
            });
        }
        let counts = self
            .counts
            .iter()
            .zip(&sub.counts)
            .enumerate()
            .map(|(w, (a, b))| {
                if a < b {
                    Err(Error::InconsistentEnumerator(format!(
                        "negative difference at weight {w}"
                    )))
                } else {
                    Ok(a - b)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightEnumerator { n: self.n, counts })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(w, "{i},{c}")?;
        }
        Ok(())
    }

    /// Parses `w,count` lines; missing weights are zero.
    pub fn read_csv<R: BufRead>(n: usize, r: R) -> Result<Self> {
        let mut counts = vec![BigUint::zero(); n + 1];
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('w') {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let (w, c) = line.split_once(',').ok_or_else(|| parse_err("expected w,count"))?;
            let w: usize = w.trim().parse().map_err(|_| parse_err("bad weight"))?;
            let c: BigUint = c.trim().parse().map_err(|_| parse_err("bad count"))?;
            if w > n {
                return Err(parse_err("weight exceeds length"));
            }
            counts[w] = c;
        }
        if counts[0] != BigUint::one() {
            return Err(Error::InconsistentEnumerator("A_0 must be 1".into()));
        }
        Ok(Self { n, counts })
    }
}

/// Gray-code walk over the span of `rows` (offset by `start`), accumulating
/// weight histograms of `v` and, if given, of `v + shift`.
fn gray_walk<const W: usize>(
    rows: &[[u64; W]],
    start: [u64; W],
    shift: Option<[u64; W]>,
    hist: &mut [u64],
    hist_shift: &mut [u64],
) {
    let pop = |v: &[u64; W]| v.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    let mut cur = start;
    let k = rows.len();
    let step = |cur: &[u64; W], hist: &mut [u64], hist_shift: &mut [u64]| {
        hist[pop(cur)] += 1;
        if let Some(s) = &shift {
            let mut t = *cur;
            for i in 0..W {
                t[i] ^= s[i];
            }
            hist_shift[pop(&t)] += 1;
        }
    };
    step(&cur, hist, hist_shift);
    for i in 1u64..(1u64 << k) {
        let j = i.trailing_zeros() as usize;
        for (c, r) in cur.iter_mut().zip(&rows[j]) {
            *c ^= r;
        }
        step(&cur, hist, hist_shift);
    }
}

fn pack<const W: usize>(v: &BitVec) -> [u64; W] {
    let mut out = [0u64; W];
    out[..v.words().len()].copy_from_slice(v.words());
    out
}

/// Returns the weight histograms of span(rows) and of `shift + span(rows)`.
fn enumerate_span<const W: usize>(
    n: usize,
    rows: &[BitVec],
    shift: Option<&BitVec>,
) -> (Vec<u64>, Vec<u64>) {
    let packed: Vec<[u64; W]> = rows.iter().map(pack::<W>).collect();
    let shift = shift.map(pack::<W>);
    let k = packed.len();
    // split the top rows into independent chunks
    let split = k.min(6);
    let (low, high) = packed.split_at(k - split);
    (0u64..(1 << split))
        .into_par_iter()
        .map(|prefix| {
            let mut start = [0u64; W];
            for (b, row) in high.iter().enumerate() {
                if prefix >> b & 1 == 1 {
                    for i in 0..W {
                        start[i] ^= row[i];
                    }
                }
            }
            let mut h = vec![0u64; n + 1];
            let mut hs = vec![0u64; n + 1];
            gray_walk::<W>(low, start, shift, &mut h, &mut hs);
            (h, hs)
        })
        .reduce(
            || (vec![0u64; n + 1], vec![0u64; n + 1]),
            |(mut a, mut b), (c, d)| {
                a.iter_mut().zip(&c).for_each(|(x, y)| *x += y);
                b.iter_mut().zip(&d).for_each(|(x, y)| *x += y);
                (a, b)
            },
        )
}

fn enumerate_dispatch(n: usize, rows: &[BitVec], shift: Option<&BitVec>) -> (Vec<u64>, Vec<u64>) {
    match n.div_ceil(64) {
        0 | 1 => enumerate_span::<1>(n, rows, shift),
        2 => enumerate_span::<2>(n, rows, shift),
        3 | 4 => enumerate_span::<4>(n, rows, shift),
        _ => panic!("length {n} above 256 is not supported"),
    }
}

fn to_big(h: &[u64]) -> Vec<BigUint> {
    h.iter().map(|&c| BigUint::from(c)).collect()
}

/// Exact enumerator of the row space of `gen`, walking all `2^dim` codewords.
pub fn weight_enumerator_exhaustive(gen: &GF2Matrix) -> Result<WeightEnumerator> {
    weight_enumerator_with_budget(gen, DEFAULT_ENUM_BUDGET)
}

pub fn weight_enumerator_with_budget(gen: &GF2Matrix, budget: usize) -> Result<WeightEnumerator> {
    let basis = gen.echelon().matrix;
    let dim = basis.num_rows();
    if dim > budget {
        return Err(Error::EnumerationBudget { dim, budget });
    }
    let n = gen.num_cols();
    let (h, _) = enumerate_dispatch(n, basis.rows(), None);
    Ok(WeightEnumerator { n, counts: to_big(&h) })
}

/// Enumerator of the cyclic code generated by `g` over `spec`'s length.
///
/// When the code is too large to walk, one minimal ideal `M` whose nonzero
/// words form a single shift orbit is split off: `D = D' ⊕ M` gives
/// `A(D) = A(D') + n · A(m + D')`, so only `2^(k - m)` words are walked.
pub fn cyclic_weight_enumerator(
    spec: &FieldSpec,
    g: &BitPoly,
    budget: usize,
) -> Result<WeightEnumerator> {
    let n = spec.n();
    let k = n - g.degree().ok_or(Error::DivisionByZero)?;
    let rows_of = |gen: &BitPoly, dim: usize| -> Vec<BitVec> {
        (0..dim)
            .map(|i| super::poly_to_vec(n, &gen.mul(&BitPoly::monomial(i))))
            .collect()
    };
    if k <= budget {
        let (h, _) = enumerate_dispatch(n, &rows_of(g, k), None);
        return Ok(WeightEnumerator { n, counts: to_big(&h) });
    }
    let m = spec.m();
    let ideal = cyclotomic_cosets(n).into_iter().find_map(|c| {
        if c.members.len() != m || gcd(c.representative, n) != 1 {
            return None;
        }
        let mp = minimal_polynomial(spec, c.representative);
        let divides = g.rem(&mp).ok()?.is_zero();
        (!divides).then_some(mp)
    });
    let Some(mp) = ideal else {
        return Err(Error::EnumerationBudget { dim: k, budget });
    };
    if k - m > budget {
        return Err(Error::EnumerationBudget { dim: k - m, budget });
    }
    let g_sub = g.mul(&mp);
    let (word, _) = BitPoly::x_n_minus_1(n).divmod(&mp)?;
    let word_vec = super::poly_to_vec(n, &word);
    let (h_sub, h_coset) = enumerate_dispatch(n, &rows_of(&g_sub, k - m), Some(&word_vec));
    let counts = h_sub
        .iter()
        .zip(&h_coset)
        .map(|(&a, &b)| BigUint::from(a) + BigUint::from(b) * n)
        .collect();
    let e = WeightEnumerator { n, counts };
    debug_assert_eq!(e.dimension(), Some(k));
    Ok(e)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Enumerator of the dual of a `dim`-dimensional code with enumerator `e`.
pub fn macwilliams_transform(e: &WeightEnumerator, dim: usize) -> Result<WeightEnumerator> {
    let n = e.n;
    if e.total() != BigUint::one() << dim {
        return Err(Error::InconsistentEnumerator(format!(
            "total count is not 2^{dim}"
        )));
    }
    let binom: Vec<Vec<BigInt>> = (0..=n)
        .map(|a| (0..=n).map(|b| BigInt::from(binomial(a, b))).collect())
        .collect();
    let counts: Vec<BigInt> = e.counts.iter().map(|c| BigInt::from(c.clone())).collect();
    let denom = BigInt::one() << dim;
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = BigInt::zero();
        for (w, a) in counts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            // Krawtchouk K_j(w) = Σ_i (-1)^i C(w,i) C(n-w, j-i)
            let mut k = BigInt::zero();
            for i in 0..=j.min(w) {
                if j - i > n - w {
                    continue;
                }
                let term = &binom[w][i] * &binom[n - w][j - i];
                if i % 2 == 0 {
                    k += term;
                } else {
                    k -= term;
                }
            }
            acc += a * k;
        }
        if acc.is_negative() || !(&acc % &denom).is_zero() {
            return Err(Error::InconsistentEnumerator(format!(
                "non-integral or negative dual count at weight {j}"
            )));
        }
        out.push((acc / &denom).to_biguint().expect("nonnegative"));
    }
    Ok(WeightEnumerator { n, counts: out })
}

/// All nonzero codewords of `ker(check)` with weight at most `max_w`.
///
/// Weight-`w` words are found by matching the syndromes of their first
/// `⌊w/2⌋` and last `⌈w/2⌉` support positions.
pub fn low_weight_codewords(check: &GF2Matrix, max_w: usize) -> Result<Vec<BitVec>> {
    const TABLE_LIMIT: u128 = 50_000_000;
    let n = check.num_cols();
    let cols: Vec<BitVec> = check.transpose().rows().to_vec();
    let syn = |idx: &[usize]| {
        let mut s = BitVec::zeros(check.num_rows());
        for &j in idx {
            s.xor_assign(&cols[j]);
        }
        s
    };
    let mut out = Vec::new();
    for w in 1..=max_w.min(n) {
        let a = w / 2;
        let b = w - a;
        let cost = binomial_u128(n as u64, a as u64) + binomial_u128(n as u64, b as u64);
        if cost > TABLE_LIMIT {
            return Err(Error::MemoryBudget {
                case: format!("low-weight listing at weight {w}"),
                entries: cost,
                budget: TABLE_LIMIT,
            });
        }
        let mut table: HashMap<BitVec, Vec<Vec<usize>>> = HashMap::new();
        for_each_combination(n, a, |s| table.entry(syn(s)).or_default().push(s.to_vec()));
        let mut found = Vec::new();
        for_each_combination(n, b, |t| {
            if let Some(list) = table.get(&syn(t)) {
                for s in list {
                    if s.last().is_none_or(|&mx| mx < t[0]) {
                        found.push(BitVec::from_indices(n, s.iter().chain(t).copied()));
                    }
                }
            }
        });
        found.sort();
        out.extend(found);
    }
    Ok(out)
}

#[cfg(test)]
fn count_u64(e: &WeightEnumerator, w: usize) -> Option<u64> {
    use num_traits::ToPrimitive;
    e.count(w).to_u64()
}
