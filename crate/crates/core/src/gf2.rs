//! Polynomials over GF(2) and small binary extension fields GF(2^m).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_POLY_DEGREE: usize = 512;

/// Binary polynomial; bit `i` of the packed words is the coefficient of `x^i`.
///
/// Trailing zero words are always stripped, so the representation is unique.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPoly {
    words: Vec<u64>,
}

impl BitPoly {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `x^d`
    pub fn monomial(d: usize) -> Self {
        let mut p = Self::zero();
        p.set_coeff(d, true);
        p
    }

    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p.flip_coeff(e);
        }
        p
    }

    /// Low bits of `v` as coefficients.
    pub fn from_u64(v: u64) -> Self {
        let mut p = Self { words: vec![v] };
        p.normalize();
        p
    }

    /// `x^n + 1`, equal to `x^n - 1` over GF(2).
    pub fn x_n_minus_1(n: usize) -> Self {
        Self::from_exponents(&[n, 0])
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, v: bool) {
        if v {
            if self.words.len() <= i / 64 {
                self.words.resize(i / 64 + 1, 0);
            }
            self.words[i / 64] |= 1 << (i % 64);
        } else if i / 64 < self.words.len() {
            self.words[i / 64] &= !(1 << (i % 64));
            self.normalize();
        }
    }

    pub fn flip_coeff(&mut self, i: usize) {
        let v = !self.coeff(i);
        self.set_coeff(i, v);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn add(&self, other: &BitPoly) -> BitPoly {
        let len = self.words.len().max(other.words.len());
        let mut words = vec![0; len];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        let mut p = BitPoly { words };
        p.normalize();
        p
    }

    fn shl(&self, s: usize) -> BitPoly {
        if self.is_zero() {
            return BitPoly::zero();
        }
        let (ws, bs) = (s / 64, s % 64);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] ^= w << bs;
            if bs != 0 {
                words[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        let mut p = BitPoly { words };
        p.normalize();
        p
    }

    /// Carry-less product.
    pub fn mul(&self, other: &BitPoly) -> BitPoly {
        let mut acc = BitPoly::zero();
        for e in other.exponents() {
            acc = acc.add(&self.shl(e));
        }
        acc
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn divmod(&self, divisor: &BitPoly) -> Result<(BitPoly, BitPoly)> {
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let mut r = self.clone();
        let mut q = BitPoly::zero();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            q.flip_coeff(dr - db);
            r = r.add(&divisor.shl(dr - db));
        }
        Ok((q, r))
    }

    pub fn rem(&self, divisor: &BitPoly) -> Result<BitPoly> {
        Ok(self.divmod(divisor)?.1)
    }

    pub fn gcd(&self, other: &BitPoly) -> BitPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &BitPoly) -> BitPoly {
        if self.is_zero() || other.is_zero() {
            return BitPoly::zero();
        }
        let g = self.gcd(other);
        let (q, _) = self.divmod(&g).expect("gcd is nonzero");
        q.mul(other)
    }

    /// Rejects polynomials above the supported degree.
    pub fn check_degree(&self) -> Result<()> {
        match self.degree() {
            Some(d) if d > MAX_POLY_DEGREE => Err(Error::DegreeTooLarge(d)),
            _ => Ok(()),
        }
    }

    /// Hex of `Σ c_i 2^i`, most significant digit first.
    pub fn to_hex(&self) -> String {
        let Some(d) = self.degree() else {
            return "0".to_string();
        };
        (0..=d / 4)
            .rev()
            .map(|nib| {
                let v = (0..4).fold(0u32, |acc, b| acc | (self.coeff(nib * 4 + b) as u32) << b);
                std::char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0x");
        if s.is_empty() {
            return Err(Error::Invalid("empty polynomial hex string".into()));
        }
        let mut p = BitPoly::zero();
        for (d, c) in s.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Invalid(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    p.set_coeff(d * 4 + b, true);
                }
            }
        }
        p.check_degree()?;
        Ok(p)
    }
}

impl fmt::Display for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .rev()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({self})")
    }
}

/// Default primitive polynomial for `m` in 2..=8.
pub fn default_primitive_poly(m: usize) -> Result<BitPoly> {
    let exps: &[usize] = match m {
        2 => &[2, 1, 0],
        3 => &[3, 1, 0],
        4 => &[4, 1, 0],
        5 => &[5, 2, 0],
        6 => &[6, 1, 0],
        7 => &[7, 1, 0],
        8 => &[8, 4, 3, 2, 0],
        _ => return Err(Error::UnsupportedDegree(m)),
    };
    Ok(BitPoly::from_exponents(exps))
}

/// GF(2^m) built from a primitive polynomial, with log/antilog tables.
#[derive(Clone)]
pub struct FieldSpec {
    m: usize,
    primitive_poly: BitPoly,
    exp: Vec<u16>,
    log: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    m: usize,
    primitive_poly: String,
}

impl FieldSpec {
    pub fn new(m: usize) -> Result<Self> {
        Self::with_poly(m, default_primitive_poly(m)?)
    }

    /// Checks that `poly` has degree `m` and that `x` has order `2^m - 1` modulo it.
    pub fn with_poly(m: usize, poly: BitPoly) -> Result<Self> {
        if !(2..=8).contains(&m) {
            return Err(Error::UnsupportedDegree(m));
        }
        let not_primitive = || Error::NotPrimitive {
            poly: poly.to_string(),
            m,
        };
        if poly.degree() != Some(m) || !poly.coeff(0) {
            return Err(not_primitive());
        }
        let n = (1usize << m) - 1;
        let reduce = poly.words[0];
        let mut exp = vec![0u16; n];
        let mut log = vec![0u16; n + 1];
        let mut seen = vec![false; n + 1];
        let mut a: u64 = 1;
        for (i, e) in exp.iter_mut().enumerate() {
            if seen[a as usize] {
                return Err(not_primitive());
            }
            seen[a as usize] = true;
            *e = a as u16;
            log[a as usize] = i as u16;
            a <<= 1;
            if a >> m & 1 == 1 {
                a ^= reduce;
            }
        }
        if a != 1 {
            return Err(not_primitive());
        }
        Ok(Self {
            m,
            primitive_poly: poly,
            exp,
            log,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        (1 << self.m) - 1
    }

    pub fn primitive_poly(&self) -> &BitPoly {
        &self.primitive_poly
    }

    /// `α^e` as a bit pattern.
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.n()]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[s % self.n()]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FieldSpecJson {
            m: self.m,
            primitive_poly: self.primitive_poly.to_hex(),
        })
        .expect("plain struct")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: FieldSpecJson = serde_json::from_value(v.clone())?;
        Self::with_poly(j.m, BitPoly::from_hex(&j.primitive_poly)?)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(m={}, {})", self.m, self.primitive_poly)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCoset {
    pub representative: usize,
    pub members: Vec<usize>,
}

/// Orbits of `j -> 2j mod n`, ordered by representative.
pub fn cyclotomic_cosets(n: usize) -> Vec<CyclotomicCoset> {
    assert!(n % 2 == 1, "cosets need odd n");
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for r in 0..n {
        if seen[r] {
            continue;
        }
        let mut members = Vec::new();
        let mut j = r;
        while !seen[j] {
            seen[j] = true;
            members.push(j);
            j = 2 * j % n;
        }
        members.sort_unstable();
        out.push(CyclotomicCoset {
            representative: r,
            members,
        });
    }
    out
}

pub fn coset_of(n: usize, e: usize) -> CyclotomicCoset {
    let mut members = Vec::new();
    let mut j = e % n;
    loop {
        members.push(j);
        j = 2 * j % n;
        if j == e % n {
            break;
        }
    }
    members.sort_unstable();
    CyclotomicCoset {
        representative: members[0],
        members,
    }
}

/// Minimal polynomial of `α^exponent`: the product of `(x - α^j)` over its coset.
pub fn minimal_polynomial(spec: &FieldSpec, exponent: usize) -> BitPoly {
    let coset = coset_of(spec.n(), exponent);
    // coefficients in GF(2^m), index = degree
    let mut c: Vec<u16> = vec![1];
    for &j in &coset.members {
        let root = spec.alpha_pow(j);
        let mut next = vec![0u16; c.len() + 1];
        for (d, &a) in c.iter().enumerate() {
            next[d + 1] ^= a;
            next[d] ^= spec.mul(a, root);
        }
        c = next;
    }
    let mut p = BitPoly::zero();
    for (d, &a) in c.iter().enumerate() {
        assert!(a <= 1, "minimal polynomial left GF(2): coefficient {a} at x^{d}");
        if a == 1 {
            p.set_coeff(d, true);
        }
    }
    p
}

/// Narrow-sense BCH generator: LCM of the minimal polynomials of `α^1 … α^(δ-1)`.
pub fn bch_generator(spec: &FieldSpec, delta: usize) -> Result<BitPoly> {
    let n = spec.n();
    if !(2..=n).contains(&delta) {
        return Err(Error::DesignedDistance { delta, n });
    }
    let mut reps = Vec::new();
    let mut g = BitPoly::one();
    for e in 1..delta {
        let r = coset_of(n, e).representative;
        if !reps.contains(&r) {
            reps.push(r);
            g = g.mul(&minimal_polynomial(spec, r));
        }
    }
    g.check_degree()?;
    Ok(g)
}
