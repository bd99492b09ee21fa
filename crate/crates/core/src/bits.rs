//! Fixed-length bit vectors packed into `u64` words.
//!
//! Bits beyond `len` in the last word are kept zero so that equality,
//! hashing and popcounts never see stale data.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    /// Parses a string of `0`/`1` characters, bit 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::Invalid(format!("bad bit character {c:?}"))),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Builds from packed words; bits past `len` must be zero.
    pub fn from_words(len: usize, words: &[u64]) -> Self {
        assert_eq!(words.len(), words_for(len));
        let v = Self {
            len,
            words: words.to_vec(),
        };
        debug_assert!(len % 64 == 0 || words.last().is_none_or(|w| w >> (len % 64) == 0));
        v
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Copies `src` into bits `offset..offset + src.len()`.
    pub fn splice(&mut self, offset: usize, src: &BitVec) {
        assert!(offset + src.len <= self.len);
        for i in src.iter_ones() {
            self.set(offset + i, true);
        }
    }

    pub fn slice(&self, offset: usize, len: usize) -> BitVec {
        assert!(offset + len <= self.len);
        BitVec::from_indices(
            len,
            (0..len).filter(|&i| self.get(offset + i)),
        )
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.splice(0, self);
        out.splice(self.len, other);
        out
    }

    /// Hex string of the integer `Σ bit_i · 2^i` (most significant digit first,
    /// lowercase, no prefix). The zero vector encodes as `"0"`.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut s: String = (0..digits)
            .rev()
            .map(|d| {
                let mut nib = 0u32;
                for b in 0..4 {
                    let i = d * 4 + b;
                    if i < self.len && self.get(i) {
                        nib |= 1 << b;
                    }
                }
                std::char::from_digit(nib, 16).unwrap()
            })
            .collect();
        let trimmed = s.trim_start_matches('0');
        if trimmed.is_empty() {
            "0".to_string()
        } else {
            s = trimmed.to_string();
            s
        }
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim().trim_start_matches("0x");
        let mut v = BitVec::zeros(len);
        for (d, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Invalid(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= len {
                        return Err(Error::Invalid(format!(
                            "hex value {hex} does not fit in {len} bits"
                        )));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}
