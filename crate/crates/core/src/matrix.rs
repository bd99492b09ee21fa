//! Dense matrices over GF(2) with bit-packed rows.

use std::fmt;

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Result of reducing a matrix to reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the reduced form, one per pivot.
    pub matrix: GF2Matrix,
    /// Pivot column of each row, strictly increasing.
    pub pivots: Vec<usize>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: r.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from `0`/`1` row strings.
    pub fn from_bit_strs(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let parsed = rows
            .iter()
            .map(|r| BitVec::from_bit_str(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, parsed)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(c < self.cols, "column {c} out of range {}", self.cols);
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(c < self.cols, "column {c} out of range {}", self.cols);
        self.rows[r].set(c, v);
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = GF2Matrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// `self · v^T`, one output bit per row.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self.mul_vec_unchecked(v))
    }

    #[inline]
    pub fn mul_vec_unchecked(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// `self · other^T`.
    pub fn mul_transpose(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.cols, other.cols);
        let mut out = GF2Matrix::zeros(self.rows.len(), other.rows.len());
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if a.dot(b) {
                    out.rows[i].set(j, true);
                }
            }
        }
        out
    }

    /// Ordinary product `self · other`.
    pub fn mul(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.cols, other.rows.len());
        let mut out = GF2Matrix::zeros(self.rows.len(), other.cols);
        for (i, a) in self.rows.iter().enumerate() {
            for k in a.iter_ones() {
                out.rows[i].xor_assign(&other.rows[k]);
            }
        }
        out
    }

    /// Reduced row-echelon form; pivots chosen at the lowest available column.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rows.truncate(rank);
        Echelon {
            matrix: GF2Matrix {
                cols: self.cols,
                rows,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    pub fn vstack(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        GF2Matrix {
            cols: self.cols,
            rows,
        }
    }

    /// True iff both matrices span the same row space.
    pub fn same_row_space(&self, other: &GF2Matrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let ra = self.rank();
        ra == other.rank() && self.vstack(other).rank() == ra
    }

    /// True iff `v` lies in the row space.
    pub fn spans(&self, v: &BitVec) -> bool {
        let mut m = self.clone();
        let r = m.rank();
        m.push_row(v.clone());
        m.rank() == r
    }

    /// Basis of the right kernel `{ x : self · x^T = 0 }`, as rows.
    pub fn kernel(&self) -> GF2Matrix {
        let ech = self.echelon();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &ech.pivots {
                s[p] = true;
            }
            s
        };
        let mut basis = GF2Matrix::empty(self.cols);
        for free in (0..self.cols).filter(|&c| !pivot_set[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &p) in ech.matrix.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push_row(v);
        }
        basis
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Option<GF2Matrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let mut a = self.rows.clone();
        let mut inv = GF2Matrix::identity(n).rows;
        for col in 0..n {
            let p = (col..n).find(|&r| a[r].get(col))?;
            a.swap(col, p);
            inv.swap(col, p);
            let (pa, pi) = (a[col].clone(), inv[col].clone());
            for r in 0..n {
                if r != col && a[r].get(col) {
                    a[r].xor_assign(&pa);
                    inv[r].xor_assign(&pi);
                }
            }
        }
        Some(GF2Matrix { cols: n, rows: inv })
    }

    /// Column permutation: column `j` of `self` moves to column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> GF2Matrix {
        assert_eq!(perm.len(), self.cols);
        let rows = self
            .rows
            .iter()
            .map(|r| BitVec::from_indices(self.cols, r.iter_ones().map(|j| perm[j])))
            .collect();
        GF2Matrix {
            cols: self.cols,
            rows,
        }
    }

    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitVec::to_hex).collect()
    }

    pub fn from_hex_rows(cols: usize, rows: &[String]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|h| BitVec::from_hex(h, cols))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, parsed)
    }
}

/// Incrementally built echelon basis for membership and independence tests.
#[derive(Clone, Debug)]
pub struct RowReducer {
    len: usize,
    rows: Vec<(usize, BitVec)>,
}

impl RowReducer {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn from_matrix(m: &GF2Matrix) -> Self {
        let mut r = Self::new(m.num_cols());
        for row in m.rows() {
            r.insert(row.clone());
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after elimination against the basis; zero iff `v` is spanned.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.len);
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let r = self.reduce(&v);
        let Some(p) = r.first_one() else {
            return false;
        };
        // keep earlier rows free of the new pivot so `reduce` stays one pass
        for (_, row) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        self.rows.push((p, r));
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}
