//! Cyclic and BCH codes, and their lift to CSS quantum codes.
//!
//! Vectors index coordinates in reverse polynomial order: position `j` holds
//! the coefficient of `x^(n-1-j)`. With this layout the circulant check matrix
//! has `h_0 … h_k` from the left in its first row, and every codeword
//! polynomial maps to a vector in its kernel.

mod enumerator;
mod reduced;

pub use enumerator::{
    cyclic_weight_enumerator, low_weight_codewords, macwilliams_transform,
    weight_enumerator_exhaustive, WeightEnumerator, DEFAULT_ENUM_BUDGET,
};
pub use reduced::{reduced_weight, CosetWeightTable, ReducedWeight};

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::{bch_generator, BitPoly, FieldSpec};
use crate::matrix::{GF2Matrix, RowReducer};

/// Coefficient vector of `p` in the reversed coordinate order.
pub fn poly_to_vec(n: usize, p: &BitPoly) -> BitVec {
    BitVec::from_indices(
        n,
        p.exponents().into_iter().map(|e| {
            assert!(e < n, "degree {e} does not fit length {n}");
            n - 1 - e
        }),
    )
}

pub fn vec_to_poly(v: &BitVec) -> BitPoly {
    let n = v.len();
    BitPoly::from_exponents(&v.iter_ones().map(|j| n - 1 - j).collect::<Vec<_>>())
}

/// `x^deg p · p(1/x)`
pub fn reciprocal(p: &BitPoly) -> BitPoly {
    let d = p.degree().unwrap_or(0);
    BitPoly::from_exponents(&p.exponents().into_iter().map(|e| d - e).collect::<Vec<_>>())
}

#[derive(Clone, Debug)]
pub struct CyclicCode {
    pub n: usize,
    pub g: BitPoly,
    pub h: BitPoly,
    pub k_c: usize,
    /// Reduced row-echelon form of `circulant_check`.
    pub parity_check: GF2Matrix,
    pub circulant_check: GF2Matrix,
    /// Rows `x^i g(x)` for `i < k_c`.
    pub generator: GF2Matrix,
}

pub fn parity_check_from_generator(n: usize, g: &BitPoly) -> Result<CyclicCode> {
    g.check_degree()?;
    let (h, r) = BitPoly::x_n_minus_1(n).divmod(g)?;
    if !r.is_zero() {
        return Err(Error::NotDividing { n });
    }
    let deg_g = g.degree().expect("nonzero divisor");
    let k_c = n - deg_g;
    let mut circ = GF2Matrix::empty(n);
    for i in 0..deg_g {
        circ.push_row(BitVec::from_indices(
            n,
            h.exponents().into_iter().map(|e| e + i),
        ));
    }
    let mut gen = GF2Matrix::empty(n);
    for i in 0..k_c {
        gen.push_row(poly_to_vec(n, &g.mul(&BitPoly::monomial(i))));
    }
    let parity_check = circ.echelon().matrix;
    Ok(CyclicCode {
        n,
        g: g.clone(),
        h,
        k_c,
        parity_check,
        circulant_check: circ,
        generator: gen,
    })
}

/// Narrow-sense primitive BCH code of designed distance `delta`.
pub fn bch_code(spec: &FieldSpec, delta: usize) -> Result<CyclicCode> {
    parity_check_from_generator(spec.n(), &bch_generator(spec, delta)?)
}

impl CyclicCode {
    /// `C^⊥ ⊆ C`, tested as `H Hᵀ = 0`.
    pub fn is_dual_containing(&self) -> bool {
        self.parity_check.mul_transpose(&self.parity_check).is_zero()
    }

    /// Generator polynomial of the dual code, in polynomial coordinates.
    pub fn dual_generator(&self) -> BitPoly {
        reciprocal(&self.h)
    }
}

/// Which logical basis state a block prepares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetState {
    Zero,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliType {
    X,
    Z,
}

impl PauliType {
    pub fn other(self) -> Self {
        match self {
            PauliType::X => PauliType::Z,
            PauliType::Z => PauliType::X,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CssCode {
    pub n: usize,
    pub k: usize,
    pub d_design: usize,
    pub d_true: Option<usize>,
    pub h_x: GF2Matrix,
    pub h_z: GF2Matrix,
    pub logical_x: GF2Matrix,
    pub logical_z: GF2Matrix,
    /// Field and generator the code was built from, when it came from a BCH construction.
    pub origin: Option<BchOrigin>,
}

#[derive(Clone, Debug)]
pub struct BchOrigin {
    pub m: usize,
    pub primitive_poly: BitPoly,
    pub g: BitPoly,
}

/// Greedy basis of a complement of `span` inside the row space of `space`.
fn complement_basis(space: &GF2Matrix, span: &GF2Matrix) -> GF2Matrix {
    let mut red = RowReducer::from_matrix(span);
    let mut out = GF2Matrix::empty(space.num_cols());
    for row in space.rows() {
        if red.insert(row.clone()) {
            out.push_row(row.clone());
        }
    }
    out
}

impl CssCode {
    /// Checks CSS orthogonality and extracts a symplectic logical basis.
    pub fn new(h_x: GF2Matrix, h_z: GF2Matrix, d_design: usize) -> Result<Self> {
        let n = h_x.num_cols();
        if h_z.num_cols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: h_z.num_cols(),
            });
        }
        if !h_x.mul_transpose(&h_z).is_zero() {
            return Err(Error::Invalid("h_x h_z^T != 0".into()));
        }
        let logical_x = complement_basis(&h_z.kernel(), &h_x);
        let lz0 = complement_basis(&h_x.kernel(), &h_z);
        let k = logical_x.num_rows();
        debug_assert_eq!(k, lz0.num_rows());
        let gram = logical_x.mul_transpose(&lz0);
        let inv = gram
            .inverse()
            .ok_or_else(|| Error::Invalid("logical Gram matrix is singular".into()))?;
        let logical_z = inv.transpose().mul(&lz0);
        Ok(Self {
            n,
            k,
            d_design,
            d_true: None,
            h_x,
            h_z,
            logical_x,
            logical_z,
            origin: None,
        })
    }

    /// Stabilizer-plus-logical group of one Pauli type that fixes the target state.
    pub fn stabilizing_group(&self, pauli: PauliType, target: TargetState) -> GF2Matrix {
        match (pauli, target) {
            (PauliType::X, TargetState::Zero) => self.h_x.clone(),
            (PauliType::Z, TargetState::Zero) => self.h_z.vstack(&self.logical_z),
            (PauliType::X, TargetState::Plus) => self.h_x.vstack(&self.logical_x),
            (PauliType::Z, TargetState::Plus) => self.h_z.clone(),
        }
    }

    /// Checks that detect errors of type `pauli`: `h_z` for X errors, `h_x` for Z errors.
    pub fn detecting_checks(&self, pauli: PauliType) -> &GF2Matrix {
        match pauli {
            PauliType::X => &self.h_z,
            PauliType::Z => &self.h_x,
        }
    }

    pub fn t(&self) -> usize {
        (self.d_true.unwrap_or(self.d_design) - 1) / 2
    }

    pub fn distance(&self) -> usize {
        self.d_true.unwrap_or(self.d_design)
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn to_descriptor(&self, delta: usize) -> CodeDescriptor {
        CodeDescriptor {
            n: self.n,
            k: self.k,
            delta,
            m: self.origin.as_ref().map(|o| o.m),
            primitive_poly: self.origin.as_ref().map(|o| o.primitive_poly.to_hex()),
            g_poly: self.origin.as_ref().map(|o| o.g.to_hex()),
            h_x: self.h_x.to_hex_rows(),
            h_z: self.h_z.to_hex_rows(),
            logical_x: self.logical_x.to_hex_rows(),
            logical_z: self.logical_z.to_hex_rows(),
            d_true: self.d_true,
        }
    }

    pub fn from_descriptor(d: &CodeDescriptor) -> Result<Self> {
        let n = d.n;
        let code = Self {
            n,
            k: d.k,
            d_design: d.delta,
            d_true: d.d_true,
            h_x: GF2Matrix::from_hex_rows(n, &d.h_x)?,
            h_z: GF2Matrix::from_hex_rows(n, &d.h_z)?,
            logical_x: GF2Matrix::from_hex_rows(n, &d.logical_x)?,
            logical_z: GF2Matrix::from_hex_rows(n, &d.logical_z)?,
            origin: match (d.m, &d.primitive_poly, &d.g_poly) {
                (Some(m), Some(p), Some(g)) => Some(BchOrigin {
                    m,
                    primitive_poly: BitPoly::from_hex(p)?,
                    g: BitPoly::from_hex(g)?,
                }),
                _ => None,
            },
        };
        code.validate()?;
        Ok(code)
    }

    /// Checks every structural invariant of the code.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("code invariant violated: {what}")));
        if !self.h_x.mul_transpose(&self.h_z).is_zero() {
            return bad("h_x h_z^T = 0");
        }
        if !self.logical_x.mul_transpose(&self.h_z).is_zero() {
            return bad("logical_x h_z^T = 0");
        }
        if !self.logical_z.mul_transpose(&self.h_x).is_zero() {
            return bad("logical_z h_x^T = 0");
        }
        if self.logical_x.mul_transpose(&self.logical_z) != GF2Matrix::identity(self.k) {
            return bad("logical_x logical_z^T = I");
        }
        if self.k + self.h_x.rank() + self.h_z.rank() != self.n {
            return bad("k = n - rank h_x - rank h_z");
        }
        Ok(())
    }
}

/// Quantum BCH construction with `h_x = h_z = H`.
pub fn css_from_dual_containing(code: &CyclicCode, delta: usize) -> Result<CssCode> {
    if !code.is_dual_containing() {
        return Err(Error::NotDualContaining);
    }
    let h = code.parity_check.clone();
    let css = CssCode::new(h.clone(), h, delta)?;
    debug_assert_eq!(css.k, 2 * code.k_c - code.n);
    Ok(css)
}

/// Builds the quantum BCH code `[[2^m - 1, k, delta]]`.
pub fn quantum_bch(spec: &FieldSpec, delta: usize) -> Result<(CyclicCode, CssCode)> {
    let cyc = bch_code(spec, delta)?;
    let mut css = css_from_dual_containing(&cyc, delta)?;
    css.origin = Some(BchOrigin {
        m: spec.m(),
        primitive_poly: spec.primitive_poly().clone(),
        g: cyc.g.clone(),
    });
    Ok((cyc, css))
}

/// `h · eᵀ`
pub fn syndrome(h: &GF2Matrix, e: &BitVec) -> Result<BitVec> {
    h.mul_vec(e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub m: Option<usize>,
    pub primitive_poly: Option<String>,
    pub g_poly: Option<String>,
    pub h_x: Vec<String>,
    pub h_z: Vec<String>,
    pub logical_x: Vec<String>,
    pub logical_z: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_true: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> CyclicCode {
        parity_check_from_generator(7, &BitPoly::from_exponents(&[3, 1, 0])).unwrap()
    }

    #[test]
    fn hamming_circulant_layout() {
        let c = hamming();
        assert_eq!(c.h, BitPoly::from_exponents(&[4, 2, 1, 0]));
        assert_eq!(c.circulant_check.row(0).to_string(), "1110100");
        assert_eq!(c.k_c, 4);
        // all 16 codewords a(x) g(x) lie in the kernel
        for a in 0u64..16 {
            let cw = BitPoly::from_u64(a).mul(&c.g);
            let v = poly_to_vec(7, &cw);
            assert!(c.circulant_check.mul_vec(&v).unwrap().is_zero());
            assert!(c.parity_check.mul_vec(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn parity_and_repetition_codes() {
        let par = parity_check_from_generator(3, &BitPoly::from_exponents(&[1, 0])).unwrap();
        assert_eq!(par.h, BitPoly::from_exponents(&[2, 1, 0]));
        assert_eq!(par.k_c, 2);
        let rep = parity_check_from_generator(3, &BitPoly::from_exponents(&[2, 1, 0])).unwrap();
        assert!(!rep.is_dual_containing());
        assert!(hamming().is_dual_containing());
        assert!(matches!(
            parity_check_from_generator(7, &BitPoly::from_exponents(&[2, 0])),
            Err(Error::NotDividing { .. })
        ));
    }

    #[test]
    fn steane_from_hamming() {
        let css = css_from_dual_containing(&hamming(), 3).unwrap();
        assert_eq!((css.n, css.k), (7, 1));
        css.validate().unwrap();
        let rep = parity_check_from_generator(3, &BitPoly::from_exponents(&[2, 1, 0])).unwrap();
        assert!(matches!(
            css_from_dual_containing(&rep, 3),
            Err(Error::NotDualContaining)
        ));
    }

    #[test]
    fn table_parameters() {
        for (m, delta, k) in [(5, 5, 11), (6, 7, 27), (7, 9, 71)] {
            let f = FieldSpec::new(m).unwrap();
            let (cyc, css) = quantum_bch(&f, delta).unwrap();
            assert_eq!(css.k, k);
            assert_eq!(cyc.parity_check.num_rows(), cyc.n - cyc.k_c);
            css.validate().unwrap();
        }
        let f5 = FieldSpec::new(5).unwrap();
        let c = bch_code(&f5, 5).unwrap();
        assert_eq!(c.circulant_check.num_rows(), 10);
        assert_eq!(c.circulant_check.rank(), 10);
    }

    #[test]
    fn descriptor_round_trip() {
        let f = FieldSpec::new(4).unwrap();
        let (_, css) = quantum_bch(&f, 3).unwrap();
        let d = css.to_descriptor(3);
        let json = serde_json::to_string(&d).unwrap();
        let back: CodeDescriptor = serde_json::from_str(&json).unwrap();
        let code = CssCode::from_descriptor(&back).unwrap();
        assert_eq!(code.h_x, css.h_x);
        assert_eq!(code.logical_z, css.logical_z);
    }

    #[test]
    fn syndrome_examples() {
        let c = hamming();
        let h = &c.parity_check;
        assert!(syndrome(h, &BitVec::zeros(7)).unwrap().is_zero());
        for row in c.generator.rows() {
            assert!(syndrome(h, row).unwrap().is_zero());
        }
        let t = h.transpose();
        for j in 0..7 {
            let e = BitVec::from_indices(7, [j]);
            assert_eq!(&syndrome(h, &e).unwrap(), t.row(j));
        }
        assert!(syndrome(h, &BitVec::zeros(6)).is_err());
    }
}
