//! Baseline non-fault-tolerant encoder for CSS basis states.

use crate::bits::BitVec;
use crate::code::CssCode;
use crate::matrix::GF2Matrix;

use super::{Circuit, OpKind};

/// Prepares `|0_L⟩^⊗k` from the reduced echelon form `[I | A]` of `h_x`.
///
/// Every qubit starts in `|0⟩`; pivot qubits get an H and then fan out with
/// CNOTs onto the non-pivot columns of their row, row by row, columns
/// ascending.
pub fn synth_css_prep(code: &CssCode) -> Circuit {
    let n = code.n;
    let ech = code.h_x.echelon();
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.prep_z(q);
    }
    for &p in &ech.pivots {
        c.h(p);
    }
    let mut is_pivot = vec![false; n];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    for (row, &p) in ech.matrix.rows().iter().zip(&ech.pivots) {
        for col in row.iter_ones().filter(|&j| !is_pivot[j]) {
            c.cnot(p, col);
        }
    }
    c
}

/// Stabilizer generators after a measurement-free circuit, as `(x, z)` rows.
///
/// Each preparation contributes `Z_q` or `X_q`; gates conjugate the rows.
pub fn prepared_stabilizers(circuit: &Circuit) -> Vec<(BitVec, BitVec)> {
    let n = circuit.n_qubits;
    let mut gens: Vec<(BitVec, BitVec)> = Vec::new();
    for op in &circuit.ops {
        match op.kind {
            OpKind::PrepZ | OpKind::PrepX => {
                for (x, z) in gens.iter_mut() {
                    x.set(op.q0, false);
                    z.set(op.q0, false);
                }
                gens.retain(|(x, z)| !(x.is_zero() && z.is_zero()));
                let e = BitVec::from_indices(n, [op.q0]);
                gens.push(if op.kind == OpKind::PrepZ {
                    (BitVec::zeros(n), e)
                } else {
                    (e, BitVec::zeros(n))
                });
            }
            OpKind::H => {
                for (x, z) in gens.iter_mut() {
                    let (a, b) = (x.get(op.q0), z.get(op.q0));
                    x.set(op.q0, b);
                    z.set(op.q0, a);
                }
            }
            OpKind::Cnot => {
                for (x, z) in gens.iter_mut() {
                    if x.get(op.q0) {
                        x.flip(op.q1);
                    }
                    if z.get(op.q1) {
                        z.flip(op.q0);
                    }
                }
            }
            OpKind::MeasZ | OpKind::MeasX => {
                panic!("prepared_stabilizers needs a measurement-free circuit")
            }
        }
    }
    gens
}

/// Splits pure generators into X-type and Z-type matrices; `None` if any is mixed.
pub fn split_css_generators(n: usize, gens: &[(BitVec, BitVec)]) -> Option<(GF2Matrix, GF2Matrix)> {
    let mut xs = GF2Matrix::empty(n);
    let mut zs = GF2Matrix::empty(n);
    for (x, z) in gens {
        match (x.is_zero(), z.is_zero()) {
            (false, true) => xs.push_row(x.clone()),
            (true, false) => zs.push_row(z.clone()),
            _ => return None,
        }
    }
    Some((xs, zs))
}
