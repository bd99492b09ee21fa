//! Clifford circuits over preparation, H, CNOT and single-qubit measurement.
//!
//! Text format: one operation per line, `#` starts a comment, and an optional
//! `QUBITS n` header fixes the register size.
//!
//! ```text
//! QUBITS 2
//! PZ 0
//! H 0
//! CNOT 0 1
//! MZ 1
//! ```

mod frame;
mod synth;

pub use frame::{
    enumerate_single_faults, fault_labels, propagate_fault, propagate_faults, DedupFault,
    FaultLocation, PauliFrame, ProjectedFrame, SingleFaultTable,
};
pub use synth::{prepared_stabilizers, split_css_generators, synth_css_prep};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    PrepZ,
    PrepX,
    H,
    Cnot,
    MeasZ,
    MeasX,
}

impl OpKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::PrepZ => "PZ",
            OpKind::PrepX => "PX",
            OpKind::H => "H",
            OpKind::Cnot => "CNOT",
            OpKind::MeasZ => "MZ",
            OpKind::MeasX => "MX",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            OpKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_prep(self) -> bool {
        matches!(self, OpKind::PrepZ | OpKind::PrepX)
    }

    pub fn is_meas(self) -> bool {
        matches!(self, OpKind::MeasZ | OpKind::MeasX)
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "PZ" | "PREPZ" | "R" => OpKind::PrepZ,
            "PX" | "PREPX" | "RX" => OpKind::PrepX,
            "H" => OpKind::H,
            "CNOT" | "CX" => OpKind::Cnot,
            "MZ" | "MEASZ" | "M" => OpKind::MeasZ,
            "MX" | "MEASX" => OpKind::MeasX,
            other => return Err(format!("unknown mnemonic {other:?}")),
        })
    }
}

/// One operation; its location id is its index in the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Op {
    pub kind: OpKind,
    pub q0: usize,
    /// Target qubit for CNOT, unused otherwise.
    pub q1: usize,
}

impl Op {
    pub fn single(kind: OpKind, q: usize) -> Self {
        assert_eq!(kind.arity(), 1);
        Self { kind, q0: q, q1: q }
    }

    pub fn cnot(c: usize, t: usize) -> Self {
        assert_ne!(c, t, "CNOT needs distinct qubits");
        Self {
            kind: OpKind::Cnot,
            q0: c,
            q1: t,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        if self.kind == OpKind::Cnot {
            vec![self.q0, self.q1]
        } else {
            vec![self.q0]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub cnot_count: usize,
    pub depth: usize,
    pub h_count: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: Op) {
        assert!(op.q0 < self.n_qubits && op.q1 < self.n_qubits, "qubit out of range");
        self.ops.push(op);
    }

    pub fn prep_z(&mut self, q: usize) {
        self.push(Op::single(OpKind::PrepZ, q));
    }

    pub fn prep_x(&mut self, q: usize) {
        self.push(Op::single(OpKind::PrepX, q));
    }

    pub fn h(&mut self, q: usize) {
        self.push(Op::single(OpKind::H, q));
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        self.push(Op::cnot(c, t));
    }

    pub fn meas_z(&mut self, q: usize) {
        self.push(Op::single(OpKind::MeasZ, q));
    }

    pub fn meas_x(&mut self, q: usize) {
        self.push(Op::single(OpKind::MeasX, q));
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn count(&self, kind: OpKind) -> usize {
        self.ops.iter().filter(|o| o.kind == kind).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.count(OpKind::Cnot)
    }

    /// Measurement ordinal of every op (`None` for non-measurements).
    pub fn measurement_index(&self) -> Vec<Option<usize>> {
        let mut k = 0;
        self.ops
            .iter()
            .map(|o| {
                o.kind.is_meas().then(|| {
                    k += 1;
                    k - 1
                })
            })
            .collect()
    }

    pub fn num_measurements(&self) -> usize {
        self.ops.iter().filter(|o| o.kind.is_meas()).count()
    }

    /// As-soon-as-possible layering depth.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for op in &self.ops {
            let l = if op.kind == OpKind::Cnot {
                level[op.q0].max(level[op.q1]) + 1
            } else {
                level[op.q0] + 1
            };
            level[op.q0] = l;
            level[op.q1] = l;
            depth = depth.max(l);
        }
        depth
    }

    pub fn stats(&self) -> CircuitStats {
        CircuitStats {
            cnot_count: self.cnot_count(),
            depth: self.depth(),
            h_count: self.count(OpKind::H),
        }
    }

    /// Copy with qubit `q` renamed to `map[q]` on an `n_qubits`-wide register.
    pub fn relabel(&self, map: &[usize], n_qubits: usize) -> Circuit {
        assert_eq!(map.len(), self.n_qubits);
        Circuit {
            n_qubits,
            ops: self
                .ops
                .iter()
                .map(|o| Op {
                    kind: o.kind,
                    q0: map[o.q0],
                    q1: map[o.q1],
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut declared: Option<usize> = None;
        let mut ops: Vec<(usize, Op)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("nonempty line");
            let args: Vec<usize> = parts
                .map(|a| a.parse().map_err(|_| err(format!("bad qubit index {a:?}"))))
                .collect::<Result<_>>()?;
            if head.eq_ignore_ascii_case("QUBITS") {
                if declared.is_some() || !ops.is_empty() || args.len() != 1 {
                    return Err(err("QUBITS must appear once, before any op, with one count".into()));
                }
                declared = Some(args[0]);
                continue;
            }
            let kind: OpKind = head.parse().map_err(err)?;
            if args.len() != kind.arity() {
                return Err(err(format!(
                    "{} takes {} qubit(s), got {}",
                    kind.mnemonic(),
                    kind.arity(),
                    args.len()
                )));
            }
            let op = if kind == OpKind::Cnot {
                if args[0] == args[1] {
                    return Err(err("CNOT control and target coincide".into()));
                }
                Op::cnot(args[0], args[1])
            } else {
                Op::single(kind, args[0])
            };
            ops.push((line_no, op));
        }
        let n = declared.unwrap_or_else(|| {
            ops.iter().map(|(_, o)| o.q0.max(o.q1) + 1).max().unwrap_or(0)
        });
        let mut measured = vec![false; n];
        let mut circuit = Circuit::new(n);
        for (line, op) in ops {
            for q in [op.q0, op.q1] {
                if q >= n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("qubit {q} out of range (register has {n})"),
                    });
                }
                if measured[q] {
                    return Err(Error::Parse {
                        line,
                        msg: if op.kind.is_meas() {
                            format!("duplicate measurement of qubit {q}")
                        } else {
                            format!("qubit {q} used after measurement")
                        },
                    });
                }
            }
            if op.kind.is_meas() {
                measured[op.q0] = true;
            }
            circuit.ops.push(op);
        }
        Ok(circuit)
    }

    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.n_qubits)?;
        for op in &self.ops {
            match op.kind {
                OpKind::Cnot => writeln!(f, "CNOT {} {}", op.q0, op.q1)?,
                k => writeln!(f, "{} {}", k.mnemonic(), op.q0)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small() {
        let c = Circuit::parse("H 0\nCNOT 0 1\nMZ 1").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.n_qubits, 2);
        assert_eq!(c.ops[1], Op::cnot(0, 1));
        assert_eq!(c.measurement_index(), vec![None, None, Some(0)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |t: &str| match Circuit::parse(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("CNOT 0"), 1);
        assert_eq!(line_of("H 0\nFOO 1"), 2);
        assert_eq!(line_of("QUBITS 2\nH 0\nH 2"), 3);
        assert_eq!(line_of("MZ 0\n# note\nMZ 0"), 3);
        assert_eq!(line_of("MX 1\nH 1"), 2);
        assert_eq!(line_of("CNOT 1 1"), 1);
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "# demo\nqubits 3\npz 0\n  H 0 # comment\nCX 0 2\nMX 2\n";
        let c = Circuit::parse(text).unwrap();
        let canon = c.serialize();
        assert_eq!(canon, "QUBITS 3\nPZ 0\nH 0\nCNOT 0 2\nMX 2\n");
        assert_eq!(Circuit::parse(&canon).unwrap(), c);
    }

    #[test]
    fn depth_and_stats() {
        let c = Circuit::parse("PZ 0\nPZ 1\nPZ 2\nH 0\nCNOT 0 1\nCNOT 0 2\nCNOT 1 2").unwrap();
        assert_eq!(c.depth(), 5);
        let s = c.stats();
        assert_eq!((s.cnot_count, s.h_count), (3, 1));
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["cnot_count"], 3);
    }
}
