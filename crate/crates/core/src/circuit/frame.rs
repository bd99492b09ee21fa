//! Pauli-frame propagation of faults through a circuit.

use std::collections::HashMap;

use serde::Serialize;

use crate::bits::BitVec;
use crate::code::PauliType;

use super::{Circuit, Op, OpKind};

/// Accumulated Pauli flips relative to the noiseless run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x: BitVec,
    pub z: BitVec,
    /// One bit per measurement, in circuit order.
    pub meas: BitVec,
}

impl PauliFrame {
    pub fn identity(circuit: &Circuit) -> Self {
        Self {
            x: BitVec::zeros(circuit.n_qubits),
            z: BitVec::zeros(circuit.n_qubits),
            meas: BitVec::zeros(circuit.num_measurements()),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero() && self.meas.is_zero()
    }

    pub fn xor_assign(&mut self, other: &PauliFrame) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.meas.xor_assign(&other.meas);
    }

    /// Component of one Pauli type: the residual bits plus the flips of the
    /// measurements that type can disturb (MZ for X, MX for Z).
    pub fn project(&self, circuit: &Circuit, component: PauliType) -> ProjectedFrame {
        let (residual, kind) = match component {
            PauliType::X => (self.x.clone(), OpKind::MeasZ),
            PauliType::Z => (self.z.clone(), OpKind::MeasX),
        };
        let mut flips = BitVec::zeros(self.meas.len());
        let mut k = 0;
        for op in &circuit.ops {
            if op.kind.is_meas() {
                if op.kind == kind && self.meas.get(k) {
                    flips.set(k, true);
                }
                k += 1;
            }
        }
        ProjectedFrame { residual, flips }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectedFrame {
    pub residual: BitVec,
    pub flips: BitVec,
}

impl ProjectedFrame {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero() && self.flips.is_zero()
    }
}

/// A Pauli fault at one circuit location.
///
/// Labels: single-qubit ops use bit 0 = X and bit 1 = Z; CNOT uses bits
/// 0,1 for X,Z on the control and bits 2,3 for X,Z on the target;
/// preparations and measurements have the single label 1 (a flip).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaultLocation {
    pub location: usize,
    pub label: u8,
}

pub fn fault_labels(kind: OpKind) -> std::ops::RangeInclusive<u8> {
    match kind {
        OpKind::Cnot => 1..=15,
        OpKind::H => 1..=3,
        _ => 1..=1,
    }
}

fn inject(op: &Op, label: u8, frame: &mut PauliFrame) {
    match op.kind {
        OpKind::PrepZ | OpKind::MeasZ => frame.x.flip(op.q0),
        OpKind::PrepX | OpKind::MeasX => frame.z.flip(op.q0),
        OpKind::H => {
            if label & 1 != 0 {
                frame.x.flip(op.q0);
            }
            if label & 2 != 0 {
                frame.z.flip(op.q0);
            }
        }
        OpKind::Cnot => {
            if label & 1 != 0 {
                frame.x.flip(op.q0);
            }
            if label & 2 != 0 {
                frame.z.flip(op.q0);
            }
            if label & 4 != 0 {
                frame.x.flip(op.q1);
            }
            if label & 8 != 0 {
                frame.z.flip(op.q1);
            }
        }
    }
}

/// Conjugates the frame through one op; `meas_idx` is its measurement ordinal.
fn step(op: &Op, meas_idx: Option<usize>, frame: &mut PauliFrame) {
    match op.kind {
        OpKind::PrepZ | OpKind::PrepX => {
            frame.x.set(op.q0, false);
            frame.z.set(op.q0, false);
        }
        OpKind::H => {
            let (x, z) = (frame.x.get(op.q0), frame.z.get(op.q0));
            frame.x.set(op.q0, z);
            frame.z.set(op.q0, x);
        }
        OpKind::Cnot => {
            if frame.x.get(op.q0) {
                frame.x.flip(op.q1);
            }
            if frame.z.get(op.q1) {
                frame.z.flip(op.q0);
            }
        }
        OpKind::MeasZ | OpKind::MeasX => {
            let hit = if op.kind == OpKind::MeasZ {
                frame.x.get(op.q0)
            } else {
                frame.z.get(op.q0)
            };
            frame.meas.set(meas_idx.expect("measurement ordinal"), hit);
            frame.x.set(op.q0, false);
            frame.z.set(op.q0, false);
        }
    }
}

/// Frame at the end of the circuit after injecting every listed fault.
///
/// Gate and preparation faults act right after their op; measurement faults
/// act right before it.
pub fn propagate_faults(circuit: &Circuit, faults: &[FaultLocation]) -> PauliFrame {
    let mut sorted = faults.to_vec();
    sorted.sort();
    let meas_idx = circuit.measurement_index();
    let mut frame = PauliFrame::identity(circuit);
    let mut next = 0;
    let start = sorted.first().map_or(circuit.len(), |f| f.location);
    for (i, op) in circuit.ops.iter().enumerate().skip(start) {
        if op.kind.is_meas() {
            while next < sorted.len() && sorted[next].location == i {
                inject(op, sorted[next].label, &mut frame);
                next += 1;
            }
            step(op, meas_idx[i], &mut frame);
        } else {
            step(op, meas_idx[i], &mut frame);
            while next < sorted.len() && sorted[next].location == i {
                inject(op, sorted[next].label, &mut frame);
                next += 1;
            }
        }
    }
    frame
}

pub fn propagate_fault(circuit: &Circuit, fault: FaultLocation) -> PauliFrame {
    propagate_faults(circuit, &[fault])
}

/// Frames of every single fault of a circuit, in location/label order.
#[derive(Clone, Debug)]
pub struct SingleFaultTable {
    pub entries: Vec<(FaultLocation, PauliFrame)>,
}

impl SingleFaultTable {
    pub fn build(circuit: &Circuit) -> Self {
        let mut entries = Vec::new();
        for (i, op) in circuit.ops.iter().enumerate() {
            for label in fault_labels(op.kind) {
                let f = FaultLocation { location: i, label };
                entries.push((f, propagate_fault(circuit, f)));
            }
        }
        Self { entries }
    }
}

/// Distinct nonzero projected frames with the faults producing each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupFault {
    pub frame: ProjectedFrame,
    pub multiplicity: usize,
    pub locations: Vec<FaultLocation>,
}

/// Single-fault frames projected to one component, deduplicated by frame.
///
/// Faults with no effect on the component are dropped; output order follows
/// the first fault producing each frame.
pub fn enumerate_single_faults(circuit: &Circuit, component: PauliType) -> Vec<DedupFault> {
    let table = SingleFaultTable::build(circuit);
    dedup_projected(
        table
            .entries
            .iter()
            .map(|(f, fr)| (*f, fr.project(circuit, component))),
    )
}

pub(crate) fn dedup_projected(
    items: impl Iterator<Item = (FaultLocation, ProjectedFrame)>,
) -> Vec<DedupFault> {
    let mut index: HashMap<ProjectedFrame, usize> = HashMap::new();
    let mut out: Vec<DedupFault> = Vec::new();
    for (f, p) in items {
        if p.is_zero() {
            continue;
        }
        match index.get(&p) {
            Some(&i) => {
                out[i].multiplicity += 1;
                out[i].locations.push(f);
            }
            None => {
                index.insert(p.clone(), out.len());
                out.push(DedupFault {
                    frame: p,
                    multiplicity: 1,
                    locations: vec![f],
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circ(t: &str) -> Circuit {
        Circuit::parse(t).unwrap()
    }

    #[test]
    fn cnot_conjugation() {
        let c = circ("QUBITS 2\nCNOT 0 1\nCNOT 0 1");
        // X on the control after the first CNOT spreads through the second
        let f = propagate_fault(&c, FaultLocation { location: 0, label: 1 });
        assert_eq!(f.x.to_string(), "11");
        let f = propagate_fault(&c, FaultLocation { location: 0, label: 8 });
        assert_eq!((f.x.to_string(), f.z.to_string()), ("00".into(), "11".into()));
    }

    #[test]
    fn measurement_fault_flips_record() {
        let c = circ("PZ 0\nMZ 0");
        let f = propagate_fault(&c, FaultLocation { location: 1, label: 1 });
        assert!(f.meas.get(0));
        assert!(f.x.is_zero() && f.z.is_zero());
        // a prep flip reaches the same measurement
        let g = propagate_fault(&c, FaultLocation { location: 0, label: 1 });
        assert_eq!(f, g);
    }

    #[test]
    fn hadamard_swaps_components() {
        let c = circ("QUBITS 1\nH 0\nH 0");
        let f = propagate_fault(&c, FaultLocation { location: 0, label: 1 });
        assert_eq!((f.x.to_string(), f.z.to_string()), ("0".into(), "1".into()));
    }

    #[test]
    fn single_cnot_dedup() {
        let c = circ("QUBITS 2\nCNOT 0 1");
        let xs = enumerate_single_faults(&c, PauliType::X);
        let total: usize = xs.iter().map(|d| d.multiplicity).sum();
        assert_eq!(total, 12);
        let mut frames: Vec<String> = xs.iter().map(|d| d.frame.residual.to_string()).collect();
        frames.sort();
        assert_eq!(frames, vec!["01", "10", "11"]);
        assert!(enumerate_single_faults(&Circuit::new(0), PauliType::X).is_empty());
    }

    #[test]
    fn identity_frame_for_no_faults() {
        let c = circ("PZ 0\nPZ 1\nCNOT 0 1\nMZ 1");
        assert!(propagate_faults(&c, &[]).is_identity());
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        proptest::collection::vec((0u8..3, 0usize..4, 0usize..4), 1..25).prop_map(|ops| {
            let mut c = Circuit::new(4);
            for (k, a, b) in ops {
                match k {
                    0 => c.h(a),
                    1 if a != b => c.cnot(a, b),
                    _ => c.prep_z(a),
                }
            }
            c.meas_z(0);
            c.meas_x(1);
            c
        })
    }

    proptest! {
        #[test]
        fn multi_fault_frames_compose(c in arb_circuit(), picks in proptest::collection::vec((0usize..64, 0u8..16), 1..5)) {
            let table = SingleFaultTable::build(&c);
            let mut faults = Vec::new();
            let mut expect = PauliFrame::identity(&c);
            for (i, _) in picks {
                let (f, fr) = &table.entries[i % table.entries.len()];
                faults.push(*f);
                expect.xor_assign(fr);
            }
            prop_assert_eq!(propagate_faults(&c, &faults), expect);
        }
    }
}
