//! Two-step repetition distillation protocols and their assembly into circuits.
//!
//! Blocks are numbered group-major: block `g * m1 + i` is member `i` of
//! step-1 group `g`, and member 0 of each group is its representative.
//! Block 0 is the kept output block.
//!
//! For `|0_L⟩` the first step checks X errors: each group representative
//! controls a transversal CNOT onto every other member in listed order, and
//! each member is then measured in Z. The second step checks Z errors: every
//! other representative controls a transversal CNOT onto block 0 and is
//! measured in X. For `|+_L⟩` a transversal H follows every block
//! preparation and the roles of X and Z, control and target are exchanged.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::circuit::{Circuit, OpKind};
use crate::code::{CssCode, PauliType, TargetState};
use crate::error::{Error, Result};
use crate::matrix::GF2Matrix;
use crate::symmetry::{verify_code_automorphism, AutomorphismElement};

#[derive(Clone, Debug)]
pub struct DistillationProtocol {
    pub code: CssCode,
    pub target: TargetState,
    /// Members per step-1 group.
    pub m1: usize,
    /// Number of groups, which is also the size of the step-2 group.
    pub m2: usize,
    /// `perms[g][i]` acts on block `g * m1 + i`.
    pub perms: Vec<Vec<AutomorphismElement>>,
    /// Non-FT preparation of `|0_L⟩` on the code's `n` qubits.
    pub block_circuit: Circuit,
    /// Also check the logical parities that are deterministic for the target
    /// state (on by default). Without them a prep fault on the kept block that
    /// lands on a logical operator survives every comparison.
    pub logical_checks: bool,
}

/// Block-level operation of the distillation network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetOp {
    TCnot {
        step: usize,
        control: usize,
        target: usize,
    },
    Measure {
        step: usize,
        block: usize,
        basis: PauliType,
    },
}

/// Parities that must vanish on one measured block.
#[derive(Clone, Debug)]
pub struct AcceptCheck {
    pub step: usize,
    pub block: usize,
    /// Z for MZ outcomes (detecting X errors), X for MX outcomes.
    pub basis: PauliType,
    /// Ordinal of the block's first measurement; qubit `j` is at `meas_offset + j`.
    pub meas_offset: usize,
    pub matrix: GF2Matrix,
}

/// Which part of the protocol a circuit location belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Prep { block: usize },
    TCnot { index: usize },
    Meas { block: usize },
}

#[derive(Clone, Debug)]
pub struct RegionSpan {
    pub region: Region,
    pub locations: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct AssembledCircuit {
    pub circuit: Circuit,
    pub accept_checks: Vec<AcceptCheck>,
    pub kept_block: Range<usize>,
    pub regions: Vec<RegionSpan>,
    pub network: Vec<NetOp>,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolDescriptor {
    pub code_ref: String,
    pub shape: [usize; 2],
    pub perms: Vec<Vec<String>>,
    pub target: TargetState,
    #[serde(default = "default_true")]
    pub logical_checks: bool,
}

fn default_true() -> bool {
    true
}

pub fn identity_perms(code: &CssCode, m1: usize, m2: usize) -> Vec<Vec<AutomorphismElement>> {
    let m = code.origin.as_ref().map_or(1, |o| o.m);
    vec![vec![AutomorphismElement::identity(code.n, m); m1]; m2]
}

pub fn build_protocol(
    code: &CssCode,
    shape: (usize, usize),
    perms: Vec<Vec<AutomorphismElement>>,
    target: TargetState,
    block_circuit: Circuit,
) -> Result<DistillationProtocol> {
    let (m1, m2) = shape;
    if m1 < 2 || m2 < 2 {
        return Err(Error::Protocol(format!(
            "group sizes must be at least 2, got ({m1}, {m2})"
        )));
    }
    if perms.len() != m2 || perms.iter().any(|g| g.len() != m1) {
        return Err(Error::Protocol(format!(
            "expected {m2} groups of {m1} permutations"
        )));
    }
    if block_circuit.n_qubits != code.n {
        return Err(Error::Protocol(format!(
            "block circuit acts on {} qubits, code has {}",
            block_circuit.n_qubits, code.n
        )));
    }
    if block_circuit.ops.iter().any(|o| o.kind.is_meas()) {
        return Err(Error::Protocol("block circuit must not measure".into()));
    }
    if target == TargetState::Plus && !code.h_x.same_row_space(&code.h_z) {
        return Err(Error::Protocol(
            "|+_L> via transversal H needs h_x and h_z to span the same space".into(),
        ));
    }
    for (g, group) in perms.iter().enumerate() {
        for (i, p) in group.iter().enumerate() {
            let block = g * m1 + i;
            if p.n != code.n {
                return Err(Error::InvalidPermutation {
                    perm: p.to_string(),
                    block,
                    reason: format!("acts on length {}, code has {}", p.n, code.n),
                });
            }
            if !verify_code_automorphism(code, p) {
                return Err(Error::InvalidPermutation {
                    perm: p.to_string(),
                    block,
                    reason: "not an automorphism of the code".into(),
                });
            }
        }
    }
    Ok(DistillationProtocol {
        code: code.clone(),
        target,
        m1,
        m2,
        perms,
        block_circuit,
        logical_checks: true,
    })
}

impl DistillationProtocol {
    pub fn num_blocks(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn perm_of(&self, block: usize) -> &AutomorphismElement {
        &self.perms[block / self.m1][block % self.m1]
    }

    /// Per-block preparation circuit, including the H layer for `|+_L⟩`.
    pub fn block_prep(&self) -> Circuit {
        let mut c = self.block_circuit.clone();
        if self.target == TargetState::Plus {
            for q in 0..c.n_qubits {
                c.h(q);
            }
        }
        c
    }

    /// Error type checked by each step: step 1 first.
    pub fn step_types(&self) -> [PauliType; 2] {
        match self.target {
            TargetState::Zero => [PauliType::X, PauliType::Z],
            TargetState::Plus => [PauliType::Z, PauliType::X],
        }
    }

    /// Step whose accept checks detect error type `p`.
    pub fn step_detecting(&self, p: PauliType) -> usize {
        if self.step_types()[0] == p {
            1
        } else {
            2
        }
    }

    /// Block-level operation sequence shared by assembly and verification.
    pub fn network(&self) -> Vec<NetOp> {
        let mut ops = Vec::new();
        let [t1, t2] = self.step_types();
        // checking X errors: kept side controls, partner measured in Z
        let pair = |step: usize, kept: usize, other: usize, ty: PauliType, ops: &mut Vec<NetOp>| {
            let (control, target, basis) = match ty {
                PauliType::X => (kept, other, PauliType::Z),
                PauliType::Z => (other, kept, PauliType::X),
            };
            ops.push(NetOp::TCnot {
                step,
                control,
                target,
            });
            ops.push(NetOp::Measure {
                step,
                block: other,
                basis,
            });
        };
        for g in 0..self.m2 {
            let rep = g * self.m1;
            for i in 1..self.m1 {
                pair(1, rep, rep + i, t1, &mut ops);
            }
        }
        for g in 1..self.m2 {
            pair(2, 0, g * self.m1, t2, &mut ops);
        }
        ops
    }

    /// Checks applied to a block measured in `basis`.
    pub fn check_matrix(&self, basis: PauliType) -> GF2Matrix {
        let code = &self.code;
        match basis {
            // MZ outcomes see X errors, caught by h_z
            PauliType::Z => {
                let mut m = code.h_z.clone();
                if self.logical_checks && self.target == TargetState::Zero {
                    m = m.vstack(&code.logical_z);
                }
                m
            }
            PauliType::X => {
                let mut m = code.h_x.clone();
                if self.logical_checks && self.target == TargetState::Plus {
                    m = m.vstack(&code.logical_x);
                }
                m
            }
        }
    }

    pub fn to_descriptor(&self, code_ref: &str) -> ProtocolDescriptor {
        ProtocolDescriptor {
            code_ref: code_ref.to_string(),
            shape: [self.m1, self.m2],
            perms: self
                .perms
                .iter()
                .map(|g| g.iter().map(|p| p.to_string()).collect())
                .collect(),
            target: self.target,
            logical_checks: self.logical_checks,
        }
    }

    pub fn from_descriptor(d: &ProtocolDescriptor, code: &CssCode, block_circuit: Circuit) -> Result<Self> {
        let m = code
            .origin
            .as_ref()
            .map(|o| o.m)
            .ok_or_else(|| Error::Protocol("code has no field degree for automorphisms".into()))?;
        let perms = d
            .perms
            .iter()
            .map(|g| {
                g.iter()
                    .map(|t| AutomorphismElement::parse(t, code.n, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = build_protocol(code, (d.shape[0], d.shape[1]), perms, d.target, block_circuit)?;
        p.logical_checks = d.logical_checks;
        Ok(p)
    }
}

pub fn assemble(protocol: &DistillationProtocol) -> AssembledCircuit {
    let n = protocol.code.n;
    let blocks = protocol.num_blocks();
    let prep = protocol.block_prep();
    let mut circuit = Circuit::new(n * blocks);
    let mut regions = Vec::new();
    for b in 0..blocks {
        let perm = protocol.perm_of(b).permutation();
        let map: Vec<usize> = (0..n).map(|q| b * n + perm[q]).collect();
        let start = circuit.len();
        circuit.ops.extend(prep.relabel(&map, n * blocks).ops);
        regions.push(RegionSpan {
            region: Region::Prep { block: b },
            locations: start..circuit.len(),
        });
    }
    let network = protocol.network();
    let mut accept_checks = Vec::new();
    let mut meas_count = 0;
    let mut tcnot_index = 0;
    for op in &network {
        let start = circuit.len();
        match *op {
            NetOp::TCnot { control, target, .. } => {
                for j in 0..n {
                    circuit.cnot(control * n + j, target * n + j);
                }
                regions.push(RegionSpan {
                    region: Region::TCnot { index: tcnot_index },
                    locations: start..circuit.len(),
                });
                tcnot_index += 1;
            }
            NetOp::Measure { step, block, basis } => {
                for j in 0..n {
                    match basis {
                        PauliType::Z => circuit.meas_z(block * n + j),
                        PauliType::X => circuit.meas_x(block * n + j),
                    }
                }
                regions.push(RegionSpan {
                    region: Region::Meas { block },
                    locations: start..circuit.len(),
                });
                accept_checks.push(AcceptCheck {
                    step,
                    block,
                    basis,
                    meas_offset: meas_count,
                    matrix: protocol.check_matrix(basis),
                });
                meas_count += n;
            }
        }
    }
    AssembledCircuit {
        circuit,
        accept_checks,
        kept_block: 0..n,
        regions,
        network,
        n,
    }
}

impl AssembledCircuit {
    /// Stacked parities of one step's checks on measurement flips.
    pub fn detection(&self, meas_flips: &BitVec, step: usize) -> BitVec {
        let mut out = Vec::new();
        for chk in self.accept_checks.iter().filter(|c| c.step == step) {
            let local = meas_flips.slice(chk.meas_offset, self.n);
            let s = chk.matrix.mul_vec_unchecked(&local);
            out.extend((0..s.len()).map(|i| s.get(i)));
        }
        BitVec::from_bools(&out)
    }

    pub fn detection_len(&self, step: usize) -> usize {
        self.accept_checks
            .iter()
            .filter(|c| c.step == step)
            .map(|c| c.matrix.num_rows())
            .sum()
    }

    /// Operator counts of one block's preparation, as used by the acceptance bounds.
    pub fn region_of(&self, location: usize) -> Region {
        self.regions
            .iter()
            .find(|r| r.locations.contains(&location))
            .map(|r| r.region)
            .expect("location inside the circuit")
    }

    pub fn count(&self, kind: OpKind) -> usize {
        self.circuit.count(kind)
    }
}
