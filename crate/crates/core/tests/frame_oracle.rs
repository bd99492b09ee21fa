//! Frame simulation against a full stabilizer-tableau simulation on small protocols.

use qbch::circuit::{fault_labels, synth_css_prep, FaultLocation, OpKind};
use qbch::code::quantum_bch;
use qbch::distill::{build_protocol, identity_perms};
use qbch::mc::Simulator;
use qbch::{BitVec, CssCode, FieldSpec, GF2Matrix, TargetState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Aaronson-Gottesman tableau: rows `0..n` destabilizers, `n..2n` stabilizers.
struct Tableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i32 - x2 as i32,
        (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
        (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
    }
}

impl Tableau {
    fn new(n: usize) -> Self {
        let mut t = Tableau {
            n,
            x: vec![vec![false; n]; 2 * n + 1],
            z: vec![vec![false; n]; 2 * n + 1],
            r: vec![false; 2 * n + 1],
        };
        for i in 0..n {
            t.x[i][i] = true;
            t.z[n + i][i] = true;
        }
        t
    }

    /// Row `h` becomes row `h` times row `i`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut s = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            s += g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = s.rem_euclid(4) == 2;
        for j in 0..self.n {
            self.x[h][j] ^= self.x[i][j];
            self.z[h][j] ^= self.z[i][j];
        }
    }

    fn h(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q] && self.z[i][q];
            let t = self.x[i][q];
            self.x[i][q] = self.z[i][q];
            self.z[i][q] = t;
        }
    }

    fn cnot(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] && self.z[i][b] && (self.x[i][b] ^ self.z[i][a] ^ true);
            self.x[i][b] ^= self.x[i][a];
            self.z[i][a] ^= self.z[i][b];
        }
    }

    fn pauli_x(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.z[i][q];
        }
    }

    fn pauli_z(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q];
        }
    }

    fn measure_z(&mut self, q: usize, rng: &mut ChaCha8Rng) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p][q]) {
            for i in 0..2 * n {
                if i != p && self.x[i][q] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p] = vec![false; n];
            self.z[p] = vec![false; n];
            self.z[p][q] = true;
            self.r[p] = rng.random();
            self.r[p]
        } else {
            let s = 2 * n;
            self.x[s] = vec![false; n];
            self.z[s] = vec![false; n];
            self.r[s] = false;
            for i in 0..n {
                if self.x[i][q] {
                    self.rowsum(s, i + n);
                }
            }
            self.r[s]
        }
    }

    fn reset_z(&mut self, q: usize, rng: &mut ChaCha8Rng) {
        if self.measure_z(q, rng) {
            self.pauli_x(q);
        }
    }

    /// Sign of a Pauli in the stabilizer group; `None` if it is not in it.
    fn sign_of(&mut self, px: &[bool], pz: &[bool]) -> Option<bool> {
        let n = self.n;
        let s = 2 * n;
        self.x[s] = vec![false; n];
        self.z[s] = vec![false; n];
        self.r[s] = false;
        for i in 0..n {
            // destabilizer i anticommutes with P iff stabilizer i is a factor
            let mut anti = false;
            for j in 0..n {
                anti ^= (self.x[i][j] && pz[j]) ^ (self.z[i][j] && px[j]);
            }
            if anti {
                self.rowsum(s, i + n);
            }
        }
        (self.x[s] == px && self.z[s] == pz).then_some(self.r[s])
    }
}

fn run_tableau(
    circuit: &qbch::circuit::Circuit,
    faults: &[FaultLocation],
    rng: &mut ChaCha8Rng,
) -> (Tableau, Vec<bool>) {
    let mut t = Tableau::new(circuit.n_qubits);
    let mut outcomes = Vec::new();
    let inject = |t: &mut Tableau, op: &qbch::circuit::Op, label: u8| match op.kind {
        OpKind::PrepZ | OpKind::MeasZ => t.pauli_x(op.q0),
        OpKind::PrepX | OpKind::MeasX => t.pauli_z(op.q0),
        OpKind::H => {
            if label & 1 != 0 {
                t.pauli_x(op.q0)
            }
            if label & 2 != 0 {
                t.pauli_z(op.q0)
            }
        }
        OpKind::Cnot => {
            for (bit, q, zpart) in [(1, op.q0, false), (2, op.q0, true), (4, op.q1, false), (8, op.q1, true)] {
                if label & bit != 0 {
                    if zpart {
                        t.pauli_z(q)
                    } else {
                        t.pauli_x(q)
                    }
                }
            }
        }
    };
    for (i, op) in circuit.ops.iter().enumerate() {
        let here: Vec<u8> = faults.iter().filter(|f| f.location == i).map(|f| f.label).collect();
        if op.kind.is_meas() {
            for &l in &here {
                inject(&mut t, op, l);
            }
        }
        match op.kind {
            OpKind::PrepZ => t.reset_z(op.q0, rng),
            OpKind::PrepX => {
                t.reset_z(op.q0, rng);
                t.h(op.q0);
            }
            OpKind::H => t.h(op.q0),
            OpKind::Cnot => t.cnot(op.q0, op.q1),
            OpKind::MeasZ => outcomes.push(t.measure_z(op.q0, rng)),
            OpKind::MeasX => {
                t.h(op.q0);
                outcomes.push(t.measure_z(op.q0, rng));
            }
        }
        if !op.kind.is_meas() {
            for &l in &here {
                inject(&mut t, op, l);
            }
        }
    }
    (t, outcomes)
}

fn padded(n_total: usize, v: &BitVec) -> Vec<bool> {
    (0..n_total).map(|i| i < v.len() && v.get(i)).collect()
}

fn compare(code: &CssCode, shape: (usize, usize), target: TargetState, shots: usize, p: f64, seed: u64) {
    let protocol = build_protocol(code, shape, identity_perms(code, shape.0, shape.1), target, synth_css_prep(code)).unwrap();
    let sim = Simulator::new(&protocol, 3);
    let a = &sim.assembled;
    let total = a.circuit.n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = |m: &GF2Matrix| m.rows().to_vec();
    let (zs, xs) = match target {
        TargetState::Zero => (gen(&code.h_z.vstack(&code.logical_z)), gen(&code.h_x)),
        TargetState::Plus => (gen(&code.h_z), gen(&code.h_x.vstack(&code.logical_x))),
    };
    let zero = vec![false; total];
    let mut accepted = 0;
    for _ in 0..shots {
        let mut faults = Vec::new();
        for (i, op) in a.circuit.ops.iter().enumerate() {
            if rng.random_bool(p) {
                faults.push(FaultLocation {
                    location: i,
                    label: rng.random_range(fault_labels(op.kind)),
                });
            }
        }
        let frame = sim.evaluate(&faults);
        let (mut tab, outcomes) = run_tableau(&a.circuit, &faults, &mut rng);
        let raw = BitVec::from_bools(&outcomes);
        assert_eq!(a.detection(&raw, 1), frame.detect_step1);
        assert_eq!(a.detection(&raw, 2), frame.detect_step2);
        if !(frame.accept_step1 && frame.accept_step2) {
            continue;
        }
        accepted += 1;
        for row in &zs {
            let expect = row.dot(&frame.residual_x);
            assert_eq!(tab.sign_of(&zero, &padded(total, row)), Some(expect));
        }
        for row in &xs {
            let expect = row.dot(&frame.residual_z);
            assert_eq!(tab.sign_of(&padded(total, row), &zero), Some(expect));
        }
    }
    assert!(accepted > shots / 10, "too few accepted shots to compare");
}

fn steane() -> CssCode {
    quantum_bch(&FieldSpec::new(3).unwrap(), 3).unwrap().1
}

#[test]
fn noiseless_kept_block_carries_target_state() {
    for target in [TargetState::Zero, TargetState::Plus] {
        compare(&steane(), (2, 2), target, 5, 0.0, 1);
    }
}

#[test]
fn frames_match_tableau_on_steane_zero() {
    compare(&steane(), (2, 2), TargetState::Zero, 400, 0.01, 2);
    compare(&steane(), (3, 2), TargetState::Zero, 150, 0.01, 3);
}

#[test]
fn frames_match_tableau_on_steane_plus() {
    compare(&steane(), (2, 2), TargetState::Plus, 400, 0.01, 4);
}
