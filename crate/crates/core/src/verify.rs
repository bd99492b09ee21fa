//! Strict fault-tolerance verification of distillation protocols.
//!
//! Faults are grouped into regions: one per block preparation and one per
//! transversal CNOT and measured block of the network. For each error type
//! every single fault is reduced to a [`FaultEffect`]: the accept parities it
//! flips and the residual it leaves on the kept block. A `w`-fault pattern is
//! malignant when its effects XOR to zero parity and a residual whose reduced
//! weight exceeds `w`. Patterns are enumerated case by case, one case per
//! distribution of `w` faults over regions, by joining two half tables on
//! their parities.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::circuit::{enumerate_single_faults, Circuit, FaultLocation};
use crate::code::{CosetWeightTable, CssCode, PauliType, ReducedWeight, TargetState};
use crate::combin::{binomial_u128, compositions, for_each_combination};
use crate::distill::{
    assemble, build_protocol, AssembledCircuit, DistillationProtocol, NetOp, Region,
};
use crate::error::{Error, Result};
use crate::symmetry::AutomorphismElement;

/// Net effect of one class of identical single faults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultEffect {
    pub region: usize,
    pub multiplicity: usize,
    pub detect: BitVec,
    pub residual: BitVec,
    /// Locations in the assembled circuit producing this effect.
    pub locations: Vec<FaultLocation>,
}

impl FaultEffect {
    /// Undetected with a residual equivalent to no error.
    pub fn is_benign(&self, table: &CosetWeightTable) -> bool {
        self.detect.is_zero() && table.reduced_weight(&self.residual) == ReducedWeight::Exact(0)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Include transversal-CNOT and measurement faults, not only preparation faults.
    pub include_network: bool,
    /// Largest half table (entries) a single case may build.
    pub memory_budget: u128,
    /// At most this many patterns are kept in the verdict.
    pub max_patterns: usize,
    /// Stop at the first malignant pattern.
    pub stop_at_first: bool,
    /// Check fault counts up to this value instead of `t`.
    pub max_w: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            include_network: true,
            memory_budget: 50_000_000,
            max_patterns: 100,
            stop_at_first: false,
            max_w: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MalignantPattern {
    pub pass: String,
    pub w: usize,
    pub locations: Vec<FaultLocation>,
    pub residual_hex: String,
    pub reduced_weight: ReducedWeight,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub cases: usize,
    pub malignant: Vec<MalignantPattern>,
    pub malignant_total: u64,
    /// Distinct effects per region, X pass then Z pass.
    pub table_sizes: Vec<Vec<usize>>,
    pub elapsed_s: f64,
}

fn pass_name(p: PauliType) -> &'static str {
    match p {
        PauliType::X => "X",
        PauliType::Z => "Z",
    }
}

/// Measurement basis whose outcomes a given error type flips.
fn flipped_basis(p: PauliType) -> PauliType {
    p.other()
}

/// Block-level propagation of one error type through the network.
struct NetworkModel<'a> {
    protocol: &'a DistillationProtocol,
    ops: Vec<NetOp>,
    pass: PauliType,
    n: usize,
    detect_len: usize,
}

impl<'a> NetworkModel<'a> {
    fn new(protocol: &'a DistillationProtocol, pass: PauliType) -> Self {
        let ops = protocol.network();
        let basis = flipped_basis(pass);
        let detect_len = ops
            .iter()
            .filter(|o| matches!(o, NetOp::Measure { basis: b, .. } if *b == basis))
            .count()
            * protocol.check_matrix(basis).num_rows();
        Self {
            protocol,
            ops,
            pass,
            n: protocol.code.n,
            detect_len,
        }
    }

    /// Runs ops `start..` on the block state; returns (detect, kept residual).
    fn run(&self, start: usize, mut state: Vec<BitVec>) -> (BitVec, BitVec) {
        let basis = flipped_basis(self.pass);
        let check = self.protocol.check_matrix(basis);
        let rows = check.num_rows();
        let mut detect = BitVec::zeros(self.detect_len);
        let mut slot = 0;
        for (i, op) in self.ops.iter().enumerate() {
            match *op {
                NetOp::TCnot { control, target, .. } => {
                    if i < start {
                        continue;
                    }
                    let (src, dst) = match self.pass {
                        PauliType::X => (control, target),
                        PauliType::Z => (target, control),
                    };
                    let v = state[src].clone();
                    state[dst].xor_assign(&v);
                }
                NetOp::Measure { block, basis: b, .. } => {
                    if b != basis {
                        continue;
                    }
                    if i >= start {
                        let s = check.mul_vec_unchecked(&state[block]);
                        for r in s.iter_ones() {
                            detect.set(slot * rows + r, true);
                        }
                        state[block].clear();
                    }
                    slot += 1;
                }
            }
        }
        (detect, state.swap_remove(0))
    }

    fn blank(&self) -> Vec<BitVec> {
        vec![BitVec::zeros(self.n); self.protocol.num_blocks()]
    }
}

fn dedup_effects(region: usize, items: Vec<(FaultLocation, BitVec, BitVec)>) -> Vec<FaultEffect> {
    let mut index: HashMap<(BitVec, BitVec), usize> = HashMap::new();
    let mut out: Vec<FaultEffect> = Vec::new();
    for (loc, detect, residual) in items {
        if detect.is_zero() && residual.is_zero() {
            continue;
        }
        let key = (detect, residual);
        match index.get(&key) {
            Some(&i) => {
                out[i].multiplicity += 1;
                out[i].locations.push(loc);
            }
            None => {
                index.insert(key.clone(), out.len());
                out.push(FaultEffect {
                    region,
                    multiplicity: 1,
                    detect: key.0,
                    residual: key.1,
                    locations: vec![loc],
                });
            }
        }
    }
    out
}

/// Single-fault effects of each region for one error type, in region order.
pub struct FaultTables {
    pub pass: PauliType,
    pub regions: Vec<Region>,
    pub tables: Vec<Vec<FaultEffect>>,
}

/// Preparation effects of one block's preparation circuit.
pub fn build_fault_table(protocol: &DistillationProtocol, block: usize, pass: PauliType) -> Vec<FaultEffect> {
    let assembled = assemble(protocol);
    let model = NetworkModel::new(protocol, pass);
    let base = enumerate_single_faults(&protocol.block_prep(), pass);
    prep_table(&model, &assembled, &base, block)
}

fn prep_table(
    model: &NetworkModel<'_>,
    assembled: &AssembledCircuit,
    base: &[crate::circuit::DedupFault],
    block: usize,
) -> Vec<FaultEffect> {
    let perm = model.protocol.perm_of(block);
    let offset = assembled.regions[block].locations.start;
    let mut items = Vec::new();
    for d in base {
        let mut state = model.blank();
        state[block] = perm.apply(&d.frame.residual).expect("block length");
        let (detect, residual) = model.run(0, state);
        for f in &d.locations {
            items.push((
                FaultLocation {
                    location: offset + f.location,
                    label: f.label,
                },
                detect.clone(),
                residual.clone(),
            ));
        }
    }
    dedup_effects(block, items)
}

pub fn build_fault_tables(
    protocol: &DistillationProtocol,
    assembled: &AssembledCircuit,
    pass: PauliType,
    include_network: bool,
) -> FaultTables {
    let model = NetworkModel::new(protocol, pass);
    let base = enumerate_single_faults(&protocol.block_prep(), pass);
    let n = protocol.code.n;
    let blocks = protocol.num_blocks();
    let mut regions = Vec::new();
    let mut tables = Vec::new();
    for b in 0..blocks {
        regions.push(Region::Prep { block: b });
        tables.push(prep_table(&model, assembled, &base, b));
    }
    if include_network {
        for (i, op) in model.ops.iter().enumerate() {
            let span = &assembled.regions[blocks + i];
            let mut items = Vec::new();
            match *op {
                NetOp::TCnot { control, target, .. } => {
                    for j in 0..n {
                        for label in 1u8..=15 {
                            let (cbit, tbit) = match pass {
                                PauliType::X => (label & 1 != 0, label & 4 != 0),
                                PauliType::Z => (label & 2 != 0, label & 8 != 0),
                            };
                            let mut state = model.blank();
                            state[control].set(j, cbit);
                            state[target].set(j, tbit);
                            let (d, r) = model.run(i + 1, state);
                            items.push((FaultLocation { location: span.locations.start + j, label }, d, r));
                        }
                    }
                }
                NetOp::Measure { block, basis, .. } => {
                    for j in 0..n {
                        let mut state = model.blank();
                        if basis == flipped_basis(pass) {
                            state[block].set(j, true);
                        }
                        let (d, r) = model.run(i, state);
                        items.push((FaultLocation { location: span.locations.start + j, label: 1 }, d, r));
                    }
                }
            }
            regions.push(span.region);
            tables.push(dedup_effects(blocks + i, items));
        }
    }
    FaultTables { pass, regions, tables }
}

/// Pairs `(i, j)` with `a[i] == b[j]`, ordered by `j` then `i`.
pub fn mitm_match(a: &[BitVec], b: &[BitVec]) -> Vec<(usize, usize)> {
    let mut index: HashMap<&BitVec, Vec<usize>> = HashMap::new();
    for (i, k) in a.iter().enumerate() {
        index.entry(k).or_default().push(i);
    }
    let mut out = Vec::new();
    for (j, k) in b.iter().enumerate() {
        if let Some(is) = index.get(k) {
            out.extend(is.iter().map(|&i| (i, j)));
        }
    }
    out
}

/// One side of a split: `(region, count)` entries plus the shared split region.
struct Partial {
    detect: BitVec,
    residual: BitVec,
    picks: Vec<(usize, usize)>,
}

fn enumerate_side(tables: &FaultTables, parts: &[(usize, usize)], n: usize, detect_len: usize) -> Vec<Partial> {
    let mut out = vec![Partial {
        detect: BitVec::zeros(detect_len),
        residual: BitVec::zeros(n),
        picks: Vec::new(),
    }];
    for &(r, c) in parts {
        let table = &tables.tables[r];
        let mut next = Vec::new();
        for p in &out {
            for_each_combination(table.len(), c, |idx| {
                let mut d = p.detect.clone();
                let mut res = p.residual.clone();
                let mut picks = p.picks.clone();
                for &i in idx {
                    d.xor_assign(&table[i].detect);
                    res.xor_assign(&table[i].residual);
                    picks.push((r, i));
                }
                next.push(Partial {
                    detect: d,
                    residual: res,
                    picks,
                });
            });
        }
        out = next;
    }
    out
}

struct CaseOutcome {
    found: Vec<MalignantPattern>,
    total: u64,
}

fn run_case(
    tables: &FaultTables,
    weights: &CosetWeightTable,
    case: &[usize],
    w: usize,
    opts: &VerifyOptions,
    n: usize,
    detect_len: usize,
) -> Result<CaseOutcome> {
    // flatten into a pick sequence and cut it in half
    let parts: Vec<(usize, usize)> = case.iter().enumerate().filter(|(_, &c)| c > 0).map(|(r, &c)| (r, c)).collect();
    let cut = w / 2;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut split_region = None;
    let mut acc = 0;
    for &(r, c) in &parts {
        if acc + c <= cut {
            left.push((r, c));
        } else if acc >= cut {
            right.push((r, c));
        } else {
            left.push((r, cut - acc));
            right.push((r, acc + c - cut));
            split_region = Some(r);
        }
        acc += c;
    }
    let size = |side: &[(usize, usize)]| -> u128 {
        side.iter()
            .map(|&(r, c)| binomial_u128(tables.tables[r].len() as u64, c as u64))
            .product()
    };
    let (ls, rs) = (size(&left), size(&right));
    if ls.min(rs) > opts.memory_budget {
        return Err(Error::MemoryBudget {
            case: format!("pass {} w={w} distribution {:?}", pass_name(tables.pass), parts),
            entries: ls.min(rs),
            budget: opts.memory_budget,
        });
    }
    let lp = enumerate_side(tables, &left, n, detect_len);
    let rp = enumerate_side(tables, &right, n, detect_len);
    let lk: Vec<BitVec> = lp.iter().map(|p| p.detect.clone()).collect();
    let rk: Vec<BitVec> = rp.iter().map(|p| p.detect.clone()).collect();
    let mut out = CaseOutcome {
        found: Vec::new(),
        total: 0,
    };
    for (i, j) in mitm_match(&lk, &rk) {
        let (a, b) = (&lp[i], &rp[j]);
        if let Some(r) = split_region {
            let amax = a.picks.iter().filter(|p| p.0 == r).map(|p| p.1).max();
            let bmin = b.picks.iter().filter(|p| p.0 == r).map(|p| p.1).min();
            if amax >= bmin {
                continue;
            }
        }
        let residual = a.residual.xor(&b.residual);
        let rw = weights.reduced_weight(&residual);
        if !rw.at_least(w + 1) {
            continue;
        }
        out.total += 1;
        if out.found.len() < opts.max_patterns {
            let locations = a
                .picks
                .iter()
                .chain(&b.picks)
                .map(|&(r, k)| tables.tables[r][k].locations[0])
                .collect();
            out.found.push(MalignantPattern {
                pass: pass_name(tables.pass).into(),
                w,
                locations,
                residual_hex: residual.to_hex(),
                reduced_weight: rw,
            });
        }
        if opts.stop_at_first {
            break;
        }
    }
    Ok(out)
}

/// Checks every pattern of `1..=t` faults for both error types.
pub fn check_strict_ft(protocol: &DistillationProtocol, opts: &VerifyOptions) -> Result<Verdict> {
    let start = Instant::now();
    let code = &protocol.code;
    let t = opts.max_w.unwrap_or_else(|| code.t());
    let assembled = assemble(protocol);
    let mut verdict = Verdict {
        pass: true,
        cases: 0,
        malignant: Vec::new(),
        malignant_total: 0,
        table_sizes: Vec::new(),
        elapsed_s: 0.0,
    };
    'passes: for pass in [PauliType::X, PauliType::Z] {
        let tables = build_fault_tables(protocol, &assembled, pass, opts.include_network);
        verdict.table_sizes.push(tables.tables.iter().map(Vec::len).collect());
        let weights = CosetWeightTable::for_code(code, pass, protocol.target, t + 1);
        let detect_len = NetworkModel::new(protocol, pass).detect_len;
        for w in 1..=t {
            let cases: Vec<Vec<usize>> = compositions(w, tables.tables.len())
                .into_iter()
                .filter(|c| c.iter().zip(&tables.tables).all(|(&k, tb)| k <= tb.len()))
                .collect();
            verdict.cases += cases.len();
            let outcomes: Vec<Result<CaseOutcome>> = if opts.stop_at_first {
                let mut v = Vec::new();
                for c in &cases {
                    let o = run_case(&tables, &weights, c, w, opts, code.n, detect_len);
                    let hit = matches!(&o, Ok(x) if x.total > 0) || o.is_err();
                    v.push(o);
                    if hit {
                        break;
                    }
                }
                v
            } else {
                cases
                    .par_iter()
                    .map(|c| run_case(&tables, &weights, c, w, opts, code.n, detect_len))
                    .collect()
            };
            for o in outcomes {
                let o = o?;
                verdict.malignant_total += o.total;
                for p in o.found {
                    if verdict.malignant.len() < opts.max_patterns {
                        verdict.malignant.push(p);
                    }
                }
            }
            if opts.stop_at_first && verdict.malignant_total > 0 {
                break 'passes;
            }
        }
    }
    verdict.pass = verdict.malignant_total == 0;
    verdict.elapsed_s = start.elapsed().as_secs_f64();
    Ok(verdict)
}

/// Undetected and malignant single faults of one error type, by location.
pub fn single_fault_sets(
    protocol: &DistillationProtocol,
    pass: PauliType,
    include_network: bool,
) -> (Vec<FaultLocation>, Vec<FaultLocation>) {
    let assembled = assemble(protocol);
    let tables = build_fault_tables(protocol, &assembled, pass, include_network);
    let weights = CosetWeightTable::for_code(&protocol.code, pass, protocol.target, 2);
    let mut undetected = Vec::new();
    let mut malignant = Vec::new();
    for e in tables.tables.iter().flatten() {
        if !e.detect.is_zero() || e.residual.is_zero() {
            continue;
        }
        undetected.extend(&e.locations);
        if weights.reduced_weight(&e.residual).at_least(2) {
            malignant.extend(&e.locations);
        }
    }
    undetected.sort();
    malignant.sort();
    (undetected, malignant)
}

#[derive(Clone, Debug, Serialize)]
pub struct PassingAssignment {
    pub perms: Vec<Vec<String>>,
    pub cases: usize,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub candidates_checked: usize,
    pub passing: Vec<PassingAssignment>,
    pub exhausted: bool,
}

/// Tries permutation assignments with block 0 fixed to the identity.
///
/// Other blocks range over `generators` in lexicographic order of the block
/// sequence; at most `budget` candidates are checked.
pub fn search_permutations(
    code: &CssCode,
    block_circuit: &Circuit,
    shape: (usize, usize),
    target: TargetState,
    generators: &[AutomorphismElement],
    budget: usize,
    opts: &VerifyOptions,
) -> Result<SearchReport> {
    let (m1, m2) = shape;
    let blocks = m1 * m2;
    let mut report = SearchReport {
        candidates_checked: 0,
        passing: Vec::new(),
        exhausted: true,
    };
    if generators.is_empty() && blocks > 1 {
        return Ok(report);
    }
    let m = code.origin.as_ref().map_or(1, |o| o.m);
    let identity = AutomorphismElement::identity(code.n, m);
    let mut opts = opts.clone();
    opts.stop_at_first = true;
    let mut digits = vec![0usize; blocks - 1];
    loop {
        if report.candidates_checked >= budget {
            report.exhausted = false;
            break;
        }
        let mut flat = vec![identity];
        flat.extend(digits.iter().map(|&d| generators[d]));
        let perms: Vec<Vec<AutomorphismElement>> = flat.chunks(m1).map(<[_]>::to_vec).collect();
        let protocol = build_protocol(code, shape, perms.clone(), target, block_circuit.clone())?;
        let v = check_strict_ft(&protocol, &opts)?;
        report.candidates_checked += 1;
        if v.pass {
            report.passing.push(PassingAssignment {
                perms: perms.iter().map(|g| g.iter().map(|p| p.to_string()).collect()).collect(),
                cases: v.cases,
                elapsed_s: v.elapsed_s,
            });
        }
        // odometer, last block fastest
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(report);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < generators.len() {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(report)
}
