//! Seeded Pauli-frame Monte Carlo of assembled distillation protocols.
//!
//! Every single fault's end-of-circuit effect is precomputed once: the
//! parities it flips in each step and the residual it leaves on the kept
//! block. A shot then samples faults, XORs their effects and classifies the
//! result. Faults are placed by geometric skipping over the flattened
//! (shot, location) sequence, so the cost scales with the number of faults
//! rather than the number of locations.
//!
//! Shots are cut into fixed chunks and chunk `c` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so results do not depend
//! on how chunks are spread over threads.

use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::LocationDetect;
use crate::bits::BitVec;
use crate::circuit::{fault_labels, propagate_fault, FaultLocation, OpKind};
use crate::code::{CosetWeightTable, PauliType};
use crate::distill::{assemble, AssembledCircuit, DistillationProtocol};
use crate::error::{Error, Result};

pub const CHUNK_SHOTS: u64 = 1 << 14;

/// Per-location fault probabilities; the Pauli of a fault is uniform over
/// the op's nontrivial labels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub p_cnot: f64,
    pub p_single: f64,
    pub p_prep: f64,
    pub p_meas: f64,
}

impl NoiseModel {
    pub fn uniform(p: f64) -> Self {
        Self {
            p_cnot: p,
            p_single: p,
            p_prep: p,
            p_meas: p,
        }
    }

    pub fn prob(&self, kind: OpKind) -> f64 {
        match kind {
            OpKind::Cnot => self.p_cnot,
            OpKind::H => self.p_single,
            OpKind::PrepZ | OpKind::PrepX => self.p_prep,
            OpKind::MeasZ | OpKind::MeasX => self.p_meas,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p_cnot, self.p_single, self.p_prep, self.p_meas] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Invalid(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn is_uniform(&self) -> bool {
        self.p_cnot == self.p_single && self.p_single == self.p_prep && self.p_prep == self.p_meas
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialBatch {
    pub shots: u64,
    pub seed: u64,
    pub accepted_step1: u64,
    pub accepted_step2: u64,
    /// Counts of accepted outputs by residual reduced weight; the last bucket
    /// collects everything at or above its index.
    pub hist_x: Vec<u64>,
    pub hist_z: Vec<u64>,
}

impl TrialBatch {
    fn empty(shots: u64, seed: u64, buckets: usize) -> Self {
        Self {
            shots,
            seed,
            accepted_step1: 0,
            accepted_step2: 0,
            hist_x: vec![0; buckets],
            hist_z: vec![0; buckets],
        }
    }

    fn merge(&mut self, o: &TrialBatch) {
        self.accepted_step1 += o.accepted_step1;
        self.accepted_step2 += o.accepted_step2;
        for (a, b) in self.hist_x.iter_mut().zip(&o.hist_x) {
            *a += b;
        }
        for (a, b) in self.hist_z.iter_mut().zip(&o.hist_z) {
            *a += b;
        }
    }

    /// Step-1 acceptance over all shots.
    pub fn acc1(&self) -> (f64, f64) {
        binomial_rate(self.accepted_step1, self.shots)
    }

    /// Step-2 acceptance among step-1 survivors.
    pub fn acc2(&self) -> (f64, f64) {
        binomial_rate(self.accepted_step2, self.accepted_step1)
    }

    /// Rate of residual weight `w` among accepted outputs.
    pub fn rate(&self, pauli: PauliType, w: usize) -> (f64, f64) {
        let h = match pauli {
            PauliType::X => &self.hist_x,
            PauliType::Z => &self.hist_z,
        };
        binomial_rate(h[w], self.accepted_step2)
    }
}

/// Rate and binomial standard error.
pub fn binomial_rate(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let q = k as f64 / n as f64;
    (q, (q * (1.0 - q) / n as f64).sqrt())
}

#[derive(Clone, Copy)]
struct Segment {
    offset: usize,
    bits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotOutcome {
    pub accept_step1: bool,
    pub accept_step2: bool,
    pub detect_step1: BitVec,
    pub detect_step2: BitVec,
    pub residual_x: BitVec,
    pub residual_z: BitVec,
}

/// Simulation context: precomputed effects and reduced-weight tables.
pub struct Simulator {
    pub assembled: AssembledCircuit,
    kinds: Vec<OpKind>,
    label_base: Vec<usize>,
    words: usize,
    segs: [Segment; 4],
    data: Vec<u64>,
    weights_x: CosetWeightTable,
    weights_z: CosetWeightTable,
    w_max: usize,
}

impl Simulator {
    /// Residual weights are exact up to `w_max` and bucketed above it.
    pub fn new(protocol: &DistillationProtocol, w_max: usize) -> Self {
        let assembled = assemble(protocol);
        let n = assembled.n;
        let lens = [assembled.detection_len(1), assembled.detection_len(2), n, n];
        let mut segs = [Segment { offset: 0, bits: 0 }; 4];
        let mut words = 0;
        for (s, &bits) in segs.iter_mut().zip(&lens) {
            *s = Segment { offset: words, bits };
            words += bits.div_ceil(64);
        }
        let circuit = &assembled.circuit;
        let mut label_base = Vec::with_capacity(circuit.len());
        let mut data = Vec::new();
        let pack = |a: &AssembledCircuit, f: FaultLocation| -> Vec<u64> {
            let fr = propagate_fault(&a.circuit, f);
            let parts = [
                a.detection(&fr.meas, 1),
                a.detection(&fr.meas, 2),
                fr.x.slice(0, n),
                fr.z.slice(0, n),
            ];
            parts.iter().flat_map(|b| b.words().to_vec()).collect()
        };
        for (i, op) in circuit.ops.iter().enumerate() {
            label_base.push(data.len());
            let labels = fault_labels(op.kind);
            // Pauli labels compose linearly: build from single-bit labels
            let bits: Vec<(u8, Vec<u64>)> = if *labels.end() > 1 {
                let max_bit = *labels.end() + 1;
                (0..8)
                    .map(|b| 1u8 << b)
                    .take_while(|&b| b < max_bit)
                    .map(|b| (b, pack(&assembled, FaultLocation { location: i, label: b })))
                    .collect()
            } else {
                vec![(1, pack(&assembled, FaultLocation { location: i, label: 1 }))]
            };
            for label in labels {
                let mut e = vec![0u64; words];
                for (b, v) in &bits {
                    if label & b != 0 {
                        for (x, y) in e.iter_mut().zip(v) {
                            *x ^= y;
                        }
                    }
                }
                data.extend(e);
            }
        }
        let code = &protocol.code;
        Self {
            kinds: circuit.ops.iter().map(|o| o.kind).collect(),
            label_base,
            words,
            segs,
            data,
            weights_x: CosetWeightTable::for_code(code, PauliType::X, protocol.target, w_max),
            weights_z: CosetWeightTable::for_code(code, PauliType::Z, protocol.target, w_max),
            w_max,
            assembled,
        }
    }

    pub fn num_locations(&self) -> usize {
        self.kinds.len()
    }

    fn buckets(&self) -> usize {
        self.w_max + 1
    }

    fn xor_fault(&self, acc: &mut [u64], loc: usize, label: u8) {
        let start = self.label_base[loc] + (label as usize - 1) * self.words;
        for (a, e) in acc.iter_mut().zip(&self.data[start..start + self.words]) {
            *a ^= e;
        }
    }

    fn seg_zero(&self, acc: &[u64], s: usize) -> bool {
        let seg = self.segs[s];
        acc[seg.offset..seg.offset + seg.bits.div_ceil(64)].iter().all(|&w| w == 0)
    }

    fn seg_vec(&self, acc: &[u64], s: usize) -> BitVec {
        let seg = self.segs[s];
        BitVec::from_words(seg.bits, &acc[seg.offset..seg.offset + seg.bits.div_ceil(64)])
    }

    fn bucket(&self, table: &CosetWeightTable, v: &BitVec) -> usize {
        if v.is_zero() {
            return 0;
        }
        table.reduced_weight(v).exact().unwrap_or(self.w_max).min(self.w_max)
    }

    /// Records the outcome of one shot with accumulated effect `acc`.
    fn classify(&self, acc: &[u64], batch: &mut TrialBatch) {
        if !self.seg_zero(acc, 0) {
            return;
        }
        batch.accepted_step1 += 1;
        if !self.seg_zero(acc, 1) {
            return;
        }
        batch.accepted_step2 += 1;
        batch.hist_x[self.bucket(&self.weights_x, &self.seg_vec(acc, 2))] += 1;
        batch.hist_z[self.bucket(&self.weights_z, &self.seg_vec(acc, 3))] += 1;
    }

    /// Outcome of one explicit fault set, from the precomputed effects.
    pub fn evaluate(&self, faults: &[FaultLocation]) -> ShotOutcome {
        let mut acc = vec![0u64; self.words];
        for f in faults {
            self.xor_fault(&mut acc, f.location, f.label);
        }
        ShotOutcome {
            accept_step1: self.seg_zero(&acc, 0),
            accept_step2: self.seg_zero(&acc, 1),
            detect_step1: self.seg_vec(&acc, 0),
            detect_step2: self.seg_vec(&acc, 1),
            residual_x: self.seg_vec(&acc, 2),
            residual_z: self.seg_vec(&acc, 3),
        }
    }

    /// Per location, how many fault labels trip the checks on their own.
    pub fn location_detect(&self) -> Vec<LocationDetect> {
        (0..self.num_locations())
            .map(|loc| {
                let labels = self.labels_of(loc) as usize;
                let mut d = LocationDetect { labels, step1: 0, any: 0 };
                for l in 1..=labels {
                    let start = self.label_base[loc] + (l - 1) * self.words;
                    let e = &self.data[start..start + self.words];
                    let s1 = !self.seg_zero(e, 0);
                    d.step1 += usize::from(s1);
                    d.any += usize::from(s1 || !self.seg_zero(e, 1));
                }
                d
            })
            .collect()
    }

    fn labels_of(&self, loc: usize) -> u8 {
        *fault_labels(self.kinds[loc]).end()
    }

    fn run_chunk(&self, noise: &NoiseModel, shots: u64, seed: u64, chunk: u64) -> TrialBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut batch = TrialBatch::empty(shots, seed, self.buckets());
        let mut acc = vec![0u64; shots as usize * self.words];
        let mut touched = vec![false; shots as usize];
        // locations grouped by probability, in order of first appearance
        let mut classes: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &k) in self.kinds.iter().enumerate() {
            let p = noise.prob(k);
            match classes.iter_mut().find(|(q, _)| *q == p) {
                Some((_, v)) => v.push(i),
                None => classes.push((p, vec![i])),
            }
        }
        for (p, locs) in &classes {
            if *p <= 0.0 {
                continue;
            }
            let geo = Geometric::new(*p).expect("probability in (0, 1]");
            let total = shots * locs.len() as u64;
            let mut pos = geo.sample(&mut rng);
            while pos < total {
                let shot = (pos / locs.len() as u64) as usize;
                let loc = locs[(pos % locs.len() as u64) as usize];
                let label = rng.random_range(1..=self.labels_of(loc));
                self.xor_fault(&mut acc[shot * self.words..(shot + 1) * self.words], loc, label);
                touched[shot] = true;
                pos = pos.saturating_add(1).saturating_add(geo.sample(&mut rng));
            }
        }
        let clean = touched.iter().filter(|&&t| !t).count() as u64;
        batch.accepted_step1 += clean;
        batch.accepted_step2 += clean;
        batch.hist_x[0] += clean;
        batch.hist_z[0] += clean;
        for (s, _) in touched.iter().enumerate().filter(|(_, &t)| t) {
            self.classify(&acc[s * self.words..(s + 1) * self.words], &mut batch);
        }
        batch
    }

    pub fn run_trials(&self, noise: &NoiseModel, shots: u64, seed: u64) -> Result<TrialBatch> {
        noise.validate()?;
        if shots == 0 {
            return Err(Error::Invalid("need at least one shot".into()));
        }
        let chunks = shots.div_ceil(CHUNK_SHOTS);
        let parts: Vec<TrialBatch> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
                self.run_chunk(noise, len, seed, c)
            })
            .collect();
        let mut out = TrialBatch::empty(shots, seed, self.buckets());
        for p in &parts {
            out.merge(p);
        }
        Ok(out)
    }

    /// Samples shots with exactly `k` faults for every `k` in `1..=k_max`.
    ///
    /// Needs a uniform noise model: then, given `k`, the faulty locations are
    /// a uniform `k`-subset and the estimate at any `p` follows by weighting
    /// with the binomial law of `k`.
    pub fn run_stratified(&self, k_max: usize, shots_per_k: u64, seed: u64) -> StratifiedData {
        self.run_stratified_alloc(&vec![shots_per_k; k_max], seed)
    }

    /// Like [`Self::run_stratified`] with `shots[k - 1]` shots for `k` faults.
    pub fn run_stratified_alloc(&self, shots: &[u64], seed: u64) -> StratifiedData {
        assert!(shots.iter().all(|&s| s > 0), "every fault count needs shots");
        let l = self.num_locations();
        let per_k: Vec<TrialBatch> = (1..=shots.len())
            .into_par_iter()
            .map(|k| {
                let shots_per_k = shots[k - 1];
                let chunks = shots_per_k.div_ceil(CHUNK_SHOTS);
                let mut out = TrialBatch::empty(shots_per_k, seed, self.buckets());
                for c in 0..chunks {
                    let len = CHUNK_SHOTS.min(shots_per_k - c * CHUNK_SHOTS);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((k as u64) << 32) | c);
                    let mut b = TrialBatch::empty(len, seed, self.buckets());
                    let mut acc = vec![0u64; self.words];
                    for _ in 0..len {
                        acc.iter_mut().for_each(|w| *w = 0);
                        for loc in sample(&mut rng, l, k.min(l)).into_iter() {
                            let label = rng.random_range(1..=self.labels_of(loc));
                            self.xor_fault(&mut acc, loc, label);
                        }
                        self.classify(&acc, &mut b);
                    }
                    out.merge(&b);
                }
                out
            })
            .collect();
        StratifiedData {
            locations: l,
            seed,
            per_k,
        }
    }

    pub fn run_stratified_checked(
        &self,
        noise: &NoiseModel,
        k_max: usize,
        shots_per_k: u64,
        seed: u64,
    ) -> Result<StratifiedData> {
        if !noise.is_uniform() {
            return Err(Error::Invalid("stratified sampling needs one fault probability".into()));
        }
        Ok(self.run_stratified(k_max, shots_per_k, seed))
    }
}

/// Conditional outcome counts for each exact fault number.
#[derive(Clone, Debug, Serialize)]
pub struct StratifiedData {
    pub locations: usize,
    pub seed: u64,
    /// Entry `k - 1` holds shots with exactly `k` faults.
    pub per_k: Vec<TrialBatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratifiedEstimate {
    pub p: f64,
    pub acc1: f64,
    pub acc2: f64,
    /// Residual weight rates among accepted outputs, with standard errors.
    pub x: Vec<(f64, f64)>,
    pub z: Vec<(f64, f64)>,
    /// Probability mass of fault counts above the sampled range.
    pub truncated_mass: f64,
}

fn ln_binomial_pmf(l: usize, k: usize, p: f64) -> f64 {
    let mut lc = 0.0;
    for i in 0..k {
        lc += ((l - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    lc + k as f64 * p.ln() + (l - k) as f64 * (-p).ln_1p()
}

impl StratifiedData {
    pub fn estimate(&self, p: f64) -> StratifiedEstimate {
        let l = self.locations;
        let pi0 = (l as f64 * (-p).ln_1p()).exp();
        let pis: Vec<f64> = (1..=self.per_k.len())
            .map(|k| if p > 0.0 { ln_binomial_pmf(l, k, p).exp() } else { 0.0 })
            .collect();
        let buckets = self.per_k.first().map_or(1, |b| b.hist_x.len());
        let frac = |num: u64, b: &TrialBatch| num as f64 / b.shots as f64;
        let mut acc1 = pi0;
        let mut acc2 = pi0;
        for (pi, b) in pis.iter().zip(&self.per_k) {
            acc1 += pi * frac(b.accepted_step1, b);
            acc2 += pi * frac(b.accepted_step2, b);
        }
        let rates = |hist: fn(&TrialBatch) -> &Vec<u64>| -> Vec<(f64, f64)> {
            (0..buckets)
                .map(|w| {
                    let mut num = if w == 0 { pi0 } else { 0.0 };
                    let mut var = 0.0;
                    for (pi, b) in pis.iter().zip(&self.per_k) {
                        let q = frac(hist(b)[w], b);
                        num += pi * q;
                        var += pi * pi * q * (1.0 - q) / b.shots as f64;
                    }
                    (num / acc2, var.sqrt() / acc2)
                })
                .collect()
        };
        StratifiedEstimate {
            p,
            acc1,
            acc2: acc2 / acc1,
            x: rates(|b| &b.hist_x),
            z: rates(|b| &b.hist_z),
            truncated_mass: (1.0 - pi0 - pis.iter().sum::<f64>()).max(0.0),
        }
    }
}

/// Stratified estimates on a grid, one CSV row per `p`.
pub fn write_stratified_csv<W: Write>(data: &StratifiedData, grid: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let buckets = data.per_k.first().map_or(1, |b| b.hist_x.len());
    let mut header = vec!["p".to_string(), "acc1".into(), "acc2".into(), "truncated_mass".into()];
    for pauli in ["x", "z"] {
        for b in 1..buckets {
            let tag = if b + 1 == buckets { format!("{b}plus") } else { b.to_string() };
            header.push(format!("{pauli}_w{tag}"));
            header.push(format!("{pauli}_w{tag}_err"));
        }
    }
    w.write_record(&header).map_err(|e| Error::Invalid(e.to_string()))?;
    for &p in grid {
        let e = data.estimate(p);
        let mut rec = vec![p.to_string(), e.acc1.to_string(), e.acc2.to_string(), e.truncated_mass.to_string()];
        for rates in [&e.x, &e.z] {
            for &(r, s) in &rates[1..] {
                rec.push(r.to_string());
                rec.push(s.to_string());
            }
        }
        w.write_record(&rec).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Child seeds for grid points, drawn from the parent seed.
pub fn child_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}

pub fn sweep(sim: &Simulator, grid: &[f64], shots: u64, seed: u64) -> Result<Vec<(f64, TrialBatch)>> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty noise grid".into()));
    }
    child_seeds(seed, grid.len())
        .into_iter()
        .zip(grid)
        .map(|(s, &p)| Ok((p, sim.run_trials(&NoiseModel::uniform(p), shots, s)?)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub shots: u64,
    pub acc1: f64,
    pub acc1_err: f64,
    pub acc2: f64,
    pub acc2_err: f64,
    pub x_w1: f64,
    pub x_w2: f64,
    pub x_w3plus: f64,
    pub z_w1: f64,
    pub z_w2: f64,
    pub z_w3plus: f64,
}

impl SweepRow {
    pub fn from_batch(p: f64, b: &TrialBatch) -> Self {
        let tail = |h: &[u64]| h[3..].iter().sum::<u64>();
        let (acc1, acc1_err) = b.acc1();
        let (acc2, acc2_err) = b.acc2();
        let r = |k: u64| binomial_rate(k, b.accepted_step2).0;
        Self {
            p,
            shots: b.shots,
            acc1,
            acc1_err,
            acc2,
            acc2_err,
            x_w1: r(b.hist_x[1]),
            x_w2: r(b.hist_x[2]),
            x_w3plus: r(tail(&b.hist_x)),
            z_w1: r(b.hist_z[1]),
            z_w2: r(b.hist_z[2]),
            z_w3plus: r(tail(&b.hist_z)),
        }
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[(f64, TrialBatch)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (p, b) in rows {
        if b.hist_x.len() < 4 {
            return Err(Error::Invalid("sweep CSV needs residual buckets up to 3".into()));
        }
        w.serialize(SweepRow::from_batch(*p, b))
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
