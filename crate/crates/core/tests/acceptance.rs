//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run;
//! every other failure exits nonzero.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qbch::analysis::{
    bch_family, effective_rates, gamma, leading_coefficient_exact, protocol_acceptance_bounds,
    step_acceptance_literal, threshold_rows, BlockStats, GammaInputs, ThresholdOptions, ThresholdRow,
};
use qbch::circuit::{fault_labels, propagate_fault, synth_css_prep, FaultLocation};
use qbch::code::{cyclic_weight_enumerator, macwilliams_transform, quantum_bch};
use qbch::combin::for_each_combination;
use qbch::distill::{assemble, build_protocol, identity_perms, DistillationProtocol};
use qbch::mc::{binomial_rate, sweep, write_stratified_csv, write_sweep_csv, Simulator, TrialBatch};
use qbch::symmetry::{all_elements, verify_code_automorphism, AutomorphismElement};
use qbch::verify::{check_strict_ft, single_fault_sets, VerifyOptions};
use qbch::{BitVec, CssCode, FieldSpec, GF2Matrix, PauliType, TargetState};

const KNOWN_RED: &[usize] = &[9];
const SIGMA: f64 = 3.0;
const SLOPE_TOL: f64 = 0.25;
const GAMMA_REL_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-30;

const SIM_GRID: [f64; 3] = [3e-4, 1e-3, 3e-3];
const SIM_SHOTS: u64 = 10_000_000;
const ACC_GRID: [f64; 5] = [1e-4, 3e-4, 1e-3, 2e-3, 3e-3];
const ACC_SHOTS: u64 = 1_000_000;
const SEED: u64 = 20_251_014;

/// A (2,2) assignment on [[31,11,5]] that passes the strict check with the
/// synthesized block circuit.
const PERMS_31: [[&str; 2]; 2] = [["I", "R^14"], ["R^28", "R^17 F^4"]];

struct Report {
    results: Vec<(usize, bool)>,
    last: Instant,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: &str) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = if !pass && KNOWN_RED.contains(&id) { " [known]" } else { "" };
        let secs = self.last.elapsed().as_secs_f64();
        self.last = Instant::now();
        println!("{tag} criterion {id}{note}: {detail} [{secs:.1}s]");
        self.results.push((id, pass));
    }
}

fn steane() -> CssCode {
    quantum_bch(&FieldSpec::new(3).unwrap(), 3).unwrap().1
}

fn bch31() -> CssCode {
    quantum_bch(&FieldSpec::new(5).unwrap(), 5).unwrap().1
}

fn conventional(code: &CssCode, m: usize, target: TargetState) -> DistillationProtocol {
    build_protocol(code, (m, m), identity_perms(code, m, m), target, synth_css_prep(code)).unwrap()
}

fn optimized_31(code: &CssCode) -> DistillationProtocol {
    let perms = PERMS_31
        .iter()
        .map(|g| g.iter().map(|s| AutomorphismElement::parse(s, 31, 5).unwrap()).collect())
        .collect();
    build_protocol(code, (2, 2), perms, TargetState::Zero, synth_css_prep(code)).unwrap()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let cases = [(3, 3, (7, 1)), (5, 5, (31, 11)), (6, 7, (63, 27)), (7, 9, (127, 71))];
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, delta, (n, k)) in cases {
        let spec = FieldSpec::new(m).unwrap();
        let (cls, code) = quantum_bch(&spec, delta).unwrap();
        ok &= code.n == n && code.k == k && code.d_design == delta;
        let dual_dim = cls.n - cls.k_c;
        if dual_dim.min(cls.k_c) <= 28 {
            let dual = cyclic_weight_enumerator(&spec, &cls.dual_generator(), 28).unwrap();
            let full = macwilliams_transform(&dual, dual_dim).unwrap();
            let diff = full.difference(&dual).unwrap();
            let d_c = full.min_distance().unwrap();
            let d_q = diff.min_distance().unwrap();
            ok &= d_c >= delta && d_q >= delta;
            notes.push(format!("[[{},{},{}]] d(C)={d_c} d_Q={d_q}", code.n, code.k, delta));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    r.record(1, ok, &format!("{} in {secs:.1}s", notes.join(", ")));
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let mut ok = true;
    let mut total = 0;
    for (m, delta) in [(3, 3), (5, 5), (6, 7), (7, 9)] {
        let code = quantum_bch(&FieldSpec::new(m).unwrap(), delta).unwrap().1;
        let all = all_elements(code.n, m);
        ok &= all.len() == code.n * m;
        ok &= all.iter().all(|g| verify_code_automorphism(&code, g));
        total += all.len();
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    r.record(2, ok, &format!("{total} elements verified in {secs:.1}s"));
}

/// Minimum weight of `v` plus any combination of `rows`, by brute force.
fn coset_min_weight(v: &BitVec, rows: &[BitVec]) -> usize {
    (0u64..1 << rows.len())
        .map(|mask| {
            let mut w = v.clone();
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    w.xor_assign(r);
                }
            }
            w.count_ones()
        })
        .min()
        .unwrap()
}

fn criterion_3(r: &mut Report) {
    let code = steane();
    let mut ok = true;
    let mut counts = Vec::new();
    for target in [TargetState::Zero, TargetState::Plus] {
        let p = conventional(&code, 2, target);
        let a = assemble(&p);
        for pass in [PauliType::X, PauliType::Z] {
            let group: Vec<BitVec> = match (pass, target) {
                (PauliType::X, TargetState::Zero) => code.h_x.rows().to_vec(),
                (PauliType::Z, TargetState::Zero) => code.h_z.vstack(&code.logical_z).rows().to_vec(),
                (PauliType::X, TargetState::Plus) => code.h_x.vstack(&code.logical_x).rows().to_vec(),
                (PauliType::Z, TargetState::Plus) => code.h_z.rows().to_vec(),
            };
            let mut undetected = BTreeSet::new();
            let mut malignant = BTreeSet::new();
            let mut network = 0;
            for (i, op) in a.circuit.ops.iter().enumerate() {
                for label in fault_labels(op.kind) {
                    let f = FaultLocation { location: i, label };
                    let proj = propagate_fault(&a.circuit, f).project(&a.circuit, pass);
                    let det = a.detection(&proj.flips, p.step_detecting(pass));
                    let res = proj.residual.slice(0, code.n);
                    if !det.is_zero() || res.is_zero() {
                        continue;
                    }
                    undetected.insert(f);
                    if coset_min_weight(&res, &group) >= 2 {
                        malignant.insert(f);
                    }
                    network += usize::from(!matches!(a.region_of(i), qbch::distill::Region::Prep { .. }));
                }
            }
            let (u, m) = single_fault_sets(&p, pass, true);
            ok &= u == undetected.into_iter().collect::<Vec<_>>();
            ok &= m == malignant.into_iter().collect::<Vec<_>>();
            counts.push(format!("{target:?}/{pass:?}: {} undetected ({network} network), {} malignant", u.len(), m.len()));
        }
    }
    r.record(3, ok, &format!("exact set equality; {}", counts.join("; ")));
}

fn criterion_4(r: &mut Report) {
    let mut ok = true;
    let mut notes = Vec::new();
    for code in [steane(), bch31()] {
        let m = code.t() + 1;
        let v = check_strict_ft(&conventional(&code, m, TargetState::Zero), &VerifyOptions::default()).unwrap();
        ok &= v.pass;
        notes.push(format!("n={} ({m},{m}) pass={} cases={} {:.1}s", code.n, v.pass, v.cases, v.elapsed_s));
    }
    r.record(4, ok, &notes.join(", "));
}

fn criterion_5(r: &mut Report) {
    let v = check_strict_ft(&conventional(&bch31(), 2, TargetState::Zero), &VerifyOptions::default()).unwrap();
    let concrete = v
        .malignant
        .iter()
        .find(|m| m.reduced_weight.at_least(m.w + 1))
        .map(|m| format!("{} pass, {} faults at {:?}, reduced weight {:?}", m.pass, m.w, m.locations, m.reduced_weight));
    let ok = !v.pass && concrete.is_some();
    r.record(5, ok, &format!("{} malignant patterns; e.g. {}", v.malignant_total, concrete.unwrap_or_default()));
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Weighted fit `y = c0 + c1 x`; returns `(c0, σ_c0)`.
fn intercept_fit(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, e) in points {
        let w = 1.0 / (e * e);
        s += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    ((sxx * sy - sx * sxy) / det, (sxx / det).sqrt())
}

struct SimArtifacts {
    direct_csv: Vec<u8>,
    stratified_csv: Vec<u8>,
    acc_csv: [Vec<u8>; 2],
}

fn stratified_alloc() -> Vec<u64> {
    let mut v = vec![1_000_000, 1_000_000, 100_000_000];
    v.extend([20_000_000; 3]);
    v.extend([2_000_000; 8]);
    v
}

fn run_criterion_6_data(sim: &Simulator) -> (Vec<(f64, TrialBatch)>, qbch::mc::StratifiedData) {
    (
        sweep(sim, &SIM_GRID, SIM_SHOTS, SEED).unwrap(),
        sim.run_stratified_alloc(&stratified_alloc(), SEED ^ 1),
    )
}

fn criterion_6(r: &mut Report, art: &mut SimArtifacts) {
    let code = bch31();
    let protocol = optimized_31(&code);
    let verdict = check_strict_ft(&protocol, &VerifyOptions::default()).unwrap();
    if !verdict.pass {
        r.record(6, false, "hard-coded (2,2) assignment is not strict-FT");
        return;
    }
    let sim = Simulator::new(&protocol, 3);
    let (direct, strat) = run_criterion_6_data(&sim);
    write_sweep_csv(&direct, &mut art.direct_csv).unwrap();
    write_stratified_csv(&strat, &SIM_GRID, &mut art.stratified_csv).unwrap();
    let rates = effective_rates(protocol.m1, protocol.m2, TargetState::Zero);
    let mut ok = true;
    let mut notes = Vec::new();
    for (pauli, coeff) in [(PauliType::X, rates.p_x_coeff), (PauliType::Z, rates.p_z_coeff)] {
        let curve = |w: usize| -> Vec<(f64, f64)> { direct.iter().map(|(p, b)| (*p, b.rate(pauli, w).0)).collect() };
        let s1 = log_slope(&curve(1));
        let s2 = log_slope(&curve(2));
        let s3 = log_slope(
            &SIM_GRID
                .iter()
                .map(|&p| {
                    let e = strat.estimate(p);
                    (p, if pauli == PauliType::X { e.x[3].0 } else { e.z[3].0 })
                })
                .collect::<Vec<_>>(),
        );
        ok &= (s1 - 1.0).abs() <= SLOPE_TOL && (s2 - 2.0).abs() <= SLOPE_TOL && s3 >= 3.0 - SLOPE_TOL;
        let pred = 31.0 * coeff.to_f64().unwrap();
        let pts: Vec<(f64, f64, f64)> = direct
            .iter()
            .map(|(p, b)| {
                let (v, e) = b.rate(pauli, 1);
                (*p, v / p, e / p)
            })
            .collect();
        let (c0, sc0) = intercept_fit(&pts);
        ok &= (c0 - pred).abs() <= SIGMA * sc0;
        let per_p: Vec<String> = pts.iter().map(|(p, y, e)| format!("{p:e}:{:+.1}σ", (y - pred) / e)).collect();
        notes.push(format!(
            "{pauli:?} slopes {s1:.2}/{s2:.2}/{s3:.2}, w1 rate/p at p→0 {c0:.2}±{sc0:.2} vs {pred:.2} (per point {})",
            per_p.join(" ")
        ));
    }
    r.record(6, ok, &notes.join("; "));
}

fn acceptance_sweeps(sims: &[Simulator; 2]) -> [Vec<(f64, TrialBatch)>; 2] {
    [
        sweep(&sims[0], &ACC_GRID, ACC_SHOTS, SEED ^ 2).unwrap(),
        sweep(&sims[1], &ACC_GRID, ACC_SHOTS, SEED ^ 3).unwrap(),
    ]
}

fn criterion_7(r: &mut Report, art: &mut SimArtifacts) -> [Simulator; 2] {
    let code = bch31();
    let protocols = [optimized_31(&code), conventional(&code, 3, TargetState::Zero)];
    let sims = [Simulator::new(&protocols[0], 3), Simulator::new(&protocols[1], 3)];
    let runs = acceptance_sweeps(&sims);
    for (i, run) in runs.iter().enumerate() {
        write_sweep_csv(run, &mut art.acc_csv[i]).unwrap();
    }
    let stats = BlockStats::from_circuit(&synth_css_prep(&code));
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut literal_step1 = true;
    let mut literal_step2 = true;
    for (i, run) in runs.iter().enumerate() {
        let detect = sims[i].location_detect();
        for (p, b) in run {
            let (lb1, lb2) = protocol_acceptance_bounds(&detect, *p);
            let (a1, e1) = b.acc1();
            let (a2, e2) = b.acc2();
            ok &= a1 >= lb1 - SIGMA * e1 && a2 >= lb2 - SIGMA * e2;
            worst = worst.min(((a1 - lb1) / e1.max(1e-12)).min((a2 - lb2) / e2.max(1e-12)));
            let (l1, l2) = step_acceptance_literal(&stats, protocols[i].m1, protocols[i].m2, TargetState::Zero, *p);
            literal_step1 &= a1 >= l1 - SIGMA * e1;
            literal_step2 &= a2 >= l2 - SIGMA * e2;
        }
    }
    let mut margin = f64::INFINITY;
    for ((_, b22), (_, b33)) in runs[0].iter().zip(&runs[1]) {
        let (a, ea) = binomial_rate(b22.accepted_step2, b22.shots);
        let (c, ec) = binomial_rate(b33.accepted_step2, b33.shots);
        let z = (a - c) / (ea * ea + ec * ec).sqrt().max(1e-12);
        ok &= z > SIGMA;
        margin = margin.min(z);
    }
    r.record(
        7,
        ok,
        &format!(
            "protocol bound: min margin {worst:.1}σ; (2,2) over (3,3) min {margin:.1}σ; per-group literal bound holds on step 1: {literal_step1}, step 2: {literal_step2}"
        ),
    );
    sims
}

/// Root of `x^k = r` by rational bisection to `2^-bits` relative width.
fn bisect_root(r: &BigRational, k: usize, bits: usize) -> BigRational {
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one() + r;
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..bits {
        let mid = (&lo + &hi) / &two;
        let pw = (0..k).fold(BigRational::one(), |acc, _| acc * &mid);
        if &pw > r {
            hi = mid;
        } else {
            lo = mid;
        }
        // keep denominators bounded
        let scale = BigInt::one() << 256usize;
        lo = BigRational::new((&lo * BigRational::from_integer(scale.clone())).floor().to_integer(), scale.clone());
        hi = BigRational::new((&hi * BigRational::from_integer(scale.clone())).ceil().to_integer(), scale);
    }
    lo
}

/// Exhaustive decoding of every weight-`t+1` error by minimum-weight
/// coset search, equal-weight candidates weighted uniformly.
fn mld_failures(code: &CssCode, pauli: PauliType, t: usize) -> BigRational {
    let n = code.n;
    let (check, stab): (&GF2Matrix, &GF2Matrix) = match pauli {
        PauliType::X => (&code.h_z, &code.h_x),
        PauliType::Z => (&code.h_x, &code.h_z),
    };
    let syn = |e: &BitVec| check.mul_vec(e).unwrap();
    let mut table: std::collections::HashMap<BitVec, Vec<BitVec>> = Default::default();
    for w in 0..=t + 1 {
        for_each_combination(n, w, |idx| {
            let e = BitVec::from_indices(n, idx.iter().copied());
            table.entry(syn(&e)).or_default().push(e);
        });
    }
    let stab_rank = stab.rank();
    let mut total = BigRational::zero();
    for_each_combination(n, t + 1, |idx| {
        let e = BitVec::from_indices(n, idx.iter().copied());
        let cands = &table[&syn(&e)];
        let best = cands.iter().map(BitVec::count_ones).min().unwrap();
        let best: Vec<&BitVec> = cands.iter().filter(|c| c.count_ones() == best).collect();
        let bad = best
            .iter()
            .filter(|c| {
                let mut m = stab.clone();
                m.push_row(c.xor(&e));
                m.rank() > stab_rank
            })
            .count();
        total += BigRational::new(BigInt::from(bad), BigInt::from(best.len()));
    });
    total
}

fn criterion_8(r: &mut Report, rows: &[ThresholdRow]) {
    let mut ok = true;
    let grid = [0i64, 2, 4, 8, 12];
    let mut worst = 0.0f64;
    for &a in &grid {
        for &b in &grid {
            let gi = GammaInputs {
                alpha: BigRational::new(a.into(), 15.into()),
                beta: BigRational::new(b.into(), 15.into()),
                c1: BigRational::new(4.into(), 15.into()),
                t: 2,
            };
            let q = |v: i64| BigRational::from_integer(BigInt::from(v));
            let (c, al, be) = (&gi.c1, &gi.alpha, &gi.beta);
            let terms = [
                q(8) * c + al + q(2) * be + q(1),
                q(10) * c + q(2) * al + q(3) * be + q(1),
                q(3) * c + al + be,
                c + be,
            ];
            let cube = |v: &BigRational| v * v * v;
            let radicand = cube(&terms[0]) + cube(&terms[1]) - cube(&terms[2]) - cube(&terms[3]);
            let oracle = bisect_root(&radicand, 3, 120).to_f64().unwrap();
            let got = gamma(&gi).unwrap().to_f64();
            let rel = ((got - oracle) / oracle).abs();
            worst = worst.max(rel);
            ok &= rel < GAMMA_REL_TOL;
        }
    }
    let s = steane();
    let a7: BigRational = [PauliType::X, PauliType::Z]
        .iter()
        .map(|&p| leading_coefficient_exact(&s, p, 1).unwrap())
        .sum();
    let o7: BigRational = [PauliType::X, PauliType::Z].iter().map(|&p| mld_failures(&s, p, 1)).sum();
    ok &= a7 == o7;
    let c = bch31();
    let a31 = leading_coefficient_exact(&c, PauliType::X, 2).unwrap() + leading_coefficient_exact(&c, PauliType::Z, 2).unwrap();
    let o31 = mld_failures(&c, PauliType::X, 2) + mld_failures(&c, PauliType::Z, 2);
    ok &= a31 == o31;
    let emitted: Vec<&ThresholdRow> = rows.iter().filter(|r| r.p0_code_capacity.is_some()).collect();
    let max_res = emitted.iter().filter_map(|r| r.identity_residual).fold(0.0, f64::max);
    ok &= emitted.iter().all(|r| r.identity_residual.is_some_and(|v| v < IDENTITY_TOL));
    r.record(
        8,
        ok,
        &format!(
            "gamma worst rel err {worst:.1e}; a[[7,1,3]]={a7} (decoder {o7}); a[[31,11,5]]={a31} (decoder {o31}); identity residual ≤ {max_res:.1e} over {} rows",
            emitted.len()
        ),
    );
}

fn criterion_9(r: &mut Report, rows: &[ThresholdRow], codes: usize) {
    let mut ok = true;
    let mut missing = Vec::new();
    let mut improved = 0;
    let mut single = 0;
    let mut by_code: Vec<Vec<&ThresholdRow>> = Vec::new();
    for row in rows {
        match by_code.last_mut() {
            Some(g) if g[0].code == row.code && g[0].n == row.n => g.push(row),
            _ => by_code.push(vec![row]),
        }
    }
    ok &= by_code.len() == codes;
    for g in &by_code {
        if g.iter().any(|r| r.p0_circuit.is_none()) {
            ok = false;
            missing.push(format!("{} ({})", g[0].code, g[0].method));
            continue;
        }
        if g.len() == 1 {
            // t = 1: the conventional level is already (2,2)
            single += 1;
            continue;
        }
        // levels run from (t+1,t+1) down to (2,2)
        let p0: Vec<f64> = g.iter().map(|r| r.p0_circuit.unwrap()).collect();
        let strict = p0.windows(2).all(|w| w[1] > w[0]);
        ok &= strict;
        improved += usize::from(strict);
    }
    r.record(
        9,
        ok,
        &format!(
            "{} codes, {improved} with strictly improving p0, {single} with t=1 (one level); missing p0: {}",
            by_code.len(),
            if missing.is_empty() { "none".into() } else { missing.join(", ") }
        ),
    );
}

fn criterion_10(r: &mut Report, art: &SimArtifacts, sims: &[Simulator; 2]) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let again = pool.install(|| {
        let sim6 = Simulator::new(&optimized_31(&bch31()), 3);
        let (direct, strat) = run_criterion_6_data(&sim6);
        let mut out = SimArtifacts {
            direct_csv: Vec::new(),
            stratified_csv: Vec::new(),
            acc_csv: [Vec::new(), Vec::new()],
        };
        write_sweep_csv(&direct, &mut out.direct_csv).unwrap();
        write_stratified_csv(&strat, &SIM_GRID, &mut out.stratified_csv).unwrap();
        for (i, run) in acceptance_sweeps(sims).iter().enumerate() {
            write_sweep_csv(run, &mut out.acc_csv[i]).unwrap();
        }
        out
    });
    let ok = again.direct_csv == art.direct_csv
        && again.stratified_csv == art.stratified_csv
        && again.acc_csv == art.acc_csv
        && !art.direct_csv.is_empty();
    r.record(
        10,
        ok,
        &format!(
            "4 CSVs ({} bytes) identical with {} and 4 threads",
            art.direct_csv.len() + art.stratified_csv.len() + art.acc_csv.iter().map(Vec::len).sum::<usize>(),
            rayon::current_num_threads()
        ),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut r = Report {
        results: Vec::new(),
        last: start,
    };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    let mut art = SimArtifacts {
        direct_csv: Vec::new(),
        stratified_csv: Vec::new(),
        acc_csv: [Vec::new(), Vec::new()],
    };
    criterion_6(&mut r, &mut art);
    let sims = criterion_7(&mut r, &mut art);
    let family = bch_family(7).unwrap();
    let opts = ThresholdOptions::default();
    let rows: Vec<ThresholdRow> = family.iter().flat_map(|f| threshold_rows(f, &opts)).collect();
    criterion_8(&mut r, &rows);
    criterion_9(&mut r, &rows, family.len());
    criterion_10(&mut r, &art, &sims);
    let unexpected: Vec<usize> = r
        .results
        .iter()
        .filter(|(id, pass)| !pass && !KNOWN_RED.contains(id))
        .map(|&(id, _)| id)
        .collect();
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
