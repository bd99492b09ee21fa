//! Closed-form estimates: effective output error rates, acceptance lower
//! bounds, the code-capacity reduction factor γ, leading-order logical error
//! coefficients and scaling thresholds.
//!
//! Rationals are exact. Roots are taken as fixed-point integer roots with
//! [`FRAC_BITS`] fractional bits, rounded down.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bits::BitVec;
use crate::circuit::{propagate_fault, Circuit, FaultLocation, OpKind};
use crate::code::{
    cyclic_weight_enumerator, low_weight_codewords, macwilliams_transform, quantum_bch, CssCode,
    CyclicCode, PauliType, TargetState, WeightEnumerator,
};
use crate::combin::{binomial, binomial_u128, for_each_combination};
use crate::error::{Error, Result};
use crate::gf2::FieldSpec;
use crate::matrix::RowReducer;

pub const FRAC_BITS: u32 = 160;

/// Output error rates per physical qubit, as multiples of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EffectiveRates {
    pub p_x_coeff: Rational64,
    pub p_z_coeff: Rational64,
}

/// Leading-order rates of the two-step protocol; `m_x` and `m_z` are the
/// sizes of the X-checking and Z-checking steps.
pub fn effective_rates(m_x: usize, m_z: usize, target: TargetState) -> EffectiveRates {
    let r = |m: usize| Rational64::new(4 * m as i64, 15);
    match target {
        TargetState::Zero => EffectiveRates {
            p_x_coeff: r(m_z),
            p_z_coeff: r(1),
        },
        TargetState::Plus => EffectiveRates {
            p_x_coeff: r(1),
            p_z_coeff: r(m_x),
        },
    }
}

/// Location counts of a block preparation circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStats {
    pub n: usize,
    /// Preparations whose flip ends as an X error.
    pub x_prep_sensitive: usize,
    /// Preparations whose flip ends as a Z error.
    pub z_prep_sensitive: usize,
    pub n_h: usize,
    pub n_cnot: usize,
}

impl BlockStats {
    pub fn from_circuit(c: &Circuit) -> Self {
        let mut x = 0;
        let mut z = 0;
        for (i, op) in c.ops.iter().enumerate() {
            if op.kind.is_prep() {
                let f = propagate_fault(c, FaultLocation { location: i, label: 1 });
                x += usize::from(!f.x.is_zero());
                z += usize::from(!f.z.is_zero());
            }
        }
        Self {
            n: c.n_qubits,
            x_prep_sensitive: x,
            z_prep_sensitive: z,
            n_h: c.count(OpKind::H),
            n_cnot: c.cnot_count(),
        }
    }
}

/// Per-round lower bounds `(P_X, P_Z)` of an `m`-to-1 step, one factor per
/// class of detectable locations.
pub fn acceptance_lower_bounds(s: &BlockStats, m: usize, p: f64) -> (f64, f64) {
    let m = m as i32;
    let n = s.n as i32;
    let pw = |base: f64, e: i32| base.powi(e);
    let spam_x = pw(1.0 - p, s.x_prep_sensitive as i32 * m) * pw(1.0 - p, n * (m - 1));
    let non_ft_x = pw(1.0 - 2.0 * p / 3.0, s.n_h as i32 * m) * pw(1.0 - 12.0 * p / 15.0, s.n_cnot as i32 * m);
    let trans_x = pw(1.0 - 12.0 * p / 15.0, n) * pw(1.0 - 8.0 * p / 15.0, n * (m - 1));
    let spam_z = pw(1.0 - p, s.z_prep_sensitive as i32 * m) * pw(1.0 - p, n * (m - 1));
    let non_ft_z = pw(1.0 - p / 3.0, s.n_h as i32 * m) * pw(1.0 - 3.0 * p / 15.0, s.n_cnot as i32 * m);
    let trans1_z = pw(1.0 - 4.0 * p / 15.0, n) * pw(1.0 - 2.0 * p / 15.0, n * (m - 1));
    let trans2_z = pw(1.0 - 12.0 * p / 15.0, n) * pw(1.0 - 8.0 * p / 15.0, n * (m - 1));
    (spam_x * non_ft_x * trans_x, spam_z * non_ft_z * trans1_z * trans2_z)
}

/// Literal bounds applied per step of an `m1`-to-1 × `m2`-to-1 protocol:
/// the first step runs `m2` groups of size `m1`, the second one group of
/// size `m2`. Step-2 inputs also carry errors from step 1 that the per-group
/// form does not count, so only step 1 is a bound in general.
pub fn step_acceptance_literal(s: &BlockStats, m1: usize, m2: usize, target: TargetState, p: f64) -> (f64, f64) {
    let (x1, z1) = acceptance_lower_bounds(s, m1, p);
    let (x2, z2) = acceptance_lower_bounds(s, m2, p);
    match target {
        TargetState::Zero => (x1.powi(m2 as i32), z2),
        TargetState::Plus => (z1.powi(m2 as i32), x2),
    }
}

/// Detectable labels of one circuit location.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocationDetect {
    pub labels: usize,
    /// Labels tripping a step-1 check.
    pub step1: usize,
    /// Labels tripping a check of either step.
    pub any: usize,
}

/// Protocol-level lower bounds on step-1 acceptance and on step-2
/// acceptance given step 1: the probability that no fault occurs whose own
/// effect trips a relevant check. By linearity, the remaining faults can
/// never cause a rejection, alone or combined.
pub fn protocol_acceptance_bounds(detect: &[LocationDetect], p: f64) -> (f64, f64) {
    let mut b1 = 1.0;
    let mut b2 = 1.0;
    for d in detect {
        b1 *= 1.0 - p * d.step1 as f64 / d.labels as f64;
        b2 *= 1.0 - p * d.any as f64 / d.labels as f64;
    }
    (b1, b2)
}

#[derive(Clone, Debug)]
pub struct GammaInputs {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub c1: BigRational,
    pub t: usize,
}

impl GammaInputs {
    /// Defaults for an `m_x`-to-1 × `m_z`-to-1 level: `α = 4 m_z / 15`,
    /// `β = 4 m_x / 15`, `c1 = 4/15`.
    pub fn for_level(m_x: usize, m_z: usize, t: usize) -> Self {
        let q = |num: usize| BigRational::new(BigInt::from(num), BigInt::from(15));
        Self {
            alpha: q(4 * m_z),
            beta: q(4 * m_x),
            c1: q(4),
            t,
        }
    }
}

/// Fixed-point value `fixed / 2^bits`, exact up to the last bit (rounded down).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extended {
    pub fixed: BigUint,
    pub bits: u32,
}

impl Extended {
    pub fn to_f64(&self) -> f64 {
        // keep 64 significant bits before converting
        let len = self.fixed.bits();
        let shift = len.saturating_sub(64);
        let top = (&self.fixed >> shift).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(shift as i32 - self.bits as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.fixed.clone()), BigInt::one() << self.bits as usize)
    }

    /// Decimal expansion with `digits` fractional digits, truncated.
    pub fn to_decimal(&self, digits: usize) -> String {
        let one = BigUint::one() << self.bits as usize;
        let int = &self.fixed / &one;
        let mut frac = &self.fixed % &one;
        let mut s = format!("{int}.");
        for _ in 0..digits {
            frac *= 10u32;
            s.push_str(&(&frac / &one).to_string());
            frac %= &one;
        }
        s
    }
}

/// `floor(r^{1/k} · 2^bits) / 2^bits` for a nonnegative rational.
pub fn rational_root(r: &BigRational, k: u32, bits: u32) -> Result<Extended> {
    if r.is_negative() {
        return Err(Error::Invalid(format!("negative radicand {r}")));
    }
    let num = r.numer().to_biguint().expect("nonnegative");
    let den = r.denom().to_biguint().expect("positive");
    let scaled = (num << (bits as usize * k as usize)) / den;
    Ok(Extended {
        fixed: scaled.nth_root(k),
        bits,
    })
}

fn rpow(r: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * r)
}

/// `γ^{t+1}`, exact.
pub fn gamma_radicand(g: &GammaInputs) -> BigRational {
    let one = BigRational::one();
    let i = |v: i64| BigRational::from_integer(BigInt::from(v));
    let (c, a, b) = (&g.c1, &g.alpha, &g.beta);
    let big_a = i(8) * c + a + i(2) * b + &one;
    let big_b = i(10) * c + i(2) * a + i(3) * b + &one;
    let big_c = i(3) * c + a + b;
    let big_d = c + b;
    let e = g.t + 1;
    rpow(&big_a, e) + rpow(&big_b, e) - rpow(&big_c, e) - rpow(&big_d, e)
}

pub fn gamma(g: &GammaInputs) -> Result<Extended> {
    if g.t == 0 {
        return Err(Error::Invalid("gamma needs t >= 1".into()));
    }
    if [&g.alpha, &g.beta, &g.c1].iter().any(|v| v.is_negative()) {
        return Err(Error::Invalid("gamma inputs must be nonnegative".into()));
    }
    rational_root(&gamma_radicand(g), (g.t + 1) as u32, FRAC_BITS)
}

/// `a` from the logical-class enumerator `A(C) - A(C^⊥)`:
/// `A'_{2t+1} C(2t+1, t+1) + ½ A'_{2t+2} C(2t+2, t+1)`.
///
/// Patterns lying under several codewords are counted once per codeword, so
/// this can exceed the exact count of [`leading_coefficient_exact`].
pub fn leading_coefficient_formula(diff: &WeightEnumerator, t: usize) -> BigRational {
    let term = |w: usize| -> BigRational {
        if w > diff.n {
            return BigRational::zero();
        }
        BigRational::from_integer(BigInt::from(diff.count(w) * binomial(w, t + 1)))
    };
    term(2 * t + 1) + term(2 * t + 2) / BigRational::from_integer(BigInt::from(2))
}

/// Number of weight-`t+1` errors of one Pauli type that a minimum-weight
/// decoder turns into a logical failure, with equal-weight candidates
/// chosen uniformly.
///
/// Candidates other than the error itself differ from it by a codeword of
/// weight at most `2t+2`, so only those codewords are enumerated.
pub fn leading_coefficient_exact(code: &CssCode, pauli: PauliType, t: usize) -> Result<BigRational> {
    let n = code.n;
    let check = code.detecting_checks(pauli);
    let stabilizers = RowReducer::from_matrix(code.detecting_checks(pauli.other()));
    let words = low_weight_codewords(check, 2 * t + 2)?;
    let mut cands: HashMap<BitVec, Vec<(usize, bool)>> = HashMap::new();
    for c in &words {
        let wc = c.count_ones();
        let logical = !stabilizers.contains(c);
        let support: Vec<usize> = c.iter_ones().collect();
        let outside: Vec<usize> = (0..n).filter(|&j| !c.get(j)).collect();
        // |e ∩ c| = i gives wt(e + c) = wc + t + 1 - 2i, kept when ≤ t + 1
        for i in wc.div_ceil(2)..=wc.min(t + 1) {
            let j = t + 1 - i;
            let count = binomial_u128(wc as u64, i as u64) * binomial_u128(outside.len() as u64, j as u64);
            if count > 100_000_000 {
                return Err(Error::MemoryBudget {
                    case: format!("errors near a weight-{wc} codeword"),
                    entries: count,
                    budget: 100_000_000,
                });
            }
            for_each_combination(support.len(), i, |inside| {
                for_each_combination(outside.len(), j, |out| {
                    let e = BitVec::from_indices(
                        n,
                        inside.iter().map(|&a| support[a]).chain(out.iter().map(|&b| outside[b])),
                    );
                    cands.entry(e).or_default().push((wc + t + 1 - 2 * i, logical));
                });
            });
        }
    }
    let mut total = BigRational::zero();
    for list in cands.values() {
        let best = list.iter().map(|c| c.0).min().unwrap_or(t + 1).min(t + 1);
        let at_best = list.iter().filter(|c| c.0 == best);
        let logical = at_best.clone().filter(|c| c.1).count();
        // the error itself is a non-logical candidate of weight t + 1
        let k = at_best.count() + usize::from(best == t + 1);
        total += BigRational::new(BigInt::from(logical), BigInt::from(k));
    }
    Ok(total)
}

/// Union bound `Σ_w A'_w Σ_{j ≥ ⌈w/2⌉} C(w, j) p^j (1-p)^{w-j}` on one channel.
pub fn union_bound(diff: &WeightEnumerator, p: f64) -> f64 {
    let mut s = 0.0;
    for w in 1..=diff.n {
        let a = diff.count(w).to_f64().unwrap_or(0.0);
        if a == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for j in w.div_ceil(2)..=w {
            inner += binomial(w, j).to_f64().unwrap_or(f64::INFINITY) * p.powi(j as i32) * (1.0 - p).powi((w - j) as i32);
        }
        s += a * inner;
    }
    s
}

#[derive(Clone, Debug)]
pub struct ThresholdResult {
    pub a: BigRational,
    pub t: usize,
    pub gamma: Option<Extended>,
    pub p0_code_capacity: Extended,
    pub p0_circuit: Option<Extended>,
    /// Largest `|a' p0^{t+1} - p0| / p0` over the emitted values, where `a'`
    /// is `a` or `a γ^{t+1}`.
    pub identity_residual: f64,
}

fn identity_residual(coeff: &BigRational, p0: &Extended, t: usize) -> f64 {
    let p = p0.to_rational();
    let lhs = coeff * rpow(&p, t + 1);
    ((lhs - &p) / &p).abs().to_f64().unwrap_or(f64::INFINITY)
}

/// `p0 = a^{-1/t}`, and `(a γ^{t+1})^{-1/t}` when γ's inputs are given.
pub fn scaling_threshold(a: &BigRational, t: usize, gamma_inputs: Option<&GammaInputs>) -> Result<ThresholdResult> {
    if !a.is_positive() {
        return Err(Error::Invalid(format!("leading coefficient must be positive, got {a}")));
    }
    if t == 0 {
        return Err(Error::Invalid("scaling threshold needs t >= 1".into()));
    }
    let p0 = rational_root(&a.recip(), t as u32, FRAC_BITS)?;
    let mut residual = identity_residual(a, &p0, t);
    let (g, p0c) = match gamma_inputs {
        Some(gi) => {
            let mut gi = gi.clone();
            gi.t = t;
            let coeff = a * gamma_radicand(&gi);
            let pc = rational_root(&coeff.recip(), t as u32, FRAC_BITS)?;
            residual = residual.max(identity_residual(&coeff, &pc, t));
            (Some(gamma(&gi)?), Some(pc))
        }
        None => (None, None),
    };
    Ok(ThresholdResult {
        a: a.clone(),
        t,
        gamma: g,
        p0_code_capacity: p0,
        p0_circuit: p0c,
        identity_residual: residual,
    })
}

/// One dual-containing primitive BCH code.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub m: usize,
    pub delta: usize,
    pub classical: CyclicCode,
    pub code: CssCode,
}

/// All distinct dual-containing primitive narrow-sense BCH codes with
/// `3 ≤ m ≤ m_max` and a nontrivial CSS lift.
pub fn bch_family(m_max: usize) -> Result<Vec<FamilyMember>> {
    let mut out = Vec::new();
    for m in 3..=m_max {
        let spec = FieldSpec::new(m)?;
        let mut last_g = None;
        for delta in (3..spec.n()).step_by(2) {
            let Ok((classical, code)) = quantum_bch(&spec, delta) else {
                break;
            };
            if code.k == 0 {
                break;
            }
            if last_g.as_ref() == Some(&classical.g) {
                continue;
            }
            last_g = Some(classical.g.clone());
            out.push(FamilyMember {
                m,
                delta,
                classical,
                code,
            });
        }
    }
    Ok(out)
}

/// `A(C) - A(C^⊥)` for a CSS lift of a dual-containing cyclic code.
pub fn logical_enumerator(spec: &FieldSpec, classical: &CyclicCode, budget: usize) -> Result<WeightEnumerator> {
    let dual = cyclic_weight_enumerator(spec, &classical.dual_generator(), budget)?;
    let full = macwilliams_transform(&dual, classical.n - classical.k_c)?;
    full.difference(&dual)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdRow {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub rate: f64,
    pub a: Option<f64>,
    pub gamma: Option<f64>,
    pub p0_code_capacity: Option<f64>,
    pub p0_circuit: Option<f64>,
    pub a_x: Option<f64>,
    pub a_z: Option<f64>,
    pub level: String,
    pub alpha: f64,
    pub beta: f64,
    pub method: String,
    pub identity_residual: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ThresholdOptions {
    pub enum_budget: usize,
    /// Use the exact count when the half table of the codeword search stays below this.
    pub exact_table_limit: u128,
    /// `(α, β)` override applied to every level.
    pub alpha_beta: Option<(BigRational, BigRational)>,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            enum_budget: 35,
            exact_table_limit: 2_000_000,
            alpha_beta: None,
        }
    }
}

/// Per-channel leading coefficient of one code.
pub struct ChannelCoefficients {
    pub d: usize,
    pub t: usize,
    pub a_x: BigRational,
    pub a_z: BigRational,
    pub method: &'static str,
}

pub fn code_coefficients(member: &FamilyMember, opts: &ThresholdOptions) -> Result<ChannelCoefficients> {
    let spec = FieldSpec::new(member.m)?;
    let diff = logical_enumerator(&spec, &member.classical, opts.enum_budget)?;
    let d = diff.min_distance().ok_or_else(|| Error::Invalid("code has no logical operators".into()))?;
    let t = (d - 1) / 2;
    let half = binomial_u128(member.code.n as u64, (t + 1) as u64);
    if half <= opts.exact_table_limit {
        let a_x = leading_coefficient_exact(&member.code, PauliType::X, t)?;
        let a_z = leading_coefficient_exact(&member.code, PauliType::Z, t)?;
        return Ok(ChannelCoefficients { d, t, a_x, a_z, method: "exact" });
    }
    // both channels see the same classical code
    let a = leading_coefficient_formula(&diff, t);
    Ok(ChannelCoefficients {
        d,
        t,
        a_x: a.clone(),
        a_z: a,
        method: "formula",
    })
}

fn to_f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rows for every level `(m, m)` with `m = t+1` down to 2 (one row when `t = 1`).
pub fn threshold_rows(member: &FamilyMember, opts: &ThresholdOptions) -> Vec<ThresholdRow> {
    let code = &member.code;
    let base = |d: usize, level: String, method: String| ThresholdRow {
        code: format!("[[{},{},{}]]", code.n, code.k, d),
        n: code.n,
        k: code.k,
        d,
        rate: code.rate(),
        a: None,
        gamma: None,
        p0_code_capacity: None,
        p0_circuit: None,
        a_x: None,
        a_z: None,
        level,
        alpha: f64::NAN,
        beta: f64::NAN,
        method,
        identity_residual: None,
    };
    let coeffs = match code_coefficients(member, opts) {
        Ok(c) => c,
        Err(e) => {
            let mut r = base(member.delta, "-".into(), format!("unavailable: {e}"));
            r.alpha = 0.0;
            r.beta = 0.0;
            return vec![r];
        }
    };
    let a = &coeffs.a_x + &coeffs.a_z;
    let t = coeffs.t;
    let mut rows = Vec::new();
    for m in (2..=t + 1).rev() {
        let mut gi = GammaInputs::for_level(m, m, t);
        if let Some((al, be)) = &opts.alpha_beta {
            gi.alpha = al.clone();
            gi.beta = be.clone();
        }
        let mut row = base(coeffs.d, format!("{m}x{m}"), coeffs.method.into());
        row.alpha = to_f(&gi.alpha);
        row.beta = to_f(&gi.beta);
        row.a_x = Some(to_f(&coeffs.a_x));
        row.a_z = Some(to_f(&coeffs.a_z));
        row.a = Some(to_f(&a));
        match scaling_threshold(&a, t, Some(&gi)) {
            Ok(th) => {
                row.gamma = th.gamma.as_ref().map(Extended::to_f64);
                row.p0_code_capacity = Some(th.p0_code_capacity.to_f64());
                row.p0_circuit = th.p0_circuit.as_ref().map(Extended::to_f64);
                row.identity_residual = Some(th.identity_residual);
            }
            Err(e) => row.method = format!("unavailable: {e}"),
        }
        rows.push(row);
    }
    rows
}

pub fn write_threshold_csv<W: std::io::Write>(rows: &[ThresholdRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
