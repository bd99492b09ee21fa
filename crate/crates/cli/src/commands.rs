use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use qbch::analysis::{bch_family, logical_enumerator, threshold_rows, write_threshold_csv, ThresholdOptions, ThresholdRow};
use qbch::circuit::{synth_css_prep, Circuit};
use qbch::code::{cyclic_weight_enumerator, quantum_bch, CodeDescriptor};
use qbch::distill::{build_protocol, identity_perms, DistillationProtocol, ProtocolDescriptor};
use qbch::mc::{sweep, write_stratified_csv, write_sweep_csv, Simulator};
use qbch::symmetry::{all_elements, AutomorphismElement};
use qbch::verify::{check_strict_ft, search_permutations, VerifyOptions};
use qbch::{CssCode, CyclicCode, FieldSpec, TargetState};

use crate::config::Settings;
use crate::{CliError, Outcome};

type Res<T> = Result<T, CliError>;

pub fn dispatch(mut s: Settings) -> Res<Outcome> {
    let out = s.out_dir();
    fs::create_dir_all(&out).map_err(|e| CliError::usage(format!("cannot create {}: {e}", out.display())))?;
    s.out_dir = Some(out);
    match s.command.clone().as_deref() {
        Some("build-code") => build_code(s),
        Some("synth") => synth(s),
        Some("verify-ft") => verify_ft(s),
        Some("search-perms") => search(s),
        Some("simulate") => simulate(s),
        Some("threshold") => threshold(s),
        other => Err(CliError::usage(format!("unknown command {other:?}"))),
    }
}

fn write_file(s: &Settings, name: &str, bytes: &[u8]) -> Res<()> {
    let path = s.out_dir.as_ref().expect("resolved").join(name);
    fs::write(&path, bytes).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(s: &Settings, name: &str, value: &T) -> Res<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    write_file(s, name, format!("{text}\n").as_bytes())
}

/// Writes the resolved settings next to the products so the run can be repeated.
fn sidecar(s: &Settings, stem: &str) -> Res<()> {
    eprintln!("config: {}", serde_json::to_string(s).map_err(|e| CliError::usage(e.to_string()))?);
    write_json(s, &format!("{stem}.config.json"), s)
}

fn field_degree(n: usize) -> Res<usize> {
    (3..=8)
        .find(|&m| (1usize << m) - 1 == n)
        .ok_or_else(|| CliError::usage(format!("n = {n} is not 2^m - 1 with 3 <= m <= 8")))
}

fn bch(n: usize, delta: usize) -> Res<(FieldSpec, CyclicCode, CssCode)> {
    let spec = FieldSpec::new(field_degree(n)?)?;
    let (cls, code) = quantum_bch(&spec, delta).map_err(|e| match e {
        qbch::Error::NotDualContaining => CliError::usage(format!(
            "BCH code n = {n}, delta = {delta} is not dual-containing; no CSS code is built"
        )),
        e => e.into(),
    })?;
    Ok((spec, cls, code))
}

/// Loads the code from a descriptor or builds it from `n` and `delta`.
fn resolve_code(s: &mut Settings) -> Res<(CssCode, String)> {
    if let Some(path) = &s.code {
        let text = read(path)?;
        let d: CodeDescriptor =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad code descriptor: {e}")))?;
        return Ok((CssCode::from_descriptor(&d)?, path.display().to_string()));
    }
    let (Some(n), Some(delta)) = (s.n, s.delta) else {
        return Err(CliError::usage("give --n and --delta, or --code"));
    };
    let (_, _, code) = bch(n, delta)?;
    Ok((code, format!("bch:{n}:{delta}")))
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn resolve_circuit(s: &mut Settings, code: &CssCode) -> Res<Circuit> {
    let source = s.circuit.get_or_insert_with(|| "synth".into()).clone();
    if source == "synth" {
        return Ok(synth_css_prep(code));
    }
    Ok(Circuit::parse(&read(Path::new(&source))?)?)
}

fn parse_target(text: &str) -> Res<TargetState> {
    match text.to_ascii_lowercase().as_str() {
        "zero" | "0" => Ok(TargetState::Zero),
        "plus" | "+" => Ok(TargetState::Plus),
        _ => Err(CliError::usage(format!("target must be zero or plus, got {text:?}"))),
    }
}

fn parse_shape(text: &str) -> Res<(usize, usize)> {
    let bad = || CliError::usage(format!("shape must look like 2,2, got {text:?}"));
    let (a, b) = text.split_once([',', 'x']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn code_m(code: &CssCode) -> usize {
    code.origin.as_ref().map_or(1, |o| o.m)
}

fn parse_elements(text: &str, code: &CssCode) -> Res<Vec<AutomorphismElement>> {
    text.split(',')
        .map(|t| Ok(AutomorphismElement::parse(t.trim(), code.n, code_m(code))?))
        .collect()
}

fn resolve_protocol(s: &mut Settings, code: &CssCode, code_ref: &str) -> Res<DistillationProtocol> {
    let circuit = resolve_circuit(s, code)?;
    let mut protocol = if let Some(path) = &s.protocol {
        let d: ProtocolDescriptor = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::usage(format!("bad protocol descriptor: {e}")))?;
        DistillationProtocol::from_descriptor(&d, code, circuit)?
    } else {
        let t = code.t();
        let shape = parse_shape(s.shape.get_or_insert_with(|| format!("{},{}", t + 1, t + 1)))?;
        let target = parse_target(s.target.get_or_insert_with(|| "zero".into()))?;
        let perms = match &s.perms {
            Some(text) => text.split(';').map(|g| parse_elements(g, code)).collect::<Res<Vec<_>>>()?,
            None => identity_perms(code, shape.0, shape.1),
        };
        build_protocol(code, shape, perms, target, circuit)?
    };
    if let Some(v) = s.logical_checks {
        protocol.logical_checks = v;
    }
    s.logical_checks = Some(protocol.logical_checks);
    write_json(s, "protocol.json", &protocol.to_descriptor(code_ref))?;
    Ok(protocol)
}

fn verify_options(s: &mut Settings) -> VerifyOptions {
    let mut o = VerifyOptions {
        include_network: !*s.prep_only.get_or_insert(false),
        max_w: s.max_w,
        ..Default::default()
    };
    o.memory_budget = *s.memory_budget.get_or_insert(o.memory_budget);
    o
}

fn build_code(mut s: Settings) -> Res<Outcome> {
    let (mut code, _) = resolve_code(&mut s)?;
    let delta = code.d_design;
    if *s.enumerate.get_or_insert(false) {
        let (Some(n), Some(delta)) = (s.n, s.delta) else {
            return Err(CliError::usage("--enumerate needs --n and --delta"));
        };
        let budget = *s.enum_budget.get_or_insert(35);
        let (spec, cls, _) = bch(n, delta)?;
        let dual = cyclic_weight_enumerator(&spec, &cls.dual_generator(), budget)?;
        let diff = logical_enumerator(&spec, &cls, budget)?;
        let mut buf = Vec::new();
        dual.write_csv(&mut buf)?;
        write_file(&s, "enumerator_dual.csv", &buf)?;
        buf.clear();
        diff.write_csv(&mut buf)?;
        write_file(&s, "enumerator_logical.csv", &buf)?;
        code.d_true = diff.min_distance();
    }
    write_json(&s, "code.json", &code.to_descriptor(delta))?;
    sidecar(&s, "code")?;
    let d = match code.d_true {
        Some(d) => format!("{d}"),
        None => format!("{delta} (designed)"),
    };
    println!("[[{},{},{}]] d={d} rate={:.4}", code.n, code.k, delta, code.rate());
    Ok(Outcome::Success)
}

fn synth(mut s: Settings) -> Res<Outcome> {
    let (code, _) = resolve_code(&mut s)?;
    let c = synth_css_prep(&code);
    write_file(&s, "prep.circ", c.serialize().as_bytes())?;
    let stats = c.stats();
    write_json(&s, "prep.stats.json", &stats)?;
    sidecar(&s, "prep")?;
    println!("{} qubits, {} CNOTs, {} H, depth {}", c.n_qubits, stats.cnot_count, stats.h_count, stats.depth);
    Ok(Outcome::Success)
}

fn verify_ft(mut s: Settings) -> Res<Outcome> {
    let (code, code_ref) = resolve_code(&mut s)?;
    let protocol = resolve_protocol(&mut s, &code, &code_ref)?;
    let opts = verify_options(&mut s);
    let v = check_strict_ft(&protocol, &opts)?;
    write_json(&s, "verdict.json", &v)?;
    sidecar(&s, "verdict")?;
    if v.pass {
        println!("strict-FT: PASS ({} cases, {:.2}s)", v.cases, v.elapsed_s);
        return Ok(Outcome::Success);
    }
    println!("strict-FT: FAIL ({} malignant patterns)", v.malignant_total);
    if let Some(m) = v.malignant.first() {
        let locs: Vec<String> = m.locations.iter().map(|l| format!("{}:{}", l.location, l.label)).collect();
        println!("  e.g. {} pass, faults {}, reduced weight {:?}", m.pass, locs.join(" "), m.reduced_weight);
    }
    Ok(Outcome::VerdictFail)
}

fn search(mut s: Settings) -> Res<Outcome> {
    let (code, _) = resolve_code(&mut s)?;
    let circuit = resolve_circuit(&mut s, &code)?;
    let t = code.t();
    let shape = parse_shape(s.shape.get_or_insert_with(|| format!("{},{}", t + 1, t + 1)))?;
    let target = parse_target(s.target.get_or_insert_with(|| "zero".into()))?;
    let generators = match &s.generators {
        Some(text) => parse_elements(text, &code)?,
        None => all_elements(code.n, code_m(&code)),
    };
    let budget = *s.budget.get_or_insert(1000);
    let opts = verify_options(&mut s);
    let report = search_permutations(&code, &circuit, shape, target, &generators, budget, &opts)?;
    write_json(&s, "search.json", &report)?;
    sidecar(&s, "search")?;
    println!(
        "{} candidates checked{}, {} passing",
        report.candidates_checked,
        if report.exhausted { "" } else { " (budget reached)" },
        report.passing.len()
    );
    for p in report.passing.iter().take(5) {
        println!("  {:?}", p.perms);
    }
    Ok(Outcome::Success)
}

fn gnuplot_script() -> &'static str {
    "set datafile separator ','\n\
     set logscale xy\n\
     set key autotitle columnhead\n\
     set xlabel 'p'\n\
     plot for [c=7:12] 'sweep.csv' using 1:c with linespoints\n"
}

fn simulate(mut s: Settings) -> Res<Outcome> {
    let (code, code_ref) = resolve_code(&mut s)?;
    let protocol = resolve_protocol(&mut s, &code, &code_ref)?;
    let grid = s.grid.get_or_insert_with(|| vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2]).clone();
    if grid.is_empty() || grid.iter().any(|p| !(0.0..1.0).contains(p)) {
        return Err(CliError::usage("grid values must lie in [0, 1)"));
    }
    let shots = *s.shots.get_or_insert(1_000_000);
    let seed = *s.seed.get_or_insert(1);
    let w_max = *s.w_max.get_or_insert(3);
    if w_max < 3 {
        return Err(CliError::usage("w_max must be at least 3"));
    }
    let sim = Simulator::new(&protocol, w_max);
    let rows = sweep(&sim, &grid, shots, seed)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    write_file(&s, "sweep.csv", &buf)?;
    write_file(&s, "sweep.gp", gnuplot_script().as_bytes())?;
    if let Some(k) = s.stratified_k {
        let data = sim.run_stratified(k, shots, seed);
        let mut buf = Vec::new();
        write_stratified_csv(&data, &grid, &mut buf)?;
        write_file(&s, "stratified.csv", &buf)?;
    }
    sidecar(&s, "sweep")?;
    for (p, b) in &rows {
        println!("p={p:e} acc1={:.5} acc2={:.5}", b.acc1().0, b.acc2().0);
    }
    Ok(Outcome::Success)
}

fn parse_rational(text: &str) -> Res<BigRational> {
    BigRational::from_str(text.trim()).map_err(|_| CliError::usage(format!("expected a rational like 8/15, got {text:?}")))
}

fn threshold(mut s: Settings) -> Res<Outcome> {
    let m_max = *s.m_max.get_or_insert(7);
    if !(3..=8).contains(&m_max) {
        return Err(CliError::usage("m_max must be in 3..=8"));
    }
    let mut opts = ThresholdOptions {
        enum_budget: *s.enum_budget.get_or_insert(35),
        ..Default::default()
    };
    match (&s.alpha, &s.beta) {
        (Some(a), Some(b)) => opts.alpha_beta = Some((parse_rational(a)?, parse_rational(b)?)),
        (None, None) => {}
        _ => return Err(CliError::usage("give both --alpha and --beta, or neither")),
    }
    let family = bch_family(m_max)?;
    let rows: Vec<ThresholdRow> = family.iter().flat_map(|f| threshold_rows(f, &opts)).collect();
    let mut buf = Vec::new();
    write_threshold_csv(&rows, &mut buf)?;
    write_file(&s, "threshold.csv", &buf)?;
    sidecar(&s, "threshold")?;
    let missing: Vec<&str> = rows.iter().filter(|r| r.p0_code_capacity.is_none()).map(|r| r.code.as_str()).collect();
    println!("{} codes, {} rows", family.len(), rows.len());
    if !missing.is_empty() {
        println!("no p0 for: {}", missing.join(", "));
    }
    Ok(Outcome::Success)
}
