//! Python bindings for the qbch toolkit.
//!
//! Structured results (verdicts, search reports, sweep rows, threshold rows)
//! come back as plain dicts and lists.

use std::str::FromStr;

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use qbch::analysis::{self, GammaInputs, ThresholdOptions};
use qbch::circuit::{synth_css_prep, Circuit as CoreCircuit};
use qbch::code::{quantum_bch, CodeDescriptor};
use qbch::distill::{build_protocol, identity_perms, DistillationProtocol, ProtocolDescriptor};
use qbch::mc::{sweep, Simulator, SweepRow};
use qbch::symmetry::{all_elements, verify_code_automorphism, AutomorphismElement};
use qbch::verify::{check_strict_ft, search_permutations as core_search, VerifyOptions};
use qbch::{CssCode, FieldSpec, TargetState};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into native Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn target_of(text: &str) -> PyResult<TargetState> {
    match text {
        "zero" => Ok(TargetState::Zero),
        "plus" => Ok(TargetState::Plus),
        _ => Err(err(format!("target must be 'zero' or 'plus', got {text:?}"))),
    }
}

fn field_degree(code: &CssCode) -> usize {
    code.origin.as_ref().map_or(1, |o| o.m)
}

fn rational(text: &str) -> PyResult<BigRational> {
    BigRational::from_str(text.trim()).map_err(|_| err(format!("expected a rational like '4/15', got {text:?}")))
}

/// CSS code with `h_x = h_z` from a dual-containing BCH code.
#[pyclass(name = "Code", module = "qbch_py", from_py_object)]
#[derive(Clone)]
struct Code {
    inner: CssCode,
}

#[pymethods]
impl Code {
    #[staticmethod]
    fn bch(n: usize, delta: usize) -> PyResult<Self> {
        let m = (3..=8).find(|&m| (1usize << m) - 1 == n).ok_or_else(|| err(format!("n = {n} is not 2^m - 1")))?;
        let (_, inner) = quantum_bch(&FieldSpec::new(m).map_err(err)?, delta).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let d: CodeDescriptor = serde_json::from_str(text).map_err(err)?;
        Ok(Self {
            inner: CssCode::from_descriptor(&d).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_descriptor(self.inner.d_design)).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.distance()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate()
    }

    /// Rows of `h_x` as 0/1 lists.
    fn h_x(&self) -> Vec<Vec<u8>> {
        self.inner.h_x.rows().iter().map(|r| (0..r.len()).map(|i| r.get(i) as u8).collect()).collect()
    }

    fn h_z(&self) -> Vec<Vec<u8>> {
        self.inner.h_z.rows().iter().map(|r| (0..r.len()).map(|i| r.get(i) as u8).collect()).collect()
    }

    /// Whether `R^s F^l` written as text maps the code to itself.
    fn is_automorphism(&self, element: &str) -> PyResult<bool> {
        let e = AutomorphismElement::parse(element, self.inner.n, field_degree(&self.inner)).map_err(err)?;
        Ok(verify_code_automorphism(&self.inner, &e))
    }

    fn __repr__(&self) -> String {
        format!("Code([[{},{},{}]])", self.inner.n, self.inner.k, self.inner.distance())
    }
}

#[pyclass(name = "Circuit", module = "qbch_py", from_py_object)]
#[derive(Clone)]
struct Circuit {
    inner: CoreCircuit,
}

#[pymethods]
impl Circuit {
    /// Non-FT preparation of the code's zero state.
    #[staticmethod]
    fn synth(code: &Code) -> Self {
        Self {
            inner: synth_css_prep(&code.inner),
        }
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreCircuit::parse(text).map_err(err)?,
        })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    #[getter]
    fn cnot_count(&self) -> usize {
        self.inner.cnot_count()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Two-step m1-to-1 × m2-to-1 distillation of one logical basis state.
#[pyclass(name = "Protocol", module = "qbch_py")]
struct Protocol {
    inner: DistillationProtocol,
}

#[pymethods]
impl Protocol {
    /// `perms` lists one group per step-2 member, each with `m1` texts like `"R^14"`.
    #[new]
    #[pyo3(signature = (code, shape, perms=None, target="zero", circuit=None, logical_checks=true))]
    fn new(
        code: &Code,
        shape: (usize, usize),
        perms: Option<Vec<Vec<String>>>,
        target: &str,
        circuit: Option<&Circuit>,
        logical_checks: bool,
    ) -> PyResult<Self> {
        let c = &code.inner;
        let m = field_degree(c);
        let perms = match perms {
            Some(groups) => groups
                .iter()
                .map(|g| g.iter().map(|t| AutomorphismElement::parse(t, c.n, m).map_err(err)).collect())
                .collect::<PyResult<Vec<Vec<_>>>>()?,
            None => identity_perms(c, shape.0, shape.1),
        };
        let circuit = circuit.map_or_else(|| synth_css_prep(c), |x| x.inner.clone());
        let mut inner = build_protocol(c, shape, perms, target_of(target)?, circuit).map_err(err)?;
        inner.logical_checks = logical_checks;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (code, text, circuit=None))]
    fn from_json(code: &Code, text: &str, circuit: Option<&Circuit>) -> PyResult<Self> {
        let d: ProtocolDescriptor = serde_json::from_str(text).map_err(err)?;
        let circuit = circuit.map_or_else(|| synth_css_prep(&code.inner), |x| x.inner.clone());
        Ok(Self {
            inner: DistillationProtocol::from_descriptor(&d, &code.inner, circuit).map_err(err)?,
        })
    }

    #[pyo3(signature = (code_ref="code.json"))]
    fn to_json(&self, code_ref: &str) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_descriptor(code_ref)).map_err(err)
    }

    #[getter]
    fn num_blocks(&self) -> usize {
        self.inner.num_blocks()
    }

    /// Strict fault-tolerance check; returns the verdict as a dict.
    #[pyo3(signature = (include_network=true, memory_budget=50_000_000, max_w=None, stop_at_first=false))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        include_network: bool,
        memory_budget: u128,
        max_w: Option<usize>,
        stop_at_first: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = VerifyOptions {
            include_network,
            memory_budget,
            max_w,
            stop_at_first,
            ..Default::default()
        };
        let v = py.detach(|| check_strict_ft(&self.inner, &opts)).map_err(err)?;
        to_py(py, &v)
    }

    /// Monte Carlo sweep; one dict per grid point.
    #[pyo3(signature = (grid, shots=100_000, seed=1, w_max=3))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        grid: Vec<f64>,
        shots: u64,
        seed: u64,
        w_max: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        if w_max < 3 {
            return Err(err("w_max must be at least 3"));
        }
        let rows = py
            .detach(|| {
                let sim = Simulator::new(&self.inner, w_max);
                sweep(&sim, &grid, shots, seed)
            })
            .map_err(err)?;
        let rows: Vec<SweepRow> = rows.iter().map(|(p, b)| SweepRow::from_batch(*p, b)).collect();
        to_py(py, &rows)
    }
}

/// Checks assignments with block 0 fixed to the identity; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (code, shape, target="zero", generators=None, budget=100, circuit=None))]
fn search_permutations<'py>(
    py: Python<'py>,
    code: &Code,
    shape: (usize, usize),
    target: &str,
    generators: Option<Vec<String>>,
    budget: usize,
    circuit: Option<&Circuit>,
) -> PyResult<Bound<'py, PyAny>> {
    let c = &code.inner;
    let m = field_degree(c);
    let gens = match generators {
        Some(list) => list
            .iter()
            .map(|t| AutomorphismElement::parse(t, c.n, m).map_err(err))
            .collect::<PyResult<Vec<_>>>()?,
        None => all_elements(c.n, m),
    };
    let circuit = circuit.map_or_else(|| synth_css_prep(c), |x| x.inner.clone());
    let target = target_of(target)?;
    let report = py
        .detach(|| core_search(c, &circuit, shape, target, &gens, budget, &VerifyOptions::default()))
        .map_err(err)?;
    to_py(py, &report)
}

/// All `n·m` elements of C_n ⋊ F_m as text.
#[pyfunction]
fn automorphisms(n: usize, m: usize) -> Vec<String> {
    all_elements(n, m).iter().map(|e| e.to_string()).collect()
}

/// `(X, Z)` output rate coefficients of `p`, as rational strings.
#[pyfunction]
#[pyo3(signature = (m_x, m_z, target="zero"))]
fn effective_rates(m_x: usize, m_z: usize, target: &str) -> PyResult<(String, String)> {
    let r = analysis::effective_rates(m_x, m_z, target_of(target)?);
    Ok((r.p_x_coeff.to_string(), r.p_z_coeff.to_string()))
}

/// γ for rational inputs; returns `(float, decimal string with 30 digits)`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, t, c1="4/15"))]
fn gamma(alpha: &str, beta: &str, t: usize, c1: &str) -> PyResult<(f64, String)> {
    let g = GammaInputs {
        alpha: rational(alpha)?,
        beta: rational(beta)?,
        c1: rational(c1)?,
        t,
    };
    let v = analysis::gamma(&g).map_err(err)?;
    Ok((v.to_f64(), v.to_decimal(30)))
}

/// Leading-order coefficient `a` (X plus Z channel) by exact minimum-weight decoding.
#[pyfunction]
fn leading_coefficient(code: &Code) -> PyResult<String> {
    let c = &code.inner;
    let t = c.t();
    let a = analysis::leading_coefficient_exact(c, qbch::PauliType::X, t).map_err(err)?
        + analysis::leading_coefficient_exact(c, qbch::PauliType::Z, t).map_err(err)?;
    Ok(a.to_string())
}

/// `p0 = a^{-1/t}`, and the circuit-level value when `(alpha, beta)` are given.
#[pyfunction]
#[pyo3(signature = (a, t, alpha=None, beta=None, c1="4/15"))]
fn scaling_threshold(a: &str, t: usize, alpha: Option<&str>, beta: Option<&str>, c1: &str) -> PyResult<(f64, Option<f64>)> {
    let gi = match (alpha, beta) {
        (Some(al), Some(be)) => Some(GammaInputs {
            alpha: rational(al)?,
            beta: rational(be)?,
            c1: rational(c1)?,
            t,
        }),
        (None, None) => None,
        _ => return Err(err("give both alpha and beta, or neither")),
    };
    let th = analysis::scaling_threshold(&rational(a)?, t, gi.as_ref()).map_err(err)?;
    Ok((th.p0_code_capacity.to_f64(), th.p0_circuit.map(|p| p.to_f64())))
}

/// Threshold rows for every dual-containing BCH code with `m <= m_max`.
#[pyfunction]
#[pyo3(signature = (m_max=5, enum_budget=35))]
fn threshold_table<'py>(py: Python<'py>, m_max: usize, enum_budget: usize) -> PyResult<Bound<'py, PyAny>> {
    let opts = ThresholdOptions {
        enum_budget,
        ..Default::default()
    };
    let rows = py
        .detach(|| -> qbch::Result<Vec<analysis::ThresholdRow>> {
            Ok(analysis::bch_family(m_max)?.iter().flat_map(|f| analysis::threshold_rows(f, &opts)).collect())
        })
        .map_err(err)?;
    to_py(py, &rows)
}

#[pymodule]
fn qbch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Code>()?;
    m.add_class::<Circuit>()?;
    m.add_class::<Protocol>()?;
    m.add_function(wrap_pyfunction!(search_permutations, m)?)?;
    m.add_function(wrap_pyfunction!(automorphisms, m)?)?;
    m.add_function(wrap_pyfunction!(effective_rates, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(leading_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_table, m)?)?;
    Ok(())
}
