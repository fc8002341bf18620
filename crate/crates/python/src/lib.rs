//! Python bindings: transpile, compile-once kernels with runtime binding, and
//! the validation suites.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use qasm2cudaq::emit::{emit, EmissionTarget};
use qasm2cudaq::harness::{self, Sabotage, ValidateOptions};
use qasm2cudaq::kir::{bind, bind_named, BoundKernel};
use qasm2cudaq::sim;

create_exception!(qasm2cudaq_py, QasmError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    QasmError::new_err(e.to_string())
}

fn target(name: &str) -> PyResult<EmissionTarget> {
    name.parse().map_err(|e: qasm2cudaq::emit::EmitError| PyValueError::new_err(e.to_string()))
}

#[derive(FromPyObject)]
enum Values {
    Many(Vec<f64>),
    One(f64),
}

impl Values {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Values::Many(v) => v,
            Values::One(x) => vec![x],
        }
    }
}

/// Runtime parameters: a flat list in slot order, or a mapping from input name to value(s).
#[derive(FromPyObject)]
enum Params {
    Named(HashMap<String, Values>),
    Flat(Vec<f64>),
}

/// Emits CUDA-Q source for OpenQASM text.
#[pyfunction]
#[pyo3(signature = (source, target = "cudaq-cpp"))]
fn transpile(source: &str, target: &str) -> PyResult<String> {
    let t = self::target(target)?;
    let kernel = qasm2cudaq::compile(source).map_err(err)?;
    Ok(emit(&kernel, t).map_err(err)?.text)
}

/// A lowered kernel. Compiled once; every call binds parameters without re-lowering.
#[pyclass(module = "qasm2cudaq_py", frozen)]
struct Kernel {
    inner: qasm2cudaq::Kernel,
}

impl Kernel {
    fn bound(&self, params: Option<Params>) -> PyResult<BoundKernel<'_>> {
        match params {
            None => bind(&self.inner, Vec::new()),
            Some(Params::Flat(v)) => bind(&self.inner, v),
            Some(Params::Named(m)) => {
                let named: Vec<(String, Vec<f64>)> = m.into_iter().map(|(k, v)| (k, v.into_vec())).collect();
                bind_named(&self.inner, &named)
            }
        }
        .map_err(err)
    }
}

#[pymethods]
impl Kernel {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        Ok(Self { inner: qasm2cudaq::compile(source).map_err(err)? })
    }

    #[staticmethod]
    fn compile(source: &str) -> PyResult<Self> {
        Self::new(source)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits
    }

    #[getter]
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }

    /// Declared inputs as `(name, length)` pairs in slot order.
    #[getter]
    fn inputs(&self) -> Vec<(String, usize)> {
        self.inner.param_layout.iter().map(|p| (p.name.clone(), p.len)).collect()
    }

    #[pyo3(signature = (target = "cudaq-cpp"))]
    fn emit(&self, target: &str) -> PyResult<String> {
        Ok(emit(&self.inner, self::target(target)?).map_err(err)?.text)
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }

    #[pyo3(signature = (shots = 1000, seed = 0, params = None, workers = 0))]
    fn sample(
        &self,
        py: Python<'_>,
        shots: u64,
        seed: u64,
        params: Option<Params>,
        workers: usize,
    ) -> PyResult<BTreeMap<String, u64>> {
        let bk = self.bound(params)?;
        let h = py.detach(|| sim::sample_with_workers(&bk, shots, seed, workers)).map_err(err)?;
        Ok(h.counts)
    }

    #[pyo3(signature = (params = None))]
    fn statevector(&self, params: Option<Params>) -> PyResult<Vec<Complex64>> {
        let bk = self.bound(params)?;
        Ok(sim::statevector(&bk).map_err(err)?.into_amplitudes())
    }

    /// Expectation of a Pauli string; character k acts on qubit k.
    #[pyo3(signature = (pauli, params = None))]
    fn expval(&self, pauli: &str, params: Option<Params>) -> PyResult<f64> {
        let bk = self.bound(params)?;
        sim::expval_pauli(&sim::statevector(&bk).map_err(err)?, pauli).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Kernel(num_qubits={}, num_params={})", self.inner.num_qubits, self.inner.num_params())
    }
}

/// Runs validation suites and returns the parsed JSON document
/// `{"passed": bool, "suites": [...]}`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 42, shots = 1000, sabotage = ""))]
fn validate<'py>(py: Python<'py>, suite: &str, seed: u64, shots: u64, sabotage: &str) -> PyResult<Bound<'py, PyAny>> {
    let opts = ValidateOptions { seed, shots, sabotage: Sabotage::parse_list(sabotage).map_err(err)?, workers: 0 };
    let suites = harness::parse_selection(suite).map_err(err)?;
    let reports = py
        .detach(|| suites.into_iter().map(|s| harness::run_suite(s, &opts)).collect::<Result<Vec<_>, _>>())
        .map_err(err)?;
    let passed = reports.iter().all(|r| r.passed());
    let doc = serde_json::json!({ "passed": passed, "seed": seed, "shots": shots, "suites": reports });
    py.import("json")?.call_method1("loads", (doc.to_string(),))
}

#[pymodule]
pub fn qasm2cudaq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(transpile, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_class::<Kernel>()?;
    m.add("QasmError", m.py().get_type::<QasmError>())?;
    Ok(())
}
