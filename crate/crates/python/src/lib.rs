//! Python bindings. Exact probabilities come back as `fractions.Fraction`.

use burnside::analysis;
use burnside::combinatorics::{self, Rational};
use burnside::coupling::{coalescence_experiment, StartPair};
use burnside::kernel::{self, Label};
use burnside::oracle::StamSampler;
use burnside::partitions;
use burnside::rng::RngStream;
use burnside::simulate;
use num_bigint::BigInt;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: burnside::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((r.numer().clone(), r.denom().clone()))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((v.to_string(),))
}

/// A set partition of `{1, …, n}` stored as a restricted growth string.
#[pyclass(name = "SetPartition", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PySetPartition(partitions::SetPartition);

#[pymethods]
impl PySetPartition {
    #[new]
    fn new(rgs: Vec<u8>) -> PyResult<Self> {
        partitions::SetPartition::from_rgs(rgs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_labels(labels: Vec<i64>) -> Self {
        Self(partitions::SetPartition::from_labels(&labels))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn rgs(&self) -> Vec<u8> {
        self.0.rgs().to_vec()
    }

    #[getter]
    fn block_count(&self) -> usize {
        self.0.block_count()
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        self.0.blocks()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SetPartition('{}')", self.0)
    }
}

/// Exact lumped (or block-count) transition matrix.
#[pyclass(name = "KernelMatrix", frozen)]
struct PyKernelMatrix(kernel::KernelMatrix);

#[pymethods]
impl PyKernelMatrix {
    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().as_str()
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    fn labels(&self) -> Vec<String> {
        self.0
            .labels()
            .iter()
            .map(|l| match l {
                Label::Partition(x) => x.to_string(),
                Label::BlockCount(j) => j.to_string(),
            })
            .collect()
    }

    fn entry<'py>(&self, py: Python<'py>, x: usize, y: usize) -> PyResult<Bound<'py, PyAny>> {
        if x >= self.0.dim() || y >= self.0.dim() {
            return Err(PyIndexError::new_err("state index out of range"));
        }
        fraction(py, self.0.get(x, y))
    }

    fn to_lists<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        (0..self.0.dim()).map(|x| self.0.row(x).map(|v| fraction(py, v)).collect()).collect()
    }

    fn is_row_stochastic(&self) -> bool {
        self.0.is_row_stochastic()
    }

    fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }
}

#[pyfunction]
fn bell(n: usize) -> BigInt {
    combinatorics::bell(n)
}

#[pyfunction]
fn stirling2(n: usize, j: usize) -> BigInt {
    combinatorics::stirling2(n, j)
}

#[pyfunction]
fn subfactorial(m: usize) -> BigInt {
    combinatorics::subfactorial(m)
}

#[pyfunction]
fn fixed_point_moment(py: Python<'_>, n: usize, k: usize, j: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &combinatorics::fixed_point_moment(n, k, j).map_err(err)?)
}

#[pyfunction]
fn full_transition(py: Python<'_>, n: usize, k: usize, j_u: usize, j_v: usize, j: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &kernel::full_transition(n, k, j_u, j_v, j).map_err(err)?)
}

#[pyfunction]
fn lumped_transition(py: Python<'_>, n: usize, k: usize, j_x: usize, j_y: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &kernel::lumped_transition(n, k, j_x, j_y).map_err(err)?)
}

#[pyfunction]
fn lumped_matrix(n: usize, k: usize) -> PyResult<PyKernelMatrix> {
    kernel::lumped_matrix(n, k).map(PyKernelMatrix).map_err(err)
}

#[pyfunction]
fn block_count_matrix(n: usize, k: usize) -> PyResult<PyKernelMatrix> {
    kernel::block_count_matrix(n, k).map(PyKernelMatrix).map_err(err)
}

#[pyfunction]
fn enumerate_partitions(n: usize) -> PyResult<Vec<PySetPartition>> {
    Ok(partitions::enumerate_partitions(n).map_err(err)?.into_iter().map(PySetPartition).collect())
}

/// Runs the Burnside chain `count` times from the one-block partition.
#[pyfunction]
#[pyo3(signature = (n, k=None, count=1, steps=None, eps=0.01, seed=0))]
fn sample_partitions(
    py: Python<'_>,
    n: usize,
    k: Option<usize>,
    count: usize,
    steps: Option<usize>,
    eps: f64,
    seed: u64,
) -> PyResult<Vec<PySetPartition>> {
    let k = k.unwrap_or(n);
    let steps = steps.unwrap_or_else(|| simulate::default_steps(n, k, eps));
    let out = py.detach(|| simulate::sample_partitions(n, k, steps, count, seed)).map_err(err)?;
    Ok(out.into_iter().map(PySetPartition).collect())
}

#[pyfunction]
fn default_steps(n: usize, k: usize, eps: f64) -> usize {
    simulate::default_steps(n, k, eps)
}

/// Exact uniform samples from Stam's urn sampler.
#[pyfunction]
#[pyo3(signature = (n, count=1, seed=0))]
fn stam_sample(n: usize, count: usize, seed: u64) -> PyResult<Vec<PySetPartition>> {
    let sampler = StamSampler::new(n).map_err(err)?;
    let mut rng = RngStream::new(seed, 0).rng();
    Ok((0..count).map(|_| PySetPartition(sampler.sample(&mut rng).partition)).collect())
}

#[pyfunction]
fn spectrum<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| analysis::spectrum(n, k)).map_err(err)?;
    json_to_py(py, &report.to_json())
}

/// `{"d": [...], "d_exact": [Fraction, ...], "coupling_bound": [...]}`.
#[pyfunction]
fn distance_curve<'py>(py: Python<'py>, n: usize, k: usize, t_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let curve = py
        .detach(|| kernel::block_count_matrix(n, k).and_then(|m| analysis::distance_curve(&m, t_max)))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("d", curve.d.clone())?;
    let exact = curve.d_exact.iter().map(|r| fraction(py, r)).collect::<PyResult<Vec<_>>>()?;
    out.set_item("d_exact", exact)?;
    out.set_item("coupling_bound", curve.coupling_bound.clone())?;
    out.set_item("minorization_bound", curve.minorization_bound.clone())?;
    Ok(out)
}

#[pyfunction]
fn mixing_time(n: usize, k: usize, eps: f64, t_max: usize) -> PyResult<Option<usize>> {
    let curve = kernel::block_count_matrix(n, k).and_then(|m| analysis::distance_curve(&m, t_max)).map_err(err)?;
    Ok(analysis::mixing_time(&curve, eps))
}

#[pyfunction]
fn minorization_constant(py: Python<'_>, n: usize, k: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &analysis::minorization_report(n, k).map_err(err)?.c)
}

#[pyfunction]
fn verify_coupling_bound(n: usize, k: usize, t_max: usize) -> PyResult<bool> {
    Ok(analysis::verify_coupling_bound(n, k, t_max).map_err(err)?.holds)
}

/// Survival curve of the coupled chains started at the two extreme states.
#[pyfunction]
#[pyo3(signature = (n, k, t_max=50, trials=10_000, seed=0))]
fn coalescence(py: Python<'_>, n: usize, k: usize, t_max: usize, trials: usize, seed: u64) -> PyResult<Vec<f64>> {
    let curve = py
        .detach(|| coalescence_experiment(n, k, t_max, trials, seed, &StartPair::Extremes))
        .map_err(err)?;
    Ok(curve.survival)
}

#[pymodule]
#[pyo3(name = "burnside")]
fn burnside_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySetPartition>()?;
    m.add_class::<PyKernelMatrix>()?;
    m.add_function(wrap_pyfunction!(bell, m)?)?;
    m.add_function(wrap_pyfunction!(stirling2, m)?)?;
    m.add_function(wrap_pyfunction!(subfactorial, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_moment, m)?)?;
    m.add_function(wrap_pyfunction!(full_transition, m)?)?;
    m.add_function(wrap_pyfunction!(lumped_transition, m)?)?;
    m.add_function(wrap_pyfunction!(lumped_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(block_count_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(sample_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(default_steps, m)?)?;
    m.add_function(wrap_pyfunction!(stam_sample, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(distance_curve, m)?)?;
    m.add_function(wrap_pyfunction!(mixing_time, m)?)?;
    m.add_function(wrap_pyfunction!(minorization_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verify_coupling_bound, m)?)?;
    m.add_function(wrap_pyfunction!(coalescence, m)?)?;
    Ok(())
}
