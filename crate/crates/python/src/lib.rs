//! Python bindings for the qcontrol core library.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use qcontrol::gates::gate_by_name;
use qcontrol::lab::{fringe_scan, run_experiment, theta_grid, Experiment, Mode};
use qcontrol::photonic::{self, NoiseModel, PatternClass};
use qcontrol::qudit::{self, Polarity};
use qcontrol::resources::{compare_report as compare, PqModel};
use qcontrol::tomography::{self, ChiMatrix, MleOptions};
use qcontrol::{CarrierState, Operator};

create_exception!(qcontrol, QControlError, PyValueError);

fn err(e: qcontrol::Error) -> PyErr {
    QControlError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn serialize<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| QControlError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn default_dims(n: usize) -> Vec<usize> {
    if n.is_power_of_two() && n > 1 {
        vec![2; n.trailing_zeros() as usize]
    } else {
        vec![n]
    }
}

#[pyclass(name = "Operator", module = "qcontrol", from_py_object)]
#[derive(Clone)]
struct PyOperator {
    inner: Operator,
}

#[pymethods]
impl PyOperator {
    /// Square matrix as nested lists; `dims` defaults to qubits when the size is a power of two.
    #[new]
    #[pyo3(signature = (matrix, dims=None))]
    fn new(matrix: Vec<Vec<Complex64>>, dims: Option<Vec<usize>>) -> PyResult<Self> {
        let dims = dims.unwrap_or_else(|| default_dims(matrix.len()));
        Ok(PyOperator {
            inner: Operator::from_rows(dims, &matrix).map_err(err)?,
        })
    }

    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        Ok(PyOperator {
            inner: gate_by_name(name).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyOperator {
            inner: qcontrol::io::operator_from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        qcontrol::io::operator_to_json(&self.inner)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims_out().to_vec()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
    }

    fn is_unitary(&self) -> bool {
        self.inner.is_unitary()
    }

    fn kron(&self, other: &PyOperator) -> PyOperator {
        PyOperator {
            inner: self.inner.kron(&other.inner),
        }
    }

    fn apply(&self, state: &PyState) -> PyResult<PyState> {
        Ok(PyState {
            inner: self.inner.apply(&state.inner).map_err(err)?,
        })
    }

    fn __matmul__(&self, other: &PyOperator) -> PyResult<PyOperator> {
        Ok(PyOperator {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Operator(dims={:?})", self.inner.dims_out())
    }
}

#[pyclass(name = "State", module = "qcontrol", from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: CarrierState,
}

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (amplitudes, dims=None))]
    fn new(amplitudes: Vec<Complex64>, dims: Option<Vec<usize>>) -> PyResult<Self> {
        let dims = dims.unwrap_or_else(|| default_dims(amplitudes.len()));
        Ok(PyState {
            inner: CarrierState::new(dims, amplitudes).map_err(err)?,
        })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().iter().copied().collect()
    }

    fn probability(&self) -> f64 {
        self.inner.probability()
    }

    fn fidelity(&self, other: &PyState) -> f64 {
        self.inner.fidelity(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!("State(dims={:?})", self.inner.dims())
    }
}

#[pyclass(name = "NoiseModel", module = "qcontrol", get_all, set_all, from_py_object)]
#[derive(Clone, Copy)]
struct PyNoise {
    phase_jitter_sigma: f64,
    distinguishability: f64,
    waveplate_angle_error_sigma: f64,
    poisson_counts: f64,
}

impl From<NoiseModel> for PyNoise {
    fn from(n: NoiseModel) -> Self {
        PyNoise {
            phase_jitter_sigma: n.phase_jitter_sigma,
            distinguishability: n.distinguishability,
            waveplate_angle_error_sigma: n.waveplate_angle_error_sigma,
            poisson_counts: n.poisson_counts,
        }
    }
}

impl From<PyNoise> for NoiseModel {
    fn from(n: PyNoise) -> Self {
        NoiseModel {
            phase_jitter_sigma: n.phase_jitter_sigma,
            distinguishability: n.distinguishability,
            waveplate_angle_error_sigma: n.waveplate_angle_error_sigma,
            poisson_counts: n.poisson_counts,
        }
    }
}

#[pymethods]
impl PyNoise {
    #[new]
    #[pyo3(signature = (phase_jitter_sigma=0.0, distinguishability=1.0, waveplate_angle_error_sigma=0.0, poisson_counts=2000.0))]
    fn new(
        phase_jitter_sigma: f64,
        distinguishability: f64,
        waveplate_angle_error_sigma: f64,
        poisson_counts: f64,
    ) -> PyResult<Self> {
        let n = NoiseModel {
            phase_jitter_sigma,
            distinguishability,
            waveplate_angle_error_sigma,
            poisson_counts,
        };
        n.validate().map_err(err)?;
        Ok(n.into())
    }

    #[staticmethod]
    fn calibrated() -> Self {
        NoiseModel::calibrated().into()
    }

    fn __repr__(&self) -> String {
        format!(
            "NoiseModel(phase_jitter_sigma={}, distinguishability={}, waveplate_angle_error_sigma={}, poisson_counts={})",
            self.phase_jitter_sigma, self.distinguishability, self.waveplate_angle_error_sigma, self.poisson_counts
        )
    }
}

/// Exact without a seed; sampled with `noise` (calibrated preset by default) otherwise.
fn mode(seed: Option<u64>, noise: Option<PyNoise>) -> Mode {
    match seed {
        None => Mode::Exact,
        Some(seed) => Mode::Sampled {
            noise: noise.map(NoiseModel::from).unwrap_or_else(NoiseModel::calibrated),
            seed,
        },
    }
}

#[pyfunction]
fn xa_gate() -> PyOperator {
    PyOperator {
        inner: qudit::xa_gate(),
    }
}

/// Controlled `op` on carriers `[2, 4, …]`; acts when the control equals `polarity`.
#[pyfunction]
#[pyo3(signature = (op, polarity=1))]
fn add_control(op: &PyOperator, polarity: u8) -> PyResult<PyOperator> {
    let pol = match polarity {
        1 => Polarity::OnOne,
        0 => Polarity::OnZero,
        p => return Err(PyValueError::new_err(format!("polarity must be 0 or 1, got {p}"))),
    };
    Ok(PyOperator {
        inner: qudit::add_control_with(&op.inner, pol).map_err(err)?,
    })
}

#[pyfunction]
fn add_multi_control(ops: Vec<PyOperator>, k: usize) -> PyResult<PyOperator> {
    let ops: Vec<Operator> = ops.into_iter().map(|o| o.inner).collect();
    Ok(PyOperator {
        inner: qudit::add_multi_control(&ops, k).map_err(err)?,
    })
}

#[pyfunction]
fn restrict_to_qubit_levels(op: &PyOperator) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: qudit::restrict_to_qubit_levels(&op.inner).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (state, n_controls=0, carrier_dim=4))]
fn embed(state: &PyState, n_controls: usize, carrier_dim: usize) -> PyResult<PyState> {
    Ok(PyState {
        inner: qudit::embed_register(&state.inner, n_controls, carrier_dim).map_err(err)?,
    })
}

#[pyfunction]
fn extract(state: &PyState) -> PyResult<PyState> {
    Ok(PyState {
        inner: qudit::extract(&state.inner).map_err(err)?,
    })
}

/// Per detection pattern: `{"pattern", "accepting", "probability", "state"}`.
#[pyfunction]
fn run_entanglement_scheme<'py>(
    py: Python<'py>,
    n_targets: usize,
    op: &PyOperator,
    state: &PyState,
) -> PyResult<Bound<'py, PyList>> {
    let out = photonic::run_entanglement_scheme(n_targets, &op.inner, &state.inner).map_err(err)?;
    let l = PyList::empty(py);
    for (p, o) in out {
        let d = PyDict::new(py);
        d.set_item("pattern", p.to_string())?;
        d.set_item("accepting", o.accepting)?;
        d.set_item("probability", o.probability)?;
        d.set_item("state", o.state.map(|s| PyState { inner: s }))?;
        l.append(d)?;
    }
    Ok(l)
}

/// `{"sum": (probability, state), "difference": (probability, state)}`.
#[pyfunction]
fn run_linear_combination<'py>(
    py: Python<'py>,
    a: &PyOperator,
    b: &PyOperator,
    state: &PyState,
) -> PyResult<Bound<'py, PyDict>> {
    let out = photonic::run_linear_combination(&a.inner, &b.inner, &state.inner).map_err(err)?;
    let d = PyDict::new(py);
    for (class, o) in out {
        let key = match class {
            PatternClass::Sum => "sum",
            PatternClass::Difference => "difference",
        };
        d.set_item(key, (o.probability, o.state.map(|s| PyState { inner: s })))?;
    }
    Ok(d)
}

/// Truth tables and fidelities of a named experiment as a dict.
#[pyfunction]
#[pyo3(signature = (name, seed=None, noise=None))]
fn experiment<'py>(py: Python<'py>, name: &str, seed: Option<u64>, noise: Option<PyNoise>) -> PyResult<Bound<'py, PyAny>> {
    let exp: Experiment = name.parse().map_err(err)?;
    let res = run_experiment(exp, &mode(seed, noise)).map_err(err)?;
    serialize(py, &res)
}

/// `[(theta, rate_pp, rate_pm), …]` over `points` angles in `[0, 2π]`.
#[pyfunction]
#[pyo3(signature = (points=100, seed=None, noise=None))]
fn fringe(points: usize, seed: Option<u64>, noise: Option<PyNoise>) -> PyResult<Vec<(f64, f64, f64)>> {
    let pts = fringe_scan(&theta_grid(points), &mode(seed, noise)).map_err(err)?;
    Ok(pts.into_iter().map(|p| (p.theta, p.rate_pp, p.rate_pm)).collect())
}

fn chi_rows(chi: &ChiMatrix) -> Vec<Vec<Complex64>> {
    let m = chi.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[pyfunction]
fn ideal_chi(op: &PyOperator) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(chi_rows(&tomography::ideal_chi(&op.inner).map_err(err)?))
}

/// Simulated process tomography of a controlled gate (`cnot`, `ch`, `cz`,
/// `cz-pi2`, `cz-pi4`). Without a seed the dataset holds expected counts.
#[pyfunction]
#[pyo3(signature = (gate, shots=2000.0, seed=None, noise=None, resamples=0))]
fn tomography_run<'py>(
    py: Python<'py>,
    gate: &str,
    shots: f64,
    seed: Option<u64>,
    noise: Option<PyNoise>,
    resamples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let exp: Experiment = gate.parse().map_err(err)?;
    if exp.target_gate().is_none() {
        return Err(QControlError::new_err(format!("`{gate}` is not a controlled gate")));
    }
    let settings = exp.settings();
    let ideal = tomography::ideal_chi(&settings.sum_operator()).map_err(err)?;
    let data = match mode(seed, noise) {
        Mode::Exact => tomography::expected_dataset(&settings, None, shots),
        Mode::Sampled { noise, seed } => tomography::generate_dataset(
            &settings,
            &NoiseModel {
                poisson_counts: shots,
                ..noise
            },
            shots,
            seed,
        ),
    }
    .map_err(err)?;
    let fit = tomography::mle_reconstruct(&data, &MleOptions::default()).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("process_fidelity", tomography::process_fidelity(&fit.chi, &ideal).map_err(err)?)?;
    d.set_item("iterations", fit.iterations)?;
    d.set_item("chi", chi_rows(&fit.chi))?;
    if let (Some(s), true) = (seed, resamples > 0) {
        let eb = tomography::error_bars(&data, &ideal, resamples, s).map_err(err)?;
        d.set_item("resampled_mean", eb.mean)?;
        d.set_item("resampled_std", eb.std)?;
    }
    Ok(d)
}

/// Extra-CNOT comparison rows; `model` is `"shor"` or `"explicit"` (needs `p`, `q`).
#[pyfunction]
#[pyo3(signature = (ns, model="shor", p=None, q=None, p_fraction=None))]
fn compare_report<'py>(
    py: Python<'py>,
    ns: Vec<u64>,
    model: &str,
    p: Option<u64>,
    q: Option<u64>,
    p_fraction: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let m = match (model, p, q) {
        ("explicit", Some(p), Some(q)) => PqModel::Explicit { p, q },
        ("explicit", _, _) => return Err(PyValueError::new_err("explicit model needs p and q")),
        ("shor", _, _) => PqModel::Shor { p_fraction },
        (other, _, _) => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    serialize(py, &compare(&ns, &m).map_err(err)?)
}

#[pymodule(name = "qcontrol")]
fn qcontrol_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QControlError", m.py().get_type::<QControlError>())?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyNoise>()?;
    m.add_function(wrap_pyfunction!(xa_gate, m)?)?;
    m.add_function(wrap_pyfunction!(add_control, m)?)?;
    m.add_function(wrap_pyfunction!(add_multi_control, m)?)?;
    m.add_function(wrap_pyfunction!(restrict_to_qubit_levels, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(run_entanglement_scheme, m)?)?;
    m.add_function(wrap_pyfunction!(run_linear_combination, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fringe, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_chi, m)?)?;
    m.add_function(wrap_pyfunction!(tomography_run, m)?)?;
    m.add_function(wrap_pyfunction!(compare_report, m)?)?;
    Ok(())
}
