//! Python bindings: channels, the polarizing transform, Z-processes,
//! BEC polar codes and the scaling experiments.

use polarrate::bdmc;
use polarrate::polarcode;
use polarrate::scaling::{self, BootstrapConfig, Mode, ScalingConfig};
use polarrate::zprocess;
use polarrate::{ErasureSymbol, RuleKind};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(polarrate, ResourceCapError, PyException);

/// `(n, beta, probability, bound, stderr)`.
type CurveRow = (u32, f64, f64, f64, f64);

fn py_err(e: polarrate::Error) -> PyErr {
    if e.is_resource_cap() {
        ResourceCapError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rule(name: &str) -> PyResult<RuleKind> {
    name.parse().map_err(py_err)
}

/// Binary-input channel given by its likelihood pairs `(W(y|0), W(y|1))`.
#[pyclass(name = "Channel", module = "polarrate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannel(bdmc::Channel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(outputs: Vec<(f64, f64)>) -> PyResult<Self> {
        bdmc::Channel::new(outputs).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn bec(eps: f64) -> PyResult<Self> {
        bdmc::Channel::bec(eps).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn bsc(p: f64) -> PyResult<Self> {
        bdmc::Channel::bsc(p).map(Self).map_err(py_err)
    }

    /// `bec:<eps>`, `bsc:<p>` or `@file.json`.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        let spec: bdmc::ChannelSpec = spec.parse().map_err(py_err)?;
        spec.channel().map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        bdmc::Channel::from_json(text).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn outputs(&self) -> Vec<(f64, f64)> {
        self.0.outputs().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.num_outputs()
    }

    fn capacity(&self) -> f64 {
        self.0.params().capacity
    }

    fn bhattacharyya(&self) -> f64 {
        self.0.params().bhattacharyya
    }

    /// `(W⁻, W⁺)`; with `merge`, outputs with equal posteriors are combined.
    #[pyo3(signature = (merge = false, max_outputs = bdmc::DEFAULT_MAX_OUTPUTS))]
    fn transform(&self, merge: bool, max_outputs: usize) -> PyResult<(Self, Self)> {
        let pair = if merge {
            bdmc::polar_transform_merged(&self.0, bdmc::DEFAULT_MERGE_TOL, max_outputs)
        } else {
            bdmc::polar_transform_capped(&self.0, max_outputs)
        }
        .map_err(py_err)?;
        Ok((Self(pair.minus), Self(pair.plus)))
    }

    /// The `2ⁿ` merged synthesized channels in index order.
    #[pyo3(signature = (n, max_outputs = bdmc::DEFAULT_MAX_OUTPUTS))]
    fn synthesized(&self, n: u32, max_outputs: usize) -> PyResult<Vec<Self>> {
        bdmc::synthesized_channels(&self.0, n, bdmc::DEFAULT_MERGE_TOL, max_outputs)
            .map(|v| v.into_iter().map(Self).collect())
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let p = self.0.params();
        format!(
            "Channel(outputs={}, I={}, Z={})",
            self.0.num_outputs(),
            p.capacity,
            p.bhattacharyya
        )
    }
}

/// Polar code for the erasure channel.
#[pyclass(name = "CodeSpec", module = "polarrate", frozen)]
struct PyCodeSpec(polarcode::CodeSpec);

#[pymethods]
impl PyCodeSpec {
    /// `K = ⌊rate·2ⁿ⌋` information bits on the smallest-Z channels of BEC(eps).
    #[staticmethod]
    fn construct(eps: f64, n: u32, rate: f64) -> PyResult<Self> {
        polarcode::construct(eps, n, rate).map(Self).map_err(py_err)
    }

    /// Largest code whose union bound is at most `target`.
    #[staticmethod]
    fn for_union_bound(eps: f64, n: u32, target: f64) -> PyResult<Self> {
        polarcode::construct_for_union_bound(eps, n, target)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        polarcode::CodeSpec::from_json(text)
            .map(Self)
            .map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn block_length(&self) -> usize {
        self.0.block_length()
    }

    #[getter]
    fn eps(&self) -> Option<f64> {
        self.0.eps()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.0.rate()
    }

    #[getter]
    fn info_set(&self) -> Vec<usize> {
        self.0.info_set().to_vec()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn union_bound(&self) -> f64 {
        self.0.union_bound()
    }

    fn encode(&self, message: Vec<u8>) -> PyResult<Vec<u32>> {
        let word = polarcode::encode(&self.0, &message).map_err(py_err)?;
        Ok(word.into_iter().map(u32::from).collect())
    }

    /// Received symbols are 0, 1 or 2 (erased). Returns the message, or
    /// `None` when an information bit stays erased.
    fn decode(&self, received: Vec<u8>) -> PyResult<Option<Vec<u32>>> {
        let symbols = received
            .iter()
            .map(|&s| match s {
                0 => Ok(ErasureSymbol::Zero),
                1 => Ok(ErasureSymbol::One),
                2 => Ok(ErasureSymbol::Erased),
                other => Err(PyValueError::new_err(format!(
                    "symbol {other} is not 0, 1 or 2"
                ))),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let outcome = polarcode::sc_decode_bec(&self.0, &symbols).map_err(py_err)?;
        Ok(outcome.ok().map(|m| m.into_iter().map(u32::from).collect()))
    }

    /// Returns `(trials, failures, bler, ci_low, ci_high)`.
    #[pyo3(signature = (eps, trials, seed = 0))]
    fn simulate(
        &self,
        py: Python<'_>,
        eps: f64,
        trials: u64,
        seed: u64,
    ) -> PyResult<(u64, u64, f64, f64, f64)> {
        let r = py
            .detach(|| polarcode::simulate_bler(&self.0, eps, trials, seed))
            .map_err(py_err)?;
        Ok((r.trials, r.failures, r.bler, r.ci_low, r.ci_high))
    }

    fn __repr__(&self) -> String {
        format!(
            "CodeSpec(n={}, K={}, union_bound={})",
            self.0.n(),
            self.0.message_len(),
            self.0.union_bound()
        )
    }
}

/// Bhattacharyya values of the `2ⁿ` channels synthesized from BEC(eps).
#[pyfunction]
fn bec_z_spectrum(eps: f64, n: u32) -> PyResult<Vec<f64>> {
    polarcode::bec_z_spectrum(eps, n).map_err(py_err)
}

/// Exact law of `Zₙ` as `(value, probability)` atoms in increasing order.
#[pyfunction]
#[pyo3(signature = (z0, n, rule_name = "extremal", max_enum_n = zprocess::DEFAULT_MAX_ENUM_STEPS))]
fn exact_distribution(
    z0: f64,
    n: u32,
    rule_name: &str,
    max_enum_n: u32,
) -> PyResult<Vec<(f64, f64)>> {
    let d =
        zprocess::exact_distribution_capped(z0, n, rule(rule_name)?, max_enum_n).map_err(py_err)?;
    Ok(d.atoms().iter().map(|(s, p)| (s.value(), *p)).collect())
}

/// One sample path `Z₀, …, Zₙ`.
#[pyfunction]
#[pyo3(signature = (z0, n, rule_name = "extremal", seed = 0))]
fn sample_path(z0: f64, n: u32, rule_name: &str, seed: u64) -> PyResult<Vec<f64>> {
    let path = zprocess::sample_path(z0, n, rule(rule_name)?, seed).map_err(py_err)?;
    Ok(path.iter().map(|s| s.value()).collect())
}

/// `P(Z̲ₙ ≥ 2^{−2^{βn}})` for the lower process, exactly.
#[pyfunction]
fn converse_binomial(z0: f64, n: u32, beta: f64) -> PyResult<f64> {
    zprocess::converse_binomial(z0, n, beta).map_err(py_err)
}

/// Monte Carlo `E[Qₙ^{1/2}]` as `(mean, stderr)`.
#[pyfunction]
#[pyo3(signature = (z0, n, trials, seed = 0))]
fn q_halfmoment(py: Python<'_>, z0: f64, n: u32, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    let e = py
        .detach(|| zprocess::q_halfmoment(z0, n, trials, seed))
        .map_err(py_err)?;
    Ok((e.mean, e.stderr))
}

#[allow(clippy::too_many_arguments)]
fn curve(
    py: Python<'_>,
    converse: bool,
    z0: f64,
    betas: Vec<f64>,
    ns: Vec<u32>,
    monte_carlo: bool,
    trials: u64,
    seed: u64,
    rule_name: &str,
) -> PyResult<Vec<CurveRow>> {
    let mode = if monte_carlo {
        Mode::MonteCarlo
    } else {
        Mode::Exact
    };
    let cfg = ScalingConfig::new(z0, betas, ns, mode)
        .with_rule(rule(rule_name)?)
        .with_trials(trials, seed);
    let report = py
        .detach(|| {
            if converse {
                scaling::converse_curve(&cfg)
            } else {
                scaling::direct_curve(&cfg)
            }
        })
        .map_err(py_err)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.n, r.beta, r.probability, r.bound, r.stderr))
        .collect())
}

/// Rows `(n, beta, P(Zₙ ≤ 2^{−2^{βn}}), limit, stderr)`.
#[pyfunction]
#[pyo3(signature = (z0, betas, ns, monte_carlo = false, trials = 100_000, seed = 0, rule_name = "extremal"))]
#[allow(clippy::too_many_arguments)]
fn direct_curve(
    py: Python<'_>,
    z0: f64,
    betas: Vec<f64>,
    ns: Vec<u32>,
    monte_carlo: bool,
    trials: u64,
    seed: u64,
    rule_name: &str,
) -> PyResult<Vec<CurveRow>> {
    curve(
        py,
        false,
        z0,
        betas,
        ns,
        monte_carlo,
        trials,
        seed,
        rule_name,
    )
}

/// Rows `(n, beta, P(Zₙ ≥ 2^{−2^{βn}}), binomial bound, stderr)`.
#[pyfunction]
#[pyo3(signature = (z0, betas, ns, monte_carlo = false, trials = 100_000, seed = 0, rule_name = "extremal"))]
#[allow(clippy::too_many_arguments)]
fn converse_curve(
    py: Python<'_>,
    z0: f64,
    betas: Vec<f64>,
    ns: Vec<u32>,
    monte_carlo: bool,
    trials: u64,
    seed: u64,
    rule_name: &str,
) -> PyResult<Vec<CurveRow>> {
    curve(
        py,
        true,
        z0,
        betas,
        ns,
        monte_carlo,
        trials,
        seed,
        rule_name,
    )
}

/// Interval diagnostics; returns a dict of the main figures.
#[pyfunction]
#[pyo3(signature = (n, beta, trials, seed = 0))]
fn bootstrap<'py>(
    py: Python<'py>,
    n: u32,
    beta: f64,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = BootstrapConfig::new(n, beta).map_err(py_err)?;
    let r = py
        .detach(|| scaling::bootstrap_diagnostic(&cfg, trials, seed))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("m", cfg.m)?;
    d.set_item("a_n", cfg.a_n)?;
    d.set_item("k", cfg.k)?;
    d.set_item("seed", seed)?;
    d.set_item("interval_bound", cfg.interval_bound())?;
    d.set_item(
        "interval_frequencies",
        r.intervals.iter().map(|s| s.frequency).collect::<Vec<_>>(),
    )?;
    d.set_item("all_intervals_within_bound", r.all_intervals_within_bound())?;
    d.set_item("vacuous", r.vacuous)?;
    d.set_item("g_frequency", r.g_frequency)?;
    d.set_item("g_lower_bound", r.g_lower_bound)?;
    d.set_item("conditioned_paths", r.conditioned_paths)?;
    d.set_item("log_bound_violations", r.log_bound_violations)?;
    d.set_item("domination_violations", r.domination_violations)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "polarrate")]
fn polarrate_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_class::<PyCodeSpec>()?;
    m.add("ResourceCapError", m.py().get_type::<ResourceCapError>())?;
    m.add_function(wrap_pyfunction!(bec_z_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(exact_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample_path, m)?)?;
    m.add_function(wrap_pyfunction!(converse_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(q_halfmoment, m)?)?;
    m.add_function(wrap_pyfunction!(direct_curve, m)?)?;
    m.add_function(wrap_pyfunction!(converse_curve, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap, m)?)?;
    Ok(())
}
