//! Python bindings.
//!
//! The module is importable as `cantor_moran`. Sequences are built from
//! `(scale, digits)` pairs or from a TOML configuration; exact rationals
//! cross the boundary as `fractions.Fraction`.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cantor_moran::analysis::{parse_config, probe_spectrum, render_text, run_analysis};
use cantor_moran::fourier::{orthogonality_check, q_partial, tail_bound, ProductEvaluator, TruncationPlan};
use cantor_moran::moran::{decide_spectrality, MoranSequence, Stage};
use cantor_moran::residue::{is_complete_residue_system, mask_is_zero_at, satisfies_udz, DigitSet};
use cantor_moran::spectrum::{canonical_spectrum, sequence_triples};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn stages_from(pairs: Vec<(u64, Vec<BigInt>)>) -> PyResult<Vec<Stage>> {
    pairs
        .into_iter()
        .map(|(n, b)| Stage::new(n, b).map_err(value_error))
        .collect()
}

/// A finite set of integer digits.
#[pyclass(name = "DigitSet", frozen)]
struct PyDigitSet(DigitSet);

#[pymethods]
impl PyDigitSet {
    /// Digits are reduced modulo `modulus` for residue questions; by default
    /// the modulus is the number of digits.
    #[new]
    #[pyo3(signature = (digits, modulus=None))]
    fn new(digits: Vec<BigInt>, modulus: Option<u64>) -> PyResult<Self> {
        let m = modulus.unwrap_or(digits.len() as u64);
        DigitSet::new(digits, m).map(Self).map_err(value_error)
    }

    fn digits(&self) -> Vec<BigInt> {
        self.0.elements().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn is_complete_residue_system(&self) -> bool {
        is_complete_residue_system(&self.0)
    }

    /// `(holds, witness)`; the witness is a zero of the mask that is not
    /// shared by the whole family, when one exists.
    fn uniform_zeros(&self) -> PyResult<(bool, Option<String>)> {
        let r = satisfies_udz(&self.0).map_err(value_error)?;
        Ok((r.holds, r.witness.map(|w| w.to_string())))
    }

    /// Whether the mask vanishes exactly at `x`.
    fn mask_vanishes_at(&self, x: BigRational) -> bool {
        mask_is_zero_at(&self.0, &x)
    }

    fn __repr__(&self) -> String {
        format!(
            "DigitSet({:?})",
            self.0.elements().iter().map(ToString::to_string).collect::<Vec<_>>()
        )
    }
}

/// An infinite (or finite) convolution of digit stages.
#[pyclass(name = "Sequence", frozen)]
struct PySequence(MoranSequence);

#[pymethods]
impl PySequence {
    /// Repeats `period` forever after `prefix`.
    #[staticmethod]
    #[pyo3(signature = (period, prefix=Vec::new()))]
    fn periodic(period: Vec<(u64, Vec<BigInt>)>, prefix: Vec<(u64, Vec<BigInt>)>) -> PyResult<Self> {
        let seq = MoranSequence::periodic(stages_from(period)?).map_err(value_error)?;
        if prefix.is_empty() {
            return Ok(Self(seq));
        }
        MoranSequence::new(stages_from(prefix)?, seq.tail().clone())
            .map(Self)
            .map_err(value_error)
    }

    /// The sequence described by a TOML configuration.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        parse_config(text).map(|c| Self(c.sequence)).map_err(value_error)
    }

    /// `(scale, digits)` for the first `count` stages.
    fn stages(&self, count: usize) -> PyResult<Vec<(u64, Vec<BigInt>)>> {
        let st = self.0.stages(count).map_err(value_error)?;
        Ok(st
            .into_iter()
            .map(|s| (s.scale, s.digits.elements().to_vec()))
            .collect())
    }

    /// `(outcome, rule, notes)` with `rule` None when no rule decides.
    fn verdict(&self) -> (String, Option<String>, Vec<String>) {
        let v = decide_spectrality(&self.0);
        (v.outcome.to_string(), v.rule.map(|r| r.tag().to_string()), v.notes)
    }

    /// The Fourier transform truncated after `depth` stages.
    #[pyo3(signature = (xi, depth=12))]
    fn mu_hat(&self, xi: f64, depth: usize) -> PyResult<num_complex::Complex64> {
        let ev = ProductEvaluator::new(&self.0, depth).map_err(value_error)?;
        Ok(ev.eval(xi))
    }

    /// Bound on the truncation error over `|xi| <= window`.
    fn tail_bound(&self, depth: usize, window: f64) -> PyResult<f64> {
        tail_bound(&self.0, depth, window).map_err(value_error)
    }

    /// Canonical candidate spectrum from the first `depth` stages, sorted.
    fn spectrum(&self, depth: usize) -> PyResult<Vec<BigRational>> {
        let (triples, _) = sequence_triples(&self.0, depth, false).map_err(value_error)?;
        let lambda = canonical_spectrum(&triples, depth).map_err(value_error)?;
        Ok(lambda.elements().to_vec())
    }

    /// `sum_lambda |mu_hat(xi + lambda)|^2` at each sample point.
    #[pyo3(signature = (spectrum, xs, depth=12))]
    fn q_values(&self, spectrum: Vec<BigRational>, xs: Vec<f64>, depth: usize) -> PyResult<Vec<f64>> {
        let plan = TruncationPlan::new(depth, 1.0).map_err(value_error)?;
        Ok(q_partial(&self.0, &plan, &spectrum, &xs).map_err(value_error)?.q_values)
    }

    /// Whether every pair of `spectrum` is an exact zero of the transform.
    #[pyo3(signature = (spectrum, depth=12))]
    fn mutually_orthogonal(&self, spectrum: Vec<BigRational>, depth: usize) -> PyResult<bool> {
        let plan = TruncationPlan::new(depth, 1.0).map_err(value_error)?;
        Ok(orthogonality_check(&self.0, &plan, &spectrum)
            .map_err(value_error)?
            .all_certified())
    }

    fn __repr__(&self) -> String {
        format!("Sequence({})", self.0)
    }
}

/// Full report for a TOML configuration, as JSON text or a text summary.
#[pyfunction]
#[pyo3(signature = (config, text=false))]
fn analyze(config: &str, text: bool) -> PyResult<String> {
    let config = parse_config(config).map_err(value_error)?;
    let report = run_analysis(&config);
    Ok(if text { render_text(&report) } else { report.to_json() })
}

/// The spectrum the report probes for a configuration.
#[pyfunction]
fn probe(config: &str) -> PyResult<Vec<BigRational>> {
    let config = parse_config(config).map_err(value_error)?;
    let (lambda, _) = probe_spectrum(&config).map_err(PyValueError::new_err)?;
    Ok(lambda.elements().to_vec())
}

#[pymodule]
#[pyo3(name = "cantor_moran")]
fn cantor_moran_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDigitSet>()?;
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
