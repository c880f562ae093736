//! CSV sample grids.

use std::io::Write;
use std::str::FromStr;

use thiserror::Error;

use super::config::AnalysisConfig;
use super::report::{probe_spectrum, product_depth, q_samples, Num};
use crate::fourier::{q_partial, ProductEvaluator, TruncationPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    /// Columns `xi, re, im, abs` of the truncated transform.
    MuHat,
    /// Columns `xi, q` of the Q probe.
    QSum,
}

impl FromStr for ExportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mu_hat" => Ok(Self::MuHat),
            "qsum" => Ok(Self::QSum),
            other => Err(format!("unknown export {other:?}; expected mu_hat or qsum")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{0}")]
    Analysis(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn cell(x: f64) -> String {
    Num(x).rounded().to_string()
}

/// Writes a sample grid as CSV. The transform grid spans `range`, by
/// default `[-W, W]`; the Q grid uses the report's samples.
pub fn export_samples<W: Write>(
    config: &AnalysisConfig,
    what: ExportKind,
    range: Option<(f64, f64)>,
    out: W,
) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    let n = &config.numeric;
    match what {
        ExportKind::MuHat => {
            let (lo, hi) = range.unwrap_or((-n.window, n.window));
            let ev =
                ProductEvaluator::new(&config.sequence, n.depth).map_err(|e| ExportError::Analysis(e.to_string()))?;
            w.write_record(["xi", "re", "im", "abs"])?;
            for xi in linspace(lo, hi, n.samples) {
                let v = ev.eval(xi);
                w.write_record([cell(xi), cell(v.re), cell(v.im), cell(v.norm())])?;
            }
        }
        ExportKind::QSum => {
            let (lambda, facts) = probe_spectrum(config).map_err(ExportError::Analysis)?;
            let plan = TruncationPlan::new(product_depth(config, facts.depth), n.window)
                .map_err(|e| ExportError::Analysis(e.to_string()))?;
            let xs = q_samples(config);
            let q = q_partial(&config.sequence, &plan, lambda.elements(), &xs)
                .map_err(|e| ExportError::Analysis(e.to_string()))?;
            w.write_record(["xi", "q"])?;
            for (xi, v) in xs.iter().zip(&q.q_values) {
                w.write_record([cell(*xi), cell(*v)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// [`export_samples`] into a string.
pub fn export_to_string(
    config: &AnalysisConfig,
    what: ExportKind,
    range: Option<(f64, f64)>,
) -> Result<String, ExportError> {
    let mut buf = Vec::new();
    export_samples(config, what, range, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}
