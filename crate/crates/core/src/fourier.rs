//! Floating-point evaluation of masks and truncated Fourier products.
//!
//! `mu_hat_K(xi) = prod_{k <= K} M_{B_k}(xi / (N_1 ... N_k))`. Shifts by
//! rational frequencies are split into an exact phase `frac(b lambda / P_k)`
//! and a float part `b xi / P_k`, so large frequencies do not lose precision.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::moran::{MoranError, MoranSequence, RbcStatus, Stage, Tail};
use crate::residue::{mask_is_zero_at, DigitSet};

/// Explicit stages summed by [`tail_bound`] before switching to a majorant.
pub const EXPLICIT_TAIL_TERMS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum FourierError {
    #[error(transparent)]
    Moran(#[from] MoranError),
    #[error("tail bound unsupported: {0}")]
    Unsupported(String),
    #[error("invalid truncation plan: {0}")]
    InvalidPlan(String),
}

/// Product depth, working window `|xi| <= window` and the truncation error
/// guaranteed on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPlan {
    pub depth: usize,
    pub tail_epsilon: f64,
    pub window: f64,
}

impl TruncationPlan {
    /// A plan with no error guarantee (`tail_epsilon = inf`).
    pub fn new(depth: usize, window: f64) -> Result<Self, FourierError> {
        if depth == 0 {
            return Err(FourierError::InvalidPlan("depth must be positive".into()));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(FourierError::InvalidPlan(format!("window {window} must be positive")));
        }
        Ok(Self {
            depth,
            tail_epsilon: f64::INFINITY,
            window,
        })
    }

    /// A plan whose `tail_epsilon` comes from [`tail_bound`].
    pub fn bounded(seq: &MoranSequence, depth: usize, window: f64) -> Result<Self, FourierError> {
        let mut plan = Self::new(depth, window)?;
        plan.tail_epsilon = tail_bound(seq, depth, window)?;
        Ok(plan)
    }
}

/// `(1 / #B) sum_b exp(-2 pi i b xi)`.
pub fn mask_eval(b: &DigitSet, xi: f64) -> Complex64 {
    let s: Complex64 = b
        .elements()
        .iter()
        .map(|d| {
            let t = d.to_f64().expect("finite digit") * xi;
            Complex64::cis(-2.0 * PI * (t - t.floor()))
        })
        .sum();
    s / b.len() as f64
}

fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

fn ratio_f64(num: &BigInt, den: &BigUint) -> f64 {
    BigRational::new(num.clone(), BigInt::from(den.clone()))
        .to_f64()
        .unwrap_or(0.0)
}

/// A maximal run `start, start + 1, ..., start + len - 1` of digits.
#[derive(Debug, Clone)]
struct Run {
    start: BigInt,
    len: usize,
    /// `start / P_k`.
    weight: f64,
}

fn runs(digits: &[BigInt], p: &BigUint) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for b in digits {
        if let Some(r) = out.last_mut() {
            if *b == &r.start + r.len {
                r.len += 1;
                continue;
            }
        }
        out.push(Run {
            start: b.clone(),
            len: 1,
            weight: ratio_f64(b, p),
        });
    }
    out
}

/// Precomputed stages `1..=K` with cumulative scales.
///
/// Each mask is summed run by run: within a run the terms are powers of
/// `z = exp(-2 pi i x / P_k)`, so only run starts need a fresh exponential.
#[derive(Debug, Clone)]
pub struct ProductEvaluator {
    stages: Vec<Stage>,
    products: Vec<BigUint>,
    runs: Vec<Vec<Run>>,
    /// `1 / P_k`.
    units: Vec<f64>,
}

/// Exact phases of one rational shift `lambda`: per stage `frac(lambda / P_k)`
/// and `frac(start lambda / P_k)` for every run start.
#[derive(Debug, Clone)]
pub struct ShiftPhases(Vec<(f64, Vec<f64>)>);

impl ProductEvaluator {
    pub fn new(seq: &MoranSequence, depth: usize) -> Result<Self, MoranError> {
        let stages = seq.stages(depth)?;
        let mut products = Vec::with_capacity(stages.len());
        let mut p = BigUint::one();
        for s in &stages {
            p *= s.scale;
            products.push(p.clone());
        }
        let runs = stages
            .iter()
            .zip(&products)
            .map(|(s, p)| runs(s.digits.elements(), p))
            .collect();
        let units = products.iter().map(|p| ratio_f64(&BigInt::one(), p)).collect();
        Ok(Self {
            stages,
            products,
            runs,
            units,
        })
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// `N_1 ... N_k` for `k = 1..=K`.
    pub fn products(&self) -> &[BigUint] {
        &self.products
    }

    pub fn phases(&self, lambda: &BigRational) -> ShiftPhases {
        ShiftPhases((0..self.runs.len()).map(|k| self.stage_phase(k, lambda)).collect())
    }

    fn stage_phase(&self, k: usize, lambda: &BigRational) -> (f64, Vec<f64>) {
        let scaled = lambda / BigRational::from(BigInt::from(self.products[k].clone()));
        let unit = frac(&scaled).to_f64().unwrap_or(0.0);
        let starts = self.runs[k]
            .iter()
            .map(|r| frac(&(&scaled * &r.start)).to_f64().unwrap_or(0.0))
            .collect();
        (unit, starts)
    }

    /// The `k`-th mask (zero-based) at `lambda / P_k`, from exact phases.
    pub fn stage_value(&self, k: usize, lambda: &BigRational) -> Complex64 {
        self.stage_sum(k, Some(&self.stage_phase(k, lambda)), 0.0)
    }

    /// `mu_hat_K(xi)`.
    pub fn eval(&self, xi: f64) -> Complex64 {
        self.eval_inner(None, xi)
    }

    /// `mu_hat_K(lambda + xi)` with `lambda` given by its phases.
    pub fn eval_shifted(&self, phases: &ShiftPhases, xi: f64) -> Complex64 {
        self.eval_inner(Some(phases), xi)
    }

    fn stage_sum(&self, k: usize, ph: Option<&(f64, Vec<f64>)>, xi: f64) -> Complex64 {
        let angle = |w: f64, exact: f64| {
            let t = w * xi;
            Complex64::cis(-2.0 * PI * (t - t.floor() + exact))
        };
        let z = angle(self.units[k], ph.map_or(0.0, |p| p.0));
        let mut s = Complex64::zero();
        let mut count = 0;
        for (i, r) in self.runs[k].iter().enumerate() {
            let mut term = angle(r.weight, ph.map_or(0.0, |p| p.1[i]));
            for _ in 0..r.len {
                s += term;
                term *= z;
            }
            count += r.len;
        }
        s / count as f64
    }

    fn eval_inner(&self, phases: Option<&ShiftPhases>, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 0..self.runs.len() {
            acc *= self.stage_sum(k, phases.map(|p| &p.0[k]), xi);
            if acc.norm_sqr() == 0.0 {
                break;
            }
        }
        acc
    }
}

/// `mu_hat_K(xi)` for `K = plan.depth`.
pub fn mu_hat_truncated(seq: &MoranSequence, plan: &TruncationPlan, xi: f64) -> Result<Complex64, MoranError> {
    Ok(ProductEvaluator::new(seq, plan.depth)?.eval(xi))
}

/// Sum of `1 / M(k)` over `k > j0` for a digit-count formula of degree
/// `d >= 2`: for `k >= j0`, `M(k) >= (lc - C / j0) k^d` where `C` sums the
/// absolute lower coefficients, and `sum_{k > j0} k^-d <= 1 / ((d - 1) j0^(d - 1))`.
fn reciprocal_size_tail(tail: &Tail, j0: u64) -> Option<f64> {
    let m = tail.size_formula()?.poly()?;
    let d = m.degree()?;
    if d < 2 || j0 == 0 {
        return None;
    }
    let c: f64 = m.coeffs()[..d]
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs())
        .sum();
    let lead = m.leading()?.to_f64()? - c / j0 as f64;
    (lead > 0.0).then(|| 1.0 / (lead * (d - 1) as f64 * (j0 as f64).powi(d as i32 - 1)))
}

/// Upper bound on `sup_{|xi| <= W} |nu_hat_{>K}(xi / P_K) - 1|`, which also
/// bounds `|mu_hat - mu_hat_K|` on the window.
///
/// The inside digits contribute `2 pi (W / P_K) sum_j max(B_j,1) / (N_{K+1} ... N_j)`,
/// the outside digits `2 sum_j #B_j,2 / #B_j`. Both are summed exactly over
/// a block of stages and closed by majorants.
pub fn tail_bound(seq: &MoranSequence, depth: usize, window: f64) -> Result<f64, FourierError> {
    let (status, why) = crate::moran::rbc_status(seq);
    if status != RbcStatus::Holds {
        return Err(FourierError::Unsupported(format!("remainder bound {status}: {why}")));
    }
    if let Some(len) = seq.finite_len() {
        if depth >= len {
            return Ok(0.0);
        }
    }
    let mut explicit = EXPLICIT_TAIL_TERMS.max(seq.prefix().len().saturating_sub(depth) + EXPLICIT_TAIL_TERMS);
    let family_needs_tail = match seq.tail() {
        Tail::ShiftedTop { .. } => {
            let last = seq.stages(depth + explicit)?.into_iter().last();
            last.is_some_and(|s| s.digits.outside_count(s.scale) > 0) || !crate::moran::family_inside_certified(seq)
        }
        _ => false,
    };
    let mut size_tail = 0.0;
    if family_needs_tail {
        loop {
            let j0 = seq.family_index((depth + explicit) as u64);
            if let Some(t) = reciprocal_size_tail(seq.tail(), j0) {
                size_tail = t;
                break;
            }
            explicit *= 2;
            if explicit > 1 << 20 {
                return Err(FourierError::Unsupported("digit-count tail does not settle".into()));
            }
        }
    }
    let all = seq.stages(depth + explicit)?;
    let p_k: BigUint = all[..depth].iter().map(|s| BigUint::from(s.scale)).product();
    let later = &all[depth..];
    let mut inside = 0.0;
    let mut outside = 0.0;
    let mut running = BigUint::one();
    for s in later {
        running *= s.scale;
        let (ins, outs) = s.digits.split_at_scale(s.scale);
        if let Some(top) = ins.iter().max() {
            inside += ratio_f64(top, &running);
        }
        outside += outs.len() as f64 / s.size() as f64;
    }
    // Remaining inside terms: max(B_j,1) < N_j and N >= 2.
    if seq.finite_len().is_none_or(|len| len > depth + later.len()) {
        inside += 2.0 / running.to_f64().unwrap_or(f64::INFINITY);
    }
    outside += size_tail;
    let scale = window / p_k.to_f64().unwrap_or(f64::INFINITY);
    Ok(2.0 * PI * scale * inside + 2.0 * outside)
}

/// Result of [`orthogonality_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub pairs: usize,
    pub certified_pairs: usize,
    /// Largest `|mu_hat_K(l1 - l2)|` over pairs without an exact certificate.
    pub max_abs: f64,
    pub violating_pair: Option<(BigRational, BigRational)>,
}

impl OrthogonalityReport {
    pub fn all_certified(&self) -> bool {
        self.certified_pairs == self.pairs
    }
}

/// Masks this far from zero in floating point are not exact zeros.
const ZERO_SCREEN: f64 = 1e-6;

/// Whether `mu_hat(d) = 0` is certified: `d / P_k` is a zero of the `k`-th
/// mask for some `k <= K`.
pub fn certified_zero(evaluator: &ProductEvaluator, d: &BigRational) -> bool {
    evaluator
        .stages()
        .iter()
        .zip(evaluator.products())
        .enumerate()
        .any(|(k, (s, p))| {
            evaluator.stage_value(k, d).norm() < ZERO_SCREEN
                && mask_is_zero_at(&s.digits, &(d / BigRational::from(BigInt::from(p.clone()))))
        })
}

pub fn orthogonality_check(
    seq: &MoranSequence,
    plan: &TruncationPlan,
    lambda: &[BigRational],
) -> Result<OrthogonalityReport, MoranError> {
    let ev = ProductEvaluator::new(seq, plan.depth)?;
    let mut report = OrthogonalityReport {
        pairs: 0,
        certified_pairs: 0,
        max_abs: 0.0,
        violating_pair: None,
    };
    for (i, a) in lambda.iter().enumerate() {
        for b in &lambda[i + 1..] {
            report.pairs += 1;
            let d = a - b;
            if certified_zero(&ev, &d) {
                report.certified_pairs += 1;
                continue;
            }
            let v = ev.eval_shifted(&ev.phases(&d), 0.0).norm();
            if report.violating_pair.is_none() || v > report.max_abs {
                report.max_abs = v;
                report.violating_pair = Some((a.clone(), b.clone()));
            }
        }
    }
    Ok(report)
}

/// `count` points `lo + (hi - lo) frac(j phi)`, `j = 0, 1, ...`.
pub fn golden_samples(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    (0..count)
        .map(|j| {
            let t = j as f64 * phi;
            lo + (hi - lo) * (t - t.floor())
        })
        .collect()
}

/// Samples of `Q(xi) = sum_{lambda} |mu_hat_K(xi + lambda)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QReport {
    pub xi_samples: Vec<f64>,
    pub q_values: Vec<f64>,
    pub lambda_size: usize,
    pub max_deviation_from_one: f64,
}

impl QReport {
    pub fn mean(&self) -> f64 {
        if self.q_values.is_empty() {
            return 0.0;
        }
        self.q_values.iter().sum::<f64>() / self.q_values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.q_values.iter().copied().fold(0.0, f64::max)
    }
}

/// `sum_{lambda} |mu_hat_K(xi + lambda)|^2` for one evaluator.
pub fn q_value(ev: &ProductEvaluator, phases: &[ShiftPhases], xi: f64) -> f64 {
    phases.iter().map(|ph| ev.eval_shifted(ph, xi).norm_sqr()).sum()
}

pub fn q_partial(
    seq: &MoranSequence,
    plan: &TruncationPlan,
    lambda: &[BigRational],
    xi_samples: &[f64],
) -> Result<QReport, MoranError> {
    let ev = ProductEvaluator::new(seq, plan.depth)?;
    let phases: Vec<ShiftPhases> = lambda.iter().map(|l| ev.phases(l)).collect();
    let q_values: Vec<f64> = xi_samples.iter().map(|&xi| q_value(&ev, &phases, xi)).collect();
    let max_deviation_from_one = q_values.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
    Ok(QReport {
        xi_samples: xi_samples.to_vec(),
        q_values,
        lambda_size: lambda.len(),
        max_deviation_from_one,
    })
}
