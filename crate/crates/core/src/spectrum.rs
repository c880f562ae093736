//! Candidate spectra and their decomposition along the first stage.
//!
//! A canonical spectrum collects the finite expansions
//! `l_1 + N_1 l_2 + N_1 N_2 l_3 + ...` with `l_j` from frequency sets. The
//! decomposition splits a spectrum by residues modulo `N_1` and reads off
//! candidate spectra for the measure with the first stage removed.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fourier::{mask_eval, ProductEvaluator, TruncationPlan};
use crate::moran::{
    best_frequency_set, search_hadamard_l, HadamardSearch, HadamardTriple, MoranError, MoranSequence, Stage,
    SEARCH_SCALE_LIMIT,
};
use crate::residue::is_complete_residue_system;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("two digit vectors give the same frequency {0}")]
    CollisionDetected(Box<BigRational>),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("choice {choice} is not in the class of {class}")]
    ChoiceOutOfClass {
        choice: Box<BigRational>,
        class: Box<BigRational>,
    },
    #[error("decomposition is empty")]
    EmptyResult,
    #[error("duplicate frequency {0}")]
    Duplicate(Box<BigRational>),
    #[error("stage {k} has no frequency set: {reason}")]
    NotAdmissible { k: usize, reason: String },
    #[error(transparent)]
    Moran(#[from] MoranError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Canonical,
    Decomposed,
    User,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Canonical => "canonical",
            Generator::Decomposed => "decomposed",
            Generator::User => "user",
        })
    }
}

/// Finite sorted set of distinct rational frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTruncation {
    elements: Vec<BigRational>,
    pub depth: usize,
    pub generator: Generator,
}

impl SpectrumTruncation {
    pub fn new(mut elements: Vec<BigRational>, depth: usize, generator: Generator) -> Result<Self, SpectrumError> {
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpectrumError::Duplicate(Box::new(w[0].clone())));
        }
        Ok(Self {
            elements,
            depth,
            generator,
        })
    }

    pub fn from_integers(values: &[i64], depth: usize) -> Result<Self, SpectrumError> {
        Self::new(
            values.iter().map(|&v| BigRational::from(BigInt::from(v))).collect(),
            depth,
            Generator::User,
        )
    }

    pub fn elements(&self) -> &[BigRational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

fn int(v: u64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

/// `{ sum_j (N_1 ... N_{j-1}) l_j : l_j in L_j }` over the first `depth` triples.
pub fn canonical_spectrum(triples: &[HadamardTriple], depth: usize) -> Result<SpectrumTruncation, SpectrumError> {
    if depth == 0 || depth > triples.len() {
        return Err(SpectrumError::InvalidParams(format!(
            "depth {depth} needs between 1 and {} triples",
            triples.len()
        )));
    }
    let mut values = vec![BigInt::zero()];
    let mut scale = BigInt::one();
    for t in &triples[..depth] {
        let step = &scale;
        values = values
            .iter()
            .flat_map(|v| t.frequencies.iter().map(move |&l| v + step * l))
            .collect();
        scale *= t.scale;
    }
    let mut seen = BTreeSet::new();
    for v in &values {
        if !seen.insert(v.clone()) {
            return Err(SpectrumError::CollisionDetected(Box::new(BigRational::from(v.clone()))));
        }
    }
    SpectrumTruncation::new(
        values.into_iter().map(BigRational::from).collect(),
        depth,
        Generator::Canonical,
    )
}

/// Frequency set of one stage: `(N / M) {0, ..., M - 1}` for a residue
/// system with `M | N`, otherwise the searched one.
pub fn stage_frequencies(s: &Stage) -> Result<Vec<u64>, String> {
    let m = s.size();
    if is_complete_residue_system(&s.digits) && s.scale.is_multiple_of(m) {
        let q = s.scale / m;
        return Ok((0..m).map(|i| i * q).collect());
    }
    if s.scale > SEARCH_SCALE_LIMIT {
        return Err(format!("scale {} is beyond the search limit", s.scale));
    }
    match search_hadamard_l(s.scale, &s.digits) {
        HadamardSearch::Found(l) => Ok(l),
        HadamardSearch::NotAdmissible => Err("no frequency set exists".into()),
        HadamardSearch::BudgetExceeded => Err("search budget exceeded".into()),
    }
}

/// Triples for the first `depth` stages. With `best_effort`, stages without
/// a frequency set use their largest mutually orthogonal set instead, and
/// the flag in the result is false.
pub fn sequence_triples(
    seq: &MoranSequence,
    depth: usize,
    best_effort: bool,
) -> Result<(Vec<HadamardTriple>, bool), SpectrumError> {
    let mut exact = true;
    let mut out = Vec::with_capacity(depth);
    for (i, s) in seq.stages(depth)?.into_iter().enumerate() {
        let frequencies = match stage_frequencies(&s) {
            Ok(l) => l,
            Err(_) if best_effort && s.scale <= SEARCH_SCALE_LIMIT => {
                exact = false;
                best_frequency_set(s.scale, &s.digits)
            }
            Err(reason) => return Err(SpectrumError::NotAdmissible { k: i + 1, reason }),
        };
        out.push(HadamardTriple {
            scale: s.scale,
            digits: s.digits,
            frequencies,
        });
    }
    Ok((out, exact))
}

/// `{0, N_1 / M_1, ..., (M_1 - 1) N_1 / M_1}`.
pub fn gamma0(n1: u64, m1: u64) -> Result<Vec<BigRational>, SpectrumError> {
    if m1 < 2 || n1 < m1 {
        return Err(SpectrumError::InvalidParams(format!(
            "need 2 <= M_1 <= N_1, got M_1 = {m1}, N_1 = {n1}"
        )));
    }
    Ok((0..m1)
        .map(|t| BigRational::new(BigInt::from(t * n1), BigInt::from(m1)))
        .collect())
}

/// `{ w in Z : gamma + N_1 w in Lambda }`.
pub fn project_p(lambda: &SpectrumTruncation, gamma: &BigRational, n1: u64) -> BTreeSet<BigInt> {
    let n = int(n1);
    lambda
        .elements()
        .iter()
        .filter_map(|l| {
            let w = (l - gamma) / &n;
            w.is_integer().then(|| w.to_integer())
        })
        .collect()
}

fn rem_rational(x: &BigRational, m: &BigRational) -> BigRational {
    x - m * (x / m).floor()
}

/// Orders by `(denominator, numerator)`.
fn by_den_num(a: &BigRational, b: &BigRational) -> std::cmp::Ordering {
    (a.denom(), a.numer()).cmp(&(b.denom(), b.numer()))
}

/// Distinct residues `lambda mod m` in `[0, m)`, ordered by denominator,
/// then numerator.
fn residues(lambda: &SpectrumTruncation, m: &BigRational) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = lambda
        .elements()
        .iter()
        .map(|l| rem_rational(l, m))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    r.sort_by(by_den_num);
    r
}

/// Representatives in `[0, N_1 / M_1)` of the classes `gamma + Gamma_0`
/// met by the truncation.
pub fn inhabited_classes(lambda: &SpectrumTruncation, n1: u64, m1: u64) -> Vec<BigRational> {
    residues(lambda, &BigRational::new(BigInt::from(n1), BigInt::from(m1)))
}

/// Residues of the truncation modulo `N_1`: the `gamma` with `P(gamma)`
/// nonempty.
pub fn inhabited_residues(lambda: &SpectrumTruncation, n1: u64) -> Vec<BigRational> {
    residues(lambda, &int(n1))
}

/// A decomposed spectrum with warnings for choices whose `P` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub spectrum: SpectrumTruncation,
    pub warnings: Vec<String>,
}

/// `union_k (i_k / N_1 + P(i_k))`, one choice per inhabited class in the
/// order of [`inhabited_classes`].
pub fn decompose_lambda(
    lambda: &SpectrumTruncation,
    n1: u64,
    m1: u64,
    choice: &[BigRational],
) -> Result<Decomposition, SpectrumError> {
    let step = BigRational::new(BigInt::from(n1), BigInt::from(m1));
    let classes = inhabited_classes(lambda, n1, m1);
    if classes.is_empty() {
        return Err(SpectrumError::EmptyResult);
    }
    if choice.len() != classes.len() {
        return Err(SpectrumError::InvalidParams(format!(
            "{} choices for {} inhabited classes",
            choice.len(),
            classes.len()
        )));
    }
    let n = int(n1);
    let mut out = BTreeSet::new();
    let mut warnings = Vec::new();
    for (class, i) in classes.iter().zip(choice) {
        let t = (i - class) / &step;
        if i.is_negative() || *i >= n || !t.is_integer() {
            return Err(SpectrumError::ChoiceOutOfClass {
                choice: Box::new(i.clone()),
                class: Box::new(class.clone()),
            });
        }
        let p = project_p(lambda, i, n1);
        if p.is_empty() {
            warnings.push(format!("P({i}) is empty on this truncation"));
        }
        out.extend(p.into_iter().map(|w| i / &n + BigRational::from(w)));
    }
    if out.is_empty() {
        return Err(SpectrumError::EmptyResult);
    }
    Ok(Decomposition {
        spectrum: SpectrumTruncation::new(
            out.into_iter().collect(),
            lambda.depth.saturating_sub(1),
            Generator::Decomposed,
        )?,
        warnings,
    })
}

/// The choice taking every class representative itself.
pub fn base_choice(lambda: &SpectrumTruncation, n1: u64, m1: u64) -> Vec<BigRational> {
    inhabited_classes(lambda, n1, m1)
}

/// Evaluators for `p` and `q`: the first stage and the measure with it removed.
#[derive(Debug, Clone)]
pub struct PqEvaluator {
    first: Stage,
    rest: Option<ProductEvaluator>,
}

impl PqEvaluator {
    /// `q` uses the product of depth `K - 1` for the shifted sequence, so that
    /// `sum_gamma p q` regroups `Q` at depth `K` exactly.
    pub fn new(seq: &MoranSequence, plan: &TruncationPlan) -> Result<Self, MoranError> {
        let first = seq.materialize(1)?;
        let rest = if plan.depth > 1 {
            Some(ProductEvaluator::new(&seq.shift(1)?, plan.depth - 1)?)
        } else {
            None
        };
        Ok(Self { first, rest })
    }

    /// `(p_gamma(xi), q_gamma(xi))` for every sample point.
    pub fn pq_many(&self, lambda: &SpectrumTruncation, gamma: &BigRational, xs: &[f64]) -> Vec<(f64, f64)> {
        let n = int(self.first.scale);
        let base = gamma / &n;
        let shift = base.to_f64().unwrap_or(0.0);
        let phases: Vec<_> = match &self.rest {
            Some(ev) => project_p(lambda, gamma, self.first.scale)
                .into_iter()
                .map(|w| ev.phases(&(&base + BigRational::from(w))))
                .collect(),
            None => Vec::new(),
        };
        let members = project_p(lambda, gamma, self.first.scale).len();
        xs.iter()
            .map(|&xi| {
                let x = xi / self.first.scale as f64;
                let p = mask_eval(&self.first.digits, x + shift).norm_sqr();
                let q = match &self.rest {
                    Some(ev) => phases.iter().map(|ph| ev.eval_shifted(ph, x).norm_sqr()).sum(),
                    None => members as f64,
                };
                (p, q)
            })
            .collect()
    }

    /// `(p_gamma(xi), q_gamma(xi))`.
    pub fn pq(&self, lambda: &SpectrumTruncation, gamma: &BigRational, xi: f64) -> (f64, f64) {
        self.pq_many(lambda, gamma, &[xi])[0]
    }

    /// `sum_gamma p_gamma(xi) q_gamma(xi)` over the inhabited residues, for
    /// every sample point.
    pub fn regrouped_q_many(&self, lambda: &SpectrumTruncation, xs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; xs.len()];
        for g in inhabited_residues(lambda, self.first.scale) {
            for (acc, (p, q)) in out.iter_mut().zip(self.pq_many(lambda, &g, xs)) {
                *acc += p * q;
            }
        }
        out
    }

    /// `sum_gamma p_gamma(xi) q_gamma(xi)` over the inhabited residues.
    pub fn regrouped_q(&self, lambda: &SpectrumTruncation, xi: f64) -> f64 {
        self.regrouped_q_many(lambda, &[xi])[0]
    }
}

pub fn pq_profile(
    seq: &MoranSequence,
    plan: &TruncationPlan,
    lambda: &SpectrumTruncation,
    gamma: &BigRational,
    xi: f64,
) -> Result<(f64, f64), MoranError> {
    Ok(PqEvaluator::new(seq, plan)?.pq(lambda, gamma, xi))
}
