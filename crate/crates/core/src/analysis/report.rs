//! Analysis reports and the pipeline producing them.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use serde_json::Value;

use super::config::AnalysisConfig;
use crate::fourier::{golden_samples, orthogonality_check, q_partial, tail_bound, OrthogonalityReport, TruncationPlan};
use crate::moran::{
    check_pcc, check_rbc, decide_spectrality, divisibility_profile, first_stage_admissible_up_to_scale, MoranSequence,
    PccCondition, Stage, Verdict,
};
use crate::residue::{is_complete_residue_system, satisfies_udz};
use crate::spectrum::{
    base_choice, canonical_spectrum, decompose_lambda, inhabited_classes, sequence_triples, stage_frequencies,
    PqEvaluator, SpectrumTruncation,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest candidate spectrum used by the numeric probes.
pub const SPECTRUM_LIMIT: usize = 4096;

/// Concentration parameters tried in the report, in order.
const PCC_PARAMETERS: [(i64, i64); 5] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];

/// Elements of a spectrum listed in the report.
const LISTED_ELEMENTS: usize = 32;

/// A float serialized with 12 significant digits; non-finite values become
/// strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn rounded(self) -> f64 {
        if !self.0.is_finite() || self.0 == 0.0 {
            return self.0;
        }
        format!("{:.11e}", self.0).parse().expect("formatted float")
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.rounded();
        if v.is_finite() {
            s.serialize_f64(if v == 0.0 { 0.0 } else { v })
        } else {
            s.serialize_str(&v.to_string())
        }
    }
}

/// A report section that either completed or recorded why it could not.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Done(T),
    Failed { error: String },
}

impl<T> Section<T> {
    fn from_result<E: ToString>(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Section::Done(v),
            Err(e) => Section::Failed { error: e.to_string() },
        }
    }

    pub fn done(&self) -> Option<&T> {
        match self {
            Section::Done(v) => Some(v),
            Section::Failed { .. } => None,
        }
    }
}

fn int_value(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(b.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UdzFacts {
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFacts {
    pub k: usize,
    pub scale: u64,
    pub digits: Vec<Value>,
    pub size: u64,
    pub complete_residue_system: bool,
    pub size_divides_scale: bool,
    pub digits_outside: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub udz: Option<Section<UdzFacts>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Section<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityFacts {
    pub entries: Vec<bool>,
    pub from_second_stage: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbcFacts {
    pub status: String,
    pub horizon: usize,
    pub partial_sum: String,
    pub partial_sum_value: Num,
    pub certificate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PccFacts {
    pub holds: bool,
    pub l: String,
    pub condition: Option<String>,
    pub witness: String,
    pub window_ratios: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionFacts {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictFacts {
    pub outcome: String,
    pub rule: Option<String>,
    pub preconditions: Vec<PreconditionFacts>,
    pub notes: Vec<String>,
}

impl From<&Verdict> for VerdictFacts {
    fn from(v: &Verdict) -> Self {
        Self {
            outcome: v.outcome.to_string(),
            rule: v.rule.map(|r| r.tag().to_string()),
            preconditions: v
                .preconditions
                .iter()
                .map(|p| PreconditionFacts {
                    name: p.name.clone(),
                    holds: p.holds,
                })
                .collect(),
            notes: v.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumFacts {
    pub depth: usize,
    pub size: usize,
    /// False when some stage used a best-effort frequency set.
    pub exact_frequency_sets: bool,
    pub frequency_sets: Vec<Vec<u64>>,
    /// First scale the frequencies were built for, when the configured one
    /// admits no frequency set; elements are mapped back by the ratio.
    pub rescaled_first_scale: Option<u64>,
    pub elements_head: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityFacts {
    pub pairs: usize,
    pub certified_pairs: usize,
    pub max_abs: Num,
    pub violating_pair: Option<[String; 2]>,
}

impl From<&OrthogonalityReport> for OrthogonalityFacts {
    fn from(r: &OrthogonalityReport) -> Self {
        Self {
            pairs: r.pairs,
            certified_pairs: r.certified_pairs,
            max_abs: Num(r.max_abs),
            violating_pair: r.violating_pair.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QFacts {
    pub lambda_size: usize,
    pub mean: Num,
    pub min: Num,
    pub max: Num,
    pub max_deviation_from_one: Num,
    pub xi: Vec<Num>,
    pub q: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionFacts {
    pub classes: Vec<String>,
    pub choice: Vec<String>,
    pub size: usize,
    pub warnings: Vec<String>,
    /// Largest `|sum_gamma p q - Q|` over the samples.
    pub regrouping_residual: Num,
    pub orthogonality: OrthogonalityFacts,
    pub q_mean: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Numerics {
    pub product_depth: usize,
    pub window: Num,
    pub tail_epsilon: Section<Num>,
    pub spectrum: Section<SpectrumFacts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonality: Option<Section<OrthogonalityFacts>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qsum: Option<Section<QFacts>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Section<DecompositionFacts>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: String,
    pub sequence: String,
    pub stages: Section<Vec<StageFacts>>,
    pub divisibility: Section<DivisibilityFacts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rbc: Option<Section<RbcFacts>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pcc: Option<Section<PccFacts>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictFacts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerics: Option<Numerics>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn stage_facts(k: usize, s: &Stage, config: &AnalysisConfig) -> StageFacts {
    let toggles = &config.analysis;
    StageFacts {
        k,
        scale: s.scale,
        digits: s.digits.elements().iter().map(int_value).collect(),
        size: s.size(),
        complete_residue_system: is_complete_residue_system(&s.digits),
        size_divides_scale: s.scale.is_multiple_of(s.size()),
        digits_outside: s.digits.outside_count(s.scale),
        udz: toggles.udz.then(|| {
            Section::from_result(satisfies_udz(&s.digits).map(|r| UdzFacts {
                holds: r.holds,
                witness: r.witness.map(|w| w.to_string()),
            }))
        }),
        frequencies: toggles.admissible.then(|| Section::from_result(stage_frequencies(s))),
    }
}

fn pcc_facts(seq: &MoranSequence, horizon: usize) -> Result<PccFacts, String> {
    let mut first = None;
    for (p, q) in PCC_PARAMETERS {
        let l = BigRational::new(p.into(), q.into());
        let r = check_pcc(seq, &l, horizon).map_err(|e| e.to_string())?;
        let facts = PccFacts {
            holds: r.holds,
            l: l.to_string(),
            condition: r.condition.map(|c| match c {
                PccCondition::WindowMass { c } => format!("window mass at least {c}"),
                PccCondition::NarrowInterval => "narrow interval".to_string(),
            }),
            witness: r.witness,
            window_ratios: r.window_ratios.iter().map(ToString::to_string).collect(),
        };
        if facts.holds {
            return Ok(facts);
        }
        first.get_or_insert(facts);
    }
    Ok(first.expect("parameters tried"))
}

/// Candidate spectrum for the numeric probes: canonical expansions over the
/// frequency sets, at the configured depth or less if it would exceed
/// [`SPECTRUM_LIMIT`] elements.
pub fn probe_spectrum(config: &AnalysisConfig) -> Result<(SpectrumTruncation, SpectrumFacts), String> {
    let seq = &config.sequence;
    let first = seq.materialize(1).map_err(|e| e.to_string())?;
    let rescaled = match stage_frequencies(&first) {
        Ok(_) => None,
        Err(_) => first_stage_admissible_up_to_scale(&first.digits)
            .ok()
            .filter(|&n| n != first.scale),
    };
    let probe_seq = match rescaled {
        Some(n) => seq.with_first_scale(n).map_err(|e| e.to_string())?,
        None => seq.clone(),
    };
    let (triples, exact) =
        sequence_triples(&probe_seq, config.numeric.spectrum_depth, true).map_err(|e| e.to_string())?;
    if triples.is_empty() {
        return Err("no stages".into());
    }
    let mut depth = 0;
    let mut size = 1usize;
    for t in &triples {
        match size.checked_mul(t.frequencies.len()) {
            Some(s) if s <= SPECTRUM_LIMIT => {
                size = s;
                depth += 1;
            }
            _ => break,
        }
    }
    let depth = depth.max(1);
    let mut lambda = canonical_spectrum(&triples, depth).map_err(|e| e.to_string())?;
    if let Some(n) = rescaled {
        let ratio = BigRational::new(BigInt::from(first.scale), BigInt::from(n));
        let elements = lambda.elements().iter().map(|l| l * &ratio).collect();
        lambda = SpectrumTruncation::new(elements, depth, lambda.generator).map_err(|e| e.to_string())?;
    }
    let facts = SpectrumFacts {
        depth,
        size: lambda.len(),
        exact_frequency_sets: exact,
        frequency_sets: triples[..depth].iter().map(|t| t.frequencies.clone()).collect(),
        rescaled_first_scale: rescaled,
        elements_head: lambda
            .elements()
            .iter()
            .take(LISTED_ELEMENTS)
            .map(ToString::to_string)
            .collect(),
    };
    Ok((lambda, facts))
}

/// Product depth of the probes: at least four beyond the spectrum depth.
pub fn product_depth(config: &AnalysisConfig, spectrum_depth: usize) -> usize {
    config.numeric.depth.max(spectrum_depth + 4)
}

/// The sample points of the Q probe, ascending.
pub fn q_samples(config: &AnalysisConfig) -> Vec<f64> {
    let mut xs = golden_samples(config.numeric.samples, 0.0, config.numeric.window);
    xs.sort_by(f64::total_cmp);
    xs
}

fn q_facts(r: &crate::fourier::QReport) -> QFacts {
    QFacts {
        lambda_size: r.lambda_size,
        mean: Num(r.mean()),
        min: Num(r.q_values.iter().copied().fold(f64::INFINITY, f64::min)),
        max: Num(r.max()),
        max_deviation_from_one: Num(r.max_deviation_from_one),
        xi: r.xi_samples.iter().map(|&x| Num(x)).collect(),
        q: r.q_values.iter().map(|&x| Num(x)).collect(),
    }
}

fn decomposition_facts(
    config: &AnalysisConfig,
    lambda: &SpectrumTruncation,
    plan: &TruncationPlan,
    xs: &[f64],
    q_values: &[f64],
) -> Result<DecompositionFacts, String> {
    let seq = &config.sequence;
    let first = seq.materialize(1).map_err(|e| e.to_string())?;
    let (n1, m1) = (first.scale, first.size());
    let choice = base_choice(lambda, n1, m1);
    let d = decompose_lambda(lambda, n1, m1, &choice).map_err(|e| e.to_string())?;
    let pq = PqEvaluator::new(seq, plan).map_err(|e| e.to_string())?;
    let regrouping_residual = pq
        .regrouped_q_many(lambda, xs)
        .iter()
        .zip(q_values)
        .map(|(r, q)| (r - q).abs())
        .fold(0.0, f64::max);
    let rest = seq.shift(1).map_err(|e| e.to_string())?;
    let rest_plan = TruncationPlan::new(plan.depth.saturating_sub(1).max(1), plan.window).map_err(|e| e.to_string())?;
    let orth = orthogonality_check(&rest, &rest_plan, d.spectrum.elements()).map_err(|e| e.to_string())?;
    let q = q_partial(&rest, &rest_plan, d.spectrum.elements(), xs).map_err(|e| e.to_string())?;
    Ok(DecompositionFacts {
        classes: inhabited_classes(lambda, n1, m1)
            .iter()
            .map(ToString::to_string)
            .collect(),
        choice: choice.iter().map(ToString::to_string).collect(),
        size: d.spectrum.len(),
        warnings: d.warnings,
        regrouping_residual: Num(regrouping_residual),
        orthogonality: (&orth).into(),
        q_mean: Num(q.mean()),
    })
}

fn numerics(config: &AnalysisConfig) -> Numerics {
    let seq = &config.sequence;
    let window = config.numeric.window;
    let spectrum = probe_spectrum(config);
    let sdepth = spectrum
        .as_ref()
        .map_or(config.numeric.spectrum_depth, |(_, f)| f.depth);
    let depth = product_depth(config, sdepth);
    let tail_epsilon = Section::from_result(tail_bound(seq, depth, window).map(Num));
    let mut out = Numerics {
        product_depth: depth,
        window: Num(window),
        tail_epsilon,
        spectrum: Section::Failed { error: String::new() },
        orthogonality: None,
        qsum: None,
        decomposition: None,
    };
    let (lambda, facts) = match spectrum {
        Ok(v) => v,
        Err(error) => {
            out.spectrum = Section::Failed { error };
            return out;
        }
    };
    out.spectrum = Section::Done(facts);
    let plan = TruncationPlan::new(depth, window).expect("validated knobs");
    out.orthogonality = Some(Section::from_result(
        orthogonality_check(seq, &plan, lambda.elements()).map(|r| OrthogonalityFacts::from(&r)),
    ));
    let xs = q_samples(config);
    let q = q_partial(seq, &plan, lambda.elements(), &xs);
    if config.analysis.qsum {
        out.qsum = Some(Section::from_result(
            q.as_ref().map(q_facts).map_err(ToString::to_string),
        ));
    }
    if config.analysis.decompose {
        out.decomposition = Some(Section::from_result(match &q {
            Ok(q) => decomposition_facts(config, &lambda, &plan, &xs, &q.q_values),
            Err(e) => Err(e.to_string()),
        }));
    }
    out
}

/// Runs the enabled analyses: structure, conditions, verdict, numerics.
/// Failures are recorded in their own sections.
pub fn run_analysis(config: &AnalysisConfig) -> AnalysisReport {
    let seq = &config.sequence;
    let n = &config.numeric;
    let horizon = n.spectrum_depth;
    let stages = Section::from_result(seq.stages(horizon).map(|st| {
        st.iter()
            .enumerate()
            .map(|(i, s)| stage_facts(i + 1, s, config))
            .collect::<Vec<_>>()
    }));
    let divisibility = Section::from_result(divisibility_profile(seq, n.depth).map(|p| DivisibilityFacts {
        entries: p.entries,
        from_second_stage: p.symbolic.to_string(),
    }));
    let rbc = config.analysis.rbc.then(|| {
        Section::from_result(check_rbc(seq, n.depth).map(|r| RbcFacts {
            status: r.status.to_string(),
            horizon: r.terms.len(),
            partial_sum_value: Num(r.partial_sum.to_f64().unwrap_or(f64::NAN)),
            partial_sum: r.partial_sum.to_string(),
            certificate: r.certificate,
        }))
    });
    let pcc = config
        .analysis
        .pcc
        .then(|| Section::from_result(pcc_facts(seq, n.depth)));
    let verdict = config
        .analysis
        .verdict
        .then(|| VerdictFacts::from(&decide_spectrality(seq)));
    let numerics = (config.analysis.qsum || config.analysis.decompose).then(|| numerics(config));
    AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.to_toml(),
        sequence: seq.to_string(),
        stages,
        divisibility,
        rbc,
        pcc,
        verdict,
        numerics,
    }
}

fn section_line<T>(out: &mut String, label: &str, s: &Section<T>, f: impl Fn(&T) -> String) {
    let body = match s {
        Section::Done(v) => f(v),
        Section::Failed { error } => format!("unavailable ({error})"),
    };
    let _ = writeln!(out, "{label}: {body}");
}

/// Human-readable summary of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sequence: {}", r.sequence);
    if let Section::Done(stages) = &r.stages {
        for s in stages {
            let mut parts = vec![
                format!("N = {}", s.scale),
                format!("M = {}", s.size),
                format!("residue system {}", yes_no(s.complete_residue_system)),
                format!("M | N {}", yes_no(s.size_divides_scale)),
            ];
            parts.extend(s.udz.as_ref().map(|u| match u {
                Section::Done(u) if u.holds => "udz yes".to_string(),
                Section::Done(u) => format!("udz no at {}", u.witness.as_deref().unwrap_or("?")),
                Section::Failed { .. } => "udz unavailable".to_string(),
            }));
            parts.extend(s.frequencies.as_ref().map(|f| match f {
                Section::Done(l) => format!("L = {l:?}"),
                Section::Failed { error } => format!("no L ({error})"),
            }));
            let _ = writeln!(out, "  k = {}: {}", s.k, parts.join(", "));
        }
    }
    section_line(&mut out, "divisibility for k >= 2", &r.divisibility, |d| {
        d.from_second_stage.clone()
    });
    if let Some(rbc) = &r.rbc {
        section_line(&mut out, "remainder bound", rbc, |f| {
            format!(
                "{} (partial sum {} over {} stages; {})",
                f.status, f.partial_sum, f.horizon, f.certificate
            )
        });
    }
    if let Some(pcc) = &r.pcc {
        section_line(&mut out, "concentration", pcc, |f| {
            format!(
                "{} at l = {} ({})",
                if f.holds { "holds" } else { "not certified" },
                f.l,
                f.witness
            )
        });
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(
            out,
            "verdict: {}{}",
            v.outcome,
            v.rule.as_ref().map(|r| format!(" by {r}")).unwrap_or_default()
        );
        for n in &v.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
    if let Some(n) = &r.numerics {
        let _ = writeln!(out, "product depth: {}", n.product_depth);
        section_line(&mut out, "tail bound", &n.tail_epsilon, |e| format!("{}", e.rounded()));
        section_line(&mut out, "spectrum", &n.spectrum, |s| {
            let mut line = format!("{} elements at depth {}", s.size, s.depth);
            if let Some(n) = s.rescaled_first_scale {
                let _ = write!(line, " (built for first scale {n})");
            }
            if !s.exact_frequency_sets {
                line.push_str(" (best-effort frequency sets)");
            }
            line
        });
        if let Some(o) = &n.orthogonality {
            section_line(&mut out, "orthogonality", o, |o| {
                format!(
                    "{}/{} pairs certified, max residual {}",
                    o.certified_pairs,
                    o.pairs,
                    o.max_abs.rounded()
                )
            });
        }
        if let Some(q) = &n.qsum {
            section_line(&mut out, "Q", q, |q| {
                format!(
                    "mean {}, range [{}, {}] over {} samples",
                    q.mean.rounded(),
                    q.min.rounded(),
                    q.max.rounded(),
                    q.q.len()
                )
            });
        }
        if let Some(d) = &n.decomposition {
            section_line(&mut out, "decomposition", d, |d| {
                format!(
                    "{} classes, {} elements, regrouping residual {}",
                    d.classes.len(),
                    d.size,
                    d.regrouping_residual.rounded()
                )
            });
        }
    }
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
