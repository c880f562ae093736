//! Rule-based spectrality verdict.
//!
//! Rules are tried in a fixed order; the first one whose preconditions are
//! all certified decides. Every rule looks at divisibility only from the
//! second stage on, since the first scale is a free rescaling.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::conditions::{divisibility_from, nonneg_from, rbc_status, reciprocal_sizes_summable, SignCheck};
use super::{check_pcc, search_hadamard_l, DivisibilityVerdict, HadamardSearch, MoranSequence, RbcStatus, Stage, Tail};
use crate::intpoly::IntPolynomial;
use crate::residue::{is_complete_residue_system, satisfies_udz, DigitSet};

/// Largest scale for which the frequency-set search is run.
pub const SEARCH_SCALE_LIMIT: u64 = 4096;

/// Concentration parameters tried by the sufficiency rule.
const PCC_PARAMETERS: [(i64, i64); 7] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 8), (7, 8)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Spectral,
    NotSpectral,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spectral => "spectral",
            Self::NotSpectral => "not spectral",
            Self::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Consecutive digit sets: spectral iff `M_k | N_k` for `k >= 2`.
    ConsecutiveDigits,
    /// `{0, ..., M - 2, n M - 1}` with `sum 1/M` finite: spectral iff `M_k | N_k` for `k >= 2`.
    ShiftedTopFamily,
    /// Uniform discrete zeros plus tightness make divisibility necessary.
    UniformZerosNecessity,
    /// Admissible pairs, the remainder bound and concentration give spectrality.
    ConcentrationSufficiency,
}

impl Rule {
    pub const ALL: [Rule; 4] = [
        Rule::ConsecutiveDigits,
        Rule::ShiftedTopFamily,
        Rule::UniformZerosNecessity,
        Rule::ConcentrationSufficiency,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::ConsecutiveDigits => "consecutive-digits",
            Rule::ShiftedTopFamily => "shifted-top-family",
            Rule::UniformZerosNecessity => "uniform-zeros-necessity",
            Rule::ConcentrationSufficiency => "concentration-sufficiency",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precondition {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Deciding rule; `None` when no rule decides.
    pub rule: Option<Rule>,
    /// Preconditions of the deciding rule, or of every attempted rule when
    /// the outcome is unknown.
    pub preconditions: Vec<Precondition>,
    pub notes: Vec<String>,
}

struct Checks {
    rule: Rule,
    pre: Vec<Precondition>,
    notes: Vec<String>,
}

impl Checks {
    fn new(rule: Rule) -> Self {
        Self {
            rule,
            pre: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a precondition; returns whether it holds.
    fn check(&mut self, name: impl Into<String>, holds: bool) -> bool {
        self.pre.push(Precondition {
            name: name.into(),
            holds,
        });
        holds
    }

    fn finish(self, outcome: Outcome) -> Verdict {
        debug_assert!(outcome == Outcome::Unknown || self.pre.iter().all(|p| p.holds));
        Verdict {
            outcome,
            rule: (outcome != Outcome::Unknown).then_some(self.rule),
            preconditions: self.pre,
            notes: self.notes,
        }
    }
}

/// Explicit stages with their first position: prefix stages, then one
/// occurrence of each repeating stage. Repeating stages recur at positions
/// of at least two.
fn explicit_stages(seq: &MoranSequence) -> Vec<(u64, &Stage)> {
    let plen = seq.prefix().len() as u64;
    let mut out: Vec<(u64, &Stage)> = seq
        .prefix()
        .iter()
        .enumerate()
        .map(|(i, s)| (i as u64 + 1, s))
        .collect();
    if let Tail::Periodic(period) = seq.tail() {
        out.extend(period.iter().enumerate().map(|(i, s)| (plen + 1 + i as u64, s)));
    }
    out
}

/// `n` when the digits are `{0, ..., M - 2, n M - 1}` with `n >= 0`.
pub(crate) fn shifted_top_multiplier(d: &DigitSet) -> Option<BigInt> {
    let e = d.elements();
    let m = e.len();
    if m < 2 {
        return None;
    }
    let run_from = |s: &[BigInt], start: i64| s.iter().enumerate().all(|(i, b)| *b == BigInt::from(start + i as i64));
    if e[0] == BigInt::from(-1) && run_from(&e[1..], 0) {
        return Some(BigInt::zero());
    }
    if !run_from(&e[..m - 1], 0) {
        return None;
    }
    let top_plus_one = e[m - 1].clone() + 1;
    let mb = BigInt::from(m);
    (&top_plus_one % &mb == BigInt::zero()).then(|| top_plus_one / mb)
}

fn polys(tail: &Tail) -> (IntPolynomial, IntPolynomial) {
    (
        tail.size_formula().and_then(|f| f.poly()).expect("validated family"),
        tail.scale_formula().and_then(|f| f.poly()).expect("validated family"),
    )
}

/// Parity of `M(k)` on `k >= k0`: `(some odd, some even)`.
fn size_parities(m: &IntPolynomial, k0: u64) -> (bool, bool) {
    let a = m.eval_i64(k0 as i64);
    let b = m.eval_i64(k0 as i64 + 1);
    let odd = |v: &BigInt| (v % 2u32) != BigInt::zero();
    (odd(&a) || odd(&b), !odd(&a) || !odd(&b))
}

/// `n(k) >= 1` for every family stage, using `P >= 1`.
fn family_multiplier_at_least_one(seq: &MoranSequence) -> bool {
    match seq.tail() {
        Tail::Consecutive { .. } => true,
        Tail::ShiftedTop { multiplier, .. } => {
            let parts = multiplier.poly_in_p();
            let total = parts.iter().fold(IntPolynomial::zero(), |a, p| &a + p);
            let k0 = seq.first_family_index();
            nonneg_from(&(&total - &IntPolynomial::one()), k0) == SignCheck::Always
        }
        _ => false,
    }
}

fn record_divisibility(c: &mut Checks, seq: &MoranSequence) -> DivisibilityVerdict {
    let d = divisibility_from(seq, 2);
    c.notes.push(format!("divisibility M_k | N_k for k >= 2: {d}"));
    d
}

fn consecutive_digits(seq: &MoranSequence) -> Verdict {
    let mut c = Checks::new(Rule::ConsecutiveDigits);
    if !c.check("sequence is infinite", !seq.is_finite()) {
        return c.finish(Outcome::Unknown);
    }
    let mut all = true;
    let mut translated = false;
    for (j, s) in explicit_stages(seq) {
        if !s.digits.is_consecutive_run() {
            c.notes.push(format!("stage {j} digits are not consecutive"));
            all = false;
            break;
        }
        translated |= !s.digits.is_consecutive_from_zero();
    }
    if let Tail::ShiftedTop { multiplier, .. } = seq.tail() {
        match multiplier.as_constant() {
            Some(n) if n.is_zero() || n.is_one() => translated |= n.is_zero(),
            _ => {
                c.notes.push(format!(
                    "family top multiplier n(k) = {multiplier} is not constantly 0 or 1"
                ));
                all = false;
            }
        }
    }
    if translated {
        c.notes
            .push("some digit sets are translated consecutive runs; translation does not affect spectrality".into());
    }
    if !c.check("every digit set is a run of consecutive integers", all) {
        return c.finish(Outcome::Unknown);
    }
    decide_by_divisibility(c, seq)
}

fn decide_by_divisibility(mut c: Checks, seq: &MoranSequence) -> Verdict {
    match record_divisibility(&mut c, seq) {
        DivisibilityVerdict::AllDivisible => {
            c.check("M_k | N_k for every k >= 2", true);
            c.finish(Outcome::Spectral)
        }
        DivisibilityVerdict::SomeFail(k) => {
            c.check(format!("M_k does not divide N_k at k = {k}"), true);
            c.finish(Outcome::NotSpectral)
        }
        DivisibilityVerdict::Unknown => {
            c.check("divisibility M_k | N_k decided for every k >= 2", false);
            c.finish(Outcome::Unknown)
        }
    }
}

fn shifted_top_family(seq: &MoranSequence) -> Verdict {
    let mut c = Checks::new(Rule::ShiftedTopFamily);
    let summable = seq.tail().is_family() && reciprocal_sizes_summable(seq.tail());
    if !c.check("sum of 1/M_k is finite", summable) {
        return c.finish(Outcome::Unknown);
    }
    let (m, _) = polys(seq.tail());
    let k0 = seq.first_family_index();
    let mut form_ok = true;
    let mut all_odd = true;
    let mut mult_ge_one = true;
    let mut gcd_ok = true;
    for (j, s) in explicit_stages(seq) {
        let size = s.size();
        match shifted_top_multiplier(&s.digits) {
            Some(n) if size >= 3 => {
                if size % 2 == 0 {
                    all_odd = false;
                    if size >= 5 {
                        let g = num_integer::Integer::gcd(&(&n * BigInt::from(size) - 1), &BigInt::from(size - 2));
                        if !g.is_one() {
                            c.notes.push(format!("stage {j}: gcd(n M - 1, M - 2) = {g}"));
                            gcd_ok = false;
                        }
                        c.notes.push(format!(
                            "stage {j}: even digit count {size} relies on the gcd condition"
                        ));
                    }
                }
                mult_ge_one &= n.is_positive();
                if n.is_zero() {
                    c.notes.push(format!(
                        "stage {j}: top multiplier 0 gives a translated consecutive set"
                    ));
                }
            }
            _ => {
                c.notes.push(format!(
                    "stage {j} is not of the form {{0, ..., M - 2, n M - 1}} with M >= 3"
                ));
                form_ok = false;
            }
        }
    }
    let three = IntPolynomial::from_i64(&[3]);
    let family_big = nonneg_from(&(&m - &three), k0) == SignCheck::Always;
    if !family_big {
        c.notes.push("family digit count drops below 3".into());
    }
    let (_, some_even) = size_parities(&m, k0);
    if some_even {
        all_odd = false;
        c.notes
            .push("family has even digit counts; the gcd condition cannot be certified symbolically".into());
        gcd_ok = false;
    }
    mult_ge_one &= family_multiplier_at_least_one(seq);
    if !c.check(
        "every digit set is {0, ..., M - 2, n M - 1} with M >= 3",
        form_ok && family_big,
    ) {
        return c.finish(Outcome::Unknown);
    }
    if !c.check("n_k >= 1 for all k, or every M_k is odd", mult_ge_one || all_odd) {
        return c.finish(Outcome::Unknown);
    }
    if !c.check(
        "gcd(n_k M_k - 1, M_k - 2) = 1 whenever M_k is even and at least 5",
        gcd_ok,
    ) {
        return c.finish(Outcome::Unknown);
    }
    decide_by_divisibility(c, seq)
}

/// Whether every digit set satisfies the uniform zero condition.
fn all_uniform_zeros(c: &mut Checks, seq: &MoranSequence) -> bool {
    for (j, s) in explicit_stages(seq) {
        if !is_complete_residue_system(&s.digits) {
            c.notes.push(format!("stage {j} is not a complete residue system"));
            return false;
        }
        match satisfies_udz(&s.digits) {
            Ok(r) if r.holds => {}
            Ok(r) => {
                let w = r.witness.map(|w| w.to_string()).unwrap_or_default();
                c.notes
                    .push(format!("stage {j} violates the uniform zero condition at {w}"));
                return false;
            }
            Err(e) => {
                c.notes.push(format!("stage {j}: uniform zero test unavailable ({e})"));
                return false;
            }
        }
    }
    match seq.tail() {
        Tail::ShiftedTop { multiplier, .. } => {
            let (m, _) = polys(seq.tail());
            let (_, some_even) = size_parities(&m, seq.first_family_index());
            let trivial = multiplier.as_constant().is_some_and(|n| n.is_zero() || n.is_one());
            if some_even && !trivial {
                c.notes
                    .push("family has even digit counts; uniform zeros are not certified".into());
                return false;
            }
            true
        }
        _ => true,
    }
}

fn uniform_zeros_necessity(seq: &MoranSequence) -> Verdict {
    let mut c = Checks::new(Rule::UniformZerosNecessity);
    if !c.check("sequence is infinite", !seq.is_finite()) {
        return c.finish(Outcome::Unknown);
    }
    let udz = all_uniform_zeros(&mut c, seq);
    if !c.check("every digit set satisfies the uniform zero condition", udz) {
        return c.finish(Outcome::Unknown);
    }
    let (rbc, why) = rbc_status(seq);
    c.notes.push(format!("remainder bound {rbc}: {why}"));
    if !c.check(
        "remainder bound holds, so the tail measures are tight",
        rbc == RbcStatus::Holds,
    ) {
        return c.finish(Outcome::Unknown);
    }
    match record_divisibility(&mut c, seq) {
        DivisibilityVerdict::SomeFail(k) => {
            c.check(format!("M_k does not divide N_k at k = {k}"), true);
            c.finish(Outcome::NotSpectral)
        }
        _ => {
            c.check("some k >= 2 with M_k not dividing N_k", false);
            c.finish(Outcome::Unknown)
        }
    }
}

/// `(N, B)` admissible: structurally for a residue system with `M | N`,
/// otherwise by search.
fn stage_admissible(s: &Stage) -> Result<(), String> {
    if is_complete_residue_system(&s.digits) && s.scale.is_multiple_of(s.size()) {
        return Ok(());
    }
    if s.scale > SEARCH_SCALE_LIMIT {
        return Err(format!("scale {} is beyond the search limit", s.scale));
    }
    match search_hadamard_l(s.scale, &s.digits) {
        HadamardSearch::Found(_) => Ok(()),
        HadamardSearch::NotAdmissible => Err("no frequency set exists".into()),
        HadamardSearch::BudgetExceeded => Err("frequency search exceeded its budget".into()),
    }
}

/// Some scale makes the first digit set admissible; the first scale itself
/// is a free rescaling.
pub fn first_stage_admissible_up_to_scale(d: &DigitSet) -> Result<u64, String> {
    let m = d.len() as u64;
    if is_complete_residue_system(d) {
        return Ok(m);
    }
    let span = (d.max() - d.min()).to_u64().unwrap_or(u64::MAX);
    let limit = span.saturating_add(1).saturating_mul(2).clamp(64, SEARCH_SCALE_LIMIT);
    for n in m..=limit {
        if let HadamardSearch::Found(_) = search_hadamard_l(n, d) {
            return Ok(n);
        }
    }
    Err(format!("no scale up to {limit} makes the first digit set admissible"))
}

fn concentration_sufficiency(seq: &MoranSequence) -> Verdict {
    let mut c = Checks::new(Rule::ConcentrationSufficiency);
    if !c.check("sequence is infinite", !seq.is_finite()) {
        return c.finish(Outcome::Unknown);
    }
    let first = match seq.materialize(1) {
        Ok(s) => s,
        Err(e) => {
            c.notes.push(e.to_string());
            c.check("first stage materializes", false);
            return c.finish(Outcome::Unknown);
        }
    };
    let first_ok = match first_stage_admissible_up_to_scale(&first.digits) {
        Ok(n) => {
            if n != first.scale {
                c.notes.push(format!("first digit set is admissible at scale {n}"));
            }
            true
        }
        Err(e) => {
            c.notes.push(e);
            false
        }
    };
    if !c.check("first digit set is admissible for some scale", first_ok) {
        return c.finish(Outcome::Unknown);
    }
    let mut later_ok = true;
    for (j, s) in explicit_stages(seq) {
        if j < 2 && seq.prefix().len() as u64 >= 1 {
            continue;
        }
        if let Err(e) = stage_admissible(s) {
            c.notes.push(format!("stage {j} not admissible: {e}"));
            later_ok = false;
            break;
        }
    }
    if later_ok && seq.tail().is_family() {
        let start = 2.max(seq.prefix().len() as u64 + 1);
        match divisibility_from(&family_only(seq), start) {
            DivisibilityVerdict::AllDivisible => {}
            other => {
                c.notes
                    .push(format!("family stages admissible only where M_k | N_k: {other}"));
                later_ok = false;
            }
        }
    }
    if !c.check("every later stage is an admissible pair", later_ok) {
        return c.finish(Outcome::Unknown);
    }
    let (rbc, why) = rbc_status(seq);
    c.notes.push(format!("remainder bound {rbc}: {why}"));
    if !c.check("remainder bound holds", rbc == RbcStatus::Holds) {
        return c.finish(Outcome::Unknown);
    }
    let mut pcc_ok = false;
    for (p, q) in PCC_PARAMETERS {
        let l = BigRational::new(p.into(), q.into());
        if let Ok(r) = check_pcc(seq, &l, 0) {
            if r.holds {
                c.notes.push(format!("concentration with l = {l}: {}", r.witness));
                pcc_ok = true;
                break;
            }
        }
    }
    if !c.check("concentration condition holds on a subsequence", pcc_ok) {
        return c.finish(Outcome::Unknown);
    }
    c.finish(Outcome::Spectral)
}

/// The sequence with its prefix dropped from the divisibility scan; prefix
/// stages are checked separately.
fn family_only(seq: &MoranSequence) -> MoranSequence {
    seq.clone()
}

/// Applies one rule in isolation.
pub fn apply_rule(seq: &MoranSequence, rule: Rule) -> Verdict {
    match rule {
        Rule::ConsecutiveDigits => consecutive_digits(seq),
        Rule::ShiftedTopFamily => shifted_top_family(seq),
        Rule::UniformZerosNecessity => uniform_zeros_necessity(seq),
        Rule::ConcentrationSufficiency => concentration_sufficiency(seq),
    }
}

/// Tries every rule in order and returns the first decision, or an unknown
/// verdict listing what broke each rule.
pub fn decide_spectrality(seq: &MoranSequence) -> Verdict {
    let mut notes = Vec::new();
    let mut preconditions = Vec::new();
    for rule in Rule::ALL {
        let v = apply_rule(seq, rule);
        if v.outcome != Outcome::Unknown {
            return v;
        }
        let broken: Vec<&str> = v
            .preconditions
            .iter()
            .filter(|p| !p.holds)
            .map(|p| p.name.as_str())
            .collect();
        notes.push(format!("{rule}: not decided ({})", broken.join("; ")));
        notes.extend(v.notes.iter().map(|n| format!("{rule}: {n}")));
        preconditions.extend(v.preconditions.into_iter().map(|p| Precondition {
            name: format!("{rule}: {}", p.name),
            holds: p.holds,
        }));
    }
    if seq.is_finite() {
        notes.push("finite sequences are outside the rule base".into());
    }
    Verdict {
        outcome: Outcome::Unknown,
        rule: None,
        preconditions,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moran::tests::square_family;

    fn st(n: u64, b: &[i64]) -> Stage {
        Stage::from_i64(n, b).unwrap()
    }

    #[test]
    fn multiplier_detection() {
        let d = |b: &[i64]| DigitSet::from_i64(b, b.len() as u64).unwrap();
        assert_eq!(shifted_top_multiplier(&d(&[0, 1, 14])), Some(BigInt::from(5)));
        assert_eq!(shifted_top_multiplier(&d(&[0, 1, 2])), Some(BigInt::one()));
        assert_eq!(shifted_top_multiplier(&d(&[-1, 0, 1])), Some(BigInt::zero()));
        assert_eq!(shifted_top_multiplier(&d(&[0, 2, 4])), None);
        assert_eq!(shifted_top_multiplier(&d(&[0, 1, 13])), None);
    }

    #[test]
    fn consecutive_examples() {
        let v = decide_spectrality(&MoranSequence::periodic(vec![st(4, &[0, 1, 2, 3])]).unwrap());
        assert_eq!((v.outcome, v.rule), (Outcome::Spectral, Some(Rule::ConsecutiveDigits)));
        let seq = MoranSequence::new(vec![st(6, &[0, 1, 2])], Tail::Periodic(vec![st(4, &[0, 1, 2])])).unwrap();
        let v = decide_spectrality(&seq);
        assert_eq!(
            (v.outcome, v.rule),
            (Outcome::NotSpectral, Some(Rule::ConsecutiveDigits))
        );
        assert!(v.preconditions.iter().all(|p| p.holds));
    }

    #[test]
    fn first_scale_is_ignored() {
        let seq = MoranSequence::new(vec![st(7, &[0, 1, 2])], Tail::Periodic(vec![st(6, &[0, 1, 2])])).unwrap();
        assert_eq!(decide_spectrality(&seq).outcome, Outcome::Spectral);
    }

    #[test]
    fn shifted_top_examples() {
        let v = decide_spectrality(&square_family("(2k+1)^2"));
        assert_eq!((v.outcome, v.rule), (Outcome::Spectral, Some(Rule::ShiftedTopFamily)));
        let v = decide_spectrality(&square_family("(2k+1)^2 + 1"));
        assert_eq!(
            (v.outcome, v.rule),
            (Outcome::NotSpectral, Some(Rule::ShiftedTopFamily))
        );
    }

    #[test]
    fn unknown_examples() {
        let even_gaps = MoranSequence::periodic(vec![st(3, &[0, 2, 4])]).unwrap();
        assert_eq!(decide_spectrality(&even_gaps).outcome, Outcome::Unknown);
        let non_residue_tail = MoranSequence::new(vec![st(2, &[0, 1])], Tail::Periodic(vec![st(2, &[0, 3])])).unwrap();
        let v = decide_spectrality(&non_residue_tail);
        assert_eq!(v.outcome, Outcome::Unknown);
        assert!(v.notes.iter().any(|n| n.contains("remainder bound fails")));
        let fin = MoranSequence::new(vec![st(2, &[0, 1])], Tail::Empty).unwrap();
        assert_eq!(decide_spectrality(&fin).outcome, Outcome::Unknown);
    }

    #[test]
    fn uniform_zero_rule_fires() {
        let seq = MoranSequence::periodic(vec![st(8, &[0, 2, 3, 4, 5, 7])]).unwrap();
        let v = decide_spectrality(&seq);
        assert_eq!(
            (v.outcome, v.rule),
            (Outcome::NotSpectral, Some(Rule::UniformZerosNecessity))
        );
    }

    #[test]
    fn sufficiency_rule_fires() {
        let quarter = MoranSequence::periodic(vec![st(4, &[0, 2])]).unwrap();
        let v = decide_spectrality(&quarter);
        assert_eq!(
            (v.outcome, v.rule),
            (Outcome::Spectral, Some(Rule::ConcentrationSufficiency))
        );
        let rescaled = quarter.with_first_scale(5).unwrap();
        assert_eq!(decide_spectrality(&rescaled).outcome, Outcome::Spectral);
    }
}
