//! Structural conditions on a sequence: divisibility of scales by digit
//! counts, the remainder bound and the concentration condition.
//!
//! Conditions over infinitely many stages are certified from the tail rule,
//! never extrapolated from samples. Anything outside the rule base is
//! reported as unknown.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{MoranError, MoranSequence, Stage, Tail};
use crate::intpoly::IntPolynomial;

/// Largest number of indices scanned when a certificate needs a finite check.
pub const SCAN_LIMIT: u64 = 200_000;

/// Sign certificate for `p(k) >= 0` on `k >= k0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCheck {
    Always,
    /// First index where the polynomial is negative.
    FailsAt(u64),
    Undecided,
}

/// Decides `p(k) >= 0` for every integer `k >= k0`.
///
/// Beyond the Cauchy bound `1 + max |c_i / c_d|` the sign is the sign of the
/// leading coefficient, so a finite scan settles the rest.
pub fn nonneg_from(p: &IntPolynomial, k0: u64) -> SignCheck {
    let Some(deg) = p.degree() else {
        return SignCheck::Always;
    };
    let lead = p.leading().expect("nonzero").clone();
    let bound = if deg == 0 {
        BigInt::zero()
    } else {
        let biggest = p.coeffs()[..deg]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        biggest.div_ceil(&lead.abs()) + 1
    };
    let last = if lead.is_negative() {
        // Negative for every k past the bound; the first failure is at most there.
        bound.clone() + 1
    } else {
        bound.clone()
    };
    let Some(last) = last.to_u64() else {
        return SignCheck::Undecided;
    };
    let last = last.max(k0);
    if last - k0 > SCAN_LIMIT {
        return SignCheck::Undecided;
    }
    for k in k0..=last {
        if p.eval(&BigInt::from(k)).is_negative() {
            return SignCheck::FailsAt(k);
        }
    }
    SignCheck::Always
}

/// `p(k) >= 0` for all sufficiently large `k`.
pub fn eventually_nonneg(p: &IntPolynomial) -> bool {
    p.leading().is_none_or(|c| c.is_positive())
}

/// `p(k) > 0` for all sufficiently large `k`.
pub fn eventually_positive(p: &IntPolynomial) -> bool {
    p.leading().is_some_and(|c| c.is_positive())
}

/// Symbolic verdict on `M_k | N_k` over a range of stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisibilityVerdict {
    AllDivisible,
    /// First failing stage.
    SomeFail(u64),
    Unknown,
}

impl fmt::Display for DivisibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AllDivisible => write!(f, "all divisible"),
            Self::SomeFail(k) => write!(f, "fails at k = {k}"),
            Self::Unknown => write!(f, "unknown"),
        }
    }
}

fn divides_at(m: &IntPolynomial, n: &IntPolynomial, k: u64) -> bool {
    let x = BigInt::from(k);
    let mv = m.eval(&x);
    !mv.is_zero() && n.eval(&x).is_multiple_of(&mv)
}

fn first_failure(m: &IntPolynomial, n: &IntPolynomial, from: u64, count: u64) -> Option<u64> {
    (from..from.saturating_add(count)).find(|&k| !divides_at(m, n, k))
}

/// Decides `m(k) | n(k)` for all integers `k >= k0`.
///
/// Pseudo-division gives `c^e n = m q + r`. With `r = 0` the ratio is
/// `q(k) / c^e`, periodic modulo `c^e`, so one period decides. With `r != 0`
/// divisibility forces `m(k) | r(k)`, impossible once `|r(k)| < |m(k)|`, and a
/// scan locates the first failure.
pub fn divides_from(m: &IntPolynomial, n: &IntPolynomial, k0: u64) -> DivisibilityVerdict {
    assert!(!m.is_zero(), "divisor polynomial is zero");
    let r = n.pseudo_rem(m);
    if r.is_zero() {
        let dm = m.degree().expect("nonzero");
        let e = n.degree().map_or(0, |dn| (dn + 1).saturating_sub(dm));
        let period = num_traits::pow(m.leading().expect("nonzero").abs(), e);
        return match period.to_u64().filter(|&p| p <= SCAN_LIMIT) {
            Some(p) => match first_failure(m, n, k0, p) {
                None => DivisibilityVerdict::AllDivisible,
                Some(k) => DivisibilityVerdict::SomeFail(k),
            },
            None => match first_failure(m, n, k0, SCAN_LIMIT) {
                Some(k) => DivisibilityVerdict::SomeFail(k),
                None => DivisibilityVerdict::Unknown,
            },
        };
    }
    match first_failure(m, n, k0, SCAN_LIMIT) {
        Some(k) => DivisibilityVerdict::SomeFail(k),
        None => DivisibilityVerdict::Unknown,
    }
}

/// `M_k | N_k` for the first stages plus a verdict for the whole sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityProfile {
    pub entries: Vec<bool>,
    pub symbolic: DivisibilityVerdict,
}

fn stage_divides(s: &Stage) -> bool {
    s.scale.is_multiple_of(s.size())
}

/// Verdict on `M_j | N_j` for all positions `j >= start`.
pub(crate) fn divisibility_from(seq: &MoranSequence, start: u64) -> DivisibilityVerdict {
    let plen = seq.prefix().len() as u64;
    for j in start..=plen {
        if !stage_divides(&seq.prefix()[j as usize - 1]) {
            return DivisibilityVerdict::SomeFail(j);
        }
    }
    let first_tail = start.max(plen + 1);
    match seq.tail() {
        Tail::Empty => DivisibilityVerdict::AllDivisible,
        Tail::Periodic(period) => {
            let p = period.len() as u64;
            for j in first_tail..first_tail + p {
                let idx = ((j - plen - 1) % p) as usize;
                if !stage_divides(&period[idx]) {
                    return DivisibilityVerdict::SomeFail(j);
                }
            }
            DivisibilityVerdict::AllDivisible
        }
        Tail::Consecutive { size, scale } | Tail::ShiftedTop { size, scale, .. } => {
            let (m, n) = (size.poly().expect("checked"), scale.poly().expect("checked"));
            let offset = seq.index_offset();
            match divides_from(&m, &n, first_tail + offset) {
                DivisibilityVerdict::SomeFail(k) => DivisibilityVerdict::SomeFail(k - offset),
                other => other,
            }
        }
    }
}

/// Entry `k` is `M_k | N_k` for `k = 1..=K`; `symbolic` covers every
/// stage from the second on, since the first scale is a free rescaling.
pub fn divisibility_profile(seq: &MoranSequence, horizon: usize) -> Result<DivisibilityProfile, MoranError> {
    let entries = seq.stages(horizon)?.iter().map(stage_divides).collect();
    Ok(DivisibilityProfile {
        entries,
        symbolic: divisibility_from(seq, 2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbcStatus {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for RbcStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Holds => "holds",
            Self::Fails => "fails",
            Self::Unknown => "unknown",
        })
    }
}

/// Remainder bound: summability of the fraction of digits outside `[0, N_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbcResult {
    pub status: RbcStatus,
    /// `#B_k,2 / #B_k` for the materialized stages.
    pub terms: Vec<BigRational>,
    pub partial_sum: BigRational,
    pub certificate: String,
}

pub(crate) fn outside_fraction(s: &Stage) -> BigRational {
    BigRational::new(BigInt::from(s.digits.outside_count(s.scale)), BigInt::from(s.size()))
}

/// Degree of the digit-count formula of a family tail.
fn size_degree(tail: &Tail) -> Option<usize> {
    tail.size_formula().and_then(|f| f.poly()).and_then(|p| p.degree())
}

/// `sum 1/M(k)` converges: `M` has degree at least two.
pub(crate) fn reciprocal_sizes_summable(tail: &Tail) -> bool {
    size_degree(tail).is_some_and(|d| d >= 2)
}

/// Classifies the remainder bound from the tail rule and sums the first
/// `horizon` terms exactly.
pub fn check_rbc(seq: &MoranSequence, horizon: usize) -> Result<RbcResult, MoranError> {
    let stages = seq.stages(horizon)?;
    let terms: Vec<BigRational> = stages.iter().map(outside_fraction).collect();
    let partial_sum = terms.iter().fold(BigRational::zero(), |a, t| a + t);
    let (status, certificate) = rbc_status(seq);
    Ok(RbcResult {
        status,
        terms,
        partial_sum,
        certificate,
    })
}

/// Every shifted-top family stage keeps its top digit `n M - 1` in
/// `[0, N - 1]`; only that digit can leave the range.
pub(crate) fn family_inside_certified(seq: &MoranSequence) -> bool {
    let Tail::ShiftedTop {
        size,
        multiplier,
        scale,
    } = seq.tail()
    else {
        return true;
    };
    let m = size.poly().expect("checked");
    let n = scale.poly().expect("checked");
    let Some(mult) = multiplier.poly() else {
        return false;
    };
    let inside = &n - &(&mult * &m);
    let positive_mult = &mult - &IntPolynomial::one();
    let k0 = seq.first_family_index();
    nonneg_from(&inside, k0) == SignCheck::Always && nonneg_from(&positive_mult, k0) == SignCheck::Always
}

pub(crate) fn rbc_status(seq: &MoranSequence) -> (RbcStatus, String) {
    match seq.tail() {
        Tail::Empty => (RbcStatus::Holds, "finite sequence: the sum is finite".into()),
        Tail::Periodic(period) => match period.iter().position(|s| s.digits.outside_count(s.scale) > 0) {
            None => (
                RbcStatus::Holds,
                "every repeating stage has all digits in [0, N - 1]".into(),
            ),
            Some(i) => (
                RbcStatus::Fails,
                format!(
                    "repeating stage {} contributes {} each period",
                    period[i],
                    outside_fraction(&period[i])
                ),
            ),
        },
        Tail::Consecutive { .. } => (
            RbcStatus::Holds,
            "consecutive digits lie in [0, M - 1] and M <= N".into(),
        ),
        Tail::ShiftedTop { size, .. } => {
            if family_inside_certified(seq) {
                return (
                    RbcStatus::Holds,
                    "top digit n M - 1 stays below N for every family stage".into(),
                );
            }
            if reciprocal_sizes_summable(seq.tail()) {
                (
                    RbcStatus::Holds,
                    format!("at most one digit outside and sum 1/M(k) converges for M(k) = {size}"),
                )
            } else {
                (
                    RbcStatus::Unknown,
                    format!("M(k) = {size} has degree below two; no summability rule applies"),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PccCondition {
    /// A window `[l N / 2, (1 - l / 2) N]` holds a fraction at least `c` of the digits.
    WindowMass { c: BigRational },
    /// All but a summable fraction of digits sit in an interval of width below `l N`.
    NarrowInterval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PccResult {
    pub holds: bool,
    pub condition: Option<PccCondition>,
    /// Largest window fraction per materialized stage.
    pub window_ratios: Vec<BigRational>,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PccError {
    #[error("concentration parameter must lie strictly between 0 and 1")]
    InvalidL,
    #[error(transparent)]
    Moran(#[from] MoranError),
}

/// Digits of `s` inside `[l N / 2, (1 - l / 2) N]`.
fn window_count(s: &Stage, l: &BigRational) -> usize {
    count_in_window(s.digits.elements().iter().cloned(), s.scale, l)
}

fn count_in_window(digits: impl Iterator<Item = BigInt>, scale: u64, l: &BigRational) -> usize {
    let n = BigRational::from_integer(BigInt::from(scale));
    let two = BigRational::from_integer(BigInt::from(2));
    let lo = l * &n / &two;
    let hi = (BigRational::one() - l / &two) * &n;
    digits
        .map(BigRational::from_integer)
        .filter(|b| b >= &lo && b <= &hi)
        .count()
}

/// All digits in `[0, N - 1]` within an interval of relative width below `l`.
fn narrow(s: &Stage, l: &BigRational) -> bool {
    let (lo, hi) = (s.digits.min(), s.digits.max());
    !lo.is_negative()
        && hi < &BigInt::from(s.scale)
        && BigRational::from_integer(hi - lo) < l * BigRational::from_integer(BigInt::from(s.scale))
}

/// Tries the window-mass condition, then the narrow-interval condition, on
/// some infinite subsequence of stages.
pub fn check_pcc(seq: &MoranSequence, l: &BigRational, horizon: usize) -> Result<PccResult, PccError> {
    if !l.is_positive() || l >= &BigRational::one() {
        return Err(PccError::InvalidL);
    }
    let stages = seq.stages(horizon)?;
    let window_ratios = stages
        .iter()
        .map(|s| BigRational::new(BigInt::from(window_count(s, l)), BigInt::from(s.size())))
        .collect();
    let (condition, witness) = pcc_rule(seq, l);
    Ok(PccResult {
        holds: condition.is_some(),
        condition,
        window_ratios,
        witness,
    })
}

fn pcc_rule(seq: &MoranSequence, l: &BigRational) -> (Option<PccCondition>, String) {
    match seq.tail() {
        Tail::Empty => (None, "a finite sequence has no infinite subsequence".into()),
        Tail::Periodic(period) => {
            let best = period
                .iter()
                .map(|s| BigRational::new(BigInt::from(window_count(s, l)), BigInt::from(s.size())))
                .enumerate()
                .max_by(|a, b| a.1.cmp(&b.1))
                .expect("nonempty period");
            if best.1.is_positive() {
                return (
                    Some(PccCondition::WindowMass { c: best.1.clone() }),
                    format!(
                        "repeating stage {} puts {} of its digits in the window",
                        period[best.0], best.1
                    ),
                );
            }
            if let Some(s) = period.iter().find(|s| narrow(s, l)) {
                return (
                    Some(PccCondition::NarrowInterval),
                    format!("repeating stage {s} has all digits in an interval narrower than l N"),
                );
            }
            (None, "no repeating stage meets either condition".into())
        }
        Tail::Consecutive { size, scale } | Tail::ShiftedTop { size, scale, .. } => {
            let shifted = matches!(seq.tail(), Tail::ShiftedTop { .. });
            family_pcc(
                size.poly().expect("checked"),
                scale.poly().expect("checked"),
                shifted,
                l,
            )
        }
    }
}

fn family_pcc(m: IntPolynomial, n: IntPolynomial, shifted: bool, l: &BigRational) -> (Option<PccCondition>, String) {
    // Digits {0, ..., bulk} are always present.
    let bulk = if shifted {
        &m - &IntPolynomial::from_i64(&[2])
    } else {
        &m - &IntPolynomial::one()
    };
    let (lp, lq) = (l.numer().clone(), l.denom().clone());
    if m.is_constant() && n.is_constant() {
        // Count the bulk digits only; a shifted top digit is ignored.
        let mv = m.eval_i64(0).to_u64().expect("validated");
        let nv = n.eval_i64(0).to_u64().expect("validated");
        let top = bulk.eval_i64(0).to_u64().expect("validated");
        let count = count_in_window((0..=top).map(BigInt::from), nv, l);
        if count > 0 {
            let c = BigRational::new(BigInt::from(count), BigInt::from(mv));
            return (
                Some(PccCondition::WindowMass { c: c.clone() }),
                format!("constant stage size {mv} and scale {nv}: window fraction at least {c}"),
            );
        }
        return (None, "constant family stage has no bulk digits in the window".into());
    }
    // Window mass: N <= 2 (bulk + 1) eventually and N unbounded give a
    // fraction at least (1 - l) / 4 for all large k.
    let room = &(&bulk + &IntPolynomial::one()).scale(&BigInt::from(2)) - &n;
    if n.degree().is_some_and(|d| d >= 1) && eventually_nonneg(&room) {
        let c = (BigRational::one() - l) / BigRational::from_integer(BigInt::from(4));
        return (
            Some(PccCondition::WindowMass { c: c.clone() }),
            format!("N(k) <= 2 (top bulk digit + 1) eventually and N(k) unbounded: fraction >= {c} for large k"),
        );
    }
    // Narrow interval [0, max(bulk, 1)]: q * max(bulk, 1) < p N eventually.
    let width = if bulk.is_constant() && bulk.eval_i64(0) < BigInt::one() {
        IntPolynomial::one()
    } else {
        bulk.clone()
    };
    let slack = &n.scale(&lp) - &width.scale(&lq);
    if eventually_positive(&slack) {
        if !shifted {
            return (
                Some(PccCondition::NarrowInterval),
                "all digits in [0, M - 1], narrower than l N for large k".into(),
            );
        }
        match m.degree() {
            Some(d) if d >= 2 => {
                return (
                    Some(PccCondition::NarrowInterval),
                    "only the top digit leaves [0, M - 2] and sum 1/M(k) converges".into(),
                )
            }
            Some(1) => return (
                Some(PccCondition::NarrowInterval),
                "only the top digit leaves [0, M - 2]; M(k) is unbounded, so a sparse subsequence has sum 1/M finite"
                    .into(),
            ),
            _ => {}
        }
    }
    (None, "no family rule certifies either condition".into())
}
