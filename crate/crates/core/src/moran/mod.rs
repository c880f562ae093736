//! Sequences of scales and digit sets, their structural conditions and the
//! spectrality verdict.

mod conditions;
mod formula;
mod hadamard;
mod verdict;

pub(crate) use conditions::{family_inside_certified, rbc_status};

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::residue::DigitSet;

pub use conditions::{
    check_pcc, check_rbc, divides_from, divisibility_profile, nonneg_from, DivisibilityProfile, DivisibilityVerdict,
    PccCondition, PccError, PccResult, RbcResult, RbcStatus, SignCheck,
};
pub use formula::{Expr, Formula, FormulaError};
pub use hadamard::{best_frequency_set, find_hadamard_l, search_hadamard_l, HadamardSearch, HadamardTriple};
pub use verdict::{
    apply_rule, decide_spectrality, first_stage_admissible_up_to_scale, Outcome, Precondition, Rule, Verdict,
    SEARCH_SCALE_LIMIT,
};

/// Largest digit count materialized for one stage.
pub const MAX_DIGITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoranError {
    #[error("stage {k} is beyond the end of a finite sequence")]
    OutOfRange { k: u64 },
    /// `k` is 0 while the stage has no position yet.
    #[error("{}", stage_message(*.k, .reason))]
    InvalidStage { k: u64, reason: String },
    #[error("family rule: {0}")]
    InvalidFamily(String),
    #[error("stage index must be at least 1")]
    ZeroIndex,
}

fn stage_message(k: u64, reason: &str) -> String {
    if k == 0 {
        reason.to_string()
    } else {
        format!("stage {k}: {reason}")
    }
}

/// One factor `(N, B)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stage {
    pub scale: u64,
    pub digits: DigitSet,
}

impl Stage {
    /// Checks `N >= #B >= 2`; the digit set takes `#B` as its modulus.
    pub fn new(scale: u64, digits: Vec<BigInt>) -> Result<Self, MoranError> {
        let digits = DigitSet::with_own_modulus(digits).map_err(|e| MoranError::InvalidStage {
            k: 0,
            reason: e.to_string(),
        })?;
        Self::from_digit_set(scale, digits)
    }

    pub fn from_digit_set(scale: u64, digits: DigitSet) -> Result<Self, MoranError> {
        let m = digits.len() as u64;
        let bad = |reason: String| Err(MoranError::InvalidStage { k: 0, reason });
        if m < 2 {
            return bad("a digit set needs at least two digits".into());
        }
        if digits.modulus() != m {
            return bad(format!("modulus {} differs from the digit count {m}", digits.modulus()));
        }
        if scale < m {
            return bad(format!("scale {scale} is smaller than the digit count {m}"));
        }
        Ok(Self { scale, digits })
    }

    pub fn from_i64(scale: u64, digits: &[i64]) -> Result<Self, MoranError> {
        Self::new(scale, digits.iter().map(|&b| BigInt::from(b)).collect())
    }

    /// Digit count `M = #B`.
    pub fn size(&self) -> u64 {
        self.digits.len() as u64
    }

    /// Re-validates, attaching the stage index to errors.
    fn at(self, k: u64) -> Result<Self, MoranError> {
        Self::from_digit_set(self.scale, self.digits).map_err(|e| match e {
            MoranError::InvalidStage { reason, .. } => MoranError::InvalidStage { k, reason },
            other => other,
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.scale)?;
        for (i, b) in self.digits.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}})")
    }
}

/// Rule generating the stages after the explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    /// The sequence stops after the prefix.
    Empty,
    /// The listed stages repeat forever.
    Periodic(Vec<Stage>),
    /// `B_k = {0, ..., M(k) - 1}` with scale `N(k)`.
    Consecutive { size: Formula, scale: Formula },
    /// `B_k = {0, ..., M(k) - 2, n(k) M(k) - 1}` with scale `N(k)`; `n` may use
    /// `P = N_1 N_2 ... N_k`.
    ShiftedTop {
        size: Formula,
        multiplier: Formula,
        scale: Formula,
    },
}

impl Tail {
    pub fn is_family(&self) -> bool {
        matches!(self, Tail::Consecutive { .. } | Tail::ShiftedTop { .. })
    }

    pub fn size_formula(&self) -> Option<&Formula> {
        match self {
            Tail::Consecutive { size, .. } | Tail::ShiftedTop { size, .. } => Some(size),
            _ => None,
        }
    }

    pub fn scale_formula(&self) -> Option<&Formula> {
        match self {
            Tail::Consecutive { scale, .. } | Tail::ShiftedTop { scale, .. } => Some(scale),
            _ => None,
        }
    }
}

/// Explicit prefix followed by a tail rule.
///
/// Family formulas are evaluated at the original index: after dropping `s`
/// leading stages, position `j` still uses `k = j + s`, and `P` keeps the
/// dropped scales as a carried factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoranSequence {
    prefix: Vec<Stage>,
    tail: Tail,
    index_offset: u64,
    carried_product: BigUint,
}

impl MoranSequence {
    /// Builds and validates a sequence. Family tails are certified for
    /// `M(k) >= 2`, `N(k) >= M(k)` and `n(k) >= 0` at every index they cover.
    pub fn new(prefix: Vec<Stage>, tail: Tail) -> Result<Self, MoranError> {
        let seq = Self {
            prefix,
            tail,
            index_offset: 0,
            carried_product: BigUint::one(),
        };
        if let Tail::Periodic(p) = &seq.tail {
            if p.is_empty() {
                return Err(MoranError::InvalidFamily("periodic tail with an empty period".into()));
            }
        }
        if seq.prefix.is_empty() && seq.tail == Tail::Empty {
            return Err(MoranError::InvalidFamily("sequence has no stages".into()));
        }
        seq.validate_family()?;
        Ok(seq)
    }

    /// Periodic sequence without a prefix.
    pub fn periodic(period: Vec<Stage>) -> Result<Self, MoranError> {
        Self::new(Vec::new(), Tail::Periodic(period))
    }

    pub fn prefix(&self) -> &[Stage] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn index_offset(&self) -> u64 {
        self.index_offset
    }

    pub fn carried_product(&self) -> &BigUint {
        &self.carried_product
    }

    pub fn is_finite(&self) -> bool {
        self.tail == Tail::Empty
    }

    /// Number of stages of a finite sequence.
    pub fn finite_len(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    /// Original index `k` of the family stage at position `j`.
    pub fn family_index(&self, position: u64) -> u64 {
        position + self.index_offset
    }

    /// Original index of the first family stage.
    pub fn first_family_index(&self) -> u64 {
        self.family_index(self.prefix.len() as u64 + 1)
    }

    fn validate_family(&self) -> Result<(), MoranError> {
        let (size, scale, multiplier) = match &self.tail {
            Tail::Consecutive { size, scale } => (size, scale, None),
            Tail::ShiftedTop {
                size,
                multiplier,
                scale,
            } => (size, scale, Some(multiplier)),
            _ => return Ok(()),
        };
        let k0 = self.first_family_index();
        let poly_of = |f: &Formula, what: &str| {
            f.poly()
                .ok_or_else(|| MoranError::InvalidFamily(format!("{what} formula may not use P")))
        };
        let m = poly_of(size, "size")?;
        let n = poly_of(scale, "scale")?;
        let two = crate::intpoly::IntPolynomial::from_i64(&[2]);
        let require = |p: &crate::intpoly::IntPolynomial, what: &str| match nonneg_from(p, k0) {
            SignCheck::Always => Ok(()),
            SignCheck::FailsAt(k) => Err(MoranError::InvalidStage {
                k,
                reason: format!("{what} fails"),
            }),
            SignCheck::Undecided => Err(MoranError::InvalidFamily(format!(
                "cannot certify {what} for all k >= {k0}"
            ))),
        };
        require(&(&m - &two), "M(k) >= 2")?;
        require(&(&n - &m), "N(k) >= M(k)")?;
        if let Some(mult) = multiplier {
            for (i, c) in mult.poly_in_p().iter().enumerate() {
                let what = if i == 0 {
                    "n(k) >= 0 (constant part)".to_string()
                } else {
                    format!("n(k) >= 0 (coefficient of P^{i})")
                };
                require(c, &what)?;
            }
        }
        Ok(())
    }

    /// Stages `1..=count`, or fewer if the sequence is finite and shorter.
    pub fn stages(&self, count: usize) -> Result<Vec<Stage>, MoranError> {
        let mut out = Vec::with_capacity(count);
        let mut product = self.carried_product.clone();
        for j in 1..=count as u64 {
            let stage = match self.stage_after(j, &product, None)? {
                Some(s) => s,
                None => break,
            };
            product *= BigUint::from(stage.scale);
            out.push(stage);
        }
        Ok(out)
    }

    /// The `k`-th stage (1-based).
    pub fn materialize(&self, k: u64) -> Result<Stage, MoranError> {
        if k == 0 {
            return Err(MoranError::ZeroIndex);
        }
        let stages = self.stages(k as usize)?;
        stages
            .into_iter()
            .nth(k as usize - 1)
            .ok_or(MoranError::OutOfRange { k })
    }

    /// Stage at position `j` given `carried * N_1 ... N_(j-1)`.
    /// A family stage may have its scale overridden.
    fn stage_after(
        &self,
        j: u64,
        product_before: &BigUint,
        scale_override: Option<u64>,
    ) -> Result<Option<Stage>, MoranError> {
        let plen = self.prefix.len() as u64;
        if j <= plen {
            return Ok(Some(self.prefix[j as usize - 1].clone()));
        }
        let k = self.family_index(j);
        let bad = |reason: String| MoranError::InvalidStage { k: j, reason };
        let to_u64 = |v: BigInt, what: &str| {
            v.to_u64()
                .ok_or_else(|| bad(format!("{what} = {v} does not fit a 64-bit scale")))
        };
        match &self.tail {
            Tail::Empty => Ok(None),
            Tail::Periodic(period) => {
                let idx = ((j - plen - 1) % period.len() as u64) as usize;
                Ok(Some(period[idx].clone()))
            }
            Tail::Consecutive { size, scale } => {
                let m = to_u64(eval_k(size, k)?, "M(k)")?;
                let n = match scale_override {
                    Some(n) => n,
                    None => to_u64(eval_k(scale, k)?, "N(k)")?,
                };
                if m > MAX_DIGITS {
                    return Err(bad(format!("M(k) = {m} exceeds the digit limit {MAX_DIGITS}")));
                }
                Stage::from_digit_set(n, DigitSet::consecutive(m))
                    .and_then(|s| s.at(j))
                    .map(Some)
            }
            Tail::ShiftedTop {
                size,
                multiplier,
                scale,
            } => {
                let m = to_u64(eval_k(size, k)?, "M(k)")?;
                let n = match scale_override {
                    Some(n) => n,
                    None => to_u64(eval_k(scale, k)?, "N(k)")?,
                };
                if m > MAX_DIGITS {
                    return Err(bad(format!("M(k) = {m} exceeds the digit limit {MAX_DIGITS}")));
                }
                let p = BigInt::from_biguint(Sign::Plus, product_before * BigUint::from(n));
                let mult = multiplier.eval(k, Some(&p)).map_err(|e| bad(e.to_string()))?;
                if mult.is_negative() {
                    return Err(bad(format!("n(k) = {mult} is negative")));
                }
                let digits = shifted_top_digits(m, &mult);
                Stage::from_digit_set(n, digits).and_then(|s| s.at(j)).map(Some)
            }
        }
    }

    /// The sequence of stages `k + 1, k + 2, ...`.
    pub fn shift(&self, k: u64) -> Result<Self, MoranError> {
        if k == 0 {
            return Ok(self.clone());
        }
        let plen = self.prefix.len() as u64;
        if self.is_finite() && k >= plen {
            return Err(MoranError::OutOfRange { k: k + 1 });
        }
        let dropped = self.stages(k as usize)?;
        let mut carried = self.carried_product.clone();
        for s in &dropped {
            carried *= BigUint::from(s.scale);
        }
        let mut out = self.clone();
        out.carried_product = carried;
        if k <= plen {
            out.prefix.drain(..k as usize);
        } else {
            out.prefix.clear();
            let past = k - plen;
            if let Tail::Periodic(period) = &mut out.tail {
                let r = (past % period.len() as u64) as usize;
                period.rotate_left(r);
            }
        }
        // Positions restart at one; family indices stay the original ones.
        out.index_offset = self.index_offset + k;
        Ok(out)
    }

    /// Replaces the first scale, leaving every other stage in place. A
    /// shifted-top family recomputes its top digits from the new product.
    pub fn with_first_scale(&self, n1: u64) -> Result<Self, MoranError> {
        let mut out = self.clone();
        if !out.prefix.is_empty() {
            let first = out.prefix[0].digits.clone();
            out.prefix[0] = Stage::from_digit_set(n1, first).and_then(|s| s.at(1))?;
            return Ok(out);
        }
        let first = self
            .stage_after(1, &self.carried_product, Some(n1))?
            .ok_or(MoranError::OutOfRange { k: 1 })?;
        out.prefix
            .push(Stage::from_digit_set(n1, first.digits).and_then(|s| s.at(1))?);
        if let Tail::Periodic(period) = &mut out.tail {
            period.rotate_left(1);
        }
        // A family now starts at position 2, whose index is unchanged.
        Ok(out)
    }
}

fn eval_k(f: &Formula, k: u64) -> Result<BigInt, MoranError> {
    f.eval(k, None).map_err(|e| MoranError::InvalidFamily(e.to_string()))
}

/// `{0, ..., m - 2, n m - 1}`; for `n = 0` the top digit is `-1`.
pub fn shifted_top_digits(m: u64, n: &BigInt) -> DigitSet {
    let mut elements: Vec<BigInt> = (0..m - 1).map(BigInt::from).collect();
    elements.push(n * BigInt::from(m) - 1);
    DigitSet::new(elements, m).expect("distinct digits")
}

impl fmt::Display for MoranSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stages: Vec<String> = self.prefix.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", stages.join(", "))?;
        match &self.tail {
            Tail::Empty => Ok(()),
            Tail::Periodic(p) => {
                let s: Vec<String> = p.iter().map(ToString::to_string).collect();
                write!(f, " then repeat [{}]", s.join(", "))
            }
            Tail::Consecutive { size, scale } => {
                write!(f, " then consecutive M(k) = {size}, N(k) = {scale}")
            }
            Tail::ShiftedTop {
                size,
                multiplier,
                scale,
            } => write!(
                f,
                " then shifted top M(k) = {size}, n(k) = {multiplier}, N(k) = {scale}"
            ),
        }
    }
}
