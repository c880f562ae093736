//! Digit sets: residue checks, character polynomials, mask zero sets and the
//! uniform discrete zero test.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::gcd_u64;
use crate::intpoly::{root_of_unity_sum_vanishes, unit_circle_profile, IntPolynomial, PolyError};

/// Largest numerator degree for which a character polynomial is built densely.
pub const DENSE_DEGREE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("digit set is empty")]
    Empty,
    #[error("digit {0} appears more than once")]
    Duplicate(BigInt),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("digit set is not a complete residue system modulo {modulus}")]
    NotCrs { modulus: u64 },
    #[error("exact division by 1 + x + ... + x^(M-1) failed")]
    InternalDivisionFailure,
    #[error("digit span {span} exceeds the dense limit {limit}")]
    TooLarge { span: BigInt, limit: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Finite set of integer digits with a claimed modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSet {
    elements: Vec<BigInt>,
    modulus: u64,
}

impl DigitSet {
    /// Sorts the digits; rejects empty sets, repeats and a zero modulus.
    pub fn new(mut elements: Vec<BigInt>, modulus: u64) -> Result<Self, ResidueError> {
        if elements.is_empty() {
            return Err(ResidueError::Empty);
        }
        if modulus == 0 {
            return Err(ResidueError::ZeroModulus);
        }
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(ResidueError::Duplicate(w[0].clone()));
        }
        Ok(Self { elements, modulus })
    }

    pub fn from_i64(elements: &[i64], modulus: u64) -> Result<Self, ResidueError> {
        Self::new(elements.iter().map(|&b| BigInt::from(b)).collect(), modulus)
    }

    /// Digits `{b : b in B}` with the modulus taken as `#B`.
    pub fn with_own_modulus(elements: Vec<BigInt>) -> Result<Self, ResidueError> {
        let m = elements.len() as u64;
        Self::new(elements, m.max(1))
    }

    /// `{0, 1, ..., m - 1}`.
    pub fn consecutive(m: u64) -> Self {
        assert!(m >= 1, "empty consecutive set");
        Self {
            elements: (0..m).map(BigInt::from).collect(),
            modulus: m,
        }
    }

    /// `{0, 1, ..., m - 2, n m - 1}`; requires `m >= 2` and `n >= 1`.
    pub fn shifted_top(m: u64, n: &BigInt) -> Self {
        assert!(m >= 2 && n.is_positive(), "shifted-top set needs m >= 2 and n >= 1");
        let mut elements: Vec<BigInt> = (0..m - 1).map(BigInt::from).collect();
        elements.push(n * BigInt::from(m) - 1);
        Self { elements, modulus: m }
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Smallest digit.
    pub fn min(&self) -> &BigInt {
        &self.elements[0]
    }

    pub fn max(&self) -> &BigInt {
        self.elements.last().expect("nonempty")
    }

    pub fn translate(&self, c: &BigInt) -> Self {
        Self {
            elements: self.elements.iter().map(|b| b + c).collect(),
            modulus: self.modulus,
        }
    }

    /// Whether the digits are exactly `{0, ..., #B - 1}`.
    pub fn is_consecutive_from_zero(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, b)| *b == BigInt::from(i))
    }

    /// Whether the digits are `#B` consecutive integers starting anywhere.
    pub fn is_consecutive_run(&self) -> bool {
        let lo = self.min();
        self.elements.iter().enumerate().all(|(i, b)| b - lo == BigInt::from(i))
    }

    /// Split against the window `[0, n - 1]`: digits inside and digits outside.
    pub fn split_at_scale(&self, n: u64) -> (Vec<&BigInt>, Vec<&BigInt>) {
        let top = BigInt::from(n);
        self.elements.iter().partition(|b| !b.is_negative() && *b < &top)
    }

    /// Number of digits outside `[0, n - 1]`.
    pub fn outside_count(&self, n: u64) -> usize {
        self.split_at_scale(n).1.len()
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}} mod {}", self.modulus)
    }
}

/// Reduced angle `num / den` in `[0, 1)`, ordered by denominator first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle {
    pub den: u64,
    pub num: u64,
}

impl Angle {
    /// Reduces `num / den` modulo one. Panics on a zero denominator.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "angle with zero denominator");
        let num = num % den;
        let g = gcd_u64(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A zero of the character polynomial on the circle, as an angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroAngle {
    Rational(Angle),
    /// Some unimodular zero is not a root of unity.
    Irrational,
}

impl fmt::Display for ZeroAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroAngle::Rational(a) => a.fmt(f),
            ZeroAngle::Irrational => write!(f, "irrational"),
        }
    }
}

/// Zeros of the mask in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskZeroSet {
    pub rational_angles: BTreeSet<Angle>,
    pub has_irrational_angles: bool,
}

/// Outcome of the uniform discrete zero test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UdzResult {
    pub holds: bool,
    pub witness: Option<ZeroAngle>,
}

/// `#B == M` and the residues modulo `M` are all distinct.
pub fn is_complete_residue_system(b: &DigitSet) -> bool {
    let m = b.modulus;
    if b.len() as u64 != m {
        return false;
    }
    let modulus = BigInt::from(m);
    let mut seen = vec![false; m as usize];
    for d in &b.elements {
        let r = d.mod_floor(&modulus).to_usize().expect("residue below modulus");
        if std::mem::replace(&mut seen[r], true) {
            return false;
        }
    }
    true
}

fn require_crs(b: &DigitSet) -> Result<(), ResidueError> {
    if is_complete_residue_system(b) {
        Ok(())
    } else {
        Err(ResidueError::NotCrs { modulus: b.modulus })
    }
}

/// `sum_b x^(b - b_min)` as a dense polynomial.
pub fn normalized_digit_polynomial(b: &DigitSet) -> Result<IntPolynomial, ResidueError> {
    let span = b.max() - b.min();
    let span_usize = span.to_usize().filter(|&s| s <= DENSE_DEGREE_LIMIT);
    let Some(_) = span_usize else {
        return Err(ResidueError::TooLarge {
            span,
            limit: DENSE_DEGREE_LIMIT,
        });
    };
    let lo = b.min();
    Ok(IntPolynomial::from_exponents(
        b.elements.iter().map(|d| (d - lo).to_usize().expect("bounded span")),
    ))
}

/// `f_B = (sum_b x^(b - b_min)) / (1 + x + ... + x^(M-1))`.
pub fn character_polynomial(b: &DigitSet) -> Result<IntPolynomial, ResidueError> {
    require_crs(b)?;
    let num = normalized_digit_polynomial(b)?;
    let den = IntPolynomial::geometric(b.modulus as usize);
    let f = num.divide_exact(&den).ok_or(ResidueError::InternalDivisionFailure)?;
    debug_assert_eq!(f.eval_i64(1), BigInt::one());
    Ok(f)
}

/// Zeros of `M_B` in `[0, 1)`: the `j/M` from the geometric factor and every
/// unimodular zero of `f_B`.
pub fn mask_zero_set(b: &DigitSet) -> Result<MaskZeroSet, ResidueError> {
    let f = character_polynomial(b)?;
    let profile = unit_circle_profile(&f)?;
    let m = b.modulus;
    let mut rational_angles: BTreeSet<Angle> = (1..m).map(|j| Angle::new(j, m)).collect();
    for &n in &profile.root_of_unity_orders {
        rational_angles.extend((0..n).filter(|&j| gcd_u64(j, n) == 1).map(|j| Angle::new(j, n)));
    }
    Ok(MaskZeroSet {
        rational_angles,
        has_irrational_angles: profile.has_irrational_unimodular,
    })
}

/// Whether every zero angle of `f_B` lies in `{j/M : M does not divide j}`.
///
/// On failure the witness is the violating angle with the smallest
/// denominator, then numerator; irrational zeros are reported only when no
/// rational angle violates.
pub fn satisfies_udz(b: &DigitSet) -> Result<UdzResult, ResidueError> {
    let f = character_polynomial(b)?;
    let profile = unit_circle_profile(&f)?;
    // Reduced angles of order n lie in (1/M)Z \ Z exactly when n | M (and n > 1,
    // which always holds since f_B(1) = 1).
    let bad = profile
        .root_of_unity_orders
        .iter()
        .find(|&&n| !b.modulus.is_multiple_of(n));
    let witness = match bad {
        Some(&n) => Some(ZeroAngle::Rational(Angle::new(1, n))),
        None if profile.has_irrational_unimodular => Some(ZeroAngle::Irrational),
        None => None,
    };
    Ok(UdzResult {
        holds: witness.is_none(),
        witness,
    })
}

/// Exact test of `M_B(q) = 0`.
///
/// With `q = j/n` reduced, `M_B(q)` is a sum of `n`-th roots of unity and
/// vanishes iff `Phi_n` divides `sum_b x^(b - b_min)`. Integer `q` never
/// vanishes.
pub fn mask_is_zero_at(b: &DigitSet, q: &BigRational) -> bool {
    let n = q.denom();
    if n.is_one() {
        return false;
    }
    let j = q.numer();
    let lo = b.min();
    let terms: Vec<(BigInt, BigInt)> = b.elements.iter().map(|d| ((d - lo) * j, BigInt::one())).collect();
    let order = n.magnitude().clone();
    debug_assert!(n.sign() == Sign::Plus);
    root_of_unity_sum_vanishes(&terms, &order)
}

/// `mask_is_zero_at` for `num / den` with machine-size inputs.
pub fn mask_is_zero_at_fraction(b: &DigitSet, num: i64, den: u64) -> bool {
    assert!(den > 0, "zero denominator");
    mask_is_zero_at(b, &BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Reference route for `mask_is_zero_at` through dense cyclotomic division;
/// only for small denominators.
pub fn mask_is_zero_at_by_division(b: &DigitSet, num: i64, den: u64) -> bool {
    let a = Angle::new(num.rem_euclid(den as i64) as u64, den);
    if a.den == 1 {
        return false;
    }
    let n = a.den as usize;
    let lo = b.min();
    let modulus = BigInt::from(n);
    let exps = b.elements.iter().map(|d| {
        ((d - lo) * BigInt::from(a.num))
            .mod_floor(&modulus)
            .to_usize()
            .expect("reduced exponent")
    });
    let mut coeffs = vec![BigInt::zero(); n];
    for e in exps {
        coeffs[e] += 1;
    }
    let g = IntPolynomial::new(coeffs);
    g.is_zero() || g.divide_exact(&crate::intpoly::cyclotomic(a.den)).is_some()
}
