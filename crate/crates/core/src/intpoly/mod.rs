//! Dense polynomials with arbitrary-precision integer coefficients.
//!
//! Besides ring arithmetic this module provides exact division, primitive
//! gcd, cyclotomic polynomials and the classification of roots on the unit
//! circle that the digit-set analysis relies on.

mod cyclotomic;
mod roots_of_unity;
mod unit_circle;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use cyclotomic::{cyclotomic, cyclotomic_by_division, cyclotomic_factors, max_cyclotomic_candidate};
pub use roots_of_unity::{root_of_unity_sum_vanishes, vanishes_at_primitive_root};
pub use unit_circle::{sturm_count_open_interval, unit_circle_profile, UnitCircleRootProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial is not a valid argument")]
    ZeroPolynomial,
    #[error("polynomial degree {degree} exceeds the supported limit {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
}

/// Integer polynomial, `coeffs[i]` is the coefficient of `x^i`.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^n`
    pub fn monomial(c: BigInt, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[n] = BigInt::one();
        Self::new(coeffs)
    }

    /// `1 + x + ... + x^(n-1)`
    pub fn geometric(n: usize) -> Self {
        Self::new(vec![BigInt::one(); n])
    }

    /// Sum of `x^e` over the given exponents (repeats accumulate).
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut coeffs: Vec<BigInt> = Vec::new();
        for e in exps {
            if coeffs.len() <= e {
                coeffs.resize(e + 1, BigInt::zero());
            }
            coeffs[e] += 1;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Coefficient-reversed polynomial `x^deg f(1/x)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Removes factors of `x`, returning the stripped polynomial and the power.
    pub fn strip_x_power(&self) -> (Self, usize) {
        let n = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if n == self.coeffs.len() {
            return (Self::zero(), 0);
        }
        (Self::new(self.coeffs[n..].to_vec()), n)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Gcd of the coefficients, always nonnegative (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Polynomial divided by its content, with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().is_some_and(Signed::is_negative) {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * other) + &Self::constant(c.clone()))
    }

    /// Exact quotient over the integers: `Some(q)` with `self == divisor * q`,
    /// `None` when no integer-coefficient quotient exists.
    ///
    /// Panics when `divisor` is the zero polynomial.
    pub fn divide_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dn = divisor.coeffs.len() - 1;
        if self.coeffs.len() - 1 < dn {
            return None;
        }
        let lead = &divisor.coeffs[dn];
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dn;
        let mut q = vec![BigInt::zero(); qlen];
        for i in (0..qlen).rev() {
            let top = &rem[i + dn];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            q[i] = c;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Pseudo-remainder `lc(g)^(deg f - deg g + 1) * f mod g`.
    pub fn pseudo_rem(&self, g: &Self) -> Self {
        assert!(!g.is_zero(), "division by the zero polynomial");
        let dg = g.coeffs.len() - 1;
        let lead = &g.coeffs[dg];
        let mut r = self.coeffs.clone();
        let mut steps = 0u32;
        while r.len() > dg {
            let top = r.pop().expect("nonempty");
            let shift = r.len() - dg;
            for c in r.iter_mut() {
                *c *= lead;
            }
            for (j, d) in g.coeffs[..dg].iter().enumerate() {
                r[shift + j] -= &top * d;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
            steps += 1;
        }
        let full = (self.coeffs.len() + 1).saturating_sub(g.coeffs.len()) as u32;
        let mut out = Self::new(r);
        if steps < full {
            out = out.scale(&num_traits::pow(lead.clone(), (full - steps) as usize));
        }
        out
    }

    /// Gcd over Z[x] by the primitive remainder sequence. The result is
    /// primitive with positive leading coefficient and the gcd of contents
    /// restored; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let content = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.coeffs.len() < b.coeffs.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part().scale(&content)
    }

    /// `self mod (x^n - 1)`: exponents folded modulo `n`.
    pub fn fold_mod_x_pow_minus_one(&self, n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n.min(self.coeffs.len())];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i % n] += a;
        }
        Self::new(c)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPolynomial {
    /// Ascending powers, e.g. `1 - x + x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn divide_exact_examples() {
        assert_eq!(p(&[-1, 0, 1]).divide_exact(&p(&[-1, 1])), Some(p(&[1, 1])));
        let num = p(&[1, 0, 1, 1, 1, 1, 0, 1]);
        let den = p(&[1, 1, 1, 1, 1, 1]);
        assert_eq!(num.divide_exact(&den), Some(p(&[1, -1, 1])));
        assert_eq!(p(&[1, 0, 1]).divide_exact(&p(&[1, 1])), None);
        // Rational but non-integer quotient.
        assert_eq!(p(&[1, 1]).divide_exact(&p(&[2, 2])), None);
        assert_eq!(p(&[1]).divide_exact(&p(&[1, 1])), None);
    }

    #[test]
    #[should_panic(expected = "zero polynomial")]
    fn divide_by_zero_panics() {
        let _ = p(&[1, 1]).divide_exact(&IntPolynomial::zero());
    }

    #[test]
    fn gcd_of_products() {
        let a = p(&[1, 1]); // 1 + x
        let b = p(&[-2, 0, 1]); // x^2 - 2
        let c = p(&[3, 0, 0, 1]);
        let g = (&a * &b).gcd(&(&a * &c));
        assert_eq!(g, a);
        assert_eq!(p(&[2, 4]).gcd(&p(&[6, 12])), p(&[2, 4]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[1, 1])), p(&[1]));
    }

    #[test]
    fn display_ascending() {
        assert_eq!(p(&[1, -1, 1]).to_string(), "1 - x + x^2");
        assert_eq!(p(&[0, -3]).to_string(), "-3*x");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn pseudo_remainder_identity() {
        let f = p(&[1, 2, 3, 4, 5]);
        let g = p(&[1, 0, 3]);
        let r = f.pseudo_rem(&g);
        assert!(r.degree().unwrap_or(0) < 2);
        // lc^3 * f - r must be divisible by g.
        let lhs = &f.scale(&BigInt::from(27)) - &r;
        assert!(lhs.divide_exact(&g).is_some());
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-20i64..=20, 1..=max_deg + 1).prop_map(|c| IntPolynomial::from_i64(&c))
    }

    proptest! {
        #[test]
        fn product_divides_back(f in arb_poly(12), g in arb_poly(12)) {
            prop_assume!(!g.is_zero());
            let prod = &f * &g;
            prop_assert_eq!(prod.divide_exact(&g), Some(f));
        }

        #[test]
        fn gcd_divides_both(f in arb_poly(6), g in arb_poly(6), h in arb_poly(3)) {
            prop_assume!(!h.is_zero() && !f.is_zero() && !g.is_zero());
            let a = &f * &h;
            let b = &g * &h;
            let d = a.gcd(&b);
            prop_assert!(a.divide_exact(&d).is_some());
            prop_assert!(b.divide_exact(&d).is_some());
            prop_assert!(d.divide_exact(&h.primitive_part()).is_some());
        }
    }
}
