//! Classification of the roots of an integer polynomial on the unit circle.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::cyclotomic::strip_cyclotomic;
use super::{cyclotomic_factors, IntPolynomial, PolyError};

/// Which unit-circle roots a polynomial has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCircleRootProfile {
    /// Orders `n` with `Phi_n | f`.
    pub root_of_unity_orders: BTreeSet<u64>,
    /// Whether some unimodular root is not a root of unity.
    pub has_irrational_unimodular: bool,
    /// Number of distinct unimodular roots that are not roots of unity.
    pub residual_degree: usize,
}

/// Exact unit-circle root profile of `f`.
///
/// Unimodular roots of a real polynomial are closed under `z -> 1/z`, so they
/// all divide `g = gcd(f, reverse(f))`. After removing cyclotomic factors
/// from `g` the remainder `h` is reciprocal of even degree `2m`, and
/// `h(x) = x^m H(x + 1/x)`. Roots of `h` on the circle correspond two-to-one
/// to roots of `H` in `(-2, 2)`, which a Sturm sequence counts.
pub fn unit_circle_profile(f: &IntPolynomial) -> Result<UnitCircleRootProfile, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let root_of_unity_orders = cyclotomic_factors(f)?;
    let (core, _) = f.strip_x_power();
    let g = core.gcd(&core.reverse()).primitive_part();
    let (h, _) = strip_cyclotomic(&g)?;
    let residual_degree = if h.is_constant() {
        0
    } else {
        let half = reciprocal_half(&h);
        2 * sturm_count_open_interval(&half, &BigInt::from(-2), &BigInt::from(2))
    };
    Ok(UnitCircleRootProfile {
        root_of_unity_orders,
        has_irrational_unimodular: residual_degree > 0,
        residual_degree,
    })
}

/// For a reciprocal polynomial `h` of degree `2m` returns `H` of degree `m`
/// with `h(x) = x^m H(x + 1/x)`.
fn reciprocal_half(h: &IntPolynomial) -> IntPolynomial {
    let c = h.coeffs();
    let deg = c.len() - 1;
    debug_assert!(deg.is_multiple_of(2), "reciprocal residual of odd degree");
    debug_assert!(c.iter().eq(c.iter().rev()), "residual is not reciprocal");
    let m = deg / 2;
    // D_j(t) = x^j + x^-j with t = x + 1/x: D_0 = 2, D_1 = t, D_{j+1} = t D_j - D_{j-1}.
    let t = IntPolynomial::from_i64(&[0, 1]);
    let mut d_prev = IntPolynomial::from_i64(&[2]);
    let mut d_cur = t.clone();
    let mut out = IntPolynomial::constant(c[m].clone());
    for j in 1..=m {
        if j > 1 {
            let next = &(&t * &d_cur) - &d_prev;
            d_prev = std::mem::replace(&mut d_cur, next);
        }
        out = &out + &d_cur.scale(&c[m + j]);
    }
    out
}

fn sign_at(p: &IntPolynomial, x: &BigInt) -> i8 {
    let v = p.eval(x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_changes(seq: &[IntPolynomial], x: &BigInt) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| sign_at(p, x)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Sturm sequence with the sign of each remainder preserved exactly.
fn sturm_sequence(p: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let (a, b) = (&seq[n - 2], &seq[n - 1]);
        if b.is_zero() || b.is_constant() {
            break;
        }
        // prem = lc(b)^k * a mod b; divide by that positive-or-negative factor's sign.
        let k = a.degree().unwrap() + 1 - b.degree().unwrap();
        let mut r = -&a.pseudo_rem(b);
        if b.leading().unwrap().is_negative() && k % 2 == 1 {
            r = -&r;
        }
        if r.is_zero() {
            break;
        }
        let c = r.content();
        r = IntPolynomial::new(r.coeffs().iter().map(|x| x / &c).collect());
        seq.push(r);
    }
    seq.retain(|q| !q.is_zero());
    seq
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
/// Neither endpoint may be a root.
pub fn sturm_count_open_interval(p: &IntPolynomial, lo: &BigInt, hi: &BigInt) -> usize {
    if p.is_constant() {
        return 0;
    }
    debug_assert!(!p.eval(lo).is_zero() && !p.eval(hi).is_zero());
    let seq = sturm_sequence(p);
    sign_changes(&seq, lo).saturating_sub(sign_changes(&seq, hi))
}
