//! Exact vanishing test for integer combinations of roots of unity.
//!
//! Decides whether `sum_e c_e * zeta^e = 0` for a primitive `n`-th root of
//! unity `zeta`, without building the cyclotomic polynomial of order `n`.
//! The test descends through the tower of cyclotomic fields one prime at a
//! time:
//!
//! * `p^2 | n`: `1, zeta, ..., zeta^(p-1)` is a basis of `Q(zeta_n)` over
//!   `Q(zeta_(n/p))`, so the sum vanishes iff each residue class of exponents
//!   modulo `p` vanishes at order `n/p`.
//! * `p || n`: over `Q(zeta_m)` with `m = n/p` the only relation among the
//!   powers of `zeta_p` is `1 + zeta_p + ... + zeta_p^(p-1) = 0`, so the sum
//!   vanishes iff all class sums agree.
//! * primes above the number of terms can be split off in one step, which
//!   lets huge orders with unknown large factors be handled.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::IntPolynomial;
use crate::arith::{factor_biguint, TRIAL_DIVISION_BOUND};

type Terms = BTreeMap<BigUint, BigInt>;

/// `f(zeta_n) == 0` for a primitive `n`-th root of unity, i.e. `Phi_n | f`.
pub fn vanishes_at_primitive_root(f: &IntPolynomial, n: u64) -> bool {
    let terms: Vec<(BigInt, BigInt)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (BigInt::from(i), c.clone()))
        .collect();
    root_of_unity_sum_vanishes(&terms, &BigUint::from(n))
}

/// Whether `sum c * zeta^e` over `(e, c)` vanishes for a primitive `n`-th root
/// of unity. Exponents may be negative or exceed `n`. Panics if `n == 0`.
pub fn root_of_unity_sum_vanishes(terms: &[(BigInt, BigInt)], n: &BigUint) -> bool {
    assert!(!n.is_zero(), "root of unity of order zero");
    let modulus = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut map = Terms::new();
    for (e, c) in terms {
        let r = e.mod_floor(&modulus).to_biguint().expect("nonnegative residue");
        *map.entry(r).or_default() += c;
    }
    map.retain(|_, c| !c.is_zero());
    if map.is_empty() {
        return true;
    }
    let fact = factor_biguint(n, TRIAL_DIVISION_BOUND);
    let mut primes: Vec<(BigUint, u32)> = fact.primes.iter().map(|&(p, e)| (BigUint::from(p), e)).collect();
    if !fact.cofactor.is_one() {
        // The cofactor has no prime factor below the bound. With fewer terms
        // than that bound every exponent class modulo the cofactor must vanish
        // on its own.
        assert!(
            (map.len() as u64) < TRIAL_DIVISION_BOUND,
            "too many terms for large-order reduction"
        );
        let m: BigUint = primes.iter().map(|(p, e)| p.pow(*e)).product();
        let mut classes: BTreeMap<BigUint, Terms> = BTreeMap::new();
        for (e, c) in map {
            let cls = &e % &fact.cofactor;
            *classes.entry(cls).or_default().entry(&e % &m).or_default() += c;
        }
        return classes.into_values().all(|t| vanish(t, &mut primes.clone()));
    }
    vanish(map, &mut primes)
}

fn order(primes: &[(BigUint, u32)]) -> BigUint {
    primes.iter().map(|(p, e)| p.pow(*e)).product()
}

fn vanish(mut terms: Terms, primes: &mut Vec<(BigUint, u32)>) -> bool {
    terms.retain(|_, c| !c.is_zero());
    if terms.is_empty() {
        return true;
    }
    primes.retain(|(_, e)| *e > 0);
    if primes.is_empty() {
        // Order one: every term equals one.
        return terms.values().fold(BigInt::zero(), |a, c| a + c).is_zero();
    }
    if terms.len() == 1 {
        return false;
    }

    if let Some(idx) = primes.iter().position(|(_, e)| *e >= 2) {
        let p = primes[idx].0.clone();
        let mut reduced = primes.clone();
        reduced[idx].1 -= 1;
        let sub_n = order(&reduced);
        let mut classes: BTreeMap<BigUint, Terms> = BTreeMap::new();
        for (e, c) in terms {
            let r = &e % &p;
            let shifted = ((&e - &r) / &p) % &sub_n;
            *classes.entry(r).or_default().entry(shifted).or_default() += c;
        }
        return classes.into_values().all(|t| vanish(t, &mut reduced.clone()));
    }

    // Squarefree order: peel off the largest prime.
    let (p, _) = primes.pop().expect("nonempty");
    let rest = primes.clone();
    let m = order(&rest);
    let mut classes: BTreeMap<BigUint, Terms> = BTreeMap::new();
    for (e, c) in terms {
        let r = &e % &p;
        *classes.entry(r).or_default().entry(&e % &m).or_default() += c;
    }
    let inhabited = classes.len();
    let p_small = p.to_usize();
    if p_small.is_none_or(|ps| inhabited < ps) {
        // An empty class forces every class sum to vanish.
        return classes.into_values().all(|t| vanish(t, &mut rest.clone()));
    }
    let mut iter = classes.into_values();
    let first = iter.next().expect("nonempty");
    iter.all(|t| {
        let mut diff = t;
        for (e, c) in &first {
            *diff.entry(e.clone()).or_default() -= c;
        }
        vanish(diff, &mut rest.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::cyclotomic;
    use std::f64::consts::PI;

    fn float_sum(terms: &[(i64, i64)], n: u64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for &(e, c) in terms {
            let t = 2.0 * PI * (e.rem_euclid(n as i64) as f64) / n as f64;
            re += c as f64 * t.cos();
            im += c as f64 * t.sin();
        }
        (re * re + im * im).sqrt()
    }

    fn big(terms: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        terms.iter().map(|&(e, c)| (BigInt::from(e), BigInt::from(c))).collect()
    }

    #[test]
    fn simple_relations() {
        // 1 + zeta_2 = 0
        assert!(root_of_unity_sum_vanishes(
            &big(&[(0, 1), (1, 1)]),
            &BigUint::from(2u32)
        ));
        // 1 + zeta_3 + zeta_3^2 = 0
        assert!(root_of_unity_sum_vanishes(
            &big(&[(0, 1), (1, 1), (2, 1)]),
            &BigUint::from(3u32)
        ));
        // 1 + zeta_4 != 0
        assert!(!root_of_unity_sum_vanishes(
            &big(&[(0, 1), (1, 1)]),
            &BigUint::from(4u32)
        ));
        // zeta_6^0 - zeta_6^1 + zeta_6^2 = 0 (Phi_6(zeta_6) = 0)
        assert!(root_of_unity_sum_vanishes(
            &big(&[(0, 1), (1, -1), (2, 1)]),
            &BigUint::from(6u32)
        ));
        // Order one.
        assert!(!root_of_unity_sum_vanishes(&big(&[(5, 1)]), &BigUint::from(1u32)));
    }

    #[test]
    fn agrees_with_cyclotomic_division() {
        // Every 0/1 polynomial of degree < 9 against every order up to 40.
        for mask in 1u32..(1 << 9) {
            let exps: Vec<usize> = (0..9).filter(|i| mask & (1 << i) != 0).collect();
            let f = IntPolynomial::from_exponents(exps.iter().copied());
            for n in 1..=40u64 {
                let by_division = f
                    .fold_mod_x_pow_minus_one(n as usize)
                    .divide_exact(&cyclotomic(n))
                    .is_some()
                    || f.fold_mod_x_pow_minus_one(n as usize).is_zero();
                assert_eq!(vanishes_at_primitive_root(&f, n), by_division, "f = {f}, n = {n}");
            }
        }
    }

    #[test]
    fn agrees_with_floating_point() {
        let cases: &[&[(i64, i64)]] = &[
            &[(0, 1), (3, 1)],
            &[(0, 1), (5, 1), (10, 1)],
            &[(0, 2), (7, -1), (14, -1)],
            &[(0, 1), (2, 1), (4, 1)],
            &[(1, 1), (8, -1), (15, 1), (22, -1)],
        ];
        for terms in cases {
            for n in 1..=120u64 {
                let exact = root_of_unity_sum_vanishes(&big(terms), &BigUint::from(n));
                let numeric = float_sum(terms, n) < 1e-9;
                assert_eq!(exact, numeric, "terms {terms:?}, n = {n}");
            }
        }
    }

    #[test]
    fn huge_orders() {
        // 1 + zeta^(n/2) = 0 for n = 2 * 4^40.
        let n = BigUint::from(2u32) * BigUint::from(4u32).pow(40);
        let half = BigInt::from_biguint(Sign::Plus, &n / 2u32);
        assert!(root_of_unity_sum_vanishes(
            &[(BigInt::zero(), BigInt::one()), (half.clone(), BigInt::one())],
            &n
        ));
        assert!(!root_of_unity_sum_vanishes(
            &[(BigInt::zero(), BigInt::one()), (half + 1, BigInt::one())],
            &n
        ));
        // Large prime cofactor: 1 + zeta^(n/2) with n = 2 * (2^61 - 1).
        let q = BigUint::from((1u64 << 61) - 1);
        let n = BigUint::from(2u32) * &q;
        let e = BigInt::from_biguint(Sign::Plus, q.clone());
        assert!(root_of_unity_sum_vanishes(
            &[(BigInt::zero(), BigInt::one()), (e, BigInt::one())],
            &n
        ));
        assert!(!root_of_unity_sum_vanishes(
            &[(BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::one())],
            &n
        ));
    }
}
