//! Small number-theoretic helpers shared by the polynomial and digit-set code.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Trial-division bound used when factoring large denominators.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 20;

/// Divisors of `n` in ascending order. `divisors(0)` is empty.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorisation of `n` as `(prime, exponent)` pairs, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factor_u64(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Möbius function.
pub fn moebius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Totients of `0..=limit` by sieve (`phi[0] = 0`).
pub fn totient_table(limit: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = (0..=limit as u32).collect();
    for p in 2..=limit {
        if phi[p] == p as u32 {
            let mut m = p;
            while m <= limit {
                phi[m] -= phi[m] / p as u32;
                m += p;
            }
        }
    }
    phi
}

/// Partial factorisation of a big integer.
///
/// Every prime below `bound` is split off; `cofactor` is what remains. When
/// the loop terminates early (`p * p > remaining`) the remainder is prime and is
/// moved into `primes`, so a cofactor other than one has only prime factors of
/// at least `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub primes: Vec<(u64, u32)>,
    pub cofactor: BigUint,
}

pub fn factor_biguint(n: &BigUint, bound: u64) -> PartialFactorization {
    if let Some(small) = n.to_u64() {
        if small <= bound.saturating_mul(bound) {
            return PartialFactorization {
                primes: factor_u64(small),
                cofactor: BigUint::one(),
            };
        }
    }
    let mut rest = n.clone();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < bound {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let bp = BigUint::from(p);
    if rest > BigUint::one() && (&bp * &bp > rest || rest.to_u64().is_some_and(|r| r < bound)) {
        // `rest` has no factor below p, and p^2 > rest: it is prime.
        if let Some(r) = rest.to_u64() {
            match primes.iter_mut().find(|(q, _)| *q == r) {
                Some(entry) => entry.1 += 1,
                None => primes.push((r, 1)),
            }
            primes.sort_unstable();
            rest = BigUint::one();
        }
    }
    PartialFactorization { primes, cofactor: rest }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
