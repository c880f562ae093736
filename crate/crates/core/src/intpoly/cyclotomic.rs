//! Cyclotomic polynomials and cyclotomic-factor extraction.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{vanishes_at_primitive_root, IntPolynomial, PolyError};
use crate::arith::{divisors, moebius, totient_table};

/// Largest order that can divide a polynomial of degree `deg`.
///
/// `phi(n) >= sqrt(n / 2)`, so `phi(n) <= deg` forces `n <= 2 deg^2`; the
/// `+ 6` covers the small exceptions.
pub fn max_cyclotomic_candidate(deg: usize) -> usize {
    2 * deg * deg + 6
}

/// The `n`-th cyclotomic polynomial `Phi_n`, from the Möbius product
/// `prod_{d | n} (x^d - 1)^mu(n/d)`.
///
/// Panics if `n == 0`.
pub fn cyclotomic(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic polynomial of order zero");
    let divs = divisors(n);
    let mut num = IntPolynomial::one();
    let mut den: Vec<usize> = Vec::new();
    for &d in &divs {
        match moebius(n / d) {
            1 => num = &num * &IntPolynomial::x_pow_minus_one(d as usize),
            -1 => den.push(d as usize),
            _ => {}
        }
    }
    for d in den {
        num = divide_by_binomial(&num, d);
    }
    num
}

/// Reference construction: `x^n - 1` divided exactly by `Phi_d` for every
/// proper divisor `d` of `n`.
pub fn cyclotomic_by_division(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic polynomial of order zero");
    let divs = divisors(n);
    let mut table: Vec<IntPolynomial> = Vec::with_capacity(divs.len());
    for (i, &m) in divs.iter().enumerate() {
        let mut acc = IntPolynomial::x_pow_minus_one(m as usize);
        for (j, &d) in divs[..i].iter().enumerate() {
            if m % d == 0 {
                acc = acc.divide_exact(&table[j]).expect("cyclotomic factor divides x^m - 1");
            }
        }
        table.push(acc);
    }
    table.pop().expect("n has at least one divisor")
}

/// Quotient by `x^d - 1`, assumed exact.
fn divide_by_binomial(f: &IntPolynomial, d: usize) -> IntPolynomial {
    // f = (x^d - 1) q  =>  q_i = q_{i+d}... solved from the top down.
    let c = f.coeffs();
    let deg = c.len() - 1;
    let qdeg = deg - d;
    let mut q = vec![BigInt::zero(); qdeg + 1];
    for i in (0..=qdeg).rev() {
        // coefficient of x^(i+d) in f equals q_i - q_{i+d}
        let upper = if i + d <= qdeg {
            q[i + d].clone()
        } else {
            BigInt::zero()
        };
        q[i] = &c[i + d] + upper;
    }
    let out = IntPolynomial::new(q);
    debug_assert_eq!(&out * &IntPolynomial::x_pow_minus_one(d), *f);
    out
}

/// The set `{ n : Phi_n divides f }`.
pub fn cyclotomic_factors(f: &IntPolynomial) -> Result<BTreeSet<u64>, PolyError> {
    let deg = f.degree().ok_or(PolyError::ZeroPolynomial)?;
    let mut out = BTreeSet::new();
    if deg == 0 {
        return Ok(out);
    }
    const DEGREE_LIMIT: usize = 2048;
    if deg > DEGREE_LIMIT {
        return Err(PolyError::DegreeTooLarge {
            degree: deg,
            limit: DEGREE_LIMIT,
        });
    }
    let limit = max_cyclotomic_candidate(deg);
    let phi = totient_table(limit);
    for (n, &totient) in phi.iter().enumerate().take(limit + 1).skip(1) {
        if totient as usize <= deg && vanishes_at_primitive_root(f, n as u64) {
            out.insert(n as u64);
        }
    }
    Ok(out)
}

/// Divides out every cyclotomic factor (with multiplicity). Returns the
/// remaining factor and the `(order, multiplicity)` list.
pub(crate) fn strip_cyclotomic(f: &IntPolynomial) -> Result<(IntPolynomial, Vec<(u64, u32)>), PolyError> {
    let orders = cyclotomic_factors(f)?;
    let mut rest = f.clone();
    let mut found = Vec::new();
    for n in orders {
        let phi = cyclotomic(n);
        let mut mult = 0;
        while let Some(q) = rest.divide_exact(&phi) {
            rest = q;
            mult += 1;
        }
        debug_assert!(mult > 0);
        found.push((n, mult));
    }
    if rest.leading().is_some_and(|c| c < &BigInt::zero()) {
        rest = -&rest;
    }
    debug_assert!(!rest.is_zero());
    Ok((rest, found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::totient;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
        // Phi_105 is the first with a coefficient outside {-1, 0, 1}.
        assert!(cyclotomic(105).coeffs().iter().any(|c| c == &BigInt::from(-2)));
    }

    #[test]
    fn phi_six_by_division_oracle() {
        // x^6 - 1 divided by Phi_1 Phi_2 Phi_3, each step an exact division.
        let mut acc = IntPolynomial::x_pow_minus_one(6);
        for d in [p(&[-1, 1]), p(&[1, 1]), p(&[1, 1, 1])] {
            acc = acc.divide_exact(&d).unwrap();
        }
        assert_eq!(acc, p(&[1, -1, 1]));
        assert_eq!(cyclotomic(6), acc);
    }

    #[test]
    fn product_over_divisors_is_x_pow_minus_one() {
        for n in 1..=200u64 {
            let phi = cyclotomic(n);
            assert_eq!(phi.degree(), Some(totient(n) as usize));
            assert_eq!(phi, cyclotomic_by_division(n), "n = {n}");
            let prod = divisors(n)
                .into_iter()
                .fold(IntPolynomial::one(), |acc, d| &acc * &cyclotomic(d));
            assert_eq!(prod, IntPolynomial::x_pow_minus_one(n as usize), "n = {n}");
            assert!(IntPolynomial::x_pow_minus_one(n as usize).divide_exact(&phi).is_some());
        }
    }

    #[test]
    fn factor_examples() {
        assert_eq!(cyclotomic_factors(&p(&[1, 1, 1])).unwrap(), [3].into());
        assert_eq!(cyclotomic_factors(&p(&[-1, 0, 0, 0, 1])).unwrap(), [1, 2, 4].into());
        assert_eq!(cyclotomic_factors(&p(&[1, -1, 1])).unwrap(), [6].into());
        assert_eq!(cyclotomic_factors(&p(&[5])).unwrap(), BTreeSet::new());
        assert_eq!(
            cyclotomic_factors(&IntPolynomial::zero()),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn factor_set_matches_division_oracle() {
        let polys = [
            p(&[1, -1, 1]),
            p(&[1, 0, 1, 1, 1, 1, 0, 1]),
            p(&[1, 1, 0, 0, 0, 0, 0, 1]),
            &(&cyclotomic(9) * &cyclotomic(10)) * &p(&[2, 1]),
            p(&[1, -3, 1]),
        ];
        for f in &polys {
            let deg = f.degree().unwrap();
            let set = cyclotomic_factors(f).unwrap();
            for n in 1..=max_cyclotomic_candidate(deg) as u64 {
                if totient(n) as usize > deg {
                    assert!(!set.contains(&n));
                    continue;
                }
                let divides = f.divide_exact(&cyclotomic(n)).is_some();
                assert_eq!(set.contains(&n), divides, "f = {f}, n = {n}");
            }
        }
    }

    #[test]
    fn strip_reports_multiplicity() {
        let f = &(&cyclotomic(3) * &cyclotomic(3)) * &p(&[1, -3, 1]);
        let (rest, found) = strip_cyclotomic(&f).unwrap();
        assert_eq!(rest, p(&[1, -3, 1]));
        assert_eq!(found, vec![(3, 2)]);
    }
}
