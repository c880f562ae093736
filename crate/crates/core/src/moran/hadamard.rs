//! Frequency sets `L` making `(N, B, L)` a Hadamard triple.

use num_complex::Complex64;

use crate::residue::{mask_is_zero_at_fraction, DigitSet};

/// Node budget of the clique search.
pub const SEARCH_BUDGET: u64 = 5_000_000;

/// `(N, B, L)` with the rescaled exponential matrix unitary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardTriple {
    pub scale: u64,
    pub digits: DigitSet,
    pub frequencies: Vec<u64>,
}

impl HadamardTriple {
    /// The `#B x #B` matrix `exp(-2 pi i b l / N) / sqrt(#B)`, rows by digit.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.digits.len() as f64;
        let n = self.scale as i128;
        self.digits
            .elements()
            .iter()
            .map(|b| {
                let b = b.clone() % num_bigint::BigInt::from(n);
                let b: i128 = b.try_into().expect("reduced digit");
                self.frequencies
                    .iter()
                    .map(|&l| {
                        let r = (b * l as i128).rem_euclid(n);
                        Complex64::from_polar(1.0 / m.sqrt(), -2.0 * std::f64::consts::PI * r as f64 / n as f64)
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest entry of `|H* H - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let h = self.matrix();
        let m = h.len();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let s: Complex64 = (0..m).map(|r| h[r][i].conj() * h[r][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HadamardSearch {
    Found(Vec<u64>),
    NotAdmissible,
    BudgetExceeded,
}

struct Search<'a> {
    zero_at: &'a [bool],
    target: usize,
    nodes: u64,
    best: Vec<u64>,
    maximize: bool,
}

impl Search<'_> {
    fn compatible(&self, chosen: &[u64], c: u64) -> bool {
        chosen.iter().all(|&x| self.zero_at[(c - x) as usize])
    }

    /// Extends `chosen` with candidates in increasing order. Returns true when
    /// the target size is reached or the budget runs out.
    fn extend(&mut self, chosen: &mut Vec<u64>, candidates: &[u64]) -> bool {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return true;
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if chosen.len() == self.target {
            return true;
        }
        let need = self.target - chosen.len();
        if !self.maximize && candidates.len() < need {
            return false;
        }
        if self.maximize && chosen.len() + candidates.len() <= self.best.len() {
            return false;
        }
        for (i, &c) in candidates.iter().enumerate() {
            let rest: Vec<u64> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&d| self.zero_at[(d - c) as usize])
                .collect();
            debug_assert!(self.compatible(chosen, c));
            chosen.push(c);
            let done = self.extend(chosen, &rest);
            chosen.pop();
            if done {
                return true;
            }
        }
        false
    }
}

fn zero_table(scale: u64, digits: &DigitSet) -> Vec<bool> {
    (0..scale)
        .map(|d| d != 0 && mask_is_zero_at_fraction(digits, d as i64, scale))
        .collect()
}

fn run(scale: u64, digits: &DigitSet, maximize: bool) -> (Vec<u64>, bool, bool) {
    let zero_at = zero_table(scale, digits);
    let target = digits.len();
    let candidates: Vec<u64> = (1..scale).filter(|&d| zero_at[d as usize]).collect();
    let mut s = Search {
        zero_at: &zero_at,
        target,
        nodes: 0,
        best: Vec::new(),
        maximize,
    };
    let mut chosen = vec![0];
    s.extend(&mut chosen, &candidates);
    let exhausted = s.nodes > SEARCH_BUDGET;
    let complete = s.best.len() == target;
    (s.best, complete, exhausted)
}

/// Lexicographically smallest `L` in `{0, ..., N - 1}` with `0 in L`,
/// `#L = #B` and the mask vanishing at every `(l - l') / N`.
pub fn search_hadamard_l(scale: u64, digits: &DigitSet) -> HadamardSearch {
    assert!(scale >= 1, "zero scale");
    let (best, complete, exhausted) = run(scale, digits, false);
    if complete {
        HadamardSearch::Found(best)
    } else if exhausted {
        HadamardSearch::BudgetExceeded
    } else {
        HadamardSearch::NotAdmissible
    }
}

/// The Hadamard triple for `(N, B)`, if one exists within the search budget.
pub fn find_hadamard_l(scale: u64, digits: &DigitSet) -> Option<HadamardTriple> {
    match search_hadamard_l(scale, digits) {
        HadamardSearch::Found(frequencies) => Some(HadamardTriple {
            scale,
            digits: digits.clone(),
            frequencies,
        }),
        _ => None,
    }
}

/// Largest mutually orthogonal frequency set containing `0` (found within the
/// search budget); equals the Hadamard set when one exists.
pub fn best_frequency_set(scale: u64, digits: &DigitSet) -> Vec<u64> {
    let (best, _, _) = run(scale, digits, true);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::mask_is_zero_at_fraction;

    fn ds(b: &[i64]) -> DigitSet {
        DigitSet::from_i64(b, b.len() as u64).unwrap()
    }

    /// Exhaustive oracle over all subsets containing zero, in lexicographic order.
    fn brute(scale: u64, digits: &DigitSet) -> Option<Vec<u64>> {
        let m = digits.len();
        let mut found: Vec<Vec<u64>> = Vec::new();
        for mask in 0u64..(1 << scale) {
            if mask & 1 == 0 || mask.count_ones() as usize != m {
                continue;
            }
            let l: Vec<u64> = (0..scale).filter(|i| mask & (1 << i) != 0).collect();
            let ok = l.iter().all(|&a| {
                l.iter()
                    .all(|&b| a == b || mask_is_zero_at_fraction(digits, a as i64 - b as i64, scale))
            });
            if ok {
                found.push(l);
            }
        }
        found.into_iter().min()
    }

    #[test]
    fn examples() {
        assert_eq!(find_hadamard_l(4, &ds(&[0, 2])).unwrap().frequencies, vec![0, 1]);
        assert_eq!(find_hadamard_l(2, &ds(&[0, 1])).unwrap().frequencies, vec![0, 1]);
        assert_eq!(find_hadamard_l(6, &ds(&[0, 1, 2])).unwrap().frequencies, vec![0, 2, 4]);
        assert_eq!(brute(6, &ds(&[0, 1, 2])), Some(vec![0, 2, 4]));
        assert!(find_hadamard_l(4, &ds(&[0, 1, 2])).is_none());
        assert_eq!(best_frequency_set(4, &ds(&[0, 1, 2])), vec![0]);
    }

    #[test]
    fn agrees_with_brute_force() {
        let sets = [
            ds(&[0, 2]),
            ds(&[0, 1, 2]),
            ds(&[0, 3]),
            ds(&[0, 1, 2, 3]),
            ds(&[0, 2, 4]),
            ds(&[0, 1, 8, 9]),
            ds(&[0, 5, 7]),
        ];
        for b in &sets {
            for n in b.len() as u64..=12 {
                let fast = find_hadamard_l(n, b).map(|t| t.frequencies);
                assert_eq!(fast, brute(n, b), "N = {n}, B = {b}");
            }
        }
    }

    #[test]
    fn unitary_matrices() {
        for (n, b) in [
            (4, ds(&[0, 2])),
            (6, ds(&[0, 1, 2])),
            (8, ds(&[0, 1, 2, 3])),
            (16, ds(&[0, 1, 8, 9])),
        ] {
            let t = find_hadamard_l(n, &b).unwrap();
            assert!(t.unitarity_defect() < 1e-12, "{n} {b}");
        }
    }

    #[test]
    fn consecutive_sets_use_multiples() {
        for m in 2..=6u64 {
            for q in 1..=4u64 {
                let n = m * q;
                let t = find_hadamard_l(n, &DigitSet::consecutive(m)).unwrap();
                let want: Vec<u64> = (0..m).map(|i| i * q).collect();
                assert_eq!(t.frequencies, want, "m = {m}, n = {n}");
            }
        }
    }
}
