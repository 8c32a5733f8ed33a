//! The modulus chain backing the emitted `F` routine.
//!
//! A chain of length `m` is a list of pairs `(P_i, Q_i)`, 1-indexed. Only the
//! pair sums `s_i = P_i + Q_i` matter arithmetically: `reduce(a, k)` folds
//! `a mod s_k mod s_{k-1} ... mod s_1` down into `[0, s_1)`. Two ways of
//! building the chain are supported:
//!
//! * `Doubled` — `s_i = 3·2^i − 1` (pairs `(3·2^(i-1)-1, 3·2^(i-1))`), the
//!   default; and
//! * `PrimeSum` — every `s_i` is a successive prime starting at 5, split as
//!   `(s/2, s/2+1)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest chain length whose sums still fit in a Java `int` under `Doubled`.
pub const DOUBLED_MAX_LEN: u32 = 29;

/// How the pair sums are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    Doubled,
    PrimeSum,
}

impl std::fmt::Display for ChainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChainMode::Doubled => write!(f, "doubled"),
            ChainMode::PrimeSum => write!(f, "prime-sum"),
        }
    }
}

/// Pair table plus cached sums; the arithmetic core everything else leans on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusChain {
    mode: ChainMode,
    pairs: Vec<(i32, i32)>,
    sums: Vec<i32>,
}

impl ModulusChain {
    /// Builds a chain of `m` pairs. `m` must be at least 2 (synthesis always
    /// needs a spare modulus above the reduction depth) and, in `Doubled`
    /// mode, at most [`DOUBLED_MAX_LEN`].
    pub fn build(m: u32, mode: ChainMode) -> Result<ModulusChain> {
        if m < 2 {
            return Err(Error::DepthLimit { m, max: 2 });
        }
        if mode == ChainMode::Doubled && m > DOUBLED_MAX_LEN {
            return Err(Error::DepthLimit { m, max: DOUBLED_MAX_LEN });
        }
        let pairs: Vec<(i32, i32)> = match mode {
            ChainMode::Doubled => (1..=m)
                .map(|i| {
                    let q = 3i32 << (i - 1); // 3·2^(i-1)
                    (q - 1, q)
                })
                .collect(),
            ChainMode::PrimeSum => {
                let mut pairs = Vec::with_capacity(m as usize);
                let mut candidate: i64 = 5;
                while pairs.len() < m as usize {
                    if is_prime(candidate) {
                        if candidate > i32::MAX as i64 {
                            return Err(Error::DepthLimit { m, max: pairs.len() as u32 });
                        }
                        let s = candidate as i32;
                        pairs.push((s / 2, s / 2 + 1));
                    }
                    candidate += 2;
                }
                pairs
            }
        };
        let sums = pairs.iter().map(|&(p, q)| p + q).collect();
        Ok(ModulusChain { mode, pairs, sums })
    }

    pub fn mode(&self) -> ChainMode {
        self.mode
    }

    /// Number of pairs in the chain.
    pub fn len(&self) -> u32 {
        self.pairs.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(i32, i32)] {
        &self.pairs
    }

    /// `s_i = P_i + Q_i` for a 1-based index.
    pub fn sum_at(&self, i: u32) -> Result<i32> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange { index: i, m: self.len() });
        }
        Ok(self.sums[(i - 1) as usize])
    }

    /// The chained reduction `a mod s_k mod s_{k-1} ... mod s_1`.
    ///
    /// Mirrors the emitted Java routine exactly; `a` must be non-negative and
    /// `1 <= k <= len()`. Any `a < s_1` is a fixed point.
    pub fn reduce(&self, a: i32, k: u32) -> Result<i32> {
        if a < 0 {
            return Err(Error::ValueOutOfRange { value: a as i64, what: "reduce input must be non-negative" });
        }
        if k == 0 || k > self.len() {
            return Err(Error::DepthOutOfRange { k, min: 1, max: self.len() });
        }
        let mut r = a;
        for i in (1..=k).rev() {
            r %= self.sums[(i - 1) as usize];
        }
        Ok(r)
    }
}

/// Trial-division primality; inputs here stay far too small to need more.
fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    //! Golden pair tables, closed-form cross-checks, and an independently
    //! coded reduction oracle over 64-bit arithmetic.

    use super::*;

    /// Reference reduction written against the closed form for the doubled
    /// sums, sharing no code with `ModulusChain`.
    fn oracle_reduce_doubled(a: i64, k: u32) -> i64 {
        let mut r = a;
        for i in (1..=k).rev() {
            r %= 3 * (1i64 << i) - 1;
        }
        r
    }

    #[test]
    fn doubled_first_seven_pairs_match_golden_table() {
        let chain = ModulusChain::build(7, ChainMode::Doubled).unwrap();
        assert_eq!(
            chain.pairs(),
            &[(2, 3), (5, 6), (11, 12), (23, 24), (47, 48), (95, 96), (191, 192)]
        );
    }

    #[test]
    fn doubled_sums_follow_closed_form() {
        let chain = ModulusChain::build(DOUBLED_MAX_LEN, ChainMode::Doubled).unwrap();
        for i in 1..=DOUBLED_MAX_LEN {
            assert_eq!(chain.sum_at(i).unwrap() as i64, 3 * (1i64 << i) - 1, "s_{i}");
        }
    }

    #[test]
    fn doubled_pairs_are_adjacent_integers() {
        let chain = ModulusChain::build(13, ChainMode::Doubled).unwrap();
        for &(p, q) in chain.pairs() {
            assert_eq!(q, p + 1);
        }
    }

    #[test]
    fn sums_strictly_increase_in_both_modes() {
        for mode in [ChainMode::Doubled, ChainMode::PrimeSum] {
            let chain = ModulusChain::build(20, mode).unwrap();
            for i in 1..chain.len() {
                assert!(chain.sum_at(i + 1).unwrap() > chain.sum_at(i).unwrap(), "{mode:?} at {i}");
            }
        }
    }

    #[test]
    fn prime_sum_mode_starts_at_five_smallest_odd_primes() {
        let chain = ModulusChain::build(5, ChainMode::PrimeSum).unwrap();
        let sums: Vec<i32> = (1..=5).map(|i| chain.sum_at(i).unwrap()).collect();
        assert_eq!(sums, vec![5, 7, 11, 13, 17]);
        assert_eq!(chain.pairs()[1], (3, 4)); // 7 splits as floor/ceil
    }

    #[test]
    fn prime_sum_sums_pass_trial_division() {
        let chain = ModulusChain::build(40, ChainMode::PrimeSum).unwrap();
        for i in 1..=40 {
            let s = chain.sum_at(i).unwrap() as i64;
            assert!(is_prime(s), "s_{i} = {s}");
        }
    }

    #[test]
    fn doubled_length_cap_enforced() {
        assert!(ModulusChain::build(DOUBLED_MAX_LEN, ChainMode::Doubled).is_ok());
        assert!(matches!(
            ModulusChain::build(DOUBLED_MAX_LEN + 1, ChainMode::Doubled),
            Err(Error::DepthLimit { .. })
        ));
        // every sum at the cap still fits a Java int
        let chain = ModulusChain::build(DOUBLED_MAX_LEN, ChainMode::Doubled).unwrap();
        assert_eq!(chain.sum_at(DOUBLED_MAX_LEN).unwrap(), 1_610_612_735);
    }

    #[test]
    fn too_short_chain_rejected() {
        assert!(ModulusChain::build(1, ChainMode::Doubled).is_err());
        assert!(ModulusChain::build(0, ChainMode::PrimeSum).is_err());
    }

    #[test]
    fn reduce_matches_golden_values() {
        let chain = ModulusChain::build(13, ChainMode::Doubled).unwrap();
        assert_eq!(chain.reduce(41 % 23, 2).unwrap(), 2); // 18 -> 7 -> 2
        assert_eq!(chain.reduce(374 % 191, 5).unwrap(), 2);
        assert_eq!(chain.reduce(33 % 21, 2).unwrap(), 1); // 12 -> 1 -> 1
        assert_eq!(chain.reduce(0, 13).unwrap(), 0);
    }

    #[test]
    fn reduce_is_identity_below_first_sum() {
        let chain = ModulusChain::build(13, ChainMode::Doubled).unwrap();
        for a in 0..5 {
            for k in 1..=13 {
                assert_eq!(chain.reduce(a, k).unwrap(), a);
            }
        }
    }

    #[test]
    fn reduce_agrees_with_oracle_exhaustively_to_depth_six() {
        let chain = ModulusChain::build(13, ChainMode::Doubled).unwrap();
        for k in 1..=6u32 {
            let bound = chain.sum_at(k + 1).unwrap();
            for a in 0..bound {
                assert_eq!(
                    chain.reduce(a, k).unwrap() as i64,
                    oracle_reduce_doubled(a as i64, k),
                    "a={a} k={k}"
                );
            }
        }
    }

    #[test]
    fn reduce_agrees_with_oracle_on_sampled_large_inputs() {
        let chain = ModulusChain::build(DOUBLED_MAX_LEN, ChainMode::Doubled).unwrap();
        // deterministic stride sweep across the full int range
        let mut a: i64 = 0;
        while a <= i32::MAX as i64 {
            for k in [1, 2, 7, 13, 20, 29] {
                assert_eq!(chain.reduce(a as i32, k).unwrap() as i64, oracle_reduce_doubled(a, k));
            }
            a += 61_803_398;
        }
    }

    #[test]
    fn reduce_rejects_bad_arguments() {
        let chain = ModulusChain::build(5, ChainMode::Doubled).unwrap();
        assert!(chain.reduce(-1, 2).is_err());
        assert!(chain.reduce(10, 0).is_err());
        assert!(chain.reduce(10, 6).is_err());
        assert!(chain.sum_at(0).is_err());
        assert!(chain.sum_at(6).is_err());
    }
}
