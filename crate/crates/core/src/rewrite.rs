//! Rewrite maps on padded digit words used to certify that a shifted family
//! `d -> d - u b^k` keeps the number system property.
//!
//! For `b > 0` a word is `(d_0, ..., d_k)` with `d_i` digits for `i < k` and
//! `d_k` in `{-1, 0, 1}`. For `b < 0` it is `(d_0, ..., d_{k+1})` whose top
//! pair `(d_k, d_{k+1})` is one of the short expansions of `-1`, `0`, `1`
//! collected in `S`. One step strips the least significant digit the way `T`
//! does for the shifted digit set; a word escapes once it avoids `d`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructions::Family;
use crate::expansions::zero_expansion;
use crate::json;

/// Largest number of words [`verify_criterion`] will enumerate by default.
pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("base {0} not supported: needs |b| >= 3 and values that fit in 64 bits")]
    UnsupportedBase(BigInt),
    #[error("the starting digit set has no zero expansion")]
    NoZeroExpansion,
    #[error("zero expansion of length {0} is not covered")]
    UnsupportedZeroExpansion(usize),
    #[error("{0:?} is not a padded word of this family")]
    NotInDomain(Vec<i64>),
    #[error("the rewrite step is undefined at {0:?}")]
    Undefined(Vec<i64>),
    #[error("{states} words exceed the cap of {cap}")]
    StateSpaceTooLarge { states: u64, cap: u64 },
}

/// The rewrite map of one family, with its word space.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    family: Family,
    base: i64,
    digits: Vec<i64>,
    has_zero: bool,
    chosen: i64,
    u: i64,
    k: usize,
    zero: Vec<i64>,
    // admissible top entries: d_k for b > 0, (d_k, d_{k+1}) for b < 0
    tails: Vec<Vec<i64>>,
}

impl RewriteSystem {
    pub fn new(family: &Family) -> Result<Self, RewriteError> {
        let sys = family.base_set();
        let unsupported = || RewriteError::UnsupportedBase(sys.base().clone());
        let base = sys.base().to_i64().ok_or_else(unsupported)?;
        if base.abs() < 3 {
            return Err(unsupported());
        }
        let digits: Vec<i64> = sys
            .digit_values()
            .map(|d| d.to_i64().ok_or_else(unsupported))
            .collect::<Result<_, _>>()?;
        let chosen = family.digit().to_i64().ok_or_else(unsupported)?;
        let u = family.u().to_i64().ok_or_else(unsupported)?;
        let zero: Vec<i64> = zero_expansion(sys)
            .map_err(|_| RewriteError::NoZeroExpansion)?
            .digit_values()
            .iter()
            .map(|d| d.to_i64().expect("digit fits"))
            .collect();
        let has_zero = sys.has_zero();
        let tails = if base > 0 {
            if !has_zero && zero.len() != 2 {
                return Err(RewriteError::UnsupportedZeroExpansion(zero.len()));
            }
            vec![vec![-1], vec![0], vec![1]]
        } else {
            if zero.len() > 3 {
                return Err(RewriteError::UnsupportedZeroExpansion(zero.len()));
            }
            let mut pool = digits.clone();
            if !has_zero {
                pool.push(0);
            }
            let mut pairs = Vec::new();
            for &x in &pool {
                for &y in &pool {
                    let v = x + base * y;
                    if (-1..=1).contains(&v) && !(x == 0 && y == 0 && zero.len() == 2) {
                        pairs.push(vec![x, y]);
                    }
                }
            }
            pairs.sort_by_key(|p| p[0] + base * p[1]);
            pairs
        };
        Ok(Self {
            family: family.clone(),
            base,
            digits,
            has_zero,
            chosen,
            u,
            k: family.k() as usize,
            zero,
            tails,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Number of entries in a word: `k + 1` for `b > 0`, `k + 2` for `b < 0`.
    pub fn word_len(&self) -> usize {
        self.k + self.tail_len()
    }

    fn tail_len(&self) -> usize {
        if self.base > 0 {
            1
        } else {
            2
        }
    }

    /// The admissible top pairs `S` (empty meaning for positive bases).
    pub fn top_pairs(&self) -> &[Vec<i64>] {
        &self.tails
    }

    /// Number of words, or `None` on overflow.
    pub fn state_count(&self) -> Option<u64> {
        let n = self.digits.len() as u64;
        let mut count = self.tails.len() as u64;
        for _ in 0..self.k {
            count = count.checked_mul(n)?;
        }
        Some(count)
    }

    fn digit_of(&self, v: i64) -> i64 {
        let m = self.base.abs();
        *self
            .digits
            .iter()
            .find(|&&d| (v - d).rem_euclid(m) == 0)
            .expect("complete residue system")
    }

    fn contains(&self, word: &[i64]) -> bool {
        word.len() == self.word_len()
            && word[..self.k].iter().all(|d| self.digits.contains(d))
            && self.tails.iter().any(|t| t[..] == word[self.k..])
    }

    /// `true` once no entry equals the chosen digit.
    pub fn escaped(&self, word: &[i64]) -> bool {
        !word.contains(&self.chosen)
    }

    /// One step of the map for `b > 0`.
    pub fn phi_step(&self, word: &[i64]) -> Result<Vec<i64>, RewriteError> {
        if self.base < 0 || !self.contains(word) {
            return Err(RewriteError::NotInDomain(word.to_vec()));
        }
        let k = self.k;
        let mut out: Vec<i64> = word[1..k].to_vec();
        if word[0] == self.chosen {
            let v = word[k] + self.u;
            let d0 = self.digit_of(v);
            out.push(d0);
            out.push((v - d0) / self.base);
        } else if word[k] != 0 || self.has_zero {
            out.push(word[k]);
            out.push(0);
        } else {
            out.extend_from_slice(&self.zero);
        }
        self.checked(word, out)
    }

    /// One step of the map for `b < 0`.
    pub fn psi_step(&self, word: &[i64]) -> Result<Vec<i64>, RewriteError> {
        if self.base > 0 || !self.contains(word) {
            return Err(RewriteError::NotInDomain(word.to_vec()));
        }
        let k = self.k;
        let (dk, dk1) = (word[k], word[k + 1]);
        let mut out: Vec<i64> = word[1..k].to_vec();
        if word[0] == self.chosen {
            let v = dk + dk1 * self.base + self.u;
            let d0 = self.digit_of(v);
            let w = (v - d0) / self.base;
            let top = self
                .tails
                .iter()
                .find(|t| t[0] + self.base * t[1] == w)
                .ok_or_else(|| RewriteError::Undefined(word.to_vec()))?;
            out.push(d0);
            out.extend_from_slice(top);
        } else if dk1 != 0 || self.has_zero {
            out.extend_from_slice(&[dk, dk1, 0]);
        } else if self.zero.len() == 2 {
            out.push(dk);
            out.extend_from_slice(&self.zero);
        } else if dk == 0 {
            out.extend_from_slice(&self.zero);
        } else {
            // zero expansion of length 3 with top pair (d_k, 0), d_k != 0:
            // (0, 0) is admissible here, so shift and append 0
            out.extend_from_slice(&[dk, 0, 0]);
        }
        self.checked(word, out)
    }

    /// `phi_step` or `psi_step` by the sign of the base.
    pub fn step(&self, word: &[i64]) -> Result<Vec<i64>, RewriteError> {
        if self.base > 0 {
            self.phi_step(word)
        } else {
            self.psi_step(word)
        }
    }

    fn checked(&self, word: &[i64], out: Vec<i64>) -> Result<Vec<i64>, RewriteError> {
        if self.contains(&out) {
            Ok(out)
        } else {
            Err(RewriteError::Undefined(word.to_vec()))
        }
    }

    /// `sum d_i b^i`.
    pub fn word_value(&self, word: &[i64]) -> BigInt {
        let b = BigInt::from(self.base);
        word.iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &b + d)
    }

    /// The value a successor must have: `(a - d_0) / b`, or
    /// `(a - (d - u b^k)) / b` when `d_0` is the chosen digit.
    pub fn successor_value(&self, word: &[i64]) -> BigInt {
        let a = self.word_value(word);
        let lead = if word[0] == self.chosen {
            self.family.shifted_digit()
        } else {
            BigInt::from(word[0])
        };
        (a - lead) / self.base
    }

    /// All words in enumeration order.
    pub fn words(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let total = self.state_count().expect("state count fits in u64");
        (0..total).map(move |id| self.decode(id))
    }

    fn decode(&self, mut id: u64) -> Vec<i64> {
        let n = self.digits.len() as u64;
        let mut word = Vec::with_capacity(self.word_len());
        for _ in 0..self.k {
            word.push(self.digits[(id % n) as usize]);
            id /= n;
        }
        word.extend_from_slice(&self.tails[id as usize]);
        word
    }

    fn encode(&self, word: &[i64]) -> u64 {
        let n = self.digits.len() as u64;
        let tail = self
            .tails
            .iter()
            .position(|t| t[..] == word[self.k..])
            .expect("word in domain") as u64;
        word[..self.k].iter().rev().fold(tail, |acc, d| {
            acc * n + self.digits.binary_search(d).expect("digit") as u64
        })
    }
}

/// Outcome of [`verify_criterion`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub family: Family,
    pub all_escape: bool,
    /// Longest escape time over all escaping start words.
    pub max_steps: u64,
    /// First start word, in enumeration order, that never escapes.
    pub stuck_word: Option<Vec<i64>>,
    pub states: u64,
}

impl Trace {
    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.to_json(),
            "all_escape": self.all_escape,
            "max_steps": self.max_steps,
            "stuck_word": self.stuck_word.as_ref().map(|w| Value::Array(w.iter().map(|&d| json::int(&d.into())).collect())),
        })
    }
}

const UNKNOWN: u32 = u32::MAX;
const ON_PATH: u32 = u32::MAX - 1;
const STUCK: u32 = u32::MAX - 2;

/// Iterates the rewrite map from every word and reports whether each one
/// reaches a word free of the chosen digit.
pub fn verify_criterion(family: &Family, cap: u64) -> Result<Trace, RewriteError> {
    let rw = RewriteSystem::new(family)?;
    let states = rw.state_count().unwrap_or(u64::MAX);
    if states > cap || states > usize::MAX as u64 {
        return Err(RewriteError::StateSpaceTooLarge { states, cap });
    }
    // escape distance per word, memoized along the functional graph
    let mut dist = vec![UNKNOWN; states as usize];
    let mut path: Vec<u64> = Vec::new();
    for start in 0..states {
        if dist[start as usize] != UNKNOWN {
            continue;
        }
        let mut id = start;
        let mut word = rw.decode(id);
        let end = loop {
            let slot = dist[id as usize];
            if slot == ON_PATH {
                break STUCK;
            }
            if slot != UNKNOWN {
                break slot;
            }
            if rw.escaped(&word) {
                dist[id as usize] = 0;
                break 0;
            }
            dist[id as usize] = ON_PATH;
            path.push(id);
            word = rw.step(&word)?;
            id = rw.encode(&word);
        };
        let mut next = end;
        while let Some(p) = path.pop() {
            next = if next == STUCK { STUCK } else { next + 1 };
            dist[p as usize] = next;
        }
    }
    let stuck = dist.iter().position(|&d| d == STUCK);
    let max_steps = dist
        .iter()
        .filter(|&&d| d != STUCK)
        .max()
        .copied()
        .unwrap_or(0);
    Ok(Trace {
        family: family.clone(),
        all_escape: stuck.is_none(),
        max_steps: u64::from(max_steps),
        stuck_word: stuck.map(|i| rw.decode(i as u64)),
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::bad_set;
    use crate::orbits::is_number_system;
    use crate::system::PreNumberSystem;

    fn sys(base: i64, digits: &[i64]) -> PreNumberSystem {
        PreNumberSystem::new(base, digits.iter().copied()).unwrap()
    }

    fn family(base: i64, digits: &[i64], d: i64, u: i64, k: u32) -> Family {
        Family::new_unchecked(sys(base, digits), d.into(), u.into(), k).unwrap()
    }

    #[test]
    fn phi_examples() {
        let rw = RewriteSystem::new(&family(5, &[-1, 0, 1, 2, 3], 3, 1, 2)).unwrap();
        assert_eq!(rw.phi_step(&[3, 0, 1]).unwrap(), vec![0, 2, 0]);
        assert_eq!(rw.phi_step(&[0, 0, 1]).unwrap(), vec![0, 1, 0]);
        assert!(matches!(
            rw.phi_step(&[3, 0, 2]),
            Err(RewriteError::NotInDomain(_))
        ));
        assert!(matches!(
            rw.psi_step(&[3, 0, 1]),
            Err(RewriteError::NotInDomain(_))
        ));

        // no zero digit: (b, -1) is the zero expansion
        let rw = RewriteSystem::new(&family(5, &[-1, 1, 2, 3, 5], 3, 1, 2)).unwrap();
        assert_eq!(rw.phi_step(&[1, 2, 1]).unwrap(), vec![2, 1, 0]);
        assert_eq!(rw.phi_step(&[1, 2, 0]).unwrap(), vec![2, 5, -1]);
    }

    #[test]
    fn psi_examples() {
        let rw = RewriteSystem::new(&family(-5, &[1, 2, 3, 4, 5], 3, 1, 2)).unwrap();
        // 1 + 0*(-5) + 1 = 2, kept as (2) with top pair (5, 1) for 0
        assert_eq!(rw.psi_step(&[3, 1, 1, 0]).unwrap(), vec![1, 2, 5, 1]);
        assert_eq!(
            rw.word_value(&[1, 2, 5, 1]),
            rw.successor_value(&[3, 1, 1, 0])
        );
        // shift and append 0
        assert_eq!(rw.psi_step(&[1, 2, 4, 1]).unwrap(), vec![2, 4, 1, 0]);
        // top pair (1, 0) with no zero digit: append the zero expansion (5, 1)
        assert_eq!(rw.psi_step(&[1, 2, 1, 0]).unwrap(), vec![2, 1, 5, 1]);

        // zero expansion of length 3: (b, B - 1, 1)
        let rw = RewriteSystem::new(&family(-5, &[-5, 1, 2, 3, 4], 3, 1, 2)).unwrap();
        assert_eq!(rw.zero, vec![-5, 4, 1]);
        assert!(rw.top_pairs().contains(&vec![0, 0]));
        assert_eq!(rw.psi_step(&[1, 2, 0, 0]).unwrap(), vec![2, -5, 4, 1]);
    }

    #[test]
    fn value_identity_for_every_word() {
        let cases = [
            family(5, &[-1, 0, 1, 2, 3], 3, 1, 2),
            family(5, &[-1, 1, 2, 3, 5], 3, 1, 3),
            family(4, &[-1, 0, 1, 2], -1, 1, 2),
            family(-5, &[1, 2, 3, 4, 5], 3, 1, 2),
            family(-5, &[-5, 1, 2, 3, 4], 3, 1, 2),
            family(-4, &[0, 1, 2, 3], 3, 1, 3),
            family(-5, &[-5, -3, -1, 1, 3], 3, 1, 2),
        ];
        for f in &cases {
            let rw = RewriteSystem::new(f).unwrap();
            for w in rw.words() {
                let next = rw.step(&w).unwrap();
                assert_eq!(rw.word_value(&next), rw.successor_value(&w), "{w:?}");
                assert_eq!(rw.encode(&w), rw.encode(&rw.decode(rw.encode(&w))));
            }
        }
    }

    #[test]
    fn criterion_examples() {
        let t =
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 3, 1, 2), DEFAULT_STATE_CAP).unwrap();
        assert!(t.all_escape);
        assert_eq!(t.states, 75);
        assert!(t.stuck_word.is_none());

        let t =
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 0, 1, 2), DEFAULT_STATE_CAP).unwrap();
        assert!(!t.all_escape);
        assert!(t.stuck_word.is_some());

        let t =
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 3, 1, 1), DEFAULT_STATE_CAP).unwrap();
        assert!(t.all_escape);
        assert_eq!(t.states, 15);

        assert!(matches!(
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 3, 1, 9), 1000),
            Err(RewriteError::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn trace_json_keys() {
        let t =
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 0, 1, 1), DEFAULT_STATE_CAP).unwrap();
        let v = t.to_json();
        for key in ["family", "all_escape", "max_steps", "stuck_word"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["stuck_word"].is_array());
        let ok =
            verify_criterion(&family(5, &[-1, 0, 1, 2, 3], 3, 1, 1), DEFAULT_STATE_CAP).unwrap();
        assert!(ok.to_json()["stuck_word"].is_null());
    }

    #[test]
    fn admissible_families_escape() {
        for (b, digits) in [
            (4, vec![-1, 0, 1, 2]),
            (5, vec![-1, 1, 2, 3, 5]),
            (-4, vec![1, 2, 3, 4]),
            (-5, vec![-5, 1, 2, 3, 4]),
        ] {
            let s = sys(b, &digits);
            assert!(is_number_system(&s));
            let max = if s.has_zero() {
                b.abs() - 1
            } else {
                b.abs() - 2
            };
            for u in (-max..=max).filter(|&u| u != 0) {
                let bad = bad_set(&s, &u.into()).unwrap();
                for &d in &digits {
                    if bad.contains(&d.into()) {
                        continue;
                    }
                    for k in 1..=2 {
                        let f = Family::new(s.clone(), d.into(), u.into(), k).unwrap();
                        let t = verify_criterion(&f, DEFAULT_STATE_CAP).unwrap();
                        assert!(t.all_escape, "b={b} d={d} u={u} k={k}: {:?}", t.stuck_word);
                    }
                }
            }
        }
    }
}
