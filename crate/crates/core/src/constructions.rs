//! Explicit digit-set constructions: small digit sets, odd digits, n-fold
//! systems, translations, bad sets and shifted families `d -> d - u b^k`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::expansions::{expand, Expansion};
use crate::json;
use crate::orbits::{attractor, is_number_system};
use crate::system::{pow, PreNumberSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("base {base} not supported: {reason}")]
    UnsupportedBase { base: BigInt, reason: &'static str },
    #[error("the starting digit set is not a number system")]
    NotANumberSystem,
    #[error("some digit exceeds |b| = {modulus} in absolute value")]
    DigitsTooLarge { modulus: BigInt },
    #[error("shift u = {u} outside 1 <= |u| <= {max}")]
    ShiftOutOfRange { u: BigInt, max: BigInt },
    #[error("{digit} is not a digit of the starting set")]
    NotADigit { digit: BigInt },
    #[error("{digit} is the zero digit")]
    ZeroDigitChosen { digit: BigInt },
    #[error("exponent k must be at least 1")]
    BadExponent,
    #[error("digit {digit} lies in the bad set {bad:?}")]
    DigitInBadSet { digit: BigInt, bad: Vec<BigInt> },
    #[error("keeping 0 fixed needs 0 among the digits")]
    NoZeroDigit,
    #[error(transparent)]
    System(#[from] SystemError),
}

const OPEN_BASE_THREE: &str =
    "no infinite family of shifted digit sets is known for |b| = 3; the bad set leaves no admissible digit";

/// Theorem-style sufficient test: `|d| <= |b|` for all digits, `1` or `-1` is
/// a digit, and neither `b - 1` nor `1 - b` is. For `|b| >= 3` a `true` answer
/// implies a number system.
pub fn check_small_digit_set(sys: &PreNumberSystem) -> Result<bool, ConstructionError> {
    let b = sys.base();
    if sys.modulus() < &BigInt::from(3) {
        return Err(ConstructionError::UnsupportedBase {
            base: b.clone(),
            reason: "needs |b| >= 3",
        });
    }
    let one = BigInt::one();
    let has_unit = sys.contains(&one) || sys.contains(&-&one);
    let bad_unit = sys.contains(&(b - 1)) || sys.contains(&(BigInt::one() - b));
    Ok(sys.digits_within_base() && has_unit && !bad_unit)
}

/// The odd digits `{-b+2, ..., -1, 1, ..., b}` for `b > 0` and
/// `{b, ..., -1, 1, ..., -b-2}` for `b < 0`.
pub fn odd_digit_set(b: &BigInt) -> Result<PreNumberSystem, ConstructionError> {
    if b.is_even() || b.abs() < BigInt::from(3) {
        return Err(ConstructionError::UnsupportedBase {
            base: b.clone(),
            reason: "needs an odd base with |b| >= 3",
        });
    }
    let m = b.abs();
    let (lo, hi) = if b.is_positive() {
        (-&m + 2, m.clone())
    } else {
        (-m.clone(), m - 2)
    };
    let mut digits = Vec::new();
    let mut x = lo;
    while x <= hi {
        digits.push(x.clone());
        x += 2;
    }
    Ok(PreNumberSystem::new(b.clone(), digits)?)
}

/// Base `b^n` with digits `sum_{i<n} d_i b^i`.
pub fn nfold(sys: &PreNumberSystem, n: u32) -> PreNumberSystem {
    assert!(n >= 1, "n-fold needs n >= 1");
    let b = sys.base();
    let mut acc: Vec<BigInt> = vec![BigInt::zero()];
    let mut place = BigInt::one();
    for _ in 0..n {
        let p = &place;
        acc = acc
            .iter()
            .flat_map(|s| sys.digit_values().map(move |d| s + d * p))
            .collect();
        place *= b;
    }
    PreNumberSystem::new(place, acc).expect("n-fold digits form a complete residue system")
}

/// `true` iff `sys` is a number system whose attractor size is coprime to `n`;
/// equivalent to `nfold(sys, n)` being a number system.
pub fn nfold_validity_predicate(sys: &PreNumberSystem, n: u32) -> bool {
    let report = attractor(sys);
    report.is_number_system() && (report.len() as u64).gcd(&u64::from(n)) == 1
}

/// All `t` in `[t_min, t_max]` for which the translated digit set is a number
/// system. With `keep_zero` the digit 0 stays put and only the others move;
/// such a set is a residue system only when `b | t`.
pub fn translate_scan(
    sys: &PreNumberSystem,
    t_min: i64,
    t_max: i64,
    keep_zero: bool,
) -> Result<Vec<i64>, ConstructionError> {
    if sys.modulus() < &BigInt::from(3) {
        return Err(ConstructionError::UnsupportedBase {
            base: sys.base().clone(),
            reason: "needs |b| >= 3",
        });
    }
    if keep_zero && !sys.has_zero() {
        return Err(ConstructionError::NoZeroDigit);
    }
    let valid = |t: i64| -> bool {
        let digits = sys.digit_values().map(|d| {
            if keep_zero && d.is_zero() {
                d.clone()
            } else {
                d + t
            }
        });
        match PreNumberSystem::new(sys.base().clone(), digits.collect::<Vec<_>>()) {
            Ok(s) => is_number_system(&s),
            Err(_) => false,
        }
    };
    Ok((t_min..=t_max)
        .into_par_iter()
        .filter(|&t| valid(t))
        .collect())
}

/// Digits that occur in the minimal expansions of `0`, `u - 1`, `u`, `u + 1`.
#[derive(Debug, Clone)]
pub struct BadSet {
    pub members: BTreeSet<BigInt>,
    /// `(value, expansion)` for `0, u - 1, u, u + 1`, in that order.
    pub sources: Vec<(BigInt, Expansion)>,
}

impl BadSet {
    pub fn contains(&self, d: &BigInt) -> bool {
        self.members.contains(d)
    }

    pub fn to_json(&self) -> Value {
        let sources: Vec<Value> = self
            .sources
            .iter()
            .map(|(v, e)| {
                json!({
                    "value": json::int(v),
                    "digits_lsf": json::ints(e.digits().iter().map(|d| d.value())),
                })
            })
            .collect();
        json!({
            "members": json::ints(self.members.iter()),
            "sources": sources,
        })
    }
}

fn max_shift(sys: &PreNumberSystem) -> BigInt {
    if sys.has_zero() {
        sys.modulus() - 1
    } else {
        sys.modulus() - 2
    }
}

fn check_shift(sys: &PreNumberSystem, u: &BigInt) -> Result<(), ConstructionError> {
    let max = max_shift(sys);
    if u.is_zero() || u.abs() > max {
        return Err(ConstructionError::ShiftOutOfRange { u: u.clone(), max });
    }
    Ok(())
}

/// Bad set of a number system with small digits for the shift `u`.
pub fn bad_set(sys: &PreNumberSystem, u: &BigInt) -> Result<BadSet, ConstructionError> {
    check_shift(sys, u)?;
    if !sys.digits_within_base() {
        return Err(ConstructionError::DigitsTooLarge {
            modulus: sys.modulus().clone(),
        });
    }
    if !is_number_system(sys) {
        return Err(ConstructionError::NotANumberSystem);
    }
    let values = [BigInt::zero(), u - 1, u.clone(), u + 1];
    let mut members = BTreeSet::new();
    let mut sources = Vec::with_capacity(4);
    for v in values {
        let e = expand(sys, &v).expect("every integer expands in a number system");
        members.extend(e.digit_values());
        sources.push((v, e));
    }
    Ok(BadSet { members, sources })
}

/// A starting digit set with one digit `d` to be replaced by `d - u b^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    base_set: PreNumberSystem,
    digit: BigInt,
    u: BigInt,
    k: u32,
}

impl Family {
    /// Checks the standing hypotheses: small digits, `d` a nonzero-class
    /// digit, `u` in range, `k >= 1`.
    pub fn new(
        base_set: PreNumberSystem,
        digit: BigInt,
        u: BigInt,
        k: u32,
    ) -> Result<Self, ConstructionError> {
        if !base_set.digits_within_base() {
            return Err(ConstructionError::DigitsTooLarge {
                modulus: base_set.modulus().clone(),
            });
        }
        if *base_set.zero_digit() == digit {
            return Err(ConstructionError::ZeroDigitChosen { digit });
        }
        check_shift(&base_set, &u)?;
        Self::new_unchecked(base_set, digit, u, k)
    }

    /// Only requires `d` to be a digit and `k >= 1`; for counterexamples.
    pub fn new_unchecked(
        base_set: PreNumberSystem,
        digit: BigInt,
        u: BigInt,
        k: u32,
    ) -> Result<Self, ConstructionError> {
        if !base_set.contains(&digit) {
            return Err(ConstructionError::NotADigit { digit });
        }
        if k == 0 {
            return Err(ConstructionError::BadExponent);
        }
        Ok(Self {
            base_set,
            digit,
            u,
            k,
        })
    }

    pub fn base_set(&self) -> &PreNumberSystem {
        &self.base_set
    }

    pub fn digit(&self) -> &BigInt {
        &self.digit
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn with_k(&self, k: u32) -> Result<Self, ConstructionError> {
        Self::new_unchecked(self.base_set.clone(), self.digit.clone(), self.u.clone(), k)
    }

    /// `d - u b^k`.
    pub fn shifted_digit(&self) -> BigInt {
        &self.digit - &self.u * pow(self.base_set.base(), self.k)
    }

    /// `{"base", "digits", "replaced", "u", "k", "shifted_digit"}`, where
    /// `digits` is the starting set.
    pub fn to_json(&self) -> Value {
        json!({
            "base": json::int(self.base_set.base()),
            "digits": json::ints(self.base_set.digit_values()),
            "replaced": json::int(&self.digit),
            "u": json::int(&self.u),
            "k": self.k,
            "shifted_digit": json::int(&self.shifted_digit()),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let base = json::parse_int(v.get("base")?)?;
        let digits = json::parse_ints(v.get("digits")?)?;
        let sys = PreNumberSystem::new(base, digits).ok()?;
        let d = json::parse_int(v.get("replaced")?)?;
        let u = json::parse_int(v.get("u")?)?;
        let k = u32::try_from(v.get("k")?.as_u64()?).ok()?;
        let f = Self::new_unchecked(sys, d, u, k).ok()?;
        match v.get("shifted_digit") {
            Some(s) if json::parse_int(s)? != f.shifted_digit() => None,
            _ => Some(f),
        }
    }
}

/// The shifted system, with no hypotheses checked.
pub fn shift_family_unchecked(family: &Family) -> PreNumberSystem {
    family
        .base_set
        .replace_digit(&family.digit, family.shifted_digit())
        .expect("the shift preserves the residue class")
}

/// The shifted system, refusing families outside the hypotheses that
/// guarantee a number system.
pub fn shift_family(family: &Family) -> Result<PreNumberSystem, ConstructionError> {
    let sys = &family.base_set;
    let m = sys.modulus().to_u64();
    match m {
        Some(2) => {
            return Err(ConstructionError::UnsupportedBase {
                base: sys.base().clone(),
                reason: "needs |b| >= 4",
            })
        }
        Some(3) => {
            return Err(ConstructionError::UnsupportedBase {
                base: sys.base().clone(),
                reason: OPEN_BASE_THREE,
            })
        }
        _ => {}
    }
    if *sys.zero_digit() == family.digit {
        return Err(ConstructionError::ZeroDigitChosen {
            digit: family.digit.clone(),
        });
    }
    let bad = bad_set(sys, &family.u)?;
    if bad.contains(&family.digit) {
        return Err(ConstructionError::DigitInBadSet {
            digit: family.digit.clone(),
            bad: bad.members.into_iter().collect(),
        });
    }
    Ok(shift_family_unchecked(family))
}
