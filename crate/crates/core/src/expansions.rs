//! Finite expansions `a = sum d_i b^i`, zero expansions, padding, and the
//! lower bounds on `|a|` implied by a minimal expansion length.
//!
//! Digit lists are least-significant-first throughout.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;
use crate::system::{pow, Digit, PreNumberSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("{value} is not a digit")]
    NotADigit { value: BigInt },
    #[error("an expansion needs at least one digit")]
    Empty,
    #[error("{value} has no finite expansion; its orbit enters the cycle {cycle:?}")]
    NotRepresentable { value: BigInt, cycle: Vec<BigInt> },
    #[error("0 is not periodic, so there is no zero expansion")]
    NoZeroExpansion,
    #[error("cannot pad length {length} to {target}: the difference must be a nonnegative multiple of {unit}")]
    BadPadLength {
        length: usize,
        target: usize,
        unit: usize,
    },
    #[error("length bound not available: {0}")]
    UnsupportedSpec(String),
}

/// A digit sequence over a fixed system, least significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    base: BigInt,
    digits: Vec<Digit>,
    value: BigInt,
    minimal: bool,
}

impl Expansion {
    /// Wraps an arbitrary digit list. The result is not flagged minimal even
    /// if it happens to be.
    pub fn from_digits<I, D>(sys: &PreNumberSystem, digits: I) -> Result<Self, ExpansionError>
    where
        I: IntoIterator<Item = D>,
        D: Into<BigInt>,
    {
        let mut out = Vec::new();
        for v in digits {
            let v = v.into();
            match sys.digit(&v) {
                Some(d) => out.push(d.clone()),
                None => return Err(ExpansionError::NotADigit { value: v }),
            }
        }
        if out.is_empty() {
            return Err(ExpansionError::Empty);
        }
        let value = horner(sys.base(), out.iter().map(Digit::value));
        Ok(Self {
            base: sys.base().clone(),
            digits: out,
            value,
            minimal: false,
        })
    }

    pub fn base(&self) -> &BigInt {
        &self.base
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn digit_values(&self) -> Vec<BigInt> {
        self.digits.iter().map(|d| d.value().clone()).collect()
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    /// Always `false`; expansions hold at least one digit.
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Most significant digit.
    pub fn msd(&self) -> &Digit {
        self.digits.last().expect("nonempty")
    }

    /// Whether this expansion came out of [`expand`] or [`zero_expansion`].
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// `{"base", "digits_lsf", "value"}` with integers as JSON numbers.
    pub fn to_json(&self) -> Value {
        json!({
            "base": json::int(&self.base),
            "digits_lsf": json::ints(self.digits.iter().map(Digit::value)),
            "value": json::int(&self.value),
        })
    }

    /// Parses the [`Expansion::to_json`] form, checking base, digits and value
    /// against `sys`.
    pub fn from_json(sys: &PreNumberSystem, v: &Value) -> Option<Self> {
        let base = json::parse_int(v.get("base")?)?;
        if &base != sys.base() {
            return None;
        }
        let digits = json::parse_ints(v.get("digits_lsf")?)?;
        let e = Self::from_digits(sys, digits).ok()?;
        match v.get("value") {
            Some(val) if json::parse_int(val)? != e.value => None,
            _ => Some(e),
        }
    }
}

fn horner<'a, I>(base: &BigInt, lsf: I) -> BigInt
where
    I: DoubleEndedIterator<Item = &'a BigInt>,
{
    lsf.rev().fold(BigInt::zero(), |acc, d| acc * base + d)
}

/// Value of a least-significant-first digit list.
pub fn evaluate(sys: &PreNumberSystem, digits: &[BigInt]) -> Result<BigInt, ExpansionError> {
    if digits.is_empty() {
        return Err(ExpansionError::Empty);
    }
    if let Some(bad) = digits.iter().find(|d| !sys.contains(d)) {
        return Err(ExpansionError::NotADigit { value: bad.clone() });
    }
    Ok(horner(sys.base(), digits.iter()))
}

/// Minimal expansion of `a`: the digits read off the orbit of `a` until it
/// first returns to 0 after at least one step.
pub fn expand(sys: &PreNumberSystem, a: &BigInt) -> Result<Expansion, ExpansionError> {
    let mut digits = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut orbit = Vec::new();
    let mut x = a.clone();
    loop {
        if !digits.is_empty() && x.is_zero() {
            break;
        }
        if let Some(&start) = seen.get(&x) {
            let cycle = crate::orbits::canonical_cycle(orbit[start..].to_vec());
            return Err(ExpansionError::NotRepresentable {
                value: a.clone(),
                cycle,
            });
        }
        seen.insert(x.clone(), orbit.len());
        orbit.push(x.clone());
        let d = sys.digit_of(&x).clone();
        x = (&x - d.value()) / sys.base();
        digits.push(d);
    }
    Ok(Expansion {
        base: sys.base().clone(),
        digits,
        value: a.clone(),
        minimal: true,
    })
}

/// The digits read along the cycle through 0.
pub fn zero_expansion(sys: &PreNumberSystem) -> Result<Expansion, ExpansionError> {
    match expand(sys, &BigInt::zero()) {
        Ok(e) => Ok(e),
        Err(ExpansionError::NotRepresentable { .. }) => Err(ExpansionError::NoZeroExpansion),
        Err(e) => Err(e),
    }
}

/// Length of the cycle through 0, if 0 is periodic.
pub fn zero_expansion_length(sys: &PreNumberSystem) -> Option<usize> {
    if let Some(st) = sys.small_step() {
        // the orbit of 0 stays inside [-K, K], so it returns within 2K + 1
        // steps if it returns at all
        let k = sys.max_abs_digit().to_i64().expect("small table");
        let limit = 2 * k as usize + 4;
        let mut x = 0i64;
        for n in 1..=limit {
            x = st.step(x);
            if x == 0 {
                return Some(n);
            }
        }
        return None;
    }
    zero_expansion(sys).ok().map(|e| e.len())
}

/// Prepends whole copies of the zero expansion at the most significant end
/// so that the result has `target` digits.
pub fn pad(
    sys: &PreNumberSystem,
    e: &Expansion,
    target: usize,
) -> Result<Expansion, ExpansionError> {
    let zero = zero_expansion(sys)?;
    let unit = zero.len();
    if target < e.len() || !(target - e.len()).is_multiple_of(unit) {
        return Err(ExpansionError::BadPadLength {
            length: e.len(),
            target,
            unit,
        });
    }
    let mut digits = e.digits.clone();
    for _ in 0..(target - e.len()) / unit {
        digits.extend(zero.digits.iter().cloned());
    }
    Ok(Expansion {
        base: e.base.clone(),
        digits,
        value: e.value.clone(),
        minimal: target == e.len() && e.minimal,
    })
}

/// For each multiple `z` of the base with `|z| <= bound`, replaces the zero
/// digit of `template` by `z` and records the zero-expansion length.
pub fn zero_digit_length_scan(
    template: &PreNumberSystem,
    bound: &BigInt,
) -> BTreeMap<BigInt, Option<usize>> {
    let b = template.modulus();
    let steps = (bound / b)
        .to_i64()
        .expect("scan bound fits a machine word");
    let old = template.zero_digit().value().clone();
    (-steps..=steps)
        .into_par_iter()
        .map(|m| {
            let z = template.base() * m;
            let sys = template
                .replace_digit(&old, z.clone())
                .expect("same residue class");
            let len = zero_expansion_length(&sys);
            (z, len)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Exact lower bound on `|a|` for any `a` whose minimal expansion has
/// `ell + 1` digits.
///
/// Requires a number system with `|b| >= 3` and `|d| <= |b|` for every digit.
/// For negative bases only zero expansions of length 1, 2 or 3 are covered.
pub fn minimal_length_lower_bound(
    sys: &PreNumberSystem,
    ell: u32,
) -> Result<BigRational, ExpansionError> {
    let unsupported = |msg: &str| Err(ExpansionError::UnsupportedSpec(msg.to_owned()));
    let b = sys.base();
    let m = sys.modulus().clone();
    if m < BigInt::from(3) {
        return unsupported("|b| must be at least 3");
    }
    if !sys.digits_within_base() {
        return unsupported("some digit exceeds |b| in absolute value");
    }
    let r = |n: BigInt, d: BigInt| BigRational::new(n, d);
    if b.is_positive() {
        let bl = pow(b, ell);
        let den = b - 1;
        if sys.has_zero() {
            return Ok(r(bl + b - 2, den));
        }
        if ell == 0 {
            return unsupported("without 0 the bound needs at least two digits");
        }
        let bl1 = pow(b, ell - 1);
        return Ok(r(bl - bl1 * 2 + b, den));
    }
    let l0 = match zero_expansion_length(sys) {
        Some(l) => l,
        None => return unsupported("0 is not periodic"),
    };
    let big_b = m;
    let bl = pow(&big_b, ell);
    let den = &big_b * &big_b - 1;
    let even = ell.is_multiple_of(2);
    let num = match l0 {
        1 => {
            if even {
                bl - 1
            } else {
                bl - &big_b
            }
        }
        2 => {
            if ell < 1 {
                return unsupported("zero expansion of length 2 needs at least two digits");
            }
            let bl1 = pow(&big_b, ell - 1);
            if even {
                bl - bl1 + &big_b - 1
            } else {
                bl - bl1 - &big_b + 1
            }
        }
        3 => {
            if ell < 2 {
                return unsupported("zero expansion of length 3 needs at least three digits");
            }
            let bl2 = pow(&big_b, ell - 2);
            if even {
                bl - bl2 * 2 + 1
            } else {
                bl - bl2 * 2 + &big_b
            }
        }
        _ => return unsupported("zero expansion longer than 3"),
    };
    Ok(r(num, den) + BigRational::one())
}
