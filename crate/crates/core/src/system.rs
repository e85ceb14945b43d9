//! Pre-number systems `(Z, b, D)` with an irredundant digit set, the digit
//! function and the dynamic map `T(a) = (a - d(a)) / b`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest magnitude for which the machine-word stepping table is built.
/// Orbit values inside the contraction interval never exceed the largest
/// digit, so `a - d` stays far away from `i64` overflow.
const SMALL_LIMIT: i64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("base {base} has absolute value below 2")]
    BaseTooSmall { base: BigInt },
    #[error("expected {expected} distinct digits, found {found}")]
    WrongDigitCount { expected: BigInt, found: usize },
    #[error("digits {first} and {second} lie in the same residue class modulo the base")]
    IncompleteResidues { first: BigInt, second: BigInt },
}

/// A single digit of a [`PreNumberSystem`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(BigInt);

impl Digit {
    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn into_inner(self) -> BigInt {
        self.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Digit> for BigInt {
    fn from(d: Digit) -> Self {
        d.0
    }
}

impl PartialEq<BigInt> for Digit {
    fn eq(&self, other: &BigInt) -> bool {
        &self.0 == other
    }
}

#[derive(Debug, Clone)]
struct SmallTable {
    base: i64,
    modulus: i64,
    by_residue: Vec<i64>,
}

/// A base together with a complete, irredundant residue system of digits.
///
/// Digits are kept sorted ascending; two systems built from the same digits in
/// a different order compare equal.
#[derive(Debug, Clone)]
pub struct PreNumberSystem {
    base: BigInt,
    modulus: BigInt,
    digits: Vec<Digit>,
    // index into `digits`, keyed by the nonnegative residue modulo |base|
    by_residue: Vec<usize>,
    zero_index: usize,
    small: Option<SmallTable>,
}

impl PartialEq for PreNumberSystem {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.digits == other.digits
    }
}

impl Eq for PreNumberSystem {}

impl fmt::Display for PreNumberSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Z, {}, {{", self.base)?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}})")
    }
}

impl PreNumberSystem {
    /// Validates and builds a pre-number system. Duplicate digits are dropped
    /// before the count check.
    pub fn new<B, I, D>(base: B, digits: I) -> Result<Self, SystemError>
    where
        B: Into<BigInt>,
        I: IntoIterator<Item = D>,
        D: Into<BigInt>,
    {
        let base = base.into();
        let modulus = base.abs();
        if modulus < BigInt::from(2) {
            return Err(SystemError::BaseTooSmall { base });
        }
        let mut values: Vec<BigInt> = digits.into_iter().map(Into::into).collect();
        values.sort();
        values.dedup();
        if BigInt::from(values.len()) != modulus {
            return Err(SystemError::WrongDigitCount {
                expected: modulus,
                found: values.len(),
            });
        }
        // |base| equals a vector length here, so it fits in usize
        let m = values.len();
        let mut by_residue = vec![usize::MAX; m];
        for (idx, v) in values.iter().enumerate() {
            let r = residue(v, &modulus);
            if by_residue[r] != usize::MAX {
                return Err(SystemError::IncompleteResidues {
                    first: values[by_residue[r]].clone(),
                    second: v.clone(),
                });
            }
            by_residue[r] = idx;
        }
        let zero_index = by_residue[0];
        let small = build_small(&base, &values, &by_residue);
        Ok(Self {
            base,
            modulus,
            digits: values.into_iter().map(Digit).collect(),
            by_residue,
            zero_index,
            small,
        })
    }

    pub fn base(&self) -> &BigInt {
        &self.base
    }

    /// `|base|`, which is also the number of digits.
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Digits in ascending order.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn digit_values(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.digits.iter().map(Digit::value)
    }

    pub fn contains(&self, value: &BigInt) -> bool {
        self.digits
            .binary_search_by(|d| d.value().cmp(value))
            .is_ok()
    }

    /// Looks up the digit with the given value.
    pub fn digit(&self, value: &BigInt) -> Option<&Digit> {
        self.digits
            .binary_search_by(|d| d.value().cmp(value))
            .ok()
            .map(|i| &self.digits[i])
    }

    /// The unique digit `d` with `base | (a - d)`.
    pub fn digit_of(&self, a: &BigInt) -> &Digit {
        &self.digits[self.by_residue[residue(a, &self.modulus)]]
    }

    /// The dynamic map `T(a) = (a - d(a)) / b`; the division is exact.
    pub fn step(&self, a: &BigInt) -> BigInt {
        let d = self.digit_of(a);
        (a - d.value()) / &self.base
    }

    /// The digit divisible by the base.
    pub fn zero_digit(&self) -> &Digit {
        &self.digits[self.zero_index]
    }

    pub fn has_zero(&self) -> bool {
        self.zero_digit().value().is_zero()
    }

    pub fn min_digit(&self) -> &BigInt {
        self.digits[0].value()
    }

    pub fn max_digit(&self) -> &BigInt {
        self.digits[self.digits.len() - 1].value()
    }

    /// `max |d|` over the digit set.
    pub fn max_abs_digit(&self) -> BigInt {
        self.min_digit().abs().max(self.max_digit().abs())
    }

    /// `true` when every digit satisfies `|d| <= |b|`.
    pub fn digits_within_base(&self) -> bool {
        self.max_abs_digit() <= self.modulus
    }

    /// Returns a copy with the digit `old` replaced by `new`. Fails if the
    /// result is not a pre-number system.
    pub fn replace_digit(&self, old: &BigInt, new: BigInt) -> Result<Self, SystemError> {
        let digits = self.digits.iter().map(|d| {
            if d.value() == old {
                new.clone()
            } else {
                d.value().clone()
            }
        });
        Self::new(self.base.clone(), digits)
    }

    pub(crate) fn small_step(&self) -> Option<SmallStepper<'_>> {
        self.small.as_ref().map(|t| SmallStepper { table: t })
    }
}

/// Machine-word version of the dynamic map for systems whose digits are small.
#[derive(Clone, Copy)]
pub(crate) struct SmallStepper<'a> {
    table: &'a SmallTable,
}

impl SmallStepper<'_> {
    #[inline]
    pub(crate) fn step(&self, a: i64) -> i64 {
        let t = self.table;
        let d = t.by_residue[a.rem_euclid(t.modulus) as usize];
        (a - d) / t.base
    }

    #[cfg(test)]
    pub(crate) fn digit(&self, a: i64) -> i64 {
        let t = self.table;
        t.by_residue[a.rem_euclid(t.modulus) as usize]
    }
}

fn residue(a: &BigInt, modulus: &BigInt) -> usize {
    a.mod_floor(modulus)
        .to_usize()
        .expect("residue below a vector length")
}

fn build_small(base: &BigInt, values: &[BigInt], by_residue: &[usize]) -> Option<SmallTable> {
    let fits = |v: &BigInt| v.to_i64().filter(|x| x.abs() < SMALL_LIMIT);
    let b = fits(base)?;
    let mut table = Vec::with_capacity(by_residue.len());
    for &idx in by_residue {
        table.push(fits(&values[idx])?);
    }
    Some(SmallTable {
        base: b,
        modulus: b.abs(),
        by_residue: table,
    })
}

/// `base^exp` for a nonnegative exponent.
pub(crate) fn pow(base: &BigInt, exp: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
