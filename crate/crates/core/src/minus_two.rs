//! Base `-2` with two digits `{d, D}`: the attractor is an interval, cycles
//! have a closed-form certificate, and validity reduces to four conditions.
//! Also the `q`-adic valuation helpers the classification relies on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;
use crate::system::pow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Minus2Error {
    #[error("{{{d}, {big_d}}} needs d < D with one even and one odd digit")]
    BadPair { d: BigInt, big_d: BigInt },
    #[error("{0} is not in the attractor")]
    NotInAttractor(BigInt),
    #[error("{0} is not an odd prime")]
    BadPrime(BigInt),
    #[error("{b} is not coprime to {q}")]
    NotCoprime { q: BigInt, b: BigInt },
    #[error("valuation of 0 is undefined")]
    Zero,
    #[error("exponent must be positive")]
    BadExponent,
}

fn check_pair(d: &BigInt, big_d: &BigInt) -> Result<(), Minus2Error> {
    if d >= big_d || d.is_even() == big_d.is_even() {
        return Err(Minus2Error::BadPair {
            d: d.clone(),
            big_d: big_d.clone(),
        });
    }
    Ok(())
}

/// `(ceil((2d - D)/3), floor((2D - d)/3))`, the attractor of `{d, D}`.
pub fn minus2_attractor_interval(
    d: &BigInt,
    big_d: &BigInt,
) -> Result<(BigInt, BigInt), Minus2Error> {
    check_pair(d, big_d)?;
    let three = BigInt::from(3);
    let lo = (d * 2u8 - big_d).div_ceil(&three);
    let hi = (big_d * 2u8 - d).div_floor(&three);
    Ok((lo, hi))
}

/// The four conditions of the classification and the attractor interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minus2Verdict {
    pub d: BigInt,
    pub big_d: BigInt,
    /// One digit even, one odd.
    pub cond_parity: bool,
    /// Neither digit divisible by 3, except an even digit equal to 0.
    pub cond_no3: bool,
    /// `2d <= D` and `2D >= d`.
    pub cond_geometry: bool,
    /// `D - d` is a power of 3.
    pub cond_power3: bool,
    pub valid: bool,
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Minus2Verdict {
    pub fn conds(&self) -> [bool; 4] {
        [
            self.cond_parity,
            self.cond_no3,
            self.cond_geometry,
            self.cond_power3,
        ]
    }

    /// `{"d", "D", "valid", "conds", "lo", "hi"}`.
    pub fn to_json(&self) -> Value {
        json!({
            "d": json::int(&self.d),
            "D": json::int(&self.big_d),
            "valid": self.valid,
            "conds": self.conds(),
            "lo": json::int(&self.lo),
            "hi": json::int(&self.hi),
        })
    }

    /// `d<TAB>D`.
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}", self.d, self.big_d)
    }
}

/// `true` iff `n = 3^i` for some `i >= 0`.
pub fn is_power_of_three(n: &BigInt) -> bool {
    if !n.is_positive() {
        return false;
    }
    let three = BigInt::from(3);
    let mut m = n.clone();
    while (&m % &three).is_zero() {
        m /= &three;
    }
    m.is_one()
}

fn free_of_three(x: &BigInt) -> bool {
    !(x % 3u8).is_zero()
}

pub fn minus2_classify(d: &BigInt, big_d: &BigInt) -> Result<Minus2Verdict, Minus2Error> {
    let (lo, hi) = minus2_attractor_interval(d, big_d)?;
    let cond_parity = true;
    let cond_no3 = [d, big_d].iter().all(|x| free_of_three(x) || x.is_zero());
    let cond_geometry = d * 2u8 <= *big_d && big_d * 2u8 >= *d;
    let cond_power3 = is_power_of_three(&(big_d - d));
    Ok(Minus2Verdict {
        d: d.clone(),
        big_d: big_d.clone(),
        cond_parity,
        cond_no3,
        cond_geometry,
        cond_power3,
        valid: cond_parity && cond_no3 && cond_geometry && cond_power3,
        lo,
        hi,
    })
}

/// `true` iff the attractor of `{d0, d1}` is a single cycle: `|d0 - d1| = 1`,
/// or `|d0 - d1| = 3^i` with `i >= 1` and neither digit divisible by 3.
pub fn minus2_one_cycle_criterion(d0: &BigInt, d1: &BigInt) -> Result<bool, Minus2Error> {
    let (lo, hi) = if d0 < d1 { (d0, d1) } else { (d1, d0) };
    check_pair(lo, hi)?;
    let delta = hi - lo;
    if delta.is_one() {
        return Ok(true);
    }
    Ok(is_power_of_three(&delta) && free_of_three(d0) && free_of_three(d1))
}

/// The bit string of a cycle: `eps[i] = 1` where the orbit of `a` uses `d1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCertificate {
    pub d0: BigInt,
    pub d1: BigInt,
    pub a: BigInt,
    pub ell: usize,
    pub epsilons: Vec<bool>,
}

fn bits_value(eps: &[bool]) -> BigInt {
    eps.iter()
        .rev()
        .fold(BigInt::zero(), |acc, &e| acc * -2 + u8::from(e))
}

// digits of n in base -2 over {0, 1}, least significant first
fn negabinary(n: &BigInt) -> Vec<bool> {
    let mut out = Vec::new();
    let mut x = n.clone();
    while !x.is_zero() {
        let bit = x.is_odd();
        out.push(bit);
        x = (x - u8::from(bit)) / -2;
    }
    out
}

impl CycleCertificate {
    fn delta(&self) -> BigInt {
        &self.d0 - &self.d1
    }

    fn target(&self, ell: usize) -> Option<BigInt> {
        let num: BigInt = (&self.d0 - &self.a * 3u8) * (pow(&BigInt::from(-2), ell as u32) - 1u8);
        let den = self.delta() * -3i8;
        let (q, r) = num.div_rem(&den);
        r.is_zero().then_some(q)
    }

    /// Checks `(d0 - 3a)((-2)^ell - 1)/(-3 delta) = sum eps_i (-2)^i` exactly
    /// and that no shorter length admits such a bit string.
    pub fn verify(&self) -> bool {
        if self.epsilons.len() != self.ell || self.ell == 0 {
            return false;
        }
        if self.target(self.ell) != Some(bits_value(&self.epsilons)) {
            return false;
        }
        (1..self.ell).all(|l| match self.target(l) {
            Some(t) => negabinary(&t).len() > l,
            None => true,
        })
    }
}

/// Follows the orbit of `a` under the digits `{d0, d1}` around its cycle.
pub fn cycle_certificate(
    d0: &BigInt,
    d1: &BigInt,
    a: &BigInt,
) -> Result<CycleCertificate, Minus2Error> {
    let (small, large) = if d0 < d1 { (d0, d1) } else { (d1, d0) };
    let (lo, hi) = minus2_attractor_interval(small, large)?;
    if a < &lo || a > &hi {
        return Err(Minus2Error::NotInAttractor(a.clone()));
    }
    let width = (&hi - &lo)
        .to_usize()
        .unwrap_or(usize::MAX)
        .saturating_add(1);
    let mut eps = Vec::new();
    let mut x = a.clone();
    loop {
        let use_d1 = x.is_even() == d1.is_even();
        let digit = if use_d1 { d1 } else { d0 };
        eps.push(use_d1);
        x = (&x - digit) / -2;
        if &x == a {
            break;
        }
        if eps.len() > width {
            return Err(Minus2Error::NotInAttractor(a.clone()));
        }
    }
    Ok(CycleCertificate {
        d0: d0.clone(),
        d1: d1.clone(),
        a: a.clone(),
        ell: eps.len(),
        epsilons: eps,
    })
}

/// Verdicts for every pair `lo <= d < D <= hi` of opposite parity, ordered
/// by `d` and then `D`.
pub fn minus2_scan(lo: i64, hi: i64) -> Vec<Minus2Verdict> {
    if lo >= hi {
        return Vec::new();
    }
    (lo..hi)
        .into_par_iter()
        .flat_map_iter(|d| {
            let first = d + 1;
            (first..=hi).step_by(2).map(move |big_d| {
                minus2_classify(&BigInt::from(d), &BigInt::from(big_d)).expect("opposite parity")
            })
        })
        .collect()
}

fn check_odd_prime(q: &BigInt) -> Result<(), Minus2Error> {
    let bad = || Err(Minus2Error::BadPrime(q.clone()));
    if q < &BigInt::from(3) || q.is_even() {
        return bad();
    }
    let mut f = BigInt::from(3);
    while &f * &f <= *q {
        if (q % &f).is_zero() {
            return bad();
        }
        f += 2;
    }
    Ok(())
}

/// Exponent of `q` in `n`.
pub fn padic_valuation(q: &BigInt, n: &BigInt) -> Result<u32, Minus2Error> {
    check_odd_prime(q)?;
    if n.is_zero() {
        return Err(Minus2Error::Zero);
    }
    let mut m = n.abs();
    let mut e = 0;
    loop {
        let (next, r) = m.div_rem(q);
        if !r.is_zero() {
            return Ok(e);
        }
        m = next;
        e += 1;
    }
}

/// Smallest `t >= 1` with `q | b^t - 1`.
pub fn multiplicative_order(q: &BigInt, b: &BigInt) -> Result<u64, Minus2Error> {
    check_odd_prime(q)?;
    let r = b.mod_floor(q);
    if r.is_zero() {
        return Err(Minus2Error::NotCoprime {
            q: q.clone(),
            b: b.clone(),
        });
    }
    let mut x = r.clone();
    let mut t = 1u64;
    while !x.is_one() {
        x = (x * &r).mod_floor(q);
        t += 1;
    }
    Ok(t)
}

/// `v_q(b^n - 1)` from `v_q(n) + v_q(b^ord - 1)`, or 0 when `ord` does not
/// divide `n`.
pub fn lifted_valuation(q: &BigInt, b: &BigInt, n: u64) -> Result<u32, Minus2Error> {
    if n == 0 {
        return Err(Minus2Error::BadExponent);
    }
    let ord = multiplicative_order(q, b)?;
    if !n.is_multiple_of(ord) {
        return Ok(0);
    }
    let at_ord = pow(b, ord as u32) - 1;
    Ok(padic_valuation(q, &BigInt::from(n))? + padic_valuation(q, &at_ord)?)
}
