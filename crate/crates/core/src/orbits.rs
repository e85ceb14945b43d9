//! Contraction bounds, attractors and the number-system decision.
//!
//! The attractor is the union of all periodic orbits of the dynamic map. Every
//! orbit eventually enters `[-L, L]` with `L = K / (|b| - 1)` and never leaves
//! it again, and every periodic point is confined to the sharper interval
//! `[interval_lo, interval_hi]` returned by [`bounds`].

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::system::PreNumberSystem;

/// Widest contraction interval handled with the flat visit table.
const DENSE_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("orbit of {seed} did not repeat within {cap} steps")]
    IterationCap { seed: BigInt, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// `K`, the largest absolute value of a digit.
    pub max_abs_digit: BigInt,
    /// `L = K / (|b| - 1)`.
    pub contraction_radius: BigRational,
    pub interval_lo: BigRational,
    pub interval_hi: BigRational,
}

impl Bounds {
    /// Integer points `[-ceil(L), ceil(L)]`; closed under the dynamic map.
    pub fn contraction_range(&self) -> (BigInt, BigInt) {
        let c = self.contraction_radius.ceil().to_integer();
        (-c.clone(), c)
    }

    /// Integer points of `[interval_lo, interval_hi]`.
    pub fn attractor_range(&self) -> (BigInt, BigInt) {
        (
            self.interval_lo.ceil().to_integer(),
            self.interval_hi.floor().to_integer(),
        )
    }
}

pub fn bounds(sys: &PreNumberSystem) -> Bounds {
    let b = sys.base();
    let d = sys.min_digit();
    let big_d = sys.max_digit();
    let k = sys.max_abs_digit();
    let radius = BigRational::new(k.clone(), sys.modulus() - BigInt::one());
    let (lo, hi) = if b.is_positive() {
        let den = b - BigInt::one();
        (
            BigRational::new(-big_d, den.clone()),
            BigRational::new(-d, den),
        )
    } else {
        let den = b * b - BigInt::one();
        (
            BigRational::new(-(d * b) - big_d, den.clone()),
            BigRational::new(-(big_d * b) - d, den),
        )
    };
    Bounds {
        max_abs_digit: k,
        contraction_radius: radius,
        interval_lo: lo,
        interval_hi: hi,
    }
}

/// The periodic points of the dynamic map, split into cycles.
///
/// Each cycle is listed in orbit order starting from its smallest element;
/// cycles are ordered by length, then by first element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractorReport {
    pub members: BTreeSet<BigInt>,
    pub cycles: Vec<Vec<BigInt>>,
    pub contains_zero: bool,
}

impl AttractorReport {
    fn from_cycles(mut cycles: Vec<Vec<BigInt>>) -> Self {
        for c in &mut cycles {
            let start = min_position(c);
            c.rotate_left(start);
        }
        cycles.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x[0].cmp(&y[0])));
        let members: BTreeSet<BigInt> = cycles.iter().flatten().cloned().collect();
        let contains_zero = members.contains(&BigInt::zero());
        Self {
            members,
            cycles,
            contains_zero,
        }
    }

    /// `{"members", "cycles", "contains_zero"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "members": crate::json::ints(self.members.iter()),
            "cycles": self.cycles.iter().map(|c| crate::json::ints(c.iter())).collect::<Vec<_>>(),
            "contains_zero": self.contains_zero,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    pub fn cycle_of(&self, a: &BigInt) -> Option<&[BigInt]> {
        self.cycles
            .iter()
            .find(|c| c.contains(a))
            .map(Vec::as_slice)
    }

    /// Single cycle through zero.
    pub fn is_number_system(&self) -> bool {
        self.cycles.len() == 1 && self.contains_zero
    }
}

fn min_position(c: &[BigInt]) -> usize {
    c.iter()
        .enumerate()
        .min_by(|x, y| x.1.cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Rotates a cycle so that its minimum comes first.
pub fn canonical_cycle(mut cycle: Vec<BigInt>) -> Vec<BigInt> {
    let start = min_position(&cycle);
    cycle.rotate_left(start);
    cycle
}

/// Computes the attractor by following every integer of the attractor
/// interval until its orbit closes.
pub fn attractor(sys: &PreNumberSystem) -> AttractorReport {
    let bd = bounds(sys);
    let (clo, chi) = bd.contraction_range();
    let (slo, shi) = bd.attractor_range();
    let width = (&chi - &clo).to_u64().map(|w| w + 1);
    if let (Some(stepper), Some(w)) = (sys.small_step(), width) {
        if w <= DENSE_LIMIT {
            let offset = clo.to_i64().expect("small table bounds");
            let seeds = (
                slo.to_i64().expect("seed in range"),
                shi.to_i64().expect("seed in range"),
            );
            return dense_attractor(stepper, offset, w as usize, seeds);
        }
    }
    attractor_from_seeds(sys, &slo, &shi).expect("orbit iteration bounded by contraction")
}

fn dense_attractor(
    stepper: crate::system::SmallStepper<'_>,
    offset: i64,
    width: usize,
    (seed_lo, seed_hi): (i64, i64),
) -> AttractorReport {
    // walk id per slot; 0 marks unvisited
    let mut mark = vec![0u32; width];
    let slot = |x: i64| -> usize {
        let s = x - offset;
        assert!(
            s >= 0 && (s as usize) < width,
            "orbit left the contraction interval at {x}"
        );
        s as usize
    };
    let mut cycles = Vec::new();
    let mut walk = 0u32;
    for seed in seed_lo..=seed_hi {
        if mark[slot(seed)] != 0 {
            continue;
        }
        walk += 1;
        let mut x = seed;
        while mark[slot(x)] == 0 {
            mark[slot(x)] = walk;
            x = stepper.step(x);
        }
        if mark[slot(x)] == walk {
            let start = x;
            let mut cycle = vec![BigInt::from(start)];
            let mut y = stepper.step(start);
            while y != start {
                cycle.push(BigInt::from(y));
                y = stepper.step(y);
            }
            cycles.push(cycle);
        }
    }
    AttractorReport::from_cycles(cycles)
}

/// Attractor restricted to the cycles reached from the seeds `lo..=hi`.
///
/// Uses arbitrary-precision values throughout. Fails if an orbit runs longer
/// than `4 * width + 4` steps, where `width` spans the seeds and the
/// contraction interval; by contraction this never happens.
pub fn attractor_from_seeds(
    sys: &PreNumberSystem,
    lo: &BigInt,
    hi: &BigInt,
) -> Result<AttractorReport, OrbitError> {
    let (clo, chi) = bounds(sys).contraction_range();
    let span_lo = lo.min(&clo);
    let span_hi = hi.max(&chi);
    let width = (span_hi - span_lo).to_u64().unwrap_or(u64::MAX);
    let cap = width.saturating_mul(4).saturating_add(4);

    let mut done: HashSet<BigInt> = HashSet::new();
    let mut cycles = Vec::new();
    let mut seed = lo.clone();
    while &seed <= hi {
        if !done.contains(&seed) {
            let mut path: Vec<BigInt> = Vec::new();
            let mut pos: HashMap<BigInt, usize> = HashMap::new();
            let mut x = seed.clone();
            loop {
                if done.contains(&x) {
                    break;
                }
                if let Some(&i) = pos.get(&x) {
                    cycles.push(path[i..].to_vec());
                    break;
                }
                if path.len() as u64 >= cap {
                    return Err(OrbitError::IterationCap { seed, cap });
                }
                let next = sys.step(&x);
                pos.insert(x.clone(), path.len());
                path.push(x);
                x = next;
            }
            done.extend(path);
        }
        seed += 1;
    }
    Ok(AttractorReport::from_cycles(cycles))
}

/// All `a` with `T(a) = a`, i.e. `d / (1 - b)` for digits divisible by `1 - b`.
pub fn fixed_points(sys: &PreNumberSystem) -> Vec<BigInt> {
    let m = BigInt::one() - sys.base();
    let mut out: Vec<BigInt> = sys
        .digit_values()
        .filter_map(|d| {
            let (q, r) = d.div_rem(&m);
            r.is_zero().then_some(q)
        })
        .collect();
    out.sort();
    out
}

/// Decides the number-system property. A nonzero fixed point rejects the
/// system without computing the attractor.
pub fn is_number_system(sys: &PreNumberSystem) -> bool {
    if fixed_points(sys).iter().any(|a| !a.is_zero()) {
        return false;
    }
    attractor(sys).is_number_system()
}

/// Validity together with the attractor that witnesses it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub attractor: AttractorReport,
}

pub fn check(sys: &PreNumberSystem) -> Verdict {
    let attractor = attractor(sys);
    Verdict {
        valid: attractor.is_number_system(),
        attractor,
    }
}
