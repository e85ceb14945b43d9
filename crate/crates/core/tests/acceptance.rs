//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs under `cargo test` with `harness = false`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use radix_core::constructions::{
    bad_set, check_small_digit_set, nfold, odd_digit_set, shift_family_unchecked, translate_scan,
    Family,
};
use radix_core::expansions::{zero_expansion, zero_expansion_length};
use radix_core::minus_two::{lifted_valuation, minus2_scan, multiplicative_order, padic_valuation};
use radix_core::orbits::{attractor, canonical_cycle, is_number_system};
use radix_core::rewrite::{verify_criterion, RewriteSystem, DEFAULT_STATE_CAP};
use radix_core::PreNumberSystem;

type Outcome = Result<String, String>;

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn sys(base: i64, digits: &[i64]) -> PreNumberSystem {
    PreNumberSystem::new(base, digits.iter().copied()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent oracle: every integer in the contraction interval must reach 0
/// under `a -> (a - d(a)) / b`. Digits are scanned linearly, no shared code.
fn naive_valid(base: i64, digits: &[i64]) -> bool {
    let m = base.abs();
    let k = digits.iter().map(|d| d.abs()).max().unwrap();
    let r = k / (m - 1) + 1;
    let width = (2 * r + 1) as usize;
    // 0 unknown, 1 reaches zero, 2 on the current path
    let mut state = vec![0u8; width];
    let idx = |a: i64| (a + r) as usize;
    state[idx(0)] = 1;
    for start in -r..=r {
        let mut path = Vec::new();
        let mut a = start;
        loop {
            if a.abs() > r {
                return false;
            }
            match state[idx(a)] {
                1 => break,
                2 => return false,
                _ => {}
            }
            state[idx(a)] = 2;
            path.push(a);
            let d = *digits
                .iter()
                .find(|&&d| (a - d).rem_euclid(m) == 0)
                .unwrap();
            a = (a - d) / base;
        }
        for p in path {
            state[idx(p)] = 1;
        }
    }
    // 0 itself must return to 0
    let mut a = 0i64;
    for _ in 0..=width {
        let d = *digits
            .iter()
            .find(|&&d| (a - d).rem_euclid(m) == 0)
            .unwrap();
        a = (a - d) / base;
        if a == 0 {
            return true;
        }
    }
    false
}

fn values(s: &PreNumberSystem) -> Vec<i64> {
    s.digit_values().map(|d| d.to_i64().unwrap()).collect()
}

/// Every complete residue system modulo `b` with digits in `[-|b|, |b|]`.
fn small_digit_sets(b: i64) -> Vec<Vec<i64>> {
    let m = b.abs();
    let mut sets = vec![Vec::new()];
    for r in 0..m {
        let choices: Vec<i64> = (-m..=m).filter(|d| d.rem_euclid(m) == r).collect();
        sets = sets
            .into_iter()
            .flat_map(|s| {
                choices.iter().map(move |&d| {
                    let mut t = s.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    sets
}

fn golden_30_111() -> Outcome {
    let listed: Vec<Vec<i64>> = vec![
        vec![10],
        vec![37],
        vec![-17, 64],
        vec![-8, 19, 46],
        vec![1, 55, 28],
        vec![4, 13, 49, 31, 40, -5, 58, -14, 22],
        vec![-2, 16, 7, 52, -11, 61, 25, 43, 34],
        vec![
            0, 15, 48, -9, 60, -15, 63, 24, 3, 54, -12, 21, 45, 33, 39, 36, -3, 57, 27, 42, -6, 18,
            6, 12, 9, 51, 30,
        ],
        vec![
            -1, 56, -13, 62, -16, 23, 44, -7, 59, 26, 2, 14, 8, 11, 50, -10, 20, 5, 53, 29, 41, 35,
            38, -4, 17, 47, 32,
        ],
    ];
    let report = attractor(&sys(-2, &[30, 111]));
    let want_members: BTreeSet<BigInt> = (-17..=64).map(big).collect();
    ensure(report.members == want_members, || {
        format!("members {:?}", report.members)
    })?;
    let mut lengths = report.cycle_lengths();
    lengths.sort_unstable();
    ensure(lengths == [1, 1, 2, 3, 3, 9, 9, 27, 27], || {
        format!("lengths {lengths:?}")
    })?;
    let want: BTreeSet<Vec<BigInt>> = listed
        .iter()
        .map(|c| canonical_cycle(c.iter().copied().map(big).collect()))
        .collect();
    let got: BTreeSet<Vec<BigInt>> = report.cycles.iter().cloned().collect();
    ensure(got == want, || "cycles differ after rotation".into())?;
    Ok(format!("{} cycles, 82 members", got.len()))
}

fn minus2_figure() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let verdicts = pool.install(|| minus2_scan(-200, 200));
    let mut valid = 0usize;
    for v in &verdicts {
        let (d, dd) = (v.d.to_i64().unwrap(), v.big_d.to_i64().unwrap());
        let oracle = naive_valid(-2, &[d, dd]);
        ensure(v.valid == oracle, || {
            format!(
                "mismatch at ({d}, {dd}): classify {} oracle {oracle}",
                v.valid
            )
        })?;
        if v.valid {
            valid += 1;
            ensure(2 * d <= dd && 2 * dd >= d, || {
                format!("({d}, {dd}) outside the wedge")
            })?;
        }
    }
    ensure(verdicts.len() == 40_200, || {
        format!("{} pairs", verdicts.len())
    })?;
    Ok(format!(
        "{} pairs, {valid} valid, 0 mismatches, 1 thread",
        verdicts.len()
    ))
}

fn small_digit_soundness() -> Outcome {
    let mut checked = 0usize;
    for m in 3..=7i64 {
        for b in [m, -m] {
            for digits in small_digit_sets(b) {
                let s = sys(b, &digits);
                if check_small_digit_set(&s).map_err(|e| e.to_string())? {
                    checked += 1;
                    ensure(is_number_system(&s) && naive_valid(b, &digits), || {
                        format!("counterexample {s}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "{checked} digit sets satisfy the conditions, 0 counterexamples"
    ))
}

fn nfold_law() -> Outcome {
    let s = sys(-2, &[1, 2]);
    let want: BTreeSet<BigInt> = [big(0), big(1)].into();
    for n in 1..=6u32 {
        let f = nfold(&s, n);
        let valid = is_number_system(&f);
        ensure(valid == (n % 2 == 1), || {
            format!("n = {n}: valid = {valid}")
        })?;
        ensure(
            valid == naive_valid(f.base().to_i64().unwrap(), &values(&f)),
            || format!("oracle n = {n}"),
        )?;
        ensure(attractor(&f).members == want, || {
            format!("n = {n}: attractor differs")
        })?;
    }
    Ok("valid exactly for n = 1, 3, 5; attractor {0, 1}".into())
}

fn families() -> Outcome {
    let mut count = 0;
    for k in 1..=4u32 {
        for b in [4i64, 5, 6] {
            let p = b.pow(k);
            let mut with_zero: Vec<i64> = (0..=b - 2).collect();
            with_zero.push(-1 - p);
            let mut without: Vec<i64> = vec![-1];
            without.extend(2..=b - 2);
            without.extend([b, 1 + p]);
            for digits in [with_zero, without] {
                ensure(
                    is_number_system(&sys(b, &digits)) && naive_valid(b, &digits),
                    || format!("b = {b} k = {k}: {digits:?} invalid"),
                )?;
                count += 1;
            }
        }
        for b in [-4i64, -5, -6] {
            let m = -b;
            let p = b.pow(k);
            let mut with_zero: Vec<i64> = (0..=m - 2).collect();
            with_zero.push(m - 1 - p);
            let mut without: Vec<i64> = vec![1, 2];
            without.extend(4..=m);
            without.push(3 - p);
            for digits in [with_zero, without] {
                ensure(
                    is_number_system(&sys(b, &digits)) && naive_valid(b, &digits),
                    || format!("b = {b} k = {k}: {digits:?} invalid"),
                )?;
                count += 1;
            }
        }
    }
    let mut notes = Vec::new();
    for k in 2..=3u32 {
        let p = 5i64.pow(k);
        let plus = [-5 + p, 1, 2, 3, -1];
        ensure(
            !is_number_system(&sys(5, &plus)) && !naive_valid(5, &plus),
            || format!("{plus:?} valid"),
        )?;
        let neg = [-5 - (-5i64).pow(k), 1, 2, 3, 4];
        ensure(
            !is_number_system(&sys(-5, &neg)) && !naive_valid(-5, &neg),
            || format!("{neg:?} valid"),
        )?;
        let minus = [-5 - p, 1, 2, 3, -1];
        let valid = is_number_system(&sys(5, &minus));
        ensure(valid == naive_valid(5, &minus), || {
            format!("oracle disagrees on {minus:?}")
        })?;
        if valid {
            let cycles = attractor(&sys(5, &minus)).cycles;
            notes.push(format!(
                "{{{}, 1, 2, 3, -1}} at base 5 is valid (cycles {cycles:?}), not a counterexample",
                -5 - p
            ));
        }
    }
    let mut msg = format!("{count} family members valid, zero-digit shifts fail");
    if !notes.is_empty() {
        msg.push_str("; DEVIATION: ");
        msg.push_str(&notes.join("; "));
    }
    Ok(msg)
}

fn worked_bad_sets() -> Outcome {
    let cases: Vec<(PreNumberSystem, i64, Vec<i64>)> = vec![
        (sys(5, &[-1, 0, 1, 2, 3]), 1, vec![0, 1, 2]),
        (sys(5, &[-1, 0, 1, 2, 3]), -1, vec![-1, 0, 3]),
        (sys(5, &[-1, 1, 2, 3, 5]), 1, vec![-1, 1, 2, 5]),
        (sys(5, &[-1, 1, 2, 3, 5]), -1, vec![-1, 3, 5]),
        (odd_digit_set(&big(5)).unwrap(), 1, vec![1, -1, 5, -3]),
        (odd_digit_set(&big(5)).unwrap(), -1, vec![-1, 3, 5]),
        (sys(-5, &[0, 1, 2, 3, 4]), 1, vec![0, 1, 2]),
        (sys(-5, &[0, 1, 2, 3, 4]), -1, vec![0, 1, 3, 4]),
        (sys(-5, &[1, 2, 3, 4, 5]), 1, vec![1, 2, 5]),
        (sys(-5, &[1, 2, 3, 4, 5]), -1, vec![1, 3, 4, 5]),
        (odd_digit_set(&big(-5)).unwrap(), 1, vec![-1, 1, -3, -5]),
        (sys(-5, &[-5, 1, 2, 3, 4]), 1, vec![1, 2, 4, -5]),
    ];
    for (s, u, want) in &cases {
        let got = bad_set(s, &big(*u)).map_err(|e| e.to_string())?.members;
        let want: BTreeSet<BigInt> = want.iter().copied().map(big).collect();
        ensure(got == want, || format!("{s} u = {u}: {got:?}"))?;
    }
    // the listed set omits the zero digit -5 from the expansion of 0
    let got = bad_set(&odd_digit_set(&big(-5)).unwrap(), &big(-3))
        .map_err(|e| e.to_string())?
        .members;
    let want: BTreeSet<BigInt> = [-5, -3, -1, 1, 3].into_iter().map(big).collect();
    ensure(got == want, || format!("odd digits u = -3: {got:?}"))?;
    Ok(format!(
        "{} bad sets at b = 5 and b = -5; DEVIATION: odd digits b = -5, u = -3 also contains the zero digit -5",
        cases.len()
    ))
}

fn rewrite_verification() -> Outcome {
    let (mut families, mut words) = (0usize, 0usize);
    for b in [4i64, 5, -4, -5] {
        for digits in small_digit_sets(b) {
            let s = sys(b, &digits);
            if !is_number_system(&s) {
                continue;
            }
            let max = if s.has_zero() {
                b.abs() - 1
            } else {
                b.abs() - 2
            };
            for u in (-max..=max).filter(|&u| u != 0) {
                let bad = bad_set(&s, &big(u)).map_err(|e| e.to_string())?;
                for &d in &digits {
                    if bad.contains(&big(d)) {
                        continue;
                    }
                    for k in 1..=2u32 {
                        let f =
                            Family::new(s.clone(), big(d), big(u), k).map_err(|e| e.to_string())?;
                        let t = verify_criterion(&f, DEFAULT_STATE_CAP)
                            .map_err(|e| format!("{s} d={d} u={u}: {e}"))?;
                        ensure(t.all_escape, || {
                            format!("{s} d={d} u={u} k={k}: stuck at {:?}", t.stuck_word)
                        })?;
                        let shifted = shift_family_unchecked(&f);
                        ensure(is_number_system(&shifted), || format!("{shifted} invalid"))?;
                        let rw = RewriteSystem::new(&f).map_err(|e| e.to_string())?;
                        for w in rw.words() {
                            let next = rw.step(&w).map_err(|e| e.to_string())?;
                            ensure(rw.word_value(&next) == rw.successor_value(&w), || {
                                format!("{s} d={d} u={u} k={k}: value identity fails at {w:?}")
                            })?;
                            words += 1;
                        }
                        families += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{families} families escape, value identity on {words} words"
    ))
}

fn zero_expansion_lengths() -> Outcome {
    let mut last = Duration::ZERO;
    let mut lengths = Vec::new();
    for i in 0..=4u32 {
        let start = Instant::now();
        let z = 3i64.pow(i) + 1;
        let s = sys(-2, &[1, z]);
        let e = zero_expansion(&s).map_err(|e| e.to_string())?;
        last = start.elapsed();
        let value = e
            .digit_values()
            .iter()
            .rev()
            .fold(BigInt::from(0), |acc, d| acc * -2 + d);
        ensure(value == big(0), || {
            format!("i = {i}: expansion has value {value}")
        })?;
        // without the digit 0 no single digit has value 0, so i = 0 needs two
        let want = if i == 0 { 2 } else { 3usize.pow(i) };
        ensure(e.len() == want, || format!("i = {i}: length {}", e.len()))?;
        ensure(zero_expansion_length(&s) == Some(e.len()), || {
            format!("i = {i}: fast path differs")
        })?;
        lengths.push(e.len());
    }
    ensure(last < Duration::from_secs(1), || {
        format!("i = 4 took {last:?}")
    })?;
    Ok(format!(
        "lengths {lengths:?}; i = 4 in {last:.2?}; DEVIATION: i = 0 has length 2, zero expansion (2, 1) of (-2, {{1, 2}})"
    ))
}

fn lifting() -> Outcome {
    let mut checked = 0usize;
    for q in [3i64, 5, 7] {
        for m in 2..=9i64 {
            for b in [m, -m] {
                if num_integer::gcd(q, b) != 1 {
                    continue;
                }
                let (qb, bb) = (big(q), big(b));
                let ord = multiplicative_order(&qb, &bb).map_err(|e| e.to_string())?;
                let mut power = BigInt::one();
                for n in 1..=200u64 {
                    power *= &bb;
                    let direct = padic_valuation(&qb, &(&power - 1)).map_err(|e| e.to_string())?;
                    let lifted = lifted_valuation(&qb, &bb, n).map_err(|e| e.to_string())?;
                    ensure(direct == lifted, || {
                        format!("q={q} b={b} n={n}: {direct} vs {lifted} (ord {ord})")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (q, b, n) triples agree"))
}

fn translation_finitude() -> Outcome {
    let s = sys(5, &[-1, 0, 1, 2, 3]);
    let mut parts = Vec::new();
    for keep_zero in [false, true] {
        let narrow = translate_scan(&s, -500, 500, keep_zero).map_err(|e| e.to_string())?;
        let wide = translate_scan(&s, -1000, 1000, keep_zero).map_err(|e| e.to_string())?;
        ensure(narrow.iter().all(|t| t.abs() <= 25), || {
            format!("keep_zero={keep_zero}: {narrow:?}")
        })?;
        ensure(narrow == wide, || {
            format!("keep_zero={keep_zero}: widening changed the list")
        })?;
        for t in -500..=500i64 {
            let digits: Vec<i64> = values(&s)
                .into_iter()
                .map(|d| if keep_zero && d == 0 { 0 } else { d + t })
                .collect();
            let residues: BTreeSet<i64> = digits.iter().map(|d| d.rem_euclid(5)).collect();
            let oracle = residues.len() == 5 && naive_valid(5, &digits);
            ensure(oracle == narrow.contains(&t), || {
                format!("keep_zero={keep_zero} t={t}: oracle {oracle}")
            })?;
        }
        parts.push(format!(
            "{} t {:?}",
            if keep_zero { "keep-zero" } else { "plain" },
            narrow
        ));
    }
    Ok(parts.join(", "))
}

fn base_two() -> Outcome {
    let mut checked = 0usize;
    for d0 in -50..=50i64 {
        for d1 in d0 + 1..=50 {
            if (d0 - d1).rem_euclid(2) == 0 {
                continue;
            }
            let s = sys(2, &[d0, d1]);
            ensure(!is_number_system(&s) && !naive_valid(2, &[d0, d1]), || {
                format!("{s} valid")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} two-digit sets all fail"))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, Check, Option<Duration>); 11] = [
        (
            1,
            "golden attractor of (-2, {30, 111})",
            golden_30_111,
            Some(Duration::from_millis(100)),
        ),
        (
            2,
            "base -2 classification on [-200, 200]",
            minus2_figure,
            Some(Duration::from_secs(10)),
        ),
        (
            3,
            "small digit sets are number systems",
            small_digit_soundness,
            Some(Duration::from_secs(60)),
        ),
        (4, "n-fold law for (-2, {1, 2})", nfold_law, None),
        (5, "shifted families and zero-digit shifts", families, None),
        (6, "worked bad sets", worked_bad_sets, None),
        (7, "rewrite-system verification", rewrite_verification, None),
        (
            8,
            "zero-expansion lengths 3^i",
            zero_expansion_lengths,
            None,
        ),
        (9, "lifting the exponent", lifting, None),
        (10, "translation finitude", translation_finitude, None),
        (11, "base 2 has no two-digit number system", base_two, None),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS {id:>2} {name} [{elapsed:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{elapsed:.2?}]: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
