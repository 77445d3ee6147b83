//! Class numbers and fundamental units of the quadratic fields `Q(√-p)` and
//! `Q(√p)`, each computed by two independent routes, plus the factorial
//! congruence that ties `((p-1)/2)! mod p` to the imaginary class number.
//!
//! * `h(-p)` (for `p ≡ 3 mod 4`): a weighted character sum over `1..p`,
//!   cross-checkable against an enumeration of reduced positive-definite
//!   binary quadratic forms.
//! * `h(p)` (for `p ≡ 1 mod 4`): the analytic finite product (rounded from a
//!   signed log sum), always cross-checked against a count of cycles of
//!   reduced indefinite forms under the standard reduction step.
//! * `ε_p`: minimal `(u + v√p)/denom` with `u² - p·v² = norm·denom²`, found by
//!   the continued-fraction expansion of `√p` with a half-integer descent for
//!   `p ≡ 5 (mod 8)`.

use crate::arith::{is_prime, mod_mul, PrimeCtx};
use crate::perms::{square_list_stats, SquareListStats};
use crate::report::Verdict;
use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Errors from class-number and unit computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not a prime congruent to 3 mod 4")]
    NotThreeMod4(u64),
    #[error("{0} is not a prime congruent to 1 mod 4")]
    NotOneMod4(u64),
    #[error("weighted character sum for {0} is not divisible by {0}")]
    SumNotDivisible(u64),
    #[error("analytic class number for {p} landed at {value}, too far from an integer")]
    RoundingSlack { p: u64, value: f64 },
    #[error("class number routes disagree for {p}: analytic {analytic}, cycle count {cycles}")]
    RoutesDisagree { p: u64, analytic: u64, cycles: u64 },
    #[error("p = {0} too large for the unit search")]
    TooLarge(u64),
    #[error("cache record invalid: {0}")]
    CacheFormat(String),
}

/// Fundamental unit `(u + v√p)/denom` of `Q(√p)`, `p ≡ 1 (mod 4)` prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadUnit {
    pub u: BigUint,
    pub v: BigUint,
    /// 1, or 2 for half-integer units (possible only when `p ≡ 5 mod 8`).
    pub denom: u8,
    /// The norm `(u² - p·v²)/denom²`, always `±1`.
    pub norm: i8,
}

impl QuadUnit {
    /// Check `u² - p·v² = norm·denom²` exactly.
    pub fn satisfies_norm_equation(&self, p: u64) -> bool {
        let lhs_u = &self.u * &self.u;
        let lhs_v = &self.v * &self.v * BigUint::from(p);
        let rhs = BigUint::from(u64::from(self.denom) * u64::from(self.denom));
        match self.norm {
            1 => lhs_u == lhs_v + rhs,
            -1 => lhs_u + rhs == lhs_v,
            _ => false,
        }
    }

    /// Natural log of the unit as a float. `u` may be astronomically large,
    /// so the log is assembled from the top bits and the bit length rather
    /// than a (possibly overflowing) float conversion.
    pub fn log(&self, p: u64) -> f64 {
        let d = f64::from(self.denom);
        let bits = self.u.bits();
        if bits <= 52 {
            let uf = self.u.to_f64().expect("fits in f64");
            let vf = self.v.to_f64().expect("v <= u for p > 1");
            (uf + vf * (p as f64).sqrt()).ln() - d.ln()
        } else {
            // u + v√p = u·(1 + √(1 - norm·denom²/u²)) and the correction
            // term is far below f64 resolution, so ln(1 + √1) = ln 2.
            let top = (&self.u >> (bits - 53)).to_f64().expect("53 bits");
            top.ln() + ((bits - 53) as f64) * LN_2 + LN_2 - d.ln()
        }
    }
}

/// `h(-p)` for `p ≡ 3 (mod 4)` by the weighted character sum
/// `-(1/p)·Σ_{k=1}^{p-1} k·(k/p)`, with `h(-3) := 1` by convention (the sum
/// formula is valid only for `p > 3`). Errors if the sum fails the exact
/// divisibility check, which would indicate an arithmetic bug.
pub fn h_minus_weighted_sum(p: u64) -> Result<u64, ClassError> {
    if p % 4 != 3 || !is_prime(p) {
        return Err(ClassError::NotThreeMod4(p));
    }
    if p == 3 {
        return Ok(1);
    }
    let ctx = PrimeCtx::new(p).expect("odd prime");
    let mut sum: i64 = 0;
    for k in 1..p {
        sum += k as i64 * i64::from(ctx.legendre_res(k));
    }
    let neg = -sum;
    if neg <= 0 || neg % p as i64 != 0 {
        return Err(ClassError::SumNotDivisible(p));
    }
    Ok((neg / p as i64) as u64)
}

/// `h(-p)` by direct enumeration of reduced positive-definite forms
/// `(A, B, C)` of discriminant `-p`: `|B| ≤ A ≤ C`, `B` odd,
/// `B² - 4AC = -p`, and `B > 0` whenever `|B| = A` or `A = C`.
pub fn h_minus_form_count(p: u64) -> Result<u64, ClassError> {
    if p % 4 != 3 || !is_prime(p) {
        return Err(ClassError::NotThreeMod4(p));
    }
    let mut count = 0u64;
    let mut a = 1u64;
    while 3 * a * a <= p {
        let four_a = 4 * a;
        for b_abs in (1..=a).step_by(2) {
            let num = b_abs * b_abs + p;
            if num % four_a != 0 {
                continue;
            }
            let c = num / four_a;
            if c < a {
                continue;
            }
            // B = +b_abs is always reduced here; B = -b_abs only when the
            // strict inequalities |B| < A < C both hold.
            count += 1;
            if b_abs < a && a < c {
                count += 1;
            }
        }
        a += 1;
    }
    Ok(count)
}

fn isqrt_u64(n: u64) -> u64 {
    n.sqrt()
}

/// Fundamental unit of `Q(√p)` for a prime `p ≡ 1 (mod 4)`, via the
/// continued-fraction expansion of `√p` (minimal solution of
/// `x² - p·y² = -1`), followed by a cube-root descent into the half-integer
/// ring when `p ≡ 5 (mod 8)`.
pub fn fundamental_unit(p: u64) -> Result<QuadUnit, ClassError> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(ClassError::NotOneMod4(p));
    }
    if p >= 1 << 31 {
        return Err(ClassError::TooLarge(p));
    }
    let a0 = isqrt_u64(p);
    let (mut pp, mut qq) = (0u64, 1u64);
    let (mut num_prev, mut num) = (BigUint::zero(), BigUint::one()); // h_{-2}, h_{-1}
    let (mut den_prev, mut den) = (BigUint::one(), BigUint::zero()); // k_{-2}, k_{-1}
    // Convention: after each step (num, den) is the latest convergent.
    let mut steps = 0u64;
    let (x1, y1) = loop {
        let a = (pp + a0) / qq;
        let new_num = BigUint::from(a) * &num + &num_prev;
        let new_den = BigUint::from(a) * &den + &den_prev;
        num_prev = std::mem::replace(&mut num, new_num);
        den_prev = std::mem::replace(&mut den, new_den);
        steps += 1;
        pp = a * qq - pp;
        qq = (p - pp * pp) / qq;
        if qq == 1 {
            break (num.clone(), den.clone());
        }
    };
    // For prime p ≡ 1 (mod 4) the period is odd and the convergent solves
    // x² - p·y² = -1.
    debug_assert!(steps % 2 == 1, "even period at p={p}");
    let cand = QuadUnit {
        u: x1.clone(),
        v: y1.clone(),
        denom: 1,
        norm: -1,
    };
    debug_assert!(cand.satisfies_norm_equation(p));
    if p % 8 != 5 {
        return Ok(cand);
    }
    // Half-integer descent: if ε = (u + v√p)/2 with ε³ = x₁ + y₁√p, then
    // v·(p·v² - 3)/2 = y₁ and u² = p·v² - 4. Search v by monotone bisection.
    let big_p = BigUint::from(p);
    let three = BigUint::from(3u8);
    let f = |v: &BigUint| -> BigUint {
        if v.is_zero() {
            BigUint::zero()
        } else {
            (v * (&big_p * v * v - &three)) >> 1
        }
    };
    let mut hi = BigUint::one();
    while f(&hi) < y1 {
        hi <<= 1;
    }
    let mut lo = BigUint::zero();
    while lo < hi {
        let mid = (&lo + &hi) >> 1;
        if f(&mid) < y1 {
            lo = mid + BigUint::one();
        } else {
            hi = mid;
        }
    }
    let v = lo;
    if (&v % 2u8) == BigUint::one() && f(&v) == y1 {
        let u_sq = &big_p * &v * &v - BigUint::from(4u8);
        let u = u_sq.sqrt();
        if &u * &u == u_sq {
            let half = QuadUnit {
                u,
                v,
                denom: 2,
                norm: -1,
            };
            debug_assert!(half.satisfies_norm_equation(p));
            return Ok(half);
        }
    }
    Ok(cand)
}

/// Count the cycles of the reduction step on all reduced indefinite forms of
/// discriminant `p` — an independent route to `h(p)` for primes `p ≡ 1 mod 4`
/// (where the fundamental unit has norm `-1`, so no narrow/wide gap arises).
pub fn reduced_cycle_count(p: u64) -> Result<u64, ClassError> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(ClassError::NotOneMod4(p));
    }
    if p >= 1 << 31 {
        return Err(ClassError::TooLarge(p));
    }
    let s = isqrt_u64(p) as i64;
    let pi = p as i64;
    // A form (a, b, c) with b² - 4ac = p is reduced iff 0 < b < √p and
    // √p - b < 2|a| < √p + b; all comparisons below are exact integer tests.
    let in_window = |two_abs: i64, b: i64| -> bool {
        (two_abs + b) * (two_abs + b) > pi && (two_abs <= b || (two_abs - b) * (two_abs - b) < pi)
    };
    let mut forms: Vec<(i64, i64, i64)> = Vec::new();
    let mut b = 1i64;
    while b <= s {
        let m = (pi - b * b) / 4; // = |a|·|c|, exact since p ≡ 1, b² ≡ 1 (mod 8)
        let mut d = 1i64;
        while d * d <= m {
            if m % d == 0 {
                for abs_a in [d, m / d] {
                    if in_window(2 * abs_a, b) {
                        forms.push((abs_a, b, -(m / abs_a)));
                        forms.push((-abs_a, b, m / abs_a));
                    }
                    if d * d == m {
                        break;
                    }
                }
            }
            d += 1;
        }
        b += 2;
    }
    forms.sort_unstable();
    forms.dedup();
    let index: BTreeMap<(i64, i64, i64), usize> = forms
        .iter()
        .enumerate()
        .map(|(i, &f)| (f, i))
        .collect();
    let rho = |(_, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        let m = 2 * c.abs();
        let t = (-b).rem_euclid(m);
        let bp = s - (s - t).rem_euclid(m);
        debug_assert!(bp > 0, "reduction left the positive window at p={p}");
        debug_assert_eq!((bp * bp - pi) % (4 * c), 0);
        (c, bp, (bp * bp - pi) / (4 * c))
    };
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0u64;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut cur = forms[start];
        loop {
            let i = *index
                .get(&cur)
                .expect("reduction step must stay within the reduced set");
            if seen[i] {
                break;
            }
            seen[i] = true;
            cur = rho(cur);
        }
    }
    Ok(cycles)
}

/// `h(p)` for primes `p ≡ 1 (mod 4)`, with the unit supplied by the caller:
/// the analytic signed-log sum rounded to an integer, hard-checked against
/// [`reduced_cycle_count`]. Errors if the rounding slack exceeds `10⁻⁶` or
/// the two routes disagree.
pub fn h_plus_with_unit(p: u64, unit: &QuadUnit) -> Result<u64, ClassError> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(ClassError::NotOneMod4(p));
    }
    let ctx = PrimeCtx::new(p).expect("odd prime");
    let mut sum = 0.0f64;
    for n in 1..p {
        let chi = i32::from(ctx.legendre_res(n));
        if chi != 0 {
            sum += f64::from(chi) * (2.0 * (std::f64::consts::PI * n as f64 / p as f64).sin()).ln();
        }
    }
    let value = -sum / (2.0 * unit.log(p));
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 || rounded < 1.0 {
        return Err(ClassError::RoundingSlack { p, value });
    }
    let analytic = rounded as u64;
    let cycles = reduced_cycle_count(p)?;
    if analytic != cycles {
        return Err(ClassError::RoutesDisagree {
            p,
            analytic,
            cycles,
        });
    }
    Ok(analytic)
}

/// `h(p)` for primes `p ≡ 1 (mod 4)`; computes the fundamental unit itself.
pub fn h_plus(p: u64) -> Result<u64, ClassError> {
    let unit = fundamental_unit(p)?;
    h_plus_with_unit(p, &unit)
}

/// Everything the identity verifiers need to know about one odd prime.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassData {
    pub p: u64,
    /// `h(-p)`, present for `p ≡ 3 (mod 4)`.
    pub h_minus: Option<u64>,
    /// `h(p)`, present for `p ≡ 1 (mod 4)`.
    pub h_plus: Option<u64>,
    /// Fundamental unit of `Q(√p)`, present for `p ≡ 1 (mod 4)`.
    pub unit: Option<QuadUnit>,
}

impl ClassData {
    /// Compute the record for an odd prime.
    pub fn for_prime(p: u64) -> Result<ClassData, ClassError> {
        if p < 3 || !is_prime(p) {
            return Err(ClassError::NotOddPrime(p));
        }
        if p % 4 == 3 {
            Ok(ClassData {
                p,
                h_minus: Some(h_minus_weighted_sum(p)?),
                h_plus: None,
                unit: None,
            })
        } else {
            let unit = fundamental_unit(p)?;
            let h = h_plus_with_unit(p, &unit)?;
            Ok(ClassData {
                p,
                h_minus: None,
                h_plus: Some(h),
                unit: Some(unit),
            })
        }
    }
}

/// Thread-safe memo table of [`ClassData`] keyed by `p`.
#[derive(Debug, Default)]
pub struct ClassCache {
    inner: Mutex<BTreeMap<u64, Arc<ClassData>>>,
}

impl ClassCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fetch or compute the record for `p`.
    pub fn get(&self, p: u64) -> Result<Arc<ClassData>, ClassError> {
        if let Some(hit) = self.inner.lock().unwrap().get(&p) {
            return Ok(Arc::clone(hit));
        }
        let computed = Arc::new(ClassData::for_prime(p)?);
        let mut guard = self.inner.lock().unwrap();
        Ok(Arc::clone(
            guard.entry(p).or_insert_with(|| Arc::clone(&computed)),
        ))
    }
}

/// One line of the optional JSONL cache file; all numerics as decimal strings
/// so arbitrarily large `u`, `v` round-trip exactly.
#[derive(Debug, Serialize, Deserialize)]
struct ClassDataRecord {
    p: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    h_minus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    h_plus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    denom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    norm: Option<String>,
}

/// Serialize records to a JSONL cache string (one record per line).
pub fn cache_to_jsonl<'a>(records: impl IntoIterator<Item = &'a ClassData>) -> String {
    let mut out = String::new();
    for data in records {
        let record = ClassDataRecord {
            p: data.p.to_string(),
            h_minus: data.h_minus.map(|h| h.to_string()),
            h_plus: data.h_plus.map(|h| h.to_string()),
            u: data.unit.as_ref().map(|u| u.u.to_string()),
            v: data.unit.as_ref().map(|u| u.v.to_string()),
            denom: data.unit.as_ref().map(|u| u.denom.to_string()),
            norm: data.unit.as_ref().map(|u| u.norm.to_string()),
        };
        out.push_str(&serde_json::to_string(&record).expect("plain strings"));
        out.push('\n');
    }
    out
}

/// Parse a JSONL cache string back into records.
pub fn cache_from_jsonl(text: &str) -> Result<Vec<ClassData>, ClassError> {
    let bad = |msg: &str| ClassError::CacheFormat(msg.to_string());
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ClassDataRecord =
            serde_json::from_str(line).map_err(|e| ClassError::CacheFormat(e.to_string()))?;
        let p: u64 = rec.p.parse().map_err(|_| bad("p not an integer"))?;
        let parse_u64 = |s: &Option<String>| -> Result<Option<u64>, ClassError> {
            s.as_ref()
                .map(|s| s.parse().map_err(|_| bad("count not an integer")))
                .transpose()
        };
        let unit = match (&rec.u, &rec.v, &rec.denom, &rec.norm) {
            (Some(u), Some(v), Some(d), Some(n)) => Some(QuadUnit {
                u: u.parse().map_err(|_| bad("u not an integer"))?,
                v: v.parse().map_err(|_| bad("v not an integer"))?,
                denom: d.parse().map_err(|_| bad("denom not 1 or 2"))?,
                norm: n.parse().map_err(|_| bad("norm not ±1"))?,
            }),
            (None, None, None, None) => None,
            _ => return Err(bad("partial unit fields")),
        };
        out.push(ClassData {
            p,
            h_minus: parse_u64(&rec.h_minus)?,
            h_plus: parse_u64(&rec.h_plus)?,
            unit,
        });
    }
    Ok(out)
}

/// Check `((p-1)/2)! ≡ (-1)^{(h(-p)+1)/2} (mod p)` for `p ≡ 3 (mod 4)`,
/// `p > 3`.
pub fn factorial_sign_check(p: u64) -> Result<Verdict, ClassError> {
    if p <= 3 || p % 4 != 3 || !is_prime(p) {
        return Err(ClassError::NotThreeMod4(p));
    }
    let mut fact = 1u64;
    for k in 2..=(p - 1) / 2 {
        fact = mod_mul(fact, k, p);
    }
    let h = h_minus_weighted_sum(p)?;
    let expect = if (h + 1) / 2 % 2 == 1 { p - 1 } else { 1 };
    Ok(Verdict::new(
        "factorial_sign",
        p,
        format!("h={h}"),
        fact == expect,
        fact.to_string(),
        expect.to_string(),
    ))
}

/// Combined per-prime check of the square-list sign laws for `p ≡ 3 (mod 4)`:
/// the two pair counts have equal parity, the list's sign matches the closed
/// form (`+1` for `p ≡ 3 mod 8`, `(-1)^{(h(-p)+1)/2}` for `p ≡ 7 mod 8`), and
/// both class-number routes agree.
pub fn verify_square_sign_law(p: u64) -> Result<Verdict, ClassError> {
    if p % 4 != 3 || !is_prime(p) {
        return Err(ClassError::NotThreeMod4(p));
    }
    let stats: SquareListStats =
        square_list_stats(p).map_err(|_| ClassError::NotOddPrime(p))?;
    let h = h_minus_weighted_sum(p)?;
    let h_forms = h_minus_form_count(p)?;
    let predicted: i8 = if p % 8 == 3 {
        1
    } else if (h + 1) / 2 % 2 == 0 {
        1
    } else {
        -1
    };
    let pass = stats.s % 2 == stats.t % 2 && stats.sign == predicted && h == h_forms;
    Ok(Verdict::new(
        "square_sign",
        p,
        format!("s={} t={} h={h} h_forms={h_forms}", stats.s, stats.t),
        pass,
        format!("{:+}", stats.sign),
        format!("{predicted:+}"),
    )
    .with_sign(stats.sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;

    #[test]
    fn imaginary_class_numbers() {
        assert_eq!(h_minus_weighted_sum(3).unwrap(), 1);
        assert_eq!(h_minus_weighted_sum(7).unwrap(), 1);
        assert_eq!(h_minus_weighted_sum(11).unwrap(), 1);
        assert_eq!(h_minus_weighted_sum(23).unwrap(), 3);
        assert_eq!(h_minus_form_count(3).unwrap(), 1);
        assert_eq!(h_minus_form_count(7).unwrap(), 1);
        assert_eq!(h_minus_form_count(23).unwrap(), 3);
        assert_eq!(h_minus_form_count(47).unwrap(), 5);
        assert!(h_minus_weighted_sum(13).is_err());
        assert!(h_minus_weighted_sum(15).is_err());
    }

    #[test]
    fn imaginary_routes_agree_and_h_is_odd() {
        for p in sieve_primes(3, 2000, Some((4, 3))) {
            let a = h_minus_weighted_sum(p).unwrap();
            let b = h_minus_form_count(p).unwrap();
            assert_eq!(a, b, "p={p}");
            if p > 3 {
                assert_eq!(a % 2, 1, "h(-{p}) must be odd");
            }
        }
    }

    #[test]
    fn fundamental_units_small() {
        let u5 = fundamental_unit(5).unwrap();
        assert_eq!(
            (u5.u.to_u64().unwrap(), u5.v.to_u64().unwrap(), u5.denom, u5.norm),
            (1, 1, 2, -1)
        );
        let u13 = fundamental_unit(13).unwrap();
        assert_eq!(
            (u13.u.to_u64().unwrap(), u13.v.to_u64().unwrap(), u13.denom, u13.norm),
            (3, 1, 2, -1)
        );
        let u17 = fundamental_unit(17).unwrap();
        assert_eq!(
            (u17.u.to_u64().unwrap(), u17.v.to_u64().unwrap(), u17.denom, u17.norm),
            (4, 1, 1, -1)
        );
        assert!(fundamental_unit(7).is_err());
    }

    #[test]
    fn units_minimal_by_brute_force() {
        // Walk v/denom upward in half-integer steps; the first unit found is
        // the fundamental one.
        for p in sieve_primes(5, 200, Some((4, 1))) {
            let unit = fundamental_unit(p).unwrap();
            assert!(unit.satisfies_norm_equation(p));
            let mut found = None;
            'outer: for k in 1u64..(1 << 22) {
                let (v, d) = if k % 2 == 0 { (k / 2, 1u64) } else { (k, 2u64) };
                let pv2 = (p as u128) * (v as u128) * (v as u128);
                let dd = (d * d) as u128;
                for (target, norm) in [(pv2.checked_sub(dd), -1i8), (Some(pv2 + dd), 1)] {
                    let Some(t) = target else { continue };
                    let r = (t as f64).sqrt() as u128;
                    for u in r.saturating_sub(1)..=r + 1 {
                        if u * u == t && (d == 1 || u % 2 == 1) {
                            found = Some((u as u64, v, d as u8, norm));
                            break 'outer;
                        }
                    }
                }
            }
            let (u, v, d, norm) = found.expect("unit exists");
            assert_eq!(unit.u.to_u64().unwrap(), u, "p={p}");
            assert_eq!(unit.v.to_u64().unwrap(), v, "p={p}");
            assert_eq!(unit.denom, d, "p={p}");
            assert_eq!(unit.norm, norm, "p={p}");
        }
    }

    #[test]
    fn real_class_numbers() {
        for (p, h) in [(5, 1), (13, 1), (17, 1), (229, 3), (257, 3), (401, 5)] {
            assert_eq!(h_plus(p).unwrap(), h, "p={p}");
        }
        assert!(h_plus(7).is_err());
    }

    #[test]
    fn cycle_count_route() {
        assert_eq!(reduced_cycle_count(5).unwrap(), 1);
        assert_eq!(reduced_cycle_count(13).unwrap(), 1);
        assert_eq!(reduced_cycle_count(229).unwrap(), 3);
        assert_eq!(reduced_cycle_count(401).unwrap(), 5);
    }

    #[test]
    fn unit_norm_drives_odd_class_number() {
        for p in sieve_primes(5, 500, Some((4, 1))) {
            let data = ClassData::for_prime(p).unwrap();
            let unit = data.unit.as_ref().unwrap();
            assert_eq!(unit.norm, -1, "p={p}");
            // norm^h = -1 forces h odd.
            assert_eq!(data.h_plus.unwrap() % 2, 1, "p={p}");
        }
    }

    #[test]
    fn factorial_congruence() {
        for (p, fact) in [(7u64, 6u64), (11, 10), (23, 1)] {
            let v = factorial_sign_check(p).unwrap();
            assert!(v.pass, "p={p}");
            assert_eq!(v.lhs, fact.to_string());
        }
        for p in sieve_primes(7, 2000, Some((4, 3))) {
            assert!(factorial_sign_check(p).unwrap().pass, "p={p}");
        }
        assert!(factorial_sign_check(3).is_err());
        assert!(factorial_sign_check(13).is_err());
    }

    #[test]
    fn square_sign_law_on_small_primes() {
        for p in sieve_primes(3, 499, Some((4, 3))) {
            let v = verify_square_sign_law(p).unwrap();
            assert!(v.pass, "p={p}: {} vs {}", v.lhs, v.rhs);
        }
        // p = 7 ≡ 7 (mod 8) with h(-7) = 1: sign must be -1.
        let v = verify_square_sign_law(7).unwrap();
        assert_eq!(v.observed_sign, Some(-1));
    }

    #[test]
    fn cache_round_trip() {
        let cache = ClassCache::new();
        let records: Vec<ClassData> = [5u64, 7, 13, 23]
            .iter()
            .map(|&p| (*cache.get(p).unwrap()).clone())
            .collect();
        let text = cache_to_jsonl(&records);
        let back = cache_from_jsonl(&text).unwrap();
        assert_eq!(records, back);
        assert!(cache_from_jsonl("{\"p\":\"7\",\"u\":\"1\"}\n").is_err());
        assert!(cache_from_jsonl("not json\n").is_err());
    }
}
