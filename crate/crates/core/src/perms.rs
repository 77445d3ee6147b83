//! Permutation signs by exact inversion counting.
//!
//! Builds the image lists of several families of permutations — multiplication
//! maps on residues, their folded half-range variants, the inverse map on the
//! units of an odd modulus, and the list of least residues of squares — counts
//! inversions by merge sort, and verifies the closed-form sign laws.

use crate::arith::{self, factorize, is_prime, mod_mul, residue};
use crate::report::Verdict;
use num_integer::gcd;
use thiserror::Error;

/// Errors from permutation constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    /// The image list contained a repeated entry, so it is not a permutation.
    #[error("sequence contains duplicate entries")]
    DuplicateEntries,
    /// `a` must be invertible for multiplication by `a` to permute residues.
    #[error("{a} is not coprime to {n}")]
    NotCoprime { a: i64, n: u64 },
    /// The modulus must be odd and at least 3.
    #[error("modulus {0} must be odd and >= 3")]
    BadModulus(u64),
    /// An odd prime was required.
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}

/// Sign and exact inversion count of a sequence of distinct values.
///
/// The count is held in 128 bits so callers never have to reason about
/// overflow, even for scans far beyond the default ranges.
pub fn inversion_sign(entries: &[u64]) -> Result<(i8, u128), PermError> {
    let mut work: Vec<u64> = entries.to_vec();
    let mut buf: Vec<u64> = vec![0; work.len()];
    let count = merge_count(&mut work, &mut buf)?;
    Ok((if count % 2 == 0 { 1 } else { -1 }, count))
}

fn merge_count(v: &mut [u64], buf: &mut [u64]) -> Result<u128, PermError> {
    let n = v.len();
    if n <= 1 {
        return Ok(0);
    }
    let mid = n / 2;
    let mut inv;
    {
        let (l, r) = v.split_at_mut(mid);
        inv = merge_count(l, &mut buf[..mid])?;
        inv += merge_count(r, &mut buf[mid..])?;
    }
    buf[..n].copy_from_slice(v);
    let (lbuf, rbuf) = buf[..n].split_at(mid);
    let (mut i, mut j) = (0usize, 0usize);
    for slot in v.iter_mut() {
        if i < lbuf.len() && j < rbuf.len() && lbuf[i] == rbuf[j] {
            return Err(PermError::DuplicateEntries);
        }
        if j >= rbuf.len() || (i < lbuf.len() && lbuf[i] < rbuf[j]) {
            *slot = lbuf[i];
            i += 1;
        } else {
            *slot = rbuf[j];
            j += 1;
            inv += (lbuf.len() - i) as u128;
        }
    }
    Ok(inv)
}

/// Exact count of strict inversions `j < k` with `v[j] > v[k]`, allowing
/// repeated values (equal entries are never inversions). Used for value
/// lists that are not permutations, such as folded residues or power maps
/// with small image.
pub fn inversion_count_multiset(entries: &[u64]) -> u128 {
    fn rec(v: &mut [u64], buf: &mut [u64]) -> u128 {
        let n = v.len();
        if n <= 1 {
            return 0;
        }
        let mid = n / 2;
        let mut inv;
        {
            let (l, r) = v.split_at_mut(mid);
            inv = rec(l, &mut buf[..mid]);
            inv += rec(r, &mut buf[mid..]);
        }
        buf[..n].copy_from_slice(v);
        let (lbuf, rbuf) = buf[..n].split_at(mid);
        let (mut i, mut j) = (0usize, 0usize);
        for slot in v.iter_mut() {
            if j >= rbuf.len() || (i < lbuf.len() && lbuf[i] <= rbuf[j]) {
                *slot = lbuf[i];
                i += 1;
            } else {
                *slot = rbuf[j];
                j += 1;
                inv += (lbuf.len() - i) as u128;
            }
        }
        inv
    }
    let mut work: Vec<u64> = entries.to_vec();
    let mut buf: Vec<u64> = vec![0; work.len()];
    rec(&mut work, &mut buf)
}

/// Index domain of a multiplication permutation `k ↦ {a·k}_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultDomain {
    /// `k = 1, …, n−1` with `n` an odd prime; the sign is the Legendre symbol.
    PrimeUnits,
    /// `k = 0, …, n−1` for any odd `n ≥ 3`; the sign is the Jacobi symbol.
    FullRange,
}

/// Sign of the multiplication-by-`a` permutation, by direct inversion
/// counting (never via the symbol — the callers compare against it).
pub fn mult_perm_sign(a: i64, n: u64, domain: MultDomain) -> Result<i8, PermError> {
    if n < 3 || n % 2 == 0 {
        return Err(PermError::BadModulus(n));
    }
    if domain == MultDomain::PrimeUnits && !is_prime(n) {
        return Err(PermError::NotOddPrime(n));
    }
    let ar = residue(a, n);
    if gcd(ar, n) != 1 {
        return Err(PermError::NotCoprime { a, n });
    }
    let start = match domain {
        MultDomain::PrimeUnits => 1,
        MultDomain::FullRange => 0,
    };
    let entries: Vec<u64> = (start..n).map(|k| mod_mul(ar, k, n)).collect();
    Ok(inversion_sign(&entries)?.0)
}

/// Sign of the folded multiplication permutation `k ↦ R(a·k, n)` on the half
/// range `1 ≤ k ≤ (n−1)/2`, for odd `n ≥ 3` and `gcd(a, n) = 1`. Its sign is
/// known to equal the Jacobi symbol raised to the `(n+1)/2` power.
pub fn folded_mult_sign(a: i64, n: u64) -> Result<i8, PermError> {
    if n < 3 || n % 2 == 0 {
        return Err(PermError::BadModulus(n));
    }
    let ar = residue(a, n);
    if gcd(ar, n) != 1 {
        return Err(PermError::NotCoprime { a, n });
    }
    let entries: Vec<u64> = (1..=(n - 1) / 2)
        .map(|k| {
            let r = mod_mul(ar, k, n);
            r.min(n - r)
        })
        .collect();
    Ok(inversion_sign(&entries)?.0)
}

/// Signs of the two inverse-map permutations on the units of an odd modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseSigns {
    /// Sign of `u ↦ {u⁻¹}_m` on all units in ascending order.
    pub full: i8,
    /// Sign of `u ↦ R(u⁻¹, m)` on the units below `m/2` in ascending order.
    pub folded: i8,
}

/// Compute [`InverseSigns`] for odd `m ≥ 3` by direct inversion counting.
pub fn unit_inverse_signs(m: u64) -> Result<InverseSigns, PermError> {
    if m < 3 || m % 2 == 0 {
        return Err(PermError::BadModulus(m));
    }
    let units: Vec<u64> = (1..m).filter(|&u| gcd(u, m) == 1).collect();
    let full_list: Vec<u64> = units
        .iter()
        .map(|&u| arith::mod_inv(u, m).expect("unit is invertible"))
        .collect();
    let folded_list: Vec<u64> = units
        .iter()
        .copied()
        .filter(|&u| u <= (m - 1) / 2)
        .map(|u| {
            let inv = arith::mod_inv(u, m).expect("unit is invertible");
            inv.min(m - inv)
        })
        .collect();
    Ok(InverseSigns {
        full: inversion_sign(&full_list)?.0,
        folded: inversion_sign(&folded_list)?.0,
    })
}

/// Closed-form predictions for [`unit_inverse_signs`], from the factorization
/// `m = p₁^{a₁} ⋯ p_r^{a_r}`:
///
/// * full map: sign `-1` exactly when `r = 1` and `p₁ ≡ 1 (mod 4)`;
/// * folded map: sign `-1` exactly when `r = 1` and `p₁ ≡ 1 (mod 8)` or
///   `p₁ ≡ 4a₁+3 (mod 8)`, or `r = 2` and `p₁ + p₂ ≡ 0 (mod 4)`.
pub fn unit_inverse_signs_closed_form(m: u64) -> Result<InverseSigns, PermError> {
    if m < 3 || m % 2 == 0 {
        return Err(PermError::BadModulus(m));
    }
    let factors = factorize(m);
    let full = match factors.as_slice() {
        [(p1, _)] if p1 % 4 == 1 => -1,
        _ => 1,
    };
    let folded = match factors.as_slice() {
        [(p1, a1)] if p1 % 8 == 1 || p1 % 8 == (4 * u64::from(*a1) + 3) % 8 => -1,
        [(p1, _), (p2, _)] if (p1 + p2) % 4 == 0 => -1,
        _ => 1,
    };
    Ok(InverseSigns { full, folded })
}

/// Compare the direct inversion-count signs of both unit inverse maps with
/// their closed forms. One combined verdict per modulus: it passes only when
/// both the full and the folded map agree with the prediction.
pub fn verify_unit_inverse_signs(m: u64) -> Result<Verdict, PermError> {
    let direct = unit_inverse_signs(m)?;
    let predicted = unit_inverse_signs_closed_form(m)?;
    Ok(Verdict::new(
        "inverse_signs",
        m,
        "",
        direct == predicted,
        format!("full={:+} folded={:+}", direct.full, direct.folded),
        format!("full={:+} folded={:+}", predicted.full, predicted.folded),
    ))
}

/// Statistics of the square list `({1²}_p, {2²}_p, …, {((p-1)/2)²}_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareListStats {
    pub p: u64,
    /// Number of pairs `j < k` with `{j²}_p > {k²}_p` (inversions).
    pub s: u64,
    /// Number of pairs `j < k` with `{k² - j²}_p > p/2`.
    pub t: u64,
    /// `(-1)^s`.
    pub sign: i8,
}

/// Compute [`SquareListStats`] by the direct pair loop.
///
/// The double loop is deliberate: it is the transparent reference definition
/// of both counts, and `p ≤ 10⁴` keeps it fast. Requires an odd prime
/// `p < 2³²`.
pub fn square_list_stats(p: u64) -> Result<SquareListStats, PermError> {
    if p < 3 || p >= (1 << 32) || !is_prime(p) {
        return Err(PermError::NotOddPrime(p));
    }
    let half = ((p - 1) / 2) as usize;
    let mut sq: Vec<u32> = Vec::with_capacity(half);
    for k in 1..=half as u64 {
        sq.push(mod_mul(k, k, p) as u32);
    }
    let pu = p as u32;
    let thresh = (p / 2) as u32;
    let mut s = 0u64;
    let mut t = 0u64;
    for k in 1..half {
        let a = sq[k];
        let mut s_k = 0u64;
        let mut t_k = 0u64;
        for &b in &sq[..k] {
            s_k += u64::from(b > a);
            let d = if a >= b { a - b } else { a + pu - b };
            t_k += u64::from(d > thresh);
        }
        s += s_k;
        t += t_k;
    }
    Ok(SquareListStats {
        p,
        s,
        t,
        sign: if s % 2 == 0 { 1 } else { -1 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{jacobi, legendre, sieve_primes};

    #[test]
    fn inversion_counting_basics() {
        assert_eq!(inversion_sign(&[1, 2, 3]).unwrap(), (1, 0));
        assert_eq!(inversion_sign(&[2, 1, 3]).unwrap(), (-1, 1));
        assert_eq!(inversion_sign(&[1, 4, 9, 5, 3]).unwrap(), (1, 4));
        assert_eq!(inversion_sign(&[]).unwrap(), (1, 0));
        assert_eq!(inversion_sign(&[5, 4, 3, 2, 1]).unwrap(), (1, 10));
        assert_eq!(
            inversion_sign(&[2, 2, 1]),
            Err(PermError::DuplicateEntries)
        );
        assert_eq!(inversion_count_multiset(&[2, 2, 1]), 2);
        assert_eq!(inversion_count_multiset(&[1, 1]), 0);
        assert_eq!(inversion_count_multiset(&[]), 0);
        assert_eq!(inversion_count_multiset(&[1, 4, 9, 5, 3]), 4);
        assert_eq!(inversion_count_multiset(&[3, 1, 3, 1]), 3);
        assert_eq!(
            inversion_sign(&[7, 1, 3, 7]),
            Err(PermError::DuplicateEntries)
        );
    }

    #[test]
    fn inversion_count_matches_quadratic_reference() {
        // Pseudo-random lists, compared against the O(L²) definition.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for len in [2usize, 3, 7, 32, 101] {
            let vals: Vec<u64> = (0..len).map(|i| next().wrapping_add(i as u64)).collect();
            let mut direct = 0u128;
            for i in 0..len {
                for j in i + 1..len {
                    if vals[i] > vals[j] {
                        direct += 1;
                    }
                }
            }
            let (sign, count) = inversion_sign(&vals).unwrap();
            assert_eq!(count, direct);
            assert_eq!(sign, if direct % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn multiplication_sign_examples() {
        assert_eq!(mult_perm_sign(3, 7, MultDomain::PrimeUnits).unwrap(), -1);
        assert_eq!(mult_perm_sign(1, 9, MultDomain::FullRange).unwrap(), 1);
        assert_eq!(mult_perm_sign(2, 15, MultDomain::FullRange).unwrap(), 1);
        assert_eq!(
            mult_perm_sign(3, 9, MultDomain::FullRange),
            Err(PermError::NotCoprime { a: 3, n: 9 })
        );
        assert_eq!(
            mult_perm_sign(2, 9, MultDomain::PrimeUnits),
            Err(PermError::NotOddPrime(9))
        );
        assert_eq!(
            mult_perm_sign(1, 8, MultDomain::FullRange),
            Err(PermError::BadModulus(8))
        );
    }

    #[test]
    fn multiplication_sign_equals_symbol() {
        for p in sieve_primes(3, 199, None) {
            for a in 1..p {
                let sign = mult_perm_sign(a as i64, p, MultDomain::PrimeUnits).unwrap();
                assert_eq!(sign, legendre(a as i64, p), "a={a} p={p}");
            }
        }
        for n in (3u64..=99).step_by(2) {
            for a in 1..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let sign = mult_perm_sign(a as i64, n, MultDomain::FullRange).unwrap();
                assert_eq!(sign, jacobi(a as i64, n).unwrap(), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn folded_sign_examples_and_law() {
        assert_eq!(folded_mult_sign(1, 11).unwrap(), 1);
        assert_eq!(folded_mult_sign(2, 11).unwrap(), 1);
        assert_eq!(folded_mult_sign(2, 9).unwrap(), 1);
        for n in (3u64..=99).step_by(2) {
            for a in 1..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let expect = if (n + 1) / 2 % 2 == 0 {
                    1
                } else {
                    jacobi(a as i64, n).unwrap()
                };
                assert_eq!(folded_mult_sign(a as i64, n).unwrap(), expect, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn unit_inverse_sign_examples() {
        assert_eq!(unit_inverse_signs(5).unwrap().full, -1);
        assert_eq!(unit_inverse_signs(7).unwrap().folded, -1);
        assert_eq!(unit_inverse_signs(15).unwrap().folded, -1);
        // m = 9: the inverse list on units (1,2,4,5,7,8) is (1,5,7,2,4,8),
        // four inversions; the folded list on (1,2,4) is (1,4,2), one.
        let signs = unit_inverse_signs(9).unwrap();
        assert_eq!(signs.full, 1);
        assert_eq!(signs.folded, -1);
        assert_eq!(unit_inverse_signs(6), Err(PermError::BadModulus(6)));
    }

    #[test]
    fn unit_inverse_closed_form_sweep() {
        for m in (3u64..=301).step_by(2) {
            let v = verify_unit_inverse_signs(m).unwrap();
            assert!(v.pass, "m={m}: {} vs {}", v.lhs, v.rhs);
        }
        // Spot examples: m=25 (single prime ≡ 1 mod 4), m=21 (3+7 ≢ 0 mod 4).
        assert_eq!(unit_inverse_signs_closed_form(25).unwrap().full, -1);
        assert_eq!(unit_inverse_signs_closed_form(21).unwrap().folded, 1);
    }

    #[test]
    fn square_list_statistics() {
        let st = square_list_stats(11).unwrap();
        assert_eq!((st.s, st.t, st.sign), (4, 4, 1));
        let st = square_list_stats(3).unwrap();
        assert_eq!((st.s, st.t, st.sign), (0, 0, 1));
        let st = square_list_stats(7).unwrap();
        assert_eq!((st.s, st.t, st.sign), (1, 1, -1));
        let st = square_list_stats(13).unwrap();
        assert_eq!((st.s, st.t), (3, 9));
        assert!(square_list_stats(15).is_err());
    }

    #[test]
    fn square_list_parity_law_on_three_mod_four() {
        for p in sieve_primes(3, 499, Some((4, 3))) {
            let st = square_list_stats(p).unwrap();
            assert_eq!(st.s % 2, st.t % 2, "p={p}");
        }
    }
}
