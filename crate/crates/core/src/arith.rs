//! Modular arithmetic primitives: Legendre/Jacobi symbols, least residues,
//! deterministic primality, prime sieves, modular square roots, and a
//! per-prime context holding the quadratic-character and inverse tables that
//! the heavier modules share.

use thiserror::Error;

/// Errors from arithmetic entry points whose preconditions are data-dependent.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// The Jacobi symbol is only defined for odd positive lower arguments.
    #[error("jacobi symbol requires an odd positive modulus, got {0}")]
    EvenModulus(u64),
    /// A modular inverse was requested for a non-invertible element.
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i64, modulus: u64 },
    /// An operation that needs an odd prime modulus was given something else.
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}

/// Product of two residues modulo `m`, computed without overflow.
#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by binary exponentiation. `m` must be nonzero.
pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), if a < 0 { -1 } else { 1 }, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some((x.rem_euclid(m as i128)) as u64)
}

/// Least non-negative residue `{a}_n` of a (possibly negative) integer.
#[inline]
pub fn residue(a: i64, n: u64) -> u64 {
    debug_assert!(n > 0);
    a.rem_euclid(n as i64) as u64
}

/// Least non-negative residue `{a/b}_n`; errors when `b` is not invertible.
pub fn residue_ratio(a: i64, b: i64, n: u64) -> Result<u64, ArithError> {
    let inv = mod_inv(residue(b, n), n).ok_or(ArithError::NotInvertible {
        value: b,
        modulus: n,
    })?;
    Ok(mod_mul(residue(a, n), inv, n))
}

/// Half-range folded residue `R(k, n)` for odd `n`: the unique
/// `r ∈ {0, 1, …, (n-1)/2}` with `k ≡ r or -r (mod n)`.
#[inline]
pub fn half_residue(k: i64, n: u64) -> u64 {
    debug_assert!(n % 2 == 1);
    let r = residue(k, n);
    r.min(n - r)
}

/// Deterministic Miller–Rabin, exact for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This base set is a complete primality certificate below 2^64.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in `[lo, hi]`, optionally restricted to a residue class:
/// `filter = Some((m, r))` keeps only primes `≡ r (mod m)`.
pub fn sieve_primes(lo: u64, hi: u64, filter: Option<(u64, u64)>) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    // Base primes up to sqrt(hi) by a plain sieve.
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut i = 2u64;
    while i * i <= root {
        if base[i as usize] {
            let mut j = i * i;
            while j <= root {
                base[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let small: Vec<u64> = (2..=root).filter(|&k| base[k as usize]).collect();

    let len = (hi - lo + 1) as usize;
    let mut seg = vec![true; len];
    for &q in &small {
        let start = lo.div_ceil(q).max(2) * q;
        let mut j = start;
        while j <= hi {
            seg[(j - lo) as usize] = false;
            j += q;
        }
    }
    let mut out = Vec::new();
    for (off, &keep) in seg.iter().enumerate() {
        let n = lo + off as u64;
        if !keep || n < 2 {
            continue;
        }
        if n <= root && !small.contains(&n) {
            continue;
        }
        if let Some((m, r)) = filter {
            if n % m != r % m {
                continue;
            }
        }
        out.push(n);
    }
    out
}

/// Legendre symbol `(a/p)` for an odd prime `p`, by Euler's criterion.
///
/// Returns `0` when `p | a`. The primality of `p` is a precondition; use
/// [`PrimeCtx`] for bulk evaluation.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2 && is_prime(p), "legendre: {p} must be an odd prime");
    let r = residue(a, p);
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`, by binary reciprocity.
///
/// Returns `0` when `gcd(a, n) > 1`; errors when `n` is even or zero.
pub fn jacobi(a: i64, n: u64) -> Result<i8, ArithError> {
    if n == 0 || n % 2 == 0 {
        return Err(ArithError::EvenModulus(n));
    }
    let mut a = residue(a, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// The smallest positive quadratic non-residue of an odd prime.
pub fn least_nonresidue(p: u64) -> Result<u64, ArithError> {
    if p < 3 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    Ok((2..p)
        .find(|&a| legendre(a as i64, p) == -1)
        .expect("every odd prime has a non-residue"))
}

/// `N_p(x)` for `x = num/den (mod p)`: the number of `k` in
/// `1 ≤ k ≤ (p-1)/2` whose least residue `{k·x}_p` exceeds `k`.
pub fn count_np(num: i64, den: i64, p: u64) -> Result<u64, ArithError> {
    if p < 3 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    let x = residue_ratio(num, den, p)?;
    let mut count = 0u64;
    for k in 1..=(p - 1) / 2 {
        if mod_mul(k, x, p) > k {
            count += 1;
        }
    }
    Ok(count)
}

/// Prime factorization by trial division, as `(prime, multiplicity)` pairs
/// in ascending prime order. Intended for moduli up to ~10⁶; returns an empty
/// list for `n ≤ 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Square root of `a` modulo an odd prime `p`, when one exists.
///
/// Uses the direct exponent for `p ≡ 3 (mod 4)` and Tonelli–Shanks with a
/// deterministic ascending non-residue scan otherwise.
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    debug_assert!(p > 2 && is_prime(p));
    let a = residue(a, p);
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    // Tonelli–Shanks. Factor p - 1 = q * 2^s with q odd.
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| mod_pow(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a quadratic non-residue");
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mod_mul(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..m - i - 1 {
            b = mod_mul(b, b, p);
        }
        m = i;
        c = mod_mul(b, b, p);
        t = mod_mul(t, c, p);
        r = mod_mul(r, b, p);
    }
    Some(r)
}

/// Per-prime working context: the quadratic character and inverse tables for
/// an odd prime `p`, built once in `O(p)` and shared by the sweep loops.
#[derive(Debug, Clone)]
pub struct PrimeCtx {
    p: u64,
    chi: Vec<i8>,
    inv: Vec<u64>,
    sqrt_minus_one: Option<u64>,
}

impl PrimeCtx {
    /// Build the context; errors unless `p` is an odd prime.
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p < 3 || !is_prime(p) {
            return Err(ArithError::NotOddPrime(p));
        }
        let pu = p as usize;
        // Mark squares: residues +1, zero 0, the rest -1.
        let mut chi = vec![-1i8; pu];
        chi[0] = 0;
        for k in 1..=(p - 1) / 2 {
            chi[mod_mul(k, k, p) as usize] = 1;
        }
        // inv[k] for 1 ≤ k < p by the standard recurrence.
        let mut inv = vec![0u64; pu];
        inv[1] = 1;
        for k in 2..pu {
            let ku = k as u64;
            inv[k] = mod_mul(p - p / ku, inv[(p % ku) as usize], p);
        }
        let sqrt_minus_one = if p % 4 == 1 {
            let z = (2..p)
                .find(|&z| chi[z as usize] == -1)
                .expect("odd prime has a quadratic non-residue");
            Some(mod_pow(z, (p - 1) / 4, p))
        } else {
            None
        };
        Ok(PrimeCtx {
            p,
            chi,
            inv,
            sqrt_minus_one,
        })
    }

    /// The prime this context belongs to.
    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Legendre symbol `(a/p)` by table lookup.
    #[inline]
    pub fn legendre(&self, a: i64) -> i8 {
        self.chi[residue(a, self.p) as usize]
    }

    /// Legendre symbol of an already-reduced residue.
    #[inline]
    pub fn legendre_res(&self, r: u64) -> i8 {
        self.chi[r as usize]
    }

    /// Inverse of `a` modulo `p`; `None` when `p | a`.
    #[inline]
    pub fn inv(&self, a: i64) -> Option<u64> {
        match residue(a, self.p) {
            0 => None,
            r => Some(self.inv[r as usize]),
        }
    }

    /// A fixed square root of `-1`, present exactly when `p ≡ 1 (mod 4)`.
    #[inline]
    pub fn sqrt_minus_one(&self) -> Option<u64> {
        self.sqrt_minus_one
    }
}
