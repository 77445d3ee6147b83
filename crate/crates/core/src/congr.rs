//! Exact mod-p verification of restricted quadratic-form products against
//! their closed forms, together with the character-sum and pair-count lemmas
//! that feed them. Every product accumulates mod p with 128-bit
//! intermediates; nothing here touches floating point.

use crate::arith::{count_np, factorize, is_prime, legendre, mod_inv, mod_mul, mod_pow};
use crate::report::Verdict;
use thiserror::Error;

/// Errors from the congruence verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CongrError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not an odd integer >= 3")]
    NotOdd(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A binary quadratic form `a·j² + b·jk + c·k²` studied modulo an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadFormSpec {
    pub p: u64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadFormSpec {
    pub fn new(p: u64, a: i64, b: i64, c: i64) -> Result<Self, CongrError> {
        if p < 3 || !is_prime(p) {
            return Err(CongrError::NotOddPrime(p));
        }
        Ok(QuadFormSpec { p, a, b, c })
    }

    /// The discriminant `b² - 4ac` (never stored, always recomputed).
    pub fn delta(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    /// Quadratic character of the discriminant (0 when `p` divides it).
    pub fn delta_symbol(&self) -> i8 {
        legendre(self.delta().rem_euclid(self.p as i128) as i64, self.p)
    }

    /// `a·j² + b·jk + c·k² mod p`.
    fn eval(&self, j: u64, k: u64) -> u64 {
        let v = self.a as i128 * (j * j) as i128
            + self.b as i128 * (j * k) as i128
            + self.c as i128 * (k * k) as i128;
        v.rem_euclid(self.p as i128) as u64
    }
}

/// Index domains for [`quadform_counts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `1 ≤ j < k ≤ (p-1)/2`.
    TriangleHalf,
    /// `1 ≤ j < k ≤ p-1`.
    TriangleFull,
    /// `1 ≤ j, k ≤ (p-1)/2` (ordered pairs, diagonal included).
    SquareHalf,
}

/// Count index pairs in the region where the form is `≡ n (mod p)`.
pub fn quadform_counts(spec: &QuadFormSpec, n: u64, region: Region) -> u64 {
    let p = spec.p;
    let half = (p - 1) / 2;
    let target = n % p;
    let mut count = 0u64;
    match region {
        Region::TriangleHalf | Region::TriangleFull => {
            let hi = if region == Region::TriangleHalf { half } else { p - 1 };
            for j in 1..=hi {
                for k in j + 1..=hi {
                    if spec.eval(j, k) == target {
                        count += 1;
                    }
                }
            }
        }
        Region::SquareHalf => {
            for j in 1..=half {
                for k in 1..=half {
                    if spec.eval(j, k) == target {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `Σ_{x=0}^{p-1} ((a·x² + b·x + c)/p)` by direct summation. Requires `a` or
/// `b` nonzero mod p; the closed form is `(p-1)·(a/p)` when `p | b²-4ac` and
/// `-(a/p)` otherwise.
pub fn char_sum(a: i64, b: i64, c: i64, p: u64) -> Result<i64, CongrError> {
    if p < 3 || !is_prime(p) {
        return Err(CongrError::NotOddPrime(p));
    }
    let (ar, br) = (a.rem_euclid(p as i64), b.rem_euclid(p as i64));
    if ar == 0 && br == 0 {
        return Err(CongrError::Precondition(
            "requires a or b nonzero mod p".to_string(),
        ));
    }
    let mut sum = 0i64;
    for x in 0..p as i128 {
        let v = a as i128 * x * x + b as i128 * x + c as i128;
        sum += i64::from(legendre(v.rem_euclid(p as i128) as i64, p));
    }
    Ok(sum)
}

/// Map a `±1/0` symbol value to its least residue mod `p`.
fn symbol_residue(s: i64, p: u64) -> u64 {
    (s.rem_euclid(p as i64)) as u64
}

/// `((p-1)/2)! mod p`.
fn half_factorial(p: u64) -> u64 {
    let mut f = 1u64;
    for k in 2..=(p - 1) / 2 {
        f = mod_mul(f, k, p);
    }
    f
}

/// The restricted-product identities for a quadratic form, split by the
/// divisibility pattern of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormProductPart {
    /// `∏_{1≤j<k≤(p-1)/2} (j²+k²) (mod p)` for `p ≡ 1 (mod 4)` (the supplied
    /// coefficients are ignored; the form is fixed).
    HalfTriangleSquares,
    /// Full-triangle product over `1 ≤ j < k ≤ p-1`, `p ∤ a·c·(a+b+c)`.
    FullTriangle,
    /// Square-region product over `1 ≤ j,k ≤ (p-1)/2`, additionally
    /// `a + c = 0`; the closed form's sign is open, so the check is up to
    /// sign with the observed sign recorded.
    HalfSquareGrid,
    /// `p ∤ a·c` but `p | a+b+c`.
    CoeffSumDivisible,
    /// `p | a·c` (degenerate seven-case table).
    DegenerateCoeff,
}

/// Compute the part's restricted product mod p by direct double loop and
/// compare with its closed form.
pub fn verify_form_products(
    spec: &QuadFormSpec,
    part: FormProductPart,
) -> Result<Verdict, CongrError> {
    let p = spec.p;
    let params = format!("a={} b={} c={}", spec.a, spec.b, spec.c);
    let triangle_product = |hi: u64| {
        let mut prod = 1u64;
        for j in 1..=hi {
            for k in j + 1..=hi {
                let v = spec.eval(j, k);
                if v != 0 {
                    prod = mod_mul(prod, v, p);
                }
            }
        }
        prod
    };
    let coeff_sum = spec.a as i128 + spec.b as i128 + spec.c as i128;
    let pm = p as i128;
    match part {
        FormProductPart::HalfTriangleSquares => {
            if p % 4 != 1 {
                return Err(CongrError::Precondition(format!(
                    "requires p ≡ 1 (mod 4), got {p}"
                )));
            }
            let half = (p - 1) / 2;
            let mut prod = 1u64;
            for j in 1..=half {
                for k in j + 1..=half {
                    let v = (j * j + k * k) % p;
                    if v != 0 {
                        prod = mod_mul(prod, v, p);
                    }
                }
            }
            let rhs = if ((p - 5) / 8) % 2 == 0 { 1 } else { p - 1 };
            Ok(Verdict::new(
                "half_triangle_squares",
                p,
                "",
                prod == rhs,
                prod.to_string(),
                rhs.to_string(),
            ))
        }
        FormProductPart::FullTriangle => {
            if (spec.a as i128 * spec.c as i128 * coeff_sum).rem_euclid(pm) == 0 {
                return Err(CongrError::Precondition(format!(
                    "requires p to divide none of a, c, a+b+c ({params})"
                )));
            }
            let lhs = triangle_product(p - 1);
            let ld = spec.delta_symbol();
            let rhs = if ld == 0 {
                let s = legendre(spec.a, p) as i64
                    * legendre(coeff_sum.rem_euclid(pm) as i64, p) as i64;
                symbol_residue(s, p)
            } else {
                let s = -(legendre(spec.a, p) as i64
                    * legendre(spec.c, p) as i64
                    * legendre(coeff_sum.rem_euclid(pm) as i64, p) as i64
                    * ld as i64);
                symbol_residue(s, p)
            };
            Ok(Verdict::new(
                "full_triangle_product",
                p,
                params,
                lhs == rhs,
                lhs.to_string(),
                rhs.to_string(),
            ))
        }
        FormProductPart::HalfSquareGrid => {
            if spec.a + spec.c != 0 {
                return Err(CongrError::Precondition(format!(
                    "requires a + c = 0 ({params})"
                )));
            }
            if (spec.a as i128 * spec.c as i128 * coeff_sum).rem_euclid(pm) == 0 {
                return Err(CongrError::Precondition(format!(
                    "requires p to divide none of a, c, a+b+c ({params})"
                )));
            }
            let half = (p - 1) / 2;
            let mut prod = 1u64;
            for j in 1..=half {
                for k in 1..=half {
                    let v = spec.eval(j, k);
                    if v != 0 {
                        prod = mod_mul(prod, v, p);
                    }
                }
            }
            let ld = spec.delta_symbol();
            let two_b = legendre(2 * spec.b, p);
            let magnitude = if ld == -1 || (ld == 0 && two_b == 1) {
                half_factorial(p)
            } else {
                1
            };
            let (pass, sign) = if prod == magnitude {
                (true, 1)
            } else if prod == p - magnitude {
                (true, -1)
            } else {
                (false, 0)
            };
            let mut v = Verdict::new(
                "half_square_product",
                p,
                params,
                pass,
                prod.to_string(),
                format!("±{magnitude}"),
            );
            if pass {
                v = v.with_sign(sign);
            }
            Ok(v)
        }
        FormProductPart::CoeffSumDivisible => {
            let (ar, cr) = (
                spec.a.rem_euclid(p as i64),
                spec.c.rem_euclid(p as i64),
            );
            if ar == 0 || cr == 0 || coeff_sum.rem_euclid(pm) != 0 {
                return Err(CongrError::Precondition(format!(
                    "requires p ∤ a, p ∤ c, p | a+b+c ({params})"
                )));
            }
            let lhs = triangle_product(p - 1);
            let rhs = if (spec.a - spec.c).rem_euclid(p as i64) != 0 {
                let n = count_np(spec.a, spec.c, p).map_err(|_| CongrError::NotOddPrime(p))?;
                let s = if n % 2 == 0 { 1 } else { -1 }
                    * legendre(2 * spec.c % p as i64, p) as i64
                    * legendre(spec.a - spec.c, p) as i64;
                symbol_residue(s, p)
            } else {
                let s = if ((p + 1) / 2) % 2 == 0 { 1 } else { -1 };
                symbol_residue(s * legendre(spec.a, p) as i64, p)
            };
            Ok(Verdict::new(
                "coeff_sum_product",
                p,
                params,
                lhs == rhs,
                lhs.to_string(),
                rhs.to_string(),
            ))
        }
        FormProductPart::DegenerateCoeff => {
            let pa = spec.a.rem_euclid(p as i64) == 0;
            let pb = spec.b.rem_euclid(p as i64) == 0;
            let pc = spec.c.rem_euclid(p as i64) == 0;
            if !(pa || pc) {
                return Err(CongrError::Precondition(format!(
                    "requires p | a·c ({params})"
                )));
            }
            if pa && pb && pc {
                return Err(CongrError::Precondition(format!(
                    "requires a, b, c not all divisible by p ({params})"
                )));
            }
            let bc = (spec.b as i128 + spec.c as i128).rem_euclid(pm) == 0;
            let ab = (spec.a as i128 + spec.b as i128).rem_euclid(pm) == 0;
            let half_parity = if ((p + 1) / 2) % 2 == 0 { 1i64 } else { -1 };
            let np_sign = |num: i64, den: i64| -> Result<i64, CongrError> {
                let n = count_np(num, den, p).map_err(|_| CongrError::NotOddPrime(p))?;
                Ok(if n % 2 == 0 { 1 } else { -1 })
            };
            let s: i64 = if pa && !pb && pc {
                -i64::from(legendre(spec.b, p))
            } else if pa && !pb && !pc && bc {
                -i64::from(legendre(spec.c, p))
            } else if pa && !pc && !pb && !bc {
                np_sign(-spec.c, spec.b)? * i64::from(legendre(2, p))
            } else if pa && pb && !pc {
                half_parity * i64::from(legendre(spec.c, p))
            } else if !pa && pb && pc {
                half_parity * i64::from(legendre(spec.a, p))
            } else if !pa && !pb && ab && pc {
                half_parity * i64::from(legendre(spec.b, p))
            } else if !pa && !pb && !ab && pc {
                np_sign(-spec.a, spec.b)? * i64::from(legendre(2, p))
            } else {
                unreachable!("divisibility-pattern cases are exhaustive under the preconditions")
            };
            let lhs = triangle_product(p - 1);
            let rhs = symbol_residue(s, p);
            Ok(Verdict::new(
                "degenerate_product",
                p,
                params,
                lhs == rhs,
                lhs.to_string(),
                rhs.to_string(),
            ))
        }
    }
}

/// Direct products over the half range against their closed forms:
/// `∏_{1≤i<j≤(p-1)/2}(j²-i²)` is `-((p-1)/2)! (mod p)` for `p ≡ 1 (mod 4)`
/// and `1` otherwise, and for `p ≡ 3 (mod 4)` the companion product
/// `∏(i²+j²) ≡ (-1)^{⌊(p+1)/8⌋} (mod p)`.
pub fn verify_triangle_products(p: u64) -> Result<Verdict, CongrError> {
    if p < 3 || !is_prime(p) {
        return Err(CongrError::NotOddPrime(p));
    }
    let half = (p - 1) / 2;
    let mut diff_prod = 1u64;
    for i in 1..=half {
        for j in i + 1..=half {
            diff_prod = mod_mul(diff_prod, (j * j - i * i) % p, p);
        }
    }
    let want_diff = if p % 4 == 1 {
        p - half_factorial(p)
    } else {
        1
    };
    let (lhs, rhs, pass) = if p % 4 == 3 {
        let mut sum_prod = 1u64;
        for i in 1..=half {
            for j in i + 1..=half {
                let v = (i * i + j * j) % p;
                if v != 0 {
                    sum_prod = mod_mul(sum_prod, v, p);
                }
            }
        }
        let want_sum = if ((p + 1) / 8) % 2 == 0 { 1 } else { p - 1 };
        (
            format!("diff={diff_prod} sums={sum_prod}"),
            format!("diff={want_diff} sums={want_sum}"),
            diff_prod == want_diff && sum_prod == want_sum,
        )
    } else {
        (
            format!("diff={diff_prod}"),
            format!("diff={want_diff}"),
            diff_prod == want_diff,
        )
    };
    Ok(Verdict::new("triangle_products", p, "", pass, lhs, rhs))
}

/// The count of `x ∈ [0, p-1]` whose image under `x ↦ a·x + b (mod p)`
/// exceeds `x`; equals `(p-1)/2` for every `2 ≤ a ≤ p-2` and any `b`.
pub fn count_map_exceeding(a: u64, b: u64, p: u64) -> u64 {
    (0..p).filter(|&x| (a * x + b) % p > x).count() as u64
}

/// Direct verification of the supporting enumeration lemmas. For every odd
/// `n ≥ 3` the two unit-inverse pair counts are checked against their
/// factorization-driven parities; when `n` is prime, the zero-pair parity,
/// difference product, shift-map count, square-sum residue, and value-sum
/// parity lemmas are checked as well. Returns one itemized verdict per
/// lemma.
pub fn verify_support_lemmas(n: u64) -> Result<Vec<Verdict>, CongrError> {
    if n < 3 || n % 2 == 0 {
        return Err(CongrError::NotOdd(n));
    }
    let mut out = Vec::new();
    let half = (n - 1) / 2;
    let factors = factorize(n);
    let r = factors.len();

    // Self-paired inverses below n/2: count ≡ [r = 1] (mod 2).
    let mut inv_count_half = 0u64;
    for k in 1..=half {
        if let Some(ki) = mod_inv(k, n) {
            if ki <= half {
                inv_count_half += 1;
            }
        }
    }
    let want_parity = u64::from(r == 1);
    out.push(Verdict::new(
        "unit_half_inverses",
        n,
        "",
        inv_count_half % 2 == want_parity,
        format!("count={inv_count_half}"),
        format!("parity={want_parity}"),
    ));

    // Pairs i < j ≤ (n-1)/2 with i·j ≡ ±1 (mod n): odd exactly per the
    // factorization criterion.
    let mut pair_count = 0u64;
    for i in 1..=half {
        if let Some(inv) = mod_inv(i, n) {
            for j_cand in [inv, n - inv] {
                if j_cand > i && j_cand <= half {
                    pair_count += 1;
                }
            }
        }
    }
    let want_odd = match factors.as_slice() {
        [(p1, a1)] => p1 % 8 == 1 || p1 % 8 == (4 * u64::from(*a1) + 3) % 8,
        [(p1, _), (p2, _)] => (p1 + p2) % 4 == 0,
        _ => false,
    };
    out.push(Verdict::new(
        "unit_pair_products",
        n,
        "",
        (pair_count % 2 == 1) == want_odd,
        format!("count={pair_count}"),
        format!("odd={want_odd}"),
    ));

    if !is_prime(n) {
        return Ok(out);
    }
    let p = n;

    // Zero-count parity of a·i² + b·ij - a·j² on the half square.
    let mut zero_parity_ok = true;
    let mut zero_parity_fail = String::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            let c = -a;
            if (a * b).rem_euclid(p as i64) == 0 {
                continue;
            }
            let spec = QuadFormSpec::new(p, a, b, c)?;
            let cnt = quadform_counts(&spec, 0, Region::SquareHalf);
            let sign = if cnt % 2 == 0 { 1i8 } else { -1 };
            let want = match spec.delta_symbol() {
                -1 => 1,
                0 => legendre(2, p),
                _ => legendre(-1, p),
            };
            if sign != want {
                zero_parity_ok = false;
                zero_parity_fail = format!("a={a} b={b}: {sign} vs {want}");
            }
        }
    }
    out.push(Verdict::new(
        "zero_pair_parity",
        p,
        "grid |a|,|b|<=3",
        zero_parity_ok,
        if zero_parity_ok { "all".to_string() } else { zero_parity_fail },
        "sign matches discriminant class",
    ));

    // ∏_{1≤i<j≤p-1}(j-i) ≡ -(2/p)·((p-1)/2)! via ∏ d^{p-1-d}.
    let mut diff = 1u64;
    for d in 1..=p.saturating_sub(2) {
        diff = mod_mul(diff, mod_pow(d, p - 1 - d, p), p);
    }
    let want_diff = symbol_residue(-i64::from(legendre(2, p)), p);
    let want_diff = mod_mul(want_diff, half_factorial(p), p);
    out.push(Verdict::new(
        "difference_product",
        p,
        "",
        diff == want_diff,
        diff.to_string(),
        want_diff.to_string(),
    ));

    // x ↦ ax+b exceeds x exactly (p-1)/2 times for 2 ≤ a ≤ p-2.
    let mut shift_ok = true;
    let mut shift_fail = String::new();
    'outer: for a in 2..=p.saturating_sub(2) {
        for b in 0..p {
            let cnt = count_map_exceeding(a, b, p);
            if cnt != half {
                shift_ok = false;
                shift_fail = format!("a={a} b={b}: {cnt}");
                break 'outer;
            }
        }
    }
    out.push(Verdict::new(
        "shift_exceed_count",
        p,
        "",
        shift_ok,
        if shift_ok { "all".to_string() } else { shift_fail },
        format!("count={half}"),
    ));

    // Σ_{j<k≤(p-1)/2}(j²+k²) mod 2p: p when p ≡ 5 (mod 8), else 0.
    let mut square_sum = 0u128;
    for j in 1..=half as u128 {
        for k in j + 1..=half as u128 {
            square_sum += j * j + k * k;
        }
    }
    let got = (square_sum % (2 * p as u128)) as u64;
    let want = if p % 8 == 5 { p } else { 0 };
    out.push(Verdict::new(
        "square_sum_residue",
        p,
        "",
        got == want,
        got.to_string(),
        want.to_string(),
    ));

    // Divisible-value total over the half triangle: Σ_{p | j²+k²}(j²+k²)/p
    // is odd iff p ≡ 5 (mod 8); the non-divisible pair count is
    // ((p-1)/2)·⌊(p-3)/4⌋.
    let mut divisible_total = 0u128;
    let mut nonzero_pairs = 0u64;
    for j in 1..=half {
        for k in j + 1..=half {
            let v = (j * j + k * k) as u128;
            if v % p as u128 == 0 {
                divisible_total += v;
            } else {
                nonzero_pairs += 1;
            }
        }
    }
    let parity = ((divisible_total / p as u128) % 2) as u64;
    let want_parity = u64::from(p % 8 == 5);
    let want_pairs = half * ((p - 3) / 4);
    out.push(Verdict::new(
        "divisible_sum_parity",
        p,
        "",
        parity == want_parity && nonzero_pairs == want_pairs,
        format!("parity={parity} pairs={nonzero_pairs}"),
        format!("parity={want_parity} pairs={want_pairs}"),
    ));

    // Full-triangle value sums: p | Σ v, with quotient parity
    // a(p-1)/2 + b(p-1)(p-3)/8 (mod 2); and for nondegenerate forms the
    // non-divisible pair count is (p-1)(p-3-(Δ/p))/2.
    if p > 3 {
        let (mut s_j2, mut s_jk, mut s_k2) = (0i128, 0i128, 0i128);
        for j in 1..p as i128 {
            for k in j + 1..p as i128 {
                s_j2 += j * j;
                s_jk += j * k;
                s_k2 += k * k;
            }
        }
        let mut sums_ok = true;
        let mut sums_fail = String::new();
        for a in -3i64..=3 {
            if a.rem_euclid(p as i64) == 0 {
                continue;
            }
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    let total = a as i128 * s_j2 + b as i128 * s_jk + c as i128 * s_k2;
                    let divisible = total.rem_euclid(p as i128) == 0;
                    let q_parity = (total / p as i128).rem_euclid(2);
                    let want_q = (a as i128 * ((p - 1) / 2) as i128
                        + b as i128 * (((p - 1) * (p - 3) / 8) as i128))
                        .rem_euclid(2);
                    let mut ok = divisible && q_parity == want_q;
                    let coeff_sum = a as i128 + b as i128 + c as i128;
                    if ok
                        && (a as i128 * c as i128 * coeff_sum).rem_euclid(p as i128) != 0
                    {
                        let spec = QuadFormSpec::new(p, a, b, c)?;
                        let nz = (p - 1) * (p - 2) / 2 - quadform_counts(&spec, 0, Region::TriangleFull);
                        let want_nz =
                            (p - 1) * ((p as i64 - 3 - i64::from(spec.delta_symbol())) as u64) / 2;
                        ok = nz == want_nz;
                    }
                    if !ok {
                        sums_ok = false;
                        sums_fail = format!("a={a} b={b} c={c}");
                    }
                }
            }
        }
        out.push(Verdict::new(
            "pair_form_sums",
            p,
            "grid |a|,|b|,|c|<=3",
            sums_ok,
            if sums_ok { "all".to_string() } else { sums_fail },
            "divisibility, quotient parity, nonzero count",
        ));
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;

    #[test]
    fn char_sum_anchors_and_closed_form() {
        assert_eq!(char_sum(1, 0, 0, 7).unwrap(), 6);
        assert_eq!(char_sum(1, 0, 1, 7).unwrap(), -1);
        assert_eq!(char_sum(0, 1, 0, 5).unwrap(), 0);
        assert!(char_sum(7, 14, 1, 7).is_err());
        for p in sieve_primes(3, 61, None) {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    if a.rem_euclid(p as i64) == 0 && b.rem_euclid(p as i64) == 0 {
                        continue;
                    }
                    for c in -3i64..=3 {
                        let got = char_sum(a, b, c, p).unwrap();
                        let delta = b as i128 * b as i128 - 4 * a as i128 * c as i128;
                        let la = i64::from(legendre(a, p));
                        let want = if delta.rem_euclid(p as i128) == 0 {
                            (p as i64 - 1) * la
                        } else {
                            -la
                        };
                        assert_eq!(got, want, "p={p} ({a},{b},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn quadform_count_closed_forms() {
        // Zero-value counts on the half triangle.
        let spec13 = QuadFormSpec::new(13, 1, 0, 1).unwrap();
        assert_eq!(quadform_counts(&spec13, 0, Region::TriangleHalf), 3);
        let spec11 = QuadFormSpec::new(11, 1, 0, 1).unwrap();
        assert_eq!(quadform_counts(&spec11, 0, Region::TriangleHalf), 0);
        for p in sieve_primes(5, 113, None) {
            let spec = QuadFormSpec::new(p, 1, 0, 1).unwrap();
            let r0 = quadform_counts(&spec, 0, Region::TriangleHalf);
            assert_eq!(r0, if p % 4 == 1 { (p - 1) / 4 } else { 0 }, "p={p}");
            let leg2 = i64::from(legendre(2, p));
            for n in 1..p {
                let r = quadform_counts(&spec, n, Region::TriangleHalf) as i64;
                let ln = i64::from(legendre(n as i64, p));
                let want = ((p + 1) / 8) as i64 - ((1 + leg2) / 2) * ((1 + ln) / 2);
                assert_eq!(r, want, "p={p} n={n}");
            }
        }
        // Full-triangle counts for nondegenerate forms.
        for p in sieve_primes(3, 37, None) {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    for c in -3i64..=3 {
                        let cs = a as i128 + b as i128 + c as i128;
                        if (a as i128 * c as i128 * cs).rem_euclid(p as i128) == 0 {
                            continue;
                        }
                        let spec = QuadFormSpec::new(p, a, b, c).unwrap();
                        let ld = spec.delta_symbol() as i64;
                        let t = (1 - p as i64 + p as i64 * ld * ld)
                            * i64::from(legendre(a, p))
                            + i64::from(legendre(c, p))
                            + i64::from(legendre(cs.rem_euclid(p as i128) as i64, p));
                        for n in 0..p {
                            let got = quadform_counts(&spec, n, Region::TriangleFull) as i64;
                            let want = if n == 0 {
                                (p as i64 - 1) * (1 + ld) / 2
                            } else {
                                let ln = i64::from(legendre(n as i64, p));
                                let w = p as i64 - 3 - ld - ln * t;
                                assert_eq!(w % 2, 0);
                                w / 2
                            };
                            assert_eq!(got, want, "p={p} ({a},{b},{c}) n={n}");
                        }
                    }
                }
            }
        }
        // Square-region difference counts.
        for p in sieve_primes(5, 113, None) {
            let spec = QuadFormSpec::new(p, 1, 0, -1).unwrap();
            for n in 1..p {
                let got = quadform_counts(&spec, n, Region::SquareHalf);
                let extra = u64::from(p % 4 == 1 && legendre(n as i64, p) == 1);
                assert_eq!(got, (p - 1) / 4 - extra, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn half_triangle_square_identity() {
        // p = 13: product ≡ (-1)^{⌊8/8⌋} = -1 (mod 13).
        let spec = QuadFormSpec::new(13, 1, 0, 1).unwrap();
        let v = verify_form_products(&spec, FormProductPart::HalfTriangleSquares).unwrap();
        assert!(v.pass);
        assert_eq!(v.rhs, "12");
        for p in sieve_primes(5, 499, Some((4, 1))) {
            let spec = QuadFormSpec::new(p, 1, 0, 1).unwrap();
            let v = verify_form_products(&spec, FormProductPart::HalfTriangleSquares).unwrap();
            assert!(v.pass, "p={p}: {} vs {}", v.lhs, v.rhs);
        }
        let spec = QuadFormSpec::new(7, 1, 0, 1).unwrap();
        assert!(verify_form_products(&spec, FormProductPart::HalfTriangleSquares).is_err());
    }

    #[test]
    fn form_product_grid_sweep() {
        for p in sieve_primes(3, 43, None) {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    for c in -3i64..=3 {
                        let spec = QuadFormSpec::new(p, a, b, c).unwrap();
                        let cs = a as i128 + b as i128 + c as i128;
                        let pm = p as i128;
                        let nondeg = (a as i128 * c as i128 * cs).rem_euclid(pm) != 0;
                        if nondeg {
                            let v = verify_form_products(&spec, FormProductPart::FullTriangle)
                                .unwrap();
                            assert!(v.pass, "(1.8-class) p={p} ({a},{b},{c})");
                            if a + c == 0 {
                                let v = verify_form_products(
                                    &spec,
                                    FormProductPart::HalfSquareGrid,
                                )
                                .unwrap();
                                assert!(v.pass, "square p={p} ({a},{b},{c}): {}", v.lhs);
                                assert!(v.observed_sign.is_some());
                            }
                        } else if a.rem_euclid(pm as i64) != 0
                            && c.rem_euclid(pm as i64) != 0
                            && cs.rem_euclid(pm) == 0
                        {
                            let v = verify_form_products(&spec, FormProductPart::CoeffSumDivisible)
                                .unwrap();
                            assert!(v.pass, "sum-div p={p} ({a},{b},{c})");
                        } else if (a as i128 * c as i128).rem_euclid(pm) == 0
                            && !(a.rem_euclid(pm as i64) == 0
                                && b.rem_euclid(pm as i64) == 0
                                && c.rem_euclid(pm as i64) == 0)
                        {
                            let v = verify_form_products(&spec, FormProductPart::DegenerateCoeff)
                                .unwrap();
                            assert!(v.pass, "degenerate p={p} ({a},{b},{c})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_anchor() {
        // (0,1,0) at p = 7: p | a, p ∤ b, p | c → ≡ -(1/7) ≡ -1 (mod 7).
        let spec = QuadFormSpec::new(7, 0, 1, 0).unwrap();
        let v = verify_form_products(&spec, FormProductPart::DegenerateCoeff).unwrap();
        assert!(v.pass);
        assert_eq!(v.rhs, "6");
    }

    #[test]
    fn triangle_product_anchors() {
        // p = 13: ∏(j²-i²) ≡ -6! (mod 13).
        let v = verify_triangle_products(13).unwrap();
        assert!(v.pass);
        let mut f = 1u64;
        for k in 2..=6 {
            f = f * k % 13;
        }
        assert_eq!(v.rhs, format!("diff={}", 13 - f));
        // p = 11: both products known.
        let v = verify_triangle_products(11).unwrap();
        assert!(v.pass);
        assert_eq!(v.rhs, "diff=1 sums=10");
        for p in sieve_primes(3, 199, None) {
            assert!(verify_triangle_products(p).unwrap().pass, "p={p}");
        }
    }

    #[test]
    fn support_lemmas_sweep() {
        // Composite odd moduli exercise only the unit-inverse counts.
        for m in (3..=301u64).step_by(2) {
            let items = verify_support_lemmas(m).unwrap();
            for v in &items {
                assert!(v.pass, "m={m} {}: {} vs {}", v.id, v.lhs, v.rhs);
            }
            if !is_prime(m) {
                assert_eq!(items.len(), 2);
            }
        }
        for p in sieve_primes(3, 113, None) {
            for v in verify_support_lemmas(p).unwrap() {
                assert!(v.pass, "p={p} {}: {} vs {}", v.id, v.lhs, v.rhs);
            }
        }
        assert!(verify_support_lemmas(8).is_err());
    }

    #[test]
    fn shift_map_anchor() {
        assert_eq!(count_map_exceeding(3, 2, 7), 3);
    }
}
