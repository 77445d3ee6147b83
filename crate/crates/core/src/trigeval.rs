//! Overflow-proof numeric evaluation of large trigonometric products via a
//! signed-logarithm carrier.
//!
//! Products like `∏ sin(π·n/p)` over ~p²/2 factors underflow 64-bit floats
//! long before the ranges verified here; every product is therefore carried
//! as a sign plus the natural log of its absolute value. Signs are decided
//! by exact integer residue tests (never by the float sign of a factor near
//! zero), numerators are reduced mod `2·den` before any float work, and log
//! accumulation uses compensated (Neumaier) summation. Comparison against
//! closed forms built from class-number data is sign-exact where a sign is
//! asserted and relative in the log-magnitude otherwise.

use crate::arith::{is_prime, legendre, residue};
use crate::classfield::{ClassData, QuadUnit};
use crate::report::{fmt_signed_log, Verdict};
use std::f64::consts::{LN_2, PI};
use thiserror::Error;

/// Base relative tolerance on log-magnitudes, scaled by `√(#factors)`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Errors from signed-log products and the identity verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrigError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("identity requires p >= {min}, got {p}")]
    PrimeTooSmall { p: u64, min: u64 },
    #[error("multiplier must not be divisible by {0}")]
    MultiplierDivisible(u64),
    #[error("class data is for {1}, wanted {0}")]
    PrimeMismatch(u64, u64),
    #[error("class data for {0} lacks the required fields")]
    MissingClassData(u64),
    #[error("angle denominator must be positive")]
    ZeroDenominator,
    #[error("pole: cosecant/cotangent factor at integer angle {num}/{den}")]
    Pole { num: i64, den: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A real number as `sign · e^{log_mag}` with `sign ∈ {-1, 0, +1}`
/// (`log_mag = -∞` when the sign is 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub log_mag: f64,
}

impl SignedLog {
    /// The multiplicative identity.
    pub fn one() -> Self {
        SignedLog { sign: 1, log_mag: 0.0 }
    }

    /// Exact zero (absorbing under multiplication).
    pub fn zero() -> Self {
        SignedLog { sign: 0, log_mag: f64::NEG_INFINITY }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Equality with exact sign and relative log-magnitude tolerance
    /// `base_tol·√max(1, factors)` on `max(1, |log|)`.
    pub fn approx_eq(&self, other: &SignedLog, factors: u64, base_tol: f64) -> bool {
        if self.sign != other.sign {
            return false;
        }
        if self.sign == 0 {
            return true;
        }
        let tol = base_tol * (factors.max(1) as f64).sqrt();
        let scale = self.log_mag.abs().max(other.log_mag.abs()).max(1.0);
        (self.log_mag - other.log_mag).abs() <= tol * scale
    }

    fn render(&self) -> String {
        fmt_signed_log(self.sign, self.log_mag)
    }
}

/// Compensated accumulator for sums of many logs.
#[derive(Default)]
struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Running product of signed-log factors.
struct ProductAcc {
    sign: i8,
    sum: NeumaierSum,
    factors: u64,
}

impl ProductAcc {
    fn new() -> Self {
        ProductAcc { sign: 1, sum: NeumaierSum::default(), factors: 0 }
    }

    fn push(&mut self, f: SignedLog) {
        self.factors += 1;
        if f.sign == 0 {
            self.sign = 0;
        } else if self.sign != 0 {
            self.sign *= f.sign;
            self.sum.add(f.log_mag);
        }
    }

    fn finish(self) -> SignedLog {
        if self.sign == 0 {
            SignedLog::zero()
        } else {
            SignedLog { sign: self.sign, log_mag: self.sum.value() }
        }
    }
}

/// `(-1)^e` with Euclidean parity (safe for negative exponents).
fn psign(e: i128) -> i8 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `sin(π·num/den)` with an exact integer sign decision and an argument
/// folded into `[0, π/2]` before the float evaluation.
fn sin_signed(num: i128, den: u64) -> SignedLog {
    debug_assert!(den > 0);
    let two_den = 2 * den as i128;
    let r = num.rem_euclid(two_den) as u64;
    if r % den == 0 {
        return SignedLog::zero();
    }
    let sign = if r < den { 1 } else { -1 };
    let mut m = r % den;
    m = m.min(den - m);
    SignedLog { sign, log_mag: (PI * m as f64 / den as f64).sin().ln() }
}

/// `cos(π·num/den)`: zero iff `2·num ≡ ±den (mod 2·den)`, sign by residue
/// window, magnitude via the complementary sine.
fn cos_signed(num: i128, den: u64) -> SignedLog {
    debug_assert!(den > 0);
    let two_den = 2 * den as i128;
    let r = num.rem_euclid(two_den) as u64;
    let t = 2 * r;
    if t == den || t == 3 * den {
        return SignedLog::zero();
    }
    let sign = if t < den || t > 3 * den { 1 } else { -1 };
    let mag = sin_signed(den as i128 - 2 * r as i128, 2 * den).log_mag;
    SignedLog { sign, log_mag: mag }
}

/// Pointwise factor kinds for [`slog_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    Sin,
    Cos,
    Csc,
}

/// Signed-log product of `f(π·num/den)` over the angle iterator. Zero sine
/// and cosine factors are legal and make the product exactly zero; a zero
/// denominator or a cosecant pole is an error. The empty product is 1.
pub fn slog_product(
    kind: ProductKind,
    angles: impl IntoIterator<Item = (i64, u64)>,
) -> Result<SignedLog, TrigError> {
    let mut acc = ProductAcc::new();
    for (num, den) in angles {
        if den == 0 {
            return Err(TrigError::ZeroDenominator);
        }
        let f = match kind {
            ProductKind::Sin => sin_signed(num as i128, den),
            ProductKind::Cos => cos_signed(num as i128, den),
            ProductKind::Csc => {
                let s = sin_signed(num as i128, den);
                if s.sign == 0 {
                    return Err(TrigError::Pole { num, den });
                }
                SignedLog { sign: s.sign, log_mag: -s.log_mag }
            }
        };
        acc.push(f);
    }
    Ok(acc.finish())
}

/// Two-angle factor kinds for [`slog_pair_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairProductKind {
    /// `cot(πθ₁) - cot(πθ₂) = sin(π(θ₂-θ₁)) / (sin(πθ₁)·sin(πθ₂))`.
    CotDifference,
    /// `cot(πθ₁) + cot(πθ₂) = sin(π(θ₁+θ₂)) / (sin(πθ₁)·sin(πθ₂))`.
    CotSum,
}

/// Signed-log product of cotangent differences/sums over angle pairs
/// `((n₁, d₁), (n₂, d₂))`. A pole (either angle an integer) is an error; a
/// zero numerator sine (equal or opposite angles mod 1) makes the product
/// exactly zero.
pub fn slog_pair_product(
    kind: PairProductKind,
    pairs: impl IntoIterator<Item = ((i64, u64), (i64, u64))>,
) -> Result<SignedLog, TrigError> {
    let mut acc = ProductAcc::new();
    for ((n1, d1), (n2, d2)) in pairs {
        if d1 == 0 || d2 == 0 {
            return Err(TrigError::ZeroDenominator);
        }
        let s1 = sin_signed(n1 as i128, d1);
        if s1.sign == 0 {
            return Err(TrigError::Pole { num: n1, den: d1 });
        }
        let s2 = sin_signed(n2 as i128, d2);
        if s2.sign == 0 {
            return Err(TrigError::Pole { num: n2, den: d2 });
        }
        let combined = match kind {
            PairProductKind::CotDifference => n2 as i128 * d1 as i128 - n1 as i128 * d2 as i128,
            PairProductKind::CotSum => n1 as i128 * d2 as i128 + n2 as i128 * d1 as i128,
        };
        let s3 = sin_signed(combined, d1 * d2);
        if s3.sign == 0 {
            acc.push(SignedLog::zero());
        } else {
            acc.push(SignedLog {
                sign: s3.sign * s1.sign * s2.sign,
                log_mag: s3.log_mag - s1.log_mag - s2.log_mag,
            });
        }
    }
    Ok(acc.finish())
}

fn require_odd_prime(p: u64, min: u64) -> Result<(), TrigError> {
    if p < 3 || !is_prime(p) {
        return Err(TrigError::NotOddPrime(p));
    }
    if p < min {
        return Err(TrigError::PrimeTooSmall { p, min });
    }
    Ok(())
}

fn require_class(p: u64, class: &ClassData) -> Result<(), TrigError> {
    if class.p != p {
        return Err(TrigError::PrimeMismatch(p, class.p));
    }
    Ok(())
}

fn unit_log(p: u64, unit: &QuadUnit) -> f64 {
    unit.log(p)
}

/// `(h(p), ln ε_p)` for `p ≡ 1 (mod 4)`.
fn wide_data(p: u64, class: &ClassData) -> Result<(i64, f64), TrigError> {
    let h = class.h_plus.ok_or(TrigError::MissingClassData(p))? as i64;
    let unit = class.unit.as_ref().ok_or(TrigError::MissingClassData(p))?;
    Ok((h, unit_log(p, unit)))
}

/// `h(-p)` for `p ≡ 3 (mod 4)`.
fn narrow_h(p: u64, class: &ClassData) -> Result<u64, TrigError> {
    class.h_minus.ok_or(TrigError::MissingClassData(p))
}

fn nonzero_symbol(a: i64, p: u64) -> Result<i8, TrigError> {
    let la = legendre(a, p);
    if la == 0 {
        return Err(TrigError::MultiplierDivisible(p));
    }
    Ok(la)
}

/// Reduce `a mod 2p` (the full period of every `sin/cos(π·a·x/p)` factor).
fn half_period_residue(a: i64, p: u64) -> u64 {
    (a as i128).rem_euclid(2 * p as i128) as u64
}

/// Scaled half-range products `2^{(p-1)/2}·∏_{k≤(p-1)/2} sin(π·a·k²/p)` and
/// the matching cosine product, checked against their closed forms: for
/// `p ≡ 1 (mod 4)` the sine product is `±√p·ε_p^{-(a/p)h(p)}` and the cosine
/// product is `±ε_p^{(1-(2/p))(a/p)h(p)}`; for `p ≡ 3 (mod 4)` the sine
/// product is `±√p` with a sign driven by `h(-p)` and `(a/p)`, the cosine
/// product is `±1`. All four signs are asserted exactly.
pub fn verify_half_square_trig(
    p: u64,
    a: i64,
    class: &ClassData,
    tol: f64,
) -> Result<Verdict, TrigError> {
    require_odd_prime(p, 5)?;
    require_class(p, class)?;
    let la = nonzero_symbol(a, p)?;
    let a2 = half_period_residue(a, p);
    let two_p = 2 * p;
    let half = (p - 1) / 2;
    let angles = |_: ()| (1..=half).map(move |k| ((a2 * (k * k % two_p) % two_p) as i64, p));
    let mut sin_prod = slog_product(ProductKind::Sin, angles(()))?;
    let mut cos_prod = slog_product(ProductKind::Cos, angles(()))?;
    let scale = half as f64 * LN_2;
    sin_prod.log_mag += scale;
    cos_prod.log_mag += scale;

    let lnp = (p as f64).ln();
    let quarter_up = ((p + 1) / 4) as i128; // ⌊(p+1)/4⌋
    let (want_sin, want_cos) = if p % 4 == 1 {
        let (h, le) = wide_data(p, class)?;
        let leg2 = i64::from(legendre(2, p));
        let want_sin = SignedLog {
            sign: psign((a as i128 + 1) * quarter_up),
            log_mag: 0.5 * lnp - la as f64 * (h as f64) * le,
        };
        let want_cos = SignedLog {
            sign: psign(a as i128 * ((p - 1) / 4) as i128),
            log_mag: (1 - leg2) as f64 * la as f64 * h as f64 * le,
        };
        (want_sin, want_cos)
    } else {
        let hm = narrow_h(p, class)?;
        let want_sin = SignedLog {
            sign: psign((a as i128 + 1) * quarter_up + ((hm + 1) / 2) as i128) * la,
            log_mag: 0.5 * lnp,
        };
        let want_cos = SignedLog {
            sign: psign((a as i128 + 1) * quarter_up),
            log_mag: 0.0,
        };
        (want_sin, want_cos)
    };
    let pass = sin_prod.approx_eq(&want_sin, half, tol) && cos_prod.approx_eq(&want_cos, half, tol);
    Ok(Verdict::new(
        "half_square_trig",
        p,
        format!("a={a}"),
        pass,
        format!("sin={} cos={}", sin_prod.render(), cos_prod.render()),
        format!("sin={} cos={}", want_sin.render(), want_cos.render()),
    ))
}

/// Products over square differences `a(k²-j²)`, `1 ≤ j < k ≤ (p-1)/2`: the
/// cosecant product and the cotangent-difference product. For
/// `p ≡ 3 (mod 4)` both equal `(2^{p-1}/p)^{(p-3)/8}` with an exactly
/// asserted sign; for `p ≡ 1 (mod 4)` the closed form's sign is open, so the
/// check is the exact first-equality sign between the two product forms plus
/// both log-magnitudes, with the observed sign recorded.
pub fn verify_square_diff_trig(
    p: u64,
    a: i64,
    class: &ClassData,
    tol: f64,
) -> Result<Verdict, TrigError> {
    require_odd_prime(p, 3)?;
    require_class(p, class)?;
    let la = nonzero_symbol(a, p)?;
    let a2 = half_period_residue(a, p);
    let two_p = 2 * p;
    let half = (p - 1) / 2;
    let diff_angles = (1..=half).flat_map(move |j| {
        (j + 1..=half).map(move |k| {
            let j2 = j * j % two_p;
            let k2 = k * k % two_p;
            ((a2 * ((k2 + two_p - j2) % two_p) % two_p) as i64, p)
        })
    });
    let csc = slog_product(ProductKind::Csc, diff_angles)?;
    let pair_angles = (1..=half).flat_map(move |j| {
        (j + 1..=half).map(move |k| {
            (
                ((a2 * (j * j % two_p) % two_p) as i64, p),
                ((a2 * (k * k % two_p) % two_p) as i64, p),
            )
        })
    });
    let cot = slog_pair_product(PairProductKind::CotDifference, pair_angles)?;
    let n_pairs = half * half.saturating_sub(1) / 2;
    let base = ((p - 1) as f64 * LN_2 - (p as f64).ln()) * ((p - 3) as f64 / 8.0);

    if p % 4 == 3 {
        let hm = narrow_h(p, class)?;
        let ws = if p % 8 == 3 { 1 } else { psign(((hm + 1) / 2) as i128) * la };
        let want = SignedLog { sign: ws, log_mag: base };
        let pass = csc.approx_eq(&want, n_pairs, tol) && cot.approx_eq(&want, 3 * n_pairs.max(1), tol);
        Ok(Verdict::new(
            "square_diff_trig",
            p,
            format!("a={a}"),
            pass,
            format!("csc={} cot={}", csc.render(), cot.render()),
            format!("both={}", want.render()),
        ))
    } else {
        let (h, le) = wide_data(p, class)?;
        let shift = la as f64 * h as f64 * le;
        let twisted = SignedLog {
            sign: psign((a as i128 - 1) * ((p - 1) / 4) as i128) * csc.sign,
            log_mag: csc.log_mag,
        };
        // First equality: twisted csc form == cot form · ε^{-(a/p)h(p)(p-1)/2}.
        let cot_shifted = SignedLog {
            sign: cot.sign,
            log_mag: cot.log_mag - shift * ((p - 1) / 2) as f64,
        };
        let want_mag = SignedLog {
            sign: twisted.sign, // magnitude-only: reuse observed sign
            log_mag: base - shift / 2.0,
        };
        let pass = twisted.approx_eq(&cot_shifted, 3 * n_pairs.max(1), tol)
            && twisted.approx_eq(&want_mag, n_pairs, tol);
        Ok(Verdict::new(
            "square_diff_trig",
            p,
            format!("a={a}"),
            pass,
            format!("csc_form={} cot_form={}", twisted.render(), cot_shifted.render()),
            format!("magnitude={}", want_mag.render()),
        )
        .with_sign(twisted.sign))
    }
}

/// The count of pairs `1 ≤ j < k ≤ (p-1)/2` whose residues of `a·j²` and
/// `a·k²` differ by more than `p/4` and less than `3p/4` in absolute value.
pub fn count_wide_pair_gaps(p: u64, a: i64) -> Result<u64, TrigError> {
    require_odd_prime(p, 3)?;
    if residue(a, p) == 0 {
        return Err(TrigError::MultiplierDivisible(p));
    }
    let ar = residue(a, p);
    let half = (p - 1) / 2;
    let mut count = 0u64;
    for j in 1..=half {
        let rj = ar * (j * j % p) % p;
        for k in j + 1..=half {
            let rk = ar * (k * k % p) % p;
            let d = rj.abs_diff(rk);
            if p < 4 * d && 4 * d < 3 * p {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The scaled cosine product over square differences,
/// `2^{(p-1)(p-3)/8}·∏_{j<k} cos(π·a(k²-j²)/p)`, against its closed form:
/// exactly `±1` (sign asserted) for `p ≡ 3 (mod 4)`, magnitude
/// `ε_p^{(a/p)h(p)((2/p)-1)/2}` with the observed sign recorded for
/// `p ≡ 1 (mod 4)`. For `p ≡ 3 (mod 4)` the wide-gap pair count is also
/// asserted even.
pub fn verify_pair_cos_product(
    p: u64,
    a: i64,
    class: &ClassData,
    tol: f64,
) -> Result<Verdict, TrigError> {
    require_odd_prime(p, 3)?;
    require_class(p, class)?;
    let la = nonzero_symbol(a, p)?;
    let a2 = half_period_residue(a, p);
    let two_p = 2 * p;
    let half = (p - 1) / 2;
    let diff_angles = (1..=half).flat_map(move |j| {
        (j + 1..=half).map(move |k| {
            let j2 = j * j % two_p;
            let k2 = k * k % two_p;
            ((a2 * ((k2 + two_p - j2) % two_p) % two_p) as i64, p)
        })
    });
    let mut prod = slog_product(ProductKind::Cos, diff_angles)?;
    let n_pairs = half * half.saturating_sub(1) / 2;
    prod.log_mag += (p - 1) as f64 * (p - 3) as f64 / 8.0 * LN_2;
    let twist = psign(a as i128 * ((p + 1) / 2) as i128 * ((p - 1) / 4) as i128);
    let twisted = SignedLog { sign: twist * prod.sign, log_mag: prod.log_mag };

    if p % 4 == 3 {
        let gaps = count_wide_pair_gaps(p, a)?;
        let want = SignedLog::one();
        let pass = twisted.approx_eq(&want, n_pairs, tol) && gaps % 2 == 0;
        Ok(Verdict::new(
            "pair_cos_parity",
            p,
            format!("a={a}"),
            pass,
            format!("prod={} wide_gaps={}", twisted.render(), gaps),
            "prod=+exp(0) wide_gaps=even".to_string(),
        ))
    } else {
        let (h, le) = wide_data(p, class)?;
        let leg2 = i64::from(legendre(2, p));
        let want_mag = la as f64 * h as f64 * le * (leg2 - 1) as f64 / 2.0;
        let want = SignedLog { sign: twisted.sign, log_mag: want_mag };
        let pass = twisted.approx_eq(&want, n_pairs, tol);
        Ok(Verdict::new(
            "pair_cos_parity",
            p,
            format!("a={a}"),
            pass,
            format!("prod={}", twisted.render()),
            format!("magnitude={}", want.render()),
        )
        .with_sign(twisted.sign))
    }
}

/// The count of pairs `1 ≤ j < k ≤ (p-1)/2` with `{a·j²}_p + {a·k²}_p > p`.
pub fn count_square_pair_overflows(p: u64, a: i64) -> Result<u64, TrigError> {
    require_odd_prime(p, 3)?;
    if residue(a, p) == 0 {
        return Err(TrigError::MultiplierDivisible(p));
    }
    let ar = residue(a, p);
    let half = (p - 1) / 2;
    let mut count = 0u64;
    for j in 1..=half {
        let rj = ar * (j * j % p) % p;
        for k in j + 1..=half {
            let rk = ar * (k * k % p) % p;
            if rj + rk > p {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Products over square sums `a(j²+k²)`, `1 ≤ j < k ≤ (p-1)/2`: sine and
/// cotangent-sum products over the pairs with `p ∤ j²+k²`, the cosine
/// product over all pairs, and the parity of the overflow count, each against
/// its closed form (signs exact in every branch).
pub fn verify_square_sum_trig(
    p: u64,
    a: i64,
    class: &ClassData,
    tol: f64,
) -> Result<Verdict, TrigError> {
    require_odd_prime(p, 3)?;
    require_class(p, class)?;
    let la = nonzero_symbol(a, p)?;
    let a2 = half_period_residue(a, p);
    let two_p = 2 * p;
    let half = (p - 1) / 2;
    let e14 = legendre(-1, p);

    let sum_angles = |skip_zero: bool| {
        (1..=half).flat_map(move |j| {
            (j + 1..=half).filter_map(move |k| {
                let v = j * j + k * k;
                if skip_zero && v % p == 0 {
                    None
                } else {
                    Some(((a2 * (v % two_p) % two_p) as i64, p))
                }
            })
        })
    };
    let n_all = half * half.saturating_sub(1) / 2;
    let n_kept = sum_angles(true).count() as u64;

    let sin_prod = slog_product(ProductKind::Sin, sum_angles(true))?;
    let cos_prod = slog_product(ProductKind::Cos, sum_angles(false))?;
    let cot_pairs = (1..=half).flat_map(move |j| {
        (j + 1..=half).filter_map(move |k| {
            if (j * j + k * k) % p == 0 {
                None
            } else {
                Some((
                    ((a2 * (j * j % two_p) % two_p) as i64, p),
                    ((a2 * (k * k % two_p) % two_p) as i64, p),
                ))
            }
        })
    });
    let cot_prod = slog_pair_product(PairProductKind::CotSum, cot_pairs)?;

    let lnp = (p as f64).ln();
    let expo = (p as f64 - e14 as f64 - 4.0) / 8.0;
    let base_sin = (lnp - (p - 1) as f64 * LN_2) * expo;

    // Shared sign/extra-magnitude branch for the sine and cotangent-sum forms.
    let (ws, sin_extra, cot_extra) = if p % 4 == 1 {
        let (h, le) = wide_data(p, class)?;
        let leg2 = i64::from(legendre(2, p));
        let sh = la as f64 * h as f64 * le;
        (1i8, sh * (1 + leg2) as f64 / 2.0, sh * (p as f64 + leg2 as f64 - 4.0) / 2.0)
    } else if p % 8 == 3 {
        (psign(((p - 3) / 8) as i128), 0.0, 0.0)
    } else {
        let hm = narrow_h(p, class)?;
        (psign(((p + 1) / 8 + (hm + 1) / 2) as i128) * la, 0.0, 0.0)
    };
    let want_sin = SignedLog { sign: ws, log_mag: base_sin + sin_extra };
    let want_cot = SignedLog { sign: ws, log_mag: -base_sin + cot_extra };
    let want_cos = SignedLog {
        sign: psign(a as i128 * ((p + 1) / 2) as i128 * ((p - 1) / 4) as i128),
        log_mag: -(((p - 1) / 2) as f64) * (((p - 3) / 4) as f64) * LN_2,
    };

    let overflows = count_square_pair_overflows(p, a)?;
    let parity_ok = psign(overflows as i128) == ws;

    let pass = sin_prod.approx_eq(&want_sin, n_kept, tol)
        && cos_prod.approx_eq(&want_cos, n_all, tol)
        && cot_prod.approx_eq(&want_cot, 3 * n_kept.max(1), tol)
        && parity_ok;
    Ok(Verdict::new(
        "square_sum_trig",
        p,
        format!("a={a}"),
        pass,
        format!(
            "sin={} cos={} cot={} overflows={}",
            sin_prod.render(),
            cos_prod.render(),
            cot_prod.render(),
            overflows
        ),
        format!(
            "sin={} cos={} cot={} overflow_parity={}",
            want_sin.render(),
            want_cos.render(),
            want_cot.render(),
            if ws == 1 { "even" } else { "odd" }
        ),
    ))
}

/// Products of `sin/cos(π(a·j² + b·jk + c·k²)/p)` over `1 ≤ j < k ≤ p-1`
/// (sine over the pairs the modulus does not divide, twisted by the parity of
/// the sum of divisible values; cosine over all pairs), against closed forms
/// driven by the discriminant's quadratic character. Signs exact in every
/// branch; requires `p ∤ a·c·(a+b+c)` and `p ≥ 5`.
pub fn verify_pair_form_trig(
    p: u64,
    a: i64,
    b: i64,
    c: i64,
    class: &ClassData,
    tol: f64,
) -> Result<Verdict, TrigError> {
    require_odd_prime(p, 5)?;
    require_class(p, class)?;
    let product = a as i128 * c as i128 * (a as i128 + b as i128 + c as i128);
    if product.rem_euclid(p as i128) == 0 {
        return Err(TrigError::Precondition(format!(
            "requires p to divide none of a, c, a+b+c (a={a} b={b} c={c} p={p})"
        )));
    }
    let delta = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    let ld = legendre(delta.rem_euclid(p as i128) as i64, p);
    let two_p = 2 * p as i128;

    let mut m_sum: i128 = 0;
    let mut sin_acc = ProductAcc::new();
    let mut cos_acc = ProductAcc::new();
    for j in 1..p as i128 {
        for k in j + 1..p as i128 {
            let v = a as i128 * j * j + b as i128 * j * k + c as i128 * k * k;
            cos_acc.push(cos_signed(v.rem_euclid(two_p), p));
            if v.rem_euclid(p as i128) == 0 {
                m_sum += v;
            } else {
                sin_acc.push(sin_signed(v.rem_euclid(two_p), p));
            }
        }
    }
    let n_kept = sin_acc.factors;
    let n_all = cos_acc.factors;
    let mut sin_prod = sin_acc.finish();
    let mut cos_prod = cos_acc.finish();
    sin_prod.sign *= psign(m_sum);
    let lnp = (p as f64).ln();
    sin_prod.log_mag += ((p - 1) as f64 * LN_2 - lnp) * ((p as f64 - 3.0 - ld as f64) / 2.0);
    cos_prod.log_mag += (p - 1) as f64 * (p as f64 - 3.0 - ld as f64) / 2.0 * LN_2;

    let (want_sin, want_cos) = if p % 4 == 1 {
        let (h, le) = wide_data(p, class)?;
        let leg2 = i64::from(legendre(2, p));
        let e_mix = (1 - p as i128 + p as i128 * (ld as i128) * (ld as i128))
            * legendre(a, p) as i128
            + legendre(c, p) as i128
            + legendre(a + b + c, p) as i128;
        let quarter = ((p - 1) / 4) as i128;
        (
            SignedLog {
                sign: psign((b as i128 + ld as i128) * quarter),
                log_mag: h as f64 * le * e_mix as f64,
            },
            SignedLog {
                sign: psign(b as i128 * quarter),
                log_mag: h as f64 * le * (leg2 - 1) as f64 * e_mix as f64,
            },
        )
    } else {
        let quarter_down = ((p - 3) / 4) as i128;
        let quarter_up = ((p + 1) / 4) as i128;
        let ws_sin = if ld == 0 {
            psign(a as i128 + b as i128 * quarter_down)
                * legendre(a, p)
                * legendre(a + b + c, p)
        } else {
            let hm = narrow_h(p, class)?;
            psign(a as i128 + (b as i128 - 1) * quarter_down + ((hm + 1) / 2) as i128)
                * legendre(a, p)
                * legendre(c, p)
                * legendre(a + b + c, p)
                * ld
        };
        let ws_cos = psign(a as i128 + b as i128 * quarter_down + ld as i128 * quarter_up);
        (
            SignedLog { sign: ws_sin, log_mag: 0.0 },
            SignedLog { sign: ws_cos, log_mag: 0.0 },
        )
    };

    let pass = sin_prod.approx_eq(&want_sin, n_kept, tol)
        && cos_prod.approx_eq(&want_cos, n_all, tol);
    Ok(Verdict::new(
        "pair_form_trig",
        p,
        format!("a={a} b={b} c={c} m={m_sum}"),
        pass,
        format!("sin={} cos={}", sin_prod.render(), cos_prod.render()),
        format!("sin={} cos={}", want_sin.render(), want_cos.render()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{least_nonresidue, sieve_primes};
    use crate::classfield::ClassCache;

    const TOL: f64 = DEFAULT_TOLERANCE;

    #[test]
    fn slog_basics() {
        // sin(π/4)·sin(π/2) = √2/2.
        let s = slog_product(ProductKind::Sin, [(1, 4), (1, 2)]).unwrap();
        assert_eq!(s.sign, 1);
        assert!((s.log_mag - (0.5f64.sqrt()).ln()).abs() < 1e-14);
        // Empty product is one.
        let e = slog_product(ProductKind::Sin, []).unwrap();
        assert_eq!(e, SignedLog::one());
        // cos(π/2) = 0, absorbing.
        let z = slog_product(ProductKind::Cos, [(1, 2), (1, 3)]).unwrap();
        assert!(z.is_zero());
        // Signs by quadrant: sin(π·5/4) < 0, cos(π·2/3) < 0.
        assert_eq!(slog_product(ProductKind::Sin, [(5, 4)]).unwrap().sign, -1);
        assert_eq!(slog_product(ProductKind::Cos, [(2, 3)]).unwrap().sign, -1);
        assert_eq!(slog_product(ProductKind::Cos, [(-2, 3)]).unwrap().sign, -1);
        // csc pole is an error.
        assert_eq!(
            slog_product(ProductKind::Csc, [(3, 3)]),
            Err(TrigError::Pole { num: 3, den: 3 })
        );
        assert_eq!(
            slog_product(ProductKind::Sin, [(1, 0)]),
            Err(TrigError::ZeroDenominator)
        );
    }

    #[test]
    fn slog_pair_basics() {
        // cot(π/6) - cot(π/3) = √3 - 1/√3 = 2/√3.
        let d = slog_pair_product(PairProductKind::CotDifference, [((1, 6), (1, 3))]).unwrap();
        assert_eq!(d.sign, 1);
        assert!((d.log_mag - (2.0 / 3.0f64.sqrt()).ln()).abs() < 1e-14);
        // cot(π/4) + cot(π/4) = 2.
        let s = slog_pair_product(PairProductKind::CotSum, [((1, 4), (1, 4))]).unwrap();
        assert_eq!(s.sign, 1);
        assert!((s.log_mag - 2.0f64.ln()).abs() < 1e-14);
        // Equal angles make a cot-difference factor exactly zero (not a pole).
        let z = slog_pair_product(PairProductKind::CotDifference, [((1, 5), (1, 5))]).unwrap();
        assert!(z.is_zero());
        // A pole in either slot errors.
        assert!(slog_pair_product(PairProductKind::CotSum, [((2, 2), (1, 3))]).is_err());
    }

    #[test]
    fn float_sign_agrees_on_small_products() {
        // The integer sign path must match a naive float product where the
        // latter is trustworthy.
        for p in [5u64, 7, 11, 13] {
            let angles: Vec<(i64, u64)> = (1..3 * p as i64).map(|n| (n * 7 - 4, p)).collect();
            for kind in [ProductKind::Sin, ProductKind::Cos] {
                let slog = slog_product(kind, angles.iter().copied()).unwrap();
                let mut naive = 1.0f64;
                for &(n, d) in &angles {
                    let x = PI * n as f64 / d as f64;
                    naive *= match kind {
                        ProductKind::Sin => x.sin(),
                        ProductKind::Cos => x.cos(),
                        ProductKind::Csc => unreachable!(),
                    };
                }
                if naive.abs() > 1e-10 {
                    assert_eq!(slog.sign as f64, naive.signum(), "p={p} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let mut angles: Vec<(i64, u64)> = (1..2000u64)
            .map(|i| ((i * 2654435761 % 4093) as i64 + 1, 4099))
            .collect();
        let fwd = slog_product(ProductKind::Sin, angles.iter().copied()).unwrap();
        angles.reverse();
        let rev = slog_product(ProductKind::Sin, angles.iter().copied()).unwrap();
        // Deterministic shuffle.
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in (1..angles.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            angles.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuf = slog_product(ProductKind::Sin, angles.iter().copied()).unwrap();
        assert_eq!(fwd.sign, rev.sign);
        assert_eq!(fwd.sign, shuf.sign);
        assert!((fwd.log_mag - rev.log_mag).abs() < 1e-12);
        assert!((fwd.log_mag - shuf.log_mag).abs() < 1e-12);
    }

    #[test]
    fn half_square_products_sweep() {
        let cache = ClassCache::new();
        for p in sieve_primes(5, 199, None) {
            let data = cache.get(p).unwrap();
            let nr = least_nonresidue(p).unwrap() as i64;
            for a in [1, nr, p as i64 + 1, 2 * p as i64 + 3] {
                if a % p as i64 == 0 {
                    continue;
                }
                let v = verify_half_square_trig(p, a, &data, TOL).unwrap();
                assert!(v.pass, "p={p} a={a}: {} vs {}", v.lhs, v.rhs);
            }
        }
        assert!(matches!(
            verify_half_square_trig(3, 1, &cache.get(3).unwrap(), TOL),
            Err(TrigError::PrimeTooSmall { .. })
        ));
    }

    #[test]
    fn square_diff_products_sweep() {
        let cache = ClassCache::new();
        for p in sieve_primes(3, 199, None) {
            let data = cache.get(p).unwrap();
            let nr = if p > 3 { least_nonresidue(p).unwrap() as i64 } else { 2 };
            for a in [1, nr] {
                let v = verify_square_diff_trig(p, a, &data, TOL).unwrap();
                assert!(v.pass, "p={p} a={a}: {} vs {}", v.lhs, v.rhs);
                if p % 4 == 1 {
                    assert!(v.observed_sign.is_some(), "p={p}");
                } else {
                    assert!(v.observed_sign.is_none(), "p={p}");
                }
            }
        }
    }

    #[test]
    fn square_diff_small_prime_trivial() {
        // Empty product at p = 3: both forms are exactly 1.
        let cache = ClassCache::new();
        let v = verify_square_diff_trig(3, 1, &cache.get(3).unwrap(), TOL).unwrap();
        assert!(v.pass);
        assert!(v.lhs.contains("+exp(0)"), "{}", v.lhs);
    }

    #[test]
    fn pair_cos_products_sweep() {
        let cache = ClassCache::new();
        for p in sieve_primes(3, 199, None) {
            let data = cache.get(p).unwrap();
            let nr = if p > 3 { least_nonresidue(p).unwrap() as i64 } else { 2 };
            for a in [1, nr] {
                let v = verify_pair_cos_product(p, a, &data, TOL).unwrap();
                assert!(v.pass, "p={p} a={a}: {} vs {}", v.lhs, v.rhs);
            }
        }
        // Exponent-vanishing spot check: (2/17) = 1 so the magnitude is 1.
        let v = verify_pair_cos_product(17, 1, &cache.get(17).unwrap(), TOL).unwrap();
        assert!(v.pass && v.rhs.ends_with("exp(0)"), "{}", v.rhs);
    }

    #[test]
    fn square_sum_products_sweep() {
        let cache = ClassCache::new();
        for p in sieve_primes(3, 149, None) {
            let data = cache.get(p).unwrap();
            let nr = if p > 3 { least_nonresidue(p).unwrap() as i64 } else { 2 };
            for a in [1, nr] {
                let v = verify_square_sum_trig(p, a, &data, TOL).unwrap();
                assert!(v.pass, "p={p} a={a}: {} vs {}", v.lhs, v.rhs);
            }
        }
        // Overflow-count parity anchors.
        assert_eq!(psign(count_square_pair_overflows(11, 1).unwrap() as i128), -1);
        assert_eq!(psign(count_square_pair_overflows(13, 1).unwrap() as i128), 1);
    }

    #[test]
    fn pair_form_products_sweep() {
        let cache = ClassCache::new();
        for p in sieve_primes(5, 61, None) {
            let data = cache.get(p).unwrap();
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    for c in -2i64..=2 {
                        let pre = a * c * (a + b + c);
                        if pre.rem_euclid(p as i64) == 0 {
                            assert!(verify_pair_form_trig(p, a, b, c, &data, TOL).is_err());
                            continue;
                        }
                        let v = verify_pair_form_trig(p, a, b, c, &data, TOL).unwrap();
                        assert!(v.pass, "p={p} ({a},{b},{c}): {} vs {}", v.lhs, v.rhs);
                    }
                }
            }
        }
        // Inert-discriminant anchor: no divisible pairs, so m = 0.
        let v = verify_pair_form_trig(7, 1, 0, 1, &cache.get(7).unwrap(), TOL).unwrap();
        assert!(v.pass && v.params.contains("m=0"), "{}", v.params);
        assert!(matches!(
            verify_pair_form_trig(3, 1, 0, 1, &cache.get(3).unwrap(), TOL),
            Err(TrigError::PrimeTooSmall { .. })
        ));
    }

    #[test]
    fn cyclo_shadow_agreement() {
        // The numeric half-range sine product matches the modulus of the
        // exact ring product ∏(1-ζ^{a·k²}).
        use crate::cyclo::CycloElem;
        for (p, a) in [(13u64, 1i64), (19, 1), (31, 3), (61, 1)] {
            let mut elem = CycloElem::from_int(p, 1).unwrap();
            let mut angles = Vec::new();
            for k in 1..=(p - 1) / 2 {
                let e = (a as u64 % p) * (k * k % p) % p;
                elem = elem.mul_one_minus_zeta(e as i64);
                angles.push((e as i64, p));
            }
            let (re, im) = elem.eval_complex();
            let modulus = (re * re + im * im).sqrt();
            let slog = slog_product(ProductKind::Sin, angles).unwrap();
            let scaled = slog.log_mag + ((p - 1) / 2) as f64 * LN_2;
            assert!(
                (scaled - modulus.ln()).abs() < 1e-9,
                "p={p} a={a}: {} vs {}",
                scaled,
                modulus.ln()
            );
        }
    }
}
