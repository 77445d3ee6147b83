//! Suite dispatch: which parameters each suite visits, which parameters are
//! recorded as skipped, and the merged verdict computed at each parameter.
//!
//! Every suite is a pure function of its parameter and options, so runs are
//! reproducible regardless of worker count or interruption history.

use qres_core::arith::{least_nonresidue, residue, sieve_primes};
use qres_core::classfield::{self, ClassData, ClassError};
use qres_core::congr::{self, FormProductPart, QuadFormSpec};
use qres_core::conjectures::{
    check_cos_product_sign, check_cube_distribution, check_parity_conjecture,
    check_residue_determinants, ConjError, ConjVerdict, CubeMode, ParityConjecture,
};
use qres_core::cyclo::{self, CycloError};
use qres_core::perms;
use qres_core::report::Verdict;
use qres_core::trigeval::{self, TrigError};

/// Default relative tolerance for the floating-point suites.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest prime the exact cyclotomic suite evaluates (part one).
pub const EXACT_PRODUCT_CAP: u64 = 199;
/// Largest prime the exact cyclotomic suite evaluates (parts two and three).
pub const EXACT_PAIR_CAP: u64 = 61;

/// Conjecture identifiers accepted after `conj:` or by `scan`.
pub const CONJECTURE_IDS: [&str; 8] = ["6.1", "6.2", "6.3", "6.4", "6.5", "6.6", "6.7", "6.8"];

/// A family of checks, selected on the command line by its fixed token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Suite {
    /// `thm11`: inverse-permutation signs on the units of `Z/mZ`.
    UnitInverseSigns,
    /// `thm12`: exact quadratic-form product congruences over a coefficient grid.
    FormProducts,
    /// `thm13_exact`: exact cyclotomic product identities.
    CycloProducts,
    /// `thm13_numeric`: the same product family evaluated as signed logarithms.
    HalfSquareTrig,
    /// `thm14`: square-list permutation sign law plus cosecant/cotangent products.
    SquareSignLaw,
    /// `thm15`: paired cosine products against fundamental-unit powers.
    PairCosProducts,
    /// `thm16`: square-sum sine products and the three-coefficient grid family.
    SquareSumTrig,
    /// `lemmas`: supporting counting and congruence lemmas on odd moduli.
    SupportLemmas,
    /// `mordell`: the half-factorial sign criterion.
    FactorialSign,
    /// `conj:<id>`: one scanner from the open-statement family (6.1 … 6.8).
    Conjecture(String),
}

impl Suite {
    /// Parse a suite token as accepted by `verify`.
    pub fn parse(tok: &str) -> Result<Suite, String> {
        Ok(match tok {
            "thm11" => Suite::UnitInverseSigns,
            "thm12" => Suite::FormProducts,
            "thm13_exact" => Suite::CycloProducts,
            "thm13_numeric" => Suite::HalfSquareTrig,
            "thm14" => Suite::SquareSignLaw,
            "thm15" => Suite::PairCosProducts,
            "thm16" => Suite::SquareSumTrig,
            "lemmas" => Suite::SupportLemmas,
            "mordell" => Suite::FactorialSign,
            other => match other.strip_prefix("conj:") {
                Some(id) if CONJECTURE_IDS.contains(&id) => Suite::Conjecture(id.to_string()),
                _ => {
                    return Err(format!(
                        "unknown suite '{other}' (expected thm11, thm12, thm13_exact, \
                         thm13_numeric, thm14, thm15, thm16, lemmas, mordell, or conj:<id> \
                         with <id> one of 6.1 … 6.8)"
                    ))
                }
            },
        })
    }

    /// Parse a conjecture identifier as accepted by `scan` ("6.2" or "conj:6.2").
    pub fn parse_conjecture(tok: &str) -> Result<Suite, String> {
        let id = tok.strip_prefix("conj:").unwrap_or(tok);
        if CONJECTURE_IDS.contains(&id) {
            Ok(Suite::Conjecture(id.to_string()))
        } else {
            Err(format!(
                "unknown conjecture id '{tok}' (expected one of 6.1 … 6.8, \
                 optionally prefixed with 'conj:')"
            ))
        }
    }

    /// The fixed command-line token for this suite.
    pub fn token(&self) -> String {
        match self {
            Suite::UnitInverseSigns => "thm11".into(),
            Suite::FormProducts => "thm12".into(),
            Suite::CycloProducts => "thm13_exact".into(),
            Suite::HalfSquareTrig => "thm13_numeric".into(),
            Suite::SquareSignLaw => "thm14".into(),
            Suite::PairCosProducts => "thm15".into(),
            Suite::SquareSumTrig => "thm16".into(),
            Suite::SupportLemmas => "lemmas".into(),
            Suite::FactorialSign => "mordell".into(),
            Suite::Conjecture(id) => format!("conj:{id}"),
        }
    }
}

/// Options shared by every suite run.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Multiplier values to test; `None` means the per-prime default
    /// (`1` plus the least quadratic nonresidue where relevant).
    pub a_set: Option<Vec<i64>>,
    /// Half-width of the coefficient grid for the grid-driven suites.
    pub grid: Option<i64>,
    /// Relative tolerance for floating-point comparisons.
    pub tolerance: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { a_set: None, grid: None, tolerance: DEFAULT_TOLERANCE }
    }
}

/// What happened at one parameter: a verdict, or a recorded skip.
#[derive(Debug, Clone)]
pub enum ParamOutcome {
    Checked(Verdict),
    Skipped(String),
}

/// Odd integers in `[lo, hi]`, starting no lower than 3.
fn odd_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut m = lo.max(3);
    if m % 2 == 0 {
        m += 1;
    }
    (m..=hi).step_by(2).collect()
}

/// The ordered parameter list a suite visits for the inclusive range
/// `[from, to]`. Residue-class restrictions that define a suite's domain are
/// applied here; exclusions *inside* the domain are reported by
/// [`static_skip`] instead so they appear in the run report.
pub fn enumerate_params(suite: &Suite, from: u64, to: u64) -> Vec<u64> {
    let lo = from.max(3);
    if lo > to {
        return Vec::new();
    }
    match suite {
        Suite::UnitInverseSigns | Suite::SupportLemmas => odd_range(lo, to),
        Suite::FormProducts
        | Suite::CycloProducts
        | Suite::HalfSquareTrig
        | Suite::SquareSignLaw
        | Suite::PairCosProducts
        | Suite::SquareSumTrig => sieve_primes(lo, to, None),
        Suite::FactorialSign => sieve_primes(lo, to, Some((4, 3))),
        Suite::Conjecture(id) => match id.as_str() {
            "6.1" | "6.7" => sieve_primes(lo, to, Some((4, 1))),
            "6.5" => sieve_primes(lo, to, Some((6, 5))),
            "6.8" => odd_range(lo, to),
            _ => sieve_primes(lo, to, None),
        },
    }
}

/// Parameters inside a suite's enumeration that are nonetheless excluded,
/// with the reason recorded in the run report. Must stay cheap and pure: the
/// resume path re-evaluates it to reconcile a results file with a checkpoint.
pub fn static_skip(suite: &Suite, p: u64) -> Option<String> {
    match suite {
        Suite::CycloProducts => {
            if p < 5 {
                Some("exact product identities are stated for p >= 5".into())
            } else if p > EXACT_PRODUCT_CAP {
                Some(format!(
                    "beyond the exact-evaluation cap p <= {EXACT_PRODUCT_CAP}"
                ))
            } else {
                None
            }
        }
        Suite::HalfSquareTrig if p < 5 => {
            Some("signed-log product identities are stated for p >= 5".into())
        }
        Suite::FactorialSign if p == 3 => {
            Some("half-factorial criterion is stated for primes p > 3".into())
        }
        Suite::Conjecture(id) if (id == "6.3" || id == "6.4") && p == 3 => {
            Some("stated for primes p > 3".into())
        }
        _ => None,
    }
}

/// Build a failing verdict out of an unexpected evaluation error.
fn error_verdict(p: u64, context: &str, msg: impl std::fmt::Display) -> Verdict {
    Verdict::new(
        "error",
        p,
        context.to_string(),
        false,
        format!("error: {msg}"),
        "successful evaluation".to_string(),
    )
}

/// Merge the verdicts computed at one parameter into a single record.
///
/// A single verdict passes through unchanged; several collapse to one line
/// whose failure rendering names the first failing check. An empty list
/// (every candidate check was filtered by its own domain conditions) counts
/// as a vacuous pass so the parameter is still visibly accounted for.
fn merge(p: u64, items: Vec<Verdict>) -> ParamOutcome {
    if items.len() == 1 {
        return ParamOutcome::Checked(items.into_iter().next().expect("one item"));
    }
    if items.is_empty() {
        return ParamOutcome::Checked(Verdict::new(
            "vacuous", p, "", true, "checks=0", "pass=0",
        ));
    }
    let pass = items.iter().all(|v| v.pass);
    let verdict = if pass {
        Verdict::new(
            "combined",
            p,
            "",
            true,
            format!("checks={}", items.len()),
            format!("pass={}", items.len()),
        )
    } else {
        let fails = items.iter().filter(|v| !v.pass).count();
        let first = items.iter().find(|v| !v.pass).expect("a failing item");
        Verdict::new(
            "combined",
            p,
            "",
            false,
            format!(
                "{fails} of {} checks fail; first: {}[{}] lhs={}",
                items.len(),
                first.id,
                first.params,
                first.lhs
            ),
            format!("{}[{}] rhs={}", first.id, first.params, first.rhs),
        )
    };
    ParamOutcome::Checked(verdict)
}

/// The multiplier set to test at `p`: the explicit `--a` list, or `1` plus
/// the least quadratic nonresidue when the default is requested.
fn a_set_for(p: u64, opts: &SuiteOptions, with_nonresidue: bool) -> Vec<i64> {
    match &opts.a_set {
        Some(v) => v.clone(),
        None => {
            let mut v = vec![1i64];
            if with_nonresidue {
                if let Ok(nr) = least_nonresidue(p) {
                    if nr != 1 {
                        v.push(nr as i64);
                    }
                }
            }
            v
        }
    }
}

fn conj_to_verdict(cv: ConjVerdict) -> Verdict {
    Verdict::new(
        cv.conjecture_id,
        cv.p,
        cv.params,
        cv.holds,
        cv.lhs_value,
        cv.rhs_value,
    )
}

/// Evaluate one suite at one parameter. Pure: the outcome depends only on
/// `(suite, p, opts)`.
pub fn run_param(suite: &Suite, p: u64, opts: &SuiteOptions) -> ParamOutcome {
    if let Some(reason) = static_skip(suite, p) {
        return ParamOutcome::Skipped(reason);
    }
    match suite {
        Suite::UnitInverseSigns => {
            let items = match perms::verify_unit_inverse_signs(p) {
                Ok(v) => vec![v],
                Err(e) => vec![error_verdict(p, "", e)],
            };
            merge(p, items)
        }
        Suite::FormProducts => run_form_products(p, opts),
        Suite::CycloProducts => run_cyclo_products(p, opts),
        Suite::HalfSquareTrig => run_half_square_trig(p, opts),
        Suite::SquareSignLaw => run_square_sign_law(p, opts),
        Suite::PairCosProducts => run_pair_cos(p, opts),
        Suite::SquareSumTrig => run_square_sum(p, opts),
        Suite::SupportLemmas => match congr::verify_support_lemmas(p) {
            Ok(vs) => merge(p, vs),
            Err(e) => merge(p, vec![error_verdict(p, "", e)]),
        },
        Suite::FactorialSign => {
            let items = match classfield::factorial_sign_check(p) {
                Ok(v) => vec![v],
                Err(e) => vec![error_verdict(p, "", e)],
            };
            merge(p, items)
        }
        Suite::Conjecture(id) => run_conjecture(id, p, opts),
    }
}

/// Class data for `p`, or a failing verdict explaining why it is missing.
fn class_for(p: u64) -> Result<ClassData, Verdict> {
    ClassData::for_prime(p).map_err(|e: ClassError| error_verdict(p, "class data", e))
}

fn run_form_products(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let g = opts.grid.unwrap_or(3);
    let mut items = Vec::new();
    let push = |items: &mut Vec<Verdict>, r: Result<Verdict, congr::CongrError>, ctx: &str| {
        match r {
            Ok(v) => items.push(v),
            Err(e) => items.push(error_verdict(p, ctx, e)),
        }
    };
    if p % 4 == 1 {
        match QuadFormSpec::new(p, 1, 0, 1) {
            Ok(spec) => push(
                &mut items,
                congr::verify_form_products(&spec, FormProductPart::HalfTriangleSquares),
                "half-triangle squares",
            ),
            Err(e) => items.push(error_verdict(p, "half-triangle squares", e)),
        }
    }
    push(&mut items, congr::verify_triangle_products(p), "triangle products");
    let pm = p as i128;
    for a in -g..=g {
        for b in -g..=g {
            for c in -g..=g {
                let spec = match QuadFormSpec::new(p, a, b, c) {
                    Ok(s) => s,
                    Err(e) => {
                        items.push(error_verdict(p, &format!("a={a} b={b} c={c}"), e));
                        continue;
                    }
                };
                let cs = a as i128 + b as i128 + c as i128;
                let pa = residue(a, p) == 0;
                let pb = residue(b, p) == 0;
                let pc = residue(c, p) == 0;
                if (a as i128 * c as i128 * cs).rem_euclid(pm) != 0 {
                    push(
                        &mut items,
                        congr::verify_form_products(&spec, FormProductPart::FullTriangle),
                        "full triangle",
                    );
                    if a + c == 0 {
                        push(
                            &mut items,
                            congr::verify_form_products(&spec, FormProductPart::HalfSquareGrid),
                            "half-square grid",
                        );
                    }
                } else if !pa && !pc && cs.rem_euclid(pm) == 0 {
                    push(
                        &mut items,
                        congr::verify_form_products(&spec, FormProductPart::CoeffSumDivisible),
                        "coefficient-sum divisible",
                    );
                } else if (pa || pc) && !(pa && pb && pc) {
                    push(
                        &mut items,
                        congr::verify_form_products(&spec, FormProductPart::DegenerateCoeff),
                        "degenerate coefficient",
                    );
                }
            }
        }
    }
    merge(p, items)
}

fn run_cyclo_products(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let class = match class_for(p) {
        Ok(c) => c,
        Err(v) => return merge(p, vec![v]),
    };
    let mut items = Vec::new();
    for a in a_set_for(p, opts, true) {
        match cyclo::verify_half_square_product(p, a, &class) {
            Ok(v) => items.push(v),
            Err(CycloError::MultiplierDivisible(_)) => {}
            Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
        }
        if p <= EXACT_PAIR_CAP {
            match cyclo::verify_pair_difference_product(p, a, &class) {
                Ok(v) => items.push(v),
                Err(CycloError::MultiplierDivisible(_)) => {}
                Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
            }
        }
    }
    if p <= EXACT_PAIR_CAP && p % 4 == 1 {
        match cyclo::verify_unit_product_split(p, &class) {
            Ok(v) => items.push(v),
            Err(e) => items.push(error_verdict(p, "unit product split", e)),
        }
    }
    merge(p, items)
}

fn run_half_square_trig(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let class = match class_for(p) {
        Ok(c) => c,
        Err(v) => return merge(p, vec![v]),
    };
    let mut items = Vec::new();
    for a in a_set_for(p, opts, true) {
        match trigeval::verify_half_square_trig(p, a, &class, opts.tolerance) {
            Ok(v) => items.push(v),
            Err(TrigError::MultiplierDivisible(_)) => {}
            Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
        }
    }
    merge(p, items)
}

fn run_square_sign_law(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let mut items = Vec::new();
    if p % 4 == 3 {
        match classfield::verify_square_sign_law(p) {
            Ok(v) => items.push(v),
            Err(e) => items.push(error_verdict(p, "square sign law", e)),
        }
    }
    let class = match class_for(p) {
        Ok(c) => c,
        Err(v) => {
            items.push(v);
            return merge(p, items);
        }
    };
    for a in a_set_for(p, opts, true) {
        match trigeval::verify_square_diff_trig(p, a, &class, opts.tolerance) {
            Ok(v) => items.push(v),
            Err(TrigError::MultiplierDivisible(_)) => {}
            Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
        }
    }
    merge(p, items)
}

fn run_pair_cos(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let class = match class_for(p) {
        Ok(c) => c,
        Err(v) => return merge(p, vec![v]),
    };
    let mut items = Vec::new();
    for a in a_set_for(p, opts, true) {
        match trigeval::verify_pair_cos_product(p, a, &class, opts.tolerance) {
            Ok(v) => items.push(v),
            Err(TrigError::MultiplierDivisible(_)) => {}
            Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
        }
    }
    merge(p, items)
}

fn run_square_sum(p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let class = match class_for(p) {
        Ok(c) => c,
        Err(v) => return merge(p, vec![v]),
    };
    let mut items = Vec::new();
    for a in a_set_for(p, opts, true) {
        match trigeval::verify_square_sum_trig(p, a, &class, opts.tolerance) {
            Ok(v) => items.push(v),
            Err(TrigError::MultiplierDivisible(_)) => {}
            Err(e) => items.push(error_verdict(p, &format!("a={a}"), e)),
        }
    }
    let g = opts.grid.unwrap_or(2);
    if p >= 5 {
        for a in -g..=g {
            if residue(a, p) == 0 {
                continue;
            }
            for b in -g..=g {
                for c in -g..=g {
                    match trigeval::verify_pair_form_trig(p, a, b, c, &class, opts.tolerance) {
                        Ok(v) => items.push(v),
                        Err(
                            TrigError::Precondition(_)
                            | TrigError::Pole { .. }
                            | TrigError::MultiplierDivisible(_)
                            | TrigError::ZeroDenominator
                            | TrigError::PrimeTooSmall { .. },
                        ) => {}
                        Err(e) => {
                            items.push(error_verdict(p, &format!("a={a} b={b} c={c}"), e))
                        }
                    }
                }
            }
        }
    }
    merge(p, items)
}

fn run_conjecture(id: &str, p: u64, opts: &SuiteOptions) -> ParamOutcome {
    let mut items: Vec<Verdict> = Vec::new();
    let push = |items: &mut Vec<Verdict>,
                    r: Result<ConjVerdict, ConjError>,
                    ctx: &str| match r {
        Ok(cv) => items.push(conj_to_verdict(cv)),
        Err(ConjError::MultiplierDivisible(_)) => {}
        Err(e) => items.push(error_verdict(p, ctx, e)),
    };
    match id {
        "6.1" => push(
            &mut items,
            check_parity_conjecture(p, 1, ParityConjecture::SquarePairParity),
            "",
        ),
        "6.2" => {
            for a in a_set_for(p, opts, false) {
                push(
                    &mut items,
                    check_parity_conjecture(p, a, ParityConjecture::FoldedSquareParity),
                    &format!("a={a}"),
                );
            }
        }
        "6.3" => push(
            &mut items,
            check_parity_conjecture(p, 1, ParityConjecture::TriangularParity),
            "",
        ),
        "6.4" => push(
            &mut items,
            check_parity_conjecture(p, 1, ParityConjecture::ProductTriangularParity),
            "",
        ),
        "6.5" => {
            push(&mut items, check_cube_distribution(p, CubeMode::FoldCount), "fold count");
            push(
                &mut items,
                check_cube_distribution(p, CubeMode::FullInversions),
                "inversions",
            );
            push(
                &mut items,
                check_cube_distribution(p, CubeMode::RatioReport { exponent: 3 }),
                "ratio",
            );
        }
        "6.6" => push(
            &mut items,
            check_parity_conjecture(p, 1, ParityConjecture::PowerParity),
            "",
        ),
        "6.7" => {
            let class = match class_for(p) {
                Ok(c) => c,
                Err(v) => return merge(p, vec![v]),
            };
            for a in a_set_for(p, opts, true) {
                push(
                    &mut items,
                    check_cos_product_sign(p, a, &class, opts.tolerance),
                    &format!("a={a}"),
                );
            }
        }
        "6.8" => push(&mut items, check_residue_determinants(p), ""),
        other => {
            items.push(error_verdict(p, "", format!("unknown conjecture id '{other}'")));
        }
    }
    merge(p, items)
}
