//! Shared verdict record emitted by every verification entry point.

use serde::Serialize;

/// Outcome of checking one identity instance at one parameter point.
///
/// `lhs` and `rhs` are human-readable renderings of the two sides that were
/// compared (exact residues, canonical coefficient digests, or signed
/// logarithms). They are strings so that verdicts from exact-integer,
/// big-rational and floating-point checks all serialize the same way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// Which identity inside the suite this verdict belongs to
    /// (e.g. `"sigma"`, `"part_i"`, `"6.15"`).
    pub id: String,
    /// Principal parameter: the prime `p`, odd modulus `m`, or matrix size `n`.
    pub p: u64,
    /// Remaining parameters rendered as `key=value` pairs, empty if none.
    pub params: String,
    /// Did the two sides agree?
    pub pass: bool,
    /// Rendering of the computed left-hand side.
    pub lhs: String,
    /// Rendering of the expected/right-hand side.
    pub rhs: String,
    /// The sign actually observed, for checks whose statement only pins a
    /// magnitude or leaves the sign to be reported.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_sign: Option<i8>,
}

impl Verdict {
    /// Build a passing/failing verdict from already-rendered sides.
    pub fn new(
        id: impl Into<String>,
        p: u64,
        params: impl Into<String>,
        pass: bool,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) -> Self {
        Verdict {
            id: id.into(),
            p,
            params: params.into(),
            pass,
            lhs: lhs.into(),
            rhs: rhs.into(),
            observed_sign: None,
        }
    }

    /// Attach an observed sign to the verdict.
    pub fn with_sign(mut self, sign: i8) -> Self {
        self.observed_sign = Some(sign);
        self
    }
}

/// Render a float in a fixed, locale-independent scientific format so that
/// verdict lines are byte-stable across runs and worker counts.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.12e}")
}

/// Render a sign/magnitude pair such as `-exp(12.345)`.
pub fn fmt_signed_log(sign: i8, log: f64) -> String {
    match sign {
        0 => "0".to_string(),
        s => {
            let mark = if s > 0 { '+' } else { '-' };
            format!("{mark}exp({})", fmt_f64(log))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_serializes_without_null_sign() {
        let v = Verdict::new("sigma", 7, "", true, "1", "1");
        let line = serde_json::to_string(&v).unwrap();
        assert!(!line.contains("observed_sign"));
        let v = v.with_sign(-1);
        let line = serde_json::to_string(&v).unwrap();
        assert!(line.contains("\"observed_sign\":-1"));
    }

    #[test]
    fn float_format_is_stable() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.5), "1.500000000000e0");
        assert_eq!(fmt_signed_log(-1, 2.0), "-exp(2.000000000000e0)");
        assert_eq!(fmt_signed_log(0, f64::NEG_INFINITY), "0");
    }
}
