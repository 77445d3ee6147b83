//! B-file export: one `"index value"` line per term, indexed from 1, in the
//! style used by the On-Line Encyclopedia of Integer Sequences.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::runner::{ordered_parallel_map, CliError};
use qres_core::arith::sieve_primes;
use qres_core::classfield;
use qres_core::perms;

/// An exportable integer sequence, selected by its fixed token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sequence {
    /// `s_p`: inversion count of the half-range square list, over odd primes.
    SquareInversions,
    /// `t_p`: wide-difference pair count of the square list, over odd primes.
    SquareWideGaps,
    /// `sign_sp`: the sign `(-1)^{s(p)}`, over odd primes.
    SquareSign,
    /// `h_minus`: class number attached to `-p`, over primes `p ≡ 3 (mod 4)`.
    NarrowClassNumber,
}

impl Sequence {
    pub fn parse(tok: &str) -> Result<Sequence, String> {
        Ok(match tok {
            "s_p" => Sequence::SquareInversions,
            "t_p" => Sequence::SquareWideGaps,
            "sign_sp" => Sequence::SquareSign,
            "h_minus" => Sequence::NarrowClassNumber,
            other => {
                return Err(format!(
                    "unknown sequence '{other}' (expected s_p, t_p, sign_sp, or h_minus)"
                ))
            }
        })
    }
}

fn value(seq: Sequence, p: u64) -> Result<i64, String> {
    match seq {
        Sequence::SquareInversions => perms::square_list_stats(p)
            .map(|s| s.s as i64)
            .map_err(|e| e.to_string()),
        Sequence::SquareWideGaps => perms::square_list_stats(p)
            .map(|s| s.t as i64)
            .map_err(|e| e.to_string()),
        Sequence::SquareSign => perms::square_list_stats(p)
            .map(|s| s.sign as i64)
            .map_err(|e| e.to_string()),
        Sequence::NarrowClassNumber => classfield::h_minus_weighted_sum(p)
            .map(|h| h as i64)
            .map_err(|e| e.to_string()),
    }
}

/// Write the sequence over its qualifying primes in `[from, to]` to `path`.
/// Lines are `"index value"` with the index starting at 1; the file ends
/// with a newline (or is empty when the range holds no terms). Returns the
/// number of terms written.
pub fn export(
    seq: Sequence,
    from: u64,
    to: u64,
    path: &Path,
    jobs: usize,
) -> Result<usize, CliError> {
    let lo = from.max(3);
    let primes = match seq {
        Sequence::NarrowClassNumber => sieve_primes(lo, to, Some((4, 3))),
        _ => sieve_primes(lo, to, None),
    };
    let values = ordered_parallel_map(&primes, jobs, |p| value(seq, p));
    let mut text = String::new();
    for (i, v) in values.into_iter().enumerate() {
        let v = v.map_err(|e| {
            CliError::Io(format!("computing the entry for p={}: {e}", primes[i]))
        })?;
        writeln!(text, "{} {v}", i + 1).expect("string write");
    }
    fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(primes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_tokens_parse() {
        assert_eq!(Sequence::parse("s_p").unwrap(), Sequence::SquareInversions);
        assert_eq!(Sequence::parse("t_p").unwrap(), Sequence::SquareWideGaps);
        assert_eq!(Sequence::parse("sign_sp").unwrap(), Sequence::SquareSign);
        assert_eq!(
            Sequence::parse("h_minus").unwrap(),
            Sequence::NarrowClassNumber
        );
        assert!(Sequence::parse("u_p").is_err());
    }

    #[test]
    fn first_values_match_the_pinned_terms() {
        assert_eq!(value(Sequence::SquareInversions, 3).unwrap(), 0);
        assert_eq!(value(Sequence::SquareInversions, 11).unwrap(), 4);
        assert_eq!(value(Sequence::SquareWideGaps, 11).unwrap(), 4);
        assert_eq!(value(Sequence::SquareSign, 11).unwrap(), 1);
        assert_eq!(value(Sequence::NarrowClassNumber, 3).unwrap(), 1);
        assert_eq!(value(Sequence::NarrowClassNumber, 7).unwrap(), 1);
        assert_eq!(value(Sequence::NarrowClassNumber, 11).unwrap(), 1);
        assert_eq!(value(Sequence::NarrowClassNumber, 23).unwrap(), 3);
    }
}
