//! Exact asymptotic expansions near conical singularities.

pub mod expansion;
pub mod json;
pub mod poly;
pub mod series;
pub mod solve;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use expansion::{case_label, formal_expansion, max_order, solve_biharmonic, verify_residual, CaseLabel, Expansion};
pub use poly::HomPoly;
pub use series::{biharmonic, laplacian, LogRadialTerm, LogSeries};
pub use solve::{eigen_table, linear_residual, EigenTable};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Formats as "num/den", or just "num" for integers.
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses "a/b", "a" or an exact decimal such as "-0.25".
pub fn parse_rational(s: &str) -> Result<Q, ExpansionError> {
    let s = s.trim();
    let bad = || ExpansionError::Parse(format!("not a rational number: {s:?}"));
    let int = |t: &str| -> Result<BigInt, ExpansionError> {
        if t.is_empty() || t.starts_with('+') && t.len() == 1 {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    if let Some((n, d)) = s.split_once('/') {
        let d = int(d.trim())?;
        if d.is_zero() {
            return Err(ExpansionError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(int(n.trim())?, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w = match whole.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            t => int(t)?,
        };
        let f = int(frac)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Q::new(w * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    Ok(Q::from_integer(int(s)?))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("resonance: degree {degree}, component {j} (eigenvalue {eigenvalue}) meets shift {shift}")]
    Resonance { degree: u32, j: u32, eigenvalue: Q, shift: Q },
    #[error("out of scope: {0}")]
    Scope(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ExpansionError {
    /// True for errors caused by the mathematical input rather than a defect.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Self::Internal(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-.5").unwrap(), q(-1, 2));
        for s in ["", "1/0", "a", "1.", "1.2.3", "1/x", "-"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_round_trip() {
        for v in [q(1, 45), q(-7, 3), q(4, 1), q(0, 1)] {
            assert_eq!(parse_rational(&fmt_q(&v)).unwrap(), v);
        }
        assert_eq!(fmt_q(&q(6, 3)), "2");
    }
}
