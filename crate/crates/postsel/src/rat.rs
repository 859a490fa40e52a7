//! Exact rational scalars.
//!
//! All probability and coefficient arithmetic in this crate is exact: values
//! are arbitrary-precision rationals kept in lowest terms with a positive
//! denominator.  [`Rational`] is the scalar type used everywhere; this module
//! adds the small constructors and the parsing/printing conventions shared by
//! the text formats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// `p/q` from machine integers. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// The integer `p` as a rational.
pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Binomial coefficient `C(n, k)` as a big integer (0 when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Parses `p/q` or a bare integer `p`.
///
/// Used by every text format that carries a rational; accepts an optional
/// leading sign on the numerator and requires a positive denominator after
/// normalization (enforced by the underlying representation).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 0,
        msg: format!("expected a rational `p/q` or integer, got `{s}`"),
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "zero denominator in `{s}`"
                )));
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Prints a rational as `p/q` with the denominator always explicit
/// (canonical form for the program and polynomial file formats).
pub fn fmt_slash(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// True when `r` is a probability: `0 <= r <= 1`.
pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Ceiling of log2 of a positive integer.
pub fn ceil_log2(n: &num_bigint::BigUint) -> u64 {
    use num_traits::Zero as _;
    assert!(!n.is_zero(), "ceil_log2 of zero");
    let bits = n.bits();
    if n.count_ones() == 1 {
        bits - 1 // exact power of two
    } else {
        bits
    }
}
