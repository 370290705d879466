//! Exact rational arithmetic helpers.
//!
//! Every quantity in this crate that feeds an inequality check is an exact
//! `Rational`; floating point is never used on a certified path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Rational from an integer pair. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient as a big integer (exact for any `n`, `k`).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Canonical `num/den` form: reduced, denominator positive, always explicit.
///
/// This is the wire format used by instance files, reports and the
/// triangulation export, so it must be stable byte for byte.
pub fn format_rational(r: &Rational) -> String {
    let r = r.reduced();
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    format!("{}/{}", num, den)
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("bad rational numerator in {s:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("bad rational denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(30, 3), BigInt::from(4060));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert_eq!(format_rational(&ratio(3, -6)), "-1/2");
        assert_eq!(format_rational(&rat_int(7)), "7/1");
        assert_eq!(format_rational(&rat_int(0)), "0/1");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["1/2", "-3/7", "0/1", "12345/67"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
