//! Exact rational scalars.
//!
//! Every coefficient in the crate is a [`Q`] — an arbitrary-precision
//! rational kept in reduced form by construction. Serialization uses
//! decimal-free `p/q` strings so that round-trips are bit-exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::str::FromStr;

/// The ground field: exact rationals.
pub type Q = BigRational;

/// The rational `n`.
pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// The rational `p/q`. Panics on `q == 0`.
pub fn q_ratio(p: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(den))
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}

/// Parse `"p"` or `"p/q"`.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let p = BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}"))?;
            Ok(BigRational::from_integer(p))
        }
        Some((num, den)) => {
            let p = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
            let d = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(p, d))
        }
    }
}

/// Render as `"p"` or `"p/q"` (denominator always positive).
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-7", "3/4", "-22/7"] {
            let x = parse_q(s).unwrap();
            assert_eq!(format_q(&x), s);
        }
        // reduction happens on parse
        assert_eq!(format_q(&parse_q("4/8").unwrap()), "1/2");
        assert_eq!(format_q(&parse_q("3/-6").unwrap()), "-1/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("a").is_err());
    }
}
