//! Certified arbitrary-precision arithmetic: dyadic intervals, rational
//! polynomials, isolated roots and exact arithmetic in `Q(beta)`.

mod dyadic;
mod field;
mod poly;
mod root;
mod scalar;

pub use dyadic::{Dyadic, Round};
pub use field::{NumberField, MAX_PRECISION_BITS};
pub use poly::RatPoly;
pub use root::{default_search, expansion_polynomial, isolate_root, isolate_root_of, PolyRoot};
pub use scalar::{Certified, RootDef, Scalar, Source, DEFAULT_PRECISION};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Parses `p`, `p/q` or a finite decimal `a.b` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let m: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(m, den);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Compact rendering of a rational: `3` or `5/21`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
