//! Self-admissibility and Parry inversion: from an expansion of 1 back to its base.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numerics::{isolate_root, isolate_root_of, PolyRoot, RatPoly, Scalar};
use crate::words::UltimatelyPeriodicWord;

/// `σ^k(w) <=_lex w` for every `k >= 0`. Shifts beyond prefix plus period
/// repeat earlier ones, so the check is finite.
pub fn is_self_admissible(w: &UltimatelyPeriodicWord) -> bool {
    (1..=w.horizon()).all(|k| w.compare_shift(k) != Ordering::Greater)
}

fn rat(d: u8) -> BigRational {
    BigRational::from_integer(BigInt::from(d))
}

/// Root of `1 = sum w_i z^-i` without the self-admissibility gate.
pub(crate) fn invert_unchecked(w: &UltimatelyPeriodicWord) -> Result<PolyRoot> {
    let top = w.max_digit();
    if top == 0 {
        return Err(Error::NoRoot);
    }
    let hi = BigRational::from_integer(BigInt::from(top) + 1);
    if w.is_finite() {
        let coeffs: Vec<BigRational> = w.prefix().iter().map(|&d| rat(d)).collect();
        return isolate_root(&coeffs, (BigRational::one(), hi));
    }
    // z^a (z^p - 1) - (z^p - 1) U(z) - V(z), positive multiple of 1 - sum w_i z^-i on (1, inf)
    let a = w.prefix().len();
    let p = w.period().len();
    let zp1 = RatPoly::x().pow(p).sub(&RatPoly::constant(BigRational::one()));
    let u = RatPoly::new(w.prefix().iter().rev().map(|&d| rat(d)).collect());
    let v = RatPoly::new(w.period().iter().rev().map(|&d| rat(d)).collect());
    let f = RatPoly::x().pow(a).mul(&zp1).sub(&zp1.mul(&u)).sub(&v);
    isolate_root_of(f, (BigRational::one(), hi))
}

/// The unique `beta > 1` whose expansion of 1 (or its infinite form) is `w`.
pub fn parry_invert(w: &UltimatelyPeriodicWord) -> Result<PolyRoot> {
    if !is_self_admissible(w) {
        return Err(Error::NotSelfAdmissible);
    }
    invert_unchecked(w)
}

/// Certified bracket for a base known only through a prefix of its expansion of 1.
#[derive(Clone, Debug)]
pub struct ParryEnclosure {
    /// Root for the prefix followed by zeros.
    pub lower: PolyRoot,
    /// Root for the prefix followed by the top digit forever.
    pub upper: PolyRoot,
    pub prefix_len: usize,
}

impl ParryEnclosure {
    /// Interval hull `[lower, upper]` at the roots' current precision.
    pub fn hull(&self) -> Scalar {
        self.lower.value().hull(self.upper.value())
    }
}

/// Encloses the base whose expansion of 1 starts with `prefix` and uses digits
/// at most `top` afterwards. The value `1 = sum w_i z^-i` is monotone in the
/// tail, so zeros and `top^∞` give the two extremes.
pub fn parry_invert_prefix(prefix: &[u8], top: u8) -> Result<ParryEnclosure> {
    if prefix.iter().all(|&d| d == 0) {
        return Err(Error::NoRoot);
    }
    let lower = invert_unchecked(&UltimatelyPeriodicWord::finite(prefix))?;
    let upper = if top == 0 {
        lower.clone()
    } else {
        invert_unchecked(&UltimatelyPeriodicWord::periodic(prefix, &[top]))?
    };
    Ok(ParryEnclosure { lower, upper, prefix_len: prefix.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> UltimatelyPeriodicWord {
        UltimatelyPeriodicWord::parse(s).unwrap()
    }

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn self_admissibility_examples() {
        assert!(is_self_admissible(&w("(10)")));
        assert!(is_self_admissible(&w("11")));
        assert!(!is_self_admissible(&w("(01)")));
        assert!(is_self_admissible(&w("(2)")));
        assert!(!is_self_admissible(&w("1(2)")));
    }

    #[test]
    fn golden_from_both_forms() {
        for s in ["11", "(10)"] {
            let r = parry_invert(&w(s)).unwrap();
            assert!((r.value().mid_f64() - GOLDEN).abs() < 1e-15, "{s}");
            assert!(r.value().width_log2() <= -100);
        }
    }

    #[test]
    fn top_digit_repeated_gives_integer() {
        for b in 2u8..6 {
            let r = parry_invert(&UltimatelyPeriodicWord::periodic(&[], &[b - 1])).unwrap();
            assert_eq!(r.exact_rational(), Some(BigRational::from_integer(b.into())));
        }
    }

    #[test]
    fn rejects_non_self_admissible() {
        assert_eq!(parry_invert(&w("(01)")).unwrap_err(), Error::NotSelfAdmissible);
    }

    #[test]
    fn prefix_enclosure_brackets_golden() {
        let e = parry_invert_prefix(&[1, 0, 1, 0, 1, 0, 1, 0], 1).unwrap();
        assert!(e.lower.value().hi_f64() < GOLDEN);
        assert!(e.upper.value().lo_f64() > GOLDEN);
    }
}
