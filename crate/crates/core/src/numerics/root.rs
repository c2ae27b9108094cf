//! Isolated real roots of expansion equations `1 = sum c_i z^-i`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Round};
use super::poly::RatPoly;
use super::scalar::{RootDef, Scalar, DEFAULT_PRECISION};
use crate::error::{Error, Result};

/// A certified real root `> 1` of an expansion polynomial.
#[derive(Clone, Debug)]
pub struct PolyRoot {
    coefficients: Vec<BigRational>,
    def: Arc<RootDef>,
    refined: Scalar,
}

/// `z^m - sum_{i<=m} c_i z^(m-i)`: the expansion equation with denominators cleared.
pub fn expansion_polynomial(coefficients: &[BigRational]) -> RatPoly {
    let m = coefficients.len();
    let mut c = vec![BigRational::zero(); m + 1];
    c[m] = BigRational::one();
    for (i, ci) in coefficients.iter().enumerate() {
        // c_{i+1} multiplies z^(m-i-1)
        c[m - i - 1] = -ci.clone();
    }
    RatPoly::new(c)
}

/// Isolates the root of `1 = sum c_i z^-i` in `search`.
///
/// The map `z -> sum c_i z^-i` must be strictly monotone on `search`; for
/// nonnegative coefficients this holds on all of `(0, inf)`.
pub fn isolate_root(coefficients: &[BigRational], search: (BigRational, BigRational)) -> Result<PolyRoot> {
    if coefficients.is_empty() {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    let poly = expansion_polynomial(coefficients);
    let mut root = isolate_root_of(poly, search)?;
    root.coefficients = coefficients.to_vec();
    Ok(root)
}

/// Isolates the unique root of an arbitrary polynomial on `search`, given a
/// strict sign change there.
pub fn isolate_root_of(poly: RatPoly, search: (BigRational, BigRational)) -> Result<PolyRoot> {
    let (a, b) = search;
    if a >= b {
        return Err(Error::InvalidInput("search interval is empty".into()));
    }
    let fa = poly.eval_rational(&a);
    let fb = poly.eval_rational(&b);
    let one = BigRational::one();
    let exact = |z: &BigRational| -> Result<PolyRoot> {
        if *z <= one {
            return Err(Error::DegenerateApproximant);
        }
        let def = Arc::new(RootDef { poly: poly.clone(), search: (z.clone(), z.clone()), sign_left: -1 });
        let refined = point_scalar(z, def.clone());
        Ok(PolyRoot { coefficients: Vec::new(), def, refined })
    };
    if poly.degree() == Some(1) {
        let c = poly.coeffs();
        let z = -&c[0] / &c[1];
        if z < a || z > b {
            return Err(Error::NoRoot);
        }
        return exact(&z);
    }
    if fa.is_zero() {
        return exact(&a);
    }
    if fb.is_zero() {
        return exact(&b);
    }
    if fa.is_positive() == fb.is_positive() {
        return Err(Error::NoRoot);
    }
    let sign_left = if fa.is_positive() { 1 } else { -1 };
    let def = Arc::new(RootDef { poly, search: (a.clone(), b.clone()), sign_left });
    let lo = Dyadic::from_rational(&a, 64, Round::Down);
    let hi = Dyadic::from_rational(&b, 64, Round::Up);
    let coarse = Scalar::with_root(lo, hi, DEFAULT_PRECISION, def.clone());
    let refined = coarse.refine(DEFAULT_PRECISION)?;
    if refined.hi().to_rational() <= one {
        return Err(Error::DegenerateApproximant);
    }
    if refined.lo().to_rational() <= one {
        // root sits in (lo, hi] with lo <= 1: decide with the exact sign at 1
        let s1 = def.poly.eval_rational(&one);
        if s1.is_zero() || (if s1.is_positive() { 1 } else { -1 }) != def.sign_left {
            return Err(Error::DegenerateApproximant);
        }
    }
    Ok(PolyRoot { coefficients: Vec::new(), def, refined })
}

fn point_scalar(z: &BigRational, def: Arc<RootDef>) -> Scalar {
    match Dyadic::try_from_rational(z) {
        Some(d) => Scalar::with_root(d.clone(), d, DEFAULT_PRECISION, def),
        None => {
            let s = Scalar::from_rational(z);
            Scalar::with_root(s.lo().clone(), s.hi().clone(), DEFAULT_PRECISION, def)
        }
    }
}

impl PolyRoot {
    /// A root known exactly, e.g. an integer base.
    pub fn exact_integer(b: u32) -> PolyRoot {
        let coeffs = vec![BigRational::from_integer(BigInt::from(b))];
        isolate_root(&coeffs, (BigRational::one(), BigRational::from_integer(BigInt::from(b) + 1)))
            .expect("integer base > 1")
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn polynomial(&self) -> &RatPoly {
        &self.def.poly
    }

    pub fn bracket(&self) -> (&BigRational, &BigRational) {
        (&self.def.search.0, &self.def.search.1)
    }

    pub fn def(&self) -> &Arc<RootDef> {
        &self.def
    }

    pub fn value(&self) -> &Scalar {
        &self.refined
    }

    /// Exact value when the root is rational and was hit exactly.
    pub fn exact_rational(&self) -> Option<BigRational> {
        if self.def.search.0 == self.def.search.1 {
            return Some(self.def.search.0.clone());
        }
        if self.refined.is_point() {
            return Some(self.refined.lo().to_rational());
        }
        // a linear polynomial has a rational root
        if self.def.poly.degree() == Some(1) {
            let c = self.def.poly.coeffs();
            return Some(-&c[0] / &c[1]);
        }
        None
    }

    pub fn refine(&self, target_bits: u32) -> Result<Scalar> {
        self.refined.refine(target_bits)
    }

    /// Residual `1 - sum c_i r^-i` evaluated on the certified enclosure.
    pub fn residual(&self, prec: u32) -> Result<Scalar> {
        let r = self.refined.clone();
        let inv = r.recip(prec)?;
        let mut acc = Scalar::from_int(0);
        let mut p = Scalar::from_int(1);
        for c in &self.coefficients {
            p = p.mul(&inv, prec);
            acc = acc.add(&p.mul(&Scalar::from_rational_prec(c, prec), prec), prec);
        }
        Ok(Scalar::from_int(1).sub(&acc, prec))
    }
}

/// Search interval `(1, 1 + sum |c_i|)` for an expansion equation.
pub fn default_search(coefficients: &[BigRational]) -> (BigRational, BigRational) {
    let s = coefficients.iter().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a + b);
    (BigRational::one(), BigRational::one() + s.max(BigRational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn golden_ratio() {
        let r = isolate_root(&ints(&[1, 1]), (q(1, 1), q(2, 1))).unwrap();
        let v = r.value();
        assert!(v.lo_f64() <= 1.618033988749895 && v.hi_f64() >= 1.6180339887498947);
        assert!(v.width_log2() <= -256);
    }

    #[test]
    fn narayana_root() {
        let r = isolate_root(&ints(&[1, 0, 1]), (q(1, 1), q(2, 1))).unwrap();
        assert!((r.value().mid_f64() - 1.465571231876768).abs() < 1e-14);
    }

    #[test]
    fn root_at_one_is_degenerate() {
        assert_eq!(isolate_root(&ints(&[1]), (q(1, 1), q(2, 1))).unwrap_err(), Error::DegenerateApproximant);
    }

    #[test]
    fn no_sign_change() {
        assert_eq!(isolate_root(&ints(&[1, 1]), (q(2, 1), q(3, 1))).unwrap_err(), Error::NoRoot);
    }

    #[test]
    fn integer_root_is_exact() {
        let r = PolyRoot::exact_integer(3);
        assert!(r.value().is_point());
        assert_eq!(r.exact_rational(), Some(q(3, 1)));
    }

    #[test]
    fn residual_is_tiny() {
        let r = isolate_root(&ints(&[1, 1, 1]), (q(1, 1), q(2, 1))).unwrap();
        let res = r.residual(300).unwrap();
        assert!(res.contains_zero());
        assert!(res.width_log2() < -240);
    }
}
