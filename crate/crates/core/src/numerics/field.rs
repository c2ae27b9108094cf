//! Exact arithmetic in `Q(beta)` for a certified algebraic `beta`.
//!
//! Elements are polynomials in `beta` reduced modulo a square-free polynomial
//! vanishing at `beta`. Signs and floors are decided by interval evaluation at
//! escalating precision; an exact zero is recognised through a gcd split of the
//! modulus, so ties at integer boundaries never loop forever.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use parking_lot::Mutex;

use super::poly::RatPoly;
use super::root::PolyRoot;
use super::scalar::{Certified, Scalar};
use crate::error::{Error, Result};

/// Hard ceiling for precision escalation.
pub const MAX_PRECISION_BITS: u32 = 1 << 20;

pub struct NumberField {
    modulus: RatPoly,
    root: PolyRoot,
    log2_bound: u32,
    cache: Mutex<Scalar>,
}

impl std::fmt::Debug for NumberField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NumberField({:?}, beta≈{})", self.modulus, self.root.value())
    }
}

impl NumberField {
    pub fn new(root: PolyRoot) -> NumberField {
        let modulus = root.polynomial().squarefree();
        let hi = root.value().hi_f64().max(1.0);
        let log2_bound = hi.log2().ceil().max(0.0) as u32 + 1;
        let cache = Mutex::new(root.value().clone());
        NumberField { modulus, root, log2_bound, cache }
    }

    pub fn modulus(&self) -> &RatPoly {
        &self.modulus
    }

    pub fn root(&self) -> &PolyRoot {
        &self.root
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    /// Enclosure of `beta` with absolute width at most `2^-bits`.
    pub fn beta(&self, bits: u32) -> Result<Scalar> {
        let mut guard = self.cache.lock();
        if guard.width_log2() <= -(bits as i64) {
            return Ok(guard.clone());
        }
        let r = guard.refine(bits)?;
        *guard = r.clone();
        Ok(r)
    }

    pub fn reduce(&self, a: &RatPoly) -> RatPoly {
        if a.degree().unwrap_or(0) < self.degree() {
            a.clone()
        } else {
            a.rem(&self.modulus)
        }
    }

    pub fn from_rational(&self, q: BigRational) -> RatPoly {
        RatPoly::constant(q)
    }

    pub fn from_int(&self, k: i64) -> RatPoly {
        RatPoly::constant(BigRational::from_integer(k.into()))
    }

    pub fn generator(&self) -> RatPoly {
        self.reduce(&RatPoly::x())
    }

    pub fn mul(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.reduce(&a.mul(b))
    }

    /// `beta * a`.
    pub fn mul_gen(&self, a: &RatPoly) -> RatPoly {
        self.reduce(&a.shift(1))
    }

    /// `beta^k` for `k >= 0`.
    pub fn gen_pow(&self, k: usize) -> RatPoly {
        let mut acc = RatPoly::constant(BigRational::one());
        for _ in 0..k {
            acc = self.mul_gen(&acc);
        }
        acc
    }

    fn precision_for(&self, a: &RatPoly, target_bits: u32) -> (u32, u32) {
        let deg = a.degree().unwrap_or(0) as u32;
        let h = a.height_bits() as u32 * 2;
        let slack = h + deg * (self.log2_bound + 1) + 16;
        (target_bits + slack, target_bits + slack + 16)
    }

    /// Interval value of `a` with absolute accuracy about `2^-target_bits`.
    pub fn eval(&self, a: &RatPoly, target_bits: u32) -> Result<Scalar> {
        let (beta_bits, prec) = self.precision_for(a, target_bits);
        let b = self.beta(beta_bits)?;
        Ok(a.eval_scalar(&b, prec))
    }

    /// Exact zero test.
    pub fn is_zero(&self, a: &RatPoly) -> Result<bool> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Ok(true);
        }
        let g = a.gcd(&self.modulus);
        if g.degree().unwrap_or(0) == 0 {
            return Ok(false);
        }
        // modulus = g * h with beta a simple root of exactly one factor
        let h = self.modulus.div_rem(&g).0;
        let mut bits = 64;
        while bits <= MAX_PRECISION_BITS {
            let gv = self.eval(&g, bits)?;
            if !gv.contains_zero() {
                return Ok(false);
            }
            let hv = self.eval(&h, bits)?;
            if !hv.contains_zero() {
                return Ok(true);
            }
            bits *= 2;
        }
        Err(Error::PrecisionExhausted("zero test did not separate the factors".into()))
    }

    /// Certified sign of `a`.
    pub fn sign(&self, a: &RatPoly) -> Result<i32> {
        let mut bits = 64;
        while bits <= MAX_PRECISION_BITS {
            let v = self.eval(a, bits)?;
            match v.compare_with_certification(&BigRational::zero()) {
                Certified::Less => return Ok(-1),
                Certified::Greater => return Ok(1),
                Certified::Unresolved => {
                    if self.is_zero(a)? {
                        return Ok(0);
                    }
                }
            }
            bits *= 2;
        }
        Err(Error::PrecisionExhausted("sign undecided".into()))
    }

    /// Exact `floor(a)`.
    pub fn floor(&self, a: &RatPoly) -> Result<BigInt> {
        if a.degree().unwrap_or(0) == 0 {
            return Ok(a.coeff(0).floor().to_integer());
        }
        let mut bits = 64;
        while bits <= MAX_PRECISION_BITS {
            let v = self.eval(a, bits)?;
            let k = v.lo().floor();
            let k1 = BigRational::from_integer(&k + 1);
            if v.hi().to_rational() < k1 {
                return Ok(k);
            }
            let k2 = BigRational::from_integer(&k + 2);
            if v.hi().to_rational() < k2 {
                // straddles k+1: exact when a == k+1, otherwise refine
                let diff = a.sub(&RatPoly::constant(k1.clone()));
                if self.is_zero(&diff)? {
                    return Ok(k + 1);
                }
            }
            bits *= 2;
        }
        Err(Error::PrecisionExhausted("floor undecided".into()))
    }

    pub fn cmp(&self, a: &RatPoly, b: &RatPoly) -> Result<std::cmp::Ordering> {
        Ok(self.sign(&a.sub(b))?.cmp(&0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::root::isolate_root;

    fn golden() -> NumberField {
        let c = vec![BigRational::one(), BigRational::one()];
        NumberField::new(isolate_root(&c, (BigRational::one(), BigRational::from_integer(2.into()))).unwrap())
    }

    #[test]
    fn detects_exact_integer_hits() {
        let f = golden();
        // beta^2 - beta == 1 exactly
        let b = f.generator();
        let b2 = f.mul(&b, &b);
        let e = b2.sub(&b);
        assert_eq!(f.floor(&e).unwrap(), BigInt::from(1));
        assert!(f.is_zero(&e.sub(&f.from_int(1))).unwrap());
        assert_eq!(f.floor(&b).unwrap(), BigInt::from(1));
    }

    #[test]
    fn reducible_modulus_zero_test() {
        // z^3 - z^2 - z + 1 = (z - 1)^2 (z + 1): squarefree part (z-1)(z+1); use a root-free check
        let c = vec![BigRational::one(), BigRational::one(), BigRational::one()];
        let f = NumberField::new(isolate_root(&c, (BigRational::one(), BigRational::from_integer(2.into()))).unwrap());
        let b = f.generator();
        assert!(!f.is_zero(&b).unwrap());
        assert_eq!(f.sign(&b.sub(&f.from_int(2))).unwrap(), -1);
    }
}
