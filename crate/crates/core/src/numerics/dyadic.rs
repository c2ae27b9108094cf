//! Exact dyadic rationals `mantissa * 2^exponent`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for operations that cannot be exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// A dyadic rational. Always normalized: the mantissa is odd, or the value is
/// zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    if m.sign() == Sign::Minus {
        let one = BigInt::one() << s;
        -((-m + &one - 1u32) >> s)
    } else {
        m >> s
    }
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Dyadic::new(v.into(), 0)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Position of the most significant bit: `2^(msb-1) <= |x| < 2^msb`.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.mantissa.bits() as i64 + self.exponent
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Rounds to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mantissa.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.mantissa, s),
            Round::Up => -floor_shr(&-&self.mantissa, s),
        };
        Dyadic::new(m, self.exponent + s as i64)
    }

    /// Rounds to a multiple of `2^-frac_bits` in the given direction.
    pub fn round_abs(&self, frac_bits: i64, dir: Round) -> Self {
        if self.exponent >= -frac_bits {
            return self.clone();
        }
        let s = (-frac_bits - self.exponent) as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.mantissa, s),
            Round::Up => -floor_shr(&-&self.mantissa, s),
        };
        Dyadic::new(m, -frac_bits)
    }

    /// `self / other` rounded to `prec` significant bits. Panics on zero divisor.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let shift = prec as i64 + other.mantissa.bits() as i64 - self.mantissa.bits() as i64 + 2;
        let shift = shift.max(0);
        let num = &self.mantissa << shift as u64;
        let den = &other.mantissa;
        let (q, r) = num.div_mod_floor(den);
        let q = if r.is_zero() {
            q
        } else {
            match dir {
                Round::Down => q,
                Round::Up => q + 1,
            }
        };
        Dyadic::new(q, self.exponent - other.exponent - shift).round(prec, dir)
    }

    /// Dyadic approximation of a rational with `frac_bits` bits after the binary point.
    pub fn from_rational(q: &BigRational, frac_bits: i64, dir: Round) -> Self {
        let (num, den) = (q.numer(), q.denom());
        let scaled = if frac_bits >= 0 {
            num << frac_bits as u64
        } else {
            num.clone()
        };
        let den = if frac_bits >= 0 { den.clone() } else { den << (-frac_bits) as u64 };
        let (qt, r) = scaled.div_mod_floor(&den);
        let qt = if r.is_zero() {
            qt
        } else {
            match dir {
                Round::Down => qt,
                Round::Up => qt + 1,
            }
        };
        Dyadic::new(qt, -frac_bits)
    }

    /// Returns the exact value if `q` has a power-of-two denominator.
    pub fn try_from_rational(q: &BigRational) -> Option<Self> {
        let den = q.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(q.numer().clone(), -(tz as i64)))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            floor_shr(&self.mantissa, (-self.exponent) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Nearest `f64`, rounded in the given direction.
    pub fn to_f64(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let m = r.mantissa.to_f64().unwrap_or(f64::NAN);
        let e = r.exponent;
        let v = if e > 2000 {
            m * f64::INFINITY
        } else if e < -2000 {
            // Subnormal territory; the result is within one ulp of the direction.
            match dir {
                Round::Down if m < 0.0 => -f64::MIN_POSITIVE,
                Round::Up if m > 0.0 => f64::MIN_POSITIVE,
                _ => 0.0,
            }
        } else {
            m * 2f64.powi(e as i32)
        };
        v
    }

    pub fn to_f64_nearest(&self) -> f64 {
        let q = self.to_rational();
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.signum();
        let o = other.signum();
        if s != o {
            return s.cmp(&o);
        }
        self.sub(other).signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64_nearest())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let d = Dyadic::new(BigInt::from(12), -3);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exponent(), -1);
        assert_eq!(d.to_rational(), q(3, 2));
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let third = q(1, 3);
        let lo = Dyadic::from_rational(&third, 20, Round::Down);
        let hi = Dyadic::from_rational(&third, 20, Round::Up);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert_eq!(hi.sub(&lo), Dyadic::new(BigInt::one(), -20));
    }

    #[test]
    fn negative_rounding() {
        let x = Dyadic::new(BigInt::from(-7), -2); // -1.75
        assert_eq!(x.round(1, Round::Down).to_rational(), q(-2, 1));
        assert_eq!(x.round(1, Round::Up).to_rational(), q(-1, 1));
        assert_eq!(x.floor(), BigInt::from(-2));
        assert_eq!(x.ceil(), BigInt::from(-1));
    }

    #[test]
    fn division_is_directed() {
        let one = Dyadic::from_int(1);
        let three = Dyadic::from_int(3);
        let lo = one.div(&three, 64, Round::Down);
        let hi = one.div(&three, 64, Round::Up);
        assert!(lo.to_rational() < q(1, 3));
        assert!(hi.to_rational() > q(1, 3));
        let exact = Dyadic::from_int(6).div(&three, 8, Round::Up);
        assert_eq!(exact, Dyadic::from_int(2));
    }

    #[test]
    fn ordering_matches_rationals() {
        let a = Dyadic::new(BigInt::from(5), -3);
        let b = Dyadic::new(BigInt::from(-1), 4);
        assert!(b < a);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
    }
}
