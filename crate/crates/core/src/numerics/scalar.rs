//! Certified interval reals with dyadic endpoints and outward rounding.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::{Dyadic, Round};
use super::poly::RatPoly;
use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Outcome of comparing an interval with a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Certified {
    Less,
    Greater,
    Unresolved,
}

/// Where the represented real comes from; decides whether it can be refined.
#[derive(Clone)]
pub enum Source {
    Exact(BigRational),
    Root(Arc<RootDef>),
    Opaque,
}

/// The defining data of an isolated real root: `poly` has exactly one root in
/// `search`, and its sign on the left of that root is `sign_left`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDef {
    pub poly: RatPoly,
    pub search: (BigRational, BigRational),
    pub sign_left: i32,
}

impl RootDef {
    /// Coefficients scaled to integers, lowest degree first.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let c = self.poly.coeffs();
        let l = c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        c.iter().map(|q| q.numer() * (&l / q.denom())).collect()
    }

    /// Sign of the polynomial at `z`. Dyadic points avoid rational arithmetic:
    /// `2^(k d) P(a / 2^k)` is evaluated by an integer Horner scheme.
    fn sign_at(&self, ints: &[BigInt], z: &BigRational) -> i32 {
        let den = z.denom();
        let v = if den.bits() > 0 && (den - BigInt::one()).bits() < den.bits() && !ints.is_empty() {
            let k = den.bits() - 1;
            let a = z.numer();
            let d = ints.len() - 1;
            let mut acc = ints[d].clone();
            for j in (0..d).rev() {
                acc = acc * a + (&ints[j] << (k * (d - j) as u64));
            }
            acc.signum().to_i32().unwrap_or(0)
        } else {
            let v = self.poly.eval_rational(z);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        };
        v
    }

    /// Bisects the rational bracket `[lo, hi]` (already clipped to `search`)
    /// until its width is at most `2^-bits`. Returns the final bracket; the two
    /// ends coincide when an exact root was hit.
    pub(crate) fn bisect(&self, mut lo: BigRational, mut hi: BigRational, bits: i64) -> (BigRational, BigRational) {
        let target = if bits >= 0 {
            BigRational::new(BigInt::one(), BigInt::one() << bits as u64)
        } else {
            BigRational::from_integer(BigInt::one() << (-bits) as u64)
        };
        let ints = self.integer_coeffs();
        if self.sign_at(&ints, &lo) == 0 {
            return (lo.clone(), lo);
        }
        if self.sign_at(&ints, &hi) == 0 {
            return (hi.clone(), hi);
        }
        while &hi - &lo > target {
            let mid = dyadic_between(&lo, &hi);
            match self.sign_at(&ints, &mid) {
                0 => return (mid.clone(), mid),
                s if s == self.sign_left => lo = mid,
                _ => hi = mid,
            }
        }
        (lo, hi)
    }
}

/// A dyadic rational strictly inside `(lo, hi)`, close to the midpoint.
fn dyadic_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let w = hi - lo;
    let mid = (lo + hi) / BigRational::from_integer(2.into());
    // choose k with 2^-k < w / 4
    let wb = w.numer().bits() as i64 - w.denom().bits() as i64;
    let k = 3 - wb;
    let d = Dyadic::from_rational(&mid, k, Round::Down).to_rational();
    debug_assert!(&d > lo && &d < hi);
    d
}

/// A real number known to lie in `[lo, hi]`.
#[derive(Clone)]
pub struct Scalar {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
    source: Source,
}

impl Scalar {
    pub fn from_dyadic(d: Dyadic) -> Self {
        Scalar {
            lo: d.clone(),
            source: Source::Exact(d.to_rational()),
            hi: d,
            precision_bits: DEFAULT_PRECISION,
        }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Scalar::from_dyadic(Dyadic::from_int(v))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Scalar::from_rational_prec(q, DEFAULT_PRECISION)
    }

    /// Encloses `q` with roughly `prec` significant bits; keeps `q` for refinement.
    pub fn from_rational_prec(q: &BigRational, prec: u32) -> Self {
        if let Some(d) = Dyadic::try_from_rational(q) {
            let mut s = Scalar::from_dyadic(d);
            s.precision_bits = prec;
            return s;
        }
        let mag = q.numer().bits() as i64 - q.denom().bits() as i64;
        let frac = prec as i64 - mag + 1;
        Scalar {
            lo: Dyadic::from_rational(q, frac, Round::Down),
            hi: Dyadic::from_rational(q, frac, Round::Up),
            precision_bits: prec,
            source: Source::Exact(q.clone()),
        }
    }

    /// An interval with no defining expression; it cannot be refined.
    pub fn interval(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Scalar { lo, hi, precision_bits: prec, source: Source::Opaque }
    }

    pub(crate) fn with_root(lo: Dyadic, hi: Dyadic, prec: u32, def: Arc<RootDef>) -> Self {
        Scalar { lo, hi, precision_bits: prec, source: Source::Root(def) }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        match &self.source {
            Source::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// `log2` of the width, rounded up; very negative for point intervals.
    pub fn width_log2(&self) -> i64 {
        let w = self.width();
        if w.is_zero() {
            i64::MIN / 4
        } else if w.mantissa() == &BigInt::one() {
            w.exponent()
        } else {
            w.magnitude_bits()
        }
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn overlaps(&self, other: &Scalar) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// True when `other` lies entirely inside `self`.
    pub fn encloses(&self, other: &Scalar) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    fn opaque(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Scalar { lo, hi, precision_bits: prec, source: Source::Opaque }
    }

    pub fn neg(&self) -> Self {
        let source = match &self.source {
            Source::Exact(q) => Source::Exact(-q),
            _ => Source::Opaque,
        };
        Scalar { lo: self.hi.neg(), hi: self.lo.neg(), precision_bits: self.precision_bits, source }
    }

    pub fn add(&self, other: &Scalar, prec: u32) -> Self {
        Scalar::opaque(
            self.lo.add(&other.lo).round(prec, Round::Down),
            self.hi.add(&other.hi).round(prec, Round::Up),
            prec,
        )
    }

    pub fn sub(&self, other: &Scalar, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Scalar, prec: u32) -> Self {
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = cands.iter().min().unwrap().round(prec, Round::Down);
        let hi = cands.iter().max().unwrap().round(prec, Round::Up);
        Scalar::opaque(lo, hi, prec)
    }

    pub fn mul_int(&self, k: &BigInt, prec: u32) -> Self {
        self.mul(&Scalar::from_int(k.clone()), prec)
    }

    pub fn recip(&self, prec: u32) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::PrecisionExhausted("reciprocal of an interval containing zero".into()));
        }
        let one = Dyadic::from_int(1);
        Ok(Scalar::opaque(one.div(&self.hi, prec, Round::Down), one.div(&self.lo, prec, Round::Up), prec))
    }

    pub fn div(&self, other: &Scalar, prec: u32) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::PrecisionExhausted("division by an interval containing zero".into()));
        }
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div(b, prec, Round::Down);
                let h = a.div(b, prec, Round::Up);
                lo = Some(match lo {
                    Some(x) if x <= l => x,
                    _ => l,
                });
                hi = Some(match hi {
                    Some(x) if x >= h => x,
                    _ => h,
                });
            }
        }
        Ok(Scalar::opaque(lo.unwrap(), hi.unwrap(), prec))
    }

    /// Integer power by repeated squaring; negative exponents go through `recip`.
    pub fn powi(&self, n: i64, prec: u32) -> Result<Self> {
        if n < 0 {
            return self.recip(prec)?.powi(-n, prec);
        }
        let mut result = Scalar::from_int(1);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, prec);
            }
        }
        Ok(result)
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self, prec: u32) -> Result<Self> {
        if self.lo.signum() <= 0 {
            return Err(Error::PrecisionExhausted("logarithm of a non-positive interval".into()));
        }
        let lo = ln_dyadic(&self.lo, prec).lo;
        let hi = ln_dyadic(&self.hi, prec).hi;
        Ok(Scalar::opaque(lo, hi, prec))
    }

    /// Interval hull of two intervals.
    pub fn hull(&self, other: &Scalar) -> Self {
        Scalar::opaque(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.precision_bits.min(other.precision_bits),
        )
    }

    /// Refines to absolute width at most `2^-target_bits`.
    pub fn refine(&self, target_bits: u32) -> Result<Scalar> {
        if target_bits == 0 {
            return Err(Error::InvalidInput("target_bits must be at least 1".into()));
        }
        let t = target_bits as i64;
        if self.is_point() {
            return Ok(self.clone());
        }
        match &self.source {
            Source::Exact(q) => {
                let lo = Dyadic::from_rational(q, t, Round::Down);
                let hi = Dyadic::from_rational(q, t, Round::Up);
                let prec = self.precision_bits.max(target_bits + (lo.magnitude_bits().max(0) as u32) + 2);
                Ok(Scalar { lo, hi, precision_bits: prec, source: self.source.clone() })
            }
            Source::Root(def) => {
                if self.width_log2() <= -t {
                    return Ok(self.clone());
                }
                let lo_q = self.lo.to_rational().max(def.search.0.clone());
                let hi_q = self.hi.to_rational().min(def.search.1.clone());
                let (lo_q, hi_q) = def.bisect(lo_q, hi_q, t + 1);
                let lo = Dyadic::from_rational(&lo_q, t + 2, Round::Down);
                let hi = Dyadic::from_rational(&hi_q, t + 2, Round::Up);
                let prec = self.precision_bits.max(target_bits + (hi.magnitude_bits().max(0) as u32) + 2);
                let (lo, hi) = if lo_q == hi_q {
                    match Dyadic::try_from_rational(&lo_q) {
                        Some(d) => (d.clone(), d),
                        None => (lo, hi),
                    }
                } else {
                    (lo, hi)
                };
                Ok(Scalar { lo, hi, precision_bits: prec, source: self.source.clone() })
            }
            Source::Opaque => {
                if self.width_log2() <= -t {
                    Ok(self.clone())
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "interval of width 2^{} has no defining expression to refine to 2^-{}",
                        self.width_log2(),
                        target_bits
                    )))
                }
            }
        }
    }

    /// `Less`/`Greater` only when the whole interval is on one side of `threshold`.
    pub fn compare_with_certification(&self, threshold: &BigRational) -> Certified {
        if self.hi.to_rational() < *threshold {
            Certified::Less
        } else if self.lo.to_rational() > *threshold {
            Certified::Greater
        } else {
            Certified::Unresolved
        }
    }

    pub fn compare_scalar(&self, other: &Scalar) -> Certified {
        if self.hi < other.lo {
            Certified::Less
        } else if self.lo > other.hi {
            Certified::Greater
        } else {
            Certified::Unresolved
        }
    }

    /// Certified `self <= other`, returning `None` when the intervals overlap
    /// in a way that leaves the answer open.
    pub fn certainly_le(&self, other: &Scalar) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64_nearest()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}] (w=2^{})", self.lo_f64(), self.hi_f64(), self.width_log2())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15}", self.mid_f64())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }
}

struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
}

fn atanh_series(y: &Scalar, wp: u32) -> Scalar {
    // y is small (|y| <= 1/3); sum y^(2i+1)/(2i+1) with a geometric tail bound
    let y2 = y.mul(y, wp);
    let mut term = y.clone();
    let mut sum = Scalar::from_int(0);
    let mut i: i64 = 0;
    let cutoff = -(wp as i64) - 4;
    loop {
        let denom = Scalar::from_int(2 * i + 1);
        sum = sum.add(&term.div(&denom, wp).expect("odd denominator"), wp);
        term = term.mul(&y2, wp);
        i += 1;
        let mag = term.lo.abs().max(term.hi.abs());
        if mag.is_zero() || mag.magnitude_bits() < cutoff {
            // remaining tail <= |term| / (1 - y^2) <= 2 |term|
            let bound = mag.mul_pow2(1).round(32, Round::Up);
            let tail = Scalar::opaque(bound.neg(), bound, wp);
            return sum.add(&tail, wp);
        }
    }
}

fn ln2(wp: u32) -> Scalar {
    let third = Scalar::from_int(1).div(&Scalar::from_int(3), wp).unwrap();
    atanh_series(&third, wp).mul(&Scalar::from_int(2), wp)
}

fn ln_dyadic(d: &Dyadic, prec: u32) -> Enclosure {
    let wp = prec + 32;
    // d = r * 2^k with r in [2/3, 4/3)
    let mut k = d.magnitude_bits() - 1;
    let mut r = d.mul_pow2(-k);
    if r.mul(&Dyadic::from_int(3)) >= Dyadic::from_int(4) {
        k += 1;
        r = r.mul_pow2(-1);
    }
    let rs = Scalar::from_dyadic(r);
    let one = Scalar::from_int(1);
    let y = rs.sub(&one, wp).div(&rs.add(&one, wp), wp).expect("r + 1 > 0");
    let mut v = atanh_series(&y, wp).mul(&Scalar::from_int(2), wp);
    if k != 0 {
        v = v.add(&ln2(wp).mul(&Scalar::from_int(k), wp), wp);
    }
    Enclosure { lo: v.lo.round(prec, Round::Down), hi: v.hi.round(prec, Round::Up) }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.compare_scalar(other) {
            Certified::Less => Some(Ordering::Less),
            Certified::Greater => Some(Ordering::Greater),
            Certified::Unresolved if self.is_point() && self == other => Some(Ordering::Equal),
            Certified::Unresolved => None,
        }
    }
}
