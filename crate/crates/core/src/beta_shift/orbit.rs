//! Exact greedy orbit of 1 under `T_beta`, extended on demand.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::numerics::{NumberField, RatPoly};
use crate::words::UltimatelyPeriodicWord;

/// What is known about `d_beta(1)` so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitStatus {
    Open,
    /// `d_beta(1)` ends after the digits computed so far.
    Finite,
    /// `x_start == x_{start+period}`.
    Periodic { start: usize, period: usize },
}

pub(crate) struct Orbit {
    digits: Vec<u8>,
    points: Vec<RatPoly>,
    buckets: HashMap<i64, Vec<usize>>,
    status: OrbitStatus,
}

fn bucket_of(field: &NumberField, x: &RatPoly) -> Result<i64> {
    let v = field.eval(x, 64)?;
    Ok((v.mid_f64() * (1u64 << 40) as f64).floor() as i64)
}

impl Orbit {
    pub fn new() -> Orbit {
        Orbit {
            digits: Vec::new(),
            points: vec![RatPoly::constant(BigRational::from_integer(1.into()))],
            buckets: HashMap::new(),
            status: OrbitStatus::Open,
        }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn status(&self) -> &OrbitStatus {
        &self.status
    }

    /// Extends until at least `n` digits are known or the expansion is decided.
    pub fn extend(&mut self, field: &NumberField, n: usize) -> Result<()> {
        while self.status == OrbitStatus::Open && self.digits.len() < n {
            self.step(field)?;
        }
        Ok(())
    }

    fn step(&mut self, field: &NumberField) -> Result<()> {
        let x = self.points.last().unwrap();
        let y = field.mul_gen(x);
        let eps = field.floor(&y)?;
        let d = eps
            .to_u8()
            .ok_or_else(|| Error::InvalidInput(format!("digit {eps} does not fit the alphabet")))?;
        let next = field.reduce(&y.sub(&RatPoly::constant(BigRational::from_integer(eps))));
        self.digits.push(d);
        let idx = self.points.len();
        if field.is_zero(&next)? {
            self.points.push(RatPoly::zero());
            self.status = OrbitStatus::Finite;
            return Ok(());
        }
        let b = bucket_of(field, &next)?;
        for nb in [b - 1, b, b + 1] {
            if let Some(cands) = self.buckets.get(&nb) {
                for &j in cands {
                    if field.is_zero(&next.sub(&self.points[j]))? {
                        self.points.push(next);
                        self.status = OrbitStatus::Periodic { start: j, period: idx - j };
                        return Ok(());
                    }
                }
            }
        }
        self.buckets.entry(b).or_default().push(idx);
        self.points.push(next);
        Ok(())
    }

    /// `d_beta(1)` as an ultimately periodic word once decided.
    pub fn word(&self) -> Option<UltimatelyPeriodicWord> {
        match self.status {
            OrbitStatus::Open => None,
            OrbitStatus::Finite => Some(UltimatelyPeriodicWord::finite(&self.digits)),
            OrbitStatus::Periodic { start, period } => Some(UltimatelyPeriodicWord::periodic(
                &self.digits[..start],
                &self.digits[start..start + period],
            )),
        }
    }
}

/// First `n` greedy digits of a rational `x` in `[0, 1]`, exactly.
pub(crate) fn greedy_digits(field: &NumberField, x: &BigRational, n: usize) -> Result<Vec<u8>> {
    let mut cur = RatPoly::constant(x.clone());
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if cur.is_zero() {
            out.push(0);
            continue;
        }
        let y = field.mul_gen(&cur);
        let eps = field.floor(&y)?;
        let d = eps.to_u8().ok_or_else(|| Error::InvalidInput("digit overflow".into()))?;
        out.push(d);
        cur = field.reduce(&y.sub(&RatPoly::constant(BigRational::from_integer(eps))));
        if !cur.is_zero() && field.is_zero(&cur)? {
            cur = RatPoly::zero();
        }
    }
    Ok(out)
}
