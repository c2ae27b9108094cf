//! Bernoulli measures of the constructions, local-dimension trajectories,
//! closed-form dimension formulas and the covering-series critical exponent.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::bary::DigitSet;
use crate::beta_shift::BetaSystem;
use crate::constructions::{beta_layout, check_feasible, BaryPlan, Layout, ScheduledRuns};
use crate::error::{Error, Result};
use crate::numerics::{format_rational, Dyadic, Round, Scalar};

/// Longest block whose count is kept as an exact integer.
const EXACT_FACTOR_LIMIT: u64 = 4096;

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `μ(I_n)` in exact form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureValue {
    /// `choices^-exponent`: `b` for the b-ary construction, `#S` for `K_{b,S}`.
    Uniform { depth: u64, choices: u32, exponent: u64 },
    /// `Π (#Σ^len)^-mult` over the free blocks met so far, keyed by length.
    Blocks { depth: u64, factors: Vec<(u64, u64)> },
}

impl MeasureValue {
    pub fn depth(&self) -> u64 {
        match self {
            MeasureValue::Uniform { depth, .. } | MeasureValue::Blocks { depth, .. } => *depth,
        }
    }

    /// Exact value, when every block count is small enough to expand.
    pub fn to_rational(&self, shift: Option<&BetaSystem>) -> Result<BigRational> {
        match self {
            MeasureValue::Uniform { choices, exponent, .. } => {
                let e = u32::try_from(*exponent).map_err(|_| Error::InvalidInput("exponent too large to expand".into()))?;
                Ok(BigRational::new(BigInt::one(), BigInt::from(*choices).pow(e)))
            }
            MeasureValue::Blocks { factors, .. } => {
                let sys = shift.ok_or_else(|| Error::InvalidInput("block measure needs its shift".into()))?;
                let mut den = BigUint::one();
                for &(len, mult) in factors {
                    if len > EXACT_FACTOR_LIMIT {
                        return Err(Error::HorizonTooDeep(format!("block of length {len}")));
                    }
                    let c = sys.count_admissible(len as usize)?;
                    den *= c.pow(mult as u32);
                }
                Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
            }
        }
    }

    /// Enclosure of `-log μ`.
    pub fn neg_log(&self, shift: Option<&BetaSystem>, prec: u32) -> Result<Scalar> {
        match self {
            MeasureValue::Uniform { choices, exponent, .. } => {
                Ok(Scalar::from_int(*choices).ln(prec)?.mul_int(&BigInt::from(*exponent), prec))
            }
            MeasureValue::Blocks { factors, .. } => {
                let sys = shift.ok_or_else(|| Error::InvalidInput("block measure needs its shift".into()))?;
                let mut acc = Scalar::from_int(0);
                for &(len, mult) in factors {
                    let l = sys.log_count(len, prec)?;
                    acc = acc.add(&l.mul_int(&BigInt::from(mult), prec), prec);
                }
                Ok(acc)
            }
        }
    }
}

fn check_depth(layout: &Layout, n: u64) -> Result<()> {
    if n > layout.extent() {
        return Err(Error::DepthExceeded { requested: n, available: layout.extent() });
    }
    Ok(())
}

/// `μ(I_n)` for the b-ary construction, or for `K_{b,S}` when `set` is given.
pub fn measure_bary(runs: &ScheduledRuns, base: u32, set: Option<&DigitSet>, n: u64) -> Result<MeasureValue> {
    let plan = BaryPlan::from_schedule(runs.clone(), base, set)?;
    measure_plan(&plan, n)
}

/// `μ(I_n)` from a prepared plan.
pub fn measure_plan(plan: &BaryPlan, n: u64) -> Result<MeasureValue> {
    check_depth(&plan.layout, n)?;
    Ok(MeasureValue::Uniform { depth: n, choices: plan.alphabet().len() as u32, exponent: plan.layout.free_upto(n) })
}

/// `μ(I_n)` at the cylinder of `word`, or `NotInSupport` when the word leaves the construction.
pub fn measure_bary_word(plan: &BaryPlan, word: &[u8]) -> Result<MeasureValue> {
    let n = word.len() as u64;
    check_depth(&plan.layout, n)?;
    for (i, &d) in word.iter().enumerate() {
        let pos = i as u64 + 1;
        match plan.layout.digit_at(pos) {
            Some(p) if p != d => {
                return Err(Error::NotInSupport(format!("position {pos} must be {p}, found {d}")));
            }
            None if !plan.alphabet().contains(&d) => {
                return Err(Error::NotInSupport(format!("digit {d} at position {pos} is not allowed")));
            }
            _ => {}
        }
    }
    measure_plan(plan, n)
}

fn beta_layout_for(runs: &ScheduledRuns) -> Result<Layout> {
    if runs.beta.is_none() {
        return Err(Error::InvalidInput("schedule lacks beta indices".into()));
    }
    beta_layout(runs)
}

/// Free blocks met in `[1, n]`, grouped by length.
fn block_factors(layout: &Layout, n: u64) -> Vec<(u64, u64)> {
    let mut by_len: BTreeMap<u64, u64> = BTreeMap::new();
    for g in layout.gaps(n) {
        *by_len.entry(g.len).or_default() += 1;
    }
    by_len.into_iter().collect()
}

/// `μ(I_n)` for the β construction: mass split uniformly over `Σ_{β_N}`
/// on each free block and kept on prescribed positions.
pub fn measure_beta(runs: &ScheduledRuns, n: u64) -> Result<MeasureValue> {
    let layout = beta_layout_for(runs)?;
    check_depth(&layout, n)?;
    Ok(MeasureValue::Blocks { depth: n, factors: block_factors(&layout, n) })
}

/// As [`measure_beta`] at the cylinder of `word`, checking that it lies in the support.
pub fn measure_beta_word(runs: &ScheduledRuns, beta_n: &BetaSystem, word: &[u8]) -> Result<MeasureValue> {
    let layout = beta_layout_for(runs)?;
    let n = word.len() as u64;
    check_depth(&layout, n)?;
    for g in layout.gaps(n) {
        let seg = &word[(g.start - 1) as usize..(g.start - 1 + g.len) as usize];
        if !beta_n.is_admissible(seg)? {
            return Err(Error::NotInSupport(format!("free block at {} is not in the fill shift", g.start)));
        }
    }
    for p in layout.pieces() {
        for pos in p.start..p.end().min(n + 1) {
            let d = word[(pos - 1) as usize];
            if d != p.digit {
                return Err(Error::NotInSupport(format!("position {pos} must be {}, found {d}", p.digit)));
            }
        }
    }
    Ok(MeasureValue::Blocks { depth: n, factors: block_factors(&layout, n) })
}

/// Closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_scalar(s: &Scalar) -> Interval {
        Interval { lo: s.lo().to_rational(), hi: s.hi().to_rational() }
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Distance from `x` to the interval.
    pub fn distance(&self, x: &BigRational) -> BigRational {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            BigRational::zero()
        }
    }

    /// Outward-rounded `f64` endpoints.
    pub fn to_f64(&self) -> (f64, f64) {
        (rational_f64(&self.lo, Round::Down), rational_f64(&self.hi, Round::Up))
    }
}

fn rational_f64(x: &BigRational, dir: Round) -> f64 {
    Dyadic::from_rational(x, 96, dir).to_f64(dir)
}

/// Ratio `log μ(I) / log |I|` at one checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioPoint {
    /// 1-based stage.
    pub k: usize,
    /// Checkpoint depth: `m_k` for b-ary, `h_k` for β.
    pub depth: u64,
    pub ratio: Interval,
}

/// Local-dimension trajectory against the formula's limit.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub params: BTreeMap<String, String>,
    /// `(θ-1-θv̂)/((1+θv̂)(θ-1))`.
    #[serde(serialize_with = "ser_rational")]
    pub formula_value: BigRational,
    /// The expected limit: the formula times any log-ratio factor.
    #[serde(serialize_with = "ser_interval")]
    pub limit: Interval,
    #[serde(serialize_with = "ser_trajectory")]
    pub trajectory: Vec<RatioPoint>,
    pub converged_at: Option<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub tolerance: BigRational,
}

fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_interval<S: Serializer>(i: &Interval, s: S) -> std::result::Result<S::Ok, S::Error> {
    let (lo, hi) = i.to_f64();
    [lo, hi].serialize(s)
}

fn ser_trajectory<S: Serializer>(t: &[RatioPoint], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for p in t {
        let (lo, hi) = p.ratio.to_f64();
        seq.serialize_element(&(p.k, lo, hi))?;
    }
    seq.end()
}

impl DimensionReport {
    fn new(params: BTreeMap<String, String>, formula_value: BigRational, limit: Interval, tolerance: BigRational) -> Self {
        DimensionReport { params, formula_value, limit, trajectory: Vec::new(), converged_at: None, tolerance }
    }

    /// First stage from which successive midpoints move by less than the
    /// tolerance and every ratio interval is narrower than a tenth of it.
    fn settle(&mut self) {
        let tol = &self.tolerance;
        let tenth = tol / qi(10);
        let ok = |i: usize| -> bool {
            let p = &self.trajectory[i];
            if p.ratio.width() >= tenth {
                return false;
            }
            i == 0 || (p.ratio.mid() - self.trajectory[i - 1].ratio.mid()).abs() < *tol
        };
        let mut from = None;
        for i in (1..self.trajectory.len()).rev() {
            if ok(i) {
                from = Some(i);
            } else {
                break;
            }
        }
        self.converged_at = from.map(|i| self.trajectory[i].k);
    }

    pub fn last(&self) -> Option<&RatioPoint> {
        self.trajectory.last()
    }

    /// Ratio at stage `k`.
    pub fn at(&self, k: usize) -> Option<&RatioPoint> {
        self.trajectory.iter().find(|p| p.k == k)
    }

    /// `k,depth,lo,hi` rows with outward-rounded endpoints.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,depth,lo,hi\n");
        for p in &self.trajectory {
            let (lo, hi) = p.ratio.to_f64();
            out.push_str(&format!("{},{},{:e},{:e}\n", p.k, p.depth, lo, hi));
        }
        out
    }
}

fn base_params(runs: &ScheduledRuns) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    p.insert("theta".into(), runs.theta.clone());
    p.insert("v_hat".into(), runs.v_hat.clone());
    p.insert("stages".into(), runs.stages().to_string());
    p
}

fn parse_params(runs: &ScheduledRuns) -> Result<(BigRational, BigRational)> {
    Ok((crate::numerics::parse_rational(&runs.theta)?, crate::numerics::parse_rational(&runs.v_hat)?))
}

/// Ratios `e(m_k) log #A / (m_k log b)` for `k = 1..=K`; exact rationals
/// when the full digit set is used.
pub fn local_dimension_bary(
    runs: &ScheduledRuns,
    base: u32,
    set: Option<&DigitSet>,
    stages: usize,
    tolerance: &BigRational,
    prec: u32,
) -> Result<DimensionReport> {
    if stages > runs.stages() {
        return Err(Error::DepthExceeded { requested: stages as u64, available: runs.stages() as u64 });
    }
    let plan = BaryPlan::from_schedule(runs.clone(), base, set)?;
    let (theta, v_hat) = parse_params(runs)?;
    let f = dim_formula(&theta, &v_hat)?;
    let choices = plan.alphabet().len() as u32;
    let scale = if choices == base {
        None
    } else {
        Some(Scalar::from_int(choices).ln(prec)?.div(&Scalar::from_int(base).ln(prec)?, prec)?)
    };
    let limit = match &scale {
        None => Interval::point(f.clone()),
        Some(s) => Interval::from_scalar(&s.mul(&Scalar::from_rational_prec(&f, prec), prec)),
    };
    let mut params = base_params(runs);
    params.insert("base".into(), base.to_string());
    if let Some(s) = set {
        params.insert("digits".into(), s.to_string());
    }
    let mut rep = DimensionReport::new(params, f, limit, tolerance.clone());
    for k in 0..stages {
        let m = runs.m[k];
        let e = plan.layout.free_upto(m);
        let exact = q(e, m);
        let ratio = match &scale {
            None => Interval::point(exact),
            Some(s) => Interval::from_scalar(&s.mul(&Scalar::from_rational_prec(&exact, prec), prec)),
        };
        rep.trajectory.push(RatioPoint { k: k + 1, depth: m, ratio });
    }
    rep.settle();
    Ok(rep)
}

/// Ratios `-log μ(I_{h_k}) / (h_k log β)` for the β construction, where
/// the fill shift is `beta_n` and `I_{h_k}` is full for `beta`.
pub fn local_dimension_beta(
    runs: &ScheduledRuns,
    beta: &BetaSystem,
    beta_n: &BetaSystem,
    stages: usize,
    tolerance: &BigRational,
    prec: u32,
) -> Result<DimensionReport> {
    let b = runs.beta.as_ref().ok_or_else(|| Error::InvalidInput("schedule lacks beta indices".into()))?;
    if stages > runs.stages() {
        return Err(Error::DepthExceeded { requested: stages as u64, available: runs.stages() as u64 });
    }
    let layout = beta_layout_for(runs)?;
    let (theta, v_hat) = parse_params(runs)?;
    let f = dim_formula(&theta, &v_hat)?;
    let ln_beta = beta.beta(prec + 16)?.ln(prec)?;
    let ln_beta_n = beta_n.beta(prec + 16)?.ln(prec)?;
    let scale = ln_beta_n.div(&ln_beta, prec)?;
    let limit = Interval::from_scalar(&scale.mul(&Scalar::from_rational_prec(&f, prec), prec));
    let mut params = base_params(runs);
    params.insert("N".into(), b.big_n.to_string());
    let mut rep = DimensionReport::new(params, f, limit, tolerance.clone());
    let mut logs: HashMap<u64, Scalar> = HashMap::new();
    for k in 0..stages {
        let h = b.h[k];
        let mut acc = Scalar::from_int(0);
        for (len, mult) in block_factors(&layout, h) {
            if let std::collections::hash_map::Entry::Vacant(e) = logs.entry(len) {
                e.insert(beta_n.log_count(len, prec)?);
            }
            acc = acc.add(&logs[&len].mul_int(&BigInt::from(mult), prec), prec);
        }
        let den = ln_beta.mul_int(&BigInt::from(h), prec);
        let r = acc.div(&den, prec)?;
        rep.trajectory.push(RatioPoint { k: k + 1, depth: h, ratio: Interval::from_scalar(&r) });
    }
    rep.settle();
    Ok(rep)
}

/// Smallest certified lower bound on `log μ(I_n)/log |I_n|` over the depths
/// of stage `k` (from its checkpoint up to the next stage), divided by the
/// checkpoint ratio. For β, `|I_n| >= β^-(n+N)` bounds the denominator.
pub fn ratio_floor_beta(
    runs: &ScheduledRuns,
    beta: &BetaSystem,
    beta_n: &BetaSystem,
    k: usize,
    prec: u32,
) -> Result<f64> {
    let b = runs.beta.as_ref().ok_or_else(|| Error::InvalidInput("schedule lacks beta indices".into()))?;
    let layout = beta_layout_for(runs)?;
    let ln_beta = beta.beta(prec + 16)?.ln(prec)?;
    let start = b.h[k];
    let end = b.l.get(k + 1).copied().unwrap_or_else(|| runs.next_l().unwrap()).min(layout.extent());
    let neg_log = |n: u64| -> Result<Scalar> {
        MeasureValue::Blocks { depth: n, factors: block_factors(&layout, n) }.neg_log(Some(beta_n), prec)
    };
    let at = neg_log(start)?.div(&ln_beta.mul_int(&BigInt::from(start), prec), prec)?;
    let mut probe: Vec<u64> = vec![start, end];
    for g in layout.gaps(end) {
        if g.start > start {
            probe.push(g.start - 1);
            probe.push(g.start + g.len - 1);
        }
    }
    let nn = b.big_n;
    let mut worst = f64::INFINITY;
    for n in probe {
        let r = neg_log(n)?.div(&ln_beta.mul_int(&BigInt::from(n + nn), prec), prec)?;
        worst = worst.min(r.lo_f64() / at.hi_f64());
    }
    Ok(worst)
}

/// Smallest ratio `e(n)/n` over stage `k`'s depths `m_k <= n < n_{k+1}`,
/// divided by the checkpoint ratio; never below 1 by the monotone-ratio lemma.
pub fn ratio_floor_bary(runs: &ScheduledRuns, base: u32, k: usize) -> Result<BigRational> {
    let plan = BaryPlan::from_schedule(runs.clone(), base, None)?;
    let m = runs.m[k];
    let at = q(plan.layout.free_upto(m), m);
    let end = runs.next_n(k).saturating_sub(1).min(plan.layout.extent());
    let mut probe = vec![m, end];
    for g in plan.layout.gaps(end) {
        if g.start > m {
            probe.push(g.start - 1);
            probe.push(g.start + g.len - 1);
        }
    }
    let mut worst: Option<BigRational> = None;
    for n in probe {
        let r = q(plan.layout.free_upto(n), n);
        if worst.as_ref().is_none_or(|w| &r < w) {
            worst = Some(r);
        }
    }
    let w = worst.unwrap();
    if at.is_zero() {
        return Ok(if w.is_zero() { BigRational::one() } else { w });
    }
    Ok(w / at)
}

/// `(a+x)/(b+x) >= a/b` for `0 < a <= b` and `x >= 0`, checked exactly.
pub fn monotone_ratio_holds(a: &BigRational, b: &BigRational, x: &BigRational) -> bool {
    (a + x) / (b + x) >= a / b
}

/// One step of the Stolz–Cesàro comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StolzPoint {
    pub k: usize,
    /// `(n_{k+1}-m_k)/(m_{k+1}-m_k)`.
    pub step: BigRational,
    /// `Σ_{j<k}(n_{j+1}-m_j)/m_k`.
    pub cumulative: BigRational,
}

/// Step and cumulative ratios for `k = 1..K-1`.
pub fn stolz_cesaro(runs: &ScheduledRuns) -> Vec<StolzPoint> {
    let mut out = Vec::new();
    let mut sum = 0u64;
    for k in 0..runs.stages().saturating_sub(1) {
        let (m, m1, n1) = (runs.m[k], runs.m[k + 1], runs.n[k + 1]);
        let cumulative = q(sum, m);
        out.push(StolzPoint { k: k + 1, step: q(n1 - m, m1 - m), cumulative });
        sum += n1 - m;
    }
    out
}

/// `(θ-1-θv̂)/((1+θv̂)(θ-1))`. `v̂ = 1` gives 0 for any `θ`, as does the
/// threshold `θ = 1/(1-v̂)`.
pub fn dim_formula(theta: &BigRational, v_hat: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if v_hat.is_negative() || v_hat > &one {
        return Err(Error::InfeasibleParameters(format!("v_hat = {} not in [0, 1]", format_rational(v_hat))));
    }
    if v_hat == &one {
        return Ok(BigRational::zero());
    }
    let num = theta - &one - theta * v_hat;
    if num.is_negative() {
        return Err(Error::InfeasibleParameters(format!(
            "theta = {} below 1/(1 - v_hat); the set is empty",
            format_rational(theta)
        )));
    }
    if num.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(num / ((&one + theta * v_hat) * (theta - &one)))
}

/// Limit of [`dim_formula`] as `θ -> ∞`: 1 at `v̂ = 0`, else 0.
pub fn dim_formula_at_infinity(v_hat: &BigRational) -> Result<BigRational> {
    if v_hat.is_negative() || v_hat > &BigRational::one() {
        return Err(Error::InfeasibleParameters(format!("v_hat = {} not in [0, 1]", format_rational(v_hat))));
    }
    Ok(if v_hat.is_zero() { BigRational::one() } else { BigRational::zero() })
}

/// [`dim_formula`] scaled by `log #S / log b`.
pub fn dim_formula_restricted(theta: &BigRational, v_hat: &BigRational, set: &DigitSet, prec: u32) -> Result<Scalar> {
    let f = dim_formula(theta, v_hat)?;
    let s = Scalar::from_int(set.len() as u32).ln(prec)?.div(&Scalar::from_int(set.base()).ln(prec)?, prec)?;
    Ok(s.mul(&Scalar::from_rational_prec(&f, prec), prec))
}

/// `θ₀ = 2/(1-v̂)`, where [`dim_formula`] peaks.
pub fn theta0(v_hat: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if v_hat.is_negative() || v_hat >= &one {
        return Err(Error::InfeasibleParameters(format!("v_hat = {} not in [0, 1)", format_rational(v_hat))));
    }
    Ok(qi(2) / (one - v_hat))
}

/// Supremum of [`dim_formula`] over `θ`, with its certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupReport {
    pub theta0: BigRational,
    /// `f(θ₀)`.
    pub value: BigRational,
    /// `((1-v̂)/(1+v̂))²`.
    pub closed_form: BigRational,
    /// The numerator of `f'` vanishes at `θ₀`.
    pub stationary: bool,
    /// No grid point beats `f(θ₀)`.
    pub grid_ok: bool,
}

impl SupReport {
    pub fn holds(&self) -> bool {
        self.stationary && self.grid_ok && self.value == self.closed_form
    }
}

/// Maximizes `f(θ) = P/Q`, `P = (1-v̂)θ - 1`, `Q = v̂θ² + (1-v̂)θ - 1`, over
/// `θ >= 1/(1-v̂)`: exact stationarity of `P'Q - PQ'` at `θ₀` and a grid
/// of `grid` points on `[1/(1-v̂), 8θ₀]`.
pub fn dim_sup(v_hat: &BigRational, grid: usize) -> Result<SupReport> {
    let one = BigRational::one();
    let t0 = theta0(v_hat)?;
    let a = &one - v_hat;
    let p = |t: &BigRational| &a * t - &one;
    let qf = |t: &BigRational| v_hat * t * t + &a * t - &one;
    let dp = a.clone();
    let dq = |t: &BigRational| qi(2) * v_hat * t + &a;
    let stationary = (&dp * qf(&t0) - p(&t0) * dq(&t0)).is_zero();
    let value = dim_formula(&t0, v_hat)?;
    let closed_form = {
        let r = (&one - v_hat) / (&one + v_hat);
        &r * &r
    };
    let lo = &one / &a;
    let hi = &t0 * qi(8);
    let mut grid_ok = true;
    for i in 0..=grid {
        let t = &lo + (&hi - &lo) * q(i as u64, grid.max(1) as u64);
        if dim_formula(&t, v_hat)? > value {
            grid_ok = false;
        }
    }
    Ok(SupReport { theta0: t0, value, closed_form, stationary, grid_ok })
}

/// `s₀ = ((1+ε)/(1-ε)) · f(θ, v̂)`, the exponent where the covering series
/// switches from divergence to convergence.
pub fn critical_exponent_s0(theta: &BigRational, v_hat: &BigRational, eps: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if eps.is_negative() || eps >= &one {
        return Err(Error::InvalidInput(format!("eps = {} not in [0, 1)", format_rational(eps))));
    }
    check_threshold(theta, v_hat)?;
    Ok((&one + eps) / (&one - eps) * dim_formula(theta, v_hat)?)
}

fn check_threshold(theta: &BigRational, v_hat: &BigRational) -> Result<()> {
    match check_feasible(theta, v_hat) {
        Ok(()) => Ok(()),
        // v̂ = 0 or 1 are fine for the formula itself
        Err(_) if v_hat.is_zero() || v_hat == &BigRational::one() => dim_formula(theta, v_hat).map(|_| ()),
        Err(e) => Err(e),
    }
}

/// Growth slopes of the truncated covering series on both sides of `s₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesProbe {
    pub s0: f64,
    pub terms: u64,
    /// `(s, slope)` with slope the growth rate of `log` of the partial sums per term.
    pub samples: Vec<(f64, f64)>,
}

impl SeriesProbe {
    /// Below `s₀` the partial sums grow geometrically; above they settle.
    pub fn sign_flip(&self) -> bool {
        self.samples.iter().all(|&(s, slope)| if s < self.s0 { slope > 1e-3 } else { slope.abs() < 1e-3 })
    }
}

/// Evaluates `Σ_{M<=terms} M^{C log M} b^{M a} b^{-M c s}` in log space,
/// where `a = (1+ε)(θ-1-θv̂)/(θ-1)` and `c = (1+θv̂)(1-ε)`, at `s = s₀(1 ± d)`,
/// and compares the slopes of `log S` over the last half of the range.
pub fn series_probe(
    theta: &BigRational,
    v_hat: &BigRational,
    eps: &BigRational,
    log_constant: f64,
    base: f64,
    terms: u64,
    offsets: &[f64],
) -> Result<SeriesProbe> {
    let s0 = critical_exponent_s0(theta, v_hat, eps)?.to_f64().unwrap();
    let th = theta.to_f64().unwrap();
    let vh = v_hat.to_f64().unwrap();
    let e = eps.to_f64().unwrap();
    let a = (1.0 + e) * (th - 1.0 - th * vh) / (th - 1.0);
    let c = (1.0 + th * vh) * (1.0 - e);
    let lb = base.ln();
    let terms = terms.max(4);
    let mut samples = Vec::new();
    for &d in offsets {
        let s = s0 * (1.0 + d);
        // log-sum-exp of the partial sums
        let mut acc = f64::NEG_INFINITY;
        let mut half = 0.0;
        for m in 1..=terms {
            let mf = m as f64;
            let lt = log_constant * mf.ln() * mf.ln() + mf * (a - c * s) * lb;
            acc = if acc == f64::NEG_INFINITY { lt } else { acc.max(lt) + (-(acc - lt).abs()).exp().ln_1p() };
            if m == terms / 2 {
                half = acc;
            }
        }
        samples.push((s, (acc - half) / (terms - terms / 2) as f64));
    }
    Ok(SeriesProbe { s0, terms, samples })
}

/// One grid point of the `θ -> ∞` limit at fixed `v = θv̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitPoint {
    pub theta: BigRational,
    /// `None` below the threshold `θ < v + 1`.
    pub value: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitReport {
    pub v: BigRational,
    /// `1/(1+v)`.
    pub limit: BigRational,
    pub points: Vec<LimitPoint>,
    /// Feasible values increase along the grid (sorted by `θ`) and stay below the limit.
    pub monotone: bool,
}

/// Evaluates [`dim_formula`] with `v̂ = v/θ` along `grid`; the values are
/// `(1/(1+v))(1 - v/(θ-1))` and increase towards `1/(1+v)`.
pub fn reprove_1_5_limit(v: &BigRational, theta_grid: &[BigRational]) -> LimitReport {
    let one = BigRational::one();
    let limit = &one / (&one + v);
    let mut grid = theta_grid.to_vec();
    grid.sort();
    let points: Vec<LimitPoint> = grid
        .into_iter()
        .map(|t| {
            let value = if t > one && t >= &one + v {
                dim_formula(&t, &(v / &t)).ok()
            } else {
                None
            };
            LimitPoint { theta: t, value }
        })
        .collect();
    let vals: Vec<&BigRational> = points.iter().filter_map(|p| p.value.as_ref()).collect();
    let monotone = vals.windows(2).all(|w| w[0] <= w[1]) && vals.iter().all(|x| *x <= &limit);
    LimitReport { v: v.clone(), limit, points, monotone }
}
