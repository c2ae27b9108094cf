//! b-ary expansions, run structure and the exponents `v_b`, `v̂_b`.
//!
//! Positions are 1-indexed throughout: `a_1` is the first digit after the
//! point. A run is a pair `(n', m')` with `a_{n'+1} = … = a_{m'-1}` equal to 0
//! (or to `b-1`) and both brackets different from that digit.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::DigitWord;

/// First `n` digits of `p/q` in base `b` by long division.
pub fn expand_rational(p: u64, q: u64, b: u32, n: usize) -> Result<DigitWord> {
    if q == 0 || p >= q {
        return Err(Error::InvalidInput(format!("need 0 <= p < q, got {p}/{q}")));
    }
    if b < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    let (q, b) = (q as u128, b as u128);
    let mut r = p as u128;
    Ok((0..n)
        .map(|_| {
            r *= b;
            let d = r / q;
            r %= q;
            d as u8
        })
        .collect())
}

/// Exponent rule of a lacunary series `Σ b^{-e_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LacunaryRule {
    /// `e_j = ⌊(1+v)^j⌋`, `v > 0`.
    Power(#[serde(serialize_with = "ser_rational")] BigRational),
    /// `e_j = 2^{j²}`.
    SquaredPower,
}

impl LacunaryRule {
    /// Exponents `e_j <= n` for `j >= 1`, increasing, without repeats.
    pub fn positions(&self, n: u64) -> Result<Vec<u64>> {
        let mut out = BTreeSet::new();
        match self {
            LacunaryRule::Power(v) => {
                if !v.is_positive() {
                    return Err(Error::InvalidInput("lacunary exponent v must be positive".into()));
                }
                let ratio = BigRational::one() + v;
                let mut x = ratio.clone();
                let bound = BigInt::from(n);
                loop {
                    let e = x.floor().to_integer();
                    if e > bound {
                        break;
                    }
                    out.insert(e.to_u64().unwrap());
                    x = &x * &ratio;
                }
            }
            LacunaryRule::SquaredPower => {
                for j in 1u32.. {
                    let sq = j * j;
                    if sq >= 64 || (1u64 << sq) > n {
                        break;
                    }
                    out.insert(1u64 << sq);
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// First `n` digits of the lacunary series: 1 at each exponent, 0 elsewhere.
pub fn expand_lacunary(b: u32, rule: &LacunaryRule, n: usize) -> Result<DigitWord> {
    if b < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    let mut w = vec![0u8; n];
    for p in rule.positions(n as u64)? {
        w[p as usize - 1] = 1;
    }
    Ok(w)
}

/// Which digit value a run is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Zeros,
    TopDigit,
}

/// Which run kinds a scan looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunKinds {
    /// Zeros and `b-1`, as for b-ary expansions.
    Both,
    /// Zeros only, as for β-expansions.
    ZerosOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Run {
    /// Left bracket `n'`.
    pub start: u64,
    /// Right bracket `m'`. For an incomplete run, the smallest value it can take.
    pub end: u64,
    pub kind: RunKind,
    pub complete: bool,
}

impl Run {
    /// `m' - n'`, one more than the number of run digits.
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn interior(&self) -> u64 {
        self.len() - 1
    }
}

/// Runs of a digit word and the monotone subsequence `(n_k, m_k)`.
#[derive(Clone, Debug, Serialize)]
pub struct RunDecomposition {
    pub base: u32,
    /// Complete runs in order of their left bracket. Empty when the scanner
    /// was told not to keep them.
    pub runs: Vec<Run>,
    pub run_count: u64,
    pub monotone: Vec<(u64, u64)>,
    /// A run still open at the horizon.
    pub incomplete: Option<Run>,
    pub horizon: u64,
}

impl RunDecomposition {
    /// `n_{K+1}` when the open run is already at least as long as the record,
    /// which fixes it as the next monotone entry whatever its final length.
    pub fn next_start(&self) -> Option<u64> {
        let r = self.incomplete?;
        let &(n, m) = self.monotone.last()?;
        (r.len() >= m - n).then_some(r.start)
    }

    /// The prescribed `n_{k+1}` for every monotone entry that has one.
    pub fn successors(&self) -> Vec<Option<u64>> {
        let k = self.monotone.len();
        (0..k)
            .map(|i| if i + 1 < k { Some(self.monotone[i + 1].0) } else { self.next_start() })
            .collect()
    }
}

/// Single pass run scanner. Feed digits in chunks, then call [`RunScanner::finish`].
#[derive(Clone, Debug)]
pub struct RunScanner {
    base: u32,
    top: u8,
    kinds: RunKinds,
    keep_runs: bool,
    pos: u64,
    // (digit, left bracket, no bracket)
    open: Option<(u8, u64, bool)>,
    runs: Vec<Run>,
    run_count: u64,
    monotone: Vec<(u64, u64)>,
    record: u64,
}

impl RunScanner {
    pub fn new(base: u32, kinds: RunKinds) -> RunScanner {
        RunScanner {
            base,
            top: (base - 1).min(255) as u8,
            kinds,
            keep_runs: true,
            pos: 0,
            open: None,
            runs: Vec::new(),
            run_count: 0,
            monotone: Vec::new(),
            record: 0,
        }
    }

    /// Skip storing individual runs; only the monotone list is kept.
    pub fn monotone_only(mut self) -> RunScanner {
        self.keep_runs = false;
        self
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    #[inline]
    fn is_run_digit(&self, d: u8) -> bool {
        d == 0 || (d == self.top && self.kinds == RunKinds::Both)
    }

    fn close(&mut self, digit: u8, start: u64, end: u64) {
        let kind = if digit == 0 { RunKind::Zeros } else { RunKind::TopDigit };
        let run = Run { start, end, kind, complete: true };
        self.run_count += 1;
        if self.keep_runs {
            self.runs.push(run);
        }
        if self.monotone.is_empty() || run.len() >= self.record {
            self.monotone.push((start, end));
            self.record = run.len();
        }
    }

    pub fn feed(&mut self, digits: &[u8]) {
        let mut i = 0;
        while i < digits.len() {
            if let Some((c, start, leading)) = self.open {
                // skip the rest of the run in one go
                let rest = &digits[i..];
                let same = rest.iter().position(|&d| d != c).unwrap_or(rest.len());
                i += same;
                self.pos += same as u64;
                if i == digits.len() {
                    return;
                }
                self.open = None;
                if !leading {
                    self.close(c, start, self.pos + 1);
                }
            }
            let d = digits[i];
            i += 1;
            self.pos += 1;
            if self.is_run_digit(d) {
                self.open = Some((d, self.pos - 1, self.pos == 1));
            }
        }
    }

    pub fn finish(self) -> RunDecomposition {
        let incomplete = match self.open {
            Some((c, start, false)) => Some(Run {
                start,
                end: self.pos + 1,
                kind: if c == 0 { RunKind::Zeros } else { RunKind::TopDigit },
                complete: false,
            }),
            _ => None,
        };
        RunDecomposition {
            base: self.base,
            runs: self.runs,
            run_count: self.run_count,
            monotone: self.monotone,
            incomplete,
            horizon: self.pos,
        }
    }
}

/// All runs of 0 and of `b-1` in `digits` and the greedy monotone subsequence.
pub fn run_decomposition(digits: &[u8], b: u32) -> Result<RunDecomposition> {
    run_decomposition_with(digits, b, RunKinds::Both)
}

pub fn run_decomposition_with(digits: &[u8], b: u32, kinds: RunKinds) -> Result<RunDecomposition> {
    if b < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if digits.len() < 2 {
        return Err(Error::InvalidInput("need at least two digits".into()));
    }
    if let Some(&d) = digits.iter().find(|&&d| d as u32 >= b) {
        return Err(Error::InvalidInput(format!("digit {d} out of range for base {b}")));
    }
    let mut s = RunScanner::new(b, kinds);
    s.feed(digits);
    let dec = s.finish();
    if dec.run_count == 0 && dec.incomplete.is_none() {
        return Err(Error::NoRuns);
    }
    Ok(dec)
}

/// Rebuilds a word from its runs and the digits outside them.
pub fn reconstruct(dec: &RunDecomposition, others: &[(u64, u8)]) -> DigitWord {
    let mut w = vec![u8::MAX; dec.horizon as usize];
    let top = (dec.base - 1) as u8;
    for r in dec.runs.iter().chain(dec.incomplete.iter()) {
        let d = if r.kind == RunKind::Zeros { 0 } else { top };
        for p in r.start + 1..r.end.min(dec.horizon + 1) {
            w[p as usize - 1] = d;
        }
    }
    for &(p, d) in others {
        w[p as usize - 1] = d;
    }
    w
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::numerics::format_rational(q))
}

fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub k: usize,
    pub n: u64,
    pub m: u64,
    /// `(m_k - n_k) / n_k`.
    #[serde(serialize_with = "ser_rational")]
    pub v: BigRational,
    /// `(m_k - n_k) / n_{k+1}`, once `n_{k+1}` is known.
    #[serde(serialize_with = "ser_opt_rational")]
    pub v_hat: Option<BigRational>,
}

/// Finite-horizon surrogates for `v_b` and `v̂_b`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentEstimate {
    #[serde(serialize_with = "ser_rational")]
    pub v: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub v_hat: BigRational,
    pub trajectory: Vec<TrajectoryPoint>,
    pub window: usize,
    pub horizon: u64,
    /// `k / log n_k` at the last entry, the empirical counterpart of `C`.
    pub log_ratio: Option<f64>,
}

impl ExponentEstimate {
    /// Both exponents zero: no runs were found.
    pub fn zero(horizon: u64) -> ExponentEstimate {
        ExponentEstimate {
            v: BigRational::zero(),
            v_hat: BigRational::zero(),
            trajectory: Vec::new(),
            window: 0,
            horizon,
            log_ratio: None,
        }
    }

    pub fn v_f64(&self) -> f64 {
        self.v.to_f64().unwrap_or(f64::NAN)
    }

    pub fn v_hat_f64(&self) -> f64 {
        self.v_hat.to_f64().unwrap_or(f64::NAN)
    }
}

/// Default tail window `max(3, k/2)`.
pub fn default_window(k: usize) -> usize {
    (k / 2).max(3)
}

/// Max over the tail window of `(m_k-n_k)/n_k` and min of `(m_k-n_k)/n_{k+1}`.
pub fn estimate_exponents(dec: &RunDecomposition) -> Result<ExponentEstimate> {
    estimate_exponents_window(dec, default_window(dec.monotone.len()))
}

pub fn estimate_exponents_window(dec: &RunDecomposition, window: usize) -> Result<ExponentEstimate> {
    let k = dec.monotone.len();
    if k < 2 {
        return Err(Error::InsufficientDepth(format!("{k} monotone runs, need 2")));
    }
    let next = dec.successors();
    let trajectory: Vec<TrajectoryPoint> = dec
        .monotone
        .iter()
        .zip(&next)
        .enumerate()
        .map(|(i, (&(n, m), nx))| TrajectoryPoint {
            k: i + 1,
            n,
            m,
            v: ratio(m - n, n.max(1)),
            v_hat: nx.map(|nx| ratio(m - n, nx)),
        })
        .collect();
    let w = window.clamp(1, k);
    let tail = &trajectory[k - w..];
    let v = tail.iter().map(|p| p.v.clone()).max().unwrap();
    let v_hat = tail
        .iter()
        .filter_map(|p| p.v_hat.clone())
        .min()
        .or_else(|| trajectory.iter().rev().find_map(|p| p.v_hat.clone()))
        .unwrap_or_else(BigRational::zero);
    let log_ratio = trajectory
        .last()
        .filter(|p| p.n > 1)
        .map(|p| p.k as f64 / (p.n as f64).ln());
    Ok(ExponentEstimate { v, v_hat, trajectory, window: w, horizon: dec.horizon, log_ratio })
}

/// Like [`estimate_exponents`] on a word, but reports zero exponents when
/// the word has too few runs.
pub fn estimate_or_zero(digits: &[u8], b: u32) -> Result<ExponentEstimate> {
    match run_decomposition(digits, b) {
        Ok(dec) => match estimate_exponents(&dec) {
            Ok(e) => Ok(e),
            Err(Error::InsufficientDepth(_)) => Ok(ExponentEstimate::zero(dec.horizon)),
            Err(e) => Err(e),
        },
        Err(Error::NoRuns) => Ok(ExponentEstimate::zero(digits.len() as u64)),
        Err(e) => Err(e),
    }
}

/// The inequalities between the two exponents, each with slack `tol`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// `v̂ <= v`.
    pub ordered: bool,
    /// `v̂ <= v/(1+v) + tol`.
    pub uniform_bound: bool,
    /// `v >= v̂/(1-v̂) - tol`.
    pub asymptotic_bound: bool,
}

impl RelationReport {
    pub fn all(&self) -> bool {
        self.ordered && self.uniform_bound && self.asymptotic_bound
    }
}

pub fn check_relations(v: &BigRational, v_hat: &BigRational, tol: &BigRational) -> RelationReport {
    let one = BigRational::one();
    let ordered = v_hat <= &(v + tol);
    let uniform_bound = v_hat <= &(v / (&one + v) + tol);
    let asymptotic_bound = if v_hat >= &one {
        false
    } else {
        v >= &(v_hat / (&one - v_hat) - tol)
    };
    RelationReport { ordered, uniform_bound, asymptotic_bound }
}

pub fn check_estimate(est: &ExponentEstimate, tol: &BigRational) -> RelationReport {
    check_relations(&est.v, &est.v_hat, tol)
}

/// Restricted digit set `S ⊂ {0, …, b-1}` for `K_{b,S}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitSet {
    base: u32,
    digits: Vec<u8>,
}

impl std::fmt::Display for DigitSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.digits.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", d.join(","))
    }
}

impl DigitSet {
    pub fn new(base: u32, digits: &[u8]) -> Result<DigitSet> {
        if !(3..=256).contains(&base) {
            return Err(Error::InvalidDigitSet(format!("base {base} outside 3..=256")));
        }
        let set: BTreeSet<u8> = digits.iter().copied().collect();
        if let Some(&d) = set.iter().find(|&&d| d as u32 >= base) {
            return Err(Error::InvalidDigitSet(format!("digit {d} out of range for base {base}")));
        }
        if set.len() < 2 {
            return Err(Error::InvalidDigitSet("need at least two digits".into()));
        }
        let top = (base - 1) as u8;
        if !set.contains(&0) && !set.contains(&top) {
            return Err(Error::InvalidDigitSet(format!("must contain 0 or {top}")));
        }
        Ok(DigitSet { base, digits: set.into_iter().collect() })
    }

    /// Parses `0,2` or `{0,2}`.
    pub fn parse(base: u32, s: &str) -> Result<DigitSet> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        let digits = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<u8>().map_err(|_| Error::InvalidDigitSet(format!("bad digit {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        DigitSet::new(base, &digits)
    }

    pub fn full(base: u32) -> Result<DigitSet> {
        let all: Vec<u8> = (0..base.min(256)).map(|d| d as u8).collect();
        DigitSet::new(base, &all)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn contains(&self, d: u8) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.digits.len() == self.base as usize
    }

    /// Digit the long runs are made of: 0 when available, else `b-1`.
    pub fn run_digit(&self) -> u8 {
        if self.contains(0) {
            0
        } else {
            (self.base - 1) as u8
        }
    }

    /// Bracket and marker digit: 1 when available, else the smallest nonzero
    /// element. Never equal to the run digit.
    pub fn marker_digit(&self) -> u8 {
        if self.contains(1) {
            1
        } else {
            *self.digits.iter().find(|&&d| d != 0).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rational_examples() {
        assert_eq!(expand_rational(1, 3, 3, 5).unwrap(), vec![1, 0, 0, 0, 0]);
        assert_eq!(expand_rational(1, 3, 2, 6).unwrap(), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(expand_rational(1, 7, 10, 7).unwrap(), vec![1, 4, 2, 8, 5, 7, 1]);
        assert!(expand_rational(3, 3, 10, 2).is_err());
    }

    #[test]
    fn lacunary_examples() {
        let one = LacunaryRule::Power(q(1, 1));
        assert_eq!(expand_lacunary(10, &one, 10).unwrap(), vec![0, 1, 0, 1, 0, 0, 0, 1, 0, 0]);
        assert_eq!(expand_lacunary(10, &LacunaryRule::SquaredPower, 5).unwrap(), vec![0, 1, 0, 0, 0]);
        assert_eq!(expand_lacunary(2, &one, 4).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(LacunaryRule::SquaredPower.positions(1 << 20).unwrap(), vec![2, 16, 512, 65536]);
        assert_eq!(LacunaryRule::Power(q(1, 2)).positions(10).unwrap(), vec![1, 2, 3, 5, 7]);
    }

    #[test]
    fn run_examples() {
        let w = expand_lacunary(10, &LacunaryRule::Power(q(1, 1)), 16).unwrap();
        let dec = run_decomposition(&w, 10).unwrap();
        let pairs: Vec<_> = dec.runs.iter().map(|r| (r.start, r.end)).collect();
        assert_eq!(pairs, vec![(2, 4), (4, 8), (8, 16)]);
        assert_eq!(dec.monotone, pairs);

        assert_eq!(run_decomposition(&[1; 10], 3).unwrap_err(), Error::NoRuns);

        let dec = run_decomposition(&[1, 0, 0, 1, 0, 1], 2).unwrap();
        let zeros: Vec<_> =
            dec.runs.iter().filter(|r| r.kind == RunKind::Zeros).map(|r| (r.start, r.end)).collect();
        assert_eq!(zeros, vec![(1, 4), (4, 6)]);
        assert_eq!(dec.runs[0].interior(), 2);
        let ones: Vec<_> =
            dec.runs.iter().filter(|r| r.kind == RunKind::TopDigit).map(|r| (r.start, r.end)).collect();
        assert_eq!(ones, vec![(3, 5)]);
        assert_eq!(dec.incomplete.map(|r| r.start), Some(5));
    }

    #[test]
    fn chunked_feed_matches_whole() {
        let w = expand_rational(12345, 99991, 3, 3000).unwrap();
        let whole = run_decomposition(&w, 3).unwrap();
        let mut s = RunScanner::new(3, RunKinds::Both);
        for c in w.chunks(7) {
            s.feed(c);
        }
        let chunked = s.finish();
        assert_eq!(whole.runs, chunked.runs);
        assert_eq!(whole.monotone, chunked.monotone);
        assert_eq!(whole.incomplete, chunked.incomplete);
    }

    #[test]
    fn lacunary_exponents() {
        let w = expand_lacunary(10, &LacunaryRule::Power(q(1, 1)), 1 << 16).unwrap();
        let e = estimate_exponents(&run_decomposition(&w, 10).unwrap()).unwrap();
        assert_eq!(e.v, q(1, 1));
        assert_eq!(e.v_hat, q(1, 2));
        assert!(check_estimate(&e, &q(0, 1)).all());
    }

    #[test]
    fn no_runs_reports_zero() {
        let e = estimate_or_zero(&[1; 50], 3).unwrap();
        assert!(e.v.is_zero() && e.v_hat.is_zero());
        let dec = run_decomposition(&[1, 0, 1, 1, 1], 3).unwrap();
        assert!(matches!(estimate_exponents(&dec), Err(Error::InsufficientDepth(_))));
    }

    #[test]
    fn relation_examples() {
        let z = q(0, 1);
        assert!(check_relations(&q(1, 1), &q(1, 2), &z).all());
        assert!(!check_relations(&q(1, 1), &q(9, 10), &z).all());
        assert!(check_relations(&q(3, 1), &q(3, 4), &z).all());
    }

    #[test]
    fn rationals_have_vanishing_exponents() {
        for (p, qq, b) in [(1u64, 7u64, 10u32), (1, 3, 2), (5, 13, 3), (2, 11, 2), (1, 99, 10), (7, 9, 4)] {
            let w = expand_rational(p, qq, b, 20000).unwrap();
            let e = estimate_or_zero(&w, b).unwrap();
            assert!(e.v_f64() < 0.01 && e.v_hat_f64() < 0.01, "{p}/{qq} base {b}: {}", e.v);
        }
    }

    #[test]
    fn digit_set_rules() {
        let s = DigitSet::new(3, &[0, 2]).unwrap();
        assert_eq!((s.run_digit(), s.marker_digit(), s.len()), (0, 2, 2));
        assert!(matches!(DigitSet::new(5, &[1, 2, 3]), Err(Error::InvalidDigitSet(_))));
        assert!(matches!(DigitSet::new(2, &[0, 1]), Err(Error::InvalidDigitSet(_))));
        assert!(matches!(DigitSet::new(3, &[0]), Err(Error::InvalidDigitSet(_))));
        let t = DigitSet::new(4, &[2, 3]).unwrap();
        assert_eq!((t.run_digit(), t.marker_digit()), (3, 2));
        assert!(DigitSet::parse(10, "{0, 9}").unwrap().contains(9));
    }

    // every maximal block of run digits, found the slow way
    fn brute_runs(w: &[u8], b: u32) -> Vec<(u64, u64)> {
        let top = (b - 1) as u8;
        let mut out = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let d = w[i];
            if d == 0 || d == top {
                let mut j = i;
                while j < w.len() && w[j] == d {
                    j += 1;
                }
                if i > 0 && j < w.len() {
                    out.push((i as u64, j as u64 + 1));
                }
                i = j;
            } else {
                i += 1;
            }
        }
        out.sort();
        out
    }

    fn brute_monotone(runs: &[(u64, u64)]) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for &(n, m) in runs {
            if out.last().map_or(true, |&(a, c)| m - n >= c - a) {
                out.push((n, m));
            }
        }
        out
    }

    proptest! {
        #[test]
        fn runs_match_brute_force(b in 2u32..5, w in proptest::collection::vec(0u8..4, 2..200)) {
            let w: Vec<u8> = w.into_iter().map(|d| d % b as u8).collect();
            let mut s = RunScanner::new(b, RunKinds::Both);
            s.feed(&w);
            let dec = s.finish();
            let mut got: Vec<_> = dec.runs.iter().map(|r| (r.start, r.end)).collect();
            got.sort();
            let brute = brute_runs(&w, b);
            prop_assert_eq!(&got, &brute);
            prop_assert_eq!(dec.monotone.clone(), brute_monotone(&got));
            for win in dec.monotone.windows(2) {
                prop_assert!(win[1].1 - win[1].0 >= win[0].1 - win[0].0);
            }
        }

        #[test]
        fn reconstruction_round_trip(b in 2u32..6, w in proptest::collection::vec(0u8..6, 2..200)) {
            let w: Vec<u8> = w.into_iter().map(|d| d % b as u8).collect();
            let mut s = RunScanner::new(b, RunKinds::Both);
            s.feed(&w);
            let dec = s.finish();
            let mut covered = vec![false; w.len()];
            for r in dec.runs.iter().chain(dec.incomplete.iter()) {
                for p in r.start + 1..r.end.min(dec.horizon + 1) {
                    covered[p as usize - 1] = true;
                }
            }
            let others: Vec<(u64, u8)> =
                (0..w.len()).filter(|&i| !covered[i]).map(|i| (i as u64 + 1, w[i])).collect();
            prop_assert_eq!(reconstruct(&dec, &others), w);
        }

        #[test]
        fn long_division_is_exact(p in 0u64..1000, extra in 1u64..1000, b in 2u32..17) {
            let qq = p + extra;
            let w = expand_rational(p, qq, b, 30).unwrap();
            // p/q - Σ a_i b^-i lies in [0, b^-30)
            let mut acc = BigRational::zero();
            let mut scale = BigRational::one();
            for &d in &w {
                scale /= BigRational::from_integer(b.into());
                acc += &scale * BigRational::from_integer(d.into());
            }
            let diff = q(p as i64, qq as i64) - acc;
            prop_assert!(!diff.is_negative());
            prop_assert!(diff < scale);
        }
    }
}
