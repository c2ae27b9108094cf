//! Cantor-type constructions: run schedules, digit layouts and generators
//! for the b-ary, restricted-digit, β and parameter-space cases.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bary::DigitSet;
use crate::beta_shift::{is_self_admissible, parry_invert_prefix, BetaSystem, ParryEnclosure, TransitionTable};
use crate::error::{Error, Result};
use crate::numerics::format_rational;
use crate::words::{DigitWord, UltimatelyPeriodicWord};

const CHUNK: usize = 1 << 16;
const MAX_INDEX: u64 = 1 << 60;

/// Rejects `θ < 1/(1-v̂)` and `v̂` outside `(0, 1)`.
pub fn check_feasible(theta: &BigRational, v_hat: &BigRational) -> Result<()> {
    let one = BigRational::one();
    if !v_hat.is_positive() || v_hat >= &one {
        return Err(Error::InfeasibleParameters(format!("v_hat = {} not in (0, 1)", format_rational(v_hat))));
    }
    // θ (1 - v̂) >= 1
    if theta * (&one - v_hat) < one {
        return Err(Error::InfeasibleParameters(format!(
            "theta = {} below 1/(1 - v_hat) = {}",
            format_rational(theta),
            format_rational(&(&one / (&one - v_hat)))
        )));
    }
    Ok(())
}

/// Extra indices of the β layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaIndices {
    pub big_n: u64,
    pub l: Vec<u64>,
    pub h: Vec<u64>,
    pub delta: Vec<u64>,
    pub u: Vec<u64>,
}

/// The adjusted sequences `n_k < m_k <= n_{k+1}` with `m_k - n_k` non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledRuns {
    pub theta: String,
    pub v_hat: String,
    pub n: Vec<u64>,
    pub m: Vec<u64>,
    pub t: Vec<u64>,
    /// `n_{K+1}`, which fixes `t_K`.
    pub n_next: u64,
    /// Width of a marker: 1, or 2 for the binary `10` block.
    pub marker_width: u64,
    pub beta: Option<BetaIndices>,
}

fn floor_u64(x: &BigRational) -> Result<u64> {
    x.floor()
        .to_integer()
        .to_u64()
        .filter(|&v| v < MAX_INDEX)
        .ok_or_else(|| Error::InvalidInput("schedule index overflow".into()))
}

/// Raw `(n'_k, m'_k) = (⌊θ^k⌋, ⌊(θv̂+1) n'_k⌋)` for `k = 1..=count`.
pub fn raw_sequences(theta: &BigRational, v_hat: &BigRational, count: usize) -> Result<Vec<(u64, u64)>> {
    let scale = theta * v_hat + BigRational::one();
    let mut pow = BigRational::one();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        pow = &pow * theta;
        let n = floor_u64(&pow)?;
        let m = floor_u64(&(&scale * BigRational::from_integer(BigInt::from(n))))?;
        out.push((n, m));
    }
    Ok(out)
}

fn adjust(raw: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(raw.len());
    for &(np, mp) in raw {
        let (n, gap) = match out.last() {
            None => (np.max(1), (mp - np).max(1)),
            Some(&(pn, pm)) => (np.max(pm), (mp - np).max(pm - pn).max(1)),
        };
        out.push((n, n + gap));
    }
    out
}

/// Largest `t >= 0` with a marker block at `m + t(m-n)` ending before `next`.
fn marker_count(n: u64, m: u64, next: u64, width: u64) -> u64 {
    let last = next.saturating_sub(width);
    if last < m {
        0
    } else {
        (last - m) / (m - n)
    }
}

impl ScheduledRuns {
    /// Schedule with `stages` stages.
    pub fn new(theta: &BigRational, v_hat: &BigRational, stages: usize, marker_width: u64) -> Result<ScheduledRuns> {
        check_feasible(theta, v_hat)?;
        if stages == 0 {
            return Err(Error::InvalidInput("need at least one stage".into()));
        }
        let seq = adjust(&raw_sequences(theta, v_hat, stages + 1)?);
        let (n, m): (Vec<u64>, Vec<u64>) = seq[..stages].iter().copied().unzip();
        let n_next = seq[stages].0;
        let t = (0..stages)
            .map(|k| marker_count(n[k], m[k], if k + 1 < stages { n[k + 1] } else { n_next }, marker_width))
            .collect();
        Ok(ScheduledRuns {
            theta: format_rational(theta),
            v_hat: format_rational(v_hat),
            n,
            m,
            t,
            n_next,
            marker_width,
            beta: None,
        })
    }

    /// Smallest schedule whose stages cover `depth` digits.
    pub fn covering(theta: &BigRational, v_hat: &BigRational, depth: u64, marker_width: u64) -> Result<ScheduledRuns> {
        let mut k = 1;
        loop {
            let s = ScheduledRuns::new(theta, v_hat, k, marker_width)?;
            if s.n_next > depth {
                return Ok(s);
            }
            k += 1;
        }
    }

    /// Adds `l_k, h_k, δ_k, u_k` for blocks `0^N 1 0^N`.
    pub fn with_beta_indices(mut self, big_n: u64) -> ScheduledRuns {
        let nn = big_n;
        let mut b = BetaIndices { big_n, l: vec![], h: vec![], delta: vec![], u: vec![] };
        let mut tsum = 0;
        for k in 0..self.stages() {
            let kk = k as u64 + 1;
            let (n, m, t) = (self.n[k], self.m[k], self.t[k]);
            let l = n + (4 * kk - 4) * nn + 2 * nn * tsum;
            let h = m + 4 * kk * nn + 2 * nn * tsum;
            b.l.push(l);
            b.h.push(h);
            b.delta.push(m - n - 1);
            b.u.push(h + t * (m - n) + 2 * nn * t);
            tsum += t;
        }
        self.beta = Some(b);
        self
    }

    pub fn stages(&self) -> usize {
        self.n.len()
    }

    /// `n_{k+1}` for 0-based stage `k`.
    pub fn next_n(&self, k: usize) -> u64 {
        if k + 1 < self.stages() {
            self.n[k + 1]
        } else {
            self.n_next
        }
    }

    pub fn delta(&self, k: usize) -> u64 {
        self.m[k] - self.n[k] - 1
    }

    /// `l_{K+1}`, the start of the first block after the last stage.
    pub fn next_l(&self) -> Option<u64> {
        let b = self.beta.as_ref()?;
        let k = self.stages() as u64;
        Some(self.n_next + 4 * k * b.big_n + 2 * b.big_n * self.t.iter().sum::<u64>())
    }

    /// `((m_k-n_k)/n_k, (m_k-n_k)/n_{k+1})` along the schedule.
    pub fn limits(&self) -> Vec<(f64, f64)> {
        (0..self.stages())
            .map(|k| {
                let d = (self.m[k] - self.n[k]) as f64;
                (d / self.n[k] as f64, d / self.next_n(k) as f64)
            })
            .collect()
    }
}

/// `schedule(θ, v̂, K)` with single-digit markers.
pub fn schedule(theta: &BigRational, v_hat: &BigRational, stages: usize) -> Result<ScheduledRuns> {
    ScheduledRuns::new(theta, v_hat, stages, 1)
}

/// A constant run of prescribed digits `[start, start+len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub start: u64,
    pub len: u64,
    pub digit: u8,
}

impl Piece {
    pub fn end(&self) -> u64 {
        self.start + self.len
    }
}

/// A maximal block of free positions `[start, start+len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub start: u64,
    pub len: u64,
    /// 0-based stage whose run bound applies.
    pub stage: usize,
}

/// Prescribed positions of a construction, merged and sorted.
#[derive(Clone, Debug, Serialize)]
pub struct Layout {
    pieces: Vec<Piece>,
    /// First prescribed position of each stage.
    stage_starts: Vec<u64>,
    /// Longest run of a run digit a free position may join, per stage.
    caps: Vec<u64>,
    /// Positions before this are laid out; beyond it nothing is prescribed yet.
    extent: u64,
}

impl Layout {
    fn build(mut raw: Vec<Piece>, stage_starts: Vec<u64>, caps: Vec<u64>, extent: u64) -> Result<Layout> {
        raw.retain(|p| p.len > 0);
        raw.sort_by_key(|p| (p.start, p.len));
        let mut pieces: Vec<Piece> = Vec::with_capacity(raw.len());
        for p in raw {
            if let Some(last) = pieces.last_mut() {
                if p.start < last.end() {
                    if p.digit != last.digit {
                        return Err(Error::InvalidInput(format!(
                            "layout conflict at position {}: {} vs {}",
                            p.start, last.digit, p.digit
                        )));
                    }
                    last.len = last.len.max(p.end() - last.start);
                    continue;
                }
                if p.start == last.end() && p.digit == last.digit {
                    last.len += p.len;
                    continue;
                }
            }
            pieces.push(p);
        }
        Ok(Layout { pieces, stage_starts, caps, extent })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn extent(&self) -> u64 {
        self.extent
    }

    pub fn cap(&self, stage: usize) -> u64 {
        self.caps[stage.min(self.caps.len() - 1)]
    }

    fn owning_stage(&self, pos: u64) -> usize {
        match self.stage_starts.partition_point(|&s| s < pos) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Number of prescribed positions in `[1, n]`.
    pub fn prescribed_upto(&self, n: u64) -> u64 {
        let mut c = 0;
        for p in &self.pieces {
            if p.start > n {
                break;
            }
            c += p.end().min(n + 1) - p.start;
        }
        c
    }

    /// Number of free positions in `[1, n]`.
    pub fn free_upto(&self, n: u64) -> u64 {
        n - self.prescribed_upto(n)
    }

    /// Free gaps inside `[1, depth]`.
    pub fn gaps(&self, depth: u64) -> Vec<Gap> {
        let mut out = Vec::new();
        let mut pos = 1;
        for p in self.pieces.iter().chain(std::iter::once(&Piece { start: depth + 1, len: 0, digit: 0 })) {
            let end = p.start.min(depth + 1);
            if end > pos {
                out.push(Gap { start: pos, len: end - pos, stage: self.owning_stage(pos) });
            }
            pos = pos.max(p.end());
            if pos > depth {
                break;
            }
        }
        out
    }

    /// Prescribed digit at `pos`, if any.
    pub fn digit_at(&self, pos: u64) -> Option<u8> {
        let i = self.pieces.partition_point(|p| p.end() <= pos);
        self.pieces.get(i).filter(|p| p.start <= pos).map(|p| p.digit)
    }

    /// Same-digit prescribed chain starting at `pos`: its digit and length.
    fn chain_at(&self, pos: u64) -> Option<(u8, u64)> {
        let i = self.pieces.partition_point(|p| p.end() <= pos);
        let first = self.pieces.get(i).filter(|p| p.start == pos)?;
        let mut len = first.len;
        let mut end = first.end();
        for p in &self.pieces[i + 1..] {
            if p.start != end || p.digit != first.digit {
                break;
            }
            len += p.len;
            end = p.end();
        }
        Some((first.digit, len))
    }
}

/// Layout of the b-ary construction: `a_{n_k} = a_{m_k} = marker`, run digit
/// strictly between, markers at `m_k + t(m_k - n_k)`.
pub fn bary_layout(s: &ScheduledRuns, run_digit: u8, marker: u8, binary: bool, non_run_free: bool) -> Result<Layout> {
    let mut raw = Vec::new();
    let mut starts = Vec::new();
    let mut caps = Vec::new();
    for k in 0..s.stages() {
        let (n, m, t) = (s.n[k], s.m[k], s.t[k]);
        starts.push(n);
        let delta = m - n - 1;
        caps.push(if non_run_free { delta.saturating_sub(1) } else { delta.saturating_sub(1).max(1) });
        raw.push(Piece { start: n, len: 1, digit: marker });
        raw.push(Piece { start: n + 1, len: delta, digit: run_digit });
        raw.push(Piece { start: m, len: 1, digit: marker });
        for j in 1..=t {
            let p = m + j * (m - n);
            raw.push(Piece { start: p, len: 1, digit: marker });
            if binary {
                raw.push(Piece { start: p + 1, len: 1, digit: 0 });
            }
        }
    }
    Layout::build(raw, starts, caps, s.n_next)
}

/// Layout of the β construction: each `1` becomes `0^N 1 0^N`.
pub fn beta_layout(s: &ScheduledRuns) -> Result<Layout> {
    let b = s.beta.as_ref().ok_or_else(|| Error::InvalidInput("schedule lacks beta indices".into()))?;
    let nn = b.big_n;
    let block = |raw: &mut Vec<Piece>, at: u64| {
        raw.push(Piece { start: at, len: nn, digit: 0 });
        raw.push(Piece { start: at + nn, len: 1, digit: 1 });
        raw.push(Piece { start: at + nn + 1, len: nn, digit: 0 });
    };
    let mut raw = Vec::new();
    let mut starts = Vec::new();
    let mut caps = Vec::new();
    for k in 0..s.stages() {
        let (l, h, delta, t) = (b.l[k], b.h[k], b.delta[k], s.t[k]);
        let gap = s.m[k] - s.n[k];
        starts.push(l);
        caps.push(delta + 2 * nn - 1);
        block(&mut raw, l);
        raw.push(Piece { start: l + 2 * nn + 1, len: delta, digit: 0 });
        block(&mut raw, h - 2 * nn);
        for j in 1..=t {
            block(&mut raw, h + j * gap + 2 * nn * (j - 1));
        }
    }
    let extent = s.next_l().unwrap();
    Layout::build(raw, starts, caps, extent)
}

/// How free positions are filled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    Constant(u8),
    /// Uniform over the allowed digits, from a ChaCha stream with this seed.
    Seeded(u64),
    /// Caller digits, cycled.
    Stream(Vec<u8>),
}

impl FillPolicy {
    /// Parses `const:<d>`, `seed:<s>` or `stream:<digits>`.
    pub fn parse(s: &str) -> Result<FillPolicy> {
        let bad = || Error::InvalidInput(format!("unrecognised fill policy {s:?}"));
        let (k, v) = s.split_once(':').ok_or_else(bad)?;
        match k {
            "const" => Ok(FillPolicy::Constant(v.trim().parse().map_err(|_| bad())?)),
            "seed" => Ok(FillPolicy::Seeded(v.trim().parse().map_err(|_| bad())?)),
            "stream" => {
                let d = crate::words::parse_digit_string(v)?;
                if d.is_empty() {
                    return Err(bad());
                }
                Ok(FillPolicy::Stream(d))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClampEvent {
    pub position: u64,
    pub wanted: u8,
    pub used: u8,
}

/// Every place where the fill policy's digit was replaced.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClampLog {
    pub count: u64,
    /// The first few events.
    pub samples: Vec<ClampEvent>,
}

impl ClampLog {
    fn push(&mut self, e: ClampEvent) {
        self.count += 1;
        if self.samples.len() < 32 {
            self.samples.push(e);
        }
    }
}

enum Source<'a> {
    Constant(u8),
    Rng(ChaCha8Rng),
    Stream(&'a [u8], usize),
}

impl Source<'_> {
    fn new(p: &FillPolicy) -> Source<'_> {
        match p {
            FillPolicy::Constant(c) => Source::Constant(*c),
            FillPolicy::Seeded(s) => Source::Rng(ChaCha8Rng::seed_from_u64(*s)),
            FillPolicy::Stream(v) => Source::Stream(v, 0),
        }
    }

    /// A digit; `options` is the number of allowed choices when drawing at random.
    #[inline]
    fn next(&mut self, options: usize) -> Digit {
        match self {
            Source::Constant(c) => Digit::Value(*c),
            Source::Rng(r) => Digit::Index(r.gen_range(0..options)),
            Source::Stream(v, i) => {
                let d = v[*i % v.len()];
                *i += 1;
                Digit::Value(d)
            }
        }
    }
}

enum Digit {
    Value(u8),
    Index(usize),
}

/// Digits a free position may take.
enum Alphabet {
    Digits(Vec<u8>),
    Shift(TransitionTable),
}

struct Emitter<'a, F: FnMut(&[u8])> {
    buf: Vec<u8>,
    sink: F,
    pos: u64,
    run_digit: u8,
    run_len: u64,
    is_run: [bool; 256],
    state: u32,
    table: Option<&'a TransitionTable>,
}

impl<F: FnMut(&[u8])> Emitter<'_, F> {
    #[inline]
    fn push(&mut self, d: u8) -> Result<()> {
        if let Some(t) = self.table {
            self.state = t
                .step(self.state, d)
                .ok_or_else(|| Error::NotAdmissible(format!("digit {d} at position {}", self.pos + 1)))?;
        }
        if d == self.run_digit {
            self.run_len += 1;
        } else {
            self.run_digit = d;
            self.run_len = 1;
        }
        self.pos += 1;
        self.buf.push(d);
        if self.buf.len() == CHUNK {
            (self.sink)(&self.buf);
            self.buf.clear();
        }
        Ok(())
    }

    fn flush(&mut self) {
        if !self.buf.is_empty() {
            (self.sink)(&self.buf);
            self.buf.clear();
        }
    }

    /// Length of the run that `d` would end up in.
    #[inline]
    fn run_with(&self, d: u8, chain: Option<(u8, u64)>) -> u64 {
        let before = if d == self.run_digit { self.run_len } else { 0 };
        let after = match chain {
            Some((c, l)) if c == d => l,
            _ => 0,
        };
        before + 1 + after
    }
}

fn emit_layout<F: FnMut(&[u8])>(
    layout: &Layout,
    alphabet: &Alphabet,
    run_digits: &[u8],
    fill: &FillPolicy,
    depth: u64,
    sink: F,
) -> Result<ClampLog> {
    if depth > layout.extent() {
        return Err(Error::DepthExceeded { requested: depth, available: layout.extent() });
    }
    if let (FillPolicy::Constant(c), Alphabet::Digits(a)) = (fill, alphabet) {
        if !a.contains(c) {
            return Err(Error::InvalidInput(format!("fill digit {c} not in the alphabet")));
        }
    }
    let mut is_run = [false; 256];
    for &d in run_digits {
        is_run[d as usize] = true;
    }
    let table = match alphabet {
        Alphabet::Shift(t) => Some(t),
        Alphabet::Digits(_) => None,
    };
    let mut em = Emitter {
        buf: Vec::with_capacity(CHUNK),
        sink,
        pos: 0,
        run_digit: u8::MAX,
        run_len: 0,
        is_run,
        state: 0,
        table,
    };
    let mut src = Source::new(fill);
    let mut log = ClampLog::default();
    let mut pieces = layout.pieces().iter().peekable();
    while em.pos < depth {
        let next_start = pieces.peek().map_or(u64::MAX, |p| p.start);
        if em.pos + 1 >= next_start {
            let p = pieces.next().unwrap();
            for _ in em.pos + 1..p.end().min(depth + 1) {
                em.push(p.digit)?;
            }
            continue;
        }
        // free gap [pos+1, gap_end]
        let gap_end = (next_start - 1).min(depth);
        let cap = layout.cap(layout.owning_stage(em.pos + 1));
        let chain = layout.chain_at(gap_end + 1);
        while em.pos < gap_end {
            let last = em.pos + 1 == gap_end;
            let ch = if last { chain } else { None };
            let options: &[u8] = match alphabet {
                Alphabet::Digits(a) => a,
                Alphabet::Shift(_) => &[],
            };
            let top = match alphabet {
                Alphabet::Shift(t) => t.max_digit(em.state),
                Alphabet::Digits(_) => 0,
            };
            let count = if options.is_empty() { top as usize + 1 } else { options.len() };
            let allowed = |d: u8| if options.is_empty() { d <= top } else { options.contains(&d) };
            let wanted = match src.next(count) {
                Digit::Index(i) => {
                    if options.is_empty() {
                        i as u8
                    } else {
                        options[i]
                    }
                }
                Digit::Value(v) => v,
            };
            let ok = |d: u8| allowed(d) && !(em.is_run[d as usize] && em.run_with(d, ch) > cap);
            let used = if ok(wanted) {
                wanted
            } else {
                let cands: Vec<u8> =
                    if options.is_empty() { (0..=top).collect() } else { options.to_vec() };
                // next acceptable digit after the wanted one, cyclically
                let k = cands.len();
                let from = cands.iter().position(|&d| d > wanted).unwrap_or(0);
                let pick = (0..k).map(|i| cands[(from + i) % k]).find(|&d| ok(d));
                let pick = pick.unwrap_or_else(|| {
                    *cands.iter().min_by_key(|&&d| if em.is_run[d as usize] { em.run_with(d, ch) } else { 0 }).unwrap()
                });
                log.push(ClampEvent { position: em.pos + 1, wanted, used: pick });
                pick
            };
            em.push(used)?;
        }
    }
    em.flush();
    if log.count > 0 {
        log::warn!("fill policy clamped at {} positions (first at {})", log.count, log.samples[0].position);
    }
    Ok(log)
}

/// Parameters shared by every construction.
#[derive(Clone, Debug)]
pub struct ConstructionSpec {
    pub theta: BigRational,
    pub v_hat: BigRational,
    pub fill: FillPolicy,
    /// Number of digits to produce.
    pub depth: u64,
}

impl ConstructionSpec {
    pub fn new(theta: BigRational, v_hat: BigRational, fill: FillPolicy, depth: u64) -> ConstructionSpec {
        ConstructionSpec { theta, v_hat, fill, depth }
    }
}

/// Output of a generator.
#[derive(Clone, Debug)]
pub struct Generated {
    pub digits: DigitWord,
    pub schedule: ScheduledRuns,
    pub clamps: ClampLog,
    /// Stages whose full layout lies within the depth.
    pub complete_stages: usize,
}

/// Everything needed to stream a b-ary or restricted construction.
#[derive(Clone, Debug)]
pub struct BaryPlan {
    pub base: u32,
    pub schedule: ScheduledRuns,
    pub layout: Layout,
    alphabet: Vec<u8>,
    run_digits: Vec<u8>,
}

impl BaryPlan {
    pub fn new(spec: &ConstructionSpec, base: u32, set: Option<&DigitSet>) -> Result<BaryPlan> {
        let width = if base == 2 { 2 } else { 1 };
        let schedule = ScheduledRuns::covering(&spec.theta, &spec.v_hat, spec.depth, width)?;
        BaryPlan::from_schedule(schedule, base, set)
    }

    /// Plan for an explicit schedule, whose marker width must suit the base.
    pub fn from_schedule(schedule: ScheduledRuns, base: u32, set: Option<&DigitSet>) -> Result<BaryPlan> {
        if !(2..=256).contains(&base) {
            return Err(Error::InvalidInput(format!("base {base} outside 2..=256")));
        }
        if let Some(s) = set {
            if s.base() != base {
                return Err(Error::InvalidDigitSet("digit set base differs".into()));
            }
        }
        let top = (base - 1) as u8;
        let binary = base == 2;
        if schedule.marker_width != if binary { 2 } else { 1 } {
            return Err(Error::InvalidInput(format!(
                "marker width {} does not suit base {base}",
                schedule.marker_width
            )));
        }
        let (alphabet, run_digit, marker) = match set {
            Some(s) => (s.digits().to_vec(), s.run_digit(), s.marker_digit()),
            None => ((0..=top).collect::<Vec<u8>>(), 0, 1),
        };
        let run_digits = vec![0, top];
        let non_run_free = alphabet.iter().any(|&d| d != 0 && d != top);
        let layout = bary_layout(&schedule, run_digit, marker, binary, non_run_free)?;
        Ok(BaryPlan { base, schedule, layout, alphabet, run_digits })
    }

    /// Digits a free position may take.
    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    /// Streams `depth` digits in chunks.
    pub fn stream<F: FnMut(&[u8])>(&self, fill: &FillPolicy, depth: u64, sink: F) -> Result<ClampLog> {
        emit_layout(&self.layout, &Alphabet::Digits(self.alphabet.clone()), &self.run_digits, fill, depth, sink)
    }

    pub fn complete_stages(&self, depth: u64) -> usize {
        (0..self.schedule.stages()).filter(|&k| self.schedule.next_n(k) <= depth + 1).count()
    }
}

fn collect(plan_depth: u64, f: impl FnOnce(&mut dyn FnMut(&[u8])) -> Result<ClampLog>) -> Result<(DigitWord, ClampLog)> {
    let mut digits = Vec::with_capacity(plan_depth as usize);
    let log = f(&mut |c: &[u8]| digits.extend_from_slice(c))?;
    Ok((digits, log))
}

/// Digits of a point of `E_{θ,v̂}` in base `b`.
pub fn generate_bary(spec: &ConstructionSpec, base: u32) -> Result<Generated> {
    let plan = BaryPlan::new(spec, base, None)?;
    let (digits, clamps) = collect(spec.depth, |s| plan.stream(&spec.fill, spec.depth, s))?;
    Ok(Generated { digits, complete_stages: plan.complete_stages(spec.depth), schedule: plan.schedule, clamps })
}

/// Digits of a point of `E_{θ,v̂} ∩ K_{b,S}`.
pub fn generate_restricted(spec: &ConstructionSpec, set: &DigitSet) -> Result<Generated> {
    let plan = BaryPlan::new(spec, set.base(), Some(set))?;
    let (digits, clamps) = collect(spec.depth, |s| plan.stream(&spec.fill, spec.depth, s))?;
    Ok(Generated { digits, complete_stages: plan.complete_stages(spec.depth), schedule: plan.schedule, clamps })
}

/// Everything needed to stream a β construction.
#[derive(Clone, Debug)]
pub struct BetaPlan {
    pub schedule: ScheduledRuns,
    pub layout: Layout,
    table: TransitionTable,
}

impl BetaPlan {
    /// Blocks `0^N 1 0^N` and fills from the finite-type shift `fill_system`.
    pub fn new(spec: &ConstructionSpec, fill_system: &BetaSystem, big_n: u64) -> Result<BetaPlan> {
        if big_n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        let table = fill_system.transition_table()?;
        let mut k = 1;
        let schedule = loop {
            let s = ScheduledRuns::new(&spec.theta, &spec.v_hat, k, 1)?.with_beta_indices(big_n);
            if s.next_l().unwrap() > spec.depth {
                break s;
            }
            k += 1;
        };
        let layout = beta_layout(&schedule)?;
        Ok(BetaPlan { schedule, layout, table })
    }

    pub fn stream<F: FnMut(&[u8])>(&self, fill: &FillPolicy, depth: u64, sink: F) -> Result<ClampLog> {
        emit_layout(&self.layout, &Alphabet::Shift(self.table.clone()), &[0], fill, depth, sink)
    }

    pub fn complete_stages(&self, depth: u64) -> usize {
        let b = self.schedule.beta.as_ref().unwrap();
        let mut c = 0;
        for k in 0..self.schedule.stages() {
            let next = b.l.get(k + 1).copied().unwrap_or_else(|| self.schedule.next_l().unwrap());
            if next <= depth + 1 {
                c += 1;
            }
        }
        c
    }
}

/// Digits of a point of the β construction, filled from `Σ_{β_N}`.
pub fn generate_beta(spec: &ConstructionSpec, beta: &BetaSystem, big_n: usize) -> Result<Generated> {
    let beta_n = beta.beta_n(big_n)?;
    generate_beta_with(spec, &beta_n, big_n as u64)
}

/// As [`generate_beta`] with an explicit finite-type fill shift.
pub fn generate_beta_with(spec: &ConstructionSpec, fill_system: &BetaSystem, big_n: u64) -> Result<Generated> {
    let plan = BetaPlan::new(spec, fill_system, big_n)?;
    let (digits, clamps) = collect(spec.depth, |s| plan.stream(&spec.fill, spec.depth, s))?;
    Ok(Generated { digits, complete_stages: plan.complete_stages(spec.depth), schedule: plan.schedule, clamps })
}

/// A parameter-space word and the base it is the expansion of 1 for.
#[derive(Debug)]
pub struct ParameterPoint {
    pub word: DigitWord,
    /// `ε*_1 … ε*_N` of `β₁`.
    pub prefix: DigitWord,
    pub enclosure: ParryEnclosure,
    /// `β̃_N`, the root of `1 = Σ_{i<=N} ε*_i z^-i`.
    pub beta_tilde: BetaSystem,
    pub clamps: ClampLog,
}

/// `ε*_1 … ε*_N 0^N a`, with `a` a β construction for `β̃_N`.
pub fn generate_parameter_space(
    beta0: &BetaSystem,
    beta1: &BetaSystem,
    beta2: &BetaSystem,
    big_n: usize,
    spec: &ConstructionSpec,
) -> Result<ParameterPoint> {
    if !beta0.certainly_less(beta1)? || !beta1.certainly_less(beta2)? {
        return Err(Error::InvalidInput("need beta0 < beta1 < beta2".into()));
    }
    match beta2.expansion_of_one()? {
        Some(w) if w.is_finite() => {}
        _ => return Err(Error::InvalidInput("beta2 must have a finite expansion of 1".into())),
    }
    let eps = beta1.dstar_prefix(big_n)?;
    if eps.last() == Some(&0) {
        return Err(Error::PrefixConditionFailed(format!("ε*_{big_n} = 0")));
    }
    let d0 = beta0.d1_prefix(big_n)?;
    if crate::words::cmp_prefix(&d0, &eps) != Ordering::Less {
        return Err(Error::PrefixConditionFailed(format!(
            "d_beta0(1) starts {} which is not below {}",
            crate::words::format_digits_compact(&d0),
            crate::words::format_digits_compact(&eps)
        )));
    }
    let beta_tilde = beta1.beta_n(big_n)?;
    let fill_system = beta_tilde.beta_n(big_n)?;
    let tail_depth = spec.depth.saturating_sub(2 * big_n as u64).max(1);
    let tail_spec = ConstructionSpec { depth: tail_depth, ..spec.clone() };
    let a = generate_beta_with(&tail_spec, &fill_system, big_n as u64)?;
    let mut word = eps.clone();
    word.extend(std::iter::repeat_n(0, big_n));
    word.extend_from_slice(&a.digits);
    if !is_self_admissible_prefix(&word) {
        return Err(Error::NotSelfAdmissible);
    }
    if !beta2.is_admissible(&word)? {
        return Err(Error::NotAdmissible("word is not in the beta2 shift".into()));
    }
    let enclosure = parry_invert_prefix(&word, beta1.alphabet_top().max(1))?;
    let (lo, hi) = (enclosure.lower.value().clone(), enclosure.upper.value().clone());
    let b0 = beta0.beta(lo.precision_bits())?;
    let b1 = beta1.beta(hi.precision_bits())?;
    if b0.certainly_le(&lo) != Some(true) || hi.certainly_le(&b1) != Some(true) {
        return Err(Error::PrefixConditionFailed("could not certify beta0 < beta < beta1".into()));
    }
    Ok(ParameterPoint { word, prefix: eps, enclosure, beta_tilde, clamps: a.clamps })
}

/// Every shift of the finite word `w` is at most `w` on their common length.
pub fn is_self_admissible_prefix(w: &[u8]) -> bool {
    (1..w.len()).all(|k| crate::words::cmp_prefix(&w[k..], w) != Ordering::Greater)
}

/// Convenience: self-admissibility of the ultimately periodic word `w 0^∞`.
pub fn is_self_admissible_finite(w: &[u8]) -> bool {
    is_self_admissible(&UltimatelyPeriodicWord::finite(w))
}

/// `(m_k-n_k)/n_k` and `(m_k-n_k)/n_{k+1}` deviations from `θv̂` and `v̂`.
pub fn limit_deviation(s: &ScheduledRuns, theta: &BigRational, v_hat: &BigRational) -> Vec<(f64, f64)> {
    let tv = (theta * v_hat).to_f64().unwrap();
    let vh = v_hat.to_f64().unwrap();
    s.limits().into_iter().map(|(a, b)| ((a - tv).abs(), (b - vh).abs())).collect()
}

#[cfg(test)]
mod tests;
