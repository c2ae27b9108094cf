//! Beta-shifts: greedy expansions, the expansion of 1, admissibility,
//! word counts, cylinders and finite-type approximants.
//!
//! Every base is an algebraic number held exactly (a certified root plus
//! arithmetic in `Q(beta)`), so greedy digits and lexicographic tests are
//! decided exactly or fail with an explicit error.

mod orbit;
mod parry;

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use parking_lot::Mutex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    default_search, isolate_root, parse_rational, Certified, NumberField, PolyRoot, RatPoly, Scalar,
    DEFAULT_PRECISION,
};
use crate::words::UltimatelyPeriodicWord;

pub use orbit::OrbitStatus;
pub use parry::{is_self_admissible, parry_invert, parry_invert_prefix, ParryEnclosure};

use orbit::Orbit;

/// Default number of digits of `d_beta(1)` computed before giving up.
pub const DEFAULT_HORIZON: usize = 4096;

/// Counts up to this length are computed exactly; longer ones are bracketed.
pub const EXACT_COUNT_LIMIT: usize = 2048;

/// A base `beta > 1` together with its expansion-of-1 data.
pub struct BetaSystem {
    label: String,
    field: NumberField,
    integer: Option<u32>,
    top: u8,
    horizon: usize,
    orbit: Mutex<Orbit>,
    star: OnceLock<UltimatelyPeriodicWord>,
    counts: Mutex<Vec<BigUint>>,
}

impl fmt::Debug for BetaSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BetaSystem({}, beta≈{})", self.label, self.field.root().value())
    }
}

/// Reply of the automaton: either the next canonical state or a rejection.
pub type Transition = Option<usize>;

/// Summary of Rényi's bounds `beta^n <= #Σ^n <= beta^(n+1)/(beta-1)`.
#[derive(Debug, Clone, Serialize)]
pub struct RenyiCheck {
    pub n: usize,
    pub count: String,
    pub lower: (f64, f64),
    pub upper: (f64, f64),
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl RenyiCheck {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

/// Automaton of a finite-type shift as two flat arrays. From state `j`,
/// digits below `dstar[j]` lead to state 0, `dstar[j]` leads to `next[j]`,
/// larger digits are rejected.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    dstar: Vec<u8>,
    next: Vec<u32>,
}

impl TransitionTable {
    pub fn states(&self) -> usize {
        self.dstar.len()
    }

    /// Largest digit allowed from state `j`.
    #[inline]
    pub fn max_digit(&self, j: u32) -> u8 {
        self.dstar[j as usize]
    }

    #[inline]
    pub fn step(&self, j: u32, c: u8) -> Option<u32> {
        let d = self.dstar[j as usize];
        if c < d {
            Some(0)
        } else if c == d {
            Some(self.next[j as usize])
        } else {
            None
        }
    }

    pub fn accepts(&self, w: &[u8]) -> bool {
        let mut j = 0;
        for &c in w {
            match self.step(j, c) {
                Some(n) => j = n,
                None => return false,
            }
        }
        true
    }
}

/// An `n`-th order basic interval.
#[derive(Debug, Clone)]
pub struct CylinderInterval {
    pub word: Vec<u8>,
    pub left: Scalar,
    pub right: Scalar,
    pub length: Scalar,
    pub full: bool,
}

impl BetaSystem {
    /// Integer base `b >= 2`; `d*(1) = (b-1)^∞`.
    pub fn integer(b: u32) -> Result<BetaSystem> {
        if b < 2 {
            return Err(Error::InvalidInput(format!("integer base must be at least 2, got {b}")));
        }
        if b > 256 {
            return Err(Error::InvalidInput("bases above 256 are not supported".into()));
        }
        BetaSystem::from_root(PolyRoot::exact_integer(b), format!("int:{b}"))
    }

    /// The root of `1 = sum c_i z^-i` greater than 1.
    pub fn from_coefficients(c: &[BigRational]) -> Result<BetaSystem> {
        if c.iter().any(|x| x < &BigRational::zero()) {
            return Err(Error::InvalidInput("coefficients must be nonnegative".into()));
        }
        let root = isolate_root(c, default_search(c))?;
        let label = format!(
            "root:{}",
            c.iter().map(crate::numerics::format_rational).collect::<Vec<_>>().join(",")
        );
        BetaSystem::from_root(root, label)
    }

    /// Parry inversion of a self-admissible word.
    pub fn from_word(w: &UltimatelyPeriodicWord) -> Result<BetaSystem> {
        let root = parry_invert(w)?;
        BetaSystem::from_root(root, format!("word:{w}"))
    }

    pub fn from_root(root: PolyRoot, label: String) -> Result<BetaSystem> {
        let integer = root.exact_rational().and_then(|q| if q.is_integer() { q.to_integer().to_u32() } else { None });
        let field = NumberField::new(root);
        let top = match integer {
            Some(b) => (b - 1) as u8,
            None => {
                let f = field.floor(&field.generator())?;
                f.to_u8().ok_or_else(|| Error::InvalidInput("base too large".into()))?
            }
        };
        let star = OnceLock::new();
        if integer.is_some() {
            let _ = star.set(UltimatelyPeriodicWord::periodic(&[], &[top]));
        }
        Ok(BetaSystem {
            label,
            field,
            integer,
            top,
            horizon: DEFAULT_HORIZON,
            orbit: Mutex::new(Orbit::new()),
            star,
            counts: Mutex::new(vec![BigUint::one()]),
        })
    }

    /// Parses `int:<k>`, `root:<c1,...>`, `word:<prefix>(<period>)` or `approx:<spec>:<N>`.
    pub fn parse(spec: &str) -> Result<BetaSystem> {
        let spec = spec.trim();
        let bad = || Error::InvalidInput(format!("unrecognised beta spec {spec:?}"));
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "int" => BetaSystem::integer(rest.trim().parse().map_err(|_| bad())?),
            "root" => {
                let c = rest.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
                if c.is_empty() {
                    return Err(bad());
                }
                BetaSystem::from_coefficients(&c)
            }
            "word" => BetaSystem::from_word(&UltimatelyPeriodicWord::parse(rest)?),
            "approx" => {
                let (inner, n) = rest.rsplit_once(':').ok_or_else(bad)?;
                let n: usize = n.trim().parse().map_err(|_| bad())?;
                BetaSystem::parse(inner)?.beta_n(n)
            }
            _ => Err(bad()),
        }
    }

    /// Overrides the certification horizon for `d_beta(1)`.
    pub fn with_horizon(mut self, h: usize) -> Self {
        self.horizon = h.max(1);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn root(&self) -> &PolyRoot {
        self.field.root()
    }

    /// Enclosure of `beta` with width at most `2^-bits`.
    pub fn beta(&self, bits: u32) -> Result<Scalar> {
        self.field.beta(bits)
    }

    pub fn beta_f64(&self) -> f64 {
        self.field.root().value().mid_f64()
    }

    pub fn integer_base(&self) -> Option<u32> {
        self.integer
    }

    /// `⌊beta⌉`: `beta - 1` for integers, `⌊beta⌋` otherwise.
    pub fn alphabet_top(&self) -> u8 {
        self.top
    }

    /// Extends the orbit of 1 to at least `n` digits or until it is decided.
    fn ensure(&self, n: usize) -> Result<()> {
        if self.star.get().is_some() {
            return Ok(());
        }
        let mut o = self.orbit.lock();
        if *o.status() != OrbitStatus::Open || o.digits().len() >= n {
            return Ok(());
        }
        let res = if n > self.horizon {
            o.extend(&self.field, self.horizon).and_then(|_| {
                if *o.status() == OrbitStatus::Open {
                    Err(Error::UndecidedFiniteness(self.horizon))
                } else {
                    Ok(())
                }
            })
        } else {
            o.extend(&self.field, n)
        };
        if let Some(w) = o.word() {
            let _ = self.star.set(star_of(&w));
        }
        res
    }

    /// `d_beta(1)` once it is known to be finite or periodic.
    ///
    /// For integer bases this is the one-digit word `b` (the greedy rule is
    /// not used for `x = 1` there).
    pub fn expansion_of_one(&self) -> Result<Option<UltimatelyPeriodicWord>> {
        if let Some(b) = self.integer {
            return Ok(Some(UltimatelyPeriodicWord::finite(&[b as u8])));
        }
        let _ = self.ensure(self.horizon);
        Ok(self.orbit.lock().word())
    }

    /// First `n` digits of `d_beta(1)`.
    pub fn d1_prefix(&self, n: usize) -> Result<Vec<u8>> {
        if self.integer.is_some() {
            return self.dstar_prefix(n);
        }
        self.ensure(n)?;
        let o = self.orbit.lock();
        Ok(match o.word() {
            Some(w) => w.take(n),
            None => o.digits()[..n].to_vec(),
        })
    }

    /// Status of the orbit of 1 (after extending to `n` digits when possible).
    pub fn orbit_status(&self, n: usize) -> OrbitStatus {
        if self.integer.is_some() {
            return OrbitStatus::Finite;
        }
        let _ = self.ensure(n);
        self.orbit.lock().status().clone()
    }

    /// The infinite expansion `(ε*_k)` as an ultimately periodic word, if decided.
    pub fn dstar_word(&self) -> Option<UltimatelyPeriodicWord> {
        self.star.get().cloned()
    }

    fn dstar_word_extending(&self, n: usize) -> Result<Option<&UltimatelyPeriodicWord>> {
        if self.star.get().is_none() {
            self.ensure(n + 1)?;
        }
        Ok(self.star.get())
    }

    /// `ε*_{i+1}`: the digit at 0-based index `i` of the infinite expansion of 1.
    pub fn dstar_digit(&self, i: usize) -> Result<u8> {
        if let Some(w) = self.star.get() {
            return Ok(w.digit(i));
        }
        if let Some(w) = self.dstar_word_extending(i + 1)? {
            return Ok(w.digit(i));
        }
        Ok(self.orbit.lock().digits()[i])
    }

    /// First `n` symbols of the infinite expansion of 1.
    pub fn dstar_prefix(&self, n: usize) -> Result<Vec<u8>> {
        if let Some(w) = self.dstar_word_extending(n)? {
            return Ok(w.take(n));
        }
        Ok(self.orbit.lock().digits()[..n].to_vec())
    }

    /// Alias for [`BetaSystem::dstar_prefix`].
    pub fn expansion_of_one_star(&self, n: usize) -> Result<Vec<u8>> {
        self.dstar_prefix(n)
    }

    /// `(a, p)` when `d*` is `u v^∞` with `|u| = a`, `|v| = p`.
    pub fn finite_type(&self) -> Option<(usize, usize)> {
        let w = self.star.get()?;
        Some((w.prefix().len(), w.period().len()))
    }

    fn canon(&self, j: usize, shape: Option<(usize, usize)>) -> usize {
        match shape {
            Some((a, p)) if j >= a + p => a + (j - a) % p,
            _ => j,
        }
    }

    /// One automaton step from canonical state `j` reading `c`.
    pub fn step(&self, j: usize, c: u8) -> Result<Transition> {
        let d = self.dstar_digit(j)?;
        let shape = self.finite_type();
        Ok(match c.cmp(&d) {
            Ordering::Less => Some(0),
            Ordering::Equal => Some(self.canon(j + 1, shape)),
            Ordering::Greater => None,
        })
    }

    /// Final canonical automaton state after reading `w` from state 0.
    pub fn final_state(&self, w: &[u8]) -> Result<Transition> {
        let mut j = 0;
        for &c in w {
            match self.step(j, c)? {
                Some(n) => j = n,
                None => return Ok(None),
            }
        }
        Ok(Some(j))
    }

    /// Flat transition table of the automaton, for scanning and generating
    /// long words. Needs a finite-type shift.
    pub fn transition_table(&self) -> Result<TransitionTable> {
        self.dstar_word_extending(self.horizon - 1)?;
        let (a, p) = self
            .finite_type()
            .ok_or_else(|| Error::InvalidInput(format!("{} is not known to be of finite type", self.label)))?;
        let shape = Some((a, p));
        let states = a + p;
        let mut dstar = Vec::with_capacity(states);
        let mut next = Vec::with_capacity(states);
        for j in 0..states {
            dstar.push(self.dstar_digit(j)?);
            next.push(self.canon(j + 1, shape) as u32);
        }
        Ok(TransitionTable { dstar, next })
    }

    /// Every shift of `w` is lexicographically at most the infinite expansion of 1.
    pub fn is_admissible(&self, w: &[u8]) -> Result<bool> {
        if w.iter().any(|&c| c > self.top) {
            return Ok(false);
        }
        Ok(self.final_state(w)?.is_some())
    }

    /// Brute-force definition of admissibility, for cross-checking the automaton.
    pub fn is_admissible_bruteforce(&self, w: &[u8]) -> Result<bool> {
        let ds = self.dstar_prefix(w.len())?;
        Ok((0..w.len()).all(|k| crate::words::cmp_prefix(&w[k..], &ds) != Ordering::Greater))
    }

    /// Full cylinders are exactly the words that return the automaton to state 0.
    pub fn is_full(&self, w: &[u8]) -> Result<bool> {
        match self.final_state(w)? {
            Some(j) => Ok(j == 0),
            None => Err(Error::NotAdmissible(crate::words::format_digits_compact(w))),
        }
    }

    /// Exact `#Σ_beta^n` via the transfer recursion on automaton states.
    pub fn count_admissible(&self, n: usize) -> Result<BigUint> {
        if let Some(b) = self.integer {
            return Ok(BigUint::from(b).pow(n as u32));
        }
        {
            let c = self.counts.lock();
            if n < c.len() {
                return Ok(c[n].clone());
            }
        }
        // the recursion needs ε*_1..ε*_n; for finite type the states wrap
        let shape = match self.dstar_word_extending(n.min(self.horizon))? {
            Some(w) => Some((w.prefix().len(), w.period().len())),
            None if n > self.horizon => {
                return Err(Error::HorizonTooDeep(format!(
                    "counting length {n} needs {n} digits of d_beta(1) (horizon {})",
                    self.horizon
                )))
            }
            None => None,
        };
        let states = match shape {
            Some((a, p)) => a + p,
            None => n + 1,
        };
        let ds: Vec<u8> = (0..states).map(|i| self.dstar_digit(i)).collect::<Result<_>>()?;
        let mut v = vec![BigUint::zero(); states];
        v[0] = BigUint::one();
        let mut out = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); states];
            for j in 0..states {
                if v[j].is_zero() {
                    continue;
                }
                let d = ds[j];
                if d > 0 {
                    next[0] += &v[j] * BigUint::from(d);
                }
                let k = self.canon(j + 1, shape);
                if k < states {
                    next[k] += &v[j];
                }
            }
            v = next;
            out.push(v.iter().sum());
        }
        let mut c = self.counts.lock();
        if out.len() > c.len() {
            *c = out;
        }
        Ok(c[n].clone())
    }

    /// Certified check of Rényi's bounds at length `n`.
    pub fn renyi_check(&self, n: usize) -> Result<RenyiCheck> {
        let prec = DEFAULT_PRECISION;
        let count = self.count_admissible(n)?;
        let cs = Scalar::from_int(BigInt::from(count.clone()));
        let b = self.beta(prec)?;
        let lower = b.powi(n as i64, prec)?;
        let upper = b.powi(n as i64 + 1, prec)?.div(&b.sub(&Scalar::from_int(1), prec), prec)?;
        let lower_holds = lower.certainly_le(&cs).unwrap_or(false);
        let upper_holds = cs.certainly_le(&upper).unwrap_or(false);
        Ok(RenyiCheck {
            n,
            count: count.to_string(),
            lower: (lower.lo_f64(), lower.hi_f64()),
            upper: (upper.lo_f64(), upper.hi_f64()),
            lower_holds,
            upper_holds,
        })
    }

    /// Enclosure of `log #Σ^j`: exact counts for short lengths and integer
    /// bases, transfer-matrix powers for longer words of a finite-type shift,
    /// and Rényi's bracket `[j log beta, (j+1) log beta - log(beta-1)]` otherwise.
    pub fn log_count(&self, j: u64, prec: u32) -> Result<Scalar> {
        if j == 0 {
            return Ok(Scalar::from_int(0));
        }
        if let Some(b) = self.integer {
            return Scalar::from_int(b).ln(prec).map(|l| l.mul_int(&BigInt::from(j), prec));
        }
        if j as usize <= EXACT_COUNT_LIMIT {
            if let Ok(c) = self.count_admissible(j as usize) {
                return Scalar::from_int(BigInt::from(c)).ln(prec);
            }
        }
        if let Some((a, p)) = self.finite_type() {
            return self.count_interval(j, a + p, prec + 32)?.ln(prec);
        }
        let b = self.beta(prec + 16)?;
        let lb = b.ln(prec)?;
        let lo = lb.mul_int(&BigInt::from(j), prec);
        let hi = lb
            .mul_int(&(BigInt::from(j) + 1), prec)
            .sub(&b.sub(&Scalar::from_int(1), prec).ln(prec)?, prec);
        Ok(Scalar::interval(lo.lo().clone(), hi.hi().clone(), prec))
    }

    /// Enclosure of `#Σ^j` for a finite-type shift from powers of the
    /// transfer matrix, in interval arithmetic.
    fn count_interval(&self, j: u64, states: usize, prec: u32) -> Result<Scalar> {
        let shape = self.finite_type();
        let zero = || Scalar::from_int(0);
        let mut m = vec![vec![zero(); states]; states];
        for (s, row) in m.iter_mut().enumerate() {
            let d = self.dstar_digit(s)?;
            row[0] = Scalar::from_int(d);
            let k = self.canon(s + 1, shape);
            row[k] = row[k].add(&Scalar::from_int(1), prec);
        }
        let mul = |a: &Vec<Vec<Scalar>>, b: &Vec<Vec<Scalar>>| {
            let mut c = vec![vec![zero(); states]; states];
            for i in 0..states {
                for k in 0..states {
                    if a[i][k].is_point() && a[i][k].contains_zero() {
                        continue;
                    }
                    for l in 0..states {
                        c[i][l] = c[i][l].add(&a[i][k].mul(&b[k][l], prec), prec);
                    }
                }
            }
            c
        };
        // row 0 of M^j, by binary powering
        let mut row: Option<Vec<Vec<Scalar>>> = None;
        let mut base = m;
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                row = Some(match row {
                    None => base.clone(),
                    Some(r) => mul(&r, &base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base);
            }
        }
        let r = row.expect("j > 0");
        Ok(r[0].iter().fold(zero(), |acc, x| acc.add(x, prec)))
    }

    /// `v_j = beta^j - sum_{i<=j} ε*_i beta^(j-i)`, the value of `σ^j(d*)`.
    fn tail_value(&self, j: usize) -> Result<RatPoly> {
        let ds = self.dstar_prefix(j)?;
        let mut acc = RatPoly::constant(BigRational::one());
        for &d in &ds {
            acc = self.field.mul_gen(&acc).sub(&RatPoly::constant(BigRational::from_integer(d.into())));
        }
        Ok(self.field.reduce(&acc))
    }

    /// Certified basic interval of an admissible word.
    pub fn cylinder(&self, w: &[u8], prec: u32) -> Result<CylinderInterval> {
        let j = match self.final_state(w)? {
            Some(j) if w.iter().all(|&c| c <= self.top) => j,
            _ => return Err(Error::NotAdmissible(crate::words::format_digits_compact(w))),
        };
        let n = w.len();
        // left endpoint beta^-n * sum w_i beta^(n-i)
        let mut p = RatPoly::zero();
        for &c in w {
            p = self.field.mul_gen(&p).add(&RatPoly::constant(BigRational::from_integer(c.into())));
        }
        let guard = prec + 8 + (n as u32) * (self.field.root().value().hi_f64().log2().ceil() as u32 + 1);
        let scale = self.beta(guard)?.powi(-(n as i64), guard)?;
        let left = self.field.eval(&p, guard)?.mul(&scale, guard);
        let v = self.tail_value(j)?;
        let length = self.field.eval(&v, guard)?.mul(&scale, guard);
        let right = left.add(&length, guard);
        Ok(CylinderInterval { word: w.to_vec(), left, right, length, full: j == 0 })
    }

    /// Greedy digits of a rational `x` in `[0, 1]`.
    ///
    /// For `x = 1` and an integer base the paper's convention applies and the
    /// infinite expansion `(b-1)^∞` is returned.
    pub fn greedy_expand(&self, x: &BigRational, n: usize) -> Result<Vec<u8>> {
        if x < &BigRational::zero() || x > &BigRational::one() {
            return Err(Error::InvalidInput("x must lie in [0, 1]".into()));
        }
        if x.is_one() {
            return self.d1_prefix(n);
        }
        orbit::greedy_digits(&self.field, x, n)
    }

    /// Greedy digits of an interval point, certifying every floor.
    pub fn greedy_expand_scalar(&self, x: &Scalar, n: usize, prec: u32) -> Result<Vec<u8>> {
        if let Some(q) = x.exact_value() {
            return self.greedy_expand(q, n);
        }
        let b = self.beta(prec)?;
        let mut cur = x.clone();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let y = cur.mul(&b, prec);
            let lo = y.lo().floor();
            let hi = y.hi().floor();
            if lo != hi {
                return Err(Error::PrecisionExhausted(format!(
                    "iterate {} straddles a discontinuity of T_beta",
                    i + 1
                )));
            }
            out.push(lo.to_u8().ok_or_else(|| Error::InvalidInput("digit overflow".into()))?);
            cur = y.sub(&Scalar::from_int(lo), prec);
        }
        Ok(out)
    }

    /// The finite-type approximant: root of `1 = sum_{i<=N} ε*_i z^-i`.
    pub fn beta_n(&self, n: usize) -> Result<BetaSystem> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        let ds = self.dstar_prefix(n)?;
        let c: Vec<BigRational> = ds.iter().map(|&d| BigRational::from_integer(d.into())).collect();
        let root = isolate_root(&c, default_search(&c))?;
        BetaSystem::from_root(root, format!("approx:{}:{n}", self.label))
    }

    /// Certified `self < other`.
    pub fn certainly_less(&self, other: &BetaSystem) -> Result<bool> {
        let mut bits = 64;
        while bits <= 4096 {
            let a = self.beta(bits)?;
            let b = other.beta(bits)?;
            match a.compare_scalar(&b) {
                Certified::Less => return Ok(true),
                Certified::Greater => return Ok(false),
                Certified::Unresolved => bits *= 2,
            }
        }
        Ok(false)
    }

    /// All admissible words of length `n`, in lexicographic order.
    pub fn admissible_words(&self, n: usize) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::with_capacity(n), 0usize)];
        while let Some((w, j)) = stack.pop() {
            if w.len() == n {
                out.push(w);
                continue;
            }
            for c in (0..=self.top).rev() {
                if let Some(k) = self.step(j, c)? {
                    let mut w2 = w.clone();
                    w2.push(c);
                    stack.push((w2, k));
                }
            }
        }
        Ok(out)
    }

    /// Shared handle, convenient for long-lived consumers.
    pub fn shared(self) -> Arc<BetaSystem> {
        Arc::new(self)
    }
}

/// `d*` from `d_beta(1)`: a finite `ε_1..ε_m` becomes `(ε_1..ε_{m-1}, ε_m - 1)^∞`.
fn star_of(w: &UltimatelyPeriodicWord) -> UltimatelyPeriodicWord {
    if w.is_finite() {
        let mut v = w.prefix().to_vec();
        if let Some(last) = v.last_mut() {
            *last -= 1;
        }
        UltimatelyPeriodicWord::periodic(&[], &v)
    } else {
        w.clone()
    }
}

#[cfg(test)]
mod tests;
