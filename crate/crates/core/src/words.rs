//! Digit words, ultimately periodic words and the digit-file format.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite digit word, one byte per digit.
pub type DigitWord = Vec<u8>;

/// `prefix · period^∞`. An empty period means the word is finite and
/// continues with zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UltimatelyPeriodicWord {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl UltimatelyPeriodicWord {
    pub fn finite(digits: &[u8]) -> Self {
        UltimatelyPeriodicWord::new(digits.to_vec(), Vec::new())
    }

    pub fn periodic(prefix: &[u8], period: &[u8]) -> Self {
        UltimatelyPeriodicWord::new(prefix.to_vec(), period.to_vec())
    }

    /// Builds the canonical form: shortest primitive period, shortest prefix,
    /// and a finite word without trailing zeros.
    pub fn new(mut prefix: Vec<u8>, mut period: Vec<u8>) -> Self {
        if period.iter().all(|&d| d == 0) {
            period.clear();
        }
        if period.is_empty() {
            while prefix.last() == Some(&0) {
                prefix.pop();
            }
            return UltimatelyPeriodicWord { prefix, period };
        }
        // primitive root of the period
        let p = period.len();
        for d in 1..=p {
            if p.is_multiple_of(d) && (d..p).all(|i| period[i] == period[i - d]) {
                period.truncate(d);
                break;
            }
        }
        // rotate the period into the prefix as far as possible
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        UltimatelyPeriodicWord { prefix, period }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// True for words ending in `0^∞`.
    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Digit at 0-based index `i`.
    pub fn digit(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `n` digits.
    pub fn take(&self, n: usize) -> DigitWord {
        (0..n).map(|i| self.digit(i)).collect()
    }

    pub fn max_digit(&self) -> u8 {
        self.prefix.iter().chain(self.period.iter()).copied().max().unwrap_or(0)
    }

    /// Length after which every shift has already been seen: prefix plus one period.
    pub fn horizon(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Lexicographic comparison of `σ^k(self)` with `self`.
    pub fn compare_shift(&self, k: usize) -> Ordering {
        let n = k + 2 * self.horizon() + 2;
        for i in 0..n {
            match self.digit(k + i).cmp(&self.digit(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Parses `digits` or `prefix(period)`, e.g. `11` or `(10)` or `1(100)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("malformed word {s:?}"));
        let (pre, per) = match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&s[..i], rest)
            }
            None => (s, ""),
        };
        let prefix = parse_digit_string(pre)?;
        let period = parse_digit_string(per)?;
        if s.contains('(') && period.is_empty() {
            return Err(bad());
        }
        Ok(UltimatelyPeriodicWord::new(prefix, period))
    }
}

impl fmt::Debug for UltimatelyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for UltimatelyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_digits_compact(&self.prefix))?;
        if !self.period.is_empty() {
            write!(f, "({})", format_digits_compact(&self.period))?;
        }
        Ok(())
    }
}

/// Digits written back to back when all are below 10, comma separated otherwise.
pub fn format_digits_compact(w: &[u8]) -> String {
    if w.iter().all(|&d| d < 10) {
        w.iter().map(|d| char::from(b'0' + d)).collect()
    } else {
        w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Space separated digits.
pub fn format_digits(w: &[u8]) -> String {
    w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

/// Accepts `1011`, `1 0 1 1` or `1,0,1,1`.
pub fn parse_digit_string(s: &str) -> Result<DigitWord> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let bad = |t: &str| Error::InvalidInput(format!("bad digit {t:?}"));
    if s.contains(',') || s.contains(char::is_whitespace) {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| bad(t)))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| bad(&c.to_string())))
            .collect()
    }
}

/// Lexicographic comparison of two words over their common length.
pub fn cmp_prefix(a: &[u8], b: &[u8]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Writes the digit-file format: a `base=<b>` header, then digits, 80 per line.
pub fn write_digit_file<W: Write>(mut out: W, base: u32, digits: &[u8]) -> std::io::Result<()> {
    writeln!(out, "base={base}")?;
    for chunk in digits.chunks(80) {
        let line = chunk.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads the digit-file format, checking every digit against the base.
/// Lines starting with `#` are comments.
pub fn read_digit_file<R: BufRead>(input: R) -> Result<(u32, DigitWord)> {
    let mut lines = input.lines();
    let header = loop {
        match lines.next() {
            None => return Err(Error::InvalidInput("empty digit file".into())),
            Some(l) => {
                let l = l.map_err(|e| Error::InvalidInput(e.to_string()))?;
                if !l.trim().is_empty() && !l.trim_start().starts_with('#') {
                    break l;
                }
            }
        }
    };
    let base: u32 = header
        .trim()
        .strip_prefix("base=")
        .and_then(|b| b.trim().parse().ok())
        .ok_or_else(|| Error::InvalidInput(format!("expected `base=<b>` header, got {header:?}")))?;
    if base < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    let mut digits = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let d: u32 = tok.parse().map_err(|_| Error::InvalidInput(format!("bad digit {tok:?}")))?;
            if d >= base {
                return Err(Error::InvalidInput(format!("digit {d} out of range for base {base}")));
            }
            digits.push(d as u8);
        }
    }
    Ok((base, digits))
}
