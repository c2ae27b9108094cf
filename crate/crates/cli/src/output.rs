//! Run configurations, error mapping and the output emitters.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use betadim::numerics::Scalar;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Format, Global};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Lib(betadim::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{}", m.trim_end()),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<betadim::Error> for CliError {
    fn from(e: betadim::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub subcommand: String,
    /// Subcommand arguments, global options removed.
    pub argv: Vec<String>,
    /// The base, β spec, depth and stage count when the command has them.
    pub params: BTreeMap<String, String>,
    pub precision_bits: u32,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub output: Option<String>,
}

const GLOBAL_WITH_VALUE: [&str; 5] = ["--precision", "--format", "--output", "-o", "--seed"];
const RECORDED: [&str; 5] = ["--base", "--beta", "--depth", "--stages", "--len"];

impl RunConfig {
    pub fn capture(argv: &[String], g: &Global) -> RunConfig {
        let mut rest = Vec::new();
        let mut it = argv.iter().skip(1);
        while let Some(a) = it.next() {
            if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
                it.next();
                continue;
            }
            if GLOBAL_WITH_VALUE.iter().any(|o| a.starts_with(&format!("{o}="))) || (a.starts_with("-o") && a.len() > 2) {
                continue;
            }
            rest.push(a.clone());
        }
        let subcommand = rest
            .iter()
            .take_while(|a| !a.starts_with('-'))
            .take(2)
            .cloned()
            .collect::<Vec<_>>()
            .join(" ");
        let mut params = BTreeMap::new();
        for (i, a) in rest.iter().enumerate() {
            let (key, val) = match a.split_once('=') {
                Some((k, v)) => (k, Some(v.to_string())),
                None => (a.as_str(), rest.get(i + 1).cloned()),
            };
            if RECORDED.contains(&key) {
                if let Some(v) = val {
                    params.insert(key.trim_start_matches('-').to_string(), v);
                }
            }
        }
        RunConfig {
            version: betadim::VERSION.to_string(),
            subcommand,
            argv: rest,
            params,
            precision_bits: g.precision,
            seed: g.seed,
            format: g.format.map(|f| f.name().to_string()),
            output: g.output.clone(),
        }
    }

    /// Command line that repeats the run, without the output path.
    pub fn to_argv(&self) -> Vec<String> {
        let mut a = vec!["betadim".to_string(), "--precision".into(), self.precision_bits.to_string()];
        if let Some(f) = &self.format {
            a.push("--format".into());
            a.push(f.clone());
        }
        if let Some(s) = self.seed {
            a.push("--seed".into());
            a.push(s.to_string());
        }
        a.extend(self.argv.iter().cloned());
        a
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Reads the configuration back from a JSON document or a `# config:` line.
    pub fn load(path: &str) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        if let Ok(v) = serde_json::from_str::<Value>(&text) {
            if let Some(c) = v.get("config") {
                return Ok(serde_json::from_value(c.clone())?);
            }
        }
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# config: ") {
                return Ok(serde_json::from_str(rest)?);
            }
        }
        Err(usage(format!("{path} carries no run configuration")))
    }

    fn header(&self) -> String {
        format!("# config: {}\n", serde_json::to_string(self).expect("config serializes"))
    }
}

/// Destination of a command's output.
pub struct Out {
    w: Box<dyn Write>,
    to_file: bool,
    cfg: RunConfig,
}

impl Out {
    pub fn open(cfg: &RunConfig) -> CliResult<Out> {
        let (w, to_file): (Box<dyn Write>, bool) = match &cfg.output {
            Some(p) => (Box::new(BufWriter::new(File::create(p)?)), true),
            None => (Box::new(BufWriter::new(io::stdout().lock())), false),
        };
        Ok(Out { w, to_file, cfg: cfg.clone() })
    }

    /// `{"config": …, "result": …}`.
    pub fn json(mut self, result: Value) -> CliResult {
        let doc = json!({ "config": self.cfg.to_json(), "result": result });
        serde_json::to_writer_pretty(&mut self.w, &doc)?;
        writeln!(self.w)?;
        self.finish()
    }

    /// Text or CSV; files get a leading `# config:` comment.
    pub fn text(mut self, body: &str) -> CliResult {
        if self.to_file {
            let h = self.cfg.header();
            self.w.write_all(h.as_bytes())?;
        }
        self.w.write_all(body.as_bytes())?;
        if !body.ends_with('\n') {
            writeln!(self.w)?;
        }
        self.finish()
    }

    /// Streaming line output; files get the `# config:` comment first.
    pub fn lines(mut self) -> CliResult<LineSink> {
        if self.to_file {
            let h = self.cfg.header();
            self.w.write_all(h.as_bytes())?;
        }
        Ok(LineSink { out: self })
    }

    /// Digit file: `base=b`, the config comment, then digits 80 per line.
    pub fn digits(mut self, base: u32) -> CliResult<DigitSink> {
        writeln!(self.w, "base={base}")?;
        let h = self.cfg.header();
        self.w.write_all(h.as_bytes())?;
        Ok(DigitSink { out: self, col: 0, err: None })
    }

    fn finish(mut self) -> CliResult {
        self.w.flush()?;
        Ok(())
    }
}

pub struct LineSink {
    out: Out,
}

impl LineSink {
    pub fn line(&mut self, s: &str) -> CliResult {
        self.out.w.write_all(s.as_bytes())?;
        self.out.w.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(self) -> CliResult {
        self.out.finish()
    }
}

pub struct DigitSink {
    out: Out,
    col: usize,
    err: Option<io::Error>,
}

impl DigitSink {
    pub fn push(&mut self, chunk: &[u8]) {
        if self.err.is_some() {
            return;
        }
        if let Err(e) = self.write(chunk) {
            self.err = Some(e);
        }
    }

    fn write(&mut self, chunk: &[u8]) -> io::Result<()> {
        let mut buf = Vec::with_capacity(chunk.len() * 2 + chunk.len() / 40);
        for &d in chunk {
            if self.col > 0 {
                buf.push(if self.col == 80 { b'\n' } else { b' ' });
                if self.col == 80 {
                    self.col = 0;
                }
            }
            if d >= 10 {
                buf.extend_from_slice(d.to_string().as_bytes());
            } else {
                buf.push(b'0' + d);
            }
            self.col += 1;
        }
        self.out.w.write_all(&buf)
    }

    pub fn finish(mut self) -> CliResult {
        if let Some(e) = self.err.take() {
            return Err(e.into());
        }
        if self.col > 0 {
            writeln!(self.out.w)?;
        }
        self.out.finish()
    }
}

/// Output format, falling back to the command's default.
pub fn format_or(cfg: &Global, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

pub fn rational(q: &BigRational) -> String {
    betadim::numerics::format_rational(q)
}

/// Decimal digits shared by both ends of the enclosure, up to `max` places.
pub fn decimal(s: &Scalar, max: usize) -> String {
    let lo = s.lo().to_rational();
    let hi = s.hi().to_rational();
    if lo.is_negative() || hi.is_negative() || lo.floor() != hi.floor() {
        return format!("[{:e}, {:e}]", s.lo_f64(), s.hi_f64());
    }
    let mut scale = num_bigint::BigInt::from(1);
    let mut best = lo.floor().to_integer().to_string();
    for d in 1..=max {
        scale *= 10;
        let a = (&lo * BigRational::from_integer(scale.clone())).floor().to_integer();
        let b = (&hi * BigRational::from_integer(scale.clone())).floor().to_integer();
        if a != b {
            break;
        }
        let digits = a.to_string();
        let digits = format!("{:0>width$}", digits, width = d + 1);
        let (int, frac) = digits.split_at(digits.len() - d);
        best = format!("{int}.{frac}");
    }
    best
}

/// `[lo, hi]` with outward-rounded doubles.
pub fn bracket(s: &Scalar) -> [f64; 2] {
    [s.lo_f64(), s.hi_f64()]
}

pub fn f64_of(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
