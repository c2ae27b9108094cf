//! Subcommand implementations.

use std::io::BufReader;

use betadim::bary::{self, DigitSet, LacunaryRule, RunKinds};
use betadim::beta_shift::{is_self_admissible, parry_invert, parry_invert_prefix, BetaSystem};
use betadim::constructions::{
    generate_parameter_space, BaryPlan, BetaPlan, ConstructionSpec, FillPolicy, ScheduledRuns,
};
use betadim::measures_dim::{self as md, MeasureValue};
use betadim::numerics::parse_rational;
use betadim::words::{format_digits, format_digits_compact, parse_digit_string, read_digit_file, UltimatelyPeriodicWord};
use betadim::Error;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::output::{bracket, decimal, f64_of, format_or, rational, usage, CliResult, Out, RunConfig};
use crate::{
    AdmissibleCmd, Cli, Command, ConstructCmd, DimCmd, ExpandArgs, ExponentsArgs, FillArgs, Format, Global,
    MeasureArgs, ParryCmd, ScheduleArgs,
};

pub fn dispatch(cli: &Cli, cfg: &RunConfig) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Expand(a) => expand(g, cfg, a),
        Command::ExpandOne(a) => {
            let beta = BetaSystem::parse(&a.beta)?;
            let d = if a.greedy { beta.d1_prefix(a.digits)? } else { beta.expansion_of_one_star(a.digits)? };
            emit_word(g, cfg, &d, beta.alphabet_top() as u32 + 1, json!({ "beta": a.beta, "greedy": a.greedy }))
        }
        Command::Admissible { action } => admissible(g, cfg, action),
        Command::Cylinder(a) => {
            let beta = BetaSystem::parse(&a.beta)?;
            let w = parse_digit_string(&a.word)?;
            let c = beta.cylinder(&w, g.precision)?;
            match format_or(g, Format::Text) {
                Format::Json => Out::open(cfg)?.json(json!({
                    "beta": a.beta,
                    "word": format_digits_compact(&c.word),
                    "left": bracket(&c.left),
                    "right": bracket(&c.right),
                    "length": bracket(&c.length),
                    "full": c.full,
                })),
                Format::Csv => Out::open(cfg)?.text(&format!(
                    "word,left_lo,left_hi,right_lo,right_hi,length_lo,length_hi,full\n{},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                    format_digits_compact(&c.word),
                    c.left.lo_f64(),
                    c.left.hi_f64(),
                    c.right.lo_f64(),
                    c.right.hi_f64(),
                    c.length.lo_f64(),
                    c.length.hi_f64(),
                    c.full
                )),
                _ => Out::open(cfg)?.text(&format!(
                    "left {}\nright {}\nlength {}\nfull {}\n",
                    decimal(&c.left, 30),
                    decimal(&c.right, 30),
                    decimal(&c.length, 30),
                    c.full
                )),
            }
        }
        Command::Exponents(a) => exponents(g, cfg, a),
        Command::Construct { kind } => construct(g, cfg, kind),
        Command::Measure(a) => measure(g, cfg, a),
        Command::Dim { action } => dim(g, cfg, action),
        Command::Parry { action } => parry(g, cfg, action),
        Command::Replay(_) => unreachable!("handled before dispatch"),
    }
}

fn rat(s: &str) -> CliResult<BigRational> {
    Ok(parse_rational(s)?)
}

fn emit_word(g: &Global, cfg: &RunConfig, d: &[u8], base: u32, mut extra: Value) -> CliResult {
    match format_or(g, Format::Text) {
        Format::Json => {
            extra["digits"] = json!(format_digits_compact(d));
            Out::open(cfg)?.json(extra)
        }
        Format::Digits => {
            let mut s = Out::open(cfg)?.digits(base)?;
            s.push(d);
            s.finish()
        }
        Format::Csv => Out::open(cfg)?.text(&format!("i,digit\n{}", csv_rows(d))),
        Format::Text => Out::open(cfg)?.text(&format_digits(d)),
    }
}

fn csv_rows(d: &[u8]) -> String {
    d.iter().enumerate().map(|(i, x)| format!("{},{}\n", i + 1, x)).collect()
}

fn expand(g: &Global, cfg: &RunConfig, a: &ExpandArgs) -> CliResult {
    if let Some(spec) = &a.beta {
        let x = a.x.as_deref().ok_or_else(|| usage("--beta expands only rationals given by --x"))?;
        let beta = BetaSystem::parse(spec)?;
        let d = beta.greedy_expand(&rat(x)?, a.digits)?;
        return emit_word(g, cfg, &d, beta.alphabet_top() as u32 + 1, json!({ "beta": spec, "x": x }));
    }
    let b = a.base.expect("clap enforces --base or --beta");
    let (d, what) = if let Some(x) = &a.x {
        let q = rat(x)?;
        let p = q.numer().to_u64().ok_or_else(|| usage("--x must be a non-negative rational with 64-bit terms"))?;
        let qd = q.denom().to_u64().ok_or_else(|| usage("--x must be a non-negative rational with 64-bit terms"))?;
        (bary::expand_rational(p, qd, b, a.digits)?, json!({ "base": b, "x": x }))
    } else if let Some(v) = &a.lacunary {
        (bary::expand_lacunary(b, &LacunaryRule::Power(rat(v)?), a.digits)?, json!({ "base": b, "lacunary": v }))
    } else {
        (bary::expand_lacunary(b, &LacunaryRule::SquaredPower, a.digits)?, json!({ "base": b, "lacunary": "squared" }))
    };
    emit_word(g, cfg, &d, b, what)
}

fn admissible(g: &Global, cfg: &RunConfig, action: &AdmissibleCmd) -> CliResult {
    match action {
        AdmissibleCmd::Count { beta, len, renyi } => {
            let sys = BetaSystem::parse(beta)?;
            let count = sys.count_admissible(*len)?;
            let check = if *renyi { Some(sys.renyi_check(*len)?) } else { None };
            match format_or(g, Format::Text) {
                Format::Json => Out::open(cfg)?.json(json!({
                    "beta": beta, "len": len, "count": count.to_string(), "renyi": check,
                })),
                Format::Csv => {
                    let mut s = String::from("len,count");
                    if check.is_some() {
                        s.push_str(",lower_holds,upper_holds");
                    }
                    s.push_str(&format!("\n{len},{count}"));
                    if let Some(c) = &check {
                        s.push_str(&format!(",{},{}", c.lower_holds, c.upper_holds));
                    }
                    Out::open(cfg)?.text(&s)
                }
                _ => {
                    let mut s = count.to_string();
                    if let Some(c) = &check {
                        s.push_str(&format!(
                            "\nrenyi lower [{:e}, {:e}] {}\nrenyi upper [{:e}, {:e}] {}",
                            c.lower.0,
                            c.lower.1,
                            if c.lower_holds { "holds" } else { "fails" },
                            c.upper.0,
                            c.upper.1,
                            if c.upper_holds { "holds" } else { "fails" },
                        ));
                    }
                    Out::open(cfg)?.text(&s)
                }
            }
        }
        AdmissibleCmd::List { beta, len } => list_words(g, cfg, beta, *len),
        AdmissibleCmd::Check { beta, word } => {
            let sys = BetaSystem::parse(beta)?;
            let w = parse_digit_string(word)?;
            let ok = sys.is_admissible(&w)?;
            let full = if ok { Some(sys.is_full(&w)?) } else { None };
            match format_or(g, Format::Text) {
                Format::Json => Out::open(cfg)?.json(json!({
                    "beta": beta, "word": format_digits_compact(&w), "admissible": ok, "full": full,
                })),
                Format::Csv => Out::open(cfg)?.text(&format!(
                    "word,admissible,full\n{},{},{}",
                    format_digits_compact(&w),
                    ok,
                    full.map(|f| f.to_string()).unwrap_or_default()
                )),
                _ => Out::open(cfg)?.text(&match full {
                    Some(f) => format!("admissible\nfull {f}"),
                    None => "not admissible".to_string(),
                }),
            }
        }
    }
}

/// Depth-first walk of the automaton, writing each word as it is found.
fn list_words(g: &Global, cfg: &RunConfig, beta: &str, len: usize) -> CliResult {
    let sys = BetaSystem::parse(beta)?;
    let top = sys.alphabet_top();
    let fmt = format_or(g, Format::Text);
    let mut sink = Out::open(cfg)?.lines()?;
    match fmt {
        Format::Json => {
            let head = json!({ "config": cfg.to_json(), "result": { "beta": beta, "len": len } });
            let mut h = serde_json::to_string(&head)?;
            // reopen the result object to stream the word array into it
            h.truncate(h.len() - 2);
            sink.line(&format!("{h},\"words\":["))?;
        }
        Format::Csv => sink.line("word")?,
        _ => {}
    }
    let mut word: Vec<u8> = Vec::with_capacity(len);
    let mut states: Vec<usize> = vec![0];
    let mut next_digit: Vec<u8> = vec![0];
    let mut first = true;
    while let Some(&c) = next_digit.last() {
        let depth = word.len();
        if depth == len {
            let s = format_digits_compact(&word);
            let line = match fmt {
                Format::Json => format!("{}\"{s}\"", if first { "" } else { "," }),
                _ => s,
            };
            sink.line(&line)?;
            first = false;
            next_digit.pop();
            states.pop();
            word.pop();
            if let Some(d) = next_digit.last_mut() {
                *d += 1;
            }
            continue;
        }
        if c > top {
            next_digit.pop();
            states.pop();
            if word.pop().is_some() {
                if let Some(d) = next_digit.last_mut() {
                    *d += 1;
                }
            }
            continue;
        }
        match sys.step(states[depth], c)? {
            Some(s) => {
                word.push(c);
                states.push(s);
                next_digit.push(0);
            }
            None => *next_digit.last_mut().unwrap() = top + 1,
        }
    }
    if fmt == Format::Json {
        sink.line("]}}")?;
    }
    sink.finish()
}

fn exponents(g: &Global, cfg: &RunConfig, a: &ExponentsArgs) -> CliResult {
    let f = std::fs::File::open(&a.input)?;
    let (base, digits) = read_digit_file(BufReader::new(f))?;
    let kinds = if a.zeros_only { RunKinds::ZerosOnly } else { RunKinds::Both };
    let dec = bary::run_decomposition_with(&digits, base, kinds)?;
    let window = a.window.unwrap_or_else(|| bary::default_window(dec.monotone.len()));
    let est = bary::estimate_exponents_window(&dec, window)?;
    let tol = BigRational::new(1.into(), 100.into());
    let rel = bary::check_estimate(&est, &tol);
    match format_or(g, Format::Text) {
        Format::Json => Out::open(cfg)?.json(json!({
            "input": a.input,
            "base": base,
            "digits": digits.len(),
            "runs": dec.run_count,
            "estimate": est,
            "relations": rel,
        })),
        Format::Csv => {
            let mut s = String::from("k,n,m,v,v_hat\n");
            for p in &est.trajectory {
                let vh = p.v_hat.as_ref().map(|x| format!("{}", f64_of(x))).unwrap_or_default();
                s.push_str(&format!("{},{},{},{},{}\n", p.k, p.n, p.m, f64_of(&p.v), vh));
            }
            Out::open(cfg)?.text(&s)
        }
        _ => {
            let mut s = format!(
                "v {} ({:.6})\nv_hat {} ({:.6})\nstages {}\nwindow {}\nruns {}\n",
                rational(&est.v),
                est.v_f64(),
                rational(&est.v_hat),
                est.v_hat_f64(),
                est.trajectory.len(),
                est.window,
                dec.run_count
            );
            if let Some(c) = est.log_ratio {
                s.push_str(&format!("k/log n_k {c:.6}\n"));
            }
            s.push_str(&format!("relations {}\n", if rel.all() { "hold" } else { "fail" }));
            Out::open(cfg)?.text(&s)
        }
    }
}

fn spec_of(g: &Global, s: &ScheduleArgs, f: &FillArgs) -> CliResult<ConstructionSpec> {
    let fill = match &f.fill {
        Some(p) => FillPolicy::parse(p)?,
        None => FillPolicy::Seeded(g.seed.unwrap_or(0)),
    };
    Ok(ConstructionSpec::new(rat(&s.theta)?, rat(&s.vhat)?, fill, f.depth))
}

fn sidecar_path(cfg: &RunConfig, f: &FillArgs) -> Option<String> {
    f.sidecar.clone().or_else(|| cfg.output.as_ref().map(|o| format!("{o}.json")))
}

fn write_sidecar(path: Option<String>, cfg: &RunConfig, body: Value) -> CliResult {
    let Some(p) = path else { return Ok(()) };
    let mut doc = json!({ "config": cfg.to_json() });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(p, text)?;
    Ok(())
}

fn fill_name(f: &FillPolicy) -> String {
    match f {
        FillPolicy::Constant(d) => format!("const:{d}"),
        FillPolicy::Seeded(s) => format!("seed:{s}"),
        FillPolicy::Stream(d) => format!("stream:{}", format_digits_compact(d)),
    }
}

fn construct(g: &Global, cfg: &RunConfig, kind: &ConstructCmd) -> CliResult {
    let json_out = format_or(g, Format::Digits) == Format::Json;
    match kind {
        ConstructCmd::Bary { schedule, fill, base } => {
            let spec = spec_of(g, schedule, fill)?;
            let plan = BaryPlan::new(&spec, *base, None)?;
            stream_bary(cfg, fill, &spec, &plan, json!({ "kind": "bary", "base": base }), json_out)
        }
        ConstructCmd::Restricted { schedule, fill, base, set } => {
            let spec = spec_of(g, schedule, fill)?;
            let s = DigitSet::parse(*base, set)?;
            let plan = BaryPlan::new(&spec, *base, Some(&s))?;
            let meta = json!({ "kind": "restricted", "base": base, "set": set });
            stream_bary(cfg, fill, &spec, &plan, meta, json_out)
        }
        ConstructCmd::Beta { schedule, fill, beta, big_n } => {
            let spec = spec_of(g, schedule, fill)?;
            let sys = BetaSystem::parse(beta)?;
            let fill_system = sys.beta_n(*big_n)?;
            let plan = BetaPlan::new(&spec, &fill_system, *big_n as u64)?;
            let base = sys.alphabet_top() as u32 + 1;
            let mut digits = Vec::new();
            let (clamps, written) = if json_out {
                (plan.stream(&spec.fill, spec.depth, |c| digits.extend_from_slice(c))?, None)
            } else {
                let mut sink = Out::open(cfg)?.digits(base)?;
                let log = plan.stream(&spec.fill, spec.depth, |c| sink.push(c))?;
                (log, Some(sink))
            };
            let meta = json!({
                "kind": "beta",
                "beta": beta,
                "big_n": big_n,
                "fill_system": format!("approx:{beta}:{big_n}"),
                "fill": fill_name(&spec.fill),
                "depth": spec.depth,
                "schedule": plan.schedule,
                "clamps": clamps,
                "complete_stages": plan.complete_stages(spec.depth),
            });
            finish_construct(cfg, fill, meta, written, json_out.then_some(digits))
        }
        ConstructCmd::Param { schedule, fill, beta0, beta1, beta2, big_n } => {
            let spec = spec_of(g, schedule, fill)?;
            let (b0, b1, b2) = (BetaSystem::parse(beta0)?, BetaSystem::parse(beta1)?, BetaSystem::parse(beta2)?);
            let p = generate_parameter_space(&b0, &b1, &b2, *big_n, &spec)?;
            let hull = p.enclosure.hull();
            let meta = json!({
                "kind": "param",
                "beta0": beta0,
                "beta1": beta1,
                "beta2": beta2,
                "big_n": big_n,
                "prefix": format_digits_compact(&p.prefix),
                "fill_system": format!("approx:approx:{beta1}:{big_n}:{big_n}"),
                "fill": fill_name(&spec.fill),
                "depth": p.word.len(),
                "beta": { "lo": hull.lo_f64(), "hi": hull.hi_f64(), "decimal": decimal(&hull, 40) },
                "clamps": p.clamps,
            });
            let base = b2.alphabet_top() as u32 + 1;
            if json_out {
                finish_construct(cfg, fill, meta, None, Some(p.word))
            } else {
                let mut sink = Out::open(cfg)?.digits(base)?;
                sink.push(&p.word);
                finish_construct(cfg, fill, meta, Some(sink), None)
            }
        }
    }
}

fn stream_bary(
    cfg: &RunConfig,
    fill: &FillArgs,
    spec: &ConstructionSpec,
    plan: &BaryPlan,
    mut meta: Value,
    json_out: bool,
) -> CliResult {
    let mut digits = Vec::new();
    let (clamps, written) = if json_out {
        (plan.stream(&spec.fill, spec.depth, |c| digits.extend_from_slice(c))?, None)
    } else {
        let mut sink = Out::open(cfg)?.digits(plan.base)?;
        let log = plan.stream(&spec.fill, spec.depth, |c| sink.push(c))?;
        (log, Some(sink))
    };
    meta["fill"] = json!(fill_name(&spec.fill));
    meta["depth"] = json!(spec.depth);
    meta["schedule"] = json!(plan.schedule);
    meta["clamps"] = json!(clamps);
    meta["complete_stages"] = json!(plan.complete_stages(spec.depth));
    finish_construct(cfg, fill, meta, written, json_out.then_some(digits))
}

fn finish_construct(
    cfg: &RunConfig,
    fill: &FillArgs,
    meta: Value,
    written: Option<crate::output::DigitSink>,
    digits: Option<Vec<u8>>,
) -> CliResult {
    if let Some(s) = written {
        s.finish()?;
    }
    write_sidecar(sidecar_path(cfg, fill), cfg, meta.clone())?;
    if let Some(d) = digits {
        let mut r = meta;
        r["digits"] = json!(format_digits_compact(&d));
        Out::open(cfg)?.json(r)?;
    }
    Ok(())
}

enum Target {
    Bary(BaryPlan),
    Beta { runs: ScheduledRuns, beta_n: BetaSystem },
}

fn measure_target(a: &MeasureArgs) -> CliResult<Target> {
    if let Some(path) = &a.sidecar {
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let kind = doc["kind"].as_str().unwrap_or("");
        let runs: ScheduledRuns = serde_json::from_value(doc["schedule"].clone())
            .map_err(|e| usage(format!("{path}: bad schedule: {e}")))?;
        return match kind {
            "bary" | "restricted" => {
                let base = doc["base"].as_u64().ok_or_else(|| usage(format!("{path}: missing base")))? as u32;
                let set = match doc["set"].as_str() {
                    Some(s) => Some(DigitSet::parse(base, s)?),
                    None => None,
                };
                Ok(Target::Bary(BaryPlan::from_schedule(runs, base, set.as_ref())?))
            }
            "beta" => {
                let spec = doc["fill_system"].as_str().ok_or_else(|| usage(format!("{path}: missing fill_system")))?;
                Ok(Target::Beta { runs, beta_n: BetaSystem::parse(spec)? })
            }
            other => Err(usage(format!("{path}: no measure for construction kind {other:?}"))),
        };
    }
    let theta = rat(a.theta.as_deref().unwrap())?;
    let v_hat = rat(a.vhat.as_deref().unwrap())?;
    if let Some(spec) = &a.beta {
        let n = a.big_n.ok_or_else(|| usage("--beta needs --big-n"))?;
        let beta_n = BetaSystem::parse(spec)?.beta_n(n)?;
        let runs = ScheduledRuns::new(&theta, &v_hat, a.stages, 1)?.with_beta_indices(n as u64);
        return Ok(Target::Beta { runs, beta_n });
    }
    let base = a.base.ok_or_else(|| usage("give --base or --beta"))?;
    let set = match &a.set {
        Some(s) => Some(DigitSet::parse(base, s)?),
        None => None,
    };
    let width = if base == 2 { 2 } else { 1 };
    let runs = ScheduledRuns::new(&theta, &v_hat, a.stages, width)?;
    Ok(Target::Bary(BaryPlan::from_schedule(runs, base, set.as_ref())?))
}

/// Largest measure denominator, in bits, that is expanded exactly.
const EXACT_BITS: f64 = 4096.0;

fn measure(g: &Global, cfg: &RunConfig, a: &MeasureArgs) -> CliResult {
    let target = measure_target(a)?;
    let word = match &a.word_file {
        Some(p) => {
            let (_, d) = read_digit_file(BufReader::new(std::fs::File::open(p)?))?;
            if (d.len() as u64) < a.depth {
                return Err(Error::InsufficientDepth(format!("{p} has {} digits, need {}", d.len(), a.depth)).into());
            }
            Some(d[..a.depth as usize].to_vec())
        }
        None => None,
    };
    let (value, shift) = match &target {
        Target::Bary(plan) => {
            let v = match &word {
                Some(w) => md::measure_bary_word(plan, w)?,
                None => md::measure_plan(plan, a.depth)?,
            };
            (v, None)
        }
        Target::Beta { runs, beta_n } => {
            let v = match &word {
                Some(w) => md::measure_beta_word(runs, beta_n, w)?,
                None => md::measure_beta(runs, a.depth)?,
            };
            (v, Some(beta_n))
        }
    };
    let neg_log = value.neg_log(shift, g.precision)?;
    let small = match &value {
        MeasureValue::Uniform { choices, exponent, .. } => (*exponent as f64) * (*choices as f64).log2() <= EXACT_BITS,
        MeasureValue::Blocks { factors, .. } => {
            factors.iter().map(|&(len, mult)| (len * mult) as f64).sum::<f64>() <= EXACT_BITS / 2.0
        }
    };
    let exact = if small { Some(value.to_rational(shift)?) } else { None };
    let closed = match &value {
        MeasureValue::Uniform { choices, exponent, .. } => format!("{choices}^-{exponent}"),
        MeasureValue::Blocks { factors, .. } => factors
            .iter()
            .map(|(l, m)| format!("#Sigma_{l}^-{m}"))
            .collect::<Vec<_>>()
            .join(" * "),
    };
    match format_or(g, Format::Text) {
        Format::Json => Out::open(cfg)?.json(json!({
            "depth": a.depth,
            "measure": value,
            "exact": exact.as_ref().map(rational),
            "neg_log": bracket(&neg_log),
        })),
        Format::Csv => Out::open(cfg)?.text(&format!(
            "depth,exact,neg_log_lo,neg_log_hi\n{},{},{:e},{:e}\n",
            a.depth,
            exact.as_ref().map(rational).unwrap_or_default(),
            neg_log.lo_f64(),
            neg_log.hi_f64()
        )),
        _ => {
            let mut s = format!("mu(I_{}) = {}", a.depth, if closed.is_empty() { "1".into() } else { closed });
            if let Some(q) = &exact {
                s.push_str(&format!(" = {}", rational(q)));
            }
            s.push_str(&format!("\n-log mu {}\n", decimal(&neg_log, 20)));
            Out::open(cfg)?.text(&s)
        }
    }
}

fn dim(g: &Global, cfg: &RunConfig, action: &DimCmd) -> CliResult {
    let fmt = format_or(g, Format::Text);
    match action {
        DimCmd::Formula { theta, vhat, base, set } => {
            let v_hat = rat(vhat)?;
            if let (Some(b), Some(s)) = (base, set) {
                if theta.trim() == "inf" {
                    return Err(usage("--theta inf is not supported with --set"));
                }
                let ds = DigitSet::parse(*b, s)?;
                let value = md::dim_formula_restricted(&rat(theta)?, &v_hat, &ds, g.precision)?;
                return match fmt {
                    Format::Json => Out::open(cfg)?.json(json!({
                        "theta": theta, "v_hat": vhat, "base": b, "set": s,
                        "value": bracket(&value), "decimal": decimal(&value, 30),
                    })),
                    Format::Csv => Out::open(cfg)?.text(&format!(
                        "theta,v_hat,lo,hi\n{theta},{vhat},{:e},{:e}\n",
                        value.lo_f64(),
                        value.hi_f64()
                    )),
                    _ => Out::open(cfg)?.text(&decimal(&value, 30)),
                };
            }
            let value = if theta.trim() == "inf" {
                md::dim_formula_at_infinity(&v_hat)?
            } else {
                md::dim_formula(&rat(theta)?, &v_hat)?
            };
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({
                    "theta": theta, "v_hat": vhat, "value": rational(&value), "approx": f64_of(&value),
                })),
                Format::Csv => Out::open(cfg)?.text(&format!("theta,v_hat,value\n{theta},{vhat},{}\n", rational(&value))),
                _ => Out::open(cfg)?.text(&rational(&value)),
            }
        }
        DimCmd::Sup { vhat, grid } => {
            let r = md::dim_sup(&rat(vhat)?, *grid)?;
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({
                    "v_hat": vhat,
                    "theta0": rational(&r.theta0),
                    "value": rational(&r.value),
                    "closed_form": rational(&r.closed_form),
                    "stationary": r.stationary,
                    "grid_ok": r.grid_ok,
                    "holds": r.holds(),
                })),
                Format::Csv => Out::open(cfg)?.text(&format!(
                    "v_hat,theta0,value,closed_form,holds\n{vhat},{},{},{},{}\n",
                    rational(&r.theta0),
                    rational(&r.value),
                    rational(&r.closed_form),
                    r.holds()
                )),
                _ => Out::open(cfg)?.text(&format!(
                    "theta0 {}\nvalue {}\nclosed form {}\nstationary {}\ngrid {}\n",
                    rational(&r.theta0),
                    rational(&r.value),
                    rational(&r.closed_form),
                    r.stationary,
                    if r.grid_ok { "ok" } else { "beaten" }
                )),
            }
        }
        DimCmd::Local { schedule, stages, base, set, beta, big_n, tol } => {
            let theta = rat(&schedule.theta)?;
            let v_hat = rat(&schedule.vhat)?;
            let tol = rat(tol)?;
            let rep = if let Some(spec) = beta {
                let n = big_n.expect("clap enforces --big-n");
                let sys = BetaSystem::parse(spec)?;
                let beta_n = sys.beta_n(n)?;
                let runs = ScheduledRuns::new(&theta, &v_hat, *stages, 1)?.with_beta_indices(n as u64);
                md::local_dimension_beta(&runs, &sys, &beta_n, *stages, &tol, g.precision)?
            } else {
                let b = base.ok_or_else(|| usage("give --base or --beta"))?;
                let ds = match set {
                    Some(s) => Some(DigitSet::parse(b, s)?),
                    None => None,
                };
                let runs = ScheduledRuns::new(&theta, &v_hat, *stages, if b == 2 { 2 } else { 1 })?;
                md::local_dimension_bary(&runs, b, ds.as_ref(), *stages, &tol, g.precision)?
            };
            match fmt {
                Format::Json => Out::open(cfg)?.json(serde_json::to_value(&rep)?),
                Format::Csv => Out::open(cfg)?.text(&rep.to_csv()),
                _ => {
                    let (llo, lhi) = rep.limit.to_f64();
                    let mut s = format!("formula {}\nlimit [{llo:.12}, {lhi:.12}]\n", rational(&rep.formula_value));
                    for p in &rep.trajectory {
                        let (lo, hi) = p.ratio.to_f64();
                        s.push_str(&format!("k={} depth={} ratio [{lo:.12}, {hi:.12}]\n", p.k, p.depth));
                    }
                    s.push_str(&match rep.converged_at {
                        Some(k) => format!("settled from k={k}\n"),
                        None => "not settled\n".to_string(),
                    });
                    Out::open(cfg)?.text(&s)
                }
            }
        }
        DimCmd::S0 { schedule, eps, probe } => {
            let theta = rat(&schedule.theta)?;
            let v_hat = rat(&schedule.vhat)?;
            let eps_q = rat(eps)?;
            let s0 = md::critical_exponent_s0(&theta, &v_hat, &eps_q)?;
            let pr = if *probe {
                Some(md::series_probe(&theta, &v_hat, &eps_q, 1.0, 2.0, 4000, &[-0.1, 0.1])?)
            } else {
                None
            };
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({
                    "theta": schedule.theta,
                    "v_hat": schedule.vhat,
                    "eps": eps,
                    "s0": rational(&s0),
                    "probe": pr.as_ref().map(|p| json!({
                        "terms": p.terms, "samples": p.samples, "sign_flip": p.sign_flip(),
                    })),
                })),
                Format::Csv => {
                    let s = match &pr {
                        Some(p) => {
                            let rows: String = p.samples.iter().map(|(x, y)| format!("{x},{y}\n")).collect();
                            format!("s,slope\n{rows}")
                        }
                        None => format!("s0\n{}\n", rational(&s0)),
                    };
                    Out::open(cfg)?.text(&s)
                }
                _ => {
                    let mut s = rational(&s0);
                    if let Some(p) = &pr {
                        for (x, y) in &p.samples {
                            s.push_str(&format!("\ns={x:.6} slope={y:.6}"));
                        }
                        s.push_str(&format!("\nsign flip {}", p.sign_flip()));
                    }
                    Out::open(cfg)?.text(&s)
                }
            }
        }
        DimCmd::Limit { v, grid } => {
            let v = rat(v)?;
            let grid = grid.iter().map(|t| rat(t)).collect::<CliResult<Vec<_>>>()?;
            if grid.is_empty() {
                return Err(usage("--grid needs at least one value"));
            }
            let r = md::reprove_1_5_limit(&v, &grid);
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({
                    "v": rational(&r.v),
                    "limit": rational(&r.limit),
                    "points": r.points.iter().map(|p| json!({
                        "theta": rational(&p.theta),
                        "value": p.value.as_ref().map(rational),
                    })).collect::<Vec<_>>(),
                    "monotone": r.monotone,
                })),
                Format::Csv => {
                    let mut s = String::from("theta,value\n");
                    for p in &r.points {
                        s.push_str(&format!(
                            "{},{}\n",
                            rational(&p.theta),
                            p.value.as_ref().map(rational).unwrap_or_default()
                        ));
                    }
                    Out::open(cfg)?.text(&s)
                }
                _ => {
                    let mut s = format!("limit {}\n", rational(&r.limit));
                    for p in &r.points {
                        let val = match &p.value {
                            Some(x) => format!("{} ({:.6})", rational(x), f64_of(x)),
                            None => "below threshold".into(),
                        };
                        s.push_str(&format!("theta={} {val}\n", rational(&p.theta)));
                    }
                    s.push_str(&format!("monotone {}\n", r.monotone));
                    Out::open(cfg)?.text(&s)
                }
            }
        }
    }
}

fn parry(g: &Global, cfg: &RunConfig, action: &ParryCmd) -> CliResult {
    let fmt = format_or(g, Format::Text);
    match action {
        ParryCmd::Check { word } => {
            let w = UltimatelyPeriodicWord::parse(word)?;
            let ok = is_self_admissible(&w);
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({ "word": w.to_string(), "self_admissible": ok })),
                Format::Csv => Out::open(cfg)?.text(&format!("word,self_admissible\n{w},{ok}\n")),
                _ => Out::open(cfg)?.text(if ok { "self-admissible" } else { "not self-admissible" }),
            }
        }
        ParryCmd::Invert { word, prefix, top } => {
            let places = (g.precision as usize * 3 / 10).max(10);
            let (value, poly) = if *prefix {
                let d = parse_digit_string(word)?;
                let e = parry_invert_prefix(&d, *top)?;
                let lo = e.lower.refine(g.precision)?;
                let hi = e.upper.refine(g.precision)?;
                (lo.hull(&hi), None)
            } else {
                let w = UltimatelyPeriodicWord::parse(word)?;
                let root = parry_invert(&w)?;
                let v = root.refine(g.precision)?;
                let coeffs: Vec<String> = root.coefficients().iter().map(rational).collect();
                (v, Some(coeffs))
            };
            let text = decimal(&value, places);
            match fmt {
                Format::Json => Out::open(cfg)?.json(json!({
                    "word": word,
                    "prefix": prefix,
                    "beta": text,
                    "bracket": bracket(&value),
                    "width_log2": value.width_log2(),
                    "coefficients": poly,
                })),
                Format::Csv => Out::open(cfg)?.text(&format!(
                    "word,lo,hi\n{word},{:e},{:e}\n",
                    value.lo_f64(),
                    value.hi_f64()
                )),
                _ => Out::open(cfg)?.text(&text),
            }
        }
    }
}
