//! Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use betadim::bary::{estimate_exponents, expand_lacunary, run_decomposition, DigitSet, LacunaryRule, RunKinds, RunScanner};
use betadim::beta_shift::{parry_invert, BetaSystem, TransitionTable};
use betadim::constructions::{
    generate_parameter_space, is_self_admissible_prefix, BaryPlan, ConstructionSpec, FillPolicy, ScheduledRuns,
};
use betadim::measures_dim::{dim_formula, dim_sup, local_dimension_bary, stolz_cesaro};
use betadim::numerics::{Dyadic, Scalar};
use betadim::words::UltimatelyPeriodicWord;

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const BARY_SETS: [(i64, i64, i64, i64, u32); 3] = [(3, 1, 1, 3, 3), (4, 1, 1, 2, 10), (2, 1, 1, 2, 2)];

fn ac1() -> Outcome {
    let one = BigRational::one();
    let mut points = 0;
    'grid: for vd in [3i64, 4, 5, 7, 10] {
        for vn in 1..vd {
            let v = r(vn, vd);
            let threshold = &one / (&one - &v);
            for step in 0..4 {
                let theta = &threshold + r(step * 3, 2);
                let want = (&theta - &one - &theta * &v) / ((&one + &theta * &v) * (&theta - &one));
                // the same value in the form (1/(1+θv̂))(1 - θv̂/(θ-1))
                let alt = (&one / (&one + &theta * &v)) * (&one - &theta * &v / (&theta - &one));
                let got = dim_formula(&theta, &v).map_err(e2s)?;
                ensure(got == want && got == alt, || format!("theta={theta} v_hat={v}: {got}"))?;
                points += 1;
                if points == 50 {
                    break 'grid;
                }
            }
        }
    }
    ensure(points == 50, || format!("only {points} grid points"))?;
    for i in 0..20 {
        let v = r(i, 20);
        let s = dim_sup(&v, 100).map_err(e2s)?;
        let closed = {
            let q = (&one - &v) / (&one + &v);
            &q * &q
        };
        ensure(s.holds() && s.value == closed, || format!("sup at v_hat={v}: {s:?}"))?;
    }
    ensure(dim_sup(&BigRational::zero(), 10).map_err(e2s)?.value == one, || "v_hat=0".into())?;
    ensure(dim_formula(&r(5, 1), &one).map_err(e2s)?.is_zero(), || "v_hat=1".into())?;
    for (n, d) in [(1, 3), (1, 2), (3, 4)] {
        let v = r(n, d);
        let t = &one / (&one - &v);
        ensure(dim_formula(&t, &v).map_err(e2s)?.is_zero(), || format!("threshold at v_hat={v}"))?;
    }
    Ok("50 grid points exact, 20 suprema, boundaries".into())
}

fn ac2() -> Outcome {
    let mut detail = Vec::new();
    for (tn, td, vn, vd, b) in BARY_SETS {
        let (theta, v) = (r(tn, td), r(vn, vd));
        let s = ScheduledRuns::new(&theta, &v, 16, if b == 2 { 2 } else { 1 }).map_err(e2s)?;
        let rep = local_dimension_bary(&s, b, None, 15, &r(1, 100), 64).map_err(e2s)?;
        let f = dim_formula(&theta, &v).map_err(e2s)?;
        let at = rep.at(15).ok_or("no stage 15")?;
        let dev = (&at.ratio.lo - &f).abs();
        let step = &stolz_cesaro(&s)[14].step;
        let sdev = (step - &f).abs();
        ensure(dev < r(2, 100) && sdev < r(5, 1000), || {
            format!("({theta},{v},{b}): ratio dev {:.4}, step dev {:.4}", dev.to_f64().unwrap(), sdev.to_f64().unwrap())
        })?;
        detail.push(format!("({theta},{v},{b}) dev {:.1e}", dev.to_f64().unwrap()));
    }
    Ok(detail.join(", "))
}

fn ac3() -> Outcome {
    let tol = 0.03;
    let mut detail = Vec::new();
    for (tn, td, vn, vd, b) in BARY_SETS {
        let (theta, v) = (r(tn, td), r(vn, vd));
        let s = ScheduledRuns::new(&theta, &v, 13, if b == 2 { 2 } else { 1 }).map_err(e2s)?;
        // stage 12 is settled once the next run has reached its length
        let depth = s.n[12] + s.delta(11) + 1;
        let spec = ConstructionSpec::new(theta.clone(), v.clone(), FillPolicy::Seeded(7), depth);
        let plan = BaryPlan::new(&spec, b, None).map_err(e2s)?;
        let mut scan = RunScanner::new(b, RunKinds::Both).monotone_only();
        plan.stream(&spec.fill, depth, |c| scan.feed(c)).map_err(e2s)?;
        let est = estimate_exponents(&scan.finish()).map_err(e2s)?;
        let tv = (&theta * &v).to_f64().unwrap();
        let vh = v.to_f64().unwrap();
        let vhat = est.v_hat_f64();
        ensure((est.v_f64() - tv).abs() <= tol && (vhat - vh).abs() <= tol, || {
            format!("({theta},{v},{b}) at depth {depth}: v={:.4} v_hat={vhat:.4}", est.v_f64())
        })?;
        detail.push(format!("({theta},{v},{b}) v={:.3} v̂={vhat:.3}", est.v_f64()));
    }
    let digits = expand_lacunary(10, &LacunaryRule::Power(r(1, 1)), 1 << 16).map_err(e2s)?;
    let est = estimate_exponents(&run_decomposition(&digits, 10).map_err(e2s)?).map_err(e2s)?;
    let vhat = est.v_hat_f64();
    ensure((0.95..=1.05).contains(&est.v_f64()) && (0.45..=0.55).contains(&vhat), || {
        format!("lacunary: v={:.4} v_hat={vhat:.4}", est.v_f64())
    })?;
    detail.push(format!("lacunary v={:.3} v̂={vhat:.3}", est.v_f64()));
    Ok(detail.join(", "))
}

fn words(top: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..=top).map(move |c| {
                    let mut w2 = w.clone();
                    w2.push(c);
                    w2
                })
            })
            .collect();
    }
    out
}

fn ac4() -> Outcome {
    let mut checked = 0usize;
    for spec in ["root:1,1", "root:1,0,1", "root:1,1,1", "int:3"] {
        let b = BetaSystem::parse(spec).map_err(e2s)?;
        for n in 0..=10 {
            for w in words(b.alphabet_top(), n) {
                let a = b.is_admissible(&w).map_err(e2s)?;
                let c = b.is_admissible_bruteforce(&w).map_err(e2s)?;
                ensure(a == c, || format!("{spec}: disagreement on {w:?}"))?;
                checked += 1;
            }
        }
        for n in 1..=20 {
            let rc = b.renyi_check(n).map_err(e2s)?;
            ensure(rc.holds(), || format!("{spec}: Rényi bounds fail at n={n}"))?;
        }
    }
    let g = BetaSystem::parse("root:1,1").map_err(e2s)?;
    let (mut f0, mut f1) = (BigUint::zero(), BigUint::one());
    for n in 0..=22usize {
        if n >= 2 && n - 2 <= 20 {
            ensure(g.count_admissible(n - 2).map_err(e2s)? == f0, || format!("golden count at n={}", n - 2))?;
        }
        let f2 = &f0 + &f1;
        f0 = f1;
        f1 = f2;
    }
    Ok(format!("{checked} words, Rényi n<=20, Fibonacci counts"))
}

fn random_word(t: &TransitionTable, n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut w = Vec::with_capacity(n);
    let mut j = 0;
    for _ in 0..n {
        let c = rng.gen_range(0..=t.max_digit(j));
        j = t.step(j, c).unwrap();
        w.push(c);
    }
    w
}

fn ac5() -> Outcome {
    let prec = 160;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let systems: Vec<BetaSystem> =
        ["root:1,1", "root:1,0,1", "root:1,1,1"].iter().map(|s| BetaSystem::parse(s)).collect::<Result<_, _>>().map_err(e2s)?;
    let tables: Vec<TransitionTable> = systems.iter().map(|b| b.transition_table()).collect::<Result<_, _>>().map_err(e2s)?;
    let mut pairs = 0;
    while pairs < 1000 {
        let i = pairs % systems.len();
        let (b, t) = (&systems[i], &tables[i]);
        let n = rng.gen_range(1..=6);
        let w = random_word(t, n, &mut rng);
        if !b.is_full(&w).map_err(e2s)? {
            continue;
        }
        let w2 = random_word(t, rng.gen_range(1..=6), &mut rng);
        let mut ww = w.clone();
        ww.extend_from_slice(&w2);
        let joint = b.cylinder(&ww, prec).map_err(e2s)?.length;
        let scale = b.beta(prec + 32).map_err(e2s)?.powi(-(n as i64), prec + 32).map_err(e2s)?;
        let product = scale.mul(&b.cylinder(&w2, prec).map_err(e2s)?.length, prec);
        ensure(joint.overlaps(&product) && joint.width_log2() < -100, || format!("product law fails for {w:?}·{w2:?}"))?;
        pairs += 1;
    }
    let mut bounded = 0;
    for spec in ["root:1,1", "root:1,1,1"] {
        let b = BetaSystem::parse(spec).map_err(e2s)?;
        for big_n in [3usize, 6] {
            let bn = b.beta_n(big_n).map_err(e2s)?;
            let t = bn.transition_table().map_err(e2s)?;
            let beta = b.beta(prec).map_err(e2s)?;
            for _ in 0..250 {
                let n = rng.gen_range(1..=12);
                let w = random_word(&t, n, &mut rng);
                let len = b.cylinder(&w, prec).map_err(e2s)?.length;
                let lo = beta.powi(-((n + big_n) as i64), prec).map_err(e2s)?;
                let hi = beta.powi(-(n as i64), prec).map_err(e2s)?;
                ensure(le(&lo, &len) && le(&len, &hi), || {
                    format!("{spec} N={big_n}: bounds fail for {w:?}")
                })?;
                bounded += 1;
            }
        }
    }
    let tiny = Scalar::from_dyadic(Dyadic::new(BigInt::one(), -64));
    for spec in ["root:1,1", "root:1,0,1", "root:1,1,1", "int:3"] {
        let b = BetaSystem::parse(spec).map_err(e2s)?;
        for n in 1..=10 {
            let mut sum = Scalar::from_int(0);
            for w in b.admissible_words(n).map_err(e2s)? {
                sum = sum.add(&b.cylinder(&w, prec).map_err(e2s)?.length, prec);
            }
            let dev = sum.sub(&Scalar::from_int(1), prec);
            ensure(dev.hi().abs() < *tiny.hi() && dev.lo().abs() < *tiny.hi(), || format!("{spec}: lengths at n={n} sum to {}", sum.mid_f64()))?;
        }
    }
    Ok(format!("{pairs} product pairs, {bounded} bounded words, sums n<=10"))
}

/// `a <= b` certified, or equality up to enclosures narrower than `2^-100`
/// (full cylinders meet the upper bound exactly).
fn le(a: &Scalar, b: &Scalar) -> bool {
    a.certainly_le(b) == Some(true) || (a.overlaps(b) && a.width_log2() < -100 && b.width_log2() < -100)
}

fn within(a: &Scalar, b: &Scalar, bits: i64) -> bool {
    let eps = Dyadic::new(BigInt::one(), -bits);
    a.hi().sub(b.lo()) <= eps && b.hi().sub(a.lo()) <= eps
}

fn ac6() -> Outcome {
    let prec = 192;
    for spec in ["root:1,1", "root:1,0,1", "root:1,1,1"] {
        let b = BetaSystem::parse(spec).map_err(e2s)?;
        let d = b.greedy_expand(&BigRational::one(), 16).map_err(e2s)?;
        let last = d.iter().rposition(|&x| x != 0).ok_or("zero expansion")?;
        let root = parry_invert(&UltimatelyPeriodicWord::finite(&d[..=last])).map_err(e2s)?;
        let got = root.refine(prec).map_err(e2s)?;
        ensure(within(&got, &b.beta(prec).map_err(e2s)?, 100), || format!("{spec}: round trip misses"))?;
    }
    let golden = BetaSystem::parse("root:1,1").map_err(e2s)?.beta(prec).map_err(e2s)?;
    for w in [UltimatelyPeriodicWord::periodic(&[], &[1, 0]), UltimatelyPeriodicWord::finite(&[1, 1])] {
        let got = parry_invert(&w).map_err(e2s)?.refine(prec).map_err(e2s)?;
        ensure(within(&got, &golden, 100), || "golden inversion misses".into())?;
    }
    Ok("battery and golden words within 2^-100".into())
}

fn ac7() -> Outcome {
    let b0 = BetaSystem::parse("root:3/2").map_err(e2s)?;
    let b1 = BetaSystem::parse("root:1,1").map_err(e2s)?;
    let b2 = BetaSystem::parse("root:1,1,1").map_err(e2s)?;
    let b0v = b0.beta(128).map_err(e2s)?;
    let b1v = b1.beta(128).map_err(e2s)?;
    let mut widest = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let spec = ConstructionSpec::new(r(3, 1), r(1, 3), FillPolicy::Seeded(seed), 120);
        let p = generate_parameter_space(&b0, &b1, &b2, 5, &spec).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(is_self_admissible_prefix(&p.word), || format!("seed {seed}: word not self-admissible"))?;
        let hull = p.enclosure.hull();
        ensure(
            b0v.certainly_le(&hull) == Some(true) && hull.certainly_le(&b1v) == Some(true),
            || format!("seed {seed}: enclosure not inside (beta0, beta1)"),
        )?;
        widest = widest.max(hull.width_log2() as f64);
    }
    Ok(format!("20 seeds, enclosures of width <= 2^{widest}"))
}

fn ac8() -> Outcome {
    let set = DigitSet::parse(3, "0,2").map_err(e2s)?;
    let s = ScheduledRuns::new(&r(3, 1), &r(1, 3), 15, 1).map_err(e2s)?;
    let rep = local_dimension_bary(&s, 3, Some(&set), 15, &r(1, 100), 128).map_err(e2s)?;
    let at = rep.at(15).ok_or("no stage 15")?;
    let far = rep.limit.distance(&at.ratio.lo).max(rep.limit.distance(&at.ratio.hi));
    let want = (2f64.ln() / 3f64.ln()) * 0.25;
    ensure(far < r(2, 100) && rep.limit.to_f64().0 <= want && want <= rep.limit.to_f64().1, || {
        format!("ratio {:?} vs limit {:?}", at.ratio.to_f64(), rep.limit.to_f64())
    })?;
    Ok(format!("ratio {:.5} vs {want:.5}", at.ratio.to_f64().0))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("AC1 formula reproduction", ac1, 1),
        ("AC2 b-ary local dimension", ac2, 10),
        ("AC3 exponent round trip", ac3, 5),
        ("AC4 beta-shift oracles", ac4, 30),
        ("AC5 cylinder laws", ac5, 60),
        ("AC6 Parry round trip", ac6, 5),
        ("AC7 parameter-space sandwich", ac7, 30),
        ("AC8 restricted-digit scaling", ac8, 10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = run();
        let took = t.elapsed();
        let slow = took > Duration::from_secs(budget);
        let (tag, detail) = match (&res, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name} [{:.2} s / {budget} s] {detail}", took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
