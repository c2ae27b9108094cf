use super::*;
use crate::bary::{run_decomposition, run_decomposition_with, RunKind, RunKinds};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn spec(theta: BigRational, v_hat: BigRational, fill: FillPolicy, depth: u64) -> ConstructionSpec {
    ConstructionSpec::new(theta, v_hat, fill, depth)
}

// longest block of `d` inside the first `n` digits
fn longest(w: &[u8], d: u8, n: usize) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &c in &w[..n.min(w.len())] {
        cur = if c == d { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

#[test]
fn schedule_examples() {
    let s = schedule(&q(3, 1), &q(1, 3), 8).unwrap();
    for k in 0..8 {
        let p = 3u64.pow(k as u32 + 1);
        assert_eq!((s.n[k], s.m[k], s.t[k]), (p, 2 * p, 0));
    }
    let s = schedule(&q(2, 1), &q(1, 2), 8).unwrap();
    for k in 0..8 {
        assert_eq!(s.m[k], 2 << (k + 1));
        assert_eq!(s.m[k], s.next_n(k));
        assert_eq!(s.t[k], 0);
    }
    assert!(matches!(schedule(&q(6, 5), &q(1, 2), 3), Err(Error::InfeasibleParameters(_))));
    assert!(matches!(schedule(&q(3, 1), &q(1, 1), 3), Err(Error::InfeasibleParameters(_))));
}

#[test]
fn schedule_limits_and_bounded_markers() {
    for (th, vh) in [(q(3, 1), q(1, 3)), (q(4, 1), q(1, 2)), (q(5, 1), q(1, 4)), (q(7, 2), q(3, 5))] {
        let s = schedule(&th, &vh, 14).unwrap();
        let bound = 2.0 / vh.to_f64().unwrap() + 1.0;
        for k in 0..s.stages() {
            assert!(s.n[k] < s.m[k] && s.m[k] <= s.next_n(k));
            if k > 0 {
                assert!(s.m[k] - s.n[k] >= s.m[k - 1] - s.n[k - 1]);
            }
            assert!((s.t[k] as f64) <= bound);
        }
        let dev = limit_deviation(&s, &th, &vh);
        let k = s.stages() - 1;
        assert!(dev[k].0 < 10.0 / s.n[k] as f64, "{dev:?}");
        assert!(dev[k].1 < 10.0 / s.n[k] as f64, "{dev:?}");
    }
}

#[test]
fn bary_template_example() {
    let g = generate_bary(&spec(q(3, 1), q(1, 3), FillPolicy::Constant(1), 9), 3).unwrap();
    assert_eq!(g.digits, vec![1, 1, 1, 0, 0, 1, 1, 1, 1]);
    assert_eq!(&g.digits[2..6], &[1, 0, 0, 1]);
    assert_eq!(g.clamps.count, 0);
}

#[test]
fn binary_markers_are_ten_blocks() {
    let s = spec(q(5, 1), q(1, 4), FillPolicy::Constant(1), 30);
    let g = generate_bary(&s, 2).unwrap();
    let sch = &g.schedule;
    assert_eq!((sch.n[0], sch.m[0], sch.t[0]), (5, 11, 2));
    for p in [17usize, 23] {
        assert_eq!(&g.digits[p - 1..p + 1], &[1, 0]);
    }
    let g3 = generate_bary(&s, 3).unwrap();
    assert_eq!(g3.digits[16], 1);
    assert_eq!(g3.digits[17], 1);
}

#[test]
fn zero_fill_is_clamped() {
    let g = generate_bary(&spec(q(3, 1), q(1, 3), FillPolicy::Constant(0), 300), 3).unwrap();
    assert!(g.clamps.count > 0);
    assert!(g.clamps.samples.iter().all(|e| e.wanted == 0 && e.used != 0));
    let s = &g.schedule;
    for k in 0..s.stages() {
        let end = s.next_n(k) as usize;
        if end <= g.digits.len() {
            assert_eq!(longest(&g.digits, 0, end) as u64, s.delta(k));
        }
    }
}

#[test]
fn unknown_fill_digit_is_rejected() {
    assert!(generate_bary(&spec(q(3, 1), q(1, 3), FillPolicy::Constant(5), 20), 3).is_err());
}

fn check_maximal_runs(g: &Generated, digits: &[u8]) {
    let s = &g.schedule;
    for k in 0..s.stages() {
        let end = s.next_n(k) as usize;
        if end > g.digits.len() {
            break;
        }
        for &d in digits {
            let l = longest(&g.digits, d, end) as u64;
            if d == 0 {
                assert_eq!(l, s.delta(k), "stage {k} digit {d}");
            } else {
                assert!(l < s.delta(k).max(2), "stage {k} digit {d}: {l}");
            }
        }
    }
}

#[test]
fn maximal_run_property() {
    for (th, vh, b) in [(q(3, 1), q(1, 3), 3u32), (q(4, 1), q(1, 2), 10), (q(5, 1), q(1, 4), 4)] {
        for seed in 0..4 {
            let g = generate_bary(&spec(th.clone(), vh.clone(), FillPolicy::Seeded(seed), 20_000), b).unwrap();
            check_maximal_runs(&g, &[0, (b - 1) as u8]);
            let dec = run_decomposition(&g.digits, b).unwrap();
            // the stage runs appear in the monotone list
            for k in 1..g.schedule.stages() {
                let pair = (g.schedule.n[k], g.schedule.m[k]);
                if pair.1 <= g.digits.len() as u64 {
                    assert!(dec.monotone.contains(&pair), "{pair:?} {:?}", dec.monotone);
                }
            }
        }
    }
}

#[test]
fn restricted_examples() {
    let set = DigitSet::new(3, &[0, 2]).unwrap();
    let g = generate_restricted(&spec(q(3, 1), q(1, 3), FillPolicy::Seeded(7), 5000), &set).unwrap();
    assert!(g.digits.iter().all(|&d| d == 0 || d == 2));
    let s = &g.schedule;
    assert_eq!(g.digits[s.n[0] as usize - 1], 2);
    assert_eq!(g.digits[s.m[2] as usize - 1], 2);
    check_maximal_runs(&g, &[0]);
    // full alphabet reproduces the unrestricted generator
    let full = DigitSet::full(5).unwrap();
    let sp = spec(q(4, 1), q(1, 2), FillPolicy::Seeded(3), 4000);
    assert_eq!(generate_restricted(&sp, &full).unwrap().digits, generate_bary(&sp, 5).unwrap().digits);
    assert!(matches!(DigitSet::new(5, &[1, 2]), Err(Error::InvalidDigitSet(_))));
}

#[test]
fn beta_layout_indices() {
    let s = schedule(&q(3, 1), &q(1, 3), 4).unwrap().with_beta_indices(3);
    let b = s.beta.as_ref().unwrap();
    assert_eq!(b.l[0], 3);
    assert_eq!(b.h[0], 6 + 12);
    assert_eq!(b.l[1], 9 + 12);
    assert_eq!(b.h[1], 18 + 24);
    assert_eq!(b.u, b.h);
    assert_eq!(b.delta, vec![2, 8, 26, 80]);
}

#[test]
fn beta_golden_example() {
    let golden = BetaSystem::parse("root:1,1").unwrap();
    let g = generate_beta(&spec(q(3, 1), q(1, 3), FillPolicy::Seeded(1), 60), &golden, 3).unwrap();
    assert_eq!(g.digits.len(), 60);
    let b = g.schedule.beta.clone().unwrap();
    let (l, h, nn) = (b.l[0] as usize, b.h[0] as usize, 3usize);
    assert_eq!(g.digits[l + nn - 1], 1);
    assert_eq!(g.digits[h - nn - 1], 1);
    // zeros from the first 1 to the second: δ_1 prescribed plus both N-pads
    let between = &g.digits[l + nn..h - nn - 1];
    assert!(between.iter().all(|&d| d == 0));
    assert_eq!(between.len() as u64, b.delta[0] + 2 * nn as u64);
    assert_eq!(&g.digits[l + 2 * nn..l + 2 * nn + b.delta[0] as usize], &[0, 0]);
    assert!(golden.is_admissible(&g.digits).unwrap());
    assert!(golden.beta_n(3).unwrap().is_admissible(&g.digits).unwrap());
}

#[test]
fn beta_zero_fill_is_admissible() {
    for spec_s in ["root:1,1", "root:1,1,1", "int:3"] {
        let beta = BetaSystem::parse(spec_s).unwrap();
        let g = generate_beta(&spec(q(4, 1), q(1, 2), FillPolicy::Constant(0), 3000), &beta, 4).unwrap();
        assert!(beta.is_admissible(&g.digits).unwrap());
    }
}

#[test]
fn beta_exponent_round_trip() {
    let golden = BetaSystem::parse("root:1,1").unwrap();
    for seed in 0..3 {
        let g = generate_beta(&spec(q(3, 1), q(1, 3), FillPolicy::Seeded(seed), 10_000), &golden, 3).unwrap();
        let dec = run_decomposition_with(&g.digits, 2, RunKinds::ZerosOnly).unwrap();
        assert!(dec.runs.iter().all(|r| r.kind == RunKind::Zeros));
        let e = crate::bary::estimate_exponents(&dec).unwrap();
        assert!((e.v_f64() - 1.0).abs() < 0.05, "v = {}", e.v_f64());
        assert!((e.v_hat_f64() - 1.0 / 3.0).abs() < 0.05, "v_hat = {}", e.v_hat_f64());
    }
}

#[test]
fn parameter_space_example() {
    let b0 = BetaSystem::parse("root:3/2").unwrap();
    let b1 = BetaSystem::parse("root:1,1").unwrap();
    let b2 = BetaSystem::parse("root:1,1,1").unwrap();
    let sp = spec(q(3, 1), q(1, 3), FillPolicy::Seeded(0), 120);
    let p = generate_parameter_space(&b0, &b1, &b2, 5, &sp).unwrap();
    assert_eq!(p.prefix, vec![1, 0, 1, 0, 1]);
    assert_eq!(&p.word[5..10], &[0; 5]);
    assert!(is_self_admissible_prefix(&p.word));
    let hull = p.enclosure.hull();
    assert!(hull.lo_f64() > 1.5 && hull.hi_f64() < 1.618_033_988_75);
    assert!(matches!(
        generate_parameter_space(&b0, &b1, &b2, 4, &sp),
        Err(Error::PrefixConditionFailed(_))
    ));
    // zero tail: the base of the finite word is β̃_N itself
    let tilde = crate::beta_shift::parry_invert(&UltimatelyPeriodicWord::finite(&p.prefix)).unwrap();
    assert!((tilde.value().mid_f64() - p.beta_tilde.beta_f64()).abs() < 1e-15);
    assert!(p.beta_tilde.certainly_less(&b1).unwrap());
    assert!(b0.certainly_less(&p.beta_tilde).unwrap());
}

#[test]
fn fill_policy_parsing() {
    assert_eq!(FillPolicy::parse("const:1").unwrap(), FillPolicy::Constant(1));
    assert_eq!(FillPolicy::parse("seed:42").unwrap(), FillPolicy::Seeded(42));
    assert_eq!(FillPolicy::parse("stream:0121").unwrap(), FillPolicy::Stream(vec![0, 1, 2, 1]));
    assert!(FillPolicy::parse("rand").is_err());
}

#[test]
fn streaming_matches_collected() {
    let sp = spec(q(4, 1), q(1, 2), FillPolicy::Seeded(9), 300_000);
    let whole = generate_bary(&sp, 10).unwrap().digits;
    let plan = BaryPlan::new(&sp, 10, None).unwrap();
    let mut chunks = Vec::new();
    plan.stream(&sp.fill, sp.depth, |c| chunks.extend_from_slice(c)).unwrap();
    assert_eq!(whole, chunks);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beta_words_are_admissible(seed in 0u64..1000, big_n in 1u64..6, which in 0usize..3) {
        let specs = ["root:1,1", "root:1,0,1", "root:1,1,1"];
        let beta = BetaSystem::parse(specs[which]).unwrap();
        let Ok(bn) = beta.beta_n(big_n as usize) else { return Ok(()) };
        let g = generate_beta_with(&spec(q(3, 1), q(1, 3), FillPolicy::Seeded(seed), 600), &bn, big_n).unwrap();
        prop_assert!(bn.is_admissible(&g.digits).unwrap());
        prop_assert!(beta.is_admissible(&g.digits).unwrap());
    }

    #[test]
    fn free_count_matches_layout(th in 2u32..6, seed in 0u64..100) {
        let sp = spec(q(th as i64, 1), q(1, 2), FillPolicy::Seeded(seed), 2000);
        let plan = BaryPlan::new(&sp, 3, None).unwrap();
        let gaps = plan.layout.gaps(2000);
        let free: u64 = gaps.iter().map(|g| g.len).sum();
        prop_assert_eq!(free, plan.layout.free_upto(2000));
        let g = generate_bary(&sp, 3).unwrap();
        for p in plan.layout.pieces() {
            for i in p.start..p.end().min(2001) {
                prop_assert_eq!(g.digits[i as usize - 1], p.digit);
            }
        }
    }
}
