//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines are always printed.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Small;
use rhowalk::cli;
use rhowalk::qspace::{crowding_check, kernel, PointEnumeration};
use rhowalk::refine::{code, implication_check, parent, refine, sigma, Labeling, RefineParams};
use rhowalk::walks::universe_from_spec;
use rhowalk::{Ordinal, Walker};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn universes() -> Outcome {
    let walker = Walker::canonical();
    let start = Instant::now();
    let small = universe_from_spec("w2:4").unwrap();
    let a = walker.check_universe(&small).unwrap();
    let first = start.elapsed();
    let mixed = universe_from_spec("w3:2").unwrap();
    let cubic = mixed.iter().filter(|x| **x >= o("w^3")).count();
    let b = walker.check_universe(&mixed).unwrap();
    let pass = small.len() == 125
        && a.triples == 317_750
        && a.failures == 0
        && first < Duration::from_secs(120)
        && cubic >= 15
        && b.failures == 0;
    outcome(
        pass,
        format!(
            "w2:4 size={} triples={} failures={} time={}; w3:2 size={} (>=w^3: {}) triples={} failures={}",
            small.len(),
            a.triples,
            a.failures,
            secs(first),
            mixed.len(),
            cubic,
            b.triples,
            b.failures
        ),
    )
}

/// Every `0 ≤ k < m ≤ 200`: 20,100 pairs.
fn finite_segment() -> Outcome {
    let walker = Walker::canonical();
    let start = Instant::now();
    let mut pairs = 0;
    let mut bad = 0;
    for m in 1..=200u64 {
        let beta = Ordinal::from_u64(m);
        for k in 0..m {
            let alpha = Ordinal::from_u64(k);
            pairs += 1;
            let rho = walker.rho(&alpha, &beta).unwrap();
            let bar = walker.rhobar(&alpha, &beta).unwrap().to_u128();
            if rho != 0 || bar != Some(2 * k as u128 + 3) {
                bad += 1;
            }
        }
    }
    let took = start.elapsed();
    outcome(
        pairs == 20_100 && bad == 0 && took < Duration::from_secs(1),
        format!("pairs={pairs} mismatches={bad} time={}", secs(took)),
    )
}

fn fiber_oracle() -> Outcome {
    let walker = Walker::canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cap = Small::new(vec![0, 0, 4]);
    let (mut unsound, mut incomplete, mut non_monotone, mut tested) = (0, 0, 0, 0u64);
    for _ in 0..50 {
        // infinite α so that non-members exist
        let alpha = loop {
            let a = common::sample_below(&cap, 6, &mut rng);
            if a.0.len() >= 2 {
                break a;
            }
        };
        let n = rng.gen_range(0..=6u64);
        let lib_alpha = alpha.to_ordinal();
        let fiber = walker.fiber(&lib_alpha, n).unwrap();
        let members: HashSet<String> = fiber.members.iter().map(|x| x.to_string()).collect();
        for m in &fiber.members {
            let x = Small::parse(&m.to_string());
            if common::rho(&x, &alpha) > n {
                unsound += 1;
            }
        }
        let bound = alpha.max_coeff() + n + 24;
        let mut found = 0;
        while found < 10_000 {
            let x = common::sample_below(&alpha, bound, &mut rng);
            if members.contains(&x.render()) {
                continue;
            }
            found += 1;
            if common::rho(&x, &alpha) <= n {
                incomplete += 1;
            }
        }
        tested += found;
        if n < 6 {
            let wider = walker.fiber(&lib_alpha, n + 1).unwrap();
            if !fiber.members.iter().all(|m| wider.members.contains(m)) {
                non_monotone += 1;
            }
        }
    }
    outcome(
        unsound == 0 && incomplete == 0 && non_monotone == 0,
        format!(
            "samples=50 soundness_violations={unsound} non_members_tested={tested} completeness_violations={incomplete} monotonicity_violations={non_monotone}"
        ),
    )
}

fn spot_values() -> Outcome {
    let walker = Walker::canonical();
    let mut notes = Vec::new();

    // ρ̄(3, ω): C_ω = {1, 2, 3, …}; C_ω ∩ 3 = {1, 2}, min(C_ω \ 3) = 3, so
    // ρ(3, ω) = max(2, ρ(3, 3)) = 2. Below 3 everything is finite and ρ = 0,
    // so the fiber {ξ ≤ 3 : ρ(ξ,3) ≤ 2} = {0,1,2,3}. 2²·(2·4+1) = 36.
    let hand_3w = 4 * (2 * 4 + 1);
    let got = walker.rhobar(&o("3"), &o("w")).unwrap().to_u128();
    let oracle = common::rhobar(&Small::nat(3), &Small::new(vec![0, 1]));
    notes.push(format!("rhobar(3,w)={got:?}"));
    let mut pass = got == Some(hand_3w) && oracle == hand_3w;

    // ρ̄(ω, ω·2): C_{ω·2} = {ω+1, ω+2, …}; none is below ω and the first step
    // is ω+1, then ω. ρ = 0. Fiber(ω, 0): ρ(0,ω) = 0 (0 ∉ C_ω, step 1, then
    // 1 → 0 by successor), ρ(1,ω) = 0, ρ(2,ω) = 1 since 1 ∈ C_ω ∩ 2, and
    // ρ(ω,ω) = 0. So {0,1,ω} and 1·(2·3+1) = 7.
    let hand_ww2 = 2 * 3 + 1;
    let got = walker.rhobar(&o("w"), &o("w*2")).unwrap().to_u128();
    let oracle = common::rhobar(&Small::new(vec![0, 1]), &Small::new(vec![0, 2]));
    notes.push(format!("rhobar(w,w*2)={got:?}"));
    pass &= got == Some(hand_ww2) && oracle == hand_ww2;

    // fiber(ω, 1): ρ(k, ω) = k − 1 for k ≥ 1 (C_ω ∩ k = {1..k−1}), ρ(0,ω) = 0.
    // ρ ≤ 1 leaves 0, 1, 2 and ω itself.
    let fiber = walker.fiber(&o("w"), 1).unwrap();
    let got: Vec<String> = fiber.members.iter().map(|x| x.to_string()).collect();
    let oracle: Vec<String> = common::fiber(&Small::new(vec![0, 1]), 1)
        .iter()
        .map(Small::render)
        .collect();
    notes.push(format!("fiber(w,1)=[{}]", got.join(",")));
    pass &= got == ["0", "1", "2", "w"] && oracle == got;

    // walk(3, ω+2): ω+2 and ω+1 are successors (step to the predecessor);
    // from ω the first element of C_ω not below 3 is 3.
    let trace = walker.walk_trace(&o("3"), &o("w+2")).unwrap();
    let got: Vec<String> = trace.steps.iter().map(|x| x.to_string()).collect();
    let oracle: Vec<String> = common::walk(&Small::nat(3), &Small::new(vec![2, 1]))
        .iter()
        .map(Small::render)
        .collect();
    notes.push(format!("walk(3,w+2)=[{}]", got.join(",")));
    pass &= got == ["w+2", "w+1", "w", "3"] && oracle == got;

    outcome(pass, notes.join(" "))
}

fn kernels() -> Outcome {
    let start = Instant::now();
    let window = 500;
    let space = PointEnumeration::canonical(window);
    let points = common::canonical_points(window);
    let all: Vec<usize> = (0..window).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pass = true;
    let mut sizes = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut subsets = 0;
    for depth in 1..=3u64 {
        let k = kernel(&space, &all, depth);
        sizes.push(k.len());
        if !k.is_empty() {
            pass &= crowding_check(&space, &k, depth).unwrap().is_certified();
            pass &= common::crowded(&points, &k, depth);
        }
        pass &= k == common::kernel(&points, &all, depth);
        if let Some(prev) = &previous {
            pass &= k.iter().all(|i| prev.binary_search(i).is_ok());
        }
        let mut made = 0;
        while made < 100 {
            let p = rng.gen_range(0.02..0.6);
            let pick: Vec<usize> = all.iter().copied().filter(|_| rng.gen_bool(p)).collect();
            let sub = common::kernel(&points, &pick, depth);
            if sub.is_empty() {
                continue;
            }
            made += 1;
            pass &= common::crowded(&points, &sub, depth);
            pass &= crowding_check(&space, &sub, depth).unwrap().is_certified();
            pass &= sub.iter().all(|i| k.binary_search(i).is_ok());
        }
        subsets += made;
        previous = Some(k);
    }
    let took = start.elapsed();
    outcome(
        pass && took < Duration::from_secs(10),
        format!(
            "window=500 kernel sizes J=1,2,3: {:?} certified subsets checked={subsets} time={}",
            sizes,
            secs(took)
        ),
    )
}

fn refine_end_to_end() -> Outcome {
    let args = [
        "rhowalk",
        "refine",
        "--labeling",
        "omega2-diagonal",
        "--target",
        "64",
        "--window",
        "100000",
    ];
    let start = Instant::now();
    let (mut out1, mut err1) = (Vec::new(), Vec::new());
    let code1 = cli::run(args, &mut out1, &mut err1);
    let took = start.elapsed();
    let (mut out2, mut err2) = (Vec::new(), Vec::new());
    let code2 = cli::run(args, &mut out2, &mut err2);

    let params = RefineParams {
        target: 64,
        window: 100_000,
        ..Default::default()
    };
    let space = PointEnumeration::canonical(params.window);
    let result = refine(&space, &Labeling::Omega2Diagonal, &params);
    let Ok(result) = result else {
        return outcome(false, format!("search failed: {}", result.unwrap_err()));
    };
    let r = &result.report;
    let pass = code1 == 0
        && code2 == 0
        && out1 == out2
        && took < Duration::from_secs(60)
        && result.chosen.len() == 65
        && r.strong_checked == 43_680
        && r.strong_failures == 0
        && r.shift_checked == 43_680
        && r.shift_failures == 0
        && r.ball_checked == 64
        && r.ball_failures == 0
        && r.coverage_checked == 64
        && r.coverage_failures == 0
        && r.order_failures == 0;
    outcome(
        pass,
        format!(
            "exit={code1} time={} identical_rerun={} {}",
            secs(took),
            out1 == out2,
            r.to_record()
        ),
    )
}

fn reduction() -> Outcome {
    let walker = Walker::canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut strong, mut broken) = (0, 0);
    for _ in 0..1000 {
        let mut set = HashSet::new();
        while set.len() < 8 {
            set.insert(rng.gen_range(0..5000usize));
        }
        let set: Vec<usize> = set.into_iter().collect();
        let report = implication_check(&set, &Labeling::Omega2Diagonal, &walker).unwrap();
        strong += u32::from(report.strong);
        broken += u32::from(!report.holds());
    }
    outcome(
        broken == 0,
        format!("subsets=1000 strong={strong} strong_but_not_shift_increasing={broken}"),
    )
}

/// Cantor pairing computed by walking the diagonals.
fn oracle_pair(a: u64, b: u64) -> u64 {
    let mut z = 0;
    for w in 0..a + b {
        z += w + 1;
    }
    z + b
}

fn sigma_enumeration() -> Outcome {
    let limit = 10_000u64;
    let mut seen = HashSet::new();
    let mut bad = 0;
    for s in 0..limit {
        let seq = sigma(s);
        let mut c = 0;
        for &j in &seq {
            c = oracle_pair(c, j) + 1;
        }
        if c != s || code(&seq) != Some(s) || !seen.insert(seq.clone()) {
            bad += 1;
        }
        if let Some((r, j)) = parent(s) {
            if r >= s || sigma(r) != seq[..seq.len() - 1] || seq.last() != Some(&j) {
                bad += 1;
            }
        }
    }
    // every sequence with a code below the limit is reached from the root
    let mut reached = 0;
    let mut stack = vec![0u64];
    while let Some(c) = stack.pop() {
        reached += 1;
        for j in 0.. {
            let child = oracle_pair(c, j) + 1;
            if child >= limit {
                break;
            }
            stack.push(child);
        }
    }
    outcome(
        bad == 0 && reached == limit,
        format!("codes={limit} violations={bad} reached_from_root={reached}"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 universe check w2:4 and w3:2", universes),
        ("2 finite closed form", finite_segment),
        ("3 fiber oracle", fiber_oracle),
        ("4 spot values", spot_values),
        ("5 kernel properties", kernels),
        ("6 refine end to end", refine_end_to_end),
        ("7 reduction property", reduction),
        ("8 sigma enumeration", sigma_enumeration),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let result = run();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} ({})", result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
