//! Acceptance criteria for the engine, one PASS/FAIL line each.
//!
//! Run with `cargo test -p sqiis --test acceptance`.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sqiis::parallel::run_evaluation_parallel;
use sqiis::reference::{self, Reference};
use sqiis_core::eval::{bucket_of, evaluate_original, originals};
use sqiis_core::{
    candidate_tag_sets, cumulative_table, enumerate_combinations, euclidean_distance, generate_rulebase, normalize,
    perturb_one_tag, run_evaluation, select_domain, threshold_count, tokenize_and_tag, ConfidenceVector, EvalReport,
    ExclusionSet, OutcomeClass, RuleBase, TagSet, WeightMatrix,
};

type Check = Result<String, String>;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sqiis(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqiis"))
        .env("SQIIS_CONFIG_DIR", dir)
        .args(args)
        .output()
        .expect("sqiis binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

// 1. enumeration count and runtime
fn enumeration(dir: &Path) -> Check {
    let start = Instant::now();
    let out = sqiis(dir, &["enumerate"]);
    let elapsed = start.elapsed();
    ensure(out.status.success(), || format!("enumerate exited with {}", out.status))?;
    let lines = stdout(&out).lines().count();
    ensure(lines == 127, || format!("{lines} combinations, expected 127"))?;
    ensure(
        enumerate_combinations(7).map_err(|e| e.to_string())?.len() == 127,
        || "library count".into(),
    )?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("127 combinations in {elapsed:?}"))
}

// 2. hand-crafted distance law
fn handcrafted_distance_law(r: &Reference) -> Check {
    let start = Instant::now();
    let report = run_evaluation(&r.handcrafted, 1, 6).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let c0 = report.distances(OutcomeClass::C0);
    let c1 = report.distances(OutcomeClass::C1);
    ensure(!c0.is_empty() && !c1.is_empty(), || {
        "expected both C0 and C1 cases".into()
    })?;
    ensure(c0.iter().all(|d| d.abs() <= 1e-9), || "C0 distance away from 0".into())?;
    ensure(c1.iter().all(|d| (d - SQRT_2).abs() <= 1e-9), || {
        "C1 distance away from sqrt 2".into()
    })?;
    let t0 = cumulative_table(&report, OutcomeClass::C0);
    let t1 = cumulative_table(&report, OutcomeClass::C1);
    ensure(
        t0.len() == 1 && t0[0].to_string() == format!("0.0000\t{0}\t{0}", c0.len()),
        || format!("C0 table {t0:?}"),
    )?;
    ensure(
        t1.len() == 1 && t1[0].to_string() == format!("1.4142\t{0}\t{0}", c1.len()),
        || format!("C1 table {t1:?}"),
    )?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "C0 = {} cases at 0.0000, C1 = {} cases at 1.4142, {elapsed:?}",
        c0.len(),
        c1.len()
    ))
}

// 3. threshold counts against a direct recount
fn threshold(r: &Reference) -> Check {
    let report = run_evaluation(&r.handcrafted, 1, 6).map_err(|e| e.to_string())?;
    let tau = 0.6;
    let recount = |class| {
        report
            .cases
            .iter()
            .filter(|c| c.class == class && c.distance <= tau)
            .count()
    };
    let c0 = threshold_count(&report, OutcomeClass::C0, tau);
    let c1 = threshold_count(&report, OutcomeClass::C1, tau);
    ensure(
        c0 == recount(OutcomeClass::C0) && c1 == recount(OutcomeClass::C1),
        || "recount disagrees".into(),
    )?;
    ensure(c0 == report.class_count(OutcomeClass::C0), || {
        format!("C0 at tau: {c0}")
    })?;
    ensure(c1 == 0, || format!("C1 at tau: {c1}"))?;
    Ok(format!("tau=0.6: C0 {c0} (= total), C1 0"))
}

fn random_weights(rng: &mut StdRng) -> WeightMatrix {
    let values = (0..21)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..10.0)
            }
        })
        .collect();
    WeightMatrix::new(7, 3, values).unwrap()
}

// 4. normalization suite
fn normalization(rng: &mut StdRng) -> Check {
    let mut zero_cases = 0;
    for i in 0..1000 {
        let w = random_weights(rng);
        let q = TagSet::from_bits(7, rng.gen_range(1..128)).unwrap();
        let raw: Vec<f64> = (0..3).map(|k| sqiis_core::raw_confidence(&w, q, k)).collect();
        let n = normalize(&ConfidenceVector::new(raw)).map_err(|e| e.to_string())?;
        if n.is_all_zero() {
            zero_cases += 1;
        } else {
            ensure((n.sum() - 1.0).abs() <= 1e-9, || format!("case {i}: sum {}", n.sum()))?;
        }
        let base = select_domain(&n).map(|d| d.0);
        for lambda in [0.01, 1.0, 100.0] {
            let scaled = w.scaled(lambda);
            let raw: Vec<f64> = (0..3).map(|k| sqiis_core::raw_confidence(&scaled, q, k)).collect();
            let m = normalize(&ConfidenceVector::new(raw)).map_err(|e| e.to_string())?;
            for (a, b) in n.values().iter().zip(m.values()) {
                ensure((a - b).abs() <= 1e-9, || {
                    format!("case {i}: scaling by {lambda} moved {a} to {b}")
                })?;
            }
            ensure(select_domain(&m).map(|d| d.0) == base, || {
                format!("case {i}: argmax moved at {lambda}")
            })?;
        }
    }
    Ok(format!(
        "1000 matrices ({zero_cases} all-zero), argmax stable for 0.01/1/100"
    ))
}

/// Linear scan over the rule list with its own argmax: the independent route.
fn brute_classify(rb: &RuleBase, q: TagSet) -> Option<usize> {
    let rule = rb.rules().iter().find(|r| r.combination == q)?;
    let mut best: Option<(usize, f64)> = None;
    for (d, &v) in rule.confidences.values().iter().enumerate() {
        if v > 0.0 && best.is_none_or(|(_, b)| v > b + 1e-12) {
            best = Some((d, v));
        }
    }
    best.map(|b| b.0)
}

/// A query whose tagging yields exactly `q`: one single-tag phrase per tag,
/// separated by a word no lexicon knows.
fn synthetic_query(r: &Reference, q: TagSet) -> String {
    q.iter()
        .map(|t| {
            r.lexicon
                .phrases_for(t)
                .find(|p| r.lexicon.lookup(p).len() == 1)
                .expect("every reference tag has an unambiguous phrase")
                .to_string()
        })
        .collect::<Vec<_>>()
        .join(" xq ")
}

// 5. oracle equivalence, both modes
fn oracle_equivalence(r: &Reference) -> Check {
    let mut summary = Vec::new();
    for (name, rb) in [("hand-crafted", &r.handcrafted), ("system-generated", &r.system)] {
        let mut fired = 0;
        for q in enumerate_combinations(7).map_err(|e| e.to_string())? {
            let keyed = rb.fire(q).map_err(|e| e.to_string())?;
            let keyed_domain = keyed.and_then(select_domain).map(|d| d.0);
            ensure(keyed_domain == brute_classify(rb, q), || {
                format!("{name} {q}: keyed {keyed_domain:?}")
            })?;
            fired += keyed.is_some() as usize;

            let query = synthetic_query(r, q);
            let tagged = tokenize_and_tag(&query, &r.lexicon).map_err(|e| e.to_string())?;
            ensure(candidate_tag_sets(&tagged, 64).ok() == Some(vec![q]), || {
                format!("`{query}` does not tag as {q}")
            })?;
            let result = sqiis_core::classify(&query, &r.lexicon, rb, 64).map_err(|e| e.to_string())?;
            ensure(result.domain() == keyed_domain, || {
                format!("{name} `{query}`: pipeline disagrees")
            })?;
        }
        summary.push(format!("{name} {fired}/127 fired"));
    }
    Ok(format!("all 127 combinations agree ({})", summary.join(", ")))
}

fn conservation(rb: &RuleBase, report: &EvalReport, min: usize, max: usize) -> Result<(), String> {
    let expected: usize = originals(rb.tag_count(), min, max)
        .unwrap()
        .into_iter()
        .filter(|&q| evaluate_original(rb, q).unwrap().is_some())
        .map(|q| perturb_one_tag(q).unwrap().len())
        .sum();
    let classes = report.class_count(OutcomeClass::C0) + report.class_count(OutcomeClass::C1) + report.c2_count();
    ensure(classes == report.total_cases() && classes == expected, || {
        format!(
            "C0+C1+C2 = {classes}, total {}, expected {expected}",
            report.total_cases()
        )
    })
}

// 6. perturbation counting and conservation
fn perturbation(r: &Reference, rng: &mut StdRng) -> Check {
    for _ in 0..2000 {
        let n = rng.gen_range(3..=10);
        let bits = rng.gen_range(1..(1u64 << n));
        let q = TagSet::from_bits(n, bits).unwrap();
        let got = perturb_one_tag(q).map_err(|e| e.to_string())?;
        let exhaustive: Vec<u64> = (1..(1u64 << n))
            .filter(|&b| b.count_ones() == bits.count_ones() && (b ^ bits).count_ones() == 2)
            .collect();
        let mut got_bits: Vec<u64> = got.iter().map(|t| t.bits()).collect();
        got_bits.sort_unstable();
        ensure(got.len() == q.len() * (n - q.len()), || {
            format!("{q} over {n}: {} perturbations", got.len())
        })?;
        ensure(got_bits == exhaustive, || {
            format!("{q} over {n}: differs from exhaustive generation")
        })?;
    }
    let mut runs = 0;
    for rb in [&r.handcrafted, &r.system] {
        for (min, max) in [(1, 6), (1, 7), (2, 4), (7, 7)] {
            conservation(rb, &run_evaluation(rb, min, max).unwrap(), min, max)?;
            runs += 1;
        }
    }
    for _ in 0..20 {
        let rb = generate_rulebase(&random_weights(rng), &ExclusionSet::default()).unwrap();
        conservation(&rb, &run_evaluation(&rb, 1, 6).unwrap(), 1, 6)?;
        runs += 1;
    }
    Ok(format!(
        "2000 random sets match |q|(n-|q|); conservation holds on {runs} runs"
    ))
}

fn random_simplex(rng: &mut StdRng) -> ConfidenceVector {
    let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
    normalize(&ConfidenceVector::new(raw)).unwrap()
}

// 7. distance metric axioms
fn distance_axioms(rng: &mut StdRng) -> Check {
    let d = |a: &ConfidenceVector, b: &ConfidenceVector| euclidean_distance(a, b).unwrap();
    for i in 0..10_000 {
        let (a, b, c) = if i % 2 == 0 {
            let v = |rng: &mut StdRng| ConfidenceVector::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect());
            (v(rng), v(rng), v(rng))
        } else {
            (random_simplex(rng), random_simplex(rng), random_simplex(rng))
        };
        let ab = d(&a, &b);
        ensure(ab >= 0.0, || format!("negative distance {ab}"))?;
        ensure(ab == d(&b, &a), || "asymmetric".into())?;
        ensure(d(&a, &a) == 0.0, || "d(a,a) != 0".into())?;
        let equal = a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= 1e-12);
        ensure((ab <= 1e-12) == equal || ab <= 1e-12 * 3f64.sqrt(), || {
            "identity of indiscernibles".into()
        })?;
        ensure(d(&a, &c) <= ab + d(&b, &c) + 1e-12, || "triangle inequality".into())?;
        if i % 2 == 1 {
            ensure(ab <= SQRT_2 + 1e-12, || {
                format!("normalized distance {ab} above sqrt 2")
            })?;
        }
    }
    let corners = d(&ConfidenceVector::one_hot(3, 0), &ConfidenceVector::one_hot(3, 2));
    ensure(bucket_of(corners) == 14142, || "one-hot corners".into())?;
    Ok("10000 pairs: non-negative, symmetric, identity, triangle, [0, sqrt 2] on the simplex".into())
}

// 8. end-to-end examples through the CLI
fn classify_examples(dir: &Path) -> Check {
    let cases = [
        ("Chinese restaurant in Andheri", "yellow_pages"),
        ("Slumdog Millionaire in Andheri", "movie"),
    ];
    for rulebase in [reference::RULEBASE_FILE, reference::SYSTEM_RULEBASE_FILE] {
        let path = dir.join(rulebase);
        for (query, expected) in cases {
            let out = sqiis(dir, &["--rulebase", path.to_str().unwrap(), "classify", query]);
            ensure(out.status.code() == Some(0), || {
                format!("`{query}` exited {:?}", out.status.code())
            })?;
            let first = stdout(&out).lines().next().unwrap_or_default().to_string();
            ensure(first == format!("domain\t{expected}"), || {
                format!("{rulebase} `{query}` -> {first}")
            })?;
        }
    }
    Ok("restaurant query -> yellow_pages, film query -> movie (both rule bases)".into())
}

// 9. determinism
fn determinism(r: &Reference, dir: &Path) -> Check {
    let system = dir.join(reference::SYSTEM_RULEBASE_FILE);
    let system = system.to_str().unwrap();
    for args in [
        vec!["evaluate"],
        vec!["--rulebase", system, "evaluate", "--tau", "0.2,0.6"],
        vec!["--rulebase", system, "--format", "structured", "evaluate"],
    ] {
        let a = sqiis(dir, &args);
        let b = sqiis(dir, &args);
        let mut serial_args = args.clone();
        serial_args.push("--serial");
        let s = sqiis(dir, &serial_args);
        ensure(a.status.success() && !a.stdout.is_empty(), || {
            format!("{args:?} failed")
        })?;
        ensure(a.stdout == b.stdout, || format!("{args:?}: consecutive runs differ"))?;
        ensure(a.stdout == s.stdout, || format!("{args:?}: parallel and serial differ"))?;
    }
    for rb in [&r.handcrafted, &r.system] {
        ensure(run_evaluation(rb, 1, 6) == run_evaluation_parallel(rb, 1, 6), || {
            "library parallel differs".into()
        })?;
    }
    Ok("repeat, parallel and serial runs are byte-identical".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    reference::seed(dir.path()).expect("seed reference config");
    let r = reference::load().expect("reference config loads");
    let mut rng = StdRng::seed_from_u64(0x5eed_c0de);

    let results: Vec<(&str, Check)> = vec![
        ("AC1 enumeration count", enumeration(dir.path())),
        ("AC2 hand-crafted distance law", handcrafted_distance_law(&r)),
        ("AC3 threshold check", threshold(&r)),
        ("AC4 normalization suite", normalization(&mut rng)),
        ("AC5 oracle equivalence", oracle_equivalence(&r)),
        ("AC6 perturbation counting", perturbation(&r, &mut rng)),
        ("AC7 distance metric axioms", distance_axioms(&mut rng)),
        ("AC8 end-to-end examples", classify_examples(dir.path())),
        ("AC9 determinism", determinism(&r, dir.path())),
    ];

    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
