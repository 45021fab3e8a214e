//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mnl_core::function::{known_membership, standard_battery, Verdict};
use mnl_core::inclusion::{
    check_witness_numerically, classify, decide_inclusion, verify_embedding_cached, witness_source_margin, Branch,
    ConstantKind,
};
use mnl_core::means::{integral_mean, parseval_mean};
use mnl_core::norm::{mixed_norm, NormCache, NormResult};
use mnl_core::rational::{ratio, ExtRational};
use mnl_core::verify::{Outcome, Verifier};
use mnl_core::{AnalyticFunction, Lacunary, SpaceParams};

const TOL: f64 = 1e-9;
/// Tolerance for the witness norms, which sit near criticality by design.
const WITNESS_TOL: f64 = 1e-4;
const WITNESS_MARGIN: f64 = 0.05;

struct Outcome1 {
    passed: bool,
    detail: String,
}

fn ext(s: &str) -> ExtRational {
    s.parse().unwrap()
}

fn space(p: &str, q: &str, a: &str) -> SpaceParams {
    SpaceParams::parse(&format!("{p},{q},{a}")).unwrap()
}

fn grid_spaces() -> Vec<SpaceParams> {
    let mut out = Vec::new();
    for p in ["1", "2", "4", "inf"] {
        for q in ["1", "2", "inf"] {
            for a in ["1/2", "1", "3/2", "2"] {
                out.push(space(p, q, a));
            }
        }
    }
    out
}

/// 200 ordered pairs: 25 evenly spaced pairs from each of the 8 branches.
fn pair_grid() -> Vec<(SpaceParams, SpaceParams)> {
    let spaces = grid_spaces();
    let mut by_branch: BTreeMap<&str, Vec<(SpaceParams, SpaceParams)>> = BTreeMap::new();
    for a in &spaces {
        for b in &spaces {
            by_branch.entry(classify(a, b).as_str()).or_default().push((a.clone(), b.clone()));
        }
    }
    let mut out = Vec::new();
    for pairs in by_branch.values() {
        let n = pairs.len();
        out.extend((0..25).map(|i| pairs[i * n / 25].clone()));
    }
    out
}

fn criterion_1() -> Outcome1 {
    let ps = ["1/2", "1", "3/2", "2", "3", "4", "inf"];
    let qs = ["1/2", "1", "2", "3", "inf"];
    let alphas = ["1/4", "1/2", "1", "3/2", "2"];
    let mut all = Vec::new();
    for p in ps {
        for q in qs {
            all.extend(alphas.iter().map(|a| space(p, q, a)));
        }
    }
    let sample: Vec<SpaceParams> = (0..50).map(|i| all[(i * 7 + 3) % all.len()].clone()).collect();
    let one = AnalyticFunction::constant(1.0);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for s in &sample {
        match mixed_norm(&one, s, TOL) {
            Ok(NormResult::Finite { value, .. }) => worst = worst.max((value - 1.0).abs()),
            other => bad.push(format!("{s}: {other:?}")),
        }
    }
    let p_inf = sample.iter().filter(|s| s.p.is_infinite()).count();
    let q_inf = sample.iter().filter(|s| s.q.is_infinite()).count();
    Outcome1 {
        passed: bad.is_empty() && worst <= 1e-7 && p_inf > 0 && q_inf > 0,
        detail: format!(
            "{} spaces ({p_inf} with p=inf, {q_inf} with q=inf), max |norm-1| = {worst:.2e}, {} not finite {bad:?}",
            sample.len(),
            bad.len()
        ),
    }
}

fn criterion_2() -> Outcome1 {
    let mut fs: Vec<AnalyticFunction> = [ratio(1, 2), ratio(1, 1), ratio(3, 2)].into_iter().map(AnalyticFunction::power).collect();
    fs.extend((0..=8).map(AnalyticFunction::monomial));
    fs.push(AnalyticFunction::Lacunary(Lacunary::ones()));
    let radii = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    let p2 = ext("2");
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for f in &fs {
        for &r in &radii {
            match (integral_mean(f, &p2, r, 1e-11), parseval_mean(f, r)) {
                (Ok(q), Ok(s)) => worst = worst.max((q - s).abs() / s),
                (a, b) => errors.push(format!("{} r={r}: {a:?} {b:?}", f.label())),
            }
        }
    }
    Outcome1 {
        passed: errors.is_empty() && worst <= 1e-8,
        detail: format!("{} comparisons, max relative difference {worst:.2e}, errors {errors:?}", fs.len() * radii.len()),
    }
}

fn criterion_3() -> Outcome1 {
    let v = Verifier::new(TOL).unwrap();
    let reps = v.run("beta_identity", &standard_battery()).unwrap();
    let worst = reps.iter().map(|r| r.max_violation).fold(0.0, f64::max);
    let fails = reps.iter().filter(|r| r.outcome != Outcome::Pass).count();
    Outcome1 {
        passed: reps.len() == 75 && fails == 0,
        detail: format!("{} grid points, max relative error {worst:.2e}, {fails} failing", reps.len()),
    }
}

fn criterion_4() -> Outcome1 {
    let s = space("1", "2", "1");
    let a = mixed_norm(&AnalyticFunction::power(ratio(19, 10)), &s, TOL);
    let b = mixed_norm(&AnalyticFunction::power(ratio(21, 10)), &s, TOL);
    let c = mixed_norm(&AnalyticFunction::power(ratio(2, 1)), &space("1", "inf", "1"), TOL);
    let ok = matches!(a, Ok(NormResult::Finite { .. }))
        && matches!(b, Ok(NormResult::Divergent { .. }))
        && matches!(c, Ok(NormResult::Finite { .. }));
    Outcome1 {
        passed: ok,
        detail: format!("power:19/10 in (1,2,1) {a:?}; power:21/10 in (1,2,1) {b:?}; power:2 in (1,inf,1) {c:?}"),
    }
}

fn criterion_5(pairs: &[(SpaceParams, SpaceParams)]) -> Outcome1 {
    let battery = standard_battery();
    let cache = NormCache::new();
    let witness_cache = NormCache::new();
    let (mut embed_pairs, mut checked, mut skipped, mut violated, mut failed) = (0, 0, 0, 0, 0);
    let (mut not_included, mut exact_bad, mut numeric_run, mut numeric_bad, mut numeric_out_of_scope) = (0, 0, 0, 0, 0);
    let mut problems = Vec::new();
    let mut implicit = 0;
    let mut skipped_non_member = 0;
    for (src, dst) in pairs {
        let verdict = decide_inclusion(src, dst).unwrap();
        if verdict.is_included() {
            if verdict.constant.as_ref().map(|c| c.kind) != Some(ConstantKind::Explicit) {
                implicit += 1;
                continue;
            }
            embed_pairs += 1;
            let rep = verify_embedding_cached(src, dst, &battery, TOL, &cache).unwrap();
            checked += rep.checked();
            violated += rep.violations();
            failed += rep.failures();
            for (f, e) in battery.iter().zip(&rep.entries) {
                if matches!(e.status, mnl_core::inclusion::EntryStatus::Skipped { .. }) {
                    if known_membership(f, src).verdict == Verdict::NotMember {
                        skipped_non_member += 1;
                    } else {
                        skipped += 1;
                    }
                }
            }
            for e in &rep.entries {
                if matches!(e.status, mnl_core::inclusion::EntryStatus::Violated | mnl_core::inclusion::EntryStatus::Failed { .. }) {
                    problems.push(format!("{src}->{dst} {}: {:?}", e.function, e.status));
                }
            }
        } else {
            not_included += 1;
            let w = verdict.witness.clone().unwrap();
            if known_membership(&w, src).verdict != Verdict::Member || known_membership(&w, dst).verdict != Verdict::NotMember {
                exact_bad += 1;
                problems.push(format!("{src}->{dst} witness {} membership", w.label()));
            }
            match witness_source_margin(src, &w) {
                Some(m) if m >= WITNESS_MARGIN => {
                    numeric_run += 1;
                    let wc = check_witness_numerically(src, dst, &w, WITNESS_TOL, &witness_cache);
                    if !wc.passed {
                        numeric_bad += 1;
                        problems.push(format!("{src}->{dst} witness {}: {:?} / {:?}", w.label(), wc.src_norm, wc.dst_norm));
                    }
                }
                _ => numeric_out_of_scope += 1,
            }
        }
    }
    let branches: std::collections::BTreeSet<Branch> = pairs.iter().map(|(a, b)| classify(a, b)).collect();
    Outcome1 {
        passed: branches.len() == 8 && violated == 0 && failed == 0 && exact_bad == 0 && numeric_bad == 0,
        detail: format!(
            "{} pairs over {} branches; (a) {embed_pairs} explicit-constant inclusions ({implicit} up to an unknown factor not checked): \
             {checked} ratios checked, {violated} violations, {failed} target norms not computed, {skipped_non_member} skipped as non-members of the source, {skipped} members skipped because the source norm was not resolved; \
             (b) {not_included} non-inclusions: {exact_bad} membership errors, {numeric_run} numerical splits with {numeric_bad} failures, \
             {numeric_out_of_scope} witnesses within {WITNESS_MARGIN} of criticality{}",
            pairs.len(),
            branches.len(),
            if problems.is_empty() { String::new() } else { format!("; first problems: {:?}", &problems[..problems.len().min(8)]) }
        ),
    }
}

fn criterion_6() -> Outcome1 {
    let v = Verifier::new(TOL).unwrap();
    let reps = v.run("*", &standard_battery()).unwrap();
    let fails: Vec<String> = reps.iter().filter(|r| r.is_unexpected_failure()).map(|r| format!("{} {}", r.name, r.instance)).collect();
    let expected: Vec<String> = reps.iter().filter(|r| r.is_expected_failure()).map(|r| format!("{} {}", r.name, r.instance)).collect();
    let names: std::collections::BTreeSet<&str> = reps.iter().map(|r| r.name.as_str()).collect();
    let sharp_ok = expected.len() == 2
        && expected.iter().any(|e| e.starts_with("littleoh_mean"))
        && expected.iter().any(|e| e.starts_with("pointwise_bound"));
    Outcome1 {
        passed: fails.is_empty() && sharp_ok,
        detail: format!(
            "{} reports over {} checks, {} unexpected failures {fails:?}, expected-fail rows {expected:?}",
            reps.len(),
            names.len(),
            fails.len()
        ),
    }
}

fn criterion_7(pairs: &[(SpaceParams, SpaceParams)]) -> Outcome1 {
    let mut spaces: Vec<SpaceParams> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    spaces.sort_by_key(|s| s.to_string());
    spaces.dedup();
    let included: std::collections::HashSet<(String, String)> = pairs
        .iter()
        .filter(|(a, b)| decide_inclusion(a, b).unwrap().is_included())
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let mut bad = Vec::new();
    for s in &spaces {
        let v = decide_inclusion(s, s).unwrap();
        if v.branch != Branch::T1Equal || v.constant.map(|c| c.value) != Some(1.0) {
            bad.push(format!("reflexivity {s}"));
        }
    }
    let mut transitive_triples = 0;
    for (a, b) in pairs {
        for (b2, c) in pairs {
            if b == b2 && included.contains(&(a.to_string(), b.to_string())) && included.contains(&(b2.to_string(), c.to_string())) {
                transitive_triples += 1;
                if !classify(a, c).is_included() {
                    bad.push(format!("transitivity {a} {b} {c}"));
                }
            }
        }
    }
    let mut monotone = 0;
    for (a, b) in pairs.iter().filter(|(a, b)| classify(a, b).is_included()) {
        let mut heavier = b.clone();
        heavier.alpha = &b.alpha + ratio(1, 2);
        let mut wider = b.clone();
        wider.q = ExtRational::Infinity;
        let mut smaller_src = a.clone();
        smaller_src.p = ExtRational::Infinity;
        for (x, y) in [(a, &heavier), (a, &wider), (&smaller_src, b)] {
            monotone += 1;
            if !classify(x, y).is_included() {
                bad.push(format!("monotonicity {x} -> {y}"));
            }
        }
    }
    Outcome1 {
        passed: bad.is_empty(),
        detail: format!(
            "{} spaces reflexive, {transitive_triples} chained triples, {monotone} monotonicity cases, violations {bad:?}",
            spaces.len()
        ),
    }
}

fn main() {
    let pairs = pair_grid();
    let limits = [10u64, 30, 10, 60, 900, 600, 1];
    let names = [
        "normalization",
        "oracle equivalence",
        "beta identity",
        "membership boundary",
        "characterization cross-check",
        "estimate suite",
        "decision invariants",
    ];
    let mut all_ok = true;
    for (i, name) in names.iter().enumerate() {
        let start = Instant::now();
        let out = match i {
            0 => criterion_1(),
            1 => criterion_2(),
            2 => criterion_3(),
            3 => criterion_4(),
            4 => criterion_5(&pairs),
            5 => criterion_6(),
            _ => criterion_7(&pairs),
        };
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limits[i]);
        let ok = out.passed && in_time;
        all_ok &= ok;
        println!(
            "criterion {} {name}: {} ({:.2} s, limit {} s) {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limits[i],
            out.detail
        );
    }
    if !all_ok {
        std::process::exit(1);
    }
}
