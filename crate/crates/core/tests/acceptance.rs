//! Acceptance criteria, one line each. Exits nonzero when any fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;

use ccsp::analysis::{check_uniformity_laws, classify_pair, ConstraintLanguage, EdgeLabeledGraph, PairLabel};
use ccsp::consistency::establish_3_minimality;
use ccsp::harness::gen::{
    canonical_a3, gen_algebra, gen_instance, rng_from_seed, scaling_algebra, scaling_instance, GeneratorConfig,
    ScalingFamily,
};
use ccsp::harness::laws::{run_law_suite, LawSuiteConfig};
use ccsp::harness::oracle::{all_solutions, brute_force_solve, search_space};
use ccsp::model::{all_args, Algebra, Elem, Op, Relation};
use ccsp::reductions::{retract_step, RetractOutcome};
use ccsp::solver::{lev, solve, BranchKind, SolveTrace, SolverConfig};
use ccsp::structure::as_components;
use ccsp::{Error, Instance};

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: String) -> Line {
    Line { id, pass, detail }
}

fn random_instance(seed: u64, rng: &mut impl Rng, weights: [f64; 3], max_size: usize) -> (Instance, EdgeLabeledGraph) {
    let cfg = GeneratorConfig {
        seed,
        domain_size: rng.gen_range(2..=max_size),
        num_vars: rng.gen_range(1..=10),
        num_constraints: rng.gen_range(0..=15),
        max_arity: 3,
        max_seed_tuples: rng.gen_range(1..=6),
        weights,
        ..Default::default()
    };
    let (a, g) = gen_algebra(&cfg).unwrap();
    (gen_instance(&Arc::new(a), &cfg).unwrap(), g)
}

#[derive(Default)]
struct Tally {
    traces: Vec<SolveTrace>,
    errors: Vec<String>,
}

fn ac1(tally: &mut Tally) -> Line {
    let start = Instant::now();
    let mut rng = rng_from_seed(1);
    let (mut agree, mut sat, mut bad) = (0, 0, Vec::new());
    for seed in 0..500u64 {
        let (p, g) = random_instance(seed, &mut rng, [1.0, 1.0, 1.0], 4);
        let oracle = brute_force_solve(&p, u128::MAX).unwrap();
        match solve(&p, &g, &SolverConfig::default()) {
            Ok((r, t)) => {
                let verified = r.assignment().is_none_or(|a| p.is_satisfied_by(a));
                if r.is_sat() == oracle.is_sat() && verified {
                    agree += 1;
                } else {
                    bad.push(seed);
                }
                sat += r.is_sat() as usize;
                tally.traces.push(t);
            }
            Err(e) => {
                bad.push(seed);
                tally.errors.push(format!("seed {seed}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(300);
    line("AC1", pass, format!("oracle equivalence {agree}/500 ({sat} sat), {elapsed:.1?}, mismatches {bad:?}"))
}

/// Label of `{0,1}` from every conservative idempotent binary and ternary
/// operation on `{0,1}` preserving the relations.
fn enumerated_label(rels: &[Relation]) -> PairLabel {
    let preserves = |arity: usize, op: &dyn Fn(&[Elem]) -> Elem| {
        rels.iter().all(|r| {
            let tuples: Vec<&Vec<Elem>> = r.tuples().collect();
            all_args(tuples.len(), arity).all(|pick| {
                let image: Vec<Elem> =
                    (0..r.arity()).map(|i| op(&pick.iter().map(|&k| tuples[k as usize][i]).collect::<Vec<_>>())).collect();
                r.contains(&image)
            })
        })
    };
    let mut found = BTreeSet::new();
    for bits in 0..4u8 {
        let (f01, f10) = (bits & 1, bits >> 1);
        let op = |a: &[Elem]| if a[0] == a[1] { a[0] } else if a[0] == 0 { f01 } else { f10 };
        if f01 == f10 && preserves(2, &op) {
            found.insert(0);
        }
    }
    let mixed: Vec<Vec<Elem>> = all_args(2, 3).filter(|a| a.iter().any(|&x| x != a[0])).collect();
    for bits in 0..64u8 {
        let table = |a: &[Elem]| {
            if a.iter().all(|&x| x == a[0]) {
                return a[0];
            }
            let k = mixed.iter().position(|m| m.as_slice() == a).unwrap();
            (bits >> k) & 1
        };
        if !preserves(3, &table) {
            continue;
        }
        let is_maj = mixed.iter().all(|a| table(a) == if a[0] == a[1] || a[0] == a[2] { a[0] } else { a[1] });
        let is_aff = mixed.iter().all(|a| table(a) == a[0] ^ a[1] ^ a[2]);
        if is_maj {
            found.insert(1);
        }
        if is_aff {
            found.insert(2);
        }
    }
    match found.first() {
        Some(0) => PairLabel::Semilattice(ccsp::Orientation::Both),
        Some(1) => PairLabel::Majority,
        Some(_) => PairLabel::Affine,
        None => PairLabel::None,
    }
}

fn same_kind(a: PairLabel, b: PairLabel) -> bool {
    a.is_semilattice() && b.is_semilattice() || a == b
}

fn ac2() -> Line {
    let rel = |arity, ts: &[&[Elem]]| Relation::over_universe(arity, 2, ts.iter().map(|t| t.to_vec())).unwrap();
    let cases = [
        ("order", rel(2, &[&[0, 0], &[0, 1], &[1, 1]]), PairLabel::Semilattice(ccsp::Orientation::Both)),
        ("not-equal", rel(2, &[&[0, 1], &[1, 0]]), PairLabel::Majority),
        ("xor", rel(3, &[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]), PairLabel::Affine),
        ("one-in-three", rel(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), PairLabel::None),
    ];
    let mut mism = Vec::new();
    for (name, r, want) in cases {
        let l = ConstraintLanguage::new(2, vec![r.clone()]).unwrap();
        let got = classify_pair(&l, 0, 1).unwrap();
        let oracle = enumerated_label(&[r]);
        if !same_kind(got, want) || !same_kind(oracle, want) {
            mism.push(format!("{name}: classifier {got}, enumeration {oracle}, expected {want}"));
        }
    }
    line("AC2", mism.is_empty(), format!("classifier calibration, 4 languages, mismatches {mism:?}"))
}

fn corrupt(alg: &Algebra, rng: &mut impl Rng) -> Algebra {
    let n = alg.size();
    loop {
        let op = *Op::ALL.choose(rng).unwrap();
        let args: Vec<Elem> = (0..op.arity()).map(|_| rng.gen_range(0..n as Elem)).collect();
        let distinct: BTreeSet<Elem> = args.iter().copied().collect();
        if distinct.len() > 2 {
            continue;
        }
        let old = alg.apply(op, &args);
        let new = rng.gen_range(0..n as Elem);
        if new != old {
            return alg.with_entry(op, &args, new);
        }
    }
}

fn ac3() -> Line {
    let (a3, g3) = canonical_a3();
    let mut clean = check_uniformity_laws(&a3, &g3, &[]).is_clean() as usize;
    let mut rng = rng_from_seed(3);
    let mut algebras = vec![(a3, g3)];
    for seed in 0..100u64 {
        let cfg = GeneratorConfig { seed, domain_size: rng.gen_range(2..=5), ..Default::default() };
        let (a, g) = gen_algebra(&cfg).unwrap();
        clean += check_uniformity_laws(&a, &g, &[]).is_clean() as usize;
        algebras.push((a, g));
    }
    let mut detected = 0;
    for _ in 0..20 {
        let (a, g) = algebras.choose(&mut rng).unwrap();
        detected += !check_uniformity_laws(&corrupt(a, &mut rng), g, &[]).is_clean() as usize;
    }
    line("AC3", clean == 101 && detected == 20, format!("uniformity laws clean {clean}/101, corruptions detected {detected}/20"))
}

fn ac4() -> Line {
    let report = run_law_suite(&LawSuiteConfig { seed: 4, samples: 1000, max_arity: 4, max_universe: 4, ..Default::default() }).unwrap();
    let pass: u64 = report.counts.values().map(|c| c.pass).sum();
    let unmet: u64 = report.counts.values().map(|c| c.hypothesis_not_met).sum();
    let fails = report.total_failures();
    line("AC4", fails == 0, format!("structural laws on 1000 relations: pass {pass}, fail {fails}, hypothesis not met {unmet}"))
}

fn ac5() -> Line {
    let mut rng = rng_from_seed(5);
    let (mut idem, mut kept) = (0, 0);
    for seed in 0..200u64 {
        let (p, _) = random_instance(1000 + seed, &mut rng, [1.0, 1.0, 1.0], 4);
        match establish_3_minimality(&p) {
            None => idem += 1,
            Some((q, t)) => {
                if let Some((q2, t2)) = establish_3_minimality(&q) {
                    idem += (q2 == q && t2.is_subset_of(&t) && t.is_subset_of(&t2)) as usize;
                }
            }
        }
    }
    for seed in 0..200u64 {
        let cfg = GeneratorConfig {
            seed: 2000 + seed,
            domain_size: rng.gen_range(2..=4),
            num_vars: rng.gen_range(1..=8),
            num_constraints: rng.gen_range(0..=12),
            max_seed_tuples: rng.gen_range(1..=6),
            ..Default::default()
        };
        let (a, _) = gen_algebra(&cfg).unwrap();
        let p = gen_instance(&Arc::new(a), &cfg).unwrap();
        let before = all_solutions(&p, u128::MAX).unwrap();
        let after = establish_3_minimality(&p).map_or(Vec::new(), |(q, _)| all_solutions(&q, u128::MAX).unwrap());
        kept += (before == after) as usize;
    }
    line("AC5", idem == 200 && kept == 200, format!("3-minimality idempotent {idem}/200, solution sets preserved {kept}/200"))
}

/// Runs the retraction step directly on every instance whose pruned domains
/// are single as-components with a semilattice edge, checking `lev` of each
/// subinstance independently of the driver.
fn direct_retract_checks(p: &Instance, g: &EdgeLabeledGraph, calls: &mut u64, violations: &mut Vec<String>) {
    let Some((q, _)) = establish_3_minimality(p) else { return };
    let l = lev(&q, g);
    if l == 0 || q.domains().iter().any(|&d| as_components(d, g) != vec![d]) {
        return;
    }
    let outcome = retract_step(&q, g, true, &mut |call, inst| {
        *calls += 1;
        if lev(inst, g) >= l {
            violations.push(format!("{call:?}: lev {} not below {l}", lev(inst, g)));
        }
        Ok(solve(inst, g, &SolverConfig::default())?.0)
    });
    match outcome {
        Ok(RetractOutcome::Retract(maps)) => {
            let r = ccsp::reductions::retract_instance(&q, &maps).unwrap();
            if r.summ() >= q.summ() {
                violations.push("retraction does not decrease summ".into());
            }
        }
        Ok(_) => {}
        Err(e) => violations.push(e.to_string()),
    }
}

fn ac6(tally: &mut Tally) -> Line {
    let mut rng = rng_from_seed(6);
    let mut direct_calls = 0u64;
    let mut violations: Vec<String> = tally.errors.clone();
    for seed in 0..1500u64 {
        let (p, g) = random_instance(5000 + seed, &mut rng, [1.0, 0.3, 1.0], 6);
        if search_space(&p) > 1 << 20 {
            continue;
        }
        match solve(&p, &g, &SolverConfig::default()) {
            Ok((_, t)) => tally.traces.push(t),
            Err(e @ Error::Internal(_)) => violations.push(e.to_string()),
            Err(e) => violations.push(format!("unexpected: {e}")),
        }
        direct_retract_checks(&p, &g, &mut direct_calls, &mut violations);
    }
    let sum = |f: fn(&SolveTrace) -> u64| tally.traces.iter().map(f).sum::<u64>();
    let count = |k: BranchKind| tally.traces.iter().map(|t| t.count(k) as u64).sum::<u64>();
    let (lev_checks, summ_checks, strand_checks) = (sum(|t| t.lev_checks), sum(|t| t.summ_checks), sum(|t| t.strand_checks));
    let exercised = lev_checks > 0 && summ_checks > 0 && strand_checks > 0 && direct_calls > 0;
    line(
        "AC6",
        violations.is_empty() && exercised,
        format!(
            "measures: lev checks {lev_checks} (+{direct_calls} direct), summ checks {summ_checks} \
             (retractions {}, exclusions {}), strand checks {strand_checks}, violations {}",
            count(BranchKind::RetractLoop),
            count(BranchKind::ExclusionLoop),
            violations.len()
        ),
    )
}

fn ac7() -> Line {
    let mut worst = Duration::ZERO;
    let mut depths = Vec::new();
    let mut ok = true;
    for family in [ScalingFamily::Majority, ScalingFamily::Affine] {
        let (_, g) = scaling_algebra(family);
        for seed in 0..3 {
            let p = scaling_instance(family, 100, 150, seed).unwrap();
            let start = Instant::now();
            let r = solve(&p, &g, &SolverConfig::default());
            let t = start.elapsed();
            worst = worst.max(t);
            match r {
                Ok((r, trace)) => {
                    ok &= r.is_sat() && t < Duration::from_secs(60);
                    depths.push(trace.max_depth);
                }
                Err(_) => ok = false,
            }
        }
    }
    let deepest = depths.iter().copied().max().unwrap_or(0);
    line(
        "AC7",
        ok,
        format!("scaling |V|=100 |A|=4 150 constraints, 6 instances, slowest {worst:.2?}, max depth {deepest} (2·|A| = 8)"),
    )
}

fn main() {
    let mut tally = Tally::default();
    let lines = [ac1(&mut tally), ac2(), ac3(), ac4(), ac5(), ac6(&mut tally), ac7()];
    let mut failed = false;
    for l in &lines {
        println!("{} {} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
        failed |= !l.pass;
    }
    if failed {
        std::process::exit(1);
    }
}
