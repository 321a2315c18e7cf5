//! Randomized checks of the structural laws on generated closed relations.

use std::collections::BTreeMap;

use rand::prelude::*;
use serde::Serialize;

use crate::analysis::EdgeLabeledGraph;
use crate::error::{invalid, Result};
use crate::model::{Algebra, ElemSet, Relation, Tuple};
use crate::structure::{as_component_elements, as_components, check_law, path_step, LawCase, LawOutcome};

use super::gen::{canonical_a3, gen_algebra_with, gen_relation, random_subset, rng_from_seed};

#[derive(Clone, Debug, PartialEq)]
pub struct LawSuiteConfig {
    pub seed: u64,
    /// Relations generated; each is checked against every law.
    pub samples: usize,
    pub max_arity: usize,
    pub max_universe: usize,
    pub max_seed_tuples: usize,
}

impl Default for LawSuiteConfig {
    fn default() -> Self {
        LawSuiteConfig { seed: 0, samples: 1000, max_arity: 4, max_universe: 4, max_seed_tuples: 4 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawCounts {
    pub pass: u64,
    pub fail: u64,
    pub hypothesis_not_met: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub law: &'static str,
    pub sample: usize,
    pub relation: Vec<Tuple>,
    pub case: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub counts: BTreeMap<&'static str, LawCounts>,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn total_failures(&self) -> u64 {
        self.counts.values().map(|c| c.fail).sum()
    }

    pub fn passes(&self, law: &str) -> u64 {
        self.counts.get(law).map_or(0, |c| c.pass)
    }

    fn record(&mut self, sample: usize, r: &Relation, case: &LawCase, outcome: LawOutcome) {
        let c = self.counts.entry(case.name()).or_default();
        match outcome {
            LawOutcome::Pass => c.pass += 1,
            LawOutcome::HypothesisNotMet(_) => c.hypothesis_not_met += 1,
            LawOutcome::Fail(ce) => {
                c.fail += 1;
                self.failures.push(LawFailure {
                    law: case.name(),
                    sample,
                    relation: r.tuples().cloned().collect(),
                    case: format!("{case:?}"),
                    reason: ce.reason,
                });
            }
        }
    }
}

/// A random walk along path steps inside `proj`.
fn random_path<R: Rng>(proj: &Relation, g: &EdgeLabeledGraph, rng: &mut R) -> Vec<Tuple> {
    let tuples: Vec<&Tuple> = proj.tuples().collect();
    let mut cur = (*tuples.choose(rng).expect("nonempty projection")).clone();
    let len = rng.gen_range(1..=4);
    let mut path = vec![cur.clone()];
    for _ in 1..len {
        let next: Vec<&Tuple> = tuples.iter().copied().filter(|u| **u != cur && path_step(g, &cur, u)).collect();
        let Some(u) = next.choose(rng) else { break };
        cur = (*u).clone();
        path.push(cur.clone());
    }
    path
}

fn random_positions<R: Rng>(k: usize, rng: &mut R) -> Vec<usize> {
    let all: Vec<usize> = (0..k).collect();
    let m = rng.gen_range(1..=k);
    let mut ps: Vec<usize> = all.choose_multiple(rng, m).copied().collect();
    ps.sort_unstable();
    ps
}

/// Components of each column: those of a random tuple lying in
/// as-components when one exists (so hypotheses tend to hold), otherwise
/// random ones.
fn tuple_components<R: Rng>(r: &Relation, g: &EdgeLabeledGraph, rng: &mut R) -> Vec<ElemSet> {
    let comps: Vec<Vec<ElemSet>> = (0..r.arity()).map(|i| as_components(r.column(i), g)).collect();
    let members: Vec<ElemSet> = comps.iter().map(|cs| cs.iter().fold(ElemSet::EMPTY, |a, &c| a.union(c))).collect();
    let good: Vec<&Tuple> = r.tuples().filter(|t| t.iter().zip(&members).all(|(&a, m)| m.contains(a))).collect();
    match good.choose(rng) {
        Some(t) if rng.gen_bool(0.8) => {
            t.iter().zip(&comps).map(|(&a, cs)| *cs.iter().find(|c| c.contains(a)).expect("member")).collect()
        }
        _ => comps.iter().map(|cs| *cs.choose(rng).expect("nonempty column")).collect(),
    }
}

/// A pairwise consistent choice built position by position in random
/// order; positions with no consistent choice get a random component.
fn consistent_components<R: Rng>(r: &Relation, g: &EdgeLabeledGraph, rng: &mut R) -> Vec<ElemSet> {
    let k = r.arity();
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut chosen: Vec<Option<ElemSet>> = vec![None; k];
    for &i in &order {
        let mut cands = as_components(r.column(i), g);
        cands.shuffle(rng);
        let ok = cands.iter().copied().find(|&c| {
            (0..k).all(|j| match chosen[j] {
                Some(d) => r.tuples().any(|t| c.contains(t[i]) && d.contains(t[j])),
                None => true,
            })
        });
        chosen[i] = Some(ok.unwrap_or(cands[0]));
    }
    chosen.into_iter().map(|c| c.expect("all chosen")).collect()
}

/// One case of every law for `r`, each with the relation it is checked
/// on: `r` itself, or a binary projection for the linked case.
pub fn random_cases<R: Rng>(r: &Relation, g: &EdgeLabeledGraph, rng: &mut R) -> Result<Vec<(LawCase, Relation)>> {
    let k = r.arity();
    let mut cases = Vec::with_capacity(7);
    let mut linked = None;
    let mut push = |case: LawCase| cases.push((case, r.clone()));
    let positions = random_positions(k, rng);
    let proj = r.project(&positions)?;
    push(LawCase::PathExtension { path: random_path(&proj, g, rng), positions });
    push(LawCase::Connectivity { components: tuple_components(r, g, rng) });
    let positions = random_positions(k, rng);
    let members: Vec<ElemSet> = (0..k).map(|i| as_component_elements(r.column(i), g)).collect();
    let lifts: Vec<Tuple> = r
        .project(&positions)?
        .tuples()
        .filter(|t| positions.iter().zip(t.iter()).all(|(&i, &a)| members[i].contains(a)))
        .cloned()
        .collect();
    if let Some(partial) = lifts.choose(rng) {
        push(LawCase::MaxExtension { positions, partial: partial.clone() });
    }
    push(LawCase::Rectangularity { components: tuple_components(r, g, rng) });
    push(LawCase::Crt { components: consistent_components(r, g, rng) });
    if k >= 2 {
        let all: Vec<usize> = (0..k).collect();
        let pair: Vec<usize> = all.choose_multiple(rng, 2).copied().collect();
        let bin = r.project(&pair)?;
        let comps = tuple_components(&bin, g, rng);
        linked = Some((LawCase::LinkedRectangularity { components: [comps[0], comps[1]] }, bin));
    }
    push(LawCase::CollectionExtension { components: consistent_components(r, g, rng), missing: rng.gen_range(0..k) });
    cases.extend(linked);
    Ok(cases)
}

/// Generates `cfg.samples` closed relations over the canonical 3-element
/// algebra and random algebras, and checks every law on each.
pub fn run_law_suite(cfg: &LawSuiteConfig) -> Result<LawReport> {
    if cfg.max_arity == 0 || cfg.max_universe < 2 || cfg.max_seed_tuples == 0 {
        return Err(invalid("law suite needs arity ≥ 1, universe ≥ 2 and seed tuples ≥ 1"));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut report = LawReport::default();
    let a3 = canonical_a3();
    for sample in 0..cfg.samples {
        let random;
        let (alg, g): (&Algebra, &EdgeLabeledGraph) = if sample % 2 == 0 {
            (&a3.0, &a3.1)
        } else {
            let size = rng.gen_range(2..=cfg.max_universe);
            random = gen_algebra_with(size, [1.0, 1.0, 1.0], &mut rng)?;
            (&random.0, &random.1)
        };
        let k = rng.gen_range(1..=cfg.max_arity);
        let sig: Vec<ElemSet> = (0..k).map(|_| random_subset(alg.universe(), &mut rng)).collect();
        let r = gen_relation(alg, sig, cfg.max_seed_tuples, &mut rng)?;
        let mut sub = rng_from_seed(rng.gen());
        let cases = random_cases(&r, g, &mut sub)?;
        for (case, target) in &cases {
            report.record(sample, target, case, check_law(g, target, case));
        }
    }
    Ok(report)
}
