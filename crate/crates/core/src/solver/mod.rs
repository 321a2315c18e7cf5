//! The recursive driver: 3-minimality, then the semilattice-free base
//! solver, as-component exclusion, or the retraction reduction.

pub mod maltsev;
pub mod sfree;

use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{
    classify_language, derive_m, synthesize_uniform_ops, ClassifierVerdict, ConstraintLanguage, EdgeLabeledGraph,
    TernaryTable,
};
use crate::consistency::establish_3_minimality;
use crate::error::{internal, invalid, Result};
use crate::harness::oracle::brute_force_solve;
use crate::model::{Constraint, Elem, Instance, SolveResult};
use crate::reductions::{
    combine_solutions, exclude_components, find_consistent_collection, retract_step, retract_instance,
    split_by_strands, RetractCall, RetractOutcome,
};
use crate::structure::as_components;

pub use sfree::{residue_kind, solve_semilattice_free, ResidueKind};

/// Largest domain that contains a semilattice edge, or 0.
pub fn lev(p: &Instance, g: &EdgeLabeledGraph) -> usize {
    p.domains()
        .iter()
        .filter(|&&d| g.has_semilattice_inside(d))
        .map(|d| d.len())
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Permit backtracking on semilattice-free residues that mix majority
    /// and affine pairs.
    pub allow_mixed_backtracking: bool,
    /// Try an unforced `t(P)` before the forced instances.
    pub probe_plain_t: bool,
    /// Recursion depth treated as a bug.
    pub max_depth: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { allow_mixed_backtracking: true, probe_plain_t: false, max_depth: 512 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchKind {
    /// 3-minimality emptied a table.
    Refuted,
    Sfree,
    Exclusion,
    RetractC,
    RetractPlainT,
    RetractForced,
    RetractLoop,
    ExclusionLoop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub depth: usize,
    pub kind: BranchKind,
}

/// Summary of one run of the driver.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveTrace {
    pub nodes: u64,
    pub max_depth: usize,
    pub events: Vec<TraceEvent>,
    pub retract_steps: u64,
    /// Checks that `lev` dropped for `c(P)` and `t(P)`.
    pub lev_checks: u64,
    /// Checks that `summ` dropped on retraction and exclusion.
    pub summ_checks: u64,
    /// Checks that `(lev, summ)` dropped into strand subproblems.
    pub strand_checks: u64,
    /// Largest `lev` of an input to the driver.
    pub max_lev: usize,
}

impl SolveTrace {
    pub fn count(&self, kind: BranchKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

struct Driver<'a> {
    g: &'a EdgeLabeledGraph,
    m: TernaryTable,
    cfg: &'a SolverConfig,
    trace: SolveTrace,
}

impl Driver<'_> {
    fn event(&mut self, depth: usize, kind: BranchKind) {
        self.trace.events.push(TraceEvent { depth, kind });
    }

    fn run(&mut self, p: Instance, depth: usize) -> Result<SolveResult> {
        if depth > self.cfg.max_depth {
            return Err(internal(format!("recursion depth exceeded {}", self.cfg.max_depth)));
        }
        self.trace.nodes += 1;
        self.trace.max_depth = self.trace.max_depth.max(depth);
        let g = self.g;
        let mut p = p;
        loop {
            let Some((q, tables)) = establish_3_minimality(&p) else {
                self.event(depth, BranchKind::Refuted);
                return Ok(SolveResult::Unsat);
            };
            let (lev_q, summ_q) = (lev(&q, g), q.summ());
            self.trace.max_lev = self.trace.max_lev.max(lev_q);
            if lev_q == 0 {
                self.event(depth, BranchKind::Sfree);
                return solve_semilattice_free(&q, g, &self.m, self.cfg.allow_mixed_backtracking);
            }
            let proper = q.domains().iter().any(|&d| as_components(d, g) != vec![d]);
            if proper {
                self.event(depth, BranchKind::Exclusion);
                let coll = find_consistent_collection(&q, &tables, g)?;
                let parts = split_by_strands(&q, &coll)?;
                let mut sols = Vec::with_capacity(parts.len());
                let mut failed = None;
                for part in &parts {
                    let (l, s) = (lev(&part.instance, g), part.instance.summ());
                    self.trace.strand_checks += 1;
                    if (l, s) >= (lev_q, summ_q) {
                        return Err(internal("strand subproblem does not decrease (lev, summ)"));
                    }
                    match self.run(part.instance.clone(), depth + 1)? {
                        SolveResult::Sat(a) => sols.push(a),
                        SolveResult::Unsat => {
                            failed = Some(part.vars.clone());
                            break;
                        }
                    }
                }
                match failed {
                    None => return Ok(SolveResult::Sat(combine_solutions(&q, &parts, &sols)?)),
                    Some(strand) => {
                        self.event(depth, BranchKind::ExclusionLoop);
                        let Some(next) = exclude_components(&q, &coll, &strand) else {
                            return Ok(SolveResult::Unsat);
                        };
                        self.trace.summ_checks += 1;
                        if next.summ() >= summ_q {
                            return Err(internal("exclusion does not decrease summ"));
                        }
                        p = next;
                        continue;
                    }
                }
            }
            self.trace.retract_steps += 1;
            let probe = self.cfg.probe_plain_t;
            let outcome = retract_step(&q, g, probe, &mut |call, inst| {
                let kind = match call {
                    RetractCall::C => BranchKind::RetractC,
                    RetractCall::PlainT => BranchKind::RetractPlainT,
                    RetractCall::ForcedT { .. } => BranchKind::RetractForced,
                };
                self.event(depth, kind);
                self.trace.lev_checks += 1;
                if lev(inst, g) >= lev_q {
                    return Err(internal(format!("{kind:?} instance does not decrease lev")));
                }
                self.run(inst.clone(), depth + 1)
            })?;
            match outcome {
                RetractOutcome::Solved(a) => return Ok(SolveResult::Sat(a)),
                RetractOutcome::NoSolution => return Ok(SolveResult::Unsat),
                RetractOutcome::Retract(maps) => {
                    let next = retract_instance(&q, &maps)?;
                    self.trace.summ_checks += 1;
                    if next.summ() >= summ_q || lev(&next, g) > lev_q {
                        return Err(internal("retraction does not decrease (lev, summ)"));
                    }
                    self.event(depth, BranchKind::RetractLoop);
                    p = next;
                }
            }
        }
    }
}

/// Solves `p`, whose algebra must have `g` as its edge-labeled graph.
/// A satisfying assignment is checked against `p` before it is returned.
pub fn solve(p: &Instance, g: &EdgeLabeledGraph, cfg: &SolverConfig) -> Result<(SolveResult, SolveTrace)> {
    if g.size() != p.algebra().size() {
        return Err(invalid("graph and algebra have different universes"));
    }
    let mut d = Driver { g, m: derive_m(p.algebra()), cfg, trace: SolveTrace::default() };
    let r = d.run(p.clone(), 0)?;
    if let SolveResult::Sat(a) = &r {
        if let Some(ci) = p.unsatisfied(a) {
            return Err(internal(format!("solver returned an assignment violating constraint {ci}")));
        }
    }
    Ok((r, d.trace))
}

/// [`solve`] with the graph read off the instance's algebra.
pub fn solve_instance(p: &Instance, cfg: &SolverConfig) -> Result<(SolveResult, SolveTrace)> {
    let g = EdgeLabeledGraph::from_algebra(p.algebra());
    solve(p, &g, cfg)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NpComplete { pair: (Elem, Elem) },
    Solved { result: SolveResult, trace: SolveTrace },
    /// NP-complete language decided by exhaustive search on request.
    OracleSolved { result: SolveResult, pair: (Elem, Elem) },
}

/// Classifies `l`; for a tractable language, synthesizes the operations and
/// solves `p` over them. Every relation of `p` must be preserved by the
/// synthesized operations.
pub fn classify_and_solve(
    l: &ConstraintLanguage,
    p: &Instance,
    force_oracle: bool,
    budget: u128,
    cfg: &SolverConfig,
) -> Result<Verdict> {
    if l.universe_size() != p.algebra().size() {
        return Err(invalid("language and instance have different universes"));
    }
    match classify_language(l)? {
        ClassifierVerdict::NpComplete { pair } => {
            if force_oracle {
                Ok(Verdict::OracleSolved { result: brute_force_solve(p, budget)?, pair })
            } else {
                Ok(Verdict::NpComplete { pair })
            }
        }
        ClassifierVerdict::Tractable { graph, .. } => {
            let alg = Arc::new(synthesize_uniform_ops(l, &graph)?);
            for (ci, c) in p.constraints().iter().enumerate() {
                if !c.relation.is_closed(&alg) {
                    return Err(invalid(format!("constraint {ci} is not preserved by the language's operations")));
                }
            }
            let constraints: Vec<Constraint> = p.constraints().to_vec();
            let q = Instance::new(alg, p.variables().to_vec(), p.domains().to_vec(), constraints);
            let (result, trace) = solve(&q, &graph, cfg)?;
            Ok(Verdict::Solved { result, trace })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{Orientation, PairLabel};
    use crate::harness::gen::canonical_a3;
    use crate::model::{all_args, validate_instance, Algebra, Assignment, ElemSet, Relation};

    fn chain2() -> (Arc<Algebra>, EdgeLabeledGraph) {
        let f = |x: Elem, y: Elem| x.max(y);
        let alg = Algebra::from_fns(2, f, f, move |x, y, z| f(f(x, y), z), move |x, y, z| f(f(x, y), z)).unwrap();
        let mut g = EdgeLabeledGraph::new(2);
        g.set(0, 1, PairLabel::Semilattice(Orientation::Up));
        (Arc::new(alg), g)
    }

    #[test]
    fn order_chain_is_sat() {
        let (alg, g) = chain2();
        let le = Relation::over_universe(2, 2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let cs = (0..4).map(|i| Constraint::new(vec![i, i + 1], le.clone())).collect();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2); 5], cs);
        let (r, _) = solve(&p, &g, &SolverConfig::default()).unwrap();
        assert!(p.is_satisfied_by(r.assignment().unwrap()));
    }

    #[test]
    fn a3_unary_zero() {
        let (alg, g) = canonical_a3();
        let r0 = Relation::new(vec![ElemSet::full(3)], [vec![0]]).unwrap();
        let p = Instance::with_default_names(Arc::new(alg), vec![ElemSet::full(3)], vec![Constraint::new(vec![0], r0)]);
        let (r, _) = solve(&p, &g, &SolverConfig::default()).unwrap();
        assert_eq!(r, SolveResult::Sat(Assignment(vec![0])));
    }

    #[test]
    fn lev_examples() {
        let (alg, g) = canonical_a3();
        let p = Instance::with_default_names(Arc::new(alg), vec![ElemSet::full(3), [1, 2].into_iter().collect()], vec![]);
        assert_eq!(lev(&p, &g), 3);
        let q = p.restrict_domains(vec![[0, 2].into_iter().collect(), [1].into_iter().collect()]).unwrap();
        assert_eq!(lev(&q, &g), 0);
    }

    #[test]
    fn parity_refuted_by_exclusion() {
        // x0..x5 carry an unsatisfiable parity system over {1,2} that
        // 3-minimality accepts; x6 ∈ {0,1} forces the strand route
        let (alg, g) = canonical_a3();
        let alg = Arc::new(alg);
        let pair = ElemSet::from_bits(0b110);
        let parity = |odd: bool| {
            let ts = all_args(2, 3).filter(|t| (t[0] ^ t[1] ^ t[2] == 1) == odd).map(|t| t.iter().map(|&x| x + 1).collect());
            Relation::new(vec![pair; 3], ts).unwrap()
        };
        let cs = vec![
            Constraint::new(vec![0, 1, 2], parity(true)),
            Constraint::new(vec![2, 3, 4], parity(true)),
            Constraint::new(vec![4, 5, 0], parity(true)),
            Constraint::new(vec![1, 3, 5], parity(false)),
        ];
        let mut domains = vec![pair; 6];
        domains.push(ElemSet::from_bits(0b011));
        let p = Instance::with_default_names(alg, domains, cs);
        assert!(validate_instance(&p).is_empty());
        assert!(establish_3_minimality(&p).is_some());
        assert_eq!(brute_force_solve(&p, 1 << 10).unwrap(), SolveResult::Unsat);
        let (r, t) = solve(&p, &g, &SolverConfig::default()).unwrap();
        assert_eq!(r, SolveResult::Unsat);
        assert_eq!(t.count(BranchKind::Exclusion), 1);
        assert_eq!(t.count(BranchKind::ExclusionLoop), 1);
    }

    #[test]
    fn pinned_equality_pair() {
        // equality with one side pinned to 0
        let (alg, g) = canonical_a3();
        let alg = Arc::new(alg);
        let full = ElemSet::full(3);
        let eq = Relation::new(vec![full; 2], (0..3).map(|a| vec![a, a])).unwrap();
        let pin = Relation::new(vec![full], [vec![0]]).unwrap();
        let p = Instance::with_default_names(
            alg,
            vec![full; 2],
            vec![Constraint::new(vec![0, 1], eq), Constraint::new(vec![1], pin)],
        );
        let (r, _) = solve(&p, &g, &SolverConfig::default()).unwrap();
        assert_eq!(r, SolveResult::Sat(Assignment(vec![0, 0])));
        let expect = brute_force_solve(&p, 1000).unwrap();
        assert_eq!(r.is_sat(), expect.is_sat());
    }
}
