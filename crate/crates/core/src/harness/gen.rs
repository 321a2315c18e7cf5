//! Seeded generators for algebras, relations and instances.

use std::sync::Arc;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{pair_rule, EdgeLabeledGraph, Orientation, PairKind, PairLabel};
use crate::error::{invalid, Result};
use crate::model::{all_args, close_under_ops, Algebra, Constraint, Elem, ElemSet, Instance, Op, Relation, Tuple, MAX_UNIVERSE};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub domain_size: usize,
    pub num_vars: usize,
    pub num_constraints: usize,
    pub max_arity: usize,
    /// Relative weights of semilattice, majority and affine pair labels.
    pub weights: [f64; 3],
    /// Upper bound on the random tuples a relation is generated from.
    pub max_seed_tuples: usize,
    /// Probability that a variable gets the whole universe as its domain.
    pub full_domain_prob: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            domain_size: 3,
            num_vars: 6,
            num_constraints: 6,
            max_arity: 3,
            weights: [1.0, 1.0, 1.0],
            max_seed_tuples: 3,
            full_domain_prob: 0.5,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.domain_size == 0 || self.domain_size > MAX_UNIVERSE {
            return Err(invalid(format!("domain size must be in 1..={MAX_UNIVERSE}")));
        }
        if self.num_vars == 0 || self.max_arity == 0 || self.max_seed_tuples == 0 {
            return Err(invalid("variable count, arity and seed tuple count must be positive"));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(invalid("label weights must be nonnegative and not all zero"));
        }
        if !(0.0..=1.0).contains(&self.full_domain_prob) {
            return Err(invalid("full-domain probability must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Canonical tables for a total labeling: `f` is the semilattice on
/// semilattice pairs and the first projection elsewhere, `p`, `g`, `h`
/// follow the pair rules, and `g`, `h` return their first argument on
/// three distinct arguments.
pub fn algebra_from_graph(g: &EdgeLabeledGraph) -> Result<Algebra> {
    let n = g.size();
    if !g.is_total() {
        return Err(invalid("every pair needs a tractable label"));
    }
    if g.pairs().any(|(_, _, l)| l == PairLabel::Semilattice(Orientation::Both)) {
        return Err(invalid("canonical tables need each semilattice pair oriented one way"));
    }
    let kind = |a: Elem, b: Elem| match g.label(a, b) {
        PairLabel::Semilattice(_) => PairKind::Semilattice { top: if g.semilattice_arc(a, b) { b } else { a } },
        PairLabel::Majority => PairKind::Majority,
        _ => PairKind::Affine,
    };
    let table = |op: Op| -> Vec<Elem> {
        all_args(n, op.arity())
            .map(|args| {
                let set: ElemSet = args.iter().copied().collect();
                match set.len() {
                    1 => args[0],
                    2 => {
                        let mut it = set.iter();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        pair_rule(op, kind(a, b), &args)
                    }
                    _ => args[0],
                }
            })
            .collect()
    };
    Algebra::new(n, table(Op::F), table(Op::P), table(Op::G), table(Op::H))
}

/// The 3-element test algebra: `0 → 1` semilattice, `{1,2}` affine,
/// `{0,2}` majority.
pub fn canonical_a3() -> (Algebra, EdgeLabeledGraph) {
    let mut g = EdgeLabeledGraph::new(3);
    g.set(0, 1, PairLabel::Semilattice(Orientation::Up));
    g.set(1, 2, PairLabel::Affine);
    g.set(0, 2, PairLabel::Majority);
    let alg = algebra_from_graph(&g).expect("total labeling");
    (alg, g)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random total labeling of the pairs of `0..size`.
pub fn gen_graph<R: Rng>(size: usize, weights: [f64; 3], rng: &mut R) -> Result<EdgeLabeledGraph> {
    let dist = WeightedIndex::new(weights).map_err(|e| invalid(e.to_string()))?;
    let mut g = EdgeLabeledGraph::new(size);
    for a in 0..size as Elem {
        for b in a + 1..size as Elem {
            let label = match dist.sample(rng) {
                0 => PairLabel::Semilattice(if rng.gen_bool(0.5) { Orientation::Up } else { Orientation::Down }),
                1 => PairLabel::Majority,
                _ => PairLabel::Affine,
            };
            g.set(a, b, label);
        }
    }
    Ok(g)
}

/// A random algebra with canonical tables, reproducible from `cfg.seed`.
pub fn gen_algebra(cfg: &GeneratorConfig) -> Result<(Algebra, EdgeLabeledGraph)> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    gen_algebra_with(cfg.domain_size, cfg.weights, &mut rng)
}

pub fn gen_algebra_with<R: Rng>(size: usize, weights: [f64; 3], rng: &mut R) -> Result<(Algebra, EdgeLabeledGraph)> {
    let g = gen_graph(size, weights, rng)?;
    Ok((algebra_from_graph(&g)?, g))
}

/// A random nonempty subset of `of`.
pub fn random_subset<R: Rng>(of: ElemSet, rng: &mut R) -> ElemSet {
    let elems: Vec<Elem> = of.iter().collect();
    loop {
        let s: ElemSet = elems.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// The closure of a few random tuples of the product of `sig`.
pub fn gen_relation<R: Rng>(alg: &Algebra, sig: Vec<ElemSet>, max_seed: usize, rng: &mut R) -> Result<Relation> {
    let count = rng.gen_range(1..=max_seed.max(1));
    let elems: Vec<Vec<Elem>> = sig.iter().map(|s| s.iter().collect()).collect();
    let seed: Vec<Tuple> = (0..count)
        .map(|_| elems.iter().map(|e| *e.choose(rng).expect("nonempty position")).collect())
        .collect();
    close_under_ops(alg, sig, seed)
}

/// A random instance over `alg`: random domains and constraints whose
/// relations are closures of random tuples, hence preserved by `alg`.
pub fn gen_instance(alg: &Arc<Algebra>, cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    rng.set_stream(1);
    gen_instance_with(alg, cfg, &mut rng)
}

pub fn gen_instance_with<R: Rng>(alg: &Arc<Algebra>, cfg: &GeneratorConfig, rng: &mut R) -> Result<Instance> {
    let universe = alg.universe();
    let n = cfg.num_vars;
    let domains: Vec<ElemSet> = (0..n)
        .map(|_| if rng.gen_bool(cfg.full_domain_prob) { universe } else { random_subset(universe, rng) })
        .collect();
    let mut constraints = Vec::with_capacity(cfg.num_constraints);
    let vars: Vec<usize> = (0..n).collect();
    for _ in 0..cfg.num_constraints {
        let k = rng.gen_range(1..=cfg.max_arity.min(n));
        let scope: Vec<usize> = vars.choose_multiple(rng, k).copied().collect();
        let sig: Vec<ElemSet> = scope.iter().map(|&v| domains[v]).collect();
        let rel = gen_relation(alg, sig, cfg.max_seed_tuples, rng)?;
        constraints.push(Constraint::new(scope, rel));
    }
    Ok(Instance::with_default_names(alg.clone(), domains, constraints))
}

/// Residue kind of a scaling family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingFamily {
    Majority,
    Affine,
}

impl std::str::FromStr for ScalingFamily {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(ScalingFamily::Majority),
            "affine" => Ok(ScalingFamily::Affine),
            _ => Err(invalid(format!("unknown family {s:?}; expected majority or affine"))),
        }
    }
}

/// The 4-element algebra of a scaling family: `{0,1}` and `{2,3}` carry the
/// family's label and every cross pair is a semilattice arc into `{2,3}`.
pub fn scaling_algebra(family: ScalingFamily) -> (Algebra, EdgeLabeledGraph) {
    let inner = match family {
        ScalingFamily::Majority => PairLabel::Majority,
        ScalingFamily::Affine => PairLabel::Affine,
    };
    let mut g = EdgeLabeledGraph::new(4);
    g.set(0, 1, inner);
    g.set(2, 3, inner);
    for a in 0..2 {
        for b in 2..4 {
            g.set(a, b, PairLabel::Semilattice(Orientation::Up));
        }
    }
    let alg = algebra_from_graph(&g).expect("total labeling");
    (alg, g)
}

/// A scaling instance with a planted solution: every constraint is the
/// closure of random tuples together with the planted tuple on its scope,
/// so the instance is satisfiable.
pub fn scaling_instance(family: ScalingFamily, num_vars: usize, num_constraints: usize, seed: u64) -> Result<Instance> {
    if num_vars < 3 {
        return Err(invalid("scaling instances need at least 3 variables"));
    }
    let (alg, _) = scaling_algebra(family);
    let alg = Arc::new(alg);
    let mut rng = rng_from_seed(seed);
    let universe = alg.universe();
    let domains: Vec<ElemSet> =
        (0..num_vars).map(|_| if rng.gen_bool(0.5) { universe } else { random_subset(universe, &mut rng) }).collect();
    let planted: Vec<Elem> = domains.iter().map(|d| *d.iter().collect::<Vec<_>>().choose(&mut rng).expect("nonempty")).collect();
    let vars: Vec<usize> = (0..num_vars).collect();
    let mut constraints = Vec::with_capacity(num_constraints);
    for _ in 0..num_constraints {
        let k = rng.gen_range(2..=3);
        let scope: Vec<usize> = vars.choose_multiple(&mut rng, k).copied().collect();
        let sig: Vec<ElemSet> = scope.iter().map(|&v| domains[v]).collect();
        let elems: Vec<Vec<Elem>> = sig.iter().map(|s| s.iter().collect()).collect();
        let mut seed_tuples: Vec<Tuple> = vec![scope.iter().map(|&v| planted[v]).collect()];
        for _ in 0..rng.gen_range(0..=2) {
            seed_tuples.push(elems.iter().map(|e| *e.choose(&mut rng).expect("nonempty")).collect());
        }
        constraints.push(Constraint::new(scope, close_under_ops(&alg, sig, seed_tuples)?));
    }
    Ok(Instance::with_default_names(alg, domains, constraints))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_uniformity_laws;
    use crate::model::validate_instance;

    #[test]
    fn canonical_a3_tables() {
        let (a, g) = canonical_a3();
        assert_eq!((a.f(0, 1), a.f(1, 0), a.f(0, 2), a.f(2, 0), a.f(1, 2), a.f(2, 1)), (1, 1, 0, 2, 1, 2));
        assert_eq!((a.p(0, 2), a.p(2, 0), a.p(1, 2), a.p(2, 1), a.p(0, 1)), (2, 0, 1, 2, 1));
        assert_eq!(a.g(0, 2, 2), 2);
        assert_eq!(a.g(1, 2, 2), 1);
        assert_eq!(a.h(1, 2, 2), 1);
        assert_eq!(a.h(1, 1, 2), 2);
        assert_eq!(a.h(0, 2, 2), 0);
        assert_eq!(a.g(0, 1, 2), 0);
        assert!(check_uniformity_laws(&a, &g, &[]).is_clean());
        assert_eq!(EdgeLabeledGraph::from_algebra(&a), g);
    }

    #[test]
    fn all_majority_tables_are_projections_on_pairs() {
        let cfg = GeneratorConfig { domain_size: 4, weights: [0.0, 1.0, 0.0], ..Default::default() };
        let (a, _) = gen_algebra(&cfg).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(a.f(x, y), x);
                assert_eq!(a.p(x, y), y);
                assert_eq!(a.h(x, y, y), x);
            }
        }
    }

    #[test]
    fn reproducible() {
        let cfg = GeneratorConfig { seed: 42, domain_size: 4, ..Default::default() };
        let (a1, g1) = gen_algebra(&cfg).unwrap();
        let (a2, g2) = gen_algebra(&cfg).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(g1, g2);
        let alg = Arc::new(a1);
        assert_eq!(gen_instance(&alg, &cfg).unwrap(), gen_instance(&alg, &cfg).unwrap());
    }

    #[test]
    fn generated_algebras_pass_laws_and_instances_validate() {
        for seed in 0..20 {
            let cfg = GeneratorConfig { seed, domain_size: 2 + (seed as usize % 3), ..Default::default() };
            let (a, g) = gen_algebra(&cfg).unwrap();
            assert!(check_uniformity_laws(&a, &g, &[]).is_clean(), "seed {seed}");
            assert_eq!(EdgeLabeledGraph::from_algebra(&a), g);
            let p = gen_instance(&Arc::new(a), &cfg).unwrap();
            assert!(validate_instance(&p).is_empty(), "seed {seed}");
            assert_eq!(p.num_vars(), cfg.num_vars);
            assert_eq!(p.constraints().len(), cfg.num_constraints);
            assert!(p.constraints().iter().all(|c| c.scope.len() <= cfg.max_arity));
        }
    }

    #[test]
    fn scaling_instances_are_planted_and_closed() {
        for family in [ScalingFamily::Majority, ScalingFamily::Affine] {
            let (a, g) = scaling_algebra(family);
            assert!(check_uniformity_laws(&a, &g, &[]).is_clean());
            let p = scaling_instance(family, 12, 15, 7).unwrap();
            assert!(validate_instance(&p).is_empty());
            assert!(crate::harness::oracle::brute_force_solve(&p, u128::MAX).unwrap().is_sat());
        }
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig { weights: [0.0; 3], ..Default::default() }.validate().is_err());
        assert!(GeneratorConfig { num_vars: 0, ..Default::default() }.validate().is_err());
        assert!(GeneratorConfig { domain_size: 65, ..Default::default() }.validate().is_err());
    }
}
