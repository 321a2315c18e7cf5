//! Reductions used by the driver: as-component exclusion with strand
//! splitting, and the retraction reduction with the `c(P)` and `t(P)`
//! constructions.

use std::collections::HashSet;

use crate::analysis::EdgeLabeledGraph;
use crate::consistency::MinimalityTables;
use crate::error::{internal, invalid, Result};
use crate::model::{close_under_ops, Assignment, Constraint, Elem, ElemSet, Instance, Relation, SolveResult, Tuple};
use crate::structure::{as_components, strands_of_instance};

fn restricted_projection(c: &Constraint, positions: &[usize], comps: &[ElemSet]) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = c
        .relation
        .tuples()
        .filter(|t| c.respects_repeats(t))
        .map(|t| positions.iter().map(|&i| t[i]).collect::<Tuple>())
        .filter(|t| t.iter().zip(positions).all(|(&a, &i)| comps[c.scope[i]].contains(a)))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn meets(c: &Constraint, chosen: &[Option<ElemSet>]) -> bool {
    c.relation.tuples().any(|t| {
        c.respects_repeats(t) && c.scope.iter().zip(t).all(|(&v, &a)| chosen[v].is_none_or(|s| s.contains(a)))
    })
}

/// Whether the partial choice meets every constraint and every table of at
/// most three chosen variables.
pub fn is_partial_consistent(p: &Instance, tables: Option<&MinimalityTables>, chosen: &[Option<ElemSet>]) -> bool {
    if !p.constraints().iter().all(|c| meets(c, chosen)) {
        return false;
    }
    let Some(t) = tables else {
        return true;
    };
    let vars: Vec<usize> = (0..chosen.len()).filter(|&v| chosen[v].is_some()).collect();
    for (x, &u) in vars.iter().enumerate() {
        for (y, &v) in vars.iter().enumerate().skip(x + 1) {
            if !pair_meets(t, u, v, chosen) {
                return false;
            }
            for &w in &vars[y + 1..] {
                if !triple_meets(t, u, v, w, chosen) {
                    return false;
                }
            }
        }
    }
    true
}

fn pair_meets(t: &MinimalityTables, u: usize, v: usize, chosen: &[Option<ElemSet>]) -> bool {
    let (cu, cv) = (chosen[u].unwrap(), chosen[v].unwrap());
    cu.iter().any(|a| cv.iter().any(|b| t.allows_pair(u, a, v, b)))
}

fn triple_meets(t: &MinimalityTables, u: usize, v: usize, w: usize, chosen: &[Option<ElemSet>]) -> bool {
    let (cu, cv, cw) = (chosen[u].unwrap(), chosen[v].unwrap(), chosen[w].unwrap());
    cu.iter().any(|a| cv.iter().any(|b| cw.iter().any(|c| t.allows_triple([(u, a), (v, b), (w, c)]))))
}

/// Picks one as-component per variable, in variable order, keeping the
/// first component that leaves the partial choice consistent.
pub fn find_consistent_collection(p: &Instance, tables: &MinimalityTables, g: &EdgeLabeledGraph) -> Result<Vec<ElemSet>> {
    let n = p.num_vars();
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in p.constraints().iter().enumerate() {
        for v in c.distinct_vars() {
            by_var[v].push(ci);
        }
    }
    let mut chosen: Vec<Option<ElemSet>> = vec![None; n];
    for v in 0..n {
        let mut ok = false;
        for comp in as_components(p.domain(v), g) {
            chosen[v] = Some(comp);
            if extension_ok(p, tables, &by_var[v], v, &chosen) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(internal(format!("no as-component of variable {v} extends the partial collection")));
        }
    }
    Ok(chosen.into_iter().map(Option::unwrap).collect())
}

fn extension_ok(p: &Instance, t: &MinimalityTables, cons: &[usize], v: usize, chosen: &[Option<ElemSet>]) -> bool {
    if !cons.iter().all(|&ci| meets(&p.constraints()[ci], chosen)) {
        return false;
    }
    let earlier: Vec<usize> = (0..v).filter(|&u| chosen[u].is_some()).collect();
    for (x, &u) in earlier.iter().enumerate() {
        if !pair_meets(t, u, v, chosen) {
            return false;
        }
        for &w in &earlier[x + 1..] {
            if !triple_meets(t, u, w, v, chosen) {
                return false;
            }
        }
    }
    true
}

/// One strand subproblem and the original indices of its variables.
#[derive(Clone, Debug)]
pub struct StrandProblem {
    pub vars: Vec<usize>,
    pub instance: Instance,
}

/// One instance per strand, over the chosen components, with each
/// constraint projected onto the positions inside the strand.
pub fn split_by_strands(p: &Instance, coll: &[ElemSet]) -> Result<Vec<StrandProblem>> {
    let strands = strands_of_instance(p, coll)?;
    let mut local = vec![usize::MAX; p.num_vars()];
    let mut out = Vec::with_capacity(strands.blocks.len());
    for block in &strands.blocks {
        for (k, &v) in block.iter().enumerate() {
            local[v] = k;
        }
        let mut seen: HashSet<(Vec<usize>, Vec<Tuple>)> = HashSet::new();
        let mut constraints = Vec::new();
        for c in p.constraints() {
            let positions: Vec<usize> = (0..c.scope.len()).filter(|&i| block.contains(&c.scope[i])).collect();
            if positions.is_empty() {
                continue;
            }
            let scope: Vec<usize> = positions.iter().map(|&i| local[c.scope[i]]).collect();
            let tuples = restricted_projection(c, &positions, coll);
            if !seen.insert((scope.clone(), tuples.clone())) {
                continue;
            }
            let sig: Vec<ElemSet> = positions.iter().map(|&i| coll[c.scope[i]]).collect();
            constraints.push(Constraint::new(scope, Relation::new(sig, tuples)?));
        }
        let names = block.iter().map(|&v| p.variables()[v].clone()).collect();
        let domains = block.iter().map(|&v| coll[v]).collect();
        out.push(StrandProblem {
            vars: block.clone(),
            instance: Instance::new(p.algebra().clone(), names, domains, constraints),
        });
    }
    Ok(out)
}

/// Glues strand solutions together and checks the result against `p`.
pub fn combine_solutions(p: &Instance, parts: &[StrandProblem], solutions: &[Assignment]) -> Result<Assignment> {
    if parts.len() != solutions.len() {
        return Err(invalid("one solution per strand is required"));
    }
    let mut values = vec![None; p.num_vars()];
    for (part, sol) in parts.iter().zip(solutions) {
        for (k, &v) in part.vars.iter().enumerate() {
            values[v] = Some(sol.get(k));
        }
    }
    let values: Option<Vec<Elem>> = values.into_iter().collect();
    let a = Assignment(values.ok_or_else(|| invalid("strands do not cover every variable"))?);
    match p.unsatisfied(&a) {
        None => Ok(a),
        Some(ci) => Err(internal(format!("combined strand solutions violate constraint {ci}"))),
    }
}

/// Removes the chosen components from the domains of the strand's
/// variables. `None` means some domain emptied.
pub fn exclude_components(p: &Instance, coll: &[ElemSet], strand: &[usize]) -> Option<Instance> {
    let mut domains = p.domains().to_vec();
    for &v in strand {
        domains[v] = domains[v].difference(coll[v]);
    }
    p.restrict_domains(domains)
}

/// Elements of `domain` that receive no semilattice arc from inside it.
pub fn b_set(domain: ElemSet, g: &EdgeLabeledGraph) -> ElemSet {
    domain
        .iter()
        .filter(|&b| !domain.iter().any(|a| g.semilattice_arc(a, b)))
        .collect()
}

/// Restriction of `p` to the sets `B_v`. `None` when some `B_v` is empty.
pub fn c_of(p: &Instance, g: &EdgeLabeledGraph) -> Option<Instance> {
    let domains = p.domains().iter().map(|&d| b_set(d, g)).collect();
    p.restrict_domains(domains)
}

/// `t(P)` together with the index of variable `(v, b)`.
#[derive(Clone, Debug)]
pub struct TInstance {
    pub instance: Instance,
    index: Vec<Vec<(Elem, usize)>>,
}

impl TInstance {
    /// Index of the variable `(v, b)` of `t(P)`.
    pub fn var(&self, v: usize, b: Elem) -> Option<usize> {
        self.index.get(v)?.iter().find(|&&(x, _)| x == b).map(|&(_, i)| i)
    }
}

fn dot_set(p: &Instance, b: Elem, d: ElemSet) -> ElemSet {
    d.iter().map(|x| p.algebra().f(b, x)).collect()
}

/// Builds `t(P)`. With `forced = Some((w, d))` each `(w, b)` is also
/// restricted to `b·d`. Every relation is closed under the basic
/// operations, which keeps the instance inside the same algebra and only
/// adds tuples of the original relations.
pub fn t_of(p: &Instance, forced: Option<(usize, Elem)>) -> Result<TInstance> {
    let alg = p.algebra().clone();
    let mut names = Vec::new();
    let mut domains = Vec::new();
    let mut index = Vec::with_capacity(p.num_vars());
    for v in 0..p.num_vars() {
        let d = p.domain(v);
        let mut row = Vec::new();
        for b in d.iter() {
            row.push((b, names.len()));
            names.push(format!("{}@{}", p.variables()[v], b));
            domains.push(dot_set(p, b, d));
        }
        index.push(row);
    }
    if let Some((w, d)) = forced {
        if w >= p.num_vars() || !p.domain(w).contains(d) {
            return Err(invalid("forced pair is outside the instance"));
        }
        for &(b, i) in &index[w] {
            domains[i] = domains[i].intersection(ElemSet::singleton(alg.f(b, d)));
        }
    }
    let mut constraints = Vec::new();
    let mut seen: HashSet<(Vec<usize>, Vec<Tuple>)> = HashSet::new();
    let mut push = |scope: Vec<usize>, seed: Vec<Tuple>, domains: &[ElemSet]| -> Result<()> {
        let sig: Vec<ElemSet> = scope.iter().map(|&x| domains[x]).collect();
        let seed: Vec<Tuple> = seed.into_iter().filter(|t| t.iter().zip(&sig).all(|(&a, s)| s.contains(a))).collect();
        let rel = close_under_ops(&alg, sig, seed)?;
        let key = (scope.clone(), rel.tuples().cloned().collect());
        if seen.insert(key) {
            constraints.push(Constraint::new(scope, rel));
        }
        Ok(())
    };
    for (v, vars) in index.iter().enumerate() {
        let d = p.domain(v);
        let scope: Vec<usize> = vars.iter().map(|&(_, i)| i).collect();
        let rows = d.iter().map(|c| d.iter().map(|b| alg.f(b, c)).collect()).collect();
        push(scope, rows, &domains)?;
    }
    for c in p.constraints() {
        for a in c.relation.tuples() {
            if !c.respects_repeats(a) {
                continue;
            }
            let Some(scope) = c
                .scope
                .iter()
                .zip(a)
                .map(|(&v, &x)| index[v].iter().find(|&&(b, _)| b == x).map(|&(_, i)| i))
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            let rows = c
                .relation
                .tuples()
                .map(|x| a.iter().zip(x).map(|(&ai, &xi)| alg.f(ai, xi)).collect())
                .collect();
            push(scope, rows, &domains)?;
        }
    }
    Ok(TInstance { instance: Instance::new(alg, names, domains, constraints), index })
}

/// Self-maps `p_v` of the domains, stored as full tables over the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistentMaps {
    maps: Vec<Vec<Elem>>,
}

impl ConsistentMaps {
    pub fn new(maps: Vec<Vec<Elem>>) -> Self {
        ConsistentMaps { maps }
    }

    pub fn identity(p: &Instance) -> Self {
        let s = p.algebra().size();
        ConsistentMaps { maps: vec![(0..s as Elem).collect(); p.num_vars()] }
    }

    pub fn apply(&self, v: usize, a: Elem) -> Elem {
        self.maps[v][a as usize]
    }

    pub fn image(&self, p: &Instance, v: usize) -> ElemSet {
        p.domain(v).iter().map(|a| self.apply(v, a)).collect()
    }

    /// Every map sends its domain into itself and every constraint tuple
    /// into the constraint.
    pub fn is_consistent(&self, p: &Instance) -> bool {
        if self.maps.len() != p.num_vars() {
            return false;
        }
        if (0..p.num_vars()).any(|v| !self.image(p, v).is_subset(p.domain(v))) {
            return false;
        }
        p.constraints().iter().all(|c| {
            c.relation.tuples().all(|t| {
                let img: Tuple = c.scope.iter().zip(t).map(|(&v, &a)| self.apply(v, a)).collect();
                c.relation.contains(&img)
            })
        })
    }

    pub fn is_permutational(&self, p: &Instance) -> bool {
        (0..p.num_vars()).all(|v| self.image(p, v) == p.domain(v))
    }

    pub fn is_idempotent(&self, p: &Instance) -> bool {
        (0..p.num_vars()).all(|v| p.domain(v).iter().all(|a| self.apply(v, self.apply(v, a)) == self.apply(v, a)))
    }

    fn compose(&self, other: &ConsistentMaps) -> ConsistentMaps {
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(f, g)| g.iter().map(|&x| f[x as usize]).collect())
            .collect();
        ConsistentMaps { maps }
    }
}

/// Reads the maps `p_v(b) = φ(v, b)` off a solution of `t(P)` and checks
/// their consistency.
pub fn maps_from_solution(p: &Instance, t: &TInstance, sol: &Assignment) -> Result<ConsistentMaps> {
    let s = p.algebra().size();
    let mut maps = Vec::with_capacity(p.num_vars());
    for v in 0..p.num_vars() {
        let mut m: Vec<Elem> = (0..s as Elem).collect();
        for &(b, i) in &t.index[v] {
            m[b as usize] = sol.get(i);
        }
        maps.push(m);
    }
    let maps = ConsistentMaps { maps };
    if !maps.is_consistent(p) {
        return Err(internal("maps read from a solution of t(P) are not consistent"));
    }
    Ok(maps)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The least `k ≥ 1` with every `p_v^k` idempotent: a multiple of the
/// common cycle length no smaller than the longest tail.
pub fn idempotent_exponent(p: &Instance, maps: &ConsistentMaps) -> u128 {
    let mut lcm: u128 = 1;
    let mut tail: u128 = 0;
    for v in 0..p.num_vars() {
        for a in p.domain(v).iter() {
            let mut seen: Vec<Elem> = vec![a];
            let mut x = a;
            loop {
                x = maps.apply(v, x);
                if let Some(pos) = seen.iter().position(|&y| y == x) {
                    let cycle = (seen.len() - pos) as u128;
                    tail = tail.max(pos as u128);
                    lcm = lcm / gcd(lcm, cycle) * cycle;
                    break;
                }
                seen.push(x);
            }
        }
    }
    lcm * tail.div_ceil(lcm).max(1)
}

/// Iterates the maps to their common idempotent power.
pub fn idempotent_power(p: &Instance, maps: &ConsistentMaps) -> ConsistentMaps {
    let mut k = idempotent_exponent(p, maps);
    let mut result = ConsistentMaps::identity(p);
    let mut base = maps.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = base.compose(&result);
        }
        base = base.compose(&base);
        k >>= 1;
    }
    result
}

/// Restricts `p` to the images of idempotent, consistent,
/// non-permutational maps.
pub fn retract_instance(p: &Instance, maps: &ConsistentMaps) -> Result<Instance> {
    if !maps.is_idempotent(p) || !maps.is_consistent(p) {
        return Err(invalid("retraction needs idempotent consistent maps"));
    }
    if maps.is_permutational(p) {
        return Err(invalid("retraction needs non-permutational maps"));
    }
    let domains = (0..p.num_vars()).map(|v| maps.image(p, v)).collect();
    p.restrict_domains(domains).ok_or_else(|| internal("retraction emptied a domain"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RetractOutcome {
    Solved(Assignment),
    Retract(ConsistentMaps),
    NoSolution,
}

/// Which construction a recursive call of [`retract_step`] solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetractCall {
    C,
    PlainT,
    ForcedT { var: usize, value: Elem },
}

/// One round of the retraction reduction. `solve` is the recursive solver;
/// with `probe_plain_t` an unforced `t(P)` is tried before the forced ones.
pub fn retract_step(
    p: &Instance,
    g: &EdgeLabeledGraph,
    probe_plain_t: bool,
    solve: &mut dyn FnMut(RetractCall, &Instance) -> Result<SolveResult>,
) -> Result<RetractOutcome> {
    if let Some(c) = c_of(p, g) {
        if let SolveResult::Sat(a) = solve(RetractCall::C, &c)? {
            if !p.is_satisfied_by(&a) {
                return Err(internal("solution of c(P) does not solve P"));
            }
            return Ok(RetractOutcome::Solved(a));
        }
    }
    if probe_plain_t {
        let t = t_of(p, None)?;
        if let SolveResult::Sat(a) = solve(RetractCall::PlainT, &t.instance)? {
            let maps = maps_from_solution(p, &t, &a)?;
            if !maps.is_permutational(p) {
                return Ok(RetractOutcome::Retract(idempotent_power(p, &maps)));
            }
        }
    }
    for w in 0..p.num_vars() {
        let dom = p.domain(w);
        for d in dom.difference(b_set(dom, g)).iter() {
            let t = t_of(p, Some((w, d)))?;
            if let SolveResult::Sat(a) = solve(RetractCall::ForcedT { var: w, value: d }, &t.instance)? {
                let maps = maps_from_solution(p, &t, &a)?;
                if maps.is_permutational(p) {
                    return Err(internal("forced t(P) produced permutational maps"));
                }
                return Ok(RetractOutcome::Retract(idempotent_power(p, &maps)));
            }
        }
    }
    Ok(RetractOutcome::NoSolution)
}

/// A solution of `t(P)` built from a solution `φ` of `P`: `(v, b) ↦ b·φ(v)`.
pub fn t_solution_from(p: &Instance, t: &TInstance, phi: &Assignment) -> Assignment {
    let mut vals = vec![0 as Elem; t.instance.num_vars()];
    for v in 0..p.num_vars() {
        for &(b, i) in &t.index[v] {
            vals[i] = p.algebra().f(b, phi.get(v));
        }
    }
    Assignment(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{EdgeLabeledGraph, Orientation, PairLabel};
    use crate::consistency::establish_3_minimality;
    use crate::model::Algebra;
    use std::sync::Arc;

    fn set(xs: &[Elem]) -> ElemSet {
        xs.iter().copied().collect()
    }

    /// The 3-element test algebra: 0 → 1 semilattice, {1,2} affine, {0,2} majority.
    fn a3() -> (Arc<Algebra>, EdgeLabeledGraph) {
        let f = |x: Elem, y: Elem| if (x, y) == (0, 1) || (x, y) == (1, 0) { 1 } else { x };
        let p = |x: Elem, y: Elem| match (x, y) {
            (0, 1) | (1, 0) => 1,
            (0, 2) | (2, 0) => y,
            _ => x,
        };
        let g = move |x: Elem, y: Elem, z: Elem| {
            let s = set(&[x, y, z]);
            if s.len() == 3 {
                x
            } else if s == set(&[0, 2]) {
                if x == y || x == z {
                    x
                } else {
                    y
                }
            } else if s == set(&[0, 1]) {
                f(f(x, y), z)
            } else {
                x
            }
        };
        let h = move |x: Elem, y: Elem, z: Elem| {
            let s = set(&[x, y, z]);
            if s.len() == 3 {
                x
            } else if s == set(&[1, 2]) {
                if x == y {
                    z
                } else if y == z {
                    x
                } else {
                    y
                }
            } else if s == set(&[0, 1]) {
                f(f(x, y), z)
            } else {
                x
            }
        };
        let alg = Algebra::from_fns(3, f, p, g, h).unwrap();
        let mut gr = EdgeLabeledGraph::new(3);
        gr.set(0, 1, PairLabel::Semilattice(Orientation::Up));
        gr.set(1, 2, PairLabel::Affine);
        gr.set(0, 2, PairLabel::Majority);
        (Arc::new(alg), gr)
    }

    fn chain() -> (Arc<Algebra>, EdgeLabeledGraph) {
        let f = |x: Elem, y: Elem| x.max(y);
        let alg = Algebra::from_fns(2, f, f, move |x, y, z| f(f(x, y), z), move |x, y, z| f(f(x, y), z)).unwrap();
        let mut g = EdgeLabeledGraph::new(2);
        g.set(0, 1, PairLabel::Semilattice(Orientation::Up));
        (Arc::new(alg), g)
    }

    #[test]
    fn b_set_examples() {
        let (_, g) = a3();
        assert_eq!(b_set(ElemSet::full(3), &g), set(&[0, 2]));
        let (_, c) = chain();
        assert_eq!(b_set(ElemSet::full(2), &c), set(&[0]));
        let mut maj = EdgeLabeledGraph::new(3);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            maj.set(a, b, PairLabel::Majority);
        }
        assert_eq!(b_set(ElemSet::full(3), &maj), ElemSet::full(3));
    }

    #[test]
    fn c_of_chain_unary_one_is_unsat() {
        let (alg, g) = chain();
        let r = Relation::new(vec![ElemSet::full(2)], [vec![1]]).unwrap();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2)], vec![Constraint::new(vec![0], r)]);
        let c = c_of(&p, &g).unwrap();
        assert_eq!(c.domain(0), set(&[0]));
        assert!(c.constraints()[0].relation.is_empty());
    }

    #[test]
    fn consistent_collection_on_diagonal() {
        let (alg, g) = a3();
        let diag = Relation::new(vec![ElemSet::full(3); 2], (0..3).map(|a| vec![a, a])).unwrap();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(3); 2], vec![Constraint::new(vec![0, 1], diag)]);
        let (q, t) = establish_3_minimality(&p).unwrap();
        let coll = find_consistent_collection(&q, &t, &g).unwrap();
        assert_eq!(coll, vec![set(&[1, 2]), set(&[1, 2])]);
        let opt: Vec<Option<ElemSet>> = coll.iter().map(|&c| Some(c)).collect();
        assert!(is_partial_consistent(&q, Some(&t), &opt));
    }

    #[test]
    fn strand_split_of_product_is_unary() {
        let (alg, g) = a3();
        let r = Relation::product(vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let p = Instance::with_default_names(
            alg,
            vec![set(&[0, 1]), set(&[1, 2])],
            vec![Constraint::new(vec![0, 1], r)],
        );
        let (q, t) = establish_3_minimality(&p).unwrap();
        let coll = find_consistent_collection(&q, &t, &g).unwrap();
        let parts = split_by_strands(&q, &coll).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|s| s.instance.num_vars() == 1));
        let sols: Vec<Assignment> = parts.iter().map(|s| Assignment(vec![s.instance.domain(0).first().unwrap()])).collect();
        let a = combine_solutions(&q, &parts, &sols).unwrap();
        assert!(q.is_satisfied_by(&a));
    }

    #[test]
    fn exclusion_examples() {
        let (alg, _) = a3();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(3)], vec![]);
        let q = exclude_components(&p, &[set(&[1, 2])], &[0]).unwrap();
        assert_eq!(q.domain(0), set(&[0]));
        assert!(exclude_components(&q, &[set(&[0])], &[0]).is_none());
    }

    #[test]
    fn t_of_chain_example() {
        let (alg, _) = chain();
        let r = Relation::product(vec![ElemSet::full(2)]).unwrap();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2)], vec![Constraint::new(vec![0], r)]);
        let t = t_of(&p, None).unwrap();
        assert_eq!(t.instance.variables(), &["v0@0".to_string(), "v0@1".to_string()]);
        assert_eq!(t.instance.domains(), &[set(&[0, 1]), set(&[1])]);
        let type1 = &t.instance.constraints()[0].relation;
        let rows: Vec<Tuple> = type1.tuples().cloned().collect();
        assert_eq!(rows, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn forced_t_gives_non_permutational_maps() {
        let (alg, g) = a3();
        let p = Instance::with_default_names(alg.clone(), vec![ElemSet::full(3)], vec![]);
        let t = t_of(&p, Some((0, 1))).unwrap();
        for b in 0..3 {
            let i = t.var(0, b).unwrap();
            assert_eq!(t.instance.domain(i), ElemSet::singleton(alg.f(b, 1)));
        }
        let out = retract_step(&p, &g, false, &mut |_, inst| crate::harness::oracle::brute_force_solve(inst, u128::MAX)).unwrap();
        // c(P) has domain {0,2} and no constraints, so it is solved first
        assert_eq!(out, RetractOutcome::Solved(Assignment(vec![0])));
    }

    #[test]
    fn retract_chain_retracts() {
        let (alg, g) = chain();
        let r = Relation::new(vec![ElemSet::full(2)], [vec![1]]).unwrap();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2)], vec![Constraint::new(vec![0], r)]);
        let out = retract_step(&p, &g, false, &mut |_, inst| crate::harness::oracle::brute_force_solve(inst, u128::MAX)).unwrap();
        let RetractOutcome::Retract(maps) = out else {
            panic!("expected a retraction, got {out:?}");
        };
        assert_eq!(maps.apply(0, 0), 1);
        assert_eq!(maps.apply(0, 1), 1);
        let q = retract_instance(&p, &maps).unwrap();
        assert_eq!(q.domain(0), set(&[1]));
        assert!(q.summ() < p.summ());
    }

    #[test]
    fn idempotent_power_examples() {
        let (alg, _) = a3();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(3)], vec![]);
        let id = ConsistentMaps::identity(&p);
        assert_eq!(idempotent_power(&p, &id), id);
        let constant = ConsistentMaps::new(vec![vec![2, 2, 2]]);
        assert_eq!(idempotent_power(&p, &constant), constant);
        // 0 ↔ 1 swapped, 2 ↦ 0: squares to 0 ↦ 0, 1 ↦ 1, 2 ↦ 1
        let m = ConsistentMaps::new(vec![vec![1, 0, 0]]);
        let e = idempotent_power(&p, &m);
        assert!(e.is_idempotent(&p));
        assert_eq!(e, ConsistentMaps::new(vec![vec![0, 1, 1]]));
        // a 3-cycle with a tail needs exponent 3, not a power of two
        let s = Instance::with_default_names(p.algebra().clone(), vec![ElemSet::full(3)], vec![]);
        let cyc = ConsistentMaps::new(vec![vec![1, 2, 0]]);
        assert_eq!(idempotent_exponent(&s, &cyc), 3);
        assert!(idempotent_power(&s, &cyc).is_idempotent(&s));
    }
}
