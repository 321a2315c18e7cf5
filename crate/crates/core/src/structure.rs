//! The semilattice/affine digraph, as-components, paths in relations,
//! strands, linkedness, and executable checks of the structural lemmas.

use std::collections::VecDeque;

use crate::analysis::EdgeLabeledGraph;
use crate::error::{invalid, Result};
use crate::model::{Constraint, Elem, ElemSet, Instance, Relation, Tuple};

/// Arcs `a → b` for semilattice arcs and both directions of affine pairs,
/// restricted to a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SADigraph {
    domain: ElemSet,
    out: Vec<ElemSet>,
}

impl SADigraph {
    pub fn new(domain: ElemSet, g: &EdgeLabeledGraph) -> Self {
        let mut out = vec![ElemSet::EMPTY; 64];
        for a in domain.iter() {
            for b in domain.iter() {
                if g.semilattice_arc(a, b) || g.is_affine(a, b) {
                    out[a as usize].insert(b);
                }
            }
        }
        out.truncate(domain.iter().last().map_or(0, |m| m as usize + 1));
        SADigraph { domain, out }
    }

    pub fn domain(&self) -> ElemSet {
        self.domain
    }

    pub fn successors(&self, a: Elem) -> ElemSet {
        self.out.get(a as usize).copied().unwrap_or(ElemSet::EMPTY)
    }

    /// Elements reachable from `a`, including `a`.
    pub fn reach(&self, a: Elem) -> ElemSet {
        let mut seen = ElemSet::singleton(a);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = ElemSet::EMPTY;
            for x in frontier.iter() {
                next = next.union(self.successors(x));
            }
            frontier = next.difference(seen);
            seen = seen.union(next);
        }
        seen
    }
}

/// The sink strongly connected components of the digraph on `domain`,
/// ordered by least element.
pub fn as_components(domain: ElemSet, g: &EdgeLabeledGraph) -> Vec<ElemSet> {
    let d = SADigraph::new(domain, g);
    let reach: Vec<(Elem, ElemSet)> = domain.iter().map(|a| (a, d.reach(a))).collect();
    let mut out: Vec<ElemSet> = Vec::new();
    let mut covered = ElemSet::EMPTY;
    for &(a, r) in &reach {
        if covered.contains(a) {
            continue;
        }
        // a sink component is one from which nothing outside is reachable,
        // so every member reaches exactly the component
        let scc: ElemSet = r.iter().filter(|&b| reach.iter().any(|&(x, rx)| x == b && rx.contains(a))).collect();
        if scc == r {
            out.push(scc);
            covered = covered.union(scc);
        }
    }
    out
}

/// Union of the as-components of `domain`.
pub fn as_component_elements(domain: ElemSet, g: &EdgeLabeledGraph) -> ElemSet {
    as_components(domain, g).into_iter().fold(ElemSet::EMPTY, ElemSet::union)
}

pub fn is_semilattice_free_domain(domain: ElemSet, g: &EdgeLabeledGraph) -> bool {
    !g.has_semilattice_inside(domain)
}

pub fn is_semilattice_free(p: &Instance, g: &EdgeLabeledGraph) -> bool {
    p.domains().iter().all(|&d| is_semilattice_free_domain(d, g))
}

/// `t → u` is a semilattice edge of the tuple graph.
pub fn semilattice_step(g: &EdgeLabeledGraph, t: &[Elem], u: &[Elem]) -> bool {
    t != u && t.iter().zip(u).all(|(&a, &b)| a == b || g.semilattice_arc(a, b))
}

/// `{t, u}` is an affine edge of the tuple graph.
pub fn affine_step(g: &EdgeLabeledGraph, t: &[Elem], u: &[Elem]) -> bool {
    t != u && t.iter().zip(u).all(|(&a, &b)| a == b || g.is_affine(a, b))
}

/// A step of a path: a semilattice edge `t → u` or an affine edge.
pub fn path_step(g: &EdgeLabeledGraph, t: &[Elem], u: &[Elem]) -> bool {
    semilattice_step(g, t, u) || affine_step(g, t, u)
}

/// A shortest path from `a` to `b` through tuples of `r`.
pub fn find_path(r: &Relation, g: &EdgeLabeledGraph, a: &[Elem], b: &[Elem]) -> Option<Vec<Tuple>> {
    find_path_within(r, g, a, b, |_| true)
}

/// Like [`find_path`], using only tuples accepted by `keep`.
pub fn find_path_within(
    r: &Relation,
    g: &EdgeLabeledGraph,
    a: &[Elem],
    b: &[Elem],
    keep: impl Fn(&[Elem]) -> bool,
) -> Option<Vec<Tuple>> {
    let tuples: Vec<&Tuple> = r.tuples().filter(|t| keep(t)).collect();
    let start = tuples.iter().position(|t| t.as_slice() == a)?;
    let goal = tuples.iter().position(|t| t.as_slice() == b)?;
    let mut parent = vec![usize::MAX; tuples.len()];
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if x == goal {
            let mut path = vec![tuples[x].clone()];
            let mut cur = x;
            while cur != start {
                cur = parent[cur];
                path.push(tuples[cur].clone());
            }
            path.reverse();
            return Some(path);
        }
        for y in 0..tuples.len() {
            if parent[y] == usize::MAX && path_step(g, tuples[x], tuples[y]) {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// A partition into blocks, each sorted, blocks ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl StrandPartition {
    pub fn block_of(&self, x: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&x))
    }

    fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index: Vec<Option<usize>> = vec![None; labels.len()];
        for (x, &l) in labels.iter().enumerate() {
            match index[l] {
                Some(b) => blocks[b].push(x),
                None => {
                    index[l] = Some(blocks.len());
                    blocks.push(vec![x]);
                }
            }
        }
        StrandPartition { blocks }
    }
}

/// Positions `i` and `j` share a strand when, on every tuple, `t[i] ∈ A'_i`
/// exactly when `t[j] ∈ A'_j`.
pub fn strands_of_relation(r: &Relation, components: &[ElemSet]) -> Result<StrandPartition> {
    if components.len() != r.arity() {
        return Err(invalid("one component per position is required"));
    }
    for (i, c) in components.iter().enumerate() {
        if !c.is_subset(r.signature()[i]) {
            return Err(invalid(format!("component {c:?} is not inside the domain of position {i}")));
        }
    }
    let membership: Vec<Vec<bool>> = (0..r.arity())
        .map(|i| r.tuples().map(|t| components[i].contains(t[i])).collect())
        .collect();
    let labels: Vec<usize> = (0..r.arity())
        .map(|i| (0..=i).find(|&j| membership[j] == membership[i]).unwrap())
        .collect();
    Ok(StrandPartition::from_labels(&labels))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merges the variables of every strand of every constraint.
pub fn strands_of_instance(p: &Instance, collection: &[ElemSet]) -> Result<StrandPartition> {
    if collection.len() != p.num_vars() {
        return Err(invalid("collection must cover every variable"));
    }
    let mut uf = UnionFind::new(p.num_vars());
    for c in p.constraints() {
        for block in constraint_strands(c, collection)?.blocks {
            for w in block.windows(2) {
                uf.union(c.scope[w[0]], c.scope[w[1]]);
            }
        }
    }
    let labels: Vec<usize> = (0..p.num_vars()).map(|v| uf.find(v)).collect();
    Ok(StrandPartition::from_labels(&labels))
}

fn constraint_strands(c: &Constraint, collection: &[ElemSet]) -> Result<StrandPartition> {
    let comps: Vec<ElemSet> = c.scope.iter().map(|&v| collection[v]).collect();
    strands_of_relation(&c.relation, &comps)
}

/// A binary relation is linked when its bipartite graph, restricted to the
/// values that occur, is connected.
pub fn is_linked(r: &Relation) -> Result<bool> {
    if r.arity() != 2 {
        return Err(invalid("linkedness is defined for binary relations"));
    }
    if r.is_empty() {
        return Ok(false);
    }
    // left value a is node a, right value b is node 64 + b
    let mut uf = UnionFind::new(128);
    for t in r.tuples() {
        uf.union(t[0] as usize, 64 + t[1] as usize);
    }
    let root = uf.find(r.tuple(0)[0] as usize);
    let left_ok = r.column(0).iter().all(|a| uf.find(a as usize) == root);
    let right_ok = r.column(1).iter().all(|b| uf.find(64 + b as usize) == root);
    Ok(left_ok && right_ok)
}

/// One instance of a structural law, with the data it quantifies over.
/// Components refer to the as-components of each column of the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawCase {
    /// A path in the projection onto `positions` lifts to a path in the relation.
    PathExtension { positions: Vec<usize>, path: Vec<Tuple> },
    /// The part of the relation inside the chosen components is subdirect
    /// in them and is an as-component of the relation.
    Connectivity { components: Vec<ElemSet> },
    /// A projected tuple with all entries in as-components extends to a
    /// tuple with all entries in as-components.
    MaxExtension { positions: Vec<usize>, partial: Tuple },
    /// The product of the strand projections lies inside the relation.
    Rectangularity { components: Vec<ElemSet> },
    /// A pairwise consistent choice of components meets the relation.
    Crt { components: Vec<ElemSet> },
    /// For a linked binary relation meeting `A' × B'`, all of `A' × B'` is inside.
    LinkedRectangularity { components: [ElemSet; 2] },
    /// A pairwise consistent choice on all positions but `missing` extends
    /// to a pairwise consistent choice on all positions.
    CollectionExtension { components: Vec<ElemSet>, missing: usize },
}

impl LawCase {
    pub fn name(&self) -> &'static str {
        match self {
            LawCase::PathExtension { .. } => "path-extension",
            LawCase::Connectivity { .. } => "connectivity",
            LawCase::MaxExtension { .. } => "max-extension",
            LawCase::Rectangularity { .. } => "rectangularity",
            LawCase::Crt { .. } => "crt",
            LawCase::LinkedRectangularity { .. } => "linked-rectangularity",
            LawCase::CollectionExtension { .. } => "collection-extension",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub reason: String,
    pub tuples: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawOutcome {
    Pass,
    Fail(Counterexample),
    HypothesisNotMet(String),
}

fn fail(reason: impl Into<String>, tuples: Vec<Tuple>) -> LawOutcome {
    LawOutcome::Fail(Counterexample { reason: reason.into(), tuples })
}

fn unmet(reason: impl Into<String>) -> LawOutcome {
    LawOutcome::HypothesisNotMet(reason.into())
}

fn inside(t: &[Elem], comps: &[ElemSet]) -> bool {
    t.iter().zip(comps).all(|(&a, c)| c.contains(a))
}

/// Checks that each component is an as-component of the matching column.
fn components_ok(r: &Relation, g: &EdgeLabeledGraph, comps: &[ElemSet]) -> Option<String> {
    if comps.len() != r.arity() {
        return Some("one component per position is required".into());
    }
    for (i, c) in comps.iter().enumerate() {
        if !as_components(r.column(i), g).contains(c) {
            return Some(format!("{c:?} is not an as-component of column {i}"));
        }
    }
    None
}

fn pairwise_consistent(r: &Relation, comps: &[Option<ElemSet>]) -> bool {
    let k = r.arity();
    (0..k).all(|i| {
        (i..k).all(|j| match (comps[i], comps[j]) {
            (Some(a), Some(b)) => r.tuples().any(|t| a.contains(t[i]) && b.contains(t[j])),
            _ => true,
        })
    })
}

/// Evaluates a law on `r` by exhaustive enumeration. Hypotheses are checked
/// first and reported separately from failures.
pub fn check_law(g: &EdgeLabeledGraph, r: &Relation, case: &LawCase) -> LawOutcome {
    if r.is_empty() {
        return unmet("empty relation");
    }
    match case {
        LawCase::PathExtension { positions, path } => check_path_extension(g, r, positions, path),
        LawCase::Connectivity { components } => check_connectivity(g, r, components),
        LawCase::MaxExtension { positions, partial } => check_max_extension(g, r, positions, partial),
        LawCase::Rectangularity { components } => check_rectangularity(g, r, components),
        LawCase::Crt { components } => {
            if let Some(why) = components_ok(r, g, components) {
                return unmet(why);
            }
            let opt: Vec<Option<ElemSet>> = components.iter().map(|&c| Some(c)).collect();
            if !pairwise_consistent(r, &opt) {
                return unmet("components are not pairwise consistent");
            }
            if r.tuples().any(|t| inside(t, components)) {
                LawOutcome::Pass
            } else {
                fail("no tuple inside the components", vec![])
            }
        }
        LawCase::LinkedRectangularity { components } => {
            if r.arity() != 2 {
                return unmet("relation is not binary");
            }
            if let Some(why) = components_ok(r, g, components) {
                return unmet(why);
            }
            if !is_linked(r).unwrap_or(false) {
                return unmet("relation is not linked");
            }
            if !r.tuples().any(|t| inside(t, components)) {
                return unmet("relation misses the components");
            }
            for a in components[0].iter() {
                for b in components[1].iter() {
                    if !r.contains(&[a, b]) {
                        return fail("product of components not inside", vec![vec![a, b]]);
                    }
                }
            }
            LawOutcome::Pass
        }
        LawCase::CollectionExtension { components, missing } => {
            let k = r.arity();
            if components.len() != k || *missing >= k {
                return unmet("malformed collection");
            }
            let mut opt: Vec<Option<ElemSet>> = components.iter().map(|&c| Some(c)).collect();
            opt[*missing] = None;
            for (i, c) in opt.iter().enumerate() {
                if let Some(c) = c {
                    if !as_components(r.column(i), g).contains(c) {
                        return unmet(format!("{c:?} is not an as-component of column {i}"));
                    }
                }
            }
            if !pairwise_consistent(r, &opt) {
                return unmet("partial collection is not pairwise consistent");
            }
            for c in as_components(r.column(*missing), g) {
                opt[*missing] = Some(c);
                if pairwise_consistent(r, &opt) {
                    return LawOutcome::Pass;
                }
            }
            fail("no as-component extends the partial collection", vec![])
        }
    }
}

fn project_tuple(t: &[Elem], positions: &[usize]) -> Tuple {
    positions.iter().map(|&i| t[i]).collect()
}

fn check_path_extension(g: &EdgeLabeledGraph, r: &Relation, positions: &[usize], path: &[Tuple]) -> LawOutcome {
    let Ok(proj) = r.project(positions) else {
        return unmet("bad position set");
    };
    if path.is_empty() {
        return unmet("empty path");
    }
    if path.iter().any(|t| !proj.contains(t)) {
        return unmet("path leaves the projection");
    }
    if path.windows(2).any(|w| !path_step(g, &w[0], &w[1])) {
        return unmet("sequence is not a path");
    }
    // layer i: tuples of r over path[i] reachable by a lifted path
    let mut layer: Vec<&Tuple> = r.tuples().filter(|t| project_tuple(t, positions) == path[0]).collect();
    for (step, target) in path.iter().enumerate().skip(1) {
        let next: Vec<&Tuple> = r
            .tuples()
            .filter(|u| project_tuple(u, positions) == *target && layer.iter().any(|t| path_step(g, t, u) || t == u))
            .collect();
        if next.is_empty() {
            return fail(format!("no lift reaches step {step}"), path.to_vec());
        }
        layer = next;
    }
    LawOutcome::Pass
}

fn check_connectivity(g: &EdgeLabeledGraph, r: &Relation, comps: &[ElemSet]) -> LawOutcome {
    if let Some(why) = components_ok(r, g, comps) {
        return unmet(why);
    }
    let sub: Vec<&Tuple> = r.tuples().filter(|t| inside(t, comps)).collect();
    if sub.is_empty() {
        return unmet("relation misses the components");
    }
    for (i, c) in comps.iter().enumerate() {
        let col: ElemSet = sub.iter().map(|t| t[i]).collect();
        if col != *c {
            return fail(format!("restriction is not subdirect at position {i}"), vec![]);
        }
    }
    // strongly connected inside
    let n = sub.len();
    for forward in [true, false] {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                let step = if forward { path_step(g, sub[x], sub[y]) } else { path_step(g, sub[y], sub[x]) };
                if !seen[y] && step {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if let Some(y) = seen.iter().position(|&s| !s) {
            return fail("restriction is not strongly connected", vec![sub[0].clone(), sub[y].clone()]);
        }
    }
    // nothing leaves
    for t in &sub {
        for u in r.tuples() {
            if !inside(u, comps) && path_step(g, t, u) {
                return fail("an edge leaves the restriction", vec![(*t).clone(), u.clone()]);
            }
        }
    }
    LawOutcome::Pass
}

fn check_max_extension(g: &EdgeLabeledGraph, r: &Relation, positions: &[usize], partial: &[Elem]) -> LawOutcome {
    let Ok(proj) = r.project(positions) else {
        return unmet("bad position set");
    };
    if !proj.contains(partial) {
        return unmet("partial tuple is not in the projection");
    }
    let members: Vec<ElemSet> = (0..r.arity()).map(|i| as_component_elements(r.column(i), g)).collect();
    if positions.iter().zip(partial).any(|(&i, &a)| !members[i].contains(a)) {
        return unmet("partial tuple leaves the as-components");
    }
    if r.tuples().any(|t| project_tuple(t, positions) == partial && inside(t, &members)) {
        LawOutcome::Pass
    } else {
        fail("no extension inside as-components", vec![partial.to_vec()])
    }
}

fn check_rectangularity(g: &EdgeLabeledGraph, r: &Relation, comps: &[ElemSet]) -> LawOutcome {
    if let Some(why) = components_ok(r, g, comps) {
        return unmet(why);
    }
    if !r.tuples().any(|t| inside(t, comps)) {
        return unmet("relation misses the components");
    }
    let strands = match strands_of_relation(r, comps) {
        Ok(s) => s,
        Err(e) => return unmet(e.to_string()),
    };
    let pieces: Vec<Vec<Tuple>> = strands
        .blocks
        .iter()
        .map(|b| {
            let mut ts: Vec<Tuple> = r
                .tuples()
                .map(|t| project_tuple(t, b))
                .filter(|p| p.iter().zip(b).all(|(&a, &i)| comps[i].contains(a)))
                .collect();
            ts.sort();
            ts.dedup();
            ts
        })
        .collect();
    let mut idx = vec![0usize; pieces.len()];
    let mut t = vec![0 as Elem; r.arity()];
    loop {
        for (bi, b) in strands.blocks.iter().enumerate() {
            for (k, &pos) in b.iter().enumerate() {
                t[pos] = pieces[bi][idx[bi]][k];
            }
        }
        if !r.contains(&t) {
            return fail("product of strand projections leaves the relation", vec![t]);
        }
        let mut d = pieces.len();
        loop {
            if d == 0 {
                return LawOutcome::Pass;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < pieces[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{Orientation, PairLabel};

    /// 0 → 1 semilattice, {1,2} affine, {0,2} majority.
    fn a3_graph() -> EdgeLabeledGraph {
        let mut g = EdgeLabeledGraph::new(3);
        g.set(0, 1, PairLabel::Semilattice(Orientation::Up));
        g.set(1, 2, PairLabel::Affine);
        g.set(0, 2, PairLabel::Majority);
        g
    }

    fn set(xs: &[Elem]) -> ElemSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn as_components_examples() {
        let g = a3_graph();
        assert_eq!(as_components(ElemSet::full(3), &g), vec![set(&[1, 2])]);
        let mut maj = EdgeLabeledGraph::new(3);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            maj.set(a, b, PairLabel::Majority);
        }
        assert_eq!(as_components(ElemSet::full(3), &maj), vec![set(&[0]), set(&[1]), set(&[2])]);
        assert_eq!(as_components(set(&[0, 1]), &g), vec![set(&[1])]);
        assert_eq!(as_components(set(&[0, 2]), &g), vec![set(&[0]), set(&[2])]);
    }

    #[test]
    fn semilattice_freeness() {
        let g = a3_graph();
        assert!(!is_semilattice_free_domain(ElemSet::full(3), &g));
        assert!(is_semilattice_free_domain(set(&[1, 2]), &g));
        assert!(is_semilattice_free_domain(set(&[0, 2]), &g));
    }

    #[test]
    fn paths() {
        let g = a3_graph();
        let sq = Relation::product(vec![set(&[1, 2]); 2]).unwrap();
        let p = find_path(&sq, &g, &[1, 1], &[2, 2]).unwrap();
        assert_eq!(p.first().unwrap(), &vec![1, 1]);
        assert_eq!(p.last().unwrap(), &vec![2, 2]);
        assert!(p.windows(2).all(|w| path_step(&g, &w[0], &w[1])));
        assert_eq!(find_path(&sq, &g, &[1, 2], &[1, 2]).unwrap().len(), 1);

        let maj = Relation::new(vec![set(&[0, 2])], [vec![0], vec![2]]).unwrap();
        assert_eq!(find_path(&maj, &g, &[0], &[2]), None);
    }

    #[test]
    fn strands_examples() {
        let r = Relation::product(vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let s = strands_of_relation(&r, &[set(&[1]), set(&[1, 2])]).unwrap();
        assert_eq!(s.blocks, vec![vec![0], vec![1]]);
        let s = strands_of_relation(&r, &[set(&[0, 1]), set(&[1, 2])]).unwrap();
        assert_eq!(s.blocks, vec![vec![0, 1]]);
        let diag = Relation::new(vec![ElemSet::full(3); 2], (0..3).map(|a| vec![a, a])).unwrap();
        let s = strands_of_relation(&diag, &[set(&[1, 2]), set(&[1, 2])]).unwrap();
        assert_eq!(s.blocks, vec![vec![0, 1]]);
        assert!(strands_of_relation(&r, &[set(&[2]), set(&[1])]).is_err());
    }

    #[test]
    fn linkedness() {
        let full = Relation::product(vec![ElemSet::full(2); 2]).unwrap();
        assert!(is_linked(&full).unwrap());
        let bij = Relation::new(vec![ElemSet::full(2); 2], [vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!is_linked(&bij).unwrap());
        let ord = Relation::new(vec![ElemSet::full(2); 2], [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(is_linked(&ord).unwrap());
        let unary = Relation::new(vec![ElemSet::full(2)], [vec![0]]).unwrap();
        assert!(is_linked(&unary).is_err());
    }

    #[test]
    fn rectangularity_example_passes() {
        let g = a3_graph();
        let r = Relation::product(vec![set(&[1]), set(&[1, 2])]).unwrap();
        let case = LawCase::Rectangularity { components: vec![set(&[1]), set(&[1, 2])] };
        assert_eq!(check_law(&g, &r, &case), LawOutcome::Pass);
    }

    #[test]
    fn rectangularity_detects_planted_violation() {
        let g = a3_graph();
        // not closed; membership differs on (0,1) and (1,0), so two strands
        let r = Relation::new(
            vec![ElemSet::full(3); 2],
            [vec![1, 1], vec![2, 2], vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let comps = vec![set(&[1, 2]), set(&[1, 2])];
        match check_law(&g, &r, &LawCase::Rectangularity { components: comps }) {
            LawOutcome::Fail(c) => assert!(c.tuples.contains(&vec![1, 2]) || c.tuples.contains(&vec![2, 1])),
            other => panic!("expected a failure, got {other:?}"),
        }
    }

    #[test]
    fn hypothesis_not_met_is_distinct() {
        let g = a3_graph();
        let r = Relation::product(vec![ElemSet::full(3)]).unwrap();
        let case = LawCase::Crt { components: vec![set(&[0])] };
        assert!(matches!(check_law(&g, &r, &case), LawOutcome::HypothesisNotMet(_)));
    }
}
