//! 3-minimality: tables of partial solutions on every set of at most three
//! variables, filtered against each other until they agree on overlaps.
//!
//! Tables are bitsets over value vectors. Pair `{i < j}` stores bit
//! `a*s + b` for `(i ↦ a, j ↦ b)`; triple `{i < j < k}` stores bit
//! `(a*s + b)*s + c`. Subsets are indexed in colexicographic order.

use std::collections::VecDeque;

use crate::model::{Constraint, Elem, ElemSet, Instance, Relation};

#[inline]
fn bit(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i >> 6] |= 1u64 << (i & 63);
}

fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

fn triple_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    k * (k - 1) * (k - 2) / 6 + j * (j - 1) / 2 + i
}

fn choose2(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

fn choose3(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Partial-solution tables for every variable set of size 1, 2 and 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityTables {
    n: usize,
    s: usize,
    unary: Vec<ElemSet>,
    pw: usize,
    pairs: Vec<u64>,
    tw: usize,
    triples: Vec<u64>,
}

impl MinimalityTables {
    fn full(n: usize, s: usize, domains: &[ElemSet]) -> Self {
        let pw = words_for(s * s);
        let tw = words_for(s * s * s);
        let mut t = MinimalityTables {
            n,
            s,
            unary: domains.to_vec(),
            pw,
            pairs: vec![0; choose2(n) * pw],
            tw,
            triples: vec![0; choose3(n) * tw],
        };
        for j in 0..n {
            for i in 0..j {
                let base = pair_index(i, j) * pw;
                for a in domains[i].iter() {
                    for b in domains[j].iter() {
                        set_bit(&mut t.pairs[base..base + pw], a as usize * s + b as usize);
                    }
                }
            }
        }
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let base = triple_index(i, j, k) * tw;
                    for a in domains[i].iter() {
                        for b in domains[j].iter() {
                            for c in domains[k].iter() {
                                let code = (a as usize * s + b as usize) * s + c as usize;
                                set_bit(&mut t.triples[base..base + tw], code);
                            }
                        }
                    }
                }
            }
        }
        t
    }

    /// Tables before any filtering: each set `W` holds the assignments
    /// whose restriction to every constraint scope agrees with the
    /// constraint's projection.
    pub fn initial(p: &Instance) -> Self {
        let s = p.algebra().size();
        let mut t = Self::full(p.num_vars(), s, p.domains());
        for c in p.constraints() {
            t.intersect_with_constraint(p, c);
        }
        t
    }

    fn intersect_with_constraint(&mut self, p: &Instance, c: &Constraint) {
        let vars = c.distinct_vars();
        let pos: Vec<usize> = vars.iter().map(|v| c.scope.iter().position(|w| w == v).unwrap()).collect();
        let rows: Vec<Vec<Elem>> = c
            .relation
            .tuples()
            .filter(|t| c.respects_repeats(t) && c.scope.iter().zip(t.iter()).all(|(&v, &a)| p.domain(v).contains(a)))
            .map(|t| pos.iter().map(|&i| t[i]).collect())
            .collect();
        self.intersect_rows(&vars, &rows);
    }

    /// Intersects every table over a subset of `vars` with the projection of `rows`.
    /// Returns true when some table shrank.
    fn intersect_rows(&mut self, vars: &[usize], rows: &[Vec<Elem>]) -> bool {
        let d = vars.len();
        let s = self.s;
        let mut changed = false;
        for x in 0..d {
            let proj: ElemSet = rows.iter().map(|r| r[x]).collect();
            let u = self.unary[vars[x]];
            if !u.is_subset(proj) {
                self.unary[vars[x]] = u.intersection(proj);
                changed = true;
            }
        }
        for x in 0..d {
            for y in x + 1..d {
                let (vx, vy, ox, oy) = order2(vars[x], vars[y], x, y);
                let mut proj = vec![0u64; self.pw];
                for r in rows {
                    set_bit(&mut proj, r[ox] as usize * s + r[oy] as usize);
                }
                let base = pair_index(vx, vy) * self.pw;
                changed |= and_into(&mut self.pairs[base..base + self.pw], &proj);
            }
        }
        for x in 0..d {
            for y in x + 1..d {
                for z in y + 1..d {
                    let mut o = [(vars[x], x), (vars[y], y), (vars[z], z)];
                    o.sort();
                    let mut proj = vec![0u64; self.tw];
                    for r in rows {
                        let code = (r[o[0].1] as usize * s + r[o[1].1] as usize) * s + r[o[2].1] as usize;
                        set_bit(&mut proj, code);
                    }
                    let base = triple_index(o[0].0, o[1].0, o[2].0) * self.tw;
                    changed |= and_into(&mut self.triples[base..base + self.tw], &proj);
                }
            }
        }
        changed
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn unary(&self, v: usize) -> ElemSet {
        self.unary[v]
    }

    fn pair_slice(&self, i: usize, j: usize) -> &[u64] {
        let base = pair_index(i, j) * self.pw;
        &self.pairs[base..base + self.pw]
    }

    fn triple_slice(&self, i: usize, j: usize, k: usize) -> &[u64] {
        let base = triple_index(i, j, k) * self.tw;
        &self.triples[base..base + self.tw]
    }

    /// Whether `(i ↦ a, j ↦ b)` is in the table for `{i, j}`.
    pub fn allows_pair(&self, i: usize, a: Elem, j: usize, b: Elem) -> bool {
        if i == j {
            return a == b && self.unary[i].contains(a);
        }
        let (i, a, j, b) = if i < j { (i, a, j, b) } else { (j, b, i, a) };
        bit(self.pair_slice(i, j), a as usize * self.s + b as usize)
    }

    /// Whether the assignment to three variables is in the table for their
    /// set. Repeated variables must carry equal values.
    pub fn allows_triple(&self, vals: [(usize, Elem); 3]) -> bool {
        let mut v = vals;
        v.sort();
        if v[0].0 == v[1].0 || v[1].0 == v[2].0 {
            let mut u = v.to_vec();
            u.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
            return match u.len() {
                1 => self.unary[u[0].0].contains(u[0].1),
                2 if u[0].0 != u[1].0 => self.allows_pair(u[0].0, u[0].1, u[1].0, u[1].1),
                _ => false,
            };
        }
        let s = self.s;
        let code = (v[0].1 as usize * s + v[1].1 as usize) * s + v[2].1 as usize;
        bit(self.triple_slice(v[0].0, v[1].0, v[2].0), code)
    }

    /// Whether an assignment to the listed variables is allowed by every
    /// table over a subset of at most three of them.
    pub fn allows(&self, vars: &[usize], vals: &[Elem]) -> bool {
        let d = vars.len();
        for x in 0..d {
            if !self.unary[vars[x]].contains(vals[x]) {
                return false;
            }
            for y in x + 1..d {
                if !self.allows_pair(vars[x], vals[x], vars[y], vals[y]) {
                    return false;
                }
                for z in y + 1..d {
                    if !self.allows_triple([(vars[x], vals[x]), (vars[y], vals[y]), (vars[z], vals[z])]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The table for the variable set `w` (distinct variables, at most
    /// three), with tuples ordered as `w` is.
    pub fn relation(&self, w: &[usize]) -> Relation {
        assert!(!w.is_empty() && w.len() <= 3, "tables exist for one to three variables");
        let sig: Vec<ElemSet> = w.iter().map(|&v| self.unary[v]).collect();
        let mut tuples = Vec::new();
        let mut cur = vec![0 as Elem; w.len()];
        fn rec(t: &MinimalityTables, w: &[usize], sig: &[ElemSet], cur: &mut Vec<Elem>, i: usize, out: &mut Vec<Vec<Elem>>) {
            if i == w.len() {
                if t.allows(w, cur) {
                    out.push(cur.clone());
                }
                return;
            }
            for a in sig[i].iter() {
                cur[i] = a;
                rec(t, w, sig, cur, i + 1, out);
            }
        }
        rec(self, w, &sig, &mut cur, 0, &mut tuples);
        // a stored triple table may be stricter than its pairs; `allows` reads it
        Relation::new(sig, tuples).expect("tuples lie in the unary tables")
    }

    /// True when every table of `self` is contained in the matching table of `other`.
    pub fn is_subset_of(&self, other: &MinimalityTables) -> bool {
        self.n == other.n
            && self.s == other.s
            && self.unary.iter().zip(&other.unary).all(|(a, b)| a.is_subset(*b))
            && self.pairs.iter().zip(&other.pairs).all(|(a, b)| a & !b == 0)
            && self.triples.iter().zip(&other.triples).all(|(a, b)| a & !b == 0)
    }

    fn any_empty(&self) -> bool {
        self.unary.iter().any(|u| u.is_empty())
            || self.pairs.chunks(self.pw.max(1)).any(|c| c.iter().all(|&w| w == 0)) && !self.pairs.is_empty()
            || self.triples.chunks(self.tw.max(1)).any(|c| c.iter().all(|&w| w == 0)) && !self.triples.is_empty()
    }

    /// True when no filtering step would change the tables.
    fn is_fixpoint(&self) -> bool {
        let mut probe = self.clone();
        let mut work = Worklist::new(self.n);
        for j in 0..self.n {
            for i in 0..j {
                if probe.revise_pair(i, j, &mut work).is_none() {
                    return false;
                }
                for k in 0..self.n {
                    if k != i && k != j && probe.revise_triple(i, j, k, &mut work).is_none() {
                        return false;
                    }
                }
            }
        }
        probe == *self
    }

    /// Filters pair `{i, j}` against its unary tables and shrinks the unary
    /// tables to its projections. Returns `None` on a wipe-out.
    fn revise_pair(&mut self, i: usize, j: usize, work: &mut Worklist) -> Option<()> {
        let s = self.s;
        let (ui, uj) = (self.unary[i], self.unary[j]);
        let base = pair_index(i, j) * self.pw;
        let mut pi = ElemSet::EMPTY;
        let mut pj = ElemSet::EMPTY;
        let mut keep = vec![0u64; self.pw];
        for_each_bit(&self.pairs[base..base + self.pw], |code| {
            let (a, b) = ((code / s) as Elem, (code % s) as Elem);
            if ui.contains(a) && uj.contains(b) {
                set_bit(&mut keep, code);
                pi.insert(a);
                pj.insert(b);
            }
        });
        self.pairs[base..base + self.pw].copy_from_slice(&keep);
        if pi.is_empty() {
            return None;
        }
        for (v, p) in [(i, pi), (j, pj)] {
            if p != self.unary[v] {
                self.unary[v] = p;
                work.unary_changed(v, self.n);
            }
        }
        Some(())
    }

    /// Filters the triple over `{i, j, k}` against its three pairs and
    /// shrinks the pairs to its projections.
    fn revise_triple(&mut self, i: usize, j: usize, k: usize, work: &mut Worklist) -> Option<()> {
        let mut o = [i, j, k];
        o.sort_unstable();
        let [x, y, z] = o;
        let s = self.s;
        let pw = self.pw;
        let (bxy, bxz, byz) = (pair_index(x, y) * pw, pair_index(x, z) * pw, pair_index(y, z) * pw);
        let tbase = triple_index(x, y, z) * self.tw;
        let mut keep = vec![0u64; self.tw];
        let mut pxy = vec![0u64; pw];
        let mut pxz = vec![0u64; pw];
        let mut pyz = vec![0u64; pw];
        {
            let pairs = &self.pairs;
            for_each_bit(&self.triples[tbase..tbase + self.tw], |code| {
                let c = code % s;
                let ab = code / s;
                let (a, b) = (ab / s, ab % s);
                let (ac, bc) = (a * s + c, b * s + c);
                if bit(&pairs[bxy..bxy + pw], ab) && bit(&pairs[bxz..bxz + pw], ac) && bit(&pairs[byz..byz + pw], bc) {
                    set_bit(&mut keep, code);
                    set_bit(&mut pxy, ab);
                    set_bit(&mut pxz, ac);
                    set_bit(&mut pyz, bc);
                }
            });
        }
        if keep.iter().all(|&w| w == 0) {
            return None;
        }
        self.triples[tbase..tbase + self.tw].copy_from_slice(&keep);
        for (base, proj, (a, b)) in [(bxy, &pxy, (x, y)), (bxz, &pxz, (x, z)), (byz, &pyz, (y, z))] {
            if and_into(&mut self.pairs[base..base + pw], proj) {
                work.push(pair_index(a, b));
            }
        }
        Some(())
    }
}

fn order2(a: usize, b: usize, oa: usize, ob: usize) -> (usize, usize, usize, usize) {
    if a < b {
        (a, b, oa, ob)
    } else {
        (b, a, ob, oa)
    }
}

/// `dst &= src`; true when `dst` changed.
fn and_into(dst: &mut [u64], src: &[u64]) -> bool {
    let mut changed = false;
    for (d, &s) in dst.iter_mut().zip(src) {
        let nd = *d & s;
        if nd != *d {
            *d = nd;
            changed = true;
        }
    }
    changed
}

struct Worklist {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    /// Inverse of the colex pair index.
    decode: Vec<(u32, u32)>,
}

impl Worklist {
    fn new(n: usize) -> Self {
        let mut decode = Vec::with_capacity(choose2(n));
        for j in 0..n {
            for i in 0..j {
                decode.push((i as u32, j as u32));
            }
        }
        Worklist { queue: VecDeque::new(), queued: vec![false; choose2(n)], decode }
    }

    fn push(&mut self, p: usize) {
        if !self.queued[p] {
            self.queued[p] = true;
            self.queue.push_back(p);
        }
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        let p = self.queue.pop_front()?;
        self.queued[p] = false;
        let (i, j) = self.decode[p];
        Some((i as usize, j as usize))
    }

    fn unary_changed(&mut self, v: usize, n: usize) {
        for w in 0..n {
            if w != v {
                self.push(pair_index(v.min(w), v.max(w)));
            }
        }
    }
}

/// A constraint over more than three distinct variables, kept as rows over
/// its distinct variables and pruned against the tables.
#[derive(Clone, Debug)]
struct WideConstraint {
    vars: Vec<usize>,
    rows: Vec<Vec<Elem>>,
}

/// Runs the filtering to a fixpoint and supports further incremental
/// assignments.
#[derive(Clone, Debug)]
pub struct Propagator {
    tables: MinimalityTables,
    wide: Vec<WideConstraint>,
}

impl Propagator {
    /// Builds the initial tables and filters them. `None` means some table
    /// emptied, so the instance has no solution.
    pub fn new(p: &Instance) -> Option<Self> {
        let tables = MinimalityTables::initial(p);
        let mut wide = Vec::new();
        for c in p.constraints() {
            let vars = c.distinct_vars();
            if vars.len() > 3 {
                let pos: Vec<usize> = vars.iter().map(|v| c.scope.iter().position(|w| w == v).unwrap()).collect();
                let rows = c
                    .relation
                    .tuples()
                    .filter(|t| c.respects_repeats(t))
                    .map(|t| pos.iter().map(|&i| t[i]).collect())
                    .collect();
                wide.push(WideConstraint { vars, rows });
            }
        }
        let mut prop = Propagator { tables, wide };
        let mut work = Worklist::new(prop.tables.n);
        for p in 0..choose2(prop.tables.n) {
            work.push(p);
        }
        if prop.tables.unary.iter().any(|u| u.is_empty()) || !prop.run(&mut work) {
            return None;
        }
        Some(prop)
    }

    pub fn tables(&self) -> &MinimalityTables {
        &self.tables
    }

    pub fn into_tables(self) -> MinimalityTables {
        self.tables
    }

    /// Restricts `v` to the value `a` and re-filters. Returns false when
    /// some table empties; the propagator is then unusable.
    pub fn assign(&mut self, v: usize, a: Elem) -> bool {
        self.restrict(v, ElemSet::singleton(a))
    }

    /// Intersects the unary table of `v` with `allowed` and re-filters.
    pub fn restrict(&mut self, v: usize, allowed: ElemSet) -> bool {
        let u = self.tables.unary[v];
        let nu = u.intersection(allowed);
        if nu.is_empty() {
            return false;
        }
        if nu == u {
            return true;
        }
        self.tables.unary[v] = nu;
        let mut work = Worklist::new(self.tables.n);
        work.unary_changed(v, self.tables.n);
        self.run(&mut work)
    }

    fn run(&mut self, work: &mut Worklist) -> bool {
        let n = self.tables.n;
        loop {
            while let Some((i, j)) = work.pop() {
                if self.tables.revise_pair(i, j, work).is_none() {
                    return false;
                }
                for k in 0..n {
                    if k != i && k != j && self.tables.revise_triple(i, j, k, work).is_none() {
                        return false;
                    }
                }
            }
            let mut changed = false;
            for wi in 0..self.wide.len() {
                let tables = &self.tables;
                let w = &mut self.wide[wi];
                w.rows.retain(|r| tables.allows(&w.vars, r));
                if w.rows.is_empty() {
                    return false;
                }
                let before: Vec<ElemSet> = w.vars.iter().map(|&v| self.tables.unary[v]).collect();
                let (vars, rows) = (w.vars.clone(), std::mem::take(&mut w.rows));
                if self.tables.intersect_rows(&vars, &rows) {
                    changed = true;
                    for (x, &v) in vars.iter().enumerate() {
                        if self.tables.unary[v] != before[x] {
                            work.unary_changed(v, n);
                        }
                    }
                    for x in 0..vars.len() {
                        for y in x + 1..vars.len() {
                            work.push(pair_index(vars[x].min(vars[y]), vars[x].max(vars[y])));
                        }
                    }
                }
                self.wide[wi].rows = rows;
            }
            if !changed {
                return !self.tables.any_empty();
            }
        }
    }

    /// Applies the tables to `p`: domains become the unary tables and every
    /// constraint keeps only the tuples the tables allow.
    pub fn prune(&self, p: &Instance) -> Option<Instance> {
        let domains: Vec<ElemSet> = self.tables.unary.clone();
        let restricted = p.restrict_domains(domains)?;
        let mut constraints = Vec::with_capacity(restricted.constraints().len());
        for c in restricted.constraints() {
            let vars = c.distinct_vars();
            let pos: Vec<usize> = vars.iter().map(|v| c.scope.iter().position(|w| w == v).unwrap()).collect();
            let mut vals = vec![0 as Elem; vars.len()];
            let kept: Vec<Vec<Elem>> = c
                .relation
                .tuples()
                .filter(|t| {
                    if !c.respects_repeats(t) {
                        return false;
                    }
                    for (slot, &i) in vals.iter_mut().zip(&pos) {
                        *slot = t[i];
                    }
                    self.tables.allows(&vars, &vals)
                })
                .cloned()
                .collect();
            if kept.is_empty() {
                return None;
            }
            let rel = if kept.len() == c.relation.len() {
                (*c.relation).clone()
            } else {
                Relation::new(c.relation.signature().to_vec(), kept).expect("subset of a valid relation")
            };
            constraints.push(Constraint::new(c.scope.clone(), rel));
        }
        Some(restricted.with_constraints(constraints))
    }
}

/// Filters `p` to 3-minimality. Returns the pruned instance and its
/// tables, or `None` when the instance has no solution.
///
/// The constraints on every set of at most three variables are carried by
/// the tables rather than added to the instance as explicit constraints.
pub fn establish_3_minimality(p: &Instance) -> Option<(Instance, MinimalityTables)> {
    let prop = Propagator::new(p)?;
    let pruned = prop.prune(p)?;
    Some((pruned, prop.into_tables()))
}

/// True when `t` is a fixpoint of the filtering, is contained in the
/// partial-solution tables of `p`, has `p`'s domains as its unary tables,
/// and every constraint tuple of `p` is allowed by `t`.
pub fn is_3_minimal(p: &Instance, t: &MinimalityTables) -> bool {
    if t.n != p.num_vars() || t.s != p.algebra().size() {
        return false;
    }
    if (0..t.n).any(|v| t.unary[v] != p.domain(v)) || t.any_empty() {
        return false;
    }
    if !t.is_subset_of(&MinimalityTables::initial(p)) || !t.is_fixpoint() {
        return false;
    }
    p.constraints().iter().all(|c| {
        let vars = c.distinct_vars();
        let pos: Vec<usize> = vars.iter().map(|v| c.scope.iter().position(|w| w == v).unwrap()).collect();
        c.relation.tuples().all(|tu| {
            let vals: Vec<Elem> = pos.iter().map(|&i| tu[i]).collect();
            c.respects_repeats(tu) && t.allows(&vars, &vals)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Algebra;
    use std::sync::Arc;

    fn boolean_majority() -> Arc<Algebra> {
        Arc::new(
            Algebra::from_fns(
                2,
                |a, _| a,
                |_, b| b,
                |x, y, z| if x == y || x == z { x } else { y },
                |x, _, _| x,
            )
            .unwrap(),
        )
    }

    fn binary(n: usize, edges: &[(usize, usize)], tuples: &[[Elem; 2]], alg: &Arc<Algebra>) -> Instance {
        let rel = Relation::over_universe(2, 2, tuples.iter().map(|t| t.to_vec())).unwrap();
        let cs = edges.iter().map(|&(a, b)| Constraint::new(vec![a, b], rel.clone())).collect();
        Instance::with_default_names(alg.clone(), vec![ElemSet::full(2); n], cs)
    }

    #[test]
    fn indices_are_dense() {
        let n = 6;
        let mut seen = vec![false; choose3(n)];
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    seen[triple_index(i, j, k)] = true;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn no_constraints_gives_full_tables() {
        let alg = boolean_majority();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2); 3], vec![]);
        let (q, t) = establish_3_minimality(&p).unwrap();
        assert_eq!(t.relation(&[0, 1, 2]).len(), 8);
        assert!(is_3_minimal(&q, &t));
    }

    #[test]
    fn equalities_collapse_triple() {
        let alg = boolean_majority();
        let p = binary(3, &[(0, 1), (1, 2), (0, 2)], &[[0, 0], [1, 1]], &alg);
        let (_, t) = establish_3_minimality(&p).unwrap();
        let r = t.relation(&[0, 1, 2]);
        assert_eq!(r.tuples().cloned().collect::<Vec<_>>(), vec![vec![0, 0, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn inequality_triangle_is_unsat() {
        let alg = boolean_majority();
        let p = binary(3, &[(0, 1), (1, 2), (0, 2)], &[[0, 1], [1, 0]], &alg);
        assert!(establish_3_minimality(&p).is_none());
    }

    #[test]
    fn unpruned_instance_is_not_minimal() {
        let alg = boolean_majority();
        let p = binary(3, &[(0, 1), (1, 2)], &[[0, 1], [1, 0]], &alg);
        let t = MinimalityTables::initial(&p);
        // x0 != x1, x1 != x2 forces x0 == x2, which the initial tables miss
        assert!(!is_3_minimal(&p, &t));
        let (q, t2) = establish_3_minimality(&p).unwrap();
        assert!(is_3_minimal(&q, &t2));
        assert!(!t2.allows_pair(0, 0, 2, 1));
        // the original instance still carries nothing contradicting the tables
        assert!(is_3_minimal(&p, &t2));
    }

    #[test]
    fn repeated_scope_variables() {
        let alg = boolean_majority();
        let rel = Relation::over_universe(2, 2, [vec![0, 1], vec![1, 1]]).unwrap();
        let p = Instance::with_default_names(alg, vec![ElemSet::full(2)], vec![Constraint::new(vec![0, 0], rel)]);
        let (q, t) = establish_3_minimality(&p).unwrap();
        assert_eq!(t.unary(0), ElemSet::singleton(1));
        assert_eq!(q.constraints()[0].relation.len(), 1);
    }

    #[test]
    fn assignment_propagates() {
        let alg = boolean_majority();
        let p = binary(4, &[(0, 1), (1, 2), (2, 3)], &[[0, 1], [1, 0]], &alg);
        let mut prop = Propagator::new(&p).unwrap();
        assert!(prop.assign(0, 1));
        let t = prop.tables();
        assert_eq!(
            (0..4).map(|v| t.unary(v).first().unwrap()).collect::<Vec<_>>(),
            vec![1, 0, 1, 0]
        );
        assert!(!prop.clone().assign(2, 0));
    }

    #[test]
    fn wide_constraints_filter_tables() {
        let alg = boolean_majority();
        // four variables, exactly one is 1
        let rel = Relation::over_universe(
            4,
            2,
            [vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        )
        .unwrap();
        let fix = Relation::over_universe(1, 2, [vec![1]]).unwrap();
        let p = Instance::with_default_names(
            alg,
            vec![ElemSet::full(2); 4],
            vec![Constraint::new(vec![0, 1, 2, 3], rel), Constraint::new(vec![2], fix)],
        );
        let (q, t) = establish_3_minimality(&p).unwrap();
        assert_eq!(t.unary(0), ElemSet::singleton(0));
        assert_eq!(q.constraints()[0].relation.len(), 1);
        assert!(is_3_minimal(&q, &t));
    }
}
