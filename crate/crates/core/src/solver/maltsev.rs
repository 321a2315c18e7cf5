//! Solving instances whose derived operation is Maltsev on every domain.
//!
//! The general method keeps a compact representation of the solution set
//! of the constraints processed so far: for every position `i` and pair of
//! values `(a, b)` that occur at `i` after a common prefix, two witness
//! tuples with that prefix. When every domain has at most two elements the
//! operation is `x ⊕ y ⊕ z` on each domain, relations are affine subspaces
//! and Gaussian elimination over GF(2) decides the instance directly.

use std::collections::HashMap;

use crate::analysis::TernaryTable;
use crate::error::{internal, Result};
use crate::model::{Assignment, Elem, ElemSet, Instance, SolveResult, Tuple};

/// A constraint over distinct local variables with its allowed rows.
#[derive(Clone, Debug)]
struct Local {
    vars: Vec<usize>,
    rows: Vec<Tuple>,
}

/// Decides `p` assuming `m` is a Maltsev operation on each domain and
/// preserves every relation.
pub fn solve_maltsev(p: &Instance, m: &TernaryTable) -> Result<SolveResult> {
    let n = p.num_vars();
    if p.domains().iter().any(|d| d.is_empty()) {
        return Ok(SolveResult::Unsat);
    }
    let mut fixed: Vec<Option<Elem>> = p.domains().iter().map(|d| if d.len() == 1 { d.first() } else { None }).collect();
    let free: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut local_of = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        local_of[v] = k;
    }
    // substitute fixed variables and drop repeated positions
    let mut cons: Vec<Local> = Vec::new();
    for c in p.constraints() {
        let vars = c.distinct_vars();
        let first: Vec<usize> = vars.iter().map(|v| c.scope.iter().position(|w| w == v).unwrap()).collect();
        let keep: Vec<usize> = (0..vars.len()).filter(|&k| fixed[vars[k]].is_none()).collect();
        let mut rows: Vec<Tuple> = c
            .relation
            .tuples()
            .filter(|t| c.respects_repeats(t))
            .filter(|t| (0..vars.len()).all(|k| fixed[vars[k]].is_none_or(|x| t[first[k]] == x)))
            .filter(|t| (0..vars.len()).all(|k| p.domain(vars[k]).contains(t[first[k]])))
            .map(|t| keep.iter().map(|&k| t[first[k]]).collect())
            .collect();
        if rows.is_empty() {
            return Ok(SolveResult::Unsat);
        }
        if keep.is_empty() {
            continue;
        }
        rows.sort();
        rows.dedup();
        cons.push(Local { vars: keep.iter().map(|&k| local_of[vars[k]]).collect(), rows });
    }
    let domains: Vec<ElemSet> = free.iter().map(|&v| p.domain(v)).collect();
    let components = components(free.len(), &cons);
    for (vars, cidx) in components {
        let mut pos = vec![usize::MAX; free.len()];
        for (k, &v) in vars.iter().enumerate() {
            pos[v] = k;
        }
        let sub: Vec<Local> = cidx
            .iter()
            .map(|&ci| Local { vars: cons[ci].vars.iter().map(|&v| pos[v]).collect(), rows: cons[ci].rows.clone() })
            .collect();
        let doms: Vec<ElemSet> = vars.iter().map(|&v| domains[v]).collect();
        let sol = if doms.iter().all(|d| d.len() <= 2) {
            solve_boolean(&doms, &sub)?
        } else {
            solve_compact(&doms, &sub, m)?
        };
        let Some(sol) = sol else {
            return Ok(SolveResult::Unsat);
        };
        for (k, &v) in vars.iter().enumerate() {
            fixed[free[v]] = Some(sol[k]);
        }
    }
    let a = Assignment(fixed.into_iter().map(|x| x.expect("every variable assigned")).collect());
    if !p.is_satisfied_by(&a) {
        return Err(internal("Maltsev solver produced an assignment that violates the instance"));
    }
    Ok(SolveResult::Sat(a))
}

/// Connected components of the constraint graph: variables and the
/// constraints touching them.
fn components(n: usize, cons: &[Local]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for c in cons {
        for w in c.vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if comp_of[r] == usize::MAX {
            comp_of[r] = out.len();
            out.push((Vec::new(), Vec::new()));
        }
        out[comp_of[r]].0.push(v);
    }
    for (ci, c) in cons.iter().enumerate() {
        let r = find(&mut parent, c.vars[0]);
        out[comp_of[r]].1.push(ci);
    }
    out
}

/// Rows of a GF(2) linear system as bitsets, with the constant in `rhs`.
struct Gf2 {
    words: usize,
    rows: Vec<(Vec<u64>, bool)>,
}

impl Gf2 {
    fn push(&mut self, coeffs: &[usize], rhs: bool) {
        let mut row = vec![0u64; self.words];
        for &v in coeffs {
            row[v / 64] ^= 1 << (v % 64);
        }
        self.rows.push((row, rhs));
    }

    /// Gaussian elimination; free variables are set to 0.
    fn solve(mut self, n: usize) -> Option<Vec<bool>> {
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(k) = (r..self.rows.len()).find(|&k| self.rows[k].0[w] & b != 0) else {
                continue;
            };
            self.rows.swap(r, k);
            let (pivot, prhs) = self.rows[r].clone();
            for k in 0..self.rows.len() {
                if k != r && self.rows[k].0[w] & b != 0 {
                    let row = &mut self.rows[k];
                    for (x, y) in row.0.iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                    row.1 ^= prhs;
                }
            }
            pivots.push((r, col));
            r += 1;
        }
        if self.rows[r..].iter().any(|(_, rhs)| *rhs) {
            return None;
        }
        let mut x = vec![false; n];
        for &(row, col) in &pivots {
            x[col] = self.rows[row].1;
        }
        Some(x)
    }
}

/// Each variable is a bit (0 for the smaller domain element); each relation
/// must be an affine subspace and contributes the equations defining it.
fn solve_boolean(domains: &[ElemSet], cons: &[Local]) -> Result<Option<Vec<Elem>>> {
    let n = domains.len();
    let lo: Vec<Elem> = domains.iter().map(|d| d.first().unwrap()).collect();
    let mut sys = Gf2 { words: n.div_ceil(64).max(1), rows: Vec::new() };
    for c in cons {
        let k = c.vars.len();
        let bits: Vec<Vec<bool>> = c.rows.iter().map(|r| r.iter().zip(&c.vars).map(|(&a, &v)| a != lo[v]).collect()).collect();
        let base = &bits[0];
        // basis of the directions t ⊕ base, reduced
        let mut basis: Vec<Vec<bool>> = Vec::new();
        for t in &bits[1..] {
            let mut d: Vec<bool> = t.iter().zip(base).map(|(x, y)| x ^ y).collect();
            for b in &basis {
                let lead = b.iter().position(|&x| x).unwrap();
                if d[lead] {
                    for (x, y) in d.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
            }
            if let Some(lead) = d.iter().position(|&x| x) {
                for b in basis.iter_mut() {
                    if b[lead] {
                        for (x, y) in b.iter_mut().zip(&d) {
                            *x ^= y;
                        }
                    }
                }
                basis.push(d);
            }
        }
        if bits.len() != 1usize << basis.len() {
            return Err(internal("relation on two-element domains is not an affine subspace"));
        }
        // equations e · x = e · base for every e orthogonal to the basis
        for e in 1u32..(1 << k) {
            let ev: Vec<bool> = (0..k).map(|i| e >> i & 1 == 1).collect();
            let orth = basis.iter().all(|b| b.iter().zip(&ev).filter(|(x, y)| **x && **y).count() % 2 == 0);
            if orth {
                let rhs = base.iter().zip(&ev).filter(|(x, y)| **x && **y).count() % 2 == 1;
                let coeffs: Vec<usize> = (0..k).filter(|&i| ev[i]).map(|i| c.vars[i]).collect();
                sys.push(&coeffs, rhs);
            }
        }
    }
    Ok(sys.solve(n).map(|x| {
        x.iter()
            .enumerate()
            .map(|(v, &bit)| if bit { domains[v].iter().nth(1).unwrap() } else { lo[v] })
            .collect()
    }))
}

/// A compact representation: for each `(i, a, b)` optionally two witness
/// tuples that agree before `i` and carry `a` and `b` at `i`.
#[derive(Clone)]
struct Rep {
    n: usize,
    s: usize,
    tuples: Vec<Tuple>,
    index: HashMap<Tuple, u32>,
    wit: Vec<Option<(u32, u32)>>,
}

impl Rep {
    fn new(n: usize, s: usize) -> Self {
        Rep { n, s, tuples: Vec::new(), index: HashMap::new(), wit: vec![None; n * s * s] }
    }

    fn intern(&mut self, t: Tuple) -> u32 {
        if let Some(&i) = self.index.get(&t) {
            return i;
        }
        let i = self.tuples.len() as u32;
        self.index.insert(t.clone(), i);
        self.tuples.push(t);
        i
    }

    fn slot(&self, i: usize, a: Elem, b: Elem) -> usize {
        (i * self.s + a as usize) * self.s + b as usize
    }

    fn add(&mut self, i: usize, a: Elem, b: Elem, t1: Tuple, t2: Tuple) {
        let k = self.slot(i, a, b);
        if self.wit[k].is_none() {
            let x = self.intern(t1);
            let y = self.intern(t2);
            self.wit[k] = Some((x, y));
        }
    }

    fn witness(&self, i: usize, a: Elem, b: Elem) -> Option<(&Tuple, &Tuple)> {
        self.wit[self.slot(i, a, b)].map(|(x, y)| (&self.tuples[x as usize], &self.tuples[y as usize]))
    }

    /// Values `a` with an entry `(i, a, a)`.
    fn values_at(&self, i: usize) -> Vec<Elem> {
        (0..self.s as Elem).filter(|&a| self.wit[self.slot(i, a, a)].is_some()).collect()
    }

    fn product(domains: &[ElemSet], s: usize) -> Self {
        let n = domains.len();
        let base: Tuple = domains.iter().map(|d| d.first().unwrap()).collect();
        let mut r = Rep::new(n, s);
        for i in 0..n {
            for a in domains[i].iter() {
                for b in domains[i].iter() {
                    let mut t1 = base.clone();
                    t1[i] = a;
                    let mut t2 = base.clone();
                    t2[i] = b;
                    r.add(i, a, b, t1, t2);
                }
            }
        }
        r
    }
}

fn mal(m: &TernaryTable, x: &[Elem], y: &[Elem], z: &[Elem]) -> Tuple {
    x.iter().zip(y).zip(z).map(|((&a, &b), &c)| m.apply(a, b, c)).collect()
}

fn code(proj: &[Elem], s: usize) -> u32 {
    proj.iter().fold(0u32, |acc, &a| acc * s as u32 + a as u32)
}

/// A tuple of the closure of `tuples` under `m` whose projection onto `pos`
/// satisfies `accept`, found by closing the projections.
fn nonempty(tuples: &[Tuple], pos: &[usize], s: usize, m: &TernaryTable, accept: &dyn Fn(&[Elem]) -> bool) -> Option<Tuple> {
    let mut seen: HashMap<u32, usize> = HashMap::new();
    let mut list: Vec<(Vec<Elem>, Tuple)> = Vec::new();
    for t in tuples {
        let proj: Vec<Elem> = pos.iter().map(|&i| t[i]).collect();
        let c = code(&proj, s);
        if seen.contains_key(&c) {
            continue;
        }
        if accept(&proj) {
            return Some(t.clone());
        }
        seen.insert(c, list.len());
        list.push((proj, t.clone()));
    }
    let mut start = 0;
    loop {
        let end = list.len();
        if start == end {
            return None;
        }
        for x in 0..end {
            for y in 0..end {
                for z in 0..end {
                    if x < start && y < start && z < start {
                        continue;
                    }
                    let proj: Vec<Elem> = (0..pos.len())
                        .map(|k| m.apply(list[x].0[k], list[y].0[k], list[z].0[k]))
                        .collect();
                    let c = code(&proj, s);
                    if seen.contains_key(&c) {
                        continue;
                    }
                    let full = mal(m, &list[x].1, &list[y].1, &list[z].1);
                    if accept(&proj) {
                        return Some(full);
                    }
                    seen.insert(c, list.len());
                    list.push((proj, full));
                }
            }
        }
        start = end;
    }
}

/// Closure of the projection onto `(j, i)`, keyed by value pair.
fn pair_closure(tuples: &[Tuple], j: usize, i: usize, m: &TernaryTable) -> HashMap<(Elem, Elem), Tuple> {
    let mut out: HashMap<(Elem, Elem), Tuple> = HashMap::new();
    let mut list: Vec<(Elem, Elem)> = Vec::new();
    for t in tuples {
        let k = (t[j], t[i]);
        if let std::collections::hash_map::Entry::Vacant(e) = out.entry(k) {
            e.insert(t.clone());
            list.push(k);
        }
    }
    let mut start = 0;
    while start < list.len() {
        let end = list.len();
        for x in 0..end {
            for y in 0..end {
                for z in 0..end {
                    if x < start && y < start && z < start {
                        continue;
                    }
                    let (a, b, c) = (list[x], list[y], list[z]);
                    let k = (m.apply(a.0, b.0, c.0), m.apply(a.1, b.1, c.1));
                    if !out.contains_key(&k) {
                        let full = mal(m, &out[&a], &out[&b], &out[&c]);
                        out.insert(k, full);
                        list.push(k);
                    }
                }
            }
        }
        start = end;
    }
    out
}

/// Representation of the tuples of the relation with the given prefix.
fn fix_values(rep: &Rep, prefix: &[Elem], m: &TernaryTable) -> Option<Rep> {
    let (n, s) = (rep.n, rep.s);
    let mut u = rep.clone();
    for (j, &c) in prefix.iter().enumerate() {
        let t0 = u.tuples.iter().find(|t| t[j] == c)?.clone();
        let mut v = Rep::new(n, s);
        v.add(j, c, c, t0.clone(), t0);
        for i in j + 1..n {
            let entries: Vec<(Elem, Elem)> = (0..s as Elem)
                .flat_map(|a| (0..s as Elem).map(move |b| (a, b)))
                .filter(|&(a, b)| u.witness(i, a, b).is_some())
                .collect();
            if entries.is_empty() {
                continue;
            }
            let clos = pair_closure(&u.tuples, j, i, m);
            for (a, b) in entries {
                if let Some(t2) = clos.get(&(c, a)) {
                    let (w1, w2) = u.witness(i, a, b).unwrap();
                    let t3 = mal(m, t2, w1, w2);
                    v.add(i, a, b, t2.clone(), t3);
                }
            }
        }
        u = v;
    }
    Some(u)
}

/// Representation of the intersection of `rep` with the constraint.
fn next(rep: &Rep, c: &Local, m: &TernaryTable) -> Option<Rep> {
    let (n, s) = (rep.n, rep.s);
    let rows: std::collections::HashSet<&[Elem]> = c.rows.iter().map(|r| r.as_slice()).collect();
    let max_scope = *c.vars.iter().max().unwrap();
    let mut out = Rep::new(n, s);
    for i in 0..n {
        let mut pos = c.vars.clone();
        let at = match pos.iter().position(|&x| x == i) {
            Some(k) => k,
            None => {
                pos.push(i);
                pos.len() - 1
            }
        };
        let k = c.vars.len();
        let mut done = ElemSet::EMPTY;
        for a in rep.values_at(i) {
            if done.contains(a) {
                continue;
            }
            let want_a = |proj: &[Elem]| proj[at] == a && rows.contains(&proj[..k]);
            let Some(t1) = nonempty(&rep.tuples, &pos, s, m, &want_a) else {
                continue;
            };
            let cands: Vec<Elem> = (0..s as Elem).filter(|&b| rep.witness(i, a, b).is_some()).collect();
            if i > max_scope {
                for &b in &cands {
                    let (w1, w2) = rep.witness(i, a, b).unwrap();
                    let t2 = mal(m, &t1, w1, w2);
                    out.add(i, a, b, t1.clone(), t2);
                }
                continue;
            }
            let fixed = fix_values(rep, &t1[..i], m)?;
            let mut block: Vec<(Elem, Tuple)> = Vec::new();
            for &b in &cands {
                let want_b = |proj: &[Elem]| proj[at] == b && rows.contains(&proj[..k]);
                if let Some(u) = nonempty(&fixed.tuples, &pos, s, m, &want_b) {
                    block.push((b, u));
                }
            }
            for (x, ux) in &block {
                done.insert(*x);
                for (y, uy) in &block {
                    out.add(i, *x, *y, ux.clone(), uy.clone());
                }
            }
        }
        if out.values_at(i).is_empty() {
            return None;
        }
    }
    Some(out)
}

fn solve_compact(domains: &[ElemSet], cons: &[Local], m: &TernaryTable) -> Result<Option<Vec<Elem>>> {
    let s = m.size();
    let mut rep = Rep::product(domains, s);
    for c in cons {
        match next(&rep, c, m) {
            Some(r) => rep = r,
            None => return Ok(None),
        }
    }
    Ok(rep.tuples.first().cloned())
}
