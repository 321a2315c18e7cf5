//! Backtracking search over operation-table entries.
//!
//! Each unknown table entry is a search variable with a small domain. Each
//! polymorphism condition "the componentwise image of these tuples lies in
//! R" becomes a table constraint over the entries it reads. Propagation is
//! generalized arc consistency; branching picks the smallest domain first.

use std::collections::{HashSet, VecDeque};

use crate::model::{Elem, ElemSet, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Cell {
    Fixed(Elem),
    Var(u32),
}

struct LocalConstraint {
    vars: Vec<u32>,
    /// Allowed value vectors over `vars`, flattened.
    rows: Vec<Elem>,
}

impl LocalConstraint {
    fn row_count(&self) -> usize {
        self.rows.len() / self.vars.len()
    }
}

pub(crate) struct TableSearch {
    domains: Vec<ElemSet>,
    prefs: Vec<Vec<Elem>>,
    constraints: Vec<LocalConstraint>,
    watchers: Vec<Vec<u32>>,
    seen: HashSet<(Vec<u32>, Vec<Elem>)>,
    infeasible: bool,
}

impl TableSearch {
    pub(crate) fn new() -> Self {
        TableSearch {
            domains: Vec::new(),
            prefs: Vec::new(),
            constraints: Vec::new(),
            watchers: Vec::new(),
            seen: HashSet::new(),
            infeasible: false,
        }
    }

    /// Adds a variable; `prefs` lists its values in the order they are tried.
    pub(crate) fn add_var(&mut self, prefs: Vec<Elem>) -> u32 {
        let id = self.domains.len() as u32;
        self.domains.push(prefs.iter().copied().collect());
        self.prefs.push(prefs);
        self.watchers.push(Vec::new());
        id
    }

    /// Requires the values read through `cells` to form a tuple of `rel`.
    pub(crate) fn require(&mut self, cells: &[Cell], rel: &Relation) {
        if self.infeasible {
            return;
        }
        let mut vars: Vec<u32> = Vec::new();
        let mut slot: Vec<Option<usize>> = Vec::with_capacity(cells.len());
        for c in cells {
            match *c {
                Cell::Fixed(_) => slot.push(None),
                Cell::Var(v) => {
                    let k = match vars.iter().position(|&w| w == v) {
                        Some(k) => k,
                        None => {
                            vars.push(v);
                            vars.len() - 1
                        }
                    };
                    slot.push(Some(k));
                }
            }
        }
        let mut rows: Vec<Vec<Elem>> = Vec::new();
        let mut local = vec![0 as Elem; vars.len()];
        'tuples: for t in rel.tuples() {
            let mut set = vec![false; vars.len()];
            for (i, c) in cells.iter().enumerate() {
                match (*c, slot[i]) {
                    (Cell::Fixed(e), _) => {
                        if t[i] != e {
                            continue 'tuples;
                        }
                    }
                    (Cell::Var(v), Some(k)) => {
                        if !self.domains[v as usize].contains(t[i]) {
                            continue 'tuples;
                        }
                        if set[k] {
                            if local[k] != t[i] {
                                continue 'tuples;
                            }
                        } else {
                            set[k] = true;
                            local[k] = t[i];
                        }
                    }
                    _ => unreachable!(),
                }
            }
            rows.push(local.clone());
        }
        if rows.is_empty() {
            self.infeasible = true;
            return;
        }
        if vars.is_empty() {
            return;
        }
        rows.sort();
        rows.dedup();
        if vars.len() == 1 {
            let allowed: ElemSet = rows.iter().map(|r| r[0]).collect();
            let d = &mut self.domains[vars[0] as usize];
            *d = d.intersection(allowed);
            if d.is_empty() {
                self.infeasible = true;
            }
            return;
        }
        let flat: Vec<Elem> = rows.concat();
        if !self.seen.insert((vars.clone(), flat.clone())) {
            return;
        }
        let id = self.constraints.len() as u32;
        for &v in &vars {
            self.watchers[v as usize].push(id);
        }
        self.constraints.push(LocalConstraint { vars, rows: flat });
    }

    /// Finds the first solution in preference order, or `None`.
    pub(crate) fn solve(mut self) -> Option<Vec<Elem>> {
        if self.infeasible {
            return None;
        }
        let mut domains = self.domains.clone();
        let all: Vec<u32> = (0..self.constraints.len() as u32).collect();
        if !self.propagate(&mut domains, all) {
            return None;
        }
        if self.dfs(&mut domains) {
            Some(domains.iter().map(|d| d.first().expect("nonempty domain")).collect())
        } else {
            None
        }
    }

    fn dfs(&mut self, domains: &mut Vec<ElemSet>) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for (v, d) in domains.iter().enumerate() {
            let n = d.len();
            if n > 1 && best.is_none_or(|(_, bn)| n < bn) {
                best = Some((v, n));
                if n == 2 {
                    break;
                }
            }
        }
        let Some((v, _)) = best else {
            return true;
        };
        let prefs = self.prefs[v].clone();
        for a in prefs {
            if !domains[v].contains(a) {
                continue;
            }
            let saved = domains.clone();
            domains[v] = ElemSet::singleton(a);
            let queue = self.watchers[v].clone();
            if self.propagate(domains, queue) && self.dfs(domains) {
                return true;
            }
            *domains = saved;
        }
        false
    }

    fn propagate(&self, domains: &mut [ElemSet], initial: Vec<u32>) -> bool {
        let mut queued = vec![false; self.constraints.len()];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for c in initial {
            if !queued[c as usize] {
                queued[c as usize] = true;
                queue.push_back(c);
            }
        }
        while let Some(ci) = queue.pop_front() {
            queued[ci as usize] = false;
            let c = &self.constraints[ci as usize];
            let k = c.vars.len();
            let mut support = vec![ElemSet::EMPTY; k];
            for r in 0..c.row_count() {
                let row = &c.rows[r * k..(r + 1) * k];
                if row.iter().zip(&c.vars).all(|(&a, &v)| domains[v as usize].contains(a)) {
                    for (s, &a) in support.iter_mut().zip(row) {
                        s.insert(a);
                    }
                }
            }
            for (s, &v) in support.iter().zip(&c.vars) {
                let d = domains[v as usize];
                let nd = d.intersection(*s);
                if nd != d {
                    if nd.is_empty() {
                        return false;
                    }
                    domains[v as usize] = nd;
                    for &w in &self.watchers[v as usize] {
                        if w != ci && !queued[w as usize] {
                            queued[w as usize] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        true
    }
}

/// Collects the distinct cell vectors of a family of polymorphism
/// conditions before they are turned into constraints.
#[derive(Default)]
pub(crate) struct CellDedup {
    seen: HashSet<Vec<Cell>>,
}

impl CellDedup {
    pub(crate) fn fresh(&mut self, cells: &[Cell]) -> bool {
        !self.seen.contains(cells) && self.seen.insert(cells.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_preferred_solution() {
        let mut s = TableSearch::new();
        let x = s.add_var(vec![0, 1]);
        let y = s.add_var(vec![0, 1]);
        // x != y
        let ne = Relation::over_universe(2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
        s.require(&[Cell::Var(x), Cell::Var(y)], &ne);
        assert_eq!(s.solve(), Some(vec![0, 1]));
    }

    #[test]
    fn detects_unsat_triangle() {
        let mut s = TableSearch::new();
        let v: Vec<u32> = (0..3).map(|_| s.add_var(vec![0, 1])).collect();
        let ne = Relation::over_universe(2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            s.require(&[Cell::Var(v[a]), Cell::Var(v[b])], &ne);
        }
        assert_eq!(s.solve(), None);
    }

    #[test]
    fn repeated_var_and_fixed_cells() {
        let mut s = TableSearch::new();
        let x = s.add_var(vec![1, 0]);
        let r = Relation::over_universe(3, 2, [vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        s.require(&[Cell::Var(x), Cell::Fixed(0), Cell::Var(x)], &r);
        assert_eq!(s.solve(), None);

        let mut s = TableSearch::new();
        let x = s.add_var(vec![1, 0]);
        let r = Relation::over_universe(3, 2, [vec![0, 0, 0], vec![1, 0, 0]]).unwrap();
        s.require(&[Cell::Var(x), Cell::Fixed(0), Cell::Var(x)], &r);
        assert_eq!(s.solve(), Some(vec![0]));
    }

    #[test]
    fn backtracks_over_pigeonhole() {
        // 4 pigeons, 3 holes
        let mut s = TableSearch::new();
        let v: Vec<u32> = (0..4).map(|_| s.add_var(vec![0, 1, 2])).collect();
        let ne = Relation::over_universe(
            2,
            3,
            [vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 2], vec![2, 0], vec![2, 1]],
        )
        .unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                s.require(&[Cell::Var(v[i]), Cell::Var(v[j])], &ne);
            }
        }
        assert_eq!(s.solve(), None);
    }
}
