//! Exhaustive reference solver.

use crate::error::{Error, Result};
use crate::model::{Assignment, Elem, Instance, SolveResult};

/// Enumeration budget used when `CCSP_BUDGET` is unset.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// The budget from `CCSP_BUDGET`, or [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u128 {
    std::env::var("CCSP_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Number of assignments in the search space, saturating.
pub fn search_space(p: &Instance) -> u128 {
    p.domains().iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
}

/// Decides `p` by enumerating assignments in lexicographic order, checking
/// each constraint once its last variable is set. Refuses when the search
/// space exceeds `budget`.
pub fn brute_force_solve(p: &Instance, budget: u128) -> Result<SolveResult> {
    let needed = search_space(p);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = p.num_vars();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut scopeless = Vec::new();
    for (ci, c) in p.constraints().iter().enumerate() {
        match c.scope.iter().max() {
            Some(&v) => due[v].push(ci),
            None => scopeless.push(ci),
        }
    }
    if scopeless.iter().any(|&ci| !p.constraints()[ci].relation.contains(&[])) {
        return Ok(SolveResult::Unsat);
    }
    let values: Vec<Vec<Elem>> = p.domains().iter().map(|d| d.iter().collect()).collect();
    if values.iter().any(|v| v.is_empty()) {
        return Ok(SolveResult::Unsat);
    }
    let mut choice = vec![0usize; n];
    let mut a = vec![0 as Elem; n];
    let mut buf = Vec::new();
    let mut v = 0usize;
    // iterative depth-first enumeration
    loop {
        if v == n {
            let sol = Assignment(a.clone());
            debug_assert!(p.is_satisfied_by(&sol));
            return Ok(SolveResult::Sat(sol));
        }
        if choice[v] < values[v].len() {
            a[v] = values[v][choice[v]];
            choice[v] += 1;
            let ok = due[v].iter().all(|&ci| {
                let c = &p.constraints()[ci];
                buf.clear();
                buf.extend(c.scope.iter().map(|&x| a[x]));
                c.relation.contains(&buf)
            });
            if ok {
                v += 1;
            }
        } else {
            choice[v] = 0;
            if v == 0 {
                return Ok(SolveResult::Unsat);
            }
            v -= 1;
        }
    }
}

/// Every solution of `p`, in lexicographic order.
pub fn all_solutions(p: &Instance, budget: u128) -> Result<Vec<Assignment>> {
    let needed = search_space(p);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = p.num_vars();
    let values: Vec<Vec<Elem>> = p.domains().iter().map(|d| d.iter().collect()).collect();
    let mut out = Vec::new();
    if values.iter().any(|v| v.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; n];
    loop {
        let a = Assignment(idx.iter().zip(&values).map(|(&i, vs)| vs[i]).collect());
        if p.is_satisfied_by(&a) {
            out.push(a);
        }
        let mut d = n;
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < values[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}
