//! Base solver for instances without semilattice edges inside domains.

use crate::analysis::{EdgeLabeledGraph, TernaryTable};
use crate::consistency::Propagator;
use crate::error::{internal, invalid, Result};
use crate::model::{Assignment, Elem, Instance, SolveResult};

use super::maltsev::solve_maltsev;

/// Which pair labels occur inside the domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueKind {
    /// Every domain is a singleton.
    Trivial,
    Majority,
    Affine,
    Mixed,
}

pub fn residue_kind(p: &Instance, g: &EdgeLabeledGraph) -> ResidueKind {
    let (mut maj, mut aff) = (false, false);
    for d in p.domains() {
        for a in d.iter() {
            for b in d.iter().filter(|&b| b > a) {
                maj |= g.is_majority(a, b);
                aff |= g.is_affine(a, b);
            }
        }
    }
    match (maj, aff) {
        (false, false) => ResidueKind::Trivial,
        (true, false) => ResidueKind::Majority,
        (false, true) => ResidueKind::Affine,
        (true, true) => ResidueKind::Mixed,
    }
}

fn values(prop: &Propagator) -> Vec<Elem> {
    let t = prop.tables();
    (0..t.num_vars()).map(|v| t.unary(v).first().expect("nonempty table")).collect()
}

/// Assigns variables in order, keeping the first value whose propagation
/// succeeds. `None` on a dead end.
fn greedy(prop: &Propagator) -> Option<Vec<Elem>> {
    let mut cur = prop.clone();
    for v in 0..cur.tables().num_vars() {
        let mut placed = false;
        for a in cur.tables().unary(v).iter() {
            let mut next = cur.clone();
            if next.assign(v, a) {
                cur = next;
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    Some(values(&cur))
}

/// Depth-first search on the smallest table, propagating after each choice.
fn backtrack(prop: &Propagator) -> Option<Vec<Elem>> {
    let t = prop.tables();
    let pick = (0..t.num_vars()).filter(|&v| t.unary(v).len() > 1).min_by_key(|&v| t.unary(v).len());
    let Some(v) = pick else {
        return Some(values(prop));
    };
    for a in t.unary(v).iter() {
        let mut next = prop.clone();
        if next.assign(v, a) {
            if let Some(s) = backtrack(&next) {
                return Some(s);
            }
        }
    }
    None
}

fn checked(p: &Instance, vals: Vec<Elem>) -> Result<SolveResult> {
    let a = Assignment(vals);
    if let Some(ci) = p.unsatisfied(&a) {
        return Err(internal(format!("semilattice-free solver produced an assignment violating constraint {ci}")));
    }
    Ok(SolveResult::Sat(a))
}

/// Decides a semilattice-free instance.
///
/// Majority residues are extended greedily after 3-minimality, which cannot
/// dead-end. Affine residues try the greedy extension first and otherwise
/// run the Maltsev solver. Mixed residues use backtracking with 3-minimality
/// propagation when `allow_backtracking` is set.
pub fn solve_semilattice_free(
    p: &Instance,
    g: &EdgeLabeledGraph,
    m: &TernaryTable,
    allow_backtracking: bool,
) -> Result<SolveResult> {
    if p.domains().iter().any(|&d| g.has_semilattice_inside(d)) {
        return Err(invalid("instance has a semilattice edge inside a domain"));
    }
    let Some(prop) = Propagator::new(p) else {
        return Ok(SolveResult::Unsat);
    };
    match residue_kind(p, g) {
        ResidueKind::Trivial | ResidueKind::Majority => match greedy(&prop) {
            Some(vals) => checked(p, vals),
            None => Err(internal("greedy extension of a 3-minimal majority instance reached a dead end")),
        },
        ResidueKind::Affine => {
            if let Some(vals) = greedy(&prop) {
                return checked(p, vals);
            }
            let pruned = prop.prune(p).ok_or_else(|| internal("pruning a consistent instance emptied it"))?;
            solve_maltsev(&pruned, m)
        }
        ResidueKind::Mixed => {
            if !allow_backtracking {
                return Err(invalid("mixed majority/affine residue needs the backtracking fallback"));
            }
            match backtrack(&prop) {
                Some(vals) => checked(p, vals),
                None => Ok(SolveResult::Unsat),
            }
        }
    }
}
