//! JSON file formats for algebras, constraint languages, instances and
//! results.
//!
//! Elements are written as integers and must form the universe `0..n` in
//! order. Semilattice labels carry an optional `direction` `[a, b]`, meaning
//! `a → b`, that is `a·b = b·a = b`.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_language, ClassifierVerdict, ConstraintLanguage, EdgeLabeledGraph, Orientation, PairLabel};
use crate::error::{invalid, Error, Result};
use crate::model::{Algebra, Assignment, Constraint, Elem, ElemSet, Instance, Op, Relation, SolveResult, Tuple, MAX_UNIVERSE};
use crate::solver::SolveTrace;

use super::gen::algebra_from_graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelEntry {
    pub pair: [i64; 2],
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[i64; 2]>,
}

/// A relation given either as its tuple list or with an explicit arity,
/// which an empty relation needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationEntry {
    Tuples(Vec<Vec<i64>>),
    Explicit { arity: usize, tuples: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub universe: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<LabelEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageFile {
    pub universe: Vec<i64>,
    pub relations: Vec<RelationEntry>,
}

/// An inline algebra or a path to an algebra file, relative to the
/// instance file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Path(String),
    Inline(Box<AlgebraFile>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub scope: Vec<String>,
    pub tuples: Vec<Vec<i64>>,
}

/// Domains missing from `domains` are the whole universe. Without an
/// algebra, `universe` is required.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe: Option<Vec<i64>>,
    pub variables: Vec<String>,
    #[serde(default)]
    pub domains: IndexMap<String, Vec<i64>>,
    pub constraints: Vec<ConstraintEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Sat,
    Unsat,
    NpComplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<IndexMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedAlgebra {
    pub algebra: Algebra,
    pub graph: EdgeLabeledGraph,
}

/// A parsed instance. `algebra` is `None` when the file names none; the
/// instance then carries projection operations as a placeholder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub algebra: Option<ParsedAlgebra>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn universe_size(universe: &[i64]) -> Result<usize> {
    let n = universe.len();
    if n == 0 || n > MAX_UNIVERSE {
        return Err(invalid(format!("universe size {n} out of range 1..={MAX_UNIVERSE}")));
    }
    if universe.iter().enumerate().any(|(i, &a)| a != i as i64) {
        return Err(invalid("universe must list 0, 1, ..., n-1 in order"));
    }
    Ok(n)
}

fn elem(a: i64, n: usize) -> Result<Elem> {
    if a < 0 || a >= n as i64 {
        return Err(invalid(format!("element {a} outside the universe 0..{n}")));
    }
    Ok(a as Elem)
}

fn tuple(t: &[i64], n: usize) -> Result<Tuple> {
    t.iter().map(|&a| elem(a, n)).collect()
}

fn relation(entry: &RelationEntry, n: usize) -> Result<Relation> {
    let (arity, tuples) = match entry {
        RelationEntry::Tuples(ts) => match ts.first() {
            Some(t) => (t.len(), ts),
            None => return Err(invalid("an empty relation needs an explicit arity")),
        },
        RelationEntry::Explicit { arity, tuples } => (*arity, tuples),
    };
    if arity > 64 {
        return Err(invalid(format!("arity {arity} too large")));
    }
    let ts: Vec<Tuple> = tuples.iter().map(|t| tuple(t, n)).collect::<Result<_>>()?;
    if let Some(t) = ts.iter().find(|t| t.len() != arity) {
        return Err(invalid(format!("tuple {t:?} does not have arity {arity}")));
    }
    Relation::over_universe(arity, n, ts)
}

fn binary_table(rows: &[Vec<i64>], n: usize, name: &str) -> Result<Vec<Elem>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("table {name} must be {n}×{n}")));
    }
    rows.iter().flatten().map(|&a| elem(a, n)).collect()
}

fn ternary_table(rows: &[Vec<Vec<i64>>], n: usize, name: &str) -> Result<Vec<Elem>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n || r.iter().any(|s| s.len() != n)) {
        return Err(invalid(format!("table {name} must be {n}×{n}×{n}")));
    }
    rows.iter().flatten().flatten().map(|&a| elem(a, n)).collect()
}

fn label_of(e: &LabelEntry, n: usize) -> Result<(Elem, Elem, PairLabel)> {
    let (a, b) = (elem(e.pair[0], n)?, elem(e.pair[1], n)?);
    if a == b {
        return Err(invalid(format!("label on the degenerate pair ({a}, {a})")));
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let label = match e.label.as_str() {
        "semilattice" => match e.direction {
            None => PairLabel::Semilattice(Orientation::Both),
            Some([x, y]) => {
                let (x, y) = (elem(x, n)?, elem(y, n)?);
                if (x.min(y), x.max(y)) != (lo, hi) || x == y {
                    return Err(invalid(format!("direction ({x}, {y}) does not match pair ({a}, {b})")));
                }
                PairLabel::Semilattice(if x == lo { Orientation::Up } else { Orientation::Down })
            }
        },
        "majority" | "affine" if e.direction.is_some() => {
            return Err(invalid("only semilattice labels take a direction"));
        }
        "majority" => PairLabel::Majority,
        "affine" => PairLabel::Affine,
        other => return Err(invalid(format!("unknown label {other:?}"))),
    };
    Ok((lo, hi, label))
}

fn labels_agree(given: PairLabel, actual: PairLabel) -> bool {
    match (given, actual) {
        (PairLabel::Semilattice(Orientation::Both), PairLabel::Semilattice(_)) => true,
        (a, b) => a == b,
    }
}

/// Checks `labels` against `graph`; unspecified directions match any.
fn check_labels(labels: &[(Elem, Elem, PairLabel)], graph: &EdgeLabeledGraph) -> Result<()> {
    for &(a, b, l) in labels {
        let actual = graph.label(a, b);
        if !labels_agree(l, actual) {
            return Err(invalid(format!("pair ({a}, {b}) is labeled {l} but the operations give {actual}")));
        }
    }
    Ok(())
}

pub fn algebra_from_file(file: &AlgebraFile) -> Result<ParsedAlgebra> {
    let n = universe_size(&file.universe)?;
    let labels: Vec<(Elem, Elem, PairLabel)> = file.labels.iter().map(|e| label_of(e, n)).collect::<Result<_>>()?;
    let tables = [file.f.is_some(), file.p.is_some(), file.g.is_some(), file.h.is_some()];
    let (algebra, graph) = if tables.iter().all(|&t| t) {
        let alg = Algebra::new(
            n,
            binary_table(file.f.as_ref().expect("present"), n, "f")?,
            binary_table(file.p.as_ref().expect("present"), n, "p")?,
            ternary_table(file.g.as_ref().expect("present"), n, "g")?,
            ternary_table(file.h.as_ref().expect("present"), n, "h")?,
        )?;
        let graph = EdgeLabeledGraph::from_algebra(&alg);
        (alg, graph)
    } else if tables.iter().any(|&t| t) {
        return Err(invalid("give all four tables f, p, g, h or none"));
    } else if !file.relations.is_empty() {
        let rels: Vec<Relation> = file.relations.iter().map(|r| relation(r, n)).collect::<Result<_>>()?;
        match classify_language(&ConstraintLanguage::new(n, rels)?)? {
            ClassifierVerdict::Tractable { graph, algebra } => (algebra, graph),
            ClassifierVerdict::NpComplete { pair } => {
                return Err(invalid(format!("the relations are NP-complete on the pair {pair:?}; no algebra exists")));
            }
        }
    } else {
        let mut graph = EdgeLabeledGraph::new(n);
        for &(a, b, l) in &labels {
            if l == PairLabel::Semilattice(Orientation::Both) {
                return Err(invalid(format!("semilattice pair ({a}, {b}) needs a direction to build tables")));
            }
            graph.set(a, b, l);
        }
        let alg = algebra_from_graph(&graph)?;
        (alg, graph)
    };
    check_labels(&labels, &graph)?;
    Ok(ParsedAlgebra { algebra, graph })
}

pub fn parse_algebra_json(text: &str) -> Result<ParsedAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(parse_err)?;
    algebra_from_file(&file)
}

fn label_entries(graph: &EdgeLabeledGraph) -> Vec<LabelEntry> {
    graph
        .pairs()
        .filter(|&(_, _, l)| l != PairLabel::None)
        .map(|(a, b, l)| {
            let direction = match l {
                PairLabel::Semilattice(Orientation::Up) => Some([a as i64, b as i64]),
                PairLabel::Semilattice(Orientation::Down) => Some([b as i64, a as i64]),
                _ => None,
            };
            LabelEntry { pair: [a as i64, b as i64], label: l.to_string(), direction }
        })
        .collect()
}

pub fn algebra_to_file(alg: &Algebra) -> AlgebraFile {
    let n = alg.size();
    let bin = |op: Op| -> Vec<Vec<i64>> { alg.table(op).chunks(n).map(|r| r.iter().map(|&a| a as i64).collect()).collect() };
    let ter = |op: Op| -> Vec<Vec<Vec<i64>>> {
        alg.table(op)
            .chunks(n * n)
            .map(|m| m.chunks(n).map(|r| r.iter().map(|&a| a as i64).collect()).collect())
            .collect()
    };
    AlgebraFile {
        universe: (0..n as i64).collect(),
        labels: label_entries(&EdgeLabeledGraph::from_algebra(alg)),
        f: Some(bin(Op::F)),
        p: Some(bin(Op::P)),
        g: Some(ter(Op::G)),
        h: Some(ter(Op::H)),
        relations: Vec::new(),
    }
}

pub fn algebra_to_json(alg: &Algebra) -> String {
    serde_json::to_string_pretty(&algebra_to_file(alg)).expect("serializable")
}

pub fn parse_language_json(text: &str) -> Result<ConstraintLanguage> {
    let file: LanguageFile = serde_json::from_str(text).map_err(parse_err)?;
    let n = universe_size(&file.universe)?;
    let rels = file.relations.iter().map(|r| relation(r, n)).collect::<Result<_>>()?;
    ConstraintLanguage::new(n, rels)
}

fn relation_entry(r: &Relation) -> RelationEntry {
    let tuples = r.tuples().map(|t| t.iter().map(|&a| a as i64).collect()).collect();
    if r.is_empty() {
        RelationEntry::Explicit { arity: r.arity(), tuples }
    } else {
        RelationEntry::Tuples(tuples)
    }
}

pub fn language_to_json(l: &ConstraintLanguage) -> String {
    let file = LanguageFile {
        universe: (0..l.universe_size() as i64).collect(),
        relations: l.relations().iter().map(relation_entry).collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// Projections; stands in for the algebra of an instance that names none.
pub fn placeholder_algebra(n: usize) -> Result<Algebra> {
    Algebra::from_fns(n, |x, _| x, |x, _| x, |x, _, _| x, |x, _, _| x)
}

/// Builds an instance. Path references are resolved against `base`;
/// without a base directory they are rejected. Tuples leaving the domains
/// are dropped, which does not change the solution set.
pub fn instance_from_file(file: &InstanceFile, base: Option<&Path>) -> Result<ParsedInstance> {
    let parsed = match &file.algebra {
        None => None,
        Some(AlgebraRef::Inline(a)) => Some(algebra_from_file(a)?),
        Some(AlgebraRef::Path(path)) => {
            let base = base.ok_or_else(|| invalid("algebra path given but no base directory"))?;
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| invalid(format!("cannot read algebra {}: {e}", full.display())))?;
            Some(parse_algebra_json(&text)?)
        }
    };
    let n = match (&parsed, &file.universe) {
        (Some(a), Some(u)) => {
            if universe_size(u)? != a.algebra.size() {
                return Err(invalid("universe disagrees with the algebra"));
            }
            a.algebra.size()
        }
        (Some(a), None) => a.algebra.size(),
        (None, Some(u)) => universe_size(u)?,
        (None, None) => return Err(invalid("an instance without an algebra needs a universe")),
    };
    let mut index: IndexMap<&str, usize> = IndexMap::new();
    for (i, v) in file.variables.iter().enumerate() {
        if index.insert(v.as_str(), i).is_some() {
            return Err(invalid(format!("variable {v:?} declared twice")));
        }
    }
    let mut domains = vec![ElemSet::full(n); file.variables.len()];
    for (v, vals) in &file.domains {
        let &i = index.get(v.as_str()).ok_or_else(|| invalid(format!("domain for unknown variable {v:?}")))?;
        let d: ElemSet = vals.iter().map(|&a| elem(a, n)).collect::<Result<_>>()?;
        if d.is_empty() {
            return Err(invalid(format!("variable {v:?} has an empty domain")));
        }
        domains[i] = d;
    }
    let mut constraints = Vec::with_capacity(file.constraints.len());
    for (ci, c) in file.constraints.iter().enumerate() {
        let scope: Vec<usize> = c
            .scope
            .iter()
            .map(|v| index.get(v.as_str()).copied().ok_or_else(|| invalid(format!("constraint {ci}: unknown variable {v:?}"))))
            .collect::<Result<_>>()?;
        let rel = relation(&RelationEntry::Explicit { arity: scope.len(), tuples: c.tuples.clone() }, n)?;
        let sig = scope.iter().map(|&v| domains[v]).collect();
        constraints.push(Constraint::new(scope, rel.restrict(sig)));
    }
    let alg = match &parsed {
        Some(a) => a.algebra.clone(),
        None => placeholder_algebra(n)?,
    };
    let instance = Instance::new(Arc::new(alg), file.variables.clone(), domains, constraints);
    Ok(ParsedInstance { instance, algebra: parsed })
}

pub fn parse_instance_json(text: &str, base: Option<&Path>) -> Result<ParsedInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(parse_err)?;
    instance_from_file(&file, base)
}

/// The instance with its algebra inline; every domain is written out.
pub fn instance_to_file(p: &Instance) -> InstanceFile {
    let names = p.variables();
    InstanceFile {
        algebra: Some(AlgebraRef::Inline(Box::new(algebra_to_file(p.algebra())))),
        universe: None,
        variables: names.to_vec(),
        domains: names.iter().zip(p.domains()).map(|(v, d)| (v.clone(), d.iter().map(|a| a as i64).collect())).collect(),
        constraints: p
            .constraints()
            .iter()
            .map(|c| ConstraintEntry {
                scope: c.scope.iter().map(|&v| names[v].clone()).collect(),
                tuples: c.relation.tuples().map(|t| t.iter().map(|&a| a as i64).collect()).collect(),
            })
            .collect(),
    }
}

pub fn instance_to_json(p: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_file(p)).expect("serializable")
}

pub fn result_file(p: &Instance, r: &SolveResult, trace: Option<&SolveTrace>) -> ResultFile {
    let assignment = r.assignment().map(|a| {
        p.variables().iter().zip(a.values()).map(|(v, &x)| (v.clone(), x as i64)).collect()
    });
    ResultFile {
        status: if r.is_sat() { Status::Sat } else { Status::Unsat },
        assignment,
        witness_pair: None,
        trace: trace.map(|t| serde_json::to_value(t).expect("serializable")),
    }
}

pub fn np_complete_result(pair: (Elem, Elem)) -> ResultFile {
    ResultFile { status: Status::NpComplete, assignment: None, witness_pair: Some([pair.0 as i64, pair.1 as i64]), trace: None }
}

pub fn parse_result_json(text: &str) -> Result<ResultFile> {
    let file: ResultFile = serde_json::from_str(text).map_err(parse_err)?;
    match (&file.status, &file.assignment, &file.witness_pair) {
        (Status::Sat, Some(_), None) | (Status::Unsat, None, None) | (Status::NpComplete, None, Some(_)) => Ok(file),
        _ => Err(invalid("status does not match the assignment and witness fields")),
    }
}

impl ResultFile {
    /// The assignment as values indexed like the variables of `p`.
    pub fn assignment_for(&self, p: &Instance) -> Result<Option<Assignment>> {
        let Some(map) = &self.assignment else { return Ok(None) };
        if map.len() != p.num_vars() {
            return Err(invalid("assignment does not cover exactly the instance variables"));
        }
        let n = p.algebra().size();
        let vals = p
            .variables()
            .iter()
            .map(|v| map.get(v).ok_or_else(|| invalid(format!("no value for {v:?}"))).and_then(|&a| elem(a, n)))
            .collect::<Result<_>>()?;
        Ok(Some(Assignment(vals)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
