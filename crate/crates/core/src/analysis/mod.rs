//! The tractability classifier: per-pair polymorphism search, the labeled
//! graph of an algebra, synthesis and verification of the uniform
//! operations, and the derived operation `m`.

mod search;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::model::{all_args, Algebra, Elem, ElemSet, Op, Relation};
use search::{Cell, CellDedup, TableSearch};

/// A finite set of relations over the universe `0..universe_size`.
/// Every unary subset is implicitly part of the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLanguage {
    universe_size: usize,
    relations: Vec<Relation>,
}

impl ConstraintLanguage {
    pub fn new(universe_size: usize, relations: Vec<Relation>) -> Result<Self> {
        if universe_size == 0 || universe_size > crate::model::MAX_UNIVERSE {
            return Err(invalid(format!("universe size {universe_size} out of range")));
        }
        let universe = ElemSet::full(universe_size);
        for (i, r) in relations.iter().enumerate() {
            if r.signature().iter().any(|s| !s.is_subset(universe)) {
                return Err(invalid(format!("relation {i} is not over the universe")));
            }
        }
        Ok(ConstraintLanguage { universe_size, relations })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }
}

/// Which way a semilattice pair `{lo, hi}` (with `lo < hi`) points.
/// `Up` is the arc `lo → hi`, meaning `lo·hi = hi·lo = hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairLabel {
    Semilattice(Orientation),
    Majority,
    Affine,
    None,
}

impl PairLabel {
    pub fn is_semilattice(self) -> bool {
        matches!(self, PairLabel::Semilattice(_))
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairLabel::Semilattice(_) => f.write_str("semilattice"),
            PairLabel::Majority => f.write_str("majority"),
            PairLabel::Affine => f.write_str("affine"),
            PairLabel::None => f.write_str("none"),
        }
    }
}

/// The labeled graph on a universe: one label per unordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabeledGraph {
    size: usize,
    labels: BTreeMap<(Elem, Elem), PairLabel>,
}

impl EdgeLabeledGraph {
    pub fn new(size: usize) -> Self {
        EdgeLabeledGraph { size, labels: BTreeMap::new() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Records a label. For a semilattice label the orientation is read
    /// relative to `(a, b)`: `Up` means `a → b`.
    pub fn set(&mut self, a: Elem, b: Elem, label: PairLabel) {
        assert!(a != b, "pairs have two distinct elements");
        let (lo, hi) = (a.min(b), a.max(b));
        let label = match label {
            PairLabel::Semilattice(o) if a > b => PairLabel::Semilattice(match o {
                Orientation::Up => Orientation::Down,
                Orientation::Down => Orientation::Up,
                Orientation::Both => Orientation::Both,
            }),
            l => l,
        };
        self.labels.insert((lo, hi), label);
    }

    /// Label of `{a, b}`; orientation is relative to `(min, max)`.
    pub fn label(&self, a: Elem, b: Elem) -> PairLabel {
        self.labels.get(&(a.min(b), a.max(b))).copied().unwrap_or(PairLabel::None)
    }

    /// True when `a → b` is a semilattice arc, i.e. `a·b = b·a = b`.
    pub fn semilattice_arc(&self, a: Elem, b: Elem) -> bool {
        if a == b {
            return false;
        }
        match self.label(a, b) {
            PairLabel::Semilattice(Orientation::Both) => true,
            PairLabel::Semilattice(Orientation::Up) => a < b,
            PairLabel::Semilattice(Orientation::Down) => a > b,
            _ => false,
        }
    }

    pub fn is_semilattice(&self, a: Elem, b: Elem) -> bool {
        a != b && self.label(a, b).is_semilattice()
    }

    pub fn is_affine(&self, a: Elem, b: Elem) -> bool {
        a != b && self.label(a, b) == PairLabel::Affine
    }

    pub fn is_majority(&self, a: Elem, b: Elem) -> bool {
        a != b && self.label(a, b) == PairLabel::Majority
    }

    /// All labeled pairs `(lo, hi, label)` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem, PairLabel)> + '_ {
        self.labels.iter().map(|(&(a, b), &l)| (a, b, l))
    }

    /// True when every pair carries a label other than `None`.
    pub fn is_total(&self) -> bool {
        let n = self.size as Elem;
        (0..n).all(|a| (a + 1..n).all(|b| self.label(a, b) != PairLabel::None))
    }

    /// Reads the labels off the tables: a pair is semilattice when `f` is
    /// commutative on it, otherwise majority when `g` is a majority on it,
    /// otherwise affine when `h` is affine on it.
    pub fn from_algebra(alg: &Algebra) -> Self {
        let mut g = EdgeLabeledGraph::new(alg.size());
        let n = alg.size() as Elem;
        for a in 0..n {
            for b in a + 1..n {
                let label = if alg.f(a, b) == alg.f(b, a) {
                    if alg.f(a, b) == b {
                        PairLabel::Semilattice(Orientation::Up)
                    } else {
                        PairLabel::Semilattice(Orientation::Down)
                    }
                } else if is_majority_on(|x, y, z| alg.g(x, y, z), a, b) {
                    PairLabel::Majority
                } else if is_affine_on(|x, y, z| alg.h(x, y, z), a, b) {
                    PairLabel::Affine
                } else {
                    PairLabel::None
                };
                g.set(a, b, label);
            }
        }
        g
    }

    /// Resolves every two-way semilattice pair to the orientation realized
    /// by `alg`'s `f`.
    pub fn orient_with(&self, alg: &Algebra) -> Self {
        let mut out = self.clone();
        for (&(a, b), l) in out.labels.iter_mut() {
            if *l == PairLabel::Semilattice(Orientation::Both) {
                *l = PairLabel::Semilattice(if alg.f(a, b) == b { Orientation::Up } else { Orientation::Down });
            }
        }
        out
    }

    /// True when some semilattice arc has both ends in `domain`.
    pub fn has_semilattice_inside(&self, domain: ElemSet) -> bool {
        domain.iter().any(|a| domain.iter().any(|b| self.semilattice_arc(a, b)))
    }
}

fn is_majority_on(op: impl Fn(Elem, Elem, Elem) -> Elem, a: Elem, b: Elem) -> bool {
    [(a, b), (b, a)].iter().all(|&(x, y)| op(x, x, y) == x && op(x, y, x) == x && op(y, x, x) == x)
}

fn is_affine_on(op: impl Fn(Elem, Elem, Elem) -> Elem, a: Elem, b: Elem) -> bool {
    [(a, b), (b, a)].iter().all(|&(x, y)| op(x, x, y) == y && op(x, y, y) == x && op(x, y, x) == y)
}

/// How a two-element subset is labeled, as far as the table rules care.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairKind {
    /// Semilattice pair whose absorbing element is `top`.
    Semilattice { top: Elem },
    Majority,
    Affine,
}

/// Value of `op` on `args`, all lying in a pair of kind `kind`.
/// Arguments must not all be equal.
pub(crate) fn pair_rule(op: Op, kind: PairKind, args: &[Elem]) -> Elem {
    let x = args[0];
    match (kind, op) {
        // every non-constant combination of a semilattice pair contains the top
        (PairKind::Semilattice { top }, _) => top,
        (PairKind::Majority, Op::F) => x,
        (PairKind::Majority, Op::P) => args[1],
        (PairKind::Majority, Op::G) => majority3(args[0], args[1], args[2]),
        (PairKind::Majority, Op::H) => x,
        (PairKind::Affine, Op::H) => affine3(args[0], args[1], args[2]),
        (PairKind::Affine, _) => x,
    }
}

fn majority3(x: Elem, y: Elem, z: Elem) -> Elem {
    if x == y || x == z {
        x
    } else {
        y
    }
}

fn affine3(x: Elem, y: Elem, z: Elem) -> Elem {
    if x == y {
        z
    } else if y == z {
        x
    } else {
        y
    }
}

fn distinct(args: &[Elem]) -> Vec<Elem> {
    let mut out = Vec::with_capacity(args.len());
    for &a in args {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifierVerdict {
    Tractable { graph: EdgeLabeledGraph, algebra: Algebra },
    NpComplete { pair: (Elem, Elem) },
}

/// Builds the cells of one operation table. `pinned` gives the forced value
/// of entries whose arguments are not all distinct (or `None` to leave the
/// entry free); entries with pairwise distinct arguments are always free.
fn op_cells(
    search: &mut TableSearch,
    n: usize,
    arity: usize,
    mut pinned: impl FnMut(&mut TableSearch, &[Elem]) -> Option<Cell>,
) -> Vec<Cell> {
    all_args(n, arity)
        .map(|args| {
            let d = distinct(&args);
            if d.len() == 1 {
                return Cell::Fixed(args[0]);
            }
            if d.len() < arity || arity == 2 {
                if let Some(c) = pinned(search, &args) {
                    return c;
                }
            }
            Cell::Var(search.add_var(d))
        })
        .collect()
}

/// Adds, for every relation and every choice of `arity` tuples from it, the
/// requirement that the componentwise image lies in the relation.
fn add_polymorphism_constraints(search: &mut TableSearch, cells: &[Cell], n: usize, arity: usize, rels: &[Relation]) {
    for r in rels {
        let m = r.len();
        if m == 0 {
            continue;
        }
        let k = r.arity();
        let mut dedup = CellDedup::default();
        let mut idx = vec![0usize; arity];
        let mut cv = vec![Cell::Fixed(0); k];
        loop {
            for (pos, slot) in cv.iter_mut().enumerate() {
                let code = idx.iter().fold(0usize, |acc, &t| acc * n + r.tuple(t)[pos] as usize);
                *slot = cells[code];
            }
            if dedup.fresh(&cv) {
                search.require(&cv, r);
            }
            let mut d = arity;
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
}

fn check_pair(l: &ConstraintLanguage, a: Elem, b: Elem) -> Result<()> {
    let n = l.universe_size as Elem;
    if a == b || a >= n || b >= n {
        return Err(invalid(format!("pair ({a}, {b}) is not two distinct elements of the universe")));
    }
    Ok(())
}

/// Whether some conservative binary polymorphism is a semilattice on
/// `{a, b}` with absorbing element `top`.
fn semilattice_exists(l: &ConstraintLanguage, a: Elem, b: Elem, top: Elem) -> bool {
    let n = l.universe_size;
    let mut s = TableSearch::new();
    let pair = ElemSet::from_iter([a, b]);
    let cells = op_cells(&mut s, n, 2, |_, args| {
        if args.iter().all(|&x| pair.contains(x)) {
            Some(Cell::Fixed(top))
        } else {
            None
        }
    });
    add_polymorphism_constraints(&mut s, &cells, n, 2, &l.relations);
    s.solve().is_some()
}

/// Whether some conservative ternary polymorphism restricts to `kind` on `{a, b}`.
fn ternary_exists(l: &ConstraintLanguage, a: Elem, b: Elem, kind: PairKind) -> bool {
    let n = l.universe_size;
    let mut s = TableSearch::new();
    let pair = ElemSet::from_iter([a, b]);
    let cells = op_cells(&mut s, n, 3, |_, args| {
        if args.iter().all(|&x| pair.contains(x)) {
            let op = if kind == PairKind::Majority { Op::G } else { Op::H };
            Some(Cell::Fixed(pair_rule(op, kind, args)))
        } else {
            None
        }
    });
    add_polymorphism_constraints(&mut s, &cells, n, 3, &l.relations);
    s.solve().is_some()
}

/// Labels the pair `{a, b}` by the strongest kind of polymorphism available:
/// semilattice, then majority, then affine. A semilattice orientation is
/// relative to `(a, b)`: `Up` means `a → b`.
pub fn classify_pair(l: &ConstraintLanguage, a: Elem, b: Elem) -> Result<PairLabel> {
    check_pair(l, a, b)?;
    let up = semilattice_exists(l, a, b, b);
    let down = semilattice_exists(l, a, b, a);
    Ok(match (up, down) {
        (true, true) => PairLabel::Semilattice(Orientation::Both),
        (true, false) => PairLabel::Semilattice(Orientation::Up),
        (false, true) => PairLabel::Semilattice(Orientation::Down),
        (false, false) => {
            if ternary_exists(l, a, b, PairKind::Majority) {
                PairLabel::Majority
            } else if ternary_exists(l, a, b, PairKind::Affine) {
                PairLabel::Affine
            } else {
                PairLabel::None
            }
        }
    })
}

/// Classifies every pair in lexicographic order. The first unlabeled pair
/// makes the language NP-complete; otherwise the uniform operations are
/// synthesized.
pub fn classify_language(l: &ConstraintLanguage) -> Result<ClassifierVerdict> {
    let n = l.universe_size as Elem;
    let mut graph = EdgeLabeledGraph::new(l.universe_size);
    for a in 0..n {
        for b in a + 1..n {
            let label = classify_pair(l, a, b)?;
            if label == PairLabel::None {
                return Ok(ClassifierVerdict::NpComplete { pair: (a, b) });
            }
            graph.set(a, b, label);
        }
    }
    let algebra = synthesize_uniform_ops(l, &graph)?;
    Ok(ClassifierVerdict::Tractable { graph, algebra })
}

/// Searches for tables `f, p, g, h` that are polymorphisms of every relation
/// of `l` and follow the pair rules dictated by `graph`.
///
/// Pairs labeled semilattice in both directions get one search variable for
/// their absorbing element, tried larger element first. Entries on three
/// distinct elements prefer the first argument.
pub fn synthesize_uniform_ops(l: &ConstraintLanguage, graph: &EdgeLabeledGraph) -> Result<Algebra> {
    let n = l.universe_size;
    if graph.size() != n {
        return Err(invalid("graph and language have different universes"));
    }
    let mut s = TableSearch::new();
    let mut orient: BTreeMap<(Elem, Elem), u32> = BTreeMap::new();
    let mut missing: Option<(Elem, Elem)> = None;
    let mut cells = Vec::with_capacity(4);
    for op in Op::ALL {
        let c = op_cells(&mut s, n, op.arity(), |s, args| {
            Some(synthesis_cell(op, graph, &mut orient, &mut missing, s, args))
        });
        cells.push(c);
    }
    if let Some((a, b)) = missing {
        return Err(Error::SynthesisFailure(format!("pair ({a}, {b}) has no label")));
    }
    for (op, c) in Op::ALL.iter().zip(&cells) {
        add_polymorphism_constraints(&mut s, c, n, op.arity(), &l.relations);
    }
    let sol = s
        .solve()
        .ok_or_else(|| Error::SynthesisFailure("no tables satisfy the pair rules and the polymorphism conditions".into()))?;
    let read = |cells: &[Cell]| -> Vec<Elem> {
        cells
            .iter()
            .map(|c| match *c {
                Cell::Fixed(e) => e,
                Cell::Var(v) => sol[v as usize],
            })
            .collect()
    };
    Algebra::new(n, read(&cells[0]), read(&cells[1]), read(&cells[2]), read(&cells[3]))
        .map_err(|e| Error::SynthesisFailure(format!("synthesized tables are malformed: {e}")))
}

/// Cell for an entry of `op` whose arguments span one pair.
fn synthesis_cell(
    op: Op,
    graph: &EdgeLabeledGraph,
    orient: &mut BTreeMap<(Elem, Elem), u32>,
    missing: &mut Option<(Elem, Elem)>,
    s: &mut TableSearch,
    args: &[Elem],
) -> Cell {
    let d = distinct(args);
    let (lo, hi) = (d[0].min(d[1]), d[0].max(d[1]));
    let kind = match graph.label(lo, hi) {
        PairLabel::Semilattice(Orientation::Up) => PairKind::Semilattice { top: hi },
        PairLabel::Semilattice(Orientation::Down) => PairKind::Semilattice { top: lo },
        PairLabel::Semilattice(Orientation::Both) => {
            let v = *orient.entry((lo, hi)).or_insert_with(|| s.add_var(vec![hi, lo]));
            return Cell::Var(v);
        }
        PairLabel::Majority => PairKind::Majority,
        PairLabel::Affine => PairKind::Affine,
        PairLabel::None => {
            missing.get_or_insert((lo, hi));
            return Cell::Fixed(args[0]);
        }
    };
    Cell::Fixed(pair_rule(op, kind, args))
}

/// One failed rule in a uniformity report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformityViolation {
    pub rule: String,
    pub op: Option<Op>,
    pub args: Vec<Elem>,
}

impl fmt::Display for UniformityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            Some(op) => write!(f, "{}: {op}{:?}", self.rule, self.args),
            None => write!(f, "{}: {:?}", self.rule, self.args),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UniformityReport {
    pub violations: Vec<UniformityViolation>,
}

impl UniformityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively checks the structural identities, the pair rules for every
/// labeled pair of `graph`, and that each operation preserves each relation.
pub fn check_uniformity_laws(alg: &Algebra, graph: &EdgeLabeledGraph, relations: &[Relation]) -> UniformityReport {
    let mut out = Vec::new();
    let mut push = |rule: &str, op: Option<Op>, args: Vec<Elem>| {
        out.push(UniformityViolation { rule: rule.to_string(), op, args });
    };
    let n = alg.size() as Elem;
    for msg in alg.structural_violations() {
        push(&msg, None, vec![]);
    }
    if graph.size() != alg.size() {
        push("graph and algebra have different universes", None, vec![]);
    }
    let ff = |x, y| alg.f(x, y);
    for a in 0..n {
        for b in a + 1..n {
            let pairs = [(a, b), (b, a)];
            match graph.label(a, b) {
                PairLabel::Semilattice(o) => {
                    if alg.f(a, b) != alg.f(b, a) {
                        push("f must be a semilattice operation on a semilattice pair", Some(Op::F), vec![a, b]);
                        continue;
                    }
                    let top = alg.f(a, b);
                    let ok_dir = match o {
                        Orientation::Up => top == b,
                        Orientation::Down => top == a,
                        Orientation::Both => true,
                    };
                    if !ok_dir {
                        push("f orients the semilattice pair against the graph", Some(Op::F), vec![a, b]);
                    }
                    for &(x, y) in &pairs {
                        if alg.p(x, y) != alg.f(x, y) {
                            push("p must equal f on a semilattice pair", Some(Op::P), vec![x, y]);
                        }
                    }
                    for args in pair_args3(a, b) {
                        let want = ff(ff(args[0], args[1]), args[2]);
                        if alg.g(args[0], args[1], args[2]) != want {
                            push("g must be f(f(x,y),z) on a semilattice pair", Some(Op::G), args.to_vec());
                        }
                        if alg.h(args[0], args[1], args[2]) != want {
                            push("h must be f(f(x,y),z) on a semilattice pair", Some(Op::H), args.to_vec());
                        }
                    }
                }
                PairLabel::Majority => {
                    for &(x, y) in &pairs {
                        if alg.f(x, y) != x {
                            push("f must be the first projection on a majority pair", Some(Op::F), vec![x, y]);
                        }
                        if alg.p(x, y) != y {
                            push("p must be the second projection on a majority pair", Some(Op::P), vec![x, y]);
                        }
                    }
                    for args in pair_args3(a, b) {
                        let [x, y, z] = args;
                        let maj = if x == y || x == z { x } else { y };
                        if alg.g(x, y, z) != maj {
                            push("g must be a majority operation on a majority pair", Some(Op::G), args.to_vec());
                        }
                        if alg.h(x, y, z) != x {
                            push("h must be the first projection on a majority pair", Some(Op::H), args.to_vec());
                        }
                    }
                }
                PairLabel::Affine => {
                    for &(x, y) in &pairs {
                        if alg.f(x, y) != x {
                            push("f must be the first projection on an affine pair", Some(Op::F), vec![x, y]);
                        }
                        if alg.p(x, y) != x {
                            push("p must be the first projection on an affine pair", Some(Op::P), vec![x, y]);
                        }
                    }
                    for args in pair_args3(a, b) {
                        let [x, y, z] = args;
                        // x - y + z in the two-element group
                        let aff = if x == y { z } else if y == z { x } else { y };
                        if alg.g(x, y, z) != x {
                            push("g must be the first projection on an affine pair", Some(Op::G), args.to_vec());
                        }
                        if alg.h(x, y, z) != aff {
                            push("h must be affine on an affine pair", Some(Op::H), args.to_vec());
                        }
                    }
                }
                PairLabel::None => push("pair has no label", None, vec![a, b]),
            }
        }
    }
    for (ri, r) in relations.iter().enumerate() {
        for op in Op::ALL {
            if let Some((args, image)) = r.closure_witness(alg, op) {
                let mut flat: Vec<Elem> = args.concat();
                flat.extend(image);
                push(&format!("{op} does not preserve relation {ri}"), Some(op), flat);
            }
        }
    }
    UniformityReport { violations: out }
}

/// The six non-constant argument triples over `{a, b}`.
fn pair_args3(a: Elem, b: Elem) -> Vec<[Elem; 3]> {
    let mut out = Vec::with_capacity(6);
    for code in 1..7u8 {
        let pick = |bit: u8| if code >> bit & 1 == 1 { b } else { a };
        out.push([pick(2), pick(1), pick(0)]);
    }
    out
}

/// A ternary operation table, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryTable {
    size: usize,
    table: Vec<Elem>,
}

impl TernaryTable {
    #[inline]
    pub fn apply(&self, x: Elem, y: Elem, z: Elem) -> Elem {
        self.table[(x as usize * self.size + y as usize) * self.size + z as usize]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[Elem] {
        &self.table
    }
}

/// `m(x,y,z) = h(g(x,y,z), g(y,z,x), g(z,x,y))`.
pub fn derive_m(alg: &Algebra) -> TernaryTable {
    let n = alg.size();
    let table = all_args(n, 3)
        .map(|a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            alg.h(alg.g(x, y, z), alg.g(y, z, x), alg.g(z, x, y))
        })
        .collect();
    TernaryTable { size: n, table }
}
