//! Finite universes, operation tables, relations and instances.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{invalid, Result};

/// Element id: an index into an algebra's universe.
pub type Elem = u8;

/// A tuple of elements.
pub type Tuple = Vec<Elem>;

/// Largest supported universe (elements are stored in a 64-bit set).
pub const MAX_UNIVERSE: usize = 64;

/// A subset of a universe, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(size: usize) -> Self {
        assert!(size <= MAX_UNIVERSE, "universe too large");
        if size == MAX_UNIVERSE {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << size) - 1)
        }
    }

    pub fn singleton(a: Elem) -> Self {
        ElemSet(1u64 << a)
    }

    pub fn from_bits(bits: u64) -> Self {
        ElemSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, a: Elem) -> bool {
        (a as usize) < MAX_UNIVERSE && self.0 >> a & 1 == 1
    }

    pub fn insert(&mut self, a: Elem) {
        self.0 |= 1u64 << a;
    }

    pub fn remove(&mut self, a: Elem) {
        self.0 &= !(1u64 << a);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn first(self) -> Option<Elem> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as Elem)
        }
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> ElemIter {
        ElemIter(self.0)
    }
}

impl FromIterator<Elem> for ElemSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl IntoIterator for ElemSet {
    type Item = Elem;
    type IntoIter = ElemIter;
    fn into_iter(self) -> ElemIter {
        self.iter()
    }
}

pub struct ElemIter(u64);

impl Iterator for ElemIter {
    type Item = Elem;
    fn next(&mut self) -> Option<Elem> {
        if self.0 == 0 {
            return None;
        }
        let a = self.0.trailing_zeros() as Elem;
        self.0 &= self.0 - 1;
        Some(a)
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The four basic operations of a conservative algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    F,
    P,
    G,
    H,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::F, Op::P, Op::G, Op::H];

    pub fn arity(self) -> usize {
        match self {
            Op::F | Op::P => 2,
            Op::G | Op::H => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::F => "f",
            Op::P => "p",
            Op::G => "g",
            Op::H => "h",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A conservative algebra given by total tables for `f`, `p` (binary) and
/// `g`, `h` (ternary). Tables are stored row-major: `f[a*n + b]`,
/// `g[(a*n + b)*n + c]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    size: usize,
    f: Vec<Elem>,
    p: Vec<Elem>,
    g: Vec<Elem>,
    h: Vec<Elem>,
}

impl Algebra {
    /// Builds an algebra and checks that every table is conservative and
    /// idempotent and that `f(x, f(x, y)) = f(x, y)`.
    pub fn new(size: usize, f: Vec<Elem>, p: Vec<Elem>, g: Vec<Elem>, h: Vec<Elem>) -> Result<Self> {
        let alg = Self::from_tables_unchecked(size, f, p, g, h)?;
        if let Some(msg) = alg.structural_violations().into_iter().next() {
            return Err(invalid(msg));
        }
        Ok(alg)
    }

    /// Builds an algebra checking only table shapes. Used for mutation tests
    /// and by the law checker, which reports the remaining problems as data.
    pub fn from_tables_unchecked(
        size: usize,
        f: Vec<Elem>,
        p: Vec<Elem>,
        g: Vec<Elem>,
        h: Vec<Elem>,
    ) -> Result<Self> {
        if size == 0 || size > MAX_UNIVERSE {
            return Err(invalid(format!("universe size {size} out of range 1..={MAX_UNIVERSE}")));
        }
        let n2 = size * size;
        let n3 = n2 * size;
        for (name, t, len) in [("f", &f, n2), ("p", &p, n2), ("g", &g, n3), ("h", &h, n3)] {
            if t.len() != len {
                return Err(invalid(format!("table {name} has {} entries, expected {len}", t.len())));
            }
            if let Some(v) = t.iter().find(|&&v| v as usize >= size) {
                return Err(invalid(format!("table {name} contains element {v} outside the universe")));
            }
        }
        Ok(Algebra { size, f, p, g, h })
    }

    /// Builds tables by evaluating the given closures.
    pub fn from_fns(
        size: usize,
        f: impl Fn(Elem, Elem) -> Elem,
        p: impl Fn(Elem, Elem) -> Elem,
        g: impl Fn(Elem, Elem, Elem) -> Elem,
        h: impl Fn(Elem, Elem, Elem) -> Elem,
    ) -> Result<Self> {
        let n = size as Elem;
        let mut tf = Vec::with_capacity(size * size);
        let mut tp = Vec::with_capacity(size * size);
        for a in 0..n {
            for b in 0..n {
                tf.push(f(a, b));
                tp.push(p(a, b));
            }
        }
        let mut tg = Vec::with_capacity(size * size * size);
        let mut th = Vec::with_capacity(size * size * size);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    tg.push(g(a, b, c));
                    th.push(h(a, b, c));
                }
            }
        }
        Self::new(size, tf, tp, tg, th)
    }

    /// Conservativity, idempotency and the `f(x,f(x,y)) = f(x,y)` identity.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.size as Elem;
        for op in Op::ALL {
            for args in all_args(self.size, op.arity()) {
                let v = self.apply(op, &args);
                if !args.contains(&v) {
                    out.push(format!("{op}{args:?} = {v} is not conservative"));
                }
                if args.iter().all(|&a| a == args[0]) && v != args[0] {
                    out.push(format!("{op}{args:?} = {v} is not idempotent"));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.f(x, self.f(x, y)) != self.f(x, y) {
                    out.push(format!("f({x}, f({x}, {y})) != f({x}, {y})"));
                }
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn universe(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    #[inline]
    pub fn f(&self, a: Elem, b: Elem) -> Elem {
        self.f[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn p(&self, a: Elem, b: Elem) -> Elem {
        self.p[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn g(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.g[(a as usize * self.size + b as usize) * self.size + c as usize]
    }

    #[inline]
    pub fn h(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.h[(a as usize * self.size + b as usize) * self.size + c as usize]
    }

    /// Applies `op` to exactly `op.arity()` arguments.
    #[inline]
    pub fn apply(&self, op: Op, args: &[Elem]) -> Elem {
        match op {
            Op::F => self.f(args[0], args[1]),
            Op::P => self.p(args[0], args[1]),
            Op::G => self.g(args[0], args[1], args[2]),
            Op::H => self.h(args[0], args[1], args[2]),
        }
    }

    pub fn table(&self, op: Op) -> &[Elem] {
        match op {
            Op::F => &self.f,
            Op::P => &self.p,
            Op::G => &self.g,
            Op::H => &self.h,
        }
    }

    /// Returns a copy with one table entry overwritten. No invariants are
    /// re-checked; this exists to plant faults in tests.
    pub fn with_entry(&self, op: Op, args: &[Elem], value: Elem) -> Algebra {
        let mut out = self.clone();
        let idx = args.iter().fold(0usize, |acc, &a| acc * self.size + a as usize);
        match op {
            Op::F => out.f[idx] = value,
            Op::P => out.p[idx] = value,
            Op::G => out.g[idx] = value,
            Op::H => out.h[idx] = value,
        }
        out
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").field("size", &self.size).finish_non_exhaustive()
    }
}

/// Every argument vector of the given arity over `0..size`, in lexicographic order.
pub fn all_args(size: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = size.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut args = vec![0; arity];
        for slot in args.iter_mut().rev() {
            *slot = (code % size) as Elem;
            code /= size;
        }
        args
    })
}

/// A finite relation given by its tuples, together with the per-position
/// domains it lives in.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    signature: Vec<ElemSet>,
    tuples: IndexSet<Tuple>,
}

impl Relation {
    /// Builds a relation; tuples are deduplicated and kept in sorted order.
    pub fn new(signature: Vec<ElemSet>, tuples: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        if signature.is_empty() {
            return Err(invalid("relations must have positive arity"));
        }
        let mut set = IndexSet::new();
        for t in tuples {
            if t.len() != signature.len() {
                return Err(invalid(format!(
                    "tuple {t:?} has length {}, relation arity is {}",
                    t.len(),
                    signature.len()
                )));
            }
            if let Some(i) = (0..t.len()).find(|&i| !signature[i].contains(t[i])) {
                return Err(invalid(format!(
                    "tuple {t:?} leaves the domain {:?} at position {i}",
                    signature[i]
                )));
            }
            set.insert(t);
        }
        set.sort();
        Ok(Relation { signature, tuples: set })
    }

    /// A relation whose every position ranges over the whole universe `0..size`.
    pub fn over_universe(arity: usize, size: usize, tuples: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        Self::new(vec![ElemSet::full(size); arity], tuples)
    }

    /// The product of the given sets.
    pub fn product(signature: Vec<ElemSet>) -> Result<Self> {
        let mut tuples: Vec<Tuple> = vec![Vec::new()];
        for s in &signature {
            let mut next = Vec::with_capacity(tuples.len() * s.len());
            for t in &tuples {
                for a in s.iter() {
                    let mut u = t.clone();
                    u.push(a);
                    next.push(u);
                }
            }
            tuples = next;
        }
        Self::new(signature, tuples)
    }

    pub fn arity(&self) -> usize {
        self.signature.len()
    }

    pub fn signature(&self) -> &[ElemSet] {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Elem]) -> bool {
        self.tuples.contains(t)
    }

    pub fn tuple(&self, i: usize) -> &[Elem] {
        &self.tuples[i]
    }

    pub fn tuples(&self) -> impl ExactSizeIterator<Item = &Tuple> + '_ {
        self.tuples.iter()
    }

    /// The set of values occurring at position `i`.
    pub fn column(&self, i: usize) -> ElemSet {
        self.tuples.iter().map(|t| t[i]).collect()
    }

    /// True when every position's column equals its signature domain.
    pub fn is_subdirect(&self) -> bool {
        (0..self.arity()).all(|i| self.column(i) == self.signature[i])
    }

    /// Projection onto the listed positions (in the given order).
    pub fn project(&self, positions: &[usize]) -> Result<Relation> {
        if positions.is_empty() {
            return Err(invalid("projection onto an empty index set"));
        }
        let mut seen = HashSet::new();
        for &i in positions {
            if i >= self.arity() {
                return Err(invalid(format!("position {i} out of range for arity {}", self.arity())));
            }
            if !seen.insert(i) {
                return Err(invalid(format!("position {i} listed twice")));
            }
        }
        let sig = positions.iter().map(|&i| self.signature[i]).collect();
        Relation::new(sig, self.tuples.iter().map(|t| positions.iter().map(|&i| t[i]).collect()))
    }

    /// Keeps the tuples lying inside `signature` and adopts it as the new signature.
    pub fn restrict(&self, signature: Vec<ElemSet>) -> Relation {
        assert_eq!(signature.len(), self.arity());
        let tuples = self
            .tuples
            .iter()
            .filter(|t| t.iter().zip(&signature).all(|(&a, s)| s.contains(a)))
            .cloned()
            .collect();
        Relation { signature, tuples }
    }

    /// Applies `op` componentwise to every combination of tuples and returns
    /// the first combination whose image falls outside the relation.
    pub fn closure_witness(&self, alg: &Algebra, op: Op) -> Option<(Vec<Tuple>, Tuple)> {
        let n = self.len();
        let k = op.arity();
        let mut idx = vec![0usize; k];
        let mut args = vec![0 as Elem; k];
        if n == 0 {
            return None;
        }
        loop {
            let image: Tuple = (0..self.arity())
                .map(|pos| {
                    for (slot, &i) in args.iter_mut().zip(&idx) {
                        *slot = self.tuples[i][pos];
                    }
                    alg.apply(op, &args)
                })
                .collect();
            if !self.contains(&image) {
                let witnesses = idx.iter().map(|&i| self.tuples[i].clone()).collect();
                return Some((witnesses, image));
            }
            // odometer
            let mut d = k;
            loop {
                if d == 0 {
                    return None;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// True when the relation is closed under all four operations.
    pub fn is_closed(&self, alg: &Algebra) -> bool {
        Op::ALL.iter().all(|&op| self.closure_witness(alg, op).is_none())
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples.iter()).finish()
    }
}

/// Applies an operation position by position to tuples of equal length.
pub fn apply_componentwise(alg: &Algebra, op: Op, args: &[&[Elem]]) -> Result<Tuple> {
    if args.len() != op.arity() {
        return Err(invalid(format!("{op} takes {} arguments, got {}", op.arity(), args.len())));
    }
    let len = args[0].len();
    if args.iter().any(|t| t.len() != len) {
        return Err(invalid("argument tuples differ in length"));
    }
    let mut buf = vec![0; args.len()];
    Ok((0..len)
        .map(|i| {
            for (slot, t) in buf.iter_mut().zip(args) {
                *slot = t[i];
            }
            alg.apply(op, &buf)
        })
        .collect())
}

/// Least superset of `seed` closed under `f`, `p`, `g` and `h`.
///
/// Evaluation is semi-naive: each round only combines argument lists that
/// include at least one tuple found in the previous round.
pub fn close_under_ops(alg: &Algebra, signature: Vec<ElemSet>, seed: impl IntoIterator<Item = Tuple>) -> Result<Relation> {
    let arity = signature.len();
    let mut set: IndexSet<Tuple> = IndexSet::new();
    for t in seed {
        if t.len() != arity {
            return Err(invalid("seed tuples must match the signature arity"));
        }
        set.insert(t);
    }
    if set.is_empty() {
        return Err(invalid("closure of an empty seed"));
    }
    let mut frontier = 0;
    while frontier < set.len() {
        let end = set.len();
        let mut found: Vec<Tuple> = Vec::new();
        let push = |t: Tuple, set: &IndexSet<Tuple>, found: &mut Vec<Tuple>| {
            if !set.contains(&t) {
                found.push(t);
            }
        };
        for i in 0..end {
            for j in 0..end {
                let old_ij = i < frontier && j < frontier;
                if !old_ij {
                    for op in [Op::F, Op::P] {
                        let t = componentwise2(alg, op, &set[i], &set[j]);
                        push(t, &set, &mut found);
                    }
                }
                let kstart = if old_ij { frontier } else { 0 };
                for k in kstart..end {
                    for op in [Op::G, Op::H] {
                        let t = componentwise3(alg, op, &set[i], &set[j], &set[k]);
                        push(t, &set, &mut found);
                    }
                }
            }
        }
        frontier = end;
        for t in found {
            set.insert(t);
        }
    }
    Relation::new(signature, set)
}

#[inline]
pub(crate) fn componentwise2(alg: &Algebra, op: Op, a: &[Elem], b: &[Elem]) -> Tuple {
    a.iter().zip(b).map(|(&x, &y)| alg.apply(op, &[x, y])).collect()
}

#[inline]
pub(crate) fn componentwise3(alg: &Algebra, op: Op, a: &[Elem], b: &[Elem], c: &[Elem]) -> Tuple {
    (0..a.len()).map(|i| alg.apply(op, &[a[i], b[i], c[i]])).collect()
}

/// A constraint: a scope (variables, repetition allowed) and a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub relation: Arc<Relation>,
}

impl Constraint {
    pub fn new(scope: Vec<usize>, relation: Relation) -> Self {
        Constraint { scope, relation: Arc::new(relation) }
    }

    /// The distinct variables of the scope, in order of first occurrence.
    pub fn distinct_vars(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(self.scope.len());
        for &v in &self.scope {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// True when the tuple agrees on positions that share a variable.
    pub fn respects_repeats(&self, t: &[Elem]) -> bool {
        for i in 0..self.scope.len() {
            for j in i + 1..self.scope.len() {
                if self.scope[i] == self.scope[j] && t[i] != t[j] {
                    return false;
                }
            }
        }
        true
    }
}

/// A CSP instance over a conservative algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<String>,
    domains: Vec<ElemSet>,
    constraints: Vec<Constraint>,
    algebra: Arc<Algebra>,
}

impl Instance {
    /// Assembles an instance without validating it; see [`validate_instance`].
    pub fn new(
        algebra: Arc<Algebra>,
        variables: Vec<String>,
        domains: Vec<ElemSet>,
        constraints: Vec<Constraint>,
    ) -> Self {
        assert_eq!(variables.len(), domains.len(), "one domain per variable");
        Instance { variables, domains, constraints, algebra }
    }

    /// Variables named `v0, v1, ...`.
    pub fn with_default_names(algebra: Arc<Algebra>, domains: Vec<ElemSet>, constraints: Vec<Constraint>) -> Self {
        let variables = (0..domains.len()).map(|i| format!("v{i}")).collect();
        Self::new(algebra, variables, domains, constraints)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn domains(&self) -> &[ElemSet] {
        &self.domains
    }

    pub fn domain(&self, v: usize) -> ElemSet {
        self.domains[v]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Σ_v |δ(v)|.
    pub fn summ(&self) -> usize {
        self.domains.iter().map(|d| d.len()).sum()
    }

    /// Domains of the scope positions of constraint `c`.
    pub fn scope_domains(&self, c: &Constraint) -> Vec<ElemSet> {
        c.scope.iter().map(|&v| self.domains[v]).collect()
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.unsatisfied(a).is_none()
    }

    /// Index of the first constraint (or `usize::MAX` for a domain breach)
    /// that the assignment violates.
    pub fn unsatisfied(&self, a: &Assignment) -> Option<usize> {
        if a.0.len() != self.num_vars() {
            return Some(usize::MAX);
        }
        if (0..self.num_vars()).any(|v| !self.domains[v].contains(a.0[v])) {
            return Some(usize::MAX);
        }
        let mut buf = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            buf.clear();
            buf.extend(c.scope.iter().map(|&v| a.0[v]));
            if !c.relation.contains(&buf) {
                return Some(ci);
            }
        }
        None
    }

    /// Shrinks domains to `domains` and every relation accordingly.
    /// Returns `None` when some domain would be empty.
    pub fn restrict_domains(&self, domains: Vec<ElemSet>) -> Option<Instance> {
        assert_eq!(domains.len(), self.num_vars());
        if domains.iter().any(|d| d.is_empty()) {
            return None;
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let sig: Vec<ElemSet> = c.scope.iter().map(|&v| domains[v]).collect();
                if sig.as_slice() == c.relation.signature() {
                    c.clone()
                } else {
                    Constraint { scope: c.scope.clone(), relation: Arc::new(c.relation.restrict(sig)) }
                }
            })
            .collect();
        Some(Instance {
            variables: self.variables.clone(),
            domains,
            constraints,
            algebra: self.algebra.clone(),
        })
    }

    /// Same variables and domains, new constraint list.
    pub fn with_constraints(&self, constraints: Vec<Constraint>) -> Instance {
        Instance {
            variables: self.variables.clone(),
            domains: self.domains.clone(),
            constraints,
            algebra: self.algebra.clone(),
        }
    }
}

/// A value for every variable, indexed by variable position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<Elem>);

impl Assignment {
    pub fn get(&self, v: usize) -> Elem {
        self.0[v]
    }

    pub fn values(&self) -> &[Elem] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            SolveResult::Sat(a) => Some(a),
            SolveResult::Unsat => None,
        }
    }
}

/// A problem found by [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyDomain { var: usize },
    DomainOutsideUniverse { var: usize },
    ScopeOutOfRange { constraint: usize, var: usize },
    ArityMismatch { constraint: usize, scope_len: usize, arity: usize },
    TupleOutsideDomain { constraint: usize, tuple: Tuple, position: usize },
    SignatureMismatch { constraint: usize, position: usize },
    NotClosed { constraint: usize, op: Op, args: Vec<Tuple>, image: Tuple },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDomain { var } => write!(f, "variable {var} has an empty domain"),
            Violation::DomainOutsideUniverse { var } => {
                write!(f, "domain of variable {var} leaves the universe")
            }
            Violation::ScopeOutOfRange { constraint, var } => {
                write!(f, "constraint {constraint} mentions unknown variable {var}")
            }
            Violation::ArityMismatch { constraint, scope_len, arity } => write!(
                f,
                "constraint {constraint} has scope length {scope_len} but relation arity {arity}"
            ),
            Violation::TupleOutsideDomain { constraint, tuple, position } => write!(
                f,
                "constraint {constraint}: tuple {tuple:?} leaves the domain at position {position}"
            ),
            Violation::SignatureMismatch { constraint, position } => write!(
                f,
                "constraint {constraint}: relation signature differs from the variable domain at position {position}"
            ),
            Violation::NotClosed { constraint, op, args, image } => write!(
                f,
                "constraint {constraint}: not closed under {op}: {op}{args:?} = {image:?}"
            ),
        }
    }
}

/// Lists every broken instance invariant, including relations that are not
/// closed under the algebra's operations. Empty means well-formed.
pub fn validate_instance(p: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let universe = p.algebra.universe();
    for (v, d) in p.domains.iter().enumerate() {
        if d.is_empty() {
            out.push(Violation::EmptyDomain { var: v });
        }
        if !d.is_subset(universe) {
            out.push(Violation::DomainOutsideUniverse { var: v });
        }
    }
    for (ci, c) in p.constraints.iter().enumerate() {
        if let Some(&v) = c.scope.iter().find(|&&v| v >= p.num_vars()) {
            out.push(Violation::ScopeOutOfRange { constraint: ci, var: v });
            continue;
        }
        if c.scope.len() != c.relation.arity() {
            out.push(Violation::ArityMismatch {
                constraint: ci,
                scope_len: c.scope.len(),
                arity: c.relation.arity(),
            });
            continue;
        }
        let mut tuple_problem = false;
        for t in c.relation.tuples() {
            if let Some(pos) = (0..t.len()).find(|&i| !p.domains[c.scope[i]].contains(t[i])) {
                out.push(Violation::TupleOutsideDomain { constraint: ci, tuple: t.clone(), position: pos });
                tuple_problem = true;
            }
        }
        if !tuple_problem {
            if let Some(pos) = (0..c.scope.len()).find(|&i| c.relation.signature()[i] != p.domains[c.scope[i]]) {
                out.push(Violation::SignatureMismatch { constraint: ci, position: pos });
            }
        }
        for op in Op::ALL {
            if let Some((args, image)) = c.relation.closure_witness(&p.algebra, op) {
                out.push(Violation::NotClosed { constraint: ci, op, args, image });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_element_minmax() -> Algebra {
        // f = max, p = max, g = h = max of three: a semilattice pair 0→1
        Algebra::from_fns(2, |a, b| a.max(b), |a, b| a.max(b), |a, b, c| a.max(b).max(c), |a, b, c| a.max(b).max(c))
            .unwrap()
    }

    #[test]
    fn elemset_basics() {
        let s: ElemSet = [0, 2, 5].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert_eq!(ElemSet::full(3).difference(s), ElemSet::singleton(1));
        assert_eq!(ElemSet::full(64).len(), 64);
    }

    #[test]
    fn project_examples() {
        let r = Relation::over_universe(2, 2, [vec![0, 1], vec![1, 1]]).unwrap();
        let p = r.project(&[1]).unwrap();
        assert_eq!(p.tuples().cloned().collect::<Vec<_>>(), vec![vec![1]]);
        assert_eq!(r.project(&[0, 1]).unwrap(), r);

        let r3 = Relation::over_universe(3, 2, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
        let p = r3.project(&[1, 2]).unwrap();
        assert_eq!(p.tuples().cloned().collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn project_rejects_bad_positions() {
        let r = Relation::over_universe(2, 2, [vec![0, 1]]).unwrap();
        assert!(r.project(&[]).is_err());
        assert!(r.project(&[2]).is_err());
        assert!(r.project(&[0, 0]).is_err());
    }

    #[test]
    fn componentwise_arity_mismatch() {
        let alg = two_element_minmax();
        assert!(apply_componentwise(&alg, Op::F, &[&[0, 1]]).is_err());
        assert!(apply_componentwise(&alg, Op::F, &[&[0, 1], &[1]]).is_err());
        assert_eq!(apply_componentwise(&alg, Op::F, &[&[0, 0], &[0, 0]]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn closure_of_singleton_and_product() {
        let alg = two_element_minmax();
        let sig = vec![ElemSet::full(2); 2];
        let r = close_under_ops(&alg, sig.clone(), [vec![0, 0]]).unwrap();
        assert_eq!(r.len(), 1);
        let full = Relation::product(sig.clone()).unwrap();
        let r = close_under_ops(&alg, sig.clone(), full.tuples().cloned()).unwrap();
        assert_eq!(r, full);
        let r = close_under_ops(&alg, sig, [vec![0, 1], vec![1, 0]]).unwrap();
        assert!(r.contains(&[1, 1]));
        assert!(r.is_closed(&alg));
    }

    #[test]
    fn non_conservative_tables_rejected() {
        let r = Algebra::from_fns(2, |_, _| 0, |a, _| a, |a, _, _| a, |a, _, _| a);
        assert!(r.is_err());
    }

    #[test]
    fn validate_reports_tuple_outside_domain() {
        let alg = Arc::new(two_element_minmax());
        let rel = Relation::over_universe(1, 2, [vec![0], vec![1]]).unwrap();
        let p = Instance::with_default_names(alg.clone(), vec![ElemSet::singleton(1)], vec![Constraint::new(vec![0], rel)]);
        let v = validate_instance(&p);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(matches!(&v[0], Violation::TupleOutsideDomain { constraint: 0, tuple, .. } if tuple == &vec![0]));

        let ok = Instance::with_default_names(
            alg,
            vec![ElemSet::full(2); 2],
            vec![Constraint::new(vec![0, 1], Relation::over_universe(2, 2, [vec![0, 0], vec![1, 1]]).unwrap())],
        );
        assert!(validate_instance(&ok).is_empty());
    }
}
