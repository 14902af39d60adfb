//! Assigning observed eigenvalues to roots.
//!
//! A matching is a multiplicity-respecting bijection `phi` from the roots to
//! the spectrum with `phi(alpha) = (alpha, q)` for some `q`. Only dominant
//! matchings are enumerated: every positive root receives a positive value,
//! and negative roots are mirrored. Values are chosen for the simple roots
//! one Dynkin node at a time; as soon as all simple roots in a positive
//! root's support are fixed, that root's value is forced and must be found
//! in the remaining inventory.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::eigen::Spectrum;
use crate::exactmath::{rational, Rational};
use crate::rootsys::{AmbientVector, RootKind, RootSystem};

/// Largest rank for which the floating-point search is attempted.
pub const NUMERIC_RANK_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatchError {
    #[error("expected {expected} values (one per root), got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("values are not symmetric under negation")]
    NotSymmetric,
    #[error("a zero value means q lies on a wall")]
    ZeroValue,
    #[error("no consistent matching; best residual {best_residual:e}")]
    NoMatching { best_residual: f64 },
    #[error("spectrum is degenerate at this time (ambiguous clustering)")]
    Degenerate,
    #[error("numeric matching supports rank <= {NUMERIC_RANK_CAP} and types A, D; use exact values for {0}")]
    RankCap(String),
}

/// Field of values a matching can be computed over.
pub trait MatchScalar: Clone + std::fmt::Debug + Send + Sync {
    fn mul_int(&self, k: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero() -> Self;
    fn total_cmp(&self, o: &Self) -> Ordering;
    fn dist(&self, o: &Self) -> f64;
    fn close(&self, o: &Self, tol: f64) -> bool;
    fn solve(rs: &RootSystem, simple: &[Self]) -> Vec<Self>;
}

impl MatchScalar for Rational {
    fn mul_int(&self, k: i64) -> Self {
        self * rational::int(k)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn dist(&self, o: &Self) -> f64 {
        rational::to_f64(&(self - o).abs())
    }
    fn close(&self, o: &Self, _tol: f64) -> bool {
        self == o
    }
    fn solve(rs: &RootSystem, simple: &[Self]) -> Vec<Self> {
        rs.solve_q(simple).0
    }
}

impl MatchScalar for f64 {
    fn mul_int(&self, k: i64) -> Self {
        self * k as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn zero() -> Self {
        0.0
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        f64::total_cmp(self, o)
    }
    fn dist(&self, o: &Self) -> f64 {
        (self - o).abs()
    }
    fn close(&self, o: &Self, tol: f64) -> bool {
        (self - o).abs() <= tol
    }
    fn solve(rs: &RootSystem, simple: &[Self]) -> Vec<Self> {
        rs.solve_q_f64(simple)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matching<S> {
    /// `phi(root_i)` for every root index.
    pub assignment: Vec<S>,
    pub simple_values: Vec<S>,
    pub induced_q: Vec<S>,
    /// `max |phi(alpha) - (alpha, induced_q)|`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchReport<S> {
    /// Sorted by induced `q`, lexicographically.
    pub matchings: Vec<Matching<S>>,
    /// Indices into `matchings`, grouped by `Aut(Phi)`-orbit of induced `q`.
    pub orbit_classes: Vec<Vec<usize>>,
    pub ambiguous: bool,
}

/// Distinct positive values with multiplicities, ascending.
struct Inventory<S> {
    values: Vec<S>,
    counts: Vec<usize>,
}

fn bfs_order(rs: &RootSystem) -> Vec<usize> {
    let n = rs.rank();
    let c = rs.cartan_matrix();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for j in 0..n {
            if !seen[j] && c[i][j] != 0 {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    order
}

struct Search<'a, S: MatchScalar> {
    rs: &'a RootSystem,
    order: Vec<usize>,
    /// Non-simple positive roots whose support is complete at each step.
    completes: Vec<Vec<usize>>,
    inv: Inventory<S>,
    tol: f64,
    simple_vals: Vec<S>,
    picked: Vec<usize>,
    found: Vec<(Vec<S>, Vec<usize>)>,
    best_residual: f64,
}

impl<S: MatchScalar> Search<'_, S> {
    fn value_of(&self, root: usize) -> S {
        let mut acc = S::zero();
        for (k, &c) in self.rs.coefficients(root).iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.simple_vals[k].mul_int(c));
            }
        }
        acc
    }

    fn step(&mut self, s: usize) {
        if s == self.order.len() {
            self.found.push((self.simple_vals.clone(), self.picked.clone()));
            return;
        }
        let r = self.order[s];
        for c in 0..self.inv.values.len() {
            if self.inv.counts[c] == 0 {
                continue;
            }
            self.inv.counts[c] -= 1;
            self.simple_vals[r] = self.inv.values[c].clone();
            self.picked[r] = c;
            self.forced(s, 0);
            self.inv.counts[c] += 1;
        }
    }

    fn forced(&mut self, s: usize, k: usize) {
        if k == self.completes[s].len() {
            self.step(s + 1);
            return;
        }
        let root = self.completes[s][k];
        let v = self.value_of(root);
        let vals = &self.inv.values;
        let pos = vals.partition_point(|x| x.total_cmp(&v) == Ordering::Less);
        let mut lo = pos;
        while lo > 0 && vals[lo - 1].close(&v, self.tol) {
            lo -= 1;
        }
        let mut hi = pos;
        while hi < vals.len() && vals[hi].close(&v, self.tol) {
            hi += 1;
        }
        let mut any = false;
        for c in lo..hi {
            if self.inv.counts[c] == 0 {
                continue;
            }
            any = true;
            self.inv.counts[c] -= 1;
            self.picked[root] = c;
            self.forced(s, k + 1);
            self.inv.counts[c] += 1;
        }
        if !any {
            let vals = &self.inv.values;
            let near = [pos.checked_sub(1), Some(pos)]
                .into_iter()
                .flatten()
                .filter(|&c| c < vals.len())
                .map(|c| vals[c].dist(&v))
                .fold(f64::INFINITY, f64::min);
            self.best_residual = self.best_residual.min(near);
        }
    }
}

fn run_search<S: MatchScalar>(rs: &RootSystem, inv: Inventory<S>, tol: f64) -> Result<MatchReport<S>, MatchError> {
    let order = bfs_order(rs);
    let npos = rs.num_positive();
    let rank = rs.rank();
    let mut step_of = vec![0usize; rank];
    for (s, &r) in order.iter().enumerate() {
        step_of[r] = s;
    }
    let mut completes = vec![Vec::new(); rank];
    for root in rank..npos {
        let last = rs
            .coefficients(root)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, _)| step_of[k])
            .max()
            .expect("nonzero root");
        completes[last].push(root);
    }
    let mut search = Search {
        rs,
        order,
        completes,
        inv,
        tol,
        simple_vals: vec![S::zero(); rank],
        picked: vec![0; npos],
        found: Vec::new(),
        best_residual: f64::INFINITY,
    };
    search.step(0);
    if search.found.is_empty() {
        return Err(MatchError::NoMatching { best_residual: search.best_residual });
    }
    let mut matchings: Vec<Matching<S>> = Vec::new();
    let mut seen: BTreeSet<Vec<OrdKey<S>>> = BTreeSet::new();
    for (simple, picked) in search.found {
        if !seen.insert(simple.iter().cloned().map(OrdKey).collect()) {
            continue;
        }
        let mut assignment = vec![S::zero(); 2 * npos];
        let mut residual: f64 = 0.0;
        for root in 0..npos {
            let v = search.inv.values[picked[root]].clone();
            let mut lin = S::zero();
            for (k, &c) in rs.coefficients(root).iter().enumerate() {
                if c != 0 {
                    lin = lin.add(&simple[k].mul_int(c));
                }
            }
            residual = residual.max(v.dist(&lin));
            assignment[rs.negative_of(root)] = v.neg();
            assignment[root] = v;
        }
        let induced_q = S::solve(rs, &simple);
        matchings.push(Matching { assignment, simple_values: simple, induced_q, residual });
    }
    matchings.sort_by(|a, b| lex(&a.induced_q, &b.induced_q));
    let orbit_classes = orbit_classes(rs, &matchings, tol);
    let ambiguous = orbit_classes.len() >= 2;
    Ok(MatchReport { matchings, orbit_classes, ambiguous })
}

#[derive(Clone, Debug)]
struct OrdKey<S>(S);

impl<S: MatchScalar> PartialEq for OrdKey<S> {
    fn eq(&self, o: &Self) -> bool {
        self.0.total_cmp(&o.0) == Ordering::Equal
    }
}
impl<S: MatchScalar> Eq for OrdKey<S> {}
impl<S: MatchScalar> PartialOrd for OrdKey<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: MatchScalar> Ord for OrdKey<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

fn lex<S: MatchScalar>(a: &[S], b: &[S]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Dominant vectors are `Aut(Phi)`-equivalent exactly when some diagram
/// symmetry permutes their simple-root values onto each other.
fn orbit_classes<S: MatchScalar>(rs: &RootSystem, ms: &[Matching<S>], tol: f64) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        let home = classes.iter_mut().find(|cl| {
            let rep = &ms[cl[0]].simple_values;
            rs.diagram_group()
                .iter()
                .any(|perm| perm.iter().enumerate().all(|(k, &pk)| rep[k].close(&m.simple_values[pk], tol)))
        });
        match home {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

/// Numeric step 2: all dominant matchings of a clustered spectrum.
pub fn enumerate_matchings(rs: &RootSystem, spectrum: &Spectrum, tolerance: f64) -> Result<MatchReport<f64>, MatchError> {
    if rs.rank() > NUMERIC_RANK_CAP || rs.ty().kind == RootKind::E {
        return Err(MatchError::RankCap(rs.ty().to_string()));
    }
    if spectrum.values.len() != rs.len() {
        return Err(MatchError::SizeMismatch { expected: rs.len(), got: spectrum.values.len() });
    }
    if spectrum.ambiguous {
        return Err(MatchError::Degenerate);
    }
    let cl = &spectrum.clusters;
    if cl.iter().any(|c| c.value.abs() <= tolerance) {
        return Err(MatchError::ZeroValue);
    }
    let neg: Vec<_> = cl.iter().filter(|c| c.value < 0.0).collect();
    let pos: Vec<_> = cl.iter().filter(|c| c.value > 0.0).collect();
    if neg.len() != pos.len()
        || pos
            .iter()
            .zip(neg.iter().rev())
            .any(|(p, n)| p.multiplicity != n.multiplicity || (p.value + n.value).abs() > tolerance)
    {
        return Err(MatchError::NotSymmetric);
    }
    let inv = Inventory {
        values: pos.iter().zip(neg.iter().rev()).map(|(p, n)| 0.5 * (p.value - n.value)).collect(),
        counts: pos.iter().map(|c| c.multiplicity).collect(),
    };
    run_search(rs, inv, tolerance)
}

/// Default numeric matching tolerance for a spectrum.
pub fn default_match_tolerance(spectrum: &Spectrum) -> f64 {
    1e-6 * (1.0 + spectrum.max_abs())
}

/// Exact step 2 on a multiset of rationals.
pub fn enumerate_matchings_exact(rs: &RootSystem, multiset: &[Rational]) -> Result<MatchReport<Rational>, MatchError> {
    if multiset.len() != rs.len() {
        return Err(MatchError::SizeMismatch { expected: rs.len(), got: multiset.len() });
    }
    let mut sorted = multiset.to_vec();
    sorted.sort();
    if sorted.iter().any(|v| v.is_zero()) {
        return Err(MatchError::ZeroValue);
    }
    let mut negated: Vec<Rational> = sorted.iter().map(|v| -v).collect();
    negated.reverse();
    if negated != sorted {
        return Err(MatchError::NotSymmetric);
    }
    let mut values: Vec<Rational> = Vec::new();
    let mut counts = Vec::new();
    for v in sorted.into_iter().filter(|v| v.is_positive()) {
        if values.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(v);
            counts.push(1);
        }
    }
    run_search(rs, Inventory { values, counts }, 0.0)
}

/// Whether the exact multiset admits dominant solutions in two or more
/// `Aut(Phi)`-orbits.
pub fn is_ambiguous(rs: &RootSystem, multiset: &[Rational]) -> Result<bool, MatchError> {
    Ok(enumerate_matchings_exact(rs, multiset)?.ambiguous)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `phi(root_i) + phi(root_j) != phi(root_k)`.
    Sum { i: usize, j: usize, k: usize },
    /// `phi(-root_i) != -phi(root_i)`.
    Negation { i: usize },
}

/// Checks additivity on every additivity triple and oddness on every root.
pub fn check_additive<S: MatchScalar>(rs: &RootSystem, assignment: &[S], tol: f64) -> (bool, Vec<Violation>) {
    let mut out = Vec::new();
    for &(i, j, k) in rs.additivity_relations() {
        if !assignment[i].add(&assignment[j]).close(&assignment[k], tol) {
            out.push(Violation::Sum { i, j, k });
        }
    }
    for i in 0..rs.len() {
        if !assignment[rs.negative_of(i)].close(&assignment[i].neg(), tol) {
            out.push(Violation::Negation { i });
        }
    }
    (out.is_empty(), out)
}

/// `{(alpha, q)}` over all roots, sorted.
pub fn exact_multiset(rs: &RootSystem, q: &AmbientVector) -> Vec<Rational> {
    rs.inner_product_multiset(q)
}
