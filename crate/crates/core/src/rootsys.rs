//! Irreducible simply-laced root systems (types A, D, E).
//!
//! Conventions:
//! * simple roots are Bourbaki's: `A_n` uses `e_i - e_{i+1}` in `R^{n+1}`,
//!   `D_n` adds `e_{n-1} + e_n` in `R^n`, and `E_6, E_7, E_8` live in `R^8`;
//! * the dominant chamber is `(alpha_i, q) > 0` for every simple root, so an
//!   `A_n` vector is dominant when its coordinates strictly decrease;
//! * positive roots are ordered by height, then by simple-root coefficient
//!   vector in decreasing lexicographic order, and root `i + npos` is the
//!   negative of root `i`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::rational::{self, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSystemError {
    #[error("unsupported root system {0}")]
    Unsupported(String),
    #[error("vector touches the wall of root {root} ((alpha, q) = 0)")]
    WallContact { root: usize },
    #[error("expected a vector of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vector does not lie in the span of the roots")]
    NotInSpan,
    #[error("{0}")]
    Automorphism(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootSystemType {
    pub kind: RootKind,
    pub rank: usize,
}

impl RootSystemType {
    pub fn new(kind: RootKind, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match kind {
            RootKind::A => rank >= 1,
            RootKind::D => rank >= 4,
            RootKind::E => (6..=8).contains(&rank),
        };
        if !ok {
            return Err(RootSystemError::Unsupported(format!("{kind:?}{rank}")));
        }
        Ok(Self { kind, rank })
    }

    /// Dimension of the ambient space the roots are written in.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            RootKind::A => self.rank + 1,
            RootKind::D => self.rank,
            RootKind::E => 8,
        }
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.kind, self.rank)
    }
}

impl FromStr for RootSystemType {
    type Err = RootSystemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RootSystemError::Unsupported(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => RootKind::A,
            Some('D') => RootKind::D,
            Some('E') => RootKind::E,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().trim_start_matches('_').parse().map_err(|_| bad())?;
        Self::new(kind, rank)
    }
}

impl Serialize for RootSystemType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootSystemType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the ambient Euclidean space, with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientVector(#[serde(with = "rational::vec")] pub Vec<Rational>);

impl AmbientVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Self(xs.iter().map(|&x| rational::int(x)).collect())
    }

    pub fn parse(s: &str) -> Result<Self, crate::exactmath::ExactError> {
        Ok(Self(rational::parse_list(s)?))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, o: &Self) -> Rational {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rational::to_string).collect()
    }
}

impl fmt::Display for AmbientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Result of moving a vector into the dominant chamber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberReduction {
    pub dominant: AmbientVector,
    /// Simple reflections in the order they were applied.
    pub weyl_word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismImage {
    pub image: AmbientVector,
    /// Set when the diagram has no nontrivial automorphism (A1, E7, E8) and
    /// the identity was returned.
    pub trivial_group: bool,
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    ty: RootSystemType,
    roots: Vec<AmbientVector>,
    roots_f64: Vec<Vec<f64>>,
    /// Simple-root coordinates of each root.
    coeffs: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    npos: usize,
    cartan: Vec<Vec<i64>>,
    cartan_inv: Vec<Vec<Rational>>,
    additivity: Vec<(usize, usize, usize)>,
    /// Permutations of the simple roots induced by diagram automorphisms,
    /// identity first.
    diagram_group: Vec<Vec<usize>>,
    /// The designated order-2 automorphism used for fundamental domains.
    involution: Option<Vec<usize>>,
}

fn simple_roots(ty: RootSystemType) -> Vec<AmbientVector> {
    let n = ty.rank;
    let dim = ty.ambient_dim();
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); dim];
        v[i] = Rational::one();
        v
    };
    let diff = |i: usize, j: usize| {
        let mut v = unit(i);
        v[j] = -Rational::one();
        AmbientVector(v)
    };
    match ty.kind {
        RootKind::A => (0..n).map(|i| diff(i, i + 1)).collect(),
        RootKind::D => {
            let mut s: Vec<_> = (0..n - 1).map(|i| diff(i, i + 1)).collect();
            let mut last = unit(n - 2);
            last[n - 1] = Rational::one();
            s.push(AmbientVector(last));
            s
        }
        RootKind::E => {
            let half = rat(1, 2);
            let mut a1 = vec![-half.clone(); 8];
            a1[0] = half.clone();
            a1[7] = half;
            let mut a2 = unit(0);
            a2[1] = Rational::one();
            let mut s = vec![AmbientVector(a1), AmbientVector(a2), diff(1, 0)];
            for i in 2..7 {
                s.push(diff(i, i - 1));
            }
            s.truncate(n);
            s
        }
    }
}

fn diagram_group(ty: RootSystemType) -> (Vec<Vec<usize>>, Option<Vec<usize>>) {
    let n = ty.rank;
    let id: Vec<usize> = (0..n).collect();
    let swap = |pairs: &[(usize, usize)]| {
        let mut p = id.clone();
        for &(a, b) in pairs {
            p.swap(a, b);
        }
        p
    };
    match (ty.kind, n) {
        (RootKind::A, 1) => (vec![id], None),
        (RootKind::A, _) => {
            let rev: Vec<usize> = (0..n).rev().collect();
            (vec![id, rev.clone()], Some(rev))
        }
        (RootKind::D, 4) => {
            // all permutations of the three outer nodes {0, 2, 3}
            let outer = [0usize, 2, 3];
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let group = perms
                .iter()
                .map(|pm| {
                    let mut p = id.clone();
                    for (k, &src) in outer.iter().enumerate() {
                        p[src] = outer[pm[k]];
                    }
                    p
                })
                .collect();
            (group, Some(swap(&[(2, 3)])))
        }
        (RootKind::D, _) => {
            let s = swap(&[(n - 2, n - 1)]);
            (vec![id, s.clone()], Some(s))
        }
        (RootKind::E, 6) => {
            let s = swap(&[(0, 5), (2, 4)]);
            (vec![id, s.clone()], Some(s))
        }
        (RootKind::E, _) => (vec![id], None),
    }
}

/// Inverse of a symmetric positive definite integer matrix by Gauss-Jordan.
fn invert(m: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| rational::int(x)).collect()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).expect("Cartan matrix is invertible");
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c].clone();
        for k in 0..n {
            a[c][k] = &a[c][k] / &d;
            inv[c][k] = &inv[c][k] / &d;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..n {
                    let x = &f * &a[c][k];
                    a[r][k] -= x;
                    let y = &f * &inv[c][k];
                    inv[r][k] -= y;
                }
            }
        }
    }
    inv
}

fn reflect(v: &AmbientVector, alpha: &AmbientVector) -> AmbientVector {
    // simply laced: (alpha, alpha) = 2
    v.sub(&alpha.scale(&v.dot(alpha)))
}

impl RootSystem {
    pub fn new(ty: RootSystemType) -> Self {
        let simple = simple_roots(ty);
        let n = ty.rank;
        let cartan: Vec<Vec<i64>> = simple
            .iter()
            .map(|a| simple.iter().map(|b| a.dot(b).to_integer().try_into().unwrap()).collect())
            .collect();
        let cartan_inv = invert(&cartan);

        // Weyl orbit of the simple roots is the whole root system.
        let mut all: Vec<AmbientVector> = simple.clone();
        let mut seen: std::collections::HashSet<AmbientVector> = all.iter().cloned().collect();
        let mut frontier = all.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in &frontier {
                for a in &simple {
                    let w = reflect(v, a);
                    if seen.insert(w.clone()) {
                        next.push(w.clone());
                        all.push(w);
                    }
                }
            }
            frontier = next;
        }

        let coeff_of = |v: &AmbientVector| -> Vec<i64> {
            let ip: Vec<Rational> = simple.iter().map(|a| a.dot(v)).collect();
            (0..n)
                .map(|i| {
                    let c: Rational = (0..n).map(|j| &cartan_inv[i][j] * &ip[j]).sum();
                    assert!(c.is_integer(), "root with non-integral simple coordinates");
                    c.to_integer().try_into().unwrap()
                })
                .collect()
        };
        let mut pos: Vec<(Vec<i64>, AmbientVector)> = all
            .into_iter()
            .map(|v| (coeff_of(&v), v))
            .filter(|(c, _)| c.iter().all(|&x| x >= 0))
            .collect();
        pos.sort_by(|(a, _), (b, _)| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let npos = pos.len();
        let mut roots = Vec::with_capacity(2 * npos);
        let mut coeffs = Vec::with_capacity(2 * npos);
        for (c, v) in &pos {
            roots.push(v.clone());
            coeffs.push(c.clone());
        }
        for (c, v) in &pos {
            roots.push(v.neg());
            coeffs.push(c.iter().map(|x| -x).collect());
        }
        let index: HashMap<Vec<i64>, usize> = coeffs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut additivity = Vec::new();
        for i in 0..roots.len() {
            for j in 0..roots.len() {
                let sum: Vec<i64> = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a + b).collect();
                if let Some(&k) = index.get(&sum) {
                    additivity.push((i, j, k));
                }
            }
        }
        let roots_f64 = roots.iter().map(|r| r.to_f64()).collect();
        let (diagram_group, involution) = diagram_group(ty);
        Self {
            ty,
            roots,
            roots_f64,
            coeffs,
            index,
            npos,
            cartan,
            cartan_inv,
            additivity,
            diagram_group,
            involution,
        }
    }

    pub fn ty(&self) -> RootSystemType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    pub fn dim(&self) -> usize {
        self.ty.ambient_dim()
    }

    pub fn roots(&self) -> &[AmbientVector] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &AmbientVector {
        &self.roots[i]
    }

    pub fn root_f64(&self, i: usize) -> &[f64] {
        &self.roots_f64[i]
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    /// Simple roots are the first `rank` roots.
    pub fn simple_roots(&self) -> &[AmbientVector] {
        &self.roots[..self.ty.rank]
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.npos
    }

    pub fn negative_of(&self, i: usize) -> usize {
        (i + self.npos) % (2 * self.npos)
    }

    /// Simple-root coordinates of root `i`.
    pub fn coefficients(&self, i: usize) -> &[i64] {
        &self.coeffs[i]
    }

    pub fn height(&self, i: usize) -> i64 {
        self.coeffs[i].iter().sum()
    }

    pub fn index_of_coefficients(&self, c: &[i64]) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Index of the root equal to `v`, if any.
    pub fn index_of(&self, v: &AmbientVector) -> Option<usize> {
        if v.dim() != self.dim() {
            return None;
        }
        let i = self.index_of_coefficients(&self.simple_coordinates(v)?)?;
        (self.roots[i] == *v).then_some(i)
    }

    fn simple_coordinates(&self, v: &AmbientVector) -> Option<Vec<i64>> {
        let n = self.rank();
        let ip: Vec<Rational> = self.simple_roots().iter().map(|a| a.dot(v)).collect();
        (0..n)
            .map(|i| {
                let c: Rational = (0..n).map(|j| &self.cartan_inv[i][j] * &ip[j]).sum();
                c.is_integer().then(|| c.to_integer().try_into().ok()).flatten()
            })
            .collect()
    }

    pub fn highest_root(&self) -> &AmbientVector {
        &self.roots[self.npos - 1]
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn cartan_inverse(&self) -> &[Vec<Rational>] {
        &self.cartan_inv
    }

    /// Ordered triples `(i, j, k)` with `root_i + root_j = root_k`.
    pub fn additivity_relations(&self) -> &[(usize, usize, usize)] {
        &self.additivity
    }

    pub fn diagram_group(&self) -> &[Vec<usize>] {
        &self.diagram_group
    }

    pub fn diagram_involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    pub fn inner(&self, i: usize, q: &AmbientVector) -> Rational {
        self.roots[i].dot(q)
    }

    pub fn inner_f64(&self, i: usize, q: &[f64]) -> f64 {
        self.roots_f64[i].iter().zip(q).map(|(a, b)| a * b).sum()
    }

    /// `(alpha_i, q)` for the simple roots.
    pub fn simple_values(&self, q: &AmbientVector) -> Vec<Rational> {
        (0..self.rank()).map(|i| self.inner(i, q)).collect()
    }

    pub fn simple_values_f64(&self, q: &[f64]) -> Vec<f64> {
        (0..self.rank()).map(|i| self.inner_f64(i, q)).collect()
    }

    /// The unique vector in the span of the roots with the given simple-root
    /// inner products: `q = sum_k (C^-1 c)_k alpha_k`.
    pub fn solve_q(&self, values: &[Rational]) -> AmbientVector {
        let n = self.rank();
        assert_eq!(values.len(), n, "one value per simple root");
        let mut q = AmbientVector::zeros(self.dim());
        for k in 0..n {
            let w: Rational = (0..n).map(|j| &self.cartan_inv[k][j] * &values[j]).sum();
            if !w.is_zero() {
                q = q.add(&self.roots[k].scale(&w));
            }
        }
        q
    }

    pub fn solve_q_f64(&self, values: &[f64]) -> Vec<f64> {
        let n = self.rank();
        assert_eq!(values.len(), n, "one value per simple root");
        let mut q = vec![0.0; self.dim()];
        for k in 0..n {
            let w: f64 = (0..n).map(|j| rational::to_f64(&self.cartan_inv[k][j]) * values[j]).sum();
            for (x, a) in q.iter_mut().zip(&self.roots_f64[k]) {
                *x += w * a;
            }
        }
        q
    }

    /// Checks dimension and that `q` lies in the span of the roots.
    pub fn validate_vector(&self, q: &AmbientVector) -> Result<(), RootSystemError> {
        if q.dim() != self.dim() {
            return Err(RootSystemError::Dimension { expected: self.dim(), got: q.dim() });
        }
        if self.solve_q(&self.simple_values(q)) != *q {
            return Err(RootSystemError::NotInSpan);
        }
        Ok(())
    }

    /// First root whose hyperplane contains `q`, if any.
    pub fn wall_contact(&self, q: &AmbientVector) -> Option<usize> {
        (0..self.npos).find(|&i| self.inner(i, q).is_zero())
    }

    pub fn is_dominant(&self, q: &AmbientVector) -> bool {
        self.simple_values(q).iter().all(|v| v.is_positive())
    }

    /// Moves `q` into the dominant chamber by simple reflections.
    pub fn to_dominant(&self, q: &AmbientVector) -> Result<ChamberReduction, RootSystemError> {
        if q.dim() != self.dim() {
            return Err(RootSystemError::Dimension { expected: self.dim(), got: q.dim() });
        }
        if let Some(root) = self.wall_contact(q) {
            return Err(RootSystemError::WallContact { root });
        }
        let mut v = q.clone();
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| self.inner(i, &v).is_negative()) {
            v = reflect(&v, &self.roots[i]);
            word.push(i);
        }
        Ok(ChamberReduction { dominant: v, weyl_word: word })
    }

    /// Applies the simple reflections of `word` in order.
    pub fn apply_weyl_word(&self, v: &AmbientVector, word: &[usize]) -> AmbientVector {
        word.iter().fold(v.clone(), |acc, &i| reflect(&acc, &self.roots[i]))
    }

    /// Applies the linear isometry that permutes simple roots by `perm`
    /// (`alpha_i -> alpha_perm[i]`).
    pub fn apply_diagram_symmetry(&self, q: &AmbientVector, perm: &[usize]) -> Result<AmbientVector, RootSystemError> {
        if !self.diagram_group.iter().any(|p| p == perm) {
            return Err(RootSystemError::Automorphism(format!(
                "{perm:?} is not a diagram automorphism of {}",
                self.ty
            )));
        }
        let c = self.simple_values(q);
        // (alpha_perm[i], L q) = (alpha_i, q)
        let mut permuted = vec![Rational::zero(); self.rank()];
        for (i, &pi) in perm.iter().enumerate() {
            permuted[pi] = c[i].clone();
        }
        Ok(self.solve_q(&permuted))
    }

    /// Image under the designated diagram involution; the identity (flagged)
    /// for systems whose diagram has no symmetry.
    pub fn diagram_automorphism_image(&self, q: &AmbientVector) -> AutomorphismImage {
        match &self.involution {
            Some(perm) => AutomorphismImage {
                image: self.apply_diagram_symmetry(q, perm).expect("involution is in the group"),
                trivial_group: false,
            },
            None => AutomorphismImage { image: q.clone(), trivial_group: true },
        }
    }

    /// Whether `q2` lies in the `Aut(Phi)`-orbit of `q`.
    pub fn aut_equivalent(&self, q: &AmbientVector, q2: &AmbientVector) -> Result<bool, RootSystemError> {
        let a = self.simple_values(&self.to_dominant(q)?.dominant);
        let b = self.simple_values(&self.to_dominant(q2)?.dominant);
        Ok(self
            .diagram_group
            .iter()
            .any(|perm| perm.iter().enumerate().all(|(i, &pi)| a[i] == b[pi])))
    }

    /// The sorted multiset `{(alpha, q)}` over all roots.
    pub fn inner_product_multiset(&self, q: &AmbientVector) -> Vec<Rational> {
        let mut v: Vec<Rational> = (0..self.len()).map(|i| self.inner(i, q)).collect();
        v.sort();
        v
    }

    /// Simple roots whose difference defines the fundamental-domain
    /// boundary, for systems with exactly two diagram automorphisms.
    pub fn boundary_pair(&self) -> Option<(usize, usize)> {
        if self.diagram_group.len() != 2 {
            return None;
        }
        let n = self.rank();
        match self.ty.kind {
            RootKind::A => Some((0, n - 1)),
            RootKind::D => Some((n - 2, n - 1)),
            RootKind::E => Some((0, 5)),
        }
    }
}
