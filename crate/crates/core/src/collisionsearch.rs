//! Search for positions whose root inner-product multisets coincide without
//! the positions being related by an automorphism of the root system.
//!
//! Candidates are primitive dominant vectors, one per orbit of the diagram
//! automorphisms: integer coordinates in `[-bound, bound]` for types A and
//! D, and simple-root inner products in `[1, bound]` for type E. The work is
//! split into shards by the first coordinate (first simple inner product for
//! type E); each shard can be checkpointed to JSON and reused.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactmath::{rational, Rational};
use crate::rootsys::{AmbientVector, RootKind, RootSystem, RootSystemError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CollisionError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("inner products of {0} are not all integers")]
    NotIntegral(AmbientVector),
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: String, msg: String },
}

/// The positive half of `{(alpha, q)}`, sorted, with the vector it came
/// from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateKey {
    pub canonical_multiset: Vec<i64>,
    pub source: AmbientVector,
}

/// Sorted `|(alpha, q)|` over the positive roots; errors on wall contact or
/// non-integral values.
pub fn multiset_key(rs: &RootSystem, q: &AmbientVector) -> Result<CandidateKey, CollisionError> {
    if q.dim() != rs.dim() {
        return Err(RootSystemError::Dimension { expected: rs.dim(), got: q.dim() }.into());
    }
    let mut key = Vec::with_capacity(rs.num_positive());
    for i in 0..rs.num_positive() {
        let v = rs.inner(i, q);
        if v.is_zero() {
            return Err(RootSystemError::WallContact { root: i }.into());
        }
        if !v.is_integer() {
            return Err(CollisionError::NotIntegral(q.clone()));
        }
        key.push(v.abs().to_integer().to_i64().ok_or_else(|| CollisionError::NotIntegral(q.clone()))?);
    }
    key.sort_unstable();
    Ok(CandidateKey { canonical_multiset: key, source: q.clone() })
}

fn integer_key(rs: &RootSystem, q: &[i64]) -> Vec<i64> {
    // valid only for integer coordinates in the A and D embeddings
    let mut key: Vec<i64> = (0..rs.num_positive())
        .map(|i| {
            rs.root(i)
                .0
                .iter()
                .zip(q)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, x)| a.to_integer().to_i64().unwrap() * x)
                .sum::<i64>()
                .abs()
        })
        .collect();
    key.sort_unstable();
    key
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// First coordinates (type E: first simple inner products) of all shards.
pub fn shard_values(rs: &RootSystem, bound: i64) -> Vec<i64> {
    if bound < 1 {
        return Vec::new();
    }
    match rs.ty().kind {
        RootKind::E => (1..=bound).collect(),
        RootKind::D => (1..=bound).collect(),
        RootKind::A => (0..=bound).collect(),
    }
}

fn is_canonical(rs: &RootSystem, q: &AmbientVector) -> bool {
    rs.diagram_group()
        .iter()
        .skip(1)
        .all(|g| rs.apply_diagram_symmetry(q, g).map(|img| *q >= img).unwrap_or(true))
}

/// Strictly decreasing sequences of `len` integers below `below`, at least
/// `-bound`, summing to `sum`, in lexicographic order.
fn decreasing_with_sum(len: usize, below: i64, bound: i64, sum: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if len == 0 {
        if sum == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let l = len as i64;
    for x in -bound..below {
        // the rest are x-1, ..., each >= -bound
        let max_rest = (l - 1) * x - (l - 1) * l / 2;
        let min_rest = (l - 1) * (-bound) + (l - 1) * (l - 2) / 2;
        if x - bound + l - 1 > x {
            break;
        }
        let need = sum - x;
        if need > max_rest || need < min_rest {
            continue;
        }
        prefix.push(x);
        decreasing_with_sum(len - 1, x, bound, need, prefix, out);
        prefix.pop();
    }
}

/// Candidates of one shard, in lexicographic order.
pub fn shard_candidates(rs: &RootSystem, bound: i64, first: i64) -> Vec<AmbientVector> {
    let n = rs.rank();
    let mut out = Vec::new();
    match rs.ty().kind {
        RootKind::A => {
            let mut raw = Vec::new();
            let mut prefix = vec![first];
            decreasing_with_sum(n, first, bound, -first, &mut prefix, &mut raw);
            for q in raw {
                if gcd_all(&q) == 1 {
                    let v = AmbientVector::from_ints(&q);
                    if is_canonical(rs, &v) {
                        out.push(v);
                    }
                }
            }
        }
        RootKind::D => {
            // q_1 > ... > q_{n-1} > |q_n|
            let mut raw = Vec::new();
            let mut prefix = vec![first];
            fn rec(left: usize, below: i64, prefix: &mut Vec<i64>, raw: &mut Vec<Vec<i64>>) {
                if left == 1 {
                    for last in -(below - 1)..below {
                        prefix.push(last);
                        raw.push(prefix.clone());
                        prefix.pop();
                    }
                    return;
                }
                let min = left as i64 - 1;
                for x in min..below {
                    prefix.push(x);
                    rec(left - 1, x, prefix, raw);
                    prefix.pop();
                }
            }
            if n >= 2 {
                rec(n - 1, first, &mut prefix, &mut raw);
            }
            for q in raw {
                if gcd_all(&q) == 1 {
                    let v = AmbientVector::from_ints(&q);
                    if is_canonical(rs, &v) {
                        out.push(v);
                    }
                }
            }
        }
        RootKind::E => {
            let mut c = vec![first; n];
            for v in c.iter_mut().skip(1) {
                *v = 1;
            }
            loop {
                if gcd_all(&c) == 1 {
                    let vals: Vec<Rational> = c.iter().map(|&x| rational::int(x)).collect();
                    let q = rs.solve_q(&vals);
                    if is_canonical(rs, &q) {
                        out.push(q);
                    }
                }
                // odometer over positions 1..n
                let mut k = n - 1;
                loop {
                    if k == 0 {
                        return out;
                    }
                    if c[k] < bound {
                        c[k] += 1;
                        break;
                    }
                    c[k] = 1;
                    k -= 1;
                }
            }
        }
    }
    out
}

/// All candidates up to `bound`, shard by shard.
pub fn enumerate_candidates(rs: &RootSystem, bound: i64) -> impl Iterator<Item = AmbientVector> + '_ {
    shard_values(rs, bound).into_iter().flat_map(move |s| shard_candidates(rs, bound, s))
}

fn key_of(rs: &RootSystem, q: &AmbientVector) -> Vec<i64> {
    match rs.ty().kind {
        RootKind::E => multiset_key(rs, q).expect("dominant candidates have integral keys").canonical_multiset,
        _ => {
            let ints: Vec<i64> = q.0.iter().map(|x| x.to_integer().to_i64().unwrap()).collect();
            integer_key(rs, &ints)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardState {
    pub system: String,
    pub bound: i64,
    pub shard: i64,
    pub entries: Vec<CandidateKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Collision {
    pub key: Vec<i64>,
    pub q: AmbientVector,
    pub q2: AmbientVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub system: String,
    pub bound: i64,
    pub candidates: usize,
    pub shards: usize,
    pub resumed_shards: usize,
    pub collisions: Vec<Collision>,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Directory holding one JSON checkpoint per shard.
    pub checkpoint_dir: Option<PathBuf>,
    /// Restrict the run to these shard values (first coordinates).
    pub only_shards: Option<Vec<i64>>,
}

fn shard_path(dir: &Path, system: &str, bound: i64, shard: i64) -> PathBuf {
    dir.join(format!("{system}-b{bound}-s{shard:05}.json"))
}

fn load_shard(path: &Path, system: &str, bound: i64, shard: i64) -> Result<Option<ShardState>, CollisionError> {
    if !path.exists() {
        return Ok(None);
    }
    let err = |msg: String| CollisionError::Checkpoint { path: path.display().to_string(), msg };
    let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let state: ShardState = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    if state.system != system || state.bound != bound || state.shard != shard {
        return Err(err("checkpoint belongs to a different search".into()));
    }
    Ok(Some(state))
}

fn save_shard(path: &Path, state: &ShardState) -> Result<(), CollisionError> {
    let err = |msg: String| CollisionError::Checkpoint { path: path.display().to_string(), msg };
    let tmp = path.with_extension("json.tmp");
    let text = serde_json::to_string(state).map_err(|e| err(e.to_string()))?;
    fs::write(&tmp, text).map_err(|e| err(e.to_string()))?;
    fs::rename(&tmp, path).map_err(|e| err(e.to_string()))
}

/// Groups candidates by key and reports every pair of inequivalent vectors
/// sharing a key. The report does not depend on the number of worker
/// threads.
pub fn find_collisions(rs: &RootSystem, bound: i64, opts: &SearchOptions) -> Result<SearchReport, CollisionError> {
    let system = rs.ty().to_string();
    let mut shards = shard_values(rs, bound);
    if let Some(only) = &opts.only_shards {
        shards.retain(|s| only.contains(s));
    }
    if let Some(dir) = &opts.checkpoint_dir {
        fs::create_dir_all(dir)
            .map_err(|e| CollisionError::Checkpoint { path: dir.display().to_string(), msg: e.to_string() })?;
    }
    let results: Vec<(ShardState, bool)> = shards
        .par_iter()
        .map(|&s| {
            let path = opts.checkpoint_dir.as_ref().map(|d| shard_path(d, &system, bound, s));
            if let Some(p) = &path {
                if let Some(state) = load_shard(p, &system, bound, s)? {
                    return Ok((state, true));
                }
            }
            let entries = shard_candidates(rs, bound, s)
                .into_iter()
                .map(|q| CandidateKey { canonical_multiset: key_of(rs, &q), source: q })
                .collect();
            let state = ShardState { system: system.clone(), bound, shard: s, entries };
            if let Some(p) = &path {
                save_shard(p, &state)?;
            }
            Ok((state, false))
        })
        .collect::<Result<_, CollisionError>>()?;
    let resumed_shards = results.iter().filter(|(_, r)| *r).count();
    let mut groups: BTreeMap<Vec<i64>, Vec<AmbientVector>> = BTreeMap::new();
    let mut candidates = 0;
    for (state, _) in &results {
        for e in &state.entries {
            candidates += 1;
            groups.entry(e.canonical_multiset.clone()).or_default().push(e.source.clone());
        }
    }
    let mut collisions = Vec::new();
    for (key, mut members) in groups {
        if members.len() < 2 {
            continue;
        }
        members.sort();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                // confirm exactly: equal multisets, different orbits
                if rs.inner_product_multiset(&members[i]) != rs.inner_product_multiset(&members[j]) {
                    continue;
                }
                if !rs.aut_equivalent(&members[i], &members[j])? {
                    collisions.push(Collision { key: key.clone(), q: members[i].clone(), q2: members[j].clone() });
                }
            }
        }
    }
    collisions.sort();
    Ok(SearchReport { system, bound, candidates, shards: results.len(), resumed_shards, collisions })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub system: String,
    pub q: AmbientVector,
    pub q2: AmbientVector,
    /// `{(alpha, q)}` over all roots, sorted.
    #[serde(with = "rational::vec")]
    pub multiset: Vec<Rational>,
    #[serde(with = "rational::vec")]
    pub multiset2: Vec<Rational>,
    pub equal_keys: bool,
    pub same_orbit: bool,
    pub is_counterexample: bool,
}

/// Exact check that `q` and `q2` share `{(alpha, q)}` but lie in different
/// `Aut(Phi)`-orbits.
pub fn verify_counterexample(
    rs: &RootSystem,
    q: &AmbientVector,
    q2: &AmbientVector,
) -> Result<VerificationRecord, CollisionError> {
    for v in [q, q2] {
        rs.validate_vector(v)?;
    }
    let multiset = rs.inner_product_multiset(q);
    let multiset2 = rs.inner_product_multiset(q2);
    let equal_keys = multiset == multiset2;
    let same_orbit = rs.aut_equivalent(q, q2)?;
    Ok(VerificationRecord {
        system: rs.ty().to_string(),
        q: q.clone(),
        q2: q2.clone(),
        multiset,
        multiset2,
        equal_keys,
        same_orbit,
        is_counterexample: equal_keys && !same_orbit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(s.parse().unwrap())
    }

    #[test]
    fn a1_bound_three() {
        let a1 = rs("A1");
        let c: Vec<_> = enumerate_candidates(&a1, 3).collect();
        assert_eq!(c, vec![AmbientVector::from_ints(&[1, -1])]);
        assert_eq!(enumerate_candidates(&a1, 0).count(), 0);
        assert_eq!(multiset_key(&a1, &c[0]).unwrap().canonical_multiset, vec![2]);
    }

    #[test]
    fn a5_keys() {
        let a5 = rs("A5");
        let want = vec![6, 6, 12, 12, 18, 24, 30, 30, 36, 36, 42, 48, 54, 60, 66];
        let q = AmbientVector::from_ints(&[-28, -22, -16, 8, 20, 38]);
        let q2 = AmbientVector::from_ints(&[-34, -28, 2, 8, 20, 32]);
        assert_eq!(multiset_key(&a5, &q).unwrap().canonical_multiset, want);
        assert_eq!(multiset_key(&a5, &q2).unwrap().canonical_multiset, want);
        let dom = a5.to_dominant(&q).unwrap().dominant;
        assert_eq!(integer_key(&a5, &[38, 20, 8, -16, -22, -28]), want);
        assert_eq!(key_of(&a5, &dom), want);
    }

    #[test]
    fn a5_stream_contains_primitive_q() {
        let a5 = rs("A5");
        let target = AmbientVector::from_ints(&[19, 10, 4, -8, -11, -14]);
        assert!(shard_candidates(&a5, 19, 19).contains(&target));
        let mirror = AmbientVector::from_ints(&[14, 11, 8, -4, -10, -19]);
        assert!(!shard_candidates(&a5, 19, 14).contains(&mirror));
    }

    #[test]
    fn candidates_are_dominant_primitive_sorted() {
        for (ty, b) in [("A3", 6), ("D4", 5), ("D5", 5)] {
            let r = rs(ty);
            let all: Vec<_> = enumerate_candidates(&r, b).collect();
            assert!(!all.is_empty());
            assert!(all.windows(2).all(|w| w[0] < w[1]), "{ty} order");
            for q in &all {
                assert!(r.is_dominant(q), "{ty} {q}");
                assert!(q.0.iter().all(|x| x.abs() <= rational::int(b)));
                assert!(is_canonical(&r, q));
            }
        }
        let e6 = rs("E6");
        let all: Vec<_> = enumerate_candidates(&e6, 2).collect();
        assert!(all.iter().all(|q| e6.is_dominant(q)));
    }

    #[test]
    fn verification_records() {
        let a5 = rs("A5");
        let q = AmbientVector::from_ints(&[-28, -22, -16, 8, 20, 38]);
        let q2 = AmbientVector::from_ints(&[-34, -28, 2, 8, 20, 32]);
        let r = verify_counterexample(&a5, &q, &q2).unwrap();
        assert!(r.equal_keys && !r.same_orbit && r.is_counterexample);
        let r = verify_counterexample(&a5, &q, &q).unwrap();
        assert!(r.same_orbit && !r.is_counterexample);
        let img = a5.diagram_automorphism_image(&q).image;
        let r = verify_counterexample(&a5, &q, &img).unwrap();
        assert!(r.equal_keys && r.same_orbit && !r.is_counterexample);
    }

    #[test]
    fn small_searches_are_empty() {
        let r = find_collisions(&rs("A2"), 20, &SearchOptions::default()).unwrap();
        assert!(r.collisions.is_empty());
        assert!(r.candidates > 0);
    }
}
