//! The root-type Lax pair `W(t) = W0 + t L0`, indexed by the roots.
//!
//! `W0` is diagonal with entries `(alpha, q0)`. `L0` has diagonal
//! `(alpha, p0)`, off-diagonal entry `i / (alpha - beta, q0)` when
//! `alpha - beta` is a root, and `2i / (alpha, q0)` between `alpha` and
//! `-alpha`. With unit coupling this is Hermitian, and the spectrum of `W(t)`
//! is `{(alpha, q(t))}` along the Calogero-Moser flow.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::{rational, GaussianRational, Rational, RationalPoly};
use crate::rootsys::{AmbientVector, RootSystem, RootSystemError};

/// Largest matrix size for which the symbolic characteristic polynomial is
/// attempted.
pub const CHARPOLY_CAPACITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaxError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("symbolic characteristic polynomial limited to {limit} roots, {ty} has {got}")]
    Capacity { ty: String, limit: usize, got: usize },
}

pub type GaussianMatrix = Vec<Vec<GaussianRational>>;

#[derive(Clone, Debug)]
pub struct LaxPair {
    rs: Arc<RootSystem>,
    q0: AmbientVector,
    p0: AmbientVector,
    w0: Vec<Rational>,
    /// Sparse rows of `L0`: `(column, entry)` in increasing column order.
    l0: Vec<Vec<(usize, GaussianRational)>>,
}

pub fn build_lax(rs: Arc<RootSystem>, q0: &AmbientVector, p0: &AmbientVector) -> Result<LaxPair, LaxError> {
    rs.validate_vector(q0)?;
    rs.validate_vector(p0)?;
    if let Some(root) = rs.wall_contact(q0) {
        return Err(RootSystemError::WallContact { root }.into());
    }
    let m = rs.len();
    let w0: Vec<Rational> = (0..m).map(|a| rs.inner(a, q0)).collect();
    let mut l0 = vec![Vec::new(); m];
    for a in 0..m {
        let ca = rs.coefficients(a);
        for b in 0..m {
            let entry = if a == b {
                let d = rs.inner(a, p0);
                if d.is_zero() {
                    continue;
                }
                GaussianRational::real(d)
            } else if b == rs.negative_of(a) {
                GaussianRational::imag(rational::int(2) / &w0[a])
            } else {
                let diff: Vec<i64> = ca.iter().zip(rs.coefficients(b)).map(|(x, y)| x - y).collect();
                match rs.index_of_coefficients(&diff) {
                    Some(eta) => GaussianRational::imag(w0[eta].recip()),
                    None => continue,
                }
            };
            l0[a].push((b, entry));
        }
    }
    let lax = LaxPair { rs, q0: q0.clone(), p0: p0.clone(), w0, l0 };
    assert!(lax.is_hermitian(), "L0 must be Hermitian");
    Ok(lax)
}

impl LaxPair {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn root_system_arc(&self) -> Arc<RootSystem> {
        self.rs.clone()
    }

    pub fn q0(&self) -> &AmbientVector {
        &self.q0
    }

    pub fn p0(&self) -> &AmbientVector {
        &self.p0
    }

    pub fn size(&self) -> usize {
        self.w0.len()
    }

    pub fn w0_diagonal(&self) -> &[Rational] {
        &self.w0
    }

    pub fn l0_entry(&self, a: usize, b: usize) -> GaussianRational {
        self.l0[a]
            .binary_search_by_key(&b, |(c, _)| *c)
            .map(|k| self.l0[a][k].1.clone())
            .unwrap_or_else(|_| GaussianRational::zero())
    }

    pub fn l0_row(&self, a: usize) -> &[(usize, GaussianRational)] {
        &self.l0[a]
    }

    pub fn l0_dense(&self) -> GaussianMatrix {
        let m = self.size();
        let mut out = vec![vec![GaussianRational::zero(); m]; m];
        for (a, row) in self.l0.iter().enumerate() {
            for (b, v) in row {
                out[a][*b] = v.clone();
            }
        }
        out
    }

    fn is_hermitian(&self) -> bool {
        (0..self.size()).all(|a| self.l0[a].iter().all(|(b, v)| self.l0_entry(*b, a) == v.conj()))
    }

    /// `W0 + t L0`, exactly.
    pub fn w_at(&self, t: &Rational) -> GaussianMatrix {
        let mut out = self.l0_dense();
        for (a, row) in out.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = v.scale(t);
            }
            row[a] += &GaussianRational::real(self.w0[a].clone());
        }
        out
    }

    /// `W0 + t L0` in floating point as separate real and imaginary parts,
    /// row-major.
    pub fn w_at_f64(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.size();
        let mut re = vec![0.0; m * m];
        let mut im = vec![0.0; m * m];
        for a in 0..m {
            re[a * m + a] = rational::to_f64(&self.w0[a]);
            for (b, v) in &self.l0[a] {
                let (x, y) = v.to_f64();
                re[a * m + b] += t * x;
                im[a * m + b] += t * y;
            }
        }
        (re, im)
    }
}

/// `det(lambda I - W(t))` as a polynomial in `lambda` whose coefficients are
/// polynomials in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolyT {
    pub lambda_degree: usize,
    /// `coefficients[k]` multiplies `lambda^k`.
    pub coefficients: Vec<RationalPoly>,
}

impl CharPolyT {
    pub fn coefficient(&self, k: usize) -> &RationalPoly {
        &self.coefficients[k]
    }

    /// The characteristic polynomial of `W(t)` at a fixed time, in `lambda`.
    pub fn at(&self, t: &Rational) -> RationalPoly {
        RationalPoly::new("lambda", self.coefficients.iter().map(|c| c.eval(t)).collect())
    }
}

/// Gaussian integer `(re, im)`.
type GInt = (BigInt, BigInt);
/// Polynomial in `t` with Gaussian integer coefficients, lowest degree first.
type GPoly = Vec<GInt>;

fn g_zero() -> GInt {
    (BigInt::zero(), BigInt::zero())
}

/// `acc[k + shift] += a * b[k]`.
fn gp_mul_add(acc: &mut GPoly, a: &GInt, b: &[GInt], shift: usize) {
    if b.is_empty() || (a.0.is_zero() && a.1.is_zero()) {
        return;
    }
    if acc.len() < b.len() + shift {
        acc.resize(b.len() + shift, g_zero());
    }
    for (k, v) in b.iter().enumerate() {
        let slot = &mut acc[k + shift];
        if !a.0.is_zero() {
            slot.0 += &a.0 * &v.0;
            slot.1 += &a.0 * &v.1;
        }
        if !a.1.is_zero() {
            slot.0 -= &a.1 * &v.1;
            slot.1 += &a.1 * &v.0;
        }
    }
}

fn gp_trim(a: &mut GPoly) {
    while a.last().is_some_and(|c| c.0.is_zero() && c.1.is_zero()) {
        a.pop();
    }
}

fn scaled(z: &GaussianRational, d: &BigInt) -> GInt {
    let to_int = |r: &Rational| {
        let v = r * Rational::from_integer(d.clone());
        debug_assert!(v.is_integer());
        v.to_integer()
    };
    (to_int(&z.re), to_int(&z.im))
}

/// Faddeev-LeVerrier over polynomials in `t`:
/// `M_k = A M_{k-1} + c_{m-k+1} I`, `c_{m-k} = -tr(A M_k) / k`.
/// Runs on `A = D W(t)` with `D` the common denominator of the entries, so
/// every intermediate is a Gaussian integer polynomial and the divisions by
/// `k` are exact; `det(lambda - W) = D^-m det(D lambda - A)`.
pub fn char_poly_t(lax: &LaxPair) -> Result<CharPolyT, LaxError> {
    let m = lax.size();
    if m > CHARPOLY_CAPACITY {
        return Err(LaxError::Capacity {
            ty: lax.rs.ty().to_string(),
            limit: CHARPOLY_CAPACITY,
            got: m,
        });
    }
    let d = lax.w0.iter().map(|w| w.denom().clone()).chain(
        lax.l0.iter().flatten().flat_map(|(_, v)| [v.re.denom().clone(), v.im.denom().clone()]),
    ).fold(BigInt::one(), |acc, x| acc.lcm(&x));
    let w0: Vec<GInt> = lax.w0.iter().map(|w| scaled(&GaussianRational::real(w.clone()), &d)).collect();
    let l0: Vec<Vec<(usize, GInt)>> =
        lax.l0.iter().map(|row| row.iter().map(|(j, v)| (*j, scaled(v, &d))).collect()).collect();
    let mut c: Vec<GPoly> = vec![Vec::new(); m + 1];
    c[m] = vec![(BigInt::one(), BigInt::zero())];
    // M_1 = I
    let mut mk: Vec<Vec<GPoly>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { vec![(BigInt::one(), BigInt::zero())] } else { Vec::new() }).collect())
        .collect();
    for k in 1..=m {
        // A M_k
        let mut am: Vec<Vec<GPoly>> = vec![vec![Vec::new(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc: GPoly = Vec::new();
                gp_mul_add(&mut acc, &w0[i], &mk[i][j], 0);
                for (l, v) in &l0[i] {
                    gp_mul_add(&mut acc, v, &mk[*l][j], 1);
                }
                gp_trim(&mut acc);
                am[i][j] = acc;
            }
        }
        let mut tr: GPoly = Vec::new();
        let one = (BigInt::one(), BigInt::zero());
        for (i, row) in am.iter().enumerate() {
            gp_mul_add(&mut tr, &one, &row[i], 0);
        }
        let kk = BigInt::from(k);
        let mut ck: GPoly = tr
            .iter()
            .map(|(re, im)| {
                let (qr, rr) = re.div_rem(&kk);
                let (qi, ri) = im.div_rem(&kk);
                assert!(rr.is_zero() && ri.is_zero(), "Faddeev-LeVerrier division must be exact");
                (-qr, -qi)
            })
            .collect();
        gp_trim(&mut ck);
        if k < m {
            for (i, row) in am.iter_mut().enumerate() {
                gp_mul_add(&mut row[i], &one, &ck, 0);
                gp_trim(&mut row[i]);
            }
            mk = am;
        }
        c[m - k] = ck;
    }
    let coefficients = c
        .into_iter()
        .enumerate()
        .map(|(j, g)| {
            assert!(g.iter().all(|z| z.1.is_zero()), "imaginary parts of the characteristic polynomial cancel");
            let scale = Rational::from_integer(d.pow((m - j) as u32));
            RationalPoly::new("t", g.into_iter().map(|z| Rational::from_integer(z.0) / &scale).collect())
        })
        .collect();
    Ok(CharPolyT { lambda_degree: m, coefficients })
}
