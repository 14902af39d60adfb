//! Square-free decomposition and complete factorization over the rationals.
//!
//! Factoring follows the classical Zassenhaus route: square-free parts,
//! factorization modulo a small prime by Berlekamp, quadratic Hensel lifting
//! of the modular factors, then recombination of subsets by trial division.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::modp::{Field, PPoly};
use super::poly::RationalPoly;
use super::rational::Rational;
use super::resultant::poly_gcd;
use super::zpoly::{self, ZPoly};
use super::ExactError;

/// Degree cap for [`factor_rationals`].
pub const MAX_FACTOR_DEGREE: usize = 64;

/// Smallest prime tried for the modular image.
const FIRST_PRIME: u64 = 101;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub poly: RationalPoly,
    pub multiplicity: u32,
}

/// `content * prod(factor^multiplicity)`. Factors are primitive integer
/// polynomials with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredPoly {
    #[serde(with = "super::rational")]
    pub content: Rational,
    pub factors: Vec<Factor>,
}

impl FactoredPoly {
    pub fn expand(&self, var: &str) -> RationalPoly {
        let mut acc = RationalPoly::constant(var, self.content.clone());
        for f in &self.factors {
            acc = &acc * &f.poly.pow(f.multiplicity);
        }
        acc
    }
}

/// Orders by degree, then by coefficients from the leading one down.
pub fn factor_order(a: &RationalPoly, b: &RationalPoly) -> Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

/// Yun's algorithm. Returns pairwise coprime square-free monic parts with
/// their multiplicities, in increasing multiplicity.
pub fn squarefree_decompose(a: &RationalPoly) -> Result<Vec<(RationalPoly, u32)>, ExactError> {
    match a.degree() {
        Some(d) if d >= 1 => {}
        _ => return Err(ExactError::ConstantPolynomial("square-free decomposition")),
    }
    let mut out = Vec::new();
    let da = a.derivative();
    let g = poly_gcd(a, &da);
    let mut b = a.exact_div(&g)?.monic();
    let mut c = da.exact_div(&g)?.scale(&a.lc().recip());
    let mut d = &c - &b.derivative();
    let mut i = 1u32;
    while !b.is_constant() {
        let h = poly_gcd(&b, &d);
        if !h.is_constant() {
            out.push((h.clone(), i));
        }
        b = b.exact_div(&h)?;
        c = d.exact_div(&h)?;
        d = &c - &b.derivative();
        i += 1;
    }
    Ok(out)
}

/// The square-free part `a / gcd(a, a')`, monic.
pub fn squarefree_part(a: &RationalPoly) -> RationalPoly {
    if a.is_constant() {
        return a.clone();
    }
    let g = poly_gcd(a, &a.derivative());
    a.exact_div(&g).expect("gcd divides").monic()
}

/// Complete factorization over the rationals.
pub fn factor_rationals(a: &RationalPoly) -> Result<FactoredPoly, ExactError> {
    let deg = match a.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(ExactError::ConstantPolynomial("factorization")),
    };
    if deg > MAX_FACTOR_DEGREE {
        return Err(ExactError::Capacity { what: "factorization degree", limit: MAX_FACTOR_DEGREE, got: deg });
    }
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decompose(a)? {
        let (_, prim) = part.content_primitive();
        for f in factor_squarefree_z(&prim) {
            factors.push(Factor { poly: RationalPoly::from_bigints(a.var(), &f), multiplicity: mult });
        }
    }
    factors.sort_by(|x, y| factor_order(&x.poly, &y.poly).then(x.multiplicity.cmp(&y.multiplicity)));
    let mut rebuilt = RationalPoly::one(a.var());
    for f in &factors {
        rebuilt = &rebuilt * &f.poly.pow(f.multiplicity);
    }
    let content = a.lc() / rebuilt.lc();
    Ok(FactoredPoly { content, factors })
}

fn to_residues(f: &[BigInt], p: u64) -> PPoly {
    let pb = BigInt::from(p);
    let mut out: PPoly = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest prime at least [`FIRST_PRIME`] that keeps the degree and keeps
/// `f` square-free modulo `p`.
fn choose_prime(f: &[BigInt]) -> u64 {
    let mut p = FIRST_PRIME;
    loop {
        if is_prime(p) {
            let field = Field::new(p);
            let fp = to_residues(f, p);
            if fp.len() == f.len() {
                let g = field.gcd(&fp, &field.derivative(&fp));
                if g.len() == 1 {
                    return p;
                }
            }
        }
        p += 1;
    }
}

fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn reduce(a: &[BigInt], m: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| symmetric_mod(c, m)).collect();
    zpoly::trim(&mut out);
    out
}

fn lift_poly(a: &[u64]) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn add_z(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|k| a.get(k).cloned().unwrap_or_default() + b.get(k).cloned().unwrap_or_default())
        .collect();
    zpoly::trim(&mut out);
    out
}

fn sub_z(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|k| a.get(k).cloned().unwrap_or_default() - b.get(k).cloned().unwrap_or_default())
        .collect();
    zpoly::trim(&mut out);
    out
}

/// Division by a monic polynomial modulo `m`.
fn div_rem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = reduce(a, m);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if !c.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                r[k + j] -= &c * bc;
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (reduce(&q, m), reduce(&r, m))
}

/// One quadratic Hensel step (von zur Gathen & Gerhard, Alg. 15.10):
/// from `f = g h`, `s g + t h = 1` mod `m` with `h` monic, returns the
/// same identities modulo `m^2`.
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = reduce(&sub_z(f, &zpoly::mul(g, h)), &m2);
    let (q, r) = div_rem_monic(&zpoly::mul(s, &e), h, &m2);
    let g2 = reduce(&add_z(&add_z(g, &zpoly::mul(t, &e)), &zpoly::mul(&q, g)), &m2);
    let h2 = reduce(&add_z(h, &r), &m2);
    let b = reduce(&sub_z(&add_z(&zpoly::mul(s, &g2), &zpoly::mul(t, &h2)), &[BigInt::one()]), &m2);
    let (c, d) = div_rem_monic(&zpoly::mul(s, &b), &h2, &m2);
    let s2 = reduce(&sub_z(s, &d), &m2);
    let t2 = reduce(&sub_z(&sub_z(t, &zpoly::mul(t, &b)), &zpoly::mul(&c, &g2)), &m2);
    (g2, h2, s2, t2)
}

/// Lifts `f = lc(f) * prod(factors)` mod `p` to mod `p^(2^k) >= bound`.
/// Returns the lifted monic factors and the final modulus.
fn multifactor_lift(f: &[BigInt], factors: &[PPoly], p: u64, bound: &BigInt) -> (Vec<ZPoly>, BigInt) {
    let field = Field::new(p);
    let pb = BigInt::from(p);
    let mut steps = 0;
    let mut modulus = pb.clone();
    while &modulus <= bound {
        modulus = &modulus * &modulus;
        steps += 1;
    }
    let mut lifted = Vec::with_capacity(factors.len());
    let mut rest_f: ZPoly = f.to_vec();
    for (i, fac) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            // the remaining cofactor, made monic mod the final modulus
            let lc = rest_f.last().unwrap().clone();
            let inv = lc.modinv(&modulus).expect("leading coefficient invertible");
            lifted.push(reduce(&zpoly::scale(&rest_f, &inv), &modulus));
            break;
        }
        let rest_mod: PPoly = factors[i + 1..]
            .iter()
            .fold(vec![1u64], |acc, g| field.mul_poly(&acc, g));
        // g carries the leading coefficient of rest_f, h is monic
        let lc_p = to_residues(&[rest_f.last().unwrap().clone()], p)[0];
        let g0: PPoly = rest_mod.iter().map(|&c| field.mul(c, lc_p)).collect();
        let h0 = fac.clone();
        let (_, s0, t0) = field.ext_gcd(&g0, &h0);
        let (mut g, mut h, mut s, mut t) = (lift_poly(&g0), lift_poly(&h0), lift_poly(&s0), lift_poly(&t0));
        let mut m = pb.clone();
        for _ in 0..steps {
            let (g2, h2, s2, t2) = hensel_step(&rest_f, &g, &h, &s, &t, &m);
            g = g2;
            h = h2;
            s = s2;
            t = t2;
            m = &m * &m;
        }
        lifted.push(h);
        rest_f = g;
    }
    (lifted, modulus)
}

/// Factors a primitive square-free integer polynomial with positive leading
/// coefficient into primitive irreducibles.
fn factor_squarefree_z(f: &[BigInt]) -> Vec<ZPoly> {
    let f = zpoly::primitive(f);
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    let p = choose_prime(&f);
    let field = Field::new(p);
    let modular = field.berlekamp(&field.monic(&to_residues(&f, p)));
    if modular.len() == 1 {
        return vec![f];
    }
    // Mignotte: any factor g of f has |g|_inf <= 2^deg(g) |f|_2; the lifted
    // products carry an extra lc(f).
    let lc = f.last().unwrap().clone();
    let bound = BigInt::from(2) * &lc * (BigInt::one() << n) * zpoly::l2_norm_ceil(&f);
    let (mut lifted, m) = multifactor_lift(&f, &modular, p, &bound);

    let mut result = Vec::new();
    let mut f_rest = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        let r = lifted.len();
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let lc_rest = f_rest.last().unwrap().clone();
            let prod = idx
                .iter()
                .fold(vec![lc_rest.clone()], |acc, &i| reduce(&zpoly::mul(&acc, &lifted[i]), &m));
            let cand = zpoly::primitive(&prod);
            if let Some(q) = zpoly::exact_div(&f_rest, &cand) {
                result.push(cand);
                f_rest = zpoly::primitive(&q);
                for &i in idx.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    result.push(f_rest);
    result
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
