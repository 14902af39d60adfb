//! GCDs, resultants and discriminants.
//!
//! Both the GCD and the resultant run on primitive integer representatives
//! so that intermediate coefficients stay bounded: the GCD uses the
//! primitive remainder sequence, the resultant the subresultant sequence
//! (Collins/Brown), whose divisions are exact in `Z[x]`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::poly::RationalPoly;
use super::rational::Rational;
use super::zpoly::{self, ZPoly};
use super::ExactError;

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
    let var = a.var();
    if a.is_zero() {
        return b.monic().with_var(var);
    }
    if b.is_zero() {
        return a.monic();
    }
    let (_, mut x) = a.content_primitive();
    let (_, mut y) = b.content_primitive();
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = zpoly::prem(&x, &y);
        x = y;
        y = zpoly::primitive(&r);
    }
    RationalPoly::from_bigints(var, &x).monic()
}

fn pow_i(b: &BigInt, e: usize) -> BigInt {
    Pow::pow(b, e)
}

/// Resultant of two primitive integer polynomials of positive degree.
fn subresultant_z(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut a: ZPoly = a.to_vec();
    let mut b: ZPoly = b.to_vec();
    let mut s = BigInt::one();
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
        if (a.len() - 1) % 2 == 1 && (b.len() - 1) % 2 == 1 {
            s = -s;
        }
    }
    if b.len() == 1 {
        return s * pow_i(&b[0], a.len() - 1);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = zpoly::prem(&a, &b);
        a = b;
        let div = &g * pow_i(&h, delta);
        b = r.iter().map(|c| c / &div).collect();
        g = a.last().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h.clone()
        } else {
            pow_i(&g, delta) / pow_i(&h, delta - 1)
        };
        if b.len() <= 1 {
            break;
        }
    }
    if b.is_empty() {
        return BigInt::zero();
    }
    let da = a.len() - 1;
    let lb = &b[0];
    // h^(1 - da) * lb^da
    let num = pow_i(lb, da);
    let res = if da == 0 { num } else { num / pow_i(&h, da - 1) };
    s * res
}

/// Resultant of two nonzero polynomials, equal to the determinant of their
/// Sylvester matrix.
pub fn resultant(a: &RationalPoly, b: &RationalPoly) -> Result<Rational, ExactError> {
    let da = a.degree().ok_or(ExactError::ZeroPolynomial("resultant"))?;
    let db = b.degree().ok_or(ExactError::ZeroPolynomial("resultant"))?;
    if da == 0 && db == 0 {
        return Ok(Rational::one());
    }
    if da == 0 {
        return Ok(Pow::pow(a.lc(), db));
    }
    if db == 0 {
        return Ok(Pow::pow(b.lc(), da));
    }
    let (ca, pa) = a.content_primitive();
    let (cb, pb) = b.content_primitive();
    let r = subresultant_z(&pa, &pb);
    Ok(Pow::pow(ca, db) * Pow::pow(cb, da) * Rational::from_integer(r))
}

/// `(-1)^(n(n-1)/2) * res(a, a') / lc(a)`; zero exactly when `a` has a
/// repeated root.
pub fn discriminant(a: &RationalPoly) -> Result<Rational, ExactError> {
    let n = match a.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(ExactError::ConstantPolynomial("discriminant")),
    };
    let r = resultant(a, &a.derivative())?;
    let d = r / a.lc();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}
