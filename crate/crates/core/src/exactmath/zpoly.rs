//! Helpers for dense integer polynomials (`Vec<BigInt>`, lowest degree
//! first, no trailing zeros).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Primitive part with positive leading coefficient.
pub fn primitive(p: &[BigInt]) -> ZPoly {
    let mut g = content(p);
    if g.is_zero() {
        return Vec::new();
    }
    if p.last().unwrap().is_negative() {
        g = -g;
    }
    p.iter().map(|c| c / &g).collect()
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[BigInt], k: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c * k).collect();
    trim(&mut out);
    out
}

pub fn derivative(a: &[BigInt]) -> ZPoly {
    let mut out: ZPoly = a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
    trim(&mut out);
    out
}

/// Pseudo-remainder `prem(a, b)`: remainder of `lc(b)^(deg a - deg b + 1) * a` by `b`.
pub fn prem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = degree(b).expect("nonzero divisor");
    let mut r: ZPoly = a.to_vec();
    if r.len() <= db {
        return r;
    }
    let lb = b[db].clone();
    let steps = r.len() - db;
    for _ in 0..steps {
        trim(&mut r);
        if r.len() <= db {
            // keep the power of lc(b) consistent with the definition
            r = r.iter().map(|c| c * &lb).collect();
            continue;
        }
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bc;
        }
        r.pop();
    }
    trim(&mut r);
    r
}

/// Exact division in `Z[x]`; `None` if `b` does not divide `a`.
pub fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let db = degree(b)?;
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() <= db {
        return None;
    }
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let top = &r[k + db];
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] -= &c * bc;
        }
        q[k] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut q);
    Some(q)
}

pub fn max_norm(a: &[BigInt]) -> BigInt {
    a.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
}

/// Ceiling of the Euclidean norm.
pub fn l2_norm_ceil(a: &[BigInt]) -> BigInt {
    let sq: BigInt = a.iter().map(|c| c * c).sum();
    let r = sq.sqrt();
    if &r * &r == sq {
        r
    } else {
        r + BigInt::one()
    }
}
