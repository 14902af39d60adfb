//! Polynomials over a small prime field and Berlekamp factorization.

/// Dense polynomial over `F_p`, lowest degree first, no trailing zeros.
pub type PPoly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub p: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        debug_assert!(p > 1 && p < (1 << 31));
        Self { p }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn trim(&self, a: &mut PPoly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn monic(&self, a: &[u64]) -> PPoly {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => {
                let inv = self.inv(lc);
                a.iter().map(|&c| self.mul(c, inv)).collect()
            }
        }
    }

    pub fn sub_poly(&self, a: &[u64], b: &[u64]) -> PPoly {
        let n = a.len().max(b.len());
        let mut out: PPoly = (0..n)
            .map(|k| self.sub(*a.get(k).unwrap_or(&0), *b.get(k).unwrap_or(&0)))
            .collect();
        self.trim(&mut out);
        out
    }

    pub fn mul_poly(&self, a: &[u64], b: &[u64]) -> PPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        self.trim(&mut out);
        out
    }

    pub fn div_rem(&self, a: &[u64], b: &[u64]) -> (PPoly, PPoly) {
        let db = b.len() - 1;
        let mut r = a.to_vec();
        self.trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let inv = self.inv(b[db]);
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], inv);
            if c != 0 {
                for (j, &bc) in b.iter().enumerate() {
                    r[k + j] = self.sub(r[k + j], self.mul(c, bc));
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        self.trim(&mut r);
        self.trim(&mut q);
        (q, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> PPoly {
        self.div_rem(a, b).1
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> PPoly {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        self.trim(&mut x);
        self.trim(&mut y);
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(&self, a: &[u64], b: &[u64]) -> (PPoly, PPoly, PPoly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1): (PPoly, PPoly) = (vec![1], Vec::new());
        let (mut t0, mut t1): (PPoly, PPoly) = (Vec::new(), vec![1]);
        self.trim(&mut r0);
        self.trim(&mut r1);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1);
            let s = self.sub_poly(&s0, &self.mul_poly(&q, &s1));
            let t = self.sub_poly(&t0, &self.mul_poly(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let lc = *r0.last().expect("gcd of two zero polynomials");
        let inv = self.inv(lc);
        let scale = |v: &PPoly| -> PPoly { v.iter().map(|&c| self.mul(c, inv)).collect() };
        (scale(&r0), scale(&s0), scale(&t0))
    }

    pub fn derivative(&self, a: &[u64]) -> PPoly {
        let mut out: PPoly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| self.mul(c, k as u64 % self.p))
            .collect();
        self.trim(&mut out);
        out
    }

    /// Complete factorization of a monic square-free polynomial into monic
    /// irreducibles, sorted by (degree, coefficients).
    pub fn berlekamp(&self, f: &[u64]) -> Vec<PPoly> {
        let n = f.len() - 1;
        if n <= 1 {
            return vec![f.to_vec()];
        }
        let p = self.p;
        // Rows of Q: x^(i p) mod f.
        let xp = self.powmod(&[0, 1], p, f);
        let mut q = vec![vec![0u64; n]; n];
        let mut cur: PPoly = vec![1];
        for row in q.iter_mut() {
            for (k, &c) in cur.iter().enumerate() {
                row[k] = c;
            }
            cur = self.rem(&self.mul_poly(&cur, &xp), f);
        }
        // Kernel of (Q - I)^T acting on coefficient vectors: v Q = v.
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = self.sub(row[i], 1);
        }
        let basis = self.left_kernel(&q);
        let r = basis.len();
        let mut factors: Vec<PPoly> = vec![f.to_vec()];
        if r == 1 {
            return factors;
        }
        'outer: for v in basis.iter().skip(1) {
            let mut vpoly = v.clone();
            self.trim(&mut vpoly);
            let mut next = Vec::new();
            for g in factors.drain(..) {
                if g.len() <= 2 {
                    next.push(g);
                    continue;
                }
                let mut rest = g;
                for s in 0..p {
                    if rest.len() <= 2 {
                        break;
                    }
                    let mut shifted = vpoly.clone();
                    if shifted.is_empty() {
                        shifted.push(0);
                    }
                    shifted[0] = self.sub(shifted[0], s);
                    self.trim(&mut shifted);
                    let d = self.gcd(&rest, &shifted);
                    if d.len() > 1 && d.len() < rest.len() {
                        rest = self.div_rem(&rest, &d).0;
                        next.push(d);
                    }
                }
                next.push(self.monic(&rest));
            }
            factors = next;
            if factors.len() == r {
                break 'outer;
            }
        }
        factors.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
        factors
    }

    fn powmod(&self, base: &[u64], mut e: u64, m: &[u64]) -> PPoly {
        let mut acc: PPoly = vec![1];
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul_poly(&acc, &b), m);
            }
            b = self.rem(&self.mul_poly(&b, &b), m);
            e >>= 1;
        }
        acc
    }

    /// Basis of `{v : v M = 0}`, first vector the constant `1`.
    fn left_kernel(&self, m: &[Vec<u64>]) -> Vec<PPoly> {
        let n = m.len();
        // Transpose so that we solve M^T v = 0 by row reduction.
        let mut a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();
        let mut pivot_col = vec![usize::MAX; n];
        let mut row = 0;
        for col in 0..n {
            let Some(piv) = (row..n).find(|&r| a[r][col] != 0) else {
                continue;
            };
            a.swap(row, piv);
            let inv = self.inv(a[row][col]);
            for x in a[row].iter_mut() {
                *x = self.mul(*x, inv);
            }
            for r in 0..n {
                if r != row && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..n {
                        let v = self.mul(f, a[row][c]);
                        a[r][c] = self.sub(a[r][c], v);
                    }
                }
            }
            pivot_col[row] = col;
            row += 1;
        }
        let pivots: Vec<usize> = pivot_col[..row].to_vec();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = self.sub(0, a[r][fc]);
            }
            basis.push(v);
        }
        // The constant polynomial is always in the kernel; put it first.
        if let Some(pos) = basis.iter().position(|v| v[0] != 0 && v[1..].iter().all(|&c| c == 0)) {
            let c = basis.remove(pos);
            basis.insert(0, c);
        } else {
            let mut one = vec![0u64; n];
            one[0] = 1;
            basis.insert(0, one);
        }
        basis
    }
}
