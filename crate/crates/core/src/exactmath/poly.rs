//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::ExactError;

/// Coefficients are stored lowest degree first and never carry trailing
/// zeros, so the zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawPoly")]
pub struct RationalPoly {
    var: String,
    #[serde(with = "rational::vec")]
    coeffs: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawPoly {
    var: String,
    #[serde(with = "rational::vec")]
    coeffs: Vec<Rational>,
}

impl From<RawPoly> for RationalPoly {
    fn from(raw: RawPoly) -> Self {
        RationalPoly::new(&raw.var, raw.coeffs)
    }
}

impl RationalPoly {
    pub fn new(var: &str, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { var: var.to_string(), coeffs }
    }

    pub fn zero(var: &str) -> Self {
        Self::new(var, Vec::new())
    }

    pub fn one(var: &str) -> Self {
        Self::constant(var, Rational::one())
    }

    pub fn constant(var: &str, c: Rational) -> Self {
        Self::new(var, vec![c])
    }

    /// The monomial `var`.
    pub fn x(var: &str) -> Self {
        Self::new(var, vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(var: &str, coeffs: &[i64]) -> Self {
        Self::new(var, coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn from_bigints(var: &str, coeffs: &[BigInt]) -> Self {
        Self::new(var, coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    /// `x - r`.
    pub fn linear_root(var: &str, r: Rational) -> Self {
        Self::new(var, vec![-r, Rational::one()])
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.var, self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rational::int(k as i64))
            .collect();
        Self::new(&self.var, coeffs)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        Self::new(&self.var, self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Errors on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), ExactError> {
        let dd = d.degree().ok_or(ExactError::ZeroPolynomial("divisor"))?;
        let mut r = self.coeffs.clone();
        let lc = d.lc();
        if r.len() <= dd {
            return Ok((Self::zero(&self.var), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(&self.var, q), Self::new(&self.var, r)))
    }

    /// Division that must leave no remainder.
    pub fn exact_div(&self, d: &Self) -> Result<Self, ExactError> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(ExactError::NotDivisible);
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        matches!(other.div_rem(self), Ok((_, r)) if r.is_zero())
    }

    /// Splits into `content * primitive` where the primitive part has
    /// coprime integer coefficients and a positive leading coefficient.
    pub fn content_primitive(&self) -> (Rational, Vec<BigInt>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let den = rational::common_denominator(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rational::new(g, den), prim)
    }

    /// Primitive integer-coefficient associate with positive leading
    /// coefficient, as a rational polynomial.
    pub fn primitive(&self) -> Self {
        let (_, p) = self.content_primitive();
        Self::from_bigints(&self.var, &p)
    }

    /// Composition `self(other)`.
    /// Newton interpolation through `(xs[k], ys[k])`; the `xs` must be
    /// distinct.
    pub fn interpolate(var: &str, xs: &[Rational], ys: &[Rational]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
            }
        }
        let mut acc = Self::zero(var);
        for k in (0..n).rev() {
            let lin = Self::linear_root(var, xs[k].clone());
            acc = &(&acc * &lin) + &Self::constant(var, dd[k].clone());
        }
        acc
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero(&other.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(&other.var, c.clone());
        }
        acc
    }
}

impl<'a> Add<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn add(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect();
        RationalPoly::new(&self.var, coeffs)
    }
}

impl<'a> Sub<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn sub(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - o.coeff(k)).collect();
        RationalPoly::new(&self.var, coeffs)
    }
}

impl<'a> Mul<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn mul(self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero(&self.var);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(&self.var, out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(&self.var, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{}", a)?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}{}", if show_coeff { "*" } else { "" }, self.var)?,
                _ => write!(f, "{}{}^{}", if show_coeff { "*" } else { "" }, self.var, k)?,
            }
        }
        Ok(())
    }
}
