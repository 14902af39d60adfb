//! Real-root counting and isolation with Sturm sequences.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::squarefree_part;
use super::poly::RationalPoly;
use super::rational::{self, Rational};

/// Endpoint of a counting interval; `None` stands for the matching infinity.
pub type Bound = Option<Rational>;

/// Half-open interval `(lo, hi]` known to contain exactly one real root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "rational")]
    pub lo: Rational,
    #[serde(with = "rational")]
    pub hi: Rational,
}

impl RootInterval {
    pub fn midpoint_f64(&self) -> f64 {
        rational::to_f64(&((&self.lo + &self.hi) / rational::int(2)))
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x <= &self.hi
    }
}

pub struct SturmChain {
    chain: Vec<RationalPoly>,
}

impl SturmChain {
    /// Builds the chain of the square-free part of `a`.
    pub fn new(a: &RationalPoly) -> Self {
        let p0 = squarefree_part(a);
        let mut chain = vec![p0.clone()];
        if p0.is_constant() {
            return Self { chain };
        }
        let mut p1 = p0.derivative();
        let mut prev = p0;
        while !p1.is_zero() {
            let (_, r) = prev.div_rem(&p1).expect("nonzero");
            chain.push(p1.clone());
            prev = p1;
            // scaling by a positive constant keeps the sign pattern
            let r = -&r;
            p1 = if r.is_zero() { r } else { r.scale(&r.lc().abs().recip()) };
        }
        Self { chain }
    }

    fn variations(&self, x: &Bound, at_plus_infinity: bool) -> usize {
        let signs = self.chain.iter().map(|p| match x {
            Some(x) => rational::sign(&p.eval(x)),
            None => {
                let s = rational::sign(&p.lc());
                let odd = p.degree().unwrap_or(0) % 2 == 1;
                if at_plus_infinity || !odd {
                    s
                } else {
                    -s
                }
            }
        });
        let mut count = 0;
        let mut last = 0i8;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        let vl = self.variations(lo, false);
        let vh = self.variations(hi, true);
        vl.saturating_sub(vh)
    }
}

/// Number of distinct real roots of `a` in `(lo, hi]`; `None` bounds are
/// infinite.
pub fn count_real_roots(a: &RationalPoly, lo: &Bound, hi: &Bound) -> usize {
    if a.is_constant() {
        return 0;
    }
    SturmChain::new(a).count(lo, hi)
}

/// Cauchy bound: every real root lies strictly inside `(-b, b)`.
fn root_bound(a: &RationalPoly) -> Rational {
    let lc = a.lc().abs();
    let m = a.coeffs()[..a.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / &lc)
        .fold(Rational::zero(), |x, y| if y > x { y } else { x });
    m + Rational::one()
}

/// Disjoint intervals, one per distinct real root, each of width at most
/// `precision`, in increasing order.
pub fn isolate_real_roots(a: &RationalPoly, precision: &Rational) -> Vec<RootInterval> {
    if a.is_constant() {
        return Vec::new();
    }
    let sq = squarefree_part(a);
    let chain = SturmChain::new(&sq);
    let b = root_bound(&sq);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count(&Some(lo.clone()), &Some(hi.clone()));
        if n == 0 {
            continue;
        }
        if n == 1 && &(&hi - &lo) <= precision {
            out.push(RootInterval { lo, hi });
            continue;
        }
        let mid = (&lo + &hi) / rational::int(2);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Refines a root interval of `a` by bisection until its width is at most
/// `precision`.
pub fn refine(a: &RationalPoly, iv: &RootInterval, precision: &Rational) -> RootInterval {
    let sq = squarefree_part(a);
    let chain = SturmChain::new(&sq);
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    while &(&hi - &lo) > precision {
        let mid = (&lo + &hi) / rational::int(2);
        if chain.count(&Some(lo.clone()), &Some(mid.clone())) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RootInterval { lo, hi }
}
