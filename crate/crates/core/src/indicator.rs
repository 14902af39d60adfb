//! Which half of the dominant chamber the path occupies.
//!
//! For systems with exactly two diagram automorphisms, the dominant chamber
//! is split by the hyperplane equidistant from a swapped pair of simple
//! roots. Each crossing of that hyperplane is an eigenvalue collision of
//! `W(t)`, hence a real zero of the discriminant `delta(t)` of the
//! characteristic polynomial. The indicator `c(t)` is the product of the
//! irreducible factors of `delta` whose real zeros are exactly the crossings
//! seen along a numerically reconstructed path.

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactmath::{
    discriminant, factor_rationals, isolate_real_roots, rational, sturm, ExactError, FactoredPoly, Rational,
    RationalPoly, RootInterval,
};
use crate::lax::{char_poly_t, CharPolyT, LaxError, LaxPair};
use crate::reconstruct::{self, ReconstructError, Tolerances, Trajectory};
use crate::rootsys::{AmbientVector, RootSystem};

/// Time resolution of numerically refined crossings.
pub const CROSSING_RESOLUTION: f64 = 1e-9;
/// Allowed distance between a detected crossing and a root of `c`.
pub const MATCH_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IndicatorError {
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error("the discriminant vanishes identically (degenerate configuration)")]
    IdenticallyZero,
    #[error("{0} does not have exactly two diagram automorphisms")]
    Unsupported(String),
    #[error("trajectory window [{t0}, {t1}] misses real roots of delta in [{lo}, {hi}]")]
    WindowTooSmall { t0: f64, t1: f64, lo: f64, hi: f64 },
    #[error("no product of discriminant factors explains the crossings: {0}")]
    Identification(String),
}

/// `delta(t) = disc_lambda chi(lambda; t)`, recovered exactly from its values
/// at `m(m - 1) + 1` integer times (its degree in `t` is at most
/// `m(m - 1)`).
pub fn symbolic_discriminant(chi: &CharPolyT) -> Result<RationalPoly, IndicatorError> {
    let m = chi.lambda_degree;
    let n = m * (m - 1) + 1;
    let xs: Vec<Rational> = (0..n as i64).map(rational::int).collect();
    let ys: Vec<Rational> = xs
        .par_iter()
        .map(|t| discriminant(&chi.at(t)))
        .collect::<Result<_, _>>()?;
    let delta = RationalPoly::interpolate("t", &xs, &ys);
    if delta.is_zero() {
        return Err(IndicatorError::IdenticallyZero);
    }
    Ok(delta)
}

/// `f(q) = (alpha - alpha', q)` for the designated swapped pair of simple
/// roots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryFunctional {
    pub pair: (usize, usize),
    pub vector: AmbientVector,
    #[serde(skip)]
    vector_f64: Vec<f64>,
}

impl BoundaryFunctional {
    pub fn new(rs: &RootSystem) -> Result<Self, IndicatorError> {
        let (a, b) = rs.boundary_pair().ok_or_else(|| IndicatorError::Unsupported(rs.ty().to_string()))?;
        let vector = rs.root(a).sub(rs.root(b));
        let vector_f64 = vector.to_f64();
        Ok(Self { pair: (a, b), vector, vector_f64 })
    }

    pub fn eval(&self, q: &AmbientVector) -> Rational {
        self.vector.dot(q)
    }

    pub fn eval_f64(&self, q: &[f64]) -> f64 {
        self.vector_f64.iter().zip(q).map(|(a, b)| a * b).sum()
    }
}

pub fn boundary_functional(rs: &RootSystem) -> Result<BoundaryFunctional, IndicatorError> {
    BoundaryFunctional::new(rs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorProvenance {
    pub factor: RationalPoly,
    pub multiplicity: u32,
    pub real_roots: Vec<RootInterval>,
    pub selected: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorPoly {
    /// Square-free, primitive, positive leading coefficient.
    pub c: RationalPoly,
    /// Largest multiplicity in `delta` among the selected factors (0 when
    /// `c = 1`).
    pub multiplicity_in_delta: u32,
    pub crossing_roots: Vec<RootInterval>,
    pub provenance: Vec<FactorProvenance>,
}

impl IndicatorPoly {
    pub fn constant() -> Self {
        Self { c: RationalPoly::one("t"), multiplicity_in_delta: 0, crossing_roots: Vec::new(), provenance: Vec::new() }
    }

    /// Sign of `c(t)`; 0 only inside a root-isolation interval.
    pub fn sign(&self, t: &Rational) -> i8 {
        if self.crossing_roots.iter().any(|iv| iv.contains(t)) {
            return 0;
        }
        rational::sign(&self.c.eval(t))
    }

    pub fn sign_f64(&self, t: f64) -> i8 {
        self.sign(&rational::from_f64(t))
    }
}

pub fn indicator_sign(ind: &IndicatorPoly, t: &Rational) -> i8 {
    ind.sign(t)
}

/// A sign change of the boundary functional between consecutive samples,
/// refined by bisection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub bracket: (f64, f64),
}

/// Sign changes of `f(q(t))` along `traj`, each refined to
/// [`CROSSING_RESOLUTION`] by bisection on the pointwise pipeline.
pub fn detect_crossings(
    lax: &LaxPair,
    traj: &Trajectory,
    f: &BoundaryFunctional,
    tol: &Tolerances,
) -> Vec<Crossing> {
    let good: Vec<usize> = (0..traj.len()).filter(|&k| !traj.degenerate[k]).collect();
    let mut out = Vec::new();
    for w in good.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = f.eval_f64(&traj.positions[a]);
        let fb = f.eval_f64(&traj.positions[b]);
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        let t = refine_crossing(lax, f, tol, (traj.times[a], &traj.positions[a], fa), (traj.times[b], &traj.positions[b]));
        out.push(Crossing { t, bracket: (traj.times[a], traj.times[b]) });
    }
    out
}

fn refine_crossing(
    lax: &LaxPair,
    f: &BoundaryFunctional,
    tol: &Tolerances,
    left: (f64, &[f64], f64),
    right: (f64, &[f64]),
) -> f64 {
    let (mut ta, mut qa, fa) = (left.0, left.1.to_vec(), left.2);
    let (mut tb, mut qb) = (right.0, right.1.to_vec());
    while tb - ta > CROSSING_RESOLUTION {
        let tm = 0.5 * (ta + tb);
        let guess: Vec<f64> = qa.iter().zip(&qb).map(|(x, y)| 0.5 * (x + y)).collect();
        let Ok(sol) = reconstruct::solve_at_time(lax, tm, tol) else {
            break;
        };
        let Some(qm) = sol.candidates.into_iter().min_by(|x, y| {
            let dx: f64 = x.iter().zip(&guess).map(|(a, b)| (a - b).powi(2)).sum();
            let dy: f64 = y.iter().zip(&guess).map(|(a, b)| (a - b).powi(2)).sum();
            dx.total_cmp(&dy)
        }) else {
            break;
        };
        let fm = f.eval_f64(&qm);
        if fm == 0.0 {
            return tm;
        }
        if fm.signum() == fa.signum() {
            ta = tm;
            qa = qm;
        } else {
            tb = tm;
            qb = qm;
        }
    }
    0.5 * (ta + tb)
}

fn isolation_precision() -> Rational {
    rational::rat(1, 1 << 30)
}

/// Selects the factors of `delta` whose real roots are exactly the detected
/// crossings in `[t0, t1]`.
pub fn crossing_factor(
    delta: &FactoredPoly,
    crossings: &[f64],
    window: (f64, f64),
) -> Result<IndicatorPoly, IndicatorError> {
    let (t0, t1) = window;
    let prec = isolation_precision();
    let mut provenance = Vec::new();
    let mut all_roots: Vec<f64> = Vec::new();
    for fac in &delta.factors {
        let roots = isolate_real_roots(&fac.poly, &prec);
        all_roots.extend(roots.iter().map(|r| r.midpoint_f64()));
        provenance.push(FactorProvenance {
            factor: fac.poly.clone(),
            multiplicity: fac.multiplicity,
            real_roots: roots,
            selected: false,
            reason: String::new(),
        });
    }
    if let (Some(lo), Some(hi)) = (
        all_roots.iter().cloned().reduce(f64::min),
        all_roots.iter().cloned().reduce(f64::max),
    ) {
        if lo < t0 || hi > t1 {
            return Err(IndicatorError::WindowTooSmall { t0, t1, lo, hi });
        }
    }
    let near = |root: &RootInterval, t: f64| {
        let lo = rational::to_f64(&root.lo) - MATCH_WIDTH;
        let hi = rational::to_f64(&root.hi) + MATCH_WIDTH;
        lo <= t && t <= hi
    };
    let mut covered = vec![0usize; crossings.len()];
    for p in provenance.iter_mut() {
        if p.real_roots.is_empty() {
            p.reason = "no real roots".into();
            continue;
        }
        let matched: Vec<Option<usize>> =
            p.real_roots.iter().map(|r| crossings.iter().position(|&t| near(r, t))).collect();
        if matched.iter().all(Option::is_some) {
            p.selected = true;
            p.reason = format!("all {} real roots match detected crossings", matched.len());
            for m in matched.into_iter().flatten() {
                covered[m] += 1;
            }
        } else {
            let hits = matched.iter().filter(|m| m.is_some()).count();
            p.reason = format!("{hits} of {} real roots match detected crossings", matched.len());
        }
    }
    if let Some(k) = covered.iter().position(|&c| c != 1) {
        let what = if covered[k] == 0 { "is not explained by any factor" } else { "is claimed by several factors" };
        return Err(IndicatorError::Identification(format!("crossing at t = {} {what}", crossings[k])));
    }
    let selected_roots: usize = provenance.iter().filter(|p| p.selected).map(|p| p.real_roots.len()).sum();
    if selected_roots != crossings.len() {
        return Err(IndicatorError::Identification(format!(
            "{} crossings but {selected_roots} roots in the selected factors",
            crossings.len()
        )));
    }
    let mut c = RationalPoly::one("t");
    let mut mult = 0;
    let mut crossing_roots = Vec::new();
    for p in provenance.iter().filter(|p| p.selected) {
        c = &c * &p.factor;
        mult = mult.max(p.multiplicity);
        crossing_roots.extend(p.real_roots.iter().cloned());
    }
    crossing_roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    let c = c.primitive();
    debug_assert!(c.lc().is_positive());
    Ok(IndicatorPoly { c, multiplicity_in_delta: mult, crossing_roots, provenance })
}

/// Everything computed on the way from the Lax pair to the indicator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub charpoly: CharPolyT,
    pub delta: RationalPoly,
    pub factored: FactoredPoly,
    pub window: (f64, f64),
    pub crossings: Vec<Crossing>,
    pub indicator: IndicatorPoly,
}

/// Real roots of `delta` lie inside this window, padded by 10%.
pub fn default_window(factored: &FactoredPoly) -> Option<(f64, f64)> {
    let prec = rational::rat(1, 1 << 20);
    let roots: Vec<f64> = factored
        .factors
        .iter()
        .flat_map(|f| isolate_real_roots(&f.poly, &prec))
        .flat_map(|iv| [rational::to_f64(&iv.lo), rational::to_f64(&iv.hi)])
        .collect();
    let lo = roots.iter().cloned().reduce(f64::min)?;
    let hi = roots.iter().cloned().reduce(f64::max)?;
    let pad = 0.1 * (hi - lo).max(0.1);
    Some(((lo - pad).min(0.0), (hi + pad).max(0.0)))
}

/// Characteristic polynomial, discriminant, factorization, reference
/// trajectory with crossing detection, and factor selection. Without an
/// explicit window, one covering every real root of `delta` is used.
pub fn compute_indicator(
    lax: &LaxPair,
    window: Option<(f64, f64)>,
    steps: usize,
    tol: &Tolerances,
) -> Result<IndicatorReport, IndicatorError> {
    let f = BoundaryFunctional::new(lax.root_system())?;
    let charpoly = char_poly_t(lax)?;
    let delta = symbolic_discriminant(&charpoly)?;
    let factored = factor_rationals(&delta)?;
    let window = window.or_else(|| default_window(&factored)).unwrap_or((-1.0, 1.0));
    let reference = reconstruct::trajectory(lax, window.0, window.1, steps, None, tol)?;
    let crossings = detect_crossings(lax, &reference, &f, tol);
    let times: Vec<f64> = crossings.iter().map(|c| c.t).collect();
    let indicator = crossing_factor(&factored, &times, window)?;
    Ok(IndicatorReport { charpoly, delta, factored, window, crossings, indicator })
}

/// Whether `c` divides `delta` exactly.
pub fn divides_delta(ind: &IndicatorPoly, delta: &RationalPoly) -> bool {
    ind.c.divides(delta)
}

/// Number of distinct real roots of a polynomial, by Sturm count.
pub fn real_root_count(p: &RationalPoly) -> usize {
    sturm::count_real_roots(p, &None, &None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};
    use crate::exactmath::Factor;
    use crate::lax::build_lax;
    use std::sync::Arc;

    #[test]
    fn a1_discriminant() {
        let rs = Arc::new(RootSystem::new("A1".parse().unwrap()));
        let q0 = AmbientVector(vec![rat(3, 4), rat(-3, 4)]);
        let lax = build_lax(rs, &q0, &AmbientVector::zeros(2)).unwrap();
        let d = symbolic_discriminant(&char_poly_t(&lax).unwrap()).unwrap();
        // 4 (c^2 + 4 t^2 / c^2) with c = 3/2
        assert_eq!(d, RationalPoly::new("t", vec![int(9), int(0), rat(64, 9)]));
        assert_eq!(real_root_count(&d), 0);
    }

    #[test]
    fn boundary_functionals() {
        let a2 = RootSystem::new("A2".parse().unwrap());
        let f = boundary_functional(&a2).unwrap();
        // (alpha_1 - alpha_2, q) = q1 - 2 q2 + q3 = 3 (q1 + q3) on the zero-sum plane
        let q = AmbientVector(vec![rat(3, 5), rat(-1, 10), rat(-1, 2)]);
        assert_eq!(f.eval(&q), int(3) * (&q.0[0] + &q.0[2]));
        let img = a2.diagram_automorphism_image(&q).image;
        assert_eq!(f.eval(&img), -f.eval(&q));
        let d5 = RootSystem::new("D5".parse().unwrap());
        let f = boundary_functional(&d5).unwrap();
        assert_eq!(f.vector, AmbientVector::from_ints(&[0, 0, 0, 0, -2]));
        for ty in ["D4", "E7", "E8", "A1"] {
            assert!(boundary_functional(&RootSystem::new(ty.parse().unwrap())).is_err(), "{ty}");
        }
    }

    #[test]
    fn constant_indicator_without_crossings() {
        let sextic_like = FactoredPoly {
            content: int(5),
            factors: vec![Factor { poly: RationalPoly::from_ints("t", &[1, 0, 1]), multiplicity: 3 }],
        };
        let ind = crossing_factor(&sextic_like, &[], (-1.0, 1.0)).unwrap();
        assert_eq!(ind.c, RationalPoly::one("t"));
        assert_eq!(ind.sign_f64(0.3), 1);
        assert!(!ind.provenance[0].selected);
    }

    #[test]
    fn selection_and_failures() {
        let delta = FactoredPoly {
            content: int(1),
            factors: vec![
                Factor { poly: RationalPoly::from_ints("t", &[-1, 0, 4]), multiplicity: 4 },
                Factor { poly: RationalPoly::from_ints("t", &[1, 0, 1]), multiplicity: 3 },
            ],
        };
        let ind = crossing_factor(&delta, &[-0.5, 0.5 + 1e-8], (-1.0, 1.0)).unwrap();
        assert_eq!(ind.c, RationalPoly::from_ints("t", &[-1, 0, 4]));
        assert_eq!(ind.multiplicity_in_delta, 4);
        assert_eq!(ind.sign_f64(0.0), -1);
        assert_eq!(ind.sign_f64(0.9), 1);
        assert_eq!(ind.sign(&rat(1, 2)), 0);
        assert!(matches!(crossing_factor(&delta, &[0.5], (-1.0, 1.0)), Err(IndicatorError::Identification(_))));
        assert!(matches!(crossing_factor(&delta, &[0.1], (-1.0, 1.0)), Err(IndicatorError::Identification(_))));
        assert!(matches!(crossing_factor(&delta, &[0.5], (0.0, 1.0)), Err(IndicatorError::WindowTooSmall { .. })));
    }
}
