//! Positions from spectra, continuous trajectories, and two independent
//! oracles: direct integration of the Hamiltonian flow and the classical
//! `A_n` Lax matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, cluster, default_cluster_tolerance, Spectrum};
use crate::exactmath::{rational, Rational};
use crate::indicator::{BoundaryFunctional, IndicatorPoly};
use crate::lax::LaxPair;
use crate::matching::{default_match_tolerance, enumerate_matchings, MatchError};
use crate::rootsys::{AmbientVector, RootSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("invalid time window: {0}")]
    Window(String),
    #[error("trajectory reached a wall at t = {last_safe_time} (|(alpha, q)| < 1e-6)")]
    WallApproach { last_safe_time: f64, partial: Box<OdeTrajectory> },
    #[error("energy drift {drift:e} above 1e-8 even with {substeps} substeps")]
    EnergyDrift { drift: f64, substeps: usize },
    #[error("initial positions must be distinct")]
    CoincidentPositions,
}

/// Overrides for the default clustering and matching tolerances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cluster: Option<f64>,
    pub matching: Option<f64>,
}

pub fn solve_q(rs: &RootSystem, simple_values: &[Rational]) -> AmbientVector {
    rs.solve_q(simple_values)
}

pub fn solve_q_f64(rs: &RootSystem, simple_values: &[f64]) -> Vec<f64> {
    rs.solve_q_f64(simple_values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSolution {
    pub t: f64,
    pub spectrum: Spectrum,
    /// Dominant positions consistent with the spectrum, sorted
    /// lexicographically.
    pub candidates: Vec<Vec<f64>>,
    pub ambiguous: bool,
}

/// The spectrum of `W(t)`, clustered.
pub fn spectrum_at(lax: &LaxPair, t: f64, tol: &Tolerances) -> Spectrum {
    let (re, im) = lax.w_at_f64(t);
    let n = lax.size();
    let values = eigen::hermitian_eigenvalues_f64(n, &re, &im);
    let ct = tol.cluster.unwrap_or_else(|| default_cluster_tolerance(eigen::frobenius_norm(&re, &im)));
    cluster(&values, ct)
}

/// Steps 1 to 3 at a single time: eigenvalues, matching, linear solve.
pub fn solve_at_time(lax: &LaxPair, t: f64, tol: &Tolerances) -> Result<TimeSolution, ReconstructError> {
    let spectrum = spectrum_at(lax, t, tol);
    let mt = tol.matching.unwrap_or_else(|| default_match_tolerance(&spectrum));
    let report = enumerate_matchings(lax.root_system(), &spectrum, mt)?;
    let candidates = report.matchings.into_iter().map(|m| m.induced_q).collect();
    Ok(TimeSolution { t, spectrum, candidates, ambiguous: report.ambiguous })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    /// Sign of the indicator polynomial, or 0 when none was supplied.
    pub indicator_signs: Vec<i8>,
    /// Diagram-group element relating the branch chosen at `t = 0` to `q0`.
    pub branch_id: usize,
    pub degenerate: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn degenerate_times(&self) -> Vec<f64> {
        self.times.iter().zip(&self.degenerate).filter(|(_, &d)| d).map(|(&t, _)| t).collect()
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Uniform samples of `[t0, t1]`, ending exactly at `t1`.
pub fn sample_times(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    if t0 == t1 {
        return vec![t0];
    }
    let h = (t1 - t0) / (steps - 1) as f64;
    (0..steps).map(|k| if k + 1 == steps { t1 } else { t0 + h * k as f64 }).collect()
}

struct Guide<'a> {
    ind: &'a IndicatorPoly,
    f: BoundaryFunctional,
    /// `sign(f(q)) = align * sign(c(t))` once established.
    align: Option<i8>,
}

impl Guide<'_> {
    fn note(&mut self, t: f64, q: &[f64]) {
        if self.align.is_none() {
            let s = self.ind.sign_f64(t);
            let fq = sign_eps(self.f.eval_f64(q));
            if s != 0 && fq != 0 {
                self.align = Some(s * fq);
            }
        }
    }

    /// Candidates whose side of the boundary agrees with the indicator.
    fn allowed(&self, t: f64, cands: &[Vec<f64>]) -> Vec<usize> {
        let Some(align) = self.align else {
            return (0..cands.len()).collect();
        };
        let s = self.ind.sign_f64(t);
        if s == 0 {
            return (0..cands.len()).collect();
        }
        let ok: Vec<usize> =
            (0..cands.len()).filter(|&i| sign_eps(self.f.eval_f64(&cands[i])) == align * s).collect();
        if ok.is_empty() {
            (0..cands.len()).collect()
        } else {
            ok
        }
    }
}

fn sign_eps(x: f64) -> i8 {
    if x > 1e-12 {
        1
    } else if x < -1e-12 {
        -1
    } else {
        0
    }
}

/// Follows one branch of the pointwise solutions from `t = 0` outwards
/// through `order` (sample indices, increasing distance from 0).
fn march(
    lax: &LaxPair,
    order: &[usize],
    times: &[f64],
    sols: &[Option<Vec<Vec<f64>>>],
    guide: &mut Option<Guide<'_>>,
    positions: &mut [Vec<f64>],
    degenerate: &mut [bool],
) {
    let q0 = lax.q0().to_f64();
    let p0 = lax.p0().to_f64();
    // last two accepted (t, q)
    let mut hist: Vec<(f64, Vec<f64>)> = vec![(0.0, q0.clone())];
    for &k in order {
        let t = times[k];
        let predicted: Vec<f64> = match hist.len() {
            1 => q0.iter().zip(&p0).map(|(q, p)| q + p * t).collect(),
            _ => {
                let (ta, qa) = &hist[hist.len() - 2];
                let (tb, qb) = &hist[hist.len() - 1];
                let s = (t - tb) / (tb - ta);
                qb.iter().zip(qa).map(|(b, a)| b + (b - a) * s).collect()
            }
        };
        match &sols[k] {
            Some(cands) if !cands.is_empty() => {
                let allowed = guide.as_ref().map_or_else(|| (0..cands.len()).collect(), |g| g.allowed(t, cands));
                let best = allowed
                    .into_iter()
                    .min_by(|&a, &b| dist2(&cands[a], &predicted).total_cmp(&dist2(&cands[b], &predicted)))
                    .unwrap();
                let q = cands[best].clone();
                if let Some(g) = guide.as_mut() {
                    g.note(t, &q);
                }
                positions[k] = q.clone();
                if hist.last().unwrap().0 == t {
                    hist.pop();
                }
                hist.push((t, q));
                if hist.len() > 2 {
                    hist.remove(0);
                }
            }
            _ => {
                degenerate[k] = true;
                positions[k] = predicted;
            }
        }
    }
}

/// Reconstructs `q(t)` on `steps` uniform samples of `[t0, t1]` from the
/// spectra of `W(t)` alone, choosing among the pointwise candidates by
/// continuity from `q0` at `t = 0`. When an indicator is supplied, its sign
/// decides on which side of the fundamental-domain boundary each sample
/// lies.
pub fn trajectory(
    lax: &LaxPair,
    t0: f64,
    t1: f64,
    steps: usize,
    indicator: Option<&IndicatorPoly>,
    tol: &Tolerances,
) -> Result<Trajectory, ReconstructError> {
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(ReconstructError::Window(format!("[{t0}, {t1}]")));
    }
    if t0 != t1 && steps < 2 {
        return Err(ReconstructError::Window("at least two samples are needed".into()));
    }
    let times = sample_times(t0, t1, steps);
    let sols: Vec<Option<Vec<Vec<f64>>>> = times
        .par_iter()
        .map(|&t| match solve_at_time(lax, t, tol) {
            Ok(s) => Ok(Some(s.candidates)),
            Err(ReconstructError::Match(MatchError::Degenerate | MatchError::NoMatching { .. })) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let mut guide = match indicator {
        Some(ind) => BoundaryFunctional::new(lax.root_system()).ok().map(|f| {
            let mut g = Guide { ind, f, align: None };
            g.note(0.0, &lax.q0().to_f64());
            g
        }),
        None => None,
    };
    let n = times.len();
    let mut positions = vec![Vec::new(); n];
    let mut degenerate = vec![false; n];
    let mut fwd: Vec<usize> = (0..n).filter(|&k| times[k] >= 0.0).collect();
    fwd.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut bwd: Vec<usize> = (0..n).filter(|&k| times[k] < 0.0).collect();
    bwd.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    let align0 = guide.as_ref().and_then(|g| g.align);
    march(lax, &fwd, &times, &sols, &mut guide, &mut positions, &mut degenerate);
    if let Some(g) = guide.as_mut() {
        g.align = align0.or(g.align);
    }
    march(lax, &bwd, &times, &sols, &mut guide, &mut positions, &mut degenerate);
    interpolate_degenerate(&times, &mut positions, &degenerate);
    let indicator_signs = times.iter().map(|&t| indicator.map_or(0, |c| c.sign_f64(t))).collect();
    Ok(Trajectory { times, positions, indicator_signs, branch_id: 0, degenerate })
}

fn interpolate_degenerate(times: &[f64], positions: &mut [Vec<f64>], degenerate: &[bool]) {
    let good: Vec<usize> = (0..times.len()).filter(|&k| !degenerate[k]).collect();
    for k in 0..times.len() {
        if !degenerate[k] {
            continue;
        }
        let after = good.partition_point(|&g| g < k);
        if after == 0 || after == good.len() {
            continue;
        }
        let (a, b) = (good[after - 1], good[after]);
        let s = (times[k] - times[a]) / (times[b] - times[a]);
        positions[k] = positions[a].iter().zip(&positions[b]).map(|(x, y)| x + (y - x) * s).collect();
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub momenta: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub substeps: usize,
}

impl OdeTrajectory {
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs() / e0.abs().max(1e-300)).fold(0.0, f64::max)
    }
}

/// `H = (p, p)/2 + sum_alpha (alpha, q)^-2 / 2`.
pub fn hamiltonian(rs: &RootSystem, q: &[f64], p: &[f64]) -> f64 {
    let kinetic: f64 = 0.5 * p.iter().map(|x| x * x).sum::<f64>();
    let potential: f64 = (0..rs.len()).map(|i| rs.inner_f64(i, q).powi(-2)).sum::<f64>() * 0.5;
    kinetic + potential
}

/// `dp/dt = sum_alpha alpha / (alpha, q)^3`; `None` near a wall.
fn force(rs: &RootSystem, q: &[f64]) -> Option<Vec<f64>> {
    let mut f = vec![0.0; q.len()];
    for i in 0..rs.len() {
        let d = rs.inner_f64(i, q);
        if d.abs() < 1e-6 {
            return None;
        }
        let w = d.powi(-3);
        for (x, a) in f.iter_mut().zip(rs.root_f64(i)) {
            *x += w * a;
        }
    }
    Some(f)
}

fn rk4(rs: &RootSystem, q: &[f64], p: &[f64], h: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let axpy = |x: &[f64], y: &[f64], s: f64| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    let k1q = p.to_vec();
    let k1p = force(rs, q)?;
    let k2q = axpy(p, &k1p, h / 2.0);
    let k2p = force(rs, &axpy(q, &k1q, h / 2.0))?;
    let k3q = axpy(p, &k2p, h / 2.0);
    let k3p = force(rs, &axpy(q, &k2q, h / 2.0))?;
    let k4q = axpy(p, &k3p, h);
    let k4p = force(rs, &axpy(q, &k3q, h))?;
    let comb = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len()).map(|i| x[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
    };
    Some((comb(q, &k1q, &k2q, &k3q, &k4q), comb(p, &k1p, &k2p, &k3p, &k4p)))
}

const MAX_SUBSTEPS: usize = 1 << 16;
/// Successive step halvings must agree to this accuracy in every coordinate.
const POSITION_AGREEMENT: f64 = 1e-10;

/// Integrates the Calogero-Moser flow with classical RK4 from the state
/// `(q0, p0)` at `t0` to `t1`, reporting every `step` (and `t1`). The
/// internal step is halved until the relative energy drift is below `1e-8`
/// and two successive halvings agree in position.
pub fn ode_oracle(
    rs: &RootSystem,
    q0: &[f64],
    p0: &[f64],
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<OdeTrajectory, ReconstructError> {
    if !(step > 0.0 && step.is_finite() && t0.is_finite() && t1.is_finite()) {
        return Err(ReconstructError::Window(format!("step {step} on [{t0}, {t1}]")));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let n_out = (span / step - 1e-9).ceil().max(0.0) as usize;
    let mut outs: Vec<f64> = (0..=n_out).map(|k| t0 + dir * (k as f64 * step).min(span)).collect();
    outs.dedup();
    let mut coarse = integrate(rs, q0, p0, &outs, 1)?;
    loop {
        let substeps = coarse.substeps * 2;
        let fine = integrate(rs, q0, p0, &outs, substeps)?;
        let drift = fine.max_relative_drift();
        let moved = coarse
            .positions
            .iter()
            .zip(&fine.positions)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        if drift < 1e-8 && moved < POSITION_AGREEMENT {
            return Ok(fine);
        }
        if substeps >= MAX_SUBSTEPS {
            return Err(ReconstructError::EnergyDrift { drift, substeps });
        }
        coarse = fine;
    }
}

fn integrate(rs: &RootSystem, q0: &[f64], p0: &[f64], outs: &[f64], substeps: usize) -> Result<OdeTrajectory, ReconstructError> {
    let mut tr = OdeTrajectory {
        times: vec![outs[0]],
        positions: vec![q0.to_vec()],
        momenta: vec![p0.to_vec()],
        energy: vec![hamiltonian(rs, q0, p0)],
        substeps,
    };
    let (mut q, mut p) = (q0.to_vec(), p0.to_vec());
    for w in outs.windows(2) {
        let h = (w[1] - w[0]) / substeps as f64;
        for _ in 0..substeps {
            match rk4(rs, &q, &p, h) {
                Some((nq, np)) => {
                    q = nq;
                    p = np;
                }
                None => {
                    let last_safe_time = *tr.times.last().unwrap();
                    return Err(ReconstructError::WallApproach { last_safe_time, partial: Box::new(tr) });
                }
            }
        }
        if force(rs, &q).is_none() {
            let last_safe_time = *tr.times.last().unwrap();
            return Err(ReconstructError::WallApproach { last_safe_time, partial: Box::new(tr) });
        }
        tr.times.push(w[1]);
        tr.energy.push(hamiltonian(rs, &q, &p));
        tr.positions.push(q.clone());
        tr.momenta.push(p.clone());
    }
    Ok(tr)
}

/// Sorted particle positions at time `t` from the classical Lax matrix
/// `diag(q0) + t (diag(p0) + [i / (q0_j - q0_k)])`.
pub fn classical_an_oracle(q0: &[Rational], p0: &[Rational], t: f64) -> Result<Vec<f64>, ReconstructError> {
    let n = q0.len();
    if p0.len() != n {
        return Err(ReconstructError::Window("q0 and p0 differ in length".into()));
    }
    let mut sorted = q0.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ReconstructError::CoincidentPositions);
    }
    let qf: Vec<f64> = q0.iter().map(rational::to_f64).collect();
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    for j in 0..n {
        re[j * n + j] = qf[j] + t * rational::to_f64(&p0[j]);
        for k in 0..n {
            if j != k {
                im[j * n + k] = t * rational::to_f64(&(&q0[j] - &q0[k]).recip());
            }
        }
    }
    Ok(eigen::hermitian_eigenvalues_f64(n, &re, &im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};
    use crate::lax::build_lax;
    use std::sync::Arc;

    fn a2() -> Arc<RootSystem> {
        Arc::new(RootSystem::new("A2".parse().unwrap()))
    }

    fn q0() -> AmbientVector {
        AmbientVector(vec![rat(3, 5), rat(-1, 10), rat(-1, 2)])
    }

    #[test]
    fn solve_at_zero_contains_q0() {
        let lax = build_lax(a2(), &q0(), &AmbientVector(vec![rat(1, 10), rat(-1, 10), int(0)])).unwrap();
        let s = solve_at_time(&lax, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(s.candidates.len(), 2);
        assert!(s.candidates.iter().any(|c| dist2(c, &q0().to_f64()).sqrt() < 1e-8));
    }

    #[test]
    fn single_sample_window() {
        let lax = build_lax(a2(), &q0(), &AmbientVector::zeros(3)).unwrap();
        let tr = trajectory(&lax, 0.25, 0.25, 10, None, &Tolerances::default()).unwrap();
        assert_eq!(tr.len(), 1);
        let s = solve_at_time(&lax, 0.25, &Tolerances::default()).unwrap();
        assert!(s.candidates.contains(&tr.positions[0]));
    }

    #[test]
    fn ode_conserves_energy_and_reverses() {
        let rs = a2();
        let q = q0().to_f64();
        let fwd = ode_oracle(&rs, &q, &[0.0; 3], 0.0, 0.5, 0.01).unwrap();
        let bwd = ode_oracle(&rs, &q, &[0.0; 3], 0.0, -0.5, 0.01).unwrap();
        assert!(fwd.max_relative_drift() < 1e-8);
        for (a, b) in fwd.positions.iter().zip(&bwd.positions) {
            assert!(dist2(a, b).sqrt() < 1e-12);
        }
        assert_eq!(fwd.times.len(), 51);
        assert!((fwd.times[50] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn classical_oracle_edges() {
        let q = [rat(3, 5), rat(-1, 10), rat(-1, 2)];
        let p = [rat(1, 10), rat(-1, 10), int(0)];
        let at0 = classical_an_oracle(&q, &p, 0.0).unwrap();
        assert_eq!(at0, vec![-0.5, -0.1, 0.6]);
        let one = classical_an_oracle(&[rat(1, 3)], &[rat(2, 1)], 0.75).unwrap();
        assert!((one[0] - (1.0 / 3.0 + 1.5)).abs() < 1e-15);
        assert_eq!(
            classical_an_oracle(&[int(1), int(1)], &[int(0), int(0)], 0.1),
            Err(ReconstructError::CoincidentPositions)
        );
    }

    #[test]
    fn lax_spectrum_tracks_ode() {
        let rs = a2();
        let p0 = AmbientVector(vec![rat(1, 10), rat(-1, 10), int(0)]);
        let lax = build_lax(rs.clone(), &q0(), &p0).unwrap();
        let ode = ode_oracle(&rs, &q0().to_f64(), &p0.to_f64(), 0.0, 1.0, 0.1).unwrap();
        for (t, q) in ode.times.iter().zip(&ode.positions) {
            let sp = spectrum_at(&lax, *t, &Tolerances::default());
            let mut want: Vec<f64> = (0..rs.len()).map(|i| rs.inner_f64(i, q)).collect();
            want.sort_by(f64::total_cmp);
            for (a, b) in sp.values.iter().zip(&want) {
                assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
            }
        }
    }
}
