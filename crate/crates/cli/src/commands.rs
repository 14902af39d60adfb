use std::fmt::Write as _;
use std::sync::Arc;

use calogero::collisionsearch::{find_collisions, verify_counterexample, SearchOptions};
use calogero::exactmath::rational::{self, Rational};
use calogero::exactmath::{factor_rationals, isolate_real_roots, RationalPoly, RootInterval};
use calogero::indicator::{self, IndicatorError, IndicatorPoly};
use calogero::lax::{build_lax, char_poly_t, LaxPair};
use calogero::matching::{enumerate_matchings_exact, exact_multiset};
use calogero::reconstruct::{self, Tolerances};
use calogero::rootsys::{AmbientVector, RootSystem};
use serde_json::{json, Value};

use crate::error::{CliError, Kind};
use crate::job::{parse_rationals, JobSpec};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn format_of<'a>(job: &'a JobSpec, default: &'a str, allowed: &[&str]) -> Result<&'a str, CliError> {
    let f = job.format.as_deref().unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::invalid(format!("format {f:?} not supported here; use one of {}", allowed.join(", "))))
    }
}

fn root_system(job: &JobSpec) -> Result<Arc<RootSystem>, CliError> {
    Ok(Arc::new(RootSystem::new(job.system()?)))
}

fn tolerances(job: &JobSpec) -> Tolerances {
    Tolerances { cluster: job.cluster_tol, matching: job.match_tol }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::to_string).collect()
}

fn interval_json(iv: &RootInterval) -> Value {
    json!({ "lo": rational::to_string(&iv.lo), "hi": rational::to_string(&iv.hi), "approx": iv.midpoint_f64() })
}

fn poly_json(p: &RationalPoly) -> Value {
    serde_json::to_value(p).expect("json")
}

/// Lax pair at `(q0, p0)` moved into the dominant chamber; the same Weyl
/// element acts on both vectors, so the dynamics is unchanged.
fn dominant_lax(job: &JobSpec) -> Result<(LaxPair, Vec<usize>), CliError> {
    let rs = root_system(job)?;
    let q0 = job.vector("q0")?;
    let p0 = job.vector("p0")?;
    rs.validate_vector(&q0)?;
    rs.validate_vector(&p0)?;
    let red = rs.to_dominant(&q0)?;
    let p0 = rs.apply_weyl_word(&p0, &red.weyl_word);
    let lax = build_lax(rs, &red.dominant, &p0)?;
    Ok((lax, red.weyl_word))
}

fn literal_lax(job: &JobSpec) -> Result<LaxPair, CliError> {
    let rs = root_system(job)?;
    Ok(build_lax(rs, &job.vector("q0")?, &job.vector("p0")?)?)
}

struct Window {
    t0: f64,
    t1: f64,
    steps: usize,
}

fn window(job: &JobSpec, default_steps: usize) -> Result<Option<Window>, CliError> {
    let (t0, t1) = match (job.rational("t0")?, job.rational("t1")?) {
        (Some(a), Some(b)) => (rational::to_f64(&a), rational::to_f64(&b)),
        (None, None) => return Ok(None),
        _ => return Err(CliError::invalid("--t0 and --t1 go together")),
    };
    if t1 < t0 {
        return Err(CliError::invalid(format!("empty window [{t0}, {t1}]")));
    }
    let steps = job.steps.unwrap_or(default_steps);
    if steps == 1 && t0 != t1 {
        return Err(CliError::invalid("a window needs at least two samples"));
    }
    Ok(Some(Window { t0, t1, steps }))
}

pub fn roots(job: &JobSpec) -> Result<String, CliError> {
    let format = format_of(job, "json", &["json", "text"])?;
    let rs = root_system(job)?;
    if format == "text" {
        let mut s = String::new();
        writeln!(s, "system {}  rank {}  dim {}  roots {}", rs.ty(), rs.rank(), rs.dim(), rs.len()).unwrap();
        writeln!(s, "additivity relations {}", rs.additivity_relations().len()).unwrap();
        writeln!(s, "diagram group {:?}", rs.diagram_group()).unwrap();
        let width = (0..rs.len()).flat_map(|i| rs.root(i).to_strings()).map(|x| x.len()).max().unwrap_or(1);
        for i in 0..rs.len() {
            let coords: Vec<String> = rs.root(i).to_strings().iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(s, "{i:>4}  h={:>3}  {}  {:?}", rs.height(i), coords.join(" "), rs.coefficients(i)).unwrap();
        }
        return Ok(s);
    }
    let roots: Vec<Value> = (0..rs.len())
        .map(|i| {
            json!({
                "index": i,
                "vector": rs.root(i).to_strings(),
                "coefficients": rs.coefficients(i),
                "height": rs.height(i),
            })
        })
        .collect();
    let simple: Vec<Vec<String>> = rs.simple_roots().iter().map(|r| r.to_strings()).collect();
    Ok(pretty(&json!({
        "system": rs.ty().to_string(),
        "rank": rs.rank(),
        "dim": rs.dim(),
        "num_roots": rs.len(),
        "num_positive": rs.num_positive(),
        "simple_roots": simple,
        "highest_root": rs.highest_root().to_strings(),
        "cartan_matrix": rs.cartan_matrix(),
        "additivity_relations": rs.additivity_relations().len(),
        "diagram_group": rs.diagram_group(),
        "diagram_involution": rs.diagram_involution(),
        "boundary_pair": rs.boundary_pair(),
        "roots": roots,
    })))
}

pub fn charpoly(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let lax = literal_lax(job)?;
    let chi = char_poly_t(&lax)?;
    Ok(pretty(&json!({
        "system": lax.root_system().ty().to_string(),
        "q0": lax.q0().to_strings(),
        "p0": lax.p0().to_strings(),
        "charpoly": chi,
    })))
}

fn factor_table(factored: &calogero::exactmath::FactoredPoly) -> Vec<Value> {
    let prec = rational::rat(1, 1 << 30);
    factored
        .factors
        .iter()
        .map(|f| {
            let roots: Vec<Value> = isolate_real_roots(&f.poly, &prec).iter().map(interval_json).collect();
            json!({
                "poly": poly_json(&f.poly),
                "degree": f.poly.degree(),
                "multiplicity": f.multiplicity,
                "real_roots": roots,
            })
        })
        .collect()
}

pub fn discriminant(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let lax = literal_lax(job)?;
    let chi = char_poly_t(&lax)?;
    let delta = indicator::symbolic_discriminant(&chi)?;
    let factored = factor_rationals(&delta)?;
    Ok(pretty(&json!({
        "system": lax.root_system().ty().to_string(),
        "delta": poly_json(&delta),
        "degree": delta.degree(),
        "content": rational::to_string(&factored.content),
        "factors": factor_table(&factored),
    })))
}

fn sign_table(ind: &IndicatorPoly, w: &Window) -> Vec<(f64, i8)> {
    if w.steps == 0 {
        return Vec::new();
    }
    reconstruct::sample_times(w.t0, w.t1, w.steps).into_iter().map(|t| (t, ind.sign_f64(t))).collect()
}

pub fn indicator(job: &JobSpec) -> Result<String, CliError> {
    let format = format_of(job, "json", &["json", "csv"])?;
    let (lax, _) = dominant_lax(job)?;
    let w = window(job, 2001)?;
    let steps = w.as_ref().map_or(2001, |w| w.steps.max(2));
    let report = indicator::compute_indicator(&lax, w.as_ref().map(|w| (w.t0, w.t1)), steps, &tolerances(job))?;
    let w = w.unwrap_or(Window { t0: report.window.0, t1: report.window.1, steps });
    let table = sign_table(&report.indicator, &w);
    if format == "csv" {
        let mut s = String::from("t,indicator_sign\n");
        for (t, sign) in table {
            writeln!(s, "{},{sign}", fmt_f64(t)).unwrap();
        }
        return Ok(s);
    }
    let factors: Vec<Value> = report
        .indicator
        .provenance
        .iter()
        .map(|p| {
            json!({
                "poly": poly_json(&p.factor),
                "multiplicity": p.multiplicity,
                "real_roots": p.real_roots.iter().map(interval_json).collect::<Vec<_>>(),
                "selected": p.selected,
                "reason": p.reason,
            })
        })
        .collect();
    let crossings: Vec<Value> = report
        .crossings
        .iter()
        .map(|c| json!({ "t": c.t, "bracket": [c.bracket.0, c.bracket.1] }))
        .collect();
    let table: Vec<Value> = table.iter().map(|(t, s)| json!({ "t": t, "sign": s })).collect();
    Ok(pretty(&json!({
        "system": lax.root_system().ty().to_string(),
        "q0": lax.q0().to_strings(),
        "p0": lax.p0().to_strings(),
        "window": [report.window.0, report.window.1],
        "delta_degree": report.delta.degree(),
        "content": rational::to_string(&report.factored.content),
        "factors": factors,
        "indicator": {
            "c": poly_json(&report.indicator.c),
            "monic": poly_json(&report.indicator.c.monic()),
            "multiplicity_in_delta": report.indicator.multiplicity_in_delta,
            "real_roots": report.indicator.crossing_roots.iter().map(interval_json).collect::<Vec<_>>(),
        },
        "crossings": crossings,
        "sign_table": table,
    })))
}

pub fn solve(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let (lax, word) = dominant_lax(job)?;
    let t = job.rational("t")?.ok_or_else(|| CliError::invalid("missing --t"))?;
    let sol = reconstruct::solve_at_time(&lax, rational::to_f64(&t), &tolerances(job))?;
    let rs = lax.root_system();
    let classes = distinct_orbits(rs, &sol.candidates);
    if job.unique == Some(true) && (sol.ambiguous || classes > 1) {
        return Err(CliError::new(
            Kind::Ambiguous,
            format!("{} candidates in {classes} automorphism classes at t = {}", sol.candidates.len(), sol.t),
        ));
    }
    let clusters: Vec<Value> =
        sol.spectrum.clusters.iter().map(|c| json!({ "value": c.value, "multiplicity": c.multiplicity })).collect();
    Ok(pretty(&json!({
        "system": rs.ty().to_string(),
        "t": rational::to_string(&t),
        "q0": lax.q0().to_strings(),
        "p0": lax.p0().to_strings(),
        "weyl_word": word,
        "eigenvalues": sol.spectrum.values,
        "cluster_tolerance": sol.spectrum.tolerance,
        "clusters": clusters,
        "candidates": sol.candidates,
        "automorphism_classes": classes,
        "ambiguous": sol.ambiguous,
    })))
}

fn distinct_orbits(rs: &RootSystem, candidates: &[Vec<f64>]) -> usize {
    let scale = candidates.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6 * scale);
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        let images: Vec<Vec<f64>> = rs
            .diagram_group()
            .iter()
            .map(|g| {
                let vals = rs.simple_values_f64(c);
                let mut img = vec![0.0; vals.len()];
                for (i, &gi) in g.iter().enumerate() {
                    img[gi] = vals[i];
                }
                rs.solve_q_f64(&img)
            })
            .collect();
        if !reps.iter().any(|r| images.iter().any(|im| close(r, im))) {
            reps.push(c.clone());
        }
    }
    reps.len()
}

pub fn trajectory(job: &JobSpec) -> Result<String, CliError> {
    let format = format_of(job, "csv", &["csv", "json"])?;
    let method = job.method.as_deref().unwrap_or("lax");
    if !["lax", "ode", "classical"].contains(&method) {
        return Err(CliError::invalid(format!("unknown method {method:?}; use lax, ode or classical")));
    }
    let (lax, _) = dominant_lax(job)?;
    let rs = lax.root_system();
    let w = window(job, 101)?.ok_or_else(|| CliError::invalid("missing --t0/--t1 (or --preset)"))?;
    let tol = tolerances(job);
    let dim = rs.dim();
    let ind = trajectory_indicator(&lax, &w, &tol)?;

    let mut times = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut degenerate = Vec::new();
    if w.steps > 0 {
        match method {
            "lax" => {
                let tr = reconstruct::trajectory(&lax, w.t0, w.t1, w.steps, ind.as_ref(), &tol)?;
                times = tr.times;
                rows = tr.positions;
                degenerate = tr.degenerate;
            }
            "ode" => {
                times = reconstruct::sample_times(w.t0, w.t1, w.steps);
                rows = ode_positions(&lax, &times)?;
                degenerate = vec![false; times.len()];
            }
            _ => {
                if rs.ty().kind != calogero::rootsys::RootKind::A {
                    return Err(CliError::invalid("the classical method is only available for type A"));
                }
                times = reconstruct::sample_times(w.t0, w.t1, w.steps);
                for &t in &times {
                    let mut q = reconstruct::classical_an_oracle(&lax.q0().0, &lax.p0().0, t)?;
                    q.reverse();
                    rows.push(q);
                }
                degenerate = vec![false; times.len()];
            }
        }
    }
    let signs: Vec<i8> = times.iter().map(|&t| ind.as_ref().map_or(0, |c| c.sign_f64(t))).collect();
    if format == "json" {
        let samples: Vec<Value> = (0..times.len())
            .map(|k| json!({ "t": times[k], "q": rows[k], "indicator_sign": signs[k], "degenerate": degenerate[k] }))
            .collect();
        return Ok(pretty(&json!({
            "system": rs.ty().to_string(),
            "method": method,
            "q0": lax.q0().to_strings(),
            "p0": lax.p0().to_strings(),
            "indicator": ind.as_ref().map(|c| poly_json(&c.c)),
            "samples": samples,
        })));
    }
    let mut s = String::from("t");
    for i in 1..=dim {
        write!(s, ",q_{i}").unwrap();
    }
    s.push_str(",indicator_sign,degenerate_flag\n");
    for k in 0..times.len() {
        s.push_str(&fmt_f64(times[k]));
        for x in &rows[k] {
            s.push(',');
            s.push_str(&fmt_f64(*x));
        }
        writeln!(s, ",{},{}", signs[k], u8::from(degenerate[k])).unwrap();
    }
    Ok(s)
}

/// The indicator for the trajectory sign column, when the system supports
/// one. Systems past the symbolic capacity get no indicator.
fn trajectory_indicator(lax: &LaxPair, w: &Window, tol: &Tolerances) -> Result<Option<IndicatorPoly>, CliError> {
    let rs = lax.root_system();
    if rs.boundary_pair().is_none() || rs.len() > calogero::lax::CHARPOLY_CAPACITY {
        return Ok(None);
    }
    let steps = w.steps.max(2001);
    let first = if w.t0 < w.t1 { Some((w.t0, w.t1)) } else { None };
    let result = match indicator::compute_indicator(lax, first, steps, tol) {
        Err(IndicatorError::WindowTooSmall { .. }) => indicator::compute_indicator(lax, None, steps, tol),
        r => r,
    };
    match result {
        Ok(r) => Ok(Some(r.indicator)),
        Err(IndicatorError::IdenticallyZero | IndicatorError::Identification(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn ode_positions(lax: &LaxPair, times: &[f64]) -> Result<Vec<Vec<f64>>, CliError> {
    let rs = lax.root_system();
    let mut out = vec![Vec::new(); times.len()];
    let mut fwd: Vec<usize> = (0..times.len()).filter(|&k| times[k] >= 0.0).collect();
    fwd.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut bwd: Vec<usize> = (0..times.len()).filter(|&k| times[k] < 0.0).collect();
    bwd.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    for idx in [fwd, bwd] {
        let (mut t, mut q, mut p) = (0.0, lax.q0().to_f64(), lax.p0().to_f64());
        for k in idx {
            if times[k] != t {
                let tr = reconstruct::ode_oracle(rs, &q, &p, t, times[k], (times[k] - t).abs())?;
                q = tr.positions.last().expect("final state").clone();
                p = tr.momenta.last().expect("final state").clone();
                t = times[k];
            }
            out[k] = q.clone();
        }
    }
    Ok(out)
}

pub fn matching(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let rs = root_system(job)?;
    let multiset = match (&job.multiset, &job.q0) {
        (Some(m), _) => parse_rationals(m)?,
        (None, Some(_)) => {
            let q = job.vector("q0")?;
            rs.validate_vector(&q)?;
            exact_multiset(&rs, &q)
        }
        (None, None) => return Err(CliError::invalid("missing --multiset (or --q0)")),
    };
    let report = enumerate_matchings_exact(&rs, &multiset)?;
    if job.unique == Some(true) && report.ambiguous {
        return Err(CliError::new(
            Kind::Ambiguous,
            format!("{} automorphism classes of solutions", report.orbit_classes.len()),
        ));
    }
    let matchings: Vec<Value> = report
        .matchings
        .iter()
        .map(|m| {
            json!({
                "simple_values": strings(&m.simple_values),
                "induced_q": strings(&m.induced_q),
                "assignment": strings(&m.assignment),
            })
        })
        .collect();
    Ok(pretty(&json!({
        "system": rs.ty().to_string(),
        "multiset": strings(&multiset),
        "matchings": matchings,
        "orbit_classes": report.orbit_classes,
        "ambiguous": report.ambiguous,
    })))
}

pub fn search(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let rs = root_system(job)?;
    let bound = job.bound.ok_or_else(|| CliError::invalid("missing --bound"))?;
    let opts = SearchOptions { checkpoint_dir: job.resume.clone(), only_shards: job.shards.clone() };
    let report = find_collisions(&rs, bound, &opts)?;
    let mut s = String::new();
    for c in &report.collisions {
        writeln!(s, "{}", serde_json::to_string(c).expect("json")).unwrap();
    }
    eprintln!(
        "{}",
        json!({
            "system": report.system,
            "bound": report.bound,
            "candidates": report.candidates,
            "shards": report.shards,
            "resumed_shards": report.resumed_shards,
            "collisions": report.collisions.len(),
        })
    );
    Ok(s)
}

pub fn verify(job: &JobSpec) -> Result<String, CliError> {
    format_of(job, "json", &["json"])?;
    let rs = root_system(job)?;
    let q: AmbientVector = job.vector("q0")?;
    let q2 = job.vector("q2")?;
    let record = verify_counterexample(&rs, &q, &q2)?;
    Ok(pretty(&serde_json::to_value(&record).expect("json")))
}
