use std::sync::Arc;

use calogero::eigen::{cluster, hermitian_eigenvalues_f64, symmetric_eigen};
use calogero::exactmath::rational::{int, rat};
use calogero::lax::build_lax;
use calogero::presets::preset;
use calogero::reconstruct::{hamiltonian, ode_oracle, solve_at_time, trajectory, Tolerances};
use calogero::rootsys::{AmbientVector, RootSystem};
use proptest::prelude::*;

fn symmetric(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (v[i * n + j] + v[j * n + i]);
            }
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenpairs_have_small_residuals(n in 1usize..9, seed in symmetric(8)) {
        let a: Vec<f64> = (0..n * n).map(|k| seed[(k / n) * 8 + k % n]).collect();
        let (vals, vecs) = symmetric_eigen(n, a.clone(), true);
        let v = vecs.unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        prop_assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-9);
        for k in 0..n {
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i * n + j] * v[j * n + k]).sum();
                prop_assert!((av - vals[k] * v[i * n + k]).abs() < 1e-9);
            }
            for l in 0..n {
                let dot: f64 = (0..n).map(|i| v[i * n + k] * v[i * n + l]).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hermitian_spectrum_is_conjugation_invariant(n in 1usize..6, re in symmetric(5), im in prop::collection::vec(-5.0f64..5.0, 25)) {
        let re: Vec<f64> = (0..n * n).map(|k| re[(k / n) * 5 + k % n]).collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                h[i * n + j] = im[i * 5 + j];
                h[j * n + i] = -im[i * 5 + j];
            }
        }
        let a = hermitian_eigenvalues_f64(n, &re, &h);
        let neg: Vec<f64> = h.iter().map(|x| -x).collect();
        let b = hermitian_eigenvalues_f64(n, &re, &neg);
        prop_assert_eq!(a.len(), n);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn clustering_merges_close_values() {
    let s = cluster(&[1.0, 1.0 + 1e-12, 2.0, 3.0 - 1e-12, 3.0], 1e-9);
    let mult: Vec<usize> = s.clusters.iter().map(|c| c.multiplicity).collect();
    assert_eq!(mult, vec![2, 1, 2]);
}

#[test]
fn solve_recovers_the_initial_position() {
    for name in ["a2-paper", "a2-literal"] {
        let p = preset(name).unwrap();
        let lax = build_lax(Arc::new(RootSystem::new(p.ty)), &p.q0, &p.p0).unwrap();
        let sol = solve_at_time(&lax, 0.0, &Tolerances::default()).unwrap();
        let q0 = p.q0.to_f64();
        assert!(sol.candidates.iter().any(|c| c.iter().zip(&q0).all(|(a, b)| (a - b).abs() < 1e-9)), "{name}");
        assert_eq!(sol.candidates.len(), 2);
    }
}

#[test]
fn d4_trajectory_matches_the_ode() {
    let rs = Arc::new(RootSystem::new("D4".parse().unwrap()));
    let q0 = AmbientVector(vec![int(7), int(4), rat(5, 2), int(1)]);
    let p0 = AmbientVector(vec![rat(1, 2), int(0), rat(-1, 3), int(1)]);
    let lax = build_lax(rs.clone(), &q0, &p0).unwrap();
    let tol = Tolerances::default();
    let tr = trajectory(&lax, 0.0, 1.0, 21, None, &tol).unwrap();
    let ode = ode_oracle(&rs, &q0.to_f64(), &p0.to_f64(), 0.0, 1.0, 0.05).unwrap();
    assert!(ode.max_relative_drift() < 1e-8);
    let e0 = hamiltonian(&rs, &q0.to_f64(), &p0.to_f64());
    assert!((ode.energy[0] - e0).abs() < 1e-12 * e0.abs());
    for k in 0..tr.len() {
        if tr.degenerate[k] {
            continue;
        }
        for (a, b) in tr.positions[k].iter().zip(&ode.positions[k]) {
            assert!((a - b).abs() < 1e-6, "t = {}", tr.times[k]);
        }
    }
}
