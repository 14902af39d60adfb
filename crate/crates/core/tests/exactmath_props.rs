use calogero::exactmath::rational::{int, Rational};
use calogero::exactmath::{
    count_real_roots, discriminant, factor_rationals, isolate_real_roots, poly_gcd, resultant, squarefree_decompose,
    RationalPoly,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn poly(c: &[i64]) -> RationalPoly {
    RationalPoly::from_ints("x", c)
}

fn nonconstant(max_deg: usize, bound: i64) -> impl Strategy<Value = RationalPoly> {
    (1..=max_deg)
        .prop_flat_map(move |d| (prop::collection::vec(-bound..=bound, d), 1..=bound, any::<bool>()))
        .prop_map(|(mut c, lead, neg)| {
            c.push(if neg { -lead } else { lead });
            poly(&c)
        })
}

/// Determinant of the Sylvester matrix by Gaussian elimination.
fn sylvester_det(a: &RationalPoly, b: &RationalPoly) -> Rational {
    let (m, n) = (a.degree().unwrap(), b.degree().unwrap());
    let size = m + n;
    let mut rows = vec![vec![Rational::zero(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            rows[i][i + k] = a.coeff(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            rows[n + i][i + k] = b.coeff(n - k);
        }
    }
    let mut det = Rational::one();
    for col in 0..size {
        let Some(p) = (col..size).find(|&r| !rows[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pivot = rows[col][col].clone();
        det *= &pivot;
        for r in col + 1..size {
            let f = &rows[r][col] / &pivot;
            if f.is_zero() {
                continue;
            }
            for c in col..size {
                let v = &f * &rows[col][c];
                rows[r][c] -= v;
            }
        }
    }
    det
}

/// Irreducible by Eisenstein's criterion at `p`.
fn eisenstein(p: i64) -> impl Strategy<Value = RationalPoly> {
    (1usize..=6)
        .prop_flat_map(move |d| {
            (
                prop::collection::vec(-(1000 / p)..=(1000 / p), d - 1),
                (1i64..=(1000 / p)).prop_filter("p^2 must not divide the constant", move |c| c % p != 0),
                (1i64..=1000).prop_filter("p must not divide the leading coefficient", move |l| l % p != 0),
                any::<bool>(),
            )
        })
        .prop_map(move |(mid, c0, lead, neg)| {
            let mut c = vec![p * c0 * if neg { -1 } else { 1 }];
            c.extend(mid.iter().map(|x| p * x));
            c.push(lead);
            poly(&c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resultant_matches_sylvester_determinant(a in nonconstant(5, 9), b in nonconstant(5, 9)) {
        prop_assert_eq!(resultant(&a, &b).unwrap(), sylvester_det(&a, &b));
    }

    #[test]
    fn resultant_symmetry(a in nonconstant(5, 9), b in nonconstant(5, 9)) {
        let mn = a.degree().unwrap() * b.degree().unwrap();
        let sign = if mn % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(resultant(&a, &b).unwrap(), sign * resultant(&b, &a).unwrap());
    }

    #[test]
    fn resultant_multiplicative(a in nonconstant(3, 9), b in nonconstant(3, 9), c in nonconstant(3, 9)) {
        let ab = &a * &b;
        prop_assert_eq!(resultant(&ab, &c).unwrap(), resultant(&a, &c).unwrap() * resultant(&b, &c).unwrap());
    }

    #[test]
    fn resultant_vanishes_iff_common_factor(a in nonconstant(4, 9), b in nonconstant(4, 9)) {
        let g = poly_gcd(&a, &b);
        prop_assert_eq!(resultant(&a, &b).unwrap().is_zero(), !g.is_constant());
    }

    #[test]
    fn discriminant_from_roots(roots in prop::collection::vec(-30i64..30, 2..6), lead in 1i64..5) {
        let mut p = RationalPoly::constant("x", int(lead));
        for r in &roots {
            p = &p * &RationalPoly::linear_root("x", int(*r));
        }
        let n = roots.len() as u32;
        let mut prod = Rational::one();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                prod *= int((roots[i] - roots[j]).pow(2));
            }
        }
        let want = prod * int(lead).pow(2 * (n as i32) - 2);
        prop_assert_eq!(discriminant(&p).unwrap(), want);
    }

    #[test]
    fn factorization_round_trip(fs in prop::collection::vec((prop_oneof![eisenstein(2), eisenstein(3), eisenstein(5)], 1u32..3), 1..3)) {
        let mut p = RationalPoly::one("x");
        for (f, e) in &fs {
            p = &p * &f.pow(*e);
        }
        let got = factor_rationals(&p).unwrap();
        prop_assert_eq!(got.expand("x"), p.clone());
        for f in &got.factors {
            prop_assert!(fs.iter().any(|(g, _)| g.primitive() == f.poly || g.primitive().scale(&int(-1)) == f.poly));
        }
        let distinct: Vec<RationalPoly> = fs.iter().map(|(g, _)| g.monic()).fold(Vec::new(), |mut acc, g| {
            if !acc.contains(&g) {
                acc.push(g);
            }
            acc
        });
        prop_assert_eq!(got.factors.len(), distinct.len());
    }

    #[test]
    fn squarefree_parts_recombine(a in nonconstant(3, 9), b in nonconstant(2, 9)) {
        let p = &a * &b.pow(2);
        let parts = squarefree_decompose(&p).unwrap();
        let mut acc = RationalPoly::one("x");
        for (f, e) in &parts {
            acc = &acc * &f.pow(*e);
        }
        prop_assert_eq!(acc, p.monic());
    }

    #[test]
    fn sturm_counts_are_additive(a in nonconstant(6, 20), lo in -40i64..0, mid in -20i64..20, hi in 0i64..40) {
        let (lo, mid, hi) = (Some(int(lo)), Some(int(mid)), Some(int(hi)));
        let (l, m, h) = (lo.clone().unwrap(), mid.clone().unwrap(), hi.clone().unwrap());
        prop_assume!(l <= m && m <= h);
        prop_assert_eq!(
            count_real_roots(&a, &lo, &hi),
            count_real_roots(&a, &lo, &mid) + count_real_roots(&a, &mid, &hi)
        );
        prop_assert_eq!(
            count_real_roots(&a, &None, &None),
            count_real_roots(&a, &None, &lo) + count_real_roots(&a, &lo, &hi) + count_real_roots(&a, &hi, &None)
        );
    }

    #[test]
    fn isolation_finds_integer_roots(roots in prop::collection::btree_set(-25i64..25, 1..6)) {
        let mut p = RationalPoly::one("x");
        for r in &roots {
            p = &p * &RationalPoly::linear_root("x", int(*r));
        }
        let ivs = isolate_real_roots(&p, &Rational::new(1.into(), 1024.into()));
        prop_assert_eq!(ivs.len(), roots.len());
        for (iv, r) in ivs.iter().zip(&roots) {
            prop_assert!(iv.contains(&int(*r)));
            prop_assert!((&iv.hi - &iv.lo).abs() <= Rational::new(1.into(), 1024.into()));
        }
    }
}

#[test]
fn gcd_of_shared_linear_factor() {
    let a = poly(&[12, -8, -1, 1]);
    let b = poly(&[-10, 3, 1]);
    assert_eq!(poly_gcd(&a, &b).monic(), poly(&[-2, 1]));
}
