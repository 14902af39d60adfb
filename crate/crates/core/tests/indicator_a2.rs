use std::sync::Arc;

use calogero::exactmath::rational::{int, rat};
use calogero::exactmath::{count_real_roots, factor_rationals, Rational, RationalPoly};
use calogero::indicator::{boundary_functional, compute_indicator, divides_delta, symbolic_discriminant};
use calogero::lax::{build_lax, char_poly_t};
use calogero::presets::preset;
use calogero::reconstruct::{trajectory, Tolerances};
use calogero::rootsys::RootSystem;

fn reference_cubic() -> RationalPoly {
    RationalPoly::new("t", vec![rat(121, 218750), rat(-121, 1875), rat(44921, 51450), rat(1, 1)])
}

#[test]
fn a2_preset_indicator_is_the_cubic() {
    let p = preset("a2-paper").unwrap();
    let rs = Arc::new(RootSystem::new(p.ty));
    let lax = build_lax(rs.clone(), &p.q0, &p.p0).unwrap();
    let tol = Tolerances::default();
    let rep = compute_indicator(&lax, Some(p.window), p.steps, &tol).unwrap();
    assert_eq!(rep.indicator.c.monic(), reference_cubic());
    assert_eq!(rep.indicator.multiplicity_in_delta, 4);
    assert_eq!(rep.crossings.len(), 3);
    assert!(divides_delta(&rep.indicator, &rep.delta));
    assert_eq!(count_real_roots(&rep.indicator.c, &None, &None), 3);

    let f = boundary_functional(&rs).unwrap();
    let tr = trajectory(&lax, p.window.0, p.window.1, p.steps, Some(&rep.indicator), &tol).unwrap();
    let mut global = 0i8;
    for k in 0..tr.len() {
        let s = tr.indicator_signs[k];
        let fq = f.eval_f64(&tr.positions[k]);
        if tr.degenerate[k] || s == 0 || fq.abs() < 1e-12 {
            continue;
        }
        let prod = s * fq.signum() as i8;
        if global == 0 {
            global = prod;
        }
        assert_eq!(prod, global, "t = {}", tr.times[k]);
    }
}

fn t_poly(c: Vec<Rational>) -> RationalPoly {
    RationalPoly::new("t", c)
}

#[test]
fn a2_preset_reproduces_the_reference_charpoly() {
    let p = preset("a2-paper").unwrap();
    let lax = build_lax(Arc::new(RootSystem::new(p.ty)), &p.q0, &p.p0).unwrap();
    let chi = char_poly_t(&lax).unwrap();
    let c0 = t_poly(vec![
        rat(-5929, 62500),
        rat(3003, 1250),
        rat(235613523, 2371600),
        rat(-3061123, 1694),
        rat(-16356434361825, 281224328),
        rat(5719079645625, 5021863),
        Rational::new((-17065397825724953125i128).into(), 3334758081424i64.into()),
    ]);
    let c2 = t_poly(vec![
        rat(8649, 10000),
        rat(-1953, 50),
        rat(49797639, 47432),
        rat(-23290425, 1694),
        rat(60271544075625, 562448656),
    ]);
    let c4 = t_poly(vec![rat(-93, 50), int(42), rat(-7763475, 11858)]);
    assert_eq!(chi.coefficient(0), &c0);
    assert_eq!(chi.coefficient(2), &c2);
    assert_eq!(chi.coefficient(4), &c4);
    assert_eq!(chi.coefficient(6), &RationalPoly::one("t"));
    for k in [1, 3, 5] {
        assert!(chi.coefficient(k).is_zero());
    }

    let delta = symbolic_discriminant(&chi).unwrap();
    let f = factor_rationals(&delta).unwrap();
    assert_eq!(f.expand("t"), delta);
    assert_eq!(f.factors.len(), 2);
    let cubic = f.factors.iter().find(|x| x.poly.degree() == Some(3)).unwrap();
    let sextic = f.factors.iter().find(|x| x.poly.degree() == Some(6)).unwrap();
    assert_eq!(cubic.poly.monic(), reference_cubic());
    assert_eq!(cubic.multiplicity, 4);
    assert_eq!(sextic.multiplicity, 3);
    assert_eq!(count_real_roots(&cubic.poly, &None, &None), 3);
    assert_eq!(count_real_roots(&sextic.poly, &None, &None), 0);
}
