mod common;

use common::*;
use courant_core::error::Error;
use courant_core::foliated::{interior, Chart, FVec, TForm};
use courant_core::gallery::{heterotic_4d, make_bn, so3_flat};
use courant_core::qforms::QForm;
use courant_core::qlie::{nabla_apply, QLie};
use courant_core::sampler::Sampler;
use courant_core::standard::{GSec, StdCA};
use courant_core::transform::*;

#[test]
fn gauge_bracket_example() {
    let c = Chart::new(2, 2).unwrap();
    let g = QLie::abelian(vec![vec![courant_core::ring::int(1)]]).unwrap();
    let d1 = InfAut::gauge(QForm::elementary(&dx(c, &[0]), 1, 0), TForm::zero(c, 2)).unwrap();
    let d2 = InfAut::gauge(QForm::elementary(&dx(c, &[1]), 1, 0), TForm::zero(c, 2)).unwrap();
    let br = infaut_bracket(&g, &d1, &d2).unwrap();
    assert_eq!(br, InfAut::gauge(QForm::zero(c, 1, 1), dx(c, &[0, 1])).unwrap());
}

#[test]
fn fixtures_satisfy_all_conditions() {
    for (name, e) in instances() {
        let mut s = Sampler::new(41, 2);
        for i in 0..4 {
            let dd = fixture(&mut s, name, &e);
            let rep = check_infaut(&dd, &e, 5, i, 2);
            assert!(rep.passed(), "{name}: {:?}", rep.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn brackets_of_fixtures_are_fixtures() {
    for (name, e) in instances() {
        let mut s = Sampler::new(42, 1);
        let (d1, d2) = (fixture(&mut s, name, &e), fixture(&mut s, name, &e));
        let br = infaut_bracket(&e.qlie, &d1, &d2).unwrap();
        let rep = check_infaut(&br, &e, 3, 0, 2);
        assert!(rep.passed(), "{name}: {:?}", rep.failures().collect::<Vec<_>>());
    }
}

#[test]
fn bn_requires_closed_a() {
    let c = Chart::new(3, 3).unwrap();
    let e = make_bn(3, TForm::zero(c, 3)).unwrap();
    let bad = InfAut::gauge(QForm::elementary(&TForm::basis(c, &[1], c.x(0)).unwrap(), 1, 0), TForm::zero(c, 2)).unwrap();
    let rep = check_infaut(&bad, &e, 10, 0, 2);
    let cond = rep.get("curvature_condition").unwrap();
    assert!(!cond.passed && cond.witness.is_some());
    assert!(!rep.get("bracket_derivation").unwrap().passed);
}

#[test]
fn broken_fixtures_fail_the_matching_condition() {
    let e = heterotic_4d();
    let mut s = Sampler::new(43, 1);
    let mut dd = fixture(&mut s, "heterotic_4d", &e);
    dd.b = dd.b.add(&TForm::basis(e.chart, &[0, 1], e.chart.x(2)).unwrap()).unwrap();
    assert!(!check_infaut(&dd, &e, 3, 0, 2).get("three_form_condition").unwrap().passed);

    let g3 = so3_flat(2);
    let c = g3.chart;
    let mut theta = zero_theta(c, 3);
    theta[0][0] = c.one();
    let dd = InfAut::new(FVec::zero(c), theta, QForm::zero(c, 3, 1), TForm::zero(c, 2)).unwrap();
    let rep = check_infaut(&dd, &g3, 3, 0, 2);
    assert!(!rep.get("theta_metric").unwrap().passed);
    assert!(!rep.get("theta_bracket").unwrap().passed);
    assert!(!rep.get("pairing_derivation").unwrap().passed);
}

#[test]
fn bracket_is_antisymmetric_and_satisfies_jacobi() {
    for (name, e) in [("so3_foliated", so3_foliated()), ("heterotic_4d", heterotic_4d()), ("bn", bn_closed())] {
        let mut s = Sampler::new(44, 1);
        for _ in 0..20 {
            let (a, b, c) = (rand_infaut(&mut s, &e), rand_infaut(&mut s, &e), rand_infaut(&mut s, &e));
            let g = &e.qlie;
            let br = |x: &InfAut, y: &InfAut| infaut_bracket(g, x, y).unwrap();
            let zero = InfAut::zero(e.chart, e.dim());
            assert_eq!(br(&a, &a), zero, "{name}");
            let ab = br(&a, &b);
            let ba = br(&b, &a);
            assert_eq!(infaut_bracket(g, &ab, &zero).unwrap(), zero);
            let sum = add(&ab, &ba);
            assert_eq!(sum, zero, "{name}");
            let jac = add(&add(&br(&a, &br(&b, &c)), &br(&b, &br(&c, &a))), &br(&c, &br(&a, &b)));
            assert_eq!(jac, zero, "{name}");
        }
    }
}

fn add(x: &InfAut, y: &InfAut) -> InfAut {
    let theta = courant_core::qforms::pmat_add(x.theta(), y.theta());
    InfAut::new(x.field().add(y.field()), theta, x.a.add(&y.a).unwrap(), x.b.add(&y.b).unwrap()).unwrap()
}

#[test]
fn commutator_of_actions_is_the_bracket() {
    for (name, e) in instances() {
        let mut s = Sampler::new(45, 1);
        for _ in 0..10 {
            let (d1, d2) = (rand_infaut(&mut s, &e), rand_infaut(&mut s, &e));
            let u = e.random_section(&mut s);
            let g = &e.qlie;
            let act = |d: &InfAut, v: &GSec| infaut_apply(g, d, v).unwrap();
            let comm = act(&d1, &act(&d2, &u)).sub(&act(&d2, &act(&d1, &u))).unwrap();
            assert_eq!(act(&infaut_bracket(g, &d1, &d2).unwrap(), &u), comm, "{name}");
        }
    }
}

#[test]
fn linearize_gauge_path() {
    for (name, e) in instances() {
        let mut s = Sampler::new(46, 2);
        for _ in 0..5 {
            let path = GaugePath { a: s.qform(e.chart, e.dim(), 1), b: s.tform(e.chart, 2) };
            let got = linearize(&path, &e).unwrap();
            assert_eq!(got, InfAut::gauge(path.a.clone(), path.b.clone()).unwrap(), "{name}");
        }
    }
}

#[test]
fn gauge_path_series_matches_psi_maps() {
    // At t = 1 the formal series sums to Ψ_A ∘ Ψ_B.
    let e = so3_flat(3);
    let mut s = Sampler::new(47, 1);
    let path = GaugePath { a: s.qform(e.chart, 3, 1), b: s.tform(e.chart, 2) };
    let u = e.random_section(&mut s);
    let series = path.apply_formal(&e.qlie, &u).unwrap();
    let total = series.iter().skip(1).fold(series[0].clone(), |acc, t| acc.add(t).unwrap());
    let direct = psi_apply(&e.qlie, &Psi::A(path.a.clone()), &psi_apply(&e.qlie, &Psi::B(path.b.clone()), &u).unwrap()).unwrap();
    assert_eq!(total, direct);
    assert!(series.len() <= 3);
    assert!(series.iter().skip(2).all(|t| t.q.is_zero() && t.x.is_zero()));
}

/// `s ↦ s + t·s`, whose t-part is not a generator.
struct Dilation;

impl FormalFamily for Dilation {
    fn apply_formal(&self, _g: &QLie, s: &GSec) -> courant_core::Result<Vec<GSec>> {
        Ok(vec![s.clone(), s.clone()])
    }
}

#[test]
fn linearize_rejects_non_generators() {
    let e = heterotic_4d();
    assert!(matches!(linearize(&Dilation, &e), Err(Error::Invalid(_))));
}

fn nabla_defect(e: &StdCA, dd: &InfAut, u: &FVec, s: &QForm) -> QForm {
    let xu = courant_core::foliated::f_bracket(dd.field(), u).unwrap();
    let t1 = dd.op.apply(&nabla_apply(&e.conn, u, s).unwrap()).unwrap();
    let t2 = nabla_apply(&e.conn, u, &dd.op.apply(s).unwrap()).unwrap();
    let t3 = nabla_apply(&e.conn, &xu, s).unwrap();
    t1.sub(&t2).unwrap().sub(&t3).unwrap()
}

#[test]
fn nabla_condition_is_tensorial() {
    for (name, e) in instances() {
        let mut s = Sampler::new(48, 2);
        for _ in 0..5 {
            let generic = rand_infaut(&mut s, &e);
            let (u, sec, p) = (s.fvec(e.chart), s.section(e.chart, e.dim()), s.poly(e.chart.n));
            assert_eq!(nabla_defect(&e, &generic, &u.scale(&p), &sec), nabla_defect(&e, &generic, &u, &sec).scale(&p), "{name}");
            let dd = fixture(&mut s, name, &e);
            let au = dd.a.interior(&u).unwrap();
            let expect = QForm::section(e.chart, e.qlie.bracket_vals(&au.values(), &sec.values())).unwrap();
            assert_eq!(nabla_defect(&e, &dd, &u, &sec), expect, "{name}");
        }
    }
}

#[test]
fn infaut_json_roundtrip() {
    let e = so3_foliated();
    let mut s = Sampler::new(49, 2);
    let dd = rand_infaut(&mut s, &e);
    assert_eq!(InfAut::from_json(&dd.to_json(), e.chart, 3).unwrap(), dd);
    let path = GaugePath { a: s.qform(e.chart, 3, 1), b: s.tform(e.chart, 2) };
    assert_eq!(GaugePath::from_json(&path.to_json(), e.chart, 3).unwrap(), path);
}

#[test]
fn h_condition_sign_follows_the_derivation_property() {
    let c = Chart::new(4, 4).unwrap();
    let h = dx(c, &[0, 1, 2]);
    let e = make_bn(4, h.clone()).unwrap();
    let x = FVec::coord(c, 0).scale(&c.x(0));
    let with_b = |b: TForm| InfAut::new(x.clone(), zero_theta(c, 1), QForm::zero(c, 1, 1), b).unwrap();

    // db = L_X H: a derivation, accepted.
    let good = with_b(interior(&x, &h).unwrap());
    assert!(check_infaut(&good, &e, 10, 0, 2).passed());

    // db = −L_X H is not a derivation of the bracket, and is rejected.
    let rep = check_infaut(&with_b(interior(&x, &h).unwrap().neg()), &e, 10, 0, 2);
    assert!(!rep.get("bracket_derivation").unwrap().passed);
    assert!(!rep.get("three_form_condition").unwrap().passed);
}
