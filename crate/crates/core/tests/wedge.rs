use courant_core::foliated::{Chart, FVec};
use courant_core::qforms::{ad_of, bracket_wedge, curvature, d_nabla, pair_wedge, QForm};
use courant_core::qlie::{nabla_apply, validate_conn, Conn, QLie};
use courant_core::ring::{int, Poly, Rat};
use courant_core::sampler::Sampler;
use proptest::prelude::*;

fn algebra(so3: bool) -> QLie {
    if so3 {
        QLie::so3()
    } else {
        QLie::abelian(vec![vec![int(1), int(0)], vec![int(0), int(-1)]]).unwrap()
    }
}

fn chart(n: usize, k: usize) -> Chart {
    Chart::new(n, k.clamp(1, n)).unwrap()
}

fn sign(p: usize) -> Rat {
    if p.is_multiple_of(2) { int(1) } else { int(-1) }
}

fn at(w: &QForm, vs: &[FVec]) -> Vec<Poly> {
    w.eval(vs).unwrap()
}

fn sub(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `ω_i = ad_{w_i}` for random sections `w_i`: metric and a derivation.
fn inner_conn(g: &QLie, c: Chart, s: &mut Sampler) -> Conn {
    let omega = (0..c.k).map(|_| ad_of(g, &s.section(c, g.dim())).unwrap().eval_frame(&[])).collect();
    Conn::new(c, g.dim(), omega).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn wedge_formula_identities(seed in any::<u64>(), so3 in any::<bool>(), n in 3usize..=4, k in 3usize..=4) {
        let g = algebra(so3);
        let c = chart(n, k);
        let d = g.dim();
        let mut s = Sampler::new(seed, 2);
        let (a1, a2, r) = (s.qform(c, d, 1), s.qform(c, d, 1), s.qform(c, d, 2));
        let (x, y, z) = (s.fvec(c), s.fvec(c), s.fvec(c));
        let pv = |u: &[Poly], v: &[Poly]| g.pair_vals(u, v);
        let (ax, ay, az) = (at(&a1, std::slice::from_ref(&x)), at(&a1, std::slice::from_ref(&y)), at(&a1, std::slice::from_ref(&z)));

        let lhs = pair_wedge(&g, &a1, &a2).unwrap().eval(&[x.clone(), y.clone()]).unwrap();
        let rhs = &pv(&ax, &at(&a2, std::slice::from_ref(&y))) - &pv(&ay, &at(&a2, std::slice::from_ref(&x)));
        prop_assert_eq!(lhs, rhs);

        let lhs = pair_wedge(&g, &a1, &r).unwrap().eval(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let rhs = &(&pv(&ax, &at(&r, &[y.clone(), z.clone()])) - &pv(&ay, &at(&r, &[x.clone(), z.clone()])))
            + &pv(&az, &at(&r, &[x.clone(), y.clone()]));
        prop_assert_eq!(lhs, rhs);

        let aa = bracket_wedge(&g, &a1, &a1).unwrap();
        let lhs = at(&aa, &[x.clone(), y.clone()]);
        let rhs: Vec<Poly> = g.bracket_vals(&ax, &ay).iter().map(|p| p.scale(&int(2))).collect();
        prop_assert_eq!(lhs, rhs);

        let lhs = pair_wedge(&g, &a1, &aa).unwrap().eval(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let rhs = pv(&ax, &g.bracket_vals(&ay, &az)).scale(&int(6));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_symmetry_and_jacobi(seed in any::<u64>(), so3 in any::<bool>(), k in 1usize..=4, p in 0usize..=2, q in 0usize..=2, r in 0usize..=2) {
        let g = algebra(so3);
        let c = chart(4, k);
        let (p, q, r) = (p.min(c.k), q.min(c.k), r.min(c.k));
        let d = g.dim();
        let mut s = Sampler::new(seed, 1);
        let (u, v, w) = (s.qform(c, d, p), s.qform(c, d, q), s.qform(c, d, r));
        let br = |a: &QForm, b: &QForm| bracket_wedge(&g, a, b).unwrap();
        prop_assert_eq!(br(&u, &v), br(&v, &u).scale_rat(&-sign(p * q)));
        prop_assert_eq!(pair_wedge(&g, &u, &v).unwrap(), pair_wedge(&g, &v, &u).unwrap().scale_rat(&sign(p * q)));
        let rhs = br(&br(&u, &v), &w).add(&br(&v, &br(&u, &w)).scale_rat(&sign(p * q))).unwrap();
        prop_assert_eq!(br(&u, &br(&v, &w)), rhs);
        // invariance: ⟨[u∧v]∧w⟩ = ⟨u∧[v∧w]⟩
        prop_assert_eq!(pair_wedge(&g, &br(&u, &v), &w).unwrap(), pair_wedge(&g, &u, &br(&v, &w)).unwrap());
    }

    #[test]
    fn d_nabla_squared_is_curvature(seed in any::<u64>(), so3 in any::<bool>(), k in 1usize..=4, p in 0usize..=2) {
        let g = algebra(so3);
        let c = chart(4, k);
        let d = g.dim();
        let mut s = Sampler::new(seed, 1);
        // arbitrary polynomial connection matrices
        let omega = (0..c.k).map(|_| (0..d).map(|_| (0..d).map(|_| s.poly(c.n)).collect()).collect()).collect();
        let conn = Conn::new(c, d, omega).unwrap();
        let w = s.qform(c, d, p.min(c.k));
        let dd = d_nabla(&conn, &d_nabla(&conn, &w).unwrap()).unwrap();
        prop_assert_eq!(dd, curvature(&conn).act(&w).unwrap());
    }

    #[test]
    fn inner_connections_are_valid(seed in any::<u64>(), k in 1usize..=3) {
        let g = QLie::so3();
        let c = chart(3, k);
        let mut s = Sampler::new(seed, 2);
        let conn = inner_conn(&g, c, &mut s);
        prop_assert!(validate_conn(&conn, &g).passed());
        let (a, b, x) = (s.section(c, 3), s.section(c, 3), s.fvec(c));
        let (na, nb) = (nabla_apply(&conn, &x, &a).unwrap().values(), nabla_apply(&conn, &x, &b).unwrap().values());
        let (av, bv) = (a.values(), b.values());
        prop_assert_eq!(x.apply(&g.pair_vals(&av, &bv)), &g.pair_vals(&na, &bv) + &g.pair_vals(&av, &nb));
        let lhs = conn.nabla_vals(&x, &g.bracket_vals(&av, &bv));
        let rhs: Vec<Poly> = g.bracket_vals(&na, &bv).iter().zip(g.bracket_vals(&av, &nb)).map(|(l, r)| l + &r).collect();
        prop_assert!(sub(&lhs, &rhs).iter().all(Poly::is_zero));
    }
}

#[test]
fn pair_wedge_example() {
    let g = algebra(false);
    let c = Chart::new(2, 2).unwrap();
    let dx = |i| courant_core::foliated::TForm::basis(c, &[i], c.one()).unwrap();
    let a1 = QForm::elementary(&dx(0), 2, 0);
    let a2 = QForm::elementary(&dx(1), 2, 0);
    let expect = courant_core::foliated::TForm::basis(c, &[0, 1], c.one()).unwrap();
    assert_eq!(pair_wedge(&g, &a1, &a2).unwrap(), expect);
    assert!(pair_wedge(&g, &a1, &QForm::elementary(&dx(1), 2, 1)).unwrap().is_zero());
}
