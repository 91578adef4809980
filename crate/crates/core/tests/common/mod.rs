#![allow(dead_code, clippy::needless_range_loop)]

use courant_core::foliated::{interior, tangential_d, Chart, FVec, FolAffine, TForm};
use courant_core::gallery::{heterotic_4d, make_bn, make_dn, so3_flat};
use courant_core::linalg::{self, RMat};
use courant_core::qforms::{PMat, QForm};
use courant_core::qlie::{Conn, QLie};
use courant_core::ring::{int, Poly, Rat};
use courant_core::sampler::Sampler;
use courant_core::standard::StdCA;
use courant_core::transform::{aut_compose, Aut, InfAut, QAutPair};
use num::Zero;

pub fn dx(c: Chart, idx: &[usize]) -> TForm {
    TForm::basis(c, idx, c.one()).unwrap()
}

pub fn hyperbolic() -> RMat {
    vec![vec![int(0), int(1)], vec![int(1), int(0)]]
}

/// so(3) over a chart with k = 2 < n = 3 and `∇ = d + x3 dx1 ⊗ ad_{e1}`.
pub fn so3_foliated() -> StdCA {
    let c = Chart::new(3, 2).unwrap();
    let g = QLie::so3();
    let ad = g.ad_matrix(0);
    let x3 = c.x(2);
    let w0: PMat = ad.iter().map(|r| r.iter().map(|v| x3.scale(v)).collect()).collect();
    let zero: PMat = vec![vec![c.zero(); 3]; 3];
    let conn = Conn::new(c, 3, vec![w0, zero]).unwrap();
    StdCA::new(c, g, conn, QForm::zero(c, 3, 2), TForm::zero(c, 3)).unwrap()
}

pub fn bn_closed() -> StdCA {
    let c = Chart::new(4, 4).unwrap();
    make_bn(4, dx(c, &[0, 1, 2])).unwrap()
}

pub fn dn_closed() -> StdCA {
    let c = Chart::new(3, 3).unwrap();
    make_dn(3, dx(c, &[0, 1, 2]).scale_rat(&int(2))).unwrap()
}

/// Instances used across the transformation suites.
pub fn instances() -> Vec<(&'static str, StdCA)> {
    vec![
        ("heterotic_4d", heterotic_4d()),
        ("so3_flat", so3_flat(3)),
        ("so3_foliated", so3_foliated()),
        ("bn", bn_closed()),
        ("dn", dn_closed()),
    ]
}

pub fn small_matrix(s: &mut Sampler, n: usize, bound: i64) -> RMat {
    (0..n).map(|_| (0..n).map(|_| int(s.range(-bound, bound))).collect()).collect()
}

/// Random invertible affine map preserving the foliation.
pub fn rand_affine(s: &mut Sampler, c: Chart) -> FolAffine {
    loop {
        let mut l = small_matrix(s, c.n, 2);
        for row in l.iter_mut().skip(c.k) {
            for v in row.iter_mut().take(c.k) {
                *v = Rat::zero();
            }
        }
        let t: Vec<Rat> = (0..c.n).map(|_| int(s.range(-2, 2))).collect();
        if let Ok(phi) = FolAffine::new(c, l, t) {
            return phi;
        }
    }
}

pub fn rand_translation(s: &mut Sampler, c: Chart) -> FolAffine {
    let t: Vec<Rat> = (0..c.n).map(|_| int(s.range(-2, 2))).collect();
    FolAffine::new(c, linalg::identity(c.n), t).unwrap()
}

/// Random orthogonal automorphism: Cayley transform of an inner derivation
/// plus, on abelian algebras, a gram-skew matrix.
pub fn rand_qaut(s: &mut Sampler, g: &QLie) -> QAutPair {
    let d = g.dim();
    loop {
        let mut k = linalg::zeros(d, d);
        for i in 0..d {
            let c = int(s.range(-2, 2));
            let ad = g.ad_matrix(i);
            for (r, row) in k.iter_mut().enumerate() {
                for (col, v) in row.iter_mut().enumerate() {
                    *v += &c * &ad[r][col];
                }
            }
        }
        if g.is_abelian() && d > 0 {
            let mut sk = linalg::zeros(d, d);
            for i in 0..d {
                for j in i + 1..d {
                    let v = int(s.range(-2, 2)) / int(3);
                    sk[i][j] = v.clone();
                    sk[j][i] = -v;
                }
            }
            k = linalg::mul(&linalg::inverse(g.gram()).unwrap(), &sk);
        }
        if let Ok(t) = QAutPair::cayley(&k) {
            if t.validate(g).passed() {
                return t;
            }
        }
    }
}

pub fn rand_pmat(s: &mut Sampler, c: Chart, d: usize) -> PMat {
    (0..d).map(|_| (0..d).map(|_| s.poly(c.n)).collect()).collect()
}

/// Unconstrained tuple `(φ, τ, A, B)`.
pub fn rand_aut(s: &mut Sampler, e: &StdCA) -> Aut {
    let c = e.chart;
    Aut::new(rand_affine(s, c), rand_qaut(s, &e.qlie), s.qform(c, e.dim(), 1), s.tform(c, 2)).unwrap()
}

pub fn exact(s: &mut Sampler, c: Chart, p: usize) -> TForm {
    tangential_d(&s.tform(c, p - 1))
}

/// One generator of the automorphism group of a gallery instance.
fn valid_generator(s: &mut Sampler, name: &str, e: &StdCA) -> Aut {
    let c = e.chart;
    let d = e.dim();
    let g = &e.qlie;
    match name {
        "dn" | "bn" => {
            // A constant nonzero H is only kept by translations.
            let phi = if e.h.is_zero() { rand_affine(s, c) } else { rand_translation(s, c) };
            let tau = if d == 1 && s.coin() { QAutPair::new(vec![vec![int(-1)]]).unwrap() } else { QAutPair::identity(d) };
            let a = if d == 1 { QForm::new(c, 1, vec![exact(s, c, 1)]).unwrap() } else { QForm::zero(c, 0, 1) };
            Aut::new(phi, tau, a, exact(s, c, 2)).unwrap()
        }
        "heterotic_4d" => {
            let c1 = s.range(-2, 2);
            let mut t = vec![int(c1)];
            t.extend((1..4).map(|_| int(s.range(-2, 2))));
            let phi = FolAffine::new(c, linalg::identity(4), t).unwrap();
            let (f, h) = (s.poly(4), s.poly(4));
            let df = tangential_d(&TForm::function(c, f.clone()));
            let dh = tangential_d(&TForm::function(c, h.clone()));
            let a = QForm::new(c, 1, vec![df, dh]).unwrap();
            let shift = &c.x(1).scale(&int(c1)) + &f;
            let b = TForm::basis(c, &[2, 3], -&shift)
                .unwrap()
                .sub(&TForm::basis(c, &[0, 1], h).unwrap())
                .unwrap()
                .add(&exact(s, c, 2))
                .unwrap();
            Aut::new(phi, QAutPair::identity(2), a, b).unwrap()
        }
        _ => {
            // ω = w dx1 ⊗ ad_{e1} with w independent of the leaf coordinates,
            // so A = dx1 ⊗ (w e1 − φ*w τ⁻¹e1).
            let tau = rand_qaut(s, g);
            let phi = rand_translation(s, c);
            let w = e.conn.omega()[0][2][1].clone();
            let pw = phi.pull_poly(&w).unwrap();
            let pre = linalg::mat_vec(&tau.t_inv, &[int(1), int(0), int(0)]);
            let comps = (0..d)
                .map(|a| {
                    let mut coeff = pw.scale(&-pre[a].clone());
                    if a == 0 {
                        coeff += &w;
                    }
                    TForm::basis(c, &[0], coeff).unwrap()
                })
                .collect();
            Aut::new(phi, tau, QForm::new(c, 1, comps).unwrap(), exact(s, c, 2)).unwrap()
        }
    }
}

/// Product of a few generators; valid for `e` whenever each generator is.
pub fn rand_valid_aut(s: &mut Sampler, name: &str, e: &StdCA) -> Aut {
    let mut out = Aut::identity(e.chart, e.dim());
    for _ in 0..s.range(1, 2) {
        out = aut_compose(&e.qlie, &out, &valid_generator(s, name, e)).unwrap();
    }
    out
}

pub fn poly_const(c: Chart, v: i64) -> Poly {
    Poly::constant(c.n, int(v))
}

pub fn e_vals(c: Chart, d: usize, a: usize) -> Vec<Poly> {
    (0..d).map(|b| if a == b { c.one() } else { c.zero() }).collect()
}

pub fn fvec(c: Chart, comps: Vec<Poly>) -> FVec {
    FVec::new(c, comps).unwrap()
}

pub fn zero_theta(c: Chart, d: usize) -> PMat {
    vec![vec![c.zero(); d]; d]
}

/// `ad_f` for a Q-valued function `f`.
pub fn ad_pmat(g: &QLie, f: &[Poly]) -> PMat {
    let d = g.dim();
    let nv = f.first().map(Poly::nvars).unwrap_or(0);
    (0..d)
        .map(|k| {
            (0..d)
                .map(|j| {
                    let mut acc = Poly::zero(nv);
                    for (i, fi) in f.iter().enumerate() {
                        let cst = g.structure(i, j, k);
                        if !num::Zero::is_zero(cst) {
                            acc += &fi.scale(cst);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Fixture generators of the Lie algebra of infinitesimal automorphisms.
pub fn fixture(s: &mut Sampler, name: &str, e: &StdCA) -> InfAut {
    let c = e.chart;
    let d = e.dim();
    match name {
        "bn" | "dn" => {
            let x = s.fvec(c);
            let a = if d == 1 { QForm::new(c, 1, vec![exact(s, c, 1)]).unwrap() } else { QForm::zero(c, 0, 1) };
            let b = interior(&x, &e.h).unwrap().add(&exact(s, c, 2)).unwrap();
            InfAut::new(x, zero_theta(c, d), a, b).unwrap()
        }
        "heterotic_4d" => {
            let (f, h) = (s.poly(4), s.poly(4));
            let a = QForm::new(c, 1, vec![tangential_d(&TForm::function(c, f.clone())), tangential_d(&TForm::function(c, h.clone()))])
                .unwrap();
            // db = L_X H − ⟨a∧R⟩ with ⟨a∧R⟩ = df∧dx34 + dh∧dx12.
            let b = TForm::basis(c, &[2, 3], -&f)
                .unwrap()
                .sub(&TForm::basis(c, &[0, 1], h).unwrap())
                .unwrap()
                .add(&exact(s, c, 2))
                .unwrap();
            // X = λ∂_1 + ∂_j moves H by λ dx234 = d(λ x2 dx34).
            let lam = s.coeff();
            let x = FVec::coord(c, 0)
                .scale(&Poly::constant(4, int(lam)))
                .add(&FVec::coord(c, 1 + s.index(3)));
            let b = b.add(&TForm::basis(c, &[2, 3], c.x(1).scale(&int(lam))).unwrap()).unwrap();
            InfAut::new(x, zero_theta(c, 2), a, b).unwrap()
        }
        _ => {
            // Inner gauge (0, ad_f, −∇f, closed) plus a leaf translation.
            let f = s.section(c, d);
            let a = courant_core::qforms::d_nabla(&e.conn, &f).unwrap().neg();
            let x = FVec::coord(c, 1).scale(&Poly::constant(c.n, int(s.coeff())));
            InfAut::new(x, ad_pmat(&e.qlie, &f.values()), a, exact(s, c, 2)).unwrap()
        }
    }
}

/// Gram-skew `θ = G⁻¹S` with `S` a random skew Poly matrix.
pub fn rand_skew_theta(s: &mut Sampler, e: &StdCA) -> PMat {
    let c = e.chart;
    let d = e.dim();
    let mut sk = zero_theta(c, d);
    for i in 0..d {
        for j in i + 1..d {
            let p = s.poly(c.n);
            sk[j][i] = -&p;
            sk[i][j] = p;
        }
    }
    let ginv = courant_core::linalg::inverse(e.qlie.gram()).unwrap();
    courant_core::qforms::pmat_mul(&courant_core::qforms::pmat_from_rat(c, &ginv), &sk)
}

/// Arbitrary `(X, θ, a, b)` with θ gram-skew, the only pointwise
/// constraint the commutator identity needs.
pub fn rand_infaut(s: &mut Sampler, e: &StdCA) -> InfAut {
    let c = e.chart;
    let theta = rand_skew_theta(s, e);
    InfAut::new(s.fvec(c), theta, s.qform(c, e.dim(), 1), s.tform(c, 2)).unwrap()
}
