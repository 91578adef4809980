//! Example families: exact (rank 0), rank-one abelian, heterotic-like data
//! on a trivialized bundle, and the point-case Manin double.

use num::Zero;
use serde_json::json;

use crate::error::{Error, Result};
use crate::foliated::{tangential_d, Chart, TForm};
use crate::io;
use crate::linalg::{self, RMat};
use crate::qforms::QForm;
use crate::qlie::{validate_qlie, Conn, QLie};
use crate::report::Report;
use crate::ring::{int, Rat};
use crate::standard::{validate_stdca, StdCA};

fn closed_h(h: &TForm, chart: Chart) -> Result<()> {
    chart.ensure_same(&h.chart())?;
    if h.degree() != 3 {
        return Err(Error::Degree(format!("H must be a 3-form, got degree {}", h.degree())));
    }
    let dh = tangential_d(h);
    if !dh.is_zero() {
        let mut r = Report::new();
        r.fail("closed_h", json!({"dH": io::tform_to_json(&dh)}));
        return Err(Error::Rejected(Box::new(r)));
    }
    Ok(())
}

/// Exact algebroid on `T* ⊕ T` twisted by a closed 3-form.
pub fn make_dn(n: usize, h: TForm) -> Result<StdCA> {
    let chart = Chart::new(n, n)?;
    closed_h(&h, chart)?;
    let g = QLie::abelian(vec![])?;
    StdCA::new(chart, g, Conn::trivial(chart, 0), QForm::zero(chart, 0, 2), h)
}

/// Rank-one abelian Q with `⟨e,e⟩ = 1`, trivial ∇ and `R = 0`.
pub fn make_bn(n: usize, h: TForm) -> Result<StdCA> {
    let chart = Chart::new(n, n)?;
    closed_h(&h, chart)?;
    let g = QLie::abelian(vec![vec![int(1)]])?;
    StdCA::new(chart, g, Conn::trivial(chart, 1), QForm::zero(chart, 1, 2), h)
}

/// Accepts the data only if all compatibility relations hold.
pub fn make_heterotic_like(chart: Chart, qlie: QLie, conn: Conn, r: QForm, h: TForm) -> Result<StdCA> {
    let e = StdCA::new(chart, qlie, conn, r, h)?;
    let report = validate_stdca(&e);
    if !report.passed() {
        return Err(Error::Rejected(Box::new(report)));
    }
    Ok(e)
}

/// Abelian rank 2 with hyperbolic gram over `R^4`:
/// `R = dx1∧dx2 ⊗ e1 + dx3∧dx4 ⊗ e2`, `H = x1 dx2∧dx3∧dx4`.
pub fn heterotic_4d() -> StdCA {
    let c = Chart::new(4, 4).expect("chart");
    let gram = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
    let g = QLie::abelian(gram).expect("shape");
    let r = QForm::new(
        c,
        2,
        vec![TForm::basis(c, &[0, 1], c.one()).expect("idx"), TForm::basis(c, &[2, 3], c.one()).expect("idx")],
    )
    .expect("shape");
    let h = TForm::basis(c, &[1, 2, 3], c.x(0)).expect("idx");
    make_heterotic_like(c, g, Conn::trivial(c, 2), r, h).expect("valid heterotic-like data")
}

/// so(3) with its Killing form over `R^n`, `∇ = d + dx1 ⊗ ad_{e1}`, `R = 0`, `H = 0`.
pub fn so3_flat(n: usize) -> StdCA {
    let c = Chart::new(n, n).expect("chart");
    let g = QLie::so3();
    let mut mats = vec![linalg::zeros(3, 3); n];
    if n > 0 {
        mats[0] = g.ad_matrix(0);
    }
    let conn = Conn::constant(c, &mats).expect("shape");
    make_heterotic_like(c, g, conn, QForm::zero(c, 3, 2), TForm::zero(c, 3)).expect("flat so(3) data")
}

/// The double `g ⊕ g*` of a Lie bialgebra, with the pairing `ξ(y) + η(x)`.
///
/// `c[i][j][k]` are the constants of g and `f[i][j][k]` those of the dual
/// bracket `[ε^i, ε^j] = Σ f^{ij}_k ε^k`. Mixed brackets follow from
/// invariance: `[e_i, ε^j] = Σ_m f^{jm}_i e_m − Σ_l c^j_{il} ε^l`.
pub fn make_point_manin(c: &[Vec<Vec<Rat>>], f: &[Vec<Vec<Rat>>]) -> Result<QLie> {
    let d = c.len();
    let shape = |t: &[Vec<Vec<Rat>>]| t.len() == d && t.iter().all(|a| a.len() == d && a.iter().all(|b| b.len() == d));
    if !shape(c) || !shape(f) {
        return Err(Error::DimMismatch(format!("bialgebra constants must be {d}x{d}x{d}")));
    }
    let n = 2 * d;
    let mut cc = vec![vec![vec![Rat::zero(); n]; n]; n];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                cc[i][j][k] = c[i][j][k].clone();
                cc[d + i][d + j][d + k] = f[i][j][k].clone();
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            let mut v = vec![Rat::zero(); n];
            for (m, vm) in v.iter_mut().enumerate().take(d) {
                *vm += &f[j][m][i];
            }
            for l in 0..d {
                v[d + l] -= &c[i][l][j];
            }
            for k in 0..n {
                cc[i][d + j][k] = v[k].clone();
                cc[d + j][i][k] = -v[k].clone();
            }
        }
    }
    let mut gram: RMat = linalg::zeros(n, n);
    for i in 0..d {
        gram[i][d + i] = int(1);
        gram[d + i][i] = int(1);
    }
    let g = QLie::new(n, cc, gram)?;
    let report = validate_qlie(&g);
    if !report.passed() {
        return Err(Error::Rejected(Box::new(report)));
    }
    Ok(g)
}

/// Constants of the 2-dimensional nonabelian algebra `[e1, e2] = e2`,
/// optionally extended by a central direction.
pub fn aff1_constants(extra_central: bool) -> Vec<Vec<Vec<Rat>>> {
    let d = if extra_central { 3 } else { 2 };
    let mut c = vec![vec![vec![Rat::zero(); d]; d]; d];
    c[0][1][1] = int(1);
    c[1][0][1] = int(-1);
    c
}
