//! Quadratic Lie algebras by structure constants, and connections on the
//! trivial bundle `Q = M × g`.

use num::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::foliated::{Chart, FVec};
use crate::linalg::{self, RMat};
use crate::qforms::{PMat, QForm};
use crate::report::Report;
use crate::ring::{Poly, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QLie {
    dim: usize,
    c: Vec<Rat>,
    gram: RMat,
}

impl QLie {
    /// Shape checks only; the algebraic axioms are left to [`validate_qlie`].
    pub fn new(dim: usize, c: Vec<Vec<Vec<Rat>>>, gram: RMat) -> Result<Self> {
        let shape_ok = c.len() == dim && c.iter().all(|ci| ci.len() == dim && ci.iter().all(|cij| cij.len() == dim));
        if !shape_ok {
            return Err(Error::DimMismatch(format!("structure constants are not {dim}x{dim}x{dim}")));
        }
        if !linalg::is_square(&gram, dim) {
            return Err(Error::DimMismatch(format!("gram is not {dim}x{dim}")));
        }
        Ok(QLie { dim, c: c.into_iter().flatten().flatten().collect(), gram })
    }

    /// Structure constants with the Killing form as gram.
    pub fn with_killing(dim: usize, c: Vec<Vec<Vec<Rat>>>) -> Result<Self> {
        let mut g = Self::new(dim, c, linalg::zeros(dim, dim))?;
        g.gram = g.killing_form();
        Ok(g)
    }

    pub fn abelian(gram: RMat) -> Result<Self> {
        let d = gram.len();
        Self::new(d, vec![vec![vec![Rat::zero(); d]; d]; d], gram)
    }

    /// `so(3)` with `[e1,e2]=e3` and cyclic, carrying its Killing form.
    pub fn so3() -> Self {
        let mut c = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = Rat::one();
            c[j][i][k] = -Rat::one();
        }
        Self::with_killing(3, c).expect("so(3) shape")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    /// `c^k_{ij}`.
    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<Rat>>> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| self.structure(i, j, k).clone()).collect()).collect()).collect()
    }

    pub fn with_gram(&self, gram: RMat) -> Result<Self> {
        if !linalg::is_square(&gram, self.dim) {
            return Err(Error::DimMismatch(format!("gram is not {0}x{0}", self.dim)));
        }
        Ok(QLie { gram, ..self.clone() })
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Matrix of `ad_{e_i}`: entry `[k][j] = c^k_{ij}`.
    pub fn ad_matrix(&self, i: usize) -> RMat {
        let d = self.dim;
        (0..d).map(|k| (0..d).map(|j| self.structure(i, j, k).clone()).collect()).collect()
    }

    fn bracket_rat(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let d = self.dim;
        let mut out = vec![Rat::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let s = self.structure(i, j, k);
                    if !s.is_zero() {
                        *o += &xy * s;
                    }
                }
            }
        }
        out
    }

    fn pair_rat(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.gram[i][j].is_zero() {
                    acc += &x[i] * &y[j] * &self.gram[i][j];
                }
            }
        }
        acc
    }

    /// Pointwise bracket of two Poly-valued vectors.
    pub fn bracket_vals(&self, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
        let d = self.dim;
        let nv = x.first().or(y.first()).map(Poly::nvars).unwrap_or(0);
        let mut out = vec![Poly::zero(nv); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let s = self.structure(i, j, k);
                    if !s.is_zero() {
                        *o += &xy.scale(s);
                    }
                }
            }
        }
        out
    }

    /// Pointwise pairing of two Poly-valued vectors.
    pub fn pair_vals(&self, x: &[Poly], y: &[Poly]) -> Poly {
        let nv = x.first().or(y.first()).map(Poly::nvars).unwrap_or(0);
        let mut acc = Poly::zero(nv);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.gram[i][j].is_zero() && !x[i].is_zero() && !y[j].is_zero() {
                    acc += &(&x[i] * &y[j]).scale(&self.gram[i][j]);
                }
            }
        }
        acc
    }

    /// `Tr(ad_x ∘ ad_y)` on basis vectors.
    pub fn killing_form(&self) -> RMat {
        let d = self.dim;
        let ads: Vec<RMat> = (0..d).map(|i| self.ad_matrix(i)).collect();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let p = linalg::mul(&ads[i], &ads[j]);
                        (0..d).fold(Rat::zero(), |acc, l| acc + &p[l][l])
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn killing_form(g: &QLie) -> RMat {
    g.killing_form()
}

fn unit(d: usize, i: usize) -> Vec<Rat> {
    (0..d).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()
}

fn rat_vec_json(v: &[Rat]) -> serde_json::Value {
    json!(v.iter().map(crate::ring::fmt_rat).collect::<Vec<_>>())
}

/// Checks antisymmetry, Jacobi, gram symmetry, nondegeneracy and invariance.
/// Witness indices are 1-based and the first failure in lex order is kept.
pub fn validate_qlie(g: &QLie) -> Report {
    let d = g.dim;
    let mut r = Report::new();
    let e = |i: usize| unit(d, i);

    let anti = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .find(|&(i, j)| (0..d).any(|k| g.structure(i, j, k) + g.structure(j, i, k) != Rat::zero()))
        .map(|(i, j)| json!({"pair": [i + 1, j + 1]}));
    r.record("antisymmetry", anti);

    let mut jac = None;
    'outer: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let t1 = g.bracket_rat(&e(i), &g.bracket_rat(&e(j), &e(k)));
                let t2 = g.bracket_rat(&e(j), &g.bracket_rat(&e(k), &e(i)));
                let t3 = g.bracket_rat(&e(k), &g.bracket_rat(&e(i), &e(j)));
                let sum: Vec<Rat> = (0..d).map(|l| &t1[l] + &t2[l] + &t3[l]).collect();
                if sum.iter().any(|v| !v.is_zero()) {
                    jac = Some(json!({"triple": [i + 1, j + 1, k + 1], "defect": rat_vec_json(&sum)}));
                    break 'outer;
                }
            }
        }
    }
    r.record("jacobi", jac);

    let sym = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .find(|&(i, j)| g.gram[i][j] != g.gram[j][i])
        .map(|(i, j)| json!({"pair": [i + 1, j + 1]}));
    r.record("gram_symmetry", sym);

    let det = linalg::det(&g.gram);
    if det.is_zero() {
        r.fail("nondegeneracy", json!({"det": "0/1"}));
    } else {
        r.pass("nondegeneracy");
    }

    let mut inv = None;
    'inv: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let v = g.pair_rat(&g.bracket_rat(&e(i), &e(j)), &e(k)) + g.pair_rat(&e(j), &g.bracket_rat(&e(i), &e(k)));
                if !v.is_zero() {
                    inv = Some(json!({"triple": [i + 1, j + 1, k + 1], "defect": crate::ring::fmt_rat(&v)}));
                    break 'inv;
                }
            }
        }
    }
    r.record("invariance", inv);
    r
}

/// `∇ = d + ω` on the trivialization, with one `d×d` Poly matrix per
/// foliated coordinate: `∇_{∂_i} s = ∂_i s + ω_i s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conn {
    chart: Chart,
    dim: usize,
    omega: Vec<PMat>,
}

impl Conn {
    pub fn new(chart: Chart, dim: usize, omega: Vec<PMat>) -> Result<Self> {
        if omega.len() != chart.k {
            return Err(Error::DimMismatch(format!("{} connection matrices for k={}", omega.len(), chart.k)));
        }
        for m in &omega {
            if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                return Err(Error::DimMismatch(format!("connection matrix is not {dim}x{dim}")));
            }
            if let Some(p) = m.iter().flatten().find(|p| p.nvars() != chart.n) {
                return Err(Error::VarMismatch(p.nvars(), chart.n));
            }
        }
        Ok(Conn { chart, dim, omega })
    }

    pub fn trivial(chart: Chart, dim: usize) -> Self {
        Conn { chart, dim, omega: vec![vec![vec![chart.zero(); dim]; dim]; chart.k] }
    }

    /// Constant matrices, one per foliated coordinate.
    pub fn constant(chart: Chart, mats: &[RMat]) -> Result<Self> {
        let dim = mats.first().map(|m| m.len()).unwrap_or(0);
        let omega = mats
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(|c| Poly::constant(chart.n, c.clone())).collect()).collect())
            .collect();
        Self::new(chart, dim, omega)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> &[PMat] {
        &self.omega
    }

    /// `∂_i s + ω_i s` on a Poly vector.
    pub fn nabla_coord(&self, i: usize, s: &[Poly]) -> Vec<Poly> {
        let w = &self.omega[i];
        (0..self.dim)
            .map(|c| {
                let mut v = s[c].d(i);
                for (a, sa) in s.iter().enumerate() {
                    if !w[c][a].is_zero() && !sa.is_zero() {
                        v += &(&w[c][a] * sa);
                    }
                }
                v
            })
            .collect()
    }

    /// `∇_X s` on Poly vectors.
    pub fn nabla_vals(&self, x: &FVec, s: &[Poly]) -> Vec<Poly> {
        let mut out = vec![self.chart.zero(); self.dim];
        for (i, xi) in x.comps().iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.nabla_coord(i, s)) {
                *o += &(xi * &v);
            }
        }
        out
    }
}

pub fn nabla_apply(c: &Conn, x: &FVec, s: &QForm) -> Result<QForm> {
    c.chart.ensure_same(&x.chart())?;
    c.chart.ensure_same(&s.chart())?;
    if s.degree() != 0 {
        return Err(Error::Degree(format!("∇ acts on sections, got degree {}", s.degree())));
    }
    if s.dim() != c.dim {
        return Err(Error::DimMismatch(format!("section of rank {} for connection of rank {}", s.dim(), c.dim)));
    }
    QForm::section(c.chart, c.nabla_vals(x, &s.values()))
}

/// Metric compatibility and bracket derivation, checked on coordinate fields
/// and the constant frame.
pub fn validate_conn(c: &Conn, g: &QLie) -> Report {
    let mut r = Report::new();
    if c.dim != g.dim() {
        r.fail("rank", json!({"connection": c.dim, "algebra": g.dim()}));
        return r;
    }
    let d = c.dim;
    let nv = c.chart.n;
    let frame = |a: usize| -> Vec<Poly> {
        (0..d).map(|b| if a == b { Poly::one(nv) } else { Poly::zero(nv) }).collect()
    };
    let mut metric = None;
    let mut deriv = None;
    for i in 0..c.chart.k {
        for a in 0..d {
            for b in 0..d {
                let (ea, eb) = (frame(a), frame(b));
                let na = c.nabla_coord(i, &ea);
                let nb = c.nabla_coord(i, &eb);
                if metric.is_none() {
                    let lhs = g.pair_vals(&ea, &eb).d(i);
                    let rhs = &g.pair_vals(&na, &eb) + &g.pair_vals(&ea, &nb);
                    let defect = &lhs - &rhs;
                    if !defect.is_zero() {
                        metric = Some(json!({"coordinate": i + 1, "pair": [a + 1, b + 1], "defect": defect.to_string()}));
                    }
                }
                if deriv.is_none() {
                    let lhs = c.nabla_coord(i, &g.bracket_vals(&ea, &eb));
                    let r1 = g.bracket_vals(&na, &eb);
                    let r2 = g.bracket_vals(&ea, &nb);
                    if (0..d).any(|l| !(&(&lhs[l] - &r1[l]) - &r2[l]).is_zero()) {
                        deriv = Some(json!({"coordinate": i + 1, "pair": [a + 1, b + 1]}));
                    }
                }
            }
        }
    }
    r.record("metric_compatibility", metric);
    r.record("bracket_derivation", deriv);
    r
}
