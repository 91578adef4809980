//! Q-valued tangential forms `Ω•(F, Q)`, stored as one TForm per basis
//! vector of g, and End(Q)-valued forms.

use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::foliated::{self, combinations, tangential_d, wedge, Chart, FVec, FolAffine, TForm};
use crate::linalg::RMat;
use crate::qlie::{Conn, QLie};
use crate::ring::{Poly, Rat};

pub type PMat = Vec<Vec<Poly>>;

pub fn pmat_from_rat(chart: Chart, m: &RMat) -> PMat {
    m.iter().map(|row| row.iter().map(|c| Poly::constant(chart.n, c.clone())).collect()).collect()
}

pub fn pmat_vec(m: &PMat, v: &[Poly]) -> Vec<Poly> {
    m.iter()
        .map(|row| {
            let nv = v.first().map(Poly::nvars).unwrap_or(0);
            let mut acc = Poly::zero(nv);
            for (a, x) in row.iter().zip(v) {
                if !a.is_zero() && !x.is_zero() {
                    acc += &(a * x);
                }
            }
            acc
        })
        .collect()
}

pub fn pmat_mul(a: &PMat, b: &PMat) -> PMat {
    let d = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = Poly::zero(row[0].nvars());
                    for l in 0..d {
                        if !row[l].is_zero() && !b[l][j].is_zero() {
                            acc += &(&row[l] * &b[l][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn pmat_sub(a: &PMat, b: &PMat) -> PMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn pmat_add(a: &PMat, b: &PMat) -> PMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QForm {
    chart: Chart,
    degree: usize,
    comps: Vec<TForm>,
}

impl QForm {
    pub fn new(chart: Chart, degree: usize, comps: Vec<TForm>) -> Result<Self> {
        for c in &comps {
            chart.ensure_same(&c.chart())?;
            if c.degree() != degree {
                return Err(Error::Degree(format!("component of degree {} in a {degree}-form", c.degree())));
            }
        }
        Ok(QForm { chart, degree, comps })
    }

    pub fn zero(chart: Chart, dim: usize, degree: usize) -> Self {
        QForm { chart, degree, comps: vec![TForm::zero(chart, degree); dim] }
    }

    /// A section of Q from its component functions.
    pub fn section(chart: Chart, vals: Vec<Poly>) -> Result<Self> {
        let comps = vals.into_iter().map(|p| TForm::basis(chart, &[], p)).collect::<Result<_>>()?;
        Ok(QForm { chart, degree: 0, comps })
    }

    /// The constant frame section `e_a`.
    pub fn basis_section(chart: Chart, dim: usize, a: usize) -> Self {
        Self::elementary(&TForm::function(chart, chart.one()), dim, a)
    }

    /// `w ⊗ e_a`.
    pub fn elementary(w: &TForm, dim: usize, a: usize) -> Self {
        let mut q = Self::zero(w.chart(), dim, w.degree());
        q.comps[a] = w.clone();
        q
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[TForm] {
        &self.comps
    }

    pub fn comp(&self, a: usize) -> &TForm {
        &self.comps[a]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TForm::is_zero)
    }

    /// Component functions of a degree-0 form.
    pub fn values(&self) -> Vec<Poly> {
        self.comps.iter().map(TForm::as_function).collect()
    }

    fn same(&self, other: &QForm) -> Result<()> {
        self.chart.ensure_same(&other.chart)?;
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(format!("rank {} vs {}", self.dim(), other.dim())));
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!("{} vs {}", self.degree, other.degree)));
        }
        Ok(())
    }

    pub fn add(&self, other: &QForm) -> Result<QForm> {
        self.same(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(QForm { comps, ..self.clone() })
    }

    pub fn sub(&self, other: &QForm) -> Result<QForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QForm {
        self.map(TForm::neg)
    }

    pub fn scale(&self, f: &Poly) -> QForm {
        self.map(|w| w.scale(f))
    }

    pub fn scale_rat(&self, c: &Rat) -> QForm {
        self.map(|w| w.scale_rat(c))
    }

    pub fn map(&self, f: impl Fn(&TForm) -> TForm) -> QForm {
        QForm { chart: self.chart, degree: self.degree, comps: self.comps.iter().map(f).collect() }
    }

    /// Pointwise action of a constant matrix on values.
    pub fn apply_matrix(&self, t: &RMat) -> Result<QForm> {
        if t.len() != self.dim() {
            return Err(Error::DimMismatch("matrix size".into()));
        }
        let mut out = Self::zero(self.chart, self.dim(), self.degree);
        for (c, row) in t.iter().enumerate() {
            for (a, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.comps[c] = out.comps[c].add(&self.comps[a].scale_rat(x))?;
                }
            }
        }
        Ok(out)
    }

    /// Pointwise action of a Poly matrix on values.
    pub fn apply_pmatrix(&self, t: &PMat) -> Result<QForm> {
        if t.len() != self.dim() {
            return Err(Error::DimMismatch("matrix size".into()));
        }
        let mut out = Self::zero(self.chart, self.dim(), self.degree);
        for (c, row) in t.iter().enumerate() {
            for (a, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.comps[c] = out.comps[c].add(&self.comps[a].scale(x))?;
                }
            }
        }
        Ok(out)
    }

    /// Value on the coordinate fields `∂_{idx}` (any order, repeats give 0).
    pub fn eval_frame(&self, idx: &[usize]) -> Vec<Poly> {
        self.comps.iter().map(|w| w.component(idx)).collect()
    }

    /// Value on arbitrary sections of F.
    pub fn eval(&self, vs: &[FVec]) -> Result<Vec<Poly>> {
        self.comps.iter().map(|w| w.eval(vs)).collect()
    }

    pub fn interior(&self, x: &FVec) -> Result<QForm> {
        let comps: Vec<TForm> = self.comps.iter().map(|w| foliated::interior(x, w)).collect::<Result<_>>()?;
        Ok(QForm { chart: self.chart, degree: self.degree.saturating_sub(1), comps })
    }

    /// `α ∧ w`.
    pub fn wedge_left(&self, alpha: &TForm) -> Result<QForm> {
        let comps = self.comps.iter().map(|w| wedge(alpha, w)).collect::<Result<_>>()?;
        Ok(QForm { chart: self.chart, degree: self.degree + alpha.degree(), comps })
    }

    pub fn d_components(&self) -> QForm {
        QForm { chart: self.chart, degree: self.degree + 1, comps: self.comps.iter().map(tangential_d).collect() }
    }

    pub fn lie_components(&self, x: &FVec) -> Result<QForm> {
        let comps = self.comps.iter().map(|w| foliated::lie_derivative(x, w)).collect::<Result<_>>()?;
        Ok(QForm { comps, ..self.clone() })
    }

    pub fn pullback(&self, phi: &FolAffine) -> Result<QForm> {
        let comps = self.comps.iter().map(|w| phi.pullback(w)).collect::<Result<_>>()?;
        Ok(QForm { comps, ..self.clone() })
    }
}

impl fmt::Debug for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QForm{}", self.degree)?;
        f.debug_list().entries(&self.comps).finish()
    }
}

fn check_pair(g: &QLie, u: &QForm, v: &QForm) -> Result<()> {
    u.chart.ensure_same(&v.chart)?;
    if u.dim() != g.dim() || v.dim() != g.dim() {
        return Err(Error::DimMismatch(format!("forms of rank {}/{} over an algebra of rank {}", u.dim(), v.dim(), g.dim())));
    }
    Ok(())
}

/// `⟨u∧v⟩ = Σ G_ab u_a ∧ v_b`.
pub fn pair_wedge(g: &QLie, u: &QForm, v: &QForm) -> Result<TForm> {
    check_pair(g, u, v)?;
    let mut out = TForm::zero(u.chart, u.degree + v.degree);
    for (a, ua) in u.comps.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (b, vb) in v.comps.iter().enumerate() {
            let gab = &g.gram()[a][b];
            if gab.is_zero() || vb.is_zero() {
                continue;
            }
            out = out.add(&wedge(ua, vb)?.scale_rat(gab))?;
        }
    }
    Ok(out)
}

/// `[u∧v]_c = Σ c^c_{ab} u_a ∧ v_b`.
pub fn bracket_wedge(g: &QLie, u: &QForm, v: &QForm) -> Result<QForm> {
    check_pair(g, u, v)?;
    let d = g.dim();
    let mut out = QForm::zero(u.chart, d, u.degree + v.degree);
    for (a, ua) in u.comps.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (b, vb) in v.comps.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            let w = wedge(ua, vb)?;
            for c in 0..d {
                let s = g.structure(a, b, c);
                if !s.is_zero() {
                    out.comps[c] = out.comps[c].add(&w.scale_rat(s))?;
                }
            }
        }
    }
    Ok(out)
}

fn check_conn(c: &Conn, w: &QForm) -> Result<()> {
    c.chart().ensure_same(&w.chart)?;
    if c.dim() != w.dim() {
        return Err(Error::DimMismatch(format!("form of rank {} for connection of rank {}", w.dim(), c.dim())));
    }
    Ok(())
}

/// `d_∇ w = dw + Σ_i dx^i ∧ ω_i w`.
pub fn d_nabla(c: &Conn, w: &QForm) -> Result<QForm> {
    check_conn(c, w)?;
    let chart = w.chart;
    let mut out = w.d_components();
    for (i, om) in c.omega().iter().enumerate() {
        let dxi = TForm::basis(chart, &[i], chart.one())?;
        let moved = w.apply_pmatrix(om)?;
        if moved.is_zero() {
            continue;
        }
        out = out.add(&moved.wedge_left(&dxi)?)?;
    }
    Ok(out)
}

/// `End(Q)`-valued tangential form.
#[derive(Clone, PartialEq, Eq)]
pub struct EndQForm {
    chart: Chart,
    degree: usize,
    m: Vec<Vec<TForm>>,
}

impl EndQForm {
    pub fn zero(chart: Chart, dim: usize, degree: usize) -> Self {
        EndQForm { chart, degree, m: vec![vec![TForm::zero(chart, degree); dim]; dim] }
    }

    pub fn new(chart: Chart, degree: usize, m: Vec<Vec<TForm>>) -> Result<Self> {
        let d = m.len();
        for row in &m {
            if row.len() != d {
                return Err(Error::DimMismatch("End(Q) form is not square".into()));
            }
            for w in row {
                chart.ensure_same(&w.chart())?;
                if w.degree() != degree {
                    return Err(Error::Degree(format!("entry of degree {} in a {degree}-form", w.degree())));
                }
            }
        }
        Ok(EndQForm { chart, degree, m })
    }

    /// The 1-form `ω = Σ_i dx^i ⊗ ω_i` of a connection.
    pub fn from_conn(c: &Conn) -> Self {
        let chart = c.chart();
        let d = c.dim();
        let mut out = Self::zero(chart, d, 1);
        for (i, om) in c.omega().iter().enumerate() {
            for r in 0..d {
                for s in 0..d {
                    if !om[r][s].is_zero() {
                        let t = TForm::basis(chart, &[i], om[r][s].clone()).expect("index in range");
                        out.m[r][s] = out.m[r][s].add(&t).expect("same shape");
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`EndQForm::from_conn`] for 1-forms.
    pub fn to_conn(&self) -> Result<Conn> {
        if self.degree != 1 {
            return Err(Error::Degree(format!("a connection form has degree 1, got {}", self.degree)));
        }
        let omega = (0..self.chart.k).map(|i| self.eval_frame(&[i])).collect();
        Conn::new(self.chart, self.dim(), omega)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn entry(&self, r: usize, s: usize) -> &TForm {
        &self.m[r][s]
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(TForm::is_zero)
    }

    pub fn add(&self, other: &EndQForm) -> Result<EndQForm> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &EndQForm) -> Result<EndQForm> {
        self.zip(other, |a, b| a.sub(b))
    }

    fn zip(&self, other: &EndQForm, f: impl Fn(&TForm, &TForm) -> Result<TForm>) -> Result<EndQForm> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch("End(Q) rank".into()));
        }
        let m = self
            .m
            .iter()
            .zip(&other.m)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(EndQForm { chart: self.chart, degree: self.degree, m })
    }

    pub fn map(&self, f: impl Fn(&TForm) -> Result<TForm>) -> Result<EndQForm> {
        let m: Vec<Vec<TForm>> =
            self.m.iter().map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let degree = m.first().and_then(|r| r.first()).map_or(self.degree, TForm::degree);
        Ok(EndQForm { chart: self.chart, degree, m })
    }

    /// `T · E · T⁻¹` for constant matrices.
    pub fn conjugate(&self, t: &RMat, t_inv: &RMat) -> Result<EndQForm> {
        let d = self.dim();
        let mut out = Self::zero(self.chart, d, self.degree);
        for r in 0..d {
            for s in 0..d {
                let mut acc = TForm::zero(self.chart, self.degree);
                for a in 0..d {
                    if t[r][a].is_zero() {
                        continue;
                    }
                    for b in 0..d {
                        let c = &t[r][a] * &t_inv[b][s];
                        if !c.is_zero() && !self.m[a][b].is_zero() {
                            acc = acc.add(&self.m[a][b].scale_rat(&c))?;
                        }
                    }
                }
                out.m[r][s] = acc;
            }
        }
        Ok(out)
    }

    /// Matrix value on coordinate fields.
    pub fn eval_frame(&self, idx: &[usize]) -> PMat {
        self.m.iter().map(|r| r.iter().map(|w| w.component(idx)).collect()).collect()
    }

    /// `(E ∧ w)_c = Σ_a E_{ca} ∧ w_a`.
    pub fn act(&self, w: &QForm) -> Result<QForm> {
        self.chart.ensure_same(&w.chart)?;
        if self.dim() != w.dim() {
            return Err(Error::DimMismatch("End(Q) form acting on a form of another rank".into()));
        }
        let d = self.dim();
        let mut out = QForm::zero(self.chart, d, self.degree + w.degree);
        for c in 0..d {
            for a in 0..d {
                if self.m[c][a].is_zero() || w.comps[a].is_zero() {
                    continue;
                }
                out.comps[c] = out.comps[c].add(&wedge(&self.m[c][a], &w.comps[a])?)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for EndQForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EndQForm{}", self.degree)?;
        f.debug_list().entries(&self.m).finish()
    }
}

/// `F(∂_i,∂_j) = ∇_i∇_j − ∇_j∇_i` computed on the constant frame.
pub fn curvature(c: &Conn) -> EndQForm {
    let chart = c.chart();
    let d = c.dim();
    let mut out = EndQForm::zero(chart, d, 2);
    let frame: Vec<Vec<Poly>> =
        (0..d).map(|a| (0..d).map(|b| if a == b { chart.one() } else { chart.zero() }).collect()).collect();
    for idx in combinations(chart.k, 2) {
        let (i, j) = (idx[0], idx[1]);
        for (a, ea) in frame.iter().enumerate() {
            let ij = c.nabla_coord(i, &c.nabla_coord(j, ea));
            let ji = c.nabla_coord(j, &c.nabla_coord(i, ea));
            for r in 0..d {
                let v = &ij[r] - &ji[r];
                if !v.is_zero() {
                    let t = TForm::basis(chart, &idx, v).expect("index in range");
                    out.m[r][a] = out.m[r][a].add(&t).expect("same shape");
                }
            }
        }
    }
    out
}

/// `(ad_w)_{ca} = Σ_b c^c_{ba} w_b`.
pub fn ad_of(g: &QLie, w: &QForm) -> Result<EndQForm> {
    if w.dim() != g.dim() {
        return Err(Error::DimMismatch("form rank vs algebra rank".into()));
    }
    let d = g.dim();
    let mut out = EndQForm::zero(w.chart, d, w.degree);
    for c in 0..d {
        for a in 0..d {
            let mut acc = TForm::zero(w.chart, w.degree);
            for b in 0..d {
                let s = g.structure(b, a, c);
                if !s.is_zero() && !w.comps[b].is_zero() {
                    acc = acc.add(&w.comps[b].scale_rat(s))?;
                }
            }
            out.m[c][a] = acc;
        }
    }
    Ok(out)
}

/// `A†(s)`, the 1-form `X ↦ ⟨A(X), s⟩`.
pub fn dagger(g: &QLie, a: &QForm, s: &QForm) -> Result<TForm> {
    if a.degree != 1 || s.degree != 0 {
        return Err(Error::Degree("dagger takes a 1-form and a section".into()));
    }
    pair_wedge(g, a, s)
}

/// `B♯(X) = ι_X B`.
pub fn sharp(b: &TForm, x: &FVec) -> Result<TForm> {
    if b.degree() != 2 {
        return Err(Error::Degree(format!("sharp takes a 2-form, got degree {}", b.degree())));
    }
    foliated::interior(x, b)
}

/// `Θ = X·(−) + θ` acting on sections of Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfQOp {
    pub field: FVec,
    pub theta: PMat,
}

impl InfQOp {
    pub fn new(field: FVec, theta: PMat) -> Result<Self> {
        let n = field.chart().n;
        let d = theta.len();
        if theta.iter().any(|r| r.len() != d) {
            return Err(Error::DimMismatch("θ is not square".into()));
        }
        if let Some(p) = theta.iter().flatten().find(|p| p.nvars() != n) {
            return Err(Error::VarMismatch(p.nvars(), n));
        }
        Ok(InfQOp { field, theta })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn apply_vals(&self, s: &[Poly]) -> Vec<Poly> {
        let moved = pmat_vec(&self.theta, s);
        s.iter().zip(moved).map(|(x, m)| &self.field.apply(x) + &m).collect()
    }

    pub fn apply(&self, s: &QForm) -> Result<QForm> {
        if s.degree != 0 {
            return Err(Error::Degree("Θ acts on sections".into()));
        }
        QForm::section(s.chart, self.apply_vals(&s.values()))
    }
}

/// `(L_{X,Θ} w)(∂_I) = Θ[w(∂_I)] − Σ_m w(…, {X, ∂_{I_m}}, …)` on the frame.
pub fn lie_xtheta(op: &InfQOp, w: &QForm) -> Result<QForm> {
    let x = &op.field;
    x.chart().ensure_same(&w.chart)?;
    if op.dim() != w.dim() {
        return Err(Error::DimMismatch("operator rank vs form rank".into()));
    }
    let chart = w.chart;
    let k = chart.k;
    let d = w.dim();
    let mut comps = vec![TForm::zero(chart, w.degree); d];
    for idx in combinations(k, w.degree) {
        let mut val = op.apply_vals(&w.eval_frame(&idx));
        for m in 0..idx.len() {
            // {X, ∂_j} = −Σ_i (∂_j X^i) ∂_i
            let j = idx[m];
            for i in 0..k {
                let coeff = x.comp(i).d(j);
                if coeff.is_zero() {
                    continue;
                }
                let mut nidx = idx.clone();
                nidx[m] = i;
                for (v, p) in val.iter_mut().zip(w.eval_frame(&nidx)) {
                    *v += &(&coeff * &p);
                }
            }
        }
        for (c, v) in comps.iter_mut().zip(val) {
            if !v.is_zero() {
                *c = c.add(&TForm::basis(chart, &idx, v)?)?;
            }
        }
    }
    QForm::new(chart, w.degree, comps)
}
