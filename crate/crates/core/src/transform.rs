//! Gauge maps `Ψ_τ`, `Ψ_A`, `Ψ_B`, change of dissection, the automorphism
//! group and its Lie algebra of infinitesimal automorphisms.

use num::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foliated::{f_bracket, interior, lie_derivative, tangential_d, Chart, FVec, FolAffine, TForm};
use crate::io;
use crate::linalg::{self, RMat};
use crate::qforms::{
    ad_of, bracket_wedge, d_nabla, dagger, lie_xtheta, pair_wedge, pmat_add, pmat_mul, pmat_sub, EndQForm, InfQOp,
    PMat, QForm,
};
use crate::qlie::QLie;
use crate::report::Report;
use crate::ring::{rat, Poly, Rat};
use crate::sampler::Sampler;
use crate::standard::{bracket, inner, validate_stdca, GSec, StdCA};

/// Constant orthogonal automorphism `τ` of Q with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QAutPair {
    pub t: RMat,
    pub t_inv: RMat,
}

impl QAutPair {
    pub fn new(t: RMat) -> Result<Self> {
        let t_inv = linalg::inverse(&t)?;
        Ok(QAutPair { t, t_inv })
    }

    pub fn with_inverse(t: RMat, t_inv: RMat) -> Result<Self> {
        if !linalg::is_square(&t, t.len()) || linalg::mul(&t, &t_inv) != linalg::identity(t.len()) {
            return Err(Error::Invalid("T·T_inv is not the identity".into()));
        }
        Ok(QAutPair { t, t_inv })
    }

    pub fn identity(d: usize) -> Self {
        QAutPair { t: linalg::identity(d), t_inv: linalg::identity(d) }
    }

    /// Cayley transform `(I − K)(I + K)⁻¹`; orthogonal whenever `K` is skew
    /// for the gram, and an algebra automorphism whenever `K` is a derivation.
    pub fn cayley(k: &RMat) -> Result<Self> {
        let d = k.len();
        let id = linalg::identity(d);
        let plus: RMat = (0..d).map(|i| (0..d).map(|j| &id[i][j] + &k[i][j]).collect()).collect();
        let minus: RMat = (0..d).map(|i| (0..d).map(|j| &id[i][j] - &k[i][j]).collect()).collect();
        Self::new(linalg::mul(&minus, &linalg::inverse(&plus)?))
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn is_identity(&self) -> bool {
        self.t == linalg::identity(self.dim())
    }

    pub fn inverse(&self) -> QAutPair {
        QAutPair { t: self.t_inv.clone(), t_inv: self.t.clone() }
    }

    /// `self · other`.
    pub fn compose(&self, other: &QAutPair) -> QAutPair {
        QAutPair { t: linalg::mul(&self.t, &other.t), t_inv: linalg::mul(&other.t_inv, &self.t_inv) }
    }

    /// Gram and bracket preservation on the basis.
    pub fn validate(&self, g: &QLie) -> Report {
        let mut r = Report::new();
        let d = g.dim();
        if self.dim() != d {
            r.fail("tau_shape", json!({"tau": self.dim(), "algebra": d}));
            return r;
        }
        let tt = linalg::transpose(&self.t);
        let pulled = linalg::mul(&linalg::mul(&tt, g.gram()), &self.t);
        r.record("tau_orthogonal", (&pulled != g.gram()).then(|| json!({"TtGT": io::rmat_to_json(&pulled)})));
        let mut bad = None;
        'o: for i in 0..d {
            for j in 0..d {
                let br: Vec<Rat> = (0..d).map(|k| g.structure(i, j, k).clone()).collect();
                let lhs = linalg::mat_vec(&self.t, &br);
                let ti: Vec<Rat> = (0..d).map(|k| self.t[k][i].clone()).collect();
                let tj: Vec<Rat> = (0..d).map(|k| self.t[k][j].clone()).collect();
                let mut rhs = vec![Rat::zero(); d];
                for a in 0..d {
                    for b in 0..d {
                        let ab = &ti[a] * &tj[b];
                        if ab.is_zero() {
                            continue;
                        }
                        for (k, v) in rhs.iter_mut().enumerate() {
                            *v += &ab * g.structure(a, b, k);
                        }
                    }
                }
                if lhs != rhs {
                    bad = Some(json!({"pair": [i + 1, j + 1]}));
                    break 'o;
                }
            }
        }
        r.record("tau_bracket", bad);
        r
    }

    pub fn to_json(&self) -> Value {
        json!({"T": io::rmat_to_json(&self.t), "Tinv": io::rmat_to_json(&self.t_inv)})
    }

    pub fn from_json(v: &Value, d: usize) -> Result<Self> {
        let t = io::rmat_from_json(io::get(v, "T")?, d, d)?;
        match v.get("Tinv") {
            Some(ti) => Self::with_inverse(t, io::rmat_from_json(ti, d, d)?),
            None => Self::new(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Psi {
    Tau(QAutPair),
    A(QForm),
    B(TForm),
}

fn a_of(a: &QForm, x: &FVec) -> Result<QForm> {
    a.interior(x)
}

/// `Ψ_τ(α,ā,X) = (α, τā, X)`, `Ψ_A(α,ā,X) = (α − ½A†(AX) − A†ā, ā + AX, X)`,
/// `Ψ_B(α,ā,X) = (α + ι_X B, ā, X)`.
pub fn psi_apply(g: &QLie, psi: &Psi, s: &GSec) -> Result<GSec> {
    match psi {
        Psi::Tau(tau) => Ok(GSec { q: s.q.apply_matrix(&tau.t)?, ..s.clone() }),
        Psi::A(a) => {
            let ax = a_of(a, &s.x)?;
            let alpha = s
                .alpha
                .sub(&dagger(g, a, &ax)?.scale_rat(&rat(1, 2)))?
                .sub(&dagger(g, a, &s.q)?)?;
            Ok(GSec { alpha, q: s.q.add(&ax)?, x: s.x.clone() })
        }
        Psi::B(b) => Ok(GSec { alpha: s.alpha.add(&interior(&s.x, b)?)?, ..s.clone() }),
    }
}

fn shift_conn(e: &StdCA, delta: &EndQForm) -> Result<crate::qlie::Conn> {
    EndQForm::from_conn(&e.conn).add(delta)?.to_conn()
}

/// Data `(∇̂, R̂, Ĥ)` for which `Ψ` is a morphism `S[∇,R,H] → S[∇̂,R̂,Ĥ]`.
pub fn transform_data(psi: &Psi, e: &StdCA) -> Result<StdCA> {
    let g = &e.qlie;
    let half = rat(1, 2);
    match psi {
        Psi::Tau(tau) => {
            let conn = EndQForm::from_conn(&e.conn).conjugate(&tau.t, &tau.t_inv)?.to_conn()?;
            StdCA::new(e.chart, g.clone(), conn, e.r.apply_matrix(&tau.t)?, e.h.clone())
        }
        Psi::B(b) => e.with_h(e.h.sub(&tangential_d(b))?),
        Psi::A(a) => {
            let conn = shift_conn(e, &ad_of(g, a)?.map(|w| Ok(w.neg()))?)?;
            let dna = d_nabla(&conn, a)?;
            let aa = bracket_wedge(g, a, a)?;
            let r = e.r.sub(&dna)?.sub(&aa.scale_rat(&half))?;
            let h = e
                .h
                .sub(&pair_wedge(g, a, &r)?)?
                .sub(&pair_wedge(g, a, &dna)?.scale_rat(&half))?
                .sub(&pair_wedge(g, a, &aa)?.scale_rat(&rat(1, 6)))?;
            StdCA::new(e.chart, g.clone(), conn, r, h)
        }
    }
}

/// Change of dissection by `δ = Ψ_τ ∘ Ψ_A ∘ Ψ_B` from the closed formulas
/// `∇̂ = τ∇τ⁻¹ − ad_{τA}`, `R̂ = τR − τd_∇A + ½[τA∧τA]`,
/// `Ĥ = H − dB − ⟨A∧R⟩ + ½⟨A∧d_∇A⟩ − ⅙⟨A∧[A∧A]⟩`.
pub fn dissection_change(tau: &QAutPair, a: &QForm, b: &TForm, e: &StdCA) -> Result<StdCA> {
    let g = &e.qlie;
    let half = rat(1, 2);
    let ta = a.apply_matrix(&tau.t)?;
    let conn = EndQForm::from_conn(&e.conn)
        .conjugate(&tau.t, &tau.t_inv)?
        .sub(&ad_of(g, &ta)?)?
        .to_conn()?;
    let dna = d_nabla(&e.conn, a)?;
    let r = e
        .r
        .apply_matrix(&tau.t)?
        .sub(&dna.apply_matrix(&tau.t)?)?
        .add(&bracket_wedge(g, &ta, &ta)?.scale_rat(&half))?;
    let h = e
        .h
        .sub(&tangential_d(b))?
        .sub(&pair_wedge(g, a, &e.r)?)?
        .add(&pair_wedge(g, a, &dna)?.scale_rat(&half))?
        .sub(&pair_wedge(g, a, &bracket_wedge(g, a, a)?)?.scale_rat(&rat(1, 6)))?;
    StdCA::new(e.chart, g.clone(), conn, r, h)
}

/// Section map of `Ψ_τ ∘ Ψ_A ∘ Ψ_B`.
pub fn dissection_apply(g: &QLie, tau: &QAutPair, a: &QForm, b: &TForm, s: &GSec) -> Result<GSec> {
    let s = psi_apply(g, &Psi::B(b.clone()), s)?;
    let s = psi_apply(g, &Psi::A(a.clone()), &s)?;
    psi_apply(g, &Psi::Tau(tau.clone()), &s)
}

/// Element `(φ, τ, A, B)` of the automorphism group of `F* ⊕ Q ⊕ F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aut {
    pub phi: FolAffine,
    pub tau: QAutPair,
    pub a: QForm,
    pub b: TForm,
}

impl Aut {
    pub fn new(phi: FolAffine, tau: QAutPair, a: QForm, b: TForm) -> Result<Self> {
        let c = phi.chart();
        c.ensure_same(&a.chart())?;
        c.ensure_same(&b.chart())?;
        if a.degree() != 1 || b.degree() != 2 {
            return Err(Error::Degree("A must be a 1-form and B a 2-form".into()));
        }
        if tau.dim() != a.dim() {
            return Err(Error::DimMismatch(format!("τ of size {} with A of rank {}", tau.dim(), a.dim())));
        }
        Ok(Aut { phi, tau, a, b })
    }

    pub fn identity(chart: Chart, d: usize) -> Self {
        Aut { phi: FolAffine::identity(chart), tau: QAutPair::identity(d), a: QForm::zero(chart, d, 1), b: TForm::zero(chart, 2) }
    }

    pub fn gauge(a: QForm, b: TForm) -> Result<Self> {
        let c = a.chart();
        Self::new(FolAffine::identity(c), QAutPair::identity(a.dim()), a, b)
    }

    pub fn chart(&self) -> Chart {
        self.phi.chart()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "phi": io::affine_to_json(&self.phi),
            "tau": self.tau.to_json(),
            "A": io::qform_to_json(&self.a),
            "B": io::tform_to_json(&self.b),
        })
    }

    /// Missing `phi` or `tau` mean the identity.
    pub fn from_json(v: &Value, chart: Chart, d: usize) -> Result<Self> {
        let phi = match v.get("phi") {
            Some(p) => io::affine_from_json(p, chart)?,
            None => FolAffine::identity(chart),
        };
        let tau = match v.get("tau") {
            Some(t) => QAutPair::from_json(t, d)?,
            None => QAutPair::identity(d),
        };
        let a = io::qform_from_json(io::get(v, "A")?, chart, d, 1)?;
        let b = io::tform_from_json(io::get(v, "B")?, chart, 2)?;
        Self::new(phi, tau, a, b)
    }
}

fn check_aut_shape(g: &QLie, f: &Aut, s: &GSec) -> Result<()> {
    f.chart().ensure_same(&s.chart())?;
    if f.a.dim() != g.dim() || s.q.dim() != g.dim() {
        return Err(Error::DimMismatch("automorphism, section and algebra ranks differ".into()));
    }
    Ok(())
}

/// `Φ(α,ā,X) = ((φ⁻¹)*(α − A†ā + ι_X B − ½A†(AX)), (φ⁻¹)*(τ(ā + AX)), φ_*X)`.
pub fn aut_apply(g: &QLie, f: &Aut, s: &GSec) -> Result<GSec> {
    check_aut_shape(g, f, s)?;
    let inv = f.phi.inverse();
    let ax = a_of(&f.a, &s.x)?;
    let alpha = s
        .alpha
        .sub(&dagger(g, &f.a, &s.q)?)?
        .add(&interior(&s.x, &f.b)?)?
        .sub(&dagger(g, &f.a, &ax)?.scale_rat(&rat(1, 2)))?;
    let q = s.q.add(&ax)?.apply_matrix(&f.tau.t)?;
    Ok(GSec { alpha: inv.pullback(&alpha)?, q: q.pullback(&inv)?, x: f.phi.pushforward(&s.x)? })
}

/// `(φ,τ,A,B) ∘ (ψ,σ,C,D) = (φ∘ψ, τσ, A' + C, ψ*B + D + ½⟨A'∧C⟩)` with `A' = ψ*(σ⁻¹A)`.
pub fn aut_compose(g: &QLie, f: &Aut, h: &Aut) -> Result<Aut> {
    f.chart().ensure_same(&h.chart())?;
    let a1 = f.a.apply_matrix(&h.tau.t_inv)?.pullback(&h.phi)?;
    let a = a1.add(&h.a)?;
    let b = h.phi.pullback(&f.b)?.add(&h.b)?.add(&pair_wedge(g, &a1, &h.a)?.scale_rat(&rat(1, 2)))?;
    Aut::new(f.phi.compose(&h.phi)?, f.tau.compose(&h.tau), a, b)
}

/// `(φ⁻¹, τ⁻¹, −(φ⁻¹)*(τA), −(φ⁻¹)*B)`.
pub fn aut_invert(f: &Aut) -> Result<Aut> {
    let inv = f.phi.inverse();
    let a = f.a.apply_matrix(&f.tau.t)?.pullback(&inv)?.neg();
    let b = inv.pullback(&f.b)?.neg();
    Aut::new(inv, f.tau.inverse(), a, b)
}

/// Data transported by the natural map `(φ, τ)^♮`:
/// `(φ⁻¹)*(τ∇τ⁻¹)`, `(φ⁻¹)*(τR)`, `(φ⁻¹)*H`.
pub fn natural_transform(phi: &FolAffine, tau: &QAutPair, e: &StdCA) -> Result<StdCA> {
    let inv = phi.inverse();
    let conn = EndQForm::from_conn(&e.conn).conjugate(&tau.t, &tau.t_inv)?.map(|w| inv.pullback(w))?.to_conn()?;
    let r = e.r.apply_matrix(&tau.t)?.pullback(&inv)?;
    StdCA::new(e.chart, e.qlie.clone(), conn, r, inv.pullback(&e.h)?)
}

fn qform_witness(w: &QForm) -> Option<Value> {
    (!w.is_zero()).then(|| io::qform_to_json(w))
}

/// Membership of `Φ` in the automorphism group of `E`: τ ∈ Aut(Q), the three
/// displayed conditions, the fixed-point form through `(φ,τ)^♮`, and exact
/// bracket/pairing intertwining on random pairs.
pub fn check_aut(f: &Aut, e: &StdCA, trials: usize, seed: u64, max_degree: u32) -> Report {
    let mut r = Report::new();
    if let Err(err) = aut_conditions(f, e, &mut r) {
        r.note("shape", false, err.to_string());
        return r;
    }
    let g = &e.qlie;
    let inv = f.phi.inverse();
    let results: Vec<(Value, Vec<&'static str>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = Sampler::for_trial(seed, t as u64, max_degree);
            let u = e.random_section(&mut s);
            let v = e.random_section(&mut s);
            let mut failed = Vec::new();
            let ok = (|| -> Result<(bool, bool)> {
                let lhs = aut_apply(g, f, &bracket(e, &u, &v)?)?;
                let (fu, fv) = (aut_apply(g, f, &u)?, aut_apply(g, f, &v)?);
                let rhs = bracket(e, &fu, &fv)?;
                let ip = inner(e, &fu, &fv)? == inv.pull_poly(&inner(e, &u, &v)?)?;
                Ok((lhs == rhs, ip))
            })();
            match ok {
                Ok((br, ip)) => {
                    if !br {
                        failed.push("intertwines_bracket");
                    }
                    if !ip {
                        failed.push("preserves_pairing");
                    }
                }
                Err(_) => failed.extend(["intertwines_bracket", "preserves_pairing"]),
            }
            (json!({"trial": t, "u": u.to_json(), "v": v.to_json()}), failed)
        })
        .collect();
    for name in ["intertwines_bracket", "preserves_pairing"] {
        r.record(name, results.iter().find(|(_, f)| f.contains(&name)).map(|(w, _)| w.clone()));
    }
    r
}

fn aut_conditions(f: &Aut, e: &StdCA, r: &mut Report) -> Result<()> {
    let g = &e.qlie;
    let half = rat(1, 2);
    f.chart().ensure_same(&e.chart)?;
    if f.a.dim() != g.dim() {
        return Err(Error::DimMismatch("A rank vs algebra rank".into()));
    }
    for c in f.tau.validate(g).checks {
        r.checks.push(c);
    }
    // ∇ − φ*(τ⁻¹∇τ) = ad_A
    let omega = EndQForm::from_conn(&e.conn);
    let pulled = omega.conjugate(&f.tau.t_inv, &f.tau.t)?.map(|w| f.phi.pullback(w))?;
    let c1 = omega.sub(&pulled)?.sub(&ad_of(g, &f.a)?)?;
    r.record("connection_condition", (!c1.is_zero()).then(|| json!({"defect": format!("{c1:?}")})));
    // R − φ*(τ⁻¹R) = d_∇A − ½[A∧A]
    let dna = d_nabla(&e.conn, &f.a)?;
    let aa = bracket_wedge(g, &f.a, &f.a)?;
    let c2 = e
        .r
        .sub(&e.r.apply_matrix(&f.tau.t_inv)?.pullback(&f.phi)?)?
        .sub(&dna)?
        .add(&aa.scale_rat(&half))?;
    r.record("curvature_condition", qform_witness(&c2));
    // H − φ*H = dB + ⟨A∧R⟩ − ½⟨d_∇A∧A⟩ + ⅙⟨A∧[A∧A]⟩
    let c3 = e
        .h
        .sub(&f.phi.pullback(&e.h)?)?
        .sub(&tangential_d(&f.b))?
        .sub(&pair_wedge(g, &f.a, &e.r)?)?
        .add(&pair_wedge(g, &dna, &f.a)?.scale_rat(&half))?
        .sub(&pair_wedge(g, &f.a, &aa)?.scale_rat(&rat(1, 6)))?;
    r.record("three_form_condition", (!c3.is_zero()).then(|| json!({"defect": io::tform_to_json(&c3)})));
    // (φ,τ)^♮ ∘ Ψ_A ∘ Ψ_B must carry E back to itself.
    let moved = transform_data(&Psi::B(f.b.clone()), e)?;
    let moved = transform_data(&Psi::A(f.a.clone()), &moved)?;
    let moved = natural_transform(&f.phi, &f.tau, &moved)?;
    let mut which = Vec::new();
    if moved.conn != e.conn {
        which.push("connection");
    }
    if moved.r != e.r {
        which.push("R");
    }
    if moved.h != e.h {
        which.push("H");
    }
    r.record("fixes_data", (!which.is_empty()).then(|| json!({"differs": which})));
    Ok(())
}

/// Infinitesimal automorphism `(X, Θ, a, b)` with `Θ = X·(−) + θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfAut {
    pub op: InfQOp,
    pub a: QForm,
    pub b: TForm,
}

impl InfAut {
    pub fn new(x: FVec, theta: PMat, a: QForm, b: TForm) -> Result<Self> {
        let c = x.chart();
        c.ensure_same(&a.chart())?;
        c.ensure_same(&b.chart())?;
        if a.degree() != 1 || b.degree() != 2 {
            return Err(Error::Degree("a must be a 1-form and b a 2-form".into()));
        }
        let op = InfQOp::new(x, theta)?;
        if op.dim() != a.dim() {
            return Err(Error::DimMismatch(format!("θ of size {} with a of rank {}", op.dim(), a.dim())));
        }
        Ok(InfAut { op, a, b })
    }

    pub fn gauge(a: QForm, b: TForm) -> Result<Self> {
        let c = a.chart();
        let d = a.dim();
        Self::new(FVec::zero(c), vec![vec![c.zero(); d]; d], a, b)
    }

    pub fn zero(chart: Chart, d: usize) -> Self {
        Self::gauge(QForm::zero(chart, d, 1), TForm::zero(chart, 2)).expect("shape")
    }

    pub fn field(&self) -> &FVec {
        &self.op.field
    }

    pub fn theta(&self) -> &PMat {
        &self.op.theta
    }

    pub fn chart(&self) -> Chart {
        self.op.field.chart()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "X": io::fvec_to_json(self.field()),
            "theta": io::pmat_to_json(self.theta()),
            "a": io::qform_to_json(&self.a),
            "b": io::tform_to_json(&self.b),
        })
    }

    pub fn from_json(v: &Value, chart: Chart, d: usize) -> Result<Self> {
        let x = match v.get("X") {
            Some(x) => io::fvec_from_json(x, chart)?,
            None => FVec::zero(chart),
        };
        let theta = match v.get("theta") {
            Some(t) => io::pmat_from_json(t, d, chart.n)?,
            None => vec![vec![chart.zero(); d]; d],
        };
        let a = io::qform_from_json(io::get(v, "a")?, chart, d, 1)?;
        let b = io::tform_from_json(io::get(v, "b")?, chart, 2)?;
        Self::new(x, theta, a, b)
    }
}

/// `D(ξ, x̄, U) = (L_X ξ − a†x̄ + ι_U b, Θx̄ + a(U), {X, U})`.
pub fn infaut_apply(g: &QLie, dd: &InfAut, s: &GSec) -> Result<GSec> {
    dd.chart().ensure_same(&s.chart())?;
    if s.q.dim() != g.dim() || dd.a.dim() != g.dim() {
        return Err(Error::DimMismatch("section, generator and algebra ranks differ".into()));
    }
    let x = dd.field();
    let alpha = lie_derivative(x, &s.alpha)?.sub(&dagger(g, &dd.a, &s.q)?)?.add(&interior(&s.x, &dd.b)?)?;
    let q = dd.op.apply(&s.q)?.add(&a_of(&dd.a, &s.x)?)?;
    Ok(GSec { alpha, q, x: f_bracket(x, &s.x)? })
}

/// `⟦(X,Θ,a,b), (Y,Σ,c,d)⟧ = ({X,Y}, [Θ,Σ], L_{X,Θ}c − L_{Y,Σ}a, L_X d − L_Y b + ⟨a∧c⟩)`,
/// where `[Θ,Σ]` has field `{X,Y}` and matrix `X·σ − Y·θ + [θ,σ]`.
pub fn infaut_bracket(g: &QLie, d1: &InfAut, d2: &InfAut) -> Result<InfAut> {
    let (x, y) = (d1.field(), d2.field());
    let field = f_bracket(x, y)?;
    let xs: PMat = d2.theta().iter().map(|r| r.iter().map(|p| x.apply(p)).collect()).collect();
    let yt: PMat = d1.theta().iter().map(|r| r.iter().map(|p| y.apply(p)).collect()).collect();
    let comm = pmat_sub(&pmat_mul(d1.theta(), d2.theta()), &pmat_mul(d2.theta(), d1.theta()));
    let theta = pmat_add(&pmat_sub(&xs, &yt), &comm);
    let a = lie_xtheta(&d1.op, &d2.a)?.sub(&lie_xtheta(&d2.op, &d1.a)?)?;
    let b = lie_derivative(x, &d2.b)?.sub(&lie_derivative(y, &d1.b)?)?.add(&pair_wedge(g, &d1.a, &d2.a)?)?;
    InfAut::new(field, theta, a, b)
}

fn frame_section(chart: Chart, d: usize, a: usize) -> Vec<Poly> {
    (0..d).map(|b| if a == b { chart.one() } else { chart.zero() }).collect()
}

/// The six defining conditions on frames, plus Leibniz, pairing and
/// derivation identities on random data.
pub fn check_infaut(dd: &InfAut, e: &StdCA, trials: usize, seed: u64, max_degree: u32) -> Report {
    let mut r = Report::new();
    if let Err(err) = infaut_conditions(dd, e, &mut r) {
        r.note("shape", false, err.to_string());
        return r;
    }
    let g = &e.qlie;
    let x = dd.field();
    let results: Vec<(Value, Vec<&'static str>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = Sampler::for_trial(seed, t as u64, max_degree);
            let u = e.random_section(&mut s);
            let v = e.random_section(&mut s);
            let f = s.poly(e.chart.n);
            let mut failed = Vec::new();
            let res = (|| -> Result<[bool; 3]> {
                let fu = u.q.scale(&f);
                let leib = dd.op.apply(&fu)? == dd.op.apply(&u.q)?.scale(&f).add(&u.q.scale(&x.apply(&f)))?;
                let (du, dv) = (infaut_apply(g, dd, &u)?, infaut_apply(g, dd, &v)?);
                let metric = x.apply(&inner(e, &u, &v)?) == &inner(e, &du, &v)? + &inner(e, &u, &dv)?;
                let lhs = infaut_apply(g, dd, &bracket(e, &u, &v)?)?;
                let deriv = lhs == bracket(e, &du, &v)?.add(&bracket(e, &u, &dv)?)?;
                Ok([leib, metric, deriv])
            })();
            let names = ["theta_leibniz", "pairing_derivation", "bracket_derivation"];
            match res {
                Ok(oks) => failed.extend(names.iter().zip(oks).filter(|(_, ok)| !ok).map(|(n, _)| *n)),
                Err(_) => failed.extend(names),
            }
            (json!({"trial": t, "u": u.to_json(), "v": v.to_json(), "f": io::poly_to_json(&f)}), failed)
        })
        .collect();
    for name in ["theta_leibniz", "pairing_derivation", "bracket_derivation"] {
        r.record(name, results.iter().find(|(_, f)| f.contains(&name)).map(|(w, _)| w.clone()));
    }
    r
}

fn infaut_conditions(dd: &InfAut, e: &StdCA, r: &mut Report) -> Result<()> {
    let g = &e.qlie;
    let c = e.chart;
    c.ensure_same(&dd.chart())?;
    let d = g.dim();
    if dd.a.dim() != d {
        return Err(Error::DimMismatch("generator rank vs algebra rank".into()));
    }
    let x = dd.field();
    let th = |s: &[Poly]| dd.op.apply_vals(s);
    let mut metric = None;
    let mut brk = None;
    for a in 0..d {
        for b in 0..d {
            let (ea, eb) = (frame_section(c, d, a), frame_section(c, d, b));
            if metric.is_none() {
                let lhs = x.apply(&g.pair_vals(&ea, &eb));
                if lhs != &g.pair_vals(&th(&ea), &eb) + &g.pair_vals(&ea, &th(&eb)) {
                    metric = Some(json!({"pair": [a + 1, b + 1]}));
                }
            }
            if brk.is_none() {
                let lhs = th(&g.bracket_vals(&ea, &eb));
                let r1 = g.bracket_vals(&th(&ea), &eb);
                let r2 = g.bracket_vals(&ea, &th(&eb));
                if (0..d).any(|l| lhs[l] != &r1[l] + &r2[l]) {
                    brk = Some(json!({"pair": [a + 1, b + 1]}));
                }
            }
        }
    }
    r.record("theta_metric", metric);
    r.record("theta_bracket", brk);

    // [Θ, ∇_U] − ∇_{{X,U}} = ad_{a(U)} on U = ∂_i and the frame.
    let mut nab = None;
    'n: for i in 0..c.k {
        let u = FVec::coord(c, i);
        let xu = f_bracket(x, &u)?;
        let au = a_of(&dd.a, &u)?.values();
        for a in 0..d {
            let ea = frame_section(c, d, a);
            let lhs: Vec<Poly> = {
                let t1 = th(&e.conn.nabla_coord(i, &ea));
                let t2 = e.conn.nabla_coord(i, &th(&ea));
                let t3 = e.conn.nabla_vals(&xu, &ea);
                (0..d).map(|l| &(&t1[l] - &t2[l]) - &t3[l]).collect()
            };
            if lhs != g.bracket_vals(&au, &ea) {
                nab = Some(json!({"coordinate": i + 1, "basis": a + 1}));
                break 'n;
            }
        }
    }
    r.record("theta_nabla", nab);

    let c5 = lie_xtheta(&dd.op, &e.r)?.sub(&d_nabla(&e.conn, &dd.a)?)?;
    r.record("curvature_condition", qform_witness(&c5));
    // L_X H = db + ⟨a∧R⟩, the first-order part of the group condition on H.
    let c6 = lie_derivative(x, &e.h)?.sub(&tangential_d(&dd.b))?.sub(&pair_wedge(g, &dd.a, &e.r)?)?;
    r.record("three_form_condition", (!c6.is_zero()).then(|| json!({"defect": io::tform_to_json(&c6)})));
    Ok(())
}

/// A family of bundle maps whose action on each section is polynomial in a
/// formal parameter `t`.
pub trait FormalFamily {
    /// Coefficients of `t^0, t^1, …` of `Φ_t(s)`.
    fn apply_formal(&self, g: &QLie, s: &GSec) -> Result<Vec<GSec>>;
}

/// `Φ_t = Ψ_{tA} ∘ Ψ_{tB}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugePath {
    pub a: QForm,
    pub b: TForm,
}

impl GaugePath {
    pub fn to_json(&self) -> Value {
        json!({"A": io::qform_to_json(&self.a), "B": io::tform_to_json(&self.b)})
    }

    pub fn from_json(v: &Value, chart: Chart, d: usize) -> Result<Self> {
        Ok(GaugePath {
            a: io::qform_from_json(io::get(v, "A")?, chart, d, 1)?,
            b: io::tform_from_json(io::get(v, "B")?, chart, 2)?,
        })
    }
}

fn add_at(series: &mut Vec<GSec>, i: usize, s: GSec) -> Result<()> {
    let zero = GSec::zero(s.chart(), s.q.dim());
    while series.len() <= i {
        series.push(zero.clone());
    }
    series[i] = series[i].add(&s)?;
    Ok(())
}

impl FormalFamily for GaugePath {
    fn apply_formal(&self, g: &QLie, s: &GSec) -> Result<Vec<GSec>> {
        let d = g.dim();
        // Ψ_{tB}: the t-coefficient is (ι_X B, 0, 0).
        let mut after_b = vec![s.clone()];
        add_at(&mut after_b, 1, GSec::from_form(interior(&s.x, &self.b)?, d))?;
        // Ψ_{tA}: t·(−A†ā, AX, 0) + t²·(−½A†(AX), 0, 0), applied per coefficient.
        let mut out = Vec::new();
        for (j, c) in after_b.iter().enumerate() {
            add_at(&mut out, j, c.clone())?;
            let ax = a_of(&self.a, &c.x)?;
            let lin = GSec { alpha: dagger(g, &self.a, &c.q)?.neg(), q: ax.clone(), x: FVec::zero(c.chart()) };
            add_at(&mut out, j + 1, lin)?;
            add_at(&mut out, j + 2, GSec::from_form(dagger(g, &self.a, &ax)?.scale_rat(&rat(-1, 2)), d))?;
        }
        while out.len() > 1 && out.last().is_some_and(GSec::is_zero) {
            out.pop();
        }
        Ok(out)
    }
}

/// Reads `(X, θ, a, b)` off the `t`-linear part of a formal family and checks
/// that the recovered generator reproduces that part on the frame.
pub fn linearize(path: &dyn FormalFamily, e: &StdCA) -> Result<InfAut> {
    let g = &e.qlie;
    let c = e.chart;
    let d = g.dim();
    let lin = |s: &GSec| -> Result<GSec> {
        let series = path.apply_formal(g, s)?;
        Ok(series.get(1).cloned().unwrap_or_else(|| GSec::zero(c, d)))
    };
    let field_sec = |v: FVec| GSec::from_field(v, d);

    // {X, x_j ∂_0} − x_j {X, ∂_0} = X^j ∂_0
    let mut xs = vec![c.zero(); c.k];
    if c.k > 0 {
        let base = lin(&field_sec(FVec::coord(c, 0)))?.x;
        for (j, xj) in xs.iter_mut().enumerate() {
            let v = FVec::coord(c, 0).scale(&c.x(j));
            let got = lin(&field_sec(v))?.x.sub(&base.scale(&c.x(j)));
            *xj = got.comp(0).clone();
        }
    }
    let x = FVec::new(c, xs)?;

    let mut theta = vec![vec![c.zero(); d]; d];
    for a in 0..d {
        let col = lin(&GSec::from_q(QForm::basis_section(c, d, a)))?.q.values();
        for (row, v) in col.into_iter().enumerate() {
            theta[row][a] = v;
        }
    }

    let mut a_comps = vec![TForm::zero(c, 1); d];
    let mut b = TForm::zero(c, 2);
    for i in 0..c.k {
        let out = lin(&field_sec(FVec::coord(c, i)))?;
        for (l, v) in out.q.values().into_iter().enumerate() {
            a_comps[l] = a_comps[l].add(&TForm::basis(c, &[i], v)?)?;
        }
        for j in i + 1..c.k {
            b = b.add(&TForm::basis(c, &[i, j], out.alpha.component(&[j]))?)?;
        }
    }
    let dd = InfAut::new(x, theta, QForm::new(c, 1, a_comps)?, b)?;

    for i in 0..c.k {
        let probes = [
            GSec::from_form(TForm::basis(c, &[i], c.one())?, d),
            GSec::from_form(TForm::basis(c, &[i], c.x(i))?, d),
            field_sec(FVec::coord(c, i)),
        ];
        for s in probes {
            if infaut_apply(g, &dd, &s)? != lin(&s)? {
                return Err(Error::Invalid("the t-linear part is not of the form (X, Θ, a, b)".into()));
            }
        }
    }
    Ok(dd)
}

/// Every check of [`validate_stdca`] on the transformed data, and bracket
/// intertwining of `map` between `e` and `target` on random pairs.
pub fn intertwining_report(
    e: &StdCA,
    target: &StdCA,
    map: &(dyn Fn(&GSec) -> Result<GSec> + Sync),
    trials: usize,
    seed: u64,
    max_degree: u32,
) -> Report {
    let mut r = Report::new();
    r.absorb("target", validate_stdca(target));
    let fails: Vec<(usize, Value, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = Sampler::for_trial(seed, t as u64, max_degree);
            let u = e.random_section(&mut s);
            let v = e.random_section(&mut s);
            let res = (|| -> Result<(bool, bool)> {
                let (mu, mv) = (map(&u)?, map(&v)?);
                let br = map(&bracket(e, &u, &v)?)? == bracket(target, &mu, &mv)?;
                let ip = inner(e, &u, &v)? == inner(target, &mu, &mv)?;
                Ok((br, ip))
            })();
            let (br, ip) = res.unwrap_or((false, false));
            (t, json!({"trial": t, "u": u.to_json(), "v": v.to_json()}), br, ip)
        })
        .collect();
    r.record("intertwines_bracket", fails.iter().find(|f| !f.2).map(|f| f.1.clone()));
    r.record("preserves_pairing", fails.iter().find(|f| !f.3).map(|f| f.1.clone()));
    r
}
