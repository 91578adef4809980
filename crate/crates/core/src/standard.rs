//! The standard Courant algebroid on `F* ⊕ Q ⊕ F` determined by `(∇, R, H)`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foliated::{f_bracket, interior, lie_derivative, tangential_d, Chart, FVec, TForm};
use crate::io;
use crate::qforms::{ad_of, bracket_wedge, curvature, d_nabla, pair_wedge, EndQForm, QForm};
use crate::qlie::{validate_conn, validate_qlie, Conn, QLie};
use crate::report::Report;
use crate::ring::{rat, Poly};
use crate::sampler::Sampler;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdCA {
    pub chart: Chart,
    pub qlie: QLie,
    pub conn: Conn,
    pub r: QForm,
    pub h: TForm,
}

impl StdCA {
    /// Shape checks only; use [`validate_stdca`] for the compatibility relations.
    pub fn new(chart: Chart, qlie: QLie, conn: Conn, r: QForm, h: TForm) -> Result<Self> {
        chart.ensure_same(&conn.chart())?;
        chart.ensure_same(&r.chart())?;
        chart.ensure_same(&h.chart())?;
        if conn.dim() != qlie.dim() || r.dim() != qlie.dim() {
            return Err(Error::DimMismatch(format!(
                "algebra rank {}, connection rank {}, R rank {}",
                qlie.dim(),
                conn.dim(),
                r.dim()
            )));
        }
        if r.degree() != 2 {
            return Err(Error::Degree(format!("R must be a 2-form, got degree {}", r.degree())));
        }
        if h.degree() != 3 {
            return Err(Error::Degree(format!("H must be a 3-form, got degree {}", h.degree())));
        }
        Ok(StdCA { chart, qlie, conn, r, h })
    }

    pub fn dim(&self) -> usize {
        self.qlie.dim()
    }

    pub fn with_h(&self, h: TForm) -> Result<Self> {
        Self::new(self.chart, self.qlie.clone(), self.conn.clone(), self.r.clone(), h)
    }

    pub fn with_r(&self, r: QForm) -> Result<Self> {
        Self::new(self.chart, self.qlie.clone(), self.conn.clone(), r, self.h.clone())
    }

    pub fn with_conn(&self, conn: Conn) -> Result<Self> {
        Self::new(self.chart, self.qlie.clone(), conn, self.r.clone(), self.h.clone())
    }

    pub fn random_section(&self, s: &mut Sampler) -> GSec {
        GSec { alpha: s.tform(self.chart, 1), q: s.section(self.chart, self.dim()), x: s.fvec(self.chart) }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "chart": io::chart_to_json(&self.chart),
            "qlie": io::qlie_to_json(&self.qlie),
            "conn": io::conn_to_json(&self.conn),
            "R": io::qform_to_json(&self.r),
            "H": io::tform_to_json(&self.h),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let chart = io::chart_from_json(io::get(v, "chart")?)?;
        let qlie = io::qlie_from_json(io::get(v, "qlie")?)?;
        let d = qlie.dim();
        let conn = io::conn_from_json(io::get(v, "conn")?, chart, d)?;
        let r = io::qform_from_json(io::get(v, "R")?, chart, d, 2)?;
        let h = io::tform_from_json(io::get(v, "H")?, chart, 3)?;
        Self::new(chart, qlie, conn, r, h)
    }
}

/// Section `α ⊕ ā ⊕ X` of `F* ⊕ Q ⊕ F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSec {
    pub alpha: TForm,
    pub q: QForm,
    pub x: FVec,
}

impl GSec {
    pub fn new(alpha: TForm, q: QForm, x: FVec) -> Result<Self> {
        let c = x.chart();
        c.ensure_same(&alpha.chart())?;
        c.ensure_same(&q.chart())?;
        if alpha.degree() != 1 || q.degree() != 0 {
            return Err(Error::Degree("a section is (1-form, 0-form in Q, vector field)".into()));
        }
        Ok(GSec { alpha, q, x })
    }

    pub fn zero(chart: Chart, dim: usize) -> Self {
        GSec { alpha: TForm::zero(chart, 1), q: QForm::zero(chart, dim, 0), x: FVec::zero(chart) }
    }

    pub fn from_form(alpha: TForm, dim: usize) -> Self {
        let c = alpha.chart();
        GSec { alpha, q: QForm::zero(c, dim, 0), x: FVec::zero(c) }
    }

    pub fn from_q(q: QForm) -> Self {
        let c = q.chart();
        GSec { alpha: TForm::zero(c, 1), q, x: FVec::zero(c) }
    }

    pub fn from_field(x: FVec, dim: usize) -> Self {
        let c = x.chart();
        GSec { alpha: TForm::zero(c, 1), q: QForm::zero(c, dim, 0), x }
    }

    pub fn chart(&self) -> Chart {
        self.x.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.q.is_zero() && self.x.is_zero()
    }

    pub fn add(&self, o: &GSec) -> Result<GSec> {
        Ok(GSec { alpha: self.alpha.add(&o.alpha)?, q: self.q.add(&o.q)?, x: self.x.add(&o.x) })
    }

    pub fn sub(&self, o: &GSec) -> Result<GSec> {
        Ok(GSec { alpha: self.alpha.sub(&o.alpha)?, q: self.q.sub(&o.q)?, x: self.x.sub(&o.x) })
    }

    pub fn scale(&self, f: &Poly) -> GSec {
        GSec { alpha: self.alpha.scale(f), q: self.q.scale(f), x: self.x.scale(f) }
    }

    pub fn to_json(&self) -> Value {
        json!({"alpha": io::tform_to_json(&self.alpha), "q": io::qform_to_json(&self.q), "X": io::fvec_to_json(&self.x)})
    }

    pub fn from_json(v: &Value, chart: Chart, dim: usize) -> Result<Self> {
        GSec::new(
            io::tform_from_json(io::get(v, "alpha")?, chart, 1)?,
            io::qform_from_json(io::get(v, "q")?, chart, dim, 0)?,
            io::fvec_from_json(io::get(v, "X")?, chart)?,
        )
    }
}

fn check_sec(e: &StdCA, s: &GSec) -> Result<()> {
    e.chart.ensure_same(&s.chart())?;
    if s.q.dim() != e.dim() {
        return Err(Error::DimMismatch(format!("section of Q-rank {} for an algebroid of rank {}", s.q.dim(), e.dim())));
    }
    Ok(())
}

pub fn anchor(s: &GSec) -> FVec {
    s.x.clone()
}

/// `α(Y) + β(X) + ⟨ā, b̄⟩`.
pub fn inner(e: &StdCA, s: &GSec, t: &GSec) -> Result<Poly> {
    check_sec(e, s)?;
    check_sec(e, t)?;
    let mut p = interior(&t.x, &s.alpha)?.as_function();
    p += &interior(&s.x, &t.alpha)?.as_function();
    p += &pair_wedge(&e.qlie, &s.q, &t.q)?.as_function();
    Ok(p)
}

/// The three-slot bracket:
/// `F*`: `L_X β − ι_Y dα + ⟨∇ā, b̄⟩ − ⟨b̄, ι_X R⟩ + ⟨ā, ι_Y R⟩ + ι_Y ι_X H`,
/// `Q`: `[ā, b̄] + ∇_X b̄ − ∇_Y ā + R(X, Y)`,
/// `F`: `{X, Y}`.
pub fn bracket(e: &StdCA, s: &GSec, t: &GSec) -> Result<GSec> {
    check_sec(e, s)?;
    check_sec(e, t)?;
    let g = &e.qlie;
    let (x, y) = (&s.x, &t.x);
    let ixr = e.r.interior(x)?;
    let iyr = e.r.interior(y)?;

    let mut f = lie_derivative(x, &t.alpha)?;
    f = f.sub(&interior(y, &tangential_d(&s.alpha))?)?;
    f = f.add(&pair_wedge(g, &d_nabla(&e.conn, &s.q)?, &t.q)?)?;
    f = f.sub(&pair_wedge(g, &t.q, &ixr)?)?;
    f = f.add(&pair_wedge(g, &s.q, &iyr)?)?;
    f = f.add(&interior(y, &interior(x, &e.h)?)?)?;

    let a = s.q.values();
    let b = t.q.values();
    let mut q = bracket_wedge(g, &s.q, &t.q)?;
    q = q.add(&QForm::section(e.chart, e.conn.nabla_vals(x, &b))?)?;
    q = q.sub(&QForm::section(e.chart, e.conn.nabla_vals(y, &a))?)?;
    q = q.add(&iyr.interior(x)?.neg())?;

    Ok(GSec { alpha: f, q, x: f_bracket(x, y)? })
}

/// `Df = (df, 0, 0)`.
pub fn d_operator(e: &StdCA, f: &Poly) -> GSec {
    GSec::from_form(tangential_d(&TForm::function(e.chart, f.clone())), e.dim())
}

fn first_nonzero_q(w: &QForm) -> Option<Value> {
    w.comps().iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(a, c)| json!({"component": a + 1, "form": io::tform_to_json(c)}))
}

fn first_nonzero_end(w: &EndQForm) -> Option<Value> {
    let d = w.dim();
    (0..d)
        .flat_map(|r| (0..d).map(move |s| (r, s)))
        .find(|&(r, s)| !w.entry(r, s).is_zero())
        .map(|(r, s)| json!({"entry": [r + 1, s + 1], "form": io::tform_to_json(w.entry(r, s))}))
}

/// The five compatibility relations, plus the algebra axioms.
pub fn validate_stdca(e: &StdCA) -> Report {
    let mut r = Report::new();
    r.absorb("qlie", validate_qlie(&e.qlie));
    let conn = validate_conn(&e.conn, &e.qlie);
    for c in conn.checks {
        let name = match c.name.as_str() {
            "metric_compatibility" => "nabla_metric".to_string(),
            "bracket_derivation" => "nabla_bracket".to_string(),
            other => other.to_string(),
        };
        r.checks.push(crate::report::Check { name, ..c });
    }

    match d_nabla(&e.conn, &e.r) {
        Ok(dr) => r.record("bianchi", first_nonzero_q(&dr)),
        Err(err) => r.note("bianchi", false, err.to_string()),
    }
    match ad_of(&e.qlie, &e.r).and_then(|ad| curvature(&e.conn).sub(&ad)) {
        Ok(diff) => r.record("curvature_is_ad_r", first_nonzero_end(&diff)),
        Err(err) => r.note("curvature_is_ad_r", false, err.to_string()),
    }
    match pair_wedge(&e.qlie, &e.r, &e.r) {
        Ok(rr) => {
            let defect = tangential_d(&e.h).sub(&rr.scale_rat(&rat(1, 2))).expect("same shape");
            r.record("pontryagin", (!defect.is_zero()).then(|| json!({"defect": io::tform_to_json(&defect)})));
        }
        Err(err) => r.note("pontryagin", false, err.to_string()),
    }
    r
}

pub const AXIOMS: [&str; 9] = [
    "metric_invariance",
    "loday",
    "symmetrization",
    "right_leibniz",
    "left_leibniz",
    "d_bracket_left",
    "d_bracket_right",
    "anchor_d",
    "anchor_morphism",
];

/// Evaluates every axiom on one sampled `(u, v, w, f)`; returns the names that failed.
fn axiom_trial(e: &StdCA, u: &GSec, v: &GSec, w: &GSec, f: &Poly) -> Result<Vec<&'static str>> {
    let mut failed = Vec::new();
    let br = |a: &GSec, b: &GSec| bracket(e, a, b);
    let ip = |a: &GSec, b: &GSec| inner(e, a, b);
    let df = d_operator(e, f);

    let uv = br(u, v)?;
    let uw = br(u, w)?;
    let vw = br(v, w)?;

    let lhs = u.x.apply(&ip(v, w)?);
    let rhs = &ip(&uv, w)? + &ip(v, &uw)?;
    if lhs != rhs {
        failed.push("metric_invariance");
    }

    let lhs = br(u, &vw)?;
    let rhs = br(&uv, w)?.add(&br(v, &uw)?)?;
    if lhs != rhs {
        failed.push("loday");
    }

    let sym = uv.add(&br(v, u)?)?;
    if sym != d_operator(e, &ip(u, v)?) {
        failed.push("symmetrization");
    }

    let lhs = br(u, &v.scale(f))?;
    let rhs = uv.scale(f).add(&v.scale(&u.x.apply(f)))?;
    if lhs != rhs {
        failed.push("right_leibniz");
    }

    let lhs = br(&u.scale(f), v)?;
    let rhs = uv.scale(f).sub(&u.scale(&v.x.apply(f)))?.add(&df.scale(&ip(u, v)?))?;
    if lhs != rhs {
        failed.push("left_leibniz");
    }

    if !br(&df, u)?.is_zero() {
        failed.push("d_bracket_left");
    }

    if br(u, &df)? != d_operator(e, &u.x.apply(f)) {
        failed.push("d_bracket_right");
    }

    if !df.x.is_zero() {
        failed.push("anchor_d");
    }

    if uv.x != f_bracket(&u.x, &v.x)? {
        failed.push("anchor_morphism");
    }
    Ok(failed)
}

type TrialOutcome = (usize, Value, std::result::Result<Vec<&'static str>, String>);

/// Courant axioms on `trials` seeded random triples. Trial `t` draws from
/// stream `t` of `seed`; the reported witness is the lowest failing trial.
pub fn axiom_suite(e: &StdCA, trials: usize, seed: u64, max_degree: u32) -> Report {
    let results: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = Sampler::for_trial(seed, t as u64, max_degree);
            let u = e.random_section(&mut s);
            let v = e.random_section(&mut s);
            let w = e.random_section(&mut s);
            let f = s.poly(e.chart.n);
            let out = axiom_trial(e, &u, &v, &w, &f).map_err(|err| err.to_string());
            let input = json!({"trial": t, "u": u.to_json(), "v": v.to_json(), "w": w.to_json(), "f": io::poly_to_json(&f)});
            (t, input, out)
        })
        .collect();

    let mut r = Report::new();
    for name in AXIOMS {
        let witness = results.iter().find_map(|(_, input, out)| match out {
            Ok(failed) if failed.contains(&name) => Some(input.clone()),
            Err(msg) => Some(json!({"input": input, "error": msg})),
            _ => None,
        });
        r.record(name, witness);
    }
    r
}
