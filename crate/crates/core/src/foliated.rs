//! Tangential calculus on the coordinate foliation `F = span(∂_0..∂_{k-1})`.
//!
//! Indices are 0-based in the API and 1-based in JSON.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::ring::{Poly, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    pub n: usize,
    pub k: usize,
}

impl Chart {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Invalid(format!("foliated count {k} exceeds coordinate count {n}")));
        }
        Ok(Chart { n, k })
    }

    pub fn ensure_same(&self, other: &Chart) -> Result<()> {
        if self != other {
            return Err(Error::ChartMismatch(format!("({},{}) vs ({},{})", self.n, self.k, other.n, other.k)));
        }
        Ok(())
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.n)
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.n)
    }

    pub fn x(&self, i: usize) -> Poly {
        Poly::var(self.n, i)
    }

    fn check_poly(&self, p: &Poly) -> Result<()> {
        if p.nvars() != self.n {
            return Err(Error::VarMismatch(p.nvars(), self.n));
        }
        Ok(())
    }
}

/// Section of F: components along `∂_0..∂_{k-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FVec {
    chart: Chart,
    comps: Vec<Poly>,
}

impl FVec {
    pub fn new(chart: Chart, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != chart.k {
            return Err(Error::DimMismatch(format!("{} components for k={}", comps.len(), chart.k)));
        }
        for p in &comps {
            chart.check_poly(p)?;
        }
        Ok(FVec { chart, comps })
    }

    pub fn zero(chart: Chart) -> Self {
        FVec { chart, comps: vec![chart.zero(); chart.k] }
    }

    /// The coordinate field `∂_i`.
    pub fn coord(chart: Chart, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.comps[i] = chart.one();
        v
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Directional derivative `X·f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = self.chart.zero();
        for (i, xi) in self.comps.iter().enumerate() {
            if !xi.is_zero() {
                out += &(xi * &f.d(i));
            }
        }
        out
    }

    pub fn add(&self, other: &FVec) -> FVec {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FVec) -> FVec {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> FVec {
        self.map(|a| -a)
    }

    pub fn scale(&self, f: &Poly) -> FVec {
        self.map(|a| a * f)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> FVec {
        FVec { chart: self.chart, comps: self.comps.iter().map(f).collect() }
    }

    fn zip(&self, other: &FVec, f: impl Fn(&Poly, &Poly) -> Poly) -> FVec {
        assert_eq!(self.chart, other.chart, "chart mismatch");
        FVec { chart: self.chart, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect() }
    }
}

impl fmt::Debug for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| format!("({p})d{}", i + 1))
            .collect();
        write!(f, "FVec[{}]", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

/// Lie bracket of two sections of F.
pub fn f_bracket(x: &FVec, y: &FVec) -> Result<FVec> {
    x.chart.ensure_same(&y.chart)?;
    let comps = (0..x.chart.k).map(|i| &x.apply(&y.comps[i]) - &y.apply(&x.comps[i])).collect();
    Ok(FVec { chart: x.chart, comps })
}

/// Sorts an index list, returning the sign of the permutation, or `None`
/// when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

/// Tangential p-form: coefficients indexed by strictly increasing tuples.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TForm {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl TForm {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        TForm { chart, degree, terms: BTreeMap::new() }
    }

    pub fn function(chart: Chart, f: Poly) -> Self {
        let mut w = Self::zero(chart, 0);
        w.add_term(vec![], f);
        w
    }

    /// `f dx^{i_1} ∧ … ∧ dx^{i_p}` for an arbitrary index list.
    pub fn basis(chart: Chart, idx: &[usize], f: Poly) -> Result<Self> {
        let mut w = Self::zero(chart, idx.len());
        w.set_component(idx, f)?;
        Ok(w)
    }

    /// Builds a form from `(index list, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, Poly)>>(chart: Chart, degree: usize, it: I) -> Result<Self> {
        let mut w = Self::zero(chart, degree);
        for (idx, f) in it {
            let b = Self::basis(chart, &idx, f)?;
            if b.degree != degree {
                return Err(Error::Degree(format!("term of degree {} in a {degree}-form", b.degree)));
            }
            w = w.add(&b)?;
        }
        Ok(w)
    }

    fn set_component(&mut self, idx: &[usize], f: Poly) -> Result<()> {
        self.chart.check_poly(&f)?;
        if let Some(&i) = idx.iter().find(|&&i| i >= self.chart.k) {
            return Err(Error::IndexOutOfRange { index: i, limit: self.chart.k });
        }
        if let Some((sorted, odd)) = sort_with_sign(idx) {
            self.terms.remove(&sorted);
            self.add_term(sorted, if odd { -&f } else { f });
        }
        Ok(())
    }

    fn add_term(&mut self, idx: Vec<usize>, f: Poly) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &f;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.terms.iter()
    }

    /// Coefficient on an arbitrary index list, with the permutation sign.
    pub fn component(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx) {
            None => self.chart.zero(),
            Some((sorted, odd)) => match self.terms.get(&sorted) {
                None => self.chart.zero(),
                Some(f) if odd => -f,
                Some(f) => f.clone(),
            },
        }
    }

    /// The coefficient of a 0-form.
    pub fn as_function(&self) -> Poly {
        self.component(&[])
    }

    fn same(&self, other: &TForm) -> Result<()> {
        self.chart.ensure_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!("{} vs {}", self.degree, other.degree)));
        }
        Ok(())
    }

    pub fn add(&self, other: &TForm) -> Result<TForm> {
        self.same(other)?;
        let mut out = self.clone();
        for (i, f) in &other.terms {
            out.add_term(i.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TForm) -> Result<TForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TForm {
        self.map(|f| -f)
    }

    pub fn scale(&self, g: &Poly) -> TForm {
        self.map(|f| f * g)
    }

    pub fn scale_rat(&self, c: &Rat) -> TForm {
        self.map(|f| f.scale(c))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> TForm {
        let mut out = Self::zero(self.chart, self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), f(c));
        }
        out
    }

    /// Evaluates on `p` sections of F by the determinant expansion.
    pub fn eval(&self, vs: &[FVec]) -> Result<Poly> {
        if vs.len() != self.degree {
            return Err(Error::Degree(format!("{} arguments for a {}-form", vs.len(), self.degree)));
        }
        for v in vs {
            self.chart.ensure_same(&v.chart)?;
        }
        let mut out = self.chart.zero();
        for (idx, f) in &self.terms {
            let m: Vec<Vec<Poly>> = vs.iter().map(|v| idx.iter().map(|&i| v.comps[i].clone()).collect()).collect();
            out += &(f * &poly_det(&m));
        }
        Ok(out)
    }
}

fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(0);
    }
    let nv = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = Poly::zero(nv);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect()).collect();
        let t = &m[0][c] * &poly_det(&minor);
        if c % 2 == 0 {
            out += &t;
        } else {
            out -= &t;
        }
    }
    out
}

impl fmt::Debug for TForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                let b: Vec<String> = idx.iter().map(|i| format!("dx{}", i + 1)).collect();
                if b.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}){}", b.join("^"))
                }
            })
            .collect();
        write!(f, "TForm{}[{}]", self.degree, if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

pub fn wedge(a: &TForm, b: &TForm) -> Result<TForm> {
    a.chart.ensure_same(&b.chart)?;
    let mut out = TForm::zero(a.chart, a.degree + b.degree);
    for (i, f) in &a.terms {
        for (j, g) in &b.terms {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            let inversions = i.iter().map(|x| j.iter().filter(|y| *y < x).count()).sum::<usize>();
            let mut idx: Vec<usize> = i.iter().chain(j).copied().collect();
            idx.sort_unstable();
            let c = f * g;
            out.add_term(idx, if inversions % 2 == 1 { -&c } else { c });
        }
    }
    Ok(out)
}

pub fn interior(x: &FVec, w: &TForm) -> Result<TForm> {
    x.chart.ensure_same(&w.chart)?;
    if w.degree == 0 {
        return Ok(TForm::zero(w.chart, 0));
    }
    let mut out = TForm::zero(w.chart, w.degree - 1);
    for (idx, f) in &w.terms {
        for (m, &j) in idx.iter().enumerate() {
            if x.comps[j].is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(l, _)| *l != m).map(|(_, &i)| i).collect();
            let c = f * &x.comps[j];
            out.add_term(rest, if m % 2 == 1 { -&c } else { c });
        }
    }
    Ok(out)
}

/// Exterior derivative along the leaves.
pub fn tangential_d(w: &TForm) -> TForm {
    let chart = w.chart;
    let mut out = TForm::zero(chart, w.degree + 1);
    for (idx, f) in &w.terms {
        for j in 0..chart.k {
            if idx.contains(&j) {
                continue;
            }
            let df = f.d(j);
            if df.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < j).count();
            let mut nidx = idx.clone();
            nidx.insert(before, j);
            out.add_term(nidx, if before % 2 == 1 { -&df } else { df });
        }
    }
    out
}

/// Lie derivative from `L_X(f dx^J) = (X·f) dx^J + f Σ_m ... d(X^{j_m}) ...`.
pub fn lie_derivative(x: &FVec, w: &TForm) -> Result<TForm> {
    x.chart.ensure_same(&w.chart)?;
    let chart = w.chart;
    let mut out = w.map(|f| x.apply(f));
    for (idx, f) in &w.terms {
        for (m, &j) in idx.iter().enumerate() {
            for i in 0..chart.k {
                let dxj = x.comps[j].d(i);
                if dxj.is_zero() {
                    continue;
                }
                let mut nidx = idx.clone();
                nidx[m] = i;
                if let Some((sorted, odd)) = sort_with_sign(&nidx) {
                    let c = f * &dxj;
                    out.add_term(sorted, if odd { -&c } else { c });
                }
            }
        }
    }
    Ok(out)
}

/// Foliation-preserving affine map `x ↦ Lx + c`.
#[derive(Clone, PartialEq, Eq)]
pub struct FolAffine {
    chart: Chart,
    l: RMat,
    c: Vec<Rat>,
    l_inv: RMat,
}

impl FolAffine {
    pub fn new(chart: Chart, l: RMat, c: Vec<Rat>) -> Result<Self> {
        let n = chart.n;
        if !linalg::is_square(&l, n) || c.len() != n {
            return Err(Error::DimMismatch(format!("affine map on {n} coordinates")));
        }
        for j in chart.k..n {
            for i in 0..chart.k {
                if !l[j][i].is_zero() {
                    return Err(Error::NotFoliated(format!("L[{}][{}] is nonzero", j + 1, i + 1)));
                }
            }
        }
        let l_inv = linalg::inverse(&l)?;
        Ok(FolAffine { chart, l, c, l_inv })
    }

    pub fn identity(chart: Chart) -> Self {
        let n = chart.n;
        FolAffine { chart, l: linalg::identity(n), c: vec![Rat::zero(); n], l_inv: linalg::identity(n) }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn linear(&self) -> &RMat {
        &self.l
    }

    pub fn translation(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_identity(&self) -> bool {
        self.l == linalg::identity(self.chart.n) && self.c.iter().all(Zero::is_zero)
    }

    pub fn inverse(&self) -> FolAffine {
        let c = linalg::mat_vec(&self.l_inv, &self.c).into_iter().map(|v| -v).collect();
        FolAffine { chart: self.chart, l: self.l_inv.clone(), c, l_inv: self.l.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FolAffine) -> Result<FolAffine> {
        self.chart.ensure_same(&other.chart)?;
        let l = linalg::mul(&self.l, &other.l);
        let c = linalg::mat_vec(&self.l, &other.c).into_iter().zip(&self.c).map(|(a, b)| a + b).collect();
        let l_inv = linalg::mul(&other.l_inv, &self.l_inv);
        Ok(FolAffine { chart: self.chart, l, c, l_inv })
    }

    fn images(&self) -> Vec<Poly> {
        let n = self.chart.n;
        (0..n)
            .map(|j| {
                let mut p = Poly::constant(n, self.c[j].clone());
                for i in 0..n {
                    if !self.l[j][i].is_zero() {
                        p += &Poly::var(n, i).scale(&self.l[j][i]);
                    }
                }
                p
            })
            .collect()
    }

    /// `f ∘ φ`.
    pub fn pull_poly(&self, f: &Poly) -> Result<Poly> {
        self.chart.check_poly(f)?;
        f.substitute(&self.images())
    }

    pub fn pullback(&self, w: &TForm) -> Result<TForm> {
        self.chart.ensure_same(&w.chart)?;
        let k = self.chart.k;
        let images = self.images();
        let targets = combinations(k, w.degree);
        let mut out = TForm::zero(self.chart, w.degree);
        for (jdx, f) in &w.terms {
            let g = f.substitute(&images)?;
            for idx in &targets {
                let minor: RMat = jdx.iter().map(|&j| idx.iter().map(|&i| self.l[j][i].clone()).collect()).collect();
                let det = if minor.is_empty() { Rat::one() } else { linalg::det(&minor) };
                if !det.is_zero() {
                    out.add_term(idx.clone(), g.scale(&det));
                }
            }
        }
        Ok(out)
    }

    /// `φ_* X`, evaluated at `y` as `dφ(X(φ⁻¹ y))`.
    pub fn pushforward(&self, x: &FVec) -> Result<FVec> {
        self.chart.ensure_same(&x.chart)?;
        let inv = self.inverse().images();
        let moved: Vec<Poly> = x.comps.iter().map(|p| p.substitute(&inv)).collect::<Result<_>>()?;
        let k = self.chart.k;
        let comps = (0..k)
            .map(|j| {
                let mut p = self.chart.zero();
                for (i, m) in moved.iter().enumerate() {
                    if !self.l[j][i].is_zero() {
                        p += &m.scale(&self.l[j][i]);
                    }
                }
                p
            })
            .collect();
        Ok(FVec { chart: self.chart, comps })
    }
}

impl fmt::Debug for FolAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FolAffine").field("L", &self.l).field("c", &self.c).finish()
    }
}

/// Strictly increasing `p`-tuples from `0..k`.
pub fn combinations(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= k {
        go(0, k, p, &mut Vec::new(), &mut out);
    }
    out
}
