//! JSON encodings. Indices are 1-based on the wire, rationals are `"p/q"`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foliated::{Chart, FVec, FolAffine, TForm};
use crate::linalg::RMat;
use crate::qforms::{PMat, QForm};
use crate::qlie::{Conn, QLie};
use crate::ring::{fmt_rat, parse_rat, Poly, Rat};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))
}

fn usize_of(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| perr(format!("{what} must be a non-negative integer")))
}

pub fn rat_to_json(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) if n.is_i64() => Ok(crate::ring::int(n.as_i64().unwrap())),
        _ => Err(perr(format!("not a rational: {v}"))),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.terms().map(|(e, c)| json!({"e": e, "c": fmt_rat(c)})).collect())
}

pub fn poly_from_json(v: &Value, nvars: usize) -> Result<Poly> {
    let mut terms = Vec::new();
    for t in array(v, "polynomial")? {
        let e = array(field(t, "e")?, "exponent")?
            .iter()
            .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| perr("exponent entries must be non-negative integers")))
            .collect::<Result<Vec<u32>>>()?;
        terms.push((e, rat_from_json(field(t, "c")?)?));
    }
    Poly::from_terms(nvars, terms)
}

pub fn chart_to_json(c: &Chart) -> Value {
    json!({"n": c.n, "k": c.k})
}

pub fn chart_from_json(v: &Value) -> Result<Chart> {
    Chart::new(usize_of(field(v, "n")?, "n")?, usize_of(field(v, "k")?, "k")?)
}

pub fn tform_to_json(w: &TForm) -> Value {
    Value::Array(
        w.terms()
            .map(|(idx, f)| json!({"idx": idx.iter().map(|i| i + 1).collect::<Vec<_>>(), "coeff": poly_to_json(f)}))
            .collect(),
    )
}

/// Parses a form of the given degree; index lists may be unsorted.
pub fn tform_from_json(v: &Value, chart: Chart, degree: usize) -> Result<TForm> {
    let mut terms = Vec::new();
    for t in array(v, "form")? {
        let idx = array(field(t, "idx")?, "idx")?
            .iter()
            .map(|x| match x.as_u64() {
                Some(i) if i >= 1 => Ok(i as usize - 1),
                _ => Err(perr("form indices are 1-based positive integers")),
            })
            .collect::<Result<Vec<usize>>>()?;
        if idx.len() != degree {
            return Err(Error::Degree(format!("term with {} indices in a {degree}-form", idx.len())));
        }
        terms.push((idx, poly_from_json(field(t, "coeff")?, chart.n)?));
    }
    TForm::from_terms(chart, degree, terms)
}

pub fn fvec_to_json(x: &FVec) -> Value {
    Value::Array(x.comps().iter().map(poly_to_json).collect())
}

pub fn fvec_from_json(v: &Value, chart: Chart) -> Result<FVec> {
    let comps = array(v, "vector field")?.iter().map(|p| poly_from_json(p, chart.n)).collect::<Result<_>>()?;
    FVec::new(chart, comps)
}

pub fn qform_to_json(w: &QForm) -> Value {
    json!({"components": w.comps().iter().map(tform_to_json).collect::<Vec<_>>()})
}

pub fn qform_from_json(v: &Value, chart: Chart, dim: usize, degree: usize) -> Result<QForm> {
    let comps = array(field(v, "components")?, "components")?;
    if comps.len() != dim {
        return Err(Error::DimMismatch(format!("{} components for rank {dim}", comps.len())));
    }
    let comps = comps.iter().map(|c| tform_from_json(c, chart, degree)).collect::<Result<_>>()?;
    QForm::new(chart, degree, comps)
}

pub fn rmat_to_json(m: &RMat) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rat_to_json).collect())).collect())
}

pub fn rmat_from_json(v: &Value, rows: usize, cols: usize) -> Result<RMat> {
    let rs = array(v, "matrix")?;
    if rs.len() != rows {
        return Err(Error::DimMismatch(format!("matrix with {} rows, expected {rows}", rs.len())));
    }
    rs.iter()
        .map(|r| {
            let r = array(r, "matrix row")?;
            if r.len() != cols {
                return Err(Error::DimMismatch(format!("matrix row of length {}, expected {cols}", r.len())));
            }
            r.iter().map(rat_from_json).collect()
        })
        .collect()
}

pub fn pmat_to_json(m: &PMat) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(poly_to_json).collect())).collect())
}

pub fn pmat_from_json(v: &Value, dim: usize, nvars: usize) -> Result<PMat> {
    let rs = array(v, "matrix")?;
    if rs.len() != dim {
        return Err(Error::DimMismatch(format!("matrix with {} rows, expected {dim}", rs.len())));
    }
    rs.iter()
        .map(|r| {
            let r = array(r, "matrix row")?;
            if r.len() != dim {
                return Err(Error::DimMismatch(format!("matrix row of length {}, expected {dim}", r.len())));
            }
            r.iter().map(|p| poly_from_json(p, nvars)).collect()
        })
        .collect()
}

pub fn qlie_to_json(g: &QLie) -> Value {
    let c: Vec<Value> = g.structure_constants().iter().map(rmat_to_json).collect();
    json!({"dim": g.dim(), "c": c, "gram": rmat_to_json(g.gram())})
}

pub fn qlie_from_json(v: &Value) -> Result<QLie> {
    let d = usize_of(field(v, "dim")?, "dim")?;
    let cs = array(field(v, "c")?, "structure constants")?;
    if cs.len() != d {
        return Err(Error::DimMismatch(format!("structure constants with {} slices, expected {d}", cs.len())));
    }
    let c = cs.iter().map(|m| rmat_from_json(m, d, d)).collect::<Result<_>>()?;
    let gram = rmat_from_json(field(v, "gram")?, d, d)?;
    QLie::new(d, c, gram)
}

pub fn conn_to_json(c: &Conn) -> Value {
    json!({"omega": c.omega().iter().map(pmat_to_json).collect::<Vec<_>>()})
}

pub fn conn_from_json(v: &Value, chart: Chart, dim: usize) -> Result<Conn> {
    let ms = array(field(v, "omega")?, "omega")?;
    let omega = ms.iter().map(|m| pmat_from_json(m, dim, chart.n)).collect::<Result<_>>()?;
    Conn::new(chart, dim, omega)
}

pub fn affine_to_json(phi: &FolAffine) -> Value {
    json!({"L": rmat_to_json(phi.linear()), "c": phi.translation().iter().map(rat_to_json).collect::<Vec<_>>()})
}

pub fn affine_from_json(v: &Value, chart: Chart) -> Result<FolAffine> {
    let l = rmat_from_json(field(v, "L")?, chart.n, chart.n)?;
    let c = array(field(v, "c")?, "translation")?.iter().map(rat_from_json).collect::<Result<Vec<_>>>()?;
    FolAffine::new(chart, l, c)
}

/// Reads JSON text, mapping syntax errors to [`Error::Parse`].
pub fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(e.to_string()))
}

/// Pretty JSON with a trailing newline; key order is stable because
/// `serde_json` maps are sorted.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

pub(crate) fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    field(v, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};

    #[test]
    fn poly_roundtrip() {
        let p = &Poly::var(2, 0).scale(&rat(-3, 2)) + &Poly::constant(2, int(5));
        let v = poly_to_json(&p);
        assert_eq!(v, json!([{"e": [0, 0], "c": "5/1"}, {"e": [1, 0], "c": "-3/2"}]));
        assert_eq!(poly_from_json(&v, 2).unwrap(), p);
        assert!(poly_from_json(&v, 3).is_err());
    }

    #[test]
    fn tform_roundtrip_and_sorting() {
        let c = Chart::new(3, 3).unwrap();
        let v = json!([{"idx": [2, 1], "coeff": [{"e": [0, 0, 0], "c": "1/1"}]}]);
        let w = tform_from_json(&v, c, 2).unwrap();
        assert_eq!(w, TForm::basis(c, &[0, 1], c.one()).unwrap().neg());
        assert_eq!(tform_from_json(&tform_to_json(&w), c, 2).unwrap(), w);
        assert!(tform_from_json(&json!([{"idx": [0], "coeff": []}]), c, 1).is_err());
    }

    #[test]
    fn qlie_roundtrip() {
        let g = QLie::so3();
        assert_eq!(qlie_from_json(&qlie_to_json(&g)).unwrap(), g);
    }
}
