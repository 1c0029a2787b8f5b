//! JSON wire format for maps.
//!
//! `{"n":3,"m":3,"k":2,"field":{"kind":"Q"},"matrix":[[[c0,...,cn], ...], ...]}`
//! with each coefficient an integer or a `"p/q"` string. The writer emits the
//! keys in this order, lowest terms, no floats.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::Value;

use crate::error::{parse_err, Error, Result};
use crate::field::{format_rational, is_prime, parse_rational, FieldDesc};
use crate::model::{Dimensions, KroneckerMap};

struct Coef<'a>(&'a BigRational);

impl Serialize for Coef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match (self.0.is_integer(), self.0.numer().to_i64()) {
            (true, Some(v)) => s.serialize_i64(v),
            _ => s.serialize_str(&format_rational(self.0)),
        }
    }
}

struct Doc<'a>(&'a KroneckerMap);

impl Serialize for Doc<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a = self.0;
        let d = a.dims();
        let matrix: Vec<Vec<Vec<Coef>>> = (0..d.k)
            .map(|i| {
                (0..d.w())
                    .map(|j| (0..d.v()).map(|l| Coef(a.coeff(i, j, l))).collect())
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("KroneckerMap", 5)?;
        st.serialize_field("n", &d.n)?;
        st.serialize_field("m", &d.m)?;
        st.serialize_field("k", &d.k)?;
        st.serialize_field("field", &a.field())?;
        st.serialize_field("matrix", &matrix)?;
        st.end()
    }
}

pub fn to_json(a: &KroneckerMap) -> String {
    serde_json::to_string(&Doc(a)).expect("serializing a map cannot fail")
}

pub fn to_value(a: &KroneckerMap) -> Value {
    serde_json::to_value(Doc(a)).expect("serializing a map cannot fail")
}

fn get_usize(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| parse_err(key, "missing"))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| parse_err(key, "expected a non-negative integer"))
}

fn parse_field(v: Option<&Value>) -> Result<FieldDesc> {
    let Some(v) = v else {
        return Ok(FieldDesc::Q);
    };
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("field.kind", "missing"))?;
    match kind {
        "Q" => Ok(FieldDesc::Q),
        "Fp" => {
            let p = v
                .get("p")
                .and_then(Value::as_u64)
                .ok_or_else(|| parse_err("field.p", "missing"))?;
            if p >= 1 << 31 || !is_prime(p) {
                return Err(parse_err(
                    "field.p",
                    format!("{p} is not a prime below 2^31"),
                ));
            }
            Ok(FieldDesc::Fp { p: p as u32 })
        }
        other => Err(parse_err("field.kind", format!("unknown field `{other}`"))),
    }
}

fn parse_coef(v: &Value, path: &str) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(u.into()))
            } else {
                Err(parse_err(path, "floats are not allowed"))
            }
        }
        Value::String(s) => {
            parse_rational(s).ok_or_else(|| parse_err(path, format!("malformed rational `{s}`")))
        }
        _ => Err(parse_err(path, "expected an integer or a \"p/q\" string")),
    }
}

pub fn from_json(text: &str) -> Result<KroneckerMap> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    from_value(&v)
}

pub fn from_value(v: &Value) -> Result<KroneckerMap> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("$", "expected an object"))?;
    let n = get_usize(obj, "n")?;
    let m = get_usize(obj, "m")?;
    let k = match obj.get("k") {
        None => 2,
        Some(_) => get_usize(obj, "k")?,
    };
    let field = parse_field(obj.get("field"))?;
    let dims = Dimensions::new(n, m, k)?;
    let rows = obj
        .get("matrix")
        .ok_or_else(|| parse_err("matrix", "missing"))?
        .as_array()
        .ok_or_else(|| parse_err("matrix", "expected an array"))?;
    if rows.len() != k {
        return Err(parse_err(
            "matrix",
            format!("expected {k} rows, got {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(k);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(format!("matrix[{i}]"), "expected an array"))?;
        if row.len() != dims.w() {
            return Err(parse_err(
                format!("matrix[{i}]"),
                format!("expected {} entries, got {}", dims.w(), row.len()),
            ));
        }
        let mut out_row = Vec::with_capacity(row.len());
        for (j, form) in row.iter().enumerate() {
            let path = format!("matrix[{i}][{j}]");
            let form = form
                .as_array()
                .ok_or_else(|| parse_err(&path, "expected an array"))?;
            if form.len() != dims.v() {
                return Err(parse_err(
                    &path,
                    format!("expected {} coefficients, got {}", dims.v(), form.len()),
                ));
            }
            let coeffs = form
                .iter()
                .enumerate()
                .map(|(l, c)| parse_coef(c, &format!("{path}[{l}]")))
                .collect::<Result<Vec<_>>>()?;
            out_row.push(coeffs);
        }
        entries.push(out_row);
    }
    KroneckerMap::new(dims, field, entries).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err("matrix", other.to_string()),
    })
}
