//! JSON forms of q-series and number-field elements.

use std::str::FromStr;

use halfint_core::numfield::{Elem, NumberField};
use halfint_core::{BigRat, QSeries};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Number, Value};

#[derive(Debug, thiserror::Error)]
#[error("malformed series: {0}")]
pub struct CodecError(pub String);

fn big(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

fn parse_big(v: &Value) -> Result<BigInt, CodecError> {
    match v {
        Value::Number(n) => {
            BigInt::from_str(&n.to_string()).map_err(|_| CodecError(format!("not an integer: {n}")))
        }
        other => Err(CodecError(format!("expected integer, got {other}"))),
    }
}

/// `{"trunc": N, "coeffs": [[num, den], …]}` with reduced fractions, den > 0.
pub fn series_to_json(s: &QSeries) -> Value {
    let coeffs: Vec<Value> = s
        .coeffs()
        .iter()
        .map(|c| Value::Array(vec![big(c.numer()), big(c.denom())]))
        .collect();
    json!({ "trunc": s.trunc(), "coeffs": coeffs })
}

pub fn series_from_json(v: &Value) -> Result<QSeries, CodecError> {
    let trunc = v
        .get("trunc")
        .and_then(Value::as_u64)
        .ok_or_else(|| CodecError("missing trunc".into()))? as usize;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| CodecError("missing coeffs".into()))?;
    if coeffs.len() != trunc + 1 {
        return Err(CodecError(format!(
            "{} coefficients for trunc {trunc}",
            coeffs.len()
        )));
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        let pair = c
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CodecError(format!("bad coefficient {c}")))?;
        let (num, den) = (parse_big(&pair[0])?, parse_big(&pair[1])?);
        if !den.is_positive() {
            return Err(CodecError(format!("nonpositive denominator in {c}")));
        }
        let r = BigRat::new(num.clone(), den.clone());
        if r.numer() != &num || r.denom() != &den {
            return Err(CodecError(format!("unreduced fraction {c}")));
        }
        out.push(r);
    }
    Ok(QSeries::from_coeffs(out))
}

fn rat_string(r: &BigRat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact text of an element, in powers of the field generator `t`.
pub fn elem_string(e: &Elem) -> String {
    let mut parts = Vec::new();
    for (i, c) in e.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let r = rat_string(c);
        parts.push(match i {
            0 => r,
            1 => format!("{r}*t"),
            _ => format!("{r}*t^{i}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// Defining polynomial, lowest degree first.
pub fn field_json(k: &NumberField) -> Value {
    Value::Array(
        k.modulus()
            .iter()
            .map(|c| Value::String(rat_string(c)))
            .collect(),
    )
}
