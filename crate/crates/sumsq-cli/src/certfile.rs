//! Certificate files for `erase-denominators`.
//!
//! ```json
//! {"target": "x^2 + y^2", "weights": [1, 1], "summands": ["x*y", "y^2"],
//!  "modulus": {"h": "y", "g": "1", "k": 1, "r": 1, "cofactor": "0"}}
//! ```
//!
//! states `h^(2r) · target = Σ wᵢ sᵢ² + cofactor · (z^k - h g)`, with every
//! polynomial in `z` of degree below `k`.

use num_traits::One;
use serde_json::Value;
use sumsq::expr::parse_series;
use sumsq::psd::ErasureProblem;
use sumsq::{vars, Error, Rational, Result, Series, Vars};

fn xyz() -> Vars {
    vars(&["x", "y", "z"])
}

fn xy() -> Vars {
    vars(&["x", "y"])
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn text<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| bad(format!("missing string field \"{key}\"")))
}

fn nat(v: &Value, key: &str) -> Result<u32> {
    v.get(key)
        .and_then(Value::as_u64)
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| bad(format!("missing integer field \"{key}\"")))
}

fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n.as_i64().map(|i| Rational::from_integer(i.into())).ok_or_else(|| bad("weights must be integers or \"p/q\" strings")),
        Value::String(s) => s.trim().parse::<Rational>().map_err(|_| bad(format!("not a rational: {s}"))),
        _ => Err(bad("weights must be integers or \"p/q\" strings")),
    }
}

/// Coefficients of `z⁰ .. z^{k-1}` as series in `x, y`.
pub fn z_coefficients(s: &Series, k: u32) -> Result<Vec<Series>> {
    let mut parts: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); k as usize];
    for (e, c) in s.terms() {
        let l = e[2] as usize;
        if l >= k as usize {
            return Err(bad(format!("z-degree {l} is not below k = {k}")));
        }
        parts[l].push((vec![e[0], e[1]], c.clone()));
    }
    parts.into_iter().map(|t| Ok(Series::make(xy(), s.trunc(), t)?.into_exact())).collect()
}

fn poly(v: &str) -> Result<Series> {
    parse_series(v, &xyz())
}

pub fn parse(src: &str) -> Result<ErasureProblem> {
    let doc: Value = serde_json::from_str(src).map_err(|e| bad(format!("certificate file is not JSON: {e}")))?;
    let modulus = doc.get("modulus").ok_or_else(|| bad("missing field \"modulus\""))?;
    let k = nat(modulus, "k")?;
    let r = nat(modulus, "r")?;
    if k == 0 {
        return Err(bad("k must be positive"));
    }
    let summands = doc
        .get("summands")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing array \"summands\""))?
        .iter()
        .map(|s| s.as_str().ok_or_else(|| bad("summands must be strings")).and_then(poly))
        .collect::<Result<Vec<_>>>()?;
    if let Some(ws) = doc.get("weights").and_then(Value::as_array) {
        if ws.len() != summands.len() {
            return Err(bad("one weight per summand"));
        }
        for w in ws {
            if !rational(w)?.is_one() {
                return Err(bad("erasure takes unit weights; expand weights into squares first"));
            }
        }
    }
    let f = z_coefficients(&poly(text(&doc, "target")?)?, k)?;
    let a = summands.iter().map(|s| z_coefficients(s, k)).collect::<Result<Vec<_>>>()?;
    let cofactor = match modulus.get("cofactor") {
        Some(_) => poly(text(modulus, "cofactor")?)?,
        None => Series::exact_zero(xyz()),
    };
    let b = z_coefficients(&cofactor.scalar_mul(&-Rational::one()), k)?;
    let h = parse_series(text(modulus, "h")?, &xy())?;
    let g = parse_series(text(modulus, "g")?, &xy())?;
    if h.is_zero() {
        return Err(bad("h must be nonzero"));
    }
    Ok(ErasureProblem { f, a, b, h, g, r, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_instance_parses() {
        let p = parse(r#"{"target":"x^2+y^2","summands":["x*y","y^2"],"modulus":{"h":"y","g":"1","k":1,"r":1}}"#).unwrap();
        assert_eq!(p.k, 1);
        assert_eq!(p.a.len(), 2);
        assert!(p.b[0].is_zero());
    }

    #[test]
    fn rejects_high_z_degree() {
        let e = parse(r#"{"target":"z","summands":[],"modulus":{"h":"y","g":"1","k":1,"r":0}}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
    }
}
