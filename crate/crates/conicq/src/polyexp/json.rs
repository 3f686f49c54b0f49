use std::collections::BTreeMap;

use serde::Serializer;
use serde_json::Value;

use super::poly::{Exps, HomPoly};
use super::{fmt_q, parse_rational, ExpansionError, Q};

fn exps_key(e: &Exps) -> String {
    format!("{},{},{},{}", e[0], e[1], e[2], e[3])
}

pub fn ser_q<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(v))
}

pub fn ser_poly<S: Serializer>(p: &HomPoly, s: S) -> Result<S::Ok, S::Error> {
    let m: BTreeMap<String, String> = p.coeffs().iter().map(|(e, c)| (exps_key(e), fmt_q(c))).collect();
    s.collect_map(m)
}

fn parse_exps(key: &str) -> Result<Exps, ExpansionError> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(ExpansionError::Parse(format!("monomial key {key:?} needs four exponents")));
    }
    let mut e = [0u32; 4];
    for (slot, p) in e.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| ExpansionError::Parse(format!("bad exponent in {key:?}")))?;
    }
    Ok(e)
}

fn parse_coeff(v: &Value) -> Result<Q, ExpansionError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(ExpansionError::Parse(format!("coefficient must be a string or number, got {other}"))),
    }
}

/// Reads `{"a,b,c,d": "num/den", ...}`, splitting mixed degrees into homogeneous pieces.
pub fn parse_poly_map(v: &Value) -> Result<Vec<HomPoly>, ExpansionError> {
    let obj = v.as_object().ok_or_else(|| ExpansionError::Parse("polynomial must be a JSON object".into()))?;
    let mut by_degree: BTreeMap<u32, Vec<(Exps, Q)>> = BTreeMap::new();
    for (k, c) in obj {
        let e = parse_exps(k)?;
        by_degree.entry(e.iter().sum()).or_default().push((e, parse_coeff(c)?));
    }
    Ok(by_degree
        .into_iter()
        .filter_map(|(d, ts)| HomPoly::from_terms(d, ts))
        .filter(|p| !p.is_zero())
        .collect())
}

/// Reads jets given either as one polynomial object or an array of them.
pub fn parse_jets(text: &str) -> Result<Vec<HomPoly>, ExpansionError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ExpansionError::Parse(e.to_string()))?;
    match &v {
        Value::Array(items) => {
            let mut out = Vec::new();
            for it in items {
                out.extend(parse_poly_map(it)?);
            }
            Ok(out)
        }
        Value::Object(_) => parse_poly_map(&v),
        _ => Err(ExpansionError::Parse("jets must be a JSON object or array".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexp::{q, LogRadialTerm};

    #[test]
    fn term_serialization() {
        let t = LogRadialTerm::new(HomPoly::monomial([2, 0, 0, 0], q(1, 45)), q(3, 1), 0);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"poly":{"2,0,0,0":"1/45"},"s":"3","logk":0}"#);
    }

    #[test]
    fn jets_parse() {
        let j = parse_jets(r#"{"1,0,0,0":"1/3","0,1,1,0":-2,"0,0,0,1":"0.5"}"#).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[0], &HomPoly::var(0).scale(&q(1, 3)) + &HomPoly::var(3).scale(&q(1, 2)));
        assert_eq!(j[1], HomPoly::monomial([0, 1, 1, 0], q(-2, 1)));
        assert!(parse_jets(r#"{"1,0,0":"1"}"#).is_err());
        assert!(parse_jets("[1]").is_err());
        assert!(parse_jets(r#"[]"#).unwrap().is_empty());
    }
}
