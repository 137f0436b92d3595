//! Built-in metric families addressed by name.
//!
//! ```text
//! gf:p=3,f=sum_sq          f = x1^2 + ... + xp^2
//! gf:p=3,f=indef           f = x1^2 - x2^2 + x3^2 + ... + xp^2
//! gf:p=3,f=<poly>          polynomial in x1..xp
//! gF:s=2,f=quartic         f_i(z) = z^4 for every i
//! gF:s=2,f=<poly>[;<poly>] polynomials in z, one shared or one per block
//! constcurv:K=1,m=4[,p=0]
//! flat:m=4[,p=0]
//! rescale:alpha=<scale>@<family>
//! ```
//!
//! A scale is `exp_xN` (shorthand for `exp(xN)`), `exp(<poly>)` or a
//! positive `<poly>`, always in the chart coordinates `x1..xm`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{chart_names, MetricField, ScaleField};
use crate::poly::Polynomial;

fn params(name: &str, body: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{name}: expected key=value, found `{item}`")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(Error::Parse(format!(
                "{name}: unknown parameter `{k}` (expected one of {})",
                allowed.join(", ")
            )));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("{name}: parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(name: &str, map: &BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T> {
    match map.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("{name}: `{key}={v}` is not a valid number"))),
        None => default.ok_or_else(|| Error::Parse(format!("{name}: missing parameter `{key}`"))),
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

pub fn parse_scale(text: &str, m: usize) -> Result<ScaleField> {
    let text = text.trim();
    let vars = chart_names(m);
    let vars = refs(&vars);
    if let Some(var) = text.strip_prefix("exp_") {
        return Ok(ScaleField::Exp(Polynomial::parse(var, &vars)?));
    }
    if let Some(inner) = text.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
        return Ok(ScaleField::Exp(Polynomial::parse(inner, &vars)?));
    }
    Ok(ScaleField::Poly(Polynomial::parse(text, &vars)?))
}

pub fn parse_family(text: &str) -> Result<MetricField> {
    let text = text.trim();
    let (name, body) = text.split_once(':').unwrap_or((text, ""));
    match name {
        "rescale" => {
            let (head, base) = body.split_once('@').ok_or_else(|| {
                Error::Parse("rescale: expected `rescale:alpha=<scale>@<family>`".into())
            })?;
            let map = params(name, head, &["alpha"])?;
            let base = parse_family(base)?;
            let alpha = map
                .get("alpha")
                .ok_or_else(|| Error::Parse("rescale: missing parameter `alpha`".into()))?;
            let alpha = parse_scale(alpha, base.dim())?;
            base.rescale(alpha)
        }
        "gf" => {
            let map = params(name, body, &["p", "f"])?;
            let p: usize = num(name, &map, "p", Some(3))?;
            let vars = names("x", p);
            let vars = refs(&vars);
            let f = match map.get("f").map(String::as_str).unwrap_or("sum_sq") {
                "sum_sq" => {
                    let terms: Vec<String> = (1..=p).map(|i| format!("x{i}^2")).collect();
                    Polynomial::parse(&terms.join(" + "), &vars)?
                }
                "indef" => {
                    let mut s = String::from("x1^2 - x2^2");
                    for i in 3..=p {
                        s.push_str(&format!(" + x{i}^2"));
                    }
                    Polynomial::parse(&s, &vars)?
                }
                other => Polynomial::parse(other, &vars)?,
            };
            MetricField::gf(p, f)
        }
        "gF" => {
            let map = params(name, body, &["s", "f"])?;
            let s: usize = num(name, &map, "s", Some(2))?;
            let spec = map.get("f").map(String::as_str).unwrap_or("quartic");
            let spec = if spec == "quartic" { "z^4" } else { spec };
            let fs: Vec<Polynomial> = spec
                .split(';')
                .map(|p| Polynomial::parse(p, &["z"]))
                .collect::<Result<_>>()?;
            let fs = match fs.len() {
                1 => vec![fs[0].clone(); s],
                n if n == s => fs,
                n => {
                    return Err(Error::Parse(format!(
                        "gF: expected 1 or {s} polynomials in f, found {n}"
                    )))
                }
            };
            MetricField::g_capital_f(s, fs)
        }
        "constcurv" => {
            let map = params(name, body, &["K", "m", "p"])?;
            let k: f64 = num(name, &map, "K", Some(1.0))?;
            let m: usize = num(name, &map, "m", None)?;
            let p: usize = num(name, &map, "p", Some(0))?;
            if p > m {
                return Err(Error::Parse(format!("constcurv: p={p} exceeds m={m}")));
            }
            MetricField::constant_curvature(k, p, m - p)
        }
        "flat" => {
            let map = params(name, body, &["m", "p"])?;
            let m: usize = num(name, &map, "m", None)?;
            let p: usize = num(name, &map, "p", Some(0))?;
            if p > m {
                return Err(Error::Parse(format!("flat: p={p} exceeds m={m}")));
            }
            MetricField::flat(p, m - p)
        }
        _ => Err(Error::UnknownFamily(text.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Signature;

    #[test]
    fn builtin_names() {
        let f = parse_family("gf:p=3,f=sum_sq").unwrap();
        assert_eq!(f.signature(), Signature { p: 3, q: 3 });
        assert_eq!(f.to_string(), "gf:p=3,f=x1^2 + x2^2 + x3^2");
        let f = parse_family("gf:p=3,f=indef").unwrap();
        assert_eq!(f.to_string(), "gf:p=3,f=x1^2 - x2^2 + x3^2");
        let f = parse_family("gF:s=2,f=quartic").unwrap();
        assert_eq!(f.signature(), Signature { p: 4, q: 2 });
        let f = parse_family("constcurv:K=1,m=4").unwrap();
        assert_eq!(f.signature(), Signature { p: 0, q: 4 });
        let f = parse_family("flat:m=4").unwrap();
        assert_eq!(f.dim(), 4);
    }

    #[test]
    fn rescale_wrapper() {
        let f = parse_family("rescale:alpha=exp_x1@gf:p=3,f=sum_sq").unwrap();
        assert_eq!(f.dim(), 6);
        let x = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((f.scale_at(&x).unwrap() - 0.5f64.exp()).abs() < 1e-15);
        let g = parse_family("rescale:alpha=exp(2x1 - x3)@flat:m=3").unwrap();
        assert!((g.scale_at(&[1.0, 0.0, 1.0]).unwrap() - 1f64.exp()).abs() < 1e-15);
        let h = parse_family("rescale:alpha=1 + x2^2@flat:m=3").unwrap();
        assert_eq!(h.scale_at(&[0.0, 2.0, 0.0]).unwrap(), 5.0);
    }

    #[test]
    fn custom_polynomials() {
        let f = parse_family("gf:p=2,f=x1*x2 + 1/3*x1^3").unwrap();
        assert_eq!(f.dim(), 4);
        let g = parse_family("gF:s=2,f=z^4;z^3 + z").unwrap();
        assert_eq!(g.dim(), 6);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_family("sphere:m=3"), Err(Error::UnknownFamily(_))));
        assert!(matches!(parse_family("flat"), Err(Error::Parse(_))));
        assert!(matches!(parse_family("flat:m=4,q=1"), Err(Error::Parse(_))));
        assert!(matches!(parse_family("gf:p=3,f=y1"), Err(Error::Parse(_))));
        assert!(matches!(parse_family("gF:s=3,f=z;z^2"), Err(Error::Parse(_))));
        assert!(parse_family("flat:m=2").is_err());
        assert!(parse_family("rescale:alpha=exp_x1").is_err());
    }
}
