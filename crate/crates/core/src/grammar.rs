//! Text forms for weights and test functions used by the CLI and configs.
//!
//! Weights:
//! `power:alpha=1.5[,cap=2]`, `exp-simple`, `exp-decay:gamma=1,rho=2,mu=1`,
//! `log1p[:cap=3]`, `exp-growth[:cap=3]`, `linear[:slope=0.5][,cap=2]`,
//! `volterra(<w>)`, `derived(p=2[,eps=0.5],base=<w>)`, `squash2(<w>)`,
//! `squashx2(<w>)`, `tabulated:<file.csv>`. An `alpha_decl=` option on the
//! elementary half-plane families overrides the declared growth exponent.
//!
//! Functions:
//! `taylor:[1,0,3]`, `geom:a=0.5[,n=60]`, `exp:a=1[,n=30]`, `monomial:n=3`,
//! `rational:[(1,1,2),(0.5+1i,2,3)]` (an optional fourth entry shifts `z`),
//! `random-poly:seed=1,degree=5`, `random-rational:seed=1`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::{HolomorphicFunction, RationalTerm};
use crate::weights::{
    derive_projection_weight, load_tabulated_csv, make_linear_weight, make_named_weight,
    make_power_weight, squash, volterra_square, Geometry, NamedTag, SquashKind, WeightFunction,
};

/// Split at commas that are not nested inside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        out.push(last);
    }
    out
}

fn options(s: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for part in split_top(s) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn num(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{key}` is not a number: `{v}`")))
        })
        .transpose()
}

fn required(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    num(map, key)?.ok_or_else(|| Error::Parse(format!("missing `{key}`")))
}

fn reject_unknown(map: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown option `{k}`"))),
        None => Ok(()),
    }
}

/// Contents of `name(...)` when `s` has that shape.
fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')
}

pub fn parse_weight(spec: &str, geometry: Geometry) -> Result<WeightFunction> {
    let s = spec.trim();
    if let Some(inner) = call(s, "volterra") {
        return volterra_square(&parse_weight(inner, geometry)?);
    }
    if let Some(inner) = call(s, "squashx2") {
        return squash(&parse_weight(inner, geometry)?, SquashKind::DoubleArg);
    }
    if let Some(inner) = call(s, "squash2") {
        return squash(&parse_weight(inner, geometry)?, SquashKind::SquareArg);
    }
    if let Some(inner) = call(s, "derived") {
        let opts = options(inner)?;
        reject_unknown(&opts, &["p", "eps", "base"])?;
        let base = opts
            .get("base")
            .ok_or_else(|| Error::Parse("derived(...) needs base=<weight>".into()))?;
        return derive_projection_weight(
            &parse_weight(base, geometry)?,
            required(&opts, "p")?,
            num(&opts, "eps")?,
        );
    }
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    if name == "tabulated" {
        return load_tabulated_csv(Path::new(rest.trim()), geometry);
    }
    let opts = options(rest)?;
    let cap = num(&opts, "cap")?;
    let declared = num(&opts, "alpha_decl")?;
    let capped = |w: WeightFunction| -> Result<WeightFunction> {
        let w = match cap {
            Some(c) => w.with_cap(c)?,
            None => w,
        };
        Ok(match declared {
            Some(a) => w.with_declared_alpha(a),
            None => w,
        })
    };
    match name {
        "power" => {
            reject_unknown(&opts, &["alpha", "cap", "alpha_decl"])?;
            capped(make_power_weight(geometry, required(&opts, "alpha")?)?)
        }
        "exp-simple" => {
            reject_unknown(&opts, &[])?;
            make_named_weight(geometry, NamedTag::ExpSimple)
        }
        "exp-decay" => {
            reject_unknown(&opts, &["gamma", "rho", "mu"])?;
            let tag = NamedTag::ExpDecay {
                gamma: num(&opts, "gamma")?.unwrap_or(1.0),
                rho: num(&opts, "rho")?.unwrap_or(1.0),
                mu: num(&opts, "mu")?.unwrap_or(1.0),
            };
            make_named_weight(geometry, tag)
        }
        "log1p" => {
            reject_unknown(&opts, &["cap", "alpha_decl"])?;
            capped(make_named_weight(geometry, NamedTag::LogOnePlus)?)
        }
        "exp-growth" => {
            reject_unknown(&opts, &["cap", "alpha_decl"])?;
            capped(make_named_weight(geometry, NamedTag::ExpGrowthMinusOne)?)
        }
        "linear" => {
            reject_unknown(&opts, &["slope", "cap", "alpha_decl"])?;
            if geometry != Geometry::HalfPlane {
                return Err(Error::Domain(
                    "linear weights live on the half-plane".into(),
                ));
            }
            let w = make_linear_weight(num(&opts, "slope")?.unwrap_or(1.0), cap)?;
            Ok(match declared {
                Some(a) => w.with_declared_alpha(a),
                None => w,
            })
        }
        other => Err(Error::Parse(format!("unknown weight family `{other}`"))),
    }
}

/// `1`, `-2.5`, `3i`, `1+2i`, `1e-3-4.5i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: `{s}`"));
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// `re,im` as used by `--at`.
pub fn parse_point(s: &str) -> Result<Complex64> {
    match s.split_once(',') {
        Some((a, b)) => {
            let re = a
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad point `{s}`")))?;
            let im = b
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad point `{s}`")))?;
            Ok(Complex64::new(re, im))
        }
        None => parse_complex(s),
    }
}

fn bracketed(s: &str) -> Result<&str> {
    s.trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [...], got `{s}`")))
}

pub fn parse_function(spec: &str) -> Result<HolomorphicFunction> {
    let s = spec.trim();
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    match name {
        "taylor" => {
            let c = split_top(bracketed(rest)?)
                .into_iter()
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            if c.is_empty() {
                return Err(Error::Parse(
                    "taylor:[...] needs at least one coefficient".into(),
                ));
            }
            Ok(HolomorphicFunction::polynomial(c))
        }
        "rational" => {
            let mut terms = Vec::new();
            for t in split_top(bracketed(rest)?) {
                let inner = t
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("expected (b,c,k), got `{t}`")))?;
                let parts = split_top(inner);
                if !(3..=4).contains(&parts.len()) {
                    return Err(Error::Parse(format!("expected (b,c,k[,shift]), got `{t}`")));
                }
                let c = parts[1]
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad c in `{t}`")))?;
                let k = parts[2]
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad k in `{t}`")))?;
                let mut term = RationalTerm::new(parse_complex(parts[0])?, c, k)?;
                if let Some(a) = parts.get(3) {
                    term.a = a
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad shift in `{t}`")))?;
                }
                terms.push(term);
            }
            Ok(HolomorphicFunction::rational(terms))
        }
        _ => {
            let opts = options(rest)?;
            let count = |key: &str, default: usize| -> Result<usize> {
                match opts.get(key) {
                    Some(v) => v
                        .parse()
                        .map_err(|_| Error::Parse(format!("`{key}` must be a count"))),
                    None => Ok(default),
                }
            };
            let complex = |key: &str| -> Result<Complex64> {
                parse_complex(
                    opts.get(key)
                        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?,
                )
            };
            match name {
                "geom" => Ok(HolomorphicFunction::geometric(
                    complex("a")?,
                    count("n", 60)?,
                )),
                "exp" => Ok(HolomorphicFunction::exp_truncated(
                    complex("a")?,
                    count("n", 30)?,
                )),
                "monomial" => Ok(HolomorphicFunction::monomial(count("n", 1)?)),
                "random-poly" => Ok(HolomorphicFunction::random_polynomial(
                    count("seed", 0)? as u64,
                    count("degree", 5)?,
                )),
                "random-rational" => Ok(HolomorphicFunction::random_rational(
                    count("seed", 0)? as u64
                )),
                other => Err(Error::Parse(format!("unknown function family `{other}`"))),
            }
        }
    }
}
