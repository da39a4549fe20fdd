//! Key-value config for `simulate` and the number parsers shared by the flags.
//!
//! ```text
//! # KPZ-type run
//! alpha = 1/2
//! n = 1
//! grid = 256
//! T = 0.1
//! eps_ladder = 1/8, 1/16, 1/32
//! h = cos
//! g = 1/4
//! counterterm_mode = catalog[2]
//! mc_samples = 16
//! ```

use std::collections::BTreeMap;

use flowforge_core::params::{default_iota, parse_rational, to_f64};
use flowforge_core::{Error, ModelParams, Result};
use flowforge_numerics::nonlinearity::{Func, NonlinearitySpec};
use flowforge_numerics::solver::{CountertermMode, InitialCondition, SimConfig};
use flowforge_numerics::GridSpec;

/// A rational "p/q", a decimal or an integer, or scientific notation.
pub fn parse_real(s: &str) -> Result<f64> {
    let v = match parse_rational(s) {
        Ok(r) => to_f64(&r),
        Err(_) => s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?,
    };
    if !v.is_finite() {
        return Err(Error::Domain(format!("{s:?} is not finite")));
    }
    Ok(v)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_real).collect()
}

pub fn model_params(alpha: &str, n: u32, iota: Option<&str>) -> Result<ModelParams> {
    let alpha = parse_rational(alpha)?;
    let iota = iota.map(parse_rational).transpose()?.unwrap_or_else(default_iota);
    ModelParams::with_iota(alpha, n, iota)
}

const KEYS: [&str; 17] = [
    "alpha",
    "n",
    "iota",
    "grid",
    "dt",
    "t",
    "eps_ladder",
    "seed",
    "mc_samples",
    "counterterm_mode",
    "counterterm_sign",
    "initial",
    "blowup",
    "b",
    "d",
    "g",
    "h",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value, got {raw:?}", i + 1)))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("config line {}: unknown key {:?}", i + 1, k.trim())));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("config line {}: duplicate key {key:?}", i + 1)));
        }
    }
    Ok(out)
}

fn integer<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match kv.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key} = {v:?} is not a nonnegative integer"))),
    }
}

/// Solver config and nonlinearity from config text. Required keys: alpha, eps_ladder.
pub fn parse_config(text: &str) -> Result<(SimConfig, NonlinearitySpec)> {
    let kv = parse_pairs(text)?;
    let need = |k: &str| kv.get(k).ok_or_else(|| Error::Parse(format!("config is missing {k}")));
    let n: u32 = integer(&kv, "n", 1)?;
    let params = model_params(need("alpha")?, n, kv.get("iota").map(String::as_str))?;
    let m: usize = integer(&kv, "grid", 256)?;
    let t = kv.get("t").map(|v| parse_real(v)).transpose()?.unwrap_or(0.1);
    // without dt, T is rounded to a whole number of parabolic steps
    let grid = match kv.get("dt") {
        Some(v) => GridSpec::new(n, m, 0.0, t, parse_real(v)?)?,
        None => GridSpec::parabolic(n, m, t)?,
    };
    let ladder = parse_list(need("eps_ladder")?)?;
    let mut cfg = SimConfig::new(params, grid, ladder, integer(&kv, "seed", 0)?);
    cfg.mc_samples = integer(&kv, "mc_samples", 1)?;
    if cfg.mc_samples == 0 {
        return Err(Error::Domain("mc_samples must be at least 1".into()));
    }
    if let Some(v) = kv.get("counterterm_mode") {
        cfg.counterterm = CountertermMode::parse(v)?;
    }
    if let Some(v) = kv.get("counterterm_sign") {
        cfg.counterterm_sign = parse_real(v)?;
        if cfg.counterterm_sign.abs() != 1.0 {
            return Err(Error::Domain(format!("counterterm_sign must be 1 or -1, got {v}")));
        }
    }
    if let Some(v) = kv.get("initial") {
        cfg.initial = InitialCondition::parse(v)?;
    }
    if let Some(v) = kv.get("blowup") {
        cfg.blowup = parse_real(v)?;
    }

    let mut nl = NonlinearitySpec::zero(n);
    if let Some(v) = kv.get("b") {
        nl.b = Func::parse(v)?;
    }
    if let Some(v) = kv.get("h") {
        nl.h = Func::parse(v)?;
    }
    if let Some(v) = kv.get("d") {
        let fs: Vec<Func> = v.split(';').map(Func::parse).collect::<Result<_>>()?;
        nl.d = match fs.len() {
            1 => vec![fs[0].clone(); n as usize],
            k if k == n as usize => fs,
            k => return Err(Error::Domain(format!("d lists {k} functions, expected 1 or {n}"))),
        };
    }
    if let Some(v) = kv.get("g") {
        nl = nl.with_isotropic_g(Func::parse(v)?);
    }
    cfg.validate(&nl)?;
    Ok((cfg, nl))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_accept_rationals_decimals_and_exponents() {
        assert_eq!(parse_real("1/8").unwrap(), 0.125);
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("1e-3").unwrap(), 1e-3);
        assert!(parse_real("x").is_err());
        assert_eq!(parse_list("1/8, 1/16").unwrap(), vec![0.125, 0.0625]);
    }

    #[test]
    fn module_doc_example_parses() {
        let text = include_str!("config.rs").split("```text").nth(1).unwrap().split("```").next().unwrap();
        let text: String = text.lines().map(|l| l.trim_start_matches("//!")).collect::<Vec<_>>().join("\n");
        let (cfg, nl) = parse_config(&text).unwrap();
        assert_eq!(cfg.eps_ladder, vec![0.125, 0.0625, 0.03125]);
        assert_eq!(cfg.counterterm, CountertermMode::Catalog(2));
        assert_eq!(cfg.grid.steps(), 26215);
        assert_eq!(nl.h, Func::Cos);
        assert_eq!(nl.g[0][0], Func::Const(0.25));
    }

    #[test]
    fn bad_configs_name_the_problem() {
        let err = |t: &str| parse_config(t).unwrap_err().to_string();
        assert!(err("alpha = 1/2").contains("eps_ladder"));
        assert!(err("alpha = 1/2\neps_ladder = 1/8\nfoo = 1").contains("unknown key"));
        assert!(err("alpha = 1/2\nalpha = 1/3").contains("duplicate"));
        assert!(err("alpha = 1/2\neps_ladder = 1/16, 1/8").contains("decreasing"));
        assert!(err("alpha = 1/2\neps_ladder = 1/8\ninitial = step[1]\ng = 1").contains("smooth"));
    }
}
