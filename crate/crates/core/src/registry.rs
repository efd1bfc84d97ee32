//! String keys for model families, e.g. `clayton:2`, `weibull:0.5:1`,
//! `schur:pareto:2:1`, `mixexp:1,5:0.5,0.5`.

use crate::error::{Error, Result};
use crate::semicopula::{schur_constant_semicopula, Generator, SemiCopula};
use crate::univariate::{MixtureModel, SurvivalModel};

pub const COPULA_KEYS: &[&str] = &[
    "pi",
    "m",
    "w",
    "clayton:<theta>",
    "gumbel:<theta>",
    "frank:<theta>",
    "arch-gen:<log|cosine|sqrt-log>",
    "schur:<marginal-key>",
    "scaled:<c>:<copula-key>",
];

pub const MARGINAL_KEYS: &[&str] = &[
    "exp:<rate>",
    "weibull:<shape>:<scale>",
    "pareto:<shape>:<scale>",
    "mixexp:<rate,...>:<weight,...>",
    "geninv:<copula-key>",
];

pub const GENERATOR_NAMES: &[&str] = &["log", "cosine", "sqrt-log"];

fn unknown(key: &str, valid: &[&str]) -> Error {
    Error::UnknownFamily {
        key: key.to_string(),
        valid: valid.iter().map(|s| s.to_string()).collect(),
    }
}

fn number(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("`{key}`: cannot parse `{s}` as a number")))
}

fn numbers(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| number(key, p)).collect()
}

fn one_param<'a>(key: &str, rest: Option<&'a str>) -> Result<&'a str> {
    match rest {
        Some(r) if !r.contains(':') => Ok(r),
        _ => Err(Error::InvalidParameter(format!("`{key}` expects exactly one parameter"))),
    }
}

/// Generator of an Archimedean family key (`pi`, `clayton:θ`, `gumbel:θ`,
/// `frank:θ`, `arch-gen:<name>`, `schur:<marginal>`).
pub fn parse_generator(key: &str) -> Result<Generator> {
    let key = key.trim();
    let (head, rest) = match key.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (key, None),
    };
    match head {
        "pi" if rest.is_none() => Ok(Generator::independence()),
        "clayton" => Generator::clayton(number(key, one_param(key, rest)?)?),
        "gumbel" => Generator::gumbel(number(key, one_param(key, rest)?)?),
        "frank" => Generator::frank(number(key, one_param(key, rest)?)?),
        "arch-gen" => match rest {
            Some("log") => Ok(Generator::independence()),
            Some("cosine") => Ok(Generator::cosine()),
            Some("sqrt-log") => Ok(Generator::sqrt_log()),
            _ => Err(unknown(key, GENERATOR_NAMES)),
        },
        "schur" => {
            let m = parse_marginal(rest.unwrap_or(""))?;
            Ok(Generator::from_survival(&m))
        }
        _ => Err(unknown(key, COPULA_KEYS)),
    }
}

pub fn parse_copula(key: &str) -> Result<SemiCopula> {
    let key = key.trim();
    match key {
        "pi" => return Ok(SemiCopula::product()),
        "m" => return Ok(SemiCopula::upper()),
        "w" => return Ok(SemiCopula::lower()),
        _ => {}
    }
    if let Some(rest) = key.strip_prefix("scaled:") {
        let (c, inner) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("`{key}` expects scaled:<c>:<copula-key>")))?;
        let inner_c = parse_copula(inner)?;
        return Ok(SemiCopula::scaled(number(key, c)?, &inner_c));
    }
    if let Some(rest) = key.strip_prefix("schur:") {
        let m = parse_marginal(rest)?;
        return Ok(schur_constant_semicopula(&m)?.renamed(key));
    }
    let g = parse_generator(key)?;
    Ok(SemiCopula::archimedean(g)?.renamed(key))
}

pub fn parse_marginal(key: &str) -> Result<SurvivalModel> {
    let key = key.trim();
    let (head, rest) = match key.split_once(':') {
        Some((h, r)) => (h, r),
        None => return Err(unknown(key, MARGINAL_KEYS)),
    };
    match head {
        "exp" => SurvivalModel::exponential(number(key, one_param(key, Some(rest))?)?),
        "weibull" | "pareto" => {
            let ps: Vec<&str> = rest.split(':').collect();
            let (shape, scale) = match ps.as_slice() {
                [s] => (number(key, s)?, 1.0),
                [s, c] => (number(key, s)?, number(key, c)?),
                _ => return Err(Error::InvalidParameter(format!("`{key}` expects <shape>:<scale>"))),
            };
            if head == "weibull" {
                SurvivalModel::weibull(shape, scale)
            } else {
                SurvivalModel::pareto(shape, scale)
            }
        }
        "mixexp" => {
            let (rates, weights) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("`{key}` expects mixexp:<rates>:<weights>")))?;
            let mix = MixtureModel::exponentials(&numbers(key, rates)?, &numbers(key, weights)?)?;
            Ok(SurvivalModel::mixture(mix))
        }
        "geninv" => SurvivalModel::generator_inverse(parse_generator(rest)?),
        _ => Err(unknown(key, MARGINAL_KEYS)),
    }
}
