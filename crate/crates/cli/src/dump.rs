//! `dump gram LEVEL`, `dump operator NAME [ARG]`, `dump xi K`.

use std::str::FromStr;

use qfock::fock::{FockSpace, Letter, ModelParams, VectorDoc, Word};
use qfock::limits::{s_infinity, s_n_composed, t_limit, t_n_composed, xi_vector, z_n_operator};
use qfock::ops::{
    c, c_star, delta_power, flip, wen_operator, wick, wick_right, FockMap, FockOperator, OpExpr, OperatorDoc,
};
use qfock::Error;
use serde::Serialize;

use crate::{write_file, CliError, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpObject {
    Gram,
    Operator,
    Xi,
}

impl FromStr for DumpObject {
    type Err = CliError;

    fn from_str(s: &str) -> Result<DumpObject, CliError> {
        match s {
            "gram" => Ok(DumpObject::Gram),
            "operator" => Ok(DumpObject::Operator),
            "xi" => Ok(DumpObject::Xi),
            _ => Err(Error::UnknownSelector(format!("dump object {s:?}; expected gram, operator or xi")).into()),
        }
    }
}

fn unknown(what: String) -> CliError {
    Error::UnknownSelector(what).into()
}

fn number(selector: &[String], i: usize, what: &str) -> Result<usize, CliError> {
    let s = selector.get(i).ok_or_else(|| unknown(format!("{what} needs an integer argument")))?;
    s.parse().map_err(|_| unknown(format!("{what}: {s:?} is not a nonnegative integer")))
}

fn word(selector: &[String], i: usize, what: &str) -> Result<Word, CliError> {
    let s = selector.get(i).ok_or_else(|| unknown(format!("{what} needs a word argument")))?;
    Ok(s.parse::<Word>()?)
}

fn letter(selector: &[String], i: usize, what: &str) -> Result<Letter, CliError> {
    let w = word(selector, i, what)?;
    if w.len() != 1 {
        return Err(unknown(format!("{what} needs a single letter, got {w}")));
    }
    Ok(w.get(0))
}

/// Operators by name. Expressions are materialized on their safe levels.
pub const OPERATORS: &str =
    "wen N | wick WORD | wick_right WORD | t N | t_limit | s N | s_inf K | creation LETTER | annihilation LETTER | z N | flip | delta";

#[derive(Serialize)]
struct OperatorDump {
    q: f64,
    lambda: f64,
    depth: usize,
    selector: String,
    /// Levels `<= safe_level` are exact; above it components left the truncation.
    safe_level: usize,
    operator: OperatorDoc,
}

fn operator(space: &FockSpace, selector: &[String]) -> Result<FockOperator, CliError> {
    let (q, lambda, depth) = (space.q(), space.lambda(), space.depth());
    let name = selector.first().map(String::as_str).unwrap_or("");
    let expr: OpExpr = match name {
        "wen" => wen_operator(number(selector, 1, "wen")?, q)?,
        "wick" => wick(word(selector, 1, "wick")?, q, 8)?,
        "wick_right" => wick_right(word(selector, 1, "wick_right")?, q, lambda, 8)?,
        "t" => t_n_composed(q, lambda, number(selector, 1, "t")?),
        "t_limit" => t_limit(q, lambda, depth)?,
        "s" => s_n_composed(q, lambda, number(selector, 1, "s")?)?,
        "s_inf" => s_infinity(space, number(selector, 1, "s_inf")?)?.expr,
        "creation" => c(letter(selector, 1, "creation")?),
        "annihilation" => c_star(letter(selector, 1, "annihilation")?),
        "z" => {
            // compressed to every level it can resolve
            let n = number(selector, 1, "z")?;
            let window = depth
                .checked_sub(2 * n)
                .ok_or_else(|| Error::Truncation(format!("z_{n} needs depth {}", 2 * n)))?;
            return Ok(z_n_operator(space, n, window)?);
        }
        "flip" => return Ok(flip(space)),
        "delta" => return Ok(delta_power(space, 1.0)),
        _ => return Err(unknown(format!("operator {name:?}; expected one of {OPERATORS}"))),
    };
    let level = depth
        .checked_sub(expr.peak())
        .ok_or_else(|| Error::Truncation(format!("{} climbs above depth {depth}", expr.label())))?;
    Ok(FockOperator::materialize(space, &expr, level))
}

#[derive(Serialize)]
struct XiDump {
    q: f64,
    lambda: f64,
    terms: usize,
    norm_sq: f64,
    norm_sq_closed_form: f64,
    norm_sq_full: f64,
    tail_bound: f64,
    vector: VectorDoc,
}

/// Writes the object as JSON into the output directory and returns the
/// path. Uses the first `(q, lambda)` of the grid at the configured depth.
pub fn cmd_dump(
    config: &RunConfig,
    object: DumpObject,
    selector: &[String],
    format: Format,
) -> Result<std::path::PathBuf, CliError> {
    if format != Format::Json {
        return Err(CliError::Config("dump writes json only".into()));
    }
    config.validate()?;
    let (q, lambda) = *config
        .grid()
        .first()
        .ok_or_else(|| CliError::Config("dump needs one q and one lambda".into()))?;
    let space = FockSpace::new(ModelParams::new(q, lambda, 0, config.depth)?)?;
    let (name, text) = match object {
        DumpObject::Gram => {
            let level = number(selector, 0, "gram")?;
            let doc = space.gram_doc(level)?;
            (format!("gram_level{level}.json"), serde_json::to_string_pretty(&doc))
        }
        DumpObject::Operator => {
            let op = operator(&space, selector)?;
            let doc = OperatorDump {
                q,
                lambda,
                depth: config.depth,
                selector: selector.join(" "),
                safe_level: op.safe_level(&space),
                operator: op.to_doc(&space),
            };
            (format!("operator_{}.json", selector.join("_")), serde_json::to_string_pretty(&doc))
        }
        DumpObject::Xi => {
            let terms = match selector.first() {
                Some(_) => number(selector, 0, "xi")?,
                None => config.terms_for(config.depth),
            };
            let xi = xi_vector(&space, terms)?;
            let doc = XiDump {
                q,
                lambda,
                terms,
                norm_sq: xi.norm_sq,
                norm_sq_closed_form: xi.norm_sq_closed_form,
                norm_sq_full: xi.norm_sq_full,
                tail_bound: xi.tail_bound,
                vector: xi.vector.to_doc(space.basis()),
            };
            (format!("xi_{terms}.json"), serde_json::to_string_pretty(&doc))
        }
    };
    let path = config.out.join(name);
    write_file(&path, &(text.expect("dump serializes") + "\n"))?;
    Ok(path)
}
