use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qfock::fock::{FockSpace, ModelParams, SpaceLimits, MAX_DEPTH};
use qfock::qcomb::check_q;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Format, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Longest word expanded by the literal subset sum in Wick checks.
    pub wick: usize,
    /// Largest `n` for subset and crossing enumerations.
    pub enumeration: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { wick: 8, enumeration: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of the exact identities.
    pub identity: f64,
    /// Tolerance of exact eigenvalues and safe-level operator identities.
    pub exact: f64,
    /// Vacuum moments against pairing counts.
    pub moment: f64,
    /// Relative slack on analytic bounds.
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-10,
            exact: 1e-12,
            moment: 1e-8,
            bound_slack: 1e-10,
        }
    }
}

/// Everything a run needs. The file form is TOML; every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub q: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Truncation depth `N`.
    pub depth: usize,
    /// Series terms `K` for `S_inf` and `xi`; `N/2` when absent.
    pub terms: Option<usize>,
    /// Depths swept by `sweep`; `[depth]` when empty.
    pub sweep_depths: Vec<usize>,
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub format: Format,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

pub const DEFAULT_Q: [f64; 7] = [-0.8, -0.5, -0.3, 0.0, 0.3, 0.5, 0.8];
pub const DEFAULT_LAMBDA: [f64; 5] = [0.05, 0.15, 0.3, 0.5, 0.75];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: DEFAULT_Q.to_vec(),
            lambda: DEFAULT_LAMBDA.to_vec(),
            depth: 12,
            terms: None,
            sweep_depths: Vec::new(),
            caps: Caps::default(),
            tolerances: Tolerances::default(),
            out: PathBuf::from("qfock-out"),
            format: Format::Csv,
            jobs: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    pub fn terms_for(&self, depth: usize) -> usize {
        self.terms.unwrap_or(depth / 2)
    }

    pub fn depths(&self) -> Vec<usize> {
        if self.sweep_depths.is_empty() {
            vec![self.depth]
        } else {
            self.sweep_depths.clone()
        }
    }

    /// Grid points in run order: `q` outer, `lambda` inner.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.q
            .iter()
            .flat_map(|&q| self.lambda.iter().map(move |&l| (q, l)))
            .collect()
    }

    /// Rejects parameters outside the envelope and depths whose Gram blocks
    /// do not fit the budget, before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let limits = SpaceLimits::default();
        for &q in &self.q {
            check_q(q)?;
            if q.abs() > limits.q_envelope {
                return Err(CliError::Config(format!(
                    "q = {q} is outside the conditioning envelope |q| <= {}",
                    limits.q_envelope
                )));
            }
        }
        for &l in &self.lambda {
            if !(l > 0.0 && l < 1.0) {
                return Err(CliError::Config(format!("lambda = {l} is outside (0, 1)")));
            }
        }
        let mut depths = self.depths();
        depths.push(self.depth);
        for depth in depths {
            if !(2..=MAX_DEPTH).contains(&depth) {
                return Err(CliError::Config(format!("depth {depth} is outside 2..={MAX_DEPTH}")));
            }
            if 2 * self.terms_for(depth) > depth {
                return Err(CliError::Config(format!(
                    "{} series terms need depth >= {}, have {depth}",
                    self.terms_for(depth),
                    2 * self.terms_for(depth)
                )));
            }
            // building the basis checks the word and Gram budgets without
            // computing any Gram block
            for &(q, l) in self.grid().iter().take(1) {
                FockSpace::new(ModelParams::new(q, l, 0, depth)?)?;
            }
            if self.grid().is_empty() {
                FockSpace::new(ModelParams::new(0.0, 0.5, 0, depth)?)?;
            }
        }
        if self.caps.wick > 16 || self.caps.enumeration > 16 {
            return Err(CliError::Config("enumeration caps above 16 are not supported".into()));
        }
        Ok(())
    }
}

/// `"0.1, 0.2"` -> `[0.1, 0.2]`; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Config(format!("not a number: {t:?}"))))
        .collect()
}
