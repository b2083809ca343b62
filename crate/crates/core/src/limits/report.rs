use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::fock::FockSpace;

/// One finite-n value of a sequence against its claimed limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub value: f64,
    pub limit: f64,
    /// `|value - limit|`.
    pub gap: f64,
    /// Analytic upper bound for `value`, when the sequence is a bound check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Further named scalars (singular value ratios, cosines, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
}

impl ReportRow {
    pub fn new(n: usize, value: f64, limit: f64) -> ReportRow {
        ReportRow {
            n,
            value,
            limit,
            gap: (value - limit).abs(),
            bound: None,
            summary: BTreeMap::new(),
        }
    }

    pub fn with_bound(mut self, bound: f64) -> ReportRow {
        self.bound = Some(bound);
        self
    }

    pub fn with(mut self, key: &str, x: f64) -> ReportRow {
        self.summary.insert(key.to_string(), x);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Gaps never increase from one row to the next.
    pub monotone: bool,
    pub final_gap: f64,
    /// Every row with a bound has `value <= bound` (relative slack 1e-10).
    pub within_bounds: bool,
}

/// Finite-truncation evidence for one limit statement at one `(q, lambda, N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub q: f64,
    pub lambda: f64,
    pub depth: usize,
    pub limit_claim: String,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
}

/// Relative slack allowed by [`Verdict::within_bounds`] and [`gaps_decrease`].
pub const BOUND_SLACK: f64 = 1e-10;

/// Whether the gaps of `rows` are non-increasing, up to rounding.
pub fn gaps_decrease(rows: &[ReportRow]) -> bool {
    rows.windows(2)
        .all(|w| w[1].gap <= w[0].gap * (1.0 + BOUND_SLACK) + 1e-15)
}

impl ConvergenceReport {
    pub fn new(space: &FockSpace, name: &str, limit_claim: impl Into<String>, rows: Vec<ReportRow>) -> Self {
        let verdict = Verdict {
            monotone: gaps_decrease(&rows),
            final_gap: rows.last().map_or(0.0, |r| r.gap),
            within_bounds: rows
                .iter()
                .all(|r| r.bound.is_none_or(|b| r.value <= b * (1.0 + BOUND_SLACK) + 1e-15)),
        };
        ConvergenceReport {
            name: name.to_string(),
            q: space.q(),
            lambda: space.lambda(),
            depth: space.depth(),
            limit_claim: limit_claim.into(),
            rows,
            verdict,
        }
    }

    /// Monotonicity of the gaps restricted to rows with `n >= from`.
    pub fn monotone_from(&self, from: usize) -> bool {
        let start = self.rows.iter().position(|r| r.n >= from).unwrap_or(self.rows.len());
        gaps_decrease(&self.rows[start..])
    }

    pub fn row(&self, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_csv(&self) -> String {
        reports_to_csv(std::slice::from_ref(self))
    }
}

/// `x` with 17 significant digits, the shortest width that round-trips
/// every binary64.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Flat CSV, one row per `(report, q, lambda, N, n)`. Summary keys of all
/// reports become extra columns in sorted order, empty where absent.
pub fn reports_to_csv(reports: &[ConvergenceReport]) -> String {
    let keys: BTreeSet<&str> = reports
        .iter()
        .flat_map(|r| r.rows.iter().flat_map(|row| row.summary.keys().map(String::as_str)))
        .collect();
    let mut out = String::from("report,q,lambda,depth,n,value,limit,gap,bound");
    for k in &keys {
        let _ = write!(out, ",{k}");
    }
    out.push('\n');
    for r in reports {
        for row in &r.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.name,
                fmt17(r.q),
                fmt17(r.lambda),
                r.depth,
                row.n,
                fmt17(row.value),
                fmt17(row.limit),
                fmt17(row.gap),
                row.bound.map(fmt17).unwrap_or_default()
            );
            for k in &keys {
                out.push(',');
                if let Some(&x) = row.summary.get(*k) {
                    out.push_str(&fmt17(x));
                }
            }
            out.push('\n');
        }
    }
    out
}
