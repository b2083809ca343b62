//! `(q, lambda, N)` sweep: threshold, analytic verdict, smallest singular
//! value of the truncated `S_inf` and the rank-one diagnostics of `z_n*`.

use std::fmt::Write as _;
use std::time::Instant;

use qfock::fock::{FockSpace, ModelParams};
use qfock::limits::{fmt17, invertibility_certificate, rank_one_summary, s_infinity, z_n_operator};
use qfock::ops::{min_singular, FockOperator};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{with_pool, write_file, CliError, Format, RunConfig};

pub const SWEEP_SCHEMA: &str = "qfock-sweep/1";

/// Levels kept by the `z_n` compression; `n* = (N - WINDOW) / 2`.
pub const WINDOW: usize = 2;

const COLUMNS: &str =
    "q,lambda,depth,terms,threshold,analytic_verdict,min_singular,n_star,sigma2_over_sigma1,cosine,status";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub lambda: f64,
    pub depth: usize,
    pub terms: usize,
    pub threshold: Option<f64>,
    pub analytic_verdict: Option<bool>,
    pub min_singular: Option<f64>,
    pub n_star: usize,
    pub sigma2_over_sigma1: Option<f64>,
    pub cosine: Option<f64>,
    /// `ok`, or the error that stopped this point.
    pub status: String,
    /// Wall time; kept out of the data files.
    #[serde(skip)]
    pub runtime_ms: u128,
}

fn sweep_point(q: f64, lambda: f64, depth: usize, terms: usize) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        q,
        lambda,
        depth,
        terms,
        threshold: None,
        analytic_verdict: None,
        min_singular: None,
        n_star: depth.saturating_sub(WINDOW) / 2,
        sigma2_over_sigma1: None,
        cosine: None,
        status: "ok".into(),
        runtime_ms: 0,
    };
    let result = (|| -> qfock::Result<()> {
        let cert = invertibility_certificate(q, lambda, &[])?;
        row.threshold = Some(cert.threshold);
        row.analytic_verdict = Some(cert.analytic_verdict);
        let space = FockSpace::new(ModelParams::new(q, lambda, 0, depth)?)?;
        let s = s_infinity(&space, terms)?;
        row.min_singular = Some(min_singular(&space, &FockOperator::full(&space, &s.expr), depth)?);
        if row.n_star >= 1 {
            let z = z_n_operator(&space, row.n_star, WINDOW)?;
            let r = rank_one_summary(&space, &z, WINDOW)?;
            row.sigma2_over_sigma1 = Some(r.sigma2 / r.sigma1);
            row.cosine = Some(r.cosine);
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.status = e.to_string().replace([',', '\n'], ";");
    }
    row.runtime_ms = start.elapsed().as_millis();
    row
}

/// One row per `(q, lambda, N)` in grid order, whatever order the workers finish in.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    config.validate()?;
    let points: Vec<(f64, f64, usize)> = config
        .grid()
        .into_iter()
        .flat_map(|(q, l)| config.depths().into_iter().map(move |n| (q, l, n)))
        .collect();
    with_pool(config.jobs, || {
        points
            .par_iter()
            .map(|&(q, l, n)| sweep_point(q, l, n, config.terms_for(n)))
            .collect()
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("# {SWEEP_SCHEMA}\n{COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.q),
            fmt17(r.lambda),
            r.depth,
            r.terms,
            opt(r.threshold),
            r.analytic_verdict.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.min_singular),
            r.n_star,
            opt(r.sigma2_over_sigma1),
            opt(r.cosine),
            r.status
        );
    }
    out
}

#[derive(Serialize, Deserialize)]
struct SweepDoc {
    schema: String,
    rows: Vec<SweepRow>,
}

pub fn rows_to_json(rows: &[SweepRow]) -> String {
    let doc = SweepDoc {
        schema: SWEEP_SCHEMA.into(),
        rows: rows.to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("rows serialize") + "\n"
}

pub fn rows_from_json(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let doc: SweepDoc = serde_json::from_str(text).map_err(|e| CliError::Config(format!("sweep json: {e}")))?;
    Ok(doc.rows)
}

fn timing_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("q,lambda,depth,runtime_ms\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", fmt17(r.q), fmt17(r.lambda), r.depth, r.runtime_ms);
    }
    out
}

const PLOT_SCRIPT: &str = r#"# gnuplot script for sweep.csv; run from the output directory:
#   gnuplot -p sweep.gp
set datafile separator ','
set datafile commentschars '#'
set key outside
set xlabel 'q'
set ylabel 'lambda'
set title 'analytic verdict (1: certified invertible) over the grid'
set palette defined (0 'gray', 1 'blue')
plot 'sweep.csv' every ::1 using 1:2:(strcol(6) eq 'true' ? 1 : 0) with points pt 7 ps 2 palette notitle
pause -1
set logscale y
set xlabel 'lambda'
set ylabel 'min singular value of S_inf'
set title 'smallest singular value of the truncated S_inf'
plot for [n in system("awk -F, 'NR>2 {print $3}' sweep.csv | sort -un | tr '\n' ' '")] \
     'sweep.csv' every ::1 using ($3 == n+0 ? $2 : 1/0):7 with linespoints title sprintf('N = %s', n)
pause -1
unset logscale y
set ylabel 'sigma_2 / sigma_1 of z_n*'
set title 'rank-one diagnostic'
plot 'sweep.csv' every ::1 using 2:9 with points pt 7 title 'sigma_2/sigma_1'
"#;

/// Writes `sweep.{csv,json}`, the timing sidecar and the plot script into
/// the output directory. The data file is byte-identical across runs.
pub fn cmd_sweep(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let rows = run_sweep(config)?;
    let (name, data) = match config.format {
        Format::Csv => ("sweep.csv", rows_to_csv(&rows)),
        Format::Json => ("sweep.json", rows_to_json(&rows)),
    };
    write_file(&config.out.join(name), &data)?;
    write_file(&config.out.join("sweep_timing.csv"), &timing_csv(&rows))?;
    write_file(&config.out.join("sweep.gp"), PLOT_SCRIPT)?;
    Ok(rows)
}
