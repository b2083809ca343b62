//! Convergence machinery on the truncated space: `T_n -> T`, `S_n -> S_inf`
//! with invertibility certificates, `z_n -> |xi><xi|`, decoupled limits of
//! balanced-word pairings, boundedness scans, decay checks, the centralizer
//! predicate and vacuum moments.
//!
//! Limits are never proved here. Each check compares finite-n values on
//! truncation-exact levels against a closed form and reports the gaps.

mod report;
mod scans;
mod sseq;
mod tseq;
mod xi;

pub use report::{fmt17, gaps_decrease, reports_to_csv, ConvergenceReport, ReportRow, Verdict, BOUND_SLACK};
pub use scans::{
    boundedness_scan, centralizer_word, comp_closed_form, comp_limit, creation_power_bound, lim_decay, moment_check,
    CompIndex, ScanKind,
};
pub use sseq::{
    invertibility_certificate, invertibility_threshold, s_infinity, s_infinity_expr, s_n_composed, s_n_normal,
    s_n_operator, s_tail_bound, InvertibilityCertificate, SInfinity, TruncatedMinSingular,
};
pub use tseq::{
    eigenvalue_on_power, t_bounds, t_eigenvalue, t_limit, t_limit_check, t_n_composed, t_n_normal, t_n_operator,
    t_spectrum, TSpectrum,
};
pub use xi::{
    balanced_word, fixed_point_residual, rank_one_diagnostics, rank_one_summary, wick_xi, xi_coefficients,
    xi_norm_sq, xi_vector, z_n_operator, FixedPoint, RankOneSummary, XiVector,
};
