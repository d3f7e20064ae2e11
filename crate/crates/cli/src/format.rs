//! Deterministic text output: `%.12g`-style floats and CSV tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use obsassign::sim::{EvenRow, RatioTable, RunLog};
use obsassign::tracking::{cov_trace, mean_error};
use obsassign::Score;

use crate::error::{CliError, CliResult};

const SIG_DIGITS: usize = 12;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 ≤ |x| < 1e12`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_score(s: Score) -> String {
    fmt_g(s.to_f64())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

pub const TRACK_HEADER: &str =
    "step,target,true_x,true_y,est_x,est_y,cov_trace,mean_err,assigned_sensors,measure_value";

pub fn track_csv(log: &RunLog) -> String {
    let mut out = String::from(TRACK_HEADER);
    out.push('\n');
    for r in &log.records {
        let assigned: Vec<String> = r.assigned.iter().map(|s| s.0.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.target.0,
            fmt_g(r.truth.x),
            fmt_g(r.truth.y),
            fmt_g(r.estimate.mean.x),
            fmt_g(r.estimate.mean.y),
            fmt_g(cov_trace(&r.estimate)),
            fmt_g(mean_error(&r.estimate, r.truth)),
            assigned.join(";"),
            fmt_score(r.measure_value),
        )
        .expect("writing to a String");
    }
    out
}

pub fn objective_csv(log: &RunLog) -> String {
    let mut out = String::from("step,objective\n");
    for (k, o) in log.objectives.iter().enumerate() {
        writeln!(out, "{},{}", k + 1, fmt_score(*o)).expect("writing to a String");
    }
    out
}

pub fn even_csv(rows: &[EvenRow]) -> String {
    let mut out = String::from(
        "n_sensors,n_targets,trials,reference,mean_count,max_target_deviation,max_trial_deviation,per_target_mean\n",
    );
    for r in rows {
        let per: Vec<String> = r.per_target_mean.iter().map(|v| fmt_g(*v)).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n_sensors,
            r.n_targets,
            r.trials,
            fmt_g(r.reference),
            fmt_g(r.mean_count),
            fmt_g(r.max_target_deviation),
            fmt_g(r.max_trial_deviation),
            per.join(";"),
        )
        .expect("writing to a String");
    }
    out
}

/// Per-trial rows; `opt` and its ratio are empty where brute force was capped.
pub fn ratio_csv(table: &RatioTable) -> String {
    let mut out = String::from("L,N,trial,greedy,opt,mwpbm,greedy_over_opt,greedy_over_mwpbm\n");
    for t in &table.trials {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.n_targets,
            t.n_sensors,
            t.trial,
            fmt_score(t.greedy),
            t.opt.map(fmt_score).unwrap_or_default(),
            fmt_score(t.mwpbm),
            fmt_opt(t.greedy_over_opt()),
            fmt_opt(t.greedy_over_mwpbm()),
        )
        .expect("writing to a String");
    }
    out
}

pub fn ratio_summary_csv(table: &RatioTable) -> String {
    let mut out = String::from("L,N,trials,mean_greedy,mean_opt,mean_mwpbm,mean_ratio_opt,mean_ratio_mwpbm\n");
    for s in &table.summary {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.n_targets,
            s.n_sensors,
            s.trials,
            fmt_g(s.mean_greedy),
            fmt_opt(s.mean_opt),
            fmt_g(s.mean_mwpbm),
            fmt_opt(s.mean_ratio_opt),
            fmt_g(s.mean_ratio_mwpbm),
        )
        .expect("writing to a String");
    }
    out
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_printf() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(0.1), "0.1");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(2.0 / 3.0 * 1e5), "66666.6666667");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001234), "1.234e-05");
        assert_eq!(fmt_g(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_g(9.9999999999999e-5), "0.0001");
    }
}
