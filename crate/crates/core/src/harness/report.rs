//! CSV writers. Floats carry 17 significant digits so files round-trip.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::harness::suites::{ConvergenceReport, TransportReport};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `m` is integral for the polygonal family; keep it readable when it is.
fn m_field(m: f64) -> String {
    if m.fract() == 0.0 && m.abs() < 1e15 {
        format!("{}", m as i64)
    } else {
        num(m)
    }
}

/// `out.csv` -> `out.<tag>.csv`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

pub fn convergence_rows_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from("m,path_index,sup_error,terminal_error,runtime_ms\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            m_field(r.m),
            r.path_index,
            num(r.sup_error),
            num(r.terminal_error),
            r.runtime_ms
        );
    }
    let _ = writeln!(
        s,
        "# master_seed={} stream_index=path_index",
        report.master_seed
    );
    s
}

pub fn convergence_summary_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from("m,median_sup_error,mean_sup_error\n");
    for r in &report.summary {
        let _ = writeln!(
            s,
            "{},{},{}",
            m_field(r.m),
            num(r.median_sup_error),
            num(r.mean_sup_error)
        );
    }
    match report.fitted_rate {
        Some(rate) => {
            let _ = writeln!(s, "# fitted_rate={}", num(rate));
        }
        None => s.push_str("# fitted_rate=nan\n"),
    }
    s
}

/// Writes the rows file to `path` and the summary next to it.
pub fn write_convergence(report: &ConvergenceReport, path: &Path) -> Result<PathBuf> {
    std::fs::write(path, convergence_rows_csv(report))?;
    let summary = sibling(path, "summary");
    std::fs::write(&summary, convergence_summary_csv(report))?;
    Ok(summary)
}

pub fn transport_variance_csv(report: &TransportReport) -> String {
    let mut s = String::from("m,t,empirical_variance,analytic_variance,standard_error,z\n");
    for c in &report.variance_checks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            m_field(c.m),
            num(c.t),
            num(c.empirical),
            num(c.analytic),
            num(c.standard_error),
            num(c.z)
        );
    }
    let _ = writeln!(
        s,
        "# master_seed={} paths={}",
        report.master_seed, report.num_paths
    );
    s
}

pub fn transport_moments_csv(report: &TransportReport) -> String {
    let mut s = String::from(
        "m,mean,target_mean,mean_distance,variance,target_variance,variance_distance\n",
    );
    for c in &report.moment_checks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            m_field(c.m),
            num(c.mean),
            num(c.target_mean),
            num(c.mean_distance),
            num(c.variance),
            num(c.target_variance),
            num(c.variance_distance)
        );
    }
    s
}

pub fn write_transport(report: &TransportReport, path: &Path) -> Result<PathBuf> {
    std::fs::write(path, transport_variance_csv(report))?;
    let moments = sibling(path, "moments");
    std::fs::write(&moments, transport_moments_csv(report))?;
    Ok(moments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        let x = 0.1f64 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling(Path::new("/tmp/a.csv"), "summary"),
            Path::new("/tmp/a.summary.csv")
        );
    }
}
