use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Standard error of the sample variance, `sqrt((μ4 - s^4) / n)`.
pub fn variance_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mu = mean(xs);
    let m2 = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2) / n).sqrt()
}

/// Least-squares slope of `log(error)` against `log(m)`.
///
/// Points with a nonpositive error are dropped with a warning.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<f64> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(m, e)| {
            let ok = e > 0.0 && m > 0.0;
            if !ok {
                log::warn!("fit_rate: dropping point (m = {m}, error = {e})");
            }
            ok
        })
        .map(|&(m, e)| (m.ln(), e.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 positive points, have {}",
            kept.len()
        )));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all m values coincide".into()));
    }
    Ok(sxy / sxx)
}
