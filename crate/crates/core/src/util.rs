use crate::error::{Error, Result};

/// `n` points spaced evenly in log space from `start` to `end`, both
/// positive, endpoints exact.
pub fn geomspace(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite()) || start <= 0.0 || end <= 0.0 {
        return Err(Error::invalid(
            "geomspace",
            format!("endpoints must be positive and finite, got [{start}, {end}]"),
        ));
    }
    if end <= start {
        return Err(Error::invalid(
            "geomspace",
            format!("end must exceed start, got [{start}, {end}]"),
        ));
    }
    if n < 2 {
        return Err(Error::invalid("geomspace", format!("need at least 2 points, got {n}")));
    }
    let (la, lb) = (start.ln(), end.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    out[0] = start;
    out[n - 1] = end;
    Ok(out)
}

/// `n` points 10^x for x evenly spaced from `log10_start` to `log10_end`.
pub fn logspace(log10_start: f64, log10_end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("logspace", format!("need at least 2 points, got {n}")));
    }
    if !(log10_start.is_finite() && log10_end.is_finite()) || log10_end <= log10_start {
        return Err(Error::invalid(
            "logspace",
            format!("need finite increasing exponents, got [{log10_start}, {log10_end}]"),
        ));
    }
    Ok((0..n)
        .map(|i| {
            let t = log10_start + (log10_end - log10_start) * i as f64 / (n - 1) as f64;
            10f64.powf(t)
        })
        .collect())
}

/// Mean and unbiased standard deviation; sd is 0 for fewer than two values.
pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt())
}
