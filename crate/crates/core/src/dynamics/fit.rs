//! Exponential decay-time extraction from sampled traces.

use crate::{Error, Result};

/// Fit `value ~ A exp(-t/T)` and return `T` (same unit as `t`).
///
/// The baseline is the mean of the final 5% of samples; the fit window is
/// the first three estimated decay constants; the fit itself is least
/// squares on `ln(value - baseline)`. A non-decaying series is an error.
pub fn extract_decay_time(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 10 {
        return Err(Error::FitError("need at least 10 samples"));
    }
    let n = series.len();
    let tail = (n / 20).max(1);
    let baseline: f64 = series[n - tail..].iter().map(|&(_, v)| v).sum::<f64>() / tail as f64;

    let y0 = series[0].1 - baseline;
    if y0 <= 0.0 {
        return Err(Error::FitError("first sample does not sit above the baseline"));
    }

    // crude scale estimate: first crossing of y0/e
    let target = y0 / std::f64::consts::E;
    let mut t_est = series[n - 1].0 - series[0].0;
    for w in series.windows(2) {
        let (t1, v1) = (w[0].0, w[0].1 - baseline);
        let (t2, v2) = (w[1].0, w[1].1 - baseline);
        if v1 >= target && v2 < target {
            let frac = if (v1 - v2).abs() > 0.0 { (v1 - target) / (v1 - v2) } else { 0.0 };
            t_est = t1 + frac * (t2 - t1) - series[0].0;
            break;
        }
    }
    if t_est <= 0.0 {
        return Err(Error::FitError("series does not decay"));
    }

    let t_max = series[0].0 + 3.0 * t_est;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut m = 0usize;
    for &(t, v) in series {
        let y = v - baseline;
        if t > t_max || y <= 0.0 {
            continue;
        }
        let ly = y.ln();
        sx += t;
        sy += ly;
        sxx += t * t;
        sxy += t * ly;
        m += 1;
    }
    if m < 5 {
        return Err(Error::FitError("too few usable samples in the fit window"));
    }
    let mf = m as f64;
    let denom = mf * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::FitError("degenerate time grid"));
    }
    let slope = (mf * sxy - sx * sy) / denom;
    if slope >= 0.0 {
        return Err(Error::FitError("series does not decay"));
    }
    Ok(-1.0 / slope)
}
