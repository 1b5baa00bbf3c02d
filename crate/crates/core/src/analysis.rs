//! Depletion-revival extremum location and the power-law fit of the
//! first-maximum time against the input photon number.

use crate::{Error, Result};

/// Default centered-moving-average window applied before extremum detection.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 11;

/// First depletion minimum and post-depletion maximum of a photon-number
/// series.
#[derive(Debug, Clone, Copy)]
pub struct ExtremumReport {
    /// Time of the first interior local minimum.
    pub gt_min: f64,
    /// Time of the first local maximum after `gt_min`, refined by a 3-point
    /// parabolic fit.
    pub gt_max: f64,
    /// Unsmoothed series value at the refined `gt_max`.
    pub n_at_max: f64,
    /// `n_at_max / series[0]`.
    pub ratio: f64,
}

/// Coefficient and exponent of `gt_max ≈ coefficient / n^exponent`, from an
/// ordinary least-squares fit in log-log space.
#[derive(Debug, Clone)]
pub struct PowerLawFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub coeff_stderr: f64,
    pub exp_stderr: f64,
    /// The `(n, gt_max)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
}

/// Locate the first depletion-revival cycle with the default smoothing
/// window.
pub fn find_gt_max(times: &[f64], series: &[f64]) -> Result<ExtremumReport> {
    find_gt_max_windowed(times, series, DEFAULT_SMOOTHING_WINDOW)
}

/// Fraction of the depletion depth an extremum candidate must clear; rejects
/// Monte Carlo noise bumps near the flat bottom of the dip.
pub const REVIVAL_MARGIN: f64 = 0.05;

/// Locate the first depletion-revival cycle.
///
/// The series is smoothed with a centered moving average of `window` points
/// (shrunk symmetrically near the edges). An extremum candidate must be the
/// strict extremum of its ±`window` neighborhood and must clear 5% of the
/// depletion depth (initial level minus global smoothed minimum); on Monte
/// Carlo input, 3-point extrema of the smoothed series are still noise. The
/// first qualifying minimum and the first qualifying maximum after it are
/// found, the maximum is refined with a 3-point parabolic fit, and the
/// reported `n_at_max` interpolates the *unsmoothed* series at the refined
/// time.
pub fn find_gt_max_windowed(
    times: &[f64],
    series: &[f64],
    window: usize,
) -> Result<ExtremumReport> {
    if times.len() != series.len() {
        return Err(Error::LengthMismatch { times: times.len(), series: series.len() });
    }
    let len = series.len();
    if window == 0 || window > len {
        return Err(Error::WindowTooLarge { window, len });
    }
    if len < 3 {
        return Err(Error::NoExtremum);
    }
    let dt = uniform_step(times)?;
    let smoothed = moving_average(series, window);

    let radius = window.min((len - 1) / 2);
    let depth = smoothed[0] - smoothed.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(depth > 0.0) {
        return Err(Error::NoExtremum);
    }
    let margin = REVIVAL_MARGIN * depth;
    let neighborhood_extremum = |i: usize, sign: f64| -> bool {
        let lo = i - radius;
        let hi = i + radius;
        (lo..=hi).all(|j| j == i || sign * smoothed[i] < sign * smoothed[j])
    };

    let minimum = (radius..len - radius)
        .find(|&i| neighborhood_extremum(i, 1.0) && smoothed[i] <= smoothed[0] - margin)
        .ok_or(Error::NoExtremum)?;
    let maximum = ((minimum + 1)..len - radius)
        .find(|&i| neighborhood_extremum(i, -1.0) && smoothed[i] >= smoothed[minimum] + margin)
        .ok_or(Error::NoExtremum)?;

    // parabola through the three smoothed points around the maximum;
    // the vertex offset is at most half a grid step from the discrete peak
    let offset = parabolic_vertex(
        smoothed[maximum - 1],
        smoothed[maximum],
        smoothed[maximum + 1],
    );
    let gt_max = times[maximum] + offset * dt;

    // evaluate the raw series at the refined location through the local
    // 3-point parabola of unsmoothed values
    let n_at_max = {
        let i = maximum.clamp(1, len - 2);
        let x = (gt_max - times[i]) / dt;
        let (a, b, c) = (series[i - 1], series[i], series[i + 1]);
        b + 0.5 * x * (c - a) + 0.5 * x * x * (c - 2.0 * b + a)
    };

    Ok(ExtremumReport {
        gt_min: times[minimum],
        gt_max,
        n_at_max,
        ratio: n_at_max / series[0],
    })
}

/// Conversion ratio relative to an externally known initial photon number.
pub fn conversion_ratio(report: &ExtremumReport, n_initial: f64) -> f64 {
    report.n_at_max / n_initial
}

/// Indices of strict interior local maxima with value above `min_height`.
pub fn local_maxima_above(series: &[f64], min_height: f64) -> Vec<usize> {
    (1..series.len().saturating_sub(1))
        .filter(|&i| {
            series[i] > series[i - 1] && series[i] > series[i + 1] && series[i] > min_height
        })
        .collect()
}

/// Ordinary least squares of `log(gt_max)` against `log(n)`:
/// `gt_max = coefficient · n^(−exponent)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let m = points.len();
    if m < 3 {
        return Err(Error::TooFewPoints(m));
    }
    if points.iter().any(|&(n, g)| !(n > 0.0) || !(g > 0.0)) {
        return Err(Error::NonPositivePoint);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mf = m as f64;
    let x_mean = xs.iter().sum::<f64>() / mf;
    let y_mean = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let variance = ssr / (mf - 2.0);
    let slope_stderr = (variance / sxx).sqrt();
    let intercept_stderr = (variance * (1.0 / mf + x_mean * x_mean / sxx)).sqrt();

    let coefficient = intercept.exp();
    Ok(PowerLawFit {
        coefficient,
        exponent: -slope,
        // delta method: d(e^a)/da = e^a
        coeff_stderr: coefficient * intercept_stderr,
        exp_stderr: slope_stderr,
        points: points.to_vec(),
    })
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::NoExtremum);
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::BadTimeGrid);
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::BadTimeGrid);
        }
    }
    Ok(dt)
}

// centered moving average with symmetric shrink at the edges
fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let len = series.len();
    (0..len)
        .map(|i| {
            let radius = half.min(i).min(len - 1 - i);
            let lo = i - radius;
            let hi = i + radius;
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

// vertex offset of the parabola through (-1, a), (0, b), (1, c), clamped to
// half a step either side
fn parabolic_vertex(a: f64, b: f64, c: f64) -> f64 {
    let denom = a - 2.0 * b + c;
    if denom.abs() < f64::EPSILON * (a.abs() + b.abs() + c.abs()) {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}
