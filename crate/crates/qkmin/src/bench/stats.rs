//! Aggregation helpers: log-log slope fits, percentiles, seed splitting.

use crate::error::{Error, Result};

/// Ordinary least squares fit of log(y) against log(x).
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Fits the scaling exponent of a positive series: the OLS slope of
/// (log x, log y). Needs at least four strictly positive points.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 4 {
        return Err(Error::InvalidConfig(format!(
            "slope fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some((x, y)) = points.iter().find(|&&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "slope fit needs positive values, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig(
            "slope fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_resid: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let stderr = if logs.len() > 2 {
        (ss_resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
    })
}

/// Nearest-rank percentile of a sorted slice: the smallest element at or
/// above fraction `q` of the mass.
pub fn percentile_sorted(sorted: &[u64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1] as f64
}

/// Splits a master seed into a per-trial seed via FNV-1a over the master
/// seed, a stable cell identifier, and the trial index, finished with a
/// SplitMix64 scramble. Stable across platforms and rust versions, so sweep
/// outputs are reproducible byte for byte.
pub fn trial_seed(master: u64, cell_id: &str, trial: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for chunk in [
        &master.to_le_bytes()[..],
        cell_id.as_bytes(),
        &trial.to_le_bytes()[..],
    ] {
        for &b in chunk {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    splitmix64(h)
}

/// Derives an independent stream from a seed and a domain-separation tag.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    trial_seed(seed, tag, 0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
