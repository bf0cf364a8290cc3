//! Summary statistics and log-log regression.

use serde::Serialize;

use crate::error::{Error, Result};

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    /// `sample_std / sqrt(count)`; zero when `count < 2`.
    pub se: f64,
    pub count: usize,
}

impl MeanSe {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let se = if xs.len() < 2 {
            0.0
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Some(Self {
            mean,
            se,
            count: xs.len(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares of `ln y` on `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a log-log fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "log-log fit needs positive data, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "log-log fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LogLogFit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::generate::rng_from_seed;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn mean_and_se_against_hand_values() {
        // mean 2.5, sample variance 5/3, se = sqrt(5/12)
        let m = MeanSe::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(m.count, 4);
        assert_eq!(MeanSe::of(&[7.0]).unwrap().se, 0.0);
        assert!(MeanSe::of(&[]).is_none());
    }

    #[test]
    fn mean_and_se_brute_force() {
        // pairwise form of the sample variance: Σ_{i<j} (xi-xj)² / (n(n-1))
        let xs = [0.3, 1.9, -0.4, 2.2, 0.05, 1.1];
        let n = xs.len() as f64;
        let mut pair = 0.0;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                pair += (xs[i] - xs[j]) * (xs[i] - xs[j]);
            }
        }
        let var = pair / (n * (n - 1.0));
        let m = MeanSe::of(&xs).unwrap();
        assert!((m.se - (var / n).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exact_power_laws() {
        let quad: Vec<_> = [128.0, 256.0, 512.0, 1024.0]
            .iter()
            .map(|&n| (n, n * n))
            .collect();
        let fit = fit_loglog_slope(&quad).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        let lin: Vec<_> = [1.0, 10.0, 100.0].iter().map(|&n| (n, 3.0 * n)).collect();
        let fit = fit_loglog_slope(&lin).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-9);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn noisy_quadratic() {
        let mut rng = rng_from_seed(5);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let pts: Vec<_> = (0..20)
            .map(|k| {
                let n = 64.0 * 2f64.powf(k as f64 / 4.0);
                (n, n * n * (1.0 + noise.sample(&mut rng)))
            })
            .collect();
        let fit = fit_loglog_slope(&pts).unwrap();
        assert!((1.9..=2.1).contains(&fit.slope), "slope {}", fit.slope);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 9.0)]).is_err());
        assert!(fit_loglog_slope(&[(-1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]).is_err());
        assert!(fit_loglog_slope(&[(2.0, 1.0), (2.0, 4.0), (2.0, 9.0)]).is_err());
    }
}
