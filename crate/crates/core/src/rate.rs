//! Log-log rate fitting, the theoretical excess-risk exponents and the
//! fast/super-fast regime classification.

use alloc::vec::Vec;

use libm::log;

use crate::{Error, Result};

/// Ordinary least squares of `log y` on `log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// In `[0, 1]`; exactly 1 when every response is equal.
    pub r_squared: f64,
    /// Indices of the input points that entered the fit.
    pub used: Vec<usize>,
    /// Indices dropped for a non-positive response.
    pub dropped: Vec<usize>,
}

/// Fits `log ys = intercept + slope log xs`. All values must be positive
/// and there must be at least two distinct `xs`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> LogLogFit {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|&v| log(v)).collect();
    let ly: Vec<f64> = ys.iter().map(|&v| log(v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy <= 0.0 {
        1.0
    } else {
        let sse: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| {
                let e = y - intercept - slope * x;
                e * e
            })
            .sum();
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    LogLogFit {
        slope,
        intercept,
        r_squared,
        used: (0..xs.len()).collect(),
        dropped: Vec::new(),
    }
}

/// Rate fit of risks against sample sizes. Points with a non-positive (or
/// non-finite) risk are dropped with a warning.
pub fn fit_rate(ns: &[usize], risks: &[f64]) -> Result<LogLogFit> {
    if ns.len() != risks.len() {
        return Err(Error::DimensionMismatch {
            expected: ns.len(),
            found: risks.len(),
        });
    }
    if ns.iter().any(|&n| n == 0) {
        return Err(Error::param("ns", "sample sizes must be positive"));
    }
    let (used, dropped): (Vec<usize>, Vec<usize>) =
        (0..ns.len()).partition(|&i| risks[i] > 0.0 && risks[i].is_finite());
    for &i in &dropped {
        log::warn!("dropping rate point n = {} with risk {}", ns[i], risks[i]);
    }
    if used.len() < 3 {
        return Err(Error::TooFewPoints(used.len()));
    }
    let xs: Vec<f64> = used.iter().map(|&i| ns[i] as f64).collect();
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::param("ns", "need at least two distinct sample sizes"));
    }
    let ys: Vec<f64> = used.iter().map(|&i| risks[i]).collect();
    let mut fit = fit_loglog(&xs, &ys);
    fit.used = used;
    fit.dropped = dropped;
    Ok(fit)
}

/// Which sample-size axis an exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentAxis {
    MixingEffectiveN,
    MixingRawN,
    DriftOrIid,
}

/// Excess-risk decay exponent `beta (1 + alpha) / (2 beta + d)`; on the raw
/// `n` axis of a mixing sequence it is scaled by `C3 / (C3 + 1)`.
pub fn theoretical_exponent(alpha: f64, beta: f64, d: usize, axis: ExponentAxis, c3: f64) -> f64 {
    let base = beta * (1.0 + alpha) / (2.0 * beta + d as f64);
    match axis {
        ExponentAxis::MixingRawN if c3.is_infinite() => base,
        ExponentAxis::MixingRawN => base * c3 / (c3 + 1.0),
        _ => base,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    Mixing,
    DriftOrIid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateRegime {
    NotFast,
    Fast,
    SuperFast,
}

impl RateRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateRegime::NotFast => "not_fast",
            RateRegime::Fast => "fast",
            RateRegime::SuperFast => "super_fast",
        }
    }
}

impl core::fmt::Display for RateRegime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the guaranteed rate beats `n^(-1/2)` (fast) or `n^(-1)`
/// (super fast). `c3 = f64::INFINITY` is the iid limit.
pub fn classify_regime(alpha: f64, beta: f64, d: usize, setting: Setting, c3: f64) -> RateRegime {
    let d = d as f64;
    let (super_fast, fast) = match setting {
        Setting::DriftOrIid => ((alpha - 1.0) * beta > d, alpha * beta > d / 2.0),
        Setting::Mixing => {
            let inv = 1.0 / c3;
            (
                (alpha - 1.0 - 2.0 * inv) * beta > d * (1.0 + inv),
                2.0 * (alpha - inv) * beta > (1.0 + inv) * d,
            )
        }
    };
    if super_fast {
        RateRegime::SuperFast
    } else if fast {
        RateRegime::Fast
    } else {
        RateRegime::NotFast
    }
}

/// Sample-size axis of a rate fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    RawN,
    EffectiveN,
}

impl XAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            XAxis::RawN => "raw_n",
            XAxis::EffectiveN => "effective_n",
        }
    }
}

/// A fitted rate next to the exponent it is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFitResult {
    /// The regression axis values (`n` or `n_e`).
    pub ns: Vec<usize>,
    pub x_axis: XAxis,
    pub mean_risks: Vec<f64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub theoretical_exponent: f64,
    pub regime: RateRegime,
    /// Slope against raw `n`, reported alongside an `n_e` fit.
    pub raw_n_slope: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<usize> {
        (8..=13).map(|k| 1usize << k).collect()
    }

    #[test]
    fn exact_power_law() {
        let ns = grid();
        let risks: Vec<f64> = ns.iter().map(|&n| 3.0 * libm::pow(n as f64, -0.8)).collect();
        let fit = fit_rate(&ns, &risks).unwrap();
        assert!((fit.slope + 0.8).abs() < 1e-12);
        assert!((fit.intercept - log(3.0)).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_risks() {
        let fit = fit_rate(&grid(), &[0.1; 6]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ns = grid();
        let risks: Vec<f64> = ns
            .iter()
            .map(|&n| libm::pow(n as f64, -0.8) * (1.0 + 0.05 * (2.0 * rng.random::<f64>() - 1.0)))
            .collect();
        let fit = fit_rate(&ns, &risks).unwrap();
        assert!((fit.slope + 0.8).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn drops_non_positive() {
        let ns = grid();
        let mut risks: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        risks[1] = 0.0;
        risks[4] = -1e-4;
        let fit = fit_rate(&ns, &risks).unwrap();
        assert_eq!(fit.dropped, vec![1, 4]);
        assert!((fit.slope + 1.0).abs() < 1e-12);
        risks[0] = 0.0;
        risks[2] = 0.0;
        assert_eq!(fit_rate(&ns, &risks), Err(Error::TooFewPoints(2)));
        assert_eq!(fit_rate(&[1024], &[0.1]), Err(Error::TooFewPoints(1)));
    }

    #[test]
    fn exponents() {
        let e = theoretical_exponent(1.0, 2.0, 1, ExponentAxis::DriftOrIid, f64::INFINITY);
        assert!((e - 0.8).abs() < 1e-15);
        let e = theoretical_exponent(1.0, 2.0, 1, ExponentAxis::MixingRawN, 1.0);
        assert!((e - 0.4).abs() < 1e-15);
        let e = theoretical_exponent(0.0, 3.0, 2, ExponentAxis::DriftOrIid, f64::INFINITY);
        assert!((e - 3.0 / 8.0).abs() < 1e-15);
        let e = theoretical_exponent(1.0, 2.0, 1, ExponentAxis::MixingRawN, f64::INFINITY);
        assert!((e - 0.8).abs() < 1e-15);
    }

    #[test]
    fn regime_examples() {
        use RateRegime::*;
        use Setting::*;
        assert_eq!(classify_regime(2.0, 2.0, 1, DriftOrIid, f64::INFINITY), SuperFast);
        assert_eq!(classify_regime(1.0, 2.0, 1, DriftOrIid, f64::INFINITY), Fast);
        assert_eq!(classify_regime(1.0, 1.0, 2, Mixing, 1.0), NotFast);
    }
}
