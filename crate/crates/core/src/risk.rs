//! Monte Carlo excess-risk and deviation-probability estimators.
//!
//! Excess risk is estimated primarily through the pointwise identity
//! `R(f) - R(f*) = E[eta_{f*}(X) - eta_f(X)]`, which uses the analytic
//! `eta` and so carries no label noise. The empirical 0/1 difference on
//! paired test labels is kept as a cross-check.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::datagen::{SyntheticDistribution, TrainingRegime};
use crate::kernels::gaussian_kernel;
use crate::ova::{effective_sample_size, theory_bandwidth, Classifier, PlugInModel, DEFAULT_GUARD};
use crate::rng::{categorical, stream, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    /// Mean of `eta_{f*}(X) - eta_{f}(X)`; never negative.
    pub oracle_excess: f64,
    /// Test error of the classifier minus test error of the Bayes rule.
    pub zero_one_excess: f64,
    pub n_test: usize,
    /// Monte Carlo standard error of `oracle_excess`.
    pub std_error: f64,
    /// Monte Carlo standard error of `zero_one_excess`.
    pub zero_one_std_error: f64,
}

/// The Bayes rule of a distribution as a [`Classifier`].
#[derive(Debug, Clone, Copy)]
pub struct BayesClassifier<'a> {
    pub dist: &'a SyntheticDistribution,
}

impl Classifier for BayesClassifier<'_> {
    fn dim(&self) -> usize {
        self.dist.dim()
    }

    fn classes(&self) -> usize {
        self.dist.classes()
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        self.dist.bayes_predict(x)
    }
}

/// Always predicts the same class.
#[derive(Debug, Clone, Copy)]
pub struct ConstantClassifier {
    pub dim: usize,
    pub classes: usize,
    pub class: usize,
}

impl Classifier for ConstantClassifier {
    fn dim(&self) -> usize {
        self.dim
    }

    fn classes(&self) -> usize {
        self.classes
    }

    fn predict(&self, _x: &[f64]) -> Result<usize> {
        Ok(self.class)
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, sqrt(var / n))
}

/// Excess risk of `model` on `n_test` fresh draws from `dist`.
pub fn excess_risk_oracle<C: Classifier + ?Sized>(
    model: &C,
    dist: &SyntheticDistribution,
    n_test: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if n_test == 0 {
        return Err(Error::param("n_test", "must be positive"));
    }
    if model.dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            found: model.dim(),
        });
    }
    if model.classes() != dist.classes() {
        return Err(Error::DimensionMismatch {
            expected: dist.classes(),
            found: model.classes(),
        });
    }
    let mut x_rng = stream(seed, Stream::TestObservations);
    let mut y_rng = stream(seed, Stream::TestLabels);
    let mut x = vec![0.0; dist.dim()];
    let mut oracle = Vec::with_capacity(n_test);
    let mut zero_one = Vec::with_capacity(n_test);
    for _ in 0..n_test {
        dist.draw_observation(&mut x_rng, &mut x);
        let eta = dist.eta_vector(&x)?;
        let y = categorical(&mut y_rng, &eta);
        let best = dist.bayes_predict(&x)?;
        let guess = model.predict(&x)?;
        oracle.push((eta[best - 1] - eta[guess - 1]).max(0.0));
        zero_one.push((guess != y) as u8 as f64 - (best != y) as u8 as f64);
    }
    let (oracle_excess, std_error) = mean_and_se(&oracle);
    let (zero_one_excess, zero_one_std_error) = mean_and_se(&zero_one);
    Ok(RiskEstimate {
        oracle_excess,
        zero_one_excess,
        n_test,
        std_error,
        zero_one_std_error,
    })
}

/// Bandwidth-rule inputs and the fitted model for one training draw.
fn train(dist: &SyntheticDistribution, regime: &TrainingRegime, n: usize, seed: u64) -> Result<(PlugInModel, usize)> {
    let d = dist.dim();
    let mixing = regime.mixing_spec();
    let n_e = match &mixing {
        Some(spec) => effective_sample_size(n, spec)?,
        None => n,
    };
    let h = theory_bandwidth(n, dist.beta(), d, mixing.as_ref())?;
    let sample = regime.sample(dist, n, seed);
    let model = PlugInModel::fit(sample, dist.beta(), h, gaussian_kernel(d), DEFAULT_GUARD)?;
    Ok((model, n_e))
}

/// Outcome of one train/evaluate replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateOutcome {
    pub n: usize,
    pub n_e: usize,
    pub bandwidth: f64,
    pub seed: u64,
    pub risk: RiskEstimate,
}

/// Draws a training sample under `regime`, fits with the theory bandwidth
/// and the Gaussian kernel, and estimates the excess risk. Training and
/// test draws share `seed` but use separate streams.
pub fn evaluate_replicate(
    dist: &SyntheticDistribution,
    regime: &TrainingRegime,
    n: usize,
    n_test: usize,
    seed: u64,
) -> Result<ReplicateOutcome> {
    if n == 0 {
        return Err(Error::SampleTooSmall { n });
    }
    let (model, n_e) = train(dist, regime, n, seed)?;
    let risk = excess_risk_oracle(&model, dist, n_test, seed)?;
    Ok(ReplicateOutcome {
        n,
        n_e,
        bandwidth: model.bandwidth(),
        seed,
        risk,
    })
}

/// `|eta_hat_{n,j}(x) - eta_j(x)|` over `replicates` independent training
/// draws; replicate `r` uses seed `seed ^ r`.
pub fn estimation_errors(
    dist: &SyntheticDistribution,
    regime: &TrainingRegime,
    n: usize,
    j: usize,
    x: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if j == 0 || j > dist.classes() {
        return Err(Error::param("j", "class index out of range"));
    }
    if n == 0 {
        return Err(Error::SampleTooSmall { n });
    }
    let truth = dist.eta_vector(x)?[j - 1];
    (0..replicates)
        .map(|r| {
            let (model, _) = train(dist, regime, n, seed ^ r as u64)?;
            let est = model.class_estimates(x)?[j - 1].clipped;
            Ok((est - truth).abs())
        })
        .collect()
}

/// Fraction of replicate training sets with
/// `|eta_hat_{n,j}(x) - eta_j(x)| >= delta`.
#[allow(clippy::too_many_arguments)]
pub fn deviation_probability(
    dist: &SyntheticDistribution,
    regime: &TrainingRegime,
    n: usize,
    j: usize,
    x: &[f64],
    delta: f64,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    if replicates < 30 {
        return Err(Error::param("replicates", "need at least 30 replicates"));
    }
    if !(delta > 0.0) {
        return Err(Error::param("delta", "must be positive"));
    }
    let errors = estimation_errors(dist, regime, n, j, x, replicates, seed)?;
    Ok(exceedance(&errors, delta))
}

/// Fraction of `errors` that are `>= delta`.
pub fn exceedance(errors: &[f64], delta: f64) -> f64 {
    errors.iter().filter(|&&e| e >= delta).count() as f64 / errors.len() as f64
}
