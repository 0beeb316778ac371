//! The one-vs-all plug-in classifier and the bandwidth rules that go with
//! it.
//!
//! Classes are 1-based throughout: labels live in `1..=m` and
//! [`PlugInModel::predict`] returns a value in the same range.

use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, floor, pow, round};

use crate::kernels::KernelSpec;
use crate::lpreg::{build_shared_system, lp_estimate, LPEstimate};
use crate::multipoly::{enumerate_basis, PolyBasis};
use crate::{Error, Result};

/// Default eigenvalue guard for the local Gram matrix.
pub const DEFAULT_GUARD: f64 = 1e-8;

/// Training observations (row-major) with 1-based labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    dim: usize,
    classes: usize,
    observations: Vec<f64>,
    labels: Vec<usize>,
}

impl LabeledSample {
    pub fn new(dim: usize, classes: usize, observations: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if labels.is_empty() {
            return Err(Error::EmptySample);
        }
        if observations.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * dim,
                found: observations.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y == 0 || y > classes) {
            return Err(Error::param("labels", alloc::format!("label {bad} outside 1..={classes}")));
        }
        Ok(LabeledSample {
            dim,
            classes,
            observations,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn observation(&self, i: usize) -> &[f64] {
        &self.observations[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Applies `perm` to the labels: class `j` becomes `perm[j - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        LabeledSample::new(
            self.dim,
            self.classes,
            self.observations.clone(),
            self.labels.iter().map(|&y| perm[y - 1]).collect(),
        )
    }
}

/// Constants of an exponential mixing bound `alpha(k) <= C1 exp(-C2 k^C3)`.
/// `c3 = +inf` encodes independent data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingSpec {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl MixingSpec {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (name, v) in [("C1", c1), ("C2", c2), ("C3", c3)] {
            if !(v > 0.0) {
                return Err(Error::param(name, "mixing constants must be positive"));
            }
        }
        Ok(MixingSpec { c1, c2, c3 })
    }

    pub fn iid() -> Self {
        MixingSpec {
            c1: 1.0,
            c2: f64::INFINITY,
            c3: f64::INFINITY,
        }
    }

    pub fn is_iid(&self) -> bool {
        self.c3.is_infinite()
    }
}

/// `n_e = floor(n / ceil((8 n / C2)^(1 / (C3 + 1))))`, or `n` when `C3` is
/// infinite.
pub fn effective_sample_size(n: usize, mix: &MixingSpec) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if mix.is_iid() {
        return Ok(n);
    }
    let root = pow(8.0 * n as f64 / mix.c2, 1.0 / (mix.c3 + 1.0));
    // exact powers (e.g. sqrt(1024)) must not pick up an extra block
    let snapped = if (root - round(root)).abs() <= 1e-9 * root.max(1.0) {
        round(root)
    } else {
        root
    };
    let block = ceil(snapped).max(1.0);
    let ne = floor(n as f64 / block) as usize;
    if ne == 0 {
        return Err(Error::SampleTooSmall { n });
    }
    Ok(ne)
}

/// `n_e^(-1/(2 beta + d))` under mixing, `n^(-1/(2 beta + d))` otherwise.
pub fn theory_bandwidth(n: usize, beta: f64, d: usize, mix: Option<&MixingSpec>) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    let count = match mix {
        Some(m) => effective_sample_size(n, m)?,
        None if n == 0 => return Err(Error::EmptySample),
        None => n,
    };
    Ok(pow(count as f64, -1.0 / (2.0 * beta + d as f64)))
}

/// Anything that maps a point to a 1-based class.
pub trait Classifier {
    fn dim(&self) -> usize;
    fn classes(&self) -> usize;
    fn predict(&self, x: &[f64]) -> Result<usize>;
}

/// Index (1-based) of the largest entry; ties go to the smallest index.
pub fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best + 1
}

/// A fitted one-vs-all local polynomial plug-in classifier.
///
/// Fitting only stores the sample and its binary views; every query solves
/// its own local system.
#[derive(Debug, Clone)]
pub struct PlugInModel {
    sample: LabeledSample,
    binary_views: Vec<Vec<f64>>,
    bandwidth: f64,
    basis: PolyBasis,
    kernel: KernelSpec,
    guard_threshold: f64,
}

impl PlugInModel {
    pub fn fit(
        sample: LabeledSample,
        beta: f64,
        h: f64,
        kernel: KernelSpec,
        guard_threshold: f64,
    ) -> Result<Self> {
        if sample.classes() < 2 {
            return Err(Error::param("m", "need at least two classes"));
        }
        if !(h > 0.0) {
            return Err(Error::param("h", "bandwidth must be positive"));
        }
        if !(beta > 0.0) {
            return Err(Error::param("beta", "must be positive"));
        }
        let order = floor(beta) as u32;
        let basis = enumerate_basis(sample.dim(), order)?;
        let binary_views = (1..=sample.classes())
            .map(|j| {
                sample
                    .labels()
                    .iter()
                    .map(|&y| if y == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(PlugInModel {
            sample,
            binary_views,
            bandwidth: h,
            basis,
            kernel,
            guard_threshold,
        })
    }

    pub fn sample(&self) -> &LabeledSample {
        &self.sample
    }

    pub fn binary_views(&self) -> &[Vec<f64>] {
        &self.binary_views
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn guard_threshold(&self) -> f64 {
        self.guard_threshold
    }

    /// Per-class estimates at `x`. A failed solve is reported as degenerate.
    pub fn class_estimates(&self, x: &[f64]) -> Result<Vec<LPEstimate>> {
        let views: Vec<&[f64]> = self.binary_views.iter().map(Vec::as_slice).collect();
        let shared = build_shared_system(
            self.sample.observations(),
            &views,
            x,
            self.bandwidth,
            &self.basis,
            &self.kernel,
        )?;
        let mut out = vec![LPEstimate::DEGENERATE; views.len()];
        for (j, slot) in out.iter_mut().enumerate() {
            match lp_estimate(&shared.system(j), self.guard_threshold) {
                Ok(e) => *slot = e,
                Err(Error::Numeric(why)) => log::debug!("degenerate local solve: {why}"),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Clipped estimates of every class probability at `x`; not renormalised.
    pub fn class_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.class_estimates(x)?.iter().map(|e| e.clipped).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax_first(&self.class_scores(x)?))
    }
}

impl Classifier for PlugInModel {
    fn dim(&self) -> usize {
        self.sample.dim()
    }

    fn classes(&self) -> usize {
        self.sample.classes()
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        PlugInModel::predict(self, x)
    }
}
