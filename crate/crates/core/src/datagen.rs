//! Synthetic classification problems with known conditional class
//! probabilities, plus samplers for iid, exponentially strongly mixing and
//! drifting-concept training data.
//!
//! Every family depends on the observation only through its first
//! coordinate; the remaining coordinates are uniform noise dimensions.
//!
//! * **Crossing** (two classes): `eta_1(x) = 1/2 + sign(s)|s|^(1/alpha) / 2`
//!   with `s = 2 x_1 - 1`, under the uniform marginal on `[0, 1]^d`. The gap
//!   `|eta_1 - eta_2| = |s|^(1/alpha)` gives `P(gap <= t) = t^alpha` exactly.
//! * **Hard margin** (`m` classes): the marginal is uniform on `m` disjoint
//!   slabs in `x_1`; on slab `j` class `j` leads every other class by
//!   exactly `g0`. Between slabs the probability vector moves along a
//!   polynomial smoothstep, so `eta` is smooth on the whole cube while the
//!   gap never drops below `g0` on the support.
//! * **Constant**: a fixed probability vector; used as a reference case.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{floor, log, pow, round, sin, sqrt};
use rand::Rng;

use crate::multipoly::{enumerate_basis, MultiIndex};
use crate::ova::{argmax_first, LabeledSample, MixingSpec};
use crate::rate::fit_loglog;
use crate::rng::{categorical, stream, unit, Stream};
use crate::{Error, Result};

/// Which construction a [`SyntheticDistribution`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Crossing,
    HardMargin,
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Crossing {
        power: f64,
    },
    HardMargin {
        g0: f64,
        /// Half-width of each transition band around `j / m`.
        half_gap: f64,
        smoothstep: Vec<f64>,
    },
    Constant {
        probs: Vec<f64>,
    },
}

/// A distribution of `(X, Y)` with analytic `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDistribution {
    dim: usize,
    classes: usize,
    beta: f64,
    holder_constant: f64,
    alpha: f64,
    margin_constant: f64,
    profile: Profile,
}

/// Crossing family with margin exponent `alpha` and smoothness `beta`.
///
/// `|s|^(1/alpha)` is a polynomial when `1/alpha` is odd, so any `beta` is
/// admissible there. Otherwise the crossing point limits smoothness to
/// `beta <= 1/alpha`, strictly when `1/alpha` is an even integer.
pub fn make_crossing_distribution(d: usize, alpha: f64, beta: f64) -> Result<SyntheticDistribution> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", "must be positive and finite"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", "must be positive and finite"));
    }
    let power = 1.0 / alpha;
    let nearest = round(power);
    let integral = (power - nearest).abs() <= 1e-12 * power.max(1.0);
    let odd = integral && (nearest as u64) % 2 == 1;
    let power = if integral { nearest } else { power };
    if !odd {
        let ok = if integral { beta < power } else { beta <= power };
        if !ok {
            return Err(Error::param(
                "alpha",
                alloc::format!(
                    "crossing family needs alpha * beta <= 1 (strictly when 1/alpha is an even \
                     integer) unless 1/alpha is an odd integer; got alpha = {alpha}, beta = {beta}"
                ),
            ));
        }
    }
    let k = floor(beta) as u32;
    let gamma = beta - k as f64;
    let q = power - k as f64;
    // Taylor remainder of (1 + phi(2x - 1)) / 2 with phi(s) = sign(s)|s|^p
    let holder_constant = pow(2.0, beta - 1.0) * falling(power, k).abs() * q.max(1.0)
        * pow(2.0, 1.0 - gamma)
        / factorial(k);
    Ok(SyntheticDistribution {
        dim: d,
        classes: 2,
        beta,
        holder_constant,
        alpha,
        margin_constant: 1.0,
        profile: Profile::Crossing { power },
    })
}

/// Hard-margin family: `m` slabs, gap exactly `g0` everywhere on the support.
///
/// The margin condition holds for every exponent; the stored exponent
/// defaults to 1 and can be changed with
/// [`SyntheticDistribution::with_margin_exponent`].
pub fn make_hard_margin_distribution(
    d: usize,
    m: usize,
    g0: f64,
    beta: f64,
) -> Result<SyntheticDistribution> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if m < 2 {
        return Err(Error::param("m", "need at least two classes"));
    }
    if !(g0 > 0.0 && g0 < 1.0) {
        return Err(Error::param("g0", "gap floor must lie in (0, 1)"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", "must be positive and finite"));
    }
    let half_gap = 1.0 / (8.0 * m as f64);
    let order = floor(beta) as u32 + 1;
    let alpha = 1.0;
    Ok(SyntheticDistribution {
        dim: d,
        classes: m,
        beta,
        // across slabs the points are at least 2 * half_gap apart
        holder_constant: g0 / pow(2.0 * half_gap, beta),
        alpha,
        margin_constant: pow(g0, -alpha),
        profile: Profile::HardMargin {
            g0,
            half_gap,
            smoothstep: smoothstep_coefficients(order),
        },
    })
}

/// `eta(x) = probs` for every `x`.
pub fn make_constant_distribution(d: usize, probs: Vec<f64>) -> Result<SyntheticDistribution> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if probs.len() < 2 {
        return Err(Error::param("probs", "need at least two classes"));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::param("probs", "not a probability vector"));
    }
    let mut sorted = probs.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let gap = sorted[0] - sorted[1];
    let (alpha, margin_constant) = if gap > 0.0 { (1.0, 1.0 / gap) } else { (0.0, 1.0) };
    Ok(SyntheticDistribution {
        dim: d,
        classes: probs.len(),
        beta: f64::INFINITY,
        holder_constant: 0.0,
        alpha,
        margin_constant,
        profile: Profile::Constant { probs },
    })
}

impl SyntheticDistribution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Hölder constant `L` of the class-probability functions on the support.
    pub fn holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `C0` in `P(gap <= t) <= C0 t^alpha`.
    pub fn margin_constant(&self) -> f64 {
        self.margin_constant
    }

    pub fn family(&self) -> Family {
        match self.profile {
            Profile::Crossing { .. } => Family::Crossing,
            Profile::HardMargin { .. } => Family::HardMargin,
            Profile::Constant { .. } => Family::Constant,
        }
    }

    /// Hard-margin gap floor, if any.
    pub fn gap_floor(&self) -> Option<f64> {
        match self.profile {
            Profile::HardMargin { g0, .. } => Some(g0),
            _ => None,
        }
    }

    /// Re-targets the margin exponent of a hard-margin or constant
    /// distribution, adjusting `C0` to keep the condition true.
    pub fn with_margin_exponent(mut self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", "must be non-negative and finite"));
        }
        let gap = match &self.profile {
            Profile::HardMargin { g0, .. } => *g0,
            Profile::Constant { probs } => {
                let mut sorted = probs.clone();
                sorted.sort_by(|a, b| b.total_cmp(a));
                sorted[0] - sorted[1]
            }
            Profile::Crossing { .. } => {
                return Err(Error::param("alpha", "crossing family fixes its own exponent"))
            }
        };
        if gap <= 0.0 && alpha > 0.0 {
            return Err(Error::param("alpha", "zero gap only admits alpha = 0"));
        }
        self.alpha = alpha;
        self.margin_constant = if alpha == 0.0 { 1.0 } else { pow(gap, -alpha) };
        Ok(self)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutsideDomain);
        }
        Ok(())
    }

    /// Whether `x` lies in the support of the marginal.
    pub fn in_support(&self, x: &[f64]) -> bool {
        if self.check_point(x).is_err() {
            return false;
        }
        match &self.profile {
            Profile::HardMargin { half_gap, .. } => {
                let m = self.classes as f64;
                (1..self.classes).all(|j| (x[0] - j as f64 / m).abs() >= *half_gap)
            }
            _ => true,
        }
    }

    /// `(eta_1(x), ..., eta_m(x))`.
    pub fn eta_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.eta_unchecked(x[0]))
    }

    fn eta_unchecked(&self, x1: f64) -> Vec<f64> {
        match &self.profile {
            Profile::Crossing { power } => {
                let s = 2.0 * x1 - 1.0;
                let phi = s.signum() * pow(s.abs(), *power);
                let phi = if s == 0.0 { 0.0 } else { phi };
                vec![0.5 + 0.5 * phi, 0.5 - 0.5 * phi]
            }
            Profile::HardMargin {
                g0,
                half_gap,
                smoothstep,
            } => {
                let m = self.classes;
                let lo = (1.0 - g0) / m as f64;
                let mut eta = vec![lo; m];
                match self.transition(x1, *half_gap) {
                    Some((j, t)) => {
                        let w = poly_eval(smoothstep, t);
                        eta[j] += g0 * (1.0 - w);
                        eta[j + 1] += g0 * w;
                    }
                    None => eta[self.slab_of(x1)] += g0,
                }
                eta
            }
            Profile::Constant { probs } => probs.clone(),
        }
    }

    fn slab_of(&self, x1: f64) -> usize {
        ((x1 * self.classes as f64) as usize).min(self.classes - 1)
    }

    // (left class index, position in [0, 1]) inside a transition band
    fn transition(&self, x1: f64, half_gap: f64) -> Option<(usize, f64)> {
        let m = self.classes as f64;
        (1..self.classes).find_map(|j| {
            let centre = j as f64 / m;
            ((x1 - centre).abs() < half_gap)
                .then(|| (j - 1, (x1 - (centre - half_gap)) / (2.0 * half_gap)))
        })
    }

    /// Partial derivatives `D^s eta_j(x)` for every class.
    pub fn eta_derivatives(&self, x: &[f64], s: &MultiIndex) -> Result<Vec<f64>> {
        self.check_point(x)?;
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        if s.degree() == 0 {
            return Ok(self.eta_unchecked(x[0]));
        }
        let k = s.exponents()[0];
        if k != s.degree() {
            return Ok(vec![0.0; self.classes]);
        }
        Ok(match &self.profile {
            Profile::Crossing { power } => {
                let s1 = 2.0 * x[0] - 1.0;
                let coef = falling(*power, k);
                let value = if coef == 0.0 {
                    0.0
                } else {
                    let sign = if k % 2 == 0 { s1.signum() } else { 1.0 };
                    let sign = if k % 2 == 0 && s1 == 0.0 { 0.0 } else { sign };
                    coef * sign * pow(s1.abs(), *power - k as f64)
                };
                let d1 = 0.5 * pow(2.0, k as f64) * value;
                vec![d1, -d1]
            }
            Profile::HardMargin {
                g0,
                half_gap,
                smoothstep,
            } => {
                let mut out = vec![0.0; self.classes];
                if let Some((j, t)) = self.transition(x[0], *half_gap) {
                    let mut p = smoothstep.clone();
                    for _ in 0..k {
                        p = poly_derivative(&p);
                    }
                    let v = g0 * poly_eval(&p, t) / pow(2.0 * half_gap, k as f64);
                    out[j] = -v;
                    out[j + 1] = v;
                }
                out
            }
            Profile::Constant { .. } => vec![0.0; self.classes],
        })
    }

    /// Bayes rule, ties to the smallest class.
    pub fn bayes_predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax_first(&self.eta_vector(x)?))
    }

    /// Draws one observation from the marginal into `out`, consuming exactly
    /// `d` uniforms.
    pub fn draw_observation<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = unit(rng);
        }
        if let Profile::HardMargin { half_gap, .. } = self.profile {
            out[0] = self.map_to_slabs(out[0], half_gap);
        }
    }

    // u in [0, 1) -> uniform point of the union of slabs
    fn map_to_slabs(&self, u: f64, half_gap: f64) -> f64 {
        let m = self.classes;
        let width = |j: usize| {
            let mut w = 1.0 / m as f64;
            if j > 0 {
                w -= half_gap;
            }
            if j + 1 < m {
                w -= half_gap;
            }
            w
        };
        let total: f64 = (0..m).map(width).sum();
        let mut pos = u * total;
        for j in 0..m {
            let w = width(j);
            if pos < w || j + 1 == m {
                let start = j as f64 / m as f64 + if j > 0 { half_gap } else { 0.0 };
                return (start + pos).min(1.0);
            }
            pos -= w;
        }
        unreachable!()
    }
}

fn falling(p: f64, k: u32) -> f64 {
    (0..k).map(|i| p - i as f64).product()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Coefficients (ascending powers) of the order-`n` smoothstep, which rises
/// from 0 to 1 on `[0, 1]` with `n` vanishing derivatives at both ends.
fn smoothstep_coefficients(n: u32) -> Vec<f64> {
    let binom = |a: u32, b: u32| -> f64 {
        (1..=b).fold(1.0, |acc, i| acc * (a + 1 - i) as f64 / i as f64)
    };
    let mut c = vec![0.0; (2 * n + 2) as usize];
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        c[(n + 1 + i) as usize] = sign * binom(n + i, i) * binom(2 * n + 1, n - i);
    }
    c
}

fn poly_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// Parameters of the hold-or-refresh chain: with probability `rho` the next
/// observation repeats the current one, otherwise it is a fresh draw from
/// the marginal. Labels are redrawn independently at every step.
///
/// The pair sequence is stationary, and conditioning on the past is
/// forgotten as soon as one refresh happens, so `alpha(k) <= rho^k`, i.e.
/// `C1 = 1`, `C2 = -ln rho`, `C3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingChainSpec {
    rho: f64,
}

impl MixingChainSpec {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::param("rho", "hold probability must lie in [0, 1)"));
        }
        Ok(MixingChainSpec { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mixing_spec(&self) -> MixingSpec {
        if self.rho == 0.0 {
            MixingSpec::iid()
        } else {
            MixingSpec {
                c1: 1.0,
                c2: -log(self.rho),
                c3: 1.0,
            }
        }
    }
}

/// Label drift `eta^i = eta + A i^(-(beta + d)/(2 beta + d)) psi` with the
/// zero-sum perturbation `psi_1 = sin^2(pi x_1) = -psi_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSchedule {
    amplitude: f64,
    decay: f64,
}

const DRIFT_GRID: usize = 20_000;

impl DriftSchedule {
    /// Fails if the perturbed vectors would leave the simplex.
    pub fn new(dist: &SyntheticDistribution, amplitude: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::param("amplitude", "must be non-negative and finite"));
        }
        let cap = Self::amplitude_cap(dist);
        if amplitude > cap {
            return Err(Error::param(
                "amplitude",
                alloc::format!("{amplitude} exceeds the simplex cap {cap:.6} for this distribution"),
            ));
        }
        let d = dist.dim() as f64;
        let beta = dist.beta();
        let decay = if beta.is_infinite() {
            0.5
        } else {
            (beta + d) / (2.0 * beta + d)
        };
        Ok(DriftSchedule { amplitude, decay })
    }

    /// Largest admissible amplitude: `inf eta_2 / psi_1` over a grid of `x_1`.
    pub fn amplitude_cap(dist: &SyntheticDistribution) -> f64 {
        (0..=DRIFT_GRID)
            .map(|i| i as f64 / DRIFT_GRID as f64)
            .filter_map(|x1| {
                let psi = perturbation(x1);
                (psi > 0.0).then(|| {
                    let eta = dist.eta_unchecked(x1);
                    (eta[1] / psi).min((1.0 - eta[0]) / psi)
                })
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// `sup_x |eta^i_j - eta_j|` bound for step `i` (1-based).
    pub fn bound(&self, i: usize) -> f64 {
        self.amplitude * pow(i as f64, -self.decay)
    }

    /// `eta^i(x)` for step `i` (1-based).
    pub fn eta_at(&self, dist: &SyntheticDistribution, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        let mut eta = dist.eta_vector(x)?;
        let shift = self.bound(i) * perturbation(x[0]);
        eta[0] += shift;
        eta[1] -= shift;
        Ok(eta)
    }
}

fn perturbation(x1: f64) -> f64 {
    // reflect so that both endpoints give an exact zero
    let s = sin(PI * x1.min(1.0 - x1));
    s * s
}

/// How training data are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainingRegime {
    Iid,
    Mixing(MixingChainSpec),
    Drift(DriftSchedule),
}

impl TrainingRegime {
    pub fn sample(&self, dist: &SyntheticDistribution, n: usize, seed: u64) -> LabeledSample {
        match self {
            TrainingRegime::Iid => sample_iid(dist, n, seed),
            TrainingRegime::Mixing(chain) => sample_mixing(dist, n, chain, seed),
            TrainingRegime::Drift(schedule) => sample_drift(dist, n, schedule, seed),
        }
    }

    /// Mixing constants fed to the bandwidth rule, `None` for iid and drift.
    pub fn mixing_spec(&self) -> Option<MixingSpec> {
        match self {
            TrainingRegime::Mixing(chain) => Some(chain.mixing_spec()),
            _ => None,
        }
    }
}

fn sample_with(
    dist: &SyntheticDistribution,
    n: usize,
    seed: u64,
    mut next_x: impl FnMut(&mut [f64], usize),
    eta: impl Fn(usize, &[f64]) -> Vec<f64>,
) -> LabeledSample {
    assert!(n >= 1, "sample size must be positive");
    let d = dist.dim();
    let mut labels_rng = stream(seed, Stream::TrainLabels);
    let mut obs = vec![0.0; n * d];
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (prev, cur) = obs.split_at_mut(i * d);
        let row = &mut cur[..d];
        if i > 0 {
            row.copy_from_slice(&prev[(i - 1) * d..]);
        }
        next_x(row, i);
        labels.push(categorical(&mut labels_rng, &eta(i + 1, row)));
    }
    LabeledSample::new(d, dist.classes(), obs, labels).expect("sampler produced a valid sample")
}

/// `n` independent draws; deterministic in `seed`.
pub fn sample_iid(dist: &SyntheticDistribution, n: usize, seed: u64) -> LabeledSample {
    let mut obs_rng = stream(seed, Stream::TrainObservations);
    sample_with(
        dist,
        n,
        seed,
        |row, _| dist.draw_observation(&mut obs_rng, row),
        |_, x| dist.eta_unchecked(x[0]),
    )
}

/// Hold-or-refresh chain. With `rho = 0` this is exactly [`sample_iid`].
pub fn sample_mixing(
    dist: &SyntheticDistribution,
    n: usize,
    chain: &MixingChainSpec,
    seed: u64,
) -> LabeledSample {
    let mut obs_rng = stream(seed, Stream::TrainObservations);
    let mut hold_rng = stream(seed, Stream::ChainHolds);
    let rho = chain.rho();
    sample_with(
        dist,
        n,
        seed,
        |row, i| {
            let hold = i > 0 && unit(&mut hold_rng) < rho;
            if !hold {
                dist.draw_observation(&mut obs_rng, row);
            }
        },
        |_, x| dist.eta_unchecked(x[0]),
    )
}

/// Independent observations, labels from the drifting `eta^i`. With zero
/// amplitude this is exactly [`sample_iid`].
pub fn sample_drift(
    dist: &SyntheticDistribution,
    n: usize,
    schedule: &DriftSchedule,
    seed: u64,
) -> LabeledSample {
    let mut obs_rng = stream(seed, Stream::TrainObservations);
    sample_with(
        dist,
        n,
        seed,
        |row, _| dist.draw_observation(&mut obs_rng, row),
        |i, x| {
            let mut eta = dist.eta_unchecked(x[0]);
            let shift = schedule.bound(i) * perturbation(x[0]);
            eta[0] += shift;
            eta[1] -= shift;
            eta
        },
    )
}

/// One row of a [`MarginReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginCheck {
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub checks: Vec<MarginCheck>,
    /// Log-log slope of the estimate against `t` over grid points with
    /// `0 < t < 1` and a positive estimate; `None` with fewer than 3.
    pub slope: Option<f64>,
}

impl MarginReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passes)
    }
}

/// Monte Carlo check of `P(eta_(1) - eta_(2) <= t) <= C0 t^alpha`, allowing
/// three binomial standard errors.
pub fn verify_margin(
    dist: &SyntheticDistribution,
    n_probe: usize,
    t_grid: &[f64],
    seed: u64,
) -> Result<MarginReport> {
    if n_probe < 10_000 {
        return Err(Error::param("n_probe", "need at least 10^4 probes"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::param("t_grid", "thresholds must be positive"));
    }
    let mut rng = stream(seed, Stream::Probes);
    let mut x = vec![0.0; dist.dim()];
    let mut gaps = Vec::with_capacity(n_probe);
    for _ in 0..n_probe {
        dist.draw_observation(&mut rng, &mut x);
        let mut eta = dist.eta_unchecked(x[0]);
        eta.sort_by(|a, b| b.total_cmp(a));
        gaps.push(eta[0] - eta[1]);
    }
    gaps.sort_by(f64::total_cmp);
    let n = n_probe as f64;
    let checks: Vec<MarginCheck> = t_grid
        .iter()
        .map(|&t| {
            let count = gaps.partition_point(|&g| g <= t);
            let p = count as f64 / n;
            let se = sqrt(p * (1.0 - p) / n);
            let bound = dist.margin_constant() * pow(t, dist.alpha());
            MarginCheck {
                t,
                estimate: p,
                std_error: se,
                bound,
                passes: p <= bound + 3.0 * se,
            }
        })
        .collect();
    let (ts, ps): (Vec<f64>, Vec<f64>) = checks
        .iter()
        .filter(|c| c.t < 1.0 && c.estimate > 0.0)
        .map(|c| (c.t, c.estimate))
        .unzip();
    let slope = (ts.len() >= 3).then(|| fit_loglog(&ts, &ps).slope);
    Ok(MarginReport { checks, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    /// Largest `|eta_j(x') - T_x eta_j(x')| / ||x - x'||^beta` per class.
    pub max_ratio: Vec<f64>,
    pub pairs: usize,
    pub holder_constant: f64,
}

impl HolderReport {
    pub fn overall_max(&self) -> f64 {
        self.max_ratio.iter().copied().fold(0.0, f64::max)
    }

    /// The observed ratios stay below the family's constant.
    pub fn within_constant(&self) -> bool {
        self.overall_max() <= self.holder_constant * (1.0 + 1e-9) + 1e-12
    }
}

// Absolute rounding allowance on Taylor residuals before dividing by the
// (possibly tiny) distance power.
const ROUNDOFF: f64 = 1e-13;

/// Compares `eta` with its degree-`floor(beta)` Taylor polynomial on random
/// pairs of support points at log-uniform distances in `[1e-3, 1]`.
/// Residuals are reduced by an absolute rounding allowance of `1e-13`.
pub fn verify_holder(dist: &SyntheticDistribution, n_pairs: usize, seed: u64) -> Result<HolderReport> {
    if n_pairs < 1000 {
        return Err(Error::param("n_pairs", "need at least 10^3 pairs"));
    }
    let d = dist.dim();
    let beta = dist.beta();
    let order = if beta.is_finite() { floor(beta) as u32 } else { 0 };
    let exponent = if beta.is_finite() { beta } else { 1.0 };
    let basis = enumerate_basis(d, order)?;
    let mut rng = stream(seed, Stream::Probes);
    let mut max_ratio = vec![0.0f64; dist.classes()];
    let mut x = vec![0.0; d];
    let mut xp = vec![0.0; d];
    let mut offset = vec![0.0; d];
    let mut pairs = 0;

    while pairs < n_pairs {
        dist.draw_observation(&mut rng, &mut x);
        let radius = pow(10.0, -3.0 * unit(&mut rng));
        for o in offset.iter_mut() {
            *o = 2.0 * unit(&mut rng) - 1.0;
        }
        let len = sqrt(offset.iter().map(|v| v * v).sum());
        if len == 0.0 {
            continue;
        }
        for ((p, xi), o) in xp.iter_mut().zip(&x).zip(&offset) {
            *p = xi + radius * o / len;
        }
        if !dist.in_support(&xp) {
            continue;
        }
        pairs += 1;
        let dist_pow = pow(radius, exponent);
        let target = dist.eta_unchecked(xp[0]);
        let mut taylor = vec![0.0; dist.classes()];
        for s in basis.indices() {
            let coef = dist.eta_derivatives(&x, s)?;
            let step: f64 = offset
                .iter()
                .zip(s.exponents())
                .map(|(o, &e)| pow(radius * o / len, e as f64))
                .product::<f64>()
                / s.factorial();
            for (t, c) in taylor.iter_mut().zip(coef) {
                *t += c * step;
            }
        }
        for (j, r) in max_ratio.iter_mut().enumerate() {
            let residual = ((target[j] - taylor[j]).abs() - ROUNDOFF).max(0.0);
            *r = r.max(residual / dist_pow);
        }
    }
    Ok(HolderReport {
        max_ratio,
        pairs,
        holder_constant: dist.holder_constant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_values() {
        let dist = make_crossing_distribution(1, 1.0, 2.0).unwrap();
        assert_eq!(dist.eta_vector(&[0.5]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(dist.eta_vector(&[0.75]).unwrap(), vec![0.75, 0.25]);
        assert_eq!(dist.eta_vector(&[1.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(dist.bayes_predict(&[0.75]).unwrap(), 1);
        assert_eq!(dist.bayes_predict(&[0.25]).unwrap(), 2);
        assert_eq!(dist.bayes_predict(&[0.5]).unwrap(), 1);
        assert_eq!(dist.eta_vector(&[1.2]), Err(Error::OutsideDomain));
        assert!(dist.eta_vector(&[0.2, 0.3]).is_err());
    }

    #[test]
    fn crossing_validity_region() {
        // 1/alpha = 1 is odd: any smoothness
        assert!(make_crossing_distribution(1, 1.0, 5.0).is_ok());
        assert!(make_crossing_distribution(1, 1.0 / 3.0, 7.5).is_ok());
        // 1/alpha = 2 is even: beta < 2
        assert!(make_crossing_distribution(1, 0.5, 1.9).is_ok());
        assert!(make_crossing_distribution(1, 0.5, 2.0).is_err());
        // 1/alpha = 2.5: beta <= 2.5
        assert!(make_crossing_distribution(2, 0.4, 2.5).is_ok());
        assert!(make_crossing_distribution(2, 0.4, 2.6).is_err());
        assert!(make_crossing_distribution(1, 2.0, 1.0).is_err());
        assert!(make_crossing_distribution(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep_coefficients(1), vec![0.0, 0.0, 3.0, -2.0]);
        for n in 1..5 {
            let c = smoothstep_coefficients(n);
            assert!(poly_eval(&c, 0.0).abs() < 1e-12);
            assert!((poly_eval(&c, 1.0) - 1.0).abs() < 1e-12);
            let mut p = c.clone();
            for _ in 0..n {
                p = poly_derivative(&p);
                assert!(poly_eval(&p, 0.0).abs() < 1e-9);
                assert!(poly_eval(&p, 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hard_margin_bump_centres() {
        let dist = make_hard_margin_distribution(1, 3, 0.3, 2.0).unwrap();
        for j in 0..3 {
            let centre = (j as f64 + 0.5) / 3.0;
            assert_eq!(dist.bayes_predict(&[centre]).unwrap(), j + 1);
            let eta = dist.eta_vector(&[centre]).unwrap();
            let mut s = eta.clone();
            s.sort_by(|a, b| b.total_cmp(a));
            assert!((s[0] - s[1] - 0.3).abs() < 1e-12);
        }
        assert!(make_hard_margin_distribution(1, 3, 1.0, 2.0).is_err());
        assert!(make_hard_margin_distribution(1, 3, 0.0, 2.0).is_err());
    }

    #[test]
    fn hard_margin_samples_stay_on_support() {
        let dist = make_hard_margin_distribution(2, 4, 0.2, 1.5).unwrap();
        let s = sample_iid(&dist, 5000, 3);
        for i in 0..s.len() {
            assert!(dist.in_support(s.observation(i)));
        }
    }

    #[test]
    fn constant_family() {
        let dist = make_constant_distribution(2, vec![0.75, 0.25]).unwrap();
        assert_eq!(dist.eta_vector(&[0.1, 0.9]).unwrap(), vec![0.75, 0.25]);
        assert!(make_constant_distribution(1, vec![0.7, 0.2]).is_err());
    }

    #[test]
    fn chain_constants() {
        let c = MixingChainSpec::new(0.5).unwrap().mixing_spec();
        assert_eq!(c.c1, 1.0);
        assert!((c.c2 - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(c.c3, 1.0);
        assert!(MixingChainSpec::new(0.0).unwrap().mixing_spec().is_iid());
        assert!(MixingChainSpec::new(1.0).is_err());
        assert!(MixingChainSpec::new(-0.1).is_err());
    }

    #[test]
    fn drift_point_value() {
        let dist = make_crossing_distribution(1, 1.0, 2.0).unwrap();
        let sched = DriftSchedule::new(&dist, 0.1).unwrap();
        assert!((sched.decay() - 0.6).abs() < 1e-15);
        let eta = sched.eta_at(&dist, 1, &[0.5]).unwrap();
        assert!((eta[0] - 0.6).abs() < 1e-15);
        assert!((eta[1] - 0.4).abs() < 1e-15);
        assert!(DriftSchedule::new(&dist, 0.9).is_err());
    }

    #[test]
    fn margin_sample_size_precondition() {
        let dist = make_crossing_distribution(1, 1.0, 2.0).unwrap();
        assert!(verify_margin(&dist, 100, &[0.1], 0).is_err());
    }
}
