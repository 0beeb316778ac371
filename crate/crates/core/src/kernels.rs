//! Smoothing kernels and a numerical checker for the four conditions the
//! estimator relies on:
//!
//! 1. `K(u) >= c` whenever `||u|| <= c`, for some `c > 0`;
//! 2. `int K = 1`;
//! 3. `sup (1 + ||u||^{2 beta}) K(u) < inf`;
//! 4. `int (1 + ||u||^{4 beta}) K(u)^2 < inf`.
//!
//! Conditions 3 and 4 quantify over all of `R^d`, so the checker works on a
//! truncated proxy: midpoint quadrature on the cube `||u||_inf <= 8` compared
//! against the cube of twice that radius, and a radial probe out to radius
//! 50. A report is a certificate only for kernels with eventually monotone
//! radial decay, which covers the built-in Gaussian.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, pow, sqrt};

/// A kernel on `R^d` together with its lower-bound witness `c`.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    dim: usize,
    lower_bound_constant: f64,
    eval: fn(&[f64]) -> f64,
}

impl core::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("lower_bound_constant", &self.lower_bound_constant)
            .finish()
    }
}

impl KernelSpec {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        lower_bound_constant: f64,
        eval: fn(&[f64]) -> f64,
    ) -> Self {
        assert!(lower_bound_constant > 0.0, "lower-bound constant must be positive");
        KernelSpec {
            name: name.into(),
            dim,
            lower_bound_constant,
            eval,
        }
    }

    #[inline]
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        (self.eval)(u)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower_bound_constant(&self) -> f64 {
        self.lower_bound_constant
    }
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn gaussian_density(u: &[f64]) -> f64 {
    let sq: f64 = u.iter().map(|v| v * v).sum();
    let norm = match u.len() {
        1 => FRAC_1_SQRT_2PI,
        2 => FRAC_1_SQRT_2PI * FRAC_1_SQRT_2PI,
        d => pow(2.0 * PI, -(d as f64) / 2.0),
    };
    norm * exp(-0.5 * sq)
}

/// Standard Gaussian density kernel in `d` dimensions.
///
/// The lower-bound witness is the largest `c` on the grid `0.01, 0.02, ...,
/// 0.99` with `K(c e_1) >= c`; since the Gaussian is radially decreasing that
/// covers the whole ball `||u|| <= c`.
pub fn gaussian_kernel(d: usize) -> KernelSpec {
    assert!(d >= 1, "kernel dimension must be positive");
    let peak = pow(2.0 * PI, -(d as f64) / 2.0);
    let radial = |r: f64| peak * exp(-0.5 * r * r);
    let c = (1..100)
        .rev()
        .map(|k| k as f64 / 100.0)
        .find(|&c| radial(c) >= c)
        .unwrap_or(peak / 2.0);
    KernelSpec::new("gaussian", d, c, gaussian_density)
}

/// Outcome of [`validate_kernel`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelValidationReport {
    pub lower_bound_holds: bool,
    /// `min (K(u) - c)` over the probe grid of the ball `||u|| <= c`.
    pub lower_bound_margin: f64,
    pub integral: f64,
    /// `|I(2R) - I(R)|` for the truncated integral of `K`.
    pub integral_tail: f64,
    pub integrates_to_one: bool,
    pub sup_condition_value: f64,
    pub sup_is_finite: bool,
    pub square_integral_value: f64,
    pub square_integral_tail: f64,
    pub square_integral_is_finite: bool,
    pub tolerance: f64,
}

impl KernelValidationReport {
    pub fn is_valid(&self) -> bool {
        self.lower_bound_holds
            && self.integrates_to_one
            && self.sup_is_finite
            && self.square_integral_is_finite
    }
}

const TRUNCATION_RADIUS: f64 = 8.0;
const PROBE_RADIUS: f64 = 50.0;
const PROBE_STEPS: usize = 5000;

fn nodes_per_axis(d: usize) -> usize {
    match d {
        1 => 1 << 12,
        2 => 1 << 8,
        3 => 1 << 6,
        _ => 1 << 5,
    }
}

/// Checks the kernel conditions numerically for smoothness `beta` in `d`
/// dimensions. Integrals are accepted within `tol`.
pub fn validate_kernel(k: &KernelSpec, beta: f64, d: usize, tol: f64) -> KernelValidationReport {
    assert!(tol > 0.0 && beta > 0.0 && d >= 1);
    let c = k.lower_bound_constant();

    // (i) lower bound on a tensor grid of the ball of radius c
    let per_axis = match d {
        1 => 401,
        2 => 81,
        _ => 21,
    };
    let mut lower_margin = f64::INFINITY;
    let mut u = vec![0.0; d];
    for_each_node(d, per_axis, |idx| {
        for (ui, &i) in u.iter_mut().zip(idx) {
            *ui = -c + 2.0 * c * i as f64 / (per_axis - 1) as f64;
        }
        if norm(&u) <= c {
            lower_margin = lower_margin.min(k.evaluate(&u) - c);
        }
    });

    // (ii) and (iv) by midpoint quadrature at radius R and 2R
    let (i_r, j_r) = truncated_integrals(k, beta, d, TRUNCATION_RADIUS, nodes_per_axis(d));
    let (i_2r, j_2r) =
        truncated_integrals(k, beta, d, 2.0 * TRUNCATION_RADIUS, 2 * nodes_per_axis(d));
    let integral_tail = (i_2r - i_r).abs();
    let square_tail = (j_2r - j_r).abs();

    // (iii) radial probes along e_1 and the main diagonal
    let mut sup = 0.0f64;
    let mut sup_ok = true;
    for diagonal in [false, true] {
        let dir: Vec<f64> = if diagonal {
            vec![1.0 / sqrt(d as f64); d]
        } else {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        };
        let (value, ok) = radial_sup(k, beta, &dir);
        sup = sup.max(value);
        sup_ok &= ok;
    }

    KernelValidationReport {
        lower_bound_holds: lower_margin >= 0.0,
        lower_bound_margin: lower_margin,
        integral: i_r,
        integral_tail,
        integrates_to_one: i_r.is_finite() && (i_r - 1.0).abs() <= tol && integral_tail <= tol,
        sup_condition_value: sup,
        sup_is_finite: sup_ok && sup.is_finite(),
        square_integral_value: j_r,
        square_integral_tail: square_tail,
        square_integral_is_finite: j_r.is_finite() && square_tail <= tol * j_r.max(1.0),
        tolerance: tol,
    }
}

fn truncated_integrals(k: &KernelSpec, beta: f64, d: usize, radius: f64, nodes: usize) -> (f64, f64) {
    let step = 2.0 * radius / nodes as f64;
    let cell = pow(step, d as f64);
    let mut u = vec![0.0; d];
    let (mut first, mut second) = (0.0, 0.0);
    for_each_node(d, nodes, |idx| {
        for (ui, &i) in u.iter_mut().zip(idx) {
            *ui = -radius + (i as f64 + 0.5) * step;
        }
        let kv = k.evaluate(&u);
        first += kv;
        second += (1.0 + pow(norm(&u), 4.0 * beta)) * kv * kv;
    });
    (first * cell, second * cell)
}

// Max of (1 + r^{2 beta}) K(r dir) for r in [0, 50], and whether the profile
// is non-increasing from the maximiser out to the probe radius with the
// maximiser well inside the probe range.
fn radial_sup(k: &KernelSpec, beta: f64, dir: &[f64]) -> (f64, bool) {
    let mut u = vec![0.0; dir.len()];
    let values: Vec<f64> = (0..=PROBE_STEPS)
        .map(|i| {
            let r = PROBE_RADIUS * i as f64 / PROBE_STEPS as f64;
            for (ui, di) in u.iter_mut().zip(dir) {
                *ui = r * di;
            }
            (1.0 + pow(r, 2.0 * beta)) * k.evaluate(&u)
        })
        .collect();
    let (argmax, max) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let interior = argmax < PROBE_STEPS * 9 / 10;
    let decays = values[argmax..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + f64::MIN_POSITIVE);
    (max, interior && decays && max.is_finite())
}

fn norm(u: &[f64]) -> f64 {
    sqrt(u.iter().map(|v| v * v).sum())
}

fn for_each_node(d: usize, per_axis: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; d];
    loop {
        f(&idx);
        let mut axis = 0;
        loop {
            if axis == d {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cauchy_like(u: &[f64]) -> f64 {
        1.0 / (1.0 + u.iter().map(|v| v * v).sum::<f64>())
    }

    #[test]
    fn gaussian_values_at_origin() {
        assert!((gaussian_kernel(1).evaluate(&[0.0]) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((gaussian_kernel(2).evaluate(&[0.0, 0.0]) - 0.159_154_943_091_895_35).abs() < 1e-15);
    }

    #[test]
    fn gaussian_lower_bound_witness() {
        let k = gaussian_kernel(1);
        let c = k.lower_bound_constant();
        assert!(c >= 0.2, "c = {c}");
        // grid check of K(u) - c on |u| <= c
        let worst = (0..=1000)
            .map(|i| -c + 2.0 * c * i as f64 / 1000.0)
            .map(|u| k.evaluate(&[u]) - c)
            .fold(f64::INFINITY, f64::min);
        assert!(worst >= 0.0);
    }

    #[test]
    fn gaussian_passes_in_one_dimension() {
        let r = validate_kernel(&gaussian_kernel(1), 2.0, 1, 1e-3);
        assert!(r.is_valid(), "{r:?}");
        assert!((r.integral - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_two_dimensional_integral() {
        let r = validate_kernel(&gaussian_kernel(2), 1.0, 2, 1e-3);
        assert!((r.integral - 1.0).abs() < 1e-3);
        assert!(r.is_valid());
    }

    #[test]
    fn heavy_tailed_kernel_fails_sup_condition() {
        let k = KernelSpec::new("cauchy-like", 1, 0.1, cauchy_like);
        let r = validate_kernel(&k, 2.0, 1, 1e-3);
        assert!(!r.sup_is_finite);
        assert!(!r.square_integral_is_finite);
        // integrates to pi, not one
        assert!(!r.integrates_to_one);
        assert!(!r.is_valid());
    }
}
