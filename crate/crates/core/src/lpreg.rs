//! Local polynomial estimate of a binary regression function at one query
//! point.
//!
//! With rescaled offsets `u_i = (x_i - x) / h` and weights `w_i = K(u_i)`,
//! the local system is
//!
//! ```text
//! B[s1][s2] = 1/(n h^d) sum_i u_i^(s1+s2) w_i
//! a[s]      = 1/(n h^d) sum_i y_i u_i^s w_i
//! ```
//!
//! and the estimate is the intercept of `B theta = a`, clipped to `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;

use libm::pow;

use crate::kernels::KernelSpec;
use crate::linalg;
use crate::multipoly::PolyBasis;
use crate::{Error, Result};

/// Kernel weights below this are treated as exactly zero.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// The normalised weighted Gram matrix and response vector at a query point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSystem {
    /// Row-major `M x M`.
    pub bhat: Vec<f64>,
    pub avec: Vec<f64>,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub effective_weight_count: usize,
}

/// Gram matrix shared by several response vectors (one per class).
#[derive(Debug, Clone, PartialEq)]
pub struct SharedLocalSystem {
    pub bhat: Vec<f64>,
    pub avecs: Vec<Vec<f64>>,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub effective_weight_count: usize,
}

impl SharedLocalSystem {
    pub fn system(&self, j: usize) -> LocalSystem {
        LocalSystem {
            bhat: self.bhat.clone(),
            avec: self.avecs[j].clone(),
            size: self.size,
            min_eigenvalue: self.min_eigenvalue,
            effective_weight_count: self.effective_weight_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LPEstimate {
    /// The unclipped intercept.
    pub raw: f64,
    pub clipped: f64,
    /// The eigenvalue guard fired.
    pub degenerate: bool,
}

impl LPEstimate {
    pub const DEGENERATE: LPEstimate = LPEstimate {
        raw: 0.0,
        clipped: 0.0,
        degenerate: true,
    };
}

/// `xs` holds the `n` training points row-major (`n * d` values).
pub fn build_local_system(
    xs: &[f64],
    ys: &[f64],
    x: &[f64],
    h: f64,
    basis: &PolyBasis,
    kernel: &KernelSpec,
) -> Result<LocalSystem> {
    let shared = build_shared_system(xs, &[ys], x, h, basis, kernel)?;
    Ok(shared.system(0))
}

/// Builds the Gram matrix once and one response vector per entry of
/// `responses`. Entry `j` equals `build_local_system(xs, responses[j], ..)`.
pub fn build_shared_system(
    xs: &[f64],
    responses: &[&[f64]],
    x: &[f64],
    h: f64,
    basis: &PolyBasis,
    kernel: &KernelSpec,
) -> Result<SharedLocalSystem> {
    let d = basis.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if xs.len() % d != 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: xs.len() % d,
        });
    }
    let n = xs.len() / d;
    for ys in responses {
        if ys.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ys.len(),
            });
        }
    }
    if !(h > 0.0) {
        return Err(Error::param("h", "bandwidth must be positive"));
    }

    let m = basis.size();
    let mut bhat = vec![0.0; m * m];
    let mut avecs = vec![vec![0.0; m]; responses.len()];
    let mut u = vec![0.0; d];
    let mut mono = vec![0.0; m];
    let mut powers = Vec::new();
    let mut active = 0;

    for (i, row) in xs.chunks_exact(d).enumerate() {
        for ((ui, xi), x0) in u.iter_mut().zip(row).zip(x) {
            *ui = (xi - x0) / h;
        }
        let w = kernel.evaluate(&u);
        if !(w >= WEIGHT_FLOOR) {
            continue;
        }
        active += 1;
        basis.monomials_into(&u, &mut powers, &mut mono);
        for a in 0..m {
            let wa = w * mono[a];
            for b in a..m {
                bhat[a * m + b] += wa * mono[b];
            }
        }
        for (avec, ys) in avecs.iter_mut().zip(responses) {
            let y = ys[i];
            if y != 0.0 {
                for (slot, mv) in avec.iter_mut().zip(&mono) {
                    *slot += y * w * mv;
                }
            }
        }
    }

    let norm = 1.0 / (n as f64 * pow(h, d as f64));
    for a in 0..m {
        for b in a..m {
            let v = bhat[a * m + b] * norm;
            bhat[a * m + b] = v;
            bhat[b * m + a] = v;
        }
    }
    for avec in &mut avecs {
        for v in avec.iter_mut() {
            *v *= norm;
        }
    }
    let min_eigenvalue = linalg::min_eigenvalue(&bhat, m);
    Ok(SharedLocalSystem {
        bhat,
        avecs,
        size: m,
        min_eigenvalue,
        effective_weight_count: active,
    })
}

/// Solves the local system and clips the intercept.
///
/// A system whose smallest eigenvalue is `<= guard_threshold` yields the
/// degenerate estimate `0`.
pub fn lp_estimate(system: &LocalSystem, guard_threshold: f64) -> Result<LPEstimate> {
    if !(system.min_eigenvalue > guard_threshold) {
        return Ok(LPEstimate::DEGENERATE);
    }
    let theta = linalg::solve_symmetric(&system.bhat, system.size, &system.avec)
        .ok_or(Error::Numeric("local Gram matrix is numerically singular"))?;
    let raw = theta[0];
    if !raw.is_finite() {
        return Err(Error::Numeric("non-finite local polynomial coefficient"));
    }
    Ok(LPEstimate {
        raw,
        clipped: clip_unit(raw),
        degenerate: false,
    })
}

/// Projects onto `[0, 1]`.
pub fn clip_unit(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if v >= 1.0 {
        1.0
    } else {
        v
    }
}
