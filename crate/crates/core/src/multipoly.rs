//! Multi-indices and the graded monomial basis used by the local polynomial
//! estimator.
//!
//! Indices are ordered by total degree first and lexicographically within a
//! degree, so the all-zeros index (the intercept) is always at position 0.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Add;

use crate::{Error, Result};

/// An exponent vector in `N^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        MultiIndex { exponents, degree }
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex::new(vec![0; d])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// `s!` = product of the factorials of the exponents.
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim(), "multi-index dimensions differ");
        MultiIndex::new(
            self.exponents
                .iter()
                .zip(&rhs.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// All multi-indices of degree `<= max_degree` in `d` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBasis {
    dim: usize,
    max_degree: u32,
    indices: Vec<MultiIndex>,
    // offsets into the per-coordinate power table, `size * dim` entries
    table: Vec<usize>,
}

impl PolyBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Number of basis monomials, `binomial(d + k, d)`.
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Writes `u^s` for every basis index into `out` (length `size()`).
    ///
    /// Per-coordinate powers are tabulated once, so this is cheaper than
    /// calling [`eval_monomial`] per index.
    pub fn monomials_into(&self, u: &[f64], powers: &mut Vec<f64>, out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.dim);
        debug_assert_eq!(out.len(), self.size());
        let stride = self.max_degree as usize + 1;
        powers.resize(self.dim * stride, 1.0);
        for (row, &ui) in powers.chunks_exact_mut(stride).zip(u) {
            let mut acc = 1.0;
            for slot in row.iter_mut() {
                *slot = acc;
                acc *= ui;
            }
        }
        for (slot, offsets) in out.iter_mut().zip(self.table.chunks_exact(self.dim)) {
            *slot = offsets.iter().map(|&o| powers[o]).product();
        }
    }
}

/// Enumerates the graded-lexicographic basis of degree `<= k` in `d` variables.
pub fn enumerate_basis(d: usize, k: u32) -> Result<PolyBasis> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut indices = Vec::new();
    let mut current = vec![0u32; d];
    for degree in 0..=k {
        compositions(degree, 0, &mut current, &mut indices);
    }
    let stride = k as usize + 1;
    let table = indices
        .iter()
        .flat_map(|s| {
            s.exponents
                .iter()
                .enumerate()
                .map(move |(i, &e)| i * stride + e as usize)
        })
        .collect();
    Ok(PolyBasis {
        dim: d,
        max_degree: k,
        indices,
        table,
    })
}

// Fills `current[pos..]` with every composition of `remaining`, first
// coordinate ascending, which yields lexicographic order within a degree.
fn compositions(remaining: u32, pos: usize, current: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.to_vec()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        compositions(remaining - e, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `prod_i u_i^{s_i}` with `0^0 = 1`.
pub fn eval_monomial(u: &[f64], s: &MultiIndex) -> Result<f64> {
    if u.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: u.len(),
        });
    }
    Ok(u.iter()
        .zip(s.exponents())
        .map(|(&ui, &e)| powi(ui, e))
        .product())
}

/// `sum_s coeffs_s * u^s` in the basis order.
pub fn eval_poly(coeffs: &[f64], basis: &PolyBasis, u: &[f64]) -> Result<f64> {
    if coeffs.len() != basis.size() {
        return Err(Error::DimensionMismatch {
            expected: basis.size(),
            found: coeffs.len(),
        });
    }
    if u.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: u.len(),
        });
    }
    let mut powers = Vec::new();
    let mut mono = vec![0.0; basis.size()];
    basis.monomials_into(u, &mut powers, &mut mono);
    Ok(coeffs.iter().zip(&mono).map(|(c, m)| c * m).sum())
}

pub(crate) fn powi(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc *= x;
    }
    acc
}
