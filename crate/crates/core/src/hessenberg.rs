//! Determinants of banded Hessenberg matrices with one dense leading row
//! (or two, with a leading column), expressed through Chebyshev weights.
//!
//! The weight `σ_k = (−√(bc))^{k−1} U_{k−1}(a / (2√(bc)))` is radical-free and
//! satisfies `σ_1 = 1`, `σ_2 = −a`, `σ_k = −a σ_{k−1} − bc σ_{k−2}`; that
//! recurrence is the only evaluation path used here.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevWeights<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// `σ_1 .. σ_m` (index 0 holds `σ_1`).
    pub sigma: Vec<T>,
}

impl<T: Field> ChebyshevWeights<T> {
    /// `σ_k` with 1-based `k`.
    pub fn sigma(&self, k: usize) -> &T {
        &self.sigma[k - 1]
    }
}

pub fn chebyshev_weights<T: Field>(a: &T, b: &T, c: &T, m: usize) -> ChebyshevWeights<T> {
    let bc = b.clone() * c.clone();
    let mut sigma: Vec<T> = Vec::with_capacity(m);
    for k in 0..m {
        let next = match k {
            0 => T::one(),
            1 => -a.clone(),
            _ => -(a.clone() * sigma[k - 1].clone()) - bc.clone() * sigma[k - 2].clone(),
        };
        sigma.push(next);
    }
    ChebyshevWeights {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        sigma,
    }
}

/// `Σ_{k=1}^{m} v_k · b^{m−k} · σ_k` with `0⁰ = 1`.
fn weighted_sum<T: Field>(values: &[T], weights: &ChebyshevWeights<T>) -> T {
    let m = values.len();
    let mut acc = T::zero();
    let mut b_power = T::one();
    // Walk k = m down to 1 so the power of b grows by one each step.
    for k in (1..=m).rev() {
        acc = acc + values[k - 1].clone() * b_power.clone() * weights.sigma(k).clone();
        b_power = b_power * weights.b.clone();
    }
    acc
}

/// Determinant of the matrix with first row `d` followed by banded rows
/// (sub-band `c`, band `a`, super-band `b`). Empty `d` gives the empty
/// determinant, 1.
pub fn det_lemma1<T: Field>(d: &[T], a: &T, b: &T, c: &T) -> T {
    let weights = chebyshev_weights(a, b, c, d.len());
    weighted_sum(d, &weights)
}

/// Determinant of `[[X1, d], [Y1, f], [0, band]]`: `X1·det(f-rows) − Y1·det(d-rows)`.
pub fn det_lemma2<T: Field>(x1: &T, y1: &T, d: &[T], f: &[T], a: &T, b: &T, c: &T) -> Result<T> {
    if d.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: f.len(),
        });
    }
    if d.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let weights = chebyshev_weights(a, b, c, d.len());
    Ok(x1.clone() * weighted_sum(f, &weights) - y1.clone() * weighted_sum(d, &weights))
}

/// The `m × m` matrix whose determinant [`det_lemma1`] evaluates.
pub fn lemma1_matrix<T: Field>(d: &[T], a: &T, b: &T, c: &T) -> Matrix<T> {
    let m = d.len();
    Matrix::from_fn(m, m, |i, j| {
        if i == 0 {
            d[j].clone()
        } else {
            band_entry(i, j, a, b, c)
        }
    })
}

/// The `(m+1) × (m+1)` matrix whose determinant [`det_lemma2`] evaluates.
pub fn lemma2_matrix<T: Field>(x1: &T, y1: &T, d: &[T], f: &[T], a: &T, b: &T, c: &T) -> Matrix<T> {
    let m = d.len();
    Matrix::from_fn(m + 1, m + 1, |i, j| match (i, j) {
        (0, 0) => x1.clone(),
        (1, 0) => y1.clone(),
        (_, 0) => T::zero(),
        (0, _) => d[j - 1].clone(),
        (1, _) => f[j - 1].clone(),
        _ => band_entry(i - 1, j - 1, a, b, c),
    })
}

/// Banded row `i ≥ 1` of the lemma-1 layout: `a` at column `i−1`, `b` at `i`,
/// `c` at `i−2`.
fn band_entry<T: Field>(i: usize, j: usize, a: &T, b: &T, c: &T) -> T {
    if j + 1 == i {
        a.clone()
    } else if j == i {
        b.clone()
    } else if j + 2 == i {
        c.clone()
    } else {
        T::zero()
    }
}
