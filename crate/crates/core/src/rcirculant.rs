//! r-circulant matrices and the brute-force oracles the closed forms are
//! checked against: fraction-free (Bareiss) determinants, Gauss–Jordan
//! inverses, and a floating-point eigenvalue product.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::recurrence::RecurrenceParams;
use crate::scalar::{Field, Rational};

/// `circ_r(c_1, ..., c_n)`: the first row plus the twist applied to wrapped entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RCirculantMatrix {
    first_row: Vec<Rational>,
    twist: Rational,
}

impl RCirculantMatrix {
    pub fn new(first_row: Vec<Rational>, twist: Rational) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(RCirculantMatrix { first_row, twist })
    }

    /// `E_n = circ_r(W_1, ..., W_n)`.
    pub fn from_recurrence(params: &RecurrenceParams, n: usize) -> Result<Self> {
        let w = params.sequence(n + 1);
        Self::new(w.values()[1..=n].to_vec(), params.r.clone())
    }

    pub fn order(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Rational] {
        &self.first_row
    }

    pub fn twist(&self) -> &Rational {
        &self.twist
    }

    pub fn materialize(&self) -> Matrix<Rational> {
        build_rcirculant(&self.first_row, &self.twist)
    }
}

/// Entry `(i, j)` is `row[j - i]` on and above the diagonal and
/// `twist · row[n + j - i]` below it.
pub fn build_rcirculant<T: Field>(first_row: &[T], twist: &T) -> Matrix<T> {
    let n = first_row.len();
    Matrix::from_fn(n, n, |i, j| {
        if j >= i {
            first_row[j - i].clone()
        } else {
            twist.clone() * first_row[n + j - i].clone()
        }
    })
}

pub fn is_rcirculant<T: Field>(m: &Matrix<T>, twist: &T) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let row = m.row(0);
    (1..n).all(|i| {
        (0..n).all(|j| {
            let expected = if j >= i {
                row[j - i].clone()
            } else {
                twist.clone() * row[n + j - i].clone()
            };
            m[(i, j)] == expected
        })
    })
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled to integers by the lcm of its denominators; the
/// product of those scales is divided out at the end.
pub fn det_exact_oracle(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let row = m.row(i);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            scale *= &lcm;
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect();

    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Rational::zero();
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let mut det = a[n - 1][n - 1].clone();
    if negate {
        det = -det;
    }
    Rational::new(det, scale)
}

pub fn inverse_exact_oracle(m: &Matrix<Rational>) -> Result<Matrix<Rational>> {
    m.inverse()
}

/// Floating-point determinant of an r-circulant from its eigenvalues
/// `λ_k = Σ_j c_{j+1} (ρ ω^k)^j`, `ρ^n = r`, `ω = e^{2πi/n}`.
///
/// The running product is kept as a mantissa and a decimal exponent so that
/// large orders do not overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DftDeterminant {
    /// Real part of the mantissa.
    pub mantissa_re: f64,
    /// Imaginary residue of the mantissa (rounding noise for real inputs).
    pub mantissa_im: f64,
    pub exponent10: i64,
}

impl DftDeterminant {
    /// The real part as an `f64` (may overflow to infinity for huge values).
    pub fn value(&self) -> f64 {
        self.mantissa_re * 10f64.powi(self.exponent10 as i32)
    }

    /// `|Im| / |λ|`, the imaginary residue relative to the magnitude.
    pub fn relative_imag_residue(&self) -> f64 {
        let norm = self.mantissa_re.hypot(self.mantissa_im);
        if norm == 0.0 {
            0.0
        } else {
            self.mantissa_im.abs() / norm
        }
    }

    pub fn to_decimal_string(&self) -> String {
        if self.mantissa_re == 0.0 {
            return "0".to_string();
        }
        let (m, e) = normalize10(self.mantissa_re, self.exponent10);
        format!("{m:.15}e{e}")
    }

    /// Relative error against an exact value (`|approx - exact| / |exact|`).
    pub fn relative_error(&self, exact: &Rational) -> f64 {
        let Some((em, ee)) = rational_to_scaled(exact) else {
            return if self.mantissa_re == 0.0 { 0.0 } else { f64::INFINITY };
        };
        // Bring the approximation to the exact value's exponent.
        let shift = self.exponent10 - ee;
        if shift > 300 {
            return f64::INFINITY;
        }
        let approx = if shift < -300 {
            0.0
        } else {
            self.mantissa_re * 10f64.powi(shift as i32)
        };
        ((approx - em) / em).abs()
    }

    /// [`relative_error`](Self::relative_error) for a nonzero exact value;
    /// for an exact zero, `|approx|` divided by the Hadamard bound of `m`.
    pub fn scaled_error(&self, exact: &Rational, m: &RCirculantMatrix) -> f64 {
        if !exact.is_zero() {
            return self.relative_error(exact);
        }
        if self.mantissa_re == 0.0 {
            return 0.0;
        }
        let log_approx = self.mantissa_re.abs().log10() + self.exponent10 as f64;
        10f64.powf(log_approx - hadamard_log10(&m.materialize()))
    }
}

/// `log10 ∏ ‖row_i‖₂`.
fn hadamard_log10(m: &Matrix<Rational>) -> f64 {
    (0..m.rows())
        .map(|i| {
            let logs: Vec<f64> = m
                .row(i)
                .iter()
                .filter_map(rational_to_scaled)
                .map(|(mant, exp)| mant.abs().log10() + exp as f64)
                .collect();
            let Some(top) = logs.iter().copied().reduce(f64::max) else {
                return f64::NEG_INFINITY;
            };
            let sum: f64 = logs.iter().map(|l| 10f64.powf(2.0 * (l - top))).sum();
            top + 0.5 * sum.log10()
        })
        .sum()
}

fn normalize10(mantissa: f64, exponent: i64) -> (f64, i64) {
    if mantissa == 0.0 || !mantissa.is_finite() {
        return (mantissa, exponent);
    }
    let shift = mantissa.abs().log10().floor() as i64;
    (mantissa / 10f64.powi(shift as i32), exponent + shift)
}

fn bigint_to_scaled(v: &BigInt) -> (f64, i64) {
    let digits = v.abs().to_string();
    let take = digits.len().min(17);
    let lead: f64 = digits[..take].parse().unwrap_or(0.0);
    let exp = (digits.len() - take) as i64;
    let signed = if v.is_negative() { -lead } else { lead };
    normalize10(signed, exp)
}

/// `(mantissa, exponent10)` for a nonzero rational.
fn rational_to_scaled(v: &Rational) -> Option<(f64, i64)> {
    if v.is_zero() {
        return None;
    }
    let (nm, ne) = bigint_to_scaled(v.numer());
    let (dm, de) = bigint_to_scaled(v.denom());
    Some(normalize10(nm / dm, ne - de))
}

pub fn det_dft_float(m: &RCirculantMatrix) -> Result<DftDeterminant> {
    if m.twist().is_zero() {
        return Err(Error::DegenerateParameters(crate::error::Degeneracy::TwistZero));
    }
    let n = m.order();
    let coeffs: Vec<f64> = m
        .first_row()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect();
    let r = m.twist().to_f64().unwrap_or(f64::NAN);
    let radius = r.abs().powf(1.0 / n as f64);
    let base_angle = if r < 0.0 { PI } else { 0.0 };

    let mut mantissa = Complex64::new(1.0, 0.0);
    let mut exponent: i64 = 0;
    for k in 0..n {
        let theta = (base_angle + 2.0 * PI * k as f64) / n as f64;
        let lambda: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| Complex64::from_polar(c * radius.powi(j as i32), theta * j as f64))
            .sum();
        mantissa *= lambda;
        let magnitude = mantissa.norm();
        if magnitude == 0.0 {
            return Ok(DftDeterminant {
                mantissa_re: 0.0,
                mantissa_im: 0.0,
                exponent10: 0,
            });
        }
        let shift = magnitude.log10().floor() as i64;
        mantissa /= 10f64.powi(shift as i32);
        exponent += shift;
    }
    Ok(DftDeterminant {
        mantissa_re: mantissa.re,
        mantissa_im: mantissa.im,
        exponent10: exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Preset;
    use crate::scalar::{rat, ratio};
    use proptest::prelude::*;

    fn row(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| rat(v)).collect()
    }

    /// Laplace expansion along the first row; exponential, test-only.
    fn cofactor_det(m: &Matrix<Rational>) -> Rational {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                m[(r + 1, if c < j { c } else { c + 1 })].clone()
            });
            let term = &m[(0, j)] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn build_examples() {
        assert_eq!(build_rcirculant(&row(&[5]), &rat(7)), Matrix::from_i64_rows(&[&[5]]));
        let m = build_rcirculant(&row(&[2, 3, 5]), &rat(7));
        assert_eq!(
            m,
            Matrix::from_i64_rows(&[&[2, 3, 5], &[35, 2, 3], &[21, 35, 2]])
        );
        let fib = RCirculantMatrix::from_recurrence(&Preset::Fibonacci.params(), 4)
            .unwrap()
            .materialize();
        assert_eq!(
            fib,
            Matrix::from_i64_rows(&[&[1, 1, 2, 3], &[3, 1, 1, 2], &[2, 3, 1, 1], &[1, 2, 3, 1]])
        );
    }

    #[test]
    fn oracle_determinants() {
        assert_eq!(det_exact_oracle(&Matrix::identity(3)), rat(1));
        // Anchors re-derived independently from the eigenvalue product over
        // the 4th roots of unity.
        let fib = build_rcirculant(&row(&[1, 1, 2, 3]), &rat(1));
        assert_eq!(det_exact_oracle(&fib), rat(-35));
        let trib = build_rcirculant(&row(&[1, 1, 2, 4]), &rat(1));
        assert_eq!(det_exact_oracle(&trib), rat(-160));
        assert_eq!(cofactor_det(&fib), rat(-35));
    }

    #[test]
    fn oracle_handles_zero_pivot_and_fractions() {
        let m = Matrix::from_rows(vec![
            vec![rat(0), ratio(1, 2), rat(1)],
            vec![ratio(2, 3), rat(0), rat(1)],
            vec![rat(1), rat(1), rat(0)],
        ]);
        assert_eq!(det_exact_oracle(&m), cofactor_det(&m));
        let singular = Matrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(det_exact_oracle(&singular), rat(0));
    }

    #[test]
    fn oracle_inverses() {
        let id = Matrix::<Rational>::identity(4);
        assert_eq!(inverse_exact_oracle(&id).unwrap(), id);
        let m = Matrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(
            inverse_exact_oracle(&m).unwrap(),
            Matrix::from_i64_rows(&[&[1, -1], &[-1, 2]])
        );
        let fib = build_rcirculant(&row(&[1, 1, 2, 3]), &rat(1));
        let inv = inverse_exact_oracle(&fib).unwrap();
        assert!((&fib * &inv).is_identity());
    }

    #[test]
    fn inverse_of_rcirculant_is_rcirculant() {
        for r in [rat(-1), rat(1), rat(2)] {
            let m = build_rcirculant(&row(&[1, 1, 2, 4, 7]), &r);
            let inv = inverse_exact_oracle(&m).unwrap();
            assert!(is_rcirculant(&inv, &r), "twist {r}");
        }
    }

    #[test]
    fn rcirculant_recognition() {
        let m = build_rcirculant(&row(&[1, 2, 3]), &rat(-2));
        assert!(is_rcirculant(&m, &rat(-2)));
        assert!(!is_rcirculant(&m, &rat(2)));
        assert!(!is_rcirculant(&Matrix::from_i64_rows(&[&[1, 2], &[3, 1]]), &rat(1)));
    }

    #[test]
    fn dft_examples() {
        let cases: [(&[i64], f64); 3] = [(&[1, 1, 2, 3], -35.0), (&[1, 1, 2, 4], -160.0), (&[1, 0, 0, 0, 0], 1.0)];
        for (values, expected) in cases {
            let m = RCirculantMatrix::new(row(values), rat(1)).unwrap();
            let d = det_dft_float(&m).unwrap();
            assert!((d.value() - expected).abs() < 1e-9, "{values:?}: {}", d.value());
        }
        let zero_twist = RCirculantMatrix::new(row(&[1, 2]), rat(0)).unwrap();
        assert!(matches!(
            det_dft_float(&zero_twist),
            Err(Error::DegenerateParameters(_))
        ));
    }

    #[test]
    fn dft_handles_values_beyond_f64_range() {
        let m = RCirculantMatrix::from_recurrence(&Preset::Fibonacci.params(), 64).unwrap();
        let exact = det_exact_oracle(&m.materialize());
        let d = det_dft_float(&m).unwrap();
        assert!(d.relative_error(&exact) < 1e-8, "{}", d.relative_error(&exact));
    }

    fn rational_entry() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=5).prop_map(|(n, d)| ratio(n, d))
    }

    fn square(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
        prop::collection::vec(rational_entry(), n * n).prop_map(move |v| {
            Matrix::from_fn(n, n, |i, j| v[i * n + j].clone())
        })
    }

    #[test]
    fn singular_dft_is_small_against_hadamard_bound() {
        // Every row is (1, 1, 1).
        let m = RCirculantMatrix::new(row(&[1, 1, 1]), rat(1)).unwrap();
        assert!(det_exact_oracle(&m.materialize()).is_zero());
        let approx = det_dft_float(&m).unwrap();
        assert!(approx.scaled_error(&rat(0), &m) < 1e-8);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(m in square(4)) {
            prop_assert_eq!(det_exact_oracle(&m), cofactor_det(&m));
        }

        #[test]
        fn bareiss_transpose_invariant(m in (1usize..7).prop_flat_map(square)) {
            prop_assert_eq!(det_exact_oracle(&m), det_exact_oracle(&m.transpose()));
            prop_assert_eq!(det_exact_oracle(&m), m.determinant());
        }

        #[test]
        fn dft_matches_exact(
            values in prop::collection::vec(-1_000_000i64..=1_000_000, 1..=32),
            r in prop::sample::select(vec![-2i64, -1, 1, 2, 3]),
        ) {
            let m = RCirculantMatrix::new(row(&values), rat(r)).unwrap();
            let exact = det_exact_oracle(&m.materialize());
            let approx = det_dft_float(&m).unwrap();
            prop_assume!(!exact.is_zero());
            prop_assert!(approx.relative_error(&exact) < 1e-8, "rel err {}", approx.relative_error(&exact));
        }

        #[test]
        fn oracle_inverse_closure(
            values in prop::collection::vec(-20i64..=20, 1..=7),
            r in prop::sample::select(vec![-2i64, -1, 1, 2]),
        ) {
            let m = build_rcirculant(&row(&values), &rat(r));
            if let Ok(inv) = inverse_exact_oracle(&m) {
                prop_assert!(is_rcirculant(&inv, &rat(r)));
                prop_assert!((&m * &inv).is_identity());
            } else {
                prop_assert!(det_exact_oracle(&m).is_zero());
            }
        }
    }
}
