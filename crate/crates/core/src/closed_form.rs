//! Closed-form determinant of `E_n = circ_r(W_1, ..., W_n)`.
//!
//! Two independent routes are provided:
//!
//! * [`det_pipeline`] materializes `K_n = G_n E_n F_n` over `Q(ω)`, checks
//!   its banded shape, clears `K[1][0]` with the row operation scaled by `j`,
//!   expands on the first column and evaluates the remaining bordered
//!   Hessenberg determinant with [`det_lemma2`].
//! * [`det_closed`] evaluates the final scalar formula directly from
//!   `f_n, g_n, h_n, j` and the Chebyshev weights of the band `(y_n, x_n, z_n)`.
//!
//! `e` is a root of `x_n e² + y_n e + z_n = 0`; either root works, which is
//! what [`RootBranch`] lets callers check.

use num_traits::{One, Zero};

use crate::error::{Degeneracy, Error, Result};
use crate::hessenberg::{chebyshev_weights, det_lemma2};
use crate::matrix::Matrix;
use crate::rcirculant::{build_rcirculant, det_exact_oracle};
use crate::recurrence::{RecurrenceParams, SequenceWindow};
use crate::scalar::{rat, QExt, Rational};

/// Smallest order handled by the closed-form determinant.
pub const MIN_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RootBranch {
    /// `e = (−y_n + ω) / (2x_n)`, or `−y_n/x_n` when `z_n = 0`.
    #[default]
    Plus,
    /// `e = (−y_n − ω) / (2x_n)`, or `0` when `z_n = 0`.
    Minus,
}

/// Every auxiliary scalar of the closed-form determinant for one `(params, n)`.
#[derive(Clone, Debug)]
pub struct TheoremQuantities {
    pub n: usize,
    /// `W_0 .. W_{n+2}`.
    pub w: SequenceWindow,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
    pub delta: Rational,
    pub e: QExt,
    pub j: Rational,
    pub f: QExt,
    pub g: QExt,
    pub h: QExt,
}

impl TheoremQuantities {
    /// `x_n e² + y_n e + z_n`, which is zero by construction.
    pub fn characteristic_residual(&self) -> QExt {
        let e = &self.e;
        &(&(e * e) * &QExt::from(&self.x)) + &(&(e * &QExt::from(&self.y)) + &QExt::from(&self.z))
    }
}

pub fn theorem_quantities(params: &RecurrenceParams, n: usize) -> Result<TheoremQuantities> {
    theorem_quantities_with_branch(params, n, RootBranch::Plus)
}

pub fn theorem_quantities_with_branch(
    params: &RecurrenceParams,
    n: usize,
    branch: RootBranch,
) -> Result<TheoremQuantities> {
    if n < MIN_ORDER {
        return Err(Error::UnsupportedOrder { n, min: MIN_ORDER });
    }
    if params.a.is_zero() {
        return Err(Error::DegenerateParameters(Degeneracy::AZero));
    }
    let RecurrenceParams { p, q, t, r, .. } = params;
    let w = params.sequence(n + 3);

    let x = &w[1] - r * &w[n + 1];
    if x.is_zero() {
        return Err(Error::DegenerateParameters(Degeneracy::XnZero));
    }
    let y = &w[2] - r * &w[n + 2] - p * &x;
    let z = -(r * t * &w[n]);
    let delta = &y * &y - rat(4) * &x * &z;

    let e = if z.is_zero() {
        match branch {
            RootBranch::Plus => QExt::rational(-&y / &x),
            RootBranch::Minus => QExt::zero(),
        }
    } else {
        let two_x = rat(2) * &x;
        let sign = match branch {
            RootBranch::Plus => rat(1),
            RootBranch::Minus => rat(-1),
        };
        QExt::new(-&y / &two_x, sign / two_x, delta.clone())
    };

    let j = -(r * (&w[2] - p * &w[1])) / &w[1];

    let powers = powers_of(&e, n);
    let lift = |v: Rational| QExt::rational(v);

    let f = (2..=n).fold(QExt::zero(), |acc, i| acc + lift(w[i].clone()) * powers[n - i].clone());

    let g_sum = (2..n).fold(QExt::zero(), |acc, i| {
        acc + lift(&w[i + 1] - p * &w[i]) * powers[n - i].clone()
    });
    let g = lift(&w[1] - p * r * &w[n]) + lift(r.clone()) * g_sum;

    let h_sum = (1..=n.saturating_sub(3)).fold(QExt::zero(), |acc, i| {
        acc + lift(w[i].clone()) * powers[n - 1 - i].clone()
    });
    let h = lift(&w[2] - p * &w[1] - q * r * &w[n])
        + lift(&w[1] - r * (p * &w[n] + q * &w[n - 1])) * e.clone()
        + lift(r * t) * h_sum;

    Ok(TheoremQuantities {
        n,
        w,
        x,
        y,
        z,
        delta,
        e,
        j,
        f,
        g,
        h,
    })
}

/// `e^0 .. e^max` with `0⁰ = 1`.
pub(crate) fn powers_of(e: &QExt, max: usize) -> Vec<QExt> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(QExt::one());
    for k in 1..=max {
        let next = &out[k - 1] * e;
        out.push(next);
    }
    out
}

/// `F_n`: `e_0` in the first row; column 1 carries `e^{n−2}, ..., e, 1`
/// below it; row `k` (for `1 ≤ k ≤ n−2`) has a 1 in column `n−k`.
pub fn f_matrix(e: &QExt, n: usize) -> Matrix<QExt> {
    let powers = powers_of(e, n);
    Matrix::from_fn(n, n, |i, j| {
        if i == 0 {
            if j == 0 {
                QExt::one()
            } else {
                QExt::zero()
            }
        } else if j == 1 {
            powers[n - 1 - i].clone()
        } else if i <= n - 2 && j == n - i {
            QExt::one()
        } else {
            QExt::zero()
        }
    })
}

/// `G_n`: row 0 is `e_0`; row `i ≥ 1` holds `1, −p, −q, −t` from column
/// `n−i` onward (truncated at the right edge), and rows 1..3 also carry
/// `−pr, −qr, −tr` in column 0.
pub fn g_matrix(params: &RecurrenceParams, n: usize) -> Matrix<Rational> {
    let RecurrenceParams { p, q, t, r, .. } = params;
    let pattern = [rat(1), -p.clone(), -q.clone(), -t.clone()];
    let mut g = Matrix::zeros(n, n);
    g[(0, 0)] = rat(1);
    for i in 1..n {
        for (offset, coeff) in pattern.iter().enumerate() {
            let col = n - i + offset;
            if col < n {
                g[(i, col)] = coeff.clone();
            }
        }
    }
    let column0 = [-(p * r), -(q * r), -(t * r)];
    for (i, v) in column0.into_iter().enumerate() {
        if i + 1 < n {
            g[(i + 1, 0)] = v;
        }
    }
    g
}

/// `E_n` lifted into `Q(ω)`.
pub(crate) fn e_matrix(params: &RecurrenceParams, w: &SequenceWindow, n: usize) -> Matrix<QExt> {
    let row: Vec<QExt> = (1..=n).map(|k| QExt::from(&w[k])).collect();
    build_rcirculant(&row, &QExt::from(&params.r))
}

/// Result of the constructive route, with the factors whose determinants
/// must multiply to one.
#[derive(Clone, Debug)]
pub struct PipelineDeterminant {
    pub value: Rational,
    pub det_g: Rational,
    pub det_f: QExt,
}

pub fn det_pipeline(params: &RecurrenceParams, n: usize) -> Result<Rational> {
    det_pipeline_detailed(params, n, RootBranch::Plus).map(|d| d.value)
}

pub fn det_pipeline_with_branch(params: &RecurrenceParams, n: usize, branch: RootBranch) -> Result<Rational> {
    det_pipeline_detailed(params, n, branch).map(|d| d.value)
}

fn verification(msg: impl Into<String>) -> Error {
    Error::InternalVerificationFailure(msg.into())
}

/// Checks that `K_n` has the bordered banded shape the reduction relies on:
/// zeros in columns 0 and 1 from row 3 down, `K[2][0] = 0`, and rows `i ≥ 3`
/// carrying `z_n, y_n, x_n` at columns `i−2, i−1, i` (column ≥ 2 only).
pub(crate) fn check_k_shape(k: &Matrix<QExt>, tq: &TheoremQuantities) -> Result<()> {
    let n = tq.n;
    if !k[(2, 0)].is_zero() {
        return Err(verification(format!("K[2][0] = {} is not zero", k[(2, 0)])));
    }
    let (x, y, z) = (QExt::from(&tq.x), QExt::from(&tq.y), QExt::from(&tq.z));
    for i in 3..n {
        for j in 0..n {
            let expected = if j < 2 {
                QExt::zero()
            } else if j == i {
                x.clone()
            } else if j + 1 == i {
                y.clone()
            } else if j + 2 == i {
                z.clone()
            } else {
                QExt::zero()
            };
            if k[(i, j)] != expected {
                return Err(verification(format!(
                    "K[{i}][{j}] = {} but the banded shape needs {expected}",
                    k[(i, j)]
                )));
            }
        }
    }
    Ok(())
}

pub fn det_pipeline_detailed(
    params: &RecurrenceParams,
    n: usize,
    branch: RootBranch,
) -> Result<PipelineDeterminant> {
    let tq = theorem_quantities_with_branch(params, n, branch)?;
    let e_n = e_matrix(params, &tq.w, n);
    let g_n = g_matrix(params, n);
    let f_n = f_matrix(&tq.e, n);
    let mut k = &(&g_n.to_qext() * &e_n) * &f_n;
    check_k_shape(&k, &tq)?;

    k.add_row_multiple(1, 0, &QExt::from(&tq.j));
    if !k[(1, 0)].is_zero() {
        return Err(verification("row operation with j left K[1][0] nonzero"));
    }

    // Laplace on column 0 leaves W_1 · det(Z_n), Z_n = K[1..][1..].
    let x1 = k[(1, 1)].clone();
    let y1 = k[(2, 1)].clone();
    let d: Vec<QExt> = (2..n).map(|c| k[(1, c)].clone()).collect();
    let f: Vec<QExt> = (2..n).map(|c| k[(2, c)].clone()).collect();
    let (band_a, band_b, band_c) = (QExt::from(&tq.y), QExt::from(&tq.x), QExt::from(&tq.z));
    let det_z = det_lemma2(&x1, &y1, &d, &f, &band_a, &band_b, &band_c)?;
    let det_k = &k[(0, 0)] * &det_z;

    let det_g = det_exact_oracle(&g_n);
    let det_f = f_n.determinant();
    let det_gf = &det_f * &QExt::from(&det_g);
    if !det_gf.is_one() {
        return Err(verification(format!("det(G_n F_n) = {det_gf}, expected 1")));
    }
    let value = det_k
        .to_rational()
        .ok_or_else(|| verification(format!("pipeline determinant {det_k} has a nonzero ω-coefficient")))?;
    Ok(PipelineDeterminant { value, det_g, det_f })
}

/// The closed formula evaluated in `Q(ω)`, before the ω-coefficient check.
pub fn det_closed_exact(params: &RecurrenceParams, n: usize) -> Result<QExt> {
    let tq = theorem_quantities(params, n)?;
    Ok(closed_formula(params, &tq))
}

pub(crate) fn closed_formula(params: &RecurrenceParams, tq: &TheoremQuantities) -> QExt {
    let RecurrenceParams { p, q, t, r, .. } = params;
    let (n, w) = (tq.n, &tq.w);
    let weights = chebyshev_weights(&tq.y, &tq.x, &tq.z, n - 2);

    let mut x_powers = vec![rat(1)];
    for k in 1..=n {
        let next = &x_powers[k - 1] * &tq.x;
        x_powers.push(next);
    }

    let leading = &w[1] - r * (p * &w[n] + q * &w[n - 1]);
    let mut first = &leading * &x_powers[n - 3];
    for k in 2..=n - 2 {
        first += r * t * &w[n - 1 - k] * &x_powers[n - 2 - k] * weights.sigma(k);
    }

    let pr_minus_j = p * r - &tq.j;
    let mut second = Rational::zero();
    for k in 1..=n - 2 {
        let coeff = r * &w[n + 1 - k] - &pr_minus_j * &w[n - k];
        second += coeff * &x_powers[n - 2 - k] * weights.sigma(k);
    }

    let g_plus_jf = &tq.g + &(&tq.f * &QExt::from(&tq.j));
    let bracket = &(&g_plus_jf * &QExt::from(first)) - &(&tq.h * &QExt::from(second));
    &QExt::from(&w[1]) * &bracket
}

pub fn det_closed(params: &RecurrenceParams, n: usize) -> Result<Rational> {
    let raw = det_closed_exact(params, n)?;
    raw.to_rational()
        .ok_or_else(|| verification(format!("closed-form determinant {raw} has a nonzero ω-coefficient")))
}
