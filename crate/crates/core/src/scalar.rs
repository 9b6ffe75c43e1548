//! Exact scalars: arbitrary-precision rationals and the quadratic extension
//! `Q(ω)` with `ω² = Δ`.
//!
//! Every matrix routine in the crate is generic over [`Field`], which both
//! [`Rational`] and [`QExt`] implement. `Δ` is kept verbatim (no squarefree
//! reduction); two irrational values combine only when their `Δ` agree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision rational (`den > 0`, `gcd(num, den) = 1`).
pub type Rational = BigRational;

/// Field operations needed by the dense matrix code.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    fn from_rational(value: &Rational) -> Self;
}

impl Field for Rational {
    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` (optional sign, `den` optional) into canonical form.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"num/den"`, or `"num"` when the denominator is 1.
pub fn rational_text(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// Exact rational square root when `value` is the square of a rational.
pub fn rational_sqrt(value: &Rational) -> Option<Rational> {
    let num = integer_sqrt_exact(value.numer())?;
    let den = integer_sqrt_exact(value.denom())?;
    Some(Rational::new(num, den))
}

pub fn is_rational_square(value: &Rational) -> bool {
    rational_sqrt(value).is_some()
}

/// `alpha + beta·ω` with `ω² = delta`.
///
/// Construction collapses eagerly: if `delta` is a rational square the value is
/// stored as its rational embedding (`beta = 0`), so `Q(ω)` is always a field
/// whenever `beta ≠ 0`.
#[derive(Clone, Debug)]
pub struct QExt {
    alpha: Rational,
    beta: Rational,
    delta: Rational,
}

/// Binary operations accepted by [`QExt::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QOp {
    Add,
    Sub,
    Mul,
}

impl QExt {
    pub fn new(alpha: Rational, beta: Rational, delta: Rational) -> Self {
        if beta.is_zero() {
            return QExt { alpha, beta, delta };
        }
        match rational_sqrt(&delta) {
            Some(root) => QExt {
                alpha: alpha + beta * root,
                beta: Rational::zero(),
                delta,
            },
            None => QExt { alpha, beta, delta },
        }
    }

    /// Rational embedding (with the neutral tag `Δ = 0`).
    pub fn rational(value: Rational) -> Self {
        QExt {
            alpha: value,
            beta: Rational::zero(),
            delta: Rational::zero(),
        }
    }

    /// The formal square root `ω` of `delta` (collapses if `delta` is a square).
    pub fn sqrt_of(delta: Rational) -> Self {
        QExt::new(Rational::zero(), Rational::one(), delta)
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn is_rational(&self) -> bool {
        self.beta.is_zero()
    }

    /// The rational value, if the ω-coefficient is zero.
    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.alpha.clone())
    }

    pub fn conjugate(&self) -> Self {
        QExt {
            alpha: self.alpha.clone(),
            beta: -self.beta.clone(),
            delta: self.delta.clone(),
        }
    }

    /// `α² − β²Δ`.
    pub fn norm(&self) -> Rational {
        &self.alpha * &self.alpha - &self.beta * &self.beta * &self.delta
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        QExt::new(&self.alpha * factor, &self.beta * factor, self.delta.clone())
    }

    fn shared_delta(&self, other: &QExt) -> Result<Rational> {
        match (self.is_rational(), other.is_rational()) {
            (false, false) if self.delta != other.delta => Err(Error::MismatchedExtension {
                left: self.delta.clone(),
                right: other.delta.clone(),
            }),
            (false, _) => Ok(self.delta.clone()),
            (true, false) => Ok(other.delta.clone()),
            (true, true) => Ok(if self.delta.is_zero() {
                other.delta.clone()
            } else {
                self.delta.clone()
            }),
        }
    }

    pub fn combine(&self, other: &QExt, op: QOp) -> Result<QExt> {
        let delta = self.shared_delta(other)?;
        let (alpha, beta) = match op {
            QOp::Add => (&self.alpha + &other.alpha, &self.beta + &other.beta),
            QOp::Sub => (&self.alpha - &other.alpha, &self.beta - &other.beta),
            QOp::Mul => (
                &self.alpha * &other.alpha + &self.beta * &other.beta * &delta,
                &self.alpha * &other.beta + &other.alpha * &self.beta,
            ),
        };
        Ok(QExt::new(alpha, beta, delta))
    }

    pub fn checked_add(&self, other: &QExt) -> Result<QExt> {
        self.combine(other, QOp::Add)
    }

    pub fn checked_sub(&self, other: &QExt) -> Result<QExt> {
        self.combine(other, QOp::Sub)
    }

    pub fn checked_mul(&self, other: &QExt) -> Result<QExt> {
        self.combine(other, QOp::Mul)
    }

    /// `(α + βω)⁻¹ = (α − βω) / (α² − β²Δ)`.
    pub fn invert(&self) -> Result<QExt> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let norm = self.norm();
        // Nonzero: a vanishing norm with beta != 0 would make delta a square,
        // which construction rules out.
        let inv_norm = norm.recip();
        Ok(self.conjugate().scale(&inv_norm))
    }

    pub fn pow(&self, exp: usize) -> QExt {
        let mut acc = QExt::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl PartialEq for QExt {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
            && self.beta == other.beta
            && (self.beta.is_zero() || self.delta == other.delta)
    }
}

impl fmt::Display for QExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", rational_text(&self.alpha))
        } else {
            write!(
                f,
                "{} + ({})*sqrt({})",
                rational_text(&self.alpha),
                rational_text(&self.beta),
                rational_text(&self.delta)
            )
        }
    }
}

impl From<Rational> for QExt {
    fn from(value: Rational) -> Self {
        QExt::rational(value)
    }
}

impl From<&Rational> for QExt {
    fn from(value: &Rational) -> Self {
        QExt::rational(value.clone())
    }
}

macro_rules! qext_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl<'a> $trait<&'a QExt> for &'a QExt {
            type Output = QExt;
            fn $method(self, rhs: &'a QExt) -> QExt {
                self.combine(rhs, $op)
                    .expect("arithmetic across distinct quadratic extensions")
            }
        }

        impl $trait for QExt {
            type Output = QExt;
            fn $method(self, rhs: QExt) -> QExt {
                (&self).$method(&rhs)
            }
        }
    };
}

qext_binop!(Add, add, QOp::Add);
qext_binop!(Sub, sub, QOp::Sub);
qext_binop!(Mul, mul, QOp::Mul);

impl Neg for QExt {
    type Output = QExt;
    fn neg(self) -> QExt {
        QExt {
            alpha: -self.alpha,
            beta: -self.beta,
            delta: self.delta,
        }
    }
}

impl Neg for &QExt {
    type Output = QExt;
    fn neg(self) -> QExt {
        -self.clone()
    }
}

impl Zero for QExt {
    fn zero() -> Self {
        QExt::rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }
}

impl One for QExt {
    fn one() -> Self {
        QExt::rational(Rational::one())
    }
}

impl Field for QExt {
    fn checked_inv(&self) -> Option<Self> {
        self.invert().ok()
    }

    fn from_rational(value: &Rational) -> Self {
        QExt::rational(value.clone())
    }
}

impl FromStr for QExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(QExt::rational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(alpha: Rational, beta: Rational, delta: i64) -> QExt {
        QExt::new(alpha, beta, rat(delta))
    }

    #[test]
    fn construct_rational_embedding() {
        let x = q(ratio(1, 2), rat(0), 5);
        assert_eq!(x.alpha(), &ratio(1, 2));
        assert!(x.is_rational());
    }

    #[test]
    fn construct_collapses_perfect_square() {
        let x = q(rat(0), rat(1), 9);
        assert_eq!(x.alpha(), &rat(3));
        assert!(x.beta().is_zero());

        let y = QExt::new(rat(1), rat(2), ratio(4, 9));
        assert_eq!(y.to_rational(), Some(ratio(7, 3)));
    }

    #[test]
    fn construct_keeps_irreducible() {
        let x = q(rat(1), rat(1), 2);
        assert_eq!(x.alpha(), &rat(1));
        assert_eq!(x.beta(), &rat(1));
        assert_eq!(x.delta(), &rat(2));
    }

    #[test]
    fn conjugate_product() {
        let x = q(rat(1), rat(1), 2);
        let y = q(rat(1), rat(-1), 2);
        assert_eq!(x * y, QExt::rational(rat(-1)));
    }

    #[test]
    fn omega_squared_negative_delta() {
        let w = q(rat(0), rat(1), -60);
        assert_eq!(&w * &w, QExt::rational(rat(-60)));
    }

    #[test]
    fn additive_cancellation() {
        let sum = q(rat(1), rat(2), 5) + q(rat(3), rat(-2), 5);
        assert_eq!(sum, QExt::rational(rat(4)));
    }

    #[test]
    fn mismatched_extension_is_rejected() {
        let x = q(rat(1), rat(1), 2);
        let y = q(rat(1), rat(1), 3);
        assert!(matches!(
            x.checked_mul(&y),
            Err(Error::MismatchedExtension { .. })
        ));
        // A rational operand combines with anything.
        let r = q(rat(5), rat(0), 7);
        assert_eq!(x.checked_add(&r).unwrap(), q(rat(6), rat(1), 2));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            QExt::rational(rat(2)).invert().unwrap(),
            QExt::rational(ratio(1, 2))
        );

        let x = q(rat(1), rat(1), 2);
        let inv = x.invert().unwrap();
        assert_eq!(inv, q(rat(-1), rat(1), 2));
        assert_eq!(&x * &inv, QExt::one());

        let w = q(rat(0), rat(1), -3);
        let inv = w.invert().unwrap();
        assert_eq!(inv, q(rat(0), ratio(-1, 3), -3));
        assert_eq!(&w * &inv, QExt::one());

        assert!(matches!(QExt::zero().invert(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert_eq!(parse_rational("2/-4").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.5").is_err());
        assert_eq!(rational_text(&ratio(6, 3)), "2");
        assert_eq!(rational_text(&ratio(-33, 16)), "-33/16");
    }

    #[test]
    fn square_detection() {
        assert!(is_rational_square(&ratio(9, 4)));
        assert!(is_rational_square(&rat(0)));
        assert!(!is_rational_square(&rat(-4)));
        assert!(!is_rational_square(&ratio(2, 9)));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
    }

    fn qext_with(delta: i64) -> impl Strategy<Value = QExt> {
        (small_rational(), small_rational()).prop_map(move |(a, b)| QExt::new(a, b, rat(delta)))
    }

    fn any_delta() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 5, -3, -60, 0, 9])
    }

    proptest! {
        #[test]
        fn inverse_round_trip(x in any_delta().prop_flat_map(qext_with)) {
            prop_assume!(!x.is_zero());
            let inv = x.invert().unwrap();
            prop_assert_eq!(&x * &inv, QExt::one());
        }

        #[test]
        fn ring_axioms(
            (x, y, z) in any_delta().prop_flat_map(|d| (qext_with(d), qext_with(d), qext_with(d)))
        ) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }

        #[test]
        fn perfect_square_delta_always_collapses(a in small_rational(), b in small_rational(), s in small_rational()) {
            let delta = &s * &s;
            prop_assert!(QExt::new(a, b, delta).is_rational());
        }
    }
}
