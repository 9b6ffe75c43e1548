//! The third-order sequence `W_k = p W_{k-1} + q W_{k-2} + t W_{k-3}` with
//! `W_0 = 0, W_1 = a, W_2 = b`, and its named specializations.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_traits::Zero;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{rat, rational_text, Rational};

/// Sequence coefficients, initial values and the circulant twist `r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecurrenceParams {
    pub p: Rational,
    pub q: Rational,
    pub t: Rational,
    pub a: Rational,
    pub b: Rational,
    pub r: Rational,
}

impl RecurrenceParams {
    pub fn new(p: Rational, q: Rational, t: Rational, a: Rational, b: Rational, r: Rational) -> Self {
        RecurrenceParams { p, q, t, a, b, r }
    }

    pub fn from_ints(p: i64, q: i64, t: i64, a: i64, b: i64, r: i64) -> Self {
        Self::new(rat(p), rat(q), rat(t), rat(a), rat(b), rat(r))
    }

    pub fn with_twist(mut self, r: Rational) -> Self {
        self.r = r;
        self
    }

    /// `W_2 = p·W_1`, the restriction under which the closed-form inverse applies.
    pub fn satisfies_inverse_restriction(&self) -> bool {
        self.b == &self.p * &self.a
    }

    pub fn sequence(&self, count: usize) -> SequenceWindow {
        generate_sequence(self, count)
    }
}

impl fmt::Display for RecurrenceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} q={} t={} a={} b={} r={}",
            rational_text(&self.p),
            rational_text(&self.q),
            rational_text(&self.t),
            rational_text(&self.a),
            rational_text(&self.b),
            rational_text(&self.r)
        )
    }
}

impl Serialize for RecurrenceParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RecurrenceParams", 6)?;
        s.serialize_field("p", &rational_text(&self.p))?;
        s.serialize_field("q", &rational_text(&self.q))?;
        s.serialize_field("t", &rational_text(&self.t))?;
        s.serialize_field("a", &rational_text(&self.a))?;
        s.serialize_field("b", &rational_text(&self.b))?;
        s.serialize_field("r", &rational_text(&self.r))?;
        s.end()
    }
}

/// `W_0 .. W_{len-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceWindow {
    values: Vec<Rational>,
}

impl SequenceWindow {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

impl Index<usize> for SequenceWindow {
    type Output = Rational;

    fn index(&self, k: usize) -> &Rational {
        &self.values[k]
    }
}

pub fn generate_sequence(params: &RecurrenceParams, count: usize) -> SequenceWindow {
    let mut values: Vec<Rational> = Vec::with_capacity(count);
    for k in 0..count {
        let next = match k {
            0 => Rational::zero(),
            1 => params.a.clone(),
            2 => params.b.clone(),
            _ => {
                &params.p * &values[k - 1] + &params.q * &values[k - 2] + &params.t * &values[k - 3]
            }
        };
        values.push(next);
    }
    SequenceWindow { values }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Fibonacci,
    Jacobsthal,
    Pell,
    Tribonacci,
    SkewTribonacci,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fibonacci,
        Preset::Jacobsthal,
        Preset::Pell,
        Preset::Tribonacci,
        Preset::SkewTribonacci,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fibonacci => "fibonacci",
            Preset::Jacobsthal => "jacobsthal",
            Preset::Pell => "pell",
            Preset::Tribonacci => "tribonacci",
            Preset::SkewTribonacci => "skew-tribonacci",
        }
    }

    pub fn params(self) -> RecurrenceParams {
        match self {
            Preset::Fibonacci => RecurrenceParams::from_ints(1, 1, 0, 1, 1, 1),
            Preset::Jacobsthal => RecurrenceParams::from_ints(1, 2, 0, 1, 1, 1),
            Preset::Pell => RecurrenceParams::from_ints(2, 1, 0, 1, 2, 1),
            Preset::Tribonacci => RecurrenceParams::from_ints(1, 1, 1, 1, 1, 1),
            Preset::SkewTribonacci => RecurrenceParams::from_ints(1, 1, 1, 1, 1, -1),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

pub fn preset_params(name: &str) -> Result<RecurrenceParams> {
    name.parse::<Preset>().map(Preset::params)
}
