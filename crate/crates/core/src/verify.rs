//! Grid verification: every determinant route against the exact oracle and,
//! where `W_2 = p·W_1`, every inverse route as well.
//!
//! Cases are evaluated in parallel and reassembled in canonical order
//! (parameters lexicographically, then `n`), so a report depends only on its
//! configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{
    det_closed_exact, det_pipeline_detailed, det_pipeline_with_branch, RootBranch, MIN_ORDER,
};
use crate::closed_form_inverse::{inverse_closed_workspace, inverse_pipeline, MIN_INVERSE_ORDER};
use crate::errata::{self, DisplayCorrection, ErrataEntry, ErrataLog};
use crate::error::Error;
use crate::rcirculant::{
    det_dft_float, det_exact_oracle, inverse_exact_oracle, is_rcirculant, RCirculantMatrix,
};
use crate::recurrence::{Preset, RecurrenceParams};
use crate::scalar::{rat, ratio, rational_text, Rational};

/// Relative tolerance of the advisory floating-point check.
pub const DFT_TOLERANCE: f64 = 1e-8;
/// Largest order at which the floating-point check runs.
pub const DFT_MAX_ORDER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Presets,
    Default,
}

impl Grid {
    /// Parameter points in canonical order.
    pub fn points(self) -> Vec<RecurrenceParams> {
        let mut points = match self {
            Grid::Presets => Preset::ALL.iter().map(|p| p.params()).collect(),
            Grid::Default => default_grid(),
        };
        points.sort();
        points.dedup();
        points
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "presets" => Ok(Grid::Presets),
            "default" => Ok(Grid::Default),
            other => Err(Error::PreconditionViolation(format!(
                "unknown grid '{other}' (expected presets or default)"
            ))),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grid::Presets => "presets",
            Grid::Default => "default",
        })
    }
}

/// p, q, t ∈ {−2..2}, a ∈ {1, 2}, b ∈ {1, 2, 3}, r ∈ {−2, −1, 1, 2, 1/2}.
pub fn default_grid() -> Vec<RecurrenceParams> {
    let twists = [rat(-2), rat(-1), rat(1), rat(2), ratio(1, 2)];
    let mut out = Vec::new();
    for p in -2..=2 {
        for q in -2..=2 {
            for t in -2..=2 {
                for a in 1..=2 {
                    for b in 1..=3 {
                        for r in &twists {
                            out.push(
                                RecurrenceParams::from_ints(p, q, t, a, b, 1).with_twist(r.clone()),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub grid: Grid,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Keep only this many `(params, n)` cases, drawn by a seeded shuffle.
    pub sample: Option<usize>,
    pub errata_tolerant: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: Grid::Default,
            n_min: 4,
            n_max: 10,
            seed: 0,
            sample: None,
            errata_tolerant: false,
        }
    }
}

/// The `(params, n)` cases a configuration covers, in canonical order.
pub fn cases(config: &VerifyConfig) -> Vec<(RecurrenceParams, usize)> {
    let mut all: Vec<(RecurrenceParams, usize)> = config
        .grid
        .points()
        .into_iter()
        .flat_map(|p| (config.n_min..=config.n_max).map(move |n| (p.clone(), n)))
        .collect();
    if let Some(k) = config.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        all.shuffle(&mut rng);
        all.truncate(k);
        all.sort();
    }
    all
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Determinant,
    Inverse,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseNote {
    pub params: RecurrenceParams,
    pub n: usize,
    pub check: Check,
    pub reason: String,
}

/// Everything learned from one `(params, n)` case.
#[derive(Clone, Debug, Default)]
pub struct CaseOutcome {
    pub determinant_checked: bool,
    pub inverse_checked: bool,
    pub skips: Vec<(Check, String)>,
    pub failures: Vec<(Check, String)>,
    pub warnings: Vec<(Check, String)>,
    pub corrections: Vec<DisplayCorrection>,
    pub det_g: Option<Rational>,
}

impl CaseOutcome {
    fn fail(&mut self, check: Check, msg: impl Into<String>) {
        self.failures.push((check, msg.into()));
    }

    fn skip(&mut self, check: Check, msg: impl Into<String>) {
        self.skips.push((check, msg.into()));
    }
}

pub fn evaluate_case(params: &RecurrenceParams, n: usize, errata_tolerant: bool) -> CaseOutcome {
    let mut out = CaseOutcome::default();
    let e = match RCirculantMatrix::from_recurrence(params, n) {
        Ok(e) => e,
        Err(err) => {
            out.fail(Check::Determinant, err.to_string());
            return out;
        }
    };
    let dense = e.materialize();
    let oracle = det_exact_oracle(&dense);

    check_determinant(params, n, &oracle, errata_tolerant, &mut out);
    check_float(&e, &oracle, n, &mut out);
    if n >= MIN_INVERSE_ORDER && params.satisfies_inverse_restriction() {
        check_inverse(params, n, &oracle, errata_tolerant, &mut out);
    }
    out
}

fn check_determinant(
    params: &RecurrenceParams,
    n: usize,
    oracle: &Rational,
    errata_tolerant: bool,
    out: &mut CaseOutcome,
) {
    if n < MIN_ORDER {
        out.skip(Check::Determinant, format!("n < {MIN_ORDER}: oracle only"));
        return;
    }
    let pipeline = match det_pipeline_detailed(params, n, RootBranch::Plus) {
        Ok(p) => p,
        Err(Error::DegenerateParameters(d)) => {
            out.skip(Check::Determinant, d.as_str());
            return;
        }
        Err(err) => {
            out.fail(Check::Determinant, format!("pipeline: {err}"));
            return;
        }
    };
    out.determinant_checked = true;
    out.det_g = Some(pipeline.det_g.clone());
    if &pipeline.value != oracle {
        out.fail(
            Check::Determinant,
            format!(
                "pipeline {} != oracle {}",
                rational_text(&pipeline.value),
                rational_text(oracle)
            ),
        );
    }
    match det_pipeline_with_branch(params, n, RootBranch::Minus) {
        Ok(other) if other == pipeline.value => {}
        Ok(other) => out.fail(
            Check::Determinant,
            format!("root branches disagree: {} vs {}", rational_text(&pipeline.value), rational_text(&other)),
        ),
        Err(err) => out.fail(Check::Determinant, format!("minus branch: {err}")),
    }
    match det_closed_exact(params, n) {
        Ok(closed) => match closed.to_rational() {
            None => out.fail(Check::Determinant, format!("closed form has nonzero ω-coefficient: {closed}")),
            Some(value) if value == pipeline.value => {}
            Some(_) if errata_tolerant => out.corrections.push(errata::DETERMINANT_FORMULA),
            Some(value) => out.fail(
                Check::Determinant,
                format!(
                    "closed {} != pipeline {}",
                    rational_text(&value),
                    rational_text(&pipeline.value)
                ),
            ),
        },
        Err(err) => out.fail(Check::Determinant, format!("closed: {err}")),
    }
}

fn check_float(e: &RCirculantMatrix, oracle: &Rational, n: usize, out: &mut CaseOutcome) {
    if n > DFT_MAX_ORDER {
        return;
    }
    match det_dft_float(e) {
        Ok(approx) => {
            let err = approx.scaled_error(oracle, e);
            if !(err <= DFT_TOLERANCE) {
                out.warnings.push((
                    Check::Float,
                    format!("relative error {err:e} against {}", rational_text(oracle)),
                ));
            }
        }
        Err(err) => out.warnings.push((Check::Float, err.to_string())),
    }
}

fn check_inverse(
    params: &RecurrenceParams,
    n: usize,
    oracle_det: &Rational,
    errata_tolerant: bool,
    out: &mut CaseOutcome,
) {
    if oracle_det.is_zero() {
        out.skip(Check::Inverse, "singular matrix");
        return;
    }
    let pipeline = match inverse_pipeline(params, n) {
        Ok(inv) => inv,
        Err(Error::DegenerateParameters(d)) => {
            out.skip(Check::Inverse, d.as_str());
            return;
        }
        Err(err) => {
            out.fail(Check::Inverse, format!("pipeline: {err}"));
            return;
        }
    };
    out.inverse_checked = true;
    let dense = RCirculantMatrix::from_recurrence(params, n)
        .expect("n >= 1")
        .materialize();
    match inverse_exact_oracle(&dense) {
        Ok(oracle) => {
            if oracle.row(0) != pipeline.first_row() {
                out.fail(Check::Inverse, "pipeline inverse differs from the oracle");
            }
            if !is_rcirculant(&oracle, &params.r) {
                out.fail(Check::Inverse, "oracle inverse is not r-circulant");
            }
        }
        Err(err) => out.fail(Check::Inverse, format!("oracle: {err}")),
    }
    match inverse_closed_workspace(params, n) {
        Ok(ws) => {
            out.corrections.extend(ws.corrections.iter().copied());
            if ws.first_row != pipeline.first_row() {
                if errata_tolerant {
                    out.corrections.push(errata::INVERSE_FORMULA);
                } else {
                    out.fail(Check::Inverse, "closed inverse differs from the pipeline");
                }
            }
        }
        Err(Error::DegenerateParameters(d)) => out.skip(Check::Inverse, format!("closed: {}", d.as_str())),
        Err(err) => out.fail(Check::Inverse, format!("closed: {err}")),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub cases: usize,
    pub determinant_checked: usize,
    pub inverse_checked: usize,
    pub skipped: usize,
    pub failures: usize,
    pub float_warnings: usize,
    pub errata: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub grid: Grid,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub sample: Option<usize>,
    pub errata_tolerant: bool,
    pub passed: bool,
    pub counts: Counts,
    /// Distinct values of `det(G_n)` seen at each order.
    pub det_g_by_n: BTreeMap<usize, BTreeSet<String>>,
    pub failures: Vec<CaseNote>,
    pub skips: Vec<CaseNote>,
    pub float_warnings: Vec<CaseNote>,
    pub errata: Vec<ErrataEntry>,
}

pub fn run_verify(config: &VerifyConfig) -> VerifyReport {
    let cases = cases(config);
    let outcomes: Vec<CaseOutcome> = cases
        .par_iter()
        .map(|(params, n)| evaluate_case(params, *n, config.errata_tolerant))
        .collect();

    let mut counts = Counts {
        cases: cases.len(),
        ..Counts::default()
    };
    let mut det_g_by_n: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut log = ErrataLog::new();
    let (mut failures, mut skips, mut float_warnings) = (Vec::new(), Vec::new(), Vec::new());
    let note = |params: &RecurrenceParams, n: usize, (check, reason): &(Check, String)| CaseNote {
        params: params.clone(),
        n,
        check: *check,
        reason: reason.clone(),
    };

    for ((params, n), outcome) in cases.iter().zip(&outcomes) {
        counts.determinant_checked += usize::from(outcome.determinant_checked);
        counts.inverse_checked += usize::from(outcome.inverse_checked);
        failures.extend(outcome.failures.iter().map(|f| note(params, *n, f)));
        skips.extend(outcome.skips.iter().map(|s| note(params, *n, s)));
        float_warnings.extend(outcome.warnings.iter().map(|w| note(params, *n, w)));
        for correction in &outcome.corrections {
            log.record(correction, params, *n);
        }
        if let Some(det_g) = &outcome.det_g {
            det_g_by_n.entry(*n).or_default().insert(rational_text(det_g));
        }
    }
    counts.skipped = skips.len();
    counts.failures = failures.len();
    counts.float_warnings = float_warnings.len();
    counts.errata = log.len();

    VerifyReport {
        command: "verify",
        grid: config.grid,
        n_min: config.n_min,
        n_max: config.n_max,
        seed: config.seed,
        sample: config.sample,
        errata_tolerant: config.errata_tolerant,
        passed: failures.is_empty(),
        counts,
        det_g_by_n,
        failures,
        skips,
        float_warnings,
        errata: log.entries(),
    }
}
