//! Machine-readable record of printed scalar displays that disagree with the
//! values obtained by carrying out the matrix construction explicitly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::recurrence::RecurrenceParams;

/// A printed display and the expression that replaces it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DisplayCorrection {
    pub location: &'static str,
    pub transcribed: &'static str,
    pub derived: &'static str,
}

pub const RHO_3: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem proof: rho_3",
    transcribed: "W_1 - r(W_n(p + h_n/g_n) - W_{n-1}(q + p h_n/g_n))",
    derived: "W_1 - r(W_n(p + h_n/g_n) + W_{n-1}(q - p h_n/g_n))",
};

pub const SCHUR_PIVOT_L: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem proof: l",
    transcribed: "W_1(rho_3 - W_1 y_n sum_{i=1}^{n-3} t'_{i,1} rho_{i+3} - W_1 z_n sum_{i=1}^{n-4} rho_{i+4})",
    derived: "W_1(rho_3 - W_1 y_n sum_{i=1}^{n-3} t'_{i,1} rho_{i+3} - W_1 z_n sum_{i=2}^{n-3} t'_{i,2} rho_{i+3})",
};

pub const BANDED_INVERSE: DisplayCorrection = DisplayCorrection {
    location: "banded lower-triangular inverse T^-1",
    transcribed: "t'_{i,j} = -(y_n t'_{i-2,j} + z_n t'_{i-1,j}) / x_n for i >= j+2",
    derived: "t'_{i,j} = -(y_n t'_{i-1,j} + z_n t'_{i-2,j}) / x_n for i >= j+2",
};

pub const BLOCK_J: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem proof: u_{i,j}",
    transcribed: "t'_{i,j} - (W_1^2/l)(y_n t'_{i,1} + z_n t'_{i,2}) sum_{k=j}^{n-3} rho_{k+3} t'_{k,j}",
    derived: "t'_{i,j} + (W_1^2/l)(y_n t'_{i,1} + z_n t'_{i,2}) sum_{k=j}^{n-3} rho_{k+3} t'_{k,j}",
};

pub const C_PRIME_2: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem: c'_2",
    transcribed: "W_1^2 g_n",
    derived: "1/g_n",
};

pub const L_LAST_COLUMN: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem proof: L_n[1][n]",
    transcribed: "-W_{n-2} + r f_n (W_3 - p W_2)/g_n",
    derived: "-W_2 + r f_n (W_3 - p W_2)/g_n",
};

pub const DETERMINANT_FORMULA: DisplayCorrection = DisplayCorrection {
    location: "determinant theorem: det(E_n)",
    transcribed: "W_1[(g_n + j f_n)(...) - h_n sum_{k=1}^{n-2}(...)]",
    derived: "W_1 det(Z_n) with Z_n read off G_n E_n F_n",
};

pub const INVERSE_FORMULA: DisplayCorrection = DisplayCorrection {
    location: "inverse theorem: circ_r(c_1, ..., c_n)",
    transcribed: "coefficients from the printed c'_k relations",
    derived: "first row of Q (Y_1^-1 (+) N^-1) P",
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub params: RecurrenceParams,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrataEntry {
    pub location: String,
    pub transcribed: String,
    pub derived: String,
    pub first_failing_case: CaseRecord,
}

/// One entry per display location, keeping the first case recorded.
#[derive(Clone, Debug, Default)]
pub struct ErrataLog {
    entries: BTreeMap<&'static str, ErrataEntry>,
}

impl ErrataLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, correction: &DisplayCorrection, params: &RecurrenceParams, n: usize) {
        self.entries.entry(correction.location).or_insert_with(|| ErrataEntry {
            location: correction.location.to_string(),
            transcribed: correction.transcribed.to_string(),
            derived: correction.derived.to_string(),
            first_failing_case: CaseRecord {
                params: params.clone(),
                n,
            },
        });
    }

    pub fn contains(&self, correction: &DisplayCorrection) -> bool {
        self.entries.contains_key(correction.location)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> Vec<ErrataEntry> {
        self.entries.values().cloned().collect()
    }
}
