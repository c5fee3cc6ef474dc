//! Time-domain engines: closed-form g¹(τ) traces, the non-markovian
//! polaron-formation map and a small-dimension Lindblad integrator.

pub mod density;
pub mod grid;
pub mod lindblad;
pub mod nonmarkovian;
pub mod trace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

pub use density::{DensityMatrix, InitialState, Layout};
pub use grid::TimeGrid;
pub use lindblad::{lindblad_evolve, propagate, IntegratorOptions, LindbladSpec};
pub use nonmarkovian::{nonmarkovian_map, nonmarkovian_state};
pub use trace::{g1_collective, g1_single, integrated_intensity, CorrelationTrace, G1Options, Kernel, ModeTerm};

/// Treatment of the phonon bath.
///
/// `Markovian` drops the linear phonon coupling (C ≡ 1); `InitialSlip`
/// keeps only its plateau (C ≡ C∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Concatenation,
    Polaron,
    Markovian,
    InitialSlip,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Concatenation, Method::Polaron, Method::Markovian, Method::InitialSlip];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Concatenation => "concatenation",
            Method::Polaron => "polaron",
            Method::Markovian => "markovian",
            Method::InitialSlip => "initial_slip",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "concatenation" | "cs" => Ok(Method::Concatenation),
            "polaron" | "pm" => Ok(Method::Polaron),
            "markovian" => Ok(Method::Markovian),
            "initial_slip" => Ok(Method::InitialSlip),
            other => Err(Error::Domain(format!("unknown method '{other}'"))),
        }
    }
}
