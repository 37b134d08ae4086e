//! Autarky detection and reduction to a lean kernel.

mod ak;
mod certificate;
mod config;
mod e1;
mod ek;
mod reduce;
mod witness;

use thiserror::Error;

use crate::oracle::Autarky;
use crate::sat::SatError;

pub use ak::{encode_ak, find_ak_autarky, solve_encoding, witnesses_for, AkClauseEncoding, AkEncoding};
pub use certificate::{check_certificate, CertCheck, CertParseError, CertStep, ReductionCertificate};
pub use config::{AutarkySystemConfig, Detector};
pub use e1::{e1_function, find_e1_autarky, find_e1_autarky_in, forcing_regions, ForcingRegion};
pub use ek::find_ek_autarky;
pub use reduce::{detect, reduce_to_lean_kernel};
pub use witness::{
    clause_witnesses, compile_tautology_witnesses, compile_with_symmetry, TautologyWitness,
    WitnessFunc, WitnessKind, WitnessMap,
};

/// Result of one detector run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    Found(Autarky),
    /// The detector is certain no autarky of its class exists.
    Absent,
    /// The detector stopped on a configured limit.
    Incomplete,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid autarky system configuration: {0}")]
    InvalidConfig(String),
    #[error("decoded assignment is not an autarky ({0})")]
    DecodedNotAutarky(String),
    #[error("orbit permutation does not carry valid witnesses to clause {0}")]
    OrbitPermutationInvalid(usize),
    #[error(transparent)]
    Sat(#[from] SatError),
}
