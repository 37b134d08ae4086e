use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::par::Exec;
use crate::sat::{SatBackend, SatLimits};

use super::EngineError;

/// One autarky detector. `A(k)`: functions depend essentially on at most
/// `k` universals; `E1`/`E2`: at most one/two existentials assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    E1,
    A(u8),
    E2,
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detector::E1 => write!(f, "e1"),
            Detector::A(k) => write!(f, "a{k}"),
            Detector::E2 => write!(f, "e2"),
        }
    }
}

impl FromStr for Detector {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "e1" => Ok(Detector::E1),
            "e2" => Ok(Detector::E2),
            "a0" => Ok(Detector::A(0)),
            "a1" => Ok(Detector::A(1)),
            "a2" => Ok(Detector::A(2)),
            other => Err(EngineError::InvalidConfig(format!("unknown autarky system `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutarkySystemConfig {
    pub enable_e1: bool,
    /// Highest `k` for A_k detection; every lower `k` runs first.
    pub a_k: Option<u8>,
    /// 2 enables the pairwise E_2 search.
    pub e_k: u8,
    pub use_symmetry_compilation: bool,
    pub sat_limits: SatLimits,
    pub sat_backend: SatBackend,
    /// Largest `2^|D(y)| + 2^|D(y')|` the E_2 pair encoding accepts.
    pub e2_table_bound: usize,
    /// Largest number of free universals enumerated per clause by the direct
    /// (A_2 and E_2) encodings.
    pub direct_enum_cap: usize,
    /// Randomizes detector order, variable scan order and SAT tie-breaking.
    pub shuffle_seed: Option<u64>,
    pub exec: Exec,
}

impl Default for AutarkySystemConfig {
    /// E_1 + A_0 + A_1.
    fn default() -> Self {
        AutarkySystemConfig {
            enable_e1: true,
            a_k: Some(1),
            e_k: 1,
            use_symmetry_compilation: false,
            sat_limits: SatLimits::default(),
            sat_backend: SatBackend::Internal,
            e2_table_bound: 1 << 12,
            direct_enum_cap: 16,
            shuffle_seed: None,
            exec: Exec::default(),
        }
    }
}

impl AutarkySystemConfig {
    /// E_1, A_0..A_2 and E_2.
    pub fn all_systems() -> Self {
        AutarkySystemConfig {
            a_k: Some(2),
            e_k: 2,
            ..AutarkySystemConfig::default()
        }
    }

    /// From a list such as `e1,a0,a1,a2,e2`.
    pub fn from_systems(spec: &str) -> Result<Self, EngineError> {
        let mut cfg = AutarkySystemConfig {
            enable_e1: false,
            a_k: None,
            e_k: 1,
            ..AutarkySystemConfig::default()
        };
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            match part.parse::<Detector>()? {
                Detector::E1 => cfg.enable_e1 = true,
                Detector::E2 => cfg.e_k = 2,
                Detector::A(k) => cfg.a_k = Some(cfg.a_k.map_or(k, |cur| cur.max(k))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.a_k.is_some_and(|k| k > 2) {
            return Err(EngineError::InvalidConfig("a_k must be 0, 1 or 2".into()));
        }
        if !(1..=2).contains(&self.e_k) {
            return Err(EngineError::InvalidConfig("e_k must be 1 or 2".into()));
        }
        Ok(())
    }

    /// Detectors in cheapest-first order.
    pub fn detectors(&self) -> Vec<Detector> {
        let mut out = Vec::new();
        if self.enable_e1 {
            out.push(Detector::E1);
        }
        if let Some(k) = self.a_k {
            out.extend((0..=k).map(Detector::A));
        }
        if self.e_k == 2 {
            out.push(Detector::E2);
        }
        out
    }

    pub(crate) fn shuffled_detectors(&self, rng: Option<&mut ChaCha8Rng>) -> Vec<Detector> {
        let mut d = self.detectors();
        if let Some(rng) = rng {
            d.shuffle(rng);
        }
        d
    }
}
