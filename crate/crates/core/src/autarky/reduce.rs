use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::DqbfFormula;
use crate::oracle::{apply_autarky, is_autarky, touched_clauses};

use super::ak::find_ak_autarky;
use super::certificate::{CertStep, ReductionCertificate};
use super::ek::find_ek_autarky;
use super::{AutarkySystemConfig, Detection, Detector, EngineError};

/// Runs one detector on `f`.
pub fn detect(
    f: &DqbfFormula,
    detector: Detector,
    cfg: &AutarkySystemConfig,
    rng: Option<&mut ChaCha8Rng>,
    seed: u64,
) -> Result<Detection, EngineError> {
    let found = match detector {
        Detector::E1 => find_ek_autarky(f, 1, cfg, rng, seed)?,
        Detector::E2 => find_ek_autarky(f, 2, cfg, rng, seed)?,
        Detector::A(k) => find_ak_autarky(f, k, cfg, seed)?,
    };
    if let Detection::Found(a) = &found {
        assert!(is_autarky(f, a), "{detector} returned a non-autarky");
    }
    Ok(found)
}

/// Applies autarkies found by the configured detectors until none finds
/// one. Returns the kernel and a certificate of the steps taken; the
/// certificate is marked incomplete when some detector gave up on a limit.
pub fn reduce_to_lean_kernel(
    f: &DqbfFormula,
    cfg: &AutarkySystemConfig,
) -> Result<(DqbfFormula, ReductionCertificate), EngineError> {
    cfg.validate()?;
    let mut rng = cfg.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut current = f.with_matrix(f.matrix().to_vec());
    let mut steps = Vec::new();
    let incomplete;

    'outer: loop {
        let detectors = cfg.shuffled_detectors(rng.as_mut());
        let mut gave_up = false;
        for det in detectors {
            let seed = match rng.as_mut() {
                Some(r) => r.random::<u64>() | 1,
                None => cfg.sat_limits.seed,
            };
            match detect(&current, det, cfg, rng.as_mut(), seed)? {
                Detection::Found(a) => {
                    let removed = touched_clauses(&current, &a);
                    debug_assert!(!removed.is_empty());
                    log::debug!("{det}: {} clauses removed", removed.len());
                    current = apply_autarky(&current, &a).expect("detected autarky applies");
                    steps.push(CertStep {
                        autarky: a,
                        removed,
                        system: Some(det.to_string()),
                        check: None,
                    });
                    continue 'outer;
                }
                Detection::Absent => {}
                Detection::Incomplete => gave_up = true,
            }
        }
        // only the last round decides whether the fixpoint is certain
        incomplete = gave_up;
        break;
    }
    let cert = ReductionCertificate {
        original_hash: f.digest(),
        kernel_hash: current.digest(),
        steps,
        incomplete,
    };
    Ok((current, cert))
}
