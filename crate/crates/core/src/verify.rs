//! Self-check suites: cross-model equivalence and recovery round trips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::{recover_block, MemoryKind};
use crate::bits::BitVector;
use crate::config::PolarCodeConfig;
use crate::decoder::{DecodeOptions, ListDecoder};
use crate::error::Result;
use crate::polar::partial_sums;
use crate::sim::{frame_seed, random_frame, ChannelConfig};

/// Eb/N0 of the noisy frames used by the equivalence suite, low enough that
/// list management makes real choices.
pub const VERIFY_EBN0_DB: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn from_outcomes(name: &str, outcomes: Vec<std::result::Result<(), String>>) -> Self {
        let failed: Vec<String> = outcomes.into_iter().filter_map(|o| o.err()).collect();
        let total = failed.len() as u64;
        Self {
            name: name.to_string(),
            passed: 0,
            failed: total,
            first_failure: failed.into_iter().next(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }
}

fn equivalence_trial(config: &PolarCodeConfig, sigma: f64, seed: u64) -> std::result::Result<(), String> {
    let (_, llrs) = random_frame::<f64>(config, sigma, seed).map_err(|e| e.to_string())?;
    let checked = ListDecoder::<f64>::with_options(
        config.clone(),
        MemoryKind::Merged,
        DecodeOptions {
            record_trace: false,
            cross_check: true,
        },
    )
    .decode_frame(&llrs)
    .map_err(|e| format!("seed {seed:#x}: {e}"))?;
    for kind in MemoryKind::ALL {
        let out = ListDecoder::<f64>::new(config.clone(), kind)
            .decode_frame(&llrs)
            .map_err(|e| format!("seed {seed:#x}, {kind}: {e}"))?;
        if out.source_word != checked.source_word || out.crc_pass != checked.crc_pass {
            return Err(format!("seed {seed:#x}: {kind} output differs"));
        }
    }
    Ok(())
}

/// Decodes `trials` noisy frames with all path memories side by side,
/// comparing every surviving prefix after every bit and the final outputs.
pub fn equivalence_suite(config: &PolarCodeConfig, trials: u64, seed: u64) -> Result<SuiteResult> {
    let sigma = ChannelConfig::new(VERIFY_EBN0_DB, config.rate(), seed)?.sigma();
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| equivalence_trial(config, sigma, frame_seed(seed, i)))
        .collect();
    let mut r = SuiteResult::from_outcomes("cross-model equivalence", outcomes);
    r.passed = trials - r.failed;
    Ok(r)
}

/// Recovers `trials` random groups of every length from `P` to `N`.
pub fn recovery_suite(config: &PolarCodeConfig, trials: u64, seed: u64) -> Result<SuiteResult> {
    let p = config.p();
    let jobs: Vec<(u32, u64)> = (p..=config.n())
        .flat_map(|stage| (0..trials).map(move |i| (stage, i)))
        .collect();
    let outcomes: Vec<_> = jobs
        .into_par_iter()
        .map(|(stage, i)| {
            let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(seed ^ u64::from(stage), i));
            let bits: Vec<u8> = (0..1usize << stage).map(|_| rng.random::<bool>() as u8).collect();
            let u = BitVector::from_bits(bits).expect("random bits");
            let s = partial_sums(&u, stage).map_err(|e| e.to_string())?;
            let r = recover_block(&s, p).map_err(|e| e.to_string())?;
            if r.bits == u {
                Ok(())
            } else {
                Err(format!("stage {stage}, trial {i}: recovered {} from {}", r.bits, u))
            }
        })
        .collect();
    let total = outcomes.len() as u64;
    let mut r = SuiteResult::from_outcomes("recovery round-trip", outcomes);
    r.passed = total - r.failed;
    Ok(r)
}

pub fn verify(config: &PolarCodeConfig, trials: u64, seed: u64) -> Result<VerifyReport> {
    Ok(VerifyReport {
        suites: vec![
            equivalence_suite(config, trials, seed)?,
            recovery_suite(config, trials, seed)?,
        ],
    })
}
