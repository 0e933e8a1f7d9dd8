//! BPSK over AWGN and Monte Carlo frame error rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::MemoryKind;
use crate::bits::BitVector;
use crate::config::PolarCodeConfig;
use crate::decoder::ListDecoder;
use crate::error::{Error, Result};
use crate::polar::kronecker_encode;
use crate::scalar::Llr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// Data bits per channel use.
    pub rate: f64,
    pub rng_seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64, rng_seed: u64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidInput(format!("Eb/N0 {ebn0_db} is not finite")));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::InvalidInput(format!("rate {rate} outside (0, 1)")));
        }
        Ok(Self {
            ebn0_db,
            rate,
            rng_seed,
        })
    }

    /// Noise standard deviation for unit-energy BPSK.
    pub fn sigma(&self) -> f64 {
        (1.0 / (2.0 * self.rate * 10f64.powf(self.ebn0_db / 10.0))).sqrt()
    }
}

/// Maps bit `b` to `1 - 2b`, adds Gaussian noise, returns `2y/σ²`.
pub fn bpsk_awgn<T: Llr, R: Rng + ?Sized>(
    codeword: &BitVector,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<T>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma {sigma} must be positive")));
    }
    let noise = Normal::new(0.0, sigma).expect("sigma checked");
    let scale = 2.0 / (sigma * sigma);
    Ok(codeword
        .iter()
        .map(|b| {
            let y = 1.0 - 2.0 * f64::from(b) + noise.sample(rng);
            T::from_f64_lossy(scale * y)
        })
        .collect())
}

/// Seed of frame `index` under `master`: splitmix64 finalizer applied to
/// `master + (index + 1)·0x9E3779B97F4A7C15`.
pub fn frame_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = frames as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub errors: u64,
    pub fer: f64,
    pub ci_halfwidth: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl FerPoint {
    pub fn from_counts(ebn0_db: f64, frames: u64, errors: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, frames);
        Self {
            ebn0_db,
            frames,
            errors,
            fer: if frames == 0 { 0.0 } else { errors as f64 / frames as f64 },
            ci_halfwidth: (ci_high - ci_low) / 2.0,
            ci_low,
            ci_high,
        }
    }
}

/// One random frame: data, transmitted codeword, received LLRs.
pub fn random_frame<T: Llr>(
    config: &PolarCodeConfig,
    sigma: f64,
    seed: u64,
) -> Result<(BitVector, Vec<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<u8> = (0..config.data_len()).map(|_| rng.random::<bool>() as u8).collect();
    let data = BitVector::from_bits(data)?;
    let x = kronecker_encode(&config.source_word(&data)?)?;
    let llrs = bpsk_awgn(&x, sigma, &mut rng)?;
    Ok((data, llrs))
}

/// Decodes `frames` independent frames in parallel. Results depend only on
/// the configuration and `channel.rng_seed`.
pub fn fer_montecarlo<T: Llr>(
    config: &PolarCodeConfig,
    kind: MemoryKind,
    channel: &ChannelConfig,
    frames: u64,
) -> Result<FerPoint> {
    if frames == 0 {
        return Err(Error::InvalidInput("at least one frame is needed".into()));
    }
    let decoder = ListDecoder::<T>::new(config.clone(), kind);
    let sigma = channel.sigma();
    let errors = (0..frames)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let (data, llrs) = random_frame::<T>(config, sigma, frame_seed(channel.rng_seed, i))?;
            let out = decoder.decode_frame(&llrs)?;
            Ok(u64::from(out.data != data))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(FerPoint::from_counts(channel.ebn0_db, frames, errors))
}

pub const FER_CSV_HEADER: &str = "ebn0_db,frames,errors,fer,ci_halfwidth";

pub fn fer_csv(points: &[FerPoint]) -> String {
    let mut out = String::from(FER_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.ebn0_db, p.frames, p.errors, p.fer, p.ci_halfwidth
        ));
    }
    out
}
