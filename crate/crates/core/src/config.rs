use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::construction::build_frozen_set;
use crate::crc::{crc_attach, CrcPoly};
use crate::error::{Error, Result};

/// Widest word the behavioral memory models pack into one machine word.
pub const MAX_PARALLELISM_LOG2: u32 = 6;

/// Parameters of one polar code and of the semi-parallel decoder running it.
///
/// `K` counts every unfrozen bit, CRC included. Lengths are powers of two by
/// construction: the code takes `n = log2 N` and `p = log2 P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCodeConfig {
    n: u32,
    k: usize,
    p: u32,
    list_size: usize,
    crc: Option<CrcPoly>,
    design_snr_db: f64,
    frozen: Vec<bool>,
}

impl PolarCodeConfig {
    /// Builds and validates a configuration with the Bhattacharyya frozen set
    /// at 0 dB and no CRC.
    pub fn new(n: u32, k: usize, p: u32, list_size: usize) -> Result<Self> {
        Self::with_options(n, k, p, list_size, None, 0.0)
    }

    pub fn with_options(
        n: u32,
        k: usize,
        p: u32,
        list_size: usize,
        crc: Option<CrcPoly>,
        design_snr_db: f64,
    ) -> Result<Self> {
        if !(2..=30).contains(&n) {
            return Err(Error::InvalidConfig(format!("n = {n} outside 2..=30")));
        }
        if p == 0 {
            return Err(Error::InvalidConfig(
                "parallelism P = 1 is not supported (p must be >= 1)".into(),
            ));
        }
        if p > n - 1 {
            return Err(Error::InvalidConfig(format!(
                "P = 2^{p} exceeds N/2 = 2^{}",
                n - 1
            )));
        }
        if p > MAX_PARALLELISM_LOG2 {
            return Err(Error::InvalidConfig(format!(
                "P = 2^{p} wider than the 64-bit word model"
            )));
        }
        if list_size == 0 || !list_size.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "list size {list_size} is not a power of two"
            )));
        }
        let crc_len = crc.map_or(0, |c| c.width() as usize);
        if crc_len >= k {
            return Err(Error::InvalidConfig(format!(
                "CRC length {crc_len} leaves no data bits in K = {k}"
            )));
        }
        let frozen_set = build_frozen_set(n, k, design_snr_db)?;
        let mut frozen = vec![false; 1 << n];
        for i in frozen_set {
            frozen[i] = true;
        }
        Ok(Self {
            n,
            k,
            p,
            list_size,
            crc,
            design_snr_db,
            frozen,
        })
    }

    /// Replaces the constructed frozen set with an explicit one.
    pub fn with_frozen_set(mut self, frozen_set: &[usize]) -> Result<Self> {
        let len = self.len();
        if frozen_set.len() != len - self.k {
            return Err(Error::InvalidConfig(format!(
                "frozen set has {} indices, expected N - K = {}",
                frozen_set.len(),
                len - self.k
            )));
        }
        let mut frozen = vec![false; len];
        for &i in frozen_set {
            if i >= len || frozen[i] {
                return Err(Error::InvalidConfig(format!(
                    "frozen index {i} out of range or repeated"
                )));
            }
            frozen[i] = true;
        }
        self.frozen = frozen;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Code length `N`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Parallelism `P`.
    pub fn parallelism(&self) -> usize {
        1 << self.p
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn crc(&self) -> Option<&CrcPoly> {
        self.crc.as_ref()
    }

    pub fn crc_len(&self) -> usize {
        self.crc.map_or(0, |c| c.width() as usize)
    }

    /// Data bits per frame, `K - crc_len`.
    pub fn data_len(&self) -> usize {
        self.k - self.crc_len()
    }

    pub fn rate(&self) -> f64 {
        self.data_len() as f64 / self.len() as f64
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.frozen[i]).collect()
    }

    /// Attaches the CRC to `data` and scatters the result over the unfrozen
    /// positions of an all-zero source word.
    pub fn source_word(&self, data: &BitVector) -> Result<BitVector> {
        if data.len() != self.data_len() {
            return Err(Error::InvalidInput(format!(
                "expected {} data bits, got {}",
                self.data_len(),
                data.len()
            )));
        }
        let info = match &self.crc {
            Some(poly) => crc_attach(data, poly),
            None => data.clone(),
        };
        let mut u = BitVector::zeros(self.len());
        for (pos, bit) in self.info_positions().into_iter().zip(info.iter()) {
            u.set(pos, bit == 1);
        }
        Ok(u)
    }

    /// Gathers the `K` unfrozen bits (data followed by CRC) of a source word.
    pub fn extract_info(&self, u: &BitVector) -> BitVector {
        BitVector::from_bits(self.info_positions().into_iter().map(|i| u[i]).collect())
            .expect("source word is binary")
    }
}
