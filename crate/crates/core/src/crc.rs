//! Bitwise CRC over [`BitVector`]s: MSB-first, zero initial register, no
//! final XOR. The remainder is appended after the message.

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Generator polynomial of degree `width`, the leading `x^width` term implied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcPoly {
    width: u32,
    poly: u64,
}

impl CrcPoly {
    /// CRC-16/CCITT, `x^16 + x^12 + x^5 + 1`.
    pub const CCITT16: CrcPoly = CrcPoly {
        width: 16,
        poly: 0x1021,
    };
    /// CRC-8, `x^8 + x^2 + x + 1`.
    pub const CRC8: CrcPoly = CrcPoly {
        width: 8,
        poly: 0x07,
    };

    pub fn new(width: u32, poly: u64) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::InvalidConfig(format!(
                "CRC degree {width} outside 1..=63"
            )));
        }
        if poly >> width != 0 {
            return Err(Error::InvalidConfig(format!(
                "polynomial {poly:#x} has terms above x^{}",
                width - 1
            )));
        }
        Ok(Self { width, poly })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Remainder of `message · x^width` divided by the generator.
    pub fn remainder(&self, message: &[u8]) -> u64 {
        let mask = (1u64 << self.width) - 1;
        let top = self.width - 1;
        let mut reg = 0u64;
        for &b in message {
            let feedback = ((reg >> top) & 1) ^ b as u64;
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= self.poly;
            }
        }
        reg
    }

    fn remainder_bits(&self, message: &[u8]) -> Vec<u8> {
        let r = self.remainder(message);
        (0..self.width)
            .rev()
            .map(|k| ((r >> k) & 1) as u8)
            .collect()
    }
}

pub fn crc_attach(info: &BitVector, poly: &CrcPoly) -> BitVector {
    let mut bits = info.as_slice().to_vec();
    bits.extend(poly.remainder_bits(info.as_slice()));
    BitVector::from_bits(bits).expect("remainder bits are binary")
}

pub fn crc_check(word: &BitVector, poly: &CrcPoly) -> Result<bool> {
    if word.len() <= poly.width() as usize {
        return Err(Error::InvalidInput(format!(
            "word of {} bits is not longer than CRC degree {}",
            word.len(),
            poly.width()
        )));
    }
    let split = word.len() - poly.width() as usize;
    Ok(poly.remainder_bits(&word.as_slice()[..split]) == word.as_slice()[split..])
}
