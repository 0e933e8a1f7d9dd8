use std::fmt;
use std::ops::{BitXor, Index};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-length vector of binary symbols, one byte per symbol.
///
/// Holds source words, codewords and partial-sum vectors. Every element is
/// 0 or 1; the constructors reject anything else.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidInput(format!(
                "symbol {} at position {pos} is not binary",
                bits[pos]
            )));
        }
        Ok(Self { bits })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            bits: bits.iter().map(|&b| b as u8).collect(),
        }
    }

    /// Parses a string of `0`/`1` characters (whitespace ignored).
    pub fn parse_binary(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidInput(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }

    /// Packs the low `len` bits of `word` (bit k of the integer is element k).
    pub fn from_word(word: u64, len: usize) -> Self {
        Self {
            bits: (0..len).map(|k| ((word >> k) & 1) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.bits[i] = bit as u8;
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        Self {
            bits: self.bits[start..end].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// Hex form `"<len>:<digits>"`, bits packed MSB-first into nibbles and the
    /// last nibble zero-padded on the right. `[1,0,1,1,1]` -> `"5:b8"`.
    pub fn to_hex(&self) -> String {
        let mut out = format!("{}:", self.bits.len());
        for chunk in self.bits.chunks(4) {
            let nib = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | (b << (3 - k)));
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let (len, digits) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("missing length prefix in {s:?}")))?;
        let len: usize = len
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad length in {s:?}")))?;
        let digits = digits.trim();
        if digits.len() != len.div_ceil(4) {
            return Err(Error::InvalidInput(format!(
                "{} hex digits cannot hold exactly {len} bits",
                digits.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits.len() * 4);
        for c in digits.chars() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidInput(format!("'{c}' is not a hex digit")))?;
            bits.extend((0..4).rev().map(|k| ((nib >> k) & 1) as u8));
        }
        if bits[len..].iter().any(|&b| b != 0) {
            return Err(Error::InvalidInput("non-zero padding bits".into()));
        }
        bits.truncate(len);
        Ok(Self { bits })
    }
}

impl Index<usize> for BitVector {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len(), rhs.len(), "xor of unequal-length bit vectors");
        BitVector {
            bits: self.bits.iter().zip(&rhs.bits).map(|(a, b)| a ^ b).collect(),
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl TryFrom<String> for BitVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::from_hex(&s)
    }
}

impl From<BitVector> for String {
    fn from(v: BitVector) -> String {
        v.to_hex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_binary() {
        assert!(BitVector::from_bits(vec![0, 1, 2]).is_err());
        assert!(BitVector::parse_binary("01x").is_err());
    }

    #[test]
    fn hex_layout() {
        let v = BitVector::parse_binary("10111").unwrap();
        assert_eq!(v.to_hex(), "5:b8");
        assert_eq!(BitVector::zeros(0).to_hex(), "0:");
        assert!(BitVector::from_hex("5:b9").is_err());
        assert!(BitVector::from_hex("9:b8").is_err());
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(0u8..2, 0..200)) {
            let v = BitVector::from_bits(bits).unwrap();
            prop_assert_eq!(BitVector::from_hex(&v.to_hex()).unwrap(), v);
        }
    }
}
