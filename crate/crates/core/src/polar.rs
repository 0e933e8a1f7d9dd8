//! GF(2) polar transform `x = u · F^{⊗m}`, `F = [[1,0],[1,1]]`, in natural
//! bit order (no bit-reversal permutation anywhere in this crate).

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// In-place butterfly over a power-of-two slice: `m · 2^(m-1)` XORs.
///
/// Stage with span `h` maps each pair `(k, k+h)` with `k & h == 0` to
/// `(x_k ^ x_{k+h}, x_{k+h})`. Spans commute, so any order yields the same
/// result; this one runs `h = 1, 2, 4, ...`.
pub fn encode_in_place(x: &mut [u8]) {
    debug_assert!(x.len().is_power_of_two());
    let len = x.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for k in block..block + h {
                x[k] ^= x[k + h];
            }
        }
        h *= 2;
    }
}

/// `u · F^{⊗m}` for `|u| = 2^m`.
pub fn kronecker_encode(u: &BitVector) -> Result<BitVector> {
    if !u.len().is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "encoder length {} is not a power of two",
            u.len()
        )));
    }
    let mut x = u.clone().into_inner();
    encode_in_place(&mut x);
    Ok(BitVector::from_bits(x).expect("xor keeps symbols binary"))
}

/// Partial-sums of one stage-`stage` node: `[u_{jΛ} .. u_{(j+1)Λ-1}] · F^{⊗stage}`.
pub fn partial_sums(u_slice: &BitVector, stage: u32) -> Result<BitVector> {
    let expected = 1usize
        .checked_shl(stage)
        .ok_or_else(|| Error::InvalidInput(format!("stage {stage} too large")))?;
    if u_slice.len() != expected {
        return Err(Error::InvalidInput(format!(
            "stage {stage} needs {expected} bits, got {}",
            u_slice.len()
        )));
    }
    kronecker_encode(u_slice)
}

/// Number of XOR (`⊕`) nodes in the signal-flow graph of a length-`len` code.
pub fn xor_node_count(len: usize) -> u64 {
    if len <= 1 {
        return 0;
    }
    (len as u64 / 2) * len.trailing_zeros() as u64
}

/// Mask of the positions `k < width` whose bit `h` is clear.
fn low_half_mask(width: u32, h: u32) -> u64 {
    let mut m = 0u64;
    for k in 0..width {
        if k & h == 0 {
            m |= 1 << k;
        }
    }
    m
}

/// The `P`-bit encoder `F^{⊗p}` applied to a packed word (bit `k` of the
/// integer is element `k`). `width` must be a power of two `<= 64`.
pub fn encode_word(word: u64, width: u32) -> u64 {
    debug_assert!(width.is_power_of_two() && width <= 64);
    let mut x = word;
    let mut h = 1;
    while h < width {
        x ^= (x >> h) & low_half_mask(width, h);
        h *= 2;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse_binary(s).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(kronecker_encode(&bv("00000000")).unwrap(), bv("00000000"));
        assert_eq!(kronecker_encode(&bv("11")).unwrap(), bv("01"));
        assert_eq!(kronecker_encode(&bv("00000001")).unwrap(), bv("11111111"));
        assert!(kronecker_encode(&bv("101")).is_err());
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sums(&bv("1"), 0).unwrap(), bv("1"));
        assert_eq!(partial_sums(&bv("0000"), 2).unwrap(), bv("0000"));
        // dense F^{⊗2} product computed offline
        assert_eq!(partial_sums(&bv("1010"), 2).unwrap(), bv("0010"));
        assert!(partial_sums(&bv("101"), 2).is_err());
    }

    #[test]
    fn involution_exhaustive_small() {
        for m in 0..=4u32 {
            let len = 1usize << m;
            for w in 0..(1u64 << len) {
                let u = BitVector::from_word(w, len);
                let x = kronecker_encode(&u).unwrap();
                assert_eq!(kronecker_encode(&x).unwrap(), u);
            }
        }
    }

    #[test]
    fn xor_counts() {
        assert_eq!(xor_node_count(1), 0);
        assert_eq!(xor_node_count(8), 12);
        assert_eq!(xor_node_count(16), 32);
    }

    #[test]
    fn word_encoder_matches_vector_encoder() {
        for width in [1u32, 2, 4, 8] {
            for w in 0..(1u64 << width) {
                let v = BitVector::from_word(w, width as usize);
                let expect = kronecker_encode(&v).unwrap();
                let got = BitVector::from_word(encode_word(w, width), width as usize);
                assert_eq!(got, expect);
            }
        }
    }

    proptest! {
        #[test]
        fn involution_random(m in 5u32..=13, seed in any::<u64>()) {
            let len = 1usize << m;
            let bits: Vec<u8> = (0..len).map(|k| ((seed.rotate_left(k as u32 % 64) ^ (k as u64 * 0x9E37)) & 1) as u8).collect();
            let u = BitVector::from_bits(bits).unwrap();
            prop_assert_eq!(kronecker_encode(&kronecker_encode(&u).unwrap()).unwrap(), u);
        }

        #[test]
        fn linear(a in proptest::collection::vec(0u8..2, 64), b in proptest::collection::vec(0u8..2, 64)) {
            let a = BitVector::from_bits(a).unwrap();
            let b = BitVector::from_bits(b).unwrap();
            let lhs = kronecker_encode(&(&a ^ &b)).unwrap();
            let rhs = &kronecker_encode(&a).unwrap() ^ &kronecker_encode(&b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wide_word_encoder_is_involution(w in any::<u64>()) {
            prop_assert_eq!(encode_word(encode_word(w, 64), 64), w);
            let v = BitVector::from_word(w, 64);
            prop_assert_eq!(BitVector::from_word(encode_word(w, 64), 64), kronecker_encode(&v).unwrap());
        }
    }
}
