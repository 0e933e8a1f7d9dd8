#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense `F^{⊗m}` over GF(2), row-major.
pub fn generator_matrix(m: u32) -> Vec<Vec<u8>> {
    let mut g = vec![vec![1u8]];
    for _ in 0..m {
        let size = g.len();
        let mut next = vec![vec![0u8; 2 * size]; 2 * size];
        for r in 0..size {
            for c in 0..size {
                next[r][c] = g[r][c];
                next[r + size][c] = g[r][c];
                next[r + size][c + size] = g[r][c];
            }
        }
        g = next;
    }
    g
}

/// `u · G` by explicit row sums.
pub fn matrix_encode(u: &[u8]) -> Vec<u8> {
    let g = generator_matrix(u.len().trailing_zeros());
    let mut x = vec![0u8; u.len()];
    for (r, &bit) in u.iter().enumerate() {
        if bit == 1 {
            for (xc, gc) in x.iter_mut().zip(&g[r]) {
                *xc ^= gc;
            }
        }
    }
    x
}

/// Plain recursive successive-cancellation decoder. Returns `(u, x)` for the
/// sub-code at hand.
pub fn sc_decode(llr: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
    if llr.len() == 1 {
        let bit = if frozen[0] || llr[0] >= 0.0 { 0 } else { 1 };
        return (vec![bit], vec![bit]);
    }
    let h = llr.len() / 2;
    let (a, b) = llr.split_at(h);
    let left: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x.signum() * y.signum() * x.abs().min(y.abs()))
        .collect();
    let (u_left, x_left) = sc_decode(&left, &frozen[..h]);
    let right: Vec<f64> = a
        .iter()
        .zip(b)
        .zip(&x_left)
        .map(|((&x, &y), &s)| if s == 0 { y + x } else { y - x })
        .collect();
    let (u_right, x_right) = sc_decode(&right, &frozen[h..]);
    let x: Vec<u8> = x_left
        .iter()
        .zip(&x_right)
        .map(|(l, r)| l ^ r)
        .chain(x_right.iter().copied())
        .collect();
    (u_left.into_iter().chain(u_right).collect(), x)
}

pub fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
