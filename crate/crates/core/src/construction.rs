//! Frozen-set construction by the Bhattacharyya-parameter recursion.

use crate::error::{Error, Result};

/// `ln z` of every synthetic channel, in natural index order.
///
/// Channel `i` is reached by reading the bits of `i` from MSB to LSB: a 0
/// takes the degraded branch `2z - z²`, a 1 the upgraded branch `z²`. The
/// initial parameter is `exp(-10^(snr/10))`. Log domain keeps deep codes from
/// underflowing to zero.
pub fn bhattacharyya_log(n: u32, design_snr_db: f64) -> Vec<f64> {
    let mut lz = vec![-(10f64.powf(design_snr_db / 10.0))];
    for _ in 0..n {
        let mut next = Vec::with_capacity(lz.len() * 2);
        for &l in &lz {
            // ln(2z - z²) = ln z + ln(2 - z)
            next.push(l + (2.0 - l.exp()).ln());
            next.push(2.0 * l);
        }
        lz = next;
    }
    lz
}

/// Indices to freeze: the `N - K` channels with the largest Bhattacharyya
/// parameter; equal parameters freeze the lower index first. Sorted ascending.
pub fn build_frozen_set(n: u32, k: usize, design_snr_db: f64) -> Result<Vec<usize>> {
    let len = 1usize << n;
    if k == 0 || k > len {
        return Err(Error::InvalidConfig(format!(
            "information count {k} outside (0, {len}]"
        )));
    }
    if !design_snr_db.is_finite() {
        return Err(Error::InvalidConfig("design SNR must be finite".into()));
    }
    let lz = bhattacharyya_log(n, design_snr_db);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| lz[b].total_cmp(&lz[a]).then(a.cmp(&b)));
    let mut frozen = order[..len - k].to_vec();
    frozen.sort_unstable();
    Ok(frozen)
}
