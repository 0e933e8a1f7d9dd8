use std::cmp::Ordering;

use crate::scalar::Llr;

/// Min-sum check-node update.
pub fn f_function<T: Llr>(a: T, b: T) -> T {
    let m = a.abs().min(b.abs());
    if (a < T::zero()) != (b < T::zero()) {
        -m
    } else {
        m
    }
}

/// Variable-node update given the left sibling's partial-sum `s`.
pub fn g_function<T: Llr>(a: T, b: T, s: u8) -> T {
    if s == 0 {
        b + a
    } else {
        b - a
    }
}

/// `llr >= 0` decides 0.
pub fn hard_decision<T: Llr>(llr: T) -> u8 {
    (llr < T::zero()) as u8
}

pub fn path_metric_update<T: Llr>(metric: T, llr: T, decision: u8) -> T {
    if decision == hard_decision(llr) {
        metric
    } else {
        metric + llr.abs()
    }
}

/// Per-path decoding state.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderPath<T> {
    pub path_id: usize,
    pub metric: T,
    /// Stage `λ < n` holds `2^λ` LLRs at offset `2^λ - 1`.
    pub llr_workspace: Vec<T>,
    pub active: bool,
}

impl<T: Llr> DecoderPath<T> {
    pub fn new(path_id: usize, n: u32) -> Self {
        Self {
            path_id,
            metric: T::zero(),
            llr_workspace: vec![T::zero(); (1usize << n) - 1],
            active: false,
        }
    }

    pub fn stage(&self, stage: u32) -> &[T] {
        let off = (1usize << stage) - 1;
        &self.llr_workspace[off..off + (1 << stage)]
    }

    pub fn stage_mut(&mut self, stage: u32) -> &mut [T] {
        let off = (1usize << stage) - 1;
        &mut self.llr_workspace[off..off + (1 << stage)]
    }
}

/// The `L` paths plus the index of the next bit to decide.
#[derive(Debug, Clone)]
pub struct ListState<T> {
    pub paths: Vec<DecoderPath<T>>,
    pub bit_index: usize,
}

impl<T: Llr> ListState<T> {
    /// Only path 0 is active at the start of a frame.
    pub fn new(n: u32, list_size: usize) -> Self {
        let mut paths: Vec<_> = (0..list_size).map(|l| DecoderPath::new(l, n)).collect();
        paths[0].active = true;
        Self {
            paths,
            bit_index: 0,
        }
    }

    pub fn active_paths(&self) -> Vec<usize> {
        (0..self.paths.len()).filter(|&l| self.paths[l].active).collect()
    }

    pub fn metrics(&self) -> Vec<T> {
        self.paths.iter().map(|p| p.metric).collect()
    }

    pub fn active_mask(&self) -> Vec<bool> {
        self.paths.iter().map(|p| p.active).collect()
    }
}

/// Result of list management at one leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct Survivors<T> {
    /// Source path of each slot, the crossbar permutation.
    pub parents: Vec<usize>,
    /// Bit appended in each slot.
    pub bits: Vec<u8>,
    pub metrics: Vec<T>,
    pub active: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    pub metric: T,
    pub parent: usize,
    pub bit: u8,
}

/// Total order on candidates: metric, then parent, then bit.
pub fn candidate_order<T: Llr>(a: &Candidate<T>, b: &Candidate<T>) -> Ordering {
    a.metric
        .partial_cmp(&b.metric)
        .unwrap_or(Ordering::Equal)
        .then(a.parent.cmp(&b.parent))
        .then(a.bit.cmp(&b.bit))
}

/// Extends every active path by one bit and keeps the best `L`.
///
/// Slot `k` receives the `k`-th best candidate. Slots beyond the number of
/// candidates stay inactive and keep themselves as parent with bit 0.
pub fn expand_and_prune<T: Llr>(
    metrics: &[T],
    active: &[bool],
    leaf_llrs: &[T],
    frozen: bool,
) -> Survivors<T> {
    let list = metrics.len();
    if frozen {
        return Survivors {
            parents: (0..list).collect(),
            bits: vec![0; list],
            metrics: (0..list)
                .map(|l| {
                    if active[l] {
                        path_metric_update(metrics[l], leaf_llrs[l], 0)
                    } else {
                        metrics[l]
                    }
                })
                .collect(),
            active: active.to_vec(),
        };
    }
    let mut candidates: Vec<Candidate<T>> = (0..list)
        .filter(|&l| active[l])
        .flat_map(|l| {
            [0u8, 1].map(|bit| Candidate {
                metric: path_metric_update(metrics[l], leaf_llrs[l], bit),
                parent: l,
                bit,
            })
        })
        .collect();
    candidates.sort_by(candidate_order);
    let mut out = Survivors {
        parents: (0..list).collect(),
        bits: vec![0; list],
        metrics: metrics.to_vec(),
        active: vec![false; list],
    };
    for (k, c) in candidates.iter().take(list).enumerate() {
        out.parents[k] = c.parent;
        out.bits[k] = c.bit;
        out.metrics[k] = c.metric;
        out.active[k] = true;
    }
    out
}
