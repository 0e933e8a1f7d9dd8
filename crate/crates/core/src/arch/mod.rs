//! Behavioral models of the path memories and of the folded partial-sum
//! network, cycle-accurate at the granularity of SRAM words and crossbar
//! transfers.

mod crossbar;
mod folded;
mod merged;
mod psn;
pub mod schedule;
mod sram;
mod traditional;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crossbar::{Crossbar, CrossbarUse};
pub use folded::FoldedPathMemory;
pub use merged::{recover_block, recover_group, GroupRecovery, MergedMemory, RecoveredGroup};
pub use psn::{FoldedPsn, PsnMode};
pub use sram::Sram;
pub use traditional::TraditionalPathMemory;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::trace::ScheduleTrace;

/// A run of consecutive stored words held by one physical SRAM block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    /// First word index (codeword position divided by `P`).
    pub start: usize,
    pub words: usize,
    /// Physical SRAM (block index) holding the group.
    pub block: usize,
}

pub(crate) fn group_containing(groups: &[Group], word: usize) -> Option<&Group> {
    groups
        .iter()
        .find(|g| g.start <= word && word < g.start + g.words)
}

/// Validates a survivor source map and its new bits for `paths` slots.
pub fn check_survivor_map(parents: &[usize], bits: &[u8], paths: usize) -> Result<()> {
    if parents.len() != paths || bits.len() != paths {
        return Err(Error::InvalidInput(format!(
            "survivor map covers {} slots and {} bits, list has {paths}",
            parents.len(),
            bits.len()
        )));
    }
    if let Some(&p) = parents.iter().find(|&&p| p >= paths) {
        return Err(Error::InvalidInput(format!("parent {p} out of range")));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("decoded bits must be 0 or 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryKind {
    Traditional,
    Folded,
    Merged,
}

impl MemoryKind {
    pub const ALL: [MemoryKind; 3] = [MemoryKind::Traditional, MemoryKind::Folded, MemoryKind::Merged];

    pub fn name(self) -> &'static str {
        match self {
            MemoryKind::Traditional => "traditional",
            MemoryKind::Folded => "folded",
            MemoryKind::Merged => "merged",
        }
    }
}

impl fmt::Display for MemoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MemoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MemoryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown memory kind `{s}`")))
    }
}

#[derive(Debug, Clone)]
enum PsnSide {
    Plain(FoldedPsn),
    Merged(MergedMemory),
}

/// The memories a decoder drives: a folded PSN (plain, or merged with its
/// recovery engine) and the path memories of the requested kinds. In
/// cross-check mode all three path memories run side by side.
#[derive(Debug, Clone)]
pub struct MemorySystem {
    len: usize,
    p: u32,
    primary: MemoryKind,
    psn: PsnSide,
    traditional: Option<TraditionalPathMemory>,
    folded: Option<FoldedPathMemory>,
}

impl MemorySystem {
    pub fn new(n: u32, p: u32, paths: usize, primary: MemoryKind, all_kinds: bool) -> Self {
        let has = |k: MemoryKind| all_kinds || primary == k;
        let psn = if has(MemoryKind::Merged) {
            PsnSide::Merged(MergedMemory::new(n, p, paths))
        } else {
            PsnSide::Plain(FoldedPsn::new(PsnMode::Plain, n, p, paths))
        };
        Self {
            len: 1 << n,
            p,
            primary,
            psn,
            traditional: has(MemoryKind::Traditional)
                .then(|| TraditionalPathMemory::new(1 << n, paths)),
            folded: has(MemoryKind::Folded).then(|| FoldedPathMemory::new(n, p, paths)),
        }
    }

    pub fn primary(&self) -> MemoryKind {
        self.primary
    }

    pub fn kinds(&self) -> Vec<MemoryKind> {
        let mut kinds = Vec::new();
        if self.traditional.is_some() {
            kinds.push(MemoryKind::Traditional);
        }
        if self.folded.is_some() {
            kinds.push(MemoryKind::Folded);
        }
        if self.merged().is_some() {
            kinds.push(MemoryKind::Merged);
        }
        kinds
    }

    pub fn psn(&self) -> &FoldedPsn {
        match &self.psn {
            PsnSide::Plain(psn) => psn,
            PsnSide::Merged(m) => m.psn(),
        }
    }

    fn psn_mut(&mut self) -> &mut FoldedPsn {
        match &mut self.psn {
            PsnSide::Plain(psn) => psn,
            PsnSide::Merged(m) => m.psn_mut(),
        }
    }

    pub fn merged(&self) -> Option<&MergedMemory> {
        match &self.psn {
            PsnSide::Merged(m) => Some(m),
            PsnSide::Plain(_) => None,
        }
    }

    pub fn folded(&self) -> Option<&FoldedPathMemory> {
        self.folded.as_ref()
    }

    pub fn traditional(&self) -> Option<&TraditionalPathMemory> {
        self.traditional.as_ref()
    }

    pub fn on_decision(
        &mut self,
        cycle: u64,
        parents: &[usize],
        bits: &[u8],
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        self.psn_mut().on_decision(cycle, parents, bits, trace)?;
        if let Some(t) = self.traditional.as_mut() {
            t.update(cycle, parents, bits, trace)?;
        }
        if let Some(f) = self.folded.as_mut() {
            f.update(cycle, parents, bits, trace)?;
        }
        Ok(())
    }

    /// Partial-sums of the left sibling (starting at bit `sibling_start`) of
    /// a stage-`stage` G-node, one vector per path. From stage `p` upward
    /// they are generated over the node's cycles starting at `cycle0`, and
    /// the folded path memory copermutes the same words alongside.
    pub fn g_partial_sums(
        &mut self,
        cycle0: u64,
        stage: u32,
        sibling_start: usize,
        trace: &mut ScheduleTrace,
    ) -> Result<Vec<Vec<u8>>> {
        if stage < self.p {
            return self.psn().bank_partial_sums(stage, sibling_start);
        }
        let width = self.psn().width();
        let words = self
            .psn_mut()
            .generate(cycle0, stage, sibling_start, trace)?;
        if let Some(f) = self.folded.as_mut() {
            f.copermute(cycle0, stage, sibling_start, trace)?;
        }
        Ok(words
            .into_iter()
            .map(|ws| {
                ws.into_iter()
                    .flat_map(|w| (0..width).map(move |k| ((w >> k) & 1) as u8))
                    .collect()
            })
            .collect())
    }

    /// A cycle in which the decoder computes a node below stage `p`.
    pub fn on_idle_cycle(&mut self, cycle: u64, trace: &mut ScheduleTrace) -> Result<()> {
        if let PsnSide::Merged(m) = &mut self.psn {
            m.on_idle_cycle(cycle, trace)?;
        }
        Ok(())
    }

    /// Called after a G-node at `stage` covering bits from `node_start`.
    /// Returns the stall cycles inserted (merged memory only).
    pub fn after_g_node(
        &mut self,
        stage: u32,
        node_start: usize,
        clock: &mut u64,
        trace: &mut ScheduleTrace,
    ) -> Result<u64> {
        let rightmost = node_start + (1 << stage) == self.len;
        match &mut self.psn {
            PsnSide::Merged(m) if rightmost && stage >= self.p => m.on_rightmost_g(stage, clock, trace),
            _ => Ok(0),
        }
    }

    pub fn finish(&mut self, clock: &mut u64, trace: &mut ScheduleTrace) -> Result<u64> {
        match &mut self.psn {
            PsnSide::Merged(m) => m.finish(clock, trace),
            PsnSide::Plain(_) => Ok(0),
        }
    }

    pub fn read_path(&self, kind: MemoryKind, l: usize) -> Result<BitVector> {
        let missing = || Error::Unsupported(format!("no {kind} path memory in this system"));
        match kind {
            MemoryKind::Traditional => self.traditional.as_ref().ok_or_else(missing)?.read_path(l),
            MemoryKind::Folded => self.folded.as_ref().ok_or_else(missing)?.read_path(l),
            MemoryKind::Merged => self.merged().ok_or_else(missing)?.read_path(l),
        }
    }

    /// Compares the prefixes of `paths` across every model present.
    pub fn check_equivalence(&self, paths: &[usize]) -> Result<()> {
        let kinds = self.kinds();
        for &l in paths {
            let reference = self.read_path(kinds[0], l)?;
            for &k in &kinds[1..] {
                let other = self.read_path(k, l)?;
                if other != reference {
                    return Err(Error::Protocol(format!(
                        "path {l}: {k} holds {other}, {} holds {reference}",
                        kinds[0]
                    )));
                }
            }
        }
        Ok(())
    }
}
