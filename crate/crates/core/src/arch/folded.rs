use super::schedule::generation_plan;
use super::sram::Sram;
use super::{check_survivor_map, group_containing, Group};
use crate::arch::crossbar::{Crossbar, CrossbarUse};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::trace::{Op, ScheduleTrace, Unit};

/// Folded path memory: `P`-bit head banks behind a `P`-bit crossbar, and one
/// `N`-bit SRAM per path whose contents list management never moves.
///
/// Each path keeps a table of block indices, one per stored group, naming the
/// physical SRAM that holds the group. While the partial-sum network builds a
/// stage-`λ` node (`Λ/P` cycles), the decoded bits at the same positions are
/// gathered through the crossbar into the path's own SRAM, collapsing their
/// groups into one. That keeps the table at `n - p + 1` entries.
#[derive(Debug, Clone)]
pub struct FoldedPathMemory {
    n: u32,
    p: u32,
    heads: Vec<u64>,
    head_fill: usize,
    srams: Vec<Sram>,
    groups: Vec<Vec<Group>>,
    xbar: Crossbar,
    filled: usize,
    peak_groups: usize,
}

impl FoldedPathMemory {
    pub fn new(n: u32, p: u32, paths: usize) -> Self {
        let width = 1usize << p;
        let depth = (1usize << n) / width;
        Self {
            n,
            p,
            heads: vec![0; paths],
            head_fill: 0,
            srams: (0..paths).map(|_| Sram::new(depth, 1)).collect(),
            groups: vec![Vec::new(); paths],
            xbar: Crossbar::new(Unit::FpmXbar, width, paths),
            filled: 0,
            peak_groups: 0,
        }
    }

    fn width(&self) -> usize {
        1 << self.p
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn head_fill(&self) -> usize {
        self.head_fill
    }

    pub fn crossbar_lane_bits(&self) -> usize {
        self.xbar.lane_bits()
    }

    /// Upper bound on block indices per path, `n - p + 1`.
    pub fn pointer_capacity(&self) -> usize {
        (self.n - self.p + 1) as usize
    }

    pub fn block_indices(&self, l: usize) -> &[Group] {
        &self.groups[l]
    }

    /// Largest block-index table seen on any path so far.
    pub fn peak_groups(&self) -> usize {
        self.peak_groups
    }

    fn note_groups(&mut self) -> Result<()> {
        let worst = self.groups.iter().map(Vec::len).max().unwrap_or(0);
        self.peak_groups = self.peak_groups.max(worst);
        if worst > self.pointer_capacity() {
            return Err(Error::Protocol(format!(
                "a path needs {worst} block indices, capacity is {}",
                self.pointer_capacity()
            )));
        }
        Ok(())
    }

    /// List-management update: permute the head banks, append one bit per
    /// path, flush full heads to each path's own SRAM.
    pub fn update(
        &mut self,
        cycle: u64,
        parents: &[usize],
        bits: &[u8],
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        check_survivor_map(parents, bits, self.heads.len())?;
        if self.filled == 1 << self.n {
            return Err(Error::Overflow("folded path memory is full".into()));
        }
        let width = self.width();
        let old_heads = self.heads.clone();
        let old_groups = self.groups.clone();
        for (l, &src) in parents.iter().enumerate() {
            self.xbar
                .route(cycle, CrossbarUse::ListPermute, l, width, trace)?;
            self.heads[l] = old_heads[src];
            if src != l {
                self.groups[l].clone_from(&old_groups[src]);
            }
        }
        let pos = self.head_fill;
        for (l, &b) in bits.iter().enumerate() {
            self.heads[l] |= (b as u64) << pos;
            trace.push(cycle, Unit::FpmHead(l), Op::Append, self.filled as u64, b as u64);
        }
        self.head_fill += 1;
        self.filled += 1;
        if self.head_fill == width {
            let word = (self.filled - width) / width;
            for l in 0..self.heads.len() {
                self.srams[l].write(cycle, word, self.heads[l])?;
                trace.push(cycle, Unit::FpmSram(l), Op::Flush, word as u64, self.heads[l]);
                self.groups[l].push(Group {
                    start: word,
                    words: 1,
                    block: l,
                });
                self.heads[l] = 0;
            }
            self.srams.iter_mut().for_each(Sram::end_cycle);
            self.head_fill = 0;
            self.note_groups()?;
        }
        Ok(())
    }

    /// Gathers the decoded bits of the stage-`stage` block starting at bit
    /// `block_start` into each path's own SRAM, over the `Λ/P` cycles the
    /// partial-sum network spends on the same block. No-op for `stage <= p`.
    pub fn copermute(
        &mut self,
        cycle0: u64,
        stage: u32,
        block_start: usize,
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        if stage <= self.p {
            return Ok(());
        }
        let width = self.width();
        let words = 1usize << (stage - self.p);
        let start = block_start / width;
        if block_start % (words * width) != 0 || block_start + words * width != self.filled {
            return Err(Error::Protocol(format!(
                "block at bit {block_start} of stage {stage} is not the completed tail of the prefix"
            )));
        }
        for (l, table) in self.groups.iter().enumerate() {
            let mut next = start;
            for g in table.iter().filter(|g| g.start >= start) {
                if g.start != next {
                    return Err(Error::Protocol(format!(
                        "path {l}: gap in stored groups at word {next}"
                    )));
                }
                next += g.words;
            }
            if next != start + words {
                return Err(Error::Protocol(format!(
                    "path {l}: stored groups end at word {next}, block ends at {}",
                    start + words
                )));
            }
        }
        let plan = generation_plan(words, self.p);
        let paths = self.heads.len();
        for (c, step) in plan.iter().enumerate() {
            let cycle = cycle0 + c as u64;
            let word = start + step.word;
            for l in 0..paths {
                let src = group_containing(&self.groups[l], word)
                    .expect("coverage checked above")
                    .block;
                let v = self.srams[src].read(cycle, word)?;
                trace.push(cycle, Unit::FpmSram(src), Op::Read, word as u64, v);
                self.xbar.route(cycle, CrossbarUse::Gather, l, width, trace)?;
                self.srams[l].write(cycle, word, v)?;
                trace.push(cycle, Unit::FpmSram(l), Op::Write, word as u64, v);
            }
            self.srams.iter_mut().for_each(Sram::end_cycle);
        }
        for (l, table) in self.groups.iter_mut().enumerate() {
            table.retain(|g| g.start < start);
            table.push(Group {
                start,
                words,
                block: l,
            });
        }
        self.note_groups()
    }

    pub fn read_path(&self, l: usize) -> Result<BitVector> {
        let table = self
            .groups
            .get(l)
            .ok_or_else(|| Error::InvalidInput(format!("path {l} out of range")))?;
        let width = self.width();
        let mut bits = Vec::with_capacity(self.filled);
        for g in table {
            for w in g.start..g.start + g.words {
                let word = self.srams[g.block].peek(w);
                bits.extend((0..width).map(|k| ((word >> k) & 1) as u8));
            }
        }
        bits.extend((0..self.head_fill).map(|k| ((self.heads[l] >> k) & 1) as u8));
        debug_assert_eq!(bits.len(), self.filled);
        Ok(BitVector::from_bits(bits).expect("memory holds bits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_word_stays_in_heads() {
        let mut t = ScheduleTrace::new(true);
        let mut m = FoldedPathMemory::new(3, 2, 2);
        for c in 0..3 {
            m.update(c, &[0, 1], &[1, 0], &mut t).unwrap();
        }
        assert!(t.events().iter().all(|e| !matches!(e.unit, Unit::FpmSram(_))));
        assert_eq!(m.head_fill(), 3);
        assert_eq!(m.read_path(0).unwrap().to_string(), "111");
    }

    #[test]
    fn swap_moves_only_head_words() {
        let mut t = ScheduleTrace::new(true);
        let mut m = FoldedPathMemory::new(3, 1, 2);
        m.update(0, &[0, 1], &[0, 1], &mut t).unwrap();
        m.update(1, &[0, 1], &[0, 1], &mut t).unwrap();
        m.update(2, &[0, 1], &[1, 0], &mut t).unwrap();
        let before = t.events().len();
        m.update(3, &[1, 0], &[0, 0], &mut t).unwrap();
        let permutes: Vec<_> = t.events()[before..]
            .iter()
            .filter(|e| e.op == Op::Permute)
            .collect();
        assert_eq!(permutes.len(), 2);
        assert!(permutes.iter().all(|e| e.data == 2));
        // stored words never moved; block indices now cross over
        assert_eq!(m.block_indices(0)[0].block, 1);
        assert_eq!(m.read_path(0).unwrap().to_string(), "1100");
        assert_eq!(m.read_path(1).unwrap().to_string(), "0010");
    }

    #[test]
    fn copermute_merges_three_groups_into_one() {
        // Λ = 8, P = 2: [u0..u3], [u4,u5], [u6,u7] gathered in four cycles
        let mut t = ScheduleTrace::new(true);
        let mut m = FoldedPathMemory::new(4, 1, 2);
        let word = [1u8, 0, 1, 1, 0, 1, 1, 0];
        for (c, &b) in word.iter().enumerate() {
            m.update(c as u64, &[0, 1], &[b, b ^ 1], &mut t).unwrap();
            if c == 3 {
                m.copermute(100, 2, 0, &mut t).unwrap();
            }
        }
        assert_eq!(m.block_indices(0).len(), 3);
        let before = t.events().len();
        m.copermute(200, 3, 0, &mut t).unwrap();
        let cycles: std::collections::BTreeSet<u64> =
            t.events()[before..].iter().map(|e| e.cycle).collect();
        assert_eq!(cycles.len(), 4);
        assert_eq!(m.block_indices(0).len(), 1);
        assert_eq!(m.read_path(0).unwrap().to_string(), "10110110");
        assert_eq!(m.read_path(1).unwrap().to_string(), "01001001");
        assert!(m.copermute(300, 1, 6, &mut t).is_ok());
    }
}
