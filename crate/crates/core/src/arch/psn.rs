use super::schedule::{generation_plan, GenInput, RecoveryStep};
use super::sram::Sram;
use super::{check_survivor_map, group_containing, Group};
use crate::arch::crossbar::{Crossbar, CrossbarUse};
use crate::error::{Error, Result};
use crate::trace::{Op, ScheduleTrace, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsnMode {
    /// `N/2` bits per path; the lower half of the codeword is discarded once
    /// decoding crosses the middle and its words are reused.
    Plain,
    /// `N` bits per path, nothing reused, so the stored partial-sums of the
    /// final path can be turned back into decoded bits.
    Merged,
}

/// Folded partial-sum network.
///
/// Per path: a `P`-bit register bank that encodes the current `P`-bit block
/// in place, and an SRAM of `P`-bit words with two read and two write word
/// lanes. Words sit at their codeword position (`word = bit / P`). Each path
/// keeps one pointer per stored group naming the SRAM that holds it; list
/// management permutes the banks through a `P`-bit crossbar and copies the
/// pointer tables, never the SRAM contents.
#[derive(Debug, Clone)]
pub struct FoldedPsn {
    mode: PsnMode,
    n: u32,
    p: u32,
    banks: Vec<u64>,
    bank_fill: usize,
    srams: Vec<Sram>,
    groups: Vec<Vec<Group>>,
    xbar: Crossbar,
    decoded: usize,
    dead: Vec<(usize, usize)>,
    peak_groups: usize,
}

impl FoldedPsn {
    pub fn new(mode: PsnMode, n: u32, p: u32, paths: usize) -> Self {
        let width = 1usize << p;
        let bits = match mode {
            PsnMode::Plain => 1usize << (n - 1),
            PsnMode::Merged => 1usize << n,
        };
        Self {
            mode,
            n,
            p,
            banks: vec![0; paths],
            bank_fill: 0,
            srams: (0..paths).map(|_| Sram::new(bits / width, 2)).collect(),
            groups: vec![Vec::new(); paths],
            xbar: Crossbar::new(Unit::PsnXbar, width, paths),
            decoded: 0,
            dead: Vec::new(),
            peak_groups: 0,
        }
    }

    pub fn mode(&self) -> PsnMode {
        self.mode
    }

    pub fn width(&self) -> usize {
        1 << self.p
    }

    pub fn paths(&self) -> usize {
        self.banks.len()
    }

    pub fn decoded(&self) -> usize {
        self.decoded
    }

    pub fn bank_fill(&self) -> usize {
        self.bank_fill
    }

    pub fn bank(&self, l: usize) -> u64 {
        self.banks[l]
    }

    /// SRAM bits per path.
    pub fn sram_bits(&self) -> usize {
        self.srams[0].depth() * self.width()
    }

    pub fn crossbar_lane_bits(&self) -> usize {
        self.xbar.lane_bits()
    }

    pub fn pointer_capacity(&self) -> usize {
        (self.n - self.p + 1) as usize
    }

    pub fn pointers(&self, l: usize) -> &[Group] {
        &self.groups[l]
    }

    pub fn peak_groups(&self) -> usize {
        self.peak_groups
    }

    fn addr(&self, word: usize) -> usize {
        word % self.srams[0].depth()
    }

    /// Word at codeword word index `word` of physical SRAM `block`, as
    /// committed.
    pub fn peek(&self, block: usize, word: usize) -> u64 {
        self.srams[block].peek(self.addr(word))
    }

    /// Whether words `[start, start + words)` form a dead group.
    pub fn is_dead(&self, start: usize, words: usize) -> bool {
        self.dead.contains(&(start, start + words))
    }

    fn check_writable(&self, start: usize, words: usize) -> Result<()> {
        if let Some(&(s, e)) = self
            .dead
            .iter()
            .find(|&&(s, e)| start < e && s < start + words)
        {
            return Err(Error::Protocol(format!(
                "write into words [{start}, {}) overlaps dead group [{s}, {e})",
                start + words
            )));
        }
        Ok(())
    }

    /// Marks the stage-`stage` group starting at bit `block_start` as final:
    /// no path may write it again.
    pub fn mark_dead(&mut self, stage: u32, block_start: usize) -> Result<()> {
        if self.mode != PsnMode::Merged {
            return Err(Error::Unsupported(
                "dead groups exist only in the merged memory".into(),
            ));
        }
        if stage < self.p {
            return Err(Error::InvalidInput(format!(
                "stage {stage} below the register bank width"
            )));
        }
        let start = block_start / self.width();
        let words = 1usize << (stage - self.p);
        self.dead.push((start, start + words));
        Ok(())
    }

    /// List management: permute banks and pointer tables, then append the
    /// new bits to each bank, merging completed dyadic sub-blocks.
    pub fn on_decision(
        &mut self,
        cycle: u64,
        parents: &[usize],
        bits: &[u8],
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        check_survivor_map(parents, bits, self.banks.len())?;
        if self.decoded == 1 << self.n {
            return Err(Error::Overflow("all bits already decoded".into()));
        }
        let width = self.width();
        if self.bank_fill == width {
            return Err(Error::Protocol(
                "register bank full: partial-sums were never generated".into(),
            ));
        }
        if self.mode == PsnMode::Plain && self.decoded == 1 << (self.n - 1) {
            self.groups.iter_mut().for_each(Vec::clear);
        }
        let old_banks = self.banks.clone();
        let old_groups = self.groups.clone();
        for (l, &src) in parents.iter().enumerate() {
            self.xbar
                .route(cycle, CrossbarUse::ListPermute, l, width, trace)?;
            self.banks[l] = old_banks[src];
            if src != l {
                self.groups[l].clone_from(&old_groups[src]);
            }
        }
        let pos = self.bank_fill;
        for (l, &b) in bits.iter().enumerate() {
            let mut v = self.banks[l] | (b as u64) << pos;
            let mut size = 1;
            while 2 * size <= width && (pos + 1) % (2 * size) == 0 {
                let lo = pos + 1 - 2 * size;
                let mask = ((1u64 << size) - 1) << lo;
                v ^= (v >> size) & mask;
                size *= 2;
            }
            self.banks[l] = v;
            trace.push(cycle, Unit::PsnBank(l), Op::Append, self.decoded as u64, v);
        }
        self.bank_fill += 1;
        self.decoded += 1;
        Ok(())
    }

    /// Stage-`stage` partial-sums of the block at `block_start`, straight
    /// from the register banks (`stage < p`).
    pub fn bank_partial_sums(&self, stage: u32, block_start: usize) -> Result<Vec<Vec<u8>>> {
        let size = 1usize << stage;
        let bank_start = self.decoded - self.bank_fill;
        if stage >= self.p
            || block_start % size != 0
            || block_start < bank_start
            || block_start + size != self.decoded
        {
            return Err(Error::Protocol(format!(
                "stage-{stage} block at {block_start} is not held by the register banks"
            )));
        }
        let off = block_start - bank_start;
        Ok(self
            .banks
            .iter()
            .map(|&v| (0..size).map(|k| ((v >> (off + k)) & 1) as u8).collect())
            .collect())
    }

    fn check_prerequisites(&self, start: usize, words: usize) -> Result<()> {
        for (l, table) in self.groups.iter().enumerate() {
            let mut expect = Vec::new();
            let (mut lo, mut w) = (start, words);
            while w > 1 {
                expect.push((lo, w / 2));
                lo += w / 2;
                w /= 2;
            }
            let have: Vec<(usize, usize)> = table
                .iter()
                .filter(|g| g.start >= start)
                .map(|g| (g.start, g.words))
                .collect();
            if have != expect {
                return Err(Error::Protocol(format!(
                    "path {l}: missing prerequisite partial-sums for words [{start}, {})",
                    start + words
                )));
            }
        }
        Ok(())
    }

    /// Generates the stage-`stage` partial-sums of the block at
    /// `block_start` in `Λ/P` cycles starting at `cycle0`, storing them in
    /// each path's own SRAM. Returns the generated words per path in word
    /// order.
    pub fn generate(
        &mut self,
        cycle0: u64,
        stage: u32,
        block_start: usize,
        trace: &mut ScheduleTrace,
    ) -> Result<Vec<Vec<u64>>> {
        let width = self.width();
        if stage < self.p || stage >= self.n {
            return Err(Error::InvalidInput(format!(
                "generation at stage {stage} outside [{}, {})",
                self.p, self.n
            )));
        }
        let words = 1usize << (stage - self.p);
        let start = block_start / width;
        if block_start % (words * width) != 0 || block_start + words * width != self.decoded {
            return Err(Error::Protocol(format!(
                "stage-{stage} block at {block_start} does not end at the decoded prefix"
            )));
        }
        if self.bank_fill != width {
            return Err(Error::Protocol("register bank not full".into()));
        }
        self.check_prerequisites(start, words)?;
        self.check_writable(start, words)?;
        let plan = generation_plan(words, self.p);
        let paths = self.banks.len();
        for (c, step) in plan.iter().enumerate() {
            let cycle = cycle0 + c as u64;
            let word = start + step.word;
            let addr = self.addr(word);
            let mut outs = Vec::with_capacity(paths);
            for l in 0..paths {
                let v0 = match step.in0 {
                    GenInput::Bank => self.banks[l],
                    GenInput::Stored { .. } => {
                        let src = group_containing(&self.groups[l], word)
                            .expect("prerequisites checked")
                            .block;
                        let v = self.srams[src].read(cycle, addr)?;
                        trace.push(cycle, Unit::PsnSram(src), Op::Read, word as u64, v);
                        self.xbar
                            .route(cycle, CrossbarUse::Gather, l, width, trace)?;
                        v
                    }
                };
                let v1 = match step.in1 {
                    Some(w) => {
                        let a = self.addr(start + w);
                        let v = self.srams[l].read(cycle, a)?;
                        trace.push(cycle, Unit::PsnSram(l), Op::Read, (start + w) as u64, v);
                        v
                    }
                    None => 0,
                };
                outs.push(v0 ^ v1);
            }
            for (l, v) in outs.into_iter().enumerate() {
                self.srams[l].write(cycle, addr, v)?;
                trace.push(cycle, Unit::PsnSram(l), Op::Write, word as u64, v);
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
        let worst = self.groups.iter().map(Vec::len).max().unwrap_or(0);
        self.peak_groups = self.peak_groups.max(worst);
        if worst > self.pointer_capacity() {
            return Err(Error::Protocol(format!(
                "a path needs {worst} pointers, capacity is {}",
                self.pointer_capacity()
            )));
        }
        self.banks.iter_mut().for_each(|b| *b = 0);
        self.bank_fill = 0;
        Ok((0..paths)
            .map(|l| (start..start + words).map(|w| self.peek(l, w)).collect())
            .collect())
    }

    /// One recovery butterfly on the group starting at word `start`, applied
    /// in place to every physical SRAM.
    pub fn recovery_step(
        &mut self,
        cycle: u64,
        start: usize,
        step: RecoveryStep,
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        let (lo, hi) = (start + step.lo, start + step.hi);
        let (alo, ahi) = (self.addr(lo), self.addr(hi));
        for (m, sram) in self.srams.iter_mut().enumerate() {
            let a = sram.read(cycle, alo)?;
            let b = sram.read(cycle, ahi)?;
            trace.push(cycle, Unit::PsnSram(m), Op::RecoverRead, lo as u64, a);
            trace.push(cycle, Unit::PsnSram(m), Op::RecoverRead, hi as u64, b);
            sram.write(cycle, alo, a ^ b)?;
            trace.push(cycle, Unit::PsnSram(m), Op::RecoverWrite, lo as u64, a ^ b);
        }
        self.srams.iter_mut().for_each(Sram::end_cycle);
        Ok(())
    }
}
