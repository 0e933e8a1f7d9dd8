use std::collections::HashMap;

use super::psn::{FoldedPsn, PsnMode};
use super::schedule::{apply_recovery, recovery_plan, RecoveryStep};
use super::sram::Sram;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::polar::{encode_word, kronecker_encode};
use crate::trace::{Op, ScheduleTrace, Unit};

/// Decoded bits of one group together with the cost of getting them back.
#[derive(Debug, Clone)]
pub struct RecoveredGroup {
    pub bits: BitVector,
    /// Word XOR cycles, `(Λ/2P)·log2(Λ/P)`.
    pub cycles: u64,
    pub trace: ScheduleTrace,
}

fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |w, (k, &b)| w | (b as u64) << k)
}

fn unpack(word: u64, width: usize, out: &mut Vec<u8>) {
    out.extend((0..width).map(|k| ((word >> k) & 1) as u8));
}

/// Recovers `u` from stage-`λ` partial-sums `s = u · F^{⊗λ}` with `P = 2^p`
/// bit words: one word XOR per cycle following the recovery schedule, then
/// the `P`-bit encoder on every word.
pub fn recover_block(s: &BitVector, p: u32) -> Result<RecoveredGroup> {
    if p == 0 || p > 6 {
        return Err(Error::InvalidInput(format!(
            "word width 2^{p} outside [2, 64]"
        )));
    }
    let width = 1usize << p;
    if !s.len().is_power_of_two() || s.len() < width {
        return Err(Error::InvalidInput(format!(
            "group length {} is not a power of two >= {width}",
            s.len()
        )));
    }
    let words = s.len() / width;
    let mut sram = Sram::from_words(s.as_slice().chunks(width).map(pack).collect(), 2);
    let mut trace = ScheduleTrace::new(true);
    let plan = recovery_plan(words);
    for (c, step) in plan.iter().enumerate() {
        let cycle = c as u64;
        let a = sram.read(cycle, step.lo)?;
        let b = sram.read(cycle, step.hi)?;
        trace.push(cycle, Unit::PsnSram(0), Op::RecoverRead, step.lo as u64, a);
        trace.push(cycle, Unit::PsnSram(0), Op::RecoverRead, step.hi as u64, b);
        sram.write(cycle, step.lo, a ^ b)?;
        trace.push(cycle, Unit::PsnSram(0), Op::RecoverWrite, step.lo as u64, a ^ b);
        sram.end_cycle();
    }
    trace.set_totals(plan.len() as u64, 0);
    let mut bits = Vec::with_capacity(s.len());
    for w in 0..words {
        unpack(encode_word(sram.peek(w), width as u32), width, &mut bits);
    }
    Ok(RecoveredGroup {
        bits: BitVector::from_bits(bits).expect("words hold bits"),
        cycles: plan.len() as u64,
        trace,
    })
}

/// Recovers the stage-`stage` group of path `l` from a merged-mode PSN. The
/// group must already be dead, i.e. the rightmost stage-`stage` G-node has
/// consumed it.
pub fn recover_group(psn: &FoldedPsn, l: usize, stage: u32) -> Result<RecoveredGroup> {
    if psn.mode() != PsnMode::Merged {
        return Err(Error::Unsupported(
            "decoded bits can only be recovered from a merged-mode PSN".into(),
        ));
    }
    if l >= psn.paths() {
        return Err(Error::InvalidInput(format!("path {l} out of range")));
    }
    let p = psn.width().trailing_zeros();
    let len = 1usize << stage;
    if stage < p || 2 * len > psn.sram_bits() {
        return Err(Error::InvalidInput(format!("no group at stage {stage}")));
    }
    let start = (psn.sram_bits() - 2 * len) / psn.width();
    let words = len / psn.width();
    let dead = psn
        .pointers(l)
        .iter()
        .find(|g| g.start == start && g.words == words)
        .filter(|_| psn.is_dead(start, words));
    let group = dead.ok_or_else(|| {
        Error::Protocol(format!("stage-{stage} group is not final yet"))
    })?;
    let mut s = Vec::with_capacity(len);
    for w in start..start + words {
        unpack(psn.peek(group.block, w), psn.width(), &mut s);
    }
    recover_block(&BitVector::from_bits(s).expect("words hold bits"), p)
}

/// Where one group's recovery landed in the decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRecovery {
    pub stage: u32,
    pub start_word: usize,
    pub words: usize,
    /// Word XOR cycles the group needs.
    pub latency: u64,
    /// SRAM-idle cycles between this trigger and the next one.
    pub idle_cycles: u64,
    /// Cycles the decoder waited for this group before the next recovery.
    pub stall_cycles: u64,
}

#[derive(Debug, Clone)]
struct Job {
    record: usize,
    start: usize,
    words: usize,
    steps: Vec<RecoveryStep>,
    done: usize,
}

/// Merged path memory: a merged-mode folded PSN plus a recovery engine
/// that turns dead partial-sum groups back into decoded bits in place,
/// using cycles in which the decoder works below stage `p`.
#[derive(Debug, Clone)]
pub struct MergedMemory {
    psn: FoldedPsn,
    job: Option<Job>,
    progress: HashMap<(usize, usize), usize>,
    records: Vec<GroupRecovery>,
    hidden_cycles: u64,
    stall_cycles: u64,
}

impl MergedMemory {
    pub fn new(n: u32, p: u32, paths: usize) -> Self {
        Self {
            psn: FoldedPsn::new(PsnMode::Merged, n, p, paths),
            job: None,
            progress: HashMap::new(),
            records: Vec::new(),
            hidden_cycles: 0,
            stall_cycles: 0,
        }
    }

    pub fn psn(&self) -> &FoldedPsn {
        &self.psn
    }

    pub fn psn_mut(&mut self) -> &mut FoldedPsn {
        &mut self.psn
    }

    pub fn records(&self) -> &[GroupRecovery] {
        &self.records
    }

    pub fn hidden_cycles(&self) -> u64 {
        self.hidden_cycles
    }

    pub fn stall_cycles(&self) -> u64 {
        self.stall_cycles
    }

    fn step(&mut self, cycle: u64, trace: &mut ScheduleTrace) -> Result<bool> {
        let Some(job) = self.job.as_mut() else {
            return Ok(false);
        };
        if job.done == job.steps.len() {
            return Ok(false);
        }
        let step = job.steps[job.done];
        job.done += 1;
        self.progress.insert((job.start, job.words), job.done);
        let start = job.start;
        self.psn.recovery_step(cycle, start, step, trace)?;
        Ok(true)
    }

    /// A cycle in which the PSN SRAM is not used by the decoder.
    pub fn on_idle_cycle(&mut self, cycle: u64, trace: &mut ScheduleTrace) -> Result<()> {
        if let Some(job) = &self.job {
            self.records[job.record].idle_cycles += 1;
        }
        if self.step(cycle, trace)? {
            self.hidden_cycles += 1;
        }
        Ok(())
    }

    fn drain(&mut self, clock: &mut u64, trace: &mut ScheduleTrace) -> Result<u64> {
        let mut stalls = 0;
        while self
            .job
            .as_ref()
            .is_some_and(|j| j.done < j.steps.len())
        {
            let cycle = *clock;
            *clock += 1;
            trace.push(cycle, Unit::Stall, Op::Stall, 0, 0);
            self.step(cycle, trace)?;
            stalls += 1;
        }
        if let Some(job) = self.job.take() {
            self.records[job.record].stall_cycles += stalls;
        }
        self.stall_cycles += stalls;
        Ok(stalls)
    }

    /// Called once the rightmost stage-`stage` G-node has consumed its left
    /// sibling's partial-sums. Finishes the previous group, stalling the
    /// decoder if needed, then starts on the newly dead group.
    pub fn on_rightmost_g(
        &mut self,
        stage: u32,
        clock: &mut u64,
        trace: &mut ScheduleTrace,
    ) -> Result<u64> {
        let stalls = self.drain(clock, trace)?;
        let width = self.psn.width();
        let len = 1usize << stage;
        let block_start = self.psn.sram_bits() - 2 * len;
        self.psn.mark_dead(stage, block_start)?;
        let start = block_start / width;
        let words = len / width;
        let steps = recovery_plan(words);
        self.records.push(GroupRecovery {
            stage,
            start_word: start,
            words,
            latency: steps.len() as u64,
            idle_cycles: 0,
            stall_cycles: 0,
        });
        self.job = Some(Job {
            record: self.records.len() - 1,
            start,
            words,
            steps,
            done: 0,
        });
        Ok(stalls)
    }

    /// Completes any outstanding recovery at the end of a frame.
    pub fn finish(&mut self, clock: &mut u64, trace: &mut ScheduleTrace) -> Result<u64> {
        self.drain(clock, trace)
    }

    /// Decoded prefix of path `l`: recovered groups, groups still holding
    /// partial-sums (recovered on the fly), and the register bank.
    pub fn read_path(&self, l: usize) -> Result<BitVector> {
        if l >= self.psn.paths() {
            return Err(Error::InvalidInput(format!("path {l} out of range")));
        }
        let width = self.psn.width();
        let mut bits = Vec::with_capacity(self.psn.decoded());
        for g in self.psn.pointers(l) {
            let mut words: Vec<u64> = (g.start..g.start + g.words)
                .map(|w| self.psn.peek(g.block, w))
                .collect();
            let done = self.progress.get(&(g.start, g.words)).copied().unwrap_or(0);
            apply_recovery(&mut words, &recovery_plan(g.words)[done..]);
            for w in words {
                unpack(encode_word(w, width as u32), width, &mut bits);
            }
        }
        let bank = self.psn.bank(l);
        let fill = self.psn.bank_fill();
        let mut at = 0;
        for t in (0..=width.trailing_zeros()).rev() {
            let size = 1usize << t;
            if fill & size != 0 {
                let block: Vec<u8> = (at..at + size).map(|k| ((bank >> k) & 1) as u8).collect();
                let u = kronecker_encode(&BitVector::from_bits(block).expect("bank holds bits"))?;
                bits.extend(u.iter());
                at += size;
            }
        }
        debug_assert_eq!(bits.len(), self.psn.decoded());
        Ok(BitVector::from_bits(bits).expect("memory holds bits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::partial_sums;

    #[test]
    fn fig5_instance_takes_four_cycles() {
        let u = BitVector::parse_binary("10110100").unwrap();
        let s = partial_sums(&u, 3).unwrap();
        let r = recover_block(&s, 1).unwrap();
        assert_eq!(r.cycles, 4);
        assert_eq!(r.bits, u);
    }

    #[test]
    fn single_word_needs_no_xor_cycles() {
        let u = BitVector::parse_binary("1101").unwrap();
        let r = recover_block(&partial_sums(&u, 2).unwrap(), 2).unwrap();
        assert_eq!(r.cycles, 0);
        assert_eq!(r.bits, u);
    }

    #[test]
    fn recover_group_checks_mode_and_state() {
        let plain = FoldedPsn::new(PsnMode::Plain, 3, 1, 1);
        assert!(matches!(recover_group(&plain, 0, 2), Err(Error::Unsupported(_))));
        let merged = FoldedPsn::new(PsnMode::Merged, 3, 1, 1);
        assert!(matches!(recover_group(&merged, 0, 2), Err(Error::Protocol(_))));
    }
}
