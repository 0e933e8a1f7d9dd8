//! Word-level schedules of the folded partial-sum network.
//!
//! Both schedules work on a block of `W = Λ/P` words of `P` bits. The
//! generation schedule must emit the upper half of a block before the lower
//! half can be formed, so it walks words in descending order; the recovery
//! schedule is the encoding butterfly over words, largest span first and
//! ascending pair index within a span.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Where the first operand of a generation step comes from. It always sits
/// at the same word index as the step's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenInput {
    /// Last `P` decoded bits' partial-sums, still in the register bank.
    Bank,
    /// Previously stored stage-`stage` partial-sums.
    Stored { stage: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenStep {
    pub word: usize,
    pub in0: GenInput,
    /// Word generated in an earlier cycle of the same schedule.
    pub in1: Option<usize>,
}

/// One cycle of partial-sum generation per step; `words` steps in total.
pub fn generation_plan(words: usize, p: u32) -> Vec<GenStep> {
    fn walk(lo: usize, w: usize, p: u32, out: &mut Vec<GenStep>) {
        if w == 1 {
            out.push(GenStep {
                word: lo,
                in0: GenInput::Bank,
                in1: None,
            });
            return;
        }
        let half = w / 2;
        walk(lo + half, half, p, out);
        let stage = p + half.trailing_zeros();
        for k in (lo..lo + half).rev() {
            out.push(GenStep {
                word: k,
                in0: GenInput::Stored { stage },
                in1: Some(k + half),
            });
        }
    }
    debug_assert!(words.is_power_of_two());
    let mut steps = Vec::with_capacity(words);
    walk(0, words, p, &mut steps);
    steps
}

/// One butterfly over words `lo` and `hi = lo + span`:
/// `lo ← lo ⊕ hi`, `hi` passes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecoveryStep {
    pub lo: usize,
    pub hi: usize,
    /// 0 for the largest span.
    pub level: u32,
}

/// `(W/2)·log2(W)` steps, one per cycle.
pub fn recovery_plan(words: usize) -> Vec<RecoveryStep> {
    debug_assert!(words.is_power_of_two());
    let mut steps = Vec::new();
    let mut span = words / 2;
    let mut level = 0;
    while span >= 1 {
        for lo in (0..words).filter(|i| i & span == 0) {
            steps.push(RecoveryStep {
                lo,
                hi: lo + span,
                level,
            });
        }
        span /= 2;
        level += 1;
    }
    steps
}

/// Applies recovery steps to packed words in place.
pub fn apply_recovery(words: &mut [u64], steps: &[RecoveryStep]) {
    for s in steps {
        words[s.lo] ^= words[s.hi];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Generation,
    Recovery,
}

/// Symbolic per-cycle table, one row per operand/result lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTable {
    pub kind: ScheduleKind,
    pub stage: u32,
    pub p: u32,
    pub cycles: usize,
    /// `(row name, per-cycle cells)`; each cycle holds `P` labels, or is empty.
    pub rows: Vec<(String, Vec<Vec<String>>)>,
}

fn label(stage: u32, bit: usize) -> String {
    format!("s^{stage}_{bit}")
}

fn word_labels(stage: u32, word: usize, width: usize, descending: bool) -> Vec<String> {
    let bits = word * width..(word + 1) * width;
    if descending {
        bits.rev().map(|b| label(stage, b)).collect()
    } else {
        bits.map(|b| label(stage, b)).collect()
    }
}

fn check_sizes(stage: u32, p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidInput("P = 1 is not supported".into()));
    }
    if stage < p {
        return Err(Error::InvalidInput(format!(
            "Λ = 2^{stage} is smaller than P = 2^{p}"
        )));
    }
    if stage > 24 || p > 6 {
        return Err(Error::InvalidInput("schedule too large to tabulate".into()));
    }
    Ok(())
}

impl ScheduleTable {
    /// Partial-sum generation for one stage-`stage` node. Cells list each
    /// word's bits from high to low index.
    pub fn generation(stage: u32, p: u32) -> Result<Self> {
        check_sizes(stage, p)?;
        let width = 1usize << p;
        let plan = generation_plan(1 << (stage - p), p);
        let mut in0 = Vec::new();
        let mut in1 = Vec::new();
        let mut out = Vec::new();
        for s in &plan {
            in0.push(match s.in0 {
                GenInput::Bank => word_labels(p, s.word, width, true),
                GenInput::Stored { stage } => word_labels(stage, s.word, width, true),
            });
            in1.push(match s.in1 {
                Some(w) => word_labels(stage, w, width, true),
                None => vec!["-".to_string(); width],
            });
            out.push(word_labels(stage, s.word, width, true));
        }
        Ok(Self {
            kind: ScheduleKind::Generation,
            stage,
            p,
            cycles: plan.len(),
            rows: vec![
                ("Input 0".into(), in0),
                ("Input 1".into(), in1),
                ("Output".into(), out),
            ],
        })
    }

    /// Decoded-bit recovery for one stage-`stage` group. Cells list each
    /// word's bits from low to high index.
    pub fn recovery(stage: u32, p: u32) -> Result<Self> {
        check_sizes(stage, p)?;
        let width = 1usize << p;
        let plan = recovery_plan(1 << (stage - p));
        let mut rows: Vec<Vec<Vec<String>>> = vec![Vec::new(); 4];
        for s in &plan {
            let src = stage - s.level;
            rows[0].push(word_labels(src, s.lo, width, false));
            rows[1].push(word_labels(src, s.hi, width, false));
            rows[2].push(word_labels(src - 1, s.lo, width, false));
            rows[3].push(word_labels(src - 1, s.hi, width, false));
        }
        let names = ["Input 0", "Input 1", "⊕", "·"];
        Ok(Self {
            kind: ScheduleKind::Recovery,
            stage,
            p,
            cycles: plan.len(),
            rows: names
                .iter()
                .map(|n| n.to_string())
                .zip(rows)
                .collect(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut width = 5;
        for (name, cells) in &self.rows {
            width = width.max(name.chars().count());
            for c in cells.iter().flatten() {
                width = width.max(c.chars().count());
            }
        }
        let lanes = 1usize << self.p;
        let pad = |s: &str| format!("{s:<width$}");
        let mut out = String::new();
        let title = match self.kind {
            ScheduleKind::Generation => "partial-sum generation",
            ScheduleKind::Recovery => "decoded-bit recovery",
        };
        let _ = writeln!(
            out,
            "{title}: Λ = {}, P = {}, {} cycle(s)",
            1u64 << self.stage,
            lanes,
            self.cycles
        );
        let mut line = pad("Cycle");
        for c in 0..self.cycles {
            let group = format!("{c}");
            let span = lanes * (width + 1) - 1;
            let _ = write!(line, " | {group:<span$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
        for (name, cells) in &self.rows {
            let mut line = pad(name);
            for cycle in cells {
                line.push_str(" |");
                for c in cycle {
                    line.push(' ');
                    line.push_str(&pad(c));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// Long format: `cycle,row,cells` with a cycle's labels space-separated.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("cycle,row,cells\n");
        for c in 0..self.cycles {
            for (name, cells) in &self.rows {
                let _ = writeln!(out, "{c},{name},{}", cells[c].join(" "));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_plan_shape() {
        let plan = generation_plan(4, 1);
        let words: Vec<usize> = plan.iter().map(|s| s.word).collect();
        assert_eq!(words, vec![3, 2, 1, 0]);
        assert_eq!(plan[0].in0, GenInput::Bank);
        assert_eq!(plan[3].in1, Some(2));
        assert_eq!(generation_plan(1, 3).len(), 1);
    }

    #[test]
    fn recovery_plan_counts() {
        for w in [1usize, 2, 4, 8, 64, 1024] {
            let expected = (w / 2) * w.trailing_zeros() as usize;
            assert_eq!(recovery_plan(w).len(), expected);
        }
    }

    #[test]
    fn small_tables_reject_bad_sizes() {
        assert!(ScheduleTable::recovery(1, 2).is_err());
        assert!(ScheduleTable::generation(3, 0).is_err());
        let t = ScheduleTable::recovery(1, 1).unwrap();
        assert_eq!(t.cycles, 0);
    }
}
