//! Per-cycle activity log of a decoding run.
//!
//! Serialized one event per line as `cycle,unit,op,addr,data`; `data` is a
//! hex word. The format is stable so traces can be diffed against goldens.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Hardware unit an event belongs to. Indexed units carry the physical
/// path / block number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    /// Processing elements (F/G node evaluation).
    Pe,
    /// List management at a leaf.
    ListMgmt,
    PsnBank(usize),
    PsnSram(usize),
    PsnXbar,
    /// Folded path memory head register bank.
    FpmHead(usize),
    FpmSram(usize),
    FpmXbar,
    /// Traditional path memory register row.
    TpmReg(usize),
    TpmXbar,
    Stall,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Pe => write!(f, "pe"),
            Unit::ListMgmt => write!(f, "lm"),
            Unit::PsnBank(l) => write!(f, "psn.bank[{l}]"),
            Unit::PsnSram(l) => write!(f, "psn.sram[{l}]"),
            Unit::PsnXbar => write!(f, "psn.xbar"),
            Unit::FpmHead(l) => write!(f, "fpm.head[{l}]"),
            Unit::FpmSram(l) => write!(f, "fpm.sram[{l}]"),
            Unit::FpmXbar => write!(f, "fpm.xbar"),
            Unit::TpmReg(l) => write!(f, "tpm.reg[{l}]"),
            Unit::TpmXbar => write!(f, "tpm.xbar"),
            Unit::Stall => write!(f, "stall"),
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown unit {s:?}"));
        if let Some((name, rest)) = s.split_once('[') {
            let idx: usize = rest
                .strip_suffix(']')
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)?;
            return Ok(match name {
                "psn.bank" => Unit::PsnBank(idx),
                "psn.sram" => Unit::PsnSram(idx),
                "fpm.head" => Unit::FpmHead(idx),
                "fpm.sram" => Unit::FpmSram(idx),
                "tpm.reg" => Unit::TpmReg(idx),
                _ => return Err(bad()),
            });
        }
        Ok(match s {
            "pe" => Unit::Pe,
            "lm" => Unit::ListMgmt,
            "psn.xbar" => Unit::PsnXbar,
            "fpm.xbar" => Unit::FpmXbar,
            "tpm.xbar" => Unit::TpmXbar,
            "stall" => Unit::Stall,
            _ => return Err(bad()),
        })
    }
}

/// What happened. `addr`/`data` meaning depends on the op; see
/// [`TraceEvent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// F node cycle; addr = stage, data = node index.
    F,
    /// G node cycle; addr = stage, data = node index.
    G,
    /// Leaf decision; addr = bit index, data = survivor parent map packed 8 bits per slot (first 8 slots).
    Decide,
    Read,
    Write,
    /// Bit appended by the shifter; addr = bit position, data = bit.
    Append,
    /// Crossbar permutation after list management; addr = destination path, data = bits moved.
    Permute,
    /// Crossbar gather during partial-sum generation; addr = destination path, data = bits moved.
    Gather,
    /// Head bank written to SRAM; addr = word address, data = word.
    Flush,
    RecoverRead,
    RecoverWrite,
    Stall,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Op::F => "f",
            Op::G => "g",
            Op::Decide => "decide",
            Op::Read => "read",
            Op::Write => "write",
            Op::Append => "append",
            Op::Permute => "permute",
            Op::Gather => "gather",
            Op::Flush => "flush",
            Op::RecoverRead => "rec-read",
            Op::RecoverWrite => "rec-write",
            Op::Stall => "stall",
        };
        f.write_str(s)
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "f" => Op::F,
            "g" => Op::G,
            "decide" => Op::Decide,
            "read" => Op::Read,
            "write" => Op::Write,
            "append" => Op::Append,
            "permute" => Op::Permute,
            "gather" => Op::Gather,
            "flush" => Op::Flush,
            "rec-read" => Op::RecoverRead,
            "rec-write" => Op::RecoverWrite,
            "stall" => Op::Stall,
            _ => return Err(Error::InvalidInput(format!("unknown op {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub cycle: u64,
    pub unit: Unit,
    pub op: Op,
    pub addr: u64,
    pub data: u64,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{:#x}",
            self.cycle, self.unit, self.op, self.addr, self.data
        )
    }
}

impl FromStr for TraceEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 5 {
            return Err(Error::InvalidInput(format!("expected 5 fields in {line:?}")));
        }
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))
        };
        let data = fields[4]
            .strip_prefix("0x")
            .and_then(|h| u64::from_str_radix(h, 16).ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad data {:?}", fields[4])))?;
        Ok(TraceEvent {
            cycle: num(fields[0])?,
            unit: fields[1].parse()?,
            op: fields[2].parse()?,
            addr: num(fields[3])?,
            data,
        })
    }
}

pub const TRACE_HEADER: &str = "cycle,unit,op,addr,data";

/// Event log plus cycle totals. Totals are always maintained; individual
/// events are kept only when recording is enabled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduleTrace {
    recording: bool,
    events: Vec<TraceEvent>,
    total_cycles: u64,
    stall_cycles: u64,
}

impl ScheduleTrace {
    pub fn new(recording: bool) -> Self {
        Self {
            recording,
            ..Self::default()
        }
    }

    pub fn is_recording(&self) -> bool {
        self.recording
    }

    #[inline]
    pub fn push(&mut self, cycle: u64, unit: Unit, op: Op, addr: u64, data: u64) {
        if self.recording {
            self.events.push(TraceEvent {
                cycle,
                unit,
                op,
                addr,
                data,
            });
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn total_cycles(&self) -> u64 {
        self.total_cycles
    }

    pub fn stall_cycles(&self) -> u64 {
        self.stall_cycles
    }

    pub(crate) fn set_totals(&mut self, total: u64, stalls: u64) {
        self.total_cycles = total;
        self.stall_cycles = stalls;
    }

    /// Cycle count reconstructed from the log alone: distinct cycles carrying
    /// a node evaluation or a stall.
    pub fn observed_cycles(&self) -> u64 {
        self.events
            .iter()
            .filter(|e| matches!(e.unit, Unit::Pe | Unit::Stall))
            .map(|e| e.cycle)
            .collect::<BTreeSet<_>>()
            .len() as u64
    }

    pub fn to_lines(&self) -> String {
        let mut out = String::with_capacity(self.events.len() * 28 + 32);
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_lines(text: &str) -> Result<Vec<TraceEvent>> {
        text.lines()
            .filter(|l| !l.trim().is_empty() && l.trim() != TRACE_HEADER)
            .map(str::parse)
            .collect()
    }

    /// Crossbar rules: per cycle and crossbar, at most `lane_bits` per
    /// destination path, and never a list permutation and a gather together.
    pub fn check_crossbars(&self, lane_bits: u64) -> Result<()> {
        let mut moved: HashMap<(u64, Unit, u64), u64> = HashMap::new();
        let mut kinds: HashMap<(u64, Unit), Op> = HashMap::new();
        for e in &self.events {
            if !matches!(e.unit, Unit::PsnXbar | Unit::FpmXbar) {
                continue;
            }
            let total = moved.entry((e.cycle, e.unit, e.addr)).or_default();
            *total += e.data;
            if *total > lane_bits {
                return Err(Error::Protocol(format!(
                    "cycle {}: {} moved {} bits to path {} (lane is {lane_bits})",
                    e.cycle, e.unit, total, e.addr
                )));
            }
            let kind = kinds.entry((e.cycle, e.unit)).or_insert(e.op);
            if *kind != e.op {
                return Err(Error::Protocol(format!(
                    "cycle {}: {} used for both {} and {}",
                    e.cycle, e.unit, kind, e.op
                )));
            }
        }
        Ok(())
    }

    /// No partial-sum write may land on a PSN word after recovery has read it.
    pub fn check_recovery_reads(&self) -> Result<()> {
        let mut last_write: BTreeMap<(Unit, u64), u64> = BTreeMap::new();
        for e in &self.events {
            if e.op == Op::Write && matches!(e.unit, Unit::PsnSram(_)) {
                let c = last_write.entry((e.unit, e.addr)).or_default();
                *c = (*c).max(e.cycle);
            }
        }
        for e in &self.events {
            if e.op == Op::RecoverRead {
                if let Some(&w) = last_write.get(&(e.unit, e.addr)) {
                    if w > e.cycle {
                        return Err(Error::Protocol(format!(
                            "{} word {} read for recovery at cycle {} but rewritten at cycle {w}",
                            e.unit, e.addr, e.cycle
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
