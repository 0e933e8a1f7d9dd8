//! Closed-form cycle counts, the recovery latency bound, and memory size
//! accounting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::PolarCodeConfig;
use crate::error::{Error, Result};

/// Cycles to compute one stage-`stage` node with `2^p` processing elements.
pub fn node_cycles(stage: u32, p: u32) -> u64 {
    if stage <= p {
        1
    } else {
        1u64 << (stage - p)
    }
}

fn log2_exact(v: u64, what: &str) -> Result<u32> {
    if v == 0 || !v.is_power_of_two() {
        return Err(Error::InvalidInput(format!("{what} = {v} is not a power of two")));
    }
    Ok(v.trailing_zeros())
}

fn check_group(lambda_len: u64, par: u64) -> Result<(u32, u32)> {
    let lam = log2_exact(lambda_len, "group length")?;
    let p = log2_exact(par, "parallelism")?;
    if p == 0 {
        return Err(Error::InvalidInput("parallelism must be at least 2".into()));
    }
    if lam < p {
        return Err(Error::InvalidInput(format!(
            "group length {lambda_len} shorter than parallelism {par}"
        )));
    }
    Ok((lam, p))
}

/// XOR cycles to recover a length-`Λ` group with `P`-bit words:
/// `(Λ/2P)·log2(Λ/P)`.
pub fn recovery_latency(lambda_len: u64, par: u64) -> Result<u64> {
    let (lam, p) = check_group(lambda_len, par)?;
    Ok(lambda_len / (2 * par) * u64::from(lam - p))
}

/// SRAM-idle cycles available to a length-`Λ` group: `Λ - Λ/P`.
pub fn idle_budget(lambda_len: u64, par: u64) -> Result<u64> {
    check_group(lambda_len, par)?;
    Ok(lambda_len - lambda_len / par)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome", content = "cycles")]
pub enum BoundOutcome {
    FitsExactly,
    FitsStrictly,
    Stalls(u64),
}

impl BoundOutcome {
    pub fn fits(self) -> bool {
        !matches!(self, BoundOutcome::Stalls(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub outcome: BoundOutcome,
    pub latency: u64,
    pub budget: u64,
    /// `Λ < P·2^(2P-2)`, which can disagree with the budget comparison at
    /// equality.
    pub strict_predicate: bool,
}

pub fn bound_check(lambda_len: u64, par: u64) -> Result<BoundCheck> {
    let (lam, p) = check_group(lambda_len, par)?;
    let latency = recovery_latency(lambda_len, par)?;
    let budget = idle_budget(lambda_len, par)?;
    let outcome = match latency.cmp(&budget) {
        std::cmp::Ordering::Less => BoundOutcome::FitsStrictly,
        std::cmp::Ordering::Equal => BoundOutcome::FitsExactly,
        std::cmp::Ordering::Greater => BoundOutcome::Stalls(latency - budget),
    };
    Ok(BoundCheck {
        outcome,
        latency,
        budget,
        strict_predicate: u64::from(lam) < u64::from(p) + 2 * par - 2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRow {
    pub architecture: String,
    /// Bits per SRAM port.
    pub sram_port_width: u64,
    /// SRAM bits per path.
    pub sram_size: u64,
    /// SRAM instances, one per path.
    pub sram_count: u64,
    pub register_bits: u64,
    pub crossbar_lane_width: u64,
    /// Block indices per path.
    pub pointer_count: u64,
}

impl MemoryRow {
    /// `crossbar_lane_width · L² + register_bits`.
    pub fn proxy_cost(&self, list_size: u64) -> u64 {
        self.crossbar_lane_width * list_size * list_size + self.register_bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryCostReport {
    pub code_length: u64,
    pub parallelism: u64,
    pub list_size: u64,
    pub rows: Vec<MemoryRow>,
}

pub const FOLDED_PSN: &str = "folded-psn";
pub const TRADITIONAL_PATH_MEMORY: &str = "traditional-path-memory";
pub const FOLDED_PATH_MEMORY: &str = "folded-path-memory";
pub const MERGED_MEMORY: &str = "merged-memory";

impl MemoryCostReport {
    pub fn row(&self, architecture: &str) -> Option<&MemoryRow> {
        self.rows.iter().find(|r| r.architecture == architecture)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "N = {}, P = {}, L = {}\n",
            self.code_length, self.parallelism, self.list_size
        );
        let header = [
            "architecture", "port", "sram/path", "srams", "registers", "xbar lane", "pointers", "proxy",
        ];
        let mut lines = vec![header.map(String::from).to_vec()];
        for r in &self.rows {
            lines.push(vec![
                r.architecture.clone(),
                r.sram_port_width.to_string(),
                r.sram_size.to_string(),
                r.sram_count.to_string(),
                r.register_bits.to_string(),
                r.crossbar_lane_width.to_string(),
                r.pointer_count.to_string(),
                r.proxy_cost(self.list_size).to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
            .collect();
        for l in &lines {
            let cells: Vec<String> = l
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (s, &w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

/// Sizes of every memory for code length `N`, parallelism `P`, list `L`.
pub fn memory_report(code_length: u64, par: u64, list_size: u64) -> Result<MemoryCostReport> {
    let n = log2_exact(code_length, "code length")?;
    let p = log2_exact(par, "parallelism")?;
    log2_exact(list_size, "list size")?;
    if p == 0 || p >= n {
        return Err(Error::InvalidInput(format!(
            "parallelism {par} must be in [2, N/2]"
        )));
    }
    let pointers = u64::from(n - p + 1);
    let folded = |name: &str, port: u64, size: u64| MemoryRow {
        architecture: name.to_string(),
        sram_port_width: port,
        sram_size: size,
        sram_count: list_size,
        register_bits: list_size * par,
        crossbar_lane_width: par,
        pointer_count: pointers,
    };
    Ok(MemoryCostReport {
        code_length,
        parallelism: par,
        list_size,
        rows: vec![
            folded(FOLDED_PSN, 2 * par, code_length / 2),
            MemoryRow {
                architecture: TRADITIONAL_PATH_MEMORY.to_string(),
                sram_port_width: 0,
                sram_size: 0,
                sram_count: 0,
                register_bits: list_size * code_length,
                crossbar_lane_width: code_length,
                pointer_count: 0,
            },
            folded(FOLDED_PATH_MEMORY, par, code_length),
            folded(MERGED_MEMORY, 2 * par, code_length),
        ],
    })
}

/// Recovery of one partial-sum group in the merged memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSchedule {
    pub stage: u32,
    pub length: u64,
    pub latency: u64,
    pub budget: u64,
    pub stall: u64,
    /// The last `P` bits, read straight from the register bank.
    pub in_bank: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedSchedule {
    pub groups: Vec<GroupSchedule>,
    pub stall_cycles: u64,
}

/// Places each group's recovery into the SRAM-idle cycles that follow its
/// trigger. Groups are listed from the longest (`N/2`) down to the bank.
pub fn merged_schedule(config: &PolarCodeConfig) -> MergedSchedule {
    let (n, p) = (config.n(), config.p());
    let par = 1u64 << p;
    let mut groups: Vec<GroupSchedule> = (p..n)
        .rev()
        .map(|stage| {
            let length = 1u64 << stage;
            let latency = recovery_latency(length, par).expect("stage >= p");
            let budget = idle_budget(length, par).expect("stage >= p");
            GroupSchedule {
                stage,
                length,
                latency,
                budget,
                stall: latency.saturating_sub(budget),
                in_bank: false,
            }
        })
        .collect();
    groups.push(GroupSchedule {
        stage: p,
        length: par,
        latency: 0,
        budget: 0,
        stall: 0,
        in_bank: true,
    });
    let stall_cycles = groups.iter().map(|g| g.stall).sum();
    MergedSchedule {
        groups,
        stall_cycles,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub total_decode_cycles: u64,
    pub recovery_cycles_hidden: u64,
    pub stall_cycles: u64,
    pub groups: Vec<GroupSchedule>,
}

/// Node cycles over the whole scheduling tree, plus recovery stalls when
/// `with_recovery`. List management is not counted.
pub fn total_decode_cycles(config: &PolarCodeConfig, with_recovery: bool) -> CycleReport {
    fn tree(stage: u32, p: u32) -> u64 {
        // a stage-`stage` node and everything below it
        if stage == 0 {
            return node_cycles(0, p);
        }
        node_cycles(stage, p) + 2 * tree(stage - 1, p)
    }
    let (n, p) = (config.n(), config.p());
    // the root is the channel; its two children start the walk
    let base = 2 * tree(n - 1, p);
    if !with_recovery {
        return CycleReport {
            total_decode_cycles: base,
            recovery_cycles_hidden: 0,
            stall_cycles: 0,
            groups: Vec::new(),
        };
    }
    let sched = merged_schedule(config);
    CycleReport {
        total_decode_cycles: base + sched.stall_cycles,
        recovery_cycles_hidden: sched.groups.iter().map(|g| g.latency - g.stall).sum(),
        stall_cycles: sched.stall_cycles,
        groups: sched.groups,
    }
}
