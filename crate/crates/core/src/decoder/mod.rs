//! CRC-aided list successive-cancellation decoding over the scheduling tree,
//! driving the path-memory models cycle by cycle.

mod list;

use std::marker::PhantomData;

pub use list::{
    candidate_order, expand_and_prune, f_function, g_function, hard_decision, path_metric_update,
    Candidate, DecoderPath, ListState, Survivors,
};

use crate::arch::{GroupRecovery, MemoryKind, MemorySystem};
use crate::bits::BitVector;
use crate::config::PolarCodeConfig;
use crate::cost::node_cycles;
use crate::crc::crc_check;
use crate::error::{Error, Result};
use crate::scalar::Llr;
use crate::trace::{Op, ScheduleTrace, Unit};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Keep every cycle event in the returned trace.
    pub record_trace: bool,
    /// Run all three path memories and compare their prefixes after every
    /// decided bit.
    pub cross_check: bool,
}

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    /// The `K` unfrozen bits of the chosen path, data followed by CRC.
    pub info: BitVector,
    pub data: BitVector,
    /// Whole source word `u` of the chosen path.
    pub source_word: BitVector,
    pub crc_pass: bool,
    pub path_metric: f64,
    pub trace: ScheduleTrace,
    /// Recovery placement, merged memory only.
    pub recovery: Vec<GroupRecovery>,
}

/// List decoder bound to one code configuration and memory architecture.
#[derive(Debug, Clone)]
pub struct ListDecoder<T> {
    config: PolarCodeConfig,
    kind: MemoryKind,
    options: DecodeOptions,
    _scalar: PhantomData<T>,
}

struct Run<'a, T> {
    config: &'a PolarCodeConfig,
    state: ListState<T>,
    spare: Vec<DecoderPath<T>>,
    channel: &'a [T],
    memory: MemorySystem,
    trace: ScheduleTrace,
    clock: u64,
    cross_check: bool,
}

impl<T: Llr> Run<'_, T> {
    /// LLRs of the parent of a stage-`stage` node.
    fn parent_llrs<'b>(channel: &'b [T], path: &'b DecoderPath<T>, stage: u32, n: u32) -> &'b [T] {
        if stage + 1 == n {
            channel
        } else {
            path.stage(stage + 1)
        }
    }

    fn pe_cycles(&mut self, op: Op, stage: u32, start: usize) -> Result<u64> {
        let cycles = node_cycles(stage, self.config.p());
        let c0 = self.clock;
        for c in c0..c0 + cycles {
            self.trace.push(c, Unit::Pe, op, stage as u64, start as u64);
            if stage < self.config.p() {
                self.memory.on_idle_cycle(c, &mut self.trace)?;
            }
        }
        self.clock += cycles;
        Ok(c0)
    }

    fn f_node(&mut self, stage: u32, start: usize) -> Result<()> {
        let n = self.config.n();
        let half = 1usize << stage;
        for path in self.state.paths.iter_mut().filter(|p| p.active) {
            let parent = Self::parent_llrs(self.channel, path, stage, n);
            let out: Vec<T> = (0..half)
                .map(|k| f_function(parent[k], parent[k + half]))
                .collect();
            path.stage_mut(stage).copy_from_slice(&out);
        }
        self.pe_cycles(Op::F, stage, start)?;
        Ok(())
    }

    fn g_node(&mut self, stage: u32, start: usize) -> Result<()> {
        let n = self.config.n();
        let half = 1usize << stage;
        let c0 = self.clock;
        let sums = self
            .memory
            .g_partial_sums(c0, stage, start - half, &mut self.trace)?;
        for (path, s) in self.state.paths.iter_mut().zip(&sums) {
            if !path.active {
                continue;
            }
            let parent = Self::parent_llrs(self.channel, path, stage, n);
            let out: Vec<T> = (0..half)
                .map(|k| g_function(parent[k], parent[k + half], s[k]))
                .collect();
            path.stage_mut(stage).copy_from_slice(&out);
        }
        self.pe_cycles(Op::G, stage, start)?;
        self.memory
            .after_g_node(stage, start, &mut self.clock, &mut self.trace)?;
        Ok(())
    }

    fn leaf(&mut self, i: usize) -> Result<()> {
        let cycle = self.clock - 1;
        let llrs: Vec<T> = self.state.paths.iter().map(|p| p.stage(0)[0]).collect();
        let frozen = self.config.is_frozen(i);
        let surv = expand_and_prune(&self.state.metrics(), &self.state.active_mask(), &llrs, frozen);
        self.trace
            .push(cycle, Unit::ListMgmt, Op::Decide, i as u64, frozen as u64);
        for (k, slot) in self.spare.iter_mut().enumerate() {
            let src = &self.state.paths[surv.parents[k]];
            slot.llr_workspace.clone_from(&src.llr_workspace);
            slot.metric = surv.metrics[k];
            slot.active = surv.active[k];
        }
        std::mem::swap(&mut self.state.paths, &mut self.spare);
        self.state.bit_index = i + 1;
        self.memory
            .on_decision(cycle, &surv.parents, &surv.bits, &mut self.trace)?;
        if self.cross_check {
            self.memory.check_equivalence(&self.state.active_paths())?;
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let n = self.config.n();
        for i in 0..self.config.len() {
            if i == 0 {
                for stage in (0..n).rev() {
                    self.f_node(stage, 0)?;
                }
            } else {
                let t = i.trailing_zeros();
                self.g_node(t, i)?;
                for stage in (0..t).rev() {
                    self.f_node(stage, i)?;
                }
            }
            self.leaf(i)?;
        }
        let stalls = self.memory.finish(&mut self.clock, &mut self.trace)?;
        let total_stalls = self.memory.merged().map_or(stalls, |m| m.stall_cycles());
        self.trace.set_totals(self.clock, total_stalls);
        Ok(())
    }
}

impl<T: Llr> ListDecoder<T> {
    pub fn new(config: PolarCodeConfig, kind: MemoryKind) -> Self {
        Self::with_options(config, kind, DecodeOptions::default())
    }

    pub fn with_options(config: PolarCodeConfig, kind: MemoryKind, options: DecodeOptions) -> Self {
        Self {
            config,
            kind,
            options,
            _scalar: PhantomData,
        }
    }

    pub fn config(&self) -> &PolarCodeConfig {
        &self.config
    }

    pub fn memory_kind(&self) -> MemoryKind {
        self.kind
    }

    pub fn options(&self) -> DecodeOptions {
        self.options
    }

    /// Decodes one frame of channel LLRs (positive favours bit 0).
    pub fn decode_frame(&self, channel_llrs: &[T]) -> Result<DecodeOutput> {
        let cfg = &self.config;
        if channel_llrs.len() != cfg.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} channel LLRs, got {}",
                cfg.len(),
                channel_llrs.len()
            )));
        }
        if let Some(i) = channel_llrs.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidInput(format!("channel LLR {i} is NaN")));
        }
        let list = cfg.list_size();
        let mut run = Run {
            config: cfg,
            state: ListState::new(cfg.n(), list),
            spare: (0..list).map(|l| DecoderPath::new(l, cfg.n())).collect(),
            channel: channel_llrs,
            memory: MemorySystem::new(cfg.n(), cfg.p(), list, self.kind, self.options.cross_check),
            trace: ScheduleTrace::new(self.options.record_trace),
            clock: 0,
            cross_check: self.options.cross_check,
        };
        run.run()?;

        let mut order = run.state.active_paths();
        order.sort_by(|&a, &b| {
            let (ma, mb) = (run.state.paths[a].metric, run.state.paths[b].metric);
            ma.partial_cmp(&mb).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        let mut chosen = None;
        for &l in &order {
            let u = run.memory.read_path(self.kind, l)?;
            let info = cfg.extract_info(&u);
            let pass = match cfg.crc() {
                Some(poly) => crc_check(&info, poly)?,
                None => true,
            };
            if pass {
                chosen = Some((l, u, info, true));
                break;
            }
            if chosen.is_none() {
                chosen = Some((l, u, info, false));
            }
        }
        let (l, source_word, info, crc_pass) = chosen.expect("path 0 is always active");
        let data = info.slice(0, cfg.data_len());
        Ok(DecodeOutput {
            info,
            data,
            source_word,
            crc_pass,
            path_metric: run.state.paths[l].metric.to_f64().unwrap_or(f64::NAN),
            recovery: run
                .memory
                .merged()
                .map(|m| m.records().to_vec())
                .unwrap_or_default(),
            trace: run.trace,
        })
    }
}
