mod manifest;

use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polar_pathmem::arch::schedule::ScheduleTable;
use polar_pathmem::cost::{bound_check, memory_report, total_decode_cycles, BoundCheck, CycleReport, MemoryCostReport};
use polar_pathmem::sim::{fer_csv, fer_montecarlo, ChannelConfig, FerPoint};
use polar_pathmem::verify::{verify, VerifyReport};
use polar_pathmem::{CrcPoly, Error, MemoryKind, PolarCodeConfig};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "pathmem", version, about = "Polar list decoding with folded and merged path memories")]
struct Cli {
    /// Worker threads for frame-parallel work (0 = all cores).
    #[arg(long, global = true, env = "PATHMEM_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-model equivalence and recovery round-trip suites.
    Verify(VerifyArgs),
    /// Per-cycle generation or recovery table for one group.
    Schedule(ScheduleArgs),
    /// Memory sizes, cycle counts and latency bounds.
    Report(ReportArgs),
    /// Monte Carlo frame error rate over BPSK/AWGN.
    Fer(FerArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct Format {
    /// Emit JSON with an embedded manifest.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV with `#` manifest lines.
    #[arg(long)]
    csv: bool,
    /// Record the wall-clock time in the manifest.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CrcChoice {
    /// CCITT-16 when K >= 32, otherwise none.
    Auto,
    None,
    Ccitt16,
    Crc8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Traditional,
    Folded,
    Merged,
}

impl From<KindArg> for MemoryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Traditional => MemoryKind::Traditional,
            KindArg::Folded => MemoryKind::Folded,
            KindArg::Merged => MemoryKind::Merged,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct CodeArgs {
    /// log2 of the code length N.
    #[arg(long)]
    n: u32,
    /// log2 of the parallelism P.
    #[arg(long)]
    p: u32,
    /// List size L (power of two).
    #[arg(long, default_value_t = 8)]
    list: usize,
    /// Unfrozen bits including CRC (default N/2).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = CrcChoice::Auto)]
    crc: CrcChoice,
    /// Design SNR of the Bhattacharyya construction, dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    design_snr: f64,
}

impl CodeArgs {
    fn config(&self) -> Result<PolarCodeConfig, Error> {
        if !(2..=30).contains(&self.n) {
            return Err(Error::InvalidConfig(format!("--n {} outside 2..=30", self.n)));
        }
        let k = self.k.unwrap_or(1 << (self.n - 1));
        let crc = match self.crc {
            CrcChoice::Auto => (k >= 32).then_some(CrcPoly::CCITT16),
            CrcChoice::None => None,
            CrcChoice::Ccitt16 => Some(CrcPoly::CCITT16),
            CrcChoice::Crc8 => Some(CrcPoly::CRC8),
        };
        PolarCodeConfig::with_options(self.n, k, self.p, self.list, crc, self.design_snr)
    }
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    code: CodeArgs,
    /// Frames for the equivalence suite and vectors per group length.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScheduleKindArg {
    Psn,
    Recovery,
}

#[derive(Args, Debug, Serialize)]
struct ScheduleArgs {
    #[arg(long, value_enum)]
    kind: ScheduleKindArg,
    /// log2 of the group length Λ.
    #[arg(long)]
    lambda: u32,
    /// log2 of the parallelism P.
    #[arg(long)]
    p: u32,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// log2 of the code length N.
    #[arg(long)]
    n: u32,
    /// log2 of the parallelism P.
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 8)]
    list: usize,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct FerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    code: CodeArgs,
    /// Eb/N0 points in dB, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    ebn0: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Folded)]
    memory: KindArg,
    #[command(flatten)]
    #[serde(skip)]
    format: Format,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::InvalidConfig(_) => Failure::Usage(e.into()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn emit_json(manifest: &RunManifest, result: impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&manifest.wrap(result)).context("encoding JSON")?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct ReportOut {
    memory: MemoryCostReport,
    cycles_without_recovery: CycleReport,
    cycles_with_recovery: CycleReport,
    bounds: Vec<GroupBound>,
}

#[derive(Serialize)]
struct GroupBound {
    length: u64,
    #[serde(flatten)]
    check: BoundCheck,
}

fn cmd_report(args: &ReportArgs) -> Result<(), Failure> {
    let cfg = PolarCodeConfig::new(args.n, 1 << args.n.saturating_sub(1).min(29), args.p, args.list)?;
    let (len, par) = (cfg.len() as u64, cfg.parallelism() as u64);
    let memory = memory_report(len, par, args.list as u64)?;
    let bounds = (args.p..args.n)
        .rev()
        .map(|stage| {
            Ok(GroupBound {
                length: 1 << stage,
                check: bound_check(1 << stage, par)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let out = ReportOut {
        memory,
        cycles_without_recovery: total_decode_cycles(&cfg, false),
        cycles_with_recovery: total_decode_cycles(&cfg, true),
        bounds,
    };
    let manifest = RunManifest::new("report", params(args), None, args.format.timestamp);
    if args.format.json {
        return emit_json(&manifest, &out);
    }
    if args.format.csv {
        print!("{}", manifest.comment_lines());
        println!("architecture,sram_port_width,sram_size,sram_count,register_bits,crossbar_lane_width,pointer_count,proxy_cost");
        for r in &out.memory.rows {
            println!(
                "{},{},{},{},{},{},{},{}",
                r.architecture,
                r.sram_port_width,
                r.sram_size,
                r.sram_count,
                r.register_bits,
                r.crossbar_lane_width,
                r.pointer_count,
                r.proxy_cost(args.list as u64)
            );
        }
        return Ok(());
    }
    print!("{}", manifest.comment_lines());
    print!("{}", out.memory.render_text());
    let w = &out.cycles_with_recovery;
    println!();
    println!("decode cycles without recovery: {}", out.cycles_without_recovery.total_decode_cycles);
    println!("decode cycles with recovery:    {}", w.total_decode_cycles);
    println!("recovery cycles hidden:         {}", w.recovery_cycles_hidden);
    println!("stall cycles:                   {}", w.stall_cycles);
    println!();
    println!("{:>10}  {:>10}  {:>10}  {:<16}  strict", "group", "latency", "budget", "outcome");
    for b in &out.bounds {
        println!(
            "{:>10}  {:>10}  {:>10}  {:<16}  {}",
            b.length,
            b.check.latency,
            b.check.budget,
            format!("{:?}", b.check.outcome),
            b.check.strict_predicate
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ScheduleOut {
    kind: ScheduleKindArg,
    lambda: u64,
    parallelism: u64,
    cycles: usize,
    rows: Vec<ScheduleRow>,
}

#[derive(Serialize)]
struct ScheduleRow {
    name: String,
    cells: Vec<Vec<String>>,
}

fn cmd_schedule(args: &ScheduleArgs) -> Result<(), Failure> {
    let table = match args.kind {
        ScheduleKindArg::Psn => ScheduleTable::generation(args.lambda, args.p)?,
        ScheduleKindArg::Recovery => ScheduleTable::recovery(args.lambda, args.p)?,
    };
    let manifest = RunManifest::new("schedule", params(args), None, args.format.timestamp);
    if args.format.json {
        let out = ScheduleOut {
            kind: args.kind,
            lambda: 1 << table.stage,
            parallelism: 1 << table.p,
            cycles: table.cycles,
            rows: table
                .rows
                .iter()
                .map(|(name, cells)| ScheduleRow {
                    name: name.clone(),
                    cells: cells.clone(),
                })
                .collect(),
        };
        return emit_json(&manifest, &out);
    }
    print!("{}", manifest.comment_lines());
    if args.format.csv {
        print!("{}", table.render_csv());
    } else {
        print!("{}", table.render_text());
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOut {
    passed: bool,
    #[serde(flatten)]
    report: VerifyReport,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let cfg = args.code.config()?;
    let report = verify(&cfg, args.trials, args.seed)?;
    let passed = report.all_passed();
    let manifest = RunManifest::new("verify", params(args), Some(args.seed), args.format.timestamp);
    if args.format.json {
        emit_json(&manifest, VerifyOut { passed, report })?;
    } else if args.format.csv {
        print!("{}", manifest.comment_lines());
        println!("suite,passed,failed");
        for s in &report.suites {
            println!("{},{},{}", s.name, s.passed, s.failed);
        }
    } else {
        print!("{}", manifest.comment_lines());
        for s in &report.suites {
            let status = if s.ok() { "PASS" } else { "FAIL" };
            println!("{status} {}: {} passed, {} failed", s.name, s.passed, s.failed);
            if let Some(f) = &s.first_failure {
                println!("     first failure: {f}");
            }
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_fer(args: &FerArgs) -> Result<(), Failure> {
    let cfg = args.code.config()?;
    if args.frames == 0 {
        return Err(Failure::Usage(anyhow::anyhow!("--frames must be at least 1")));
    }
    let points = args
        .ebn0
        .iter()
        .map(|&ebn0| {
            let ch = ChannelConfig::new(ebn0, cfg.rate(), args.seed)?;
            fer_montecarlo::<f64>(&cfg, args.memory.into(), &ch, args.frames)
        })
        .collect::<Result<Vec<FerPoint>, Error>>()?;
    let manifest = RunManifest::new("fer", params(args), Some(args.seed), args.format.timestamp);
    if args.format.json {
        return emit_json(&manifest, &points);
    }
    print!("{}", manifest.comment_lines());
    print!("{}", fer_csv(&points));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("starting the thread pool")?;
    }
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Report(a) => cmd_report(a),
        Command::Fer(a) => cmd_fer(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
