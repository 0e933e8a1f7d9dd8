//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use rayon::prelude::*;

use polar_pathmem::arch::schedule::ScheduleTable;
use polar_pathmem::arch::{recover_block, FoldedPsn, MemoryKind, PsnMode};
use polar_pathmem::cost::{
    bound_check, memory_report, recovery_latency, total_decode_cycles, BoundOutcome, FOLDED_PATH_MEMORY,
    FOLDED_PSN, MERGED_MEMORY, TRADITIONAL_PATH_MEMORY,
};
use polar_pathmem::polar::partial_sums;
use polar_pathmem::sim::{fer_montecarlo, frame_seed, random_frame, ChannelConfig};
use polar_pathmem::trace::{Op, ScheduleTrace, Unit};
use polar_pathmem::verify::equivalence_suite;
use polar_pathmem::{BitVector, CrcPoly, DecodeOptions, ListDecoder, PolarCodeConfig};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn recovery_round_trip() -> Check {
    let mut cases = Vec::new();
    for par in [2u64, 4, 8, 64] {
        for lam in 2..=12u32 {
            if 1u64 << lam >= par {
                cases.push((lam, par));
            }
        }
    }
    let vectors: Vec<u64> = cases
        .par_iter()
        .map(|&(lam, par)| -> Result<u64, String> {
            let len = 1usize << lam;
            let p = par.trailing_zeros();
            let latency = recovery_latency(len as u64, par).map_err(|e| e.to_string())?;
            let check = |u: BitVector| -> Result<(), String> {
                let s = partial_sums(&u, lam).map_err(|e| e.to_string())?;
                let r = recover_block(&s, p).map_err(|e| e.to_string())?;
                ensure(r.bits == u && r.cycles == latency, || {
                    format!("Λ={len} P={par}: u={u} recovered {} in {} cycles", r.bits, r.cycles)
                })
            };
            if len <= 16 {
                for v in 0..1u64 << len {
                    check(BitVector::from_word(v, len))?;
                }
                Ok(1 << len)
            } else {
                let mut rng = common::rng(frame_seed(0xacce, u64::from(lam) << 8 | par));
                for _ in 0..1000 {
                    check(BitVector::from_bits(common::random_bits(&mut rng, len)).unwrap())?;
                }
                Ok(1000)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!(
        "{} (Λ, P) pairs, {} vectors",
        cases.len(),
        vectors.iter().sum::<u64>()
    ))
}

fn worked_latency() -> Check {
    let got = recovery_latency(8, 2).map_err(|e| e.to_string())?;
    ensure(got == 4, || format!("recovery_latency(8, 2) = {got}"))?;
    Ok("recovery_latency(8, 2) = 4".into())
}

fn schedule_goldens() -> Check {
    let gen = ScheduleTable::generation(3, 1).map_err(|e| e.to_string())?;
    ensure(gen.render_csv() == include_str!("golden/fig1c.csv"), || {
        format!("generation table differs:\n{}", gen.render_text())
    })?;
    let rec = ScheduleTable::recovery(3, 1).map_err(|e| e.to_string())?;
    ensure(rec.render_csv() == include_str!("golden/fig5c.csv"), || {
        format!("recovery table differs:\n{}", rec.render_text())
    })?;

    // the PSN model must follow the same word order when it runs
    let u = [1u8, 0, 1, 1, 0, 1, 1, 0];
    let mut t = ScheduleTrace::new(true);
    let mut psn = FoldedPsn::new(PsnMode::Merged, 4, 1, 1);
    let mut cycle = 0;
    let mut gen_start = 0;
    for (i, &b) in u.iter().enumerate() {
        if i > 0 && i % 2 == 0 {
            let stage = i.trailing_zeros();
            psn.generate(cycle, stage, i - (1 << stage), &mut t).map_err(|e| e.to_string())?;
            cycle += (1u64 << stage) / 2;
        }
        psn.on_decision(cycle, &[0], &[b], &mut t).map_err(|e| e.to_string())?;
        cycle += 1;
    }
    gen_start = gen_start.max(cycle);
    let words = psn.generate(gen_start, 3, 0, &mut t).map_err(|e| e.to_string())?;
    let ops: Vec<(u64, Op, u64)> = t
        .events()
        .iter()
        .filter(|e| e.cycle >= gen_start && e.unit == Unit::PsnSram(0))
        .map(|e| (e.cycle - gen_start, e.op, e.addr))
        .collect();
    let expected = vec![
        (0, Op::Write, 3),
        (1, Op::Read, 2),
        (1, Op::Read, 3),
        (1, Op::Write, 2),
        (2, Op::Read, 1),
        (2, Op::Read, 3),
        (2, Op::Write, 1),
        (3, Op::Read, 0),
        (3, Op::Read, 2),
        (3, Op::Write, 0),
    ];
    ensure(ops == expected, || format!("PSN access order {ops:?}"))?;
    let s3 = partial_sums(&BitVector::from_bits(u.to_vec()).unwrap(), 3).unwrap();
    let packed: Vec<u64> = s3
        .as_slice()
        .chunks(2)
        .map(|c| u64::from(c[0]) | u64::from(c[1]) << 1)
        .collect();
    ensure(words[0] == packed, || format!("generated {:?}, expected {packed:?}", words[0]))?;

    let r = recover_block(&s3, 1).map_err(|e| e.to_string())?;
    let reads: Vec<(u64, u64)> = r
        .trace
        .events()
        .iter()
        .filter(|e| e.op == Op::RecoverRead)
        .map(|e| (e.cycle, e.addr))
        .collect();
    let fig5 = vec![(0, 0), (0, 2), (1, 1), (1, 3), (2, 0), (2, 1), (3, 2), (3, 3)];
    ensure(reads == fig5, || format!("recovery reads {reads:?}"))?;
    Ok("generation and recovery tables match cell for cell".into())
}

fn bound_boundary() -> Check {
    let big = bound_check(1 << 19, 64).map_err(|e| e.to_string())?;
    ensure(big.outcome.fits() && big.strict_predicate, || format!("(2^19, 64): {big:?}"))?;
    let exact = bound_check(8, 2).map_err(|e| e.to_string())?;
    ensure(
        exact.outcome == BoundOutcome::FitsExactly && !exact.strict_predicate,
        || format!("(8, 2): {exact:?}"),
    )?;
    let short = bound_check(16, 2).map_err(|e| e.to_string())?;
    ensure(short.outcome == BoundOutcome::Stalls(4), || format!("(16, 2): {short:?}"))?;
    Ok(format!(
        "(2^19,64) {:?}; (8,2) {:?} strict={}; (16,2) {:?}",
        big.outcome, exact.outcome, exact.strict_predicate, short.outcome
    ))
}

fn table_one() -> Check {
    let mut tested = 0;
    for n in 2..=20u32 {
        for p in 1..n.min(7) {
            for list in [1u64, 8, 32] {
                let (len, par) = (1u64 << n, 1u64 << p);
                let r = memory_report(len, par, list).map_err(|e| e.to_string())?;
                let row = |name| {
                    r.row(name)
                        .map(|x| (x.sram_port_width, x.sram_size))
                        .ok_or_else(|| format!("missing row {name}"))
                };
                ensure(row(FOLDED_PSN)? == (2 * par, len / 2), || format!("PSN N={len} P={par}"))?;
                ensure(row(FOLDED_PATH_MEMORY)? == (par, len), || format!("FPM N={len} P={par}"))?;
                ensure(row(MERGED_MEMORY)? == (2 * par, len), || format!("merged N={len} P={par}"))?;
                tested += 1;
            }
        }
    }
    Ok(format!("{tested} (N, P, L) configurations"))
}

fn cross_model() -> Check {
    let mut frames = 0;
    for (n, p) in [(6u32, 2u32), (7, 3), (10, 4)] {
        for list in [2usize, 4, 8] {
            let cfg = PolarCodeConfig::with_options(n, 1 << (n - 1), p, list, Some(CrcPoly::CCITT16), 0.0)
                .map_err(|e| e.to_string())?;
            let r = equivalence_suite(&cfg, 200, 0xc0de ^ u64::from(n) << 8 ^ list as u64)
                .map_err(|e| e.to_string())?;
            ensure(r.ok(), || {
                format!("N=2^{n} L={list}: {:?}", r.first_failure)
            })?;
            frames += r.passed;
        }
    }
    Ok(format!("{frames} frames, prefixes compared after every bit"))
}

fn latency_hiding() -> Check {
    let cfg = PolarCodeConfig::with_options(10, 512, 6, 4, Some(CrcPoly::CCITT16), 0.0)
        .map_err(|e| e.to_string())?;
    let with = total_decode_cycles(&cfg, true);
    let without = total_decode_cycles(&cfg, false);
    ensure(
        with.stall_cycles == 0 && with.total_decode_cycles == without.total_decode_cycles,
        || format!("with {with:?} without {without:?}"),
    )?;
    let opts = DecodeOptions {
        record_trace: true,
        cross_check: false,
    };
    let sigma = ChannelConfig::new(1.5, cfg.rate(), 0).unwrap().sigma();
    let (_, llrs) = random_frame::<f64>(&cfg, sigma, 17).map_err(|e| e.to_string())?;
    let out = ListDecoder::<f64>::with_options(cfg.clone(), polar_pathmem::MemoryKind::Merged, opts)
        .decode_frame(&llrs)
        .map_err(|e| e.to_string())?;
    let observed = out.trace.observed_cycles();
    ensure(
        observed == with.total_decode_cycles && out.trace.stall_cycles() == 0,
        || format!("trace shows {observed} cycles, analytic {}", with.total_decode_cycles),
    )?;
    let hidden: u64 = out.recovery.iter().map(|g| g.latency).sum();
    ensure(hidden == with.recovery_cycles_hidden, || {
        format!("simulated recovery {hidden}, analytic {}", with.recovery_cycles_hidden)
    })?;
    let huge = PolarCodeConfig::new(20, 1 << 19, 6, 1).map_err(|e| e.to_string())?;
    let huge_stalls = total_decode_cycles(&huge, true).stall_cycles;
    ensure(huge_stalls == 0, || format!("N=2^20 stalls {huge_stalls}"))?;
    Ok(format!(
        "{} cycles analytic = observed, {} recovery cycles hidden, 0 stalls",
        observed, hidden
    ))
}

fn sc_consistency() -> Check {
    let cfg = PolarCodeConfig::new(7, 64, 2, 1).map_err(|e| e.to_string())?;
    let sigma = ChannelConfig::new(1.0, cfg.rate(), 0).unwrap().sigma();
    let dec = ListDecoder::<f64>::new(cfg.clone(), MemoryKind::Folded);
    let mismatches: u64 = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let (_, llrs) = random_frame::<f64>(&cfg, sigma, frame_seed(0x5c, i)).unwrap();
            let (u, _) = common::sc_decode(&llrs, cfg.frozen_mask());
            let out = dec.decode_frame(&llrs).unwrap();
            u64::from(out.source_word.as_slice() != &u[..])
        })
        .sum();
    ensure(mismatches == 0, || format!("{mismatches} of 10000 frames differ"))?;
    Ok("10000 frames identical".into())
}

fn fer_property() -> Check {
    let ch = ChannelConfig::new(2.0, 64.0 / 128.0, 2024).map_err(|e| e.to_string())?;
    let run = |list| {
        let cfg = PolarCodeConfig::with_options(7, 80, 2, list, Some(CrcPoly::CCITT16), 0.0).unwrap();
        fer_montecarlo::<f64>(&cfg, MemoryKind::Folded, &ch, 10_000).map_err(|e| e.to_string())
    };
    let one = run(1)?;
    let eight = run(8)?;
    let detail = format!(
        "L=1 {} errors [{:.4}, {:.4}], L=8 {} errors [{:.4}, {:.4}]",
        one.errors, one.ci_low, one.ci_high, eight.errors, eight.ci_low, eight.ci_high
    );
    ensure(eight.errors < one.errors && eight.ci_high < one.ci_low, || detail.clone())?;
    Ok(detail)
}

fn area_proxy() -> Check {
    let mut worst: f64 = 0.0;
    for len in [1u64 << 10, 1 << 13] {
        for list in [8u64, 16, 32] {
            let r = memory_report(len, 64, list).map_err(|e| e.to_string())?;
            let folded = r.row(FOLDED_PATH_MEMORY).unwrap().proxy_cost(list);
            let trad = r.row(TRADITIONAL_PATH_MEMORY).unwrap().proxy_cost(list);
            let ratio = folded as f64 / trad as f64;
            worst = worst.max(ratio);
            ensure(2 * folded < trad, || format!("N={len} L={list}: {folded} vs {trad}"))?;
        }
    }
    Ok(format!("worst folded/traditional ratio {worst:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("recovery round-trip", recovery_round_trip),
        ("worked latency instance", worked_latency),
        ("schedule goldens", schedule_goldens),
        ("latency bound boundary", bound_boundary),
        ("SRAM table reproduction", table_one),
        ("cross-model equivalence", cross_model),
        ("latency hiding", latency_hiding),
        ("SC consistency", sc_consistency),
        ("FER list benefit", fer_property),
        ("area proxy", area_proxy),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
