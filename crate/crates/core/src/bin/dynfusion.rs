//! Trace replay, differential fuzzing and word-op benchmarks.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynfusion::harness::{self, BenchConfig, FuzzConfig, Impl, Pattern};
use dynfusion::{Error, FusionTree, OpTrace, OracleSet};

#[derive(Parser)]
#[command(name = "dynfusion", version, about = "Dynamic fusion tree harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Geometry {
    /// Word width in bits (a power of two).
    #[arg(long, default_value_t = 256)]
    width: u32,
    /// Fusion node capacity; k^4 must not exceed the width.
    #[arg(long, default_value_t = 4)]
    k: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a trace file and print one line per query.
    Run {
        trace: PathBuf,
        #[command(flatten)]
        geo: Geometry,
        #[arg(long = "impl", default_value = "fusion")]
        imp: Impl,
    },
    /// Random ops through the tree and the oracle; exits 1 on divergence.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        ops: u64,
        #[command(flatten)]
        geo: Geometry,
        /// Keys are drawn below 2^keybits (default: min(width, 64)).
        #[arg(long)]
        keybits: Option<u32>,
        #[arg(long, default_value = "random")]
        pattern: Pattern,
        /// Deep audit period in ops; 0 disables.
        #[arg(long, default_value_t = 1000)]
        audit_every: u64,
        /// Where to write the minimized trace on failure.
        #[arg(long, default_value = "fuzz-failure.trace")]
        out: PathBuf,
    },
    /// Word ops, height and wall time per op class at each size.
    Bench {
        #[arg(long, default_value = "random")]
        pattern: Pattern,
        /// Set sizes; repeat to compare.
        #[arg(long, required = true)]
        n: Vec<u64>,
        #[command(flatten)]
        geo: Geometry,
        #[arg(long)]
        keybits: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long = "impl", default_value = "fusion")]
        imp: Impl,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Run { trace, geo, imp } => {
            let text = fs::read_to_string(&trace)?;
            let trace = OpTrace::parse(&text, geo.width)?;
            let mut tree = FusionTree::new(geo.width, geo.k)?;
            let mut oracle = OracleSet::new(geo.width);
            let lines = match imp {
                Impl::Fusion => trace.replay(&mut tree)?,
                Impl::Oracle => trace.replay(&mut oracle)?,
                Impl::Both => match trace.replay_both(&mut tree, &mut oracle) {
                    Ok(lines) => lines,
                    Err(d) => {
                        eprintln!("divergence at {d} (fusion vs oracle)");
                        return Ok(ExitCode::from(1));
                    }
                },
            };
            for line in lines {
                println!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Fuzz {
            seed,
            ops,
            geo,
            keybits,
            pattern,
            audit_every,
            out,
        } => {
            let cfg = FuzzConfig {
                seed,
                ops,
                width: geo.width,
                k: geo.k,
                keybits: keybits.unwrap_or(geo.width.min(64)),
                pattern,
                audit_every,
            };
            let report = harness::fuzz(&cfg)?;
            println!("{report}");
            eprintln!("{:.0} ops/sec", report.ops_per_sec());
            match &report.failure {
                None => Ok(ExitCode::SUCCESS),
                Some(fail) => {
                    let header = format!(
                        "# fuzz seed={seed} width={} k={} pattern={pattern}\n# {}\n",
                        geo.width, geo.k, fail.message
                    );
                    fs::write(&out, header + &fail.trace.to_string())?;
                    println!("trace written to {}", out.display());
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Bench {
            pattern,
            n,
            geo,
            keybits,
            seed,
            samples,
            imp,
        } => {
            let cfg = BenchConfig {
                pattern,
                sizes: n,
                width: geo.width,
                k: geo.k,
                keybits: keybits.unwrap_or(geo.width.min(64)),
                seed,
                samples,
            };
            let tree = FusionTree::new(geo.width, geo.k)?;
            if imp != Impl::Oracle {
                println!("{}", harness::bench(&cfg, "fusion", tree)?);
            }
            if imp != Impl::Fusion {
                println!("{}", harness::bench(&cfg, "oracle", OracleSet::new(geo.width))?);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
