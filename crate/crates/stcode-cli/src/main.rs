//! `stcode`: shard files with set-transformed Reed-Solomon array codes,
//! repair lost shards cheaply, and reproduce the repair-bandwidth numbers.

mod header;
mod report;
mod shards;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stcode_core::analysis::mds_field_size_bound;
use stcode_core::st_code::CodeError;
use stcode_core::{CodeParams, FieldSpec, PartitionMode};

use crate::shards::{choose_field, CliError};

/// The five parameter sets the benchmark defaults to.
const BENCH_SETS: [(usize, usize, usize); 5] =
    [(10, 7, 3), (14, 10, 4), (17, 13, 4), (22, 18, 4), (29, 25, 4)];

#[derive(Parser)]
#[command(
    name = "stcode",
    version,
    about = "Shard, repair, and verify files with set-transformed Reed-Solomon array codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_set(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected n,k,alpha (got `{s}`)"));
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad number `{t}`: {e}"));
    Ok((num(parts[0])?, num(parts[1])?, num(parts[2])?))
}

#[derive(Subcommand)]
enum Command {
    /// Split a file into n coded shards
    Encode {
        /// File to shard
        #[arg(long)]
        input: PathBuf,
        /// Total number of shards
        #[arg(long)]
        n: usize,
        /// Shards needed to reconstruct
        #[arg(long)]
        k: usize,
        /// Symbols stored per shard per stripe
        #[arg(long)]
        alpha: usize,
        /// Field width in bits (8 or 16); picked from the field-size bound when omitted
        #[arg(long)]
        w: Option<u8>,
        /// Column split: `kr` (data and parity separately) or `n` (uniform)
        #[arg(long, default_value = "n")]
        mode: PartitionMode,
        /// Seed for the coupling coefficients
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Directory for the shard files
        #[arg(long, default_value = "shards")]
        out: PathBuf,
    },
    /// Rebuild the original file from any k shards
    Decode {
        /// Directory holding the shards
        #[arg(long)]
        dir: PathBuf,
        /// Where to write the reconstructed file
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate one lost shard from the survivors
    Repair {
        /// Directory holding the surviving shards
        #[arg(long)]
        dir: PathBuf,
        /// Node whose shard was lost
        #[arg(long)]
        node: usize,
    },
    /// Measure repair bandwidth per parameter set; writes bench.csv and bench.json
    Bench {
        /// Parameter set as n,k,alpha; repeat for several (default: the five benchmark sets)
        #[arg(long = "set", value_parser = parse_set)]
        sets: Vec<(usize, usize, usize)>,
        #[arg(long, default_value = "n")]
        mode: PartitionMode,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Skip the per-row any-k-columns check
        #[arg(long)]
        skip_verify: bool,
        /// Directory for the CSV and JSON reports
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check that every k-subset of columns still determines the data
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: usize,
        /// Field width in bits (8 or 16); picked from the field-size bound when omitted
        #[arg(long)]
        w: Option<u8>,
        #[arg(long, default_value = "n")]
        mode: PartitionMode,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Test hook: force one coupling coefficient to 1, which breaks decoding
        #[arg(long, hide = true)]
        inject_theta_one: bool,
    },
    /// Print repair-bandwidth floors and field-size bounds (no construction)
    Bounds {
        /// Parameter set as n,k,alpha; repeat for several (default: the five benchmark sets)
        #[arg(long = "set", value_parser = parse_set)]
        sets: Vec<(usize, usize, usize)>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Resolves an explicit or automatic field width, warning when the field is
/// smaller than the size that guarantees a valid construction exists.
fn resolve_field(n: usize, k: usize, alpha: usize, w: Option<u8>) -> Result<FieldSpec, CliError> {
    let field = match w {
        Some(w) => FieldSpec::default_for(w).map_err(CodeError::from)?,
        None => choose_field(n, k, alpha),
    };
    let bound = mds_field_size_bound(n, k, alpha);
    if bound >= (1u128 << field.w) {
        eprintln!(
            "warning: guarantee bound {bound} >= field size {}; \
             the drawn coefficients may need verification to confirm",
            1u128 << field.w
        );
    }
    Ok(field)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode { input, n, k, alpha, w, mode, seed, out } => {
            let field = resolve_field(n, k, alpha, w)?;
            let params = CodeParams { n, k, alpha, field, partition_mode: mode, seed };
            let summary = shards::cmd_encode(&input, &out, params)?;
            println!(
                "encoded {} into {} shards under {}",
                input.display(),
                summary.n,
                summary.out_dir.display()
            );
            println!(
                "GF(2^{}), {} stripes, {} bytes per shard, {} coefficient draw(s)",
                summary.field_w, summary.stripes, summary.shard_bytes, summary.attempts
            );
            Ok(())
        }
        Command::Decode { dir, out } => {
            let summary = shards::cmd_decode(&dir, &out)?;
            println!(
                "decoded {} bytes to {} from nodes {:?}",
                summary.bytes,
                out.display(),
                summary.shards_used
            );
            Ok(())
        }
        Command::Repair { dir, node } => {
            let s = shards::cmd_repair(&dir, node)?;
            let (s1, s2, s3) = s.helper_split;
            println!("repaired node {} -> {}", s.node, s.path.display());
            println!(
                "downloaded {} symbols per stripe ({} stripes, {} total)",
                s.per_stripe_symbols, s.stripes, s.downloaded_symbols
            );
            println!("plan: {s1} row symbols + {s2} decoupling + {s3} patch");
            println!(
                "per-stripe ratio {}/{} = {:.3}; single-failure floor {} symbols",
                s.per_stripe_symbols,
                s.stripe_data_symbols,
                s.per_stripe_symbols as f64 / s.stripe_data_symbols as f64,
                s.lower_bound
            );
            Ok(())
        }
        Command::Bench { sets, mode, seed, skip_verify, out } => {
            let sets = if sets.is_empty() { BENCH_SETS.to_vec() } else { sets };
            let (report, csv_path, json_path) =
                report::cmd_bench(&sets, mode, seed, skip_verify, &out)?;
            for row in &report.rows {
                let reference = match &row.reference {
                    Some(r) => format!(" (published {:.1})", r.st_rs_percent),
                    None => String::new(),
                };
                println!(
                    "({}, {}, {}) mode {}: average {:.1}% of file size{}, floor {} symbols, {}",
                    row.n,
                    row.k,
                    row.alpha,
                    row.mode,
                    row.average_percent_1dp,
                    reference,
                    row.repair_lower_bound,
                    row.verification
                );
            }
            for failure in &report.failures {
                eprintln!(
                    "({}, {}, {}): failed: {}",
                    failure.n, failure.k, failure.alpha, failure.error
                );
            }
            println!("wrote {} and {}", csv_path.display(), json_path.display());
            if report.failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed(format!(
                    "{} of {} parameter sets failed",
                    report.failures.len(),
                    report.rows.len() + report.failures.len()
                )))
            }
        }
        Command::Verify { n, k, alpha, w, mode, seed, inject_theta_one } => {
            let s = report::cmd_verify(n, k, alpha, w, mode, seed, inject_theta_one)?;
            println!(
                "GF(2^{}): {} elements; guarantee bound {}",
                s.w, s.order, s.bound
            );
            if s.bound < s.order as u128 {
                println!("bound {} < {}: a valid construction is guaranteed", s.bound, s.order);
            } else {
                println!(
                    "warning: bound {} >= field size {}; only verification can confirm",
                    s.bound, s.order
                );
            }
            match &s.verdict.failing {
                None => {
                    println!(
                        "ok: {} of {} column subsets decode ({}, {} coefficient draw(s))",
                        s.verdict.checked,
                        s.verdict.total_subsets,
                        if s.verdict.exhaustive { "exhaustive" } else { "sampled" },
                        s.attempts
                    );
                    Ok(())
                }
                Some(subset) => {
                    println!(
                        "FAILED: column subset {:?} cannot decode (subset #{} in order)",
                        subset, s.verdict.checked
                    );
                    Err(CliError::VerificationFailed(format!("subset {subset:?}")))
                }
            }
        }
        Command::Bounds { sets } => {
            let sets = if sets.is_empty() { BENCH_SETS.to_vec() } else { sets };
            print!("{}", report::render_bounds(&sets));
            Ok(())
        }
    }
}
