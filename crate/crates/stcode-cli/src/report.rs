//! Benchmark, verification, and bound reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use stcode_core::analysis::{binomial, bounds_report, reference_rows, ExactRatio, ReferenceRow};
use stcode_core::mds_verify::MdsVerdict;
use stcode_core::{
    build_code, build_code_unverified, measure_bandwidth, verify_mds, CodeParams, FieldSpec, Gf,
    PartitionMode, VerifyOptions,
};

use crate::shards::{atomic_write, choose_field, CliError};

/// One measured parameter set in a benchmark report.
#[derive(Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub w: u8,
    pub mode: String,
    pub seed: u64,
    /// Coefficient draws needed before verification passed.
    pub attempts: u32,
    /// Symbols downloaded to repair each node.
    pub per_node: Vec<u64>,
    pub total_symbols: u64,
    /// Mean download as a percentage of the stored file, exact.
    pub average_percent: f64,
    /// The same percentage truncated to one decimal, as published tables
    /// render it.
    pub average_percent_1dp: f64,
    pub min_node_symbols: u64,
    /// Single-failure floor for these parameters.
    pub repair_lower_bound: u64,
    /// Cut-set floor (percent, truncated to one decimal).
    pub cut_set_percent_1dp: f64,
    pub verification: String,
    pub wall_ms: u128,
    /// Published comparison numbers, when this is one of the five
    /// benchmark parameter sets.
    pub reference: Option<ReferenceRow>,
}

#[derive(Serialize)]
pub struct BenchFailure {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub error: String,
}

#[derive(Serialize)]
pub struct BenchReport {
    pub mode: String,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub failures: Vec<BenchFailure>,
}

/// Builds, verifies, and measures every parameter set, then writes
/// `bench.csv` (one line per node) and `bench.json` (row summaries with
/// reference numbers) under `out_dir`.
pub fn cmd_bench(
    sets: &[(usize, usize, usize)],
    mode: PartitionMode,
    seed: u64,
    skip_verify: bool,
    out_dir: &Path,
) -> Result<(BenchReport, PathBuf, PathBuf), CliError> {
    let mut report = BenchReport {
        mode: mode.to_string(),
        seed,
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for &(n, k, alpha) in sets {
        match bench_row(n, k, alpha, mode, seed, skip_verify) {
            Ok(row) => report.rows.push(row),
            Err(e) => report.failures.push(BenchFailure { n, k, alpha, error: e.to_string() }),
        }
    }

    let mut csv = String::from("n,k,alpha,mode,node,count,ratio\n");
    for row in &report.rows {
        let per_symbol = (row.k * row.alpha) as f64;
        for (node, &count) in row.per_node.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{:.6}\n",
                row.n,
                row.k,
                row.alpha,
                row.mode,
                node,
                count,
                count as f64 / per_symbol
            ));
        }
    }

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("bench.csv");
    let json_path = out_dir.join("bench.json");
    atomic_write(&csv_path, csv.as_bytes())?;
    let mut json = serde_json::to_vec_pretty(&report).expect("report serializes");
    json.push(b'\n');
    atomic_write(&json_path, &json)?;
    Ok((report, csv_path, json_path))
}

fn bench_row(
    n: usize,
    k: usize,
    alpha: usize,
    mode: PartitionMode,
    seed: u64,
    skip_verify: bool,
) -> Result<BenchRow, CliError> {
    let field = choose_field(n, k, alpha);
    let params = CodeParams { n, k, alpha, field, partition_mode: mode, seed };
    let started = Instant::now();
    let (desc, verification) = if skip_verify {
        (build_code_unverified(params)?, "skipped".to_string())
    } else {
        let desc = build_code(params)?;
        let opts = VerifyOptions::default();
        let subsets = binomial(n as u64, k as u64);
        let status = if subsets <= opts.exhaustive_limit {
            format!("ok ({subsets} column subsets, exhaustive)")
        } else {
            format!("ok ({} of {subsets} column subsets sampled)", opts.samples)
        };
        (desc, status)
    };
    let measured = measure_bandwidth(&desc)?;
    let wall_ms = started.elapsed().as_millis();

    let exact = ExactRatio {
        num: u128::from(measured.total_symbols),
        den: (n * k * alpha) as u128,
    };
    Ok(BenchRow {
        n,
        k,
        alpha,
        w: field.w,
        mode: mode.to_string(),
        seed,
        attempts: desc.attempts,
        min_node_symbols: measured.per_node.iter().copied().min().unwrap_or(0),
        average_percent: measured.average_percent,
        average_percent_1dp: exact.percent_floor_1dp(),
        total_symbols: measured.total_symbols,
        per_node: measured.per_node,
        repair_lower_bound: stcode_core::analysis::repair_bandwidth_lower_bound(n, k, alpha),
        cut_set_percent_1dp: stcode_core::analysis::cut_set_ratio(n, k).percent_floor_1dp(),
        verification,
        wall_ms,
        reference: reference_rows()
            .iter()
            .copied()
            .find(|r| (r.n, r.k, r.alpha) == (n, k, alpha)),
    })
}

pub struct VerifySummary {
    pub w: u8,
    pub order: usize,
    pub bound: u128,
    pub attempts: u32,
    pub verdict: MdsVerdict,
}

/// Builds a code and checks the any-`k`-columns property, optionally
/// sabotaging one coupling coefficient first (a hook for exercising the
/// failure path end to end).
pub fn cmd_verify(
    n: usize,
    k: usize,
    alpha: usize,
    w: Option<u8>,
    mode: PartitionMode,
    seed: u64,
    inject_theta_one: bool,
) -> Result<VerifySummary, CliError> {
    let field = match w {
        Some(w) => FieldSpec::default_for(w).map_err(stcode_core::st_code::CodeError::from)?,
        None => choose_field(n, k, alpha),
    };
    let params = CodeParams { n, k, alpha, field, partition_mode: mode, seed };
    let desc = if inject_theta_one {
        let mut desc = build_code_unverified(params)?;
        'plans: for plan in &mut desc.plans {
            for group in &mut plan.groups {
                if group.theta.is_some() {
                    group.theta = Some(Gf::ONE);
                    break 'plans;
                }
            }
        }
        desc
    } else {
        build_code(params)?
    };
    let verdict = verify_mds(&desc, &VerifyOptions::default());
    Ok(VerifySummary {
        w: field.w,
        order: 1usize << field.w,
        bound: stcode_core::analysis::mds_field_size_bound(n, k, alpha),
        attempts: desc.attempts,
        verdict,
    })
}

/// Renders the parameter-derived floors as a fixed-width table.
pub fn render_bounds(sets: &[(usize, usize, usize)]) -> String {
    let mut out = String::from(
        "    n    k alpha | repair floor | et-rs floor | gap | field bound | cut-set %\n",
    );
    for &(n, k, alpha) in sets {
        let b = bounds_report(n, k, alpha);
        out.push_str(&format!(
            "{:5} {:4} {:5} | {:12} | {:11} | {:3} | {:11} | {:9.1}\n",
            b.n,
            b.k,
            b.alpha,
            b.repair_lower_bound,
            b.et_rs_node_lower_bound,
            b.guaranteed_gap,
            b.mds_field_size_bound,
            b.cut_set_ratio.percent_floor_1dp(),
        ));
    }
    out
}
