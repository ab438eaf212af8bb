//! File sharding, reconstruction, and single-shard repair.
//!
//! A file is cut into stripes of `k * alpha` symbols. Each stripe is encoded
//! into an `alpha x n` array, and shard `j` stores column `j` of every
//! stripe. Shard files begin with a [`ShardHeader`], so any shard is enough
//! to rebuild the code descriptor that produced it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use stcode_core::analysis::mds_field_size_bound;
use stcode_core::st_code::CodeError;
use stcode_core::{
    build_code, build_global_matrix, execute_repair, plan_repair, CodeParams, FieldSpec, Gf,
    PartitionMode, RepairError, TrackingSource,
};
use thiserror::Error;

use crate::header::{HeaderError, ShardHeader, HEADER_LEN};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Header {
        path: PathBuf,
        #[source]
        source: HeaderError,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error("no shard files (shard_*.strs) found in {0}")]
    NoShards(PathBuf),
    #[error("found {have} shards but reconstruction needs at least {need}")]
    InsufficientShards { have: usize, need: usize },
    #[error("shards {0} and {1} describe different codes")]
    HeaderMismatch(PathBuf, PathBuf),
    #[error("shards {0} and {1} both claim node {2}")]
    DuplicateNode(PathBuf, PathBuf, usize),
    #[error("the repair plan needs node {0} but its shard is missing")]
    MissingShard(usize),
    #[error("{path}: payload is {got} bytes, header implies {want}")]
    PayloadLength { path: PathBuf, got: usize, want: usize },
    #[error("node index {node} out of range for n = {n}")]
    NodeRange { node: usize, n: usize },
    #[error("parameter {name} = {value} does not fit in the shard header")]
    HeaderRange { name: &'static str, value: usize },
    #[error("MDS verification failed: {0}")]
    VerificationFailed(String),
}

/// Canonical shard file name for a node.
pub fn shard_file_name(node: usize) -> String {
    format!("shard_{node:03}.strs")
}

/// Picks the smallest supported field whose size exceeds the construction's
/// any-`k`-columns guarantee bound (and can seat `n` evaluation points).
pub fn choose_field(n: usize, k: usize, alpha: usize) -> FieldSpec {
    let bound = mds_field_size_bound(n, k, alpha);
    if bound < 256 && n < 256 {
        FieldSpec::gf8()
    } else {
        FieldSpec::gf16()
    }
}

pub fn symbol_bytes(w: u8) -> usize {
    usize::from(w) / 8
}

fn symbols_from_bytes(bytes: &[u8], w: u8) -> Vec<Gf> {
    match w {
        8 => bytes.iter().map(|&b| Gf(u16::from(b))).collect(),
        _ => bytes
            .chunks_exact(2)
            .map(|p| Gf(u16::from_be_bytes([p[0], p[1]])))
            .collect(),
    }
}

fn push_symbol(out: &mut Vec<u8>, sym: Gf, w: u8) {
    match w {
        8 => out.push(sym.0 as u8),
        _ => out.extend_from_slice(&sym.0.to_be_bytes()),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a crash never leaves a half-written shard behind.
pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn u8_field(name: &'static str, value: usize) -> Result<u8, CliError> {
    u8::try_from(value).map_err(|_| CliError::HeaderRange { name, value })
}

fn header_for(params: &CodeParams, node: usize, payload_length: u64) -> Result<ShardHeader, CliError> {
    Ok(ShardHeader {
        w: params.field.w,
        n: u8_field("n", params.n)?,
        k: u8_field("k", params.k)?,
        alpha: u8_field("alpha", params.alpha)?,
        partition_mode: match params.partition_mode {
            PartitionMode::Kr => 0,
            PartitionMode::N => 1,
        },
        seed: params.seed,
        node_index: u8_field("node", node)?,
        payload_length,
        stripe_size: params.k as u32,
    })
}

fn params_from_header(h: &ShardHeader) -> Result<CodeParams, CliError> {
    Ok(CodeParams {
        n: usize::from(h.n),
        k: usize::from(h.k),
        alpha: usize::from(h.alpha),
        field: FieldSpec::default_for(h.w).map_err(CodeError::from)?,
        partition_mode: if h.partition_mode == 0 { PartitionMode::Kr } else { PartitionMode::N },
        seed: h.seed,
    })
}

/// One shard file found on disk.
pub struct FoundShard {
    pub path: PathBuf,
    pub header: ShardHeader,
}

/// Scans a directory for shard files and checks they all describe the same
/// encoded file. Returns them keyed by node index.
pub fn scan_shards(dir: &Path) -> Result<BTreeMap<usize, FoundShard>, CliError> {
    let mut found: BTreeMap<usize, FoundShard> = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|s| s.to_str()) {
            Some(name) => name,
            None => continue,
        };
        if !name.starts_with("shard_") || !name.ends_with(".strs") {
            continue;
        }
        let mut file = fs::File::open(&path)?;
        let header = ShardHeader::read_from(&mut file)
            .map_err(|source| CliError::Header { path: path.clone(), source })?;
        let node = usize::from(header.node_index);
        if let Some(prev) = found.get(&node) {
            return Err(CliError::DuplicateNode(prev.path.clone(), path, node));
        }
        if let Some(prev) = found.values().next() {
            if !prev.header.same_code(&header) {
                return Err(CliError::HeaderMismatch(prev.path.clone(), path));
            }
        }
        found.insert(node, FoundShard { path, header });
    }
    if found.is_empty() {
        return Err(CliError::NoShards(dir.to_path_buf()));
    }
    Ok(found)
}

/// Number of stripes implied by a header.
fn stripe_count(h: &ShardHeader) -> usize {
    let stripe_bytes =
        usize::from(h.k) * usize::from(h.alpha) * symbol_bytes(h.w);
    (h.payload_length as usize).div_ceil(stripe_bytes)
}

/// Reads one shard's column symbols, stripe-major.
fn read_shard_symbols(shard: &FoundShard) -> Result<Vec<Gf>, CliError> {
    let h = &shard.header;
    let bytes = fs::read(&shard.path)?;
    let want = HEADER_LEN + stripe_count(h) * usize::from(h.alpha) * symbol_bytes(h.w);
    if bytes.len() != want {
        return Err(CliError::PayloadLength {
            path: shard.path.clone(),
            got: bytes.len(),
            want,
        });
    }
    Ok(symbols_from_bytes(&bytes[HEADER_LEN..], h.w))
}

pub struct EncodeSummary {
    pub n: usize,
    pub stripes: usize,
    pub shard_bytes: usize,
    pub field_w: u8,
    pub attempts: u32,
    pub out_dir: PathBuf,
}

/// Splits `input` into `n` shard files under `out_dir`.
pub fn cmd_encode(input: &Path, out_dir: &Path, params: CodeParams) -> Result<EncodeSummary, CliError> {
    let bytes = fs::read(input)?;
    // Reject parameters the header cannot express before doing any work.
    header_for(&params, 0, 0)?;
    let desc = build_code(params)?;
    let (n, k, alpha, w) = (params.n, params.k, params.alpha, params.field.w);
    let sym = symbol_bytes(w);
    let stripe_bytes = k * alpha * sym;
    let stripes = bytes.len().div_ceil(stripe_bytes);

    let mut padded = bytes;
    let payload_length = padded.len() as u64;
    padded.resize(stripes * stripe_bytes, 0);

    let mut shards: Vec<Vec<u8>> = vec![Vec::with_capacity(stripes * alpha * sym); n];
    for stripe in padded.chunks_exact(stripe_bytes) {
        let data = symbols_from_bytes(stripe, w);
        let array = stcode_core::st_encode(&desc, &data)?;
        for (j, shard) in shards.iter_mut().enumerate() {
            for i in 0..alpha {
                push_symbol(shard, array[i * n + j], w);
            }
        }
    }

    fs::create_dir_all(out_dir)?;
    let mut shard_bytes = 0;
    for (j, body) in shards.into_iter().enumerate() {
        let mut out = Vec::with_capacity(HEADER_LEN + body.len());
        header_for(&params, j, payload_length)?.write_to(&mut out)?;
        out.extend_from_slice(&body);
        shard_bytes = out.len();
        atomic_write(&out_dir.join(shard_file_name(j)), &out)?;
    }
    Ok(EncodeSummary {
        n,
        stripes,
        shard_bytes,
        field_w: w,
        attempts: desc.attempts,
        out_dir: out_dir.to_path_buf(),
    })
}

pub struct DecodeSummary {
    pub bytes: u64,
    pub shards_used: Vec<usize>,
}

/// Rebuilds the original file from any `k` shards found in `dir`.
pub fn cmd_decode(dir: &Path, out: &Path) -> Result<DecodeSummary, CliError> {
    let found = scan_shards(dir)?;
    let header = found.values().next().unwrap().header;
    let params = params_from_header(&header)?;
    let (k, alpha, w) = (params.k, params.alpha, header.w);
    if found.len() < k {
        return Err(CliError::InsufficientShards { have: found.len(), need: k });
    }
    let desc = build_code(params)?;

    // The lowest-numbered k shards carry the reconstruction; invert their
    // slice of the code's global matrix once and reuse it per stripe.
    let nodes: Vec<usize> = found.keys().copied().take(k).collect();
    let inverse = build_global_matrix(&desc)
        .restrict_to_nodes(&nodes)
        .inverted(&desc.field)
        .map_err(CodeError::from)?;

    let columns: Vec<Vec<Gf>> = nodes
        .iter()
        .map(|node| read_shard_symbols(&found[node]))
        .collect::<Result<_, _>>()?;

    let stripes = stripe_count(&header);
    let sym = symbol_bytes(w);
    let mut plain = Vec::with_capacity(stripes * k * alpha * sym);
    let mut stacked = vec![Gf::ZERO; k * alpha];
    for s in 0..stripes {
        for (c, col) in columns.iter().enumerate() {
            stacked[c * alpha..(c + 1) * alpha].copy_from_slice(&col[s * alpha..(s + 1) * alpha]);
        }
        for &d in &inverse.mul_vec(&desc.field, &stacked) {
            push_symbol(&mut plain, d, w);
        }
    }
    plain.truncate(header.payload_length as usize);
    atomic_write(out, &plain)?;
    Ok(DecodeSummary { bytes: header.payload_length, shards_used: nodes })
}

pub struct RepairSummary {
    pub node: usize,
    pub stripes: usize,
    pub per_stripe_symbols: u64,
    pub downloaded_symbols: u64,
    pub stripe_data_symbols: u64,
    pub helper_split: (usize, usize, usize),
    pub lower_bound: u64,
    pub path: PathBuf,
}

/// Regenerates the shard of `node` from the surviving shards in `dir`.
///
/// Only the columns the repair plan touches are opened, and the reported
/// download count comes from an access tracker around the symbol reads, not
/// from the plan.
pub fn cmd_repair(dir: &Path, node: usize) -> Result<RepairSummary, CliError> {
    let mut found = scan_shards(dir)?;
    found.remove(&node);
    let header = match found.values().next() {
        Some(shard) => shard.header,
        None => return Err(CliError::InsufficientShards { have: 0, need: 1 }),
    };
    let params = params_from_header(&header)?;
    if node >= params.n {
        return Err(CliError::NodeRange { node, n: params.n });
    }
    let desc = build_code(params)?;
    let plan = plan_repair(&desc, node)?;

    let needed: BTreeSet<usize> = plan.all_cells().iter().map(|&(_, c)| c).collect();
    let mut columns: BTreeMap<usize, Vec<Gf>> = BTreeMap::new();
    for &c in &needed {
        let shard = found.get(&c).ok_or(CliError::MissingShard(c))?;
        columns.insert(c, read_shard_symbols(shard)?);
    }

    let (alpha, w) = (params.alpha, header.w);
    let stripes = stripe_count(&header);
    let sym = symbol_bytes(w);
    let mut body = Vec::with_capacity(stripes * alpha * sym);
    let mut downloaded = 0u64;
    for s in 0..stripes {
        let slice: BTreeMap<usize, Vec<Gf>> = columns
            .iter()
            .map(|(&c, col)| (c, col[s * alpha..(s + 1) * alpha].to_vec()))
            .collect();
        let mut source = TrackingSource::from_columns(slice);
        let rebuilt = execute_repair(&desc, node, &mut source)?;
        downloaded += source.download_count() as u64;
        for &v in &rebuilt {
            push_symbol(&mut body, v, w);
        }
    }

    let mut out = Vec::with_capacity(HEADER_LEN + body.len());
    let mut shard_header = header;
    shard_header.node_index = node as u8;
    shard_header.write_to(&mut out)?;
    out.extend_from_slice(&body);
    let path = dir.join(shard_file_name(node));
    atomic_write(&path, &out)?;

    let per_stripe = if stripes == 0 { plan.total() } else { downloaded / stripes as u64 };
    Ok(RepairSummary {
        node,
        stripes,
        per_stripe_symbols: per_stripe,
        downloaded_symbols: downloaded,
        stripe_data_symbols: (params.k * alpha) as u64,
        helper_split: (plan.s1.len(), plan.s2.len(), plan.s3.len()),
        lower_bound: stcode_core::analysis::repair_bandwidth_lower_bound(
            params.n, params.k, alpha,
        ),
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_choice_tracks_the_guarantee_bound() {
        assert_eq!(choose_field(10, 7, 3).w, 8); // bound 81
        assert_eq!(choose_field(14, 10, 3).w, 16); // bound 711
        assert_eq!(choose_field(4, 2, 2).w, 8); // bound 2
        assert_eq!(choose_field(29, 25, 4).w, 16); // bound 20468
    }

    #[test]
    fn symbol_round_trip_both_widths() {
        let mut out = Vec::new();
        for v in [0u16, 1, 0xab, 0xff] {
            push_symbol(&mut out, Gf(v), 8);
        }
        assert_eq!(out, [0, 1, 0xab, 0xff]);
        assert_eq!(
            symbols_from_bytes(&out, 8),
            [Gf(0), Gf(1), Gf(0xab), Gf(0xff)]
        );

        let mut out = Vec::new();
        push_symbol(&mut out, Gf(0x1234), 16);
        push_symbol(&mut out, Gf(0xffee), 16);
        assert_eq!(out, [0x12, 0x34, 0xff, 0xee]);
        assert_eq!(symbols_from_bytes(&out, 16), [Gf(0x1234), Gf(0xffee)]);
    }

    #[test]
    fn stripe_count_rounds_up() {
        let mut h = ShardHeader {
            w: 8,
            n: 4,
            k: 2,
            alpha: 2,
            partition_mode: 0,
            seed: 0,
            node_index: 0,
            payload_length: 0,
            stripe_size: 2,
        };
        assert_eq!(stripe_count(&h), 0);
        h.payload_length = 1;
        assert_eq!(stripe_count(&h), 1);
        h.payload_length = 4;
        assert_eq!(stripe_count(&h), 1);
        h.payload_length = 5;
        assert_eq!(stripe_count(&h), 2);
    }
}
