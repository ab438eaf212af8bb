//! Assembly of the full array code: `alpha` independent Reed-Solomon rows,
//! a column partition into sub-arrays, and one coupling plan per sub-array.
//!
//! A codeword is an `alpha x n` array whose columns are the stored nodes.
//! Encoding runs each of the `alpha` data rows through the same `(n, k)`
//! systematic Reed-Solomon code, then applies the set transform to each
//! sub-array of the column partition. Since both steps are invertible and
//! the transform only mixes symbols *within* a sub-array's columns, any `k`
//! node columns still determine the data — provided the coupling
//! coefficients avoid a finite set of degeneracies, which construction
//! checks (and retries with fresh coefficients) before returning a code.

use crate::galois::{Field, FieldSpec, GaloisError, Gf};
use crate::mds_verify::{self, VerifyOptions};
use crate::rs_base::{RsCode, RsError};
use crate::set_transform::{apply_transform, build_plan, CouplingPlan, TransformError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// How many fresh coefficient draws construction tries before giving up.
const MAX_BUILD_ATTEMPTS: u32 = 32;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid code parameters n={n} k={k} alpha={alpha}: {reason}")]
    BadParams {
        n: usize,
        k: usize,
        alpha: usize,
        reason: &'static str,
    },
    #[error("GF(2^{w}) has {have} elements but the code needs at least {need}")]
    FieldTooSmall { w: u8, have: usize, need: usize },
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("no valid coefficient assignment found after {attempts} attempts")]
    ConstructionFailed { attempts: u32 },
    #[error("data block has {got} symbols, expected {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("node column has {got} symbols, expected {expected}")]
    ColumnLength { expected: usize, got: usize },
    #[error("node index {0} out of range")]
    NodeRange(usize),
    #[error("conflicting symbols supplied for node {0}")]
    ConflictingNode(usize),
    #[error("need {need} distinct node columns, got {have}")]
    InsufficientNodes { have: usize, need: usize },
    #[error("column of node {0} does not match the decoded data")]
    InconsistentNode(usize),
}

/// Which columns are grouped into sub-arrays before coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum PartitionMode {
    /// Split data columns and parity columns separately, so every sub-array
    /// is all-data or all-parity.
    Kr,
    /// Split all `n` columns uniformly, ignoring the data/parity boundary.
    N,
}

impl fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionMode::Kr => "kr",
            PartitionMode::N => "n",
        })
    }
}

impl FromStr for PartitionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kr" => Ok(PartitionMode::Kr),
            "n" => Ok(PartitionMode::N),
            other => Err(format!("unknown partition mode `{other}` (use kr or n)")),
        }
    }
}

/// Everything needed to rebuild a code deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub field: FieldSpec,
    pub partition_mode: PartitionMode,
    pub seed: u64,
}

impl CodeParams {
    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        let (n, k, alpha) = (self.n, self.k, self.alpha);
        let bad = |reason: &'static str| CodeError::BadParams { n, k, alpha, reason };
        if k == 0 || k >= n {
            return Err(bad("need 0 < k < n"));
        }
        if alpha < 2 {
            return Err(bad("need alpha >= 2"));
        }
        let r = n - k;
        if alpha > r {
            return Err(bad("need alpha <= n - k"));
        }
        if r >= k {
            return Err(bad("need n - k < k (more data than parity columns)"));
        }
        if n > self.field.order() {
            return Err(CodeError::FieldTooSmall {
                w: self.field.w,
                have: self.field.order(),
                need: n,
            });
        }
        Ok(())
    }
}

/// One sub-array of the column partition: columns `start..start + width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ColumnPiece {
    pub start: usize,
    pub width: usize,
}

/// A partition of the `n` node columns into sub-arrays, each of width
/// `beta` with `alpha <= beta < 2*alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ColumnPartition {
    pieces: Vec<ColumnPiece>,
}

/// Cuts `width` columns starting at `start` into `width / alpha` pieces:
/// all of width `alpha` except the last, which absorbs the remainder.
fn cut(pieces: &mut Vec<ColumnPiece>, start: usize, width: usize, alpha: usize) {
    let count = width / alpha;
    debug_assert!(count >= 1);
    for p in 0..count {
        let w = if p + 1 == count {
            width - (count - 1) * alpha
        } else {
            alpha
        };
        pieces.push(ColumnPiece {
            start: start + p * alpha,
            width: w,
        });
    }
}

impl ColumnPartition {
    /// Builds the partition for validated parameters.
    pub fn new(n: usize, k: usize, alpha: usize, mode: PartitionMode) -> ColumnPartition {
        let mut pieces = Vec::new();
        match mode {
            PartitionMode::Kr => {
                cut(&mut pieces, 0, k, alpha);
                cut(&mut pieces, k, n - k, alpha);
            }
            PartitionMode::N => cut(&mut pieces, 0, n, alpha),
        }
        ColumnPartition { pieces }
    }

    pub fn pieces(&self) -> &[ColumnPiece] {
        &self.pieces
    }

    /// Piece index and local column of a global column.
    pub fn locate(&self, col: usize) -> (usize, usize) {
        let idx = self
            .pieces
            .partition_point(|p| p.start + p.width <= col);
        (idx, col - self.pieces[idx].start)
    }

    pub fn widths(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.width).collect()
    }
}

/// A fully constructed code: parameters, field tables, the Reed-Solomon
/// row code, the column partition and one verified coupling plan per piece.
#[derive(Debug, Clone, Serialize)]
pub struct CodeDescriptor {
    pub params: CodeParams,
    pub field: Field,
    pub rs: RsCode,
    pub partition: ColumnPartition,
    pub plans: Vec<CouplingPlan>,
    /// Coefficient draws needed before verification passed (1 = first try).
    pub attempts: u32,
}

impl CodeDescriptor {
    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn alpha(&self) -> usize {
        self.params.alpha
    }

    /// Symbols in one node column.
    pub fn column_len(&self) -> usize {
        self.params.alpha
    }

    /// Symbols in one data block.
    pub fn data_len(&self) -> usize {
        self.params.k * self.params.alpha
    }

    /// The coupling plan covering a global column, plus the local column.
    pub fn plan_at(&self, col: usize) -> (&CouplingPlan, usize) {
        let (p, local) = self.partition.locate(col);
        (&self.plans[p], local)
    }
}

fn draw_plans(
    params: &CodeParams,
    partition: &ColumnPartition,
    attempt: u32,
) -> Result<Vec<CouplingPlan>, CodeError> {
    let order = params.field.order() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(attempt as u64);
    let mut draw = move || Gf(rng.gen_range(2..order) as u16);
    partition
        .pieces()
        .iter()
        .map(|p| build_plan(params.alpha, p.width, &mut draw).map_err(CodeError::from))
        .collect()
}

/// Builds a code without checking that coupling preserved the
/// any-`k`-columns property. Useful for tests that want to inspect or
/// perturb a construction before verification.
pub fn build_code_unverified(params: CodeParams) -> Result<CodeDescriptor, CodeError> {
    params.validate()?;
    let field = Field::new(params.field)?;
    let rs = RsCode::new(&field, params.n, params.k)?;
    let partition = ColumnPartition::new(params.n, params.k, params.alpha, params.partition_mode);
    let plans = draw_plans(&params, &partition, 0)?;
    Ok(CodeDescriptor {
        params,
        field,
        rs,
        partition,
        plans,
        attempts: 1,
    })
}

/// Builds a code and verifies it: draws coupling coefficients from the
/// seed, checks that every `k`-column subset still determines the data,
/// and redraws (deterministically, up to a fixed attempt cap) on failure.
///
/// The result depends only on `params`, so a code can be rebuilt anywhere
/// from the parameter block alone.
pub fn build_code(params: CodeParams) -> Result<CodeDescriptor, CodeError> {
    let mut desc = build_code_unverified(params)?;
    for attempt in 0..MAX_BUILD_ATTEMPTS {
        if attempt > 0 {
            desc.plans = draw_plans(&params, &desc.partition, attempt)?;
            desc.attempts = attempt + 1;
        }
        let verdict = mds_verify::verify_mds(&desc, &VerifyOptions::default());
        if verdict.is_mds() {
            return Ok(desc);
        }
    }
    Err(CodeError::ConstructionFailed {
        attempts: MAX_BUILD_ATTEMPTS,
    })
}

/// Encodes `k * alpha` data symbols (row-major: row `i` holds the data of
/// Reed-Solomon instance `i`) into the stored `alpha x n` array, returned
/// row-major (`out[i * n + j]` is the symbol of node `j` at row `i`).
pub fn st_encode(desc: &CodeDescriptor, data: &[Gf]) -> Result<Vec<Gf>, CodeError> {
    let (n, k, alpha) = (desc.n(), desc.k(), desc.alpha());
    if data.len() != k * alpha {
        return Err(CodeError::DataLength {
            expected: k * alpha,
            got: data.len(),
        });
    }
    let mut rows = Vec::with_capacity(alpha);
    for i in 0..alpha {
        rows.push(desc.rs.encode(&desc.field, &data[i * k..(i + 1) * k])?);
    }
    let mut out = vec![Gf::ZERO; alpha * n];
    for (piece, plan) in desc.partition.pieces().iter().zip(&desc.plans) {
        let w = piece.width;
        let mut grid = Vec::with_capacity(alpha * w);
        for row in &rows {
            grid.extend_from_slice(&row[piece.start..piece.start + w]);
        }
        let stored = apply_transform(&desc.field, plan, &grid)?;
        for i in 0..alpha {
            out[i * n + piece.start..i * n + piece.start + w]
                .copy_from_slice(&stored[i * w..(i + 1) * w]);
        }
    }
    Ok(out)
}

/// Extracts node `j`'s column (top to bottom) from a row-major array.
pub fn node_column(desc: &CodeDescriptor, array: &[Gf], j: usize) -> Vec<Gf> {
    let n = desc.n();
    (0..desc.alpha()).map(|i| array[i * n + j]).collect()
}

/// Decodes the data block from at least `k` distinct node columns.
///
/// Columns beyond the first `k` distinct ones (duplicates included) are
/// checked against the decoded data, so a corrupted extra column is
/// reported rather than ignored.
pub fn st_decode(desc: &CodeDescriptor, columns: &[(usize, Vec<Gf>)]) -> Result<Vec<Gf>, CodeError> {
    let (n, k, alpha) = (desc.n(), desc.k(), desc.alpha());
    let mut seen: Vec<Option<&[Gf]>> = vec![None; n];
    let mut picked: Vec<usize> = Vec::with_capacity(k);
    for (j, col) in columns {
        if *j >= n {
            return Err(CodeError::NodeRange(*j));
        }
        if col.len() != alpha {
            return Err(CodeError::ColumnLength {
                expected: alpha,
                got: col.len(),
            });
        }
        match seen[*j] {
            Some(prev) if prev != col.as_slice() => {
                return Err(CodeError::ConflictingNode(*j));
            }
            Some(_) => {}
            None => {
                seen[*j] = Some(col.as_slice());
                if picked.len() < k {
                    picked.push(*j);
                }
            }
        }
    }
    let have = seen.iter().filter(|s| s.is_some()).count();
    if have < k {
        return Err(CodeError::InsufficientNodes { have, need: k });
    }

    // Solve the restriction of the global stored-symbol map to the picked
    // columns; construction guarantees it is invertible.
    let map = mds_verify::build_global_matrix(desc);
    let system = map.restrict_to_nodes(&picked);
    let mut rhs = Vec::with_capacity(k * alpha);
    for &j in &picked {
        rhs.extend_from_slice(seen[j].unwrap());
    }
    let data = system
        .solve(&desc.field, &rhs)
        .expect("verified code: any k columns form an invertible system");

    let array = st_encode(desc, &data)?;
    for (j, supplied) in seen.iter().enumerate() {
        if let Some(col) = supplied {
            if node_column(desc, &array, j) != *col {
                return Err(CodeError::InconsistentNode(j));
            }
        }
    }
    Ok(data)
}
