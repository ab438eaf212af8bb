//! Single-column repair with reduced download.
//!
//! To rebuild a failed node column the repair first identifies the column's
//! *major row* `s`: the row in which the column's sub-array keeps original
//! symbols (the diagonal set of the failed column's set index). Repair then
//! runs in three phases:
//!
//! 1. **Row acquisition.** Download the row-`s` stored symbol from `k`
//!    helper columns and enough companion symbols to strip the coupling off
//!    each, recovering `k` pre-coupling row-`s` symbols. A column is an
//!    eligible helper when none of the symbols this takes live in the
//!    failed column; exactly `alpha - 1` survivors are ineligible, and the
//!    construction guarantees `n - alpha >= k` eligible choices. Helpers
//!    are picked greedily by (companion cost, column index).
//! 2. **Row decode.** The `k` recovered symbols erasure-decode the row-`s`
//!    Reed-Solomon instance, yielding the pre-coupling row `s` across *all*
//!    columns — including the failed one and the ineligible ones.
//! 3. **Cross-row patching.** Every other failed cell sits in a coupling
//!    group that also contains row-`s` cells, whose pre-coupling values are
//!    now known. One stored symbol (two for a failed doubleton-half coupled
//!    to a singleton) per cell completes a small square system that yields
//!    the cell's underlying and stored values.
//!
//! Downloads shared between phases are counted once; [`RepairPlan`] keeps
//! both the deduplicated phase sets and the pre-sharing `raw_total`.

use crate::analysis::average_repair_percent;
use crate::galois::{GaloisError, Gf, GfMatrix};
use crate::rs_base::RsError;
use crate::set_transform::{Cell, CouplingGroup, GroupKind};
use crate::st_code::CodeDescriptor;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Global cell coordinate: `(row, node column)`.
pub type Coord = (usize, usize);

#[derive(Debug, Error)]
pub enum RepairError {
    #[error("node index {0} out of range")]
    NodeRange(usize),
    #[error("only {eligible} helper columns are eligible but {need} are required")]
    Infeasible { eligible: usize, need: usize },
    #[error("helper source has no symbol for cell ({0}, {1})")]
    MissingCell(usize, usize),
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// Where repair reads surviving symbols from. Implementations may count or
/// log fetches; repair requests every cell at most once.
pub trait HelperSource {
    /// The stored symbol at `(row, col)`, or `None` if this source cannot
    /// provide it.
    fn fetch(&mut self, row: usize, col: usize) -> Option<Gf>;
}

/// A [`HelperSource`] over in-memory symbols that records exactly which
/// cells were read.
pub struct TrackingSource {
    cells: BTreeMap<Coord, Gf>,
    fetched: BTreeSet<Coord>,
}

impl TrackingSource {
    /// Wraps a full row-major `alpha x n` stored array.
    pub fn from_array(array: &[Gf], n: usize) -> TrackingSource {
        let alpha = array.len() / n;
        let cells = (0..alpha)
            .flat_map(|i| (0..n).map(move |j| ((i, j), array[i * n + j])))
            .collect();
        TrackingSource {
            cells,
            fetched: BTreeSet::new(),
        }
    }

    /// Wraps a set of complete node columns (top-to-bottom symbol lists).
    pub fn from_columns(columns: BTreeMap<usize, Vec<Gf>>) -> TrackingSource {
        let cells = columns
            .into_iter()
            .flat_map(|(j, col)| {
                col.into_iter()
                    .enumerate()
                    .map(move |(i, v)| ((i, j), v))
                    .collect::<Vec<_>>()
            })
            .collect();
        TrackingSource {
            cells,
            fetched: BTreeSet::new(),
        }
    }

    /// Distinct cells read so far.
    pub fn download_count(&self) -> usize {
        self.fetched.len()
    }

    pub fn fetched(&self) -> &BTreeSet<Coord> {
        &self.fetched
    }
}

impl HelperSource for TrackingSource {
    fn fetch(&mut self, row: usize, col: usize) -> Option<Gf> {
        let v = self.cells.get(&(row, col)).copied()?;
        self.fetched.insert((row, col));
        Some(v)
    }
}

/// The row a failed column's repair decodes: the row whose sub-array set
/// covering the column lies on the diagonal.
pub fn major_row(desc: &CodeDescriptor, col: usize) -> usize {
    let (plan, local) = desc.plan_at(col);
    plan.geometry.set_index_of_col(local)
}

/// The stored cells that determine the pre-coupling value at `cell`
/// (which is always among them).
fn recovery_cells(group: &CouplingGroup, cell: Cell) -> Vec<Cell> {
    match group.kind {
        GroupKind::Identity => vec![cell],
        GroupKind::Pair => group.cells.clone(),
        GroupKind::Triple if cell == group.cells[1] => vec![cell],
        GroupKind::Triple => group.cells.clone(),
    }
}

/// The stored cells needed to rebuild `failed` once the major row's
/// pre-coupling values are known. Together with one known value per
/// row-`major` cell of the group, these square out the group's system.
fn patch_cells(group: &CouplingGroup, failed: Cell) -> Vec<Cell> {
    match group.kind {
        GroupKind::Identity => unreachable!("off-major cells are always coupled"),
        // the surviving cell completes the 2x2 system
        GroupKind::Pair => group.cells.iter().copied().filter(|&c| c != failed).collect(),
        GroupKind::Triple => {
            let [c1, c2, c3] = [group.cells[0], group.cells[1], group.cells[2]];
            if failed == c3 {
                vec![c1]
            } else if failed == c1 {
                vec![c2, c3]
            } else {
                vec![c1, c3]
            }
        }
    }
}

/// A helper column repair may draw on, with the companion cells (beyond
/// the row-`s` cell itself) that decoupling its row-`s` symbol costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperCandidate {
    pub col: usize,
    pub extra_cells: Vec<Coord>,
}

/// All eligible helper columns for a failed node, ascending by column.
/// A survivor is eligible when decoupling its row-`s` symbol reads nothing
/// from the failed column; exactly `alpha - 1` survivors fail this.
pub fn eligible_helpers(desc: &CodeDescriptor, failed: usize) -> Vec<HelperCandidate> {
    let s = major_row(desc, failed);
    let (fail_piece, fail_local) = desc.partition.locate(failed);
    let mut out = Vec::new();
    for col in 0..desc.n() {
        if col == failed {
            continue;
        }
        let (piece_idx, local) = desc.partition.locate(col);
        let piece = desc.partition.pieces()[piece_idx];
        let plan = &desc.plans[piece_idx];
        let need = recovery_cells(plan.group_of(s, local), (s, local));
        if piece_idx == fail_piece && need.iter().any(|&(_, lc)| lc == fail_local) {
            continue;
        }
        out.push(HelperCandidate {
            col,
            extra_cells: need
                .into_iter()
                .filter(|&c| c != (s, local))
                .map(|(r, lc)| (r, piece.start + lc))
                .collect(),
        });
    }
    out
}

/// A computed repair strategy: which cells each phase downloads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairPlan {
    pub failed: usize,
    pub major_row: usize,
    /// The `k` helper columns whose row symbols get decoded.
    pub helpers: Vec<usize>,
    /// Row-`s` stored symbols, one per helper.
    pub s1: Vec<Coord>,
    /// Companion symbols for decoupling, shared reads removed.
    pub s2: Vec<Coord>,
    /// Symbols for patching the failed column's other rows.
    pub s3: Vec<Coord>,
    /// Download count before removing shared reads.
    pub raw_total: u64,
}

impl RepairPlan {
    /// Distinct symbols downloaded.
    pub fn total(&self) -> u64 {
        (self.s1.len() + self.s2.len() + self.s3.len()) as u64
    }

    /// Every cell the plan reads.
    pub fn all_cells(&self) -> BTreeSet<Coord> {
        self.s1
            .iter()
            .chain(&self.s2)
            .chain(&self.s3)
            .copied()
            .collect()
    }
}

/// Plans the repair of one failed column.
pub fn plan_repair(desc: &CodeDescriptor, failed: usize) -> Result<RepairPlan, RepairError> {
    if failed >= desc.n() {
        return Err(RepairError::NodeRange(failed));
    }
    let k = desc.k();
    let s = major_row(desc, failed);
    let (fail_piece, fail_local) = desc.partition.locate(failed);
    let fail_start = desc.partition.pieces()[fail_piece].start;
    let plan = &desc.plans[fail_piece];

    let mut candidates = eligible_helpers(desc, failed);
    if candidates.len() < k {
        return Err(RepairError::Infeasible {
            eligible: candidates.len(),
            need: k,
        });
    }
    candidates.sort_by_key(|c| (c.extra_cells.len(), c.col));
    candidates.truncate(k);
    candidates.sort_by_key(|c| c.col);

    let helpers: Vec<usize> = candidates.iter().map(|c| c.col).collect();
    let s1: Vec<Coord> = helpers.iter().map(|&j| (s, j)).collect();
    let s1_set: BTreeSet<Coord> = s1.iter().copied().collect();

    let mut raw_total = k as u64;
    let mut s2_set = BTreeSet::new();
    for cand in &candidates {
        raw_total += cand.extra_cells.len() as u64;
        for &cell in &cand.extra_cells {
            if !s1_set.contains(&cell) {
                s2_set.insert(cell);
            }
        }
    }

    let mut s3_set = BTreeSet::new();
    for i in (0..desc.alpha()).filter(|&i| i != s) {
        let group = plan.group_of(i, fail_local);
        let patch = patch_cells(group, (i, fail_local));
        raw_total += patch.len() as u64;
        for (r, lc) in patch {
            let coord = (r, fail_start + lc);
            if !s1_set.contains(&coord) && !s2_set.contains(&coord) {
                s3_set.insert(coord);
            }
        }
    }

    Ok(RepairPlan {
        failed,
        major_row: s,
        helpers,
        s1,
        s2: s2_set.into_iter().collect(),
        s3: s3_set.into_iter().collect(),
        raw_total,
    })
}

/// Fetches every cell of a plan once, up front.
fn fetch_all(
    plan: &RepairPlan,
    source: &mut impl HelperSource,
) -> Result<BTreeMap<Coord, Gf>, RepairError> {
    let mut got = BTreeMap::new();
    for &(r, c) in plan.s1.iter().chain(&plan.s2).chain(&plan.s3) {
        let v = source.fetch(r, c).ok_or(RepairError::MissingCell(r, c))?;
        got.insert((r, c), v);
    }
    Ok(got)
}

/// Executes a repair plan against a helper source and returns the failed
/// column's stored symbols, top to bottom.
pub fn execute_repair(
    desc: &CodeDescriptor,
    failed: usize,
    source: &mut impl HelperSource,
) -> Result<Vec<Gf>, RepairError> {
    let plan = plan_repair(desc, failed)?;
    let fetched = fetch_all(&plan, source)?;
    let field = &desc.field;
    let s = plan.major_row;

    // Phase 1: strip the coupling off each helper's row-s symbol. The
    // cells read for a helper are exactly its group (full small solve) or
    // the cell alone (stored symbol is original).
    let mut row_points = Vec::with_capacity(plan.helpers.len());
    for &j in &plan.helpers {
        let (piece_idx, local) = desc.partition.locate(j);
        let piece = desc.partition.pieces()[piece_idx];
        let group = desc.plans[piece_idx].group_of(s, local);
        let need = recovery_cells(group, (s, local));
        let value = if need.len() == 1 {
            fetched[&(s, j)]
        } else {
            let stored: Vec<Gf> = group
                .cells
                .iter()
                .map(|&(r, lc)| fetched[&(r, piece.start + lc)])
                .collect();
            let fwd = group.forward_matrix().expect("coupled group");
            let under = fwd.solve(field, &stored)?;
            let idx = group.cells.iter().position(|&c| c == (s, local)).unwrap();
            under[idx]
        };
        row_points.push((j, value));
    }

    // Phase 2: decode the row-s code; the result spans all n columns.
    let row_s = desc.rs.erasure_decode(field, &row_points)?;

    // Phase 3: rebuild every failed cell. Row-s members of a cell's group
    // contribute known pre-coupling values; the plan's downloads contribute
    // stored values; together they square out the group's system.
    let (fail_piece, fail_local) = desc.partition.locate(failed);
    let piece = desc.partition.pieces()[fail_piece];
    let plan_t = &desc.plans[fail_piece];
    let mut column = vec![Gf::ZERO; desc.alpha()];
    for i in 0..desc.alpha() {
        if i == s {
            // major-row cell: stored as original, and row s is decoded
            column[i] = row_s[failed];
            continue;
        }
        let group = plan_t.group_of(i, fail_local);
        let cells = &group.cells;
        let m = cells.len();
        let fwd = group.forward_matrix().expect("coupled group");
        // Row-s members contribute their decoded pre-coupling values; the
        // plan's patch cells contribute stored values (fetched either here
        // or already as part of phase 1). Together the system is square.
        let mut eq_rows: Vec<Vec<Gf>> = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (idx, &(r, lc)) in cells.iter().enumerate() {
            if r == s {
                let mut row = vec![Gf::ZERO; m];
                row[idx] = Gf::ONE;
                eq_rows.push(row);
                rhs.push(row_s[piece.start + lc]);
            }
        }
        for (r, lc) in patch_cells(group, (i, fail_local)) {
            let coord = (r, piece.start + lc);
            let stored = *fetched.get(&coord).ok_or(RepairError::MissingCell(r, coord.1))?;
            let idx = cells.iter().position(|&c| c == (r, lc)).unwrap();
            eq_rows.push(fwd.row(idx).to_vec());
            rhs.push(stored);
        }
        debug_assert_eq!(eq_rows.len(), m, "patch system must be square");
        let system = GfMatrix::from_rows(&eq_rows);
        let under = system.solve(field, &rhs)?;
        let f_idx = cells.iter().position(|&c| c == (i, fail_local)).unwrap();
        let mut stored = Gf::ZERO;
        for c in 0..m {
            stored += field.mul(fwd.get(f_idx, c), under[c]);
        }
        column[i] = stored;
    }
    Ok(column)
}

/// Repair bandwidth of every single-column failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthReport {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// Symbols downloaded to repair each node.
    pub per_node: Vec<u64>,
    pub total_symbols: u64,
    /// Symbols in the stored file (`k * alpha`).
    pub file_symbols: u64,
    /// Mean of per-node download as a percentage of the file size.
    pub average_percent: f64,
}

fn report_from_per_node(desc: &CodeDescriptor, per_node: Vec<u64>) -> BandwidthReport {
    let total: u64 = per_node.iter().sum();
    BandwidthReport {
        n: desc.n(),
        k: desc.k(),
        alpha: desc.alpha(),
        per_node,
        total_symbols: total,
        file_symbols: (desc.k() * desc.alpha()) as u64,
        average_percent: average_repair_percent(total, desc.n(), desc.k(), desc.alpha()),
    }
}

/// Plans the repair of every node and tallies the downloads, in parallel
/// when the `parallel` feature is enabled.
pub fn measure_bandwidth(desc: &CodeDescriptor) -> Result<BandwidthReport, RepairError> {
    #[cfg(feature = "parallel")]
    {
        let per_node = (0..desc.n())
            .into_par_iter()
            .map(|j| plan_repair(desc, j).map(|p| p.total()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(report_from_per_node(desc, per_node))
    }
    #[cfg(not(feature = "parallel"))]
    {
        measure_bandwidth_sequential(desc)
    }
}

/// Single-threaded [`measure_bandwidth`], available regardless of features.
pub fn measure_bandwidth_sequential(desc: &CodeDescriptor) -> Result<BandwidthReport, RepairError> {
    let per_node = (0..desc.n())
        .map(|j| plan_repair(desc, j).map(|p| p.total()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report_from_per_node(desc, per_node))
}
