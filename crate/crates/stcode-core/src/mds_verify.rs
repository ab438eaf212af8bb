//! Verification that a constructed code keeps the any-`k`-columns
//! property: every set of `k` node columns must determine all
//! `k * alpha` data symbols.
//!
//! The check works on a single global matrix built *structurally* — from
//! the Reed-Solomon generator and the coupling plans, not by calling the
//! encoder — so comparing it against [`crate::st_code::st_encode`] is a
//! genuine two-route consistency test (see this module's tests). Each
//! stored cell contributes one row; a subset of columns is good exactly
//! when its `k*alpha x k*alpha` row restriction is invertible.
//!
//! Subset enumeration is exhaustive up to a configurable budget and
//! switches to seeded random sampling beyond it. With the `parallel`
//! feature the subsets are checked with rayon; a sequential variant is
//! always available for comparison.

use crate::analysis::binomial;
use crate::galois::GfMatrix;
use crate::st_code::CodeDescriptor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

/// The stored-array encoding as one linear map.
///
/// Row `j * alpha + i` maps the data vector (row-major, instance `i` at
/// `i * k .. (i+1) * k`) to the stored symbol of node `j` at row `i`.
#[derive(Debug, Clone)]
pub struct GlobalMap {
    pub matrix: GfMatrix,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
}

impl GlobalMap {
    /// Stacks the row blocks of the given nodes, in the order given.
    pub fn restrict_to_nodes(&self, nodes: &[usize]) -> GfMatrix {
        let alpha = self.alpha;
        GfMatrix::from_fn(nodes.len() * alpha, self.k * alpha, |r, c| {
            let node = nodes[r / alpha];
            self.matrix.get(node * alpha + r % alpha, c)
        })
    }
}

/// Assembles the stored-symbol map of a code from its structure: the
/// pre-coupling map places Reed-Solomon generator columns per instance,
/// then every coupled group rewrites its cells' rows through the group's
/// forward matrix.
pub fn build_global_matrix(desc: &CodeDescriptor) -> GlobalMap {
    let (n, k, alpha) = (desc.n(), desc.k(), desc.alpha());
    let gen = desc.rs.generator();
    let mut m = GfMatrix::zero(n * alpha, k * alpha);
    for j in 0..n {
        for i in 0..alpha {
            for d in 0..k {
                m.set(j * alpha + i, i * k + d, gen.get(d, j));
            }
        }
    }
    for (piece, plan) in desc.partition.pieces().iter().zip(&desc.plans) {
        for group in &plan.groups {
            let Some(fwd) = group.forward_matrix() else {
                continue;
            };
            let rows: Vec<usize> = group
                .cells
                .iter()
                .map(|&(i, local)| (piece.start + local) * alpha + i)
                .collect();
            let old: Vec<Vec<_>> = rows.iter().map(|&r| m.row(r).to_vec()).collect();
            for (t, &r) in rows.iter().enumerate() {
                for c in 0..k * alpha {
                    let mut acc = crate::galois::Gf::ZERO;
                    for (s, old_row) in old.iter().enumerate() {
                        acc += desc.field.mul(fwd.get(t, s), old_row[c]);
                    }
                    m.set(r, c, acc);
                }
            }
        }
    }
    GlobalMap {
        matrix: m,
        n,
        k,
        alpha,
    }
}

/// Budgets for [`verify_mds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Check all subsets when their count is at most this.
    pub exhaustive_limit: u128,
    /// Number of random subsets to draw beyond the exhaustive budget.
    pub samples: u64,
    /// Seed for the sampled mode, so runs are reproducible.
    pub sample_seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exhaustive_limit: 1_000_000,
            samples: 20_000,
            sample_seed: 0xC0DE,
        }
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MdsVerdict {
    /// Total number of `k`-subsets of the `n` columns.
    pub total_subsets: u128,
    /// Subsets this run actually examined (on failure: the failing
    /// subset's 1-based position in the enumeration order).
    pub checked: u64,
    /// Whether every subset was examined.
    pub exhaustive: bool,
    /// The first bad subset in enumeration order — lexicographically first
    /// when exhaustive — or `None` when all examined subsets were good.
    pub failing: Option<Vec<usize>>,
}

impl MdsVerdict {
    pub fn is_mds(&self) -> bool {
        self.failing.is_none()
    }
}

/// The `rank`-th (0-based) size-`k` subset of `0..n` in lexicographic order.
fn combination_at_rank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut remaining = k;
    let mut x = 0;
    while remaining > 0 {
        let with_x = binomial((n - x - 1) as u64, (remaining - 1) as u64);
        if rank < with_x {
            out.push(x);
            remaining -= 1;
        } else {
            rank -= with_x;
        }
        x += 1;
    }
    out
}

fn subset_is_good(desc: &CodeDescriptor, map: &GlobalMap, nodes: &[usize]) -> bool {
    map.restrict_to_nodes(nodes).is_invertible(&desc.field)
}

fn sampled_subsets(desc: &CodeDescriptor, opts: &VerifyOptions) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.sample_seed);
    (0..opts.samples)
        .map(|_| {
            let mut s = rand::seq::index::sample(&mut rng, desc.n(), desc.k()).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

fn verdict_from_scan(
    total: u128,
    exhaustive: bool,
    scanned: u64,
    failure: Option<(u64, Vec<usize>)>,
) -> MdsVerdict {
    match failure {
        Some((pos, subset)) => MdsVerdict {
            total_subsets: total,
            checked: pos + 1,
            exhaustive,
            failing: Some(subset),
        },
        None => MdsVerdict {
            total_subsets: total,
            checked: scanned,
            exhaustive,
            failing: None,
        },
    }
}

/// Checks the any-`k`-columns property, examining subsets in parallel when
/// the `parallel` feature is enabled.
pub fn verify_mds(desc: &CodeDescriptor, opts: &VerifyOptions) -> MdsVerdict {
    #[cfg(feature = "parallel")]
    {
        let map = build_global_matrix(desc);
        let total = binomial(desc.n() as u64, desc.k() as u64);
        if total <= opts.exhaustive_limit {
            let count = total as u64;
            let failure = (0..count)
                .into_par_iter()
                .find_first(|&rank| {
                    let subset = combination_at_rank(desc.n(), desc.k(), rank as u128);
                    !subset_is_good(desc, &map, &subset)
                })
                .map(|rank| (rank, combination_at_rank(desc.n(), desc.k(), rank as u128)));
            verdict_from_scan(total, true, count, failure)
        } else {
            let subsets = sampled_subsets(desc, opts);
            let failure = subsets
                .par_iter()
                .enumerate()
                .find_first(|(_, s)| !subset_is_good(desc, &map, s))
                .map(|(pos, s)| (pos as u64, s.clone()));
            verdict_from_scan(total, false, opts.samples, failure)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        verify_mds_sequential(desc, opts)
    }
}

/// Single-threaded [`verify_mds`], available regardless of features.
pub fn verify_mds_sequential(desc: &CodeDescriptor, opts: &VerifyOptions) -> MdsVerdict {
    let map = build_global_matrix(desc);
    let total = binomial(desc.n() as u64, desc.k() as u64);
    if total <= opts.exhaustive_limit {
        let count = total as u64;
        let failure = (0..count)
            .map(|rank| (rank, combination_at_rank(desc.n(), desc.k(), rank as u128)))
            .find(|(_, subset)| !subset_is_good(desc, &map, subset))
            .map(|(rank, subset)| (rank, subset));
        verdict_from_scan(total, true, count, failure)
    } else {
        let subsets = sampled_subsets(desc, opts);
        let failure = subsets
            .iter()
            .enumerate()
            .find(|(_, s)| !subset_is_good(desc, &map, s))
            .map(|(pos, s)| (pos as u64, s.clone()));
        verdict_from_scan(total, false, opts.samples, failure)
    }
}
