//! Combinatorial bounds and reference figures for repair bandwidth.
//!
//! Everything here is pure arithmetic on the code parameters — no field
//! tables or constructed codes — so the CLI can print bound tables
//! instantly and tests can compare measured bandwidth against the floors.

use serde::Serialize;

/// Binomial coefficient `C(n, k)` computed exactly.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// An exact rational number, kept unreduced for display purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactRatio {
    pub num: u128,
    pub den: u128,
}

impl ExactRatio {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.as_f64()
    }

    /// Percentage truncated (not rounded) to one decimal place, computed
    /// in integer arithmetic so display is platform-stable.
    pub fn percent_floor_1dp(&self) -> f64 {
        (self.num * 1000 / self.den) as f64 / 10.0
    }
}

/// Fewest symbols any repair scheme for an MDS array code must download
/// to rebuild one column from the other `n - 1`, with `alpha` rows per
/// column.
///
/// Writing `m = floor(n / alpha)` and `rem = n mod alpha`: when
/// `k <= m - 1 + rem` the floor is `k + alpha - 1`; otherwise it is
/// `2k - m - rem + alpha`.
pub fn repair_bandwidth_lower_bound(n: usize, k: usize, alpha: usize) -> u64 {
    let m = n / alpha;
    let rem = n % alpha;
    if k <= m - 1 + rem {
        (k + alpha - 1) as u64
    } else {
        (2 * k + alpha - m - rem) as u64
    }
}

/// Repair cost per column that transformed Reed-Solomon constructions
/// with uncoupled designated columns cannot beat:
/// `k + max(0, k - (floor(n / alpha) - 1)) + alpha - 1`.
pub fn et_rs_node_lower_bound(n: usize, k: usize, alpha: usize) -> u64 {
    let m = n / alpha;
    (k + k.saturating_sub(m - 1) + alpha - 1) as u64
}

/// Field size below which *no* coupling coefficients can work: the number
/// of column subsets that must each stay invertible, minus those that are
/// automatically good, is `C(n-1, k-1) - C(ceil(n/alpha)-1, ceil(k/alpha)-1)`.
pub fn mds_field_size_bound(n: usize, k: usize, alpha: usize) -> u128 {
    let ceil = |a: usize, b: usize| a.div_ceil(b) as u64;
    binomial((n - 1) as u64, (k - 1) as u64)
        - binomial(ceil(n, alpha) - 1, ceil(k, alpha) - 1)
}

/// The information-theoretic repair ratio floor (repaired from all
/// `n - 1` survivors): `(n - 1) / (k * (n - k))` of the file size,
/// independent of `alpha`.
pub fn cut_set_ratio(n: usize, k: usize) -> ExactRatio {
    ExactRatio {
        num: (n - 1) as u128,
        den: (k * (n - k)) as u128,
    }
}

/// Columns guaranteed to meet [`repair_bandwidth_lower_bound`] exactly
/// under the uniform column partition: the first `alpha - (n mod alpha)`
/// columns of each of the `floor(n / alpha)` sub-arrays. When `alpha`
/// divides `n` this is every column.
pub fn designated_nodes(n: usize, alpha: usize) -> Vec<usize> {
    let m = n / alpha;
    let rem = n % alpha;
    let per_piece = alpha - rem;
    let mut out = Vec::with_capacity(m * per_piece);
    for piece in 0..m {
        for local in 0..per_piece {
            out.push(piece * alpha + local);
        }
    }
    out
}

/// Average repair ratio as a percentage: `total_symbols` downloaded across
/// all `n` single-column repairs, against `n` repairs of a `k * alpha`
/// file.
pub fn average_repair_percent(total_symbols: u64, n: usize, k: usize, alpha: usize) -> f64 {
    100.0 * total_symbols as f64 / (n * k * alpha) as f64
}

/// All parameter-derived floors for one `(n, k, alpha)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// Per-column download floor for any MDS array code.
    pub repair_lower_bound: u64,
    /// Per-column floor for earlier transformed-RS designs.
    pub et_rs_node_lower_bound: u64,
    /// Columns that meet `repair_lower_bound` under the uniform partition.
    pub designated_nodes: Vec<usize>,
    /// Symbols saved per designated-column repair versus the earlier designs.
    pub guaranteed_gap: u64,
    /// Minimum field size for which valid coefficients can exist.
    pub mds_field_size_bound: u128,
    /// Optimal-repair ratio floor, for context.
    pub cut_set_ratio: ExactRatio,
}

pub fn bounds_report(n: usize, k: usize, alpha: usize) -> BoundsReport {
    let repair_lower_bound = repair_bandwidth_lower_bound(n, k, alpha);
    let et = et_rs_node_lower_bound(n, k, alpha);
    BoundsReport {
        n,
        k,
        alpha,
        repair_lower_bound,
        et_rs_node_lower_bound: et,
        designated_nodes: designated_nodes(n, alpha),
        guaranteed_gap: et - repair_lower_bound,
        mds_field_size_bound: mds_field_size_bound(n, k, alpha),
        cut_set_ratio: cut_set_ratio(n, k),
    }
}

/// Published average repair ratios (percent of file size, one decimal)
/// for the benchmark parameter sets, used as comparison baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// This construction.
    pub st_rs_percent: f64,
    /// Earlier elementary-transform RS design.
    pub et_rs_percent: f64,
    /// HashTag erasure codes.
    pub htec_percent: f64,
    /// Cut-set floor, truncated to one decimal.
    pub cut_set_percent: f64,
}

pub fn reference_rows() -> [ReferenceRow; 5] {
    let row = |n, k, alpha, st_rs, et_rs, htec| ReferenceRow {
        n,
        k,
        alpha,
        st_rs_percent: st_rs,
        et_rs_percent: et_rs,
        htec_percent: htec,
        cut_set_percent: cut_set_ratio(n, k).percent_floor_1dp(),
    };
    [
        row(10, 7, 3, 65.7, 72.3, 68.5),
        row(14, 10, 4, 51.7, 55.3, 60.1),
        row(17, 13, 4, 49.7, 54.2, 57.2),
        row(22, 18, 4, 48.1, 50.1, 54.1),
        row(29, 25, 4, 46.8, 49.0, 51.5),
    ]
}
