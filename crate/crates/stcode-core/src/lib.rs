//! Set-transformed Reed-Solomon array codes.
//!
//! This crate implements an MDS array code family built by stacking `alpha`
//! instances of a systematic Reed-Solomon code and then *coupling* symbols
//! across the instances with an invertible linear "set transformation".
//! The coupling is what buys cheap single-node repair: when one node (one
//! column of the array) fails, a designated "major row" is decoded from `k`
//! surviving symbols and the remaining failed symbols are recovered from a
//! handful of coupling partners, far below the naive `k * alpha` download.
//!
//! Module map:
//!
//! * [`galois`] — GF(2^w) arithmetic (w = 8 or 16) and dense linear algebra.
//! * [`rs_base`] — the systematic Reed-Solomon base code.
//! * [`set_transform`] — set allocation and pairwise coupling of an
//!   `alpha x beta` sub-array (`alpha <= beta < 2*alpha`).
//! * [`st_code`] — the full code: column partition, per-piece transforms,
//!   encode/decode, deterministic seeded construction.
//! * [`repair`] — single-node repair planning, execution, and bandwidth
//!   measurement.
//! * [`mds_verify`] — the global linear map and exhaustive/sampled MDS
//!   verification over all `C(n, k)` node subsets.
//! * [`analysis`] — repair-bandwidth and field-size bounds, cut-set
//!   comparisons, and published reference figures.
//!
//! The `parallel` feature (on by default) runs subset verification and
//! per-node bandwidth measurement on a rayon pool; without it the same
//! entry points fall back to sequential loops with identical results.

pub mod analysis;
pub mod galois;
pub mod mds_verify;
pub mod repair;
pub mod rs_base;
pub mod set_transform;
pub mod st_code;

pub use galois::{Field, FieldSpec, Gf, GfMatrix};
pub use mds_verify::{
    build_global_matrix, verify_mds, verify_mds_sequential, GlobalMap, MdsVerdict, VerifyOptions,
};
pub use repair::{
    execute_repair, major_row, measure_bandwidth, measure_bandwidth_sequential, plan_repair,
    BandwidthReport, HelperSource, RepairError, RepairPlan, TrackingSource,
};
pub use rs_base::RsCode;
pub use set_transform::{allocate_sets, build_plan, CouplingGroup, CouplingPlan, GroupKind};
pub use st_code::{
    build_code, build_code_unverified, st_decode, st_encode, CodeDescriptor, CodeParams,
    PartitionMode,
};
