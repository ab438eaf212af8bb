//! Cross-module flows: construct a code, push data through the encoder,
//! and check that decode and repair give back exactly what went in while
//! downloading exactly what the planner promised.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcode_core::st_code::{node_column, CodeError};
use stcode_core::{
    build_code, execute_repair, measure_bandwidth, measure_bandwidth_sequential, plan_repair,
    st_decode, st_encode, verify_mds, verify_mds_sequential, CodeDescriptor, CodeParams,
    FieldSpec, Gf, PartitionMode, TrackingSource, VerifyOptions,
};

fn built(n: usize, k: usize, alpha: usize, mode: PartitionMode, w: u8) -> CodeDescriptor {
    let field = if w == 8 {
        FieldSpec::gf8()
    } else {
        FieldSpec::gf16()
    };
    build_code(CodeParams {
        n,
        k,
        alpha,
        field,
        partition_mode: mode,
        seed: 7,
    })
    .expect("valid parameters over a large enough field")
}

fn random_data(desc: &CodeDescriptor, rng: &mut ChaCha8Rng) -> Vec<Gf> {
    let order = desc.field.order() as u32;
    (0..desc.k() * desc.alpha())
        .map(|_| Gf(rng.gen_range(0..order) as u16))
        .collect()
}

#[test]
fn every_k_subset_of_columns_decodes_the_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    for mode in [PartitionMode::Kr, PartitionMode::N] {
        let desc = built(10, 7, 3, mode, 8);
        let data = random_data(&desc, &mut rng);
        let array = st_encode(&desc, &data).unwrap();
        for subset in (0..10).combinations(7) {
            let columns: Vec<(usize, Vec<Gf>)> = subset
                .iter()
                .map(|&j| (j, node_column(&desc, &array, j)))
                .collect();
            let decoded = st_decode(&desc, &columns).unwrap();
            assert_eq!(decoded, data, "columns {subset:?} under mode {mode}");
        }
    }
}

#[test]
fn decode_flags_a_corrupted_extra_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let desc = built(10, 7, 3, PartitionMode::N, 8);
    let data = random_data(&desc, &mut rng);
    let array = st_encode(&desc, &data).unwrap();
    let mut columns: Vec<(usize, Vec<Gf>)> = (0..8)
        .map(|j| (j, node_column(&desc, &array, j)))
        .collect();
    // Seven columns already determine the data; the eighth is redundant
    // but must still be consistent with them.
    let flipped = Gf(columns[7].1[0].0 ^ 1);
    columns[7].1[0] = flipped;
    match st_decode(&desc, &columns) {
        Err(CodeError::InconsistentNode(7)) => {}
        other => panic!("expected node 7 to be flagged, got {other:?}"),
    }
}

#[test]
fn repair_rebuilds_every_node_with_exactly_the_planned_downloads() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let cases = [
        (10, 7, 3, PartitionMode::Kr, 8),
        (10, 7, 3, PartitionMode::N, 8),
        (14, 10, 4, PartitionMode::N, 16),
    ];
    for (n, k, alpha, mode, w) in cases {
        let desc = built(n, k, alpha, mode, w);
        let report = measure_bandwidth(&desc).unwrap();
        let data = random_data(&desc, &mut rng);
        let array = st_encode(&desc, &data).unwrap();
        for failed in 0..n {
            let plan = plan_repair(&desc, failed).unwrap();
            assert!(
                plan.all_cells().iter().all(|&(_, c)| c != failed),
                "({n},{k},{alpha}) {mode}: plan for node {failed} reads the failed column"
            );
            assert_eq!(
                plan.total(),
                report.per_node[failed],
                "({n},{k},{alpha}) {mode}: plan and report disagree on node {failed}"
            );
            let mut source = TrackingSource::from_array(&array, n);
            let column = execute_repair(&desc, failed, &mut source).unwrap();
            assert_eq!(
                column,
                node_column(&desc, &array, failed),
                "({n},{k},{alpha}) {mode}: node {failed} not rebuilt exactly"
            );
            assert_eq!(
                source.download_count() as u64,
                plan.total(),
                "({n},{k},{alpha}) {mode}: node {failed} downloads differ from the plan"
            );
            assert_eq!(
                *source.fetched(),
                plan.all_cells(),
                "({n},{k},{alpha}) {mode}: node {failed} fetched cells differ from the plan"
            );
        }
    }
}

#[test]
fn parallel_and_sequential_paths_agree() {
    let cases = [
        (10, 7, 3, PartitionMode::N, 8),
        (14, 10, 3, PartitionMode::Kr, 16),
    ];
    for (n, k, alpha, mode, w) in cases {
        let desc = built(n, k, alpha, mode, w);
        let opts = VerifyOptions::default();
        assert_eq!(
            verify_mds(&desc, &opts),
            verify_mds_sequential(&desc, &opts),
            "({n},{k},{alpha}) {mode}: verification verdicts differ"
        );
        assert_eq!(
            measure_bandwidth(&desc).unwrap(),
            measure_bandwidth_sequential(&desc).unwrap(),
            "({n},{k},{alpha}) {mode}: bandwidth reports differ"
        );
    }
}

#[test]
fn bandwidth_report_accounting_adds_up() {
    let desc = built(14, 10, 3, PartitionMode::N, 16);
    let report = measure_bandwidth(&desc).unwrap();
    assert_eq!(report.per_node.len(), 14);
    assert_eq!(report.total_symbols, report.per_node.iter().sum::<u64>());
    assert_eq!(report.file_symbols, 30);
    let mean = report
        .per_node
        .iter()
        .map(|&c| c as f64 / report.file_symbols as f64)
        .sum::<f64>()
        / report.n as f64
        * 100.0;
    assert!(
        (report.average_percent - mean).abs() < 1e-9,
        "average {} but per-node mean {}",
        report.average_percent,
        mean
    );
}

#[test]
fn construction_is_deterministic_in_the_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    let params = CodeParams {
        n: 10,
        k: 7,
        alpha: 3,
        field: FieldSpec::gf8(),
        partition_mode: PartitionMode::N,
        seed: 7,
    };
    let first = build_code(params).unwrap();
    let second = build_code(params).unwrap();
    let data = random_data(&first, &mut rng);
    let array = st_encode(&first, &data).unwrap();
    assert_eq!(array, st_encode(&second, &data).unwrap());

    let reseeded = build_code(CodeParams { seed: 8, ..params }).unwrap();
    assert_ne!(
        array,
        st_encode(&reseeded, &data).unwrap(),
        "a different seed should draw different coupling coefficients"
    );
}
