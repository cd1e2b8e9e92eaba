// SPDX-License-Identifier: Apache-2.0

use idw_core::bench::{
    generate_cloud, parse_csv, run_bench, speedup_table, write_csv, Baseline, BenchSpec, Method, Rect,
    DEFAULT_VALUE_RANGE,
};
use idw_core::tolerance;
use idw_core::{ExecConfig, LayoutKind, Precision, Strategy};

fn fingerprint(n: usize, seed: u64) -> (f64, f64, f64, u64) {
    let c = generate_cloud(n, seed, &Rect::default(), DEFAULT_VALUE_RANGE).unwrap();
    let mut h: u64 = 0;
    for r in &c {
        for v in [r.x, r.y, r.z] {
            h = h.rotate_left(5) ^ v.to_bits();
        }
    }
    (
        c.iter().map(|r| r.x).sum(),
        c.iter().map(|r| r.y).sum(),
        c.iter().map(|r| r.z).sum(),
        h,
    )
}

#[test]
fn generator_golden_values() {
    // First record cross-checked against a separate SplitMix64 transcription.
    let c = generate_cloud(1, 7, &Rect::default(), DEFAULT_VALUE_RANGE).unwrap();
    assert_eq!(c[0].x, 0.3898297483912715);
    assert_eq!(c[0].y, 0.01678829452815611);
    assert_eq!(c[0].z, 90.07606806068834);

    let (sx, sy, sz, h) = fingerprint(10 * 1024, 7);
    assert_eq!(sx, 5088.735736260602);
    assert_eq!(sy, 5068.939287345121);
    assert_eq!(sz, 513704.7767529961);
    assert_eq!(h, 0x4fd9_8fc3_105e_61e1);
}

fn small_spec() -> BenchSpec {
    BenchSpec {
        sizes: vec![300, 700],
        repeats: 2,
        warmup: 1,
        seed: 3,
        exec: ExecConfig {
            group_size: 64,
            tile_size: 64,
            parallel_width: 2,
            deterministic_reduction: true,
        },
        ..BenchSpec::default()
    }
}

#[test]
fn checksums_agree_across_layouts_and_strategies() {
    let records = run_bench(&small_spec()).unwrap();
    for n in [300, 700] {
        let reference = records
            .iter()
            .find(|r| r.n == n && r.method == Method::Seq)
            .and_then(|r| r.checksum)
            .unwrap();
        for r in records.iter().filter(|r| r.n == n && r.is_applicable()) {
            let tol = tolerance::relative(r.precision, n);
            let err = tolerance::relative_error(r.checksum.unwrap(), reference);
            assert!(err <= tol, "{:?} {:?} {}: {err}", r.method, r.layout, r.precision);
            assert!(r.speedup.unwrap() > 0.0);
            assert!(r.min.unwrap() <= r.median.unwrap());
        }
        let na = records.iter().filter(|r| r.n == n && !r.is_applicable()).count();
        assert_eq!(na, 2 * Strategy::ALL.len());
    }
}

#[test]
fn reports_differ_only_in_time_columns() {
    let strip = |records: &[idw_core::bench::BenchRecord]| {
        let mut out = Vec::new();
        write_csv(records, &mut out).unwrap();
        parse_csv(out.as_slice())
            .unwrap()
            .into_iter()
            .map(|mut r| {
                r.median_s = None;
                r.min_s = None;
                r.speedup = None;
                r
            })
            .collect::<Vec<_>>()
    };
    let a = run_bench(&small_spec()).unwrap();
    let b = run_bench(&small_spec()).unwrap();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn custom_baseline() {
    let spec = BenchSpec {
        sizes: vec![128],
        layouts: vec![LayoutKind::Aoas, LayoutKind::Soa],
        methods: vec![Method::Strategy(Strategy::Tiled)],
        precisions: vec![Precision::Single],
        baseline: "tiled:aoas:single".parse::<Baseline>().unwrap(),
        repeats: 1,
        ..small_spec()
    };
    let records = run_bench(&spec).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].layout, Some(LayoutKind::Aoas));
    assert_eq!(records[0].speedup, Some(1.0));
    let again = speedup_table(&records, &spec.baseline).unwrap();
    assert_eq!(again, records);
}
