use proptest::prelude::*;
use tcomm::formats::{
    read_matrix, read_partitions, read_zscores, write_matrix, write_partitions, write_zscores,
};
use tcomm::heatmap::{render_heatmap, HeatmapStyle, NAN_COLOR};
use tcomm_core::{Measure, NodeId, Partition, SimilarityMatrix, Snapshot, ZScoreReport};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        2 => 0.0f64..=1.0,
        1 => Just(f64::NAN),
        1 => Just(-0.0),
        1 => Just(f64::MIN_POSITIVE),
    ]
}

fn matrix() -> impl Strategy<Value = SimilarityMatrix> {
    (1usize..7, prop::sample::select(Measure::ALL.to_vec())).prop_flat_map(|(n, measure)| {
        (
            prop::collection::btree_set(any::<i64>(), n),
            prop::collection::vec(value(), n * n),
        )
            .prop_map(move |(idx, vals)| {
                SimilarityMatrix::from_values(measure, idx.into_iter().collect(), vals)
            })
    })
}

fn bits(m: &SimilarityMatrix) -> Vec<u64> {
    m.values()
        .iter()
        .map(|v| if v.is_nan() { u64::MAX } else { v.to_bits() })
        .collect()
}

proptest! {
    #[test]
    fn matrix_round_trip_is_exact(m in matrix()) {
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, "x").unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        prop_assert_eq!(back.measure, m.measure);
        prop_assert_eq!(&back.index, &m.index);
        prop_assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn partitions_round_trip(windows in prop::collection::vec(prop::collection::btree_map(0u32..50, 0u32..6, 1..20), 1..5)) {
        let parts: Vec<(usize, Partition)> = windows
            .iter()
            .enumerate()
            .map(|(w, m)| (w * 2, Partition::from_pairs(m.iter().map(|(&n, &l)| (NodeId(n), l))).unwrap()))
            .collect();
        let mut buf = Vec::new();
        write_partitions(&mut buf, &parts, None, "x").unwrap();
        let back = read_partitions(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), parts.len());
        for ((w1, p1), (w2, p2)) in parts.iter().zip(&back) {
            prop_assert_eq!(w1, w2);
            prop_assert_eq!(p1.as_slice(), p2.as_slice());
        }
    }

    #[test]
    fn heatmap_is_deterministic(m in matrix()) {
        let a = render_heatmap(&m, &HeatmapStyle::default()).unwrap();
        let b = render_heatmap(&m.clone(), &HeatmapStyle::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn zscore_csv_round_trip() {
    let s = Snapshot::from_edges([], [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]);
    let r = ZScoreReport::from_samples(&s, 0.25, vec![0.1, 0.2, 0.3]).unwrap();
    let flat = ZScoreReport::from_samples(&s, 0.25, vec![0.2, 0.2]).unwrap();
    let mut buf = Vec::new();
    write_zscores(&mut buf, &[r.clone(), flat], "x").unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("window_start,window_end,q_obs,mu,sigma,z,M\n"));
    let rows = read_zscores(text.as_bytes()).unwrap();
    assert_eq!(rows[0].2, r.q_observed);
    assert_eq!(rows[0].3, r.null_mean);
    assert_eq!(rows[0].4, r.null_std);
    assert_eq!(rows[0].5, r.z.unwrap());
    assert_eq!(rows[0].6, 3);
    assert!(rows[1].5.is_nan());
    assert!(text.lines().last().unwrap().ends_with(",nan,2"));
}

#[test]
fn nan_cell_is_neutral_and_legend_unchanged() {
    let full = SimilarityMatrix::from_values(Measure::Inmi, vec![0, 1], vec![1.0, 0.5, 0.5, 1.0]);
    let holed =
        SimilarityMatrix::from_values(Measure::Inmi, vec![0, 1], vec![1.0, f64::NAN, 0.5, 1.0]);
    let a = render_heatmap(&full, &HeatmapStyle::default()).unwrap();
    let b = render_heatmap(&holed, &HeatmapStyle::default()).unwrap();
    let cells = |svg: &str| svg.matches(&format!(r#"fill="{NAN_COLOR}"/>"#)).count();
    // the n/a legend swatch is drawn with a stroke, so only grid cells match
    assert_eq!(cells(&a), 0);
    assert_eq!(cells(&b), 1);
    let legend = |svg: &str| svg[svg.find("<defs>").unwrap()..].to_owned();
    assert_eq!(legend(&a), legend(&b));
}

#[test]
fn uniform_high_matrix_is_one_hot_block_per_row() {
    let n = 20;
    let m = SimilarityMatrix::from_values(Measure::Unmi, (0..n as i64).collect(), vec![1.0; n * n]);
    let svg = render_heatmap(&m, &HeatmapStyle::default()).unwrap();
    assert_eq!(svg.matches(r##"fill="#a50026"/>"##).count(), n);
}
