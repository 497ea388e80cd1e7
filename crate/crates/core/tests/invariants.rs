use std::collections::BTreeSet;

use proptest::prelude::*;
use techspace::corpus::{
    assign_window, map_ipc_to_fields, FieldConcordance, KeywordRule, KeywordSet, WindowSpec, FIELD_COUNT,
};
use techspace::matrix::{CooccurrenceBuilder, Counting, MatrixMeta, OccurrenceBuilder, OccurrenceMatrix};
use techspace::metrics::{binarize, detect_core, method_of_reflections, rca, BinaryRcaMatrix, ComplexityAxis};

const TECHS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const COUNTRIES: [&str; 4] = ["CN", "DE", "JP", "US"];

type Rec = (Vec<&'static str>, Vec<&'static str>);

fn arb_record() -> impl Strategy<Value = Rec> {
    (
        proptest::sample::subsequence(COUNTRIES.to_vec(), 1..=3),
        proptest::sample::subsequence(TECHS.to_vec(), 1..=4),
    )
}

fn occ(records: &[Rec], counting: Counting) -> OccurrenceMatrix {
    let mut b = OccurrenceBuilder::with_technologies(counting, &TECHS);
    for (c, t) in records {
        b.add(c, t);
    }
    b.finish("w", "s")
}

fn arb_binary() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..8, 1usize..8).prop_flat_map(|(ne, nt)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), nt), ne)
            .prop_filter("needs a specialisation", |m| m.iter().flatten().any(|&b| b))
    })
}

fn bin(rows: &[Vec<bool>]) -> BinaryRcaMatrix {
    let e: Vec<String> = (0..rows.len()).map(|i| format!("e{i}")).collect();
    let t: Vec<String> = (0..rows[0].len()).map(|i| format!("t{i}")).collect();
    BinaryRcaMatrix::from_rows(&e, &t, rows).unwrap()
}

fn values(v: &techspace::metrics::ComplexityVector) -> Vec<f64> {
    v.values.iter().map(|x| x.unwrap_or(0.0)).collect()
}

proptest! {
    #[test]
    fn adding_a_rule_never_unflags(text in "[a-z ]{0,40}", extra in "[a-z]{1,6}") {
        let base = KeywordSet::default();
        let mut rules = base.rules().to_vec();
        rules.push(KeywordRule::new(extra).unwrap());
        let wider = KeywordSet::new(rules).unwrap();
        if base.match_texts(&[&text]).is_ai() {
            prop_assert!(wider.match_texts(&[&text]).is_ai());
        }
    }

    #[test]
    fn mapped_fields_stay_in_universe(codes in proptest::collection::vec("[A-H][0-9]{2}[A-Z]([0-9]{1,3}/[0-9]{2})?", 0..6)) {
        let conc = FieldConcordance::default();
        let mapped = map_ipc_to_fields(&codes, &conc);
        prop_assert!(mapped.fields.iter().all(|f| (f.0 as usize) < FIELD_COUNT));
        prop_assert_eq!(mapped.fields.len() + mapped.unmapped.len() <= codes.len(), true);
    }

    #[test]
    fn single_pairs_whole_counting_sums_to_records(recs in proptest::collection::vec((0usize..4, 0usize..6), 0..60)) {
        let records: Vec<Rec> = recs.iter().map(|&(c, t)| (vec![COUNTRIES[c]], vec![TECHS[t]])).collect();
        let m = occ(&records, Counting::Whole);
        prop_assert_eq!(m.total(), records.len() as f64);
    }

    #[test]
    fn fractional_counting_conserves_records(records in proptest::collection::vec(arb_record(), 0..60)) {
        let m = occ(&records, Counting::Fractional);
        prop_assert!((m.total() - records.len() as f64).abs() < 1e-9);
        let recomputed: f64 = m.cells().map(|(_, _, v)| v).sum();
        prop_assert!((recomputed - m.total()).abs() < 1e-9);
    }

    #[test]
    fn stored_totals_match_cells(records in proptest::collection::vec(arb_record(), 1..60)) {
        let m = occ(&records, Counting::Whole);
        for (e, &s) in m.row_sums().iter().enumerate() {
            let row: f64 = m.row(e).iter().map(|&(_, v)| v).sum();
            prop_assert_eq!(row, s);
        }
        for (t, &s) in m.col_sums().iter().enumerate() {
            let col: f64 = (0..m.entities().len()).map(|e| m.get(e, t)).sum();
            prop_assert_eq!(col, s);
        }
    }

    #[test]
    fn cooccurrence_symmetric_and_bounded(records in proptest::collection::vec(arb_record(), 0..60)) {
        let mut b = CooccurrenceBuilder::with_technologies(&TECHS);
        for (_, t) in &records {
            b.add(t);
        }
        let c = b.finish("w", "s");
        let s = c.occurrence();
        for i in 0..c.len() {
            prop_assert_eq!(c.get(i, i), 0);
            for j in 0..c.len() {
                prop_assert_eq!(c.get(i, j), c.get(j, i));
                prop_assert!(c.get(i, j) <= s[i].min(s[j]));
            }
        }
    }

    #[test]
    fn merged_builders_add_up(
        left in proptest::collection::vec(arb_record(), 0..30),
        right in proptest::collection::vec(arb_record(), 0..30),
        fractional in any::<bool>(),
    ) {
        let counting = if fractional { Counting::Fractional } else { Counting::Whole };
        let mut a = OccurrenceBuilder::with_technologies(counting, &TECHS);
        let mut b = OccurrenceBuilder::with_technologies(counting, &TECHS);
        let mut all = OccurrenceBuilder::with_technologies(counting, &TECHS);
        for (c, t) in &left {
            a.add(c, t);
            all.add(c, t);
        }
        for (c, t) in &right {
            b.add(c, t);
            all.add(c, t);
        }
        a.merge(&b);
        let (merged, joint) = (a.finish("w", "s"), all.finish("w", "s"));
        prop_assert_eq!(merged.entities(), joint.entities());
        for e in 0..joint.entities().len() {
            for t in 0..TECHS.len() {
                prop_assert!((merged.get(e, t) - joint.get(e, t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rca_scaling_leaves_complexity_unchanged(records in proptest::collection::vec(arb_record(), 1..40), k in 2u32..9) {
        let m = occ(&records, Counting::Whole);
        let rows: Vec<Vec<f64>> = (0..m.entities().len())
            .map(|e| (0..TECHS.len()).map(|t| m.get(e, t) * f64::from(k)).collect())
            .collect();
        let scaled = OccurrenceMatrix::from_dense(m.entities(), m.technologies(), &rows, MatrixMeta::default()).unwrap();
        let (b1, b2) = (binarize(&rca(&m).unwrap(), 1.0), binarize(&rca(&scaled).unwrap(), 1.0));
        prop_assert_eq!(&b1, &b2);
        for depth in 0..4 {
            let k1 = method_of_reflections(&b1, ComplexityAxis::Technology, depth).unwrap();
            let k2 = method_of_reflections(&b2, ComplexityAxis::Technology, depth).unwrap();
            prop_assert_eq!(k1, k2);
        }
    }

    #[test]
    fn reflections_conserve_degree_weighted_totals(rows in arb_binary(), depth in 1usize..6) {
        let m = bin(&rows);
        let kc0 = values(&method_of_reflections(&m, ComplexityAxis::Entity, 0).unwrap());
        let kt0 = values(&method_of_reflections(&m, ComplexityAxis::Technology, 0).unwrap());
        let kc = values(&method_of_reflections(&m, ComplexityAxis::Entity, depth).unwrap());
        let kt_prev = values(&method_of_reflections(&m, ComplexityAxis::Technology, depth - 1).unwrap());
        let lhs: f64 = kc0.iter().zip(&kc).map(|(a, b)| a * b).sum();
        let rhs: f64 = kt0.iter().zip(&kt_prev).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn reflections_transpose_duality(rows in arb_binary(), depth in 0usize..5) {
        let m = bin(&rows);
        let t = m.transpose();
        for (a, b) in [(ComplexityAxis::Entity, ComplexityAxis::Technology), (ComplexityAxis::Technology, ComplexityAxis::Entity)] {
            let x = method_of_reflections(&m, a, depth).unwrap();
            let y = method_of_reflections(&t, b, depth).unwrap();
            prop_assert_eq!(x.labels, y.labels);
            prop_assert_eq!(x.values, y.values);
        }
    }

    #[test]
    fn detect_core_partitions_specialised_fields(
        windows in proptest::collection::vec(proptest::sample::subsequence(TECHS.to_vec(), 0..=6), 1..5),
    ) {
        let sets: Vec<BTreeSet<String>> = windows.iter().map(|w| w.iter().map(|s| s.to_string()).collect()).collect();
        let p = detect_core(&sets);
        prop_assert!(p.core.is_disjoint(&p.related));
        let union: BTreeSet<String> = sets.iter().flatten().cloned().collect();
        let covered: BTreeSet<String> = p.core.union(&p.related).cloned().collect();
        prop_assert_eq!(covered, union);
        for f in &p.core {
            prop_assert!(sets.iter().all(|s| s.contains(f)));
        }
    }
}

#[test]
fn default_windows_partition_1974_to_2018() {
    let spec = WindowSpec::default();
    for year in 1900..=2100 {
        let hits = spec.windows().iter().filter(|w| w.contains(year)).count();
        assert!(hits <= 1, "{year}");
        assert_eq!(hits == 1, (1974..=2018).contains(&year), "{year}");
        assert_eq!(assign_window(year, &spec).is_some(), hits == 1);
    }
}
