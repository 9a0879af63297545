use dmlab_core::measure::{MeasureBase, TreeMeasure, Weights};
use dmlab_core::qs::{measure_from_map, qs_ratio_scan, qs_ratio_scan_levels, QSMap};
use dmlab_core::rational::{int, rat, Rational};
use proptest::prelude::*;

fn table_weights() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1u32..6).prop_flat_map(|d| {
        prop::collection::vec(1i64..16, (1usize << d) - 1).prop_map(move |raw| {
            let mut it = raw.into_iter();
            (0..d)
                .map(|k| (0..1usize << k).map(|_| rat(it.next().unwrap(), 16)).collect())
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_tables(w in table_weights(), mass in 1i64..5) {
        let d = w.len() as u32;
        let m = TreeMeasure::new(MeasureBase::Dyadic, Weights::Table(w.clone()), int(mass)).unwrap();
        let back = measure_from_map(&QSMap::new(m.clone(), d).tabulate(d).unwrap()).unwrap();
        prop_assert_eq!(back.weights, Weights::Table(w));
        prop_assert_eq!(back.total_mass, int(mass));
    }

    #[test]
    fn round_trip_binomial(p in 1i64..20, d in 1u32..9) {
        let m = TreeMeasure::binomial(rat(p, 20)).unwrap();
        let back = measure_from_map(&QSMap::new(m.clone(), d).tabulate(d).unwrap()).unwrap();
        for level in 0..=d {
            prop_assert_eq!(back.level_masses(level).unwrap(), m.level_masses(level).unwrap());
        }
    }

    #[test]
    fn evaluate_monotone_on_grid(p in 1i64..10, a in 0i64..=64, b in 0i64..=64) {
        let f = QSMap::new(TreeMeasure::binomial(rat(p, 10)).unwrap(), 16);
        let (x, y) = (rat(a.min(b), 64), rat(a.max(b), 64));
        let (fx, fy) = (f.evaluate(&x).unwrap(), f.evaluate(&y).unwrap());
        prop_assert!(fx.is_exact() && fy.is_exact());
        prop_assert!(fx.lower <= fy.lower);
    }
}

#[test]
fn scan_is_self_similar() {
    for p in [rat(1, 3), rat(1, 5), rat(3, 4)] {
        let f = QSMap::new(TreeMeasure::binomial(p).unwrap(), 16);
        for d in 2..=5 {
            let coarse = qs_ratio_scan(&f, d).unwrap();
            // The same triples read off a finer table.
            let fine_restricted = qs_ratio_scan_levels(&f, 1, d).unwrap();
            assert_eq!(coarse, fine_restricted);
            // Shifting every scale one level down keeps the coarse triples
            // inside [0, 1/2] as a scaled copy, so the envelope can only grow.
            let shifted = qs_ratio_scan_levels(&f, 2, d + 1).unwrap();
            for (c, s) in coarse.iter().zip(&shifted) {
                assert!(s.max_ratio >= c.max_ratio);
            }
        }
    }
}
