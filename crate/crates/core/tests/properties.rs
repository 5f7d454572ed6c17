use proptest::prelude::*;

use widthslab::classes::random_vpolytope;
use widthslab::entropy::{entropy_interval, EntropyParams};
use widthslab::geometry::SampleDesign;
use widthslab::lp::LpOptions;
use widthslab::recovery::{diameter_of_information, sampling_from_diameter, DEFAULT_BUDGET};
use widthslab::report::{read_csv, write_csv};
use widthslab::theorem::{build_separated_family, build_transcript, default_delta, verify_separation};

fn opts() -> LpOptions {
    LpOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn sampling_numbers_decrease_with_n(seed in 0u64..1000) {
        let class = random_vpolytope(4, 6, 1.0, seed, true).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=4 {
            let g0 = diameter_of_information(&class, n, DEFAULT_BUDGET, opts()).unwrap();
            let g = sampling_from_diameter(&g0).unwrap();
            prop_assert!((g0.value.hi - 2.0 * g.value.hi).abs() <= 1e-12);
            prop_assert!(g.value.hi <= prev + 1e-9);
            prev = g.value.hi;
        }
        prop_assert!(prev <= 1e-7);
    }

    #[test]
    fn entropy_bounds_are_ordered(seed in 0u64..1000, n in 0usize..3) {
        let class = random_vpolytope(3, 5, 1.0, seed, true).unwrap();
        let params = EntropyParams { seed, ..EntropyParams::default() };
        let e = entropy_interval(&class, n, &params, &[]).unwrap();
        prop_assert!(e.interval.lo <= e.interval.hi);
        prop_assert!(e.packing.recheck(&class).unwrap());
    }

    #[test]
    fn construction_family_is_separated(seed in 0u64..1000, n in 0usize..3) {
        let class = random_vpolytope(5, 8, 2.0, seed, true).unwrap();
        let delta = default_delta(&class, opts()).unwrap();
        let t = build_transcript(&class, n, delta, opts()).unwrap();
        prop_assert!(t.check_invariants(&class).unwrap().is_empty());
        let family = build_separated_family(&class, &t).unwrap();
        prop_assert_eq!(family.len(), 1 << (n + 1));
        let report = verify_separation(&t, &family);
        prop_assert!(report.passed);
    }

    #[test]
    fn csv_designs_parse_back(seed in 0u64..1000, n in 0usize..4) {
        let class = random_vpolytope(5, 6, 1.0, seed, true).unwrap();
        let g = sampling_from_diameter(&diameter_of_information(&class, n, DEFAULT_BUDGET, opts()).unwrap()).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &[("r,\"x\"".to_string(), g.clone())], false).unwrap();
        let rows = read_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        prop_assert_eq!(rows.len(), 1);
        prop_assert_eq!(&rows[0].class_id, "r,\"x\"");
        prop_assert!(rows[0].lo <= rows[0].hi);
        prop_assert_eq!(rows[0].hi, g.value.hi);
        let design = SampleDesign::parse(&rows[0].design, class.dim()).unwrap();
        prop_assert_eq!(Some(design), g.best_design);
    }
}
