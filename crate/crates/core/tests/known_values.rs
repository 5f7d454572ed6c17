use widthslab::classes::{lp_ball, sobolev_ball, SobolevNorm, SobolevSpec};
use widthslab::entropy::{exact_small_entropy, greedy_packing, section_cover_upper};
use widthslab::geometry::{FunctionClass, SampleDesign};
use widthslab::lp::LpOptions;
use widthslab::recovery::{diameter_interval, sampling_number, DEFAULT_BUDGET};
use widthslab::theorem::{verify_main_inequality, VerifyParams};
use widthslab::widths::{ellipsoid_width_euclidean, kolmogorov_upper};
use widthslab::Error;

#[test]
fn cube_sampling_numbers() {
    let cube = lp_ball(3, f64::INFINITY).unwrap();
    for n in 0..3 {
        let g = sampling_number(&cube, n, DEFAULT_BUDGET, LpOptions::default()).unwrap();
        assert!((g.value.hi - 1.0).abs() < 1e-9, "n={n}");
    }
    let g = sampling_number(&cube, 3, DEFAULT_BUDGET, LpOptions::default()).unwrap();
    assert!(g.value.hi.abs() < 1e-9);
}

#[test]
fn exact_rational_matches_float() {
    let cross = lp_ball(3, 1.0).unwrap();
    let d = SampleDesign::new(vec![1], 3).unwrap();
    let a = cross.pair_diameter(&d, LpOptions::default()).unwrap();
    let b = cross.pair_diameter(&d, LpOptions::exact()).unwrap();
    assert!((a - b).abs() < 1e-12);
    assert!((b - 2.0).abs() < 1e-12);
}

#[test]
fn sobolev_sampling_shrinks() {
    let class = sobolev_ball(SobolevSpec::new(12, 1, SobolevNorm::from_f64(f64::INFINITY).unwrap()).unwrap()).unwrap();
    let g1 = sampling_number(&class, 1, DEFAULT_BUDGET, LpOptions::default()).unwrap().value.hi;
    let g3 = sampling_number(&class, 3, DEFAULT_BUDGET, LpOptions::default()).unwrap().value.hi;
    assert!(g3 < g1 && g1 < 1.0);
}

#[test]
fn budget_is_enforced() {
    let class = lp_ball(20, 1.0).unwrap();
    let r = diameter_interval(&class, 10, 50, false, LpOptions::default());
    assert!(matches!(r, Err(Error::Budget(_))));
    let h = diameter_interval(&class, 10, 50, true, LpOptions::default()).unwrap();
    assert_eq!(h.value.lo, 0.0);
}

#[test]
fn segment_entropy_brute_force() {
    let seg = FunctionClass::vpolytope(vec![vec![-1.0], vec![1.0]], true).unwrap();
    let grid: Vec<Vec<f64>> = (0..=4).map(|i| vec![-1.0 + 0.5 * i as f64]).collect();
    let r = exact_small_entropy(&seg, 1, &grid, 0.01).unwrap();
    assert!((r.radius - 0.5).abs() <= r.net_slack + 1e-8);
    let cover = section_cover_upper(&seg, 1, LpOptions::default()).unwrap();
    let pack = greedy_packing(&seg, 3, 0, 20, LpOptions::default()).unwrap();
    assert!(pack.half_separation() <= cover.radius + 1e-9);
}

#[test]
fn ellipsoid_widths_match_subspace_search() {
    let map = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
    let e = FunctionClass::ellipsoid(vec![0.0; 3], map).unwrap();
    assert!((ellipsoid_width_euclidean(&e, 1).unwrap() - 2.0).abs() < 1e-12);
    let cross = lp_ball(4, 1.0).unwrap();
    let k = kolmogorov_upper(&cross, 4, 10, 0, LpOptions::default()).unwrap();
    assert!(k.worst_error < 1e-9);
}

#[test]
fn verify_cross_polytope() {
    let cross = lp_ball(4, 1.0).unwrap();
    for n in 0..3 {
        let r = verify_main_inequality(&cross, n, &VerifyParams::default()).unwrap();
        assert!(r.passed, "n={n}: {:?}", r.checks);
    }
}
