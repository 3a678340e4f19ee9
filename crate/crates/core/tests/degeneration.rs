use num_traits::Zero;
use wfock::degeneration::{
    interpolate, parabolic_suite, reduced_relations_suite, sl2_correct_block, sl2_suite, synthetic_suite,
    tilde_suite, unreduced_suite, weyl_suite, DegenConfig, Degeneration, SpecModule, Specialization,
};
use wfock::hecke::Engine;
use wfock::linalg::Matrix;
use wfock::rational::qi;
use wfock::report::{Report, Status};
use wfock::ring::instance;

fn curve(window: i64, r: i64) -> (Engine, DegenConfig) {
    let e = Engine::new(instance("curve:g=0,e=1").unwrap());
    let cfg = DegenConfig {
        r: qi(r),
        chi: qi(0),
        window,
        probes: 7,
    };
    (e, cfg)
}

fn no_failures(r: &Report) {
    assert!(r.passed(), "{}", r.to_text());
    assert!(r.summary.ok > 0, "{}", r.to_text());
}

#[test]
fn curve_pipeline_window_six() {
    let (e, cfg) = curve(6, 1);
    let m = SpecModule::new(&e, Specialization::new(&e, cfg.r.clone(), cfg.chi.clone()).unwrap(), 6);
    let mut d = Degeneration::new(&m, cfg);
    for r in [tilde_suite(&mut d).unwrap(), weyl_suite(&mut d).unwrap()] {
        no_failures(&r);
        assert_eq!(r.summary.skip, 0, "{}", r.to_text());
    }
    let (r, spectrum) = sl2_suite(&mut d).unwrap();
    no_failures(&r);
    assert!(r.cases.iter().any(|c| c.id.starts_with("[e,f] = h") && c.status == Status::Ok));
    // h is diagonalizable with integer eigenvalues on every even slice
    let dims: Vec<usize> = spectrum.iter().map(|s| s.eigenvalues.values().sum()).collect();
    assert_eq!(dims, vec![1, 0, 2, 0, 5, 0, 10]);
    assert!(d.skips.is_empty());
}

#[test]
fn curve_relations_r_two() {
    let (e, cfg) = curve(4, 2);
    let m = SpecModule::new(&e, Specialization::new(&e, cfg.r.clone(), cfg.chi.clone()).unwrap(), 4);
    let mut d = Degeneration::new(&m, cfg);
    no_failures(&reduced_relations_suite(&mut d, 2).unwrap());
    let u = unreduced_suite(&mut d, 2, 2).unwrap();
    no_failures(&u);
    assert!(u.cases.iter().any(|c| c.id == "convention (-r)^(-j)" && c.detail.contains("fail")));
}

#[test]
fn nonzero_chi_skips_sl2() {
    let e = Engine::new(instance("curve:g=0,e=1").unwrap());
    let cfg = DegenConfig {
        r: qi(1),
        chi: qi(1),
        window: 2,
        probes: 5,
    };
    let m = SpecModule::new(&e, Specialization::new(&e, qi(1), qi(1)).unwrap(), 2);
    let mut d = Degeneration::new(&m, cfg);
    let (r, _) = sl2_suite(&mut d).unwrap();
    assert_eq!(r.summary.skip, 1);
    assert_eq!(r.summary.ok, 0);
}

#[test]
fn parabolic_two_one_point() {
    let e = Engine::new(instance("parabolic:g=0,e=1,r=2,pts=1").unwrap());
    let m = SpecModule::new(&e, Specialization::new(&e, qi(2), qi(0)).unwrap(), 5);
    no_failures(&parabolic_suite(&m, 2).unwrap());
}

#[test]
fn parabolic_requires_parabolic_ring() {
    let e = Engine::new(instance("curve:g=0,e=1").unwrap());
    let m = SpecModule::new(&e, Specialization::new(&e, qi(1), qi(0)).unwrap(), 2);
    assert!(parabolic_suite(&m, 2).is_err());
}

#[test]
fn synthetic_oracles() {
    for seed in 0..3 {
        no_failures(&synthetic_suite(seed));
    }
}

#[test]
fn interpolation_reports_non_polynomial_sequences() {
    let vals: Vec<Matrix> = (0..6).map(|m| Matrix::from_i64(&[vec![m * m * m], vec![3]])).collect();
    let c = interpolate(&vals).unwrap();
    assert_eq!(c.len(), 4);
    assert_eq!(c[3], Matrix::from_i64(&[vec![6], vec![0]]));
    let fib: Vec<Matrix> = [1, 1, 2, 3, 5, 8].iter().map(|&x| Matrix::from_i64(&[vec![x]])).collect();
    assert!(interpolate(&fib).is_none());
}

#[test]
fn sl2_correct_halves_weight_zero_part() {
    let h = Matrix::from_i64(&[vec![0]]);
    let h2 = Matrix::from_i64(&[vec![2]]);
    let d = Matrix::from_i64(&[vec![4]]);
    assert_eq!(sl2_correct_block(&h, &h2, &d, 2).unwrap(), d);
    let h2 = Matrix::from_i64(&[vec![0]]);
    let e = sl2_correct_block(&h, &h2, &d, 2).unwrap();
    assert!(e.get(0, 0).is_zero());
}
