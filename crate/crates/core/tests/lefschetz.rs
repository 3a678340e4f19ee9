use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wfock::lefschetz::{
    check_weight_properties, jordan_matrix, lefschetz_of_nilpotent, lefschetz_suite, lefschetz_verify,
    random_lefschetz_map, random_nilpotent, sl2_on_gr, strictness_check, uniqueness_oracle, weight_filtration,
    weight_filtration_suite, weight_filtration_with_operator, FiltSpace,
};
use wfock::report::Status;

#[test]
fn weight_filtration_of_a_single_block() {
    let n = jordan_matrix(&[4]);
    let w = weight_filtration(&n).unwrap();
    let dims: Vec<(i64, usize)> = w.gr_dims().into_iter().filter(|(_, d)| *d > 0).collect();
    assert_eq!(dims, vec![(-3, 1), (-1, 1), (1, 1), (3, 1)]);
    assert!(check_weight_properties(&n, &w, "W").iter().all(|c| c.status == Status::Ok));
}

#[test]
fn random_nilpotents() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let n = random_nilpotent(&mut rng, 7);
        let w = weight_filtration(&n).unwrap();
        assert!(check_weight_properties(&n, &w, "W").iter().all(|c| c.status == Status::Ok));
        let l = lefschetz_of_nilpotent(&n).unwrap();
        assert!(lefschetz_verify(&l).passed());
        let s = sl2_on_gr(&l).unwrap();
        assert!(s.is_triple());
    }
}

#[test]
fn literal_weight_filtration_is_not_lefschetz() {
    let n = jordan_matrix(&[3, 1]);
    let l = weight_filtration_with_operator(&n).unwrap();
    let r = lefschetz_verify(&l);
    assert!(!r.passed());
    assert!(r.failures().iter().all(|c| c.id == "hard lefschetz"));
}

#[test]
fn uniqueness_for_small_jordan_types() {
    for blocks in [vec![1], vec![2, 1], vec![3], vec![2, 2], vec![3, 1]] {
        let c = uniqueness_oracle(&blocks);
        assert_eq!(c.status, Status::Ok, "{}", c.detail);
    }
}

#[test]
fn strict_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10 {
        let (u, v, phi) = random_lefschetz_map(&mut rng);
        let cases = strictness_check(&u, &v, &phi, &format!("map {i}"));
        assert!(cases.iter().all(|c| c.status == Status::Ok), "{cases:?}");
    }
}

#[test]
fn space_json_round_trip() {
    let l = lefschetz_of_nilpotent(&jordan_matrix(&[3, 2])).unwrap();
    let text = serde_json::to_string(&l.to_json()).unwrap();
    let back = FiltSpace::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.gr_dims(), l.gr_dims());
    assert!(lefschetz_verify(&back).passed());
}

#[test]
fn seeded_suites() {
    let a = weight_filtration_suite(4, 8, 8, 4);
    assert!(a.passed(), "{}", a.to_text());
    let b = lefschetz_suite(4, 8, 8, 10);
    assert!(b.passed(), "{}", b.to_text());
    assert_eq!(b, lefschetz_suite(4, 8, 8, 10));
}
