use wfock::ham::{check_jacobi, check_realization, h2_bracket, sn_equivariance_and_j2, HamElement};
use wfock::rational::qi;

#[test]
fn bracket_examples() {
    assert_eq!(h2_bracket(&HamElement::v(2, 3), &HamElement::v(1, 1)), HamElement::v(2, 3));
    let a = HamElement::parse("V(1,2) + -1/2*V(3,0)").unwrap();
    let b = HamElement::parse("2*V(0,2)").unwrap();
    let ab = h2_bracket(&a, &b);
    let ba = h2_bracket(&b, &a);
    assert_eq!(ab, ba.scale(&qi(-1)));
    assert_eq!(HamElement::parse(&ab.to_string()).unwrap(), ab);
}

#[test]
fn realization_and_jacobi() {
    for r in [check_realization(3, 5), check_jacobi(3), sn_equivariance_and_j2(3, 4)] {
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.summary.ok > 0);
    }
}
