use proptest::prelude::*;
use wfock::fock::{monomials_up_to_size, FockElement, Monomial};
use wfock::ham::{h2_bracket, HamElement};
use wfock::hecke::Engine;
use wfock::linalg::{kernel_space, Matrix, Subspace};
use wfock::op::Op;
use wfock::rational::{fmt_q, parse_q, qi, Q};
use wfock::ring::{instance, RingElement};

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn ham() -> impl Strategy<Value = HamElement> {
    prop::collection::vec((0u32..4, 0u32..4, -5i64..5), 0..4).prop_map(|ts| {
        let mut h = HamElement::zero();
        for (m, n, c) in ts {
            h.add_term(m, n, qi(c));
        }
        h
    })
}

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..4, n * n)
        .prop_map(move |v| Matrix::from_i64(&v.chunks(n).map(|r| r.to_vec()).collect::<Vec<_>>()))
}

fn fock(max: usize) -> impl Strategy<Value = FockElement> {
    let ring = instance("curve:g=1,e=1").unwrap();
    let mons: Vec<Monomial> = monomials_up_to_size(&ring, 4);
    prop::collection::vec((0..mons.len(), -4i64..5), 0..max).prop_map(move |ts| {
        let mut f = FockElement::zero();
        for (i, c) in ts {
            f.add_term(mons[i].clone(), qi(c));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(x in rational()) {
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn h2_is_a_lie_algebra(a in ham(), b in ham(), c in ham()) {
        prop_assert_eq!(h2_bracket(&a, &b), h2_bracket(&b, &a).scale(&qi(-1)));
        let j = h2_bracket(&a, &h2_bracket(&b, &c))
            .add(&h2_bracket(&b, &h2_bracket(&c, &a)))
            .add(&h2_bracket(&c, &h2_bracket(&a, &b)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn ham_text_round_trip(a in ham()) {
        prop_assert_eq!(HamElement::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn fock_product_is_associative(a in fock(4), b in fock(4), c in fock(3)) {
        let ring = instance("curve:g=1,e=1").unwrap();
        prop_assert_eq!(a.mul(&b, &ring).mul(&c, &ring), a.mul(&b.mul(&c, &ring), &ring));
    }

    #[test]
    fn monomials_supercommute(i in 0usize..40, j in 0usize..40) {
        let ring = instance("curve:g=1,e=1").unwrap();
        let mons = monomials_up_to_size(&ring, 4);
        let (x, y) = (&mons[i % mons.len()], &mons[j % mons.len()]);
        let fx = FockElement::from_monomial(x.clone(), qi(1));
        let fy = FockElement::from_monomial(y.clone(), qi(1));
        let sign = if x.odd(&ring) && y.odd(&ring) { qi(-1) } else { qi(1) };
        prop_assert_eq!(fx.mul(&fy, &ring), fy.mul(&fx, &ring).scale(&sign));
    }

    #[test]
    fn fock_text_round_trip(a in fock(5)) {
        let ring = instance("curve:g=1,e=1").unwrap();
        prop_assert_eq!(FockElement::from_text(&a.to_text(&ring), &ring).unwrap(), a);
    }

    #[test]
    fn inverse_and_kernel(m in matrix(4)) {
        match m.inverse() {
            Ok(inv) => {
                prop_assert_eq!(m.mul(&inv), Matrix::identity(4));
                prop_assert_eq!(kernel_space(&m).dim(), 0);
            }
            Err(_) => {
                let k = kernel_space(&m);
                prop_assert!(k.dim() > 0);
                for v in &k.basis {
                    prop_assert!(m.apply(v).iter().all(|x| *x == qi(0)));
                }
            }
        }
        prop_assert_eq!(m.rank() + kernel_space(&m).dim(), 4);
    }

    #[test]
    fn subspace_dimension_formula(a in matrix(5), b in matrix(5)) {
        let u = Subspace::span(5, &a.kernel().into_iter().chain(a.image()).take(3).collect::<Vec<_>>());
        let v = Subspace::span(5, &b.image());
        prop_assert_eq!(u.sum(&v).dim() + u.intersect(&v).dim(), u.dim() + v.dim());
        prop_assert!(u.sum(&v).contains_subspace(&u));
        prop_assert!(u.contains_subspace(&u.intersect(&v)));
    }

    #[test]
    fn psi_zero_commutes_with_hecke(n in 0i64..3, b in 0usize..4, f in fock(3)) {
        let e = Engine::new(instance("curve:g=1,e=1").unwrap());
        let psi = Op::psi(&e, 0, &RingElement::one());
        let t = Op::geom_t(&e.ring, n, &RingElement::basis(b));
        let lhs = Op::bracket(&psi, &t).apply(&e, &f).unwrap();
        prop_assert!(lhs.is_zero());
    }
}
