use wfock::hecke::Engine;
use wfock::op::Op;
use wfock::par::Exec;
use wfock::relations::vanishes_on;
use wfock::fock::monomials_up_to_size;
use wfock::ring::{instance, RingElement};
use wfock::walgebra::{check_undeformed, f_vanishing_probe, lehn_suite, WAlgebra, WBounds};

const CURVES: [&str; 3] = ["curve:g=0,e=1", "curve:g=1,e=0", "curve:g=1,e=1"];

fn bounds() -> WBounds {
    WBounds {
        max_degree: 6,
        max_index: 3,
    }
}

#[test]
fn undeformed_relations_on_curves() {
    for name in CURVES {
        let e = Engine::new(instance(name).unwrap());
        let r = check_undeformed(&e, &bounds(), Exec::default());
        assert!(r.passed(), "{}", r.to_text());
    }
}

#[test]
fn lehn_suite_on_curves() {
    for name in CURVES {
        let e = Engine::new(instance(name).unwrap());
        let r = lehn_suite(&e, &bounds(), Exec::default());
        assert!(r.passed(), "{}", r.to_text());
    }
}

#[test]
fn low_d_operators() {
    let e = Engine::new(instance("curve:g=0,e=1").unwrap());
    let w = WAlgebra::new(&e);
    let basis = monomials_up_to_size(&e.ring, 6);
    let one = RingElement::one();
    for n in 0..3 {
        let diff = w.d(0, n, &one).sub(&Op::psi(&e, n, &one));
        assert!(vanishes_on(&e, &diff, &basis), "D(0,{n}) != psi{n}");
    }
}

#[test]
fn f_probe_is_seeded() {
    let e = Engine::new(instance("curve:g=0,e=1").unwrap());
    let a = f_vanishing_probe(&e, 1, 8, 5, 6, Exec::Sequential);
    let b = f_vanishing_probe(&e, 1, 8, 5, 6, Exec::Parallel { jobs: 2 });
    assert!(a.passed(), "{}", a.to_text());
    assert_eq!(a, b);
}
