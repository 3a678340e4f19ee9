use num_traits::One;
use wfock::fock::monomials_up_to_size;
use wfock::hecke::Engine;
use wfock::par::Exec;
use wfock::relations::{check_relation, q2_operator_with, vanishes_on, Relation, SweepBounds};
use wfock::ring::{instance, RingElement};
use wfock::series::{cubic_kernel_check, oracle_suite};
use wfock::Q;

fn engine(name: &str) -> Engine {
    Engine::new(instance(name).unwrap())
}

fn small() -> SweepBounds {
    SweepBounds {
        max_degree: 6,
        max_index: 2,
    }
}

#[test]
fn q0_to_q3_on_p2() {
    let e = engine("p2");
    for rel in [Relation::Q0, Relation::Q1, Relation::Q2, Relation::Q3] {
        let r = check_relation(&e, rel, &small(), Exec::default());
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.summary.ok > 0);
    }
}

#[test]
fn q0_to_q3_on_genus_one_curve() {
    let e = engine("curve:g=1,e=1");
    for rel in [Relation::Q0, Relation::Q1, Relation::Q2, Relation::Q3] {
        let r = check_relation(&e, rel, &small(), Exec::Sequential);
        assert!(r.passed(), "{}", r.to_text());
    }
}

#[test]
fn q2_report_line_format() {
    let e = engine("p2");
    let r = check_relation(&e, Relation::Q2, &small(), Exec::Sequential);
    let text = r.to_text();
    assert!(text.contains("Q2 m=1 n=0 xi=h xi'=h deg<=6 : OK"), "{text}");
}

#[test]
fn q2_printed_sign_fails_on_p2() {
    let e = engine("p2");
    let basis = monomials_up_to_size(&e.ring, 6);
    let mut broken = 0;
    for m in 0..=1 {
        for n in 0..=1 {
            for x in 0..e.ring.dim() {
                for y in 0..e.ring.dim() {
                    let (a, b) = (RingElement::basis(x), RingElement::basis(y));
                    let good = q2_operator_with(&e, m, n, &a, &b, &-Q::one());
                    let printed = q2_operator_with(&e, m, n, &a, &b, &Q::one());
                    assert!(vanishes_on(&e, &good, &basis));
                    if !vanishes_on(&e, &printed, &basis) {
                        broken += 1;
                    }
                }
            }
        }
    }
    assert!(broken > 0);
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let e = engine("curve:g=0,e=1");
    let a = check_relation(&e, Relation::Q1, &small(), Exec::Sequential);
    let b = check_relation(&e, Relation::Q1, &small(), Exec::Parallel { jobs: 3 });
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn series_oracle_and_cubic_kernel() {
    for name in ["p2", "curve:g=1,e=1"] {
        let e = engine(name);
        let r = oracle_suite(&e, 2, Exec::default());
        assert!(r.passed(), "{}", r.to_text());
        let k = cubic_kernel_check(&e.ring, 3);
        assert!(k.passed(), "{}", k.to_text());
    }
}
