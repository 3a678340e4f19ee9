//! Acceptance criteria 1-10, one PASS/FAIL line each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfock::degeneration::{
    parabolic_suite, sl2_suite, synthetic_suite, weyl_suite, DegenConfig, Degeneration, SpecModule, Specialization,
};
use wfock::ham::{check_jacobi, check_realization, sn_equivariance_and_j2};
use wfock::hecke::Engine;
use wfock::lefschetz::{
    lefschetz_suite, lefschetz_verify, random_nilpotent, weight_filtration_suite, weight_filtration_with_operator,
};
use wfock::par::Exec;
use wfock::rational::qi;
use wfock::relations::{check_relation, Relation, SweepBounds};
use wfock::report::Report;
use wfock::ring::instance;
use wfock::series::{cubic_kernel_check, oracle_suite};
use wfock::walgebra::{check_undeformed, lehn_suite, WBounds};

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[Report]) -> Outcome {
    let ok: usize = reports.iter().map(|r| r.summary.ok).sum();
    let fail: usize = reports.iter().map(|r| r.summary.fail).sum();
    let skip: usize = reports.iter().map(|r| r.summary.skip).sum();
    let first = reports
        .iter()
        .flat_map(|r| r.failures())
        .next()
        .map(|c| format!("; first failure: {} ({})", c.id, c.detail))
        .unwrap_or_default();
    Outcome {
        pass: fail == 0 && ok > 0,
        detail: format!("{ok} ok, {fail} failed, {skip} skipped{first}"),
    }
}

fn engine(name: &str) -> Engine {
    Engine::new(instance(name).unwrap())
}

fn criterion_1() -> Outcome {
    let bounds = SweepBounds {
        max_degree: 8,
        max_index: 3,
    };
    let mut reports = Vec::new();
    for name in ["p2", "curve:g=1,e=1"] {
        let e = engine(name);
        for rel in [Relation::Q0, Relation::Q1, Relation::Q2, Relation::Q3] {
            reports.push(check_relation(&e, rel, &bounds, Exec::default()));
        }
    }
    from_reports(&reports)
}

fn criterion_2() -> Outcome {
    let reports: Vec<Report> = ["p2", "curve:g=1,e=1"]
        .iter()
        .map(|n| oracle_suite(&engine(n), 4, Exec::default()))
        .collect();
    from_reports(&reports)
}

fn criterion_3() -> Outcome {
    let reports: Vec<Report> = ["p2", "curve:g=1,e=1"]
        .iter()
        .map(|n| cubic_kernel_check(&instance(n).unwrap(), 4))
        .collect();
    from_reports(&reports)
}

fn criterion_4() -> Outcome {
    let bounds = WBounds {
        max_degree: 8,
        max_index: 4,
    };
    let mut reports = Vec::new();
    for name in ["curve:g=0,e=1", "curve:g=1,e=0", "curve:g=1,e=1"] {
        let e = engine(name);
        reports.push(check_undeformed(&e, &bounds, Exec::default()));
        reports.push(lehn_suite(&e, &bounds, Exec::default()));
    }
    from_reports(&reports)
}

fn criterion_5() -> Outcome {
    from_reports(&[check_realization(4, 6), check_jacobi(4), sn_equivariance_and_j2(4, 6)])
}

fn criterion_6() -> Outcome {
    from_reports(&[weight_filtration_suite(SEED, 50, 12, 6)])
}

fn criterion_7() -> Outcome {
    let suite = lefschetz_suite(SEED, 50, 12, 100);
    let parts = from_reports(std::slice::from_ref(&suite));
    // literal clause: the weight filtration itself with ω = N
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut literal_fail = 0;
    let mut other_reason = 0;
    for _ in 0..50 {
        let d = rng.gen_range(1..=12);
        let n = random_nilpotent(&mut rng, d);
        let r = lefschetz_verify(&weight_filtration_with_operator(&n).unwrap());
        if !r.passed() {
            literal_fail += 1;
            if r.failures().iter().any(|c| c.id != "hard lefschetz") {
                other_reason += 1;
            }
        }
    }
    Outcome {
        pass: parts.pass && literal_fail == 0,
        detail: format!(
            "lefschetz_verify(W(N), N) fails hard Lefschetz on {literal_fail}/50 matrices ({other_reason} for another reason): \
             N lowers W while the definition needs omega raising; with the opposite filtration of N: {}",
            parts.detail
        ),
    }
}

fn curve_pipeline() -> (Engine, DegenConfig) {
    let cfg = DegenConfig {
        r: qi(1),
        chi: qi(0),
        window: 6,
        probes: 7,
    };
    (engine("curve:g=0,e=1"), cfg)
}

fn criterion_8() -> Outcome {
    let (e, cfg) = curve_pipeline();
    let m = SpecModule::new(&e, Specialization::new(&e, cfg.r.clone(), cfg.chi.clone()).unwrap(), cfg.window);
    let mut d = Degeneration::new(&m, cfg);
    from_reports(&[weyl_suite(&mut d).unwrap()])
}

fn criterion_9() -> Outcome {
    let (e, cfg) = curve_pipeline();
    let m = SpecModule::new(&e, Specialization::new(&e, cfg.r.clone(), cfg.chi.clone()).unwrap(), cfg.window);
    let mut d = Degeneration::new(&m, cfg);
    let (pipeline, _) = sl2_suite(&mut d).unwrap();
    from_reports(&[synthetic_suite(SEED), pipeline])
}

fn criterion_10() -> Outcome {
    let mut reports = Vec::new();
    for name in ["parabolic:g=0,e=1,r=2,pts=1", "parabolic:g=1,e=1,r=2,pts=1"] {
        let e = engine(name);
        let m = SpecModule::new(&e, Specialization::new(&e, qi(2), qi(0)).unwrap(), 7);
        reports.push(parabolic_suite(&m, 3).unwrap());
    }
    from_reports(&reports)
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (i, f) in criteria {
        let start = std::time::Instant::now();
        let o = f();
        println!(
            "criterion {i}: {} ({}; {:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        // criterion 7 is known to fail on its literal clause only
        let expected = if i == 7 {
            o.detail.contains("(0 for another reason)") && o.detail.contains(" 0 failed")
        } else {
            o.pass
        };
        if !expected {
            unexpected.push(i);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcome for criteria {unexpected:?}");
}
