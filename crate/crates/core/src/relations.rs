//! Exhaustive verification of the relations (Q0)–(Q3) on a monomial basis.
//!
//! Indices in the sweeps are geometric: `T_n` stands for `T_{n+1−rank}`, so
//! on rank-zero instances no `h_0` is ever evaluated.

use std::collections::HashMap;

use num_traits::One;

use crate::fock::{monomial_text, monomials_up_to_size, Monomial};
use crate::hecke::Engine;
use crate::op::Op;
use crate::par::Exec;
use crate::rational::{qi, Q};
use crate::report::{Case, Report, Status};
use crate::ring::{permutations, RingElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Q0,
    Q1,
    Q2,
    Q3,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::Q0 => "Q0",
            Relation::Q1 => "Q1",
            Relation::Q2 => "Q2",
            Relation::Q3 => "Q3",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepBounds {
    /// Bound on the weight `Σ (2n + deg b)` of test monomials.
    pub max_degree: i64,
    pub max_index: i64,
}

impl Default for SweepBounds {
    fn default() -> Self {
        Self {
            max_degree: 8,
            max_index: 3,
        }
    }
}

/// Evaluates each operator on every monomial and reports whether it vanishes.
pub fn check_vanishing(engine: &Engine, cases: &[(String, Op)], basis: &[Monomial], exec: Exec) -> Vec<Case> {
    exec.map(cases, |(id, op)| {
        for m in basis {
            match op.apply_monomial(engine, m) {
                Ok(v) if v.is_zero() => {}
                Ok(v) => {
                    return Case::new(
                        id.clone(),
                        Status::Fail,
                        format!(
                            "on {}: {}",
                            monomial_text(m, &engine.ring),
                            v.to_text(&engine.ring)
                        ),
                    )
                }
                Err(e) => {
                    return Case::new(
                        id.clone(),
                        Status::Fail,
                        format!("on {}: {e}", monomial_text(m, &engine.ring)),
                    )
                }
            }
        }
        Case::ok(id.clone())
    })
}

/// Evaluates pairs of operators and reports whether they agree.
pub fn check_equal(engine: &Engine, cases: &[(String, Op, Op)], basis: &[Monomial], exec: Exec) -> Vec<Case> {
    let diffs: Vec<(String, Op)> = cases
        .iter()
        .map(|(id, a, b)| (id.clone(), a.sub(b)))
        .collect();
    check_vanishing(engine, &diffs, basis, exec)
}

struct TCache<'a> {
    engine: &'a Engine,
    ops: HashMap<(i64, RingElement), Op>,
}

impl<'a> TCache<'a> {
    fn new(engine: &'a Engine) -> Self {
        Self {
            engine,
            ops: HashMap::new(),
        }
    }

    fn t(&mut self, n: i64, xi: &RingElement) -> Op {
        self.ops
            .entry((n, xi.clone()))
            .or_insert_with(|| Op::geom_t(&self.engine.ring, n, xi))
            .clone()
    }
}

fn name(engine: &Engine, b: usize) -> &str {
    engine.ring.basis_name(b)
}

pub fn q0_cases(engine: &Engine, bounds: &SweepBounds) -> Vec<(String, Op)> {
    let ring = &engine.ring;
    let mut tc = TCache::new(engine);
    let mut out = Vec::new();
    for m in 0..=bounds.max_index {
        for n in 0..=bounds.max_index {
            for eta in 0..ring.dim() {
                let psi = Op::psi(engine, m as u32, &RingElement::basis(eta));
                for xi in 0..ring.dim() {
                    let t = tc.t(n, &RingElement::basis(xi));
                    let prod = ring.mul(&RingElement::basis(eta), &RingElement::basis(xi));
                    let rhs = if m == 0 { Op::zero() } else { tc.t(m + n - 1, &prod) };
                    let op = Op::bracket(&psi, &t).sub(&rhs.scale(qi(m)));
                    out.push((
                        format!(
                            "Q0 m={m} n={n} eta={} xi={} deg<={}",
                            name(engine, eta),
                            name(engine, xi),
                            bounds.max_degree
                        ),
                        op,
                    ));
                }
            }
        }
    }
    out
}

pub fn q1_cases(engine: &Engine, bounds: &SweepBounds) -> Vec<(String, Op)> {
    let ring = &engine.ring;
    let mut tc = TCache::new(engine);
    let mut out = Vec::new();
    let b = |i| RingElement::basis(i);
    for m in 0..=bounds.max_index {
        for n in 0..=bounds.max_index {
            for x in 0..ring.dim() {
                for y in 0..ring.dim() {
                    for z in 0..ring.dim() {
                        let lhs = Op::bracket(&tc.t(m, &ring.mul(&b(x), &b(y))), &tc.t(n, &b(z)));
                        let rhs = Op::bracket(&tc.t(m, &b(x)), &tc.t(n, &ring.mul(&b(y), &b(z))));
                        out.push((
                            format!(
                                "Q1 m={m} n={n} xi={} xi'={} xi''={} deg<={}",
                                name(engine, x),
                                name(engine, y),
                                name(engine, z),
                                bounds.max_degree
                            ),
                            lhs.sub(&rhs),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// The left-hand side of (Q2) for the pair `(ξ, ξ')`.
///
/// The anticommutator term enters with coefficient −1. Expanding
/// `Ω(x,y) = x²/((1−x(y⁻¹−t1))(1−x(y⁻¹−t2)))` gives the denominator
/// `(x⁻¹−y⁻¹+t1)(x⁻¹−y⁻¹+t2)`, which flips the sign of every `s1` term
/// relative to a rewrite with `−t1, −t2`.
pub fn q2_operator(engine: &Engine, m: i64, n: i64, xi: &RingElement, xi2: &RingElement) -> Op {
    q2_operator_with(engine, m, n, xi, xi2, &-Q::one())
}

/// (Q2) with an explicit coefficient on `{T_m, T_n}(s1Δξξ')`.
pub fn q2_operator_with(
    engine: &Engine,
    m: i64,
    n: i64,
    xi: &RingElement,
    xi2: &RingElement,
    anti: &Q,
) -> Op {
    let ring = &engine.ring;
    let t = |k: i64, x: &RingElement| Op::geom_t(ring, k, x);
    let br = |a: Op, b: Op| Op::bracket(&a, &b);
    let s2x = ring.mul(&ring.s2(), xi2);
    let mut terms = vec![
        (Q::one(), br(t(m, xi), t(n + 3, xi2))),
        (qi(-3), br(t(m + 1, xi), t(n + 2, xi2))),
        (qi(3), br(t(m + 2, xi), t(n + 1, xi2))),
        (qi(-1), br(t(m + 3, xi), t(n, xi2))),
        (qi(-1), br(t(m, xi), t(n + 1, &s2x))),
        (qi(1), br(t(m + 1, xi), t(n, &s2x))),
    ];
    let s1xx = ring.mul(&ring.mul(&ring.s1(), xi), xi2);
    for (a, b, c) in ring.diagonal_mul(&s1xx).terms() {
        let ta = t(m, &RingElement::basis(a));
        let tb = t(n, &RingElement::basis(b));
        terms.push((c * anti, Op::anticommutator(&ta, &tb)));
    }
    Op::lin(terms)
}

pub fn q2_cases(engine: &Engine, bounds: &SweepBounds) -> Vec<(String, Op)> {
    let ring = &engine.ring;
    let mut out = Vec::new();
    for m in 0..=bounds.max_index {
        for n in 0..=bounds.max_index {
            for x in 0..ring.dim() {
                for y in 0..ring.dim() {
                    out.push((
                        format!(
                            "Q2 m={m} n={n} xi={} xi'={} deg<={}",
                            name(engine, x),
                            name(engine, y),
                            bounds.max_degree
                        ),
                        q2_operator(engine, m, n, &RingElement::basis(x), &RingElement::basis(y)),
                    ));
                }
            }
        }
    }
    out
}

/// `Σ_π ± π[T_{m3}(ξ3), [T_{m2}(ξ2), T_{m1+1}(ξ1)]]` for `args = [(m1, ξ1), (m2, ξ2), (m3, ξ3)]`.
pub fn q3_operator(engine: &Engine, args: &[(i64, usize); 3]) -> Op {
    let ring = &engine.ring;
    let mut terms = Vec::new();
    for (perm, _) in permutations(3) {
        // slot k receives the argument perm[k]; Koszul sign of the reordering
        let mut sign = Q::one();
        for i in 0..3 {
            for j in i + 1..3 {
                if perm[i] > perm[j] && ring.is_odd(args[perm[i]].1) && ring.is_odd(args[perm[j]].1) {
                    sign = -sign;
                }
            }
        }
        let (m1, b1) = args[perm[0]];
        let (m2, b2) = args[perm[1]];
        let (m3, b3) = args[perm[2]];
        let inner = Op::bracket(
            &Op::geom_t(ring, m2, &RingElement::basis(b2)),
            &Op::geom_t(ring, m1 + 1, &RingElement::basis(b1)),
        );
        terms.push((sign, Op::bracket(&Op::geom_t(ring, m3, &RingElement::basis(b3)), &inner)));
    }
    Op::lin(terms)
}

pub fn q3_cases(engine: &Engine, bounds: &SweepBounds) -> Vec<(String, Op)> {
    let ring = &engine.ring;
    let pairs: Vec<(i64, usize)> = (0..=bounds.max_index)
        .flat_map(|m| (0..ring.dim()).map(move |b| (m, b)))
        .collect();
    let mut out = Vec::new();
    // the symmetrized sum is invariant under permuting the three arguments
    for i in 0..pairs.len() {
        for j in i..pairs.len() {
            for k in j..pairs.len() {
                let args = [pairs[i], pairs[j], pairs[k]];
                out.push((
                    format!(
                        "Q3 m=({},{},{}) xi=({},{},{}) deg<={}",
                        args[0].0,
                        args[1].0,
                        args[2].0,
                        name(engine, args[0].1),
                        name(engine, args[1].1),
                        name(engine, args[2].1),
                        bounds.max_degree
                    ),
                    q3_operator(engine, &args),
                ));
            }
        }
    }
    out
}

pub fn relation_cases(engine: &Engine, rel: Relation, bounds: &SweepBounds) -> Vec<(String, Op)> {
    match rel {
        Relation::Q0 => q0_cases(engine, bounds),
        Relation::Q1 => q1_cases(engine, bounds),
        Relation::Q2 => q2_cases(engine, bounds),
        Relation::Q3 => q3_cases(engine, bounds),
    }
}

pub fn check_relation(engine: &Engine, rel: Relation, bounds: &SweepBounds, exec: Exec) -> Report {
    let basis = monomials_up_to_size(&engine.ring, bounds.max_degree);
    let cases = relation_cases(engine, rel, bounds);
    let results = check_vanishing(engine, &cases, &basis, exec);
    Report::new(rel.name(), engine.ring.name.clone(), results)
}

/// Zero test used by callers that only need a boolean.
pub fn vanishes_on(engine: &Engine, op: &Op, basis: &[Monomial]) -> bool {
    basis.iter().all(|m| {
        op.apply_monomial(engine, m)
            .map(|v| v.is_zero())
            .unwrap_or(false)
    })
}
