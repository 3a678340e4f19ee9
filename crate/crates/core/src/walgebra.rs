//! `D_{m,n}(ξ)`, the undeformed W relations, the Lehn relations and Lie-word
//! weights. All `T` indices are geometric.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::{monomials_up_to_size, Monomial};
use crate::hecke::Engine;
use crate::op::Op;
use crate::par::Exec;
use crate::rational::{factorial, qi, Q};
use crate::relations::check_vanishing;
use crate::report::{Case, Report};
use crate::ring::RingElement;

/// Lazily built `D_{m,n}(ξ)` with shared `(−Ad_{T_0})^k ψ_j(ξ)` chains.
pub struct WAlgebra<'a> {
    pub engine: &'a Engine,
    t0: Op,
    chains: Mutex<HashMap<(u32, RingElement), Vec<Op>>>,
}

impl<'a> WAlgebra<'a> {
    pub fn new(engine: &'a Engine) -> Self {
        let t0 = Op::geom_t(&engine.ring, 0, &RingElement::one());
        Self {
            engine,
            t0,
            chains: Mutex::new(HashMap::new()),
        }
    }

    pub fn t0(&self) -> &Op {
        &self.t0
    }

    /// `(−Ad_{T_0})^m ψ_j(ξ)`.
    pub fn ad_chain(&self, j: u32, m: u32, xi: &RingElement) -> Op {
        let mut chains = self.chains.lock().unwrap();
        let chain = chains
            .entry((j, xi.clone()))
            .or_insert_with(|| vec![Op::psi(self.engine, j, xi)]);
        while chain.len() <= m as usize {
            let last = chain.last().unwrap().clone();
            chain.push(Op::bracket(&self.t0, &last).scale(-Q::one()));
        }
        chain[m as usize].clone()
    }

    /// `D_{m,n}(ξ) = n!/(m+n)! (−Ad_{T_0})^m ψ_{m+n}(ξ)`.
    pub fn d(&self, m: u32, n: u32, xi: &RingElement) -> Op {
        let c = factorial(n) / factorial(m + n);
        self.ad_chain(m + n, m, xi).scale(c)
    }

    pub fn q(&self, m: u32, xi: &RingElement) -> Op {
        self.d(m, 0, xi)
    }

    pub fn l(&self, m: u32, xi: &RingElement) -> Op {
        self.d(m, 1, xi)
    }

    /// `𝔡 = ψ_2(1)/2`.
    pub fn frak_d(&self) -> Op {
        Op::psi(self.engine, 2, &RingElement::one()).scale(Q::new(1.into(), 2.into()))
    }
}

/// Bounds for the W-algebra sweeps.
#[derive(Clone, Copy, Debug)]
pub struct WBounds {
    pub max_degree: i64,
    /// Cap on `m + n` for every `D_{m,n}` argument.
    pub max_index: u32,
}

impl Default for WBounds {
    fn default() -> Self {
        Self {
            max_degree: 8,
            max_index: 4,
        }
    }
}

fn index_pairs(cap: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for s in 0..=cap {
        for m in 0..=s {
            v.push((m, s - m));
        }
    }
    v
}

fn basis(engine: &Engine) -> Vec<RingElement> {
    (0..engine.ring.dim()).map(RingElement::basis).collect()
}

fn run(engine: &Engine, suite: &str, cases: Vec<(String, Op)>, bounds: &WBounds, exec: Exec) -> Report {
    let basis = monomials_up_to_size(&engine.ring, bounds.max_degree);
    let results = check_vanishing(engine, &cases, &basis, exec);
    Report::new(suite, engine.ring.name.clone(), results)
}

/// `[D_{m,n}(ξ), D_{m',n'}(η)] = (nm' − mn') D_{m+m',n+n'−1}(ξη)` plus the
/// normalization checks `D_{0,n} = ψ_n`, `D_{1,n} = T_n` and the `ψ_2` action.
pub fn undeformed_cases(w: &WAlgebra, bounds: &WBounds) -> Vec<(String, Op)> {
    let ring = &w.engine.ring;
    let name = |x: &RingElement| ring.fmt_element(x);
    let b = basis(w.engine);
    let pairs = index_pairs(bounds.max_index);
    let mut out = Vec::new();
    for xi in &b {
        for n in 0..=bounds.max_index {
            out.push((
                format!("D(0,{n})=psi{n} xi={} deg<={}", name(xi), bounds.max_degree),
                w.d(0, n, xi).sub(&Op::psi(w.engine, n, xi)),
            ));
            if n < bounds.max_index {
                out.push((
                    format!("D(1,{n})=T{n} xi={} deg<={}", name(xi), bounds.max_degree),
                    w.d(1, n, xi).sub(&Op::geom_t(ring, n as i64, xi)),
                ));
            }
        }
    }
    for &(m, n) in &pairs {
        for &(m2, n2) in &pairs {
            for xi in &b {
                for eta in &b {
                    let lhs = Op::bracket(&w.d(m, n, xi), &w.d(m2, n2, eta));
                    let c = qi(n as i64 * m2 as i64 - m as i64 * n2 as i64);
                    let rhs = if c.is_zero() || n + n2 == 0 {
                        Op::zero()
                    } else {
                        w.d(m + m2, n + n2 - 1, &ring.mul(xi, eta)).scale(c)
                    };
                    out.push((
                        format!(
                            "W m={m} n={n} m'={m2} n'={n2} xi={} eta={} deg<={}",
                            name(xi),
                            name(eta),
                            bounds.max_degree
                        ),
                        lhs.sub(&rhs),
                    ));
                }
            }
        }
    }
    for &(m, n) in &pairs {
        if m + n + 1 > bounds.max_index {
            continue;
        }
        for xi in &b {
            for eta in &b {
                let lhs = Op::bracket(&Op::psi(w.engine, 2, xi), &w.d(m, n, eta));
                let rhs = w.d(m, n + 1, &ring.mul(xi, eta)).scale(qi(2 * m as i64));
                out.push((
                    format!(
                        "psi2 action m={m} n={n} xi={} eta={} deg<={}",
                        name(xi),
                        name(eta),
                        bounds.max_degree
                    ),
                    lhs.sub(&rhs),
                ));
            }
        }
    }
    out
}

pub fn check_undeformed(engine: &Engine, bounds: &WBounds, exec: Exec) -> Report {
    let w = WAlgebra::new(engine);
    let cases = undeformed_cases(&w, bounds);
    run(engine, "undeformed", cases, bounds, exec)
}

/// The relations among `q_m = D_{m,0}`, `L_m = D_{m,1}` and `𝔡 = ψ_2(1)/2`.
pub fn lehn_cases(w: &WAlgebra, bounds: &WBounds) -> Vec<(String, Op)> {
    let ring = &w.engine.ring;
    let name = |x: &RingElement| ring.fmt_element(x);
    let b = basis(w.engine);
    let cap = bounds.max_index;
    let deg = bounds.max_degree;
    let mut out = Vec::new();
    for m in 0..=cap {
        for n in 0..=cap - m {
            for xi in &b {
                for eta in &b {
                    let prod = ring.mul(xi, eta);
                    let ids = format!("m={m} n={n} xi={} eta={} deg<={deg}", name(xi), name(eta));
                    out.push((
                        format!("[q,q] {ids}"),
                        Op::bracket(&w.q(m, xi), &w.q(n, eta)),
                    ));
                    out.push((
                        format!("[L,q] {ids}"),
                        Op::bracket(&w.l(m, xi), &w.q(n, eta)).sub(&w.q(m + n, &prod).scale(qi(n as i64))),
                    ));
                    out.push((
                        format!("[L,L] {ids}"),
                        Op::bracket(&w.l(m, xi), &w.l(n, eta))
                            .sub(&w.l(m + n, &prod).scale(qi(n as i64 - m as i64))),
                    ));
                }
            }
        }
        for xi in &b {
            out.push((
                format!("[d,q] m={m} xi={} deg<={deg}", name(xi)),
                Op::bracket(&w.frak_d(), &w.q(m, xi)).sub(&w.l(m, xi).scale(qi(m as i64))),
            ));
        }
    }
    out
}

pub fn lehn_suite(engine: &Engine, bounds: &WBounds, exec: Exec) -> Report {
    let w = WAlgebra::new(engine);
    let cases = lehn_cases(&w, bounds);
    run(engine, "lehn", cases, bounds, exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    Psi,
    T,
}

/// A Lie word in the generators `ψ_n(ξ)`, `T_n(ξ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LieWord {
    Gen { kind: GenKind, n: u32, xi: usize },
    Bracket(Box<LieWord>, Box<LieWord>),
}

impl LieWord {
    pub fn psi(n: u32, xi: usize) -> Self {
        LieWord::Gen { kind: GenKind::Psi, n, xi }
    }

    pub fn t(n: u32, xi: usize) -> Self {
        LieWord::Gen { kind: GenKind::T, n, xi }
    }

    pub fn bracket(a: LieWord, b: LieWord) -> Self {
        LieWord::Bracket(Box::new(a), Box::new(b))
    }

    /// Index sum minus bracket count.
    pub fn weight(&self) -> i64 {
        match self {
            LieWord::Gen { n, .. } => *n as i64,
            LieWord::Bracket(a, b) => a.weight() + b.weight() - 1,
        }
    }

    /// Number of `T` generators.
    pub fn degree(&self) -> u32 {
        match self {
            LieWord::Gen { kind: GenKind::T, .. } => 1,
            LieWord::Gen { .. } => 0,
            LieWord::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn to_op(&self, engine: &Engine) -> Op {
        match self {
            LieWord::Gen { kind: GenKind::Psi, n, xi } => Op::psi(engine, *n, &RingElement::basis(*xi)),
            LieWord::Gen { kind: GenKind::T, n, xi } => {
                Op::geom_t(&engine.ring, *n as i64, &RingElement::basis(*xi))
            }
            LieWord::Bracket(a, b) => Op::bracket(&a.to_op(engine), &b.to_op(engine)),
        }
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieWord::Gen { kind: GenKind::Psi, n, xi } => write!(f, "psi{n}(#{xi})"),
            LieWord::Gen { kind: GenKind::T, n, xi } => write!(f, "T{n}(#{xi})"),
            LieWord::Bracket(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

/// A product of Lie words, applied right to left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LieExpression(pub Vec<LieWord>);

impl LieExpression {
    pub fn weight(&self) -> i64 {
        self.0.iter().map(LieWord::weight).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(LieWord::degree).sum()
    }

    pub fn to_op(&self, engine: &Engine) -> Op {
        let mut it = self.0.iter().rev();
        let Some(first) = it.next() else { return Op::identity() };
        let mut op = first.to_op(engine);
        for w in it {
            op = Op::compose(&w.to_op(engine), &op);
        }
        op
    }
}

impl fmt::Display for LieExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

pub fn expression_weight(e: &LieExpression) -> i64 {
    e.weight()
}

fn random_word(rng: &mut ChaCha8Rng, dim: usize, depth: u32, max_index: u32) -> LieWord {
    if depth == 0 || rng.gen_bool(0.35) {
        let n = rng.gen_range(0..=max_index);
        let xi = rng.gen_range(0..dim);
        if rng.gen_bool(0.5) {
            LieWord::psi(n, xi)
        } else {
            LieWord::t(n, xi)
        }
    } else {
        let a = random_word(rng, dim, depth - 1, max_index);
        let b = random_word(rng, dim, depth - 1, max_index);
        LieWord::bracket(a, b)
    }
}

/// Samples expressions of `T`-degree `m` and weight `≤ −m` (`≤ −1` when
/// `m = 0`) and checks that each acts by zero on the degree-bounded basis.
pub fn f_vanishing_probe(engine: &Engine, m: u32, samples: usize, seed: u64, max_degree: i64, exec: Exec) -> Report {
    let bound = if m == 0 { -1 } else { -(m as i64) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = engine.ring.dim();
    let mut found: Vec<LieExpression> = Vec::new();
    let mut attempts = 0usize;
    while found.len() < samples && attempts < samples * 20_000 {
        attempts += 1;
        let factors = rng.gen_range(1..=2);
        let e = LieExpression(
            (0..factors)
                .map(|_| random_word(&mut rng, dim, 4, 1))
                .collect(),
        );
        if e.degree() == m && e.weight() <= bound && !found.contains(&e) {
            found.push(e);
        }
    }
    let cases: Vec<(String, Op)> = found
        .iter()
        .map(|e| {
            (
                format!("F m={m} weight={} {} deg<={max_degree}", e.weight(), e),
                e.to_op(engine),
            )
        })
        .collect();
    let basis: Vec<Monomial> = monomials_up_to_size(&engine.ring, max_degree);
    let mut results = check_vanishing(engine, &cases, &basis, exec);
    if found.is_empty() {
        results.push(Case::new(
            format!("F m={m} sampling"),
            crate::report::Status::Skip,
            "no expression of the required weight was sampled",
        ));
    }
    Report::new("fprobe", engine.ring.name.clone(), results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockElement;
    use crate::ring::make_curve_ring;

    #[test]
    fn weights() {
        assert_eq!(LieWord::t(3, 0).weight(), 3);
        assert_eq!(LieWord::bracket(LieWord::psi(2, 0), LieWord::t(1, 0)).weight(), 2);
        let e = LieExpression(vec![
            LieWord::psi(1, 0),
            LieWord::bracket(LieWord::t(0, 0), LieWord::t(0, 3)),
        ]);
        assert_eq!(expression_weight(&e), 0);
        assert_eq!(e.degree(), 2);
    }

    #[test]
    fn d_normalization() {
        let e = Engine::new(make_curve_ring(0, 1));
        let w = WAlgebra::new(&e);
        let bounds = WBounds { max_degree: 6, max_index: 2 };
        let cases: Vec<_> = undeformed_cases(&w, &bounds)
            .into_iter()
            .filter(|(id, _)| id.starts_with("D("))
            .collect();
        let basis = monomials_up_to_size(&e.ring, 6);
        for c in check_vanishing(&e, &cases, &basis, Exec::Sequential) {
            assert_eq!(c.status, crate::report::Status::Ok, "{}: {}", c.id, c.detail);
        }
    }

    #[test]
    fn d20_unwinds_one_bracket() {
        let e = Engine::new(make_curve_ring(0, 1));
        let w = WAlgebra::new(&e);
        let one = RingElement::one();
        // [T_1, T_0] = D_{2,0}
        let lhs = w.d(2, 0, &one);
        let rhs = Op::bracket(&Op::geom_t(&e.ring, 1, &one), w.t0());
        for m in monomials_up_to_size(&e.ring, 5) {
            let f = FockElement::from_monomial(m, Q::one());
            assert_eq!(lhs.apply(&e, &f).unwrap(), rhs.apply(&e, &f).unwrap());
        }
    }
}
