//! Lazy graded operators on `Λ_S` with memoized evaluation.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::fock::{FockElement, Monomial};
use crate::hecke::Engine;
use crate::rational::{fmt_q, Q};
use crate::ring::{RingElement, RingSpec};

pub enum OpKind {
    Zero,
    Identity,
    /// `T_n(ξ)` with a free index `n`.
    Hecke { n: i64, xi: RingElement },
    /// Multiplication by a fixed element.
    Mul(FockElement),
    Lin(Vec<(Q, Op)>),
    /// `A ∘ B`, applying `B` first.
    Compose(Op, Op),
    /// Super commutator `AB − (−1)^{|A||B|} BA`.
    Bracket(Op, Op),
}

pub struct OpNode {
    pub kind: OpKind,
    pub shift: i64,
    pub odd: bool,
    pub label: String,
    memo: DashMap<Monomial, FockElement>,
}

/// A graded linear endomorphism of `Λ_S`, shared by reference.
#[derive(Clone)]
pub struct Op(Arc<OpNode>);

impl fmt::Debug for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.label)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.label)
    }
}

fn ring_degree(ring: &RingSpec, xi: &RingElement) -> i64 {
    ring.degree_of(xi).unwrap_or(0) as i64
}

impl Op {
    fn node(kind: OpKind, shift: i64, odd: bool, label: String) -> Self {
        Op(Arc::new(OpNode {
            kind,
            shift,
            odd,
            label,
            memo: DashMap::new(),
        }))
    }

    pub fn kind(&self) -> &OpKind {
        &self.0.kind
    }

    pub fn shift(&self) -> i64 {
        self.0.shift
    }

    pub fn odd(&self) -> bool {
        self.0.odd
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// Address of the shared node, stable while any clone is alive.
    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn zero() -> Self {
        Self::node(OpKind::Zero, 0, false, "0".into())
    }

    pub fn identity() -> Self {
        Self::node(OpKind::Identity, 0, false, "id".into())
    }

    pub fn is_trivially_zero(&self) -> bool {
        matches!(self.0.kind, OpKind::Zero)
    }

    /// `T_n(ξ)` with free index `n`.
    pub fn t(ring: &RingSpec, n: i64, xi: &RingElement) -> Self {
        if xi.is_zero() {
            return Self::zero();
        }
        let label = format!("T{}({})", n, ring.fmt_element(xi));
        Self::node(
            OpKind::Hecke { n, xi: xi.clone() },
            2 * n - 4 + ring_degree(ring, xi),
            ring.parity_of(xi),
            label,
        )
    }

    /// `T_{n+1−rank}(ξ)`, the geometric normalization.
    pub fn geom_t(ring: &RingSpec, n: i64, xi: &RingElement) -> Self {
        Self::t(ring, n + 1 - ring.rank, xi)
    }

    pub fn mul(ring: &RingSpec, f: FockElement, label: impl Into<String>) -> Self {
        if f.is_zero() {
            return Self::zero();
        }
        let (shift, odd) = f
            .terms()
            .next()
            .map(|(m, _)| (m.degree(ring), m.odd(ring)))
            .unwrap_or((0, false));
        Self::node(OpKind::Mul(f), shift, odd, label.into())
    }

    /// Multiplication by `ψ_n(ξ)`.
    pub fn psi(engine: &Engine, n: u32, xi: &RingElement) -> Self {
        let label = format!("psi{}({})", n, engine.ring.fmt_element(xi));
        Self::mul(&engine.ring, engine.psi_class(n, xi), label)
    }

    pub fn lin(terms: Vec<(Q, Op)>) -> Self {
        let terms: Vec<(Q, Op)> = terms
            .into_iter()
            .filter(|(c, o)| !c.is_zero() && !o.is_trivially_zero())
            .collect();
        if terms.is_empty() {
            return Self::zero();
        }
        if terms.len() == 1 && terms[0].0.is_one() {
            return terms[0].1.clone();
        }
        let shift = terms[0].1.shift();
        let odd = terms[0].1.odd();
        let label = terms
            .iter()
            .map(|(c, o)| format!("{}*{}", fmt_q(c), o.label()))
            .collect::<Vec<_>>()
            .join(" + ");
        Self::node(OpKind::Lin(terms), shift, odd, format!("({label})"))
    }

    pub fn scale(&self, c: Q) -> Self {
        Self::lin(vec![(c, self.clone())])
    }

    pub fn sub(&self, other: &Op) -> Self {
        Self::lin(vec![(Q::one(), self.clone()), (-Q::one(), other.clone())])
    }

    pub fn add(&self, other: &Op) -> Self {
        Self::lin(vec![(Q::one(), self.clone()), (Q::one(), other.clone())])
    }

    pub fn compose(a: &Op, b: &Op) -> Self {
        if a.is_trivially_zero() || b.is_trivially_zero() {
            return Self::zero();
        }
        Self::node(
            OpKind::Compose(a.clone(), b.clone()),
            a.shift() + b.shift(),
            a.odd() ^ b.odd(),
            format!("{}∘{}", a.label(), b.label()),
        )
    }

    pub fn bracket(a: &Op, b: &Op) -> Self {
        if a.is_trivially_zero() || b.is_trivially_zero() {
            return Self::zero();
        }
        Self::node(
            OpKind::Bracket(a.clone(), b.clone()),
            a.shift() + b.shift(),
            a.odd() ^ b.odd(),
            format!("[{}, {}]", a.label(), b.label()),
        )
    }

    /// Super anticommutator `AB + (−1)^{|A||B|} BA`.
    pub fn anticommutator(a: &Op, b: &Op) -> Self {
        let s = if a.odd() && b.odd() { -Q::one() } else { Q::one() };
        Self::lin(vec![
            (Q::one(), Self::compose(a, b)),
            (s, Self::compose(b, a)),
        ])
    }

    pub fn apply(&self, engine: &Engine, f: &FockElement) -> Result<FockElement> {
        let mut out = FockElement::zero();
        for (m, c) in f.terms() {
            out.add_assign_scaled(&self.apply_monomial(engine, m)?, c);
        }
        Ok(out)
    }

    pub fn apply_monomial(&self, engine: &Engine, m: &Monomial) -> Result<FockElement> {
        match &self.0.kind {
            OpKind::Zero => return Ok(FockElement::zero()),
            OpKind::Identity => return Ok(FockElement::from_monomial(m.clone(), Q::one())),
            OpKind::Hecke { n, xi } => {
                let mut out = FockElement::zero();
                for (b, c) in xi.terms() {
                    out.add_assign_scaled(&*engine.t_basis_monomial(*n, b, m)?, c);
                }
                return Ok(out);
            }
            OpKind::Mul(f) => {
                return Ok(f.mul(&FockElement::from_monomial(m.clone(), Q::one()), &engine.ring))
            }
            _ => {}
        }
        if let Some(v) = self.0.memo.get(m) {
            return Ok(v.clone());
        }
        let x = FockElement::from_monomial(m.clone(), Q::one());
        let v = match &self.0.kind {
            OpKind::Lin(terms) => {
                let mut out = FockElement::zero();
                for (c, o) in terms {
                    out.add_assign_scaled(&o.apply_monomial(engine, m)?, c);
                }
                out
            }
            OpKind::Compose(a, b) => a.apply(engine, &b.apply_monomial(engine, m)?)?,
            OpKind::Bracket(a, b) => {
                let ab = a.apply(engine, &b.apply_monomial(engine, m)?)?;
                let ba = b.apply(engine, &a.apply(engine, &x)?)?;
                if a.odd() && b.odd() {
                    ab.add(&ba)
                } else {
                    ab.sub(&ba)
                }
            }
            _ => unreachable!(),
        };
        self.0.memo.insert(m.clone(), v.clone());
        Ok(v)
    }

    pub fn clear_memo(&self) {
        self.0.memo.clear();
        match &self.0.kind {
            OpKind::Lin(t) => t.iter().for_each(|(_, o)| o.clear_memo()),
            OpKind::Compose(a, b) | OpKind::Bracket(a, b) => {
                a.clear_memo();
                b.clear_memo();
            }
            _ => {}
        }
    }
}

/// `(−Ad_A)^k B`.
pub fn neg_ad_pow(a: &Op, b: &Op, k: u32) -> Op {
    let mut out = b.clone();
    for _ in 0..k {
        out = Op::bracket(a, &out).scale(-Q::one());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::ring::make_curve_ring;

    #[test]
    fn bracket_of_psi_and_t() {
        let e = Engine::new(make_curve_ring(1, 1));
        let w = RingElement::basis(3);
        let one = RingElement::one();
        // [ψ1(1), T0(w)] = T0(w) in geometric indexing
        let lhs = Op::bracket(&Op::psi(&e, 1, &one), &Op::geom_t(&e.ring, 0, &w));
        let rhs = Op::geom_t(&e.ring, 0, &w);
        for m in crate::fock::monomials_up_to_size(&e.ring, 6) {
            let f = FockElement::from_monomial(m, qi(1));
            assert_eq!(lhs.apply(&e, &f).unwrap(), rhs.apply(&e, &f).unwrap());
        }
        let t = Op::geom_t(&e.ring, 0, &one);
        let self_bracket = Op::bracket(&t, &t);
        assert!(self_bracket.apply(&e, &FockElement::gen(2, 0)).unwrap().is_zero());
    }
}
