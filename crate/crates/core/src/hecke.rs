//! The operators `R`, `Q`, `T_n(ξ)` and the classes `ψ_n(ξ)`.

use std::sync::Arc;

use dashmap::DashMap;
use num_traits::One;

use crate::error::Result;
use crate::fock::{ExtendedElement, FockElement, Gen, HCache, Monomial};
use crate::rational::{factorial, Q};
use crate::ring::{RingElement, RingSpec};
use crate::tpoly::{divided_difference, todd_coefficients};

/// Shared state for operator evaluation on one ring: memoized `R`, `T` and `h`.
pub struct Engine {
    pub ring: RingSpec,
    h: HCache,
    todd: Vec<RingElement>,
    dd: DashMap<u32, Arc<Vec<RingElement>>>,
    r_cache: DashMap<Monomial, Arc<ExtendedElement>>,
    t_cache: DashMap<(i64, u32, Monomial), Arc<FockElement>>,
}

impl Engine {
    pub fn new(ring: RingSpec) -> Self {
        let todd = todd_coefficients(&ring, 8);
        Self {
            ring,
            h: HCache::new(),
            todd,
            dd: DashMap::new(),
            r_cache: DashMap::new(),
            t_cache: DashMap::new(),
        }
    }

    pub fn todd(&self, k: usize) -> RingElement {
        self.todd.get(k).cloned().unwrap_or_default()
    }

    pub fn divided_difference(&self, n: u32) -> Arc<Vec<RingElement>> {
        if let Some(v) = self.dd.get(&n) {
            return v.clone();
        }
        let v = Arc::new(divided_difference(&self.ring, n));
        self.dd.insert(n, v.clone());
        v
    }

    pub fn h_eval(&self, n: u32, xi: &RingElement) -> Result<FockElement> {
        self.h.h_eval(&self.ring, n, xi)
    }

    /// `ψ_n(ξ) = Σ_{m=1}^{n+1} n!/m! p_m(Td_{n+1−m} ξ)`.
    pub fn psi_class(&self, n: u32, xi: &RingElement) -> FockElement {
        let mut out = FockElement::zero();
        for m in 1..=n + 1 {
            let td = self.ring.mul(&self.todd((n + 1 - m) as usize), xi);
            out.add_assign_scaled(&FockElement::p(m, &td), &(factorial(n) / factorial(m)));
        }
        out
    }

    fn r_gen(&self, g: Gen) -> ExtendedElement {
        let mut e = ExtendedElement::default();
        e.add_term(Monomial::gen(g), 0, 0, Q::one());
        let b = RingElement::basis(g.b as usize);
        for (k, c) in self.divided_difference(g.n).iter().enumerate() {
            for (a, x) in self.ring.mul(c, &b).terms() {
                e.add_term(Monomial::one(), a, k as i64, -x.clone());
            }
        }
        e
    }

    /// The ring homomorphism `R` on a monomial.
    pub fn r_monomial(&self, m: &Monomial) -> Arc<ExtendedElement> {
        if let Some(v) = self.r_cache.get(m) {
            return v.clone();
        }
        let v = match m.0.split_first() {
            None => ExtendedElement::one(),
            Some(((g, e), rest)) => {
                let mut tail = Monomial(rest.to_vec());
                if *e > 1 {
                    tail.0.insert(0, (*g, e - 1));
                }
                self.r_gen(*g).mul(&self.r_monomial(&tail), &self.ring)
            }
        };
        let v = Arc::new(v);
        self.r_cache.insert(m.clone(), v.clone());
        v
    }

    pub fn r_hom(&self, f: &FockElement) -> ExtendedElement {
        let mut out = ExtendedElement::default();
        for (m, c) in f.terms() {
            for ((g, a, k), x) in &self.r_monomial(m).terms {
                out.add_term(g.clone(), *a, *k, x * c);
            }
        }
        out
    }

    /// `Q(F ⊗ a u^k) = F·h_k(a)`, zero for `k < 0`.
    pub fn q_map(&self, g: &ExtendedElement) -> Result<FockElement> {
        let mut out = FockElement::zero();
        for ((f, a, k), c) in &g.terms {
            if *k < 0 {
                continue;
            }
            let h = self.h_eval(*k as u32, &RingElement::basis(*a))?;
            let fm = FockElement::from_monomial(f.clone(), c.clone());
            out = out.add(&fm.mul(&h, &self.ring));
        }
        Ok(out)
    }

    /// `T_n(b)` applied to a monomial, for a basis element `b`.
    pub fn t_basis_monomial(&self, n: i64, b: usize, m: &Monomial) -> Result<Arc<FockElement>> {
        let key = (n, b as u32, m.clone());
        if let Some(v) = self.t_cache.get(&key) {
            return Ok(v.clone());
        }
        let r = self.r_monomial(m);
        let odd_b = self.ring.is_odd(b);
        let mut shifted = ExtendedElement::default();
        for ((f, a, k), c) in &r.terms {
            let sign = odd_b && f.odd(&self.ring);
            for (ba, x) in self.ring.mul_basis(b, *a).terms() {
                let v = c * x;
                shifted.add_term(f.clone(), ba, k + n, if sign { -v } else { v });
            }
        }
        let v = Arc::new(self.q_map(&shifted)?);
        self.t_cache.insert(key, v.clone());
        Ok(v)
    }

    /// `T_n(ξ)(f) = Q(ξ u^n R(f))`.
    pub fn t_apply(&self, n: i64, xi: &RingElement, f: &FockElement) -> Result<FockElement> {
        let mut out = FockElement::zero();
        for (b, c) in xi.terms() {
            for (m, x) in f.terms() {
                out.add_assign_scaled(&*self.t_basis_monomial(n, b, m)?, &(c * x));
            }
        }
        Ok(out)
    }

    /// Free index of the geometric `T_n`, i.e. `n + 1 − rank`.
    pub fn geom_index(&self, n: i64) -> i64 {
        n + 1 - self.ring.rank
    }

    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.r_cache.len(), self.t_cache.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qi};
    use crate::ring::{make_curve_ring, make_projective_plane_ring};

    #[test]
    fn psi_low_orders() {
        let e = Engine::new(make_projective_plane_ring());
        let h = RingElement::basis(1);
        assert_eq!(e.psi_class(0, &h), FockElement::gen(1, 1));
        let c1h = e.ring.mul(e.ring.c1(), &h).scale(&qf(1, 2));
        let expect = FockElement::p(1, &c1h).add(&FockElement::gen(2, 1).scale(&qf(1, 2)));
        assert_eq!(e.psi_class(1, &h), expect);
    }

    #[test]
    fn r_on_generators() {
        let e = Engine::new(make_curve_ring(1, 1));
        assert_eq!(*e.r_monomial(&Monomial::one()), ExtendedElement::one());
        let p1 = Monomial::gen(Gen::new(1, 3));
        let mut expect = ExtendedElement::default();
        expect.add_term(p1.clone(), 0, 0, qi(1));
        assert_eq!(*e.r_monomial(&p1), expect);
        let p2 = Monomial::gen(Gen::new(2, 1));
        let mut expect = ExtendedElement::default();
        expect.add_term(p2.clone(), 0, 0, qi(1));
        expect.add_term(Monomial::one(), 1, 0, qi(-2));
        assert_eq!(*e.r_monomial(&p2), expect);
    }

    #[test]
    fn t_on_small_inputs() {
        let e = Engine::new(make_curve_ring(1, 1));
        let w = RingElement::basis(3);
        let one = FockElement::one();
        assert_eq!(e.t_apply(1, &w, &one).unwrap(), FockElement::gen(1, 3));
        // T_1(1)(p_2(η)) = p_2(η) p_1(1) − 2 p_1(η)
        for eta in 0..4 {
            let f = FockElement::gen(2, eta);
            let got = e.t_apply(1, &RingElement::one(), &f).unwrap();
            let expect = f
                .mul(&FockElement::gen(1, 0), &e.ring)
                .sub(&FockElement::gen(1, eta).scale(&qi(2)));
            assert_eq!(got, expect, "eta = {eta}");
        }
        assert!(e.t_apply(0, &w, &one).is_err());
        assert!(e.t_apply(-1, &w, &one).unwrap().is_zero());
    }
}
