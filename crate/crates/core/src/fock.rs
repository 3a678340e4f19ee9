//! The Fock space `Λ_S`: super-commutative polynomials in `p_n(ξ)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dashmap::DashMap;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};
use crate::ring::{RingElement, RingSpec};

/// The generator `p_n(b)` for a basis index `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub n: u32,
    pub b: u32,
}

impl Gen {
    pub fn new(n: u32, b: usize) -> Self {
        Self { n, b: b as u32 }
    }

    pub fn degree(&self, ring: &RingSpec) -> i64 {
        2 * self.n as i64 - 4 + ring.degree(self.b as usize) as i64
    }

    /// Weight `2n + deg b`, positive on every generator.
    pub fn size(&self, ring: &RingSpec) -> i64 {
        2 * self.n as i64 + ring.degree(self.b as usize) as i64
    }

    pub fn odd(&self, ring: &RingSpec) -> bool {
        ring.is_odd(self.b as usize)
    }
}

/// Sorted list of `(generator, exponent)`; odd generators have exponent 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<(Gen, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn gen(g: Gen) -> Self {
        Self(vec![(g, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, ring: &RingSpec) -> i64 {
        self.0.iter().map(|(g, e)| g.degree(ring) * *e as i64).sum()
    }

    pub fn size(&self, ring: &RingSpec) -> i64 {
        self.0.iter().map(|(g, e)| g.size(ring) * *e as i64).sum()
    }

    pub fn odd(&self, ring: &RingSpec) -> bool {
        self.0.iter().filter(|(g, _)| g.odd(ring)).count() % 2 == 1
    }

    pub fn factors(&self) -> impl Iterator<Item = Gen> + '_ {
        self.0
            .iter()
            .flat_map(|(g, e)| std::iter::repeat(*g).take(*e as usize))
    }

    /// Product with sign, or `None` if an odd generator repeats.
    pub fn mul(&self, other: &Self, ring: &RingSpec) -> Option<(Self, bool)> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut negative = false;
        // odd generators of `self` not yet emitted, to count crossings
        let mut odd_left = self.0.iter().filter(|(g, _)| g.odd(ring)).count();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        if a.0.odd(ring) {
                            return None;
                        }
                        out.push((a.0, a.1 + b.1));
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, _) => false,
            };
            if take_left {
                let a = self.0[i];
                if a.0.odd(ring) {
                    odd_left -= 1;
                }
                out.push(a);
                i += 1;
            } else {
                let b = other.0[j];
                if b.0.odd(ring) && odd_left % 2 == 1 {
                    negative = !negative;
                }
                out.push(b);
                j += 1;
            }
        }
        Some((Self(out), negative))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockElement {
    terms: BTreeMap<Monomial, Q>,
}

impl FockElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::one(), Q::one())
    }

    pub fn scalar(c: Q) -> Self {
        Self::from_monomial(Monomial::one(), c)
    }

    pub fn from_monomial(m: Monomial, c: Q) -> Self {
        let mut r = Self::zero();
        r.add_term(m, c);
        r
    }

    pub fn gen(n: u32, b: usize) -> Self {
        Self::from_monomial(Monomial::gen(Gen::new(n, b)), Q::one())
    }

    /// `p_n(x)` for a ring element `x`, extended linearly.
    pub fn p(n: u32, x: &RingElement) -> Self {
        let mut r = Self::zero();
        for (b, c) in x.terms() {
            r.add_term(Monomial::gen(Gen::new(n, b)), c.clone());
        }
        r
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (m, x) in other.terms() {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign_scaled(other, &Q::one());
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign_scaled(other, &-Q::one());
        r
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut r = Self::zero();
        r.add_assign_scaled(self, c);
        r
    }

    pub fn mul(&self, other: &Self, ring: &RingSpec) -> Self {
        let mut r = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                if let Some((m, neg)) = a.mul(b, ring) {
                    let c = x * y;
                    r.add_term(m, if neg { -c } else { c });
                }
            }
        }
        r
    }

    pub fn pow(&self, k: u32, ring: &RingSpec) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul(self, ring);
        }
        r
    }

    /// Degree of a homogeneous element; `None` for zero or mixed elements.
    pub fn degree(&self, ring: &RingSpec) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree(ring));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn homogeneous_parts(&self, ring: &RingSpec) -> BTreeMap<i64, FockElement> {
        let mut out: BTreeMap<i64, FockElement> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.degree(ring))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Applies a ring endomorphism induced by a linear map on `H` to every generator argument.
    pub fn map_arguments(
        &self,
        ring: &RingSpec,
        f: &dyn Fn(&RingElement) -> Result<RingElement>,
    ) -> Result<Self> {
        let mut images: BTreeMap<Gen, FockElement> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            let mut acc = Self::one();
            for g in m.factors() {
                if !images.contains_key(&g) {
                    let x = f(&RingElement::basis(g.b as usize))?;
                    images.insert(g, Self::p(g.n, &x));
                }
                acc = acc.mul(&images[&g], ring);
            }
            out.add_assign_scaled(&acc, c);
        }
        Ok(out)
    }

    pub fn to_text(&self, ring: &RingSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                s.push_str(" + ");
            }
            write!(s, "{} * {}", fmt_q(c), monomial_text(m, ring)).unwrap();
        }
        s
    }

    pub fn from_text(s: &str, ring: &RingSpec) -> Result<Self> {
        let s = s.trim();
        let mut out = Self::zero();
        if s == "0" {
            return Ok(out);
        }
        for term in s.split(" + ") {
            let (c, m) = term
                .split_once(" * ")
                .ok_or_else(|| Error::Parse(format!("malformed term {term:?}")))?;
            let c = parse_q(c)?;
            let mut acc = Self::scalar(c);
            let m = m.trim();
            if m != "1" {
                for factor in m.split('*') {
                    let (g, e) = parse_factor(factor.trim(), ring)?;
                    acc = acc.mul(&Self::from_monomial(Monomial::gen(g), Q::one()).pow(e, ring), ring);
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

pub fn monomial_text(m: &Monomial, ring: &RingSpec) -> String {
    if m.is_one() {
        return "1".into();
    }
    let parts: Vec<String> = m
        .0
        .iter()
        .map(|(g, e)| {
            let base = format!("p{}({})", g.n, ring.basis_name(g.b as usize));
            if *e == 1 {
                base
            } else {
                format!("{base}^{e}")
            }
        })
        .collect();
    parts.join("*")
}

fn parse_factor(f: &str, ring: &RingSpec) -> Result<(Gen, u32)> {
    let bad = || Error::Parse(format!("malformed generator {f:?}"));
    let (base, e) = match f.rsplit_once('^') {
        Some((b, e)) if b.ends_with(')') => (b, e.parse().map_err(|_| bad())?),
        _ => (f, 1),
    };
    let rest = base.strip_prefix('p').ok_or_else(bad)?;
    let (n, name) = rest.split_once('(').ok_or_else(bad)?;
    let name = name.strip_suffix(')').ok_or_else(bad)?;
    let n: u32 = n.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    let b = ring
        .index_of(name)
        .ok_or_else(|| Error::Parse(format!("unknown basis element {name:?}")))?;
    Ok((Gen::new(n, b), e))
}

/// Polynomial in the power sums `p_k`, keyed by partitions sorted decreasingly.
pub type PowerSumPoly = BTreeMap<Vec<u32>, Q>;

fn ps_mul(a: &PowerSumPoly, b: &PowerSumPoly) -> PowerSumPoly {
    let mut out = PowerSumPoly::new();
    for (la, x) in a {
        for (lb, y) in b {
            let mut l: Vec<u32> = la.iter().chain(lb).copied().collect();
            l.sort_unstable_by(|p, q| q.cmp(p));
            *out.entry(l).or_insert_with(Q::zero) += x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `h_n` in the power-sum basis via `n h_n = Σ_{k=1}^n p_k h_{n−k}`.
pub fn h_to_p(n: u32) -> PowerSumPoly {
    let mut hs: Vec<PowerSumPoly> = vec![[(vec![], Q::one())].into_iter().collect()];
    for m in 1..=n {
        let mut acc = PowerSumPoly::new();
        for k in 1..=m {
            let pk: PowerSumPoly = [(vec![k], Q::one())].into_iter().collect();
            for (l, c) in ps_mul(&pk, &hs[(m - k) as usize]) {
                *acc.entry(l).or_insert_with(Q::zero) += c;
            }
        }
        let inv = Q::new(1.into(), (m as i64).into());
        acc = acc.into_iter().map(|(l, c)| (l, c * &inv)).collect();
        acc.retain(|_, c| !c.is_zero());
        hs.push(acc);
    }
    hs.pop().unwrap()
}

/// `(p_{l_1} ⋯ p_{l_k})(ξ)` through iterated application of the diagonal.
pub fn eval_power_product(ring: &RingSpec, parts: &[u32], xi: &RingElement) -> Result<FockElement> {
    match parts {
        [] => Ok(FockElement::scalar(ring.aug(xi)?)),
        [n] => Ok(FockElement::p(*n, xi)),
        [n, rest @ ..] => {
            let mut out = FockElement::zero();
            for (i, j, c) in ring.diagonal_mul(xi).terms() {
                let left = FockElement::gen(*n, i);
                let right = eval_power_product(ring, rest, &RingElement::basis(j))?;
                out.add_assign_scaled(&left.mul(&right, ring), c);
            }
            Ok(out)
        }
    }
}

pub fn eval_symfunc(ring: &RingSpec, f: &PowerSumPoly, xi: &RingElement) -> Result<FockElement> {
    let mut out = FockElement::zero();
    for (parts, c) in f {
        out.add_assign_scaled(&eval_power_product(ring, parts, xi)?, c);
    }
    Ok(out)
}

/// Memoized `h_n(b)` on basis elements, via the evaluated Newton recursion
/// `n h_n(ξ) = p_n(ξ) + Σ_{k<n} (p_k ⊗ h_{n−k})(Δξ)`.
#[derive(Default)]
pub struct HCache {
    memo: DashMap<(u32, usize), FockElement>,
}

impl HCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn h_basis(&self, ring: &RingSpec, n: u32, b: usize) -> Result<FockElement> {
        if n == 0 {
            return Ok(FockElement::scalar(ring.aug(&RingElement::basis(b))?));
        }
        if let Some(v) = self.memo.get(&(n, b)) {
            return Ok(v.clone());
        }
        let xi = RingElement::basis(b);
        let mut acc = FockElement::p(n, &xi);
        let dx = ring.diagonal_mul(&xi);
        for k in 1..n {
            for (i, j, c) in dx.terms() {
                let hj = self.h_basis(ring, n - k, j)?;
                acc.add_assign_scaled(&FockElement::gen(k, i).mul(&hj, ring), c);
            }
        }
        let v = acc.scale(&Q::new(1.into(), (n as i64).into()));
        self.memo.insert((n, b), v.clone());
        Ok(v)
    }

    pub fn h_eval(&self, ring: &RingSpec, n: u32, xi: &RingElement) -> Result<FockElement> {
        let mut out = FockElement::zero();
        for (b, c) in xi.terms() {
            out.add_assign_scaled(&self.h_basis(ring, n, b)?, c);
        }
        Ok(out)
    }
}

/// Antisymmetrization over the parabolic labels, applied to generator arguments.
pub fn asym_fock(ring: &RingSpec, f: &FockElement) -> Result<FockElement> {
    let par = ring
        .parabolic
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("{} is not parabolic", ring.name)))?;
    let perms = crate::ring::permutations(par.r);
    let mut out = FockElement::zero();
    for (sigma, odd) in &perms {
        let img = f.map_arguments(ring, &|x| ring.permute_parabolic(sigma, x))?;
        out.add_assign_scaled(&img, &if *odd { -Q::one() } else { Q::one() });
    }
    Ok(out.scale(&Q::new(1.into(), (perms.len() as i64).into())))
}

/// Every monomial whose weight `Σ (2n + deg b)` is at most `max_size`.
pub fn monomials_up_to_size(ring: &RingSpec, max_size: i64) -> Vec<Monomial> {
    let mut gens: Vec<Gen> = Vec::new();
    for n in 1.. {
        if 2 * n as i64 > max_size {
            break;
        }
        for b in 0..ring.dim() {
            let g = Gen::new(n, b);
            if g.size(ring) <= max_size {
                gens.push(g);
            }
        }
    }
    gens.sort();
    let mut out = Vec::new();
    fn rec(ring: &RingSpec, gens: &[Gen], k: usize, left: i64, cur: &mut Vec<(Gen, u32)>, out: &mut Vec<Monomial>) {
        if k == gens.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        let g = gens[k];
        let s = g.size(ring);
        let emax = if g.odd(ring) { 1 } else { left / s };
        for e in 0..=emax.min(left / s) {
            if e > 0 {
                cur.push((g, e as u32));
            }
            rec(ring, gens, k + 1, left - e * s, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    rec(ring, &gens, 0, max_size, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Element of `Λ_S ⊗ H[u, u⁻¹]`, keyed by `(monomial, basis index, u-power)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtendedElement {
    pub terms: BTreeMap<(Monomial, usize, i64), Q>,
}

impl ExtendedElement {
    pub fn one() -> Self {
        let mut r = Self::default();
        r.add_term(Monomial::one(), 0, 0, Q::one());
        r
    }

    pub fn add_term(&mut self, m: Monomial, b: usize, k: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (m, b, k);
        let e = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(f⊗a u^i)(g⊗b u^j) = (−1)^{|a||g|} fg ⊗ ab u^{i+j}`.
    pub fn mul(&self, other: &Self, ring: &RingSpec) -> Self {
        let mut r = Self::default();
        for ((f, a, i), x) in &self.terms {
            for ((g, b, j), y) in &other.terms {
                let Some((fg, neg)) = f.mul(g, ring) else { continue };
                let flip = neg ^ (ring.is_odd(*a) && g.odd(ring));
                let c = x * y;
                let c = if flip { -c } else { c };
                for (k, z) in ring.mul_basis(*a, *b).terms() {
                    r.add_term(fg.clone(), k, i + j, &c * z);
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qi};
    use crate::ring::{make_curve_ring, make_parabolic_ring, make_projective_plane_ring};

    #[test]
    fn odd_generators_anticommute() {
        let h = make_curve_ring(1, 1);
        let a = FockElement::gen(1, 1);
        let b = FockElement::gen(1, 2);
        assert!(a.mul(&a, &h).is_zero());
        assert_eq!(a.mul(&b, &h), b.mul(&a, &h).scale(&qi(-1)));
        let c = FockElement::gen(2, 0).mul(&FockElement::gen(3, 3), &h);
        assert_eq!(c.len(), 1);
        assert_eq!(c.coeff(&Monomial(vec![(Gen::new(2, 0), 1), (Gen::new(3, 3), 1)])), qi(1));
    }

    #[test]
    fn newton_expansions() {
        let h2 = h_to_p(2);
        assert_eq!(h2.get(&vec![1, 1]), Some(&qf(1, 2)));
        assert_eq!(h2.get(&vec![2]), Some(&qf(1, 2)));
        let h3 = h_to_p(3);
        assert_eq!(h3.get(&vec![1, 1, 1]), Some(&qf(1, 6)));
        assert_eq!(h3.get(&vec![2, 1]), Some(&qf(1, 2)));
        assert_eq!(h3.get(&vec![3]), Some(&qf(1, 3)));
        assert_eq!(h_to_p(0).get(&vec![]), Some(&qi(1)));
    }

    #[test]
    fn curve_evaluations() {
        let h = make_curve_ring(1, 1);
        let one = RingElement::one();
        let p1p2 = eval_power_product(&h, &[1, 2], &one).unwrap();
        assert_eq!(p1p2, FockElement::gen(1, 3).mul(&FockElement::gen(2, 3), &h));
        assert!(eval_power_product(&h, &[1, 2], &RingElement::basis(1)).unwrap().is_zero());
        let cache = HCache::new();
        let h2 = cache.h_eval(&h, 2, &one).unwrap();
        let expect = FockElement::gen(1, 3)
            .pow(2, &h)
            .add(&FockElement::gen(2, 0))
            .scale(&qf(1, 2));
        assert_eq!(h2, expect);
        assert!(cache.h_eval(&h, 0, &one).is_err());
        assert!(eval_power_product(&h, &[], &one).is_err());
    }

    #[test]
    fn newton_cache_matches_symfunc() {
        let p = make_projective_plane_ring();
        let cache = HCache::new();
        for n in 1..=5 {
            for b in 0..3 {
                let xi = RingElement::basis(b);
                assert_eq!(
                    cache.h_eval(&p, n, &xi).unwrap(),
                    eval_symfunc(&p, &h_to_p(n), &xi).unwrap()
                );
            }
        }
    }

    #[test]
    fn parabolic_h() {
        let h = make_parabolic_ring(0, 1, 2, 1).unwrap();
        let cache = HCache::new();
        let p1 = h.parabolic_class(0, 0);
        for n in 1..5u32 {
            assert_eq!(
                cache.h_eval(&h, n, &p1).unwrap(),
                FockElement::p(n, &p1).scale(&qf(1, n as i64))
            );
        }
    }

    #[test]
    fn text_round_trip() {
        let h = make_curve_ring(1, 1);
        let f = FockElement::gen(1, 1)
            .mul(&FockElement::gen(2, 2), &h)
            .scale(&qf(-3, 2))
            .add(&FockElement::gen(1, 3).pow(3, &h))
            .add(&FockElement::scalar(qi(5)));
        let s = f.to_text(&h);
        assert_eq!(FockElement::from_text(&s, &h).unwrap(), f);
        assert_eq!(FockElement::from_text("0", &h).unwrap(), FockElement::zero());
        assert!(FockElement::from_text("1 * p1(q)", &h).is_err());
    }

    #[test]
    fn extended_sign() {
        let h = make_curve_ring(1, 0);
        let mut a = ExtendedElement::default();
        a.add_term(Monomial::one(), 1, 1, qi(1));
        let mut b = ExtendedElement::default();
        b.add_term(Monomial::gen(Gen::new(1, 2)), 0, 2, qi(1));
        let ab = a.mul(&b, &h);
        let mut expect = ExtendedElement::default();
        expect.add_term(Monomial::gen(Gen::new(1, 2)), 1, 3, qi(-1));
        assert_eq!(ab, expect);
    }

    #[test]
    fn size_enumeration() {
        let h = make_curve_ring(0, 1);
        // p1(1) has weight 2, p1(w) and p2(1) weight 4
        let ms = monomials_up_to_size(&h, 4);
        assert_eq!(ms.len(), 5);
    }
}
