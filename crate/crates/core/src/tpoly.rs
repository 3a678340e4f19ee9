//! Symmetric polynomials in the Chern roots `t1, t2` (plus an auxiliary `u`),
//! rewritten in `c1 = t1 + t2`, `c2 = t1 t2` and evaluated in a ring.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::{binomial, factorial, qi, Q};
use crate::ring::{RingElement, RingSpec};

/// Polynomial in `t1, t2, u` keyed by exponents `(a, b, k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPoly(pub BTreeMap<(u32, u32, u32), Q>);

impl TPoly {
    pub fn add_term(&mut self, a: u32, b: u32, k: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry((a, b, k)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&(a, b, k));
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::default();
        for ((a, b, k), x) in &self.0 {
            for ((c, d, l), y) in &other.0 {
                r.add_term(a + c, b + d, k + l, x * y);
            }
        }
        r
    }

    /// `(α u + β t1 + γ t2)^n`.
    pub fn linear_power(alpha: i64, beta: i64, gamma: i64, n: u32) -> Self {
        let mut r = Self::default();
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let c = binomial(n as i64, i as i64)
                    * binomial((n - i) as i64, j as i64)
                    * qi(alpha).pow(k as i32)
                    * qi(beta).pow(i as i32)
                    * qi(gamma).pow(j as i32);
                r.add_term(i, j, k, c);
            }
        }
        r
    }

    pub fn add(&self, other: &Self, scale: &Q) -> Self {
        let mut r = self.clone();
        for ((a, b, k), x) in &other.0 {
            r.add_term(*a, *b, *k, x * scale);
        }
        r
    }

    /// Exact division by `t1 t2`; panics if some term is not divisible.
    pub fn div_t1t2(&self) -> Self {
        let mut r = Self::default();
        for ((a, b, k), x) in &self.0 {
            assert!(*a >= 1 && *b >= 1, "term t1^{a} t2^{b} not divisible by t1 t2");
            r.add_term(a - 1, b - 1, *k, x.clone());
        }
        r
    }

    pub fn max_u(&self) -> u32 {
        self.0.keys().map(|k| k.2).max().unwrap_or(0)
    }

    /// Coefficient of `u^k` as a polynomial in `c1, c2`, keyed by `(i, j)` for `c1^i c2^j`.
    pub fn u_coeff_in_chern(&self, k: u32) -> BTreeMap<(u32, u32), Q> {
        let mut rest: BTreeMap<(u32, u32), Q> = self
            .0
            .iter()
            .filter(|(key, _)| key.2 == k)
            .map(|((a, b, _), c)| ((*a, *b), c.clone()))
            .collect();
        let mut out: BTreeMap<(u32, u32), Q> = BTreeMap::new();
        while let Some(((a, b), c)) = rest.iter().next_back().map(|(k, c)| (*k, c.clone())) {
            assert!(a >= b, "polynomial is not symmetric in t1, t2");
            let (i, j) = (a - b, b);
            *out.entry((i, j)).or_insert_with(Q::zero) += &c;
            // subtract c · c1^i c2^j expanded in t1, t2
            for s in 0..=i {
                let key = (j + i - s, j + s);
                let e = rest.entry(key).or_insert_with(Q::zero);
                *e -= &c * binomial(i as i64, s as i64);
                if e.is_zero() {
                    rest.remove(&key);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

pub fn eval_chern(ring: &RingSpec, poly: &BTreeMap<(u32, u32), Q>) -> RingElement {
    let mut r = RingElement::zero();
    for ((i, j), c) in poly {
        let x = ring.mul(&ring.pow(ring.c1(), *i), &ring.pow(ring.c2(), *j));
        r = r.add(&x.scale(c));
    }
    r
}

/// Coefficients of `z/(1 − e^{−z})` up to `z^kmax`.
pub fn todd_series(kmax: usize) -> Vec<Q> {
    // (1 − e^{−z})/z = Σ (−1)^k z^k/(k+1)!
    let a: Vec<Q> = (0..=kmax)
        .map(|k| {
            let s = if k % 2 == 0 { Q::one() } else { -Q::one() };
            s / factorial(k as u32 + 1)
        })
        .collect();
    let mut b = vec![Q::zero(); kmax + 1];
    b[0] = Q::one();
    for n in 1..=kmax {
        let mut acc = Q::zero();
        for k in 1..=n {
            acc += &a[k] * &b[n - k];
        }
        b[n] = -acc;
    }
    b
}

/// `Td_k` for `k = 0..=kmax`, evaluated in the ring.
pub fn todd_coefficients(ring: &RingSpec, kmax: usize) -> Vec<RingElement> {
    let b = todd_series(kmax);
    (0..=kmax)
        .map(|k| {
            let mut p = TPoly::default();
            for i in 0..=k {
                p.add_term(i as u32, (k - i) as u32, 0, &b[i] * &b[k - i]);
            }
            eval_chern(ring, &p.u_coeff_in_chern(0))
        })
        .collect()
}

/// `[u^n − (u−t1)^n − (u−t2)^n + (u−t1−t2)^n]/(t1 t2)` as a symbolic polynomial.
pub fn divided_difference_poly(n: u32) -> TPoly {
    let num = TPoly::linear_power(1, 0, 0, n)
        .add(&TPoly::linear_power(1, -1, 0, n), &-Q::one())
        .add(&TPoly::linear_power(1, 0, -1, n), &-Q::one())
        .add(&TPoly::linear_power(1, -1, -1, n), &Q::one());
    num.div_t1t2()
}

/// The divided difference as a list of ring coefficients of `u^0, u^1, …`.
pub fn divided_difference(ring: &RingSpec, n: u32) -> Vec<RingElement> {
    let p = divided_difference_poly(n);
    if p.0.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<RingElement> = (0..=p.max_u())
        .map(|k| eval_chern(ring, &p.u_coeff_in_chern(k)))
        .collect();
    while out.last().is_some_and(|x| x.is_zero()) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use crate::ring::{make_curve_ring, make_projective_plane_ring};

    #[test]
    fn todd_classes() {
        let b = todd_series(4);
        assert_eq!(b, vec![qi(1), qf(1, 2), qf(1, 12), qi(0), qf(-1, 720)]);
        let p = make_projective_plane_ring();
        let td = todd_coefficients(&p, 3);
        assert_eq!(td[0], RingElement::one());
        assert_eq!(td[1], p.c1().scale(&qf(1, 2)));
        // (c1² + c2)/12 = (9δ + 3δ)/12 = δ
        assert_eq!(td[2], RingElement::basis(2));
        assert!(td[3].is_zero());
    }

    #[test]
    fn divided_differences() {
        assert!(divided_difference_poly(1).0.is_empty());
        let p = make_projective_plane_ring();
        assert_eq!(divided_difference(&p, 2), vec![RingElement::term(0, qi(2))]);
        // 6u − 3c1
        assert_eq!(
            divided_difference(&p, 3),
            vec![p.c1().scale(&qi(-3)), RingElement::term(0, qi(6))]
        );
    }

    #[test]
    fn divided_difference_at_zero_roots() {
        let h = make_curve_ring(0, 0);
        for n in 2..=6u32 {
            let dd = divided_difference(&h, n);
            let mut expect = vec![RingElement::zero(); (n - 1) as usize];
            expect[(n - 2) as usize] = RingElement::term(0, qi((n * (n - 1)) as i64));
            assert_eq!(dd, expect, "n = {n}");
        }
    }

    #[test]
    fn chern_rewrite() {
        // t1² + t2² = c1² − 2c2
        let mut p = TPoly::default();
        p.add_term(2, 0, 0, qi(1));
        p.add_term(0, 2, 0, qi(1));
        let c = p.u_coeff_in_chern(0);
        let expect: BTreeMap<_, _> = [((2, 0), qi(1)), ((0, 1), qi(-2))].into_iter().collect();
        assert_eq!(c, expect);
    }
}
