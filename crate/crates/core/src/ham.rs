//! The Lie algebra of polynomial Hamiltonian vector fields on the plane,
//! by structure constants and as first-order differential operators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, qi, Q};
use crate::report::{Case, Report};

/// `Σ c V_{m,n}`; `V_{0,0}` is the zero field and is never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HamElement(BTreeMap<(u32, u32), Q>);

impl HamElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn v(m: u32, n: u32) -> Self {
        let mut e = Self::zero();
        e.add_term(m, n, Q::one());
        e
    }

    pub fn add_term(&mut self, m: u32, n: u32, c: Q) {
        if (m, n) == (0, 0) || c.is_zero() {
            return;
        }
        let e = self.0.entry((m, n)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&(m, n));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Q)> + '_ {
        self.0.iter().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for ((m, n), c) in other.terms() {
            r.add_term(m, n, c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut r = Self::zero();
        for ((m, n), x) in self.terms() {
            r.add_term(m, n, x * c);
        }
        r
    }

    /// Parses `V(2,3)`, `2*V(1,1) + -1/2*V(0,2)` and similar.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Self::zero();
        let s = s.trim();
        if s == "0" {
            return Ok(out);
        }
        for term in s.split(" + ") {
            let term = term.trim();
            let (coeff, v) = match term.rsplit_once('*') {
                Some((c, v)) => (parse_q(c.trim())?, v.trim()),
                None => match term.strip_prefix('-') {
                    Some(rest) => (-Q::one(), rest.trim()),
                    None => (Q::one(), term),
                },
            };
            let inner = v
                .strip_prefix("V(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected V(m,n), got {v:?}")))?;
            let (m, n) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected V(m,n), got {v:?}")))?;
            let m: u32 = m.trim().parse().map_err(|_| Error::Parse(format!("bad index {m:?}")))?;
            let n: u32 = n.trim().parse().map_err(|_| Error::Parse(format!("bad index {n:?}")))?;
            out.add_term(m, n, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for HamElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|((m, n), c)| {
                if c.is_one() {
                    format!("V({m},{n})")
                } else {
                    format!("{}*V({m},{n})", fmt_q(c))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `[V_{m,n}, V_{m',n'}] = (m'n − mn') V_{m+m'−1,n+n'−1}`, extended bilinearly.
pub fn h2_bracket(a: &HamElement, b: &HamElement) -> HamElement {
    let mut out = HamElement::zero();
    for ((m, n), c) in a.terms() {
        for ((m2, n2), d) in b.terms() {
            let k = m2 as i64 * n as i64 - m as i64 * n2 as i64;
            if k == 0 {
                continue;
            }
            out.add_term(m + m2 - 1, n + n2 - 1, qi(k) * c * d);
        }
    }
    out
}

/// A polynomial in `x_1..x_k, y_1..y_k`; exponent vectors list the `x`s first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let x = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *x += c;
        if x.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut r = Self::zero(self.vars);
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x * c);
        }
        r
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero(self.vars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                r.add_term(e, x * y);
            }
        }
        r
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut r = Self::zero(self.vars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut f = e.clone();
                f[v] -= 1;
                r.add_term(f, c * qi(e[v] as i64));
            }
        }
        r
    }

    /// Applies a variable substitution given as a permutation of positions.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut r = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let mut f = vec![0; self.vars];
            for (i, &p) in perm.iter().enumerate() {
                f[p] = e[i];
            }
            r.add_term(f, c.clone());
        }
        r
    }

    /// Identifies variable `from` with variable `to`.
    pub fn substitute(&self, from: usize, to: usize) -> Self {
        let mut r = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[to] += f[from];
            f[from] = 0;
            r.add_term(f, c.clone());
        }
        r
    }
}

/// `Σ_v a_v ∂_v` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOp {
    pub vars: usize,
    pub coeffs: BTreeMap<usize, Poly>,
}

impl PolyDiffOp {
    pub fn zero(vars: usize) -> Self {
        Self { vars, coeffs: BTreeMap::new() }
    }

    pub fn add_term(&mut self, v: usize, p: Poly) {
        let cur = self.coeffs.remove(&v).unwrap_or_else(|| Poly::zero(self.vars));
        let s = cur.add(&p);
        if !s.is_zero() {
            self.coeffs.insert(v, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (v, p) in &other.coeffs {
            r.add_term(*v, p.clone());
        }
        r
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut r = Self::zero(self.vars);
        for (v, p) in &self.coeffs {
            r.add_term(*v, p.scale(c));
        }
        r
    }
}

/// `Σ_i n y_i^{n−1} x_i^m ∂_{x_i} − m x_i^{m−1} y_i^n ∂_{y_i}` on `k` pairs.
pub fn vmn_as_diffop(m: u32, n: u32, k: usize) -> PolyDiffOp {
    let vars = 2 * k;
    let mut op = PolyDiffOp::zero(vars);
    for i in 0..k {
        if n > 0 {
            let mut e = vec![0; vars];
            e[i] = m;
            e[k + i] = n - 1;
            op.add_term(i, Poly::monomial(e, qi(n as i64)));
        }
        if m > 0 {
            let mut e = vec![0; vars];
            e[i] = m - 1;
            e[k + i] = n;
            op.add_term(k + i, Poly::monomial(e, qi(-(m as i64))));
        }
    }
    op
}

pub fn ham_as_diffop(h: &HamElement, k: usize) -> PolyDiffOp {
    let mut op = PolyDiffOp::zero(2 * k);
    for ((m, n), c) in h.terms() {
        op = op.add(&vmn_as_diffop(m, n, k).scale(c));
    }
    op
}

pub fn apply_diffop(a: &PolyDiffOp, f: &Poly) -> Poly {
    let mut out = Poly::zero(f.vars);
    for (v, p) in &a.coeffs {
        out = out.add(&p.mul(&f.derivative(*v)));
    }
    out
}

/// `[A, B] = Σ_v (A(b_v) − B(a_v)) ∂_v`.
pub fn diffop_bracket(a: &PolyDiffOp, b: &PolyDiffOp) -> PolyDiffOp {
    let mut out = PolyDiffOp::zero(a.vars);
    for (v, bv) in &b.coeffs {
        out.add_term(*v, apply_diffop(a, bv));
    }
    for (v, av) in &a.coeffs {
        out.add_term(*v, apply_diffop(b, av).scale(&-Q::one()));
    }
    out
}

/// All monomials in `vars` variables of total degree `≤ max`.
pub fn monomials(vars: usize, max: u32) -> Vec<Poly> {
    fn rec(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Poly>) {
        if cur.len() == vars {
            out.push(Poly::monomial(cur.clone(), Q::one()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, max, &mut Vec::new(), &mut out);
    out
}

fn pairs(cap: u32) -> Vec<(u32, u32)> {
    (0..=cap)
        .flat_map(|m| (0..=cap).map(move |n| (m, n)))
        .filter(|&p| p != (0, 0))
        .collect()
}

/// Bracket by structure constants vs. by vector fields, on all monomials of
/// degree `≤ degree_cap` in one pair of variables.
pub fn check_realization(index_cap: u32, degree_cap: u32) -> Report {
    let mons = monomials(2, degree_cap);
    let mut cases = Vec::new();
    for (m, n) in pairs(index_cap) {
        for (m2, n2) in pairs(index_cap) {
            let a = vmn_as_diffop(m, n, 1);
            let b = vmn_as_diffop(m2, n2, 1);
            let fields = diffop_bracket(&a, &b);
            let predicted = ham_as_diffop(&h2_bracket(&HamElement::v(m, n), &HamElement::v(m2, n2)), 1);
            let bad = mons
                .iter()
                .find(|f| apply_diffop(&fields, f) != apply_diffop(&predicted, f));
            cases.push(Case::check(
                format!("realization ({m},{n}) ({m2},{n2}) deg<={degree_cap}"),
                bad.is_none() && fields == predicted,
                "vector-field bracket differs from structure constants",
            ));
        }
    }
    Report::new("h2-realization", "plane", cases)
}

/// Jacobi identity on all basis triples with indices `≤ cap`.
pub fn check_jacobi(cap: u32) -> Report {
    let basis: Vec<HamElement> = pairs(cap).into_iter().map(|(m, n)| HamElement::v(m, n)).collect();
    let mut failures = Vec::new();
    let mut count = 0usize;
    for a in &basis {
        for b in &basis {
            for c in &basis {
                count += 1;
                let s = h2_bracket(a, &h2_bracket(b, c))
                    .add(&h2_bracket(b, &h2_bracket(c, a)))
                    .add(&h2_bracket(c, &h2_bracket(a, b)));
                if !s.is_zero() {
                    failures.push(format!("{a}, {b}, {c}"));
                }
            }
        }
    }
    let cases = vec![Case::check(
        format!("jacobi triples={count} index<={cap}"),
        failures.is_empty(),
        failures.first().cloned().unwrap_or_default(),
    )];
    Report::new("h2-jacobi", "plane", cases)
}

/// Permutation of variable positions induced by swapping pairs `i` and `j`.
fn pair_swap(k: usize, i: usize, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..2 * k).collect();
    p.swap(i, j);
    p.swap(k + i, k + j);
    p
}

/// Equivariance under pair permutations for `k ≤ 3`, and preservation of
/// `J_2 = (x_1 − x_2, y_1 − y_2)` for `k = 2`.
pub fn sn_equivariance_and_j2(index_cap: u32, degree_cap: u32) -> Report {
    let mut cases = Vec::new();
    for k in 1..=3usize {
        let mons = monomials(2 * k, degree_cap);
        for (m, n) in pairs(index_cap) {
            let v = vmn_as_diffop(m, n, k);
            let mut ok = true;
            for i in 0..k {
                for j in i + 1..k {
                    let sigma = pair_swap(k, i, j);
                    ok &= mons.iter().all(|f| {
                        apply_diffop(&v, &f.permute(&sigma)) == apply_diffop(&v, f).permute(&sigma)
                    });
                }
            }
            cases.push(Case::check(
                format!("equivariance k={k} V({m},{n}) deg<={degree_cap}"),
                ok,
                "operator does not commute with a pair swap",
            ));
        }
    }
    let k = 2;
    let gens = [
        Poly::var(4, 0).sub(&Poly::var(4, 1)),
        Poly::var(4, 2).sub(&Poly::var(4, 3)),
        Poly::var(4, 0)
            .sub(&Poly::var(4, 1))
            .mul(&Poly::var(4, 2).sub(&Poly::var(4, 3))),
    ];
    let mons = monomials(2 * k, degree_cap.saturating_sub(1));
    let on_diagonal = |p: &Poly| p.substitute(1, 0).substitute(3, 2);
    for (m, n) in pairs(index_cap) {
        let v = vmn_as_diffop(m, n, k);
        let ok = gens.iter().all(|g| {
            mons.iter()
                .all(|f| on_diagonal(&apply_diffop(&v, &g.mul(f))).is_zero())
        });
        cases.push(Case::check(
            format!("J2 preserved V({m},{n}) deg<={degree_cap}"),
            ok,
            "image leaves the diagonal ideal",
        ));
    }
    Report::new("h2-equivariance", "plane", cases)
}

pub fn h2_verify(index_cap: u32) -> Report {
    Report::merge(
        "h2",
        "plane",
        vec![
            check_realization(index_cap, 6),
            check_jacobi(index_cap),
            sn_equivariance_and_j2(index_cap, 5),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_constants() {
        let b = h2_bracket(&HamElement::v(1, 1), &HamElement::v(2, 0));
        assert_eq!(b, HamElement::v(2, 0).scale(&qi(2)));
        assert!(h2_bracket(&HamElement::v(2, 3), &HamElement::v(2, 3)).is_zero());
        assert!(h2_bracket(&HamElement::v(0, 1), &HamElement::v(1, 0)).is_zero());
        assert!(HamElement::v(0, 0).is_zero());
    }

    #[test]
    fn diffops() {
        let a = vmn_as_diffop(1, 1, 1);
        let mut expect = PolyDiffOp::zero(2);
        expect.add_term(0, Poly::var(2, 0));
        expect.add_term(1, Poly::var(2, 1).scale(&qi(-1)));
        assert_eq!(a, expect);
        let b = vmn_as_diffop(2, 0, 1);
        let c = diffop_bracket(&a, &b);
        let mut expect = PolyDiffOp::zero(2);
        expect.add_term(1, Poly::var(2, 0).scale(&qi(-4)));
        assert_eq!(c, expect);
        assert!(diffop_bracket(&a, &a).is_zero());
        assert!(vmn_as_diffop(0, 0, 2).is_zero());
        let x_d_x = {
            let mut o = PolyDiffOp::zero(2);
            o.add_term(0, Poly::var(2, 0));
            o
        };
        let f = Poly::monomial(vec![2, 1], Q::one());
        assert_eq!(apply_diffop(&x_d_x, &f), f.scale(&qi(2)));
    }

    #[test]
    fn text_round_trip() {
        let e = HamElement::parse("V(2,3)").unwrap();
        assert_eq!(e, HamElement::v(2, 3));
        let e = HamElement::parse("2*V(1,1) + -1/2*V(0,2)").unwrap();
        assert_eq!(HamElement::parse(&e.to_string()).unwrap(), e);
        assert!(HamElement::parse("W(1,1)").is_err());
    }

    #[test]
    fn small_suites() {
        assert!(check_realization(2, 4).passed());
        assert!(check_jacobi(2).passed());
        assert!(sn_equivariance_and_j2(2, 3).passed());
    }
}
