//! Finite-basis graded super-commutative rings with a diagonal class.
//!
//! A [`RingSpec`] carries the datum `(k, H, ε, Δ, c1, c2)`: a basis with
//! degrees and parities, a multiplication table, the diagonal `Δ ∈ H⊗H`,
//! the Chern classes `c1`, `c2` and (on compact instances) the augmentation
//! `ε`. Basis element 0 is always the unit.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Compact,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElem {
    pub name: String,
    pub degree: u32,
    pub odd: bool,
}

/// Element of `H`, stored as a sparse coefficient vector over the basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    coeffs: BTreeMap<usize, Q>,
}

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, Q::one())
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn term(i: usize, c: Q) -> Self {
        let mut r = Self::zero();
        r.add_term(i, c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Q)>>(it: I) -> Self {
        let mut r = Self::zero();
        for (i, c) in it {
            r.add_term(i, c);
        }
        r
    }

    pub fn add_term(&mut self, i: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (i, c) in other.terms() {
            r.add_term(i, c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (i, c) in other.terms() {
            r.add_term(i, -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }
}

/// Element of `H⊗H`, as a sparse map on pairs of basis indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tensor {
    pub coeffs: BTreeMap<(usize, usize), Q>,
}

impl Tensor {
    pub fn add_term(&mut self, i: usize, j: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Q)> + '_ {
        self.coeffs.iter().map(|((i, j), c)| (*i, *j, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parabolic {
    pub g: u32,
    pub e: u32,
    pub r: usize,
    pub points: usize,
    /// `slots[q][i]` is the basis index of `p_{q,i}` for `i < r-1`.
    pub slots: Vec<Vec<usize>>,
    pub omega: usize,
}

#[derive(Clone, Debug)]
pub struct RingSpec {
    pub name: String,
    basis: Vec<BasisElem>,
    mul: Vec<Vec<RingElement>>,
    diag: Tensor,
    c1: RingElement,
    c2: RingElement,
    aug: Option<RingElement>,
    kind: Kind,
    /// Rank entering the geometric index shift `T_{n+1-rank}`.
    pub rank: i64,
    pub parabolic: Option<Parabolic>,
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
            && self.mul == other.mul
            && self.diag == other.diag
            && self.c1 == other.c1
            && self.c2 == other.c2
            && self.aug == other.aug
            && self.kind == other.kind
    }
}

fn sgn(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

impl RingSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        basis: Vec<BasisElem>,
        mul: Vec<Vec<RingElement>>,
        diag: Tensor,
        c1: RingElement,
        c2: RingElement,
        aug: Option<RingElement>,
        kind: Kind,
        rank: i64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            basis,
            mul,
            diag,
            c1,
            c2,
            aug,
            kind,
            rank,
            parabolic: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_elems(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn basis_name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.basis[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].odd
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn diag(&self) -> &Tensor {
        &self.diag
    }

    pub fn c1(&self) -> &RingElement {
        &self.c1
    }

    pub fn c2(&self) -> &RingElement {
        &self.c2
    }

    pub fn s1(&self) -> RingElement {
        self.c1.clone()
    }

    pub fn s2(&self) -> RingElement {
        self.mul(&self.c1, &self.c1).sub(&self.c2)
    }

    pub fn top_degree(&self) -> u32 {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    /// Degree of a homogeneous element, `None` for zero or mixed elements.
    pub fn degree_of(&self, x: &RingElement) -> Option<u32> {
        let mut it = x.terms().map(|(i, _)| self.degree(i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Parity of a homogeneous element (`false` for zero).
    pub fn parity_of(&self, x: &RingElement) -> bool {
        x.terms().next().map(|(i, _)| self.is_odd(i)).unwrap_or(false)
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &RingElement {
        &self.mul[i][j]
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let mut r = RingElement::zero();
        for (i, x) in a.terms() {
            for (j, y) in b.terms() {
                let xy = x * y;
                for (k, z) in self.mul[i][j].terms() {
                    r.add_term(k, &xy * z);
                }
            }
        }
        r
    }

    pub fn pow(&self, a: &RingElement, k: u32) -> RingElement {
        let mut r = RingElement::one();
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    pub fn aug(&self, x: &RingElement) -> Result<Q> {
        let eps = self
            .aug
            .as_ref()
            .ok_or_else(|| Error::OpenAugmentation(self.name.clone()))?;
        Ok(x.terms().map(|(i, c)| c * eps.coeff(i)).sum())
    }

    pub fn aug_functional(&self) -> Option<&RingElement> {
        self.aug.as_ref()
    }

    /// `Δ·(ξ⊗1) = Σ c (ξ b_i) ⊗ b_j`.
    pub fn diagonal_mul(&self, xi: &RingElement) -> Tensor {
        let mut t = Tensor::default();
        for (i, j, c) in self.diag.terms() {
            let left = self.mul(xi, &RingElement::basis(i));
            for (k, a) in left.terms() {
                t.add_term(k, j, a * c);
            }
        }
        t
    }

    /// `(1⊗ξ)·Δ`, with the Koszul sign from moving ξ past the left leg.
    pub fn diagonal_mul_right(&self, xi: &RingElement) -> Tensor {
        let mut t = Tensor::default();
        for (i, j, c) in self.diag.terms() {
            for (x, cx) in xi.terms() {
                let s = sgn(self.is_odd(x) && self.is_odd(i));
                for (k, a) in self.mul_basis(x, j).terms() {
                    t.add_term(i, k, &s * cx * a * c);
                }
            }
        }
        t
    }

    /// Super product in `H⊗H`: `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac⊗bd`.
    pub fn tensor_mul(&self, s: &Tensor, t: &Tensor) -> Tensor {
        let mut out = Tensor::default();
        for (a, b, x) in s.terms() {
            for (c, d, y) in t.terms() {
                let sign = sgn(self.is_odd(b) && self.is_odd(c));
                let ac = self.mul_basis(a, c);
                let bd = self.mul_basis(b, d);
                for (k, u) in ac.terms() {
                    for (l, v) in bd.terms() {
                        out.add_term(k, l, &sign * x * y * u * v);
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let bad = |m: String| Err(Error::InvalidRing(format!("{}: {m}", self.name)));
        if n == 0 {
            return bad("empty basis".into());
        }
        if self.mul.len() != n || self.mul.iter().any(|row| row.len() != n) {
            return bad("multiplication table has wrong shape".into());
        }
        if self.basis[0].degree != 0 || self.basis[0].odd {
            return bad("basis element 0 must be the unit".into());
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.mul[i][j];
                if ij.terms().any(|(k, _)| k >= n) {
                    return bad(format!("product ({i},{j}) leaves the basis"));
                }
                if i == 0 && *ij != RingElement::basis(j) {
                    return bad(format!("1·{} is not {}", self.basis[j].name, self.basis[j].name));
                }
                let s = sgn(self.is_odd(i) && self.is_odd(j));
                if *ij != self.mul[j][i].scale(&s) {
                    return bad(format!("super-commutativity fails on ({i},{j})"));
                }
                let d = self.degree(i) + self.degree(j);
                if ij.terms().any(|(k, _)| self.degree(k) != d) {
                    return bad(format!("product ({i},{j}) is not homogeneous of degree {d}"));
                }
                if ij.terms().any(|(k, _)| self.is_odd(k) != (self.is_odd(i) ^ self.is_odd(j))) {
                    return bad(format!("product ({i},{j}) has wrong parity"));
                }
                for k in 0..n {
                    let l = self.mul(ij, &RingElement::basis(k));
                    let r = self.mul(&RingElement::basis(i), &self.mul[j][k]);
                    if l != r {
                        return bad(format!("associativity fails on ({i},{j},{k})"));
                    }
                }
            }
        }
        if self.degree_of(&self.c1).is_some_and(|d| d != 2) {
            return bad("c1 must have degree 2".into());
        }
        if self.degree_of(&self.c2).is_some_and(|d| d != 4) {
            return bad("c2 must have degree 4".into());
        }
        if self.diag.terms().any(|(i, j, _)| i >= n || j >= n) {
            return bad("diagonal leaves the basis".into());
        }
        if self.diag.terms().any(|(i, j, _)| self.is_odd(i) != self.is_odd(j)) {
            return bad("diagonal is not even".into());
        }
        for x in 0..n {
            let xi = RingElement::basis(x);
            if self.diagonal_mul(&xi) != self.diagonal_mul_right(&xi) {
                return bad(format!("(ξ⊗1)Δ ≠ (1⊗ξ)Δ for ξ = {}", self.basis[x].name));
            }
        }
        let sq = self.tensor_mul(&self.diag, &self.diag);
        let mut c2d = Tensor::default();
        for (i, j, c) in self.diag.terms() {
            for (k, a) in self.mul(&self.c2, &RingElement::basis(i)).terms() {
                c2d.add_term(k, j, a * c);
            }
        }
        if sq != c2d {
            return bad("Δ² ≠ c2·Δ".into());
        }
        match (self.kind, &self.aug) {
            (Kind::Open, Some(_)) => return bad("open instance carries an augmentation".into()),
            (Kind::Compact, None) => return bad("compact instance lacks an augmentation".into()),
            (Kind::Compact, Some(eps)) => {
                let mut left = RingElement::zero();
                let mut right = RingElement::zero();
                for (i, j, c) in self.diag.terms() {
                    left.add_term(j, c * eps.coeff(i));
                    right.add_term(i, c * eps.coeff(j));
                }
                if left != RingElement::one() || right != RingElement::one() {
                    return bad("(ε⊗Id)Δ or (Id⊗ε)Δ is not 1".into());
                }
            }
            (Kind::Open, None) => {}
        }
        Ok(())
    }

    pub fn fmt_element(&self, x: &RingElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (i, c)) in x.terms().enumerate() {
            if k > 0 {
                s.push_str(" + ");
            }
            if c.is_one() {
                s.push_str(&self.basis[i].name);
            } else {
                s.push_str(&format!("{}*{}", fmt_q(c), self.basis[i].name));
            }
        }
        s
    }

    /// Parses `name`, `c*name` and sums thereof.
    pub fn parse_element(&self, s: &str) -> Result<RingElement> {
        let mut r = RingElement::zero();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() || part == "0" {
                continue;
            }
            let (c, name) = match part.rsplit_once('*') {
                Some((c, name)) => (parse_q(c)?, name.trim()),
                None => (Q::one(), part),
            };
            let i = self
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown basis element {name:?}")))?;
            r.add_term(i, c);
        }
        Ok(r)
    }

    /// Applies the parabolic relabelling `p_{q,i} ↦ p_{q,σ(i)}` at every point.
    pub fn permute_parabolic(&self, sigma: &[usize], x: &RingElement) -> Result<RingElement> {
        let par = self
            .parabolic
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("{} is not parabolic", self.name)))?;
        let mut out = RingElement::zero();
        for (b, c) in x.terms() {
            let slot = par
                .slots
                .iter()
                .enumerate()
                .find_map(|(q, row)| row.iter().position(|&s| s == b).map(|i| (q, i)));
            match slot {
                Some((q, i)) => out = out.add(&self.parabolic_class(q, sigma[i]).scale(c)),
                None => out.add_term(b, c.clone()),
            }
        }
        Ok(out)
    }

    /// `p_{q,i}` (0-based), with `p_{q,r-1} = ω − Σ_{i<r-1} p_{q,i}`.
    pub fn parabolic_class(&self, q: usize, i: usize) -> RingElement {
        let par = self.parabolic.as_ref().expect("parabolic instance");
        if i + 1 < par.r {
            RingElement::basis(par.slots[q][i])
        } else {
            let mut x = RingElement::basis(par.omega);
            for &s in &par.slots[q] {
                x.add_term(s, -Q::one());
            }
            x
        }
    }

    /// `(1/r!) Σ sgn(σ) σ(x)`.
    pub fn asym(&self, x: &RingElement) -> Result<RingElement> {
        let r = self
            .parabolic
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("{} is not parabolic", self.name)))?
            .r;
        let mut out = RingElement::zero();
        let perms = permutations(r);
        for (sigma, odd) in &perms {
            let y = self.permute_parabolic(sigma, x)?;
            out = out.add(&y.scale(&sgn(*odd)));
        }
        Ok(out.scale(&Q::new(1.into(), (perms.len() as i64).into())))
    }
}

/// All permutations of `0..r` with their parity.
pub fn permutations(r: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if k == cur.len() {
            out.push((cur.clone(), odd));
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, odd ^ (i != k), out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, false, &mut out);
    out.sort();
    out
}

fn table(n: usize, f: impl Fn(usize, usize) -> RingElement) -> Vec<Vec<RingElement>> {
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

fn elem(name: &str, degree: u32, odd: bool) -> BasisElem {
    BasisElem {
        name: name.to_string(),
        degree,
        odd,
    }
}

pub fn make_projective_plane_ring() -> RingSpec {
    let basis = vec![elem("1", 0, false), elem("h", 2, false), elem("d", 4, false)];
    let mul = table(3, |i, j| {
        if i + j <= 2 {
            RingElement::basis(i + j)
        } else {
            RingElement::zero()
        }
    });
    let mut diag = Tensor::default();
    diag.add_term(2, 0, Q::one());
    diag.add_term(1, 1, Q::one());
    diag.add_term(0, 2, Q::one());
    RingSpec::new(
        "p2",
        basis,
        mul,
        diag,
        RingElement::term(1, qi(3)),
        RingElement::term(2, qi(3)),
        Some(RingElement::basis(2)),
        Kind::Compact,
        1,
    )
    .expect("projective plane ring is valid")
}

fn curve_basis(g: u32) -> Vec<BasisElem> {
    let mut basis = vec![elem("1", 0, false)];
    for i in 1..=2 * g {
        basis.push(elem(&format!("g{i}"), 1, true));
    }
    basis.push(elem("w", 2, false));
    basis
}

fn curve_product(g: usize, omega: usize, i: usize, j: usize) -> RingElement {
    let g = g as isize;
    match (i, j) {
        (0, _) => RingElement::basis(j),
        (_, 0) => RingElement::basis(i),
        _ if i == omega || j == omega => RingElement::zero(),
        _ => {
            let (a, b) = (i as isize, j as isize);
            if b - a == g {
                RingElement::basis(omega)
            } else if a - b == g {
                RingElement::term(omega, -Q::one())
            } else {
                RingElement::zero()
            }
        }
    }
}

pub fn make_curve_ring(g: u32, e: u32) -> RingSpec {
    let basis = curve_basis(g);
    let omega = basis.len() - 1;
    let mul = table(basis.len(), |i, j| curve_product(g as usize, omega, i, j));
    let mut diag = Tensor::default();
    diag.add_term(omega, omega, Q::one());
    RingSpec::new(
        format!("curve:g={g},e={e}"),
        basis,
        mul,
        diag,
        RingElement::term(omega, qi(e as i64)),
        RingElement::zero(),
        None,
        Kind::Open,
        0,
    )
    .expect("curve ring is valid")
}

pub fn make_parabolic_ring(g: u32, e: u32, r: usize, points: usize) -> Result<RingSpec> {
    if r == 0 || points == 0 {
        return Err(Error::Precondition("parabolic ring needs r ≥ 1 and at least one point".into()));
    }
    let mut basis = curve_basis(g);
    let omega = basis.len() - 1;
    let mut slots = Vec::new();
    for q in 0..points {
        let mut row = Vec::new();
        for i in 0..r - 1 {
            row.push(basis.len());
            let name = if points == 1 {
                format!("p{}", i + 1)
            } else {
                format!("p{}_{}", q + 1, i + 1)
            };
            basis.push(elem(&name, 2, false));
        }
        slots.push(row);
    }
    let n = basis.len();
    let mul = table(n, |i, j| {
        if i > omega || j > omega {
            match (i, j) {
                (0, _) => RingElement::basis(j),
                (_, 0) => RingElement::basis(i),
                _ => RingElement::zero(),
            }
        } else {
            curve_product(g as usize, omega, i, j)
        }
    });
    let mut diag = Tensor::default();
    diag.add_term(omega, omega, Q::one());
    let mut spec = RingSpec::new(
        format!("parabolic:g={g},e={e},r={r},pts={points}"),
        basis,
        mul,
        diag,
        RingElement::term(omega, qi(e as i64)),
        RingElement::zero(),
        None,
        Kind::Open,
        0,
    )?;
    spec.parabolic = Some(Parabolic {
        g,
        e,
        r,
        points,
        slots,
        omega,
    });
    Ok(spec)
}

/// A one-dimensional ring with vanishing diagonal; the interaction-free toy model.
pub fn make_diagonal_free_ring() -> RingSpec {
    RingSpec::new(
        "nodiag",
        vec![elem("1", 0, false)],
        vec![vec![RingElement::one()]],
        Tensor::default(),
        RingElement::zero(),
        RingElement::zero(),
        None,
        Kind::Open,
        0,
    )
    .expect("diagonal-free ring is valid")
}

fn parse_params(s: &str) -> Result<BTreeMap<String, u32>> {
    let mut out = BTreeMap::new();
    for kv in s.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::UnknownInstance(s.to_string()))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| Error::UnknownInstance(s.to_string()))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// Resolves a built-in instance name such as `p2`, `curve:g=1,e=1` or
/// `parabolic:g=0,e=1,r=2,pts=1`.
pub fn instance(name: &str) -> Result<RingSpec> {
    let unknown = || Error::UnknownInstance(name.to_string());
    if name == "p2" {
        return Ok(make_projective_plane_ring());
    }
    if name == "nodiag" {
        return Ok(make_diagonal_free_ring());
    }
    let (head, params) = name.split_once(':').ok_or_else(unknown)?;
    let p = parse_params(params).map_err(|_| unknown())?;
    let get = |k: &str| p.get(k).copied().ok_or_else(unknown);
    match head {
        "curve" => {
            if p.len() != 2 {
                return Err(unknown());
            }
            Ok(make_curve_ring(get("g")?, get("e")?))
        }
        "parabolic" => {
            if p.len() != 4 {
                return Err(unknown());
            }
            make_parabolic_ring(get("g")?, get("e")?, get("r")? as usize, get("pts")? as usize)
        }
        _ => Err(unknown()),
    }
}

#[derive(Serialize, Deserialize)]
struct JsonBasis {
    name: String,
    degree: u32,
    parity: String,
}

#[derive(Serialize, Deserialize)]
struct JsonRing {
    basis: Vec<JsonBasis>,
    mul: Vec<(usize, usize, Vec<(usize, String)>)>,
    diag: Vec<(usize, usize, String)>,
    c1: Vec<(usize, String)>,
    c2: Vec<(usize, String)>,
    aug: Option<Vec<(usize, String)>>,
    kind: Kind,
    #[serde(default)]
    rank: Option<i64>,
}

fn elem_to_json(x: &RingElement) -> Vec<(usize, String)> {
    x.terms().map(|(i, c)| (i, fmt_q(c))).collect()
}

fn elem_from_json(v: &[(usize, String)]) -> Result<RingElement> {
    let mut r = RingElement::zero();
    for (i, c) in v {
        r.add_term(*i, parse_q(c)?);
    }
    Ok(r)
}

impl RingSpec {
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let mut mul = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.mul[i][j].is_zero() {
                    mul.push((i, j, elem_to_json(&self.mul[i][j])));
                }
            }
        }
        let j = JsonRing {
            basis: self
                .basis
                .iter()
                .map(|b| JsonBasis {
                    name: b.name.clone(),
                    degree: b.degree,
                    parity: if b.odd { "odd" } else { "even" }.into(),
                })
                .collect(),
            mul,
            diag: self.diag.terms().map(|(i, j, c)| (i, j, fmt_q(c))).collect(),
            c1: elem_to_json(&self.c1),
            c2: elem_to_json(&self.c2),
            aug: self.aug.as_ref().map(elem_to_json),
            kind: self.kind,
            rank: Some(self.rank),
        };
        serde_json::to_string_pretty(&j).expect("ring serializes")
    }

    pub fn from_json(name: &str, s: &str) -> Result<Self> {
        let j: JsonRing = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let n = j.basis.len();
        let mut basis = Vec::with_capacity(n);
        for b in j.basis {
            let odd = match b.parity.as_str() {
                "odd" => true,
                "even" => false,
                p => return Err(Error::Parse(format!("bad parity {p:?}"))),
            };
            basis.push(elem(&b.name, b.degree, odd));
        }
        let mut mul = vec![vec![RingElement::zero(); n]; n];
        for (i, k, v) in &j.mul {
            if *i >= n || *k >= n {
                return Err(Error::Parse(format!("mul entry ({i},{k}) out of range")));
            }
            mul[*i][*k] = elem_from_json(v)?;
        }
        let mut diag = Tensor::default();
        for (a, b, c) in &j.diag {
            diag.add_term(*a, *b, parse_q(c)?);
        }
        let aug = j.aug.as_deref().map(elem_from_json).transpose()?;
        let rank = j.rank.unwrap_or(match j.kind {
            Kind::Compact => 1,
            Kind::Open => 0,
        });
        RingSpec::new(
            name,
            basis,
            mul,
            diag,
            elem_from_json(&j.c1)?,
            elem_from_json(&j.c2)?,
            aug,
            j.kind,
            rank,
        )
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn curve_products() {
        let h = make_curve_ring(1, 1);
        let g1 = RingElement::basis(1);
        let g2 = RingElement::basis(2);
        let w = RingElement::basis(3);
        assert_eq!(h.mul(&g1, &g2), w);
        assert_eq!(h.mul(&g2, &g1), w.neg());
        assert!(h.mul(&w, &w).is_zero());
        assert!(h.mul(&g1, &g1).is_zero());
    }

    #[test]
    fn diagonals() {
        let h = make_curve_ring(1, 1);
        let mut ww = Tensor::default();
        ww.add_term(3, 3, Q::one());
        assert_eq!(h.diagonal_mul(&RingElement::one()), ww);
        assert!(h.diagonal_mul(&RingElement::basis(3)).is_zero());
        assert!(h.diagonal_mul(&RingElement::basis(1)).is_zero());

        let p = make_projective_plane_ring();
        assert_eq!(p.diagonal_mul(&RingElement::one()), *p.diag());
        assert_eq!(p.s2(), RingElement::term(2, qi(6)));
        let sq = p.tensor_mul(p.diag(), p.diag());
        let mut expect = Tensor::default();
        expect.add_term(2, 2, qi(3));
        assert_eq!(sq, expect);
    }

    #[test]
    fn parabolic_relations() {
        let h = make_parabolic_ring(0, 1, 2, 1).unwrap();
        let p1 = h.parabolic_class(0, 0);
        let p2 = h.parabolic_class(0, 1);
        assert!(h.mul(&p1, &p1).is_zero());
        assert!(h.mul(&p2, &p2).is_zero());
        assert_eq!(p1.add(&p2), RingElement::basis(1));
        assert_eq!(h.asym(&p1).unwrap(), p1.sub(&p2).scale(&qf(1, 2)));
        assert_eq!(h.asym(&p1.sub(&p2)).unwrap(), p1.sub(&p2));
        assert!(h.asym(&RingElement::basis(1)).unwrap().is_zero());
        let g = make_parabolic_ring(1, 0, 2, 1).unwrap();
        assert!(g.mul(&g.parabolic_class(0, 0), &RingElement::basis(1)).is_zero());
        let triv = make_parabolic_ring(0, 1, 1, 1).unwrap();
        assert_eq!(triv.parabolic_class(0, 0), RingElement::basis(1));
    }

    #[test]
    fn open_rings_refuse_augmentation() {
        let h = make_curve_ring(0, 1);
        assert!(matches!(h.aug(&RingElement::one()), Err(Error::OpenAugmentation(_))));
        let p = make_projective_plane_ring();
        assert_eq!(p.aug(&RingElement::basis(2)).unwrap(), Q::one());
    }

    #[test]
    fn json_round_trip() {
        for name in ["p2", "curve:g=1,e=1", "curve:g=0,e=1"] {
            let h = instance(name).unwrap();
            let back = RingSpec::from_json(name, &h.to_json()).unwrap();
            assert_eq!(h, back);
        }
        assert!(instance("curve:g=1").is_err());
        assert!(instance("torus").is_err());
    }

    #[test]
    fn validation_rejects_broken_tables() {
        let p = make_projective_plane_ring();
        let mut j: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        j["c2"] = serde_json::json!([[2, "1"]]);
        assert!(RingSpec::from_json("bad", &j.to_string()).is_err());
    }

    #[test]
    fn element_text() {
        let p = make_projective_plane_ring();
        let x = p.parse_element("3*h + 1/2*d").unwrap();
        assert_eq!(p.fmt_element(&x), "3*h + 1/2*d");
    }
}
