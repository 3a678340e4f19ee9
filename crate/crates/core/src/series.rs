//! Generating series: `Ω(x, y)`, the closed product formula for Hecke
//! operators, and the cubic kernel `K'`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::FockElement;
use crate::hecke::Engine;
use crate::rational::{qi, Q};
use crate::report::{Case, Report};
use crate::ring::{permutations, Kind, RingElement, RingSpec};
use crate::tpoly::{eval_chern, TPoly};

/// Polynomial in `c1, c2`, keyed by `(i, j)` for `c1^i c2^j`.
pub type ChernPoly = BTreeMap<(u32, u32), Q>;

fn chern_add(acc: &mut ChernPoly, p: &ChernPoly, c: &Q) {
    for (k, x) in p {
        let e = acc.entry(*k).or_insert_with(Q::zero);
        *e += x * c;
    }
    acc.retain(|_, x| !x.is_zero());
}

fn chern_mul(a: &ChernPoly, b: &ChernPoly) -> ChernPoly {
    let mut out = ChernPoly::new();
    for ((i, j), x) in a {
        for ((k, l), y) in b {
            *out.entry((i + k, j + l)).or_insert_with(Q::zero) += x * y;
        }
    }
    out.retain(|_, x| !x.is_zero());
    out
}

/// `ω_{κ,l}`: coefficient of `x^{κ+2} y^{−l}` in `Ω(x, y)`, i.e. of `u^l` in
/// `Σ_{a+b=κ} (u − t1)^a (u − t2)^b`.
pub fn omega_coeff(kappa: u32, l: u32) -> ChernPoly {
    if l > kappa {
        return ChernPoly::new();
    }
    let mut p = TPoly::default();
    for a in 0..=kappa {
        let term = TPoly::linear_power(1, -1, 0, a).mul(&TPoly::linear_power(1, 0, -1, kappa - a));
        p = p.add(&term, &Q::one());
    }
    p.u_coeff_in_chern(l)
}

/// `Ω(x, y)` up to `x^order`, keyed by `(exponent of x, exponent of y)`.
pub fn omega_series(ring: &RingSpec, order: u32) -> BTreeMap<(i64, i64), RingElement> {
    let mut out = BTreeMap::new();
    for kappa in 0..=order.saturating_sub(2) {
        for l in 0..=kappa {
            let c = eval_chern(ring, &omega_coeff(kappa, l));
            if !c.is_zero() {
                out.insert((kappa as i64 + 2, -(l as i64)), c);
            }
        }
    }
    out
}

/// How `h_0` legs are handled by the product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegMode {
    /// Evaluate `h_0 = ε` directly; compact instances only.
    Literal,
    /// Absorb `h_0` legs into a diagonal neighbour, never evaluating `ε`
    /// on anything but an isolated leg.
    Contract,
}

struct Term {
    coeff: Q,
    contents: Vec<RingElement>,
    edges: Vec<(usize, usize)>,
}

/// Enumerates edge choices `(κ_e, l_e)` for the product formula.
fn enumerate_edges(
    k: usize,
    a: &[i64],
    pairs: &[(usize, usize)],
    idx: usize,
    chosen: &mut Vec<(usize, usize, u32, u32)>,
    out: &mut Vec<(Vec<(usize, usize, u32, u32)>, Vec<i64>)>,
) {
    let bound: i64 = a.iter().sum::<i64>().max(0);
    if idx == pairs.len() {
        let mut n = a.to_vec();
        for &(i, j, kappa, l) in chosen.iter() {
            n[i] -= kappa as i64 + 2;
            n[j] += l as i64;
        }
        if n.iter().all(|&x| x >= 0) {
            out.push((chosen.clone(), n));
        }
        return;
    }
    enumerate_edges(k, a, pairs, idx + 1, chosen, out);
    let (i, j) = pairs[idx];
    for kappa in 0..=bound as u32 {
        for l in 0..=kappa {
            chosen.push((i, j, kappa, l));
            enumerate_edges(k, a, pairs, idx + 1, chosen, out);
            chosen.pop();
        }
    }
}

fn parity(ring: &RingSpec, x: &RingElement) -> bool {
    ring.parity_of(x)
}

/// Slot order is leg `k−1` leftmost, leg `0` rightmost.
fn position(k: usize, leg: usize) -> usize {
    k - 1 - leg
}

/// Applies `ε` to zero legs through their diagonal edges, returning the
/// reduced term (legs removed are marked by `None` in the output contents).
fn contract(ring: &RingSpec, term: Term, n: &[i64]) -> Result<Option<(Q, Vec<Option<RingElement>>, Vec<(usize, usize)>)>> {
    let k = term.contents.len();
    let mut contents: Vec<Option<RingElement>> = term.contents.into_iter().map(Some).collect();
    let mut edges = term.edges;
    let mut coeff = term.coeff;
    loop {
        let zero = (0..k).find(|&i| contents[i].is_some() && n[i] == 0);
        let Some(i) = zero else { break };
        let nbrs: Vec<usize> = edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        let xi = contents[i].clone().unwrap();
        if xi.is_zero() {
            return Ok(None);
        }
        if nbrs.is_empty() {
            let e = ring.aug(&xi)?;
            coeff *= e;
            contents[i] = None;
            continue;
        }
        let j = nbrs[0];
        // Δ_{ij} Δ_{ik} = Δ_{ij} Δ_{jk}
        edges.retain(|&(a, b)| a != i && b != i);
        for &other in &nbrs[1..] {
            let e = (j.min(other), j.max(other));
            if let Some(pos) = edges.iter().position(|&x| x == e) {
                edges.remove(pos);
                let cj = contents[j].clone().unwrap();
                contents[j] = Some(ring.mul(ring.c2(), &cj));
                edges.push(e);
            } else {
                edges.push(e);
            }
        }
        // move the content of leg i next to leg j, then merge
        let (pi, pj) = (position(k, i), position(k, j));
        let odd_i = parity(ring, &xi);
        let mut crossing = false;
        let (lo, hi) = if pi < pj { (pi + 1, pj) } else { (pj + 1, pi) };
        for p in lo..hi {
            let leg = k - 1 - p;
            if let Some(c) = &contents[leg] {
                crossing ^= odd_i && parity(ring, c);
            }
        }
        if crossing {
            coeff = -coeff;
        }
        let cj = contents[j].clone().unwrap();
        let merged = if pi < pj { ring.mul(&xi, &cj) } else { ring.mul(&cj, &xi) };
        contents[j] = Some(merged);
        contents[i] = None;
    }
    edges.sort();
    Ok(Some((coeff, contents, edges)))
}

/// Pure tensors over the remaining legs in slot order, keyed by basis indices.
fn expand(ring: &RingSpec, k: usize, contents: &[Option<RingElement>], edges: &[(usize, usize)]) -> BTreeMap<Vec<usize>, Q> {
    let live: Vec<usize> = (0..k).rev().filter(|&i| contents[i].is_some()).collect();
    let slot_of = |leg: usize| live.iter().position(|&l| l == leg).unwrap();
    let mut acc: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    acc.insert(vec![0; live.len()], Q::one());
    let mul_pure = |acc: &BTreeMap<Vec<usize>, Q>, y: &[(usize, usize)], c: &Q| {
        // y: list of (slot, basis) with unit elsewhere
        let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (x, cx) in acc {
            let mut sign = false;
            for &(s, yb) in y {
                for t in s + 1..x.len() {
                    sign ^= ring.is_odd(yb) && ring.is_odd(x[t]);
                }
            }
            let mut terms: Vec<(Vec<usize>, Q)> = vec![(x.clone(), if sign { -cx * c } else { cx * c })];
            for &(s, yb) in y {
                let mut next = Vec::new();
                for (v, cv) in terms {
                    for (z, cz) in ring.mul_basis(v[s], yb).terms() {
                        let mut w = v.clone();
                        w[s] = z;
                        next.push((w, &cv * cz));
                    }
                }
                terms = next;
            }
            for (v, cv) in terms {
                *out.entry(v).or_insert_with(Q::zero) += cv;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    // ξ_k ⊗ ⋯ ⊗ ξ_1 as written, no reordering
    for (s, &leg) in live.iter().enumerate() {
        let c = contents[leg].as_ref().unwrap();
        let mut next: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (v, cv) in &acc {
            for (b, cb) in c.terms() {
                let mut w = v.clone();
                w[s] = b;
                *next.entry(w).or_insert_with(Q::zero) += cv * cb;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    for &(a, b) in edges {
        let (sa, sb) = (slot_of(a), slot_of(b));
        let (left, right) = (sa.min(sb), sa.max(sb));
        let mut next: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (p, q, c) in ring.diag().terms() {
            for (v, cv) in mul_pure(&acc, &[(left, p), (right, q)], c) {
                *next.entry(v).or_insert_with(Q::zero) += cv;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

/// Coefficient of `x_k^{a_k} ⋯ x_1^{a_1}` in
/// `(φ(x_k)⊗⋯⊗φ(x_1))(Π_{i<j}(1 − Δ_{ij}Ω(x_i,x_j))(ξ_k⊗⋯⊗ξ_1))`,
/// where `xis[i]`, `a[i]` refer to leg `i` (the operator applied `i`-th).
pub fn hecke_product_oracle(engine: &Engine, xis: &[RingElement], a: &[i64], mode: LegMode) -> Result<FockElement> {
    let ring = &engine.ring;
    let k = xis.len();
    if a.len() != k {
        return Err(Error::Precondition("one exponent per factor".into()));
    }
    if mode == LegMode::Literal && ring.kind() == Kind::Open {
        return Err(Error::OpenAugmentation(ring.name.clone()));
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut choices = Vec::new();
    enumerate_edges(k, a, &pairs, 0, &mut Vec::new(), &mut choices);
    let mut out = FockElement::zero();
    for (edges, n) in choices {
        let mut contents: Vec<RingElement> = xis.to_vec();
        for &(i, _, kappa, l) in &edges {
            let w = eval_chern(ring, &omega_coeff(kappa, l));
            contents[i] = ring.mul(&w, &contents[i]);
        }
        if contents.iter().any(|c| c.is_zero()) {
            continue;
        }
        let sign = if edges.len() % 2 == 0 { Q::one() } else { -Q::one() };
        let term = Term {
            coeff: sign,
            contents,
            edges: edges.iter().map(|&(i, j, _, _)| (i, j)).collect(),
        };
        let (coeff, contents, edges) = match mode {
            LegMode::Literal => (term.coeff, term.contents.into_iter().map(Some).collect(), term.edges),
            LegMode::Contract => match contract(ring, term, &n)? {
                Some(t) => t,
                None => continue,
            },
        };
        let legs: Vec<usize> = (0..k).rev().filter(|&i| contents[i].is_some()).collect();
        for (v, c) in expand(ring, k, &contents, &edges) {
            let mut f = FockElement::scalar(&c * &coeff);
            for (slot, &leg) in legs.iter().enumerate() {
                let h = engine.h_eval(n[leg] as u32, &RingElement::basis(v[slot]))?;
                f = f.mul(&h, ring);
                if f.is_zero() {
                    break;
                }
            }
            out = out.add(&f);
        }
    }
    Ok(out)
}

/// Iterated application `T_{a_k}(ξ_k) ⋯ T_{a_1}(ξ_1)(1)` with free indices.
pub fn iterated_t(engine: &Engine, xis: &[RingElement], a: &[i64]) -> Result<FockElement> {
    let mut f = FockElement::one();
    for (xi, n) in xis.iter().zip(a) {
        f = engine.t_apply(*n, xi, &f)?;
    }
    Ok(f)
}

fn compositions(len: usize, total: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Compares the product formula with iterated `T` for lengths 2 and 3 and
/// geometric exponents of total order at most `order`.
pub fn oracle_suite(engine: &Engine, order: i64, exec: crate::par::Exec) -> Report {
    let ring = &engine.ring;
    let shift = 1 - ring.rank;
    let mut tasks = Vec::new();
    for len in 2..=3usize {
        for total in 0..=order {
            for geo in compositions(len, total) {
                let a: Vec<i64> = geo.iter().map(|g| g + shift).collect();
                let mut idx = vec![0usize; len];
                loop {
                    tasks.push((a.clone(), idx.clone()));
                    let mut p = 0;
                    while p < len {
                        idx[p] += 1;
                        if idx[p] < ring.dim() {
                            break;
                        }
                        idx[p] = 0;
                        p += 1;
                    }
                    if p == len {
                        break;
                    }
                }
            }
        }
    }
    let compact = ring.kind() == Kind::Compact;
    let cases = exec.map(&tasks, |(a, idx)| {
        let xis: Vec<RingElement> = idx.iter().map(|&b| RingElement::basis(b)).collect();
        let id = format!(
            "oracle len={} a=({}) xi=({}) order<={}",
            a.len(),
            a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            idx.iter().map(|&b| ring.basis_name(b).to_string()).collect::<Vec<_>>().join(","),
            order
        );
        let direct = match iterated_t(engine, &xis, a) {
            Ok(v) => v,
            Err(e) => return Case::new(id, crate::report::Status::Fail, e.to_string()),
        };
        let contracted = hecke_product_oracle(engine, &xis, a, LegMode::Contract);
        let literal = compact.then(|| hecke_product_oracle(engine, &xis, a, LegMode::Literal));
        match (contracted, literal) {
            (Err(e), _) | (_, Some(Err(e))) => Case::new(id, crate::report::Status::Fail, e.to_string()),
            (Ok(c), lit) => {
                if c != direct {
                    Case::new(
                        id,
                        crate::report::Status::Fail,
                        format!("product formula {} vs iterated {}", c.to_text(ring), direct.to_text(ring)),
                    )
                } else if let Some(Ok(l)) = lit {
                    Case::check(id, l == direct, format!("literal ε route gives {}", l.to_text(ring)))
                } else {
                    Case::ok(id)
                }
            }
        }
    });
    Report::new("oracle", ring.name.clone(), cases)
}

/// Components of the subalgebra of `H^{⊗3}` generated by the diagonals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagComp {
    One,
    D12,
    D13,
    D23,
    D123,
}

impl DiagComp {
    fn relabel(self, p: &[usize]) -> Self {
        let pair = |a: usize, b: usize| match (p[a].min(p[b]), p[a].max(p[b])) {
            (0, 1) => DiagComp::D12,
            (0, 2) => DiagComp::D13,
            _ => DiagComp::D23,
        };
        match self {
            DiagComp::One => DiagComp::One,
            DiagComp::D12 => pair(0, 1),
            DiagComp::D13 => pair(0, 2),
            DiagComp::D23 => pair(1, 2),
            DiagComp::D123 => DiagComp::D123,
        }
    }
}

/// A coefficient of a series in `x1, x2, x3` valued in the diagonal subalgebra.
pub type KernelCoeff = BTreeMap<DiagComp, ChernPoly>;

fn kc_add(acc: &mut KernelCoeff, comp: DiagComp, p: &ChernPoly, c: &Q) {
    let e = acc.entry(comp).or_default();
    chern_add(e, p, c);
    if e.is_empty() {
        acc.remove(&comp);
    }
}

/// Exact coefficient of `x^f` in `P = Π_{i<j}(1 − Δ_{ij}Ω(x_i,x_j))`, expanded
/// in the region `|x1| ≪ |x2| ≪ |x3|`; `delta_free` drops all diagonal terms.
pub fn kernel_product_coeff(f: [i64; 3], delta_free: bool) -> KernelCoeff {
    let mut out = KernelCoeff::new();
    let one = ChernPoly::from([((0, 0), Q::one())]);
    if f == [0, 0, 0] {
        kc_add(&mut out, DiagComp::One, &one, &Q::one());
    }
    if delta_free {
        return out;
    }
    let om = |kappa: i64, l: i64| -> ChernPoly {
        if kappa < 0 || l < 0 || l > kappa {
            ChernPoly::new()
        } else {
            omega_coeff(kappa as u32, l as u32)
        }
    };
    // single factors −Δ_{ij} Ω(x_i, x_j)
    for (comp, i, j, o) in [(DiagComp::D12, 0, 1, 2), (DiagComp::D13, 0, 2, 1), (DiagComp::D23, 1, 2, 0)] {
        if f[o] == 0 {
            kc_add(&mut out, comp, &om(f[i] - 2, -f[j]), &-Q::one());
        }
    }
    // Ω12 Ω13: x1^{κa+κb+4} x2^{−la} x3^{−lb}
    let mut pair = ChernPoly::new();
    for ka in 0..=(f[0] - 4).max(-1) {
        let kb = f[0] - 4 - ka;
        pair = {
            let mut p = pair;
            chern_add(&mut p, &chern_mul(&om(ka, -f[1]), &om(kb, -f[2])), &Q::one());
            p
        };
    }
    // Ω12 Ω23: x1^{κa+2} x2^{κb+2−la} x3^{−lb}
    let ka = f[0] - 2;
    for la in 0..=ka.max(-1) {
        let kb = f[1] - 2 + la;
        chern_add(&mut pair, &chern_mul(&om(ka, la), &om(kb, -f[2])), &Q::one());
    }
    // Ω13 Ω23: x1^{κa+2} x2^{κb+2} x3^{−la−lb}
    for la in 0..=(-f[2]).max(-1) {
        chern_add(&mut pair, &chern_mul(&om(f[0] - 2, la), &om(f[1] - 2, -f[2] - la)), &Q::one());
    }
    kc_add(&mut out, DiagComp::D123, &pair, &Q::one());
    // −Δ12Δ13Δ23 Ω12Ω13Ω23 = −c2 Δ123 Ω12Ω13Ω23
    let mut triple = ChernPoly::new();
    for k12 in 0..=(f[0] - 4).max(-1) {
        let k13 = f[0] - 4 - k12;
        for l12 in 0..=k12 {
            let k23 = f[1] - 2 + l12;
            if k23 < 0 {
                continue;
            }
            for l13 in 0..=k13 {
                let l23 = -f[2] - l13;
                let t = chern_mul(&chern_mul(&om(k12, l12), &om(k13, l13)), &om(k23, l23));
                chern_add(&mut triple, &t, &Q::one());
            }
        }
    }
    let c2 = ChernPoly::from([((0, 1), Q::one())]);
    kc_add(&mut out, DiagComp::D123, &chern_mul(&triple, &c2), &-Q::one());
    out
}

/// A formal combination `Σ c · x_k^{-1} · g` of a variable inverse and a permutation.
pub type SymOperator = BTreeMap<(usize, Vec<usize>), Q>;

fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

/// `Σ_π π ∘ x1^{-1} ∘ (1 − σ12)(1 + σ13)`.
pub fn kernel_operator_lhs() -> SymOperator {
    let e = vec![0, 1, 2];
    let s12 = vec![1, 0, 2];
    let s13 = vec![2, 1, 0];
    let taus = [
        (e.clone(), qi(1)),
        (s13.clone(), qi(1)),
        (s12.clone(), qi(-1)),
        (compose_perm(&s12, &s13), qi(-1)),
    ];
    let mut out = SymOperator::new();
    for (pi, _) in permutations(3) {
        for (tau, c) in &taus {
            *out.entry((pi[0], compose_perm(&pi, tau))).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `Σ_π π ∘ (x1^{-1} − 2 x2^{-1} + x3^{-1})`.
pub fn kernel_operator_rhs() -> SymOperator {
    let mut out = SymOperator::new();
    for (pi, _) in permutations(3) {
        for (k, c) in [(0, qi(1)), (1, qi(-2)), (2, qi(1))] {
            *out.entry((pi[k], pi.clone())).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Coefficient of `x^e` in `Σ c · x_k^{-1} · g(P)`, with `g` acting by
/// `x_i ↦ x_{g(i)}` and `Δ_{ij} ↦ Δ_{g(i)g(j)}`.
pub fn apply_sym_operator(op: &SymOperator, e: [i64; 3], delta_free: bool) -> KernelCoeff {
    let mut out = KernelCoeff::new();
    for ((k, g), c) in op {
        let mut shifted = e;
        shifted[*k] += 1;
        let f = [shifted[g[0]], shifted[g[1]], shifted[g[2]]];
        for (comp, p) in kernel_product_coeff(f, delta_free) {
            kc_add(&mut out, comp.relabel(g), &p, c);
        }
    }
    out
}

/// Checks `K' = 0` on every coefficient `x^e` with `|e_i| ≤ order`, both
/// generically in `c1, c2` and after evaluation in the ring.
pub fn cubic_kernel_check(ring: &RingSpec, order: i64) -> Report {
    let mut cases = Vec::new();
    let lhs = kernel_operator_lhs();
    let rhs = kernel_operator_rhs();
    cases.push(Case::check(
        "cubic operator identity",
        lhs == rhs,
        "symmetrized operators differ",
    ));
    let delta_free = ring.diag().is_zero();
    let range: Vec<i64> = (-order..=order).collect();
    let mut nonzero_generic = Vec::new();
    let mut nonzero_ring = Vec::new();
    let mut identity_mismatch = Vec::new();
    let mut checked = 0usize;
    let mut k_nonzero = 0usize;
    for &a in &range {
        for &b in &range {
            for &c in &range {
                let e = [a, b, c];
                checked += 1;
                let kp = apply_sym_operator(&lhs, e, delta_free);
                if kp != apply_sym_operator(&rhs, e, delta_free) {
                    identity_mismatch.push(e);
                }
                if !kp.is_empty() {
                    nonzero_generic.push(e);
                }
                for p in kp.values() {
                    if !eval_chern(ring, p).is_zero() {
                        nonzero_ring.push(e);
                        break;
                    }
                }
                if !kernel_product_coeff(e, delta_free).is_empty() {
                    k_nonzero += 1;
                }
            }
        }
    }
    let fmt = |v: &[[i64; 3]]| format!("first nonzero coefficient at x^{:?}", v[0]);
    cases.push(Case::check(
        format!("cubic kernel generic order<={order} coefficients={checked}"),
        nonzero_generic.is_empty(),
        if nonzero_generic.is_empty() { String::new() } else { fmt(&nonzero_generic) },
    ));
    cases.push(Case::check(
        format!("cubic kernel in ring order<={order}"),
        nonzero_ring.is_empty(),
        if nonzero_ring.is_empty() { String::new() } else { fmt(&nonzero_ring) },
    ));
    cases.push(Case::check(
        format!("cubic kernel two symmetrizations agree order<={order}"),
        identity_mismatch.is_empty(),
        if identity_mismatch.is_empty() { String::new() } else { fmt(&identity_mismatch) },
    ));
    cases.push(Case::check(
        format!("cubic kernel product has {k_nonzero} nonzero coefficients"),
        k_nonzero > 0,
        "unsymmetrized product vanished; check is vacuous",
    ));
    Report::new("cubic", ring.name.clone(), cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::ring::{make_curve_ring, make_diagonal_free_ring, make_projective_plane_ring};

    #[test]
    fn omega_low_orders() {
        let p = make_projective_plane_ring();
        let s = omega_series(&p, 3);
        assert_eq!(s[&(2, 0)], RingElement::one());
        assert_eq!(s[&(3, -1)], RingElement::term(0, qi(2)));
        assert_eq!(s[&(3, 0)], p.c1().neg());
        let flat = make_curve_ring(0, 0);
        for ((x, y), c) in omega_series(&flat, 8) {
            assert_eq!(y, -(x - 2));
            assert_eq!(c, RingElement::term(0, qi(x - 1)));
        }
    }

    #[test]
    fn product_formula_length_one() {
        let e = Engine::new(make_projective_plane_ring());
        for n in 0..4 {
            let xi = RingElement::basis(1);
            let got = hecke_product_oracle(&e, &[xi.clone()], &[n], LegMode::Literal).unwrap();
            assert_eq!(got, e.h_eval(n as u32, &xi).unwrap());
        }
    }

    #[test]
    fn contraction_matches_literal_on_p2() {
        let e = Engine::new(make_projective_plane_ring());
        for a in [[0, 0], [1, 0], [0, 2], [2, 1], [3, 0]] {
            for x in 0..3 {
                for y in 0..3 {
                    let xis = [RingElement::basis(x), RingElement::basis(y)];
                    let lit = hecke_product_oracle(&e, &xis, &a, LegMode::Literal).unwrap();
                    let con = hecke_product_oracle(&e, &xis, &a, LegMode::Contract).unwrap();
                    assert_eq!(lit, con);
                    assert_eq!(lit, iterated_t(&e, &xis, &a).unwrap());
                }
            }
        }
    }

    #[test]
    fn contraction_on_curve() {
        let e = Engine::new(make_curve_ring(0, 1));
        let one = RingElement::one();
        let xis = [one.clone(), one.clone()];
        let got = hecke_product_oracle(&e, &xis, &[1, 2], LegMode::Contract).unwrap();
        assert_eq!(got, iterated_t(&e, &xis, &[1, 2]).unwrap());
        assert!(hecke_product_oracle(&e, &xis, &[1, 2], LegMode::Literal).is_err());
    }

    #[test]
    fn symmetrization_identity() {
        assert_eq!(kernel_operator_lhs(), kernel_operator_rhs());
    }

    #[test]
    fn cubic_kernel_vanishes() {
        for ring in [make_projective_plane_ring(), make_curve_ring(1, 1), make_diagonal_free_ring()] {
            let r = cubic_kernel_check(&ring, 3);
            assert!(r.passed(), "{}", r.to_text());
        }
    }
}
