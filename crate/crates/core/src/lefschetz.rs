//! Filtered linear algebra: the weight filtration of a nilpotent operator,
//! Lefschetz structures, the induced `sl_2` on the associated graded, and
//! strictness of maps.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{image_space, kernel_space, Matrix, MatrixJson, Subspace};
use crate::rational::{factorial, fmt_q, parse_q, qi, Q};
use crate::report::{Case, Report};

/// A finite increasing filtration `P_•` of `Q^dim`, with an optional operator.
///
/// `P_i = 0` for `i < lo`, `P_i = levels[i − lo]` up to `hi`, and `P_i = V` above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltSpace {
    pub dim: usize,
    pub lo: i64,
    pub levels: Vec<Subspace>,
    pub omega: Option<Matrix>,
}

impl FiltSpace {
    pub fn hi(&self) -> i64 {
        self.lo + self.levels.len() as i64 - 1
    }

    pub fn level(&self, i: i64) -> Subspace {
        if i < self.lo {
            Subspace::zero(self.dim)
        } else if i > self.hi() {
            Subspace::full(self.dim)
        } else {
            self.levels[(i - self.lo) as usize].clone()
        }
    }

    /// Degrees where `Gr_i` can be nonzero.
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi() + 1
    }

    pub fn gr_dim(&self, i: i64) -> usize {
        self.level(i).dim() - self.level(i - 1).dim()
    }

    pub fn gr_dims(&self) -> BTreeMap<i64, usize> {
        self.degrees()
            .map(|i| (i, self.gr_dim(i)))
            .filter(|(_, d)| *d > 0)
            .collect()
    }

    /// Lifts of a basis of `Gr_i`.
    pub fn gr_basis(&self, i: i64) -> Vec<Vec<Q>> {
        self.level(i).complement_in(&self.level(i - 1))
    }

    pub fn is_nested(&self) -> bool {
        self.degrees()
            .all(|i| self.level(i).contains_subspace(&self.level(i - 1)))
    }
}

/// `W_k = Σ_{i ≥ max(0,k)} ker N^{i+1} ∩ im N^{i−k}`.
pub fn weight_filtration(n: &Matrix) -> Result<FiltSpace> {
    if !n.is_nilpotent() {
        return Err(Error::Precondition("operator is not nilpotent".into()));
    }
    let d = n.rows as i64;
    let powers: Vec<Matrix> = (0..=2 * d + 1).map(|k| n.pow(k as u32)).collect();
    let kernels: Vec<Subspace> = powers.iter().map(kernel_space).collect();
    let images: Vec<Subspace> = powers.iter().map(image_space).collect();
    let mut levels = Vec::new();
    for k in -d..=d {
        let mut w = Subspace::zero(n.rows);
        for i in k.max(0)..=d {
            if i - k > 2 * d + 1 {
                break;
            }
            let piece = kernels[(i + 1) as usize].intersect(&images[(i - k) as usize]);
            w = w.sum(&piece);
        }
        levels.push(w);
    }
    Ok(FiltSpace {
        dim: n.rows,
        lo: -d,
        levels,
        omega: None,
    })
}

/// `A` induces an isomorphism `src_hi/src_lo → dst_hi/dst_lo`.
fn induces_iso(a: &Matrix, src_hi: &Subspace, src_lo: &Subspace, dst_hi: &Subspace, dst_lo: &Subspace) -> bool {
    let img_hi = src_hi.map(a);
    let img_lo = src_lo.map(a);
    dst_hi.contains_subspace(&img_hi)
        && dst_lo.contains_subspace(&img_lo)
        && src_hi.dim() - src_lo.dim() == dst_hi.dim() - dst_lo.dim()
        && img_hi.sum(dst_lo).dim() == dst_hi.dim()
}

/// `N·W_k ⊆ W_{k−2}` and `N^k: Gr_k ≅ Gr_{−k}`.
pub fn check_weight_properties(n: &Matrix, w: &FiltSpace, label: &str) -> Vec<Case> {
    let mut cases = Vec::new();
    let lowers = (w.lo - 1..=w.hi() + 2).all(|k| w.level(k - 2).contains_subspace(&w.level(k).map(n)));
    cases.push(Case::check(
        format!("{label} N W_k in W_(k-2)"),
        lowers,
        "N does not lower the filtration by 2",
    ));
    let top = w.lo.abs().max(w.hi().abs()) + 1;
    let mut bad = None;
    for k in 1..=top {
        let nk = n.pow(k as u32);
        if !induces_iso(&nk, &w.level(k), &w.level(k - 1), &w.level(-k), &w.level(-k - 1)) {
            bad = Some(k);
            break;
        }
    }
    cases.push(Case::check(
        format!("{label} N^k Gr_k = Gr_-k"),
        bad.is_none(),
        format!("N^{} fails to be an isomorphism", bad.unwrap_or(0)),
    ));
    cases
}

/// A Jordan basis of a nilpotent `N`: each vector with its `sl_2` weight,
/// strings `v, Nv, …, N^{j−1}v` carrying weights `j−1, j−3, …, 1−j`.
pub fn jordan_basis(n: &Matrix) -> Result<Vec<(Vec<Q>, i64)>> {
    if !n.is_nilpotent() {
        return Err(Error::Precondition("operator is not nilpotent".into()));
    }
    let d = n.rows;
    let kers: Vec<Subspace> = (0..=d + 1).map(|j| kernel_space(&n.pow(j as u32))).collect();
    let mut out = Vec::new();
    for j in (1..=d).rev() {
        let below = kers[j - 1].sum(&kers[j + 1].map(n));
        for top in kers[j].complement_in(&below.intersect(&kers[j])) {
            let mut v = top;
            for t in 0..j {
                out.push((v.clone(), j as i64 - 1 - 2 * t as i64));
                v = n.apply(&v);
            }
        }
    }
    Ok(out)
}

/// A Lefschetz structure with `ω = N`: the filtration opposite to the weight
/// filtration, `P_i = span{v : weight(v) ≥ −i}` in a Jordan basis.
pub fn lefschetz_of_nilpotent(n: &Matrix) -> Result<FiltSpace> {
    let basis = jordan_basis(n)?;
    let d = n.rows as i64;
    let levels = (-d..=d)
        .map(|i| {
            let vecs: Vec<Vec<Q>> = basis.iter().filter(|(_, w)| *w >= -i).map(|(v, _)| v.clone()).collect();
            Subspace::span(n.rows, &vecs)
        })
        .collect();
    Ok(FiltSpace {
        dim: n.rows,
        lo: -d,
        levels,
        omega: Some(n.clone()),
    })
}

/// The weight filtration paired with `N` itself as `ω`.
pub fn weight_filtration_with_operator(n: &Matrix) -> Result<FiltSpace> {
    let mut w = weight_filtration(n)?;
    w.omega = Some(n.clone());
    Ok(w)
}

/// `ω P_i ⊆ P_{i+2}` and `ω^k: Gr_{−k} → Gr_k` is an isomorphism for `k ≥ 0`.
pub fn lefschetz_verify(l: &FiltSpace) -> Report {
    let mut cases = Vec::new();
    let Some(omega) = &l.omega else {
        cases.push(Case::new("operator", crate::report::Status::Fail, "no operator given"));
        return Report::new("lefschetz", "space", cases);
    };
    cases.push(Case::check("nested", l.is_nested(), "filtration is not increasing"));
    let raises = (l.lo - 2..=l.hi() + 1).all(|i| l.level(i + 2).contains_subspace(&l.level(i).map(omega)));
    cases.push(Case::check("omega P_i in P_(i+2)", raises, "omega does not raise the filtration by 2"));
    let top = l.lo.abs().max(l.hi().abs()) + 1;
    let mut bad = None;
    for k in 0..=top {
        let wk = omega.pow(k as u32);
        if !induces_iso(&wk, &l.level(-k), &l.level(-k - 1), &l.level(k), &l.level(k - 1)) {
            bad = Some(k);
            break;
        }
    }
    cases.push(Case::check(
        "hard lefschetz",
        bad.is_none(),
        format!("omega^{} is not an isomorphism Gr_-k -> Gr_k", bad.unwrap_or(0)),
    ));
    Report::new("lefschetz", format!("dim={}", l.dim), cases)
}

/// `e`, `h`, `f` on `Gr V` in the basis of lifted complements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSl2 {
    pub degrees: Vec<i64>,
    pub e: Matrix,
    pub h: Matrix,
    pub f: Matrix,
}

impl GradedSl2 {
    pub fn bracket_cases(&self, label: &str) -> Vec<Case> {
        let two = qi(2);
        vec![
            Case::check(
                format!("{label} [h,e]=2e"),
                self.h.commutator(&self.e) == self.e.scale(&two),
                "[h,e] != 2e",
            ),
            Case::check(
                format!("{label} [h,f]=-2f"),
                self.h.commutator(&self.f) == self.f.scale(&-two),
                "[h,f] != -2f",
            ),
            Case::check(
                format!("{label} [e,f]=h"),
                self.e.commutator(&self.f) == self.h,
                "[e,f] != h",
            ),
        ]
    }

    pub fn is_triple(&self) -> bool {
        self.bracket_cases("").iter().all(|c| c.status == crate::report::Status::Ok)
    }
}

/// Basis of `Gr V` (lifts) with degrees, and the projection of a vector of
/// `P_i` onto `Gr_i` coordinates.
struct GrBasis {
    vectors: Vec<Vec<Q>>,
    degrees: Vec<i64>,
}

fn gr_basis(l: &FiltSpace) -> GrBasis {
    let mut vectors = Vec::new();
    let mut degrees = Vec::new();
    for i in l.degrees() {
        for v in l.gr_basis(i) {
            vectors.push(v);
            degrees.push(i);
        }
    }
    GrBasis { vectors, degrees }
}

/// Coordinates of the class of `v ∈ P_i` in `Gr_i`, in the given basis.
fn gr_coords(l: &FiltSpace, gb: &GrBasis, i: i64, v: &[Q]) -> Result<Vec<Q>> {
    let idx: Vec<usize> = (0..gb.vectors.len()).filter(|&j| gb.degrees[j] == i).collect();
    let mut cols: Vec<Vec<Q>> = idx.iter().map(|&j| gb.vectors[j].clone()).collect();
    let below = l.level(i - 1);
    cols.extend(below.basis.iter().cloned());
    if cols.is_empty() {
        return if v.iter().all(|x| x.is_zero()) {
            Ok(vec![Q::zero(); gb.vectors.len()])
        } else {
            Err(Error::Precondition(format!("vector is not in P_{i}")))
        };
    }
    let m = Matrix::from_columns(l.dim, &cols);
    let x = m
        .solve(v)
        .ok_or_else(|| Error::Precondition(format!("vector is not in P_{i}")))?;
    let mut out = vec![Q::zero(); gb.vectors.len()];
    for (t, &j) in idx.iter().enumerate() {
        out[j] = x[t].clone();
    }
    Ok(out)
}

/// Matrix on `Gr` induced by an operator of filtration degree `shift`.
fn induced_on_gr(l: &FiltSpace, gb: &GrBasis, a: &Matrix, shift: i64) -> Result<Matrix> {
    let n = gb.vectors.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let image = a.apply(&gb.vectors[j]);
        cols.push(gr_coords(l, gb, gb.degrees[j] + shift, &image)?);
    }
    Ok(Matrix::from_columns(n, &cols))
}

/// `e = ω`, `h = grading`, and `f` from the primitive decomposition.
/// `scramble` recombines primitive vectors by a seeded random invertible matrix.
pub fn sl2_on_gr_with(l: &FiltSpace, scramble: Option<u64>) -> Result<GradedSl2> {
    let omega = l
        .omega
        .as_ref()
        .ok_or_else(|| Error::Precondition("no operator given".into()))?;
    let gb = gr_basis(l);
    let n = gb.vectors.len();
    let e = induced_on_gr(l, &gb, omega, 2)?;
    let mut h = Matrix::zero(n, n);
    for j in 0..n {
        h.set(j, j, qi(gb.degrees[j]));
    }
    let mut rng = scramble.map(ChaCha8Rng::seed_from_u64);
    let mut string_cols: Vec<Vec<Q>> = Vec::new();
    let mut f_entries: Vec<(usize, usize, Q)> = Vec::new();
    let max_k = gb.degrees.iter().map(|d| d.abs()).max().unwrap_or(0);
    for k in 0..=max_k {
        let idx: Vec<usize> = (0..n).filter(|&j| gb.degrees[j] == -k).collect();
        if idx.is_empty() {
            continue;
        }
        let ek1 = e.pow(k as u32 + 1);
        let restricted = Matrix::from_columns(n, &idx.iter().map(|&j| ek1.column(j)).collect::<Vec<_>>());
        let mut prims: Vec<Vec<Q>> = restricted
            .kernel()
            .into_iter()
            .map(|c| {
                let mut v = vec![Q::zero(); n];
                for (t, &j) in idx.iter().enumerate() {
                    v[j] = c[t].clone();
                }
                v
            })
            .collect();
        if let Some(rng) = rng.as_mut() {
            let p = prims.len();
            if p > 0 {
                let g = random_invertible(rng, p, 3);
                prims = (0..p)
                    .map(|r| {
                        let mut v = vec![Q::zero(); n];
                        for c in 0..p {
                            for t in 0..n {
                                v[t] += g.get(r, c) * &prims[c][t];
                            }
                        }
                        v
                    })
                    .collect();
            }
        }
        for p in prims {
            let base = string_cols.len();
            let mut v = p;
            for j in 0..=k {
                string_cols.push(v.clone());
                if j > 0 {
                    // f(e^j p) = j(k−j+1) e^{j−1} p
                    let ju = j as usize;
                    f_entries.push((base + ju - 1, base + ju, qi(j * (k - j + 1))));
                }
                v = e.apply(&v);
            }
        }
    }
    if string_cols.len() != n {
        return Err(Error::Precondition(
            "primitive decomposition does not span Gr; not a Lefschetz structure".into(),
        ));
    }
    let s = Matrix::from_columns(n, &string_cols);
    let s_inv = s
        .inverse()
        .map_err(|_| Error::Precondition("strings are linearly dependent; not a Lefschetz structure".into()))?;
    let mut fs = Matrix::zero(n, n);
    for (r, c, x) in f_entries {
        fs.set(r, c, x);
    }
    let f = s.mul(&fs).mul(&s_inv);
    Ok(GradedSl2 {
        degrees: gb.degrees,
        e,
        h,
        f,
    })
}

pub fn sl2_on_gr(l: &FiltSpace) -> Result<GradedSl2> {
    sl2_on_gr_with(l, None)
}

/// Induced map `Gr_i U → Gr_i V` for a filtered map.
fn gr_map(u: &FiltSpace, v: &FiltSpace, phi: &Matrix, i: i64) -> Result<Matrix> {
    let src = u.gr_basis(i);
    let gv = gr_basis(v);
    let idx: Vec<usize> = (0..gv.vectors.len()).filter(|&j| gv.degrees[j] == i).collect();
    let mut cols = Vec::new();
    for s in &src {
        let c = gr_coords(v, &gv, i, &phi.apply(s))?;
        cols.push(idx.iter().map(|&j| c[j].clone()).collect::<Vec<_>>());
    }
    if cols.is_empty() {
        return Ok(Matrix::zero(idx.len(), 0));
    }
    Ok(Matrix::from_columns(idx.len(), &cols))
}

/// Restriction of a Lefschetz structure to an `ω`-stable subspace, in a basis of it.
pub fn restrict(l: &FiltSpace, sub: &Subspace) -> Result<FiltSpace> {
    let omega = l.omega.as_ref().ok_or_else(|| Error::Precondition("no operator".into()))?;
    let k = sub.dim();
    let basis = Matrix::from_columns(l.dim, &sub.basis);
    let coords = |v: &[Q]| basis.solve(v);
    let mut om = Matrix::zero(k, k);
    for (j, b) in sub.basis.iter().enumerate() {
        let c = coords(&omega.apply(b)).ok_or_else(|| Error::Precondition("subspace is not omega-stable".into()))?;
        for i in 0..k {
            om.set(i, j, c[i].clone());
        }
    }
    let levels = (l.lo..=l.hi())
        .map(|i| {
            let part = l.level(i).intersect(sub);
            Subspace::span(k, &part.basis.iter().map(|v| coords(v).unwrap()).collect::<Vec<_>>())
        })
        .collect();
    Ok(FiltSpace { dim: k, lo: l.lo, levels, omega: Some(om) })
}

/// Quotient of a Lefschetz structure by an `ω`-stable subspace.
pub fn quotient(l: &FiltSpace, sub: &Subspace) -> Result<FiltSpace> {
    let omega = l.omega.as_ref().ok_or_else(|| Error::Precondition("no operator".into()))?;
    let comp = Subspace::full(l.dim).complement_in(sub);
    let q = comp.len();
    let mut cols = comp.clone();
    cols.extend(sub.basis.iter().cloned());
    let m = Matrix::from_columns(l.dim, &cols);
    let coords = |v: &[Q]| -> Vec<Q> { m.solve(v).expect("basis of V")[..q].to_vec() };
    let mut om = Matrix::zero(q, q);
    for (j, b) in comp.iter().enumerate() {
        let c = coords(&omega.apply(b));
        for i in 0..q {
            om.set(i, j, c[i].clone());
        }
    }
    let levels = (l.lo..=l.hi())
        .map(|i| Subspace::span(q, &l.level(i).basis.iter().map(|v| coords(v)).collect::<Vec<_>>()))
        .collect();
    Ok(FiltSpace { dim: q, lo: l.lo, levels, omega: Some(om) })
}

/// For a map of Lefschetz structures: `Gr ker φ ≅ ker Gr φ` and
/// `Gr coker φ ≅ coker Gr φ` degreewise, and both are Lefschetz structures.
pub fn strictness_check(u: &FiltSpace, v: &FiltSpace, phi: &Matrix, label: &str) -> Vec<Case> {
    let mut cases = Vec::new();
    let (Some(wu), Some(wv)) = (&u.omega, &v.omega) else {
        cases.push(Case::new(format!("{label} operators"), crate::report::Status::Fail, "missing operator"));
        return cases;
    };
    let lo = u.lo.min(v.lo);
    let hi = u.hi().max(v.hi()) + 1;
    let filtered = (lo..=hi).all(|i| v.level(i).contains_subspace(&u.level(i).map(phi)));
    let commutes = phi.mul(wu) == wv.mul(phi);
    cases.push(Case::check(
        format!("{label} map of Lefschetz structures"),
        filtered && commutes,
        "map is not filtered or does not commute with omega",
    ));
    if !(filtered && commutes) {
        return cases;
    }
    let ker = kernel_space(phi);
    let im = image_space(phi);
    let mut mismatch = Vec::new();
    for i in lo..=hi {
        let gk = u.level(i).intersect(&ker).dim() - u.level(i - 1).intersect(&ker).dim();
        let gc = v.level(i).sum(&im).dim() - v.level(i - 1).sum(&im).dim();
        let g = match gr_map(u, v, phi, i) {
            Ok(g) => g,
            Err(e) => {
                mismatch.push(format!("degree {i}: {e}"));
                continue;
            }
        };
        let r = if g.cols == 0 { 0 } else { g.rank() };
        let ker_gr = u.gr_dim(i) - r;
        let coker_gr = v.gr_dim(i) - r;
        if gk != ker_gr || gc != coker_gr {
            mismatch.push(format!(
                "degree {i}: Gr ker {gk} vs ker Gr {ker_gr}, Gr coker {gc} vs coker Gr {coker_gr}"
            ));
        }
    }
    cases.push(Case::check(
        format!("{label} Gr exactness"),
        mismatch.is_empty(),
        mismatch.join("; "),
    ));
    let sub_ok = restrict(u, &ker).map(|k| lefschetz_verify(&k).passed()).unwrap_or(false);
    let quo_ok = quotient(v, &im).map(|c| lefschetz_verify(&c).passed()).unwrap_or(false);
    cases.push(Case::check(
        format!("{label} kernel and cokernel are Lefschetz"),
        sub_ok && quo_ok,
        format!("kernel ok: {sub_ok}, cokernel ok: {quo_ok}"),
    ));
    cases
}

/// `P_i = ⊕_{λ ≤ i} E_λ(h)` for `h` diagonalizable with integer eigenvalues.
pub fn filtration_from_h(h: &Matrix) -> Result<FiltSpace> {
    let n = h.rows as i64;
    let bound = 2 * n + 2;
    let mut eigen: Vec<(i64, Subspace)> = Vec::new();
    let mut total = 0;
    for lam in -bound..=bound {
        let s = kernel_space(&h.sub(&Matrix::identity(h.rows).scale(&qi(lam))));
        if s.dim() > 0 {
            total += s.dim();
            eigen.push((lam, s));
        }
    }
    if total != h.rows {
        return Err(Error::Precondition(
            "h is not diagonalizable with small integer eigenvalues".into(),
        ));
    }
    let lo = eigen.first().map_or(0, |e| e.0);
    let hi = eigen.last().map_or(0, |e| e.0);
    let mut levels = Vec::new();
    let mut acc = Subspace::zero(h.rows);
    for i in lo..=hi {
        if let Some((_, s)) = eigen.iter().find(|(l, _)| *l == i) {
            acc = acc.sum(s);
        }
        levels.push(acc.clone());
    }
    Ok(FiltSpace { dim: h.rows, lo, levels, omega: None })
}

fn triple_ok(e: &Matrix, h: &Matrix, f: &Matrix) -> bool {
    GradedSl2 { degrees: vec![], e: e.clone(), h: h.clone(), f: f.clone() }.is_triple()
}

/// Two `sl_2`-triples sharing `e` whose `h`'s commute have equal `h`.
pub fn compare_h(e: &Matrix, h: &Matrix, f: &Matrix, h2: &Matrix, f2: &Matrix) -> Report {
    let mut cases = Vec::new();
    let pre = triple_ok(e, h, f) && triple_ok(e, h2, f2) && h.commutator(h2).is_zero();
    if !pre {
        cases.push(Case::new(
            "compare h preconditions",
            crate::report::Status::Skip,
            "inputs are not two sl2-triples with commuting h; no claim made",
        ));
    } else {
        cases.push(Case::check("compare h", h == h2, "h and h' differ"));
    }
    Report::new("compare-h", format!("dim={}", e.rows), cases)
}

pub fn exp_nilpotent(x: &Matrix, t: &Q) -> Matrix {
    let n = x.rows;
    let mut out = Matrix::identity(n);
    let mut p = Matrix::identity(n);
    for k in 1..=n as u32 {
        p = p.mul(x);
        if p.is_zero() {
            break;
        }
        let c = t.pow(k as i32) / factorial(k);
        out = out.add(&p.scale(&c));
    }
    out
}

/// Conjugating `(e, h, f)` by `exp(t x)` for `x` of negative `h`-degree keeps
/// the `h`-filtration.
pub fn exp_conjugation_filtration_check(x: &Matrix, e: &Matrix, h: &Matrix, f: &Matrix, t: &Q) -> Report {
    let mut cases = Vec::new();
    let base = filtration_from_h(h);
    let neg_degree = (1..=2 * x.rows as i64).find(|&d| h.commutator(x) == x.scale(&qi(-d)));
    if base.is_err() || neg_degree.is_none() || !x.is_nilpotent() {
        cases.push(Case::new(
            "exp conjugation preconditions",
            crate::report::Status::Skip,
            "x is not a nilpotent of negative h-degree, or h is not integral",
        ));
        return Report::new("exp-conjugation", format!("dim={}", x.rows), cases);
    }
    let g = exp_nilpotent(x, t);
    let gi = exp_nilpotent(x, &-t.clone());
    let conj = |a: &Matrix| g.mul(a).mul(&gi);
    let (e2, h2, f2) = (conj(e), conj(h), conj(f));
    cases.push(Case::check(
        format!("conjugated triple t={}", fmt_q(t)),
        triple_ok(&e2, &h2, &f2),
        "conjugated operators are not an sl2-triple",
    ));
    let same = filtration_from_h(&h2)
        .map(|p| {
            let b = base.as_ref().unwrap();
            let lo = p.lo.min(b.lo);
            let hi = p.hi().max(b.hi());
            (lo..=hi).all(|i| p.level(i) == b.level(i))
        })
        .unwrap_or(false);
    cases.push(Case::check(
        format!("filtration preserved t={}", fmt_q(t)),
        same,
        "h-filtration changed under conjugation",
    ));
    Report::new("exp-conjugation", format!("dim={}", x.rows), cases)
}

/// JSON form of a filtered space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiltSpaceJson {
    pub dim: usize,
    #[serde(default)]
    pub omega: Option<Vec<Vec<String>>>,
    pub levels: Vec<LevelJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelJson {
    pub k: i64,
    pub span: Vec<Vec<String>>,
}

fn vec_json(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

impl FiltSpace {
    pub fn to_json(&self) -> FiltSpaceJson {
        FiltSpaceJson {
            dim: self.dim,
            omega: self.omega.as_ref().map(|m| m.to_json().entries),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, s)| LevelJson {
                    k: self.lo + i as i64,
                    span: s.basis.iter().map(|v| vec_json(v)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FiltSpaceJson) -> Result<Self> {
        let omega = match &j.omega {
            Some(e) => Some(Matrix::from_json(&MatrixJson { dim: j.dim, entries: e.clone() })?),
            None => None,
        };
        if j.levels.is_empty() {
            return Ok(FiltSpace { dim: j.dim, lo: 0, levels: vec![Subspace::full(j.dim)], omega });
        }
        let mut levels: Vec<LevelJson> = j.levels.clone();
        levels.sort_by_key(|l| l.k);
        let lo = levels[0].k;
        let hi = levels.last().unwrap().k;
        let mut out = Vec::new();
        let mut prev = Subspace::zero(j.dim);
        for i in lo..=hi {
            if let Some(l) = levels.iter().find(|l| l.k == i) {
                let vecs = l
                    .span
                    .iter()
                    .map(|r| {
                        if r.len() != j.dim {
                            return Err(Error::Parse(format!("vector of length {} in dimension {}", r.len(), j.dim)));
                        }
                        r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                prev = Subspace::span(j.dim, &vecs);
            }
            out.push(prev.clone());
        }
        Ok(FiltSpace { dim: j.dim, lo, levels: out, omega })
    }
}

pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Matrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect())
            .collect();
        let m = Matrix::from_i64(&rows);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn jordan_matrix(blocks: &[usize]) -> Matrix {
    let n: usize = blocks.iter().sum();
    let mut m = Matrix::zero(n, n);
    let mut off = 0;
    for &b in blocks {
        for i in 1..b {
            m.set(off + i - 1, off + i, Q::one());
        }
        off += b;
    }
    m
}

pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut left = n;
    let mut parts = Vec::new();
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// A nilpotent matrix of random Jordan type, conjugated by a random integer matrix.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let j = jordan_matrix(&random_partition(rng, n));
    let p = random_invertible(rng, n, 2);
    p.mul(&j).mul(&p.inverse().expect("invertible"))
}

pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Subspaces of `F_2^d` (`d ≤ 6`) as membership masks over the `2^d` vectors.
struct F2 {
    d: usize,
    n: Vec<u8>,
}

impl F2 {
    fn span(&self, gens: impl IntoIterator<Item = u8>) -> u64 {
        let mut mask = 1u64;
        for g in gens {
            if mask >> g & 1 == 1 {
                continue;
            }
            let mut add = 0u64;
            for v in 0..(1u32 << self.d) as u8 {
                if mask >> v & 1 == 1 {
                    add |= 1 << (v ^ g);
                }
            }
            mask |= add;
        }
        mask
    }

    fn members(&self, s: u64) -> impl Iterator<Item = u8> + '_ {
        (0..(1u32 << self.d) as u8).filter(move |v| s >> v & 1 == 1)
    }

    fn apply_pow(&self, k: usize, s: u64) -> u64 {
        let img = self.members(s).map(|mut v| {
            for _ in 0..k {
                v = self.n[v as usize];
            }
            v
        });
        self.span(img.collect::<Vec<_>>())
    }

    fn dim(s: u64) -> u32 {
        s.count_ones().trailing_zeros()
    }

    fn all_invariant_subspaces(&self) -> Vec<u64> {
        let mut seen: HashSet<u64> = HashSet::new();
        let mut stack = vec![1u64];
        seen.insert(1);
        while let Some(s) = stack.pop() {
            for v in 0..(1u32 << self.d) as u8 {
                if s >> v & 1 == 0 {
                    let t = self.span(self.members(s).chain(std::iter::once(v)).collect::<Vec<_>>());
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        seen.into_iter()
            .filter(|&s| self.apply_pow(1, s) & !s == 0)
            .collect()
    }
}

/// Every filtration of `F_2^d` with `N W_k ⊆ W_{k−2}` and `N^k: Gr_k ≅ Gr_{−k}`,
/// for a Jordan matrix `N`, indexed from `−d`.
fn f2_solutions(blocks: &[usize]) -> (Vec<Vec<u64>>, F2) {
    let d: usize = blocks.iter().sum();
    let mut n = vec![0u8; 1 << d];
    // column convention: N e_{off+i} = e_{off+i−1}
    for v in 0..(1u32 << d) as u8 {
        let mut out = 0u8;
        let mut off = 0;
        for &b in blocks {
            for i in 1..b {
                if v >> (off + i) & 1 == 1 {
                    out ^= 1 << (off + i - 1);
                }
            }
            off += b;
        }
        n[v as usize] = out;
    }
    let f2 = F2 { d, n };
    let inv = f2.all_invariant_subspaces();
    let full = ((1u128 << (1u32 << d)) - 1) as u64;
    let di = d as i64;
    // w[k + d] for k in −d..=d−1
    let mut w = vec![0u64; 2 * d];
    w[0] = 1;
    w[2 * d - 1] = full;
    let mut sols = Vec::new();
    fn rec(f2: &F2, inv: &[u64], di: i64, j: i64, w: &mut Vec<u64>, sols: &mut Vec<Vec<u64>>) {
        let at = |k: i64| (k + di) as usize;
        if j == 0 {
            let ok = (-di + 2..di).all(|k| f2.apply_pow(1, w[at(k)]) & !w[at(k - 2)] == 0)
                && f2.apply_pow(1, w[at(-di + 1)]) == 1;
            if ok {
                sols.push(w.clone());
            }
            return;
        }
        // W_{−j} = N^j W_j + W_{−j−1}
        let low = f2.span(
            f2.members(f2.apply_pow(j as usize, w[at(j)]))
                .chain(f2.members(w[at(-j - 1)]))
                .collect::<Vec<_>>(),
        );
        if low & !w[at(j)] != 0 {
            return;
        }
        let gr = F2::dim(w[at(j)]) as i64 - F2::dim(low) as i64 + F2::dim(w[at(-j - 1)]) as i64;
        for &c in inv {
            if c & !w[at(j)] != 0 || low & !c != 0 || F2::dim(c) as i64 != gr {
                continue;
            }
            let saved = (w[at(-j)], w[at(j - 1)]);
            w[at(-j)] = low;
            w[at(j - 1)] = c;
            rec(f2, inv, di, j - 1, w, sols);
            w[at(-j)] = saved.0;
            w[at(j - 1)] = saved.1;
        }
    }
    if d == 1 {
        // only W_{−1} = 0, W_0 = V
        sols.push(w.clone());
    } else {
        rec(&f2, &inv, di, di - 1, &mut w, &mut sols);
    }
    (sols, f2)
}

/// Brute-force uniqueness over `F_2` for a Jordan type, compared with the
/// exact weight filtration over `Q`.
pub fn uniqueness_oracle(blocks: &[usize]) -> Case {
    let id = format!(
        "uniqueness jordan=({})",
        blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
    );
    let d: usize = blocks.iter().sum();
    let (sols, f2) = f2_solutions(blocks);
    if sols.len() != 1 {
        return Case::new(id, crate::report::Status::Fail, format!("{} filtrations satisfy the properties", sols.len()));
    }
    let n = jordan_matrix(blocks);
    let w = match weight_filtration(&n) {
        Ok(w) => w,
        Err(e) => return Case::new(id, crate::report::Status::Fail, e.to_string()),
    };
    for k in -(d as i64)..d as i64 {
        let s = w.level(k);
        // coordinate support of the rational subspace
        let coords: Vec<u8> = (0..d)
            .filter(|&i| {
                let mut e = vec![Q::zero(); d];
                e[i] = Q::one();
                s.contains(&e)
            })
            .map(|i| 1u8 << i)
            .collect();
        if coords.len() != s.dim() {
            return Case::new(id, crate::report::Status::Fail, format!("W_{k} is not a coordinate subspace"));
        }
        if f2.span(coords) != sols[0][(k + d as i64) as usize] {
            return Case::new(id, crate::report::Status::Fail, format!("W_{k} differs from the unique solution"));
        }
    }
    Case::ok(id)
}

/// A random map of Lefschetz structures between two string structures,
/// equal on `Gr` to a random matrix on multiplicity spaces.
pub fn random_lefschetz_map(rng: &mut ChaCha8Rng) -> (FiltSpace, FiltSpace, Matrix) {
    let tops_u: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=3)).collect();
    let tops_v: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=3)).collect();
    let lu = string_labels(&tops_u);
    let lv = string_labels(&tops_v);
    // graded equivariant map: string s of U to string t of V of equal length
    let mut phi0 = Matrix::zero(lv.len(), lu.len());
    for (s, &ks) in tops_u.iter().enumerate() {
        for (t, &kt) in tops_v.iter().enumerate() {
            if ks != kt || rng.gen_bool(0.3) {
                continue;
            }
            let c = qi(rng.gen_range(-2..=2));
            for j in 0..=ks {
                let col = lu.iter().position(|&x| x == (s, j)).unwrap();
                let row = lv.iter().position(|&x| x == (t, j)).unwrap();
                phi0.set(row, col, c.clone());
            }
        }
    }
    let (u, gu) = conjugated_strings(rng, &tops_u);
    let (v, gv) = conjugated_strings(rng, &tops_v);
    let phi = gv.mul(&phi0).mul(&gu.inverse().expect("unipotent"));
    (u, v, phi)
}

fn string_labels(tops: &[usize]) -> Vec<(usize, usize)> {
    tops.iter().enumerate().flat_map(|(s, &k)| (0..=k).map(move |j| (s, j))).collect()
}

/// Strings of the given top weights with `P` the weight grading and
/// `ω = g e g^{-1}` for a random filtered unipotent `g`.
fn conjugated_strings(rng: &mut ChaCha8Rng, tops: &[usize]) -> (FiltSpace, Matrix) {
    let mut weights = Vec::new();
    let mut ends = Vec::new();
    for &k in tops {
        for j in 0..=k {
            weights.push(-(k as i64) + 2 * j as i64);
            ends.push(j == k);
        }
    }
    let n = weights.len();
    let mut e = Matrix::zero(n, n);
    for c in 0..n {
        if !ends[c] {
            e.set(c + 1, c, Q::one());
        }
    }
    let mut g = Matrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            if weights[r] < weights[c] && rng.gen_bool(0.4) {
                g.set(r, c, qi(rng.gen_range(-2..=2)));
            }
        }
    }
    let omega = g.mul(&e).mul(&g.inverse().expect("unipotent"));
    let lo = weights.iter().copied().min().unwrap_or(0);
    let hi = weights.iter().copied().max().unwrap_or(0);
    let levels = (lo..=hi)
        .map(|i| {
            let vecs: Vec<Vec<Q>> = (0..n)
                .filter(|&c| weights[c] <= i)
                .map(|c| g.column(c))
                .collect();
            Subspace::span(n, &vecs)
        })
        .collect();
    (FiltSpace { dim: n, lo, levels, omega: Some(omega) }, g)
}

/// Weight-filtration properties on seeded random nilpotents, plus the
/// uniqueness oracle on every Jordan type of dimension `≤ max_unique`.
pub fn weight_filtration_suite(seed: u64, samples: usize, max_dim: usize, max_unique: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for s in 0..samples {
        let d = rng.gen_range(1..=max_dim);
        let n = random_nilpotent(&mut rng, d);
        match weight_filtration(&n) {
            Ok(w) => {
                let label = format!("random#{s} dim={d}");
                cases.extend(check_weight_properties(&n, &w, &label));
                let basis = jordan_basis(&n).expect("nilpotent");
                let graded = (-(d as i64)..=d as i64).all(|k| {
                    let vecs: Vec<Vec<Q>> = basis.iter().filter(|(_, wt)| *wt <= k).map(|(v, _)| v.clone()).collect();
                    Subspace::span(d, &vecs) == w.level(k)
                });
                cases.push(Case::check(
                    format!("{label} W_k = Jordan weights <= k"),
                    graded,
                    "weight filtration differs from the Jordan-basis grading",
                ));
            }
            Err(e) => cases.push(Case::new(format!("random#{s}"), crate::report::Status::Fail, e.to_string())),
        }
    }
    for d in 1..=max_unique {
        for p in partitions(d) {
            cases.push(uniqueness_oracle(&p));
        }
    }
    Report::new("weight-filtration", format!("seed={seed}"), cases)
}

/// Lefschetz verification and `sl_2` on `Gr` for the random nilpotents of the
/// weight-filtration suite, and strictness on random maps.
pub fn lefschetz_suite(seed: u64, samples: usize, max_dim: usize, maps: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for s in 0..samples {
        let d = rng.gen_range(1..=max_dim);
        let n = random_nilpotent(&mut rng, d);
        let label = format!("random#{s} dim={d}");
        let l = match lefschetz_of_nilpotent(&n) {
            Ok(l) => l,
            Err(e) => {
                cases.push(Case::new(label, crate::report::Status::Fail, e.to_string()));
                continue;
            }
        };
        let r = lefschetz_verify(&l);
        let w = weight_filtration(&n).expect("nilpotent");
        let mirrored = l.degrees().all(|i| l.gr_dim(i) == w.gr_dim(-i));
        cases.push(Case::check(
            format!("{label} Gr_i P = Gr_-i W"),
            mirrored,
            "graded dimensions are not mirrored",
        ));
        cases.push(Case::check(
            format!("{label} lefschetz"),
            r.passed(),
            r.failures().iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; "),
        ));
        match (sl2_on_gr(&l), sl2_on_gr_with(&l, Some(seed ^ s as u64))) {
            (Ok(t), Ok(t2)) => {
                cases.extend(t.bracket_cases(&format!("{label} sl2")));
                cases.push(Case::check(
                    format!("{label} f independent of primitive basis"),
                    t.f == t2.f,
                    "f depends on the choice of primitives",
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                cases.push(Case::new(format!("{label} sl2"), crate::report::Status::Fail, e.to_string()))
            }
        }
    }
    for s in 0..maps {
        let (u, v, phi) = random_lefschetz_map(&mut rng);
        cases.extend(strictness_check(&u, &v, &phi, &format!("map#{s} {}->{}", u.dim, v.dim)));
    }
    Report::new("lefschetz", format!("seed={seed}"), cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(w: &FiltSpace) -> Vec<(i64, usize)> {
        w.gr_dims().into_iter().collect()
    }

    #[test]
    fn jordan_blocks() {
        let w = weight_filtration(&Matrix::zero(3, 3)).unwrap();
        assert_eq!(dims(&w), vec![(0, 3)]);
        assert_eq!(w.level(-1).dim(), 0);
        let w = weight_filtration(&jordan_matrix(&[2])).unwrap();
        assert_eq!(dims(&w), vec![(-1, 1), (1, 1)]);
        assert_eq!(w.level(0), kernel_space(&jordan_matrix(&[2])));
        let w = weight_filtration(&jordan_matrix(&[3])).unwrap();
        assert_eq!(dims(&w), vec![(-2, 1), (0, 1), (2, 1)]);
        assert!(weight_filtration(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn lefschetz_examples() {
        let l = lefschetz_of_nilpotent(&jordan_matrix(&[3, 1])).unwrap();
        let r = lefschetz_verify(&l);
        assert!(r.passed(), "{}", r.to_text());
        let t = sl2_on_gr(&l).unwrap();
        assert!(t.is_triple());
        // the singlet in degree 0 is killed by f
        assert_eq!(t.degrees.iter().filter(|&&d| d == 0).count(), 2);
        let zero = FiltSpace {
            dim: 2,
            lo: 0,
            levels: vec![Subspace::full(2)],
            omega: Some(Matrix::zero(2, 2)),
        };
        assert!(lefschetz_verify(&zero).passed());
        let mut shifted = l.clone();
        shifted.lo += 1;
        assert!(!lefschetz_verify(&shifted).passed());
    }

    #[test]
    fn weight_filtration_lowers_instead_of_raising() {
        let zero = weight_filtration_with_operator(&Matrix::zero(2, 2)).unwrap();
        assert!(lefschetz_verify(&zero).passed());
        let w = weight_filtration_with_operator(&jordan_matrix(&[2])).unwrap();
        let r = lefschetz_verify(&w);
        assert_eq!(r.failures().len(), 1);
        assert_eq!(r.failures()[0].id, "hard lefschetz");
    }

    #[test]
    fn block_of_size_two_is_irreducible() {
        let l = lefschetz_of_nilpotent(&jordan_matrix(&[2])).unwrap();
        let t = sl2_on_gr(&l).unwrap();
        assert_eq!(t.degrees, vec![-1, 1]);
        assert_eq!(t.e, Matrix::from_i64(&[vec![0, 0], vec![1, 0]]));
        assert_eq!(t.f, Matrix::from_i64(&[vec![0, 1], vec![0, 0]]));
    }

    #[test]
    fn uniqueness_small() {
        for d in 1..=4 {
            for p in partitions(d) {
                let c = uniqueness_oracle(&p);
                assert_eq!(c.status, crate::report::Status::Ok, "{}: {}", c.id, c.detail);
            }
        }
    }

    #[test]
    fn strictness_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in 0..10 {
            let (u, v, phi) = random_lefschetz_map(&mut rng);
            for c in strictness_check(&u, &v, &phi, &format!("#{s}")) {
                assert_eq!(c.status, crate::report::Status::Ok, "{}: {}", c.id, c.detail);
            }
        }
    }

    #[test]
    fn isomorphism_has_trivial_kernel_and_cokernel() {
        let l = lefschetz_of_nilpotent(&jordan_matrix(&[2, 1])).unwrap();
        let cases = strictness_check(&l, &l, &Matrix::identity(3), "id");
        assert!(cases.iter().all(|c| c.status == crate::report::Status::Ok));
    }

    #[test]
    fn h_filtrations() {
        let l = lefschetz_of_nilpotent(&jordan_matrix(&[3])).unwrap();
        let t = sl2_on_gr(&l).unwrap();
        let p = filtration_from_h(&t.h).unwrap();
        assert_eq!(p.gr_dims().into_iter().collect::<Vec<_>>(), vec![(-2, 1), (0, 1), (2, 1)]);
        assert!(compare_h(&t.e, &t.h, &t.f, &t.h, &t.f).passed());
        let bad = compare_h(&t.e, &t.h, &t.f, &t.e, &t.f);
        assert_eq!(bad.summary.skip, 1);
        let r = exp_conjugation_filtration_check(&t.f, &t.e, &t.h, &t.f, &Q::new(1.into(), 3.into()));
        assert!(r.passed() && r.summary.skip == 0, "{}", r.to_text());
    }

    #[test]
    fn json_round_trip() {
        let l = lefschetz_of_nilpotent(&jordan_matrix(&[2, 2])).unwrap();
        let j = serde_json::to_string(&l.to_json()).unwrap();
        let back = FiltSpace::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, l);
    }
}
