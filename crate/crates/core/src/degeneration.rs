//! Specialization of the Fock module to a single moduli component, truncated
//! slice matrices, the Weyl-pair reduction, the interpolated operators
//! `D̃_{m,n}(ξ)` and the resulting `sl_2`-triple.
//!
//! Elementary operators (`T`, multiplication) are evaluated exactly on
//! specialized elements; the specialization ideal is stable under them, up to
//! the component shift of `T`. Only matrix-level algebra is truncated, and every
//! block records whether its evaluation stayed inside the window.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use dashmap::DashMap;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockElement, Gen, Monomial};
use crate::hecke::Engine;
use crate::lefschetz::exp_nilpotent;
use crate::linalg::{kernel_space, Matrix, Subspace};
use crate::op::{Op, OpKind};
use crate::rational::{binomial, factorial, fmt_q, qi, Q};
use crate::report::{Case, Report, Status};
use crate::ring::RingElement;
use crate::walgebra::WAlgebra;

/// Scalar values for the degree-≤0 generators on component `d`.
#[derive(Clone, Debug)]
pub struct Specialization {
    pub r: Q,
    pub chi: Q,
    pub eta: RingElement,
    scalars: BTreeMap<Gen, Q>,
    /// The generator whose value moves with the component: `value = base + step·d`.
    moving: Option<(Gen, Q, Q)>,
    rewrites: BTreeMap<Gen, FockElement>,
}

impl Specialization {
    /// `p_1(ω) ↦ r` (split evenly over parabolic classes), `ψ_1(1) ↦ χ + d`,
    /// negative-degree and odd non-positive generators `↦ 0`. On parabolic
    /// rings `ψ_n(p_i) ↦ ψ_1(p_i)^n`.
    pub fn new(engine: &Engine, r: Q, chi: Q) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::Precondition("r must be nonzero".into()));
        }
        let ring = &engine.ring;
        let omega = (0..ring.dim())
            .find(|&b| ring.degree(b) == 2 && ring.basis_name(b) == "w")
            .ok_or_else(|| Error::Precondition("ring has no class w".into()))?;
        let eta = RingElement::basis(omega);
        let mut scalars = BTreeMap::new();
        let parabolic = ring.parabolic.clone();
        for b in 0..ring.dim() {
            if ring.degree(b) == 2 {
                let v = match &parabolic {
                    Some(p) if b != omega => r.clone() / qi(p.r as i64),
                    _ if b == omega => r.clone(),
                    _ => Q::zero(),
                };
                scalars.insert(Gen::new(1, b), v);
            }
        }
        let one = (0..ring.dim()).find(|&b| ring.degree(b) == 0);
        let mut spec = Self {
            r,
            chi,
            eta,
            scalars,
            moving: None,
            rewrites: BTreeMap::new(),
        };
        if let Some(one) = one {
            // ψ_1(1) = a·p_2(1) + (p_1 terms that specialize to c)
            let psi1 = engine.psi_class(1, &RingElement::one());
            let p2 = Gen::new(2, one);
            let mut a = Q::zero();
            let mut c = Q::zero();
            for (m, x) in psi1.terms() {
                if m.0 == vec![(p2, 1)] {
                    a += x;
                } else if m.0.len() == 1 && m.0[0].1 == 1 {
                    c += x * spec.scalars.get(&m.0[0].0).cloned().unwrap_or_default();
                }
            }
            if a.is_zero() {
                return Err(Error::Precondition("psi_1(1) does not involve p_2(1)".into()));
            }
            spec.moving = Some((p2, (spec.chi.clone() - c) / a.clone(), Q::one() / a));
        }
        if let Some(p) = parabolic {
            spec.rewrites = parabolic_rewrites(engine, &p, 8 + 2 * 8);
        }
        Ok(spec)
    }

    fn value(&self, g: &Gen, comp: i64) -> Option<Q> {
        if let Some((mg, base, step)) = &self.moving {
            if mg == g {
                return Some(base + step * qi(comp));
            }
        }
        self.scalars.get(g).cloned()
    }

    /// Generators surviving specialization: positive degree and not rewritten.
    pub fn is_free(&self, g: &Gen, engine: &Engine) -> bool {
        g.degree(&engine.ring) > 0 && !self.rewrites.contains_key(g)
    }

    pub fn specialize(&self, engine: &Engine, f: &FockElement, comp: i64) -> FockElement {
        let ring = &engine.ring;
        let mut out = FockElement::zero();
        for (m, c) in f.terms() {
            let mut acc = FockElement::scalar(c.clone());
            for g in m.factors() {
                let img = if g.degree(ring) <= 0 {
                    match self.value(&g, comp) {
                        Some(v) if !g.odd(ring) => FockElement::scalar(v),
                        _ => FockElement::zero(),
                    }
                } else if let Some(rw) = self.rewrites.get(&g) {
                    rw.clone()
                } else {
                    FockElement::from_monomial(Monomial::gen(g), Q::one())
                };
                acc = acc.mul(&img, ring);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        out
    }
}

/// `p_k(p_i) ↦ k (p_2(p_i)/2)^{k−1}` for `k ≥ 3`, with `p_R = ω − Σ_{i<R} p_i`.
fn parabolic_rewrites(engine: &Engine, p: &crate::ring::Parabolic, kmax: u32) -> BTreeMap<Gen, FockElement> {
    let ring = &engine.ring;
    let half = Q::new(1.into(), 2.into());
    let mut out = BTreeMap::new();
    for row in &p.slots {
        let y = |b: usize| FockElement::gen(2, b).scale(&half);
        let mut last = FockElement::gen(2, p.omega);
        for &b in row {
            last = last.sub(&FockElement::gen(2, b));
        }
        let y_last = last.scale(&half);
        for k in 3..=kmax {
            let mut omega_img = FockElement::zero();
            for &b in row {
                let img = y(b).pow(k - 1, ring).scale(&qi(k as i64));
                omega_img = omega_img.add(&img);
                out.insert(Gen::new(k, b), img);
            }
            omega_img = omega_img.add(&y_last.pow(k - 1, ring).scale(&qi(k as i64)));
            out.insert(Gen::new(k, p.omega), omega_img);
        }
    }
    out
}

/// Number of components an operator moves by: `+1` per `T`.
fn comp_shift_of(op: &Op, memo: &DashMap<usize, (i64, Op)>) -> i64 {
    if let Some(v) = memo.get(&op.ptr_id()) {
        return v.0;
    }
    let v = match op.kind() {
        OpKind::Zero | OpKind::Identity | OpKind::Mul(_) => 0,
        OpKind::Hecke { .. } => 1,
        OpKind::Lin(t) => t.first().map_or(0, |(_, o)| comp_shift_of(o, memo)),
        OpKind::Compose(a, b) | OpKind::Bracket(a, b) => comp_shift_of(a, memo) + comp_shift_of(b, memo),
    };
    memo.insert(op.ptr_id(), (v, op.clone()));
    v
}

/// The specialized module in cohomological degrees `0..=window`, with exact
/// lazy evaluation of operator trees.
pub struct SpecModule<'a> {
    pub engine: &'a Engine,
    pub spec: Specialization,
    pub window: i64,
    slices: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
    memo: DashMap<(usize, Monomial, i64), FockElement>,
    keep: DashMap<usize, Op>,
    shifts: DashMap<usize, (i64, Op)>,
}

impl<'a> SpecModule<'a> {
    pub fn new(engine: &'a Engine, spec: Specialization, window: i64) -> Self {
        let ring = &engine.ring;
        let mut gens = Vec::new();
        for n in 1..=(window as u32 + 4) / 2 + 1 {
            for b in 0..ring.dim() {
                let g = Gen::new(n, b);
                let d = g.degree(ring);
                if d >= 1 && d <= window && spec.is_free(&g, engine) {
                    gens.push(g);
                }
            }
        }
        gens.sort();
        let mut slices = vec![Vec::new(); window as usize + 1];
        fn rec(
            gens: &[Gen],
            i: usize,
            left: i64,
            cur: &mut Vec<(Gen, u32)>,
            ring: &crate::ring::RingSpec,
            window: i64,
            out: &mut Vec<Vec<Monomial>>,
        ) {
            if i == gens.len() {
                out[(window - left) as usize].push(Monomial(cur.clone()));
                return;
            }
            rec(gens, i + 1, left, cur, ring, window, out);
            let g = gens[i];
            let d = g.degree(ring);
            let max_e = if g.odd(ring) { 1 } else { left / d };
            for e in 1..=max_e {
                if e * d > left {
                    break;
                }
                cur.push((g, e as u32));
                rec(gens, i + 1, left - e * d, cur, ring, window, out);
                cur.pop();
            }
        }
        rec(&gens, 0, window, &mut Vec::new(), ring, window, &mut slices);
        for s in &mut slices {
            s.sort();
        }
        let index = slices
            .iter()
            .map(|s| s.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
            .collect();
        Self {
            engine,
            spec,
            window,
            slices,
            index,
            memo: DashMap::new(),
            keep: DashMap::new(),
            shifts: DashMap::new(),
        }
    }

    pub fn slice_dim(&self, k: i64) -> usize {
        if k < 0 || k > self.window {
            0
        } else {
            self.slices[k as usize].len()
        }
    }

    pub fn slice(&self, k: i64) -> &[Monomial] {
        &self.slices[k as usize]
    }

    pub fn comp_shift(&self, op: &Op) -> i64 {
        comp_shift_of(op, &self.shifts)
    }

    pub fn specialize(&self, f: &FockElement, comp: i64) -> FockElement {
        self.spec.specialize(self.engine, f, comp)
    }

    /// Exact action on a specialized element of component `comp`.
    pub fn eval(&self, op: &Op, f: &FockElement, comp: i64) -> Result<FockElement> {
        let mut out = FockElement::zero();
        for (m, c) in f.terms() {
            out.add_assign_scaled(&self.eval_monomial(op, m, comp)?, c);
        }
        Ok(out)
    }

    fn eval_monomial(&self, op: &Op, m: &Monomial, comp: i64) -> Result<FockElement> {
        let x = FockElement::from_monomial(m.clone(), Q::one());
        match op.kind() {
            OpKind::Zero => return Ok(FockElement::zero()),
            OpKind::Identity => return Ok(x),
            OpKind::Hecke { n, xi } => {
                let t = self.engine.t_apply(*n, xi, &x)?;
                return Ok(self.specialize(&t, comp + 1));
            }
            OpKind::Mul(g) => return Ok(self.specialize(&g.mul(&x, &self.engine.ring), comp)),
            _ => {}
        }
        let key = (op.ptr_id(), m.clone(), comp);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.keep.entry(op.ptr_id()).or_insert_with(|| op.clone());
        let v = match op.kind() {
            OpKind::Lin(terms) => {
                let mut out = FockElement::zero();
                for (c, o) in terms {
                    out.add_assign_scaled(&self.eval_monomial(o, m, comp)?, c);
                }
                out
            }
            OpKind::Compose(a, b) => {
                let mid = self.eval_monomial(b, m, comp)?;
                self.eval(a, &mid, comp + self.comp_shift(b))?
            }
            OpKind::Bracket(a, b) => {
                let ab = self.eval(a, &self.eval_monomial(b, m, comp)?, comp + self.comp_shift(b))?;
                let ba = self.eval(b, &self.eval_monomial(a, m, comp)?, comp + self.comp_shift(a))?;
                if a.odd() && b.odd() {
                    ab.add(&ba)
                } else {
                    ab.sub(&ba)
                }
            }
            _ => unreachable!(),
        };
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    pub fn to_vector(&self, f: &FockElement, k: i64) -> Result<Vec<Q>> {
        let mut v = vec![Q::zero(); self.slice_dim(k)];
        for (m, c) in f.terms() {
            if k < 0 || k > self.window {
                return Err(Error::Window(format!("degree {k} is outside the window")));
            }
            let i = self.index[k as usize]
                .get(m)
                .ok_or_else(|| Error::Window(format!("monomial outside slice {k}")))?;
            v[*i] = c.clone();
        }
        Ok(v)
    }

    pub fn from_vector(&self, v: &[Q], k: i64) -> FockElement {
        let mut f = FockElement::zero();
        for (i, c) in v.iter().enumerate() {
            f.add_term(self.slices[k as usize][i].clone(), c.clone());
        }
        f
    }

    /// Matrix of `op` from slice `k` of component `comp`; `None` when the target
    /// degree leaves the window.
    pub fn block(&self, op: &Op, comp: i64, k: i64) -> Result<Option<Matrix>> {
        let t = k + op.shift();
        let rows = self.slice_dim(t);
        if t > self.window {
            return Ok(None);
        }
        let cs = self.comp_shift(op);
        let _ = cs;
        let mut m = Matrix::zero(rows, self.slice_dim(k));
        if t < 0 || k < 0 {
            return Ok(Some(m));
        }
        for (j, mono) in self.slices[k as usize].iter().enumerate() {
            let img = self.eval_monomial(op, mono, comp)?;
            let v = self.to_vector(&img, t)?;
            for (i, x) in v.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(Some(m))
    }

    /// All blocks of `op` on the given components.
    pub fn slice_op(&self, op: &Op, comps: &[i64]) -> Result<SliceOp> {
        let mut out = SliceOp::new(op.shift(), self.comp_shift(op));
        for &d in comps {
            for k in 0..=self.window {
                if let Some(m) = self.block(op, d, k)? {
                    out.blocks.insert((d, k), m);
                }
            }
        }
        Ok(out)
    }
}

/// A graded operator as matrix blocks `(component, degree) → matrix`; a
/// missing block is a slice where the operator is not soundly known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceOp {
    pub shift: i64,
    pub comp_shift: i64,
    pub blocks: BTreeMap<(i64, i64), Matrix>,
}

impl SliceOp {
    pub fn new(shift: i64, comp_shift: i64) -> Self {
        Self {
            shift,
            comp_shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(module: &SpecModule, comps: &[i64]) -> Self {
        let mut out = Self::new(0, 0);
        for &d in comps {
            for k in 0..=module.window {
                out.blocks.insert((d, k), Matrix::identity(module.slice_dim(k)));
            }
        }
        out
    }

    pub fn sound_slices(&self, comp: i64) -> Vec<i64> {
        self.blocks.keys().filter(|(d, _)| *d == comp).map(|(_, k)| *k).collect()
    }

    fn block_at(&self, module: &SpecModule, d: i64, k: i64) -> Option<Matrix> {
        if k < 0 || k > module.window {
            let t = k + self.shift;
            return Some(Matrix::zero(module.slice_dim(t), 0));
        }
        if k + self.shift < 0 {
            return Some(Matrix::zero(0, module.slice_dim(k)));
        }
        self.blocks.get(&(d, k)).cloned()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SliceOp, module: &SpecModule) -> SliceOp {
        let mut out = SliceOp::new(self.shift + other.shift, self.comp_shift + other.comp_shift);
        for (&(d, k), b) in &other.blocks {
            if let Some(a) = self.block_at(module, d + other.comp_shift, k + other.shift) {
                out.blocks.insert((d, k), a.mul(b));
            }
        }
        out
    }

    pub fn lin(terms: &[(Q, &SliceOp)]) -> SliceOp {
        let first = terms[0].1;
        let mut keys: BTreeSet<(i64, i64)> = first.blocks.keys().copied().collect();
        for (_, t) in terms {
            keys = keys.into_iter().filter(|k| t.blocks.contains_key(k)).collect();
        }
        let mut out = SliceOp::new(first.shift, first.comp_shift);
        for k in keys {
            let mut acc: Option<Matrix> = None;
            for (c, t) in terms {
                let m = t.blocks[&k].scale(c);
                acc = Some(match acc {
                    None => m,
                    Some(a) => a.add(&m),
                });
            }
            out.blocks.insert(k, acc.unwrap());
        }
        out
    }

    pub fn add(&self, other: &SliceOp) -> SliceOp {
        Self::lin(&[(Q::one(), self), (Q::one(), other)])
    }

    pub fn sub(&self, other: &SliceOp) -> SliceOp {
        Self::lin(&[(Q::one(), self), (-Q::one(), other)])
    }

    pub fn scale(&self, c: &Q) -> SliceOp {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m = m.scale(c);
        }
        out
    }

    pub fn bracket(&self, other: &SliceOp, module: &SpecModule) -> SliceOp {
        self.compose(other, module).sub(&other.compose(self, module))
    }

    pub fn restrict_comp(&self, comp: i64) -> SliceOp {
        let mut out = SliceOp::new(self.shift, self.comp_shift);
        for (&(d, k), m) in &self.blocks {
            if d == comp {
                out.blocks.insert((d, k), m.clone());
            }
        }
        out
    }

    /// Blockwise inverse of a degree-0 operator; singular blocks are reported.
    pub fn inverse(&self) -> std::result::Result<SliceOp, Vec<(i64, i64)>> {
        let mut out = SliceOp::new(0, -self.comp_shift);
        let mut bad = Vec::new();
        for (&(d, k), m) in &self.blocks {
            match m.inverse() {
                Ok(inv) => {
                    out.blocks.insert((d + self.comp_shift, k), inv);
                }
                Err(_) => bad.push((d, k)),
            }
        }
        if bad.is_empty() {
            Ok(out)
        } else {
            Err(bad)
        }
    }

    /// `exp(c·self)` for a nilpotent degree-0, component-preserving operator.
    pub fn exp_nilpotent(&self, c: &Q) -> Result<SliceOp> {
        let mut out = SliceOp::new(0, 0);
        for (&key, m) in &self.blocks {
            if !m.is_nilpotent() {
                return Err(Error::Precondition(format!("not nilpotent on slice {}", key.1)));
            }
            out.blocks.insert(key, exp_nilpotent(m, c));
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|m| m.is_zero())
    }

    /// Slices (of component `comp`) where both are known and differ.
    pub fn differences(&self, other: &SliceOp, comp: i64) -> Vec<i64> {
        self.blocks
            .iter()
            .filter(|((d, k), m)| *d == comp && other.blocks.get(&(*d, *k)).is_some_and(|o| o != *m))
            .map(|((_, k), _)| *k)
            .collect()
    }

    /// Slices of component `comp` where both operators are known.
    pub fn common(&self, other: &SliceOp, comp: i64) -> Vec<i64> {
        self.blocks
            .keys()
            .filter(|(d, k)| *d == comp && other.blocks.contains_key(&(*d, *k)))
            .map(|(_, k)| *k)
            .collect()
    }
}

/// Signed Stirling numbers of the first kind `s(j,i)` for `j ≤ n`.
fn stirling1(n: usize) -> Vec<Vec<Q>> {
    let mut s = vec![vec![Q::zero(); n + 1]; n + 1];
    s[0][0] = Q::one();
    for j in 0..n {
        for i in 0..=j + 1 {
            let mut v = -qi(j as i64) * &s[j][i];
            if i > 0 {
                v += &s[j][i - 1];
            }
            s[j + 1][i] = v;
        }
    }
    s
}

/// Given `A_0, …, A_P`, the least-degree `C_i` with `A_m = Σ_i m^i/i! C_i`,
/// certified by one extra probe point; `None` if no degree `< P` fits.
pub fn interpolate(values: &[Matrix]) -> Option<Vec<Matrix>> {
    let p = values.len();
    if p < 2 {
        return None;
    }
    let mut diffs: Vec<Matrix> = vec![values[0].clone()];
    let mut row: Vec<Matrix> = values.to_vec();
    let mut degree = None;
    for j in 1..p {
        row = row.windows(2).map(|w| w[1].sub(&w[0])).collect();
        if row[0].is_zero() && row.iter().all(|m| m.is_zero()) {
            degree = Some(j - 1);
            break;
        }
        diffs.push(row[0].clone());
    }
    let degree = degree?;
    let s = stirling1(degree);
    let mut out = Vec::with_capacity(degree + 1);
    for i in 0..=degree {
        let mut c = Matrix::zero(values[0].rows, values[0].cols);
        for (j, d) in diffs.iter().enumerate().take(degree + 1) {
            if !s[j][i].is_zero() {
                c = c.add(&d.scale(&(s[j][i].clone() / factorial(j as u32))));
            }
        }
        out.push(c.scale(&factorial(i as u32)));
    }
    Some(out)
}

/// Blockwise interpolation of a sequence of slice operators.
pub fn interpolate_ops(values: &[SliceOp]) -> (Vec<SliceOp>, Vec<(i64, i64)>) {
    let mut keys: BTreeSet<(i64, i64)> = values[0].blocks.keys().copied().collect();
    for v in values {
        keys = keys.into_iter().filter(|k| v.blocks.contains_key(k)).collect();
    }
    let mut coeffs: Vec<SliceOp> = Vec::new();
    let mut residual = Vec::new();
    for key in keys {
        let seq: Vec<Matrix> = values.iter().map(|v| v.blocks[&key].clone()).collect();
        match interpolate(&seq) {
            Some(cs) => {
                for (i, c) in cs.into_iter().enumerate() {
                    while coeffs.len() <= i {
                        coeffs.push(SliceOp::new(values[0].shift, values[0].comp_shift));
                    }
                    coeffs[i].blocks.insert(key, c);
                }
            }
            None => residual.push(key),
        }
    }
    // higher coefficients vanish where a lower degree sufficed
    let all: BTreeSet<(i64, i64)> = coeffs.iter().flat_map(|c| c.blocks.keys().copied()).collect();
    for c in &mut coeffs {
        for key in &all {
            if !c.blocks.contains_key(key) {
                let m = &values[0].blocks[key];
                c.blocks.insert(*key, Matrix::zero(m.rows, m.cols));
            }
        }
    }
    (coeffs, residual)
}

/// Eigenspaces of a matrix with integer eigenvalues, or an error if it is not
/// diagonalizable over the integers.
pub fn integer_eigen(h: &Matrix) -> Result<Vec<(i64, Vec<Vec<Q>>)>> {
    let n = h.rows;
    let mut bound = Q::zero();
    for r in 0..n {
        let s: Q = h.row(r).iter().map(|x| x.abs()).sum();
        if s > bound {
            bound = s;
        }
    }
    let b = bound.floor().to_integer().try_into().unwrap_or(i64::MAX / 4).min(1 << 20);
    let mut out = Vec::new();
    let mut total = 0;
    for lam in -b..=b {
        let k = h.sub(&Matrix::identity(n).scale(&qi(lam))).kernel();
        if !k.is_empty() {
            total += k.len();
            out.push((lam, k));
        }
        if total == n {
            break;
        }
    }
    if total != n {
        return Err(Error::Precondition("h is not diagonalizable with integer eigenvalues".into()));
    }
    Ok(out)
}

/// Projectors onto the eigenspaces of a diagonalizable matrix.
fn projectors(h: &Matrix) -> Result<Vec<(i64, Matrix)>> {
    let eig = integer_eigen(h)?;
    let n = h.rows;
    let cols: Vec<Vec<Q>> = eig.iter().flat_map(|(_, v)| v.iter().cloned()).collect();
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = Matrix::from_columns(n, &cols);
    let bi = b.inverse()?;
    let mut out = Vec::new();
    let mut off = 0;
    for (lam, vs) in &eig {
        let mut d = Matrix::zero(n, n);
        for i in off..off + vs.len() {
            d.set(i, i, Q::one());
        }
        off += vs.len();
        out.push((*lam, b.mul(&d).mul(&bi)));
    }
    Ok(out)
}

/// One block of the correction `e = d + Σ_i f_i/(i+2)`, where
/// `[h,d] − 2d = Σ_i f_i` and `[h,f_i] = −i f_i`.
pub fn sl2_correct_block(h_src: &Matrix, h_tgt: &Matrix, d: &Matrix, shift: i64) -> Result<Matrix> {
    let c = h_tgt.mul(d).sub(&d.mul(h_src)).sub(&d.scale(&qi(shift)));
    let ps = projectors(h_src)?;
    let pt = projectors(h_tgt)?;
    let mut e = d.clone();
    for (lam, pl) in &ps {
        for (mu, pm) in &pt {
            let piece = pm.mul(&c).mul(pl);
            if piece.is_zero() {
                continue;
            }
            let i = lam - mu;
            if i < 0 {
                return Err(Error::Precondition(format!(
                    "component of [h,d] - 2d with ad_h eigenvalue {} > 0",
                    -i
                )));
            }
            e = e.add(&piece.scale(&(Q::one() / qi(i + shift))));
        }
    }
    Ok(e)
}

/// `sl2_correct` on slice operators: `[h,e] = 2e` on every slice where `h` and
/// `d` are known.
pub fn sl2_correct(h: &SliceOp, d: &SliceOp) -> Result<SliceOp> {
    let mut out = SliceOp::new(d.shift, d.comp_shift);
    for (&(c, k), db) in &d.blocks {
        let (Some(hs), Some(ht)) = (h.blocks.get(&(c, k)), h.blocks.get(&(c + d.comp_shift, k + d.shift))) else {
            continue;
        };
        out.blocks.insert((c, k), sl2_correct_block(hs, ht, db, 2)?);
    }
    Ok(out)
}

/// Degeneration parameters.
#[derive(Clone, Debug)]
pub struct DegenConfig {
    pub r: Q,
    pub chi: Q,
    pub window: i64,
    /// Largest probe point for interpolation in `m`.
    pub probes: usize,
}

impl Default for DegenConfig {
    fn default() -> Self {
        Self {
            r: Q::one(),
            chi: Q::zero(),
            window: 6,
            probes: 7,
        }
    }
}

/// Structured reasons for not evaluating on a slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Skip {
    Singular { comp: i64, degree: i64 },
    Residual { comp: i64, degree: i64 },
    NotNilpotent(String),
}

impl std::fmt::Display for Skip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Skip::Singular { comp, degree } => write!(f, "X singular on component {comp}, degree {degree}"),
            Skip::Residual { comp, degree } => {
                write!(f, "polynomiality not observed at this window (component {comp}, degree {degree})")
            }
            Skip::NotNilpotent(s) => write!(f, "theta {s}"),
        }
    }
}

/// The interpolation pipeline on component 0: `X`, `θ`, `u`, `D̃_{i,n}(ξ)`.
pub struct Degeneration<'a> {
    pub module: &'a SpecModule<'a>,
    pub walg: WAlgebra<'a>,
    pub cfg: DegenConfig,
    x: Op,
    x_blocks: HashMap<i64, SliceOp>,
    x_inv: HashMap<i64, SliceOp>,
    theta: HashMap<i64, SliceOp>,
    u_inv: Vec<SliceOp>,
    tilde: HashMap<(u32, RingElement), Vec<SliceOp>>,
    pub skips: Vec<Skip>,
}

impl<'a> Degeneration<'a> {
    pub fn new(module: &'a SpecModule<'a>, cfg: DegenConfig) -> Self {
        let engine = module.engine;
        let eta = module.spec.eta.clone();
        let x = Op::geom_t(&engine.ring, 0, &eta).scale(Q::one() / module.spec.r.clone());
        Self {
            module,
            walg: WAlgebra::new(engine),
            cfg,
            x,
            x_blocks: HashMap::new(),
            x_inv: HashMap::new(),
            theta: HashMap::new(),
            u_inv: Vec::new(),
            tilde: HashMap::new(),
            skips: Vec::new(),
        }
    }

    pub fn x_op(&self) -> &Op {
        &self.x
    }

    /// `y = ψ_1(η)/r`.
    pub fn y_op(&self) -> Op {
        Op::psi(self.module.engine, 1, &self.module.spec.eta).scale(Q::one() / self.module.spec.r.clone())
    }

    fn x_block(&mut self, d: i64) -> Result<SliceOp> {
        if let Some(x) = self.x_blocks.get(&d) {
            return Ok(x.clone());
        }
        let x = self.module.slice_op(&self.x, &[d])?;
        self.x_blocks.insert(d, x.clone());
        Ok(x)
    }

    /// `X^{-1}` from component `d+1` to `d`; singular slices become skips.
    fn x_inverse(&mut self, d: i64) -> Result<SliceOp> {
        if let Some(x) = self.x_inv.get(&d) {
            return Ok(x.clone());
        }
        let x = self.x_block(d)?;
        let inv = match x.inverse() {
            Ok(i) => i,
            Err(bad) => {
                let mut ok = x.clone();
                for (c, k) in bad {
                    ok.blocks.remove(&(c, k));
                    let s = Skip::Singular { comp: c, degree: k };
                    if !self.skips.contains(&s) {
                        self.skips.push(s);
                    }
                }
                ok.inverse().expect("remaining blocks are invertible")
            }
        };
        self.x_inv.insert(d, inv.clone());
        Ok(inv)
    }

    /// `X^{-k}` from component `d+k` to `d`.
    fn x_inv_pow(&mut self, d: i64, k: i64) -> Result<SliceOp> {
        let mut out = SliceOp::identity(self.module, &[d + k]);
        for j in (0..k).rev() {
            let inv = self.x_inverse(d + j)?;
            out = inv.compose(&out, self.module);
        }
        Ok(out)
    }

    fn note_residual(&mut self, keys: &[(i64, i64)]) {
        for &(c, k) in keys {
            let s = Skip::Residual { comp: c, degree: k };
            if !self.skips.contains(&s) {
                self.skips.push(s);
            }
        }
    }

    /// Linear coefficient in `k` of `X^{-k} q_k(η)` on component `d`.
    pub fn theta(&mut self, d: i64) -> Result<SliceOp> {
        if let Some(t) = self.theta.get(&d) {
            return Ok(t.clone());
        }
        let eta = self.module.spec.eta.clone();
        let mut values = Vec::new();
        for k in 0..=self.cfg.probes as u32 {
            let q = self.walg.q(k, &eta);
            let qb = self.module.slice_op(&q, &[d])?;
            let xi = self.x_inv_pow(d, k as i64)?;
            values.push(xi.compose(&qb, self.module));
        }
        let (coeffs, residual) = interpolate_ops(&values);
        self.note_residual(&residual);
        let t = coeffs.get(1).cloned().unwrap_or_else(|| {
            let mut z = SliceOp::new(0, 0);
            if let Some(c0) = coeffs.first() {
                for (key, m) in &c0.blocks {
                    z.blocks.insert(*key, Matrix::zero(m.rows, m.cols));
                }
            }
            z
        });
        self.theta.insert(d, t.clone());
        Ok(t)
    }

    /// `u^{-m}` from component `m` to `0`, with `u_d = X_d exp(θ_d/r)`.
    pub fn u_inv_pow(&mut self, m: usize) -> Result<SliceOp> {
        if self.u_inv.is_empty() {
            self.u_inv.push(SliceOp::identity(self.module, &[0]));
        }
        while self.u_inv.len() <= m {
            let d = self.u_inv.len() as i64 - 1;
            let theta = self.theta(d)?;
            let r = self.module.spec.r.clone();
            let e = match theta.exp_nilpotent(&(-Q::one() / r)) {
                Ok(e) => e,
                Err(err) => {
                    self.skips.push(Skip::NotNilpotent(err.to_string()));
                    return Err(err);
                }
            };
            let step = e.compose(&self.x_inverse(d)?, self.module);
            let prev = self.u_inv.last().unwrap().clone();
            self.u_inv.push(prev.compose(&step, self.module));
        }
        Ok(self.u_inv[m].clone())
    }

    /// `u^{-m} D_{m,n}(ξ)` on component 0 for `m = 0..=probes`.
    pub fn normalized_sequence(&mut self, n: u32, xi: &RingElement) -> Result<Vec<SliceOp>> {
        let mut values = Vec::new();
        for m in 0..=self.cfg.probes {
            let d = self.walg.d(m as u32, n, xi);
            let db = self.module.slice_op(&d, &[0])?;
            let ui = self.u_inv_pow(m)?;
            values.push(ui.compose(&db, self.module));
        }
        Ok(values)
    }

    /// `D̃_{i,n}(ξ)` for all `i` up to the observed degree.
    pub fn tilde(&mut self, n: u32, xi: &RingElement) -> Result<Vec<SliceOp>> {
        let key = (n, xi.clone());
        if let Some(t) = self.tilde.get(&key) {
            return Ok(t.clone());
        }
        let values = self.normalized_sequence(n, xi)?;
        let (coeffs, residual) = interpolate_ops(&values);
        self.note_residual(&residual);
        self.tilde.insert(key, coeffs.clone());
        Ok(coeffs)
    }

    /// `D̃_{m,n}(ξ)`; zero above the observed degree, on the slices where
    /// interpolation succeeded.
    pub fn tilde_d(&mut self, m: u32, n: u32, xi: &RingElement) -> Result<SliceOp> {
        let t = self.tilde(n, xi)?;
        if let Some(c) = t.get(m as usize) {
            return Ok(c.clone());
        }
        let shift = self.walg.d(m, n, xi).shift();
        let mut z = SliceOp::new(shift, 0);
        if let Some(c0) = t.first() {
            for (&(d, k), b) in &c0.blocks {
                z.blocks.insert((d, k), Matrix::zero(self.module.slice_dim(k + shift), b.cols));
            }
        }
        Ok(z)
    }

    pub fn y(&self) -> Result<SliceOp> {
        self.module.slice_op(&self.y_op(), &[0])
    }

    /// `∂_y = −D̃_{1,0}(1)`.
    pub fn dy(&mut self) -> Result<SliceOp> {
        Ok(self.tilde_d(1, 0, &RingElement::one())?.scale(&-Q::one()))
    }

    pub fn weyl(&mut self) -> Result<WeylPair> {
        Ok(WeylPair {
            y: self.y()?,
            dy: self.dy()?,
        })
    }
}

/// `y` (degree +2) and `∂_y` (degree −2) on component 0.
#[derive(Clone, Debug)]
pub struct WeylPair {
    pub y: SliceOp,
    pub dy: SliceOp,
}

impl WeylPair {
    /// `f_red = Σ_i y^i (−∂_y)^i f / i!` for `f` in slice `k`.
    pub fn vector_red(&self, module: &SpecModule, f: &[Q], k: i64) -> Result<Vec<Q>> {
        let mut out = vec![Q::zero(); f.len()];
        let mut cur = f.to_vec();
        let mut i = 0i64;
        loop {
            // y^i applied to cur (in slice k − 2i)
            let mut up = cur.clone();
            for j in (0..i).rev() {
                let b = self
                    .y
                    .blocks
                    .get(&(0, k - 2 * (j + 1)))
                    .ok_or_else(|| Error::Window(format!("y unknown on slice {}", k - 2 * (j + 1))))?;
                up = b.apply(&up);
            }
            let c = factorial(i as u32);
            for (o, x) in out.iter_mut().zip(up) {
                *o += x / &c;
            }
            let src = k - 2 * i;
            if src - 2 < 0 {
                break;
            }
            let b = self
                .dy
                .blocks
                .get(&(0, src))
                .ok_or_else(|| Error::Window(format!("dy unknown on slice {src}")))?;
            cur = b.apply(&cur).into_iter().map(|x| -x).collect();
            i += 1;
        }
        let _ = module;
        Ok(out)
    }

    /// `F_red = Σ_{i,j} y^i (Ad_y^j (−Ad_{∂_y})^i F) ∂_y^j / (i! j!)`.
    pub fn op_red(&self, module: &SpecModule, f: &SliceOp) -> SliceOp {
        let w = module.window;
        let mut acc: Option<SliceOp> = None;
        let mut ad_dy = f.clone();
        for i in 0..=(w / 2 + 1) as u32 {
            let mut ad = ad_dy.clone();
            for j in 0..=(w / 2 + 1) as u32 {
                let mut term = ad.clone();
                for _ in 0..j {
                    term = term.compose(&self.dy, module);
                }
                for _ in 0..i {
                    term = self.y.compose(&term, module);
                }
                let term = term.scale(&(Q::one() / (factorial(i) * factorial(j))));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
                ad = self.y.bracket(&ad, module);
            }
            ad_dy = self.dy.bracket(&ad_dy, module).scale(&-Q::one());
        }
        acc.unwrap()
    }
}

fn slices_text(v: &[i64]) -> String {
    v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

/// Cases asserting `a = b` on their common slices of component 0.
fn equal_case(id: impl Into<String>, a: &SliceOp, b: &SliceOp) -> Case {
    let common = a.common(b, 0);
    let diff = a.differences(b, 0);
    if common.is_empty() {
        return Case::new(id, Status::Skip, "no sound slice");
    }
    Case::check(
        id,
        diff.is_empty(),
        format!("differs on slices {} (sound: {})", slices_text(&diff), slices_text(&common)),
    )
}

fn skip_cases(deg: &Degeneration) -> Vec<Case> {
    deg.skips
        .iter()
        .map(|s| Case::new(format!("skip {s}"), Status::Skip, s.to_string()))
        .collect()
}

/// `specialize` examples, `X(1) = 1`, `[y, q_1(1)] = X`, the lazy/matrix
/// bracket consistency, `D̃_{0,n} = ψ_n`, `D̃_{1,0}(η) = 0`.
pub fn tilde_suite(deg: &mut Degeneration) -> Result<Report> {
    let module = deg.module;
    let engine = module.engine;
    let spec = &module.spec;
    let mut cases = Vec::new();
    let eta = spec.eta.clone();
    let one = RingElement::one();
    let p1_eta = FockElement::p(1, &eta);
    cases.push(Case::check(
        "specialize p1(w) = r",
        module.specialize(&p1_eta, 0) == FockElement::scalar(spec.r.clone()),
        "p1(w) does not specialize to r",
    ));
    cases.push(Case::check(
        "specialize p1(1) = 0",
        module.specialize(&FockElement::p(1, &one), 0).is_zero(),
        "p1(1) survives",
    ));
    let chi = engine.psi_class(1, &one);
    cases.push(Case::check(
        "specialize psi1(1) = chi + d",
        (0..3).all(|d| module.specialize(&chi, d) == FockElement::scalar(spec.chi.clone() + qi(d))),
        "psi1(1) is not chi + d",
    ));
    let x1 = module.eval(deg.x_op(), &FockElement::one(), 0)?;
    cases.push(Case::check("X(1) = 1", x1 == FockElement::one(), format!("X(1) = {}", x1.to_text(&engine.ring))));
    // [y, q_1(1)] = X, lazily and as matrices
    let y = deg.y_op();
    let q1 = deg.walg.q(1, &one);
    let lazy = module.slice_op(&Op::bracket(&y, &q1), &[0])?;
    let x = module.slice_op(deg.x_op(), &[0])?;
    cases.push(equal_case("[y, q1(1)] = X", &lazy, &x));
    let ym0 = module.slice_op(&y, &[0, 1])?;
    let qm = module.slice_op(&q1, &[0])?;
    let matrix = ym0.compose(&qm, module).sub(&qm.compose(&ym0, module));
    cases.push(equal_case("lazy vs matrix bracket [y, q1(1)]", &lazy, &matrix));
    let psi2 = Op::psi(engine, 2, &one);
    let lazy = module.slice_op(&Op::bracket(&psi2, &q1), &[0])?;
    let pm = module.slice_op(&psi2, &[0, 1])?;
    let matrix = pm.compose(&qm, module).sub(&qm.compose(&pm, module));
    cases.push(equal_case("lazy vs matrix bracket [psi2(1), q1(1)]", &lazy, &matrix));
    for n in 0..=2u32 {
        for xi in [one.clone(), eta.clone()] {
            let name = engine.ring.fmt_element(&xi);
            match deg.tilde_d(0, n, &xi) {
                Ok(t0) => {
                    let psi = module.slice_op(&Op::psi(engine, n, &xi), &[0])?;
                    cases.push(equal_case(format!("tildeD(0,{n})({name}) = psi{n}({name})"), &t0, &psi));
                }
                Err(e) => cases.push(Case::new(format!("tildeD(0,{n})({name})"), Status::Skip, e.to_string())),
            }
        }
    }
    match deg.tilde_d(1, 0, &eta) {
        Ok(t) => {
            let sound = t.sound_slices(0);
            cases.push(if sound.is_empty() {
                Case::new("tildeq1(w) = 0", Status::Skip, "no sound slice")
            } else {
                Case::check("tildeq1(w) = 0", t.is_zero(), "linear term does not vanish")
            });
        }
        Err(e) => cases.push(Case::new("tildeq1(w) = 0", Status::Skip, e.to_string())),
    }
    cases.extend(skip_cases(deg));
    Ok(Report::new("degenerate-tildeD", engine.ring.name.clone(), cases))
}

/// Brute-force `f_red` via the decomposition `V_k = ⊕_i y^i ker(∂_y)_{k−2i}`.
fn red_by_decomposition(w: &WeylPair, module: &SpecModule, f: &[Q], k: i64) -> Option<Vec<Q>> {
    let mut cols: Vec<Vec<Q>> = Vec::new();
    let mut n_const = 0;
    let mut i = 0;
    while k - 2 * i >= 0 {
        let src = k - 2 * i;
        let dy = w.dy.blocks.get(&(0, src))?;
        for mut v in kernel_space(dy).basis {
            for j in 0..i {
                v = w.y.blocks.get(&(0, src + 2 * j))?.apply(&v);
            }
            cols.push(v);
        }
        if i == 0 {
            n_const = cols.len();
        }
        i += 1;
    }
    if cols.len() != module.slice_dim(k) {
        return None;
    }
    let m = Matrix::from_columns(module.slice_dim(k), &cols);
    let coords = m.solve(f)?;
    let mut out = vec![Q::zero(); f.len()];
    for (c, col) in coords.iter().zip(&cols).take(n_const) {
        for (o, x) in out.iter_mut().zip(col) {
            *o += c * x;
        }
    }
    Some(out)
}

/// `[∂_y, y] = id`, local nilpotence, `vector_red` against the brute-force
/// decomposition, the round trip `f = Σ y^i f_i`, and `op_red` bicommutation.
pub fn weyl_suite(deg: &mut Degeneration) -> Result<Report> {
    let module = deg.module;
    let engine = module.engine;
    let mut cases = Vec::new();
    let w = match deg.weyl() {
        Ok(w) => w,
        Err(e) => {
            cases.push(Case::new("weyl pair", Status::Skip, e.to_string()));
            cases.extend(skip_cases(deg));
            return Ok(Report::new("degenerate-weyl", engine.ring.name.clone(), cases));
        }
    };
    let id = SliceOp::identity(module, &[0]);
    let comm = w.dy.bracket(&w.y, module);
    cases.push(equal_case("[dy, y] = id", &comm, &id));
    let mut nil_bad = Vec::new();
    for k in w.dy.sound_slices(0) {
        let mut v = Matrix::identity(module.slice_dim(k));
        let mut s = k;
        let mut known = true;
        while s >= 0 {
            match w.dy.blocks.get(&(0, s)) {
                Some(b) => v = b.mul(&v),
                None => {
                    known = false;
                    break;
                }
            }
            s -= 2;
        }
        if known && !v.is_zero() {
            nil_bad.push(k);
        }
    }
    cases.push(Case::check("dy locally nilpotent", nil_bad.is_empty(), format!("slices {}", slices_text(&nil_bad))));
    let mut red_bad = Vec::new();
    let mut oracle_bad = Vec::new();
    let mut trip_bad = Vec::new();
    let mut checked = Vec::new();
    for k in 0..=module.window {
        let n = module.slice_dim(k);
        let mut slice_ok = true;
        for j in 0..n {
            let mut f = vec![Q::zero(); n];
            f[j] = Q::one();
            let Ok(red) = w.vector_red(module, &f, k) else {
                slice_ok = false;
                break;
            };
            if let Some(b) = w.dy.blocks.get(&(0, k)) {
                if !b.apply(&red).iter().all(|x| x.is_zero()) {
                    red_bad.push(k);
                }
            }
            match red_by_decomposition(&w, module, &f, k) {
                Some(o) if o == red => {}
                _ => oracle_bad.push(k),
            }
            // f = Σ_i y^i (∂_y^i f / i!)_red
            let mut recon = vec![Q::zero(); n];
            let mut cur = f.clone();
            let mut i = 0i64;
            let mut ok = true;
            while k - 2 * i >= 0 {
                let src = k - 2 * i;
                let part: Vec<Q> = match w.vector_red(module, &cur, src) {
                    Ok(p) => p.into_iter().map(|x| x / factorial(i as u32)).collect(),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                };
                let mut up = part;
                for t in 0..i {
                    up = w.y.blocks[&(0, src + 2 * t)].apply(&up);
                }
                for (r, x) in recon.iter_mut().zip(up) {
                    *r += x;
                }
                if src < 2 {
                    break;
                }
                cur = w.dy.blocks[&(0, src)].apply(&cur);
                i += 1;
            }
            if !ok || recon != f {
                trip_bad.push(k);
            }
        }
        if slice_ok {
            checked.push(k);
        }
    }
    red_bad.dedup();
    oracle_bad.dedup();
    trip_bad.dedup();
    cases.push(Case::check(
        format!("vector_red in ker dy (slices {})", slices_text(&checked)),
        red_bad.is_empty(),
        format!("fails on slices {}", slices_text(&red_bad)),
    ));
    cases.push(Case::check(
        "vector_red = brute-force decomposition",
        oracle_bad.is_empty(),
        format!("fails on slices {}", slices_text(&oracle_bad)),
    ));
    cases.push(Case::check(
        "round trip V = V_red[y]",
        trip_bad.is_empty(),
        format!("fails on slices {}", slices_text(&trip_bad)),
    ));
    let one = RingElement::one();
    let eta = module.spec.eta.clone();
    let mut targets: Vec<(String, SliceOp)> = vec![
        ("psi2(1)".into(), module.slice_op(&Op::psi(engine, 2, &one), &[0])?),
        ("psi1(w)".into(), module.slice_op(&Op::psi(engine, 1, &eta), &[0])?),
        ("psi3(1)".into(), module.slice_op(&Op::psi(engine, 3, &one), &[0])?),
    ];
    if let Ok(q2) = deg.tilde_d(2, 0, &one) {
        targets.push(("tildeq2(1)".into(), q2));
    }
    if let Ok(d11) = deg.tilde_d(1, 1, &one) {
        targets.push(("tildeD(1,1)(1)".into(), d11));
    }
    for (name, f) in &targets {
        let red = w.op_red(module, f);
        let a = red.bracket(&w.y, module);
        let b = red.bracket(&w.dy, module);
        let sound: Vec<i64> = a.common(&b, 0);
        if sound.is_empty() {
            cases.push(Case::new(format!("op_red {name} bicommutes"), Status::Skip, "no sound slice"));
        } else {
            cases.push(Case::check(
                format!("op_red {name} bicommutes"),
                a.restrict_comp(0).is_zero() && b.restrict_comp(0).is_zero(),
                format!("sound slices {}", slices_text(&sound)),
            ));
        }
    }
    let red = w.op_red(module, &targets[1].1);
    cases.push(if red.blocks.is_empty() {
        Case::new("op_red psi1(w) = 0", Status::Skip, "no sound slice")
    } else {
        Case::check("op_red psi1(w) = 0", red.is_zero(), "psi1(w)_red does not vanish")
    });
    let yg = w.y.compose(&w.op_red(module, &targets[0].1), module);
    let red = w.op_red(module, &yg);
    cases.push(if red.blocks.is_empty() {
        Case::new("op_red(y G) = 0", Status::Skip, "no sound slice")
    } else {
        Case::check("op_red(y G) = 0", red.is_zero(), "does not vanish")
    });
    cases.extend(skip_cases(deg));
    Ok(Report::new("degenerate-weyl", engine.ring.name.clone(), cases))
}

/// Eigenvalue multiplicities of `h` per degree.
#[derive(Clone, Debug, Serialize)]
pub struct HSpectrum {
    pub degree: i64,
    pub eigenvalues: BTreeMap<i64, usize>,
}

/// The `sl_2`-triple `e = sl2_correct(h, 𝔡_red)`, `h = −D̃_{1,1}(1)_red`,
/// `f = −½ D̃_{2,0}(1)_red`, with its brackets, integrality of `h` and the
/// filtration property `ψ_k(ξ) P_i ⊂ P_{i+k}`.
pub fn sl2_suite(deg: &mut Degeneration) -> Result<(Report, Vec<HSpectrum>)> {
    let module = deg.module;
    let engine = module.engine;
    let mut cases = Vec::new();
    let mut spectrum = Vec::new();
    if !module.spec.chi.is_zero() {
        cases.push(Case::new(
            "sl2 preconditions",
            Status::Skip,
            "requires psi1(1) = 0 on the component (chi = 0)",
        ));
        return Ok((Report::new("degenerate-sl2", engine.ring.name.clone(), cases), spectrum));
    }
    let one = RingElement::one();
    let built = (|| -> Result<(WeylPair, SliceOp, SliceOp, SliceOp)> {
        let w = deg.weyl()?;
        let d11 = deg.tilde_d(1, 1, &one)?;
        let q2 = deg.tilde_d(2, 0, &one)?;
        Ok((w, d11, q2, module.slice_op(&Op::psi(engine, 2, &one), &[0])?))
    })();
    let (w, d11, q2, psi2) = match built {
        Ok(v) => v,
        Err(e) => {
            cases.push(Case::new("sl2 pipeline", Status::Skip, e.to_string()));
            cases.extend(skip_cases(deg));
            return Ok((Report::new("degenerate-sl2", engine.ring.name.clone(), cases), spectrum));
        }
    };
    let half = Q::new(1.into(), 2.into());
    let h = w.op_red(module, &d11).scale(&-Q::one());
    let d_red = w.op_red(module, &psi2).scale(&half);
    let q2_red = w.op_red(module, &q2);
    let e = match sl2_correct(&h, &d_red) {
        Ok(e) => e,
        Err(err) => {
            cases.push(Case::new("sl2_correct", Status::Fail, err.to_string()));
            return Ok((Report::new("degenerate-sl2", engine.ring.name.clone(), cases), spectrum));
        }
    };
    let f = q2_red.scale(&-half.clone());
    let f_alt = q2_red.scale(&half);
    let he = h.bracket(&e, module);
    let hf = h.bracket(&f, module);
    let ef = e.bracket(&f, module);
    cases.push(equal_case("[h,e] = 2e", &he, &e.scale(&qi(2))));
    cases.push(equal_case("[h,f] = -2f", &hf, &f.scale(&qi(-2))));
    cases.push(equal_case("[e,f] = h (f = -1/2 tildeq2(1)_red)", &ef, &h));
    let ef_alt = e.bracket(&f_alt, module);
    let alt_diff = ef_alt.differences(&h, 0);
    let alt_common = ef_alt.common(&h, 0);
    let alt_nontrivial = alt_common.iter().any(|k| !h.blocks[&(0, *k)].is_zero());
    cases.push(Case::new(
        "sign of f: +1/2 tildeq2(1)_red",
        Status::Ok,
        if alt_diff.is_empty() && !alt_nontrivial {
            "indistinguishable on sound slices".to_string()
        } else if alt_diff.is_empty() {
            "[e,f] = h also holds".to_string()
        } else {
            format!("[e,f] = -h with this sign (differs from h on slices {})", slices_text(&alt_diff))
        },
    ));
    let mut integral_bad = Vec::new();
    let mut eig: BTreeMap<i64, Vec<(i64, Vec<Vec<Q>>)>> = BTreeMap::new();
    for k in h.sound_slices(0) {
        match integer_eigen(&h.blocks[&(0, k)]) {
            Ok(v) => {
                spectrum.push(HSpectrum {
                    degree: k,
                    eigenvalues: v.iter().map(|(l, b)| (*l, b.len())).collect(),
                });
                eig.insert(k, v);
            }
            Err(_) => integral_bad.push(k),
        }
    }
    cases.push(Case::check(
        "h integral and diagonalizable",
        integral_bad.is_empty(),
        format!("fails on slices {}", slices_text(&integral_bad)),
    ));
    // ψ_k(ξ)_red P_i ⊂ P_{i+k}
    let mut filt_bad = Vec::new();
    for kk in 0..=2u32 {
        for xi in [one.clone(), module.spec.eta.clone()] {
            let p = w.op_red(module, &module.slice_op(&Op::psi(engine, kk, &xi), &[0])?);
            for (&(_, s), b) in &p.blocks {
                let (Some(src), Some(tgt)) = (eig.get(&s), eig.get(&(s + p.shift))) else {
                    continue;
                };
                let n = module.slice_dim(s + p.shift);
                for (lam, vs) in src {
                    let allowed: Vec<Vec<Q>> = tgt
                        .iter()
                        .filter(|(mu, _)| *mu <= lam + kk as i64)
                        .flat_map(|(_, v)| v.iter().cloned())
                        .collect();
                    let sp = Subspace::span(n, &allowed);
                    if !vs.iter().all(|v| sp.contains(&b.apply(v))) {
                        filt_bad.push(format!("psi{kk}({}) slice {s}", engine.ring.fmt_element(&xi)));
                        break;
                    }
                }
            }
        }
    }
    cases.push(Case::check(
        "psi_k(xi) P_i in P_(i+k)",
        filt_bad.is_empty(),
        filt_bad.join("; "),
    ));
    let detail: Vec<String> = spectrum
        .iter()
        .map(|s| {
            format!(
                "deg {}: {}",
                s.degree,
                s.eigenvalues.iter().map(|(l, m)| format!("{l}^{m}")).collect::<Vec<_>>().join(" ")
            )
        })
        .collect();
    cases.push(Case::new("h spectrum", Status::Ok, detail.join("; ")));
    cases.extend(skip_cases(deg));
    Ok((Report::new("degenerate-sl2", engine.ring.name.clone(), cases), spectrum))
}

/// The bracket relations of the interpolated operators and of their reduced
/// versions, for index sums `≤ cap`.
pub fn reduced_relations_suite(deg: &mut Degeneration, cap: u32) -> Result<Report> {
    let module = deg.module;
    let engine = module.engine;
    let ring = &engine.ring;
    let r = module.spec.r.clone();
    let omega = module.spec.eta.clone();
    let mut cases = Vec::new();
    let w = match deg.weyl() {
        Ok(w) => Some(w),
        Err(e) => {
            cases.push(Case::new("weyl pair", Status::Skip, e.to_string()));
            None
        }
    };
    let args: Vec<usize> = (0..ring.dim()).filter(|&b| !ring.is_odd(b)).collect();
    let mut idx = Vec::new();
    for m in 0..=cap {
        for n in 0..=cap - m {
            idx.push((m, n));
        }
    }
    let td = |deg: &mut Degeneration, m: i64, n: i64, xi: &RingElement| -> Result<Option<SliceOp>> {
        if m < 0 || n < 0 || xi.is_zero() {
            return Ok(None);
        }
        deg.tilde_d(m as u32, n as u32, xi).map(Some)
    };
    let rinv = Q::one() / r;
    for &(m, n) in &idx {
        for &(m2, n2) in &idx {
            if (m, n) >= (m2, n2) {
                continue;
            }
            for &a in &args {
                for &b in &args {
                    let xa = RingElement::basis(a);
                    let xb = RingElement::basis(b);
                    let (mi, ni, m2i, n2i) = (m as i64, n as i64, m2 as i64, n2 as i64);
                    let Some(lhs_a) = td(deg, mi, ni, &xa)? else { continue };
                    let Some(lhs_b) = td(deg, m2i, n2i, &xb)? else { continue };
                    let prod = ring.mul(&xa, &xb);
                    let xa_w = ring.mul(&xa, &omega);
                    let xb_w = ring.mul(&xb, &omega);
                    let c = qi(ni * m2i - mi * n2i);
                    // plain D̃ relation
                    let lhs = lhs_a.bracket(&lhs_b, module);
                    let mut rhs = lhs.scale(&Q::zero());
                    if let Some(t) = td(deg, mi + m2i - 1, ni + n2i - 1, &prod)? {
                        rhs = SliceOp::lin(&[(Q::one(), &rhs), (c.clone(), &t)]);
                    }
                    if let (Some(p), Some(q)) = (td(deg, mi, ni - 1, &xa_w)?, td(deg, m2i - 1, n2i, &xb)?) {
                        let t = p.compose(&q, module);
                        rhs = SliceOp::lin(&[(Q::one(), &rhs), (-rinv.clone() * qi(ni * m2i), &t)]);
                    }
                    if let (Some(p), Some(q)) = (td(deg, m2i, n2i - 1, &xb_w)?, td(deg, mi - 1, ni, &xa)?) {
                        let t = p.compose(&q, module);
                        rhs = SliceOp::lin(&[(Q::one(), &rhs), (rinv.clone() * qi(mi * n2i), &t)]);
                    }
                    let label = format!(
                        "[tildeD({m},{n})({}), tildeD({m2},{n2})({})]",
                        ring.basis_name(a),
                        ring.basis_name(b)
                    );
                    cases.push(equal_case(label.clone(), &lhs, &rhs));
                    // reduced relation
                    let Some(w) = &w else { continue };
                    let red = |s: &SliceOp| w.op_red(module, s);
                    let lhs = red(&lhs_a).bracket(&red(&lhs_b), module);
                    let mut rhs = lhs.scale(&Q::zero());
                    if let Some(t) = td(deg, mi + m2i - 1, ni + n2i - 1, &prod)? {
                        rhs = SliceOp::lin(&[(Q::one(), &rhs), (c.clone(), &red(&t))]);
                    }
                    let pairs: [(i64, i64, &RingElement, i64, i64, &RingElement, Q); 4] = [
                        (mi, ni - 1, &xa_w, m2i - 1, n2i, &xb, -rinv.clone() * qi(ni * m2i)),
                        (m2i - 1, n2i, &xb_w, mi, ni - 1, &xa, -rinv.clone() * qi(ni * m2i)),
                        (mi - 1, ni, &xa_w, m2i, n2i - 1, &xb, rinv.clone() * qi(mi * n2i)),
                        (m2i, n2i - 1, &xb_w, mi - 1, ni, &xa, rinv.clone() * qi(mi * n2i)),
                    ];
                    for (p1, p2, px, q1, q2, qx, coef) in pairs {
                        if coef.is_zero() {
                            continue;
                        }
                        if let (Some(p), Some(q)) = (td(deg, p1, p2, px)?, td(deg, q1, q2, qx)?) {
                            let t = red(&p).compose(&red(&q), module);
                            rhs = SliceOp::lin(&[(Q::one(), &rhs), (coef, &t)]);
                        }
                    }
                    cases.push(equal_case(format!("{label}_red"), &lhs, &rhs));
                }
            }
        }
    }
    cases.extend(skip_cases(deg));
    Ok(Report::new("degenerate-reduced", ring.name.clone(), cases))
}

/// An operator on `Module[x]`: `Σ c · x^i A ∂_x^j`.
#[derive(Clone, Debug)]
struct XOp {
    terms: Vec<(u32, u32, Q, SliceOp)>,
}

impl XOp {
    /// Applies to `x^a ⊗ v` (slice `k`), returning `(x-power, slice) → vector`.
    fn apply(&self, a: u32, k: i64, v: &[Q], xcap: u32) -> Option<BTreeMap<(u32, i64), Vec<Q>>> {
        let mut out: BTreeMap<(u32, i64), Vec<Q>> = BTreeMap::new();
        for (i, j, c, op) in &self.terms {
            if *j > a {
                continue;
            }
            let p = a - j + i;
            if p > xcap {
                return None;
            }
            let falling = (0..*j).fold(Q::one(), |acc, t| acc * qi((a - t) as i64));
            let t = k + op.shift;
            let w = if t < 0 {
                continue;
            } else {
                op.blocks.get(&(0, k))?.apply(v)
            };
            let entry = out.entry((p, t)).or_insert_with(|| vec![Q::zero(); w.len()]);
            for (e, x) in entry.iter_mut().zip(w) {
                *e += x * c * &falling;
            }
        }
        Some(out)
    }
}

fn apply_xop_map(op: &XOp, input: &BTreeMap<(u32, i64), Vec<Q>>, xcap: u32) -> Option<BTreeMap<(u32, i64), Vec<Q>>> {
    let mut out: BTreeMap<(u32, i64), Vec<Q>> = BTreeMap::new();
    for ((a, k), v) in input {
        for (key, w) in op.apply(*a, *k, v, xcap)? {
            let entry = out.entry(key).or_insert_with(|| vec![Q::zero(); w.len()]);
            for (e, x) in entry.iter_mut().zip(w) {
                *e += x;
            }
        }
    }
    out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    Some(out)
}

/// Brackets of the unreduced operators built with `base^{−j}` in front of `∂_x^j`.
fn unred_cases(deg: &mut Degeneration, cap: u32, xcap: u32, base: &Q) -> Result<Vec<Case>> {
    let module = deg.module;
    let engine = module.engine;
    let ring = &engine.ring;
    let omega = module.spec.eta.clone();
    let mut cases = Vec::new();
    let unred = |deg: &mut Degeneration, m: u32, n: u32, xi: &RingElement| -> Result<XOp> {
        let mut terms = Vec::new();
        for i in 0..=m {
            for j in 0..=n {
                let arg = (0..j).fold(xi.clone(), |acc, _| ring.mul(&acc, &omega));
                if arg.is_zero() {
                    continue;
                }
                let c = binomial(m as i64, i as i64)
                    * binomial(n as i64, j as i64)
                    * base.pow(-(j as i32));
                let op = deg.tilde_d(m - i, n - j, &arg)?;
                terms.push((i, j, c, op));
            }
        }
        Ok(XOp { terms })
    };
    let mut idx = Vec::new();
    for m in 0..=cap {
        for n in 0..=cap - m {
            if m + n > 0 {
                idx.push((m, n));
            }
        }
    }
    let one = RingElement::one();
    for &(m, n) in &idx {
        for &(m2, n2) in &idx {
            if (m, n) >= (m2, n2) || m + m2 == 0 || n + n2 == 0 {
                continue;
            }
            let a = unred(deg, m, n, &one)?;
            let b = unred(deg, m2, n2, &one)?;
            let c = unred(deg, m + m2 - 1, n + n2 - 1, &one)?;
            let coef = qi(m2 as i64 * n as i64 - m as i64 * n2 as i64);
            let mut checked = Vec::new();
            let mut bad = Vec::new();
            for xa in 0..=xcap {
                for k in 0..=module.window {
                    let dim = module.slice_dim(k);
                    for j in 0..dim {
                        let mut v = vec![Q::zero(); dim];
                        v[j] = Q::one();
                        let input: BTreeMap<(u32, i64), Vec<Q>> = [((xa, k), v)].into_iter().collect();
                        let ab = apply_xop_map(&b, &input, xcap).and_then(|t| apply_xop_map(&a, &t, xcap));
                        let ba = apply_xop_map(&a, &input, xcap).and_then(|t| apply_xop_map(&b, &t, xcap));
                        let cc = apply_xop_map(&c, &input, xcap);
                        let (Some(ab), Some(ba), Some(cc)) = (ab, ba, cc) else { continue };
                        let mut lhs = ab;
                        for (key, w) in ba {
                            let e = lhs.entry(key).or_insert_with(|| vec![Q::zero(); w.len()]);
                            for (x, y) in e.iter_mut().zip(w) {
                                *x -= y;
                            }
                        }
                        lhs.retain(|_, v| v.iter().any(|x| !x.is_zero()));
                        let rhs: BTreeMap<(u32, i64), Vec<Q>> = cc
                            .into_iter()
                            .map(|(key, w)| (key, w.into_iter().map(|x| x * &coef).collect::<Vec<_>>()))
                            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
                            .collect();
                        checked.push((xa, k));
                        if lhs != rhs {
                            bad.push((xa, k));
                        }
                    }
                }
            }
            checked.dedup();
            bad.dedup();
            let id = format!("[tildeD({m},{n})(1)_unred, tildeD({m2},{n2})(1)_unred]");
            if checked.is_empty() {
                cases.push(Case::new(id, Status::Skip, "no sound slice"));
            } else {
                cases.push(Case::check(
                    id,
                    bad.is_empty(),
                    format!(
                        "fails at (x^a, slice) {}",
                        bad.iter().map(|(a, k)| format!("({a},{k})")).collect::<Vec<_>>().join(" ")
                    ),
                ));
            }
        }
    }
    Ok(cases)
}

/// `D̃_{m,n}(π)_unred = Σ_{i,j} x^i C(m,i) C(n,j) r^{−j} D̃_{m−i,n−j}(π ω^j) ∂_x^j`
/// on `Module[x]`, and the `ℋ_2` brackets between them. The variant with
/// `(−r)^{−j}` is evaluated too and its outcome recorded.
pub fn unreduced_suite(deg: &mut Degeneration, cap: u32, xcap: u32) -> Result<Report> {
    let r = deg.module.spec.r.clone();
    let mut cases = unred_cases(deg, cap, xcap, &r)?;
    let alt = unred_cases(deg, cap, xcap, &-r)?;
    let failing = alt.iter().filter(|c| c.status == Status::Fail).count();
    let total = alt.iter().filter(|c| c.status != Status::Skip).count();
    cases.push(Case::new(
        "convention (-r)^(-j)",
        Status::Ok,
        if failing == 0 {
            "brackets also hold".to_string()
        } else {
            format!("{failing} of {total} brackets fail with this sign")
        },
    ));
    cases.extend(skip_cases(deg));
    Ok(Report::new("degenerate-unred", deg.module.engine.ring.name.clone(), cases))
}

/// The parabolic relations for `y_{i,p} = ψ_1(p_i)` and
/// `X_{i,p} = [y_{i,p}, T_0(1)]`, plus stability of the specialization ideal.
pub fn parabolic_suite(module: &SpecModule, max_n: u32) -> Result<Report> {
    let engine = module.engine;
    let ring = &engine.ring;
    let Some(par) = ring.parabolic.clone() else {
        return Err(Error::Precondition("instance is not parabolic".into()));
    };
    let mut cases = Vec::new();
    let comps = [0i64];
    let classes: Vec<RingElement> = {
        let row = &par.slots[0];
        let mut v: Vec<RingElement> = row.iter().map(|&b| RingElement::basis(b)).collect();
        let mut last = RingElement::basis(par.omega);
        for &b in row {
            last = last.sub(&RingElement::basis(b));
        }
        v.push(last);
        v
    };
    let t0 = Op::geom_t(ring, 0, &RingElement::one());
    let ys: Vec<Op> = classes.iter().map(|p| Op::psi(engine, 1, p)).collect();
    let xs: Vec<Op> = ys.iter().map(|y| Op::bracket(y, &t0)).collect();
    let eq = |id: String, a: &Op, b: &Op| -> Result<Case> {
        let sa = module.slice_op(a, &comps)?;
        let sb = module.slice_op(b, &comps)?;
        Ok(equal_case(id, &sa, &sb))
    };
    let zero_case = |id: String, a: &Op| -> Result<Case> {
        let sa = module.slice_op(a, &comps)?;
        if sa.blocks.is_empty() {
            return Ok(Case::new(id, Status::Skip, "no sound slice"));
        }
        Ok(Case::check(id, sa.is_zero(), "does not vanish"))
    };
    let ypow = |y: &Op, n: u32| -> Op {
        let mut out = Op::identity();
        for _ in 0..n {
            out = Op::compose(y, &out);
        }
        out
    };
    let name = |i: usize| format!("p{}", i + 1);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            cases.push(zero_case(format!("[X_{}, y_{}] = 0", name(i), name(j)), &Op::bracket(x, y))?);
        }
        for n in 0..=max_n {
            let lhs = Op::bracket(&Op::psi(engine, n, &RingElement::one()), x);
            if n == 0 {
                cases.push(zero_case(format!("[psi0(1), X_{}] = 0", name(i)), &lhs)?);
            } else {
                let rhs = Op::compose(&ypow(&ys[i], n - 1), x).scale(qi(n as i64));
                cases.push(eq(format!("[psi{n}(1), X_{}] = {n} y^{} X", name(i), n - 1), &lhs, &rhs)?);
            }
            for b in 0..ring.dim() {
                if ring.degree(b) == 0 {
                    continue;
                }
                let pi = RingElement::basis(b);
                cases.push(zero_case(
                    format!("[psi{n}({}), X_{}] = 0", ring.basis_name(b), name(i)),
                    &Op::bracket(&Op::psi(engine, n, &pi), x),
                )?);
            }
            let t = Op::geom_t(ring, n as i64, &classes[i]);
            cases.push(eq(
                format!("T{n}({}) = y^{n} X", name(i)),
                &t,
                &Op::compose(&ypow(&ys[i], n), x),
            )?);
        }
    }
    for n in 0..=max_n {
        let mut sum = Op::zero();
        for y in &ys {
            sum = sum.add(&ypow(y, n));
        }
        cases.push(eq(
            format!("sum_i y_i^{n} = psi{n}(w)"),
            &sum,
            &Op::psi(engine, n, &RingElement::basis(par.omega)),
        )?);
    }
    // the rewritten generators lie in the kernel of every T on the window
    let mut bad = Vec::new();
    let ts: Vec<(String, Op)> = std::iter::once(("T0(1)".to_string(), t0.clone()))
        .chain(classes.iter().enumerate().map(|(i, p)| (format!("T0({})", name(i)), Op::geom_t(ring, 0, p))))
        .collect();
    for (g, img) in module.spec.rewrites.iter() {
        let deg_g = g.degree(ring);
        if deg_g > module.window {
            continue;
        }
        let rel = FockElement::from_monomial(Monomial::gen(*g), Q::one()).sub(img);
        for (tn, t) in &ts {
            let out = engine.t_apply(match t.kind() {
                OpKind::Hecke { n, .. } => *n,
                _ => 0,
            }, match t.kind() {
                OpKind::Hecke { xi, .. } => xi,
                _ => unreachable!(),
            }, &rel)?;
            if !module.specialize(&out, 1).is_zero() {
                bad.push(format!("{tn} on p{}({})", g.n, ring.basis_name(g.b as usize)));
            }
        }
    }
    cases.push(Case::check(
        "specialization ideal is T-stable",
        bad.is_empty(),
        bad.join("; "),
    ));
    Ok(Report::new("degenerate-parabolic", ring.name.clone(), cases))
}

/// Synthetic checks: `sl2_correct` on hand-built inputs and the `D̃`
/// interpolation round trip on `D_m = u^m Σ_i m^i/i! C_i`.
pub fn synthetic_suite(seed: u64) -> Report {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    // [h,d] = 2d already
    let h0 = Matrix::from_i64(&[vec![-1, 0], vec![0, 1]]);
    let h1 = Matrix::from_i64(&[vec![1, 0], vec![0, 3]]);
    let d = Matrix::from_i64(&[vec![1, 0], vec![0, 1]]);
    let e = sl2_correct_block(&h0, &h1, &d, 2).unwrap();
    cases.push(Case::check("sl2_correct fixed point", e == d, "e != d"));
    // a degree-0 component f_0 is halved
    let d = Matrix::from_i64(&[vec![1, 5], vec![0, 1]]);
    let e = sl2_correct_block(&h0, &h0.scale(&qi(1)).add(&Matrix::identity(2).scale(&qi(2))), &d, 2).unwrap();
    let h1 = h0.add(&Matrix::identity(2).scale(&qi(2)));
    let ok = h1.mul(&e).sub(&e.mul(&h0)) == e.scale(&qi(2));
    cases.push(Case::check("sl2_correct 2x2 [h,e] = 2e", ok, "bracket fails"));
    // random three-slice module with lower-triangular corrections
    let mut all_ok = true;
    for _ in 0..20 {
        let dims = [2usize, 3, 2];
        let hs: Vec<Matrix> = dims
            .iter()
            .enumerate()
            .map(|(s, &n)| {
                let mut m = Matrix::zero(n, n);
                for i in 0..n {
                    m.set(i, i, qi(2 * s as i64 - 2 + 2 * i as i64 - n as i64 + 1));
                }
                m
            })
            .collect();
        for s in 0..2 {
            let mut dm = Matrix::zero(dims[s + 1], dims[s]);
            for i in 0..dims[s + 1] {
                for j in 0..dims[s] {
                    let lam = hs[s].get(j, j).clone();
                    let mu = hs[s + 1].get(i, i).clone();
                    if mu <= lam || mu == lam.clone() + qi(2) {
                        dm.set(i, j, qi(rng.gen_range(-3..=3)));
                    }
                }
            }
            match sl2_correct_block(&hs[s], &hs[s + 1], &dm, 2) {
                Ok(e) => all_ok &= hs[s + 1].mul(&e).sub(&e.mul(&hs[s])) == e.scale(&qi(2)),
                Err(_) => all_ok = false,
            }
        }
    }
    cases.push(Case::check("sl2_correct on random 3-slice modules", all_ok, "[h,e] != 2e"));
    let bad = sl2_correct_block(
        &Matrix::from_i64(&[vec![0]]),
        &Matrix::from_i64(&[vec![5]]),
        &Matrix::from_i64(&[vec![1]]),
        2,
    );
    cases.push(Case::check(
        "sl2_correct rejects positive ad_h components",
        bad.is_err(),
        "accepted",
    ));
    let mut trip_ok = true;
    for _ in 0..10 {
        let n = 3;
        let u = crate::lefschetz::random_invertible(&mut rng, n, 2);
        let ui = u.inverse().unwrap();
        let deg = rng.gen_range(0..=3usize);
        let cs: Vec<Matrix> = (0..=deg)
            .map(|_| {
                Matrix::from_i64(
                    &(0..n)
                        .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let values: Vec<Matrix> = (0..=deg + 2)
            .map(|m| {
                let mut s = Matrix::zero(n, n);
                for (i, c) in cs.iter().enumerate() {
                    s = s.add(&c.scale(&(qi(m as i64).pow(i as i32) / factorial(i as u32))));
                }
                let d_m = u.pow(m as u32).mul(&s);
                ui.pow(m as u32).mul(&d_m)
            })
            .collect();
        match interpolate(&values) {
            Some(got) => {
                let mut want = cs.clone();
                while want.last().is_some_and(|m| m.is_zero()) && want.len() > 1 {
                    want.pop();
                }
                trip_ok &= got == want;
            }
            None => trip_ok = false,
        }
    }
    cases.push(Case::check("tildeD synthetic round trip", trip_ok, "recovered matrices differ"));
    Report::new("degenerate-synthetic", format!("seed={seed}"), cases)
}

/// `deg: h-eigenvalue multiplicities` as JSON-friendly rows.
pub fn spectrum_json(s: &[HSpectrum]) -> serde_json::Value {
    serde_json::to_value(s).unwrap_or_default()
}

pub fn fmt_skip_list(skips: &[Skip]) -> String {
    skips.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ")
}

pub fn describe_q(x: &Q) -> String {
    fmt_q(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_curve_ring, make_parabolic_ring};

    #[test]
    fn stirling_and_interpolation() {
        let vals: Vec<Matrix> = (0..5).map(|m| Matrix::from_i64(&[vec![m * m + 1]])).collect();
        let c = interpolate(&vals).unwrap();
        // m^2 + 1 = 1 + 0·m + 2·m^2/2!
        assert_eq!(c, vec![Matrix::from_i64(&[vec![1]]), Matrix::from_i64(&[vec![0]]), Matrix::from_i64(&[vec![2]])]);
        let exp: Vec<Matrix> = (0..5).map(|m| Matrix::from_i64(&[vec![1 << m]])).collect();
        assert!(interpolate(&exp).is_none());
    }

    #[test]
    fn specialization_on_curve() {
        let e = Engine::new(make_curve_ring(0, 1));
        let s = Specialization::new(&e, qi(2), qi(1)).unwrap();
        let w = RingElement::basis(1);
        assert_eq!(s.specialize(&e, &FockElement::p(1, &w), 0), FockElement::scalar(qi(2)));
        let f = FockElement::p(2, &w).mul(&FockElement::p(1, &w), &e.ring);
        assert_eq!(s.specialize(&e, &f, 0), FockElement::p(2, &w).scale(&qi(2)));
        let psi1 = e.psi_class(1, &RingElement::one());
        assert_eq!(s.specialize(&e, &psi1, 3), FockElement::scalar(qi(4)));
    }

    #[test]
    fn module_slices() {
        let e = Engine::new(make_curve_ring(0, 1));
        let s = Specialization::new(&e, qi(1), qi(0)).unwrap();
        let m = SpecModule::new(&e, s, 6);
        let dims: Vec<usize> = (0..=6).map(|k| m.slice_dim(k)).collect();
        assert_eq!(dims, vec![1, 0, 2, 0, 5, 0, 10]);
    }

    #[test]
    fn synthetic() {
        let r = synthetic_suite(1);
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn parabolic_rewrites_are_consistent() {
        let e = Engine::new(make_parabolic_ring(0, 1, 2, 1).unwrap());
        let s = Specialization::new(&e, qi(2), qi(0)).unwrap();
        let m = SpecModule::new(&e, s, 4);
        let r = parabolic_suite(&m, 2).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}
