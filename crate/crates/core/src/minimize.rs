//! Minimal-degree elements of the shifted polynomial module behind all three
//! decoders.
//!
//! Given `Q_0, Q_1, .., Q_h` and a shift `k >= 1`, the module is generated by
//! the row `(X^{k-1}, Q_1, .., Q_h)` and the rows `Q_0 e_i`. Its elements are
//! exactly the tuples `(X^{k-1} E, Q_1 E + Q_0 C_1, .., Q_h E + Q_0 C_h)`. The
//! solver finds a nonzero element whose largest component degree is minimal,
//! excluding elements whose components are all constant.
//!
//! The generator matrix is brought to shifted weak Popov form, either by
//! iterative leading-term cancellation or by a divide-and-conquer variant that
//! works on truncated rows and only ever applies transformations that the
//! iterative method would also be allowed to apply. The answer is then read off
//! canonically from the space of all minimal elements, so every path (including
//! the linear-algebra oracle [`brute_force_solve`]) returns identical output.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{row_space_rref, Matrix};
use crate::ntt::{product_size, Plan};
use crate::poly::{mul_slices, trim, Degree, Poly};

const NEG_INF: i64 = i64::MIN / 4;
/// Precision below which the divide-and-conquer reduction runs iteratively.
const BASE_PRECISION: i64 = 24;
/// Largest `deg Q_0` accepted by the oracle.
pub const BRUTE_FORCE_MAX_DEGREE: usize = 64;

#[derive(Clone, Debug)]
pub struct MinimizeProblem {
    pub q0: Poly,
    pub qs: Vec<Poly>,
    pub shift: usize,
}

impl MinimizeProblem {
    pub fn new(q0: Poly, qs: Vec<Poly>, shift: usize) -> Result<MinimizeProblem> {
        let p = MinimizeProblem { q0, qs, shift };
        p.validate()?;
        Ok(p)
    }

    pub fn field(&self) -> &Field {
        self.q0.field()
    }

    pub fn h(&self) -> usize {
        self.qs.len()
    }

    fn validate(&self) -> Result<()> {
        if self.shift == 0 {
            return Err(Error::InvalidParameters("shift k must be at least 1".into()));
        }
        if self.qs.iter().any(|q| q.field() != self.q0.field()) {
            return Err(Error::FieldMismatch);
        }
        if self.q0.is_zero() {
            return Err(Error::DegenerateProblem("Q_0 is zero"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizeSolution {
    /// The locator-like first coordinate; the module element's first component is `X^{k-1} E`.
    pub e: Poly,
    pub cs: Vec<Poly>,
    /// `B_i = Q_i E + Q_0 C_i`.
    pub bs: Vec<Poly>,
    /// `deg(X^{k-1} E), deg B_1, .., deg B_h`.
    pub degrees: Vec<Degree>,
    pub max_degree: usize,
}

impl MinimizeSolution {
    /// Recompute every stored relation from scratch.
    pub fn is_consistent(&self, problem: &MinimizeProblem) -> bool {
        let k1 = problem.shift - 1;
        if self.cs.len() != problem.h() || self.bs.len() != problem.h() || self.degrees.len() != problem.h() + 1 {
            return false;
        }
        if self.degrees[0] != self.e.degree().plus(k1) {
            return false;
        }
        for i in 0..problem.h() {
            let b = problem.qs[i].mul(&self.e).add(&problem.q0.mul(&self.cs[i]));
            if b != self.bs[i] || self.degrees[i + 1] != b.degree() {
                return false;
            }
        }
        let max = self.degrees.iter().max().copied().unwrap_or(Degree::MinusInfinity);
        max == Degree::Finite(self.max_degree) && self.max_degree > 0
    }
}

/// Which reduction path to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Divide and conquer when the field allows fast kernels, else iterative.
    Auto,
    Iterative,
    DivideAndConquer,
}

pub fn solve(problem: &MinimizeProblem) -> Result<MinimizeSolution> {
    solve_with(problem, Strategy::Auto)
}

pub fn solve_with(problem: &MinimizeProblem, strategy: Strategy) -> Result<MinimizeSolution> {
    problem.validate()?;
    let f = problem.field();
    let h = problem.h();
    let m = h + 1;
    let k1 = (problem.shift - 1) as i64;
    let mut w = vec![0i64; m];
    w[0] = k1;

    let mut rows: Mat = Vec::with_capacity(m);
    let mut first = vec![Lp::one()];
    for q in &problem.qs {
        first.push(Lp::from_poly(&q.rem(&problem.q0)?));
    }
    rows.push(first);
    for i in 1..m {
        let mut r = vec![Lp::zero(); m];
        r[i] = Lp::from_poly(&problem.q0);
        rows.push(r);
    }
    // unshifted determinant is Q_0^h
    let target = (h * problem.q0.degree().finite().unwrap_or(0)) as i64 + k1;
    let fast = match strategy {
        Strategy::Auto => f.fast_paths(),
        Strategy::Iterative => false,
        Strategy::DivideAndConquer => true,
    };
    reduce_to_weak_popov(f, &w, &mut rows, target, fast);

    let info = leading(&rows, &w);
    let d_min = info.iter().map(|x| x.0).min().expect("nonempty");
    let to_elem = |row: &[Lp]| row.iter().map(|x| x.to_poly(f)).collect::<Vec<Poly>>();
    let (elems, level) = if d_min >= 1 {
        (rows.iter().zip(&info).filter(|(_, i)| i.0 == d_min).map(|(r, _)| to_elem(r)).collect(), d_min)
    } else {
        let mut v: Vec<Vec<Poly>> = Vec::new();
        for (r, i) in rows.iter().zip(&info) {
            if i.0 <= 1 {
                v.push(to_elem(r));
            }
            if i.0 == 0 {
                v.push(to_elem(r).iter().map(|p| p.shift(1)).collect());
            }
        }
        (v, 1)
    };
    finish(problem, canonical(f, &elems, level, k1))
}

/// Pick the canonical minimal element from a spanning set of the space of
/// module elements with shifted degree at most `level`.
///
/// Coordinates list the component coefficients component by component, each
/// from the top (shifted) degree down. In the reduced row echelon basis the
/// last row with a nonzero coefficient at degree `level` is the unique element,
/// up to scaling, whose degree tuple is lexicographically smallest; it is
/// scaled so the leading coefficient of its first top-degree component is 1.
fn canonical(f: &Field, elems: &[Vec<Poly>], level: i64, k1: i64) -> Vec<Poly> {
    let m = elems[0].len();
    let block = |j: usize| -> i64 {
        let low = if j == 0 { k1 } else { 0 };
        (level - low + 1).max(0)
    };
    let sizes: Vec<i64> = (0..m).map(block).collect();
    let encode = |el: &Vec<Poly>| -> Vec<Fe> {
        let mut v = Vec::new();
        for j in 0..m {
            let low = if j == 0 { k1 } else { 0 };
            for idx in 0..sizes[j] {
                let d = level - idx - low;
                v.push(el[j].coeff(d as usize));
            }
        }
        v
    };
    let basis = row_space_rref(f, elems.iter().map(encode).collect());
    let mut tops = Vec::new();
    let mut off = 0usize;
    for &s in &sizes {
        if s > 0 {
            tops.push(off);
        }
        off += s as usize;
    }
    let chosen = basis
        .iter()
        .rev()
        .find(|r| tops.iter().any(|&t| !r[t].is_zero()))
        .expect("space contains an element of the requested degree");
    let mut out = Vec::with_capacity(m);
    let mut off = 0usize;
    let mut scale = None;
    for j in 0..m {
        let low = if j == 0 { k1 } else { 0 };
        let s = sizes[j] as usize;
        let mut c = vec![Fe::ZERO; (level - low + 1).max(0) as usize];
        for idx in 0..s {
            c[s - 1 - idx] = chosen[off + idx];
        }
        if scale.is_none() && s > 0 && !chosen[off].is_zero() {
            scale = Some(f.inv_nz(chosen[off]));
        }
        off += s;
        out.push(Poly::new(f, c));
    }
    let scale = scale.expect("top coefficient present");
    out.iter().map(|p| p.scale(scale)).collect()
}

fn finish(problem: &MinimizeProblem, elem: Vec<Poly>) -> Result<MinimizeSolution> {
    let k1 = problem.shift - 1;
    let mut it = elem.into_iter();
    let e = it.next().expect("first component");
    let bs: Vec<Poly> = it.collect();
    let mut cs = Vec::with_capacity(bs.len());
    for (b, q) in bs.iter().zip(&problem.qs) {
        let num = b.sub(&q.mul(&e));
        let c = num.div_exact(&problem.q0)?.expect("module element has exact cofactor");
        cs.push(c);
    }
    let mut degrees = vec![e.degree().plus(k1)];
    degrees.extend(bs.iter().map(|b| b.degree()));
    let max_degree = degrees.iter().max().and_then(|d| d.finite()).expect("nonzero element");
    Ok(MinimizeSolution { e, cs, bs, degrees, max_degree })
}

// ---------------------------------------------------------------------------
// linear-algebra oracle

/// Exhaustive oracle: for `D = 0, 1, ..` solve the linear system for all module
/// elements of shifted degree at most `D` and stop at the first nonzero space
/// that contains an element passing the exclusion rule.
pub fn brute_force_solve(problem: &MinimizeProblem) -> Result<MinimizeSolution> {
    problem.validate()?;
    let dq0 = problem.q0.degree().finite().expect("nonzero");
    if dq0 > BRUTE_FORCE_MAX_DEGREE {
        return Err(Error::BudgetExceeded(format!("deg Q_0 = {dq0} exceeds {BRUTE_FORCE_MAX_DEGREE}")));
    }
    let f = problem.field();
    let k1 = (problem.shift - 1) as i64;
    let cap = problem.qs.iter().map(|q| q.degree().to_i64()).fold(k1, i64::max) + 2;
    for d in 0..=cap {
        let space = level_space(problem, d);
        if space.is_empty() {
            continue;
        }
        if d == 0 {
            return finish(problem, canonical(f, &level_space(problem, 1), 1, k1));
        }
        return finish(problem, canonical(f, &space, d, k1));
    }
    Err(Error::DegenerateProblem("no module element found below the generator degree"))
}

/// Basis of `{(E, B_1, .., B_h) in module : every shifted degree <= d}`.
fn level_space(problem: &MinimizeProblem, d: i64) -> Vec<Vec<Poly>> {
    let f = problem.field();
    let k1 = (problem.shift - 1) as i64;
    let dq0 = problem.q0.degree().to_i64();
    let ne = if d >= k1 { d - k1 + 1 } else { 0 };
    let c_len: Vec<i64> = problem
        .qs
        .iter()
        .map(|q| {
            let mut top = d;
            if ne > 0 && !q.is_zero() {
                top = top.max(q.degree().to_i64() + ne - 1);
            }
            (top - dq0 + 1).max(0)
        })
        .collect();
    let nvars = (ne + c_len.iter().sum::<i64>()) as usize;
    if nvars == 0 {
        return Vec::new();
    }
    let mut eqs: Vec<Vec<Fe>> = Vec::new();
    let mut c_off = ne as usize;
    for (i, q) in problem.qs.iter().enumerate() {
        let top_e = if ne > 0 && !q.is_zero() { q.degree().to_i64() + ne - 1 } else { NEG_INF };
        let top_c = if c_len[i] > 0 { dq0 + c_len[i] - 1 } else { NEG_INF };
        for deg in (d + 1)..=top_e.max(top_c) {
            let mut row = vec![Fe::ZERO; nvars];
            for t in 0..ne {
                row[t as usize] = q.coeff((deg - t).max(-1).try_into().unwrap_or(usize::MAX));
            }
            for t in 0..c_len[i] {
                let idx = deg - t;
                if idx >= 0 {
                    row[c_off + t as usize] = problem.q0.coeff(idx as usize);
                }
            }
            eqs.push(row);
        }
        c_off += c_len[i] as usize;
    }
    let kernel = if eqs.is_empty() {
        (0..nvars)
            .map(|i| {
                let mut v = vec![Fe::ZERO; nvars];
                v[i] = Fe::ONE;
                v
            })
            .collect()
    } else {
        Matrix::from_rows(eqs).kernel(f)
    };
    kernel
        .into_iter()
        .map(|v| {
            let e = Poly::new(f, v[..ne as usize].to_vec());
            let mut el = vec![e.clone()];
            let mut off = ne as usize;
            for (i, q) in problem.qs.iter().enumerate() {
                let c = Poly::new(f, v[off..off + c_len[i] as usize].to_vec());
                off += c_len[i] as usize;
                el.push(q.mul(&e).add(&problem.q0.mul(&c)));
            }
            el
        })
        .collect()
}

// ---------------------------------------------------------------------------
// rows with a floor: polynomials stored from a lowest exponent upward

/// `sum c[i] X^{val + i}`; trailing zeros trimmed.
#[derive(Clone, Debug)]
struct Lp {
    val: i64,
    c: Vec<Fe>,
}

type Mat = Vec<Vec<Lp>>;

impl Lp {
    fn zero() -> Lp {
        Lp { val: 0, c: Vec::new() }
    }

    fn one() -> Lp {
        Lp { val: 0, c: vec![Fe::ONE] }
    }

    fn from_poly(p: &Poly) -> Lp {
        Lp { val: 0, c: p.coeffs().to_vec() }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn deg(&self) -> i64 {
        if self.c.is_empty() {
            NEG_INF
        } else {
            self.val + self.c.len() as i64 - 1
        }
    }

    fn coeff(&self, d: i64) -> Fe {
        let i = d - self.val;
        if i < 0 || i >= self.c.len() as i64 {
            Fe::ZERO
        } else {
            self.c[i as usize]
        }
    }

    fn normalize(&mut self) {
        trim(&mut self.c);
        if self.c.is_empty() {
            self.val = 0;
        }
    }

    /// Drop every coefficient of degree `<= floor`.
    fn truncate_below(&mut self, floor: i64) {
        if self.c.is_empty() || floor < self.val {
            return;
        }
        let cut = floor + 1 - self.val;
        if cut >= self.c.len() as i64 {
            self.c.clear();
            self.val = 0;
        } else {
            self.c.drain(..cut as usize);
            self.val += cut;
        }
        self.normalize();
    }

    /// `self += a X^shift o`.
    fn axpy(&mut self, f: &Field, a: Fe, shift: i64, o: &Lp) {
        if o.is_zero() || a.is_zero() {
            return;
        }
        let ov = o.val + shift;
        if self.is_zero() {
            self.val = ov;
            self.c = o.c.iter().map(|&x| f.mul(a, x)).collect();
            return;
        }
        if ov < self.val {
            let pad = (self.val - ov) as usize;
            self.c.splice(0..0, std::iter::repeat(Fe::ZERO).take(pad));
            self.val = ov;
        }
        let need = (o.deg() + shift - self.val + 1) as usize;
        if self.c.len() < need {
            self.c.resize(need, Fe::ZERO);
        }
        let off = (ov - self.val) as usize;
        for (slot, &x) in self.c[off..].iter_mut().zip(&o.c) {
            *slot = f.add(*slot, f.mul(a, x));
        }
        self.normalize();
    }

    fn mul(f: &Field, a: &Lp, b: &Lp) -> Lp {
        if a.is_zero() || b.is_zero() {
            return Lp::zero();
        }
        let mut r = Lp { val: a.val + b.val, c: mul_slices(f, &a.c, &b.c) };
        r.normalize();
        r
    }

    fn to_poly(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero(f);
        }
        debug_assert!(self.val >= 0);
        let mut v = vec![Fe::ZERO; self.val as usize];
        v.extend_from_slice(&self.c);
        Poly::new(f, v)
    }
}

fn identity(m: usize) -> Mat {
    (0..m).map(|i| (0..m).map(|j| if i == j { Lp::one() } else { Lp::zero() }).collect()).collect()
}

fn is_identity(u: &Mat) -> bool {
    u.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| if i == j { x.deg() == 0 && x.c[0] == Fe::ONE && x.val == 0 } else { x.is_zero() })
    })
}

/// Shifted row degree and leading position (rightmost column attaining it).
fn leading(rows: &Mat, w: &[i64]) -> Vec<(i64, usize)> {
    rows.iter()
        .map(|row| {
            let mut best = (NEG_INF, 0usize);
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let d = x.deg() + w[j];
                if d >= best.0 {
                    best = (d, j);
                }
            }
            best
        })
        .collect()
}

fn unreliable(info: &[(i64, usize)], floors: &[i64]) -> bool {
    info.iter().zip(floors).any(|(i, &fl)| i.0 <= fl || i.0 == NEG_INF)
}

/// Rows `(a, b)` to reduce (`a` by `b`) in the smallest conflicting column:
/// `a` has the largest shifted degree (ties to the larger index), `b` the
/// smallest (ties to the smaller index).
fn find_pair(info: &[(i64, usize)]) -> Option<(usize, usize, usize)> {
    let m = info.len();
    for col in 0..m {
        let rows: Vec<usize> = (0..m).filter(|&i| info[i].1 == col).collect();
        if rows.len() < 2 {
            continue;
        }
        let a = *rows.iter().max_by_key(|&&i| (info[i].0, i)).unwrap();
        let b = *rows.iter().filter(|&&i| i != a).min_by_key(|&&i| (info[i].0, i)).unwrap();
        return Some((a, b, col));
    }
    None
}

fn two_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (l, r) = v.split_at_mut(b);
        (&mut l[a], &r[0])
    } else {
        let (l, r) = v.split_at_mut(a);
        (&mut r[0], &l[b])
    }
}

fn truncate_row(row: &mut [Lp], floor: i64, w: &[i64]) {
    if floor <= NEG_INF {
        return;
    }
    for (x, &wj) in row.iter_mut().zip(w) {
        x.truncate_below(floor - wj);
    }
}

/// Iterative leading-term cancellation. Rows are exact strictly above their
/// floors; stops at weak Popov form, once the total shifted degree has
/// dropped by `t`, or when a row's leading data is no longer exact.
fn iterate(f: &Field, w: &[i64], rows: &mut Mat, floors: &mut [i64], mut u: Option<&mut Mat>, t: i64) {
    let start: i64 = leading(rows, w).iter().map(|x| x.0).sum();
    loop {
        let info = leading(rows, w);
        if unreliable(&info, floors) {
            return;
        }
        let cur: i64 = info.iter().map(|x| x.0).sum();
        if start - cur >= t {
            return;
        }
        let Some((a, b, col)) = find_pair(&info) else {
            return;
        };
        let delta = info[a].0 - info[b].0;
        let la = rows[a][col].coeff(info[a].0 - w[col]);
        let lb = rows[b][col].coeff(info[b].0 - w[col]);
        let coef = f.neg(f.mul(la, f.inv_nz(lb)));
        {
            let (ra, rb) = two_mut(rows, a, b);
            for (x, y) in ra.iter_mut().zip(rb.iter()) {
                x.axpy(f, coef, delta, y);
            }
        }
        floors[a] = floors[a].max(floors[b].saturating_add(delta)).max(NEG_INF);
        truncate_row(&mut rows[a], floors[a], w);
        if let Some(u) = u.as_deref_mut() {
            let (ua, ub) = two_mut(u, a, b);
            for (x, y) in ua.iter_mut().zip(ub.iter()) {
                x.axpy(f, coef, delta, y);
            }
        }
    }
}

/// Unimodular `U` built only from decisions that are exact for `rows` given
/// their floors, aiming to lower the total shifted degree by `t`.
fn reduce(f: &Field, w: &[i64], rows: &Mat, floors: &[i64], t: i64) -> Mat {
    let m = rows.len();
    let info = leading(rows, w);
    if unreliable(&info, floors) || find_pair(&info).is_none() {
        return identity(m);
    }
    let nf: Vec<i64> = floors.iter().zip(&info).map(|(&fl, i)| fl.max(i.0 - t - 1)).collect();
    let mut tr = rows.clone();
    for (row, &fl) in tr.iter_mut().zip(&nf) {
        truncate_row(row, fl, w);
    }
    if t <= BASE_PRECISION {
        let mut u = identity(m);
        let mut fl = nf;
        iterate(f, w, &mut tr, &mut fl, Some(&mut u), t);
        return u;
    }
    let half = t / 2;
    let u1 = reduce(f, w, &tr, &nf, half);
    let (v1, f1) = apply(f, w, &u1, &tr, &nf);
    let info1 = leading(&v1, w);
    if unreliable(&info1, &f1) || find_pair(&info1).is_none() {
        return u1;
    }
    let drop: i64 = info.iter().map(|x| x.0).sum::<i64>() - info1.iter().map(|x| x.0).sum::<i64>();
    if drop < half || drop >= t {
        return u1;
    }
    let slack = info1.iter().zip(&f1).map(|(i, &fl)| i.0 - fl - 1).min().unwrap_or(0);
    let t2 = (t - drop).min(slack);
    if t2 <= 0 {
        return u1;
    }
    let u2 = reduce(f, w, &v1, &f1, t2);
    mat_mul(f, &u2, &u1)
}

/// `U rows` together with the floors below which the product is inexact.
fn apply(f: &Field, w: &[i64], u: &Mat, rows: &Mat, floors: &[i64]) -> (Mat, Vec<i64>) {
    let mut v = mat_mul(f, u, rows);
    let mut nf = Vec::with_capacity(u.len());
    for (i, urow) in u.iter().enumerate() {
        let mut fl = NEG_INF;
        for (j, x) in urow.iter().enumerate() {
            if !x.is_zero() && floors[j] > NEG_INF {
                fl = fl.max(x.deg() + floors[j]);
            }
        }
        truncate_row(&mut v[i], fl, w);
        nf.push(fl);
    }
    (v, nf)
}

fn reduce_to_weak_popov(f: &Field, w: &[i64], rows: &mut Mat, target: i64, fast: bool) {
    let m = rows.len();
    loop {
        let info = leading(rows, w);
        if find_pair(&info).is_none() {
            return;
        }
        let t = info.iter().map(|x| x.0).sum::<i64>() - target;
        if !fast || t <= BASE_PRECISION {
            iterate(f, w, rows, &mut vec![NEG_INF; m], None, i64::MAX);
            return;
        }
        let u = reduce(f, w, rows, &vec![NEG_INF; m], t);
        if is_identity(&u) {
            iterate(f, w, rows, &mut vec![NEG_INF; m], None, i64::MAX);
            return;
        }
        *rows = mat_mul(f, &u, rows);
    }
}

// ---------------------------------------------------------------------------
// matrix products

fn mat_mul(f: &Field, a: &Mat, b: &Mat) -> Mat {
    if let Some(r) = mat_mul_transformed(f, a, b) {
        return r;
    }
    let p = a.len();
    let q = b.len();
    let r = b[0].len();
    let mut out = vec![vec![Lp::zero(); r]; p];
    for i in 0..p {
        for k in 0..r {
            let mut acc = Lp::zero();
            for j in 0..q {
                let prod = Lp::mul(f, &a[i][j], &b[j][k]);
                acc.axpy(f, Fe::ONE, 0, &prod);
            }
            out[i][k] = acc;
        }
    }
    out
}

/// Product with every entry transformed once. Entries are zero-padded at the
/// bottom so that all terms contributing to one output share an exponent
/// base: `B_jk` is aligned to `beta_j + tau_k` and `A_ij` to `gamma_i - beta_j`.
fn mat_mul_transformed(f: &Field, a: &Mat, b: &Mat) -> Option<Mat> {
    if !f.fast_paths() || !f.ntt_friendly() {
        return None;
    }
    let p = a.len();
    let q = b.len();
    let r = b[0].len();
    let beta: Vec<i64> = (0..q).map(|j| b[j].iter().filter(|x| !x.is_zero()).map(|x| x.val).min().unwrap_or(0)).collect();
    let tau: Vec<i64> = (0..r)
        .map(|k| (0..q).filter(|&j| !b[j][k].is_zero()).map(|j| b[j][k].val - beta[j]).min().unwrap_or(0))
        .collect();
    let gamma: Vec<i64> = (0..p)
        .map(|i| (0..q).filter(|&j| !a[i][j].is_zero()).map(|j| a[i][j].val + beta[j]).min().unwrap_or(0))
        .collect();
    let pad_a = |i: usize, j: usize| (a[i][j].val + beta[j] - gamma[i]) as usize;
    let pad_b = |j: usize, k: usize| (b[j][k].val - beta[j] - tau[k]) as usize;
    let mut la = 0usize;
    let mut sa = 0usize;
    for i in 0..p {
        for j in 0..q {
            if !a[i][j].is_zero() {
                la = la.max(pad_a(i, j) + a[i][j].c.len());
                sa += a[i][j].c.len();
            }
        }
    }
    let mut lb = 0usize;
    let mut sb = 0usize;
    for j in 0..q {
        for k in 0..r {
            if !b[j][k].is_zero() {
                lb = lb.max(pad_b(j, k) + b[j][k].c.len());
                sb += b[j][k].c.len();
            }
        }
    }
    if la.min(lb) < crate::poly::NTT_THRESHOLD {
        return None;
    }
    // padding should not dominate the real data
    if la * p * q > 8 * sa.max(1) + 4096 || lb * q * r > 8 * sb.max(1) + 4096 {
        return None;
    }
    let n = product_size(f, la, lb)?;
    let plan = Plan::new(f, n)?;
    let padded = |x: &Lp, pad: usize| {
        let mut v = vec![Fe::ZERO; pad];
        v.extend_from_slice(&x.c);
        v
    };
    let fa: Vec<Vec<Option<Vec<u64>>>> = (0..p)
        .map(|i| (0..q).map(|j| (!a[i][j].is_zero()).then(|| plan.forward_of(&padded(&a[i][j], pad_a(i, j))))).collect())
        .collect();
    let fb: Vec<Vec<Option<Vec<u64>>>> = (0..q)
        .map(|j| (0..r).map(|k| (!b[j][k].is_zero()).then(|| plan.forward_of(&padded(&b[j][k], pad_b(j, k))))).collect())
        .collect();
    let mut out = vec![vec![Lp::zero(); r]; p];
    for i in 0..p {
        for k in 0..r {
            let mut acc = vec![0u64; n];
            let mut any = false;
            for j in 0..q {
                if let (Some(x), Some(y)) = (&fa[i][j], &fb[j][k]) {
                    plan.pointwise_acc(&mut acc, x, y);
                    any = true;
                }
            }
            if !any {
                continue;
            }
            plan.inverse(&mut acc);
            acc.truncate(la + lb - 1);
            let mut e = Lp { val: gamma[i] + tau[k], c: acc.into_iter().map(Fe).collect() };
            e.normalize();
            out[i][k] = e;
        }
    }
    Some(out)
}
