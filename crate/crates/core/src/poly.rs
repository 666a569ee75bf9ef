//! Dense univariate polynomials over a [`Field`] and the fast algorithms built
//! on them: multiplication, division, multipoint evaluation, Lagrange and
//! Hermite interpolation, Hasse derivatives and vanishing polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::ntt;

/// Operand length below which multiplication is schoolbook.
pub const KARATSUBA_THRESHOLD: usize = 32;
/// Minimum operand length for the NTT path.
pub const NTT_THRESHOLD: usize = 64;
/// Point count below which evaluation and interpolation trees stop splitting.
pub const TREE_LEAF: usize = 16;
const NEWTON_DIV_THRESHOLD: usize = 64;

/// Degree of a polynomial; the zero polynomial has degree `MinusInfinity`,
/// which orders below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn of_len(len: usize) -> Degree {
        if len == 0 {
            Degree::MinusInfinity
        } else {
            Degree::Finite(len - 1)
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Integer view with `MinusInfinity` mapped to `i64::MIN`.
    pub fn to_i64(self) -> i64 {
        match self {
            Degree::MinusInfinity => i64::MIN,
            Degree::Finite(d) => d as i64,
        }
    }

    pub fn plus(self, k: usize) -> Degree {
        match self {
            Degree::MinusInfinity => Degree::MinusInfinity,
            Degree::Finite(d) => Degree::Finite(d + k),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial with coefficients in increasing degree, kept normalized (no
/// trailing zeros; the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

pub(crate) fn trim(v: &mut Vec<Fe>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Fe>) -> Poly {
        debug_assert!(coeffs.iter().all(|&c| field.contains(c)));
        trim(&mut coeffs);
        Poly { field: field.clone(), coeffs }
    }

    /// Polynomial from raw integers, each reduced into the field.
    pub fn from_u64s(field: &Field, coeffs: &[u64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.elem(c)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, Fe::ONE)
    }

    pub fn constant(field: &Field, c: Fe) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, Fe::ONE, 1)
    }

    pub fn monomial(field: &Field, c: Fe, d: usize) -> Poly {
        let mut v = vec![Fe::ZERO; d + 1];
        v[d] = c;
        Poly::new(field, v)
    }

    /// `X - a`.
    pub fn linear(field: &Field, a: Fe) -> Poly {
        Poly::new(field, vec![field.neg(a), Fe::ONE])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    pub fn degree(&self) -> Degree {
        Degree::of_len(self.coeffs.len())
    }

    /// Number of stored coefficients (`deg + 1`, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        horner(&self.field, &self.coeffs, x)
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "field mismatch");
        let f = &self.field;
        let (long, short) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut v = long.coeffs.clone();
        for (x, &y) in v.iter_mut().zip(&short.coeffs) {
            *x = f.add(*x, y);
        }
        Poly::new(f, v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "field mismatch");
        let f = &self.field;
        let n = self.len().max(other.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Poly::new(f, v)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly { field: f.clone(), coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fe) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "field mismatch");
        Poly { field: self.field.clone(), coeffs: mul_slices(&self.field, &self.coeffs, &other.coeffs) }
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Multiply by `X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Fe::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs: v }
    }

    /// Reduction modulo `X^n`.
    pub fn truncated(&self, n: usize) -> Poly {
        Poly::new(&self.field, self.coeffs[..n.min(self.len())].to_vec())
    }

    /// Monic multiple (the zero polynomial is returned unchanged).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv_nz(self.lead()))
    }

    /// Quotient and remainder with `deg r < deg b`.
    pub fn div_rem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        self.check(b)?;
        if b.is_zero() {
            return Err(Error::DivideByZero);
        }
        let (q, r) = div_rem_slices(&self.field, &self.coeffs, &b.coeffs);
        Ok((Poly::new(&self.field, q), Poly::new(&self.field, r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.div_rem(b)?.1)
    }

    /// Quotient if `b` divides `self` exactly.
    pub fn div_exact(&self, b: &Poly) -> Result<Option<Poly>> {
        let (q, r) = self.div_rem(b)?;
        Ok(r.is_zero().then_some(q))
    }

    /// The `i`-th Hasse derivative: the coefficient of `Z^i` in `f(X + Z)`.
    pub fn hasse(&self, i: usize) -> Poly {
        if i == 0 {
            return self.clone();
        }
        let f = &self.field;
        if self.len() <= i {
            return Poly::zero(f);
        }
        let v = (0..self.len() - i)
            .map(|j| {
                let c = self.coeffs[j + i];
                if c.is_zero() {
                    c
                } else {
                    f.mul(f.binomial((j + i) as u64, i as u64), c)
                }
            })
            .collect();
        Poly::new(f, v)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        self.hasse(1)
    }

    /// Values at every point; uses a subproduct tree above [`TREE_LEAF`] points.
    pub fn eval_many(&self, points: &[Fe]) -> Vec<Fe> {
        if points.len() <= TREE_LEAF || self.len() <= TREE_LEAF || !self.field.fast_paths() {
            return points.iter().map(|&x| self.eval(x)).collect();
        }
        let tree = Tree::build(&self.field, points, 1, TREE_LEAF);
        tree.evaluate(self)
    }

    pub fn try_eval_many(&self, points: &[Fe]) -> Result<Vec<Fe>> {
        if points.iter().any(|&x| !self.field.contains(x)) {
            return Err(Error::FieldMismatch);
        }
        Ok(self.eval_many(points))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

pub(crate) fn horner(f: &Field, c: &[Fe], x: Fe) -> Fe {
    c.iter().rev().fold(Fe::ZERO, |acc, &a| f.add(f.mul(acc, x), a))
}

// ---------------------------------------------------------------------------
// multiplication kernels

/// Product of coefficient slices, dispatching on size and field.
pub(crate) fn mul_slices(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let small = a.len().min(b.len());
    if !f.fast_paths() || small < KARATSUBA_THRESHOLD {
        return schoolbook(f, a, b);
    }
    if small >= NTT_THRESHOLD {
        if let Some(mut v) = ntt::mul(f, a, b) {
            trim(&mut v);
            return v;
        }
    }
    let mut v = karatsuba(f, a, b);
    trim(&mut v);
    v
}

pub(crate) fn schoolbook(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    let p = f.characteristic();
    if f.is_prime_field() && p < (1 << 32) {
        // products fit in u64; accumulate in u128 and reduce once
        let mut acc = vec![0u128; n];
        for (i, &x) in a.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            let row = &mut acc[i..i + b.len()];
            for (slot, &y) in row.iter_mut().zip(b) {
                *slot += (x.0 * y.0) as u128;
            }
        }
        let mut out: Vec<Fe> = acc.into_iter().map(|v| Fe((v % p as u128) as u64)).collect();
        trim(&mut out);
        return out;
    }
    let mut out = vec![Fe::ZERO; n];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

fn add_slices(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut v = long.to_vec();
    for (x, &y) in v.iter_mut().zip(short) {
        *x = f.add(*x, y);
    }
    v
}

/// Untrimmed product of length `a.len() + b.len() - 1`.
fn karatsuba(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let n = a.len() + b.len() - 1;
    let mut out = vec![Fe::ZERO; n];
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.len() < KARATSUBA_THRESHOLD {
        let p = schoolbook(f, long, short);
        out[..p.len()].copy_from_slice(&p);
        return out;
    }
    if short.len() * 2 <= long.len() {
        // unbalanced: multiply chunk by chunk
        for (ci, chunk) in long.chunks(short.len()).enumerate() {
            let p = karatsuba(f, chunk, short);
            let off = ci * short.len();
            for (k, &c) in p.iter().enumerate() {
                out[off + k] = f.add(out[off + k], c);
            }
        }
        return out;
    }
    let m = long.len() / 2;
    let (l0, l1) = long.split_at(m);
    let (s0, s1) = short.split_at(m.min(short.len()));
    let z0 = karatsuba(f, l0, s0);
    let z2 = if s1.is_empty() { Vec::new() } else { karatsuba(f, l1, s1) };
    let ls = add_slices(f, l0, l1);
    let ss = add_slices(f, s0, s1);
    let mut z1 = karatsuba(f, &ls, &ss);
    for (i, &c) in z0.iter().enumerate() {
        z1[i] = f.sub(z1[i], c);
    }
    for (i, &c) in z2.iter().enumerate() {
        z1[i] = f.sub(z1[i], c);
    }
    for (i, &c) in z0.iter().enumerate() {
        out[i] = f.add(out[i], c);
    }
    for (i, &c) in z1.iter().enumerate() {
        if m + i < n {
            out[m + i] = f.add(out[m + i], c);
        } else {
            debug_assert!(c.is_zero());
        }
    }
    for (i, &c) in z2.iter().enumerate() {
        out[2 * m + i] = f.add(out[2 * m + i], c);
    }
    out
}

// ---------------------------------------------------------------------------
// division

/// Inverse of a power series with nonzero constant term, modulo `X^n`.
pub(crate) fn inv_series(f: &Field, a: &[Fe], n: usize) -> Vec<Fe> {
    debug_assert!(!a[0].is_zero());
    if !f.fast_paths() || n <= NEWTON_DIV_THRESHOLD {
        // direct recurrence
        let mut g = vec![Fe::ZERO; n];
        g[0] = f.inv_nz(a[0]);
        let c0 = g[0];
        for i in 1..n {
            let mut s = Fe::ZERO;
            for j in 1..=i.min(a.len() - 1) {
                s = f.add(s, f.mul(a[j], g[i - j]));
            }
            g[i] = f.neg(f.mul(s, c0));
        }
        return g;
    }
    let mut g = vec![f.inv_nz(a[0])];
    let mut prec = 1;
    while prec < n {
        let next = (2 * prec).min(n);
        let head = &a[..next.min(a.len())];
        let mut e = mul_slices(f, head, &g);
        e.resize(next, Fe::ZERO);
        e.truncate(next);
        // g <- g (2 - a g) = g - g (a g - 1)
        e[0] = f.sub(e[0], Fe::ONE);
        let mut corr = mul_slices(f, &g, &e);
        corr.resize(next, Fe::ZERO);
        g.resize(next, Fe::ZERO);
        for i in 0..next {
            g[i] = f.sub(g[i], corr[i]);
        }
        prec = next;
    }
    g.truncate(n);
    g
}

pub(crate) fn div_rem_slices(f: &Field, a: &[Fe], b: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    debug_assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let qlen = a.len() - b.len() + 1;
    if !f.fast_paths() || b.len() < NEWTON_DIV_THRESHOLD || qlen < NEWTON_DIV_THRESHOLD {
        return div_rem_schoolbook(f, a, b);
    }
    let rev_a: Vec<Fe> = a.iter().rev().take(qlen).copied().collect();
    let rev_b: Vec<Fe> = b.iter().rev().copied().collect();
    let inv = inv_series(f, &rev_b, qlen);
    let mut qr = mul_slices(f, &rev_a, &inv);
    qr.resize(qlen, Fe::ZERO);
    qr.truncate(qlen);
    qr.reverse();
    let mut q = qr;
    trim(&mut q);
    let qb = mul_slices(f, &q, b);
    let rlen = b.len() - 1;
    let mut r: Vec<Fe> = (0..rlen).map(|i| f.sub(a[i], qb.get(i).copied().unwrap_or(Fe::ZERO))).collect();
    trim(&mut r);
    (q, r)
}

fn div_rem_schoolbook(f: &Field, a: &[Fe], b: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    let db = b.len() - 1;
    let lead_inv = f.inv_nz(b[db]);
    let mut r = a.to_vec();
    let qlen = a.len() - db;
    let mut q = vec![Fe::ZERO; qlen];
    for i in (0..qlen).rev() {
        let c = f.mul(r[i + db], lead_inv);
        q[i] = c;
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            r[i + j] = f.sub(r[i + j], f.mul(c, b[j]));
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

// ---------------------------------------------------------------------------
// subproduct trees

struct Node {
    lo: usize,
    hi: usize,
    poly: Poly,
    children: Option<(Box<Node>, Box<Node>)>,
    /// Inverse of the reversed node polynomial modulo `X^deg`, built on first use.
    rev_inv: std::sync::OnceLock<Vec<Fe>>,
}

impl Node {
    fn new(lo: usize, hi: usize, poly: Poly, children: Option<(Box<Node>, Box<Node>)>) -> Node {
        Node { lo, hi, poly, children, rev_inv: std::sync::OnceLock::new() }
    }

    /// `p mod poly`, reusing the cached inverse when the quotient is short enough.
    fn rem(&self, p: &Poly) -> Poly {
        let f = p.field();
        let b = self.poly.coeffs();
        let db = b.len() - 1;
        if p.len() <= db {
            return p.clone();
        }
        let qlen = p.len() - db;
        if !f.fast_paths() || db < NEWTON_DIV_THRESHOLD || qlen > db {
            return p.rem(&self.poly).expect("nonzero modulus");
        }
        let inv = self.rev_inv.get_or_init(|| {
            let rev_b: Vec<Fe> = b.iter().rev().copied().collect();
            inv_series(f, &rev_b, db)
        });
        let rev_a: Vec<Fe> = p.coeffs().iter().rev().take(qlen).copied().collect();
        let mut q = mul_slices(f, &rev_a, &inv[..qlen]);
        q.resize(qlen, Fe::ZERO);
        q.reverse();
        trim(&mut q);
        let qb = mul_slices(f, &q, b);
        let a = p.coeffs();
        Poly::new(f, (0..db).map(|i| f.sub(a[i], qb.get(i).copied().unwrap_or(Fe::ZERO))).collect())
    }
}

/// Balanced product tree of `(X - a_i)^w` over a point sequence.
pub(crate) struct Tree {
    points: Vec<Fe>,
    root: Node,
}

impl Tree {
    pub(crate) fn build(f: &Field, points: &[Fe], mult: usize, leaf: usize) -> Tree {
        let root = build_node(f, points, 0, points.len(), mult, leaf.max(1));
        Tree { points: points.to_vec(), root }
    }

    pub(crate) fn product(&self) -> &Poly {
        &self.root.poly
    }

    pub(crate) fn evaluate(&self, p: &Poly) -> Vec<Fe> {
        let mut out = vec![Fe::ZERO; self.points.len()];
        let r = self.root.rem(p);
        eval_node(&self.root, &r, &self.points, &mut out);
        out
    }

    /// Combine per-leaf residues `u_leaf` into `sum_leaf u_leaf * (M / M_leaf)`.
    pub(crate) fn combine(&self, leaf_value: &mut dyn FnMut(usize, usize, &Poly) -> Poly) -> Poly {
        combine_node(&self.root, leaf_value)
    }
}

fn linear_power(f: &Field, a: Fe, w: usize) -> Vec<Fe> {
    // (X - a)^w by the binomial theorem
    let na = f.neg(a);
    let mut out = vec![Fe::ZERO; w + 1];
    let mut pw = Fe::ONE;
    for t in (0..=w).rev() {
        out[t] = f.mul(f.binomial(w as u64, t as u64), pw);
        pw = f.mul(pw, na);
    }
    out
}

fn build_node(f: &Field, points: &[Fe], lo: usize, hi: usize, mult: usize, leaf: usize) -> Node {
    if hi - lo <= leaf {
        let mut acc = vec![Fe::ONE];
        for &a in &points[lo..hi] {
            let factor = linear_power(f, a, mult);
            acc = schoolbook_untrimmed(f, &acc, &factor);
        }
        return Node::new(lo, hi, Poly::new(f, acc), None);
    }
    let mid = (lo + hi) / 2;
    let l = build_node(f, points, lo, mid, mult, leaf);
    let r = build_node(f, points, mid, hi, mult, leaf);
    let poly = l.poly.mul(&r.poly);
    Node::new(lo, hi, poly, Some((Box::new(l), Box::new(r))))
}

fn schoolbook_untrimmed(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut v = schoolbook(f, a, b);
    v.resize(a.len() + b.len() - 1, Fe::ZERO);
    v
}

fn eval_node(node: &Node, p: &Poly, points: &[Fe], out: &mut [Fe]) {
    match &node.children {
        None => {
            for i in node.lo..node.hi {
                out[i] = p.eval(points[i]);
            }
        }
        Some((l, r)) => {
            for child in [l, r] {
                eval_node(child, &child.rem(p), points, out);
            }
        }
    }
}

fn combine_node(node: &Node, leaf_value: &mut dyn FnMut(usize, usize, &Poly) -> Poly) -> Poly {
    match &node.children {
        None => leaf_value(node.lo, node.hi, &node.poly),
        Some((l, r)) => {
            let ul = combine_node(l, leaf_value);
            let ur = combine_node(r, leaf_value);
            ul.mul(&r.poly).add(&ur.mul(&l.poly))
        }
    }
}

// ---------------------------------------------------------------------------
// interpolation

fn batch_inverse(f: &Field, v: &[Fe]) -> Vec<Fe> {
    let mut prefix = Vec::with_capacity(v.len());
    let mut acc = Fe::ONE;
    for &x in v {
        prefix.push(acc);
        acc = f.mul(acc, x);
    }
    let mut inv = f.inv_nz(acc);
    let mut out = vec![Fe::ZERO; v.len()];
    for i in (0..v.len()).rev() {
        out[i] = f.mul(inv, prefix[i]);
        inv = f.mul(inv, v[i]);
    }
    out
}

/// Synthetic division of a monic polynomial by `X - a`, discarding the remainder.
fn div_linear(f: &Field, p: &[Fe], a: Fe) -> Vec<Fe> {
    let n = p.len() - 1;
    let mut q = vec![Fe::ZERO; n];
    let mut carry = Fe::ZERO;
    for i in (0..n).rev() {
        carry = f.add(p[i + 1], f.mul(carry, a));
        q[i] = carry;
    }
    q
}

/// The unique polynomial of degree `< n` through `(xs[i], ys[i])`.
pub fn lagrange(f: &Field, xs: &[Fe], ys: &[Fe]) -> Result<Poly> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.is_empty() {
        return Ok(Poly::zero(f));
    }
    PointSet::new(f, xs)?.interpolate(ys)
}

/// Distinct points prepared for repeated evaluation and interpolation.
///
/// Geometric progressions `a, a r, a r^2, ..` use chirp transforms and
/// closed forms in `O(M(n))`; any other set uses a cached subproduct tree.
pub struct PointSet {
    field: Field,
    points: Vec<Fe>,
    layout: Layout,
}

enum Layout {
    Tree { tree: Tree, weights_inv: std::sync::OnceLock<Result<Vec<Fe>>> },
    Geometric(Geometric),
}

impl PointSet {
    pub fn new(f: &Field, xs: &[Fe]) -> Result<PointSet> {
        if xs.is_empty() {
            return Err(Error::InvalidParameters("empty point set".into()));
        }
        let layout = match Geometric::detect(f, xs) {
            Some(g) => Layout::Geometric(g),
            None => Layout::Tree { tree: Tree::build(f, xs, 1, TREE_LEAF), weights_inv: std::sync::OnceLock::new() },
        };
        Ok(PointSet { field: f.clone(), points: xs.to_vec(), layout })
    }

    /// Whether the fast geometric-progression routines are in use.
    pub fn is_geometric(&self) -> bool {
        matches!(self.layout, Layout::Geometric(_))
    }

    pub fn points(&self) -> &[Fe] {
        &self.points
    }

    /// `prod (X - x_i)`.
    pub fn vanishing(&self) -> &Poly {
        match &self.layout {
            Layout::Tree { tree, .. } => tree.product(),
            Layout::Geometric(g) => &g.vanishing,
        }
    }

    pub fn evaluate(&self, p: &Poly) -> Vec<Fe> {
        if self.points.len() <= TREE_LEAF || p.len() <= TREE_LEAF || !self.field.fast_paths() {
            return self.points.iter().map(|&x| p.eval(x)).collect();
        }
        match &self.layout {
            Layout::Tree { tree, .. } => tree.evaluate(p),
            Layout::Geometric(g) => g.evaluate(&self.field, p),
        }
    }

    pub fn interpolate(&self, ys: &[Fe]) -> Result<Poly> {
        let (f, xs) = (&self.field, self.points());
        if ys.len() != xs.len() {
            return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
        }
        let (tree, weights_inv) = match &self.layout {
            Layout::Geometric(g) => return Ok(g.interpolate(f, ys)),
            Layout::Tree { tree, weights_inv } => (tree, weights_inv),
        };
        let winv = weights_inv.get_or_init(|| {
            let w = tree.evaluate(&tree.product().derivative());
            match w.iter().position(|c| c.is_zero()) {
                Some(i) => Err(Error::DuplicatePoint(i)),
                None => Ok(batch_inverse(f, &w)),
            }
        });
        let winv = winv.as_deref().map_err(Clone::clone)?;
        let c: Vec<Fe> = ys.iter().zip(winv).map(|(&y, &wi)| f.mul(y, wi)).collect();
        Ok(tree.combine(&mut |lo, hi, leaf: &Poly| {
            let mut acc = vec![Fe::ZERO; hi - lo];
            for i in lo..hi {
                if c[i].is_zero() {
                    continue;
                }
                let q = div_linear(f, leaf.coeffs(), xs[i]);
                for (slot, &qc) in acc.iter_mut().zip(&q) {
                    *slot = f.add(*slot, f.mul(c[i], qc));
                }
            }
            Poly::new(f, acc)
        }))
    }
}

/// Points `a r^i` for `i < n` with `r^i != 1` for `0 < i < n`.
struct Geometric {
    n: usize,
    /// `a^i` for `i < n`.
    a_pow: Vec<Fe>,
    /// `a^-i` for `i < n`.
    a_inv_pow: Vec<Fe>,
    /// `r^(m choose 2)` for `m < 2n`.
    chirp: Vec<Fe>,
    /// Inverses of `chirp`.
    chirp_inv: Vec<Fe>,
    /// `u_i = prod_{t=1..i} (r^t - 1)` for `i <= n`.
    u: Vec<Fe>,
    /// `1 / u_i`.
    u_inv: Vec<Fe>,
    /// `(-1)^i r^(i choose 2) / u_i`, the inverse series of `sum X^i / u_i`.
    alt: Vec<Fe>,
    vanishing: Poly,
}

impl Geometric {
    fn detect(f: &Field, xs: &[Fe]) -> Option<Geometric> {
        let n = xs.len();
        if n <= TREE_LEAF || !f.fast_paths() || xs[0].is_zero() {
            return None;
        }
        let r = f.mul(xs[1], f.inv_nz(xs[0]));
        if xs.windows(2).any(|w| w[1] != f.mul(w[0], r)) {
            return None;
        }
        let mut u = Vec::with_capacity(n + 1);
        u.push(Fe::ONE);
        let mut rt = Fe::ONE;
        for _ in 1..=n {
            rt = f.mul(rt, r);
            u.push(f.mul(*u.last().unwrap(), f.sub(rt, Fe::ONE)));
        }
        // a repeated point makes some r^t = 1 with t < n
        if u[n - 1].is_zero() {
            return None;
        }
        let u_inv = if u[n].is_zero() {
            let mut v = batch_inverse(f, &u[..n]);
            v.push(Fe::ZERO);
            v
        } else {
            batch_inverse(f, &u)
        };
        let mut chirp = Vec::with_capacity(2 * n);
        let (mut c, mut rm) = (Fe::ONE, Fe::ONE);
        for _ in 0..2 * n {
            chirp.push(c);
            c = f.mul(c, rm);
            rm = f.mul(rm, r);
        }
        let chirp_inv = batch_inverse(f, &chirp);
        let alt: Vec<Fe> =
            (0..n).map(|i| { let t = f.mul(chirp[i], u_inv[i]); if i % 2 == 1 { f.neg(t) } else { t } }).collect();
        let a = xs[0];
        let a_pow = successive(f, a, n + 1);
        let a_inv_pow = successive(f, f.inv_nz(a), n);
        // prod (X - a r^i) = sum_t (-1)^(n-t) r^C(n-t,2) [n t]_r a^(n-t) X^t
        let vanishing = if u[n].is_zero() {
            None
        } else {
            Some(Poly::new(
                f,
                (0..=n)
                    .map(|t| {
                        let j = n - t;
                        let binom = f.mul(u[n], f.mul(u_inv[t], u_inv[j]));
                        let v = f.mul(f.mul(chirp[j], binom), a_pow[j]);
                        if j % 2 == 1 { f.neg(v) } else { v }
                    })
                    .collect(),
            ))
        };
        let mut g = Geometric { n, a_inv_pow, chirp, chirp_inv, u, u_inv, alt, vanishing: Poly::zero(f), a_pow };
        g.a_pow.truncate(n);
        // r^n = 1 (the points fill a whole coset) has no closed form above
        g.vanishing = vanishing.unwrap_or_else(|| Tree::build(f, xs, 1, TREE_LEAF).product().clone());
        Some(g)
    }

    fn evaluate(&self, f: &Field, p: &Poly) -> Vec<Fe> {
        let n = self.n;
        let reduced;
        let p = if p.len() > n {
            reduced = p.rem(&self.vanishing).expect("nonzero modulus");
            &reduced
        } else {
            p
        };
        let d = p.len();
        if d == 0 {
            return vec![Fe::ZERO; n];
        }
        // p(a r^i) = r^-C(i,2) sum_j (p_j a^j r^-C(j,2)) r^C(i+j,2)
        let b: Vec<Fe> =
            (0..d).rev().map(|j| f.mul(f.mul(p.coeffs()[j], self.a_pow[j]), self.chirp_inv[j])).collect();
        let conv = mul_slices(f, &b, &self.chirp[..n + d - 1]);
        (0..n).map(|i| f.mul(self.chirp_inv[i], conv.get(d - 1 + i).copied().unwrap_or(Fe::ZERO))).collect()
    }

    fn interpolate(&self, f: &Field, ys: &[Fe]) -> Poly {
        let n = self.n;
        // Newton coefficients c_j via (sum y_i/u_i X^i) (sum X^i/u_i)^-1
        let v: Vec<Fe> = ys.iter().zip(&self.u_inv).map(|(&y, &ui)| f.mul(y, ui)).collect();
        let mut scaled = mul_slices(f, &v, &self.alt);
        scaled.resize(n, Fe::ZERO);
        // A_j = c_j u_j where c_j = scaled_j / r^C(j,2); reversed for the correlation
        let a: Vec<Fe> = (0..n).rev().map(|j| f.mul(f.mul(scaled[j], self.chirp_inv[j]), self.u[j])).collect();
        // f_t u_t = sum_m A_(t+m) alt_m
        let conv = mul_slices(f, &a, &self.alt);
        let coeffs = (0..n)
            .map(|t| {
                let c = conv.get(n - 1 - t).copied().unwrap_or(Fe::ZERO);
                f.mul(f.mul(c, self.u_inv[t]), self.a_inv_pow[t])
            })
            .collect();
        Poly::new(f, coeffs)
    }
}

fn successive(f: &Field, x: Fe, n: usize) -> Vec<Fe> {
    let mut out = Vec::with_capacity(n);
    let mut acc = Fe::ONE;
    for _ in 0..n {
        out.push(acc);
        acc = f.mul(acc, x);
    }
    out
}

fn series_mul(f: &Field, a: &[Fe], b: &[Fe], n: usize) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn series_pow(f: &Field, a: &[Fe], mut e: usize, n: usize) -> Vec<Fe> {
    let mut base = a[..a.len().min(n)].to_vec();
    let mut acc = vec![Fe::ZERO; n];
    acc[0] = Fe::ONE;
    while e > 0 {
        if e & 1 == 1 {
            acc = series_mul(f, &acc, &base, n);
        }
        e >>= 1;
        if e > 0 {
            base = series_mul(f, &base, &base, n);
        }
    }
    acc
}

/// Minimal-degree `f` with `f^{(i)}(xs[j]) = data[j][i]` for every point `j`
/// and every Hasse derivative order `i < s`, where `s = data[j].len()` is the
/// same for all points. The result has degree `< s n`.
pub fn hermite(f: &Field, xs: &[Fe], data: &[Vec<Fe>]) -> Result<Poly> {
    if xs.len() != data.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: data.len() });
    }
    if xs.is_empty() {
        return Ok(Poly::zero(f));
    }
    let s = data[0].len();
    if let Some(bad) = data.iter().find(|d| d.len() != s) {
        return Err(Error::LengthMismatch { expected: s, got: bad.len() });
    }
    if s == 0 {
        return Ok(Poly::zero(f));
    }
    if s == 1 {
        let ys: Vec<Fe> = data.iter().map(|d| d[0]).collect();
        return lagrange(f, xs, &ys);
    }
    let n = xs.len();
    // Taylor coefficients of P / (X - a_j) at a_j are the Hasse derivatives
    // P^{(t+1)}(a_j), where P = prod (X - a_i).
    let simple = Tree::build(f, xs, 1, TREE_LEAF);
    let p = simple.product().clone();
    let mut local = vec![vec![Fe::ZERO; s]; n];
    for t in 0..s {
        let vals = simple.evaluate(&p.hasse(t + 1));
        for j in 0..n {
            local[j][t] = vals[j];
        }
    }
    if let Some(j) = local.iter().position(|g| g[0].is_zero()) {
        return Err(Error::DuplicatePoint(j));
    }
    let mut residues = Vec::with_capacity(n);
    for j in 0..n {
        // c_j = r_j * (G_j^s)^{-1} mod z^s, then z -> X - a_j
        let g = series_pow(f, &local[j], s, s);
        let ginv = inv_series(f, &g, s);
        let c = series_mul(f, &data[j], &ginv, s);
        let lin = [f.neg(xs[j]), Fe::ONE];
        let mut acc = vec![Fe::ZERO];
        for t in (0..s).rev() {
            acc = schoolbook_untrimmed(f, &acc, &lin);
            acc[0] = f.add(acc[0], c[t]);
        }
        residues.push(Poly::new(f, acc));
    }
    let tree = Tree::build(f, xs, s, 1);
    Ok(tree.combine(&mut |lo, _hi, _leaf: &Poly| residues[lo].clone()))
}

/// `prod (X - a)^mult` over all points, by a balanced product tree.
pub fn vanishing(f: &Field, points: &[Fe], mult: usize) -> Poly {
    if points.is_empty() || mult == 0 {
        return Poly::one(f);
    }
    Tree::build(f, points, mult, TREE_LEAF).product().clone()
}

/// Total order used for deterministic tie-breaking between polynomials of the
/// same field: by degree, then coefficients from the top down.
pub fn cmp_polys(a: &Poly, b: &Poly) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_poly(f: &Field, len: usize, rng: &mut ChaCha8Rng) -> Poly {
        Poly::new(f, (0..len).map(|_| f.random(rng)).collect())
    }

    #[test]
    fn geometric_point_sets_match_horner() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cases: [(u64, u32, usize); 5] = [(65537, 1, 17), (65537, 1, 300), (257, 1, 40), (5, 3, 60), (257, 1, 32)];
        for (i, &(p, m, n)) in cases.iter().enumerate() {
            let f = make_field(p, m).unwrap();
            let g = f.find_generator().unwrap();
            // the last case is a full coset of the order-32 subgroup, where r^n = 1
            let r = if i == 4 { f.pow(g, 8) } else { g };
            let a = f.random_nonzero(&mut rng);
            let xs: Vec<Fe> = (0..n as u64).map(|i| f.mul(a, f.pow(r, i))).collect();
            let set = PointSet::new(&f, &xs).unwrap();
            assert!(set.is_geometric());
            for x in &xs {
                assert!(set.vanishing().eval(*x).is_zero());
            }
            assert_eq!(set.vanishing().len(), n + 1);
            assert_eq!(set.vanishing().lead(), Fe::ONE);
            for len in [1, n / 2, n, 2 * n + 5] {
                let q = rand_poly(&f, len, &mut rng);
                let horner: Vec<Fe> = xs.iter().map(|&x| q.eval(x)).collect();
                assert_eq!(set.evaluate(&q), horner);
            }
            let ys: Vec<Fe> = (0..n).map(|_| f.random(&mut rng)).collect();
            let interp = set.interpolate(&ys).unwrap();
            assert!(interp.len() <= n);
            assert_eq!(xs.iter().map(|&x| interp.eval(x)).collect::<Vec<_>>(), ys);
        }
    }

    #[test]
    fn non_geometric_sets_use_the_tree() {
        let f = make_field(65537, 1).unwrap();
        let mut xs: Vec<Fe> = (1..40).map(Fe).collect();
        xs.swap(3, 30);
        let set = PointSet::new(&f, &xs).unwrap();
        assert!(!set.is_geometric());
        let ys: Vec<Fe> = xs.iter().map(|x| f.mul(*x, *x)).collect();
        assert_eq!(set.interpolate(&ys).unwrap(), Poly::monomial(&f, Fe::ONE, 2));
        let dup: Vec<Fe> = (0..20).map(|i| Fe(i % 19 + 1)).collect();
        assert!(matches!(PointSet::new(&f, &dup).unwrap().interpolate(&dup), Err(Error::DuplicatePoint(_))));
    }

    #[test]
    fn frobenius_square_in_char_two() {
        let f = make_field(2, 1).unwrap();
        let a = Poly::from_u64s(&f, &[1, 1]);
        assert_eq!(a.mul(&a), Poly::from_u64s(&f, &[1, 0, 1]));
        assert!(a.mul(&Poly::zero(&f)).is_zero());
    }

    #[test]
    fn kernels_agree_with_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [7u64, 65537, (1 << 61) - 1] {
            let f = make_field(p, 1).unwrap();
            for &(la, lb) in &[(51, 51), (40, 300), (300, 700), (1000, 1000), (33, 2000)] {
                let a = rand_poly(&f, la, &mut rng);
                let b = rand_poly(&f, lb, &mut rng);
                let s = schoolbook(&f, a.coeffs(), b.coeffs());
                assert_eq!(mul_slices(&f, a.coeffs(), b.coeffs()), s, "p={p} {la}x{lb}");
                let mut k = karatsuba(&f, a.coeffs(), b.coeffs());
                trim(&mut k);
                assert_eq!(k, s);
            }
        }
        let f = make_field(3, 3).unwrap();
        let a = rand_poly(&f, 90, &mut rng);
        let b = rand_poly(&f, 70, &mut rng);
        assert_eq!(mul_slices(&f, a.coeffs(), b.coeffs()), schoolbook(&f, a.coeffs(), b.coeffs()));
    }

    #[test]
    fn division_examples() {
        let f = make_field(7, 1).unwrap();
        let a = Poly::from_u64s(&f, &[6, 0, 1]);
        let b = Poly::from_u64s(&f, &[6, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, Poly::from_u64s(&f, &[1, 1]));
        assert!(r.is_zero());
        let (q, r) = a.div_rem(&a).unwrap();
        assert_eq!(q, Poly::one(&f));
        assert!(r.is_zero());
        assert_eq!(a.div_rem(&Poly::zero(&f)).unwrap_err(), Error::DivideByZero);
    }

    #[test]
    fn newton_division_recombines() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = make_field(65537, 1).unwrap();
        for &(la, lb) in &[(500, 100), (3000, 1200), (200, 199), (130, 65)] {
            let a = rand_poly(&f, la, &mut rng);
            let b = rand_poly(&f, lb, &mut rng);
            let (q, r) = a.div_rem(&b).unwrap();
            assert!(r.degree() < b.degree());
            assert_eq!(q.mul(&b).add(&r), a);
            let (qs, rs) = div_rem_schoolbook(&f, a.coeffs(), b.coeffs());
            assert_eq!((q.coeffs().to_vec(), r.coeffs().to_vec()), (qs, rs));
        }
    }

    #[test]
    fn multipoint_matches_horner() {
        let f = make_field(5, 1).unwrap();
        let sq = Poly::from_u64s(&f, &[0, 0, 1]);
        assert_eq!(sq.eval_many(&[Fe(1), Fe(2), Fe(3)]), vec![Fe(1), Fe(4), Fe(4)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_field(65537, 1).unwrap();
        let p = rand_poly(&f, 64, &mut rng);
        let pts: Vec<Fe> = (0..64).map(|_| f.random(&mut rng)).collect();
        let horner: Vec<Fe> = pts.iter().map(|&x| p.eval(x)).collect();
        assert_eq!(Tree::build(&f, &pts, 1, TREE_LEAF).evaluate(&p), horner);
        // repeated points are fine
        let rep = vec![Fe(5); 40];
        assert_eq!(p.eval_many(&rep), vec![p.eval(Fe(5)); 40]);
    }

    #[test]
    fn lagrange_examples() {
        let f = make_field(7, 1).unwrap();
        let p = lagrange(&f, &[Fe(1), Fe(2), Fe(3)], &[Fe(2), Fe(4), Fe(6)]).unwrap();
        assert_eq!(p, Poly::from_u64s(&f, &[0, 2]));
        assert_eq!(lagrange(&f, &[Fe(4)], &[Fe(3)]).unwrap(), Poly::constant(&f, Fe(3)));
        assert_eq!(lagrange(&f, &[Fe(1), Fe(2), Fe(1)], &[Fe(0); 3]).unwrap_err(), Error::DuplicatePoint(0));
    }

    #[test]
    fn lagrange_round_trip_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = make_field(65537, 1).unwrap();
        let g = f.find_generator().unwrap();
        let xs: Vec<Fe> = (0..700).map(|i| f.pow(g, i)).collect();
        let p = rand_poly(&f, 700, &mut rng);
        let ys = p.eval_many(&xs);
        assert_eq!(lagrange(&f, &xs, &ys).unwrap(), p);
    }

    #[test]
    fn hasse_examples() {
        let f = make_field(2, 1).unwrap();
        let x3 = Poly::from_u64s(&f, &[0, 0, 0, 1]);
        assert_eq!(x3.hasse(2), Poly::x(&f));
        assert_eq!(x3.hasse(0), x3);
    }

    #[test]
    fn hermite_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(p, s, n) in &[(13u64, 3usize, 4usize), (65537, 4, 40), (7, 6, 1), (5, 7, 1)] {
            let f = make_field(p, 1).unwrap();
            let xs: Vec<Fe> = (1..=n as u64).map(Fe).collect();
            let poly = rand_poly(&f, s * n, &mut rng);
            let data: Vec<Vec<Fe>> = xs.iter().map(|&x| (0..s).map(|i| poly.hasse(i).eval(x)).collect()).collect();
            assert_eq!(hermite(&f, &xs, &data).unwrap(), poly, "p={p} s={s} n={n}");
        }
        let f = make_field(7, 1).unwrap();
        assert_eq!(hermite(&f, &[Fe(1)], &[vec![Fe(1), Fe(0)]]).unwrap(), Poly::one(&f));
    }

    #[test]
    fn vanishing_examples() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(vanishing(&f, &[Fe(1)], 1), Poly::from_u64s(&f, &[4, 1]));
        assert_eq!(vanishing(&f, &[], 3), Poly::one(&f));
        let f = make_field(7, 1).unwrap();
        let a = Poly::linear(&f, Fe(1));
        let b = Poly::linear(&f, Fe(2));
        let want = a.mul(&a).mul(&b).mul(&b);
        assert_eq!(vanishing(&f, &[Fe(1), Fe(2)], 2), want);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = make_field(65537, 1).unwrap();
        let pts: Vec<Fe> = (0..100).map(|_| f.random_nonzero(&mut rng)).collect();
        let v = vanishing(&f, &pts, 3);
        assert_eq!(v.degree(), Degree::Finite(300));
        for &a in pts.iter().take(10) {
            for i in 0..3 {
                assert!(v.hasse(i).eval(a).is_zero());
            }
        }
        let _ = rng.gen::<u8>();
    }
}
