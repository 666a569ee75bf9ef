//! Radix-2 number-theoretic transform over NTT-friendly prime fields.

use crate::field::{inv_mod, Fe, Field};

pub(crate) struct Plan<'a> {
    field: &'a Field,
    n: usize,
    /// `w^j` for `j < n/2`, forward direction.
    twiddles: Vec<u64>,
    inv_twiddles: Vec<u64>,
    n_inv: u64,
}

impl<'a> Plan<'a> {
    /// Plan for transforms of length `n` (a power of two); `None` if the field
    /// has no root of unity of that order.
    pub(crate) fn new(field: &'a Field, n: usize) -> Option<Self> {
        debug_assert!(n.is_power_of_two());
        let log = n.trailing_zeros();
        let w = field.root_of_unity(log)?;
        let p = field.characteristic();
        let w_inv = inv_mod(w, p);
        let half = (n / 2).max(1);
        let mut twiddles = Vec::with_capacity(half);
        let mut inv_twiddles = Vec::with_capacity(half);
        let (mut a, mut b) = (1u64, 1u64);
        for _ in 0..half {
            twiddles.push(a);
            inv_twiddles.push(b);
            a = field.mul_raw(a, w);
            b = field.mul_raw(b, w_inv);
        }
        Some(Plan { field, n, twiddles, inv_twiddles, n_inv: inv_mod(n as u64 % p, p) })
    }

    pub(crate) fn forward(&self, a: &mut [u64]) {
        self.run(a, &self.twiddles);
    }

    pub(crate) fn inverse(&self, a: &mut [u64]) {
        self.run(a, &self.inv_twiddles);
        for x in a.iter_mut() {
            *x = self.field.mul_raw(*x, self.n_inv);
        }
    }

    fn run(&self, a: &mut [u64], tw: &[u64]) {
        let n = self.n;
        debug_assert_eq!(a.len(), n);
        let p = self.field.characteristic();
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let u = a[start + k];
                    let v = self.field.mul_raw(a[start + k + half], tw[k * step]);
                    let s = u + v;
                    a[start + k] = if s >= p { s - p } else { s };
                    a[start + k + half] = if u >= v { u - v } else { u + p - v };
                }
            }
            len <<= 1;
        }
    }

    /// Zero-padded forward transform of a coefficient slice.
    pub(crate) fn forward_of(&self, c: &[Fe]) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        for (dst, src) in v.iter_mut().zip(c) {
            *dst = src.0;
        }
        self.forward(&mut v);
        v
    }

    pub(crate) fn pointwise_acc(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        let p = self.field.characteristic();
        for ((x, &y), &z) in acc.iter_mut().zip(a).zip(b) {
            let s = *x + self.field.mul_raw(y, z);
            *x = if s >= p { s - p } else { s };
        }
    }
}

/// Transform size for a product of the given lengths, if the field supports it.
pub(crate) fn product_size(field: &Field, la: usize, lb: usize) -> Option<usize> {
    if !field.ntt_friendly() || la == 0 || lb == 0 {
        return None;
    }
    let n = (la + lb - 1).next_power_of_two();
    if n.trailing_zeros() > field.two_adicity() {
        return None;
    }
    Some(n)
}

pub(crate) fn mul(field: &Field, a: &[Fe], b: &[Fe]) -> Option<Vec<Fe>> {
    let n = product_size(field, a.len(), b.len())?;
    let plan = Plan::new(field, n)?;
    let mut fa = plan.forward_of(a);
    let fb = plan.forward_of(b);
    for (x, &y) in fa.iter_mut().zip(&fb) {
        *x = field.mul_raw(*x, y);
    }
    plan.inverse(&mut fa);
    fa.truncate(a.len() + b.len() - 1);
    Some(fa.into_iter().map(Fe).collect())
}
