//! Exact arithmetic in prime fields `F_p` and extension fields `F_{p^m}`.
//!
//! Elements are stored in a canonical integer encoding: an element with
//! residues `(c_0, .., c_{m-1})` in the basis `{1, X, .., X^{m-1}}` is the
//! integer `c_0 + c_1 p + .. + c_{m-1} p^{m-1}`. For prime fields the encoding
//! is the residue itself.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Extension-field element counts up to this bound get log/antilog tables.
const LOG_TABLE_LIMIT: u64 = 1 << 20;
/// Minimum two-adicity of `p - 1` for the field to be flagged NTT friendly.
pub const NTT_MIN_TWO_ADICITY: u32 = 8;
const IRREDUCIBLE_SEED: u64 = 0x5eed_f1e1d;
const IRREDUCIBLE_BUDGET: usize = 100_000;
const TRIAL_DIVISION_BUDGET: u64 = 1 << 24;

/// A field element in canonical encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct Fe(pub u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Barrett reduction for moduli below 2^32.
#[derive(Clone, Copy, Debug)]
struct Barrett {
    p: u64,
    mu: u64,
}

impl Barrett {
    fn new(p: u64) -> Self {
        let mu = if p < (1 << 32) { ((1u128 << 64) / p as u128) as u64 } else { 0 };
        Barrett { p, mu }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.mu != 0 {
            let x = a * b;
            let qhat = ((x as u128 * self.mu as u128) >> 64) as u64;
            let mut r = x - qhat * self.p;
            if r >= self.p {
                r -= self.p;
            }
            r
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }
}

#[derive(Debug)]
struct LogTables {
    log: Vec<u32>,
    exp: Vec<u64>,
}

#[derive(Debug)]
struct FieldInner {
    p: u64,
    m: u32,
    order: u64,
    /// Monic modulus, low coefficient first, length `m + 1`; empty for prime fields.
    modulus: Vec<u64>,
    barrett: Barrett,
    two_adicity: u32,
    /// Powers `p^i` for digit extraction.
    pow_p: Vec<u64>,
    logs: Option<LogTables>,
    /// Primitive `2^two_adicity`-th root of unity (prime fields only).
    root: u64,
    fast_paths: bool,
}

/// Handle to a finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.0.p, self.0.m, self.0.modulus)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

/// Serializable description of a field: `{p, m, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus: Vec<u64>,
}

/// Build `F_{p^m}`, searching for an irreducible modulus when `m > 1`.
pub fn make_field(p: u64, m: u32) -> Result<Field, FieldError> {
    Field::new(p, m)
}

impl Field {
    pub fn new(p: u64, m: u32) -> Result<Field, FieldError> {
        if m == 0 {
            return Err(FieldError::InvalidDegree(m));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let order = checked_pow(p, m).ok_or(FieldError::OrderOverflow { p, m })?;
        if m == 1 {
            return Ok(Self::build(p, 1, Vec::new(), order));
        }
        let modulus = find_irreducible(p, m as usize)?;
        Ok(Self::build(p, m, modulus, order))
    }

    /// Build `F_{p^m}` with an explicit monic modulus (low coefficient first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::ReducibleModulus);
        }
        let m = (modulus.len() - 1) as u32;
        let order = checked_pow(p, m).ok_or(FieldError::OrderOverflow { p, m })?;
        if m == 1 {
            return Ok(Self::build(p, 1, Vec::new(), order));
        }
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::ReducibleModulus);
        }
        Ok(Self::build(p, m, modulus, order))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field, FieldError> {
        if spec.m > 1 && !spec.modulus.is_empty() {
            let f = Self::with_modulus(spec.p, spec.modulus.clone())?;
            if f.degree() != spec.m {
                return Err(FieldError::ReducibleModulus);
            }
            Ok(f)
        } else {
            Self::new(spec.p, spec.m)
        }
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Self::new(p, 1)
    }

    fn build(p: u64, m: u32, modulus: Vec<u64>, order: u64) -> Field {
        let two_adicity = if m == 1 { (p - 1).trailing_zeros() } else { 0 };
        let mut pow_p = Vec::with_capacity(m as usize);
        let mut acc = 1u64;
        for i in 0..m {
            pow_p.push(acc);
            if i + 1 < m {
                acc *= p;
            }
        }
        let mut inner = FieldInner {
            p,
            m,
            order,
            modulus,
            barrett: Barrett::new(p),
            two_adicity,
            pow_p,
            logs: None,
            root: 0,
            fast_paths: true,
        };
        if m == 1 && p > 2 {
            inner.root = max_two_power_root(p, two_adicity);
        }
        if m > 1 && order <= LOG_TABLE_LIMIT {
            inner.logs = Some(build_log_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    /// Same field with fast polynomial kernels (NTT, Karatsuba, divide-and-conquer
    /// minimization) disabled. Used as the quadratic baseline.
    pub fn with_fast_paths(&self, enabled: bool) -> Field {
        let inner = &self.0;
        let mut f = Self::build(inner.p, inner.m, inner.modulus.clone(), inner.order);
        Arc::get_mut(&mut f.0).expect("fresh field").fast_paths = enabled;
        f
    }

    pub fn fast_paths(&self) -> bool {
        self.0.fast_paths
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    /// Extension degree `m` over the prime field.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.m
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.0.order
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn two_adicity(&self) -> u32 {
        self.0.two_adicity
    }

    pub fn ntt_friendly(&self) -> bool {
        self.0.m == 1 && self.0.two_adicity >= NTT_MIN_TWO_ADICITY
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.0.p, m: self.0.m, modulus: self.0.modulus.clone() }
    }

    /// Element from an integer; reduced modulo `q` into the canonical encoding.
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe(v % self.0.order)
    }

    /// Image of the integer `v` under `Z -> F_p -> F_q`.
    #[inline]
    pub fn from_int(&self, v: u64) -> Fe {
        Fe(v % self.0.p)
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        let p = self.0.p as i128;
        Fe((((v as i128) % p + p) % p) as u64)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.0.order
    }

    /// Residues of `a` in the basis `{1, X, .., X^{m-1}}`.
    pub fn residues(&self, a: Fe) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.0.m as usize);
        let mut v = a.0;
        for _ in 0..self.0.m {
            out.push(v % self.0.p);
            v /= self.0.p;
        }
        out
    }

    pub fn from_residues(&self, residues: &[u64]) -> Result<Fe, FieldError> {
        if residues.len() != self.0.m as usize {
            return Err(FieldError::DimensionMismatch { expected: self.0.m as usize, got: residues.len() });
        }
        let mut v = 0u64;
        for (i, &c) in residues.iter().enumerate() {
            if c >= self.0.p {
                return Err(FieldError::ResidueOutOfRange(c));
            }
            v += c * self.0.pow_p[i];
        }
        Ok(Fe(v))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let f = &*self.0;
        if f.m == 1 {
            let s = a.0 + b.0;
            Fe(if s >= f.p { s - f.p } else { s })
        } else if f.p == 2 {
            Fe(a.0 ^ b.0)
        } else {
            let (mut x, mut y) = (a.0, b.0);
            let mut out = 0;
            for i in 0..f.m as usize {
                let s = (x % f.p + y % f.p) % f.p;
                out += s * f.pow_p[i];
                x /= f.p;
                y /= f.p;
            }
            Fe(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let f = &*self.0;
        if a.0 == 0 {
            return a;
        }
        if f.m == 1 {
            Fe(f.p - a.0)
        } else if f.p == 2 {
            a
        } else {
            let mut x = a.0;
            let mut out = 0;
            for i in 0..f.m as usize {
                let d = x % f.p;
                out += ((f.p - d) % f.p) * f.pow_p[i];
                x /= f.p;
            }
            Fe(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        let f = &*self.0;
        if f.m == 1 {
            Fe(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + f.p - b.0 })
        } else {
            self.add(a, self.neg(b))
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let f = &*self.0;
        if f.m == 1 {
            return Fe(f.barrett.mul(a.0, b.0));
        }
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if let Some(t) = &f.logs {
            let n = f.order - 1;
            let l = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
            return Fe(t.exp[(if l >= n { l - n } else { l }) as usize]);
        }
        self.mul_slow(a, b)
    }

    /// Schoolbook product of residue vectors reduced by the modulus.
    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let f = &*self.0;
        let m = f.m as usize;
        let x = self.residues(a);
        let y = self.residues(b);
        let mut prod = vec![0u64; 2 * m - 1];
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + f.barrett.mul(x[i], y[j])) % f.p;
            }
        }
        for d in (m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..m {
                let t = f.barrett.mul(c, f.modulus[i]);
                prod[d - m + i] = (prod[d - m + i] + f.p - t) % f.p;
            }
            prod[d] = 0;
        }
        let mut out = 0;
        for i in 0..m {
            out += prod[i] * f.pow_p[i];
        }
        Fe(out)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        if let Some(t) = &self.0.logs {
            let n = self.0.order - 1;
            let l = t.log[a.0 as usize] as u64;
            return Ok(Fe(t.exp[((n - l) % n) as usize]));
        }
        if self.0.m == 1 {
            return Ok(Fe(inv_mod(a.0, self.0.p)));
        }
        Ok(self.pow(a, self.0.order - 2))
    }

    /// `inv` for callers that have already excluded zero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Fe) -> Fe {
        self.inv(a).expect("nonzero element")
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.0.order))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.0.order))
    }

    /// The class of `X` in `F_p[X]/(modulus)`; `1` in a prime field.
    pub fn x(&self) -> Fe {
        if self.0.m == 1 {
            Fe::ONE
        } else {
            Fe(self.0.p)
        }
    }

    /// Binomial coefficient `C(n, k)` reduced into the prime subfield.
    pub fn binomial(&self, n: u64, k: u64) -> Fe {
        Fe(binomial_mod_p(n, k, self.0.p))
    }

    /// Primitive `2^log_n`-th root of unity for NTT-capable prime fields.
    pub(crate) fn root_of_unity(&self, log_n: u32) -> Option<u64> {
        if self.0.m != 1 || log_n > self.0.two_adicity || self.0.root == 0 {
            return None;
        }
        let mut w = self.0.root;
        for _ in log_n..self.0.two_adicity {
            w = mulmod(w, w, self.0.p);
        }
        Some(w)
    }

    #[inline(always)]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        self.0.barrett.mul(a, b)
    }

    /// Smallest element (in encoding order) of multiplicative order `q - 1`.
    pub fn find_generator(&self) -> Result<Fe, FieldError> {
        let n = self.0.order - 1;
        if n == 1 {
            return Ok(Fe::ONE);
        }
        let primes = prime_factors(n).ok_or(FieldError::FactorizationBudgetExceeded(n))?;
        'cand: for v in 1..self.0.order {
            let g = Fe(v);
            for &l in &primes {
                if self.pow(g, n / l) == Fe::ONE {
                    continue 'cand;
                }
            }
            return Ok(g);
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Fe) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        let n = self.0.order - 1;
        let primes = prime_factors(n).ok_or(FieldError::FactorizationBudgetExceeded(n))?;
        let mut ord = n;
        for &l in &primes {
            while ord % l == 0 && self.pow(a, ord / l) == Fe::ONE {
                ord /= l;
            }
        }
        Ok(ord)
    }

    pub fn is_generator(&self, a: Fe) -> bool {
        matches!(self.multiplicative_order(a), Ok(o) if o == self.0.order - 1)
    }
}

fn build_log_tables(f: &FieldInner) -> LogTables {
    // Build a temporary handle without tables for the search.
    let tmp = Field(Arc::new(FieldInner {
        p: f.p,
        m: f.m,
        order: f.order,
        modulus: f.modulus.clone(),
        barrett: f.barrett,
        two_adicity: f.two_adicity,
        pow_p: f.pow_p.clone(),
        logs: None,
        root: 0,
        fast_paths: true,
    }));
    let g = tmp.find_generator().expect("small order factors");
    let n = (f.order - 1) as usize;
    let mut exp = vec![0u64; n];
    let mut log = vec![0u32; f.order as usize];
    let mut acc = Fe::ONE;
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = acc.0;
        log[acc.0 as usize] = i as u32;
        acc = tmp.mul_slow(acc, g);
    }
    LogTables { log, exp }
}

// ---------------------------------------------------------------------------
// integer helpers

/// A quadratic non-residue raised to the odd part of `p - 1` has order `2^t`.
fn max_two_power_root(p: u64, t: u32) -> u64 {
    let odd = (p - 1) >> t;
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    pow_mod(z, odd, p)
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if t < 0 {
        t += p as i128;
    }
    t as u64
}

fn checked_pow(p: u64, m: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..m {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors by trial division; `None` when the budget is exhausted
/// with a composite cofactor left.
pub(crate) fn prime_factors(mut n: u64) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if d > TRIAL_DIVISION_BUDGET {
            if is_prime(n) {
                break;
            }
            return None;
        }
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    Some(out)
}

/// `C(n, k) mod p` by Lucas' theorem.
pub(crate) fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        // small binomial by multiplicative formula
        let mut num = 1u64;
        let mut den = 1u64;
        for j in 0..ki {
            num = mulmod(num, (ni - j) % p, p);
            den = mulmod(den, (j + 1) % p, p);
        }
        acc = mulmod(acc, mulmod(num, inv_mod(den, p), p), p);
        n /= p;
        k /= p;
    }
    acc
}

// ---------------------------------------------------------------------------
// polynomials over F_p used only for modulus search (low coefficient first)

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pmod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let d = r.len() - 1;
        let c = mulmod(r[d], lead_inv, p);
        for i in 0..=dm {
            let t = mulmod(c, m[i], p);
            r[d - dm + i] = (r[d - dm + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn pmulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
        }
    }
    pmod(&prod, m, p)
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = pmod(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `X^(p^i) mod f` for i = 1..=m via repeated p-th powering.
fn frobenius_powers(p: u64, f: &[u64], m: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(m);
    let mut cur = pmod(&[0, 1], f, p);
    for _ in 0..m {
        // cur <- cur^p mod f
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pmulmod(&acc, &base, f, p);
            }
            e >>= 1;
            if e > 0 {
                base = pmulmod(&base, &base, f, p);
            }
        }
        cur = acc;
        out.push(cur.clone());
    }
    out
}

/// Irreducibility of a monic `f` of degree `m` over `F_p`: `gcd(X^{p^i} - X, f) = 1`
/// for `i < m` and `f | X^{p^m} - X`.
pub(crate) fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let pows = frobenius_powers(p, f, m);
    let x_minus = |mut v: Vec<u64>| {
        if v.len() < 2 {
            v.resize(2, 0);
        }
        v[1] = (v[1] + p - 1) % p;
        trim(&mut v);
        v
    };
    for pw in pows.iter().take(m - 1) {
        let g = pgcd(f, &x_minus(pw.clone()), p);
        if g.len() != 1 {
            return false;
        }
    }
    x_minus(pows[m - 1].clone()).is_empty()
}

fn find_irreducible(p: u64, m: usize) -> Result<Vec<u64>, FieldError> {
    let mut rng = ChaCha8Rng::seed_from_u64(IRREDUCIBLE_SEED ^ (p.rotate_left(17)) ^ m as u64);
    // exhaust tiny candidate spaces in order so the result is the first irreducible
    let space = checked_pow(p, m as u32);
    if let Some(total) = space.filter(|&t| t <= 4096) {
        for v in 0..total {
            let mut f = Vec::with_capacity(m + 1);
            let mut x = v;
            for _ in 0..m {
                f.push(x % p);
                x /= p;
            }
            f.push(1);
            if f[0] != 0 && is_irreducible(p, &f) {
                return Ok(f);
            }
        }
        return Err(FieldError::NoIrreducibleFound { p, m: m as u32 });
    }
    for _ in 0..IRREDUCIBLE_BUDGET {
        let mut f: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
        f.push(1);
        if f[0] != 0 && is_irreducible(p, &f) {
            return Ok(f);
        }
    }
    Err(FieldError::NoIrreducibleFound { p, m: m as u32 })
}

// ---------------------------------------------------------------------------
// subfield embedding

/// The additive bijection `psi: F_q^s -> F_{q^s}`,
/// `psi(a_1, .., a_s) = a_1 + gamma a_2 + .. + gamma^{s-1} a_s`,
/// where `F_q` is a prime field and `gamma` generates `F_{q^s}` as an `F_q`-basis.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    base: Field,
    ext: Field,
    gamma: Fe,
    /// Residues of `gamma^i`, one row per `i`.
    powers: Vec<Vec<u64>>,
    /// Inverse of the basis-change matrix, row-major.
    inverse: Vec<Vec<u64>>,
}

impl SubfieldEmbedding {
    /// Embedding with `gamma = X`, the class of the indeterminate.
    pub fn new(base: &Field, ext: &Field) -> Result<Self, FieldError> {
        Self::with_gamma(base, ext, ext.x())
    }

    pub fn with_gamma(base: &Field, ext: &Field, gamma: Fe) -> Result<Self, FieldError> {
        if !base.is_prime_field() || ext.characteristic() != base.characteristic() {
            return Err(FieldError::DimensionMismatch { expected: 1, got: base.degree() as usize });
        }
        let s = ext.degree() as usize;
        let p = base.characteristic();
        let mut powers = Vec::with_capacity(s);
        let mut acc = Fe::ONE;
        for _ in 0..s {
            powers.push(ext.residues(acc));
            acc = ext.mul(acc, gamma);
        }
        // columns of G are residues of gamma^i; solve G a = b
        let mut g: Vec<Vec<u64>> = (0..s).map(|r| (0..s).map(|c| powers[c][r]).collect()).collect();
        let inverse = invert_mod_p(&mut g, p).ok_or(FieldError::NotABasis)?;
        Ok(SubfieldEmbedding { base: base.clone(), ext: ext.clone(), gamma, powers, inverse })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn gamma(&self) -> Fe {
        self.gamma
    }

    pub fn s(&self) -> usize {
        self.powers.len()
    }

    /// Inclusion `F_q -> F_{q^s}`.
    pub fn lift(&self, a: Fe) -> Fe {
        a
    }

    pub fn embed(&self, a: &[Fe]) -> Result<Fe, FieldError> {
        let s = self.s();
        if a.len() != s {
            return Err(FieldError::DimensionMismatch { expected: s, got: a.len() });
        }
        let p = self.base.characteristic();
        let mut res = vec![0u64; s];
        for (i, &ai) in a.iter().enumerate() {
            if ai.0 >= p {
                return Err(FieldError::ResidueOutOfRange(ai.0));
            }
            for r in 0..s {
                res[r] = (res[r] + mulmod(ai.0, self.powers[i][r], p)) % p;
            }
        }
        self.ext.from_residues(&res)
    }

    pub fn inverse(&self, b: Fe) -> Result<Vec<Fe>, FieldError> {
        if !self.ext.contains(b) {
            return Err(FieldError::ResidueOutOfRange(b.0));
        }
        let p = self.base.characteristic();
        let r = self.ext.residues(b);
        Ok(self
            .inverse
            .iter()
            .map(|row| Fe(row.iter().zip(&r).fold(0u64, |acc, (&x, &y)| (acc + mulmod(x, y, p)) % p)))
            .collect())
    }
}

/// Gauss-Jordan inverse over `F_p`.
fn invert_mod_p(a: &mut [Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let c = inv_mod(a[col][col], p);
        for j in 0..n {
            a[col][j] = mulmod(a[col][j], c, p);
            inv[col][j] = mulmod(inv[col][j], c, p);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = (a[r][j] + p - mulmod(f, a[col][j], p)) % p;
                    inv[r][j] = (inv[r][j] + p - mulmod(f, inv[col][j], p)) % p;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.order(), 5);
        assert!(f.modulus().is_empty());
        assert_eq!(f.add(Fe(3), Fe(4)), Fe(2));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.inv(Fe(3)).unwrap(), Fe(5));
        assert_eq!(f7.inv(Fe(0)), Err(FieldError::DivideByZero));
    }

    #[test]
    fn rejects_composites_and_overflow() {
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(make_field(65537, 5), Err(FieldError::OrderOverflow { .. })));
    }

    #[test]
    fn f4_modulus_and_product() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let g = f.x();
        // X * X = X + 1
        assert_eq!(f.residues(f.mul(g, g)), vec![1, 1]);
    }

    #[test]
    fn generators() {
        assert_eq!(make_field(7, 1).unwrap().find_generator().unwrap(), Fe(3));
        assert_eq!(make_field(2, 1).unwrap().find_generator().unwrap(), Fe(1));
        assert_eq!(make_field(5, 1).unwrap().find_generator().unwrap(), Fe(2));
        let f = make_field(65537, 1).unwrap();
        let g = f.find_generator().unwrap();
        assert_eq!(f.multiplicative_order(g).unwrap(), 65536);
    }

    #[test]
    fn binomials_follow_lucas() {
        // C(3,2) = 3 = 1 mod 2
        assert_eq!(binomial_mod_p(3, 2, 2), 1);
        assert_eq!(binomial_mod_p(10, 3, 13), 120 % 13);
        assert_eq!(binomial_mod_p(5, 7, 13), 0);
        // C(7,3)=35 = 0 mod 7
        assert_eq!(binomial_mod_p(7, 3, 7), 0);
    }

    #[test]
    fn large_prime_fallback_matches_u128() {
        let p = (1u64 << 61) - 1;
        let f = make_field(p, 1).unwrap();
        let a = Fe(123_456_789_012_345);
        let b = Fe(987_654_321_098_765);
        assert_eq!(f.mul(a, b).0, mulmod(a.0, b.0, p));
        assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
    }

    #[test]
    fn table_and_slow_paths_agree() {
        let f = make_field(3, 4).unwrap();
        for a in 0..f.order() {
            for b in (0..f.order()).step_by(7) {
                assert_eq!(f.mul(Fe(a), Fe(b)), f.mul_slow(Fe(a), Fe(b)));
            }
        }
    }

    #[test]
    fn psi_examples() {
        let base = make_field(2, 1).unwrap();
        let ext = make_field(2, 2).unwrap();
        let psi = SubfieldEmbedding::new(&base, &ext).unwrap();
        assert_eq!(psi.embed(&[Fe(0), Fe(0)]).unwrap(), Fe::ZERO);
        // 1 + gamma
        assert_eq!(psi.embed(&[Fe(1), Fe(1)]).unwrap(), ext.add(Fe::ONE, ext.x()));
        assert!(matches!(psi.embed(&[Fe(1)]), Err(FieldError::DimensionMismatch { .. })));
    }
}
