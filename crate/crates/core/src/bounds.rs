//! Combinatorial checks on tiny codes: Hamming balls intersected with a code,
//! empirical unique decodability under semi-adversarial noise, and explicit
//! witnesses showing that unique (or list-of-`L`) decoding is impossible past
//! the semi-adversarial Singleton bound.

use serde::{Deserialize, Serialize};

use crate::channel::{transmit, trial_rng, Adversary, ChannelSpec};
use crate::codes::{distance, CodeSpec, Family, Message, Word};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::poly::{cmp_polys, lagrange, Poly};

/// Largest message space enumerated by the exhaustive method.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallMethod {
    /// Exhaustive when affordable, otherwise agreement-set interpolation.
    Auto,
    /// Enumerate every message.
    Exhaustive,
    /// RS and IRS only, radius at most `n - k`: every codeword in the ball
    /// agrees with the center on some `k` positions, and `k` positions
    /// determine the codeword, so interpolating through every `k`-subset of
    /// positions finds the whole intersection.
    AgreementSets,
}

fn message_space(spec: &CodeSpec) -> u128 {
    let q = spec.field().order() as u128;
    let dims = (spec.k() * spec.message_polys()) as u32;
    q.checked_pow(dims).unwrap_or(u128::MAX)
}

fn agreement_sets_apply(spec: &CodeSpec, radius: usize) -> bool {
    matches!(spec.family(), Family::Rs | Family::Irs) && radius + spec.k() <= spec.n()
}

/// All messages whose codewords lie within `radius` of `center`, sorted.
pub fn ball_intersect(spec: &CodeSpec, center: &Word, radius: usize) -> Result<Vec<Message>> {
    ball_intersect_with(spec, center, radius, BallMethod::Auto)
}

pub fn ball_intersect_with(spec: &CodeSpec, center: &Word, radius: usize, method: BallMethod) -> Result<Vec<Message>> {
    spec.check_word(center)?;
    let method = match method {
        BallMethod::Auto if message_space(spec) <= ENUMERATION_BUDGET => BallMethod::Exhaustive,
        BallMethod::Auto if agreement_sets_apply(spec, radius) => BallMethod::AgreementSets,
        BallMethod::Auto => {
            return Err(Error::BudgetExceeded(format!("message space {} too large to enumerate", message_space(spec))))
        }
        m => m,
    };
    let mut out = match method {
        BallMethod::Exhaustive => exhaustive(spec, center, radius)?,
        _ => agreement_sets(spec, center, radius)?,
    };
    out.sort_by(|a, b| {
        a.polys.iter().zip(&b.polys).map(|(x, y)| cmp_polys(x, y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    out.dedup();
    Ok(out)
}

fn exhaustive(spec: &CodeSpec, center: &Word, radius: usize) -> Result<Vec<Message>> {
    if message_space(spec) > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!("message space {} exceeds {ENUMERATION_BUDGET}", message_space(spec))));
    }
    let f = spec.field();
    let (n, s, k, polys) = (spec.n(), spec.s(), spec.k(), spec.message_polys());
    let q = f.order();
    let dims = k * polys;
    // codeword of each unit message, flattened symbol-major
    let basis: Vec<Vec<Fe>> = (0..dims)
        .map(|d| {
            let mut ps = vec![Poly::zero(f); polys];
            ps[d / k] = Poly::monomial(f, Fe::ONE, d % k);
            let w = spec.encode(&Message::new(ps)).expect("unit message is valid");
            (0..n).flat_map(|i| w.symbol(i).to_vec()).collect()
        })
        .collect();
    let target: Vec<Fe> = (0..n).flat_map(|i| center.symbol(i).to_vec()).collect();
    let mut digits = vec![0u64; dims];
    let mut word = vec![Fe::ZERO; n * s];
    let mut found = Vec::new();
    loop {
        let far = (0..n).filter(|&i| word[i * s..(i + 1) * s] != target[i * s..(i + 1) * s]).count();
        if far <= radius {
            let ps = (0..polys)
                .map(|h| Poly::new(f, (0..k).map(|j| Fe(digits[h * k + j])).collect()))
                .collect();
            found.push(Message::new(ps));
        }
        // odometer step, updating the codeword by the coefficient change
        let mut d = 0;
        loop {
            if d == dims {
                return Ok(found);
            }
            let old = Fe(digits[d]);
            digits[d] = (digits[d] + 1) % q;
            let delta = f.sub(Fe(digits[d]), old);
            for (x, &b) in word.iter_mut().zip(&basis[d]) {
                *x = f.add(*x, f.mul(delta, b));
            }
            if digits[d] != 0 {
                break;
            }
            d += 1;
        }
    }
}

fn agreement_sets(spec: &CodeSpec, center: &Word, radius: usize) -> Result<Vec<Message>> {
    if !agreement_sets_apply(spec, radius) {
        return Err(Error::InvalidParameters("agreement-set method needs an RS or IRS code and radius <= n - k".into()));
    }
    let f = spec.field();
    let (n, k) = (spec.n(), spec.k());
    let alphas = spec.alphas();
    let mut found = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let xs: Vec<Fe> = idx.iter().map(|&i| alphas[i]).collect();
        let ps = (0..spec.s())
            .map(|h| lagrange(f, &xs, &idx.iter().map(|&i| center.get(i, h)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let msg = Message::new(ps);
        if distance(center, &spec.encode(&msg)?)? <= radius {
            found.push(msg);
        }
        // next k-subset in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniqueStats {
    pub trials: usize,
    pub unique: usize,
    pub rate: f64,
    /// Whether `e0 <= min(e, n - k - e)`.
    pub in_region: bool,
}

/// Fraction of channel uses after which the ball of radius `e` around the
/// received word contains exactly the transmitted codeword.
pub fn check_semi_adv_unique(
    spec: &CodeSpec,
    e0: usize,
    e: usize,
    adversary: Adversary,
    trials: usize,
    seed: u64,
) -> Result<UniqueStats> {
    let n = spec.n();
    let ch = ChannelSpec::new(e0, e, adversary, seed);
    ch.check(n)?;
    let mut unique = 0;
    for t in 0..trials {
        let mut rng = trial_rng(seed ^ 0x6d65_7373_6167_6573, t as u64);
        let m = spec.random_message(&mut rng);
        let c = spec.encode(&m)?;
        let (y, _) = transmit(&c, &ch, spec.field(), t as u64)?;
        let ball = ball_intersect(spec, &y, e)?;
        if ball.len() == 1 && ball[0] == m {
            unique += 1;
        }
    }
    let in_region = e0 <= e && e0 + e + spec.k() <= n;
    Ok(UniqueStats { trials, unique, rate: if trials == 0 { 1.0 } else { unique as f64 / trials as f64 }, in_region })
}

/// A received word `z` close to `codewords[0]`, with a set `K` such that every
/// word agreeing with `z` off `K` has all `L + 1` codewords within distance `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GssbWitness {
    pub z: Word,
    /// Positions the random part of the channel may touch, sorted.
    pub k_set: Vec<usize>,
    pub codewords: Vec<Message>,
    /// `blocks[j]` is where `z` copies `codewords[j]` (`j >= 1`); `blocks[0]` is the rest of the middle range.
    pub blocks: Vec<Vec<usize>>,
    pub e0: usize,
    pub e: usize,
}

pub fn gssb_witness(spec: &CodeSpec, e0: usize, e: usize, l: usize) -> Result<GssbWitness> {
    let (n, k) = (spec.n(), spec.k());
    let f = spec.field();
    if spec.family() != Family::Rs {
        return Err(Error::InvalidParameters("witness construction needs an RS code".into()));
    }
    if l == 0 || e0 > e || e > n {
        return Err(Error::InvalidParameters(format!("need L >= 1 and e0 <= e <= n, got L={l}, e0={e0}, e={e}")));
    }
    if (l as u64) + 1 > f.order() {
        return Err(Error::PreconditionViolated(format!("L + 1 = {} exceeds the alphabet size {}", l + 1, f.order())));
    }
    if (e0 / l) as i64 <= n as i64 - k as i64 - e as i64 {
        return Err(Error::PreconditionViolated(format!("floor(e0/L) = {} is not above n - k - e = {}", e0 / l, n as i64 - k as i64 - e as i64)));
    }
    let alphas = spec.alphas();
    // codewords sharing their first k-1 values and differing at the k-th point
    let codewords: Vec<Message> = (0..=l)
        .map(|j| {
            let mut ys = vec![Fe::ZERO; k];
            ys[k - 1] = f.elem(j as u64);
            Ok(Message::new(vec![lagrange(f, &alphas[..k], &ys)?]))
        })
        .collect::<Result<_>>()?;
    let words = codewords.iter().map(|m| spec.encode(m)).collect::<Result<Vec<_>>>()?;
    let m = n - (k - 1) - (e - e0);
    let size = m / (l + 1);
    let mut blocks = vec![Vec::new(); l + 1];
    for j in 1..=l {
        let start = k - 1 + (j - 1) * size;
        blocks[j] = (start..start + size).collect();
    }
    blocks[0] = (k - 1 + l * size..k - 1 + m).collect();
    let mut z = words[0].clone();
    for j in 1..=l {
        for &i in &blocks[j] {
            z.set_symbol(i, words[j].symbol(i));
        }
    }
    let k_set = (n - (e - e0)..n).collect();
    let w = GssbWitness { z, k_set, codewords, blocks, e0, e };
    if !verify_gssb(spec, &w)? {
        return Err(Error::PreconditionViolated("constructed witness failed verification".into()));
    }
    Ok(w)
}

/// The witness conditions: `z` is within `e0` of the first codeword; every
/// codeword is within `e` of any word that agrees with `z` off `K`; and each
/// copied block is long enough.
pub fn verify_gssb(spec: &CodeSpec, w: &GssbWitness) -> Result<bool> {
    let n = spec.n();
    if w.codewords.len() < 2 || w.k_set.len() != w.e - w.e0 {
        return Ok(false);
    }
    let words = w.codewords.iter().map(|m| spec.encode(m)).collect::<Result<Vec<_>>>()?;
    for (a, wa) in words.iter().enumerate() {
        if words[..a].contains(wa) {
            return Ok(false);
        }
    }
    if distance(&w.z, &words[0])? > w.e0 {
        return Ok(false);
    }
    let mut in_k = vec![false; n];
    for &i in &w.k_set {
        in_k[i] = true;
    }
    for c in &words {
        let outside = (0..n).filter(|&i| !in_k[i] && c.symbol(i) != w.z.symbol(i)).count();
        if outside + w.k_set.len() > w.e {
            return Ok(false);
        }
    }
    Ok(w.blocks.iter().skip(1).all(|b| spec.k() - 1 + b.len() + w.e >= n))
}
