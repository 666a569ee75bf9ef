//! Semi-adversarial channel: up to `e0` positions chosen and rewritten by an
//! adversary, then `e - e0` further positions replaced by uniform symbols.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::Word;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Adversary {
    /// Random positions, random symbols differing from the original.
    RandomReplace,
    /// A contiguous run of positions at a random offset.
    Burst,
    /// Random positions with exactly one component changed.
    SingleComponent,
    /// Random positions overwritten with the zero symbol.
    ZeroOut,
    /// The first `e0` positions, random differing symbols.
    PositionTargeted,
}

impl Adversary {
    pub const ALL: [Adversary; 5] =
        [Adversary::RandomReplace, Adversary::Burst, Adversary::SingleComponent, Adversary::ZeroOut, Adversary::PositionTargeted];

    pub fn name(self) -> &'static str {
        match self {
            Adversary::RandomReplace => "randomReplace",
            Adversary::Burst => "burst",
            Adversary::SingleComponent => "singleComponent",
            Adversary::ZeroOut => "zeroOut",
            Adversary::PositionTargeted => "positionTargeted",
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Adversary> {
        Adversary::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameters(format!("unknown adversary {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub e0: usize,
    pub e: usize,
    pub adversary: Adversary,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn new(e0: usize, e: usize, adversary: Adversary, seed: u64) -> ChannelSpec {
        ChannelSpec { e0, e, adversary, seed }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.e0 > self.e || self.e > n {
            return Err(Error::BudgetExceedsLength { e0: self.e0, e: self.e, n });
        }
        Ok(())
    }
}

/// Everything the channel did to one word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern {
    /// Positions the adversary did not choose (`|I| = n - e0`), sorted.
    pub set_i: Vec<usize>,
    /// Positions left intact (`J`, a subset of `I` with `|J| = n - e`), sorted.
    pub set_j: Vec<usize>,
    /// Adversarial replacements, sorted by position; keys are outside `I`.
    pub adversarial_writes: Vec<(usize, Vec<Fe>)>,
    /// `I \ J`, sorted.
    pub random_positions: Vec<usize>,
}

impl ErrorPattern {
    pub fn adversarial_positions(&self) -> Vec<usize> {
        self.adversarial_writes.iter().map(|w| w.0).collect()
    }
}

/// Independent stream `trial` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_symbol<R: Rng + ?Sized>(f: &Field, s: usize, rng: &mut R) -> Vec<Fe> {
    (0..s).map(|_| f.random(rng)).collect()
}

fn differing_symbol<R: Rng + ?Sized>(f: &Field, old: &[Fe], rng: &mut R) -> Vec<Fe> {
    loop {
        let v = random_symbol(f, old.len(), rng);
        if v != old {
            return v;
        }
    }
}

fn sorted_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// Positions and replacement symbols chosen by `adv` with budget `e0`.
pub fn attack<R: Rng + ?Sized>(adv: Adversary, c: &Word, e0: usize, f: &Field, rng: &mut R) -> Vec<(usize, Vec<Fe>)> {
    let n = c.n();
    let positions = match adv {
        Adversary::Burst => {
            let start = rng.gen_range(0..=n - e0);
            (start..start + e0).collect()
        }
        Adversary::PositionTargeted => (0..e0).collect(),
        _ => sorted_sample(rng, n, e0),
    };
    positions
        .into_iter()
        .map(|i| {
            let old = c.symbol(i);
            let new = match adv {
                Adversary::ZeroOut => vec![Fe::ZERO; old.len()],
                Adversary::SingleComponent => {
                    let mut v = old.to_vec();
                    if !v.is_empty() {
                        let h = rng.gen_range(0..v.len());
                        v[h] = f.add(v[h], f.random_nonzero(rng));
                    }
                    v
                }
                _ => differing_symbol(f, old, rng),
            };
            (i, new)
        })
        .collect()
}

/// Apply fixed adversarial writes, then draw `e - |writes|` uniform symbols at
/// positions chosen uniformly from the untouched set.
pub fn apply_with_pattern<R: Rng + ?Sized>(
    c: &Word,
    f: &Field,
    writes: Vec<(usize, Vec<Fe>)>,
    e: usize,
    rng: &mut R,
) -> Result<(Word, ErrorPattern)> {
    let n = c.n();
    let e0 = writes.len();
    if e0 > e || e > n {
        return Err(Error::BudgetExceedsLength { e0, e, n });
    }
    let mut writes = writes;
    writes.sort_by_key(|w| w.0);
    let mut attacked = vec![false; n];
    for (i, sym) in &writes {
        if *i >= n || attacked[*i] || sym.len() != c.s() {
            return Err(Error::ShapeMismatch(format!("invalid adversarial write at position {i}")));
        }
        attacked[*i] = true;
    }
    let set_i: Vec<usize> = (0..n).filter(|&i| !attacked[i]).collect();
    let picks = sorted_sample(rng, set_i.len(), e - e0);
    let random_positions: Vec<usize> = picks.iter().map(|&t| set_i[t]).collect();
    let mut y = c.clone();
    for (i, sym) in &writes {
        y.set_symbol(*i, sym);
    }
    let mut is_random = vec![false; n];
    for &i in &random_positions {
        y.set_symbol(i, &random_symbol(f, c.s(), rng));
        is_random[i] = true;
    }
    let set_j = set_i.iter().copied().filter(|&i| !is_random[i]).collect();
    Ok((y, ErrorPattern { set_i, set_j, adversarial_writes: writes, random_positions }))
}

pub fn apply_semi_adversarial<R: Rng + ?Sized>(
    c: &Word,
    spec: &ChannelSpec,
    f: &Field,
    rng: &mut R,
) -> Result<(Word, ErrorPattern)> {
    spec.check(c.n())?;
    let writes = attack(spec.adversary, c, spec.e0, f, rng);
    apply_with_pattern(c, f, writes, spec.e, rng)
}

/// Channel use number `trial` under `spec.seed`.
pub fn transmit(c: &Word, spec: &ChannelSpec, f: &Field, trial: u64) -> Result<(Word, ErrorPattern)> {
    apply_semi_adversarial(c, spec, f, &mut trial_rng(spec.seed, trial))
}
