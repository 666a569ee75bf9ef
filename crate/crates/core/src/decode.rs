//! Unique decoders for interleaved, folded and multiplicity codes.
//!
//! Each decoder builds `Q_0` (vanishing on the interpolation points) and one
//! interpolant `Q_h` per used component, finds a minimal element of the shifted
//! module with [`minimize::solve`](crate::minimize::solve) and recovers the
//! message by exact division of `B_h = Q_h E + Q_0 C_h` by `E`.
//!
//! The module also holds the closed-form decoding regions and the
//! fixed-degree linear systems whose rank governs the success probability.

use serde::{Deserialize, Serialize};

use crate::codes::{distance, CodeSpec, Family, Message, Word};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::Matrix;
use crate::minimize::{solve, MinimizeProblem};
use crate::poly::{hermite, lagrange, vanishing, PointSet, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailReason {
    InexactDivision,
    DegreeOverflow,
    DistanceExceeded,
    DegenerateInterpolant,
}

impl FailReason {
    pub const ALL: [FailReason; 4] =
        [FailReason::InexactDivision, FailReason::DegreeOverflow, FailReason::DistanceExceeded, FailReason::DegenerateInterpolant];

    pub fn name(self) -> &'static str {
        match self {
            FailReason::InexactDivision => "InexactDivision",
            FailReason::DegreeOverflow => "DegreeOverflow",
            FailReason::DistanceExceeded => "DistanceExceeded",
            FailReason::DegenerateInterpolant => "DegenerateInterpolant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(Message),
    Fail(FailReason),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest component degree of the minimal module element.
    pub max_degree: Option<usize>,
    /// `deg E`.
    pub locator_degree: Option<usize>,
    /// `deg E` divided by the number of interpolation points per symbol.
    pub implied_errors: Option<usize>,
    /// Symbol distance between the input and the re-encoded output.
    pub distance: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub outcome: Outcome,
    pub diagnostics: Diagnostics,
}

impl DecodeResult {
    pub fn is_success(&self) -> bool {
        matches!(self.outcome, Outcome::Success(_))
    }

    pub fn message(&self) -> Option<&Message> {
        match &self.outcome {
            Outcome::Success(m) => Some(m),
            Outcome::Fail(_) => None,
        }
    }

    pub fn fail_reason(&self) -> Option<FailReason> {
        match self.outcome {
            Outcome::Success(_) => None,
            Outcome::Fail(r) => Some(r),
        }
    }
}

/// Dispatch on the code family. `l` is ignored for RS and IRS.
pub fn decode(spec: &CodeSpec, y: &Word, l: usize, e: usize) -> Result<DecodeResult> {
    match spec.family() {
        Family::Rs | Family::Irs => decode_irs(spec, y, e),
        Family::Frs => decode_frs(spec, y, l, e),
        Family::Mult => decode_mult(spec, y, l, e),
    }
}

fn check_inputs(spec: &CodeSpec, y: &Word, e: usize, fams: &[Family]) -> Result<()> {
    if !fams.contains(&spec.family()) {
        return Err(Error::InvalidParameters(format!("decoder does not handle {} codes", spec.family())));
    }
    spec.check_word(y)?;
    if e > spec.n() {
        return Err(Error::InvalidParameters(format!("error budget e={e} exceeds n={}", spec.n())));
    }
    Ok(())
}

fn check_l(spec: &CodeSpec, l: usize) -> Result<()> {
    if l == 0 || l > spec.s() {
        return Err(Error::InvalidParameters(format!("need 1 <= L <= s, got L={l}, s={}", spec.s())));
    }
    Ok(())
}

pub fn decode_irs(spec: &CodeSpec, y: &Word, e: usize) -> Result<DecodeResult> {
    check_inputs(spec, y, e, &[Family::Rs, Family::Irs])?;
    let f = spec.field();
    let points = PointSet::new(f, spec.alphas())?;
    let qs = (0..spec.s()).map(|h| points.interpolate(&y.column(h))).collect::<Result<Vec<_>>>()?;
    finish(spec, y, e, points.vanishing().clone(), qs, spec.s(), 1, Some(&points))
}

pub fn decode_frs(spec: &CodeSpec, y: &Word, l: usize, e: usize) -> Result<DecodeResult> {
    check_inputs(spec, y, e, &[Family::Frs])?;
    check_l(spec, l)?;
    let f = spec.field();
    let s = spec.s();
    let w = s - l + 1;
    let all = spec.frs_points();
    let mut xs = Vec::with_capacity(w * spec.n());
    for j in 0..spec.n() {
        xs.extend_from_slice(&all[j * s..j * s + w]);
    }
    let q0 = vanishing(f, &xs, 1);
    let mut qs = Vec::with_capacity(l);
    for h in 0..l {
        let mut ys = Vec::with_capacity(xs.len());
        for j in 0..spec.n() {
            for i in 0..w {
                ys.push(y.get(j, i + h));
            }
        }
        qs.push(lagrange(f, &xs, &ys)?);
    }
    finish(spec, y, e, q0, qs, 1, w, None)
}

pub fn decode_mult(spec: &CodeSpec, y: &Word, l: usize, e: usize) -> Result<DecodeResult> {
    check_inputs(spec, y, e, &[Family::Mult])?;
    check_l(spec, l)?;
    let f = spec.field();
    let w = spec.s() - l + 1;
    let alphas = spec.alphas();
    let q0 = vanishing(f, alphas, w);
    let mut qs = Vec::with_capacity(l);
    for h in 0..l {
        // Hasse derivative t of Q_h at alpha_j is binom(h+t, h) y_{j, h+t} (0-based h)
        let data: Vec<Vec<Fe>> = (0..spec.n())
            .map(|j| (0..w).map(|t| f.mul(f.binomial((h + t) as u64, h as u64), y.get(j, h + t))).collect())
            .collect();
        qs.push(hermite(f, alphas, &data)?);
    }
    finish(spec, y, e, q0, qs, 1, w, None)
}

/// Minimize, divide the first `used` numerators by `E`, re-encode and check.
#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &CodeSpec,
    y: &Word,
    e: usize,
    q0: Poly,
    qs: Vec<Poly>,
    used: usize,
    per_symbol: usize,
    points: Option<&PointSet>,
) -> Result<DecodeResult> {
    let problem = MinimizeProblem::new(q0, qs, spec.k())?;
    let sol = solve(&problem)?;
    let mut diagnostics = Diagnostics { max_degree: Some(sol.max_degree), ..Diagnostics::default() };
    let fail = |r, d: Diagnostics| Ok(DecodeResult { outcome: Outcome::Fail(r), diagnostics: d });
    if sol.e.is_zero() {
        return fail(FailReason::DegenerateInterpolant, diagnostics);
    }
    let deg_e = sol.e.degree().finite().unwrap_or(0);
    diagnostics.locator_degree = Some(deg_e);
    diagnostics.implied_errors = Some(deg_e / per_symbol);
    let mut polys = Vec::with_capacity(used);
    for b in sol.bs.iter().take(used) {
        let Some(p) = b.div_exact(&sol.e)? else {
            return fail(FailReason::InexactDivision, diagnostics);
        };
        if p.len() > spec.k() {
            return fail(FailReason::DegreeOverflow, diagnostics);
        }
        polys.push(p);
    }
    let msg = Message::new(polys);
    let c = match points {
        Some(p) => spec.encode_on(&msg, p)?,
        None => spec.encode(&msg)?,
    };
    let d = distance(y, &c)?;
    diagnostics.distance = Some(d);
    if d > e {
        return fail(FailReason::DistanceExceeded, diagnostics);
    }
    Ok(DecodeResult { outcome: Outcome::Success(msg), diagnostics })
}

// ---------------------------------------------------------------------------
// decoding regions

/// Parameters that determine a decoding region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionParams {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    /// Decoding parameter for FRS and MULT; ignored otherwise.
    pub l: usize,
}

impl RegionParams {
    pub fn of(spec: &CodeSpec, l: usize) -> RegionParams {
        RegionParams { family: spec.family(), n: spec.n(), k: spec.k(), s: spec.s(), l }
    }

    fn folded(&self) -> bool {
        matches!(self.family, Family::Frs | Family::Mult)
    }

    /// Interpolation points contributed by each symbol.
    pub fn points_per_symbol(&self) -> usize {
        if self.folded() {
            self.s + 1 - self.l
        } else {
            1
        }
    }

    /// Whether `e` is within the guaranteed radius.
    pub fn radius_ok(&self, e: usize) -> bool {
        let (n, k, s, l) = (self.n as u128, self.k as u128, self.s as u128, self.l as u128);
        let e = e as u128;
        match self.family {
            Family::Rs | Family::Irs => n >= k && e * (s + 1) <= s * (n - k),
            Family::Frs => {
                let w = s + 1 - l;
                n * w >= k && e * (l + 1) * w <= l * (n * w - k)
            }
            Family::Mult => {
                let w = s + 1 - l;
                n >= 1 && (n - 1) * w >= k && e * (l + 1) * w <= l * ((n - 1) * w - k)
            }
        }
    }

    /// Whether the adversarial share `e0` is admissible alongside `e`.
    pub fn budget_ok(&self, e0: usize, e: usize) -> bool {
        if e0 > e || e > self.n {
            return false;
        }
        let (n, k) = (self.n as u128, self.k as u128);
        let (e0, e) = (e0 as u128, e as u128);
        if self.folded() {
            let w = self.points_per_symbol() as u128;
            e0 * w + k <= (n - e) * w
        } else {
            e0 + e + k <= n
        }
    }

    pub fn in_region(&self, e0: usize, e: usize) -> bool {
        self.radius_ok(e) && self.budget_ok(e0, e)
    }

    /// Largest `e` within the guaranteed radius.
    pub fn max_radius(&self) -> usize {
        (0..=self.n).take_while(|&e| self.radius_ok(e)).last().unwrap_or(0)
    }

    /// Guaranteed failure probability bound for `e` errors over `F_q`.
    pub fn failure_bound(&self, q: u64, e: usize) -> f64 {
        (e * self.points_per_symbol()) as f64 / q as f64
    }
}

// ---------------------------------------------------------------------------
// fixed-degree linear systems

/// The stacked system `(B | Y) v = 0` for a fixed locator degree.
///
/// Unknowns are ordered as the coefficients of `A_1, .., A_b` (each of
/// `a_len` coefficients, constant term first), then `E`'s coefficients of
/// degree `1..=ebar`, then `E`'s constant term (the `Y` column).
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub b: Matrix,
    pub y: Vec<Fe>,
    pub blocks: usize,
    pub a_len: usize,
    pub ebar: usize,
}

impl BlockSystem {
    pub fn augmented(&self) -> Matrix {
        let col = Matrix::from_rows(self.y.iter().map(|&v| vec![v]).collect());
        self.b.hcat(&col)
    }

    /// Split a kernel vector into `(A_1, .., A_b)` and `E`.
    pub fn unpack(&self, f: &Field, v: &[Fe]) -> (Vec<Poly>, Poly) {
        let a = (0..self.blocks).map(|h| Poly::new(f, v[h * self.a_len..(h + 1) * self.a_len].to_vec())).collect();
        let off = self.blocks * self.a_len;
        let mut e = vec![v[off + self.ebar]];
        e.extend_from_slice(&v[off..off + self.ebar]);
        (a, Poly::new(f, e))
    }

    /// Inverse of [`unpack`](Self::unpack); `None` if a degree bound is exceeded.
    pub fn pack(&self, a: &[Poly], e: &Poly) -> Option<Vec<Fe>> {
        if a.len() != self.blocks || a.iter().any(|p| p.len() > self.a_len) || e.len() > self.ebar + 1 {
            return None;
        }
        let mut v = Vec::with_capacity(self.b.cols() + 1);
        for p in a {
            v.extend((0..self.a_len).map(|i| p.coeff(i)));
        }
        v.extend((1..=self.ebar).map(|i| e.coeff(i)));
        v.push(e.coeff(0));
        Some(v)
    }
}

const BLOCK_BUDGET: usize = 4_000_000;

/// Block matrix of the fixed-degree interpolation with locator degree `ebar`.
///
/// `A_h` has degree below `k + a_slack`; the IRS and FRS systems use
/// `a_slack = ebar`, the multiplicity system uses `a_slack = e (s - L + 1)`.
pub fn build_block_matrix(spec: &CodeSpec, y: &Word, l: usize, ebar: usize, a_slack: usize) -> Result<BlockSystem> {
    spec.check_word(y)?;
    let f = spec.field();
    let k = spec.k();
    let n = spec.n();
    let a_len = k + a_slack;
    let (blocks, w) = match spec.family() {
        Family::Rs | Family::Irs => (spec.s(), 1),
        _ => {
            check_l(spec, l)?;
            (l, spec.s() - l + 1)
        }
    };
    let rows = blocks * w * n;
    let cols = blocks * a_len + ebar;
    if rows.saturating_mul(cols + 1) > BLOCK_BUDGET {
        return Err(Error::BudgetExceeded(format!("block matrix {rows}x{cols}")));
    }
    let mut b = Matrix::zeros(rows, cols);
    let mut ycol = vec![Fe::ZERO; rows];
    match spec.family() {
        Family::Rs | Family::Irs | Family::Frs => {
            // points x_r and data y_{r,h}
            let (xs, val): (Vec<Fe>, Box<dyn Fn(usize, usize) -> Fe>) = if spec.family() == Family::Frs {
                let all = spec.frs_points();
                let s = spec.s();
                let xs = (0..n).flat_map(|j| all[j * s..j * s + w].to_vec()).collect();
                (xs, Box::new(move |r: usize, h: usize| y.get(r / w, r % w + h)))
            } else {
                (spec.alphas().to_vec(), Box::new(|r: usize, h: usize| y.get(r, h)))
            };
            let m = xs.len();
            for h in 0..blocks {
                for (r, &x) in xs.iter().enumerate() {
                    let row = h * m + r;
                    let mut pw = Fe::ONE;
                    for c in 0..a_len.max(ebar + 1) {
                        if c < a_len {
                            b.set(row, h * a_len + c, pw);
                        }
                        if c >= 1 && c <= ebar {
                            b.set(row, blocks * a_len + c - 1, f.neg(f.mul(val(r, h), pw)));
                        }
                        pw = f.mul(pw, x);
                    }
                    ycol[row] = f.neg(val(r, h));
                }
            }
        }
        Family::Mult => {
            let alphas = spec.alphas();
            // eval[j][t][d] = binom(d, t) alpha_j^{d-t}
            let eval = |j: usize, t: usize, d: usize| -> Fe {
                if d < t {
                    Fe::ZERO
                } else {
                    f.mul(f.binomial(d as u64, t as u64), f.pow(alphas[j], (d - t) as u64))
                }
            };
            for h in 0..blocks {
                for j in 0..n {
                    // v_t = binom(t + h, h) y_{j, t + h}, 0-based t and h
                    let v: Vec<Fe> = (0..w).map(|t| f.mul(f.binomial((t + h) as u64, h as u64), y.get(j, t + h))).collect();
                    for i in 0..w {
                        let row = h * w * n + j * w + i;
                        for d in 0..a_len {
                            b.set(row, h * a_len + d, eval(j, i, d));
                        }
                        // sum over l <= i of v_{i-l} E^{(l)}(alpha_j)
                        for d in 0..=ebar {
                            let mut acc = Fe::ZERO;
                            for ll in 0..=i {
                                acc = f.add(acc, f.mul(v[i - ll], eval(j, ll, d)));
                            }
                            if d == 0 {
                                ycol[row] = f.neg(acc);
                            } else {
                                b.set(row, blocks * a_len + d - 1, f.neg(acc));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(BlockSystem { b, y: ycol, blocks, a_len, ebar })
}

pub fn rank_of(f: &Field, m: &Matrix) -> usize {
    m.rank(f)
}

/// Kernel basis of the fixed-degree system, unpacked into `(A_h, E)` pairs.
pub fn fixed_degree_solve(spec: &CodeSpec, y: &Word, l: usize, ebar: usize, a_slack: usize) -> Result<Vec<(Vec<Poly>, Poly)>> {
    let sys = build_block_matrix(spec, y, l, ebar, a_slack)?;
    let f = spec.field();
    Ok(sys.augmented().kernel(f).into_iter().map(|v| sys.unpack(f, &v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{transmit, Adversary, ChannelSpec};
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regions_match_closed_forms() {
        let irs = RegionParams { family: Family::Irs, n: 64, k: 16, s: 4, l: 1 };
        assert_eq!(irs.max_radius(), 38);
        assert!(irs.in_region(10, 38) && !irs.in_region(11, 38));
        let frs = RegionParams { family: Family::Frs, n: 32, k: 20, s: 8, l: 4 };
        assert_eq!(frs.max_radius(), 22);
        assert!(frs.in_region(6, 22) && !frs.in_region(7, 22));
        let mult = RegionParams { family: Family::Mult, n: 32, k: 24, s: 4, l: 2 };
        assert_eq!(mult.max_radius(), 15);
        assert!(mult.in_region(9, 15) && !mult.in_region(10, 15));
        let rs = RegionParams { family: Family::Rs, n: 8, k: 2, s: 1, l: 1 };
        assert_eq!(rs.max_radius(), 3);
    }

    #[test]
    fn every_family_decodes_a_clean_word() {
        let f = make_field(257, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (fam, s, l) in [(Family::Rs, 1, 1), (Family::Irs, 3, 1), (Family::Frs, 4, 2), (Family::Mult, 3, 2)] {
            let spec = CodeSpec::new(fam, 12, 5, &f, s, None, None).unwrap();
            let m = spec.random_message(&mut rng);
            let r = decode(&spec, &spec.encode(&m).unwrap(), l, 0).unwrap();
            assert_eq!(r.message(), Some(&m), "{fam}");
        }
    }

    #[test]
    fn errors_within_radius_are_corrected() {
        let f = make_field(65537, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cases = [(Family::Irs, 20, 6, 3, 1), (Family::Frs, 16, 10, 6, 3), (Family::Mult, 16, 12, 4, 2)];
        for (fam, n, k, s, l) in cases {
            let spec = CodeSpec::new(fam, n, k, &f, s, None, None).unwrap();
            let region = RegionParams::of(&spec, l);
            let e = region.max_radius();
            let e0 = (0..=e).rev().find(|&e0| region.in_region(e0, e)).unwrap();
            for trial in 0..10 {
                let m = spec.random_message(&mut rng);
                let c = spec.encode(&m).unwrap();
                let (y, _) = transmit(&c, &ChannelSpec::new(e0, e, Adversary::RandomReplace, 11), &f, trial).unwrap();
                let r = decode(&spec, &y, l, e).unwrap();
                assert_eq!(r.message(), Some(&m), "{fam} trial {trial}");
            }
        }
    }

    #[test]
    fn garbage_never_yields_a_far_codeword() {
        let f = make_field(13, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = CodeSpec::new(Family::Irs, 8, 3, &f, 2, None, None).unwrap();
        for _ in 0..200 {
            let y = Word::from_symbols((0..8).map(|_| vec![f.random(&mut rng), f.random(&mut rng)]).collect()).unwrap();
            let r = decode_irs(&spec, &y, 3).unwrap();
            if let Some(m) = r.message() {
                assert!(distance(&y, &spec.encode(m).unwrap()).unwrap() <= 3);
            }
        }
    }

    #[test]
    fn block_column_counts() {
        let f = make_field(257, 1).unwrap();
        let irs = CodeSpec::new(Family::Irs, 16, 4, &f, 2, None, None).unwrap();
        let y = Word::zeros(16, 2);
        assert_eq!(build_block_matrix(&irs, &y, 1, 3, 3).unwrap().b.cols(), 2 * 4 + 3 * 3);
        let frs = CodeSpec::new(Family::Frs, 8, 5, &f, 4, None, None).unwrap();
        let sys = build_block_matrix(&frs, &Word::zeros(8, 4), 2, 3, 3).unwrap();
        assert_eq!((sys.b.rows(), sys.b.cols()), (3 * 2 * 8, 2 * 5 + 3 * 3));
        let mult = CodeSpec::new(Family::Mult, 8, 5, &f, 4, None, None).unwrap();
        let sys = build_block_matrix(&mult, &Word::zeros(8, 4), 2, 4, 2 * 3).unwrap();
        assert_eq!((sys.b.rows(), sys.b.cols()), (2 * 3 * 8, 2 * (5 + 2 * 3) + 4));
    }

    #[test]
    fn clean_irs_kernel_contains_message() {
        let f = make_field(257, 1).unwrap();
        let spec = CodeSpec::new(Family::Irs, 10, 3, &f, 2, None, None).unwrap();
        let m = spec.random_message(&mut ChaCha8Rng::seed_from_u64(8));
        let y = spec.encode(&m).unwrap();
        let sols = fixed_degree_solve(&spec, &y, 1, 0, 0).unwrap();
        assert_eq!(sols.len(), 1);
        let (a, e) = &sols[0];
        let c = e.coeff(0);
        let inv = f.inv(c).unwrap();
        for (ah, fh) in a.iter().zip(&m.polys) {
            assert_eq!(&ah.scale(inv), fh);
        }
    }
}
