//! Monte Carlo grids over `(e0, e)` and decoder timing runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use semiadv::channel::{transmit, trial_rng};
use semiadv::decode::decode;
use semiadv::{Adversary, ChannelSpec, CodeSpec, FailReason, Family, Outcome};

use crate::config::{BenchConfig, Config};
use crate::theory;
use crate::CliError;

const MESSAGE_SALT: u64 = 0x6d73_6773_616c_7421;

/// Channel seed of grid point `index`, so each row can be rerun on its own.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    trial_rng(seed, index as u64).gen()
}

#[derive(Clone, Debug, Default)]
struct Tally {
    successes: usize,
    failures: BTreeMap<&'static str, usize>,
    locator_sum: u64,
    locator_count: u64,
    locator_max: Option<usize>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.successes += other.successes;
        for (k, v) in other.failures {
            *self.failures.entry(k).or_default() += v;
        }
        self.locator_sum += other.locator_sum;
        self.locator_count += other.locator_count;
        self.locator_max = self.locator_max.max(other.locator_max);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointResult {
    pub index: usize,
    pub e0: usize,
    pub e: usize,
    pub trials: usize,
    pub successes: usize,
    pub failure_reasons: BTreeMap<&'static str, usize>,
    pub mean_locator_degree: Option<f64>,
    pub max_locator_degree: Option<usize>,
    pub in_region: bool,
    pub failure_bound: f64,
    pub wall_ms: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn run_point(
    spec: &CodeSpec,
    l: usize,
    adversary: Adversary,
    trials: usize,
    seed: u64,
    index: usize,
    e0: usize,
    e: usize,
) -> Result<PointResult, CliError> {
    let start = Instant::now();
    let pseed = point_seed(seed, index);
    let ch = ChannelSpec::new(e0, e, adversary, pseed);
    ch.check(spec.n()).map_err(|err| CliError::Usage(err.to_string()))?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Tally, CliError> {
            let m = spec.random_message(&mut trial_rng(pseed ^ MESSAGE_SALT, t as u64));
            let c = spec.encode(&m)?;
            let (y, _) = transmit(&c, &ch, spec.field(), t as u64)?;
            let res = decode(spec, &y, l, e)?;
            let mut tally = Tally::default();
            match &res.outcome {
                Outcome::Success(got) if *got == m => tally.successes = 1,
                Outcome::Success(_) => {
                    tally.failures.insert("wrongCodeword", 1);
                }
                Outcome::Fail(r) => {
                    tally.failures.insert(r.name(), 1);
                }
            }
            if let Some(d) = res.diagnostics.locator_degree {
                tally.locator_sum = d as u64;
                tally.locator_count = 1;
                tally.locator_max = Some(d);
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let q = spec.field().order();
    let (family, n, k, s) = (spec.family(), spec.n(), spec.k(), spec.s());
    Ok(PointResult {
        index,
        e0,
        e,
        trials,
        successes: tally.successes,
        failure_reasons: tally.failures,
        mean_locator_degree: (tally.locator_count > 0).then(|| tally.locator_sum as f64 / tally.locator_count as f64),
        max_locator_degree: tally.locator_max,
        in_region: theory::in_region(family, n, k, s, l, e0, e),
        failure_bound: theory::failure_bound(family, s, l, e, q),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_grid(cfg: &Config, seed: u64) -> Result<Vec<PointResult>, CliError> {
    let exp = cfg.experiment.as_ref().ok_or_else(|| CliError::Usage("config has no [experiment] section".into()))?;
    let spec = cfg.code_spec()?;
    let adversary = exp.adversary.unwrap_or(cfg.channel.adversary);
    exp.points(spec.n())?
        .into_iter()
        .enumerate()
        .map(|(i, (e0, e))| run_point(&spec, cfg.decoder.l, adversary, exp.trials, seed, i, e0, e))
        .collect()
}

const FAIL_COLUMNS: [FailReason; 4] =
    [FailReason::DegenerateInterpolant, FailReason::InexactDivision, FailReason::DegreeOverflow, FailReason::DistanceExceeded];

pub const CSV_HEADER: &str = "point,e0,e,trials,successes,success_rate,success_rate_float,in_region,failure_bound,\
mean_locator_degree,max_locator_degree,fail_degenerate_interpolant,fail_inexact_division,fail_degree_overflow,\
fail_distance_exceeded,fail_wrong_codeword";

/// One row per point; contains no timings so that reruns are byte-identical.
pub fn to_csv(rows: &[PointResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let rate = if r.trials == 0 { 1.0 } else { r.successes as f64 / r.trials as f64 };
        let mean = r.mean_locator_degree.map(|m| format!("{m:.3}")).unwrap_or_default();
        let max = r.max_locator_degree.map(|m| m.to_string()).unwrap_or_default();
        let _ = write!(
            out,
            "{},{},{},{},{},{}/{},{:.6},{},{:.6},{},{}",
            r.index, r.e0, r.e, r.trials, r.successes, r.successes, r.trials, rate, r.in_region, r.failure_bound, mean, max
        );
        for reason in FAIL_COLUMNS {
            let _ = write!(out, ",{}", r.failure_reasons.get(reason.name()).copied().unwrap_or(0));
        }
        let _ = writeln!(out, ",{}", r.failure_reasons.get("wrongCodeword").copied().unwrap_or(0));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub e: usize,
    pub median_ms: f64,
    /// Median time over the previous size's median.
    pub ratio: Option<f64>,
}

/// Median decode time per size for the configured family at half the radius,
/// keeping the configured rate `k / n`.
pub fn run_bench(cfg: &Config, bench: &BenchConfig, seed: u64) -> Result<Vec<BenchRow>, CliError> {
    let f = cfg.field()?.with_fast_paths(bench.fast_paths);
    let c = &cfg.code;
    if matches!(c.family, Family::Frs) && c.gamma.is_some() {
        return Err(CliError::Usage("bench derives FRS points itself; remove gamma".into()));
    }
    let mut rows: Vec<BenchRow> = Vec::new();
    for &n in &bench.sizes {
        let k = (n * c.k / c.n).max(1);
        let spec = CodeSpec::new(c.family, n, k, &f, c.s, None, None).map_err(|e| CliError::Usage(e.to_string()))?;
        let l = cfg.decoder.l;
        let e = theory::max_radius(c.family, n, k, c.s, l).unwrap_or(0) / 2;
        let ch = ChannelSpec::new(e / 8, e, cfg.channel.adversary, seed ^ n as u64);
        let mut times = Vec::with_capacity(bench.repetitions);
        for r in 0..bench.repetitions.max(1) {
            let m = spec.random_message(&mut trial_rng(seed ^ MESSAGE_SALT, (n * 1000 + r) as u64));
            let (y, _) = transmit(&spec.encode(&m)?, &ch, &f, r as u64)?;
            let start = Instant::now();
            let res = decode(&spec, &y, l, e)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            if res.message() != Some(&m) {
                return Err(CliError::Run(format!("benchmark instance n={n} repetition {r} did not decode")));
            }
        }
        times.sort_by(|a, b| a.total_cmp(b));
        let median_ms = times[times.len() / 2];
        let ratio = rows.last().map(|p| median_ms / p.median_ms);
        rows.push(BenchRow { n, k, e, median_ms, ratio });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,k,e,median_ms,doubling_ratio\n");
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.3}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{:.3},{}", r.n, r.k, r.e, r.median_ms, ratio);
    }
    out
}
