//! Subcommand implementations.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use serde_json::{json, Value};

use semiadv::bounds::{ball_intersect, check_semi_adv_unique, gssb_witness, verify_gssb};
use semiadv::channel::{transmit, trial_rng};
use semiadv::format::{format_message, format_word, parse_message, parse_word};
use semiadv::{ChannelSpec, CodeSpec, Message, Outcome, Word};

use crate::config::{BallcheckConfig, Config};
use crate::experiment::{bench_csv, run_bench, run_grid, to_csv};
use crate::{Args, CliError};

struct Ctx {
    cfg: Config,
    seed: u64,
    out: Option<PathBuf>,
}

fn load(args: &Args) -> Result<Ctx, CliError> {
    let text = read(&args.config)?;
    let cfg = Config::parse(&text)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let out = args.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from));
    Ok(Ctx { cfg, seed, out })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `path` with `suffix` appended to its file name.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `text` to `path`, or to stdout when there is no path.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn input_path(args: &Args) -> Result<&Path, CliError> {
    args.input.as_deref().ok_or_else(|| CliError::Usage("this subcommand needs --input".into()))
}

fn read_word(spec: &CodeSpec, path: &Path) -> Result<Word, CliError> {
    let w = parse_word(spec.field(), &read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    spec.check_word(&w).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(w)
}

fn read_message(spec: &CodeSpec, path: &Path) -> Result<Message, CliError> {
    let m = parse_message(spec.field(), &read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    spec.check_message(&m).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(m)
}

pub fn encode(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let spec = ctx.cfg.code_spec()?;
    let f = spec.field();
    let msg = match &args.input {
        Some(p) => read_message(&spec, p)?,
        None => {
            let m = spec.random_message(&mut trial_rng(ctx.seed, 0));
            if let Some(out) = &ctx.out {
                write(&sibling(out, ".msg"), &format_message(f, &m))?;
            }
            m
        }
    };
    emit(ctx.out.as_deref(), &format_word(f, &spec.encode(&msg)?))
}

pub fn corrupt(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let spec = ctx.cfg.code_spec()?;
    let c = read_word(&spec, input_path(args)?)?;
    let ch = &ctx.cfg.channel;
    let ch = ChannelSpec::new(ch.e0, ch.e, ch.adversary, ctx.seed);
    ch.check(spec.n()).map_err(|e| CliError::Usage(e.to_string()))?;
    let (y, pattern) = transmit(&c, &ch, spec.field(), 0)?;
    let pattern = pretty(&serde_json::to_value(&pattern).expect("pattern serializes"));
    emit(ctx.out.as_deref(), &format_word(spec.field(), &y))?;
    match &ctx.out {
        Some(out) => write(&sibling(out, ".pattern.json"), &pattern),
        None => {
            eprint!("{pattern}");
            Ok(())
        }
    }
}

/// A decoding failure is a result, not an error: the exit status stays 0.
pub fn decode(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let spec = ctx.cfg.code_spec()?;
    let y = read_word(&spec, input_path(args)?)?;
    let radius = ctx.cfg.decode_radius();
    let res = semiadv::decode::decode(&spec, &y, ctx.cfg.decoder.l, radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = match &res.outcome {
        Outcome::Success(_) => json!({ "outcome": "success", "radius": radius, "diagnostics": res.diagnostics }),
        Outcome::Fail(r) => json!({ "outcome": "fail", "reason": r.name(), "radius": radius, "diagnostics": res.diagnostics }),
    };
    let summary = pretty(&summary);
    match &ctx.out {
        Some(out) => {
            if let Some(m) = res.message() {
                write(out, &format_message(spec.field(), m))?;
            } else if out.exists() {
                fs::remove_file(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            }
            write(&sibling(out, ".result.json"), &summary)
        }
        None => {
            if let Some(m) = res.message() {
                print!("{}", format_message(spec.field(), m));
            }
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn prefix(ctx: &Ctx) -> Result<&Path, CliError> {
    ctx.out.as_deref().ok_or_else(|| CliError::Usage("set `output` in the config or pass --out".into()))
}

pub fn experiment(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let prefix = prefix(&ctx)?;
    let start = Instant::now();
    let rows = run_grid(&ctx.cfg, ctx.seed)?;
    let csv = to_csv(&rows);
    let report = json!({
        "config": ctx.cfg,
        "seed": ctx.seed,
        "points": rows,
        "wall_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    write(&sibling(prefix, ".csv"), &csv)?;
    write(&sibling(prefix, ".json"), &pretty(&report))?;
    // the effective config, so a run can be repeated from its outputs
    let mut effective = ctx.cfg.clone();
    effective.seed = ctx.seed;
    write(&sibling(prefix, ".toml"), &effective.to_toml())?;
    let ok: usize = rows.iter().map(|r| r.successes).sum();
    let total: usize = rows.iter().map(|r| r.trials).sum();
    println!("{} points, {ok}/{total} successful decodings, written to {}.csv", rows.len(), prefix.display());
    Ok(())
}

pub fn bench(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let bench = ctx.cfg.bench.as_ref().ok_or_else(|| CliError::Usage("config has no [bench] section".into()))?;
    let rows = run_bench(&ctx.cfg, bench, ctx.seed)?;
    let csv = bench_csv(&rows);
    match &ctx.out {
        Some(p) => {
            write(&sibling(p, ".csv"), &csv)?;
            let report = json!({ "config": ctx.cfg, "seed": ctx.seed, "fast_paths": bench.fast_paths, "rows": rows });
            write(&sibling(p, ".json"), &pretty(&report))?;
            print!("{csv}");
            Ok(())
        }
        None => emit(None, &csv),
    }
}

pub fn gssb(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let spec = ctx.cfg.code_spec()?;
    let g = ctx.cfg.gssb.as_ref().ok_or_else(|| CliError::Usage("config has no [gssb] section".into()))?;
    let f = spec.field();
    let w = gssb_witness(&spec, g.e0, g.e, g.l).map_err(|e| CliError::Usage(e.to_string()))?;
    let verified = verify_gssb(&spec, &w)?;
    // words the channel can produce from z: random symbols on K
    let mut ball_sizes = Vec::with_capacity(g.samples);
    for t in 0..g.samples {
        let mut rng = trial_rng(ctx.seed, t as u64);
        let mut y = w.z.clone();
        let count = rand::Rng::gen_range(&mut rng, 0..=w.k_set.len());
        for &i in w.k_set.choose_multiple(&mut rng, count) {
            let sym: Vec<_> = (0..y.s()).map(|_| f.random(&mut rng)).collect();
            y.set_symbol(i, &sym);
        }
        let ball = ball_intersect(&spec, &y, g.e)?;
        if !w.codewords.iter().all(|m| ball.contains(m)) {
            return Err(CliError::Run(format!("sample {t}: a witness codeword left the ball")));
        }
        ball_sizes.push(ball.len());
    }
    let report = json!({
        "verified": verified,
        "l": g.l,
        "e0": w.e0,
        "e": w.e,
        "z": format_word(f, &w.z),
        "k_set": w.k_set,
        "blocks": w.blocks,
        "codewords": w.codewords.iter().map(|m| format_message(f, m)).collect::<Vec<_>>(),
        "sampled_ball_sizes": ball_sizes,
    });
    emit(ctx.out.as_deref(), &pretty(&report))?;
    if verified {
        Ok(())
    } else {
        Err(CliError::Run("witness failed verification".into()))
    }
}

pub fn ballcheck(args: &Args) -> Result<(), CliError> {
    let ctx = load(args)?;
    let spec = ctx.cfg.code_spec()?;
    let report = match &args.input {
        Some(p) => {
            let y = read_word(&spec, p)?;
            let radius = ctx.cfg.decode_radius();
            let ball = ball_intersect(&spec, &y, radius)?;
            let msgs: Vec<String> = ball.iter().map(|m| format_message(spec.field(), m)).collect();
            json!({ "radius": radius, "count": msgs.len(), "messages": msgs })
        }
        None => {
            let trials = ctx.cfg.ballcheck.as_ref().map_or(BallcheckConfig::default().trials, |b| b.trials);
            let ch = &ctx.cfg.channel;
            let stats = check_semi_adv_unique(&spec, ch.e0, ch.e, ch.adversary, trials, ctx.seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            json!({ "e0": ch.e0, "e": ch.e, "adversary": ch.adversary, "stats": stats })
        }
    };
    emit(ctx.out.as_deref(), &pretty(&report))
}
