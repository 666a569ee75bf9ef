//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every entry point takes plain numbers and strings and returns a JSON
//! document, so the page needs no generated type glue.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use semiadv::bounds::{ball_intersect, gssb_witness, verify_gssb};
use semiadv::channel::{transmit, trial_rng};
use semiadv::codes::distance;
use semiadv::decode::{decode, RegionParams};
use semiadv::format::{format_elem, format_message};
use semiadv::{make_field, Adversary, ChannelSpec, CodeSpec, Family, Outcome, Word};

/// Longest code the page accepts.
const MAX_N: usize = 4096;

fn family(name: &str) -> Result<Family, String> {
    name.parse().map_err(|e: semiadv::Error| e.to_string())
}

fn adversary(name: &str) -> Result<Adversary, String> {
    Adversary::ALL.into_iter().find(|a| a.name() == name).ok_or_else(|| format!("unknown adversary {name:?}"))
}

fn code(fam: Family, n: usize, k: usize, p: u64, s: usize) -> Result<CodeSpec, String> {
    if n > MAX_N {
        return Err(format!("n is limited to {MAX_N} in the browser"));
    }
    let f = make_field(p, 1).map_err(|e| e.to_string())?;
    CodeSpec::new(fam, n, k, &f, s, None, None).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Region {
    max_radius: usize,
    points_per_symbol: usize,
    /// `cells[e][e0]` for `e0 <= e`.
    cells: Vec<Vec<bool>>,
}

/// In-region flags for every `0 <= e0 <= e <= n`.
pub fn region_json(fam: &str, n: usize, k: usize, s: usize, l: usize) -> Result<String, String> {
    let family = family(fam)?;
    if n > MAX_N || s == 0 || (matches!(family, Family::Frs | Family::Mult) && (l == 0 || l > s)) {
        return Err("need n <= 4096, s >= 1 and 1 <= L <= s".into());
    }
    let r = RegionParams { family, n, k, s, l };
    let cells = (0..=n).map(|e| (0..=e).map(|e0| r.in_region(e0, e)).collect()).collect();
    let region = Region { max_radius: r.max_radius(), points_per_symbol: r.points_per_symbol(), cells };
    Ok(serde_json::to_string(&region).expect("region serializes"))
}

fn symbols(f: &semiadv::Field, w: &Word) -> Vec<String> {
    w.symbols().map(|sym| sym.iter().map(|&x| format_elem(f, x)).collect::<Vec<_>>().join(" ")).collect()
}

/// Encode a seeded random message, pass it through the channel and decode.
#[allow(clippy::too_many_arguments)]
pub fn trace_json(fam: &str, n: usize, k: usize, p: u64, s: usize, l: usize, e0: usize, e: usize, adv: &str, seed: u64) -> Result<String, String> {
    let spec = code(family(fam)?, n, k, p, s)?;
    let f = spec.field();
    let m = spec.random_message(&mut trial_rng(seed, 0));
    let c = spec.encode(&m).map_err(|e| e.to_string())?;
    let ch = ChannelSpec::new(e0, e, adversary(adv)?, seed);
    ch.check(n).map_err(|e| e.to_string())?;
    let (y, pattern) = transmit(&c, &ch, f, 0).map_err(|e| e.to_string())?;
    let res = decode(&spec, &y, l, e).map_err(|e| e.to_string())?;
    let (outcome, reason, correct) = match &res.outcome {
        Outcome::Success(got) => ("success", None, *got == m),
        Outcome::Fail(r) => ("fail", Some(r.name()), false),
    };
    let region = RegionParams::of(&spec, l);
    Ok(json!({
        "message": format_message(f, &m),
        "codeword": symbols(f, &c),
        "received": symbols(f, &y),
        "adversarial": pattern.adversarial_positions(),
        "random": pattern.random_positions,
        "distance": distance(&c, &y).map_err(|e| e.to_string())?,
        "in_region": region.in_region(e0, e),
        "failure_bound": region.failure_bound(f.order(), e),
        "outcome": outcome,
        "reason": reason,
        "correct": correct,
        "diagnostics": res.diagnostics,
    })
    .to_string())
}

/// Build a list-size witness for an RS code and count the codewords in the
/// radius-`e` ball around it.
pub fn witness_json(n: usize, k: usize, p: u64, l: usize, e0: usize, e: usize) -> Result<String, String> {
    if n > 24 {
        return Err("ball enumeration is limited to n <= 24 in the browser".into());
    }
    let spec = code(Family::Rs, n, k, p, 1)?;
    let f = spec.field();
    let w = gssb_witness(&spec, e0, e, l).map_err(|e| e.to_string())?;
    let verified = verify_gssb(&spec, &w).map_err(|e| e.to_string())?;
    let ball = ball_intersect(&spec, &w.z, e).map_err(|e| e.to_string())?;
    Ok(json!({
        "verified": verified,
        "z": symbols(f, &w.z),
        "k_set": w.k_set,
        "blocks": w.blocks,
        "codewords": w.codewords.iter().map(|m| format_message(f, m)).collect::<Vec<_>>(),
        "ball_size": ball.len(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn region(fam: &str, n: usize, k: usize, s: usize, l: usize) -> Result<String, JsError> {
    region_json(fam, n, k, s, l).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trace(fam: &str, n: usize, k: usize, p: u32, s: usize, l: usize, e0: usize, e: usize, adv: &str, seed: u32) -> Result<String, JsError> {
    trace_json(fam, n, k, p as u64, s, l, e0, e, adv, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn witness(n: usize, k: usize, p: u32, l: usize, e0: usize, e: usize) -> Result<String, JsError> {
    witness_json(n, k, p as u64, l, e0, e).map_err(|e| JsError::new(&e))
}
