//! Decoder behaviour checked against independent routes: the fixed-degree
//! linear system, exhaustive ball enumeration and the extension-field view.

use proptest::prelude::*;
use semiadv::bounds::{ball_intersect_with, BallMethod};
use semiadv::channel::{transmit, trial_rng};
use semiadv::codes::{distance, SubfieldView};
use semiadv::decode::{decode, fixed_degree_solve, RegionParams};
use semiadv::*;

/// Decode by solving the fixed-degree system directly with the true error count.
fn decode_by_linear_algebra(spec: &CodeSpec, y: &Word, l: usize, e: usize) -> Option<Message> {
    let ebar = e * RegionParams::of(spec, l).points_per_symbol();
    let kernel = fixed_degree_solve(spec, y, l, ebar, ebar).ok()?;
    // a unique solution up to scaling is what the unique-decoding argument provides
    if kernel.len() != 1 {
        return None;
    }
    let (a, loc) = &kernel[0];
    if loc.is_zero() {
        return None;
    }
    let used = if spec.family() == Family::Irs || spec.family() == Family::Rs { spec.s() } else { 1 };
    let polys: Option<Vec<Poly>> = a.iter().take(used).map(|p| p.div_exact(loc).ok().flatten()).collect();
    Some(Message::new(polys?))
}

fn specs() -> Vec<(CodeSpec, usize)> {
    let f = make_field(257, 1).unwrap();
    vec![
        (CodeSpec::new(Family::Rs, 14, 4, &f, 1, None, None).unwrap(), 1),
        (CodeSpec::new(Family::Irs, 14, 4, &f, 3, None, None).unwrap(), 1),
        (CodeSpec::new(Family::Frs, 10, 8, &f, 4, None, None).unwrap(), 2),
        (CodeSpec::new(Family::Mult, 10, 8, &f, 3, None, None).unwrap(), 2),
    ]
}

#[test]
fn minimizer_and_linear_system_agree() {
    for (idx, (spec, l)) in specs().into_iter().enumerate() {
        let region = RegionParams::of(&spec, l);
        let emax = region.max_radius();
        let mut solved = 0;
        let mut successes = 0;
        for t in 0..60u64 {
            let e = (t as usize) % (emax + 1);
            let e0 = (0..=e).rev().find(|&x| region.in_region(x, e)).unwrap_or(0) / 2;
            let m = spec.random_message(&mut trial_rng(idx as u64, t));
            let c = spec.encode(&m).unwrap();
            let (y, pat) = transmit(&c, &ChannelSpec::new(e0, e, Adversary::RandomReplace, 40 + idx as u64), spec.field(), t).unwrap();
            let actual = pat.random_positions.len() + pat.adversarial_writes.len();
            let fast = decode(&spec, &y, l, e).unwrap();
            let slow = decode_by_linear_algebra(&spec, &y, l, actual);
            if let Some(msg) = fast.message() {
                successes += 1;
                assert_eq!(msg, &m, "{} trial {t}", spec.family());
            }
            if let Some(s) = &slow {
                solved += 1;
                assert_eq!(s, &m, "linear route returned a wrong message for {} trial {t}", spec.family());
                assert_eq!(fast.message(), Some(s), "{} trial {t}", spec.family());
            }
        }
        assert!(solved >= 55, "{}: linear route solved only {solved}/60", spec.family());
        assert!(successes >= 55, "{}: only {successes}/60 successes", spec.family());
    }
}

#[test]
fn successes_are_within_radius_and_match_the_ball() {
    // tiny codes so that balls can be enumerated over every message
    let f = make_field(7, 1).unwrap();
    let cases = [
        (CodeSpec::new(Family::Irs, 6, 2, &f, 2, None, None).unwrap(), 1usize),
        (CodeSpec::new(Family::Rs, 6, 2, &f, 1, None, None).unwrap(), 1),
        (CodeSpec::new(Family::Frs, 3, 2, &f, 2, None, None).unwrap(), 1),
    ];
    for (idx, (spec, l)) in cases.into_iter().enumerate() {
        let emax = RegionParams::of(&spec, l).max_radius();
        for t in 0..150u64 {
            let e = (t as usize) % (emax + 2);
            let m = spec.random_message(&mut trial_rng(90 + idx as u64, t));
            let c = spec.encode(&m).unwrap();
            let e_used = e.min(spec.n());
            let (y, _) = transmit(&c, &ChannelSpec::new(0, e_used, Adversary::RandomReplace, 7), &f, t).unwrap();
            let res = decode(&spec, &y, l, e).unwrap();
            if let Some(msg) = res.message() {
                let d = distance(&spec.encode(msg).unwrap(), &y).unwrap();
                assert!(d <= e, "decoded codeword at distance {d} > {e}");
                let ball = ball_intersect_with(&spec, &y, e, BallMethod::Exhaustive).unwrap();
                assert!(ball.contains(msg));
                assert_eq!(res.diagnostics.distance, Some(d));
            }
        }
    }
}

#[test]
fn beyond_radius_fails_cleanly() {
    let f = make_field(257, 1).unwrap();
    let spec = CodeSpec::new(Family::Irs, 16, 8, &f, 2, None, None).unwrap();
    let mut reasons = std::collections::BTreeSet::new();
    let mut fails = 0;
    for t in 0..200u64 {
        let m = spec.random_message(&mut trial_rng(3, t));
        let (y, _) = transmit(&spec.encode(&m).unwrap(), &ChannelSpec::new(6, 12, Adversary::SingleComponent, 4), &f, t).unwrap();
        let res = decode(&spec, &y, 1, 12).unwrap();
        if let Outcome::Fail(r) = res.outcome {
            fails += 1;
            reasons.insert(r.name());
        }
    }
    assert!(fails > 150, "only {fails} failures far outside the region");
    assert!(!reasons.is_empty());
}

#[test]
fn rejects_malformed_input() {
    let f = make_field(257, 1).unwrap();
    let spec = CodeSpec::new(Family::Irs, 8, 3, &f, 2, None, None).unwrap();
    assert!(decode(&spec, &Word::zeros(7, 2), 1, 1).is_err());
    assert!(decode(&spec, &Word::zeros(8, 3), 1, 1).is_err());
    let frs = CodeSpec::new(Family::Frs, 8, 3, &f, 3, None, None).unwrap();
    assert!(decode(&frs, &Word::zeros(8, 3), 4, 1).is_err());
    assert!(decode(&frs, &Word::zeros(8, 3), 0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extension_view_commutes(seed in any::<u64>(), s in 2usize..4) {
        let f = make_field(13, 1).unwrap();
        let ext = make_field(13, s as u32).unwrap();
        let spec = CodeSpec::new(Family::Irs, 9, 3, &f, s, None, None).unwrap();
        let view = SubfieldView::new(&spec, SubfieldEmbedding::new(&f, &ext).unwrap()).unwrap();
        let m = spec.random_message(&mut trial_rng(seed, 0));
        let c = spec.encode(&m).unwrap();
        let lifted = view.to_ext(&c).unwrap();
        prop_assert_eq!(&lifted, &view.rs().encode(&view.combine(&m).unwrap()).unwrap());
        prop_assert_eq!(view.from_ext(&lifted).unwrap(), c);
        prop_assert_eq!(view.split(&view.combine(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn zero_errors_always_decode(seed in any::<u64>(), fam in 0usize..4) {
        let (spec, l) = specs().swap_remove(fam);
        let m = spec.random_message(&mut trial_rng(seed, 1));
        let res = decode(&spec, &spec.encode(&m).unwrap(), l, 0).unwrap();
        prop_assert_eq!(res.message(), Some(&m));
        prop_assert_eq!(res.diagnostics.locator_degree, Some(0));
    }
}
