//! Property tests for the arithmetic layers, checked against naive oracles.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semiadv::channel::{transmit, trial_rng};
use semiadv::minimize::{brute_force_solve, solve, solve_with, MinimizeProblem, Strategy as Route};
use semiadv::poly::{hermite, lagrange, vanishing};
use semiadv::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![(2u64, 1u32), (3, 1), (13, 1), (257, 1), (65537, 1), (2, 4), (3, 3), (17, 2)])
        .prop_map(|(p, m)| make_field(p, m).unwrap())
}

fn poly_of(f: &Field, seed: u64, len: usize) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Poly::new(f, (0..len).map(|_| f.random(&mut rng)).collect())
}

/// Quadratic product used as an oracle for the fast kernels.
fn naive_mul(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let (a, b) = (a.coeffs(), b.coeffs());
    if a.is_empty() || b.is_empty() {
        return Poly::zero(f);
    }
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    Poly::new(f, out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in field_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            prop_assert_eq!(f.pow(a, f.order() - 1), Fe::ONE);
        }
        prop_assert_eq!(f.from_residues(&f.residues(a)).unwrap(), a);
    }

    #[test]
    fn products_match_schoolbook(f in field_strategy(), la in 0usize..400, lb in 0usize..400, seed in any::<u64>()) {
        let a = poly_of(&f, seed, la);
        let b = poly_of(&f, seed ^ 1, lb);
        prop_assert_eq!(a.mul(&b), naive_mul(&f, &a, &b));
    }

    #[test]
    fn division_identity(f in field_strategy(), la in 0usize..300, lb in 1usize..200, seed in any::<u64>()) {
        let a = poly_of(&f, seed, la);
        let mut b = poly_of(&f, seed ^ 2, lb);
        if b.is_zero() {
            b = Poly::one(&f);
        }
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert!(r.len() < b.len());
        prop_assert_eq!(naive_mul(&f, &q, &b).add(&r), a);
    }

    #[test]
    fn interpolation_reproduces_values(n in 1usize..120, seed in any::<u64>(), geometric in any::<bool>()) {
        let f = make_field(65537, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Fe> = if geometric {
            let g = f.find_generator().unwrap();
            let a = f.random_nonzero(&mut rng);
            (0..n as u64).map(|i| f.mul(a, f.pow(g, i))).collect()
        } else {
            rand::seq::index::sample(&mut rng, 65536, n).into_iter().map(|i| Fe(i as u64 + 1)).collect()
        };
        let ys: Vec<Fe> = (0..n).map(|_| f.random(&mut rng)).collect();
        let p = lagrange(&f, &xs, &ys).unwrap();
        prop_assert!(p.len() <= n);
        prop_assert_eq!(xs.iter().map(|&x| p.eval(x)).collect::<Vec<_>>(), ys);
        let v = vanishing(&f, &xs, 1);
        prop_assert_eq!(v.len(), n + 1);
        prop_assert!(xs.iter().all(|&x| v.eval(x).is_zero()));
    }

    #[test]
    fn hermite_matches_hasse_derivatives(n in 1usize..20, w in 1usize..4, seed in any::<u64>()) {
        let f = make_field(257, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Fe> = rand::seq::index::sample(&mut rng, 256, n).into_iter().map(|i| Fe(i as u64 + 1)).collect();
        let data: Vec<Vec<Fe>> = (0..n).map(|_| (0..w).map(|_| f.random(&mut rng)).collect()).collect();
        let p = hermite(&f, &xs, &data).unwrap();
        prop_assert!(p.len() <= n * w);
        for (j, &x) in xs.iter().enumerate() {
            for t in 0..w {
                prop_assert_eq!(p.hasse(t).eval(x), data[j][t]);
            }
        }
    }

    #[test]
    fn hasse_leibniz_rule(la in 0usize..30, lb in 0usize..30, i in 0usize..8, seed in any::<u64>()) {
        let f = make_field(13, 1).unwrap();
        let a = poly_of(&f, seed, la);
        let b = poly_of(&f, seed ^ 3, lb);
        let mut rhs = Poly::zero(&f);
        for j in 0..=i {
            rhs = rhs.add(&a.hasse(j).mul(&b.hasse(i - j)));
        }
        prop_assert_eq!(a.mul(&b).hasse(i), rhs);
    }
}

fn random_problem(f: &Field, seed: u64, max_deg: usize) -> MinimizeProblem {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rp = |lo: usize| {
        let d = rng.gen_range(lo..=max_deg);
        let c: Vec<Fe> = (0..=d).map(|_| f.random(&mut rng)).collect();
        Poly::new(f, c)
    };
    let mut q0 = rp(1);
    if q0.is_zero() {
        q0 = Poly::x(f);
    }
    let h = 1 + (seed % 3) as usize;
    let qs = (0..h).map(|_| rp(0)).collect();
    MinimizeProblem::new(q0, qs, 1 + (seed % 5) as usize).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimizer_matches_linear_algebra(seed in any::<u64>(), big in any::<bool>()) {
        let f = make_field(if big { 257 } else { 13 }, 1).unwrap();
        let p = random_problem(&f, seed, 10);
        let fast = solve(&p).unwrap();
        let oracle = brute_force_solve(&p).unwrap();
        prop_assert_eq!(fast.max_degree, oracle.max_degree);
        prop_assert!(fast.is_consistent(&p));
        prop_assert!(oracle.is_consistent(&p));
        prop_assert!(fast.degrees.iter().all(|d| d.finite().is_none_or(|x| x <= fast.max_degree)));
    }

    #[test]
    fn strategies_are_bit_identical(seed in any::<u64>()) {
        let f = make_field(65537, 1).unwrap();
        let p = random_problem(&f, seed, 120);
        let a = solve_with(&p, Route::Iterative).unwrap();
        let b = solve_with(&p, Route::DivideAndConquer).unwrap();
        prop_assert_eq!(a.e, b.e);
        prop_assert_eq!(a.bs, b.bs);
        prop_assert_eq!(a.cs, b.cs);
    }
}

#[test]
fn random_positions_are_uniform_over_untouched_set() {
    let f = make_field(257, 1).unwrap();
    let spec = CodeSpec::new(Family::Irs, 20, 5, &f, 2, None, None).unwrap();
    let c = spec.encode(&spec.random_message(&mut trial_rng(1, 0))).unwrap();
    // a fixed adversary leaves the last 17 positions for the random errors
    let ch = ChannelSpec::new(3, 8, Adversary::PositionTargeted, 5);
    let mut counts = [0u64; 20];
    let trials = 20_000;
    for t in 0..trials {
        let (_, pat) = transmit(&c, &ch, &f, t).unwrap();
        for &i in &pat.random_positions {
            counts[i] += 1;
        }
    }
    assert!(counts[..3].iter().all(|&x| x == 0));
    let expected = (trials * 5) as f64 / 17.0;
    let stat: f64 = counts[3..].iter().map(|&x| (x as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(16.0).unwrap().cdf(stat);
    assert!(p_value > 1e-4, "chi-square {stat:.2}, p = {p_value:.2e}");
}

#[test]
fn random_symbols_are_uniform() {
    let f = make_field(13, 1).unwrap();
    let spec = CodeSpec::new(Family::Rs, 12, 3, &f, 1, None, None).unwrap();
    let c = spec.encode(&spec.random_message(&mut trial_rng(2, 0))).unwrap();
    let ch = ChannelSpec::new(0, 6, Adversary::RandomReplace, 6);
    let mut counts = [0u64; 13];
    for t in 0..10_000 {
        let (y, pat) = transmit(&c, &ch, &f, t).unwrap();
        for &i in &pat.random_positions {
            counts[y.get(i, 0).value() as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / 13.0;
    let stat: f64 = counts.iter().map(|&x| (x as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(12.0).unwrap().cdf(stat);
    assert!(p_value > 1e-4, "chi-square {stat:.2}, p = {p_value:.2e}");
}
