//! Randomized invariants, 1000 cases each with fixed seeds.

use std::sync::OnceLock;

use meandiff::differences::{difference, generator_difference, DifferencePair, CERTIFIED};
use meandiff::divergences::{divergence, random_pair, ClassicalKind, DivergenceKind};
use meandiff::inequalities::{builtin_chain, log_grid, ChainEdge, InequalityChain};
use meandiff::means::{generator, mean_value, MeanKind, PositivePair};
use meandiff::polycert::{builtin_polynomial, certify_positive, Polynomial, Verdict, BUILTIN_POLYNOMIALS};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(seed: u64) -> ProptestConfig {
    ProptestConfig { cases: 1000, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..ProptestConfig::default() }
}

fn positive() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

fn any_kind() -> impl Strategy<Value = MeanKind> {
    prop_oneof![
        (0..13usize).prop_map(|i| MeanKind::NAMED[i]),
        (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(r, s)| MeanKind::Gini(r, s)),
        (-4.0f64..4.0).prop_map(MeanKind::Power),
        (-4.0f64..4.0).prop_map(MeanKind::Lehmer),
    ]
}

fn certified() -> impl Strategy<Value = DifferencePair> {
    (0..CERTIFIED.len()).prop_map(|i| CERTIFIED[i])
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(config(1))]
    #[test]
    fn mean_symmetry(k in any_kind(), a in positive(), b in positive()) {
        let m = mean_value(k, PositivePair::new(a, b).unwrap()).unwrap();
        let n = mean_value(k, PositivePair::new(b, a).unwrap()).unwrap();
        prop_assert!(rel(m, n) <= 1e-12, "{k}: {m} vs {n}");
    }
}

proptest! {
    #![proptest_config(config(2))]
    #[test]
    fn mean_homogeneity(k in any_kind(), a in positive(), b in positive(), l in 1e-3f64..1e3) {
        let m = mean_value(k, PositivePair::new(a, b).unwrap()).unwrap();
        let n = mean_value(k, PositivePair::new(l * a, l * b).unwrap()).unwrap();
        prop_assert!(rel(l * m, n) <= 1e-12, "{k}: {} vs {n}", l * m);
    }
}

proptest! {
    #![proptest_config(config(3))]
    #[test]
    fn mean_internality(k in any_kind(), a in positive(), b in positive()) {
        let p = PositivePair::new(a, b).unwrap();
        let m = mean_value(k, p).unwrap();
        prop_assert!(m >= p.min() * (1.0 - 1e-14) && m <= p.max() * (1.0 + 1e-14));
    }
}

proptest! {
    #![proptest_config(config(4))]
    #[test]
    fn differences_vanish_on_the_diagonal(pair in certified(), a in positive()) {
        prop_assert_eq!(difference(pair, PositivePair::new(a, a).unwrap()).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(config(5))]
    #[test]
    fn generator_consistency(k in any_kind(), a in positive(), b in positive()) {
        let m = mean_value(k, PositivePair::new(a, b).unwrap()).unwrap();
        let g = b * generator(k, a / b).unwrap();
        prop_assert!(rel(m, g) <= 1e-12, "{k}: {m} vs {g}");
    }
}

proptest! {
    #![proptest_config(config(6))]
    #[test]
    fn differences_are_nonnegative_and_consistent(pair in certified(), a in positive(), b in positive()) {
        let d = difference(pair, PositivePair::new(a, b).unwrap()).unwrap();
        prop_assert!(d >= 0.0, "{pair}: {d}");
        let g = b * generator_difference(pair, a / b).unwrap();
        prop_assert!((d - g).abs() <= 1e-12 * (a.max(b)), "{pair}: {d} vs {g}");
    }
}

fn any_divergence() -> impl Strategy<Value = DivergenceKind> {
    prop_oneof![
        (0..6usize).prop_map(|i| DivergenceKind::Classical(ClassicalKind::ALL[i])),
        certified().prop_map(DivergenceKind::MeanDifference),
    ]
}

proptest! {
    #![proptest_config(config(7))]
    #[test]
    fn divergence_symmetry(k in any_divergence(), seed in any::<u64>()) {
        let (p, q) = random_pair(&mut ChaCha8Rng::seed_from_u64(seed));
        let d = divergence(k, &p, &q).unwrap();
        let e = divergence(k, &q, &p).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(rel(d, e) <= 1e-12, "{k}: {d} vs {e}");
    }
}

proptest! {
    #![proptest_config(config(8))]
    #[test]
    fn divergence_identity(k in any_divergence(), seed in any::<u64>()) {
        let (p, q) = random_pair(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(divergence(k, &p, &p).unwrap(), 0.0);
        prop_assert!(divergence(k, &p, &q).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(config(9))]
    #[test]
    fn strict_certificates_are_sound(i in 0..3usize, t in 1e-6f64..100.0) {
        let p = &strict_polynomials()[i];
        prop_assert!(p.eval_f64(t) > 0.0);
    }
}

/// h1, h2, h3 after checking that each is certified strictly positive.
fn strict_polynomials() -> &'static [Polynomial] {
    static CERTIFIED_STRICT: OnceLock<Vec<Polynomial>> = OnceLock::new();
    CERTIFIED_STRICT.get_or_init(|| {
        BUILTIN_POLYNOMIALS[..3]
            .iter()
            .map(|name| {
                let p = builtin_polynomial(name).unwrap();
                assert_eq!(certify_positive(&p).unwrap().verdict, Verdict::StrictlyPositive, "{name}");
                p
            })
            .collect()
    })
}

#[test]
fn composed_edges_hold() {
    // Composing a ≤ b and b ≤ c within each theorem chain yields a ≤ c.
    for name in ["thm31-43", "thm31-44", "thm31-45"] {
        let chain = builtin_chain(name).unwrap();
        let mut composed = Vec::new();
        for e1 in &chain.edges {
            for e2 in chain.edges.iter().filter(|e2| e2.lhs == e1.rhs) {
                composed.push(ChainEdge { lhs: e1.lhs, rhs: e2.rhs, part: None });
            }
        }
        let c = InequalityChain::new(format!("{name}-composed"), composed).unwrap();
        let r = meandiff::inequalities::audit_points(&c, &log_grid(1e-6, 1e6, 2001), 1e-10).unwrap();
        assert!(r.passed, "{name}");
    }
}
