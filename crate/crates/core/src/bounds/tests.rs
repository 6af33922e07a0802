use std::f64::consts::E;

use proptest::prelude::*;

use super::*;
use crate::ArmDistribution::{Bernoulli, Dirac};

fn env(arms: &[crate::ArmDistribution]) -> Environment {
    Environment::new(arms.to_vec()).unwrap()
}

/// Independent KL oracle: sum over the two atoms {0, 1} of
/// `P(x) (ln P(x) - ln Q(x))`.
fn kl_two_atom_oracle(p: f64, q: f64) -> f64 {
    [(1.0 - p, 1.0 - q), (p, q)]
        .iter()
        .filter(|(px, _)| *px > 0.0)
        .map(|&(px, qx)| px * (px.ln() - qx.ln()))
        .sum()
}

#[test]
fn kl_examples() {
    assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
    let want = kl_two_atom_oracle(0.5, 0.75);
    assert!((want - 0.143_841_036_225_890_4).abs() < 1e-15);
    assert!((kl_bernoulli(0.5, 0.75) - want).abs() < 1e-15);
    assert_eq!(kl_bernoulli(0.3, 1.0), f64::INFINITY);
    assert_eq!(kl_bernoulli(0.3, 0.0), f64::INFINITY);
    assert!((kl_bernoulli(0.0, 0.5) - 2f64.ln()).abs() < 1e-15);
    assert!((kl_bernoulli(1.0, 0.5) - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn kl_pinsker_grid() {
    for i in 0..100 {
        for j in 0..100 {
            let p = i as f64 / 99.0;
            let q = j as f64 / 99.0;
            let kl = kl_bernoulli(p, q);
            assert!(kl >= 0.0);
            assert_eq!(kl == 0.0, p == q, "p={p} q={q}");
            assert!(kl >= 2.0 * (p - q) * (p - q) - 1e-15, "p={p} q={q}");
        }
    }
}

#[test]
fn dk_bernoulli_cases() {
    let e = env(&[Bernoulli(0.75), Bernoulli(0.5)]);
    let d = dk_bernoulli(&e, 1).unwrap();
    assert!((d - kl_two_atom_oracle(0.5, 0.75)).abs() < 1e-15);

    assert_eq!(dk_bernoulli(&env(&[Bernoulli(0.6), Bernoulli(0.6)]), 1), Err(Error::NotSuboptimal(1)));
    assert_eq!(dk_bernoulli(&e, 0), Err(Error::NotSuboptimal(0)));
    assert_eq!(dk_bernoulli(&env(&[Bernoulli(1.0), Bernoulli(0.5)]), 1), Err(Error::InfiniteDivergence));
    assert_eq!(dk_bernoulli(&env(&[Bernoulli(0.7), Dirac(0.4)]), 1), Err(Error::UnsupportedFamily(1)));
    // Two-point laws on {0, 1} are Bernoulli.
    let tp = env(&[Bernoulli(0.75), crate::ArmDistribution::TwoPoint(0.5, 0.0, 1.0)]);
    assert!((dk_bernoulli(&tp, 1).unwrap() - d).abs() < 1e-15);
}

#[test]
fn dk_bernoulli_vanishes_with_gap() {
    let mut prev = f64::INFINITY;
    for eps in [0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4, 1e-6] {
        let d = dk_bernoulli(&env(&[Bernoulli(0.5 + eps), Bernoulli(0.5)]), 1).unwrap();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-11);
}

#[test]
fn dk_twopoint_values() {
    assert!((dk_twopoint_upper(0.75).unwrap() - 4f64.ln()).abs() < 1e-15);
    assert!((dk_twopoint_upper(1.0 - 1.0 / E).unwrap() - 1.0).abs() < 1e-15);
    let tiny = dk_twopoint_upper(1e-9).unwrap();
    assert!((tiny - 1e-9).abs() < 1e-17);
    assert!(dk_twopoint_upper(0.0).is_err());
    assert!(dk_twopoint_upper(1.0).is_err());
}

#[test]
fn prop1_values() {
    assert!((prop1_count_bound(0.25, 1.0, E.powi(4)).unwrap() - 2.0).abs() < 1e-15);
    for (rho, gap) in [(0.1, 0.3), (2.0, 0.01), (0.45, 1.0)] {
        assert_eq!(prop1_count_bound(rho, gap, 1.0).unwrap(), 1.0);
    }
    assert!((prop1_count_bound(0.3, 0.3, 1e5).unwrap() - 39.376_418_216_567_43).abs() < 1e-12);
    assert!(prop1_count_bound(0.0, 0.3, 10.0).is_err());
    assert!(prop1_count_bound(0.3, 0.0, 10.0).is_err());
}

#[test]
fn prop2_h_value() {
    let want = 2f64.ln() * (1.0 + (2.0 * 2f64.ln()).sqrt()).powi(-2);
    assert!((prop2_h(0.25, 0.5, 2.0) - want).abs() < 1e-15);
    assert!((want - 0.146_199_209_970_697_4).abs() < 1e-15);
}

#[test]
fn prop2_f_at_two_is_minus_h2() {
    assert_eq!(prop2_f(0.25, 0.5, 2.0).unwrap(), -prop2_h(0.25, 0.5, 2.0));
    assert!(prop2_f(0.25, 0.5, 1.5).is_err());
}

#[test]
fn prop2_table_matches_pointwise() {
    let table = prop2_f_table(0.3, 0.3, 2000).unwrap();
    for n in [2u64, 3, 4, 17, 500, 1999, 2000] {
        assert_eq!(table[n as usize].to_bits(), prop2_f(0.3, 0.3, n as f64).unwrap().to_bits());
    }
    assert!(table[0].is_nan() && table[1].is_nan());
}

/// `h'` in closed form, used only to check the finite-difference route.
fn prop2_h_prime_closed(rho: f64, gap: f64, t: f64) -> f64 {
    let g2 = gap * gap;
    let l = t.ln();
    let x = 2.0 * rho * l / ((t - 1.0) * g2);
    let corr = 1.0 + x.sqrt();
    let dx = 2.0 * rho / g2 * (1.0 / (t * (t - 1.0)) - l / ((t - 1.0) * (t - 1.0)));
    let dcorr = dx / (2.0 * x.sqrt());
    rho / g2 * (1.0 / (t * corr * corr) - 2.0 * l * dcorr / (corr * corr * corr))
}

#[test]
fn prop2_finite_difference_matches_closed_form() {
    for (rho, gap) in [(0.1, 0.3), (0.45, 0.3), (0.25, 0.5)] {
        for t in [2.0, 3.0, 10.0, 1e3, 1e6] {
            let fd = {
                let d = PROP2_DIFF_STEP * t;
                (prop2_h(rho, gap, t + d) - prop2_h(rho, gap, t - d)) / (2.0 * d)
            };
            let exact = prop2_h_prime_closed(rho, gap, t);
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-6), "t={t}: {fd} vs {exact}");
        }
    }
}

#[test]
fn prop2_f_over_h_tends_to_one() {
    for rho in [0.1, 0.3, 0.45] {
        let ratio = prop2_f(rho, 0.3, 1e7).unwrap() / prop2_h(rho, 0.3, 1e7);
        assert!((0.95..=1.05).contains(&ratio), "rho={rho}: {ratio}");
    }
}

#[test]
fn thm3_values() {
    let e = env(&[Dirac(1.0), Dirac(0.0)]);
    let want = 4.0 + 2.0 * (1.0 / 2f64.ln() + 1.0) * 0.75f64.exp() / 0.75;
    assert!((want - 17.789_827_845_711_02).abs() < 1e-12);
    assert!((thm3_regret_bound(&e, 0.25, 0.5, E).unwrap() - want).abs() < 1e-12);
    let at_one = 2.0 * 1.0 * 1.0 / (1.0 - 0.25);
    assert!((thm3_regret_bound(&e, 0.25, 0.5, 1.0).unwrap() - at_one).abs() < 1e-15);

    assert!(thm3_regret_bound(&env(&[Dirac(0.5), Dirac(0.5)]), 0.25, 0.5, 10.0).is_err());
    assert!(thm3_regret_bound(&e, 0.6, 0.9, 10.0).is_err());
    assert!(thm3_regret_bound(&e, 0.25, 1.0, 10.0).is_err());
    assert!(thm3_regret_bound(&e, 0.45, 0.99, 10.0).is_ok());
}

#[test]
fn lemma1_empty_sum() {
    let f = ExplorationFn::log(0.5);
    // u = ceil(4 * 0.5 * ln 10 / 0.25) = 19 > 10
    let v = lemma1_count_bound(&f, &f, 0.5, 0.9, 10).unwrap();
    assert_eq!(v, (8.0 * 10f64.ln()).ceil());
}

#[test]
fn lemma1_summand_matches_power_form() {
    // With f(t) = rho ln t, exp(-2 beta f(t)) = t^(-2 rho beta), so the
    // summand is 2 (ln t / ln(1/beta) + 1) / t^(2 rho beta).
    for (rho, beta) in [(0.25f64, 0.9f64), (0.1, 0.5), (0.45, 0.99)] {
        let f = ExplorationFn::log(rho);
        for i in 0..100 {
            let t = 2.0 + (i as f64) * 997.0;
            let power = 2.0 * (t.ln() / (1.0 / beta).ln() + 1.0) / t.powf(2.0 * rho * beta);
            let got = lemma1_summand(&f, &f, beta, t);
            assert!((got - power).abs() < 1e-12, "t={t}: {got} vs {power}");
        }
    }
}

#[test]
fn lower_curve_values() {
    let e = env(&[Bernoulli(0.75), Bernoulli(0.5)]);
    let v = lower_curve_alpha(&e, 1, 0.0, E).unwrap();
    assert!((v - 6.952_118_993_564_416).abs() < 1e-12);
    assert!((v - 1.0 / kl_two_atom_oracle(0.5, 0.75)).abs() < 1e-12);
    for n in [2.0, 10.0, 1e5] {
        let d = lower_curve_alpha(&e, 1, 0.3, 2.0 * n).unwrap() - lower_curve_alpha(&e, 1, 0.3, n).unwrap();
        assert!((d - 0.7 * 2f64.ln() / dk_bernoulli(&e, 1).unwrap()).abs() < 1e-12);
    }
    assert!(lower_curve_alpha(&e, 1, 0.999_999, 1e5).unwrap() < 1e-3);
    assert!(lower_curve_alpha(&e, 1, 1.0, 1e5).is_err());
}

#[test]
fn ucb1_values() {
    let e = env(&[Dirac(0.75), Dirac(0.25)]);
    assert!((ucb1_regret_bound(&e, E).unwrap() - 24.0).abs() < 1e-12);
    assert!(ucb1_regret_bound(&e, 1.0).is_err());
    assert!(ucb1_regret_bound(&e, 0.5).is_err());
    assert!(ucb1_regret_bound(&env(&[Dirac(0.3), Dirac(0.3)]), 10.0).is_err());
}

#[test]
fn dirac_generic_values() {
    let f = ExplorationFn::log_log(1.0);
    let v = dirac_generic_count_bound(&f, 0.3, 1e5).unwrap();
    assert!((v - 28.149_670_640_911_73).abs() < 1e-10);
    assert_eq!(dirac_generic_count_bound(&f, 0.3, 2.0).unwrap(), 1.0);
}

#[test]
fn hannan_checks() {
    let loglog = ExplorationFn::log_log(1.0);
    assert!(hannan_sufficient(&[loglog, loglog], 1.0).passes);
    let linear = ExplorationFn::new(0.0, 0.0, 0.0, 1.0, 1.0).unwrap();
    let r = hannan_sufficient(&[linear, linear], 1.0);
    assert!(!r.passes);
    assert!(r.reasons.iter().any(|s| s.contains("fails o(n)")));
    let weak = ExplorationFn::log_log(0.4);
    assert!(!hannan_sufficient(&[weak, weak], 0.4).passes);
    assert!(!hannan_sufficient(&[weak, weak], 0.6).passes);
    let sqrt = ExplorationFn::new(0.0, 0.0, 0.0, 1.0, 0.5).unwrap();
    assert!(hannan_sufficient(&[sqrt, ExplorationFn::log(0.1)], 0.75).passes);
}

#[test]
fn etc_estimate_values() {
    // Independent evaluation of the Gaussian tail approximation.
    let (gap, sigma, s) = (0.2f64, 0.5f64, 200u64);
    let p = (1.0 / (2.0 * std::f64::consts::PI).sqrt()) * (sigma / (gap * (s as f64).sqrt()))
        * (-(gap * gap) * s as f64 / (2.0 * sigma * sigma)).exp();
    assert!((p - 7.936_396_669_916_572e-9).abs() < 1e-20);
    assert!((etc_miss_probability(gap, sigma, s).unwrap() - p).abs() < 1e-22);
    let est = etc_regret_estimate(gap, sigma, s, 10_000).unwrap();
    assert!((est - 40.0).abs() < 1e-4);
    // Tail vanishes as s grows.
    let big = etc_regret_estimate(0.2, 0.5, 5000, 100_000).unwrap();
    assert_eq!(big, 0.2 * 5000.0);
    assert!(etc_regret_estimate(0.2, 0.5, 0, 100).is_err());
    // Small s saturates the clamp.
    assert_eq!(etc_miss_probability(0.01, 1.0, 1).unwrap(), 1.0);
}

#[test]
fn curves_metadata() {
    let e = env(&[Bernoulli(0.75), Bernoulli(0.5)]);
    let c = BoundCurve::lower(&e, 1, 0.0).unwrap();
    assert_eq!(c.kind(), "lower");
    assert!(!c.params().contains(','));
    assert!((c.eval(E) - 6.952_118_993_564_416).abs() < 1e-12);
    assert!(BoundCurve::ucb1(&e).unwrap().eval(1.0).is_nan());
    assert!(BoundCurve::thm3(&e, 0.6, 0.9).is_err());
    let l = BoundCurve::lemma1(&e, 1, &[ExplorationFn::log(0.3); 2], 0.9).unwrap();
    assert_eq!(
        l.eval(1000.0),
        lemma1_count_bound(&ExplorationFn::log(0.3), &ExplorationFn::log(0.3), 0.25, 0.9, 1000).unwrap()
    );
}

proptest! {
    #[test]
    fn thm3_nondecreasing(rho in 0.01f64..0.49, beta in 0.05f64..0.99, gap in 0.01f64..1.0, n in 1u64..1_000_000) {
        let e = env(&[Dirac(1.0), Dirac(1.0 - gap)]);
        prop_assume!(2.0 * rho * beta < 1.0);
        let a = thm3_regret_bound(&e, rho, beta, n as f64).unwrap();
        let b = thm3_regret_bound(&e, rho, beta, (n + 1) as f64).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn lemma1_grows_between_threshold_jumps(c1 in 0.0f64..2.0, c2 in 0.0f64..1.0, beta in 0.5f64..0.99, gap in 0.1f64..1.0, n in 2u64..3000) {
        // The literal bound is not monotone overall: when u = ceil(4 f_k(n) / gap^2)
        // steps up, the summand at t = u + 1 leaves the tail. Between steps it grows,
        // and across a step it loses at most the dropped summands.
        let f = ExplorationFn::new(0.0, c1, c2, 0.0, 1.0).unwrap();
        let u = |m: u64| (4.0 * f.eval(m as f64) / (gap * gap)).ceil();
        let a = lemma1_count_bound(&f, &f, gap, beta, n).unwrap();
        let b = lemma1_count_bound(&f, &f, gap, beta, n + 1).unwrap();
        if u(n) == u(n + 1) {
            prop_assert!(b >= a, "n={} {} -> {}", n, a, b);
        } else {
            let dropped: f64 = ((u(n) as u64 + 1)..=(u(n + 1) as u64).min(n))
                .map(|t| lemma1_summand(&f, &f, beta, t as f64))
                .sum();
            prop_assert!(b >= a - dropped - 1e-9, "n={} {} -> {}", n, a, b);
        }
    }

    #[test]
    fn kl_matches_oracle(p in 0.0f64..=1.0, q in 0.001f64..0.999) {
        prop_assert!((kl_bernoulli(p, q) - kl_two_atom_oracle(p, q)).abs() < 1e-12);
    }
}
