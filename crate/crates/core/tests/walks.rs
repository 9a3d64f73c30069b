use hsfnet_core::walk::{
    exact_hitting_solve, hitting_distribution, hitting_distribution_from, simulate_walks, uniform_start, TrapSpec,
    WalkOptions,
};
use hsfnet_core::{build_base, build_deleted, build_wheel, GraphInstance};
use proptest::prelude::*;

fn mc(inst: &GraphInstance, trials: u64, seed: u64) -> (f64, f64, u64) {
    let s = simulate_walks(&TrapSpec::hub(inst), &WalkOptions::new(trials, seed)).unwrap();
    let st = s.monte_carlo.unwrap();
    (st.sample_mean, st.std_error, st.truncated)
}

#[test]
fn monte_carlo_matches_exact_means() {
    for (m, t) in [(2, 1), (3, 2)] {
        let g = build_base(m, t).unwrap();
        let exact = exact_hitting_solve(&TrapSpec::hub(&g)).unwrap().mean;
        let (mean, se, truncated) = mc(&g, 100_000, 2024);
        assert!((mean - exact).abs() < 3.0 * se, "m={m} t={t}: {mean} vs {exact} (se {se})");
        assert!((truncated as f64) / 1e5 < 1e-6);
    }
}

#[test]
fn standard_error_scales_with_trials() {
    let g = build_base(3, 2).unwrap();
    let se: Vec<f64> = [1_000, 10_000, 100_000].iter().map(|&n| mc(&g, n, 77).1).collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        assert!((2.5..4.0).contains(&ratio), "{se:?}");
    }
}

#[test]
fn rim_variants_agree_with_simulation() {
    let cases = [build_wheel(2, 2).unwrap(), build_wheel(3, 2).unwrap(), build_deleted(3, 2, 0.5, 9).unwrap()];
    for g in &cases {
        let exact = exact_hitting_solve(&TrapSpec::hub(g)).unwrap();
        assert!(exact.per_vertex[1..].iter().all(|&h| h >= 1.0));
        let (mean, se, _) = mc(g, 50_000, 31);
        assert!((mean - exact.mean).abs() < 3.0 * se, "{:?}: {mean} vs {}", g.params(), exact.mean);
    }
}

#[test]
fn per_level_rows_reproduce_the_mean() {
    let g = build_base(3, 3).unwrap();
    let s = exact_hitting_solve(&TrapSpec::hub(&g)).unwrap();
    let weighted: f64 = s.per_level.iter().map(|l| l.mean * l.vertices as f64).sum();
    assert!((weighted / (g.vertex_count() - 1) as f64 - s.mean).abs() < 1e-12);
    assert_eq!(s.per_vertex[0], 0.0);
}

#[test]
fn uniform_start_distribution_converges_to_mean() {
    let g = build_base(2, 2).unwrap();
    let spec = TrapSpec::hub(&g);
    let d = hitting_distribution_from(&spec, &uniform_start(&spec), 400).unwrap();
    assert!((d.truncated_mean() - 38.0 / 7.0).abs() < 1e-9);
    assert!(d.tail_mass < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distribution_is_sub_stochastic(m in 2u32..=4, t in 0u32..=3, horizon in 1usize..80, pick in any::<u32>()) {
        let g = build_base(m, t).unwrap();
        let spec = TrapSpec::hub(&g);
        let source = 1 + pick % (g.vertex_count() as u32 - 1);
        let d = hitting_distribution(&spec, source, horizon).unwrap();
        let exact = exact_hitting_solve(&spec).unwrap().per_vertex[source as usize];
        let mut partial = 0.0;
        for &p in &d.probabilities {
            prop_assert!((0.0..=1.0).contains(&p));
            partial += p;
            prop_assert!(partial <= 1.0 + 1e-12);
        }
        prop_assert!(d.truncated_mean() <= exact + 1e-9);
        prop_assert!((partial + d.tail_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_mass_decreases_with_horizon(m in 2u32..=4, t in 1u32..=3, horizon in 1usize..60) {
        let g = build_base(m, t).unwrap();
        let spec = TrapSpec::hub(&g);
        let v = g.vertex_count() as u32 - 1;
        let a = hitting_distribution(&spec, v, horizon).unwrap();
        let b = hitting_distribution(&spec, v, horizon + 1).unwrap();
        prop_assert!(b.tail_mass <= a.tail_mass);
    }

    #[test]
    fn hitting_times_at_least_one(m in 2u32..=4, t in 0u32..=3, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = build_deleted(m, t, p, seed).unwrap();
        let s = exact_hitting_solve(&TrapSpec::hub(&g)).unwrap();
        prop_assert_eq!(s.per_vertex[0], 0.0);
        prop_assert!(s.per_vertex[1..].iter().all(|&h| h >= 1.0 - 1e-12));
    }
}
