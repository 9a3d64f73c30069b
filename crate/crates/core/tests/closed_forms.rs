use hsfnet_core::analytic::{
    assortativity_r, closed_form_report, clustering_c1, clustering_c2_expected, diameter_closed_form,
    hitting_closed_forms,
};
use hsfnet_core::empirical::{assortativity_pearson, average_local_clustering, diameter_bfs, DiameterMode};
use hsfnet_core::walk::{exact_hitting_solve, level_collapsed_solve, mean_hitting_closed, TrapSpec};
use hsfnet_core::{build_base, build_deleted, build_wheel, ExactScalar, ModelParams};
use proptest::prelude::*;

#[test]
fn pearson_equals_closed_form() {
    for m in 2..=4 {
        for t in 1..=6 {
            let g = build_base(m, t).unwrap();
            let measured = assortativity_pearson(g.graph()).unwrap();
            let closed = assortativity_r(m, t).unwrap();
            assert_eq!(measured, closed, "m={m} t={t}");
        }
    }
    assert_eq!(assortativity_r(2, 1).unwrap(), ExactScalar::ratio(-1, 3));
}

#[test]
fn diameter_is_four_for_every_variant() {
    for m in 2..=4 {
        for t in 1..=6 {
            let base = build_base(m, t).unwrap();
            assert_eq!(diameter_bfs(base.graph(), DiameterMode::Exact).unwrap().value, 4);
            assert_eq!(diameter_closed_form(&base.params().variant, m, t), Some(4));
            let wheel = build_wheel(m, t).unwrap();
            assert_eq!(diameter_bfs(wheel.graph(), DiameterMode::Exact).unwrap().value, 4);
            for p in [0.0, 0.5, 1.0] {
                for seed in 0..3 {
                    let g = build_deleted(m, t, p, seed).unwrap();
                    let d = diameter_bfs(g.graph(), DiameterMode::Exact).unwrap();
                    assert_eq!(d.value, 4, "m={m} t={t} p={p} seed={seed}");
                }
            }
            assert_eq!(average_local_clustering(&base).average, 0.0);
        }
    }
    for m in 2..=5 {
        let g = build_base(m, 0).unwrap();
        assert_eq!(diameter_bfs(g.graph(), DiameterMode::AllSources).unwrap().value, 2);
    }
}

#[test]
fn linear_solve_matches_hitting_closed_forms() {
    for m in 2..=4 {
        for t in 1..=6 {
            let g = build_base(m, t).unwrap();
            if g.vertex_count() > 6000 {
                continue;
            }
            let spec = TrapSpec::hub(&g);
            let solved = exact_hitting_solve(&spec).unwrap();
            let closed = hitting_closed_forms(m, t).unwrap();
            for v in 1..g.vertex_count() {
                let want = if g.level(v) == t + 1 { closed.bottom } else { closed.intermediate.unwrap() };
                assert!((solved.per_vertex[v] - want as f64).abs() < 1e-9, "m={m} t={t} v={v}");
            }
            assert!((solved.mean - closed.mean.to_f64()).abs() < 1e-9);
            let collapsed = level_collapsed_solve(&spec).unwrap();
            assert_eq!(collapsed.mean_exact.unwrap(), closed.mean);
            for (a, b) in collapsed.per_vertex.iter().zip(&solved.per_vertex) {
                assert!((a - b).abs() < 1e-12, "m={m} t={t} {a} {b} {:?}", solved.method);
            }
        }
    }
}

#[test]
fn collapsed_solve_covers_large_instances() {
    // Beyond the dense limit the per-level system still yields exact values.
    for m in 2..=4 {
        for t in 1..=6 {
            let g = build_base(m, t).unwrap();
            let c = level_collapsed_solve(&TrapSpec::hub(&g)).unwrap();
            assert_eq!(c.mean_exact.unwrap(), mean_hitting_closed(m, t).unwrap().mean);
        }
    }
}

#[test]
fn mean_hitting_stays_in_band() {
    for m in 2..=6 {
        for t in 1..=20 {
            let h = mean_hitting_closed(m, t).unwrap();
            assert!(h.in_band, "m={m} t={t}");
        }
    }
}

#[test]
fn c2_is_monotone_in_p() {
    for m in 2..=6u32 {
        for t in 0..=6u32 {
            let values: Vec<f64> =
                (0..=100).map(|i| clustering_c2_expected(m, t, i as f64 / 100.0).unwrap().to_f64()).collect();
            let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
            if t == 0 && m >= 4 {
                // The closed form rises near p = 0 here.
                assert!(values[1] > values[0], "m={m}");
            } else {
                assert!(decreasing, "m={m} t={t}");
            }
            assert_eq!(values[100], 0.0);
        }
    }
}

#[test]
fn c2_reduces_to_c1_at_zero() {
    for m in 2..=5 {
        for t in 0..=6 {
            assert_eq!(clustering_c2_expected(m, t, 0.0).unwrap(), clustering_c1(m, t).unwrap());
        }
    }
}

#[test]
fn g1_clustering_formula_vs_triangles() {
    // Reported gap: K₄ is fully clustered while the closed form gives 1/2.
    assert_eq!(clustering_c1(3, 0).unwrap(), ExactScalar::ratio(1, 2));
    let k4 = build_wheel(3, 0).unwrap();
    assert_eq!(average_local_clustering(&k4).average, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_is_a_function_of_params(m in 2u32..=8, t in 0u32..=12, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let params = ModelParams::deleted(m, t, p, seed);
        let a = closed_form_report(&params).unwrap();
        let b = closed_form_report(&ModelParams::deleted(m, t, p, seed ^ 1)).unwrap();
        prop_assert_eq!(a.vertices, b.vertices);
        prop_assert_eq!(a.variant_edges, b.variant_edges);
        prop_assert_eq!(a.clustering_c2_expected, b.clustering_c2_expected);
    }

    #[test]
    fn pearson_of_base_is_negative(m in 2u32..=4, t in 1u32..=5) {
        let r = assortativity_r(m, t).unwrap().to_f64();
        prop_assert!(r < 0.0 && r > -1.0);
    }
}
