use std::collections::BTreeSet;

use hsfnet_core::analytic::{counts, degree_table};
use hsfnet_core::empirical::{degree_histogram, triangle_count};
use hsfnet_core::model::{build, build_base, build_deleted, build_wheel, BuildOptions};
use hsfnet_core::{Error, ExactScalar, ModelParams};
use proptest::prelude::*;

/// Copy-based construction: a seed star (or wheel), then `m` copies of the
/// previous graph joined by a fresh hub wired to every copy's bottom level.
/// Returns levels and edges with ids renumbered level-major.
fn literal(m: u32, t: u32, wheel: bool) -> (Vec<u32>, BTreeSet<(u32, u32)>) {
    let mut levels = vec![0u32];
    let mut edges = Vec::new();
    for leaf in 1..=m {
        levels.push(1);
        edges.push((0, leaf));
    }
    if wheel {
        if m == 2 {
            edges.push((1, 2));
        } else {
            for i in 0..m {
                edges.push((1 + i, 1 + (i + 1) % m));
            }
        }
    }
    for step in 1..=t {
        let n = levels.len() as u32;
        let mut next_levels = vec![0u32];
        let mut next_edges = Vec::new();
        for copy in 0..m {
            let shift = 1 + copy * n;
            next_levels.extend(levels.iter().map(|l| l + 1));
            next_edges.extend(edges.iter().map(|&(u, v)| (u + shift, v + shift)));
            for (v, &l) in levels.iter().enumerate() {
                if l == step {
                    next_edges.push((0, v as u32 + shift));
                }
            }
        }
        levels = next_levels;
        edges = next_edges;
    }
    // Stable sort by level keeps copy order within a level.
    let mut order: Vec<u32> = (0..levels.len() as u32).collect();
    order.sort_by_key(|&v| levels[v as usize]);
    let mut rank = vec![0u32; levels.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old as usize] = new as u32;
    }
    let sorted_levels = order.iter().map(|&v| levels[v as usize]).collect();
    let relabeled = edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (rank[u as usize], rank[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    (sorted_levels, relabeled)
}

fn edge_set(inst: &hsfnet_core::GraphInstance) -> BTreeSet<(u32, u32)> {
    inst.graph().edges().collect()
}

#[test]
fn matches_copy_construction() {
    for m in 2..=4 {
        for t in 0..=4 {
            let (levels, edges) = literal(m, t, false);
            let g = build_base(m, t).unwrap();
            assert_eq!(g.levels(), &levels[..], "levels m={m} t={t}");
            assert_eq!(edge_set(&g), edges, "edges m={m} t={t}");

            let (levels, edges) = literal(m, t, true);
            let w = build_wheel(m, t).unwrap();
            assert_eq!(w.levels(), &levels[..], "wheel levels m={m} t={t}");
            assert_eq!(edge_set(&w), edges, "wheel edges m={m} t={t}");
        }
    }
}

#[test]
fn recurrence_agrees_with_closed_form() {
    for m in 2u128..=5 {
        let (mut v, mut e) = (m + 1, m);
        for t in 0..=20u32 {
            if t > 0 {
                v = m * v + 1;
                e = m * e + m.pow(t + 1);
            }
            let c = counts(m as u32, t).unwrap();
            assert_eq!(c.vertices, ExactScalar::from_integer(v));
            assert_eq!(c.edges, ExactScalar::from_integer(e));
        }
    }
}

#[test]
fn counts_and_degree_tables_on_grid() {
    for m in 2..=5u32 {
        for t in 0..=8u32 {
            let p = ModelParams::base(m, t);
            if p.vertex_count().unwrap() > 1_000_000 {
                continue;
            }
            let g = build_base(m, t).unwrap();
            let c = counts(m, t).unwrap();
            assert_eq!(ExactScalar::from_integer(g.vertex_count() as u64), c.vertices);
            assert_eq!(ExactScalar::from_integer(g.edge_count() as u64), c.edges);

            let hist = degree_histogram(g.graph());
            let mut want = std::collections::BTreeMap::new();
            for class in degree_table(m, t).unwrap() {
                *want.entry(class.degree as usize).or_insert(0u64) += class.count as u64;
            }
            assert_eq!(hist.counts, want, "m={m} t={t}");
            assert_eq!(triangle_count(g.graph()), 0);
        }
    }
}

#[test]
fn size_cap_is_configurable() {
    let p = ModelParams::base(2, 10);
    let small = BuildOptions { max_vertices: 100 };
    assert!(matches!(build(&p, &small), Err(Error::SizeCap { .. })));
    assert!(build(&p, &BuildOptions::default()).is_ok());
    assert!(matches!(build_base(10, 7), Err(Error::SizeCap { .. })));
}

#[test]
fn different_seeds_change_survivors() {
    let a: BTreeSet<_> = build_deleted(4, 3, 0.5, 1).unwrap().rim_edges().collect();
    let b: BTreeSet<_> = build_deleted(4, 3, 0.5, 2).unwrap().rim_edges().collect();
    assert_ne!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake_and_table(m in 2u32..=6, t in 0u32..=5) {
        let table = degree_table(m, t).unwrap();
        let c = counts(m, t).unwrap();
        let n: u128 = table.iter().map(|c| c.count).sum();
        let deg: u128 = table.iter().map(|c| c.count * c.degree).sum();
        prop_assert_eq!(ExactScalar::from_integer(n), c.vertices);
        prop_assert_eq!(deg % 2, 0);
        prop_assert_eq!(ExactScalar::from_integer(deg / 2), c.edges);
    }

    #[test]
    fn deletion_keeps_a_reproducible_subset(m in 2u32..=5, t in 0u32..=3, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let w = build_wheel(m, t).unwrap();
        let d1 = build_deleted(m, t, p, seed).unwrap();
        let d2 = build_deleted(m, t, p, seed).unwrap();
        prop_assert_eq!(d1.graph(), d2.graph());
        let all = edge_set(&w);
        let kept = edge_set(&d1);
        prop_assert!(kept.is_subset(&all));
        let base = edge_set(&build_base(m, t).unwrap());
        prop_assert!(base.is_subset(&kept));
        d1.graph().check_invariants().unwrap();
    }

    #[test]
    fn every_variant_is_connected(m in 2u32..=5, t in 0u32..=4, p in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assert!(build_deleted(m, t, p, seed).unwrap().graph().is_connected());
    }
}
