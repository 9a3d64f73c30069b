//! Construction of `G(t;m)`, the wheel-seeded `G₁(t;m)` and the rim-deleted
//! `G₂(t;m,p)`.
//!
//! Vertices are numbered level-major: the hub (level 0) is vertex 0, then
//! the `m` level-1 vertices, and so on down to the `m^(t+1)` bottom
//! vertices at level `t+1`. Within a level, vertex `j` is the `j`-th
//! subtree in construction order, so the numbering coincides with the one
//! obtained by literally copying `G(t-1;m)` `m` times and stably sorting the
//! result by level.
//!
//! With that numbering the structure has a direct description: bottom
//! vertex `b` (counted from the start of the bottom level) is adjacent to
//! exactly one vertex on every level `L ≤ t`, namely index
//! `b / m^(t+1-L)` of that level. Nothing else is adjacent in `G(t;m)`, so
//! the graph is built in one pass without materializing the copies.

use alloc::vec::Vec;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::{Error, Result};

/// Refuse instances above this many vertices unless told otherwise.
pub const DEFAULT_MAX_VERTICES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "variant", rename_all = "lowercase"))]
pub enum Variant {
    /// `G(t;m)`, grown from a star.
    Base,
    /// `G₁(t;m)`, grown from a wheel.
    #[cfg_attr(feature = "serde", serde(rename = "wheel"))]
    WheelSeed,
    /// `G₂(t;m,p)`: `G₁` with each rim edge deleted with probability `p`.
    #[cfg_attr(feature = "serde", serde(rename = "deleted"))]
    WheelDeleted { p: f64, seed: u64 },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::WheelSeed => "wheel",
            Variant::WheelDeleted { .. } => "deleted",
        }
    }

    pub fn has_rim(&self) -> bool {
        !matches!(self, Variant::Base)
    }

    pub fn deletion_probability(&self) -> Option<f64> {
        match *self {
            Variant::WheelDeleted { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            Variant::WheelDeleted { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

/// Everything needed to rebuild one instance.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModelParams {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub variant: Variant,
    pub m: u32,
    pub t: u32,
}

impl ModelParams {
    pub fn base(m: u32, t: u32) -> Self {
        ModelParams { variant: Variant::Base, m, t }
    }

    pub fn wheel(m: u32, t: u32) -> Self {
        ModelParams { variant: Variant::WheelSeed, m, t }
    }

    pub fn deleted(m: u32, t: u32, p: f64, seed: u64) -> Self {
        ModelParams { variant: Variant::WheelDeleted { p, seed }, m, t }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidParams("m must be at least 2"));
        }
        if let Variant::WheelDeleted { p, .. } = self.variant {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams("p must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// `(m^(t+2) - 1) / (m - 1)`, or [`Error::Overflow`].
    pub fn vertex_count(&self) -> Result<u128> {
        let m = self.m as u128;
        let top = checked_pow(m, self.t.checked_add(2).ok_or(Error::Overflow)?)?;
        Ok((top - 1) / (m - 1))
    }

    /// `m^(t+1)`, the number of bottom vertices.
    pub fn bottom_count(&self) -> Result<u128> {
        checked_pow(self.m as u128, self.t.checked_add(1).ok_or(Error::Overflow)?)
    }

    /// True for wheel variants with `m = 2`, where the two-vertex rim is a
    /// single edge rather than a 2-cycle.
    pub fn rim_is_single_edge(&self) -> bool {
        self.variant.has_rim() && self.m == 2
    }
}

pub(crate) fn checked_pow(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp).ok_or(Error::Overflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub max_vertices: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_vertices: DEFAULT_MAX_VERTICES }
    }
}

/// One row of the level/degree/count table of `G(t;m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DegreeClass {
    pub level: u32,
    pub degree: u128,
    pub count: u128,
}

/// A built graph together with its level annotation and recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphInstance {
    graph: Graph,
    levels: Vec<u32>,
    params: ModelParams,
    hub: u32,
}

impl GraphInstance {
    /// Attaches a level map to an existing graph.
    ///
    /// Exactly one vertex may sit on level 0 (the hub) and every level must
    /// lie in `[0, t+1]`.
    pub fn from_parts(graph: Graph, levels: Vec<u32>, params: ModelParams) -> Result<Self> {
        params.validate()?;
        if levels.len() != graph.vertex_count() {
            return Err(Error::InvalidLevels("length differs from vertex count"));
        }
        if levels.iter().any(|&l| l > params.t + 1) {
            return Err(Error::InvalidLevels("level above t+1"));
        }
        let mut hubs = levels.iter().enumerate().filter(|(_, &l)| l == 0);
        let hub = match (hubs.next(), hubs.next()) {
            (Some((v, _)), None) => v as u32,
            _ => return Err(Error::InvalidLevels("need exactly one level-0 vertex")),
        };
        Ok(GraphInstance { graph, levels, params, hub })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, v: usize) -> u32 {
        self.levels[v]
    }

    pub fn hub(&self) -> u32 {
        self.hub
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn bottom_level(&self) -> u32 {
        self.params.t + 1
    }

    /// Number of vertices on each level `0..=t+1`.
    pub fn level_population(&self) -> Vec<u64> {
        let mut pop = alloc::vec![0u64; self.params.t as usize + 2];
        for &l in &self.levels {
            pop[l as usize] += 1;
        }
        pop
    }

    /// Edges with both endpoints on the bottom level.
    pub fn rim_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let bottom = self.bottom_level();
        self.graph.edges().filter(move |&(u, v)| self.levels[u as usize] == bottom && self.levels[v as usize] == bottom)
    }
}

/// First vertex id on `level`: `(m^level - 1) / (m - 1)`.
pub fn level_offset(m: u32, level: u32) -> u64 {
    let m = m as u64;
    (m.pow(level) - 1) / (m - 1)
}

/// `G(t;m)` with the default size cap.
pub fn build_base(m: u32, t: u32) -> Result<GraphInstance> {
    build(&ModelParams::base(m, t), &BuildOptions::default())
}

/// `G₁(t;m)` with the default size cap.
pub fn build_wheel(m: u32, t: u32) -> Result<GraphInstance> {
    build(&ModelParams::wheel(m, t), &BuildOptions::default())
}

/// `G₂(t;m,p)` with the default size cap.
pub fn build_deleted(m: u32, t: u32, p: f64, seed: u64) -> Result<GraphInstance> {
    build(&ModelParams::deleted(m, t, p, seed), &BuildOptions::default())
}

/// Builds any variant.
pub fn build(params: &ModelParams, opts: &BuildOptions) -> Result<GraphInstance> {
    params.validate()?;
    let n = params.vertex_count()?;
    let cap = opts.max_vertices.min(u32::MAX as u64);
    if n > cap as u128 {
        return Err(Error::SizeCap { vertices: n, cap });
    }
    let (m, t) = (params.m, params.t);
    let n = n as usize;
    let bottom_start = level_offset(m, t + 1) as usize;
    let bottom_count = n - bottom_start;

    let rim = match params.variant {
        Variant::Base => Vec::new(),
        Variant::WheelSeed => rim_edges(m, t),
        Variant::WheelDeleted { p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rim = rim_edges(m, t);
            rim.retain(|_| unit_draw(&mut rng) >= p);
            rim
        }
    };

    // span[L] = m^(t+1-L): bottom vertices under one level-L vertex.
    let span: Vec<usize> = (0..=t).map(|l| (m as usize).pow(t + 1 - l)).collect();
    let level_start: Vec<usize> = (0..=t + 1).map(|l| level_offset(m, l) as usize).collect();

    let mut degree = alloc::vec![0usize; n];
    for l in 0..=t {
        for d in &mut degree[level_start[l as usize]..level_start[l as usize + 1]] {
            *d = span[l as usize];
        }
    }
    for d in &mut degree[bottom_start..] {
        *d = t as usize + 1;
    }
    for &(u, v) in &rim {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let mut acc = 0;
    for d in &degree {
        acc += d;
        offsets.push(acc);
    }
    let mut neighbors = alloc::vec![0u32; acc];
    let mut fill = offsets[..n].to_vec();

    for l in 0..=t as usize {
        for (j, v) in (level_start[l]..level_start[l + 1]).enumerate() {
            let first = bottom_start + j * span[l];
            for (slot, b) in neighbors[fill[v]..fill[v] + span[l]].iter_mut().zip(first..) {
                *slot = b as u32;
            }
            fill[v] += span[l];
        }
    }
    for b in 0..bottom_count {
        let v = bottom_start + b;
        for l in 0..=t as usize {
            neighbors[fill[v]] = (level_start[l] + b / span[l]) as u32;
            fill[v] += 1;
        }
    }
    // Ascending (u, v) order keeps each rim list sorted: smaller partners
    // arrive first, larger ones after.
    for &(u, v) in &rim {
        neighbors[fill[u as usize]] = v;
        fill[u as usize] += 1;
        neighbors[fill[v as usize]] = u;
        fill[v as usize] += 1;
    }

    let mut levels = alloc::vec![0u32; n];
    for l in 0..=t + 1 {
        let end = if l == t + 1 { n } else { level_start[l as usize + 1] };
        for x in &mut levels[level_start[l as usize]..end] {
            *x = l;
        }
    }

    Ok(GraphInstance { graph: Graph::from_csr(offsets, neighbors), levels, params: *params, hub: 0 })
}

/// The rim of `G₁(t;m)` in ascending `(u, v)` order.
///
/// Bottom vertices come in consecutive groups of `m` siblings (the leaves
/// of one seed copy). Each group is a cycle for `m ≥ 3` and a single edge
/// for `m = 2`.
pub fn rim_edges(m: u32, t: u32) -> Vec<(u32, u32)> {
    let bottom_start = level_offset(m, t + 1) as u32;
    let groups = (m as u64).pow(t) as u32;
    let per_group = if m == 2 { 1 } else { m as usize };
    let mut out = Vec::with_capacity(groups as usize * per_group);
    for g in 0..groups {
        let b = bottom_start + g * m;
        if m == 2 {
            out.push((b, b + 1));
            continue;
        }
        out.push((b, b + 1));
        out.push((b, b + m - 1));
        for i in 1..m - 1 {
            out.push((b + i, b + i + 1));
        }
    }
    out
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
///
/// One draw is consumed per rim edge, in ascending edge order; an edge is
/// deleted when its draw is below `p`. The generator is ChaCha8 seeded via
/// `seed_from_u64`, which is stable across platforms.
pub fn unit_draw(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn seed_star() {
        let g = build_base(2, 0).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.graph().edges().collect::<Vec<_>>(), [(0, 1), (0, 2)]);
        assert_eq!(g.levels(), [0, 1, 1]);
    }

    #[test]
    fn g_1_2() {
        let g = build_base(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (7, 8));
        assert_eq!(g.graph().degree(0), 4);
        assert_eq!(g.level_population(), [1, 2, 4]);
        for v in 1..7 {
            assert_eq!(g.graph().degree(v), 2);
        }
    }

    #[test]
    fn g_1_3_counts() {
        let g = build_base(3, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (13, 18));
    }

    #[test]
    fn wheel_seeds() {
        let k4 = build_wheel(3, 0).unwrap();
        assert_eq!(k4.edge_count(), 6);
        let tri = build_wheel(2, 0).unwrap();
        assert_eq!(tri.graph().edges().collect::<Vec<_>>(), [(0, 1), (0, 2), (1, 2)]);
        assert!(tri.params().rim_is_single_edge());
        let w = build_wheel(3, 1).unwrap();
        assert_eq!((w.vertex_count(), w.edge_count()), (13, 27));
        assert_eq!(w.rim_edges().count(), 9);
    }

    #[test]
    fn rim_order() {
        assert_eq!(rim_edges(3, 0), vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(rim_edges(4, 0), vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
        assert_eq!(rim_edges(2, 1), vec![(3, 4), (5, 6)]);
    }

    #[test]
    fn deletion_extremes() {
        let w = build_wheel(3, 2).unwrap();
        let b = build_base(3, 2).unwrap();
        assert_eq!(build_deleted(3, 2, 0.0, 9).unwrap().graph(), w.graph());
        assert_eq!(build_deleted(3, 2, 1.0, 9).unwrap().graph(), b.graph());
        assert_eq!(build_deleted(2, 2, 1.0, 1).unwrap().graph(), build_base(2, 2).unwrap().graph());
    }

    #[test]
    fn deletion_is_reproducible() {
        let a = build_deleted(3, 3, 0.5, 7).unwrap();
        let b = build_deleted(3, 3, 0.5, 7).unwrap();
        let c = build_deleted(3, 3, 0.5, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.graph(), c.graph());
        assert!(a.graph().is_connected());
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(build_base(1, 3), Err(Error::InvalidParams(_))));
        assert!(matches!(build_deleted(3, 1, 1.5, 0), Err(Error::InvalidParams(_))));
        assert!(matches!(build_deleted(3, 1, -0.1, 0), Err(Error::InvalidParams(_))));
        assert!(matches!(build_deleted(3, 1, f64::NAN, 0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn size_cap_refuses() {
        let opts = BuildOptions { max_vertices: 100 };
        assert_eq!(ModelParams::base(3, 3).vertex_count().unwrap(), 121);
        assert!(matches!(build(&ModelParams::base(3, 3), &opts), Err(Error::SizeCap { vertices: 121, cap: 100 })));
        assert!(matches!(build_base(2, 40), Err(Error::SizeCap { .. })));
        assert!(matches!(build_base(10, 60), Err(Error::Overflow)));
    }

    #[test]
    fn from_parts_checks_levels() {
        let g = build_base(2, 1).unwrap();
        let graph = g.graph().clone();
        assert!(GraphInstance::from_parts(graph.clone(), vec![0; 7], *g.params()).is_err());
        assert!(GraphInstance::from_parts(graph.clone(), vec![0, 1], *g.params()).is_err());
        let ok = GraphInstance::from_parts(graph, g.levels().to_vec(), *g.params()).unwrap();
        assert_eq!(ok, g);
    }
}
