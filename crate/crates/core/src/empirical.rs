//! Direct measurement on built graphs: degree census, diameter, clustering,
//! assortativity and the power-law slope.
//!
//! Nothing here consults the closed forms; these routines are the
//! independent side of every analytic comparison.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::ExactScalar;
use crate::graph::{Graph, UNREACHED};
use crate::model::GraphInstance;
use crate::{Error, Result};

/// Above this many vertices an exact diameter request falls back to
/// sampled sources.
pub const EXACT_DIAMETER_MAX_VERTICES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CumulativePoint {
    pub degree: usize,
    /// Vertices with degree at least `degree`.
    pub at_least: u64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<usize, u64>,
    pub vertices: u64,
}

impl DegreeHistogram {
    /// `P_cum(k ≥ k_i)` at every observed degree, ascending in `k_i`.
    pub fn cumulative(&self) -> Vec<CumulativePoint> {
        let mut remaining = self.vertices;
        let mut out = Vec::with_capacity(self.counts.len());
        for (&degree, &count) in &self.counts {
            out.push(CumulativePoint {
                degree,
                at_least: remaining,
                fraction: remaining as f64 / self.vertices as f64,
            });
            remaining -= count;
        }
        out
    }
}

pub fn degree_histogram(g: &Graph) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for v in 0..g.vertex_count() {
        *counts.entry(g.degree(v)).or_insert(0) += 1;
    }
    DegreeHistogram { counts, vertices: g.vertex_count() as u64 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiameterMode {
    /// Exact diameter. Eccentricity bounds from each search prune the
    /// sources still needed; falls back to sampling above
    /// [`EXACT_DIAMETER_MAX_VERTICES`].
    Exact,
    /// Exact diameter by a search from every vertex, no pruning, no cap.
    AllSources,
    /// Maximum eccentricity over `sources` random vertices: a lower bound.
    SampledSources { sources: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diameter {
    pub value: u32,
    /// True when `value` only bounds the diameter from below.
    pub lower_bound: bool,
    /// True when an exact request was downgraded because of the size cap.
    pub forced_sampling: bool,
    pub searches: usize,
}

const FORCED_SAMPLE_SOURCES: usize = 64;

pub fn diameter_bfs(g: &Graph, mode: DiameterMode) -> Result<Diameter> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    match mode {
        DiameterMode::Exact if n > EXACT_DIAMETER_MAX_VERTICES => {
            let mut d = sampled_diameter(g, FORCED_SAMPLE_SOURCES, 0)?;
            d.forced_sampling = true;
            Ok(d)
        }
        DiameterMode::Exact => bounded_diameter(g),
        DiameterMode::AllSources => {
            let (mut dist, mut queue) = (Vec::new(), VecDeque::new());
            let mut best = 0;
            for v in 0..n {
                let (ecc, reached) = g.bfs_into(v, &mut dist, &mut queue);
                if reached != n {
                    return Err(Error::Disconnected);
                }
                best = best.max(ecc);
            }
            Ok(Diameter { value: best, lower_bound: false, forced_sampling: false, searches: n })
        }
        DiameterMode::SampledSources { sources, seed } => sampled_diameter(g, sources, seed),
    }
}

fn sampled_diameter(g: &Graph, sources: usize, seed: u64) -> Result<Diameter> {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dist, mut queue) = (Vec::new(), VecDeque::new());
    let mut best = 0;
    for _ in 0..sources.max(1) {
        let v = rng.gen_range(0..n);
        let (ecc, reached) = g.bfs_into(v, &mut dist, &mut queue);
        if reached != n {
            return Err(Error::Disconnected);
        }
        best = best.max(ecc);
    }
    Ok(Diameter { value: best, lower_bound: true, forced_sampling: false, searches: sources.max(1) })
}

/// Exact diameter by eccentricity bounding.
///
/// After a search from `v` with eccentricity `e`, every `w` satisfies
/// `max(e - d(v,w), d(v,w)) ≤ ecc(w) ≤ e + d(v,w)`. The diameter is the
/// largest lower bound once no vertex has an upper bound above it.
/// Sources alternate between the largest upper bound and the smallest lower
/// bound, ties broken by larger degree.
fn bounded_diameter(g: &Graph) -> Result<Diameter> {
    let n = g.vertex_count();
    let mut lower = vec![0u32; n];
    let mut upper = vec![u32::MAX; n];
    let (mut dist, mut queue) = (Vec::new(), VecDeque::new());
    let mut best_lower = 0u32;
    let mut searches = 0;
    let mut pick_high = true;
    loop {
        let candidates = (0..n).filter(|&v| upper[v] > best_lower && lower[v] != upper[v]);
        let source = if pick_high {
            candidates.max_by_key(|&v| (upper[v], g.degree(v), core::cmp::Reverse(v)))
        } else {
            candidates.min_by_key(|&v| (lower[v], core::cmp::Reverse(g.degree(v)), v))
        };
        let Some(v) = source else { break };
        pick_high = !pick_high;
        let (ecc, reached) = g.bfs_into(v, &mut dist, &mut queue);
        searches += 1;
        if reached != n {
            return Err(Error::Disconnected);
        }
        lower[v] = ecc;
        upper[v] = ecc;
        for w in 0..n {
            let d = dist[w];
            debug_assert_ne!(d, UNREACHED);
            lower[w] = lower[w].max(ecc.saturating_sub(d).max(d));
            upper[w] = upper[w].min(ecc + d);
            best_lower = best_lower.max(lower[w]);
        }
    }
    Ok(Diameter { value: best_lower, lower_bound: false, forced_sampling: false, searches })
}

/// Number of triangles through each vertex.
///
/// Edges are oriented from lower to higher `(degree, id)` rank, and each
/// triangle is found once by intersecting the sorted out-lists of the two
/// endpoints of its lowest-ranked oriented edge.
pub fn triangles_per_vertex(g: &Graph) -> Vec<u64> {
    let n = g.vertex_count();
    let rank_less = |a: usize, b: usize| (g.degree(a), a) < (g.degree(b), b);
    let mut out_offsets = Vec::with_capacity(n + 1);
    let mut out = Vec::new();
    out_offsets.push(0);
    for u in 0..n {
        out.extend(g.neighbors(u).iter().copied().filter(|&v| rank_less(u, v as usize)));
        out_offsets.push(out.len());
    }
    let out_of = |u: usize| &out[out_offsets[u]..out_offsets[u + 1]];
    let mut tri = vec![0u64; n];
    for u in 0..n {
        let ou = out_of(u);
        for &v in ou {
            let ov = out_of(v as usize);
            let (mut i, mut j) = (0, 0);
            while i < ou.len() && j < ov.len() {
                match ou[i].cmp(&ov[j]) {
                    core::cmp::Ordering::Less => i += 1,
                    core::cmp::Ordering::Greater => j += 1,
                    core::cmp::Ordering::Equal => {
                        tri[u] += 1;
                        tri[v as usize] += 1;
                        tri[ou[i] as usize] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    tri
}

pub fn triangle_count(g: &Graph) -> u64 {
    triangles_per_vertex(g).iter().sum::<u64>() / 3
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelClustering {
    pub level: u32,
    pub vertices: u64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Clustering {
    /// Mean of `c_v` over all vertices; degree < 2 counts as 0.
    pub average: f64,
    pub triangles: u64,
    pub per_level: Vec<LevelClustering>,
}

/// Local clustering `c_v = n_v / (k_v (k_v - 1) / 2)` for every vertex.
pub fn local_clustering(g: &Graph) -> Vec<f64> {
    let tri = triangles_per_vertex(g);
    (0..g.vertex_count())
        .map(|v| {
            let k = g.degree(v) as u64;
            if k < 2 {
                0.0
            } else {
                tri[v] as f64 / (k * (k - 1) / 2) as f64
            }
        })
        .collect()
}

pub fn average_local_clustering(inst: &GraphInstance) -> Clustering {
    let g = inst.graph();
    let tri = triangles_per_vertex(g);
    let levels = inst.bottom_level() as usize + 1;
    let mut sums = vec![0.0f64; levels];
    let mut counts = vec![0u64; levels];
    let mut total = 0.0;
    for v in 0..g.vertex_count() {
        let k = g.degree(v) as u64;
        let c = if k < 2 { 0.0 } else { tri[v] as f64 / (k * (k - 1) / 2) as f64 };
        total += c;
        let l = inst.level(v) as usize;
        sums[l] += c;
        counts[l] += 1;
    }
    let per_level = (0..levels)
        .filter(|&l| counts[l] > 0)
        .map(|l| LevelClustering { level: l as u32, vertices: counts[l], mean: sums[l] / counts[l] as f64 })
        .collect();
    Clustering {
        average: if g.vertex_count() == 0 { 0.0 } else { total / g.vertex_count() as f64 },
        triangles: tri.iter().sum::<u64>() / 3,
        per_level,
    }
}

/// Pearson correlation of endpoint degrees over the edge list, exactly.
///
/// With `E` edges and sums `S₁ = Σ k_i k_j`, `S₂ = Σ (k_i + k_j)`,
/// `S₃ = Σ (k_i² + k_j²)`, the statistic is
/// `(4E·S₁ - S₂²) / (2E·S₃ - S₂²)`, all in integers.
pub fn assortativity_pearson(g: &Graph) -> Result<ExactScalar> {
    let (mut e, mut s1, mut s2, mut s3) = (0u128, 0u128, 0u128, 0u128);
    for (u, v) in g.edges() {
        let (a, b) = (g.degree(u as usize) as u128, g.degree(v as usize) as u128);
        e += 1;
        s1 += a * b;
        s2 += a + b;
        s3 += a * a + b * b;
    }
    if e == 0 {
        return Err(Error::EmptyGraph);
    }
    let (e, s1, s2, s3) = (BigInt::from(e), BigInt::from(s1), BigInt::from(s2), BigInt::from(s3));
    let s2sq = &s2 * &s2;
    let num = BigInt::from(4u32) * &e * s1 - &s2sq;
    let den = BigInt::from(2u32) * e * s3 - s2sq;
    if den.is_zero() {
        return Err(Error::UndefinedAssortativity);
    }
    Ok(ExactScalar::new(BigRational::new(num, den)))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(k, P_cum)` over the hub degree classes.
    pub points: Vec<(usize, f64)>,
}

/// Least-squares slope of `ln P_cum` against `ln k` over the hub classes.
///
/// Bottom-level vertices are left out of both the fitted points and the
/// cumulative counts, since their degree `t+1` falls inside the hub range
/// and the cumulative form treats them as a separate branch. The negated
/// slope estimates the cumulative exponent (1 for this family).
pub fn powerlaw_slope(inst: &GraphInstance) -> Result<PowerLawFit> {
    const MIN_CLASSES: usize = 4;
    let g = inst.graph();
    let bottom = inst.bottom_level();
    let mut classes: BTreeMap<usize, u64> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        if inst.level(v) != bottom {
            *classes.entry(g.degree(v)).or_insert(0) += 1;
        }
    }
    if classes.len() < MIN_CLASSES {
        return Err(Error::TooFewDegreeClasses { found: classes.len(), needed: MIN_CLASSES });
    }
    let n = g.vertex_count() as f64;
    let mut remaining: u64 = classes.values().sum();
    let mut points = Vec::with_capacity(classes.len());
    for (&k, &count) in &classes {
        points.push((k, remaining as f64 / n));
        remaining -= count;
    }
    let (slope, intercept) = least_squares(points.iter().map(|&(k, p)| (libm::log(k as f64), libm::log(p))));
    Ok(PowerLawFit { slope, intercept, points })
}

fn least_squares(pts: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let count = pts.clone().count() as f64;
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / count, sy / count);
    let (sxy, sxx) = pts.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeasuredReport {
    /// `(degree, count)`, ascending degree.
    pub histogram: Vec<(usize, u64)>,
    pub cumulative: Vec<CumulativePoint>,
    pub diameter: Option<Diameter>,
    pub clustering: Clustering,
    /// `None` when undefined (degree-regular edge set).
    pub assortativity: Option<ExactScalar>,
    pub triangles: u64,
    pub connected: bool,
}

pub fn measure(inst: &GraphInstance, mode: DiameterMode) -> Result<MeasuredReport> {
    let g = inst.graph();
    let hist = degree_histogram(g);
    let connected = g.is_connected();
    let diameter = if connected { Some(diameter_bfs(g, mode)?) } else { None };
    let clustering = average_local_clustering(inst);
    let assortativity = match assortativity_pearson(g) {
        Ok(r) => Some(r),
        Err(Error::UndefinedAssortativity | Error::EmptyGraph) => None,
        Err(e) => return Err(e),
    };
    Ok(MeasuredReport {
        cumulative: hist.cumulative(),
        histogram: hist.counts.into_iter().collect(),
        diameter,
        triangles: clustering.triangles,
        clustering,
        assortativity,
        connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_base, build_deleted, build_wheel};

    fn hist(g: &Graph) -> Vec<(usize, u64)> {
        degree_histogram(g).counts.into_iter().collect()
    }

    #[test]
    fn histogram_examples() {
        let g = build_base(2, 1).unwrap();
        assert_eq!(hist(g.graph()), [(2, 6), (4, 1)]);
        let cum = degree_histogram(g.graph()).cumulative();
        assert_eq!(cum.last().unwrap().at_least, 1);
        assert_eq!(cum[0].fraction, 1.0);
        assert_eq!(hist(build_base(3, 0).unwrap().graph()), [(1, 3), (3, 1)]);
        assert_eq!(hist(build_base(2, 2).unwrap().graph()), [(2, 4), (3, 8), (4, 2), (8, 1)]);
    }

    #[test]
    fn diameter_examples() {
        let g = build_base(2, 0).unwrap();
        assert_eq!(diameter_bfs(g.graph(), DiameterMode::Exact).unwrap().value, 2);
        let g = build_deleted(3, 3, 0.9, 42).unwrap();
        assert_eq!(diameter_bfs(g.graph(), DiameterMode::Exact).unwrap().value, 4);
        let k4 = build_wheel(3, 0).unwrap();
        assert_eq!(diameter_bfs(k4.graph(), DiameterMode::Exact).unwrap().value, 1);
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(diameter_bfs(&split, DiameterMode::Exact), Err(Error::Disconnected));
        assert_eq!(diameter_bfs(&split, DiameterMode::AllSources), Err(Error::Disconnected));
    }

    #[test]
    fn bounded_matches_all_sources_on_paths_and_cycles() {
        for n in 2..12u32 {
            let path: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let g = Graph::from_edges(n as usize, &path).unwrap();
            assert_eq!(diameter_bfs(&g, DiameterMode::Exact).unwrap().value, n - 1);
            if n >= 3 {
                let mut cyc = path.clone();
                cyc.push((0, n - 1));
                let g = Graph::from_edges(n as usize, &cyc).unwrap();
                assert_eq!(diameter_bfs(&g, DiameterMode::Exact).unwrap().value, n / 2);
            }
        }
    }

    #[test]
    fn sampled_is_labelled_lower_bound() {
        let g = build_base(3, 3).unwrap();
        let d = diameter_bfs(g.graph(), DiameterMode::SampledSources { sources: 5, seed: 1 }).unwrap();
        assert!(d.lower_bound && d.value <= 4);
    }

    #[test]
    fn clustering_examples() {
        for (m, t) in [(2, 0), (2, 3), (3, 2), (4, 1)] {
            let c = average_local_clustering(&build_base(m, t).unwrap());
            assert_eq!(c.average, 0.0);
            assert_eq!(c.triangles, 0);
        }
        let k4 = average_local_clustering(&build_wheel(3, 0).unwrap());
        assert_eq!((k4.average, k4.triangles), (1.0, 4));
        let tri = average_local_clustering(&build_wheel(2, 0).unwrap());
        assert_eq!((tri.average, tri.triangles), (1.0, 1));
    }

    #[test]
    fn triangles_of_complete_graphs() {
        for n in 3..8u32 {
            let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let g = Graph::from_edges(n as usize, &edges).unwrap();
            let nn = n as u64;
            assert_eq!(triangle_count(&g), nn * (nn - 1) * (nn - 2) / 6);
            assert!(local_clustering(&g).iter().all(|&c| c == 1.0));
        }
    }

    #[test]
    fn assortativity_examples() {
        for m in 2..6 {
            assert_eq!(assortativity_pearson(build_base(m, 0).unwrap().graph()).unwrap().to_f64(), -1.0);
        }
        assert_eq!(assortativity_pearson(build_base(2, 1).unwrap().graph()).unwrap(), ExactScalar::ratio(-1, 3));
        let cycle = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(assortativity_pearson(&cycle), Err(Error::UndefinedAssortativity));
        let empty = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(assortativity_pearson(&empty), Err(Error::EmptyGraph));
    }

    #[test]
    fn slope_examples() {
        let fit = powerlaw_slope(&build_base(2, 12).unwrap()).unwrap();
        assert!((fit.slope + 1.0).abs() <= 0.15, "{}", fit.slope);
        let fit = powerlaw_slope(&build_base(3, 8).unwrap()).unwrap();
        assert!((-1.2..=-0.8).contains(&fit.slope), "{}", fit.slope);
        assert!(matches!(
            powerlaw_slope(&build_base(3, 1).unwrap()),
            Err(Error::TooFewDegreeClasses { found: 2, needed: 4 })
        ));
    }

    #[test]
    fn measure_collects_everything() {
        let rep = measure(&build_base(2, 3).unwrap(), DiameterMode::Exact).unwrap();
        assert!(rep.connected);
        assert_eq!(rep.diameter.unwrap().value, 4);
        assert_eq!(rep.triangles, 0);
        assert!(rep.assortativity.is_some());
    }
}
