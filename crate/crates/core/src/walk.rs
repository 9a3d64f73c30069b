//! Trapping problem: an unbiased walk that hops to a uniformly chosen
//! neighbor until it reaches an absorbing trap (the hub by default).
//!
//! Four independent routes to the hitting times are provided:
//!
//! * [`exact_hitting_solve`]: the first-step linear system over all vertices,
//! * [`level_collapsed_solve`]: the same system with one unknown per level,
//!   solved in exact rationals,
//! * [`hitting_distribution`]: step-by-step propagation of the absorbed mass,
//! * [`simulate_walks`]: Monte-Carlo simulation.
//!
//! The closed forms for `G(t;m)` are in [`mean_hitting_closed`] and
//! [`BottomGeneratingFunction`].

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::hitting_closed_forms;
use crate::exact::{rational_to_f64, ExactScalar};
use crate::graph::Graph;
use crate::model::GraphInstance;
use crate::{Error, Result};

/// A graph with one absorbing vertex.
#[derive(Clone, Copy, Debug)]
pub struct TrapSpec<'a> {
    instance: &'a GraphInstance,
    trap: u32,
}

impl<'a> TrapSpec<'a> {
    /// Trap on the hub.
    pub fn hub(instance: &'a GraphInstance) -> Self {
        TrapSpec { instance, trap: instance.hub() }
    }

    pub fn new(instance: &'a GraphInstance, trap: u32) -> Result<Self> {
        if trap as usize >= instance.vertex_count() {
            return Err(Error::InvalidVertex(trap));
        }
        Ok(TrapSpec { instance, trap })
    }

    pub fn instance(&self) -> &'a GraphInstance {
        self.instance
    }

    pub fn graph(&self) -> &'a Graph {
        self.instance.graph()
    }

    pub fn trap(&self) -> u32 {
        self.trap
    }

    fn check_connected(&self) -> Result<()> {
        if !self.graph().is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum HittingMethod {
    /// Full first-step system; `dense` is false for the iterative route.
    LinearSolve {
        dense: bool,
        sweeps: usize,
    },
    LevelCollapsed,
    ClosedForm,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelHitting {
    pub level: u32,
    pub vertices: u64,
    pub mean: f64,
    /// Monte Carlo only.
    pub std_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonteCarloStats {
    pub trials: u64,
    /// Trials that hit `max_steps` before absorption (excluded from the mean).
    pub truncated: u64,
    pub max_steps: u64,
    pub sample_mean: f64,
    pub std_error: f64,
    /// Truncation rate above the allowed threshold.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HittingSummary {
    pub method: HittingMethod,
    pub trap: u32,
    /// Expected hitting time per vertex (0 at the trap). Empty for Monte Carlo.
    pub per_vertex: Vec<f64>,
    /// Exact per-level values when available.
    pub per_level_exact: Option<Vec<(u32, ExactScalar)>>,
    pub per_level: Vec<LevelHitting>,
    /// Mean over all non-trap vertices.
    pub mean: f64,
    pub mean_exact: Option<ExactScalar>,
    pub monte_carlo: Option<MonteCarloStats>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Dense elimination up to this many unknowns; iteration beyond.
    pub dense_max_unknowns: usize,
    /// Refuse systems larger than this.
    pub max_unknowns: usize,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { dense_max_unknowns: 2000, max_unknowns: 10_000_000, tolerance: 1e-12, max_sweeps: 1_000_000 }
    }
}

pub fn exact_hitting_solve(spec: &TrapSpec<'_>) -> Result<HittingSummary> {
    exact_hitting_solve_with(spec, &SolveOptions::default())
}

/// Solves `h_v = 1 + Σ_{u ∈ N(v), u ≠ trap} h_u / d_v` with `h_trap = 0`.
pub fn exact_hitting_solve_with(spec: &TrapSpec<'_>, opts: &SolveOptions) -> Result<HittingSummary> {
    spec.check_connected()?;
    let g = spec.graph();
    let n = g.vertex_count();
    let unknowns = n - 1;
    if unknowns > opts.max_unknowns {
        return Err(Error::SolverCap { unknowns, cap: opts.max_unknowns });
    }
    let (h, method) = if unknowns <= opts.dense_max_unknowns {
        (dense_solve(g, spec.trap as usize), HittingMethod::LinearSolve { dense: true, sweeps: 0 })
    } else {
        let (h, sweeps) = gauss_seidel(g, spec.trap as usize, opts)?;
        (h, HittingMethod::LinearSolve { dense: false, sweeps })
    };
    Ok(summarize(spec, method, h))
}

fn summarize(spec: &TrapSpec<'_>, method: HittingMethod, h: Vec<f64>) -> HittingSummary {
    let inst = spec.instance;
    let levels = inst.bottom_level() as usize + 1;
    let mut sums = vec![0.0; levels];
    let mut counts = vec![0u64; levels];
    let mut total = 0.0;
    for (v, &hv) in h.iter().enumerate() {
        if v == spec.trap as usize {
            continue;
        }
        total += hv;
        let l = inst.level(v) as usize;
        sums[l] += hv;
        counts[l] += 1;
    }
    HittingSummary {
        method,
        trap: spec.trap,
        per_level: level_rows(&sums, &counts, None),
        mean: total / (h.len() - 1).max(1) as f64,
        per_vertex: h,
        per_level_exact: None,
        mean_exact: None,
        monte_carlo: None,
    }
}

fn level_rows(sums: &[f64], counts: &[u64], sq: Option<&[f64]>) -> Vec<LevelHitting> {
    (0..sums.len())
        .filter(|&l| counts[l] > 0)
        .map(|l| {
            let c = counts[l] as f64;
            let mean = sums[l] / c;
            LevelHitting {
                level: l as u32,
                vertices: counts[l],
                mean,
                std_error: sq.map(|sq| std_error(sq[l], mean, counts[l])),
            }
        })
        .collect()
}

fn std_error(sum_sq: f64, mean: f64, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    libm::sqrt(var / nf)
}

/// Gaussian elimination with partial pivoting on `(I - Q) h = 1`.
fn dense_solve(g: &Graph, trap: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let index = |v: usize| if v < trap { v } else { v - 1 };
    let k = n - 1;
    let w = k + 1;
    let mut a = vec![0.0f64; k * w];
    for v in (0..n).filter(|&v| v != trap) {
        let row = index(v);
        let inv = 1.0 / g.degree(v) as f64;
        a[row * w + row] = 1.0;
        for &u in g.neighbors(v) {
            if u as usize != trap {
                a[row * w + index(u as usize)] -= inv;
            }
        }
        a[row * w + k] = 1.0;
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs())).unwrap();
        if pivot != col {
            for j in col..w {
                a.swap(col * w + j, pivot * w + j);
            }
        }
        let p = a[col * w + col];
        for r in col + 1..k {
            let f = a[r * w + col] / p;
            if f != 0.0 {
                for j in col..w {
                    a[r * w + j] -= f * a[col * w + j];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|j| a[r * w + j] * x[j]).sum();
        x[r] = (a[r * w + k] - s) / a[r * w + r];
    }
    let mut h = vec![0.0; n];
    for v in (0..n).filter(|&v| v != trap) {
        h[v] = x[index(v)];
    }
    h
}

fn gauss_seidel(g: &Graph, trap: usize, opts: &SolveOptions) -> Result<(Vec<f64>, usize)> {
    let n = g.vertex_count();
    let mut h = vec![1.0; n];
    h[trap] = 0.0;
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_sweeps {
        for v in (0..n).filter(|&v| v != trap) {
            let s: f64 = g.neighbors(v).iter().map(|&u| h[u as usize]).sum();
            h[v] = 1.0 + s / g.degree(v) as f64;
        }
        residual = (0..n)
            .filter(|&v| v != trap)
            .map(|v| {
                let s: f64 = g.neighbors(v).iter().map(|&u| h[u as usize]).sum();
                (1.0 + s / g.degree(v) as f64 - h[v]).abs()
            })
            .fold(0.0, f64::max);
        // ‖(I - Q)⁻¹‖∞ = max h, so this bounds the error, not just the residual.
        let scale = h.iter().copied().fold(1.0, f64::max);
        if residual * scale < opts.tolerance {
            return Ok((h, sweep));
        }
    }
    Err(Error::NonConvergence { sweeps: opts.max_sweeps, residual })
}

/// Exact per-level hitting times for level-symmetric instances.
///
/// Every vertex on a level must see the same number of neighbors on each
/// other level (true for `G(t;m)` and `G₁(t;m)`; not for `G₂`). The first
/// -step system then collapses to one unknown per level, which is solved in
/// exact rationals. Requires the trap on the hub.
pub fn level_collapsed_solve(spec: &TrapSpec<'_>) -> Result<HittingSummary> {
    let inst = spec.instance;
    let g = inst.graph();
    if spec.trap != inst.hub() {
        return Err(Error::InvalidParams("level collapse needs the trap on the hub"));
    }
    spec.check_connected()?;
    let levels = inst.bottom_level() as usize + 1;
    // profile[l][l'] = neighbors on level l' of any vertex on level l.
    let mut profile: Vec<Option<Vec<u64>>> = vec![None; levels];
    let mut scratch = vec![0u64; levels];
    for v in 0..g.vertex_count() {
        scratch.iter_mut().for_each(|x| *x = 0);
        for &u in g.neighbors(v) {
            scratch[inst.level(u as usize) as usize] += 1;
        }
        let slot = &mut profile[inst.level(v) as usize];
        match slot {
            None => *slot = Some(scratch.clone()),
            Some(p) if *p == scratch => {}
            Some(_) => return Err(Error::InvalidLevels("instance is not level-symmetric")),
        }
    }
    // Unknowns are levels 1..levels; row L: d_L h_L - Σ_{L'≥1} c_{L,L'} h_{L'} = d_L.
    let k = levels - 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    for l in 1..levels {
        let p = profile[l].as_ref().ok_or(Error::InvalidLevels("empty level"))?;
        let d: u64 = p.iter().sum();
        let mut row = vec![BigRational::zero(); k + 1];
        row[l - 1] = int(d);
        for (l2, &c) in p.iter().enumerate().skip(1) {
            row[l2 - 1] -= int(c);
        }
        row[k] = int(d);
        rows.push(row);
    }
    let sol = rational_solve(rows).ok_or(Error::InvalidLevels("singular level system"))?;

    let pop = inst.level_population();
    let mut total = BigRational::zero();
    let mut per_level = Vec::with_capacity(k);
    let mut per_level_exact = Vec::with_capacity(k);
    for (i, h) in sol.iter().enumerate() {
        let l = i + 1;
        total += h * int(pop[l]);
        per_level.push(LevelHitting { level: l as u32, vertices: pop[l], mean: rational_to_f64(h), std_error: None });
        per_level_exact.push((l as u32, ExactScalar::new(h.clone())));
    }
    let mean = ExactScalar::new(total / int(g.vertex_count() as u64 - 1));
    let per_vertex = (0..g.vertex_count())
        .map(|v| match inst.level(v) {
            0 => 0.0,
            l => per_level[l as usize - 1].mean,
        })
        .collect();
    Ok(HittingSummary {
        method: HittingMethod::LevelCollapsed,
        trap: spec.trap,
        per_vertex,
        per_level_exact: Some(per_level_exact),
        per_level,
        mean: mean.to_f64(),
        mean_exact: Some(mean),
        monte_carlo: None,
    })
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Gauss-Jordan over rationals on an augmented matrix.
fn rational_solve(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[k].clone()).collect())
}

/// `P(H = l)` for `l = 1..=horizon`, plus the mass not yet absorbed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HittingDistribution {
    /// Start vertex, or `None` for a distributed start.
    pub source: Option<u32>,
    pub horizon: usize,
    /// `probabilities[l - 1] = P(H = l)`.
    pub probabilities: Vec<f64>,
    pub tail_mass: f64,
}

impl HittingDistribution {
    /// `Σ l · P(H = l)` up to the horizon; a lower bound on the mean.
    pub fn truncated_mean(&self) -> f64 {
        self.probabilities.iter().zip(1..).map(|(p, l)| p * l as f64).sum()
    }
}

pub fn hitting_distribution(spec: &TrapSpec<'_>, source: u32, horizon: usize) -> Result<HittingDistribution> {
    let n = spec.graph().vertex_count();
    if source as usize >= n {
        return Err(Error::InvalidVertex(source));
    }
    if source == spec.trap {
        return Err(Error::InvalidParams("source coincides with the trap"));
    }
    let mut start = vec![0.0; n];
    start[source as usize] = 1.0;
    let mut d = hitting_distribution_from(spec, &start, horizon)?;
    d.source = Some(source);
    Ok(d)
}

/// Start mass spread uniformly over the non-trap vertices.
pub fn uniform_start(spec: &TrapSpec<'_>) -> Vec<f64> {
    let n = spec.graph().vertex_count();
    let w = 1.0 / (n - 1) as f64;
    (0..n).map(|v| if v == spec.trap as usize { 0.0 } else { w }).collect()
}

/// Propagates `start` (a distribution over non-trap vertices) through the
/// walk with the trap row and column removed, recording the mass absorbed
/// at each step.
pub fn hitting_distribution_from(spec: &TrapSpec<'_>, start: &[f64], horizon: usize) -> Result<HittingDistribution> {
    if horizon == 0 {
        return Err(Error::InvalidParams("horizon must be at least 1"));
    }
    let g = spec.graph();
    let trap = spec.trap as usize;
    let n = g.vertex_count();
    if start.len() != n {
        return Err(Error::InvalidParams("start vector length differs from vertex count"));
    }
    let mut mass = start.to_vec();
    mass[trap] = 0.0;
    let mut next = vec![0.0; n];
    let mut probabilities = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut absorbed = 0.0;
        for v in 0..n {
            let mv = mass[v];
            if mv == 0.0 {
                continue;
            }
            let share = mv / g.degree(v) as f64;
            for &u in g.neighbors(v) {
                if u as usize == trap {
                    absorbed += share;
                } else {
                    next[u as usize] += share;
                }
            }
        }
        probabilities.push(absorbed);
        core::mem::swap(&mut mass, &mut next);
    }
    let start_mass: f64 = start.iter().enumerate().filter(|&(v, _)| v != trap).map(|(_, x)| x).sum();
    let absorbed: f64 = probabilities.iter().sum();
    Ok(HittingDistribution { source: None, horizon, probabilities, tail_mass: (start_mass - absorbed).max(0.0) })
}

/// Generating function of the hitting time from a bottom vertex of
/// `G(t;m)`: `P_t(x) = x / ((t+1) - t x²)`.
///
/// It solves `P_t(x) = x/(t+1) + t x² P_t(x)/(t+1)`: one step reaches the
/// hub with probability `1/(t+1)`; otherwise the walk enters an intermediate
/// vertex and returns to a bottom vertex on the next step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BottomGeneratingFunction {
    pub t: u32,
}

impl BottomGeneratingFunction {
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.t as f64;
        x / ((t + 1.0) - t * x * x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let t = self.t as f64;
        let den = (t + 1.0) - t * x * x;
        ((t + 1.0) + t * x * x) / (den * den)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        x / self.denominator(x)
    }

    pub fn derivative_exact(&self, x: &BigRational) -> BigRational {
        let t = int(self.t as u64);
        let den = self.denominator(x);
        (int(self.t as u64 + 1) + t * x * x) / (&den * &den)
    }

    fn denominator(&self, x: &BigRational) -> BigRational {
        int(self.t as u64 + 1) - int(self.t as u64) * x * x
    }

    /// Coefficient of `x^l`: `t^k / (t+1)^(k+1)` for `l = 2k+1`, else 0.
    pub fn coefficient(&self, l: u32) -> BigRational {
        if l % 2 == 0 {
            return BigRational::zero();
        }
        let k = (l - 1) / 2;
        let t = BigInt::from(self.t);
        BigRational::new(num_traits::pow(t.clone(), k as usize), num_traits::pow(t + 1, k as usize + 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GeneratingFunctionMoments {
    /// `P_t(1)`; equals 1.
    pub normalization: ExactScalar,
    /// `P_t'(1)`: expected hitting time from the bottom level, `2t+1`.
    pub bottom_mean: ExactScalar,
}

pub fn generating_function_moments(m: u32, t: u32) -> Result<(BottomGeneratingFunction, GeneratingFunctionMoments)> {
    if m < 2 {
        return Err(Error::InvalidParams("m must be at least 2"));
    }
    let gf = BottomGeneratingFunction { t };
    let moments = GeneratingFunctionMoments {
        normalization: ExactScalar::new(gf.eval_exact(&BigRational::one())),
        bottom_mean: ExactScalar::new(gf.derivative_exact(&BigRational::one())),
    };
    Ok((gf, moments))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MeanHitting {
    pub mean: ExactScalar,
    /// `mean - 2t`; lies in `(1, 2)` for `t ≥ 1`.
    pub offset_from_2t: ExactScalar,
    /// Whether `2t+1 < mean < 2t+2`.
    pub in_band: bool,
    pub ratio_to_ln_vertices: f64,
    /// `2 / ln m`, the limit of the ratio.
    pub ratio_limit: f64,
}

/// Mean hitting time of `G(t;m)` from the per-level closed forms.
pub fn mean_hitting_closed(m: u32, t: u32) -> Result<MeanHitting> {
    let h = hitting_closed_forms(m, t)?;
    let two_t = int(2 * t as u64);
    let offset = h.mean.exact() - &two_t;
    let in_band = offset > BigRational::one() && offset < int(2);
    Ok(MeanHitting {
        offset_from_2t: ExactScalar::new(offset),
        in_band,
        ratio_to_ln_vertices: h.mean_over_ln_vertices,
        ratio_limit: 2.0 / libm::log(m as f64),
        mean: h.mean,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkStart {
    UniformNonTrap,
    Fixed(u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkOptions {
    pub trials: u64,
    pub seed: u64,
    /// Defaults to `100 (2t+2)`.
    pub max_steps: Option<u64>,
    pub start: WalkStart,
    /// Truncated fraction above which the result is flagged.
    pub max_truncation_rate: f64,
}

impl WalkOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        WalkOptions { trials, seed, max_steps: None, start: WalkStart::UniformNonTrap, max_truncation_rate: 1e-6 }
    }
}

/// Trials per independent random stream.
pub const WALK_BLOCK: u64 = 4096;

/// Sufficient statistics of a batch of walks; merging is order-independent.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTally {
    pub completed: u64,
    pub truncated: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub level_count: Vec<u64>,
    pub level_sum: Vec<f64>,
    pub level_sum_sq: Vec<f64>,
}

impl WalkTally {
    pub fn new(levels: usize) -> Self {
        WalkTally {
            completed: 0,
            truncated: 0,
            sum: 0.0,
            sum_sq: 0.0,
            level_count: vec![0; levels],
            level_sum: vec![0.0; levels],
            level_sum_sq: vec![0.0; levels],
        }
    }

    pub fn merge(&mut self, other: &WalkTally) {
        self.completed += other.completed;
        self.truncated += other.truncated;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for l in 0..self.level_count.len() {
            self.level_count[l] += other.level_count[l];
            self.level_sum[l] += other.level_sum[l];
            self.level_sum_sq[l] += other.level_sum_sq[l];
        }
    }
}

pub fn default_max_steps(t: u32) -> u64 {
    100 * (2 * t as u64 + 2)
}

/// Runs block `block` of a simulation: trials
/// `block * WALK_BLOCK .. min((block+1) * WALK_BLOCK, trials)`, drawing from
/// ChaCha8 stream `block` of `seed`. Blocks can run on separate workers.
pub fn simulate_block(spec: &TrapSpec<'_>, opts: &WalkOptions, block: u64) -> WalkTally {
    let inst = spec.instance;
    let g = inst.graph();
    let n = g.vertex_count();
    let trap = spec.trap as usize;
    let max_steps = opts.max_steps.unwrap_or_else(|| default_max_steps(inst.params().t));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(block);
    let first = block * WALK_BLOCK;
    let last = (first + WALK_BLOCK).min(opts.trials);
    let mut tally = WalkTally::new(inst.bottom_level() as usize + 1);
    for _ in first..last {
        let start = match opts.start {
            WalkStart::Fixed(v) => v as usize,
            WalkStart::UniformNonTrap => {
                let r = rng.gen_range(0..n - 1);
                if r >= trap {
                    r + 1
                } else {
                    r
                }
            }
        };
        let mut v = start;
        let mut steps = 0u64;
        while v != trap && steps < max_steps {
            let nb = g.neighbors(v);
            v = nb[rng.gen_range(0..nb.len())] as usize;
            steps += 1;
        }
        if v != trap {
            tally.truncated += 1;
            continue;
        }
        let s = steps as f64;
        tally.completed += 1;
        tally.sum += s;
        tally.sum_sq += s * s;
        let l = inst.level(start) as usize;
        tally.level_count[l] += 1;
        tally.level_sum[l] += s;
        tally.level_sum_sq[l] += s * s;
    }
    tally
}

pub fn block_count(trials: u64) -> u64 {
    trials.div_ceil(WALK_BLOCK)
}

/// Summarizes merged block tallies.
pub fn finish_simulation(spec: &TrapSpec<'_>, opts: &WalkOptions, tally: &WalkTally) -> HittingSummary {
    let max_steps = opts.max_steps.unwrap_or_else(|| default_max_steps(spec.instance.params().t));
    let mean = if tally.completed > 0 { tally.sum / tally.completed as f64 } else { f64::NAN };
    let se = std_error(tally.sum_sq, mean, tally.completed);
    let rate = tally.truncated as f64 / opts.trials as f64;
    HittingSummary {
        method: HittingMethod::MonteCarlo,
        trap: spec.trap,
        per_vertex: Vec::new(),
        per_level_exact: None,
        per_level: level_rows(&tally.level_sum, &tally.level_count, Some(&tally.level_sum_sq)),
        mean,
        mean_exact: None,
        monte_carlo: Some(MonteCarloStats {
            trials: opts.trials,
            truncated: tally.truncated,
            max_steps,
            sample_mean: mean,
            std_error: se,
            flagged: rate > opts.max_truncation_rate,
        }),
    }
}

/// Checks walk options; callers that schedule blocks themselves run this first.
pub fn validate_walk(spec: &TrapSpec<'_>, opts: &WalkOptions) -> Result<()> {
    if opts.trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1"));
    }
    if spec.graph().vertex_count() < 2 {
        return Err(Error::InvalidParams("need a non-trap vertex"));
    }
    if let WalkStart::Fixed(v) = opts.start {
        if v as usize >= spec.graph().vertex_count() {
            return Err(Error::InvalidVertex(v));
        }
    }
    spec.check_connected()
}

/// Monte-Carlo estimate of the mean hitting time.
///
/// Deterministic for a fixed seed regardless of how blocks are scheduled.
pub fn simulate_walks(spec: &TrapSpec<'_>, opts: &WalkOptions) -> Result<HittingSummary> {
    validate_walk(spec, opts)?;
    let mut tally = WalkTally::new(spec.instance.bottom_level() as usize + 1);
    for b in 0..block_count(opts.trials) {
        tally.merge(&simulate_block(spec, opts, b));
    }
    Ok(finish_simulation(spec, opts, &tally))
}
