//! Parameter-grid sweeps producing the data behind the figures.

use std::io::Write;

use hsfnet_core::analytic::{
    assortativity_r, closed_form_report, clustering_c1, clustering_c2_expected, diameter_closed_form, g2_expected_sums,
};
use hsfnet_core::empirical::{
    assortativity_pearson, average_local_clustering, diameter_bfs, powerlaw_slope, DiameterMode,
};
use hsfnet_core::model::{build, BuildOptions, Variant};
use hsfnet_core::walk::{exact_hitting_solve, mean_hitting_closed, TrapSpec};
use hsfnet_core::{GraphInstance, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::{g12, opt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    Base,
    Wheel,
    Deleted,
}

impl VariantKind {
    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Base => "base",
            VariantKind::Wheel => "wheel",
            VariantKind::Deleted => "deleted",
        }
    }

    pub fn params(self, m: u32, t: u32, p: Option<f64>, seed: u64) -> ModelParams {
        match self {
            VariantKind::Base => ModelParams::base(m, t),
            VariantKind::Wheel => ModelParams::wheel(m, t),
            VariantKind::Deleted => ModelParams::deleted(m, t, p.unwrap_or(0.0), seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Edge count (expected count for the deleted variant).
    Edges,
    Diameter,
    /// Average clustering: 0 for base, the wheel formula, or its expectation under deletion.
    Clustering,
    /// Degree assortativity; for rim variants the Pearson value of the expected edge sums.
    Assortativity,
    /// Mean hitting time with the trap on the hub.
    Hitting,
    /// Log-log slope of the cumulative degree distribution.
    Slope,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Edges => "edges",
            Quantity::Diameter => "diameter",
            Quantity::Clustering => "clustering",
            Quantity::Assortativity => "assortativity",
            Quantity::Hitting => "hitting",
            Quantity::Slope => "slope",
        }
    }
}

/// Preset grids for the four figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Wheel-seeded clustering against t.
    Fig2,
    /// Clustering under rim deletion against t and p.
    Fig3,
    /// Base assortativity against t.
    Fig4,
    /// Assortativity under rim deletion against t, with simulation.
    Fig5,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variant: VariantKind,
    pub m: Vec<u32>,
    pub t: Vec<u32>,
    /// Deletion probabilities; deleted variant only.
    pub p: Vec<f64>,
    /// First seed; cell `i` of a deleted sweep averages seeds `seed..seed+seeds`.
    pub seed: u64,
    pub seeds: u32,
    pub quantities: Vec<Quantity>,
    /// Measure only instances up to this size; larger cells report the closed form alone.
    pub max_measure_vertices: u64,
    pub measure: bool,
}

impl SweepSpec {
    pub fn figure(fig: Figure) -> Self {
        let t: Vec<u32> = (1..=12).collect();
        let base = SweepSpec {
            variant: VariantKind::Base,
            m: vec![2, 4, 6, 8],
            t: t.clone(),
            p: Vec::new(),
            seed: 1,
            seeds: 1,
            quantities: vec![Quantity::Assortativity],
            max_measure_vertices: 200_000,
            measure: true,
        };
        match fig {
            Figure::Fig2 => SweepSpec { variant: VariantKind::Wheel, quantities: vec![Quantity::Clustering], ..base },
            Figure::Fig3 => SweepSpec {
                variant: VariantKind::Deleted,
                m: vec![2, 3],
                p: vec![0.0, 0.25, 0.5, 0.75, 1.0],
                seeds: 10,
                quantities: vec![Quantity::Clustering],
                ..base
            },
            Figure::Fig4 => base,
            Figure::Fig5 => {
                SweepSpec { variant: VariantKind::Deleted, m: vec![2, 3], p: vec![0.25, 0.5, 0.75], seeds: 10, ..base }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.is_empty() || self.t.is_empty() || self.quantities.is_empty() {
            return Err(Error::Usage("sweep grid needs at least one m, t and quantity".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Usage("seeds per cell must be at least 1".into()));
        }
        match (self.variant, self.p.is_empty()) {
            (VariantKind::Deleted, true) => Err(Error::Usage("the deleted variant needs a p list".into())),
            (VariantKind::Base | VariantKind::Wheel, false) => {
                Err(Error::Usage("a p list is only valid for the deleted variant".into()))
            }
            _ => {
                for &p in &self.p {
                    ModelParams::deleted(2, 0, p, 0).validate()?;
                }
                Ok(())
            }
        }
    }

    fn cells(&self) -> Vec<(u32, u32, Option<f64>, Quantity)> {
        let ps: Vec<Option<f64>> =
            if self.variant == VariantKind::Deleted { self.p.iter().copied().map(Some).collect() } else { vec![None] };
        let mut cells = Vec::new();
        for &m in &self.m {
            for &t in &self.t {
                for &p in &ps {
                    for &q in &self.quantities {
                        cells.push((m, t, p, q));
                    }
                }
            }
        }
        cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: &'static str,
    pub m: u32,
    pub t: u32,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    pub quantity: &'static str,
    pub closed_form: Option<f64>,
    pub measured: Option<f64>,
    pub stderr: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.error.is_some() && self.closed_form.is_none() && self.measured.is_none()
    }
}

pub const SWEEP_CSV_HEADER: [&str; 10] =
    ["variant", "m", "t", "p", "seed", "quantity", "closed_form", "measured", "stderr", "error"];

/// Evaluates every cell on a pool of `threads` workers (0 = rayon default);
/// rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let cells = spec.cells();
    Ok(pool.install(|| cells.par_iter().map(|&(m, t, p, q)| eval_cell(spec, m, t, p, q)).collect()))
}

fn closed_value(variant: VariantKind, m: u32, t: u32, p: Option<f64>, q: Quantity) -> hsfnet_core::Result<Option<f64>> {
    let params = variant.params(m, t, p, 0);
    Ok(match q {
        Quantity::Edges => Some(closed_form_report(&params)?.variant_edges.to_f64()),
        Quantity::Diameter => diameter_closed_form(&params.variant, m, t).map(f64::from),
        Quantity::Clustering => match variant {
            VariantKind::Base => Some(0.0),
            VariantKind::Wheel => Some(clustering_c1(m, t)?.to_f64()),
            VariantKind::Deleted => Some(clustering_c2_expected(m, t, p.unwrap_or(0.0))?.to_f64()),
        },
        Quantity::Assortativity => match variant {
            VariantKind::Base => (t >= 1).then(|| assortativity_r(m, t)).transpose()?.map(|r| r.to_f64()),
            VariantKind::Wheel => g2_expected_sums(m, t, 0.0)?.r2.map(|r| r.to_f64()),
            VariantKind::Deleted => g2_expected_sums(m, t, p.unwrap_or(0.0))?.r2.map(|r| r.to_f64()),
        },
        Quantity::Hitting => match variant {
            VariantKind::Base => Some(mean_hitting_closed(m, t)?.mean.to_f64()),
            _ => None,
        },
        Quantity::Slope => (variant == VariantKind::Base).then_some(-1.0),
    })
}

fn measured_value(g: &GraphInstance, q: Quantity) -> hsfnet_core::Result<f64> {
    Ok(match q {
        Quantity::Edges => g.edge_count() as f64,
        Quantity::Diameter => diameter_bfs(g.graph(), DiameterMode::Exact)?.value as f64,
        Quantity::Clustering => average_local_clustering(g).average,
        Quantity::Assortativity => assortativity_pearson(g.graph())?.to_f64(),
        Quantity::Hitting => exact_hitting_solve(&TrapSpec::hub(g))?.mean,
        Quantity::Slope => powerlaw_slope(g)?.slope,
    })
}

fn eval_cell(spec: &SweepSpec, m: u32, t: u32, p: Option<f64>, q: Quantity) -> SweepRow {
    let stochastic = spec.variant == VariantKind::Deleted;
    let mut row = SweepRow {
        variant: spec.variant.name(),
        m,
        t,
        p,
        seed: stochastic.then_some(spec.seed),
        quantity: q.name(),
        closed_form: None,
        measured: None,
        stderr: None,
        error: None,
    };
    let mut errors = Vec::new();
    match closed_value(spec.variant, m, t, p, q) {
        Ok(v) => row.closed_form = v,
        Err(e) => errors.push(format!("closed form: {e}")),
    }
    if spec.measure {
        let size = spec.variant.params(m, t, p, 0).vertex_count();
        match size {
            Ok(n) if n <= spec.max_measure_vertices as u128 => {
                let seeds = if stochastic { spec.seeds as u64 } else { 1 };
                let opts = BuildOptions { max_vertices: spec.max_measure_vertices };
                let samples: hsfnet_core::Result<Vec<f64>> = (0..seeds)
                    .map(|i| {
                        let g = build(&spec.variant.params(m, t, p, spec.seed.wrapping_add(i)), &opts)?;
                        measured_value(&g, q)
                    })
                    .collect();
                match samples {
                    Ok(xs) => {
                        let (mean, se) = mean_and_stderr(&xs);
                        row.measured = Some(mean);
                        row.stderr = se;
                    }
                    Err(e) => errors.push(format!("measurement: {e}")),
                }
            }
            Ok(n) => errors.push(format!("measurement skipped: {n} vertices above {}", spec.max_measure_vertices)),
            Err(e) => errors.push(format!("measurement skipped: {e}")),
        }
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    if xs.len() >= 2 && xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], Some(0.0));
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.variant,
            &r.m.to_string(),
            &r.t.to_string(),
            &opt(r.p),
            &r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.quantity,
            &opt(r.closed_form),
            &opt(r.measured),
            &opt(r.stderr),
            r.error.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Whether `|closed_form|` strictly decreases in `t` from `from_t` on, for
/// every `(m, p, quantity)` series. Returns every rising step otherwise.
pub fn magnitude_decreasing(rows: &[SweepRow], from_t: u32) -> std::result::Result<(), String> {
    let mut series: Vec<(u32, Option<u64>, &str, Vec<(u32, f64)>)> = Vec::new();
    for r in rows.iter().filter(|r| r.t >= from_t) {
        let Some(v) = r.closed_form else { continue };
        let key = (r.m, r.p.map(f64::to_bits), r.quantity);
        match series.iter_mut().find(|s| (s.0, s.1, s.2) == key) {
            Some(s) => s.3.push((r.t, v.abs())),
            None => series.push((key.0, key.1, key.2, vec![(r.t, v.abs())])),
        }
    }
    let mut bad = Vec::new();
    for (m, _, q, mut pts) in series {
        pts.sort_by_key(|&(t, _)| t);
        for w in pts.windows(2).filter(|w| w[1].1 >= w[0].1) {
            bad.push(format!("{q} at m={m}: |{}| at t={} then |{}| at t={}", g12(w[0].1), w[0].0, g12(w[1].1), w[1].0));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

/// Rows whose rim-variant assortativity is negative, for which the claimed
/// non-negative upper bound fails.
pub fn negative_assortativity(rows: &[SweepRow]) -> Vec<&SweepRow> {
    rows.iter()
        .filter(|r| r.variant != "base" && r.quantity == "assortativity")
        .filter(|r| r.closed_form.is_some_and(|v| v < 0.0) || r.measured.is_some_and(|v| v < 0.0))
        .collect()
}

pub fn variant_of(params: &ModelParams) -> VariantKind {
    match params.variant {
        Variant::Base => VariantKind::Base,
        Variant::WheelSeed => VariantKind::Wheel,
        Variant::WheelDeleted { .. } => VariantKind::Deleted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig4_closed_values_shrink() {
        let mut spec = SweepSpec::figure(Figure::Fig4);
        spec.measure = false;
        let rows = run_sweep(&spec, 2).unwrap();
        assert_eq!(rows.len(), 48);
        assert_eq!((rows[0].m, rows[0].t), (2, 1));
        assert_eq!(rows[0].closed_form, Some(-1.0 / 3.0));
        let (small, large): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r.m == 2);
        magnitude_decreasing(&large, 4).unwrap();
        // m = 2 peaks in magnitude at t = 5 before decaying.
        assert!(magnitude_decreasing(&small, 4).is_err());
        magnitude_decreasing(&small, 5).unwrap();
        let r = |t: u32| small.iter().find(|r| r.t == t).unwrap().closed_form.unwrap().abs();
        assert!(r(3) < r(4) && r(4) < r(5) && r(5) > r(6));
    }

    #[test]
    fn fig3_at_zero_equals_fig2() {
        let mut f3 = SweepSpec::figure(Figure::Fig3);
        f3.m = vec![2];
        f3.t = vec![4];
        f3.p = vec![0.0];
        f3.seeds = 3;
        let mut f2 = SweepSpec::figure(Figure::Fig2);
        f2.m = vec![2];
        f2.t = vec![4];
        let a = &run_sweep(&f3, 1).unwrap()[0];
        let b = &run_sweep(&f2, 1).unwrap()[0];
        assert_eq!(a.closed_form, b.closed_form);
        assert_eq!(a.measured, b.measured);
        assert_eq!(a.stderr, Some(0.0));
        assert_eq!(mean_and_stderr(&[0.1; 20]), (0.1, Some(0.0)));
    }

    #[test]
    fn order_is_independent_of_threads() {
        let spec = SweepSpec {
            variant: VariantKind::Deleted,
            m: vec![2, 3],
            t: vec![1, 2, 3],
            p: vec![0.5],
            seed: 9,
            seeds: 4,
            quantities: vec![Quantity::Edges, Quantity::Clustering, Quantity::Diameter],
            max_measure_vertices: 10_000,
            measure: true,
        };
        assert_eq!(run_sweep(&spec, 1).unwrap(), run_sweep(&spec, 4).unwrap());
    }

    #[test]
    fn oversize_cells_keep_closed_forms() {
        let spec = SweepSpec { m: vec![8], t: vec![12], ..SweepSpec::figure(Figure::Fig4) };
        let rows = run_sweep(&spec, 1).unwrap();
        assert!(rows[0].closed_form.is_some() && rows[0].measured.is_none());
        assert!(rows[0].error.as_deref().unwrap().starts_with("measurement skipped"));
        assert!(!rows[0].failed());
    }

    #[test]
    fn grid_validation() {
        let mut spec = SweepSpec::figure(Figure::Fig4);
        spec.p = vec![0.5];
        assert!(spec.validate().is_err());
        let mut spec = SweepSpec::figure(Figure::Fig3);
        spec.p.clear();
        assert!(spec.validate().is_err());
        spec.p = vec![1.5];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn csv_columns() {
        let mut spec = SweepSpec::figure(Figure::Fig4);
        spec.m = vec![2];
        spec.t = vec![1];
        let mut buf = Vec::new();
        write_sweep_csv(&run_sweep(&spec, 1).unwrap(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "variant,m,t,p,seed,quantity,closed_form,measured,stderr,error\n\
             base,2,1,,,assortativity,-0.333333333333,-0.333333333333,,\n"
        );
    }
}
