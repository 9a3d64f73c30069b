//! Trapping-walk report: closed forms, linear solves and simulation side by side.

use std::io::Write;

use hsfnet_core::model::Variant;
use hsfnet_core::walk::{
    block_count, exact_hitting_solve_with, finish_simulation, level_collapsed_solve, mean_hitting_closed,
    simulate_block, validate_walk, HittingMethod, HittingSummary, MeanHitting, SolveOptions, TrapSpec, WalkOptions,
    WalkTally,
};
use hsfnet_core::GraphInstance;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fmt::{g12, opt};

/// Monte Carlo over a rayon pool. Blocks are merged in index order, so the
/// result is identical to the sequential run.
pub fn simulate_parallel(spec: &TrapSpec<'_>, opts: &WalkOptions) -> Result<HittingSummary> {
    validate_walk(spec, opts)?;
    let tallies: Vec<WalkTally> =
        (0..block_count(opts.trials)).into_par_iter().map(|b| simulate_block(spec, opts, b)).collect();
    let mut total = WalkTally::new(spec.instance().bottom_level() as usize + 1);
    for t in &tallies {
        total.merge(t);
    }
    Ok(finish_simulation(spec, opts, &total))
}

#[derive(Clone, Debug)]
pub struct WalkRequest {
    pub trap: Option<u32>,
    /// Monte Carlo is skipped when `None`.
    pub walk: Option<WalkOptions>,
    /// Also solve the per-level system in exact rationals.
    pub exact: bool,
    pub solve: SolveOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkReport {
    pub trap: u32,
    /// Closed forms, for the base family with the trap on the hub.
    pub closed_form: Option<MeanHitting>,
    pub closed_bottom: Option<u64>,
    pub closed_intermediate: Option<u64>,
    pub linear_solve: Option<HittingSummary>,
    pub linear_solve_error: Option<String>,
    pub level_collapsed: Option<HittingSummary>,
    pub monte_carlo: Option<HittingSummary>,
}

pub fn run_walk(g: &GraphInstance, req: &WalkRequest) -> Result<WalkReport> {
    let spec = match req.trap {
        Some(v) => TrapSpec::new(g, v)?,
        None => TrapSpec::hub(g),
    };
    let p = g.params();
    let on_hub = spec.trap() == g.hub();
    let closed = (p.variant == Variant::Base && on_hub).then(|| mean_hitting_closed(p.m, p.t)).transpose()?;
    let (linear_solve, linear_solve_error) = match exact_hitting_solve_with(&spec, &req.solve) {
        Ok(mut s) => {
            s.per_vertex.clear();
            (Some(s), None)
        }
        Err(e @ hsfnet_core::Error::SolverCap { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let level_collapsed = if req.exact && on_hub {
        match level_collapsed_solve(&spec) {
            Ok(mut s) => {
                s.per_vertex.clear();
                Some(s)
            }
            Err(hsfnet_core::Error::InvalidLevels(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let monte_carlo = req.walk.as_ref().map(|w| simulate_parallel(&spec, w)).transpose()?;
    Ok(WalkReport {
        trap: spec.trap(),
        closed_bottom: closed.as_ref().map(|_| 2 * p.t as u64 + 1),
        closed_intermediate: closed.as_ref().filter(|_| p.t >= 1).map(|_| 2 * p.t as u64 + 2),
        closed_form: closed,
        linear_solve,
        linear_solve_error,
        level_collapsed,
        monte_carlo,
    })
}

fn method_name(m: &HittingMethod) -> &'static str {
    match m {
        HittingMethod::LinearSolve { dense: true, .. } => "linear_solve_dense",
        HittingMethod::LinearSolve { dense: false, .. } => "linear_solve_iterative",
        HittingMethod::LevelCollapsed => "level_collapsed",
        HittingMethod::ClosedForm => "closed_form",
        HittingMethod::MonteCarlo => "monte_carlo",
    }
}

pub const WALK_CSV_HEADER: [&str; 7] = ["method", "level", "vertices", "mean", "exact", "std_error", "truncated"];

/// One row per level per method, then an `all` row with the overall mean.
pub fn write_walk_csv(report: &WalkReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WALK_CSV_HEADER)?;
    if let Some(c) = &report.closed_form {
        w.write_record(["closed_form", "all", "", &g12(c.mean.to_f64()), &c.mean.to_ratio_string(), "", ""])?;
    }
    let summaries = [&report.linear_solve, &report.level_collapsed, &report.monte_carlo];
    for s in summaries.into_iter().flatten() {
        let name = method_name(&s.method);
        let exact_of = |level: u32| {
            s.per_level_exact
                .as_ref()
                .and_then(|rows| rows.iter().find(|(l, _)| *l == level))
                .map(|(_, v)| v.to_ratio_string())
                .unwrap_or_default()
        };
        for l in &s.per_level {
            w.write_record([
                name,
                &l.level.to_string(),
                &l.vertices.to_string(),
                &g12(l.mean),
                &exact_of(l.level),
                &opt(l.std_error),
                "",
            ])?;
        }
        let mc = s.monte_carlo.as_ref();
        w.write_record([
            name,
            "all",
            "",
            &g12(s.mean),
            &s.mean_exact.as_ref().map(|e| e.to_ratio_string()).unwrap_or_default(),
            &opt(mc.map(|m| m.std_error)),
            &mc.map(|m| m.truncated.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use hsfnet_core::walk::simulate_walks;
    use hsfnet_core::{build_base, build_deleted};

    #[test]
    fn parallel_matches_sequential() {
        let g = build_deleted(3, 2, 0.3, 5).unwrap();
        let spec = TrapSpec::hub(&g);
        let opts = WalkOptions::new(30_000, 12);
        assert_eq!(simulate_parallel(&spec, &opts).unwrap(), simulate_walks(&spec, &opts).unwrap());
    }

    #[test]
    fn report_for_g_2_2() {
        let g = build_base(2, 2).unwrap();
        let req = WalkRequest { trap: None, walk: None, exact: true, solve: SolveOptions::default() };
        let r = run_walk(&g, &req).unwrap();
        assert_eq!(r.closed_form.as_ref().unwrap().mean.to_ratio_string(), "38/7");
        assert_eq!(r.level_collapsed.as_ref().unwrap().mean_exact.as_ref().unwrap().to_ratio_string(), "38/7");
        assert!((r.linear_solve.as_ref().unwrap().mean - 38.0 / 7.0).abs() < 1e-12);
        assert_eq!((r.closed_bottom, r.closed_intermediate), (Some(5), Some(6)));
        let mut buf = Vec::new();
        write_walk_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("closed_form,all,,5.42857142857,38/7,,\n"), "{text}");
        assert!(text.contains("level_collapsed,3,8,5,5,,\n"), "{text}");
    }

    #[test]
    fn solver_cap_is_reported_not_fatal() {
        let g = build_base(2, 3).unwrap();
        let solve = SolveOptions { max_unknowns: 3, ..SolveOptions::default() };
        let req = WalkRequest { trap: None, walk: Some(WalkOptions::new(100, 1)), exact: false, solve };
        let r = run_walk(&g, &req).unwrap();
        assert!(r.linear_solve.is_none() && r.linear_solve_error.is_some());
        assert!(r.monte_carlo.is_some());
    }
}
