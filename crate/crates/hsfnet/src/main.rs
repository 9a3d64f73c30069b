use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hsfnet::error::Error;
use hsfnet::fmt::{g12, to_json_pretty};
use hsfnet::hitting::{run_walk, write_walk_csv, WalkRequest};
use hsfnet::io::{export, import, params_from_parts, Format};
use hsfnet::report::{analyze, write_analyze_csv};
use hsfnet::sweep::{negative_assortativity, run_sweep, write_sweep_csv, Figure, Quantity, SweepSpec, VariantKind};
use hsfnet::verify::{Level, Verifier};
use hsfnet_core::analytic::closed_form_report;
use hsfnet_core::empirical::DiameterMode;
use hsfnet_core::model::{build, BuildOptions};
use hsfnet_core::walk::{SolveOptions, WalkOptions};
use hsfnet_core::{GraphInstance, ModelParams};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Deterministic hierarchical scale-free graphs: build, measure, walk, sweep, verify.
#[derive(Parser)]
#[command(name = "hsfnet", version)]
struct Cli {
    /// Default directory for generated files.
    #[arg(long, global = true, env = "HSFNET_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance and write it to a file.
    Generate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: Format,
        /// Output file; defaults to a name derived from the parameters inside the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed forms against measurement for one instance.
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Lower-bound the diameter from this many random sources instead of computing it exactly.
        #[arg(long)]
        sampled_diameter: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hitting times of a trap: closed forms, linear solve and simulation.
    Walk {
        #[command(flatten)]
        source: SourceArgs,
        /// Simulated walks; 0 skips simulation.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Also solve the per-level system in exact rationals.
        #[arg(long)]
        exact: bool,
        /// Trap vertex; defaults to the hub.
        #[arg(long)]
        trap: Option<u32>,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate quantities over a parameter grid and write CSV.
    Sweep {
        #[command(flatten)]
        grid: SweepArgs,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
        /// Discrepancy report path; the full suite writes one to the output directory by default.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, value_enum)]
    variant: VariantKind,
    #[arg(short)]
    m: u32,
    #[arg(short)]
    t: u32,
    /// Rim deletion probability (deleted variant).
    #[arg(short)]
    p: Option<f64>,
    /// Seed for rim deletion and simulation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, value_enum, required_unless_present = "input")]
    variant: Option<VariantKind>,
    #[arg(short, required_unless_present = "input")]
    m: Option<u32>,
    #[arg(short, required_unless_present = "input")]
    t: Option<u32>,
    #[arg(short)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read the instance from a file instead of building it.
    #[arg(long, conflicts_with_all = ["variant", "m", "t", "p"])]
    input: Option<PathBuf>,
    /// Format of the input file; guessed from the extension when absent.
    #[arg(long, value_enum, requires = "input")]
    input_format: Option<Format>,
}

#[derive(Args)]
struct SweepArgs {
    /// Preset grid; explicit grid flags override its fields.
    #[arg(long, value_enum)]
    figure: Option<Figure>,
    #[arg(long, value_enum, required_unless_present = "figure")]
    variant: Option<VariantKind>,
    #[arg(short, value_delimiter = ',')]
    m: Vec<u32>,
    /// Values or an inclusive range such as `1..12`.
    #[arg(short, value_delimiter = ',')]
    t: Vec<String>,
    #[arg(short, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_enum)]
    quantity: Vec<Quantity>,
    /// First seed for deleted cells.
    #[arg(long)]
    seed: Option<u64>,
    /// Seeds averaged per deleted cell.
    #[arg(long)]
    seeds: Option<u32>,
    /// Report closed forms only.
    #[arg(long)]
    no_measure: bool,
    /// Measure only instances with at most this many vertices.
    #[arg(long)]
    max_measure_vertices: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

impl ParamArgs {
    fn params(&self) -> hsfnet::error::Result<ModelParams> {
        params_for(self.variant, self.m, self.t, self.p, self.seed)
    }
}

fn params_for(variant: VariantKind, m: u32, t: u32, p: Option<f64>, seed: u64) -> hsfnet::error::Result<ModelParams> {
    let seed = (variant == VariantKind::Deleted).then_some(seed);
    let p = match (variant, p) {
        (VariantKind::Deleted, None) => return Err(Error::Usage("the deleted variant needs -p".into())),
        (_, p) => p,
    };
    params_from_parts(variant.name(), m, t, p, seed)
}

impl SourceArgs {
    fn load(&self) -> anyhow::Result<GraphInstance> {
        if let Some(path) = &self.input {
            let format = self.input_format.unwrap_or_else(|| Format::from_path(path));
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let imported = import(BufReader::new(file), format, None)?;
            for w in &imported.warnings {
                eprintln!("warning: {w}");
            }
            return Ok(imported.instance);
        }
        let (Some(variant), Some(m), Some(t)) = (self.variant, self.m, self.t) else {
            return Err(Error::Usage("give --variant, -m and -t, or --input".into()).into());
        };
        let params = params_for(variant, m, t, self.p, self.seed)?;
        Ok(build(&params, &BuildOptions::default())?)
    }
}

impl SweepArgs {
    fn spec(&self) -> hsfnet::error::Result<SweepSpec> {
        let mut spec = match (self.figure, self.variant) {
            (Some(f), _) => SweepSpec::figure(f),
            (None, Some(v)) => SweepSpec { variant: v, p: Vec::new(), ..SweepSpec::figure(Figure::Fig4) },
            (None, None) => return Err(Error::Usage("give --figure or --variant".into())),
        };
        if let Some(v) = self.variant {
            spec.variant = v;
        }
        if !self.m.is_empty() {
            spec.m = self.m.clone();
        }
        if !self.t.is_empty() {
            spec.t = parse_t_list(&self.t)?;
        }
        if !self.p.is_empty() {
            spec.p = self.p.clone();
        }
        if !self.quantity.is_empty() {
            spec.quantities = self.quantity.clone();
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(s) = self.seeds {
            spec.seeds = s;
        }
        if self.no_measure {
            spec.measure = false;
        }
        if let Some(n) = self.max_measure_vertices {
            spec.max_measure_vertices = n;
        }
        Ok(spec)
    }
}

fn parse_t_list(items: &[String]) -> hsfnet::error::Result<Vec<u32>> {
    let bad = |s: &str| Error::Usage(format!("invalid -t value {s:?}"));
    let mut out = Vec::new();
    for item in items {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.parse().map_err(|_| bad(item))?, b.parse().map_err(|_| bad(item))?);
                if a > b {
                    return Err(bad(item));
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad(item))?),
        }
    }
    Ok(out)
}

fn default_name(p: &ModelParams, format: Format) -> String {
    let mut name = format!("{}_m{}_t{}", p.variant.name(), p.m, p.t);
    if let (Some(prob), Some(seed)) = (p.variant.deletion_probability(), p.variant.seed()) {
        name.push_str(&format!("_p{prob}_s{seed}"));
    }
    format!("{name}.{}", format.extension())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Runs `write` against the file at `path`, or standard output.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            let mut w = create(path)?;
            write(&mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn print_header(g: &GraphInstance) -> anyhow::Result<()> {
    let p = g.params();
    let c = closed_form_report(p)?;
    println!("variant: {}", p.variant.name());
    println!("m: {}", p.m);
    println!("t: {}", p.t);
    if let (Some(prob), Some(seed)) = (p.variant.deletion_probability(), p.variant.seed()) {
        println!("p: {}", g12(prob));
        println!("seed: {seed}");
    }
    println!("vertices: {}", g.vertex_count());
    println!("edges: {}", g.edge_count());
    println!("closed_vertices: {}", c.vertices.to_ratio_string());
    println!("closed_edges_base: {}", c.edges.to_ratio_string());
    println!("closed_edges_variant: {}", c.variant_edges.to_ratio_string());
    println!("average_degree: {}", c.average_degree.value.to_ratio_string());
    if let Some(d) = c.diameter {
        println!("diameter: {d}");
    }
    println!("degree_exponent: {}", c.gamma);
    println!("assortativity: {}", c.assortativity_r.to_ratio_string());
    println!("mean_hitting: {}", c.hitting.mean.to_ratio_string());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Generate { params, format, out } => {
            let params = params.params()?;
            let g = build(&params, &BuildOptions::default())?;
            let path = out.unwrap_or_else(|| cli.out_dir.join(default_name(&params, format)));
            let mut w = create(&path)?;
            export(&g, format, &mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
            print_header(&g)?;
            println!("file: {}", path.display());
            Ok(0)
        }
        Command::Analyze { source, format, sampled_diameter, out } => {
            let g = source.load()?;
            let mode = match sampled_diameter {
                Some(sources) => DiameterMode::SampledSources { sources, seed: source.seed },
                None => DiameterMode::Exact,
            };
            let report = analyze(&g, mode)?;
            emit(out.as_deref(), |w| {
                match format {
                    ReportFormat::Json => writeln!(w, "{}", to_json_pretty(&report)?)?,
                    ReportFormat::Csv => write_analyze_csv(&report, w)?,
                }
                Ok(())
            })?;
            Ok(0)
        }
        Command::Walk { source, trials, exact, trap, max_steps, format, out } => {
            let g = source.load()?;
            let walk = (trials > 0).then(|| WalkOptions { max_steps, ..WalkOptions::new(trials, source.seed) });
            let req = WalkRequest { trap, walk, exact, solve: SolveOptions::default() };
            let report = run_walk(&g, &req)?;
            if let Some(e) = &report.linear_solve_error {
                eprintln!("warning: {e}");
            }
            emit(out.as_deref(), |w| {
                match format {
                    ReportFormat::Json => writeln!(w, "{}", to_json_pretty(&report)?)?,
                    ReportFormat::Csv => write_walk_csv(&report, w)?,
                }
                Ok(())
            })?;
            Ok(0)
        }
        Command::Sweep { grid, jobs, out } => {
            let spec = grid.spec()?;
            let rows = run_sweep(&spec, jobs)?;
            let failed = rows.iter().filter(|r| r.failed()).count();
            for r in negative_assortativity(&rows) {
                eprintln!(
                    "flagged: negative assortativity at {} m={} t={} p={}: closed {}, measured {}",
                    r.variant,
                    r.m,
                    r.t,
                    r.p.map(g12).unwrap_or_default(),
                    r.closed_form.map(g12).unwrap_or_default(),
                    r.measured.map(g12).unwrap_or_default()
                );
            }
            emit(out.as_deref(), |w| Ok(write_sweep_csv(&rows, w)?))?;
            if failed > 0 {
                eprintln!("{failed} of {} cells failed", rows.len());
            }
            Ok(if !rows.is_empty() && failed == rows.len() { EXIT_COMPUTE } else { 0 })
        }
        Command::Verify { fast: _, full, report } => {
            let level = if full { Level::Full } else { Level::Fast };
            let result = Verifier::new(level).run_with(|r| println!("{r}"));
            let path = report.or_else(|| full.then(|| cli.out_dir.join("discrepancy_report.json")));
            if let Some(path) = path {
                emit(Some(&path), |w| Ok(writeln!(w, "{}", to_json_pretty(&result)?)?))?;
                println!("discrepancy report: {}", path.display());
            }
            let failed = result.failed_ids();
            if failed.is_empty() {
                println!("all {} criteria passed", result.results.len());
                Ok(0)
            } else {
                println!("{} of {} criteria failed: {failed:?}", failed.len(), result.results.len());
                Ok(EXIT_VERIFY)
            }
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(e) = e.downcast_ref::<Error>() {
        return e.exit_code() as u8;
    }
    if let Some(hsfnet_core::Error::InvalidParams(_)) = e.downcast_ref::<hsfnet_core::Error>() {
        return EXIT_USAGE;
    }
    EXIT_COMPUTE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
