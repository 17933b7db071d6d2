//! Command-line front end: synthesize or ingest densities, reconstruct,
//! verify and render.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use dmgraph::io::{self, parse_points_csv, read_dgrid, read_graph, read_recon, recon_to_json, write_dgrid, write_text};
use dmgraph::{check_theorem, histogram_density, kde_density, reconstruct, synth_density, GridSpec, NoiseParams, Point};
use dmgraph::{DensityField, PlanarGraph, TheoremReport};

mod render;

pub use render::render_svg;

#[derive(Debug, Parser)]
#[command(name = "dmgraph", version, about = "Reconstruct embedded graphs from density maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthetic density for a ground-truth graph
    Synth(SynthArgs),
    /// Histogram density from a point CSV
    Hist(HistArgs),
    /// Gaussian kernel density from a point CSV
    Kde(KdeArgs),
    /// Reconstruct a graph from a density file
    Reconstruct(ReconstructArgs),
    /// Compare a reconstruction against the ground truth
    Verify(VerifyArgs),
    /// Draw density and graphs as SVG
    Render(RenderArgs),
    /// synth, reconstruct and verify in one run
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub omega: f64,
    #[arg(long)]
    pub beta1: f64,
    #[arg(long)]
    pub beta2: f64,
    #[arg(long)]
    pub nu: f64,
}

impl NoiseArgs {
    fn params(&self) -> Result<NoiseParams> {
        Ok(NoiseParams::new(self.omega, self.beta1, self.beta2, self.nu)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub nx: usize,
    #[arg(long)]
    pub ny: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub origin_x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub origin_y: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.nx, self.ny, Point::new(self.origin_x, self.origin_y), self.spacing)?)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, required_unless_present = "print_delta_range")]
    pub out: Option<PathBuf>,
    /// Print the admissible delta interval as JSON
    #[arg(long)]
    pub print_delta_range: bool,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KdeArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub bandwidth: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub density: PathBuf,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the persistence diagram as CSV
    #[arg(long)]
    pub diagram: Option<PathBuf>,
    /// Noise thresholds, if known, used to check delta
    #[arg(long, requires_all = ["beta2", "nu"])]
    pub beta1: Option<f64>,
    #[arg(long, requires_all = ["beta1", "nu"])]
    pub beta2: Option<f64>,
    #[arg(long, requires_all = ["beta1", "beta2"])]
    pub nu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Ground-truth graph JSON
    #[arg(long, alias = "truth")]
    pub graph: PathBuf,
    /// Reconstruction JSON
    #[arg(long)]
    pub recon: PathBuf,
    #[arg(long)]
    pub omega: f64,
    /// Sampling step for the Hausdorff distance (default spacing/4)
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Report JSON path; printed to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub density: Option<PathBuf>,
    #[arg(long, alias = "truth")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub recon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the midpoint of the admissible interval
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Directory receiving density.dgrid, diagram.csv, recon.json, report.json
    #[arg(long)]
    pub out: PathBuf,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailed => 1,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Hist(a) => cmd_hist(&a),
        Command::Kde(a) => cmd_kde(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Pipeline(a) => cmd_pipeline(&a),
    }
}

fn load_graph(path: &Path) -> Result<PlanarGraph> {
    read_graph(path).with_context(|| format!("reading graph {}", path.display()))
}

fn load_density(path: &Path) -> Result<DensityField> {
    read_dgrid(path).with_context(|| format!("reading density {}", path.display()))
}

fn load_points(path: &Path) -> Result<Vec<Point>> {
    let text = io::read_text(path)?;
    let (points, warning) = parse_points_csv(&text).with_context(|| format!("reading points {}", path.display()))?;
    if let Some(w) = warning {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(points)
}

fn delta_range_json(params: &NoiseParams) -> String {
    let (lo, hi) = params.delta_range();
    serde_json::json!({ "low": lo, "high": hi, "midpoint": (lo + hi) / 2.0 }).to_string()
}

fn check_delta(params: &NoiseParams, delta: f64) -> Result<()> {
    let (lo, hi) = params.delta_range();
    ensure!(
        params.admits_delta(delta),
        "delta = {delta} is outside the admissible interval ({lo}, {hi}) for beta1 = {}, beta2 = {}, nu = {}",
        params.beta1,
        params.beta2,
        params.nu
    );
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<Outcome> {
    let params = a.noise.params()?;
    if a.print_delta_range {
        println!("{}", delta_range_json(&params));
    }
    if let Some(out) = &a.out {
        let graph = load_graph(&a.graph)?;
        let field = synth_density(&graph, &params, &a.grid.grid()?, a.seed)?;
        write_dgrid(out, &field)?;
    }
    Ok(Outcome::Success)
}

pub fn cmd_hist(a: &HistArgs) -> Result<Outcome> {
    let points = load_points(&a.points)?;
    let (field, clamped) = histogram_density(&points, &a.grid.grid()?);
    if clamped > 0 {
        eprintln!("warning: {clamped} points fell outside the grid and were clamped to its border");
    }
    write_dgrid(&a.out, &field)?;
    Ok(Outcome::Success)
}

pub fn cmd_kde(a: &KdeArgs) -> Result<Outcome> {
    let points = load_points(&a.points)?;
    let field = kde_density(&points, &a.grid.grid()?, a.bandwidth)?;
    write_dgrid(&a.out, &field)?;
    Ok(Outcome::Success)
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<Outcome> {
    ensure!(a.delta.is_finite() && a.delta > 0.0, "delta must be positive, got {}", a.delta);
    if let (Some(beta1), Some(beta2), Some(nu)) = (a.beta1, a.beta2, a.nu) {
        // omega plays no part in the cut-off interval
        check_delta(&NoiseParams::new(1.0, beta1, beta2, nu)?, a.delta)?;
    }
    let density = load_density(&a.density)?;
    let r = reconstruct(&density, a.delta)?;
    if r.graph.is_empty() {
        eprintln!("warning: no edge has persistence >= {}; the reconstruction is empty", a.delta);
    }
    write_text(&a.out, &recon_to_json(&r.graph))?;
    if let Some(path) = &a.diagram {
        write_text(path, &r.diagram.to_csv())?;
    }
    Ok(Outcome::Success)
}

fn report_json(report: &TheoremReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn summarize(report: &TheoremReport) -> Outcome {
    if report.pass {
        eprintln!("PASS: b1 = {}, hausdorff = {} < omega = {}", report.b1_recon, report.hausdorff, report.omega);
        return Outcome::Success;
    }
    if report.b0_recon != 1 {
        eprintln!("FAIL: reconstruction has {} components", report.b0_recon);
    }
    if report.b1_recon != report.b1_truth {
        eprintln!("FAIL: first Betti number {} differs from the truth {}", report.b1_recon, report.b1_truth);
    }
    if !(report.hausdorff < report.omega) {
        eprintln!("FAIL: Hausdorff violation, distance {} >= omega = {}", report.hausdorff, report.omega);
    }
    Outcome::VerificationFailed
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let truth = load_graph(&a.graph)?;
    let recon = read_recon(&a.recon).with_context(|| format!("reading reconstruction {}", a.recon.display()))?;
    let resolution = a.resolution.unwrap_or(a.spacing / 4.0);
    let report = check_theorem(&truth, &recon, a.omega, resolution)?;
    match &a.out {
        Some(path) => write_text(path, &report_json(&report))?,
        None => print!("{}", report_json(&report)),
    }
    Ok(summarize(&report))
}

pub fn cmd_render(a: &RenderArgs) -> Result<Outcome> {
    if a.density.is_none() && a.graph.is_none() && a.recon.is_none() {
        bail!("render needs at least one of --density, --graph, --recon");
    }
    let density = a.density.as_deref().map(load_density).transpose()?;
    let truth = a.graph.as_deref().map(load_graph).transpose()?;
    let recon = a
        .recon
        .as_deref()
        .map(|p| read_recon(p).with_context(|| format!("reading reconstruction {}", p.display())))
        .transpose()?;
    let svg = render_svg(density.as_ref(), truth.as_ref(), recon.as_ref());
    write_text(&a.out, &svg)?;
    Ok(Outcome::Success)
}

pub fn cmd_pipeline(a: &PipelineArgs) -> Result<Outcome> {
    let params = a.noise.params()?;
    let delta = match a.delta {
        Some(d) => {
            check_delta(&params, d)?;
            d
        }
        None => {
            let (lo, hi) = params.delta_range();
            (lo + hi) / 2.0
        }
    };
    let grid = a.grid.grid()?;
    let truth = load_graph(&a.graph)?;
    let density = synth_density(&truth, &params, &grid, a.seed)?;
    let r = reconstruct(&density, delta)?;
    let resolution = a.resolution.unwrap_or(grid.spacing / 4.0);
    let report = check_theorem(&truth, &r.graph, params.omega, resolution)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_dgrid(&a.out.join("density.dgrid"), &density)?;
    write_text(&a.out.join("diagram.csv"), &r.diagram.to_csv())?;
    write_text(&a.out.join("recon.json"), &recon_to_json(&r.graph))?;
    write_text(&a.out.join("report.json"), &report_json(&report))?;
    Ok(summarize(&report))
}
