use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use roughlap::constants::{
    a_n, c_lambda_root_detailed, omega, theorem_t3_bound, AbstractConstants, BoundOptions, DeltaBranch,
    GeometryBudget, SecondBranch,
};
use roughlap::eigen::{cluster_multiplicities, smallest_eigenpairs, SolverConfig};
use roughlap::mesh::ModelManifold;
use roughlap::operators::{build_connection, connection_laplacian_1forms, cotan_laplacian, hodge_laplacian_1forms};
use roughlap::verify::{run_spec, ExperimentSpec, Grid, Report, DEFAULT_SPEC};

#[derive(Parser)]
#[command(name = "roughlap", version, about = "Eigenvalue bounds for the rough Laplacian on 1-forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print ω_n, a_n and C(Λ) as CSV.
    Constants {
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6, 7, 8])]
        n: Vec<usize>,
        /// Comma-separated Λ values, or `start:end:count` for a log-spaced grid.
        #[arg(long, default_value = "0.01:10:50")]
        lambda_grid: String,
    },
    /// Evaluate the lower bound for √λ₁·D as JSON.
    Bound(BoundArgs),
    /// Smallest eigenvalues of a discrete Laplacian on a model mesh, as CSV.
    Spectrum(SpectrumArgs),
    /// Run a spec file and write report.json, outcomes.csv and quantities.csv.
    Verify {
        /// Spec file; the shipped default spec when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Re-render a JSON report.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
        format: ReportFormat,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long)]
    diameter: f64,
    #[arg(long, default_value_t = 0.0)]
    riem2p: f64,
    #[arg(long, default_value_t = 0.0)]
    ric_minus_p: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    c_n: f64,
    #[arg(long, default_value_t = 1.0)]
    c_np: f64,
    #[arg(long, default_value_t = 1.0)]
    c0_np: f64,
    #[arg(long, value_enum, default_value_t = Delta::Main)]
    delta_branch: Delta,
    /// Use `C̃ e^{-(2n-1)Λ}` as the second entry of the minimum.
    #[arg(long)]
    corollary: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    manifold: Surface,
    /// Icosphere subdivisions; for the torus the grid is `4·2^subdiv` cells a side.
    #[arg(long, default_value_t = 4)]
    subdiv: usize,
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Torus side lengths.
    #[arg(long, default_value_t = 2.0 * PI)]
    lx: f64,
    #[arg(long, default_value_t = 2.0 * PI)]
    ly: f64,
    #[arg(long, value_enum, default_value_t = Operator::Rough)]
    operator: Operator,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = SolverConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also write the assembled matrix in MatrixMarket format.
    #[arg(long)]
    export_matrix: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Delta {
    Main,
    Secondary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Surface {
    Sphere,
    Torus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    /// Connection Laplacian on tangent vectors (complex).
    Rough,
    /// DEC Hodge Laplacian on edge 1-forms.
    Hodge,
    /// Cotan Laplacian on functions.
    Function,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Markdown,
    Outcomes,
    Quantities,
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, end, count] => Grid::LogSpaced { start: start.parse()?, end: end.parse()?, count: count.parse()? },
        _ => Grid::Values(text.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>()?),
    };
    Ok(grid.points()?)
}

fn constants(n: &[usize], lambda_grid: &str) -> Result<()> {
    let grid = parse_grid(lambda_grid).context("bad --lambda-grid")?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "n,lambda,omega_n,a_n,c_lambda,lambda_c,residual")?;
    for &dim in n {
        let (w, a) = (omega(dim)?, a_n(dim)?);
        for &lambda in &grid {
            let r = c_lambda_root_detailed(dim, lambda)?;
            writeln!(out, "{dim},{lambda:e},{w:e},{a:e},{:e},{:e},{:e}", r.root, r.product(), r.residual)?;
        }
    }
    Ok(())
}

fn bound(args: &BoundArgs) -> Result<()> {
    let budget = GeometryBudget {
        dim: args.dim,
        kappa: args.kappa,
        diameter: args.diameter,
        riem_2p: args.riem2p,
        ric_minus_p: args.ric_minus_p,
        p_exponent: args.p,
    };
    let consts = AbstractConstants { c_n: args.c_n, c_np: args.c_np, c0_np: args.c0_np };
    let options = BoundOptions {
        delta_branch: match args.delta_branch {
            Delta::Main => DeltaBranch::Main,
            Delta::Secondary => DeltaBranch::Secondary,
        },
        second_branch: if args.corollary { SecondBranch::Corollary } else { SecondBranch::Theorem },
    };
    let b = theorem_t3_bound(&budget, &consts, options)?;
    println!("{}", serde_json::to_string_pretty(&b)?);
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let manifold = match args.manifold {
        Surface::Sphere => ModelManifold::IcoSphere { radius: args.radius, subdivisions: args.subdiv },
        Surface::Torus => {
            let cells = 4usize.checked_shl(args.subdiv as u32).filter(|&c| c <= 4096).context("--subdiv too large")?;
            ModelManifold::FlatTorus { lx: args.lx, ly: args.ly, nx: cells, ny: cells }
        }
    };
    let mesh = manifold.build_mesh()?;
    let (l, m) = match args.operator {
        Operator::Rough => connection_laplacian_1forms(&mesh, &build_connection(&mesh)?)?,
        Operator::Hodge => hodge_laplacian_1forms(&mesh)?,
        Operator::Function => cotan_laplacian(&mesh)?,
    };
    if let Some(path) = &args.export_matrix {
        l.write_matrix_market(path)?;
    }
    let config = SolverConfig { k: args.k, seed: args.seed, tol: args.tol, ..Default::default() };
    let r = smallest_eigenpairs(&l, &m, &config)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "index,eigenvalue,residual")?;
    for (i, (v, res)) in r.values.iter().zip(&r.residuals).enumerate() {
        writeln!(out, "{i},{v:e},{res:e}")?;
    }
    let clusters = cluster_multiplicities(&r.values, 0.02);
    eprintln!(
        "{} unknowns, {} iterations, clusters: {}",
        l.dim(),
        r.iterations,
        clusters.iter().map(|(v, c)| format!("{v:.6} x{c}")).collect::<Vec<_>>().join(", ")
    );
    Ok(())
}

fn verify(spec: Option<&Path>, out: &Path) -> Result<ExitCode> {
    let spec = match spec {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::from_json(DEFAULT_SPEC, "default.json")?,
    };
    let report = run_spec(&spec)?;
    report.write_all(out)?;
    print!("{}", report.to_markdown());
    Ok(if report.success() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn render(input: &Path, format: ReportFormat) -> Result<()> {
    let report = Report::load(input)?;
    let out = std::io::stdout().lock();
    match format {
        ReportFormat::Markdown => print!("{}", report.to_markdown()),
        ReportFormat::Outcomes => report.write_outcomes_csv(out)?,
        ReportFormat::Quantities => report.write_quantities_csv(out)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Constants { n, lambda_grid } => constants(&n, &lambda_grid)?,
        Command::Bound(args) => bound(&args)?,
        Command::Spectrum(args) => {
            if args.k == 0 {
                bail!("--k must be at least 1");
            }
            spectrum(&args)?
        }
        Command::Verify { spec, out } => return verify(spec.as_deref(), &out),
        Command::Report { input, format } => render(&input, format)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
