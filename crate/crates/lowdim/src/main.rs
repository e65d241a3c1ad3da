use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lowdim::config::ExperimentConfig;
use lowdim::core::approx::{
    build_approximator, builtin_target, complexity_slope, rate_sweep, ApproximatorSpec,
    BuildOptions, Exponential, HolderTarget, SinSum, SquareScheme,
};
use lowdim::core::estimators::{lpca_dim, ml_dim, DEFAULT_K, DEFAULT_VARIANCE_THRESHOLD};
use lowdim::core::geometry::{generate_support, minkowski_dim, SupportKind, DEFAULT_KOCH_LEVEL};
use lowdim::core::regression::fit_rate;
use lowdim::io::{self, fmt_f64};
use lowdim::runner;

#[derive(Parser)]
#[command(
    name = "lowdim",
    version,
    about = "ReLU approximation on low-dimensional supports"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build approximating networks.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Intrinsic dimension estimation.
    #[command(subcommand)]
    Dim(DimCmd),
    /// Sample supports.
    #[command(subcommand)]
    Support(SupportCmd),
    /// Regression experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
    /// Evaluate or inspect a stored network.
    #[command(subcommand)]
    Net(NetCmd),
}

#[derive(Subcommand)]
enum ApproxCmd {
    /// Build one approximator at accuracy ε.
    Build {
        #[command(flatten)]
        common: ApproxArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build at several ε and fit ln W against ln(1/ε).
    RateSweep {
        #[command(flatten)]
        common: ApproxArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetKind {
    /// sin(x₁ + … + x_D)
    Sin,
    /// exp(−(x₁ + … + x_D))
    Exp,
    Sim61,
    Sim62,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Flat,
    Composed,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long, value_enum, default_value = "sin")]
    target: TargetKind,
    /// Smoothness β; defaults to the builtin value for sim61/sim62.
    #[arg(long)]
    beta: Option<f64>,
    /// Hölder radius M; defaults to the builtin value for sim61/sim62.
    #[arg(long = "M")]
    bound: Option<f64>,
    /// Points CSV on which the sup error is certified.
    #[arg(long)]
    support: PathBuf,
    /// Recorded intrinsic dimension bound d (defaults to D).
    #[arg(long)]
    d_bound: Option<f64>,
    #[arg(long, value_enum, default_value = "flat")]
    scheme: Scheme,
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMethod {
    Boxcount,
    Lpca,
    Ml,
}

#[derive(Subcommand)]
enum DimCmd {
    /// Print a dimension estimate as CSV.
    Estimate {
        #[arg(long, value_enum)]
        method: DimMethod,
        /// Decreasing box sizes (boxcount).
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Explained-variance threshold (lpca).
        #[arg(long, default_value_t = DEFAULT_VARIANCE_THRESHOLD)]
        threshold: f64,
        /// Points CSV or IDX file (`.idx`, `*-ubyte`).
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportName {
    Sphere,
    Koch,
    LpBallUnion,
    Cube,
}

#[derive(Subcommand)]
enum SupportCmd {
    Generate {
        #[arg(long, value_enum)]
        kind: SupportName,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Intrinsic dimension (sphere, lp-ball-union).
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Ambient dimension (sphere, lp-ball-union, cube).
        #[arg(long = "D", default_value_t = 2)]
        dim: usize,
        /// Koch refinement level.
        #[arg(long, default_value_t = DEFAULT_KOCH_LEVEL)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Run an experiment config (TOML or JSON).
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the config's plot directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Fit ln(mean error) against ln n per (method, d) of a results CSV.
    FitRate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum NetCmd {
    /// Evaluate a network on every point of a CSV.
    Eval {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output CSV (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the shape and complexity of a network.
    Inspect {
        #[arg(long)]
        net: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command, cli.quiet) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, quiet: bool) -> anyhow::Result<()> {
    match command {
        Command::Approx(cmd) => approx(cmd),
        Command::Dim(DimCmd::Estimate {
            method,
            scales,
            k,
            threshold,
            input,
        }) => dim_estimate(method, &scales, k, threshold, &input),
        Command::Support(SupportCmd::Generate {
            kind,
            n,
            seed,
            d,
            dim,
            level,
            out,
        }) => {
            let kind = match kind {
                SupportName::Sphere => SupportKind::Sphere { d, dim },
                SupportName::Koch => SupportKind::Koch { level },
                SupportName::LpBallUnion => SupportKind::LpBallUnion { d, dim },
                SupportName::Cube => SupportKind::Cube { dim },
            };
            let cloud = generate_support(kind, n, seed)?;
            io::write_points_csv(&out, &cloud)?;
            println!(
                "wrote {} points in dimension {} to {}",
                cloud.len(),
                cloud.dim(),
                out.display()
            );
            Ok(())
        }
        Command::Exp(ExpCmd::Run {
            config,
            output,
            plot_dir,
        }) => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            if plot_dir.is_some() {
                cfg.plot_dir = plot_dir;
            }
            let results = runner::run_experiment(&cfg, !quiet)?;
            let files = runner::write_outputs(&cfg, &results)?;
            let failed = results.rows.iter().filter(|r| !r.is_ok()).count();
            for r in results.rows.iter().filter(|r| !r.is_ok()) {
                eprintln!("warning: {} d={} n={}: {}", r.method, r.d, r.n, r.status);
            }
            println!(
                "wrote {} cells ({failed} failed) to {}",
                results.rows.len(),
                files.results.display()
            );
            Ok(())
        }
        Command::Exp(ExpCmd::FitRate { input }) => fit_rates(&input),
        Command::Net(NetCmd::Eval { net, input, out }) => {
            let net = io::read_network(&net)?;
            let points = io::read_points(&input)?;
            if points.dim() != net.input_dim() {
                bail!(
                    "network expects dimension {}, points have {}",
                    net.input_dim(),
                    points.dim()
                );
            }
            let outputs = net.evaluate_batch(points.as_slice())?;
            let width = net.output_dim();
            let header: Vec<String> = (1..=width).map(|i| format!("y{i}")).collect();
            let sink: Box<dyn std::io::Write> = match &out {
                Some(p) => {
                    Box::new(std::fs::File::create(p).with_context(|| p.display().to_string())?)
                }
                None => Box::new(std::io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&header)?;
            for row in outputs.chunks(width) {
                w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
            }
            w.flush()?;
            if let Some(p) = out {
                println!("evaluated {} points, wrote {}", points.len(), p.display());
            }
            Ok(())
        }
        Command::Net(NetCmd::Inspect { net }) => {
            let net = io::read_network(&net)?;
            let c = net.complexity();
            let widths: Vec<String> = net
                .layers()
                .iter()
                .map(|l| l.out_dim().to_string())
                .collect();
            println!(
                "input_dim={} widths={} W={} L={} B={}",
                net.input_dim(),
                widths.join(","),
                c.param_count,
                c.depth,
                fmt_f64(c.max_weight)
            );
            Ok(())
        }
    }
}

fn approx_target(args: &ApproxArgs, dim: usize) -> anyhow::Result<HolderTarget> {
    let builtin = |tag: &str| -> anyhow::Result<HolderTarget> { Ok(builtin_target(tag, dim)?) };
    let base = match args.target {
        TargetKind::Sim61 => builtin("sim61")?,
        TargetKind::Sim62 => builtin("sim62")?,
        TargetKind::Sin | TargetKind::Exp => {
            let (Some(beta), Some(m)) = (args.beta, args.bound) else {
                bail!("--beta and --M are required for analytic targets");
            };
            let f: Arc<dyn lowdim::core::approx::SmoothFunction> = match args.target {
                TargetKind::Sin => Arc::new(SinSum {
                    dim,
                    amplitude: 1.0,
                    frequency: 1.0,
                }),
                _ => Arc::new(Exponential {
                    dim,
                    amplitude: 1.0,
                    rate: -1.0,
                }),
            };
            return Ok(HolderTarget::new(f, beta, m)?);
        }
    };
    let beta = args.beta.unwrap_or(base.beta());
    let m = args.bound.unwrap_or(base.bound());
    Ok(HolderTarget::new(base.function().clone(), beta, m)?)
}

fn build_options(args: &ApproxArgs) -> BuildOptions {
    BuildOptions {
        scheme: match args.scheme {
            Scheme::Flat => SquareScheme::Flat,
            Scheme::Composed => SquareScheme::Composed,
        },
        ..BuildOptions::default()
    }
}

fn write_report(path: &Path, specs: &[ApproximatorSpec]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| path.display().to_string())?;
    w.write_record(["epsilon", "W", "L", "B", "empirical_sup_error"])?;
    for s in specs {
        let c = s.complexity;
        w.write_record([
            fmt_f64(s.epsilon),
            c.param_count.to_string(),
            c.depth.to_string(),
            fmt_f64(c.max_weight),
            fmt_f64(s.empirical_sup_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn approx(cmd: ApproxCmd) -> anyhow::Result<()> {
    match cmd {
        ApproxCmd::Build {
            common,
            epsilon,
            out,
            report,
        } => {
            let support = io::read_points(&common.support)?;
            let target = approx_target(&common, support.dim())?;
            let d = common.d_bound.unwrap_or(support.dim() as f64);
            let (net, spec) =
                build_approximator(&target, &support, d, epsilon, &build_options(&common))?;
            io::write_network(&out, &net)?;
            if let Some(r) = &report {
                write_report(r, std::slice::from_ref(&spec))?;
            }
            let c = spec.complexity;
            println!(
                "epsilon={} W={} L={} B={} sup_error={} cubes={} -> {}",
                fmt_f64(epsilon),
                c.param_count,
                c.depth,
                fmt_f64(c.max_weight),
                fmt_f64(spec.empirical_sup_error),
                spec.cubes,
                out.display()
            );
            Ok(())
        }
        ApproxCmd::RateSweep {
            common,
            epsilons,
            report,
        } => {
            let support = io::read_points(&common.support)?;
            let target = approx_target(&common, support.dim())?;
            let d = common.d_bound.unwrap_or(support.dim() as f64);
            let specs = rate_sweep(&target, &support, d, &epsilons, &build_options(&common))?;
            write_report(&report, &specs)?;
            match complexity_slope(&specs) {
                Some(fit) => println!(
                    "{} builds, slope of ln W on ln(1/epsilon) = {:.4} -> {}",
                    specs.len(),
                    fit.slope,
                    report.display()
                ),
                None => println!("{} builds -> {}", specs.len(), report.display()),
            }
            Ok(())
        }
    }
}

fn dim_estimate(
    method: DimMethod,
    scales: &[f64],
    k: usize,
    threshold: f64,
    input: &Path,
) -> anyhow::Result<()> {
    let points = io::read_points(input)?;
    let mut out = std::io::stdout().lock();
    match method {
        DimMethod::Boxcount => {
            if scales.is_empty() {
                bail!("boxcount needs --scales");
            }
            let est = minkowski_dim(&points, scales)?;
            writeln!(out, "method,estimate,gamma,count,low_confidence")?;
            for &(g, n) in &est.scales {
                writeln!(
                    out,
                    "boxcount,{},{},{n},{}",
                    fmt_f64(est.value),
                    fmt_f64(g),
                    est.low_confidence
                )?;
            }
        }
        DimMethod::Lpca => {
            let d = lpca_dim(&points, k, threshold)?;
            writeln!(out, "method,estimate,k,threshold")?;
            writeln!(out, "lpca,{d},{k},{}", fmt_f64(threshold))?;
        }
        DimMethod::Ml => {
            let est = ml_dim(&points, k)?;
            writeln!(
                out,
                "method,estimate,k,used_points,excluded_pairs,skipped_points"
            )?;
            writeln!(
                out,
                "ml,{},{k},{},{},{}",
                fmt_f64(est.value),
                est.used_points,
                est.excluded_pairs,
                est.skipped_points
            )?;
            if est.has_warnings() {
                eprintln!(
                    "warning: {} zero-distance pairs excluded, {} points skipped",
                    est.excluded_pairs, est.skipped_points
                );
            }
        }
    }
    Ok(())
}

fn fit_rates(input: &Path) -> anyhow::Result<()> {
    let rows = io::read_results_csv(input)?;
    let mut groups: Vec<((String, usize, usize), Vec<(f64, f64)>)> = Vec::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        let key = (r.method.clone(), r.ambient_dim, r.d);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push((r.n as f64, r.mean_error)),
            None => groups.push((key, vec![(r.n as f64, r.mean_error)])),
        }
    }
    if groups.is_empty() {
        bail!("{} has no successful cells", input.display());
    }
    println!("method,D,d,slope,intercept,r_squared,points");
    for ((method, dim, d), pts) in groups {
        match fit_rate(&pts) {
            Ok(r) => println!(
                "{method},{dim},{d},{},{},{},{}",
                fmt_f64(r.fit.slope),
                fmt_f64(r.fit.intercept),
                fmt_f64(r.fit.r_squared),
                r.fit.points.len()
            ),
            Err(e) => eprintln!("warning: {method} D={dim} d={d}: {e}"),
        }
    }
    Ok(())
}
