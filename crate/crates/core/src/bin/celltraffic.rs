use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use celltraffic::geometry::{sample_pcp, sample_ppp, Metric, PcpParams, Window};
use celltraffic::harness::{
    compare, run_analytic_sweep, run_simulation_sweep, ExperimentConfig, Figure, SweepTable,
    TolerancePolicy, OUTPUT_DIR_ENV,
};
use celltraffic::Result;

#[derive(Parser)]
#[command(name = "celltraffic", version, about = "Traffic, delay and stability in random cellular networks")]
struct Cli {
    /// Directory for generated files.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point pattern and write it as CSV.
    Gen(GenArgs),
    /// Evaluate the closed forms over a config grid.
    Analyze(SweepArgs),
    /// Run the Monte Carlo counterpart of a config grid.
    Simulate(SweepArgs),
    /// Compare an analytic and a simulated CSV.
    Compare(CompareArgs),
    /// Write the data behind one of the canned figure configs.
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Process {
    Ppp,
    Pcp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    Toroidal,
    Truncated,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "ppp")]
    process: Process,
    /// PPP intensity, per m².
    #[arg(long, default_value_t = 1e-4)]
    intensity: f64,
    #[arg(long)]
    lambda_p: Option<f64>,
    #[arg(long)]
    lambda_c: Option<f64>,
    #[arg(long)]
    r_c: Option<f64>,
    #[arg(long, default_value_t = 1000.0)]
    width: f64,
    #[arg(long, default_value_t = 1000.0)]
    height: f64,
    #[arg(long, value_enum, default_value = "toroidal")]
    boundary: Boundary,
    #[arg(long)]
    seed: u64,
    /// Output file; defaults to `<out-dir>/points.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file.
    config: PathBuf,
    #[arg(long)]
    lambda_b: Option<String>,
    #[arg(long)]
    lambda_u: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// SIR threshold in dB, stored linear.
    #[arg(long)]
    theta_db: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Any other config key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file; defaults to `<out-dir>/<name>_<analytic|simulated>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    analytic: PathBuf,
    simulated: PathBuf,
    /// For example `*=0.02,busy_prob=0.1:info`.
    #[arg(long, default_value = "0.02")]
    tolerance: String,
    /// Report file; defaults to `<out-dir>/comparison.csv`.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_figure(s: &str) -> std::result::Result<Figure, String> {
    s.parse().map_err(|e: celltraffic::Error| e.to_string())
}

fn load(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if args.theta.is_some() && args.theta_db.is_some() {
        return Err(celltraffic::Error::Parse("give --theta or --theta-db, not both".into()));
    }
    let named = [
        ("lambda_b", &args.lambda_b),
        ("lambda_u", &args.lambda_u),
        ("theta", &args.theta),
        ("theta_db", &args.theta_db),
        ("alpha", &args.alpha),
        ("seed", &args.seed),
    ];
    for (key, value) in named {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| celltraffic::Error::Parse(format!("--set `{kv}`: expected key=value")))?;
        config.set(k.trim(), v.trim())?;
    }
    Ok(config)
}

fn write_table(table: &SweepTable, path: &Path) -> Result<()> {
    table.write(path)?;
    println!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => {
            let metric = match a.boundary {
                Boundary::Toroidal => Metric::Toroidal,
                Boundary::Truncated => Metric::EuclideanTruncated,
            };
            let window = Window::new(a.width, a.height, metric)?;
            let pattern = match a.process {
                Process::Ppp => sample_ppp(a.intensity, &window, a.seed)?,
                Process::Pcp => {
                    let missing = || celltraffic::Error::Parse("pcp needs --lambda-p, --lambda-c and --r-c".into());
                    let params = PcpParams::new(
                        a.lambda_p.ok_or_else(missing)?,
                        a.lambda_c.ok_or_else(missing)?,
                        a.r_c.ok_or_else(missing)?,
                    )?;
                    sample_pcp(&params, &window, a.seed)?
                }
            };
            let path = a.out.unwrap_or_else(|| cli.out_dir.join("points.csv"));
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            pattern.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            println!("wrote {} points to {}", pattern.len(), path.display());
        }
        Command::Analyze(a) => {
            let config = load(&a)?;
            let dir = config.output_dir_or(&cli.out_dir);
            let path = a.out.clone().unwrap_or_else(|| dir.join(format!("{}_analytic.csv", config.name)));
            write_table(&run_analytic_sweep(&config)?, &path)?;
        }
        Command::Simulate(a) => {
            let config = load(&a)?;
            let dir = config.output_dir_or(&cli.out_dir);
            let path = a.out.clone().unwrap_or_else(|| dir.join(format!("{}_simulated.csv", config.name)));
            write_table(&run_simulation_sweep(&config)?, &path)?;
        }
        Command::Compare(a) => {
            let policy: TolerancePolicy = a.tolerance.parse()?;
            let report = compare(&SweepTable::read(&a.analytic)?, &SweepTable::read(&a.simulated)?, &policy)?;
            let path = a.report.unwrap_or_else(|| cli.out_dir.join("comparison.csv"));
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, report.to_csv())?;
            print!("{}", report.summary());
            println!("report written to {}", path.display());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Reproduce { figure } => {
            for config in figure.configs()? {
                let path = cli.out_dir.join(format!("{}.csv", config.name));
                write_table(&run_analytic_sweep(&config)?, &path)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(2)
        }
    }
}
