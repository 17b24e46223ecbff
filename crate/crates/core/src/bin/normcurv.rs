use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use normcurv::certifier::Condition;
use normcurv::cli::{
    budget, cmd_certify, cmd_check_design, cmd_eval_measure, cmd_min_s, cmd_sample, cmd_spectral, cmd_verify_paper,
    parse_factors, parse_target, CertifyOptions, MapSpec, MinSOptions, SampleOptions, VerifyOptions,
};
use normcurv::optimizer::SearchConfig;
use normcurv::report::Format;

#[derive(Parser)]
#[command(name = "normcurv", version, about = "Normal curvature of tensor-Veronese immersions")]
struct Cli {
    /// Random seed (each command has its own default).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Include wall time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Sns1,
    Veronese,
    Tensor,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Sec,
    Pic2,
    Angle,
    Offdiag,
    Biricci,
    RicEigen,
}

#[derive(clap::Args)]
struct MapArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    /// Measure file for `--map tensor`.
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Degree for `--map veronese`.
    #[arg(long, default_value_t = 2)]
    l: u32,
    /// First radius for `--map sns1` (default: the curvature-optimal one).
    #[arg(long)]
    r1: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenspace dimension and the constants rho, lambda of phi_{n,l}.
    Spectral {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
    },
    /// Validate a measure file and certify its exact s*.
    EvalMeasure { file: PathBuf },
    /// Search for a measure with small s*.
    MinS {
        #[arg(long)]
        factors: String,
        #[arg(long, default_value_t = 2)]
        lmax: u32,
        #[arg(long, default_value_t = 4)]
        max_support: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        budget_secs: Option<f64>,
        #[arg(long)]
        warm_start: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Write the best measure to this file.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Fail unless s* <= this value (rational or decimal).
        #[arg(long)]
        target: Option<String>,
    },
    /// Sample |A(u,u)| of an explicit map.
    Sample {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Check a curvature condition over sampled points and frames.
    Certify {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum)]
        condition: ConditionArg,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        frames_per_point: usize,
    },
    /// Check the moment identities of a weighted design and fold it to a torus measure.
    CheckDesign { file: PathBuf },
    /// Reproduce every bundled measure and design exactly.
    VerifyPaper {
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        numeric_only: bool,
    },
}

fn map_spec(m: MapArgs) -> Result<MapSpec, String> {
    Ok(match m.map {
        MapArg::Sns1 => MapSpec::Sns1 { n: m.n, r1: m.r1 },
        MapArg::Veronese => MapSpec::Veronese { n: m.n, l: m.l },
        MapArg::Tensor => MapSpec::Tensor {
            measure: m.measure.ok_or("--map tensor needs --measure")?,
        },
    })
}

fn condition(c: ConditionArg) -> Condition {
    match c {
        ConditionArg::Sec => Condition::Sec,
        ConditionArg::Pic2 => Condition::Pic2,
        ConditionArg::Angle => Condition::Angle,
        ConditionArg::Offdiag => Condition::Offdiag,
        ConditionArg::Biricci => Condition::Biricci,
        ConditionArg::RicEigen => Condition::RicEigen,
    }
}

fn run(cli: Cli) -> Result<normcurv::report::RunReport, String> {
    let seed = cli.seed;
    let report = match cli.command {
        Command::Spectral { n, l } => cmd_spectral(n, l),
        Command::EvalMeasure { file } => cmd_eval_measure(&file),
        Command::MinS {
            factors,
            lmax,
            max_support,
            restarts,
            budget_secs,
            warm_start,
            cache,
            save,
            target,
        } => {
            let mut opts = MinSOptions::new(parse_factors(&factors).map_err(|e| e.to_string())?);
            opts.config = SearchConfig {
                l_max: lmax,
                max_support,
                restarts,
                budget: budget(budget_secs),
                seed: seed.unwrap_or(SearchConfig::default().seed),
                ..SearchConfig::default()
            };
            opts.warm_start = warm_start;
            opts.cache = cache;
            opts.save = save;
            opts.target = target
                .map(|t| parse_target(&t))
                .transpose()
                .map_err(|e| e.to_string())?;
            cmd_min_s(&opts)
        }
        Command::Sample { map, samples } => cmd_sample(&SampleOptions {
            map: map_spec(map)?,
            samples,
            seed: seed.unwrap_or(0),
        }),
        Command::Certify {
            map,
            condition: cond,
            c,
            samples,
            frames_per_point,
        } => cmd_certify(&CertifyOptions {
            map: map_spec(map)?,
            condition: condition(cond),
            c,
            samples,
            frames_per_point,
            seed: seed.unwrap_or(0),
        }),
        Command::CheckDesign { file } => cmd_check_design(&file),
        Command::VerifyPaper { fixtures, numeric_only } => cmd_verify_paper(&VerifyOptions { fixtures, numeric_only }),
    };
    report.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (out, timing) = (cli.out.clone(), cli.timing);
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    };
    let mut report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if timing {
        report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    }
    let text = report.render(format);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for f in report.failures() {
        eprintln!("FAIL {}: {}", f.name, f.detail);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
