use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmark_cli::eval::{self, Form, Method};
use qmark_cli::json::render;
use qmark_cli::suites::{run_all, run_suite};
use qmark_cli::{plot, sporadic, CliError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "qmark", version, about = "q-question-mark functions, period functions and mean-modular forms")]
struct Cli {
    /// Target tolerance, in (0, 1e-2].
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Calkin-Wilf series depth (at most 30).
    #[arg(long, global = true, default_value_t = 24)]
    depth: u32,
    /// Riemann-Stieltjes cells (a power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    cells: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for sampled test points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve data of a q-question-mark function on [0, 1].
    Plot {
        /// "finite:2/3,1/3" or "kappa:0.5".
        qspec: String,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Run one verification suite, or all of them.
    Verify {
        #[arg(required_unless_present = "all")]
        suite: Option<String>,
        #[arg(long, conflicts_with = "suite")]
        all: bool,
    },
    /// Theta-constant pipeline for a catalog orbit or a seed characteristic "a,b".
    Sporadic {
        #[arg(required_unless_present = "search")]
        orbit: Option<String>,
        /// Weight k (basis functions are theta^(2k)).
        #[arg(long)]
        weight: Option<u32>,
        /// Use pairwise products of theta^(k) as well.
        #[arg(long)]
        pairs: bool,
        /// Search every catalog basis for a root near this kappa.
        #[arg(long, conflicts_with = "orbit")]
        search: Option<String>,
    },
    /// Evaluate G(kappa, z).
    Geval {
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
    },
    /// Evaluate a theta constant with characteristics.
    Theta {
        /// "a,b" or "a,b,k".
        #[arg(long = "char", allow_hyphen_values = true)]
        ch: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        derivative: bool,
    },
    /// Mean-modular form tools.
    Mmf {
        #[command(subcommand)]
        action: MmfAction,
    },
}

#[derive(Subcommand)]
enum MmfAction {
    /// Extract the coordinates A_0..A_upto at z.
    Coords {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1)]
        upto: usize,
        #[arg(long, value_enum, default_value_t = Form::G)]
        form: Form,
    },
    /// Residual of the three-term equation at (kappa, z).
    Lyg {
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = Form::G)]
        form: Form,
    },
}

/// Output text and whether the run met its tolerances.
fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let default_format = match cli.command {
        Command::Plot { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);
    let cfg = RunConfig::new(cli.tol, cli.depth, cli.cells, format, cli.seed)?;
    Ok(match &cli.command {
        Command::Plot { qspec, grid } => (plot::render(&plot::plot_rows(qspec, *grid, &cfg)?, format), true),
        Command::Verify { suite, all } => {
            if *all {
                let report = run_all(&cfg);
                (render(&report), report.pass)
            } else {
                let report = run_suite(suite.as_deref().unwrap_or_default(), &cfg)?;
                (render(&report), report.pass)
            }
        }
        Command::Sporadic {
            orbit,
            weight,
            pairs,
            search,
        } => match (orbit, search) {
            (_, Some(target)) => (render(&sporadic::search(target, &cfg)?), true),
            (Some(orbit), None) => {
                let report = sporadic::sporadic(orbit, *weight, *pairs, &cfg)?;
                let ok = report.lyg_residuals.iter().all(|l| l.residual < qmark_cli::suites::KERNEL_LYG_TOL);
                (render(&report), ok)
            }
            (None, None) => return Err(CliError::Usage("give an orbit or --search".into())),
        },
        Command::Geval { kappa, z, method } => {
            let report = eval::geval(kappa, z, *method, &cfg)?;
            let ok = report.agree.unwrap_or(true);
            (eval::render_geval(&report, format), ok)
        }
        Command::Theta { ch, z, derivative } => (render(&eval::theta_value(ch, z, *derivative, &cfg)?), true),
        Command::Mmf { action } => match action {
            MmfAction::Coords { z, upto, form } => (render(&eval::mmf_coords(*form, z, *upto, &cfg)?), true),
            MmfAction::Lyg { kappa, z, form } => {
                let report = eval::mmf_lyg(*form, kappa, z, &cfg)?;
                (render(&report), report.pass)
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, ok)| {
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qmark: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
