use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rkhsm::basis::PointOrdering;
use rkhsm_bench::{
    alpha_path, emit_surface, metadata, norms_path, parse_grid, parse_layout, parse_real, prepare, run_table,
    write_file, write_metadata, write_norms, write_surface, write_table, BenchError, Example, Format, Problem,
    RunConfig, ZetaGrid,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderingArg {
    TauMajor,
    ZetaMajor,
}

/// Error tables and surface data for the time-fractional Burgers-Huxley examples.
#[derive(Debug, Parser)]
#[command(name = "tfbh-bench", version)]
struct Cli {
    /// Built-in example (1 or 2).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), conflicts_with = "config", required_unless_present = "config")]
    example: Option<u8>,

    /// Problem file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Collocation points, origin included.
    #[arg(long, default_value_t = 6)]
    n: usize,

    /// Fractional orders; one output file per value.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "0.9")]
    alpha: Vec<f64>,

    /// Times to tabulate; fractions such as 1/6 are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "0.5")]
    tau: Vec<f64>,

    /// Zeta grid: a count of interior points or a comma list.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<ZetaGrid>,

    /// Interior collocation layout NZxNT (defaults to (n-1)x1).
    #[arg(long, value_parser = parse_layout)]
    layout: Option<(usize, usize)>,

    #[arg(long, value_enum, default_value_t = OrderingArg::TauMajor)]
    ordering: OrderingArg,

    /// Solver sweeps; 1 is the plain sequential scheme.
    #[arg(long, default_value_t = 1)]
    passes: usize,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Emit a density x density surface instead of tables.
    #[arg(long)]
    surface: Option<usize>,

    /// Print the metadata block only, without solving.
    #[arg(long)]
    seed_metadata: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tfbh-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let problem = match (cli.example, &cli.config) {
        (Some(1), _) => Problem::Builtin(Example::Ex1),
        (Some(_), _) => Problem::Builtin(Example::Ex2),
        (None, Some(path)) => Problem::Config(path.clone()),
        (None, None) => return Err(BenchError::Config("either --example or --config is required".into())),
    };
    if cli.passes == 0 {
        return Err(BenchError::Config("--passes must be at least 1".into()));
    }
    let taus = cli.tau;
    let multi = cli.alpha.len() > 1;
    for &alpha in &cli.alpha {
        let cfg = RunConfig {
            zeta_grid: cli.grid.clone(),
            layout: cli.layout,
            ordering: match cli.ordering {
                OrderingArg::TauMajor => PointOrdering::TauMajor,
                OrderingArg::ZetaMajor => PointOrdering::ZetaMajor,
            },
            passes: cli.passes,
            format: match cli.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Pretty => Format::Pretty,
            },
            ..RunConfig::new(problem.clone(), cli.n, alpha, taus.clone())
        };
        let out = match &cli.out {
            Some(p) if multi => Some(alpha_path(p, alpha)),
            other => other.clone(),
        };
        if cli.seed_metadata {
            let meta = metadata(&cfg, &prepare(&cfg)?);
            emit(out.as_ref(), |w| write_metadata(w, &meta))?;
        } else if let Some(density) = cli.surface {
            let (meta, rows) = emit_surface(&cfg, density)?;
            emit(out.as_ref(), |w| write_surface(w, &meta, &rows))?;
        } else {
            let table = run_table(&cfg)?;
            emit(out.as_ref(), |w| write_table(w, &table, cfg.format))?;
            if let Some(path) = &out {
                write_file(&norms_path(path), |w| write_norms(w, &table))?;
            }
        }
    }
    Ok(())
}

fn emit(out: Option<&PathBuf>, render: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<(), BenchError> {
    match out {
        Some(path) => write_file(path, render),
        None => {
            let mut buf = Vec::new();
            let stdout = PathBuf::from("<stdout>");
            render(&mut buf).map_err(|e| BenchError::Io {
                path: stdout.clone(),
                source: e,
            })?;
            io::stdout().write_all(&buf).map_err(|e| BenchError::Io {
                path: stdout,
                source: e,
            })
        }
    }
}
