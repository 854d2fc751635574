use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crfve::harness::{
    mesh_info, run_convergence_study, run_iteration_table, run_matrix_diagnostics, run_scaling_table,
    run_spectrum_dump, write_csv, write_spectrum, CsvRow, Diagnostics, ExperimentConfig,
};

/// Crouzeix–Raviart FVE/FE experiments with additive average Schwarz preconditioning.
#[derive(Parser)]
#[command(name = "crfve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh, partition and coefficient summary as `key,value` rows.
    MeshInfo(Io),
    /// Nonsymmetry of A^FVE per alpha1, or ||A^FE - A^FVE|| per h when sweep.n is set.
    Diagnostics(Io),
    /// GMRES iteration counts over the alpha1 sweep.
    Iterations(Io),
    /// Iterations and c_p over the (h, H) grid.
    Scaling(Io),
    /// Discretization error and observed order over sweep.n.
    Convergence(Io),
    /// Dense spectra of A^FVE and the preconditioned operator.
    Spectrum(Io),
}

#[derive(Args)]
struct Io {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; defaults to `output.path` of the config, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: at least one solve did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Returns whether every solve converged.
fn run(cli: Cli) -> AnyResult<bool> {
    let (Command::MeshInfo(io)
    | Command::Diagnostics(io)
    | Command::Iterations(io)
    | Command::Scaling(io)
    | Command::Convergence(io)
    | Command::Spectrum(io)) = &cli.command;
    let cfg = ExperimentConfig::from_path(&io.config)?;
    let out = io.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));

    match &cli.command {
        Command::MeshInfo(_) => {
            let mut w = sink(out.as_deref())?;
            writeln!(w, "key,value")?;
            for (k, v) in mesh_info(&cfg)? {
                writeln!(w, "{k},{v}")?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Diagnostics(_) => match run_matrix_diagnostics(&cfg)? {
            Diagnostics::Alpha1(rows) => emit(&rows, out.as_deref()),
            Diagnostics::H(rows) => emit(&rows, out.as_deref()),
        },
        Command::Iterations(_) => {
            let rows = run_iteration_table(&cfg)?;
            if let Some(dir) = &cfg.output.histories {
                std::fs::create_dir_all(dir)?;
                for r in &rows {
                    let path = Path::new(dir).join(format!("history_alpha1_{:e}.csv", r.alpha1));
                    r.report.write_history_csv(BufWriter::new(File::create(path)?))?;
                }
            }
            emit(&rows, out.as_deref())
        }
        Command::Scaling(_) => emit(&run_scaling_table(&cfg)?, out.as_deref()),
        Command::Convergence(_) => emit(&run_convergence_study(&cfg)?, out.as_deref()),
        Command::Spectrum(_) => {
            let dump = run_spectrum_dump(&cfg)?;
            let out = out.ok_or("spectrum needs --out or output.path")?;
            let stem = out.with_extension("");
            let stem = stem.to_string_lossy();
            write_spectrum(&dump.fve, BufWriter::new(File::create(format!("{stem}_fve.csv"))?))?;
            write_spectrum(&dump.preconditioned, BufWriter::new(File::create(format!("{stem}_precond.csv"))?))?;
            Ok(true)
        }
    }
}

fn sink(out: Option<&Path>) -> AnyResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit<R: CsvRow>(rows: &[R], out: Option<&Path>) -> AnyResult<bool> {
    let mut w = sink(out)?;
    write_csv(rows, &mut w)?;
    w.flush()?;
    Ok(rows.iter().all(CsvRow::converged))
}
