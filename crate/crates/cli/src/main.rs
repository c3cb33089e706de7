//! `rog` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rog_cli::commands::HULL_TOL;
use rog_cli::{hull_check, run, verify, CliError, CliResult, Command, ProblemFile, Report};

#[derive(Parser)]
#[command(
    name = "rog",
    version,
    about = "Decide and certify rank-one generated spectrahedral cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Seed for the randomized steps.
    #[arg(long, global = true, env = "ROG_SEED")]
    seed: Option<u64>,
    /// Tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here and print a one-line summary instead.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the ROG property and emit a certificate.
    Classify { input: PathBuf },
    /// Decompose the problem's `x` into feasible rank-one atoms.
    Decompose { input: PathBuf },
    /// Build a non-ROG witness bundle for a pair.
    Witness { input: PathBuf },
    /// List the lines of the variety of a pair.
    Variety { input: PathBuf },
    /// Round the problem's `x` to feasible QCQP points.
    Round { input: PathBuf },
    /// Test (y1, y2, t) against the perspective hull; takes a file or three numbers.
    #[command(allow_negative_numbers = true)]
    HullCheck {
        #[arg(num_args = 1..=3, required = true)]
        input: Vec<String>,
    },
    /// Re-run the residual checks of an emitted report.
    Verify { input: PathBuf },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, json: &str) -> CliResult<()> {
    std::fs::write(path, format!("{json}\n")).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn emit(json: &str, summary: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            write(path, json)?;
            println!("{summary}");
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn hull_point(input: &[String]) -> CliResult<([f64; 3], Option<f64>)> {
    if let [y1, y2, t] = input {
        let parse = |s: &String| s.parse::<f64>().map_err(|e| CliError::Parse(format!("{s}: {e}")));
        return Ok(([parse(y1)?, parse(y2)?, parse(t)?], None));
    }
    let [path] = input else {
        return Err(CliError::Parse(
            "hull-check takes a problem file or three numbers".into(),
        ));
    };
    let p = ProblemFile::parse(&read(Path::new(path))?)?;
    let point = p
        .point
        .ok_or_else(|| CliError::Input("problem file has no point".into()))?;
    Ok((point, p.tol))
}

fn execute(cli: Cli) -> CliResult<i32> {
    let out = cli.out.as_deref();
    let cmd = match cli.command {
        Cmd::HullCheck { input } => {
            let (point, file_tol) = hull_point(&input)?;
            let report = hull_check(point, cli.tol.or(file_tol).unwrap_or(HULL_TOL));
            // the verdict word is always printed, the report only on request
            println!("{}", report.summary());
            if let Some(path) = out {
                write(path, &report.to_json())?;
            }
            return Ok(report.exit_code());
        }
        Cmd::Verify { input } => {
            let report: Report = serde_json::from_str(&read(&input)?).map_err(|e| CliError::Parse(e.to_string()))?;
            let v = verify(&report)?;
            let json = serde_json::to_string_pretty(&v).expect("verification serializes");
            emit(&json, &format!("verified {}", v.of), out)?;
            return Ok(0);
        }
        Cmd::Classify { input } => (Command::Classify, input),
        Cmd::Decompose { input } => (Command::Decompose, input),
        Cmd::Witness { input } => (Command::Witness, input),
        Cmd::Variety { input } => (Command::Variety, input),
        Cmd::Round { input } => (Command::Round, input),
    };
    let problem = ProblemFile::parse(&read(&cmd.1)?)?;
    let seed = cli.seed.or(problem.seed).unwrap_or(0);
    let report = run(cmd.0, problem, seed, cli.tol)?;
    emit(
        &report.to_json(),
        &format!("{}: {}", report.kind(), report.summary()),
        out,
    )?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rog: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
