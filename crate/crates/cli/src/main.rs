use std::fs::File;
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hquot_cli::commands::{
    curvature_table, geodesic_trace, orbit_trace, parse_point, parse_vector, verify_table, CommandError,
    GeodesicRequest, Table,
};
use hquot_cli::output::{Format, TableWriter};
use hquot_cli::range::Range;
use hquot_cli::suites::{run_all, Level};

/// Verification suites and data tables for the left quotient SO(n)\SO0(n,1).
#[derive(Parser)]
#[command(name = "hquot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suites; exit 0 iff every check passes.
    Verify {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=8))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form vs finite-difference sectional curvature on a grid.
    CurvatureTable {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=8))]
        n: u64,
        /// `a:b:steps`; used for n = 2.
        #[arg(long, default_value = "-5:5:101", allow_hyphen_values = true)]
        x: Range,
        #[arg(long, default_value = "0.1:10:100", allow_hyphen_values = true)]
        y: Range,
        /// Plane angle from the y-axis; used for n >= 3.
        #[arg(long, default_value = "0:1.5707963267948966:7", allow_hyphen_values = true)]
        theta: Range,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integrate a unit-speed geodesic and print its trace.
    Geodesic {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=8))]
        n: u64,
        /// `x1,...,y`; defaults to (0, 1).
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        /// Initial direction, rescaled to unit speed; defaults to the y-axis.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Integration time (arc length).
        #[arg(long = "t", default_value_t = std::f64::consts::LN_2)]
        t_total: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the r(K)-orbit of a point.
    Orbit {
        /// `x1,...,y`; the rank is the number of coordinates.
        #[arg(long, default_value = "0,2", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn paint(text: &str, pass: bool) -> String {
    let colour = std::env::var_os("NO_COLOR").is_none() && io::stderr().is_terminal();
    match (colour, pass) {
        (false, _) => text.to_string(),
        (true, true) => format!("\x1b[32m{text}\x1b[0m"),
        (true, false) => format!("\x1b[31m{text}\x1b[0m"),
    }
}

fn emit(table: &Table, output: &OutputArgs) -> io::Result<()> {
    let sink: Box<dyn Write> = if output.out == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(PathBuf::from(&output.out))?)
    };
    let mut w = TableWriter::new(BufWriter::new(sink), output.format, table.columns.clone())?;
    for row in &table.rows {
        w.row(row)?;
    }
    w.finish()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CommandError> {
    let write = |t: &Table, o: &OutputArgs| match emit(t, o) {
        // A closed downstream pipe (`| head`) is not an error.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| CommandError::Usage(format!("cannot write output: {e}"))),
    };
    match cli.command {
        Command::Verify { n, seed, level, output } => {
            let start = Instant::now();
            let reports = run_all(n as usize, seed, level).map_err(|e| CommandError::Usage(e.to_string()))?;
            for r in &reports {
                let status = if r.passed() { "pass" } else { "FAIL" };
                eprintln!("{} {:<20} {:>5} cases {:>8.3} s", paint(status, r.passed()), r.name, r.cases, r.wall.as_secs_f64());
                for c in r.checks.iter().filter(|c| !c.passed()) {
                    eprintln!("    {}: {:e} {} {:e}", c.invariant, c.value, c.bound.symbol(), c.tolerance);
                }
                for e in &r.errors {
                    eprintln!("    error: {e}");
                }
            }
            eprintln!("total {:.3} s", start.elapsed().as_secs_f64());
            write(&verify_table(&reports), &output)?;
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::CurvatureTable { n, x, y, theta, output } => {
            write(&curvature_table(n as usize, &x, &y, &theta)?, &output)?;
            Ok(0)
        }
        Command::Geodesic { n, start, direction, t_total, tol, samples, output } => {
            let req = GeodesicRequest {
                n: n as usize,
                start: start.as_deref().map(parse_point).transpose()?,
                direction: direction.as_deref().map(parse_vector).transpose()?,
                t_total,
                tol,
                samples,
            };
            let trace = geodesic_trace(&req)?;
            write(&trace.table, &output)?;
            eprintln!("speed drift {:e}", trace.speed_drift);
            match trace.failure {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    Ok(3)
                }
                None => Ok(0),
            }
        }
        Command::Orbit { point, samples, output } => {
            let p = parse_point(&point)?;
            write(&orbit_trace(&p, samples)?, &output)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
