//! Command-line front end: fixture verification, theta expansions, twist
//! tables, Brandt matrices, single central values, and calibration reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtwist::fixture;
use qtwist::lift::format_q_expansion;
use qtwist::quaternion::brandt_matrix;
use qtwist::{Error, Result};

#[derive(Parser)]
#[command(name = "qtwist", version, about = "Central values of quadratic twists via ternary theta lifts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the fixture's quaternionic data for internal consistency
    VerifyFixture { file: PathBuf },
    /// Print a family's calibrated eigenform as a q-expansion
    Theta {
        file: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long)]
        bound: usize,
    },
    /// Tabulate predicted against oracle central values over admissible twists
    Table {
        file: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long)]
        dmax: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Series length to compute; must cover dmax
        #[arg(long)]
        bound: Option<i64>,
        /// Only the oracle column
        #[arg(long, conflicts_with = "predict_only")]
        oracle_only: bool,
        /// Only the predicted column
        #[arg(long)]
        predict_only: bool,
    },
    /// Print the Brandt matrix B(n) on the fixture's ideal classes
    Brandt {
        file: PathBuf,
        #[arg(long)]
        n: i64,
    },
    /// Print one central value L(f, D, 1) from the oracle
    Lvalue {
        file: PathBuf,
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
    },
    /// Fit the proportionality constant for a family and report the signs
    Calibrate {
        file: PathBuf,
        #[arg(long)]
        family: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::MissingSection(_)
        | Error::UnknownFamily(_)
        | Error::BoundTooSmall { .. }
        | Error::NotFundamental(_)
        | Error::Inadmissible { .. }
        | Error::NegativeBound(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::VerifyFixture { file } => {
            let fx = fixture::load(file)?;
            let checks = fx.verify();
            for c in &checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                println!("{status} {} — {}", c.name, c.detail);
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            println!("verify-fixture: {} checks, {} passed", checks.len(), passed);
            Ok(passed == checks.len())
        }
        Cmd::Theta {
            file,
            family,
            bound,
        } => {
            let fx = fixture::load(file)?;
            let (coeffs, _) = fx.eigenform(&family, bound)?;
            println!("{}", format_q_expansion(&coeffs, bound));
            Ok(true)
        }
        Cmd::Table {
            file,
            family,
            dmax,
            format,
            bound,
            oracle_only,
            predict_only,
        } => {
            if let Some(b) = bound {
                if b < dmax {
                    return Err(Error::BoundTooSmall {
                        required: dmax,
                        bound: b,
                    });
                }
            }
            let fx = fixture::load(file)?;
            let rows = fx.family_table(&family, dmax)?;
            print_table(&rows, format, oracle_only, predict_only);
            Ok(true)
        }
        Cmd::Brandt { file, n } => {
            let fx = fixture::load(file)?;
            let classes = fx.classes()?;
            let b = brandt_matrix(&fx.algebra, &fx.order, &classes, fx.curve.level, n)?;
            for row in &b {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                println!("{}", cells.join(" "));
            }
            Ok(true)
        }
        Cmd::Lvalue { file, d } => {
            let fx = fixture::load(file)?;
            println!("{:.15}", fx.oracle().l_value(d)?);
            Ok(true)
        }
        Cmd::Calibrate { file, family } => {
            let fx = fixture::load(file)?;
            let spec = fx.family(&family)?;
            let (_, outcome) = fx.eigenform(&family, spec.expansion_limit)?;
            println!("signs: {:?}", outcome.signs);
            println!("k: {:.15}", outcome.k);
            println!("relative spread: {:.2e}", outcome.relative_spread);
            println!("nonzero probes: {}", outcome.nonzero_probes);
            if let Some(value) = fx.identity_value(&spec.family)? {
                let (coeff, d) = spec.family.identity.unwrap();
                let rel = (outcome.k - value).abs() / value;
                println!(
                    "identity {}*L({d}) = {value:.15}  (fitted k differs by {rel:.2e} relative)",
                    coeff
                );
            }
            Ok(true)
        }
    }
}

fn print_table(
    rows: &[fixture::TableRow],
    format: OutputFormat,
    oracle_only: bool,
    predict_only: bool,
) {
    let both = !oracle_only && !predict_only;
    match format {
        OutputFormat::Csv => {
            if both {
                println!("d,coefficient,predicted,oracle");
            } else {
                println!("d,coefficient,central_value");
            }
            for r in rows {
                if both {
                    println!(
                        "{},{},{:.6},{:.6}",
                        r.d, r.coefficient, r.predicted, r.oracle_value
                    );
                } else if oracle_only {
                    println!("{},{},{:.6}", r.d, r.coefficient, r.oracle_value);
                } else {
                    println!("{},{},{:.6}", r.d, r.coefficient, r.predicted);
                }
            }
        }
        OutputFormat::Text => {
            if both {
                println!("{:>6} {:>5} {:>12} {:>12}", "d", "c", "predicted", "oracle");
            } else {
                println!("{:>6} {:>5} {:>12}", "d", "c", "central_value");
            }
            for r in rows {
                if both {
                    println!(
                        "{:>6} {:>5} {:>12.6} {:>12.6}",
                        r.d, r.coefficient, r.predicted, r.oracle_value
                    );
                } else if oracle_only {
                    println!("{:>6} {:>5} {:>12.6}", r.d, r.coefficient, r.oracle_value);
                } else {
                    println!("{:>6} {:>5} {:>12.6}", r.d, r.coefficient, r.predicted);
                }
            }
        }
    }
}
