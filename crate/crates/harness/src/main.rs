use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tilu_core::scheme::{build_scheme, UnlearnRequest};
use tilu_core::{ConceptClass, Dataset, Example};
use tilu_harness::oracle::{self, CheckSpec};
use tilu_harness::{artifacts, bench, default_class, suites};

#[derive(Parser)]
#[command(name = "tilu", version, about = "Learning-unlearning schemes with deletion tickets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a dataset file and write hypothesis, aux, tickets and manifest.
    Learn {
        #[arg(long)]
        scheme: String,
        /// Dataset file (header line, then `x ; y` rows).
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the one permitted unlearn on a learn directory.
    Unlearn {
        #[arg(long)]
        out: PathBuf,
        /// Item indices to delete, e.g. `0,3,4`.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        delete: Vec<usize>,
    },
    /// Compare unlearn with retraining and a brute-force oracle on every deletion subset.
    OracleCheck {
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 6)]
        domain: u32,
        /// Class header overriding the default for the scheme, e.g. `class=prodthresh d=2 m=3`.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Datasets drawn when the grid is too large to enumerate.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Flip a bit of every deleted ticket; the check is then expected to fail.
        #[arg(long)]
        corrupt: bool,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the size-indexed Sperner family and write the alphabet CSV.
    SpernerVerify {
        #[arg(long, default_value_t = 300)]
        max_n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure aux and ticket sizes on seeded random data and check the size bounds.
    Bench {
        #[arg(long, value_delimiter = ',')]
        scheme: Vec<String>,
        #[arg(long, default_value_t = 1024)]
        domain: u32,
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 4096)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn and unlearn a small thresholds dataset with every applicable scheme.
    Demo,
}

enum Status {
    Ok,
    CheckFailed,
}

fn class_for(scheme: &str, domain: u32, header: Option<&str>) -> Result<ConceptClass> {
    match header {
        Some(h) => Ok(h.parse()?),
        None => Ok(default_class(scheme, domain)),
    }
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Learn { scheme, data, out } => {
            let text = fs::read_to_string(&data).with_context(|| format!("reading {}", data.display()))?;
            let ds: Dataset = text.parse()?;
            let m = artifacts::learn_to_dir(&scheme, &ds, &out)?;
            println!("{}", m.outcome);
            println!("aux bits: {}, max ticket bits: {}", m.aux_bits, m.ticket_bits.iter().max().unwrap_or(&0));
            Ok(Status::Ok)
        }
        Command::Unlearn { out, delete } => {
            println!("{}", artifacts::unlearn_from_dir(&out, &delete)?);
            Ok(Status::Ok)
        }
        Command::OracleCheck {
            scheme,
            domain,
            class,
            max_n,
            seed,
            samples,
            corrupt,
            out,
        } => {
            let class = class_for(&scheme, domain, class.as_deref())?;
            let mut spec = CheckSpec::new(&scheme, class.clone(), max_n);
            spec.mode = oracle::default_mode(&class, max_n, samples, seed);
            spec.corrupt_tickets = corrupt;
            let report = oracle::check(&spec)?;
            println!(
                "{} {} [{}]: {} datasets ({} outside regime), {} cases, {} mismatches",
                report.scheme,
                report.class,
                report.mode,
                report.datasets,
                report.skipped,
                report.cases,
                report.mismatches.len()
            );
            for m in report.mismatches.iter().take(10) {
                println!("  {} delete {:?}: expected {}, got {}", m.dataset, m.deleted, m.expected, m.got);
            }
            if let Some(path) = out {
                fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            Ok(if report.passed() { Status::Ok } else { Status::CheckFailed })
        }
        Command::SpernerVerify { max_n, out } => {
            let grid = suites::SpernerGrid {
                pairwise_max: max_n,
                ..suites::SpernerGrid::default()
            };
            let fails = suites::sperner_suite(grid);
            if let Some(path) = out {
                let mut w = csv::Writer::from_path(path)?;
                for row in suites::alphabet_rows(grid.alphabet_max)? {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
            for f in &fails {
                println!("FAIL {f}");
            }
            println!("sperner: {} failures", fails.len());
            Ok(if fails.is_empty() { Status::Ok } else { Status::CheckFailed })
        }
        Command::Bench {
            scheme,
            domain,
            class,
            max_n,
            seed,
            out,
        } => {
            let ids: Vec<String> = if scheme.is_empty() {
                bench::DEFAULT_SCHEMES.iter().map(|s| s.to_string()).collect()
            } else {
                scheme
            };
            let class = class_for(&ids[0], domain, class.as_deref())?;
            let (rows, violations) = bench::run(&ids, &class, &bench::sweep(max_n), seed)?;
            match out {
                Some(path) => bench::write_csv(&rows, fs::File::create(path)?)?,
                None => bench::write_csv(&rows, std::io::stdout().lock())?,
            }
            for v in &violations {
                eprintln!("bound violated: {v}");
            }
            Ok(if violations.is_empty() { Status::Ok } else { Status::CheckFailed })
        }
        Command::Demo => {
            demo()?;
            Ok(Status::Ok)
        }
    }
}

fn demo() -> Result<()> {
    let class = ConceptClass::Thresholds { domain: 6 };
    let items = [(1, 0), (2, 0), (2, 0), (4, 1), (5, 1), (6, 1)];
    let data = Dataset::new(class.clone(), items.iter().map(|&(x, y)| Example::scalar(x, y)).collect())?;
    let deleted = [1, 2, 3];
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "data: {:?}, deleting items {deleted:?}", items)?;
    for id in [
        "tree:thresholds",
        "chain:thresholds",
        "central:thresholds",
        "sharp:thresholds",
        "agnostic:thresholds",
        "realizability:thresholds",
        "sharp:minval",
        "ctz",
    ] {
        let scheme = build_scheme(id, &class)?;
        let out = scheme.learn(&data)?;
        let after = scheme.unlearn(&UnlearnRequest::select(&data, &out, &deleted), Some(&out.aux))?;
        writeln!(
            stdout,
            "{id:<26} learned {:<10} aux {:>3} bits, ticket <= {:>3} bits, after deletion {after}",
            out.outcome.to_string(),
            out.aux_bits(),
            out.max_ticket_bits()
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
