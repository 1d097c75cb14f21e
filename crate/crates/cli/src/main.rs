use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdalg::doc::load_document;
use qdalg::report::{run_classify, ReportOptions};
use qdalg::selftest::{rank1_sweep, sn_corpus, RANK1_SWEEP_JACOBI_COUNT};

const EXIT_MISMATCH: u8 = 1;
const EXIT_LOAD: u8 = 2;

/// Classify brackets, Jacobi structures and first-order operators exactly.
#[derive(Parser, Debug)]
#[command(name = "qdalg", version)]
struct Cli {
    /// Maximum polynomial degree for the randomized confirmation pass.
    #[arg(long, global = true, default_value_t = 3)]
    max_degree: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a structure document and print the full report.
    Check { file: PathBuf },
    /// Print only the anchor data extracted from a structure document.
    Anchors { file: PathBuf },
    /// Run the built-in exhaustive sweep and the Jacobi-pair corpus.
    Selftest,
}

fn load(path: &PathBuf) -> Result<qdalg::StructureDocument, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_LOAD)
    })?;
    load_document(&src).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_LOAD)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = ReportOptions {
        max_degree: cli.max_degree,
        ..ReportOptions::default()
    };
    match cli.command {
        Command::Check { file } => {
            let doc = match load(&file) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let report = run_classify(&doc, &opts);
            print!("{report}");
            let mismatches = report.mismatches(&doc);
            for m in &mismatches {
                eprintln!("{m}");
            }
            if mismatches.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
        Command::Anchors { file } => {
            let doc = match load(&file) {
                Ok(d) => d,
                Err(code) => return code,
            };
            print!("{}", run_classify(&doc, &opts).render_anchors());
            ExitCode::SUCCESS
        }
        Command::Selftest => {
            let sweep = rank1_sweep();
            println!("{sweep}");
            let count_ok = sweep.jacobi == RANK1_SWEEP_JACOBI_COUNT;
            if !count_ok {
                println!(
                    "jacobi count {} differs from recorded {}",
                    sweep.jacobi, RANK1_SWEEP_JACOBI_COUNT
                );
            }
            let corpus = sn_corpus(0x5eed, 300);
            println!("{corpus}");
            let ok = sweep.passed() && count_ok && corpus.passed() && corpus.negatives >= 30;
            println!("selftest: {}", if ok { "pass" } else { "FAIL" });
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
    }
}
