//! `suturecalc`: batch checks over Novikov rings, transitive systems, twist words and
//! closure words. Reads JSON documents and writes a JSON report (or a text summary).
//!
//! Exit status: 0 when every check passes, 1 when some check fails, 2 when an input
//! cannot be parsed.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use suturecalc::ring::{RingKind, UnitGroup};

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Truncation exponent for inverses that do not terminate.
    #[arg(long, env = "SUTURECALC_CUTOFF", default_value_t = 50, global = true)]
    pub cutoff: i64,
    /// Overrides the unit group given by the input document.
    #[arg(long, value_parser = parse_group, global = true)]
    pub unit_group: Option<UnitGroup>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Number of generated cases for randomized checks.
    #[arg(long, default_value_t = 200, global = true)]
    pub cases: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
}

fn parse_group(s: &str) -> Result<UnitGroup, String> {
    s.parse().map_err(|e: suturecalc::Error| e.to_string())
}

fn parse_ring(s: &str) -> Result<RingKind, String> {
    s.parse().map_err(|e: suturecalc::Error| e.to_string())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Transitivity,
    Choice,
    GenusChoice,
    Cycle,
    Functor,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a Novikov expression such as `(t - t^(-1))^(-1)`.
    RingEval {
        expression: String,
        /// Expected value; the check fails if the result differs below the cutoff.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Check the axioms of a transitive system.
    SystemValidate { input: PathBuf },
    /// The quotient module of a strict system, checked against every choice of base.
    SystemQuotient {
        input: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
    /// Change of rings for a system over the integers.
    SystemTensor {
        input: PathBuf,
        #[arg(long = "to", value_parser = parse_ring)]
        target: RingKind,
    },
    /// Validate a system of systems and its flattening.
    SystemFlatten { input: PathBuf },
    /// Factor a symplectic matrix into twists; without input, round-trip random words.
    McgFactor {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        genus: usize,
    },
    /// Action of a twist word on homology.
    McgAct { input: PathBuf },
    /// Surgery presentation of a twist word.
    SurgeryBuild { input: PathBuf },
    /// Build the words of a closure pool and report their normal forms.
    PsiBuild { input: PathBuf },
    /// Compare words by normal form, from a file or generated.
    Coherence {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        generate: Option<Scenario>,
    },
    /// Evaluate words in the rank-one model, from a file or on generated coherent pairs.
    Rank1Eval {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        generate: Option<Scenario>,
        #[arg(long, value_parser = parse_ring, default_value = "integers")]
        ring: RingKind,
        #[arg(long, default_value_t = 20)]
        assignments: u64,
    },
    /// Flatten systems over a nesting poset, from a file or on random posets.
    KhmCheck {
        input: Option<PathBuf>,
        #[arg(long, value_parser = parse_ring, default_value = "novikov")]
        ring: RingKind,
        #[arg(long, default_value_t = 6)]
        max_tags: usize,
    },
}

#[derive(Parser, Debug)]
#[command(name = "suturecalc", version, about = "Exact checks for the closure calculus")]
struct Top {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let top = Top::parse();
    let outcome = commands::run(&top.command, &top.common);
    let (rendered, code) = match outcome {
        Ok(report) => {
            let code = if report.passed() { 0 } else { 1 };
            let text = if top.common.text {
                report.summary()
            } else {
                serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
            };
            (text, code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &top.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().write_all(rendered.as_bytes());
        }
    }
    ExitCode::from(code)
}
