//! `weaklump`: lumping analysis of random walks on permutation groups from plain-text inputs.
//!
//! Exit status: 0 when the analysis ran (whatever the verdict), 1 for usage or parse
//! errors, 2 when an input violates a precondition of the requested analysis.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "weaklump", version, about = "Strong, exact and weak lumping of random walks on finite groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Args, Debug, Default)]
pub struct Inputs {
    /// Group file: `degree <n>` then `gen <cycles>` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub group: Option<PathBuf>,
    /// Subgroup H in the group file format; lumps are the left cosets of H.
    #[arg(long, global = true, value_name = "FILE")]
    pub subgroup: Option<PathBuf>,
    /// Weight: `<scalar> <cycles>` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub weight: Option<PathBuf>,
    /// Initial distribution, as a weight-style file or `states <n>` and a row.
    #[arg(long, global = true, value_name = "FILE")]
    pub dist: Option<PathBuf>,
    /// Group algebra element, rational or `scalar cyclotomic <n>`.
    #[arg(long, global = true, value_name = "FILE")]
    pub idempotent: Option<PathBuf>,
    /// A second subgroup: T inside H, or the left factor of double cosets.
    #[arg(long, global = true, value_name = "FILE")]
    pub inner_subgroup: Option<PathBuf>,
    /// Square matrix: `states <n>` then rows.
    #[arg(long, global = true, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Lumping map: `lump <state> <label>` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub lumping: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub length: usize,
    /// JSON report.
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Text report (the default).
    #[arg(long, global = true)]
    pub text: bool,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Run sequentially even when built with parallel support.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Left cosets of H.
    Cosets,
    /// Double cosets T\G/H, with T = H unless --inner-subgroup is given.
    DoubleCosets,
    /// Strong, exact or weak lumping of the walk driven by --weight.
    Test {
        #[arg(value_enum)]
        kind: TestKind,
    },
    /// Minimal stable ideal L_w.
    Lw,
    /// Maximal stable ideal J_w.
    Jw,
    /// Minimal stable ideal containing --dist.
    LAlpha,
    /// Weak lumping from the initial distribution --dist.
    TestDist,
    /// Whether the left ideal generated by --idempotent is stable for --weight.
    StableCheck,
    /// Dual idempotent 1 - e* + eta_H.
    Dual,
    /// Interpolation test for T = --inner-subgroup.
    Interpolate,
    /// Dimension of the space of weights that --idempotent stabilizes.
    ThetaDim {
        /// Also compute it by one rank computation over the whole group.
        #[arg(long)]
        direct: bool,
    },
    /// Character-subset search for abelian H.
    AbelianTest {
        /// Only subsets closed under complex conjugation.
        #[arg(long)]
        real_only: bool,
    },
    /// Lumped transition matrix of the stationary walk.
    LumpedQ,
    /// Orbital matrices and the Hecke algebra check; with --matrix, the characterization of Q.
    Orbital,
    /// Generic tests on --matrix and --lumping, or on the walk of --weight.
    GenericTest,
    /// Law of the current state and next lump given observed lumps.
    Conditional {
        /// Comma-separated lump indices b_0,...,b_t.
        #[arg(long, value_delimiter = ',', required = true)]
        observe: Vec<usize>,
    },
    /// Simulates the walk and compares the lumped path with the exact lumped chain.
    Simulate {
        /// Write the lump sequence here, one label per line.
        #[arg(long, value_name = "FILE")]
        trajectory: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Strong,
    Exact,
    Weak,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Cosets => "cosets".into(),
            Command::DoubleCosets => "double-cosets".into(),
            Command::Test { kind } => format!("test {}", format!("{kind:?}").to_lowercase()),
            Command::Lw => "lw".into(),
            Command::Jw => "jw".into(),
            Command::LAlpha => "l-alpha".into(),
            Command::TestDist => "test-dist".into(),
            Command::StableCheck => "stable-check".into(),
            Command::Dual => "dual".into(),
            Command::Interpolate => "interpolate".into(),
            Command::ThetaDim { .. } => "theta-dim".into(),
            Command::AbelianTest { .. } => "abelian-test".into(),
            Command::LumpedQ => "lumped-q".into(),
            Command::Orbital => "orbital".into(),
            Command::GenericTest => "generic-test".into(),
            Command::Conditional { .. } => "conditional".into(),
            Command::Simulate { .. } => "simulate".into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            if cli.inputs.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("weaklump: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
