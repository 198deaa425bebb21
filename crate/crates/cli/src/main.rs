mod run;
mod text;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "compspec", version, about = "Spectra of composition operators and their resolvent equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Which way the equation is written. `section1` means `f − (1/λ)f∘φ = γ̃` and
/// is converted to the resolvent form by `γ = −λγ̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Orientation {
    Resolvent,
    Section1,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Working precision in bits.
    #[arg(long, env = "COMPSPEC_PRECISION", default_value_t = 256)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct SymbolArgs {
    /// Symbol φ, e.g. "-x^2+1.5*x" or "1/2*arctan(x)".
    #[arg(long, allow_hyphen_values = true)]
    pub symbol: String,
    #[arg(long, allow_hyphen_values = true, default_value = "(-inf,inf)")]
    pub interval: String,
}

#[derive(Args, Debug)]
pub struct Equation {
    /// Gaussian rational such as "2", "-1/2" or "1/2+1/3i"; decimals are read exactly.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// Right-hand side γ as an expression in x.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: String,
    #[arg(long, value_enum, default_value = "resolvent")]
    pub orientation: Orientation,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectrum, point spectrum and eigenspace dimensions of C_φ.
    Classify {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Formal power series solution at a fixed point, with a radius verdict.
    Solve {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        eq: Equation,
        #[arg(long, default_value_t = 30)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Value of the continued solution at a point, with its evaluation trace.
    Eval {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        eq: Equation,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        out: Output,
    },
    /// Koenigs linearizing series at an attracting fixed point.
    Koenigs {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Preimage orbit of 1 under −x² + μx.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Kernel dimensions on an invariant covering and the resulting verdict.
    Obstruct {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Pieces separated by ';', parts of a union by '|'; a leading '*' marks the determining part.
        #[arg(long, allow_hyphen_values = true)]
        pieces: String,
        #[command(flatten)]
        out: Output,
    },
    /// Contradiction margin for the witness right-hand side x^k·γ₀ on −x² + μx.
    Demo45 {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 8)]
        k: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "1/8")]
        c: String,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Classify { out, .. }
            | Command::Solve { out, .. }
            | Command::Eval { out, .. }
            | Command::Koenigs { out, .. }
            | Command::Orbit { out, .. }
            | Command::Obstruct { out, .. }
            | Command::Demo45 { out, .. } => out,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let format = cli.command.output().format;
    match run::run(&cli.command) {
        Ok(report) => {
            println!("{}", report.render(format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            if format == Format::Json {
                let body = serde_json::json!({ "error": e.name(), "message": e.to_string() });
                println!("{}", serde_json::to_string_pretty(&body).expect("error serializes"));
            }
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
