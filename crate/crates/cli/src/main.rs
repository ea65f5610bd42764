mod cache;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::output::Format;

/// Term clones, variety membership and orbit counts for finite algebras.
#[derive(Parser, Debug)]
#[command(name = "birkhoff", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Member cap for clone levels and generated subalgebras.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cap_members: usize,
    /// Byte cap for a single operation table.
    #[arg(long, global = true, default_value_t = 1 << 28)]
    pub cap_table_bytes: usize,
    /// Carrier cap for materialized products and free algebras.
    #[arg(long, global = true, default_value_t = 4096)]
    pub cap_product: usize,
    /// Point cap for action spaces.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    pub cap_points: usize,
    /// Largest truncation probed by `probe`.
    #[arg(long, global = true, default_value_t = 5)]
    pub probe_depth: usize,
    /// Directory for cached clone levels and orbit partitions.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the n-ary clone level.
    Clone {
        algebra: PathBuf,
        #[arg(short = 'n', long)]
        arity: usize,
        /// List every member with a witness term.
        #[arg(long)]
        tables: bool,
    },
    /// Build the free algebra on n generators in the variety of A.
    Free {
        algebra: PathBuf,
        #[arg(short = 'n', long)]
        arity: usize,
        /// Write the free algebra to this file instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether B lies in the variety generated by A.
    Hsp {
        source: PathBuf,
        target: PathBuf,
        /// Generators of B, comma separated (default: every element).
        #[arg(long)]
        gens: Option<String>,
        /// Write the certificate to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The natural map Clo_n(A) -> Clo_n(B), or a separating identity.
    NatHom {
        source: PathBuf,
        target: PathBuf,
        #[arg(short = 'n', long)]
        arity: usize,
        #[arg(long)]
        tables: bool,
    },
    /// A source entourage whose image lands in ker pr_F.
    UcWitness {
        source: PathBuf,
        target: PathBuf,
        #[arg(short = 'n', long)]
        arity: usize,
        /// Tuples of F, e.g. `0,1;1,1`.
        #[arg(long)]
        support: String,
    },
    /// Emit an HSPfin certificate for the subalgebra of B generated by `gens`.
    Cert {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        gens: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify { certificate: PathBuf },
    /// Orbits of a permutation group on X^n.
    Orbits {
        group: PathBuf,
        #[arg(short = 'n', long)]
        arity: usize,
        #[arg(long, value_enum, default_value_t = commands::Backend::Bfs)]
        backend: commands::Backend,
        /// List every orbit representative.
        #[arg(long)]
        list: bool,
    },
    /// Orbit counts of X^n for n = 1..k.
    Oligo {
        group: PathBuf,
        #[arg(short = 'k', long)]
        max_arity: usize,
    },
    /// Orbit counts along truncations 1..probe-depth.
    Probe { group: PathBuf },
    /// Orbit diagnostics of the invertible unary term operations.
    Alf {
        algebra: PathBuf,
        #[arg(short = 'k', long)]
        max_arity: usize,
        /// One-generator subalgebras of A^n sampled per arity.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// The group of invertible unary term operations.
    UnaryGroup { algebra: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", output::render(&out.report, cli.format));
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
