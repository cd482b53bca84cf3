use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "psi3",
    version,
    about = "Exact 2-adic computations for psi3 as an upper-triangular matrix"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Residues are taken modulo 2^N.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(16..))]
    pub mod2exp: u32,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form 2-adic valuations against big-integer oracles.
    Valuations {
        /// Largest l for nu2(9^l - 1) and nu2(l!).
        #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
        /// Largest l for the valuation of prod_i (9^l - 9^(i-1)).
        #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(1..))]
        iota_max: u64,
        /// Largest n for nu2(9^(2^n) - 1).
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=40))]
        two_power_max: u32,
    },
    /// Matrix of psi3 on the degree-4k integral basis.
    Psi3Matrix {
        #[arg(long)]
        degree: u32,
    },
    /// The basis element g_{4m,4l} in coordinates u/2 and v^2/4.
    Basis {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
    },
    /// Conjugate a matrix C (diagonal 9^k, superdiagonal 1) to B.
    Conjugate {
        #[arg(long, default_value_t = 16)]
        size: usize,
        /// Seed for the random entries of C; ignored with --c-entries.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON list of 1-based entries above the superdiagonal, e.g.
        /// [{"i": 1, "j": 3, "value": "5"}].
        #[arg(long)]
        c_entries: Option<PathBuf>,
    },
    /// Matrix A of 1 ^ psi3 for random generator parameters, with its normalization.
    ExtractA {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extraction, normalization and conjugation for seeds 0..seeds.
    EndToEnd {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
    },
    /// The product X_n = B_1 ... B_n and its entry formulas.
    Xn {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        size: usize,
        /// Also write the full per-entry report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Every check in one table; exit status 0 iff none fails.
    VerifyPaper {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
        /// Largest degree index k for the ring checks.
        #[arg(long, default_value_t = 40)]
        max_degree: u32,
    },
}
