use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sparselab::io::{read_matrix, read_vector, write_json};
use sparselab::report::{self, CertifyParams, Property, ReproduceOptions};

#[derive(Parser)]
#[command(
    name = "sparselab",
    version,
    about = "Boosting vs l1 sparse recovery laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the non-recovery instance for a target RN constant.
    Construct {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build the instance, run boosting and the Lasso path, check every verdict.
    Reproduce {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Terminal Lasso lambda as a fraction of lambda_max.
        #[arg(long, default_value_t = 1e-7)]
        lambda_min: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a sparsity property of a matrix file; prints JSON.
    Certify {
        #[arg(long)]
        matrix: PathBuf,
        /// rn, rn_uniform, re, rip, spark or unique_sparsest
        #[arg(long)]
        property: Property,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Response vector file (unique_sparsest).
        #[arg(long)]
        y: Option<PathBuf>,
        /// Comma-separated 1-based index set T (rn, re).
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<usize>>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run boosting and the Lasso path on any instance and write both CSVs.
    Compare {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        nu: f64,
        /// Terminal Lasso lambda as a fraction of lambda_max.
        #[arg(long)]
        lambda_min: f64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        /// Reference parameter vector file for distances and cone ratios.
        #[arg(long)]
        beta: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> sparselab::Result<ExitCode> {
    match cli.command {
        Command::Construct { c, out } => {
            let inst = report::cmd_construct(c, &out)?;
            println!(
                "wrote n={} p={} s={} instance to {}",
                inst.n,
                inst.p,
                inst.s,
                out.display()
            );
        }
        Command::Reproduce {
            c,
            nu,
            iters,
            seed,
            lambda_min,
            out,
        } => {
            let mut options = ReproduceOptions::new(c, nu, iters);
            options.seed = seed;
            options.lasso_lambda_min_ratio = lambda_min;
            let report = report::cmd_reproduce(&options, out.as_deref())?;
            println!("{report}");
            if !report.consistent() {
                eprint!("{}", report.diff());
                return Ok(ExitCode::from(1));
            }
        }
        Command::Certify {
            matrix,
            property,
            t,
            c,
            s,
            seed,
            y,
            support,
            samples,
            out,
        } => {
            let x = read_matrix(&matrix)?;
            let params = CertifyParams {
                t,
                c,
                s,
                seed,
                support,
                y: y.as_deref().map(read_vector).transpose()?,
                samples,
            };
            let cert = report::certify(&x, property, &params)?;
            match out {
                Some(path) => write_json(&path, &cert)?,
                None => println!("{}", serde_json::to_string_pretty(&cert)?),
            }
        }
        Command::Compare {
            matrix,
            y,
            nu,
            lambda_min,
            iters,
            beta,
            out,
        } => {
            let x = read_matrix(&matrix)?;
            let y = read_vector(&y)?;
            let beta = beta.as_deref().map(read_vector).transpose()?;
            let result = report::cmd_compare(&x, &y, beta.as_deref(), nu, iters, lambda_min, &out)?;
            println!(
                "wrote {} boosting rows and {} lasso rows to {}",
                result.boosting.len(),
                result.lasso.len(),
                out.display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
