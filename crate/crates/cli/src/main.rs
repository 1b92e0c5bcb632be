//! `steinforge`: derive, scan, verify and inspect Stein operators for
//! polynomials of a standard Gaussian.
//!
//! Results go to stdout, progress to stderr. Exit codes: 0 pass or found,
//! 1 verification failure, 2 infeasible at bounds, 64 usage, 70 internal.

mod commands;
mod polyspec;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "steinforge", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Plain,
}

/// `W = P(Z)`, given as text or as coefficients.
#[derive(Args, Debug, Clone)]
#[group(multiple = false)]
pub struct PolyArgs {
    /// Polynomial text, e.g. "x^3 - 3x" or "1/2x^2 + x".
    #[arg(long)]
    pub poly: Option<String>,
    /// Coefficients in increasing degree, e.g. "3,0,-6,0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    /// Composite Gauss-Legendre, escalating to multiprecision when needed.
    Adaptive,
    /// Plain Gauss-Hermite with `--nodes` nodes.
    GaussHermite,
    /// Multiprecision quadrature.
    Precise,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Comma-separated methods: symbolic, quadrature, mc, density.
    #[arg(long, value_delimiter = ',', default_value = "symbolic,quadrature")]
    pub methods: Vec<String>,
    /// Quadrature nodes (Gauss-Hermite) or points per panel (adaptive).
    #[arg(long, default_value_t = 201)]
    pub nodes: usize,
    /// Absolute residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0x5EED)]
    pub seed: u64,
    /// Largest monomial degree of the symbolic check.
    #[arg(long, default_value_t = 30)]
    pub max_degree: usize,
    #[arg(long, value_enum, default_value_t = Rule::Adaptive)]
    pub rule: Rule,
    /// Also perturb each coefficient by +1 and require quadrature to fail.
    #[arg(long)]
    pub mutation: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact search for an operator of order <= M with coefficient degree <= D.
    Derive {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        degree: usize,
        /// Retry with relaxed truncations before reporting infeasibility.
        #[arg(long)]
        deepen: bool,
        /// Override the z-power cap I (default deg(P) (D + M)).
        #[arg(long)]
        z_cap: Option<usize>,
        /// Override the derivative cap J (default M).
        #[arg(long)]
        derivative_cap: Option<usize>,
    },
    /// Feasibility grid over orders 1..=M and degrees 0..=D.
    Scan {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        max_degree: usize,
    },
    /// Verify a catalog operator or an operator read from a JSON file.
    Verify {
        #[arg(long, conflicts_with = "operator")]
        catalog: Option<String>,
        /// JSON file holding an operator, or any output of `derive`.
        #[arg(long, required_unless_present = "catalog")]
        operator: Option<std::path::PathBuf>,
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        opts: VerifyArgs,
    },
    /// List or show known operators.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Minimal-order scan for H_5 or H_6 against the tabulated coefficients.
    Conjecture {
        #[arg(long)]
        hermite: usize,
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        max_degree: usize,
    },
    /// Operator of the non-central chi-square law and density checks.
    Noncentral {
        /// Degrees of freedom, integer or p/q.
        #[arg(long, required_unless_present = "means")]
        k: Option<String>,
        /// Non-centrality, integer or p/q.
        #[arg(long, required_unless_present = "means")]
        lambda: Option<String>,
        /// Component means; fixes k and lambda.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["k", "lambda"])]
        means: Option<Vec<String>>,
        /// Run density and operator checks.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Show { key: String },
}

fn configure_threads() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var("STEINFORGE_THREADS") else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("STEINFORGE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Some(n))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|threads| commands::execute(&cli, threads));
    match result {
        Ok(Outcome { stdout, code }) => {
            print!("{stdout}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
