//! Experiment harness over the `midscale` library: one subcommand per
//! experiment, CSV or JSON-lines output, fixed default seed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use midscale::gtransform::{HellingerTarget, Kernel, McmcConfig};
use midscale::symmat::RngSeed;

pub mod commands;
pub mod defaults;
pub mod output;

pub use defaults::{defaults, Defaults, DEFAULTS_TOML};
pub use output::{format_float, Cell, Format, RowWriter};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] midscale::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
}

impl CliError {
    /// 2 for invalid input or capacity, 3 for numerical or MCMC failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::Io(_) | CliError::Csv(_) | CliError::Usage(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "midscale", version, about = "Exact moments and Monte-Carlo experiments for normalized Wishart matrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed; defaults to the constant in defaults.toml.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte-Carlo work (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args, Clone, Default)]
pub struct McmcArgs {
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long = "step-scale")]
    pub step_scale: Option<f64>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Matrix,
    Spectral,
}

impl From<KernelArg> for Kernel {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Matrix => Kernel::Matrix,
            KernelArg::Spectral => Kernel::Spectral,
        }
    }
}

impl McmcArgs {
    /// Flags override `base`, which comes from the defaults document.
    pub fn resolve(&self, base: McmcConfig) -> McmcConfig {
        McmcConfig {
            n_chains: self.chains.unwrap_or(base.n_chains),
            burn_in: self.burn_in.unwrap_or(base.burn_in),
            thin: self.thin.unwrap_or(base.thin),
            step_scale: self.step_scale.unwrap_or(base.step_scale),
            kernel: self.kernel.map(Kernel::from).unwrap_or(base.kernel),
            seed: base.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleDist {
    T,
    Goe,
    Wishart,
    Nwishart,
    SqrtConstruction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EsdDist {
    T,
    Goe,
    Nwishart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Psik,
    Psigoe,
}

impl From<TargetArg> for HellingerTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Psik => HellingerTarget::PsiK,
            TargetArg::Psigoe => HellingerTarget::PsiGoe,
        }
    }
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected n,p but got {:?}", s))?;
    let n = a.trim().parse().map_err(|e| format!("bad n in {:?}: {}", s, e))?;
    let p = b.trim().parse().map_err(|e| format!("bad p in {:?}: {}", s, e))?;
    Ok((n, p))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact E[tr T^{2k}] (or E[tr² T^k] with --squared) and evaluations.
    Moments {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        squared: bool,
        /// Evaluation point n,p (repeatable).
        #[arg(long = "eval", value_parser = parse_pair)]
        eval: Vec<(i64, i64)>,
    },
    /// Exact normalized L² errors against their claimed leading forms.
    Table1 {
        /// Probe point n,p (repeatable).
        #[arg(long = "probe", value_parser = parse_pair)]
        probe: Vec<(i64, i64)>,
    },
    /// 16^k E[tr T^{2k}] / p^{k+1} against the Catalan numbers.
    CatalanCheck {
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Draws from one of the matrix ensembles.
    Sample {
        #[arg(long, value_enum)]
        dist: SampleDist,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: usize,
        /// Degrees of freedom for the square-root construction.
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
        /// Emit Monte-Carlo means next to exact reference values instead of draws.
        #[arg(long)]
        summary: bool,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Kolmogorov-Smirnov distance of the rescaled spectrum to the semicircle law.
    Esd {
        #[arg(long, value_enum)]
        dist: EsdDist,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        draws: Option<usize>,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Squared Hellinger distance between ψ_NW and ψ_K (or ψ_K and ψ_GOE).
    Hellinger {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long = "K", alias = "degree", default_value_t = 0)]
        k: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, default_value_t = TargetArg::Psik)]
        target: TargetArg,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Kullback-Leibler bound for (ψ_NW, ψ_K) next to the Hellinger estimate.
    KlBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long = "K", alias = "degree", default_value_t = 0)]
        k: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Unnormalized f_K at X = x·I_p, with the ratio to f_K(0).
    FkDensity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long = "K", alias = "degree", default_value_t = 0)]
        k: usize,
        /// Scalar x (repeatable).
        #[arg(long = "x", allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long = "nz")]
        n_z: Option<usize>,
    },
    /// Hellinger distance and exact k=2 L² error along p = round(n^gamma).
    Sweep {
        #[arg(long = "K", alias = "degree", default_value_t = 0)]
        k: usize,
        #[arg(long)]
        gamma: Option<f64>,
        /// Grid value n (repeatable).
        #[arg(long = "n")]
        n: Vec<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Zonal/power-sum conversion matrices of weight w.
    ZonalDump {
        #[arg(long)]
        w: u32,
    },
}

/// Resolved global settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub format: Format,
    pub defaults: &'static Defaults,
}

impl Context {
    pub fn rng_seed(&self) -> RngSeed {
        RngSeed::new(self.seed, 0)
    }

    pub fn mcmc_base(&self) -> McmcConfig {
        let m = &self.defaults.mcmc;
        McmcConfig {
            n_chains: m.chains,
            burn_in: m.burn_in,
            thin: m.thin,
            step_scale: m.step_scale,
            seed: self.rng_seed(),
            kernel: m.kernel,
        }
    }
}

/// Runs one parsed command line, writing rows to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let d = defaults();
    let ctx = Context { seed: cli.global.seed.unwrap_or(d.seed), format: cli.global.format, defaults: d };
    match cli.global.workers {
        Some(0) => Err(CliError::Usage("--workers must be positive".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {} workers: {}", w, e)))?;
            // the pool thread cannot borrow a non-Send writer, so rows are buffered
            let mut buf = Vec::new();
            pool.install(|| commands::dispatch(&ctx, &cli.command, &mut buf))?;
            out.write_all(&buf)?;
            Ok(out.flush()?)
        }
        None => commands::dispatch(&ctx, &cli.command, out),
    }
}

/// Parses `args` (without the program name) and returns the output as a string.
pub fn run_args(args: &[&str]) -> Result<String, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("midscale").chain(args.iter().copied()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    run(&cli, &mut buf)?;
    Ok(String::from_utf8(buf).expect("output is UTF-8"))
}

/// Runs a parsed command line against `--out` (or stdout).
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => {
            let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
            run(cli, &mut w)?;
            Ok(w.flush()?)
        }
        None => run(cli, &mut std::io::stdout().lock()),
    }
}
