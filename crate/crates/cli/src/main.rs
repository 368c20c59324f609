//! `thinfilm`: runs, sweeps, inner-ODE solves and checks for the
//! slip-regularized thin-film equation.
//!
//! Exit codes: 0 ok, 2 usage or configuration error, 3 solver failure,
//! 4 check failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thinfilm::Error;

use crate::output::OutDir;

#[derive(Parser)]
#[command(name = "thinfilm", version, about = "Contact-line lab for the slip-regularized thin-film equation")]
struct Cli {
    /// Run file (TOML, or JSON when it ends in .json). Defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory. Defaults to $THINFILM_OUT/<command>, or thinfilm-out/<command>.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one run; writes profile.csv and diagnostics.csv.
    Run,
    /// ε-sweep for one contact-line law; writes sweep.csv and fit.json.
    Sweep {
        /// cox_voinov, tanner or typeb.
        #[arg(long)]
        law: String,
        /// Comma-separated, strictly decreasing ε values.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        eps: Vec<f64>,
    },
    /// Inner-layer ODE solves and integrals.
    Ode {
        #[command(subcommand)]
        which: OdeCommand,
    },
    /// Oracle and invariant checks; exit 4 when a check fails.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
}

#[derive(Subcommand)]
pub enum OdeCommand {
    /// Complete-wetting separatrix: K₀, exponents and far-field ratio.
    Shoot {
        #[arg(long, default_value_t = 1e-6)]
        eta0: f64,
        #[arg(long, default_value_t = 1e4)]
        eta_max: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Partial-wetting inner problem `H_yyy = ṡ/(H² + H^{n−1})`.
    Inner {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        sdot: f64,
        #[arg(long, default_value_t = 1e-3)]
        y0: f64,
        #[arg(long, default_value_t = 1e3)]
        y_max: f64,
    },
    /// Leading local correction φ(ξ) near the contact point.
    Phi {
        #[arg(long, default_value_t = 2.0)]
        n: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        sdot: f64,
        #[arg(long)]
        xi: f64,
        /// Free coefficient, needed for n < 2.
        #[arg(long, allow_hyphen_values = true)]
        phi2: Option<f64>,
    },
    /// Asymptotic basis of a regime: type-a, type-b or local-phi:<n>.
    Basis {
        #[arg(long)]
        regime: String,
    },
    /// Correction integral Q_γ(y).
    Qgamma {
        #[arg(long)]
        y: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        n: f64,
    },
    /// Travelling wave `m(h) h_ξξξ = ±ξ`.
    Wave {
        #[command(flatten)]
        p: ParamArgs,
        /// +1 shrinking droplet, -1 expanding.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        sign: f64,
        #[arg(long)]
        xi0: f64,
        #[arg(long)]
        xi1: f64,
        /// h, h_ξ, h_ξξ at xi0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        seed: Vec<f64>,
    },
}

#[derive(Args, Clone, Copy)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
}

impl ParamArgs {
    pub fn params(&self) -> thinfilm::Result<thinfilm::SlipParameters> {
        thinfilm::SlipParameters::new(self.n, self.epsilon, self.theta)
    }
}

#[derive(Subcommand)]
pub enum CheckCommand {
    /// Energy balance of a stored diagnostics CSV.
    Energy {
        #[arg(long)]
        traj: PathBuf,
        /// Largest admissible |residual|.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Quadrature of ∫_δ^{1/2} dξ/(ξ (ln 1/ξ)^{1/3}) against its closed form.
    LogIntegral {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
    },
    /// Energy-lemma cancellation on the analytic cutoff profile.
    Cancellation {
        #[arg(long, default_value_t = 1.0 / 3.0)]
        sdot: f64,
        /// The middle entry is used for the term checks, the ends for the spread.
        #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-6,1e-8")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        rtol: f64,
        #[arg(long, default_value_t = 0.2)]
        spread: f64,
    },
    /// No-slip droplet (n = 3, ε = 0): the contact point drifts less than one cell.
    Nomove {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1024)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
    },
    /// Deviation of a moving-frame profile from the type-(b) profile.
    TypebProfile {
        /// Profile CSV; the last snapshot is used. Without it, the type-(b)
        /// sweep member for `--eps` is simulated from the run file.
        #[arg(long, requires = "sdot")]
        traj: Option<PathBuf>,
        #[arg(long)]
        sdot: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 0.15)]
        tol: f64,
    },
}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CHECK: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::UnknownRegime(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Domain(_)
        | Error::InvalidRegime(_)
        | Error::NoPartialWetting(_)
        | Error::SingularDerivative(_)
        | Error::Seed(_) => EXIT_USAGE,
        _ => EXIT_SOLVER,
    }
}

/// Printer that honours `--quiet`.
#[derive(Clone, Copy)]
pub struct Say {
    quiet: bool,
}

impl Say {
    pub fn line(&self, s: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", s.as_ref());
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Run => "run".into(),
        Command::Sweep { law, .. } => format!("sweep-{law}"),
        Command::Ode { which } => format!("ode-{}", commands::ode_name(which)),
        Command::Check { which } => format!("check-{}", commands::check_name(which)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let say = Say { quiet: cli.quiet };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        thinfilm::par::set_threads(n);
    }
    let name = command_name(&cli.command);
    let dir = cli.out.clone().unwrap_or_else(|| {
        let root = std::env::var_os("THINFILM_OUT").map(PathBuf::from).unwrap_or_else(|| "thinfilm-out".into());
        root.join(&name)
    });
    let t0 = Instant::now();
    let mut out = match OutDir::prepare(&dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cfg = cli.config.as_deref();
    let result = match &cli.command {
        Command::Run => commands::run(cfg, &mut out, say),
        Command::Sweep { law, eps } => commands::sweep(cfg, law, eps, &mut out, say),
        Command::Ode { which } => commands::ode(which, &mut out, say),
        Command::Check { which } => commands::check(cfg, which, &mut out, say),
    };
    let code = match result {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    if let Err(e) = out.finish(&name.replacen('-', " ", 1), cfg, t0.elapsed(), code) {
        eprintln!("error: writing manifest: {e}");
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::from(code)
}
