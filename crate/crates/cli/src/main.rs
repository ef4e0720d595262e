//! `diffvir`: command-line access to every operation of the core crate and to
//! the acceptance suite. Output is one JSON check report per line.

mod commands;
mod specs;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diffvir_core::checks::{CheckReport, Profile, DEFAULT_SEED};

/// Malformed command-line input (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Failure of a subcommand.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(#[from] UsageError),
    #[error("numerical error: {0}")]
    Numerical(diffvir_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl From<diffvir_core::Error> for CliError {
    fn from(e: diffvir_core::Error) -> Self {
        match e {
            diffvir_core::Error::InvalidArgument(msg) => CliError::Usage(UsageError(msg)),
            other => CliError::Numerical(other),
        }
    }
}

const OPERATION_MAP: &str = "\
Operation map (each library operation is reachable from exactly one subcommand):
  field        from_samples, to_samples, derivative, multiply, reciprocal_one_plus
  norm         sobolev_norm; gagliardo_seminorm with --gagliardo
  s32          s32_norm
  diffeo       make_diffeo
  compose      compose
  invert       invert
  pushforward  pushforward
  schwarzian   schwarzian
  beta         beta; beta_derivative_check with --derivative
  omega        gelfand_fuchs (and the bracket cocycle / coboundary via --kind)
  expflow      exp_flow
  mollify      mollify (field, with --f); mollify_diffeo (with --gamma)
  fragment     fragment; fragment_local with --local K
  series       discrete_series_c, discrete_series_h
  gram         build_truncation; shapovalov_matrix with --exact
  lmatrix      L_matrix
  tmatrix      T_matrix
  tgamma       T_gamma_matrix
  commdefect   commutator_defect
  energybound  energy_bound_ratio
  expT         exp_T
  covdefect    covariance_defect
  align        phase_align
  directsum    direct_sum
  rot2pi       rotation_2pi_scalar_defect
  oracle       normal_order (--word, --parts); commutator_reduce (--commutator)
  suite        every acceptance check (--profile quick|full)

Field specs: cos, sin, cosK, sinK, 1, const:x, sums such as 0.1*cos2-0.05*sin,
or a coefficient file FILE.json / @FILE holding {\"cutoff\": K, \"coeffs\": [[n, re, im], ...]}.
Diffeomorphism specs: id, rot:a, lift:FIELD (theta -> theta + FIELD), exp:t:FIELD, or FILE.json.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 numerical error.";

#[derive(Parser, Debug)]
#[command(name = "diffvir", version, about = "Circle diffeomorphisms and truncated Virasoro modules", after_help = OPERATION_MAP)]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Central charge.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Lowest weight(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub h: Vec<f64>,
    /// Truncation level.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Sobolev order, or the exponent parameter for expT/align.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of quadrature nodes.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Tolerance deciding pass/fail (defaults depend on the subcommand).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Also write the JSON lines to this file.
    #[arg(long = "json-out", global = true)]
    pub json_out: Option<PathBuf>,
    /// Parameter set of the suite.
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Quick)]
    pub profile: ProfileArg,
    /// Include per-check runtimes (makes output time dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProfileArg {
    Quick,
    Full,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Quick => Profile::Quick,
            ProfileArg::Full => Profile::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldOp {
    Samples,
    FromSamples,
    Derivative,
    Multiply,
    Reciprocal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CocycleKind {
    /// `(1/48π)∫(f g‴ − f‴ g)`.
    Printed,
    /// Kernel `n³ − n`, consistent with the bracket.
    Bracket,
    /// `(1/48π)∫(f g′ − f′ g)`, the difference of the two.
    Coboundary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Convention {
    Printed,
    Standard,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral function operations.
    Field {
        #[arg(long, value_enum)]
        op: FieldOp,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        /// Sample values for from-samples, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
        /// Target cutoff of the reciprocal.
        #[arg(long, default_value_t = 64)]
        target: usize,
    },
    /// Sobolev norm ‖f‖_{H^s} (or the Gagliardo seminorm).
    Norm {
        #[arg(long)]
        f: String,
        #[arg(long)]
        gagliardo: bool,
    },
    /// Weighted ℓ¹ norm Σ|f̂ₙ|(1 + |n|^{3/2}).
    S32 {
        #[arg(long)]
        f: String,
    },
    /// Validate a diffeomorphism spec.
    Diffeo {
        #[arg(long)]
        gamma: String,
    },
    /// γ₁ ∘ γ₂.
    Compose {
        #[arg(long)]
        gamma1: String,
        #[arg(long)]
        gamma2: String,
    },
    /// γ⁻¹, with the defect of γ ∘ γ⁻¹ as value.
    Invert {
        #[arg(long)]
        gamma: String,
    },
    /// γ⋆f.
    Pushforward {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        f: String,
    },
    /// Schwarzian {γ̊, z} on a grid.
    Schwarzian {
        #[arg(long)]
        gamma: String,
    },
    /// β(γ, f), or the derivative link with --derivative.
    Beta {
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        derivative: bool,
        #[arg(long, default_value_t = diffvir_core::checks::BETA_DERIVATIVE_STEP)]
        step: f64,
    },
    /// Gelfand–Fuchs cocycle ω(f, g).
    Omega {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value_t = CocycleKind::Printed)]
        kind: CocycleKind,
    },
    /// Time-t flow Exp(t f).
    Expflow {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// Mollify a field (--f) or a diffeomorphism (--gamma).
    Mollify {
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        width: f64,
        /// Cutoff of the mollified field.
        #[arg(long, default_value_t = 64)]
        cutoff: usize,
    },
    /// Three-interval fragmentation of γ (or the two-factor split with --local).
    Fragment {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        local: Option<usize>,
    },
    /// Discrete-series central charge and weights.
    Series {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = Convention::Printed)]
        convention: Convention,
    },
    /// Gram matrices of a truncation (exact Shapovalov forms with --exact).
    Gram {
        #[arg(long)]
        exact: bool,
        /// Build in unitary mode (rejects indefinite forms).
        #[arg(long)]
        unitary: bool,
    },
    /// Matrix of Lₙ.
    Lmatrix {
        #[arg(long, allow_negative_numbers = true)]
        mode: i64,
    },
    /// Matrix of T(f).
    Tmatrix {
        #[arg(long)]
        f: String,
    },
    /// Matrix of T^γ(f) = T(γ⋆f) − β(γ, f).
    Tgamma {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        f: String,
    },
    /// Frobenius defect of the Virasoro relation on its exactness window.
    Commdefect {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Best truncated energy-bound constant.
    Energybound {
        #[arg(long)]
        f: String,
    },
    /// e^{i s T(f)}.
    #[command(name = "expT")]
    ExpT {
        #[arg(long)]
        f: String,
    },
    /// Covariance defect of e^{iT(g)} T(f) e^{−iT(g)} against T^{Exp(g)}(f).
    Covdefect {
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1)]
        probe: usize,
    },
    /// Phase alignment of e^{isT(f)} and e^{isT(g)}.
    Align {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// T(f) on a direct sum of modules with weights --h.
    Directsum {
        #[arg(long)]
        f: String,
    },
    /// Defect of U(R(2π)) from a scalar on a direct sum.
    Rot2pi {
        /// Skip the integer-spacing precondition.
        #[arg(long)]
        unchecked: bool,
    },
    /// Exact normal ordering and commutators.
    Oracle {
        /// Word modes n₁,…,n_k.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        word: Vec<i64>,
        /// Partition λ of the state L_{−λ}|h⟩.
        #[arg(long, value_delimiter = ',')]
        parts: Vec<u32>,
        /// Pair n,m for [Lₙ, Lₘ].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        commutator: Vec<i64>,
        #[arg(long, default_value_t = diffvir_core::oracle::DEFAULT_MAX_LEVEL)]
        max_level: usize,
    },
    /// Run the acceptance checks.
    Suite {
        /// Restrict to these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

fn emit(lines: &[String], json_out: Option<&PathBuf>) -> io::Result<()> {
    let mut stdout = io::stdout().lock();
    for line in lines {
        writeln!(stdout, "{line}")?;
    }
    if let Some(path) = json_out {
        let mut file = File::create(path)?;
        for line in lines {
            writeln!(file, "{line}")?;
        }
    }
    Ok(())
}

fn serialize(reports: &[CheckReport]) -> Vec<String> {
    reports.iter().map(|r| serde_json::to_string(r).expect("reports serialize")).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = commands::run(&cli.command, &cli.common).and_then(|out| {
        let mut lines = serialize(&out.reports);
        lines.extend(out.summary);
        emit(&lines, cli.common.json_out.as_ref())?;
        Ok(out.reports.iter().all(|r| r.pass))
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Numerical(_) | CliError::Io(_) => 3,
            })
        }
    }
}
