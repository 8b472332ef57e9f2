//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use oneshot_core::divergences::{self, BallKind, DivergenceValue, SmoothingBall};
use oneshot_core::smoothing::{
    admissible_witness, gentle_projection, hypothesis_smoother, joint_smoother_response, renyi_smoother,
    SmoothingCertificate,
};
use oneshot_core::tol::DEFAULT_ETA;
use oneshot_core::{HermitianOperator, PositiveOperator, QuantumState};

use crate::battery::{battery, BatteryConfig, Suite};
use crate::io::{self, CertificateJson, JointResponseJson, SdpProblemJson};
use crate::{OneshotError, Result};

#[derive(Debug, Parser)]
#[command(name = "oneshot", version, about = "One-shot quantum divergences, smoothing certificates and inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluates a divergence and prints it in bits.
    Compute(ComputeArgs),
    /// Runs the inequality battery and writes a report.
    Verify(VerifyArgs),
    /// Runs a smoothing construction and prints its certificate as JSON.
    Smooth(SmoothArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Divergence {
    Dmax,
    DmaxSmooth,
    Renyi,
    RelEntropy,
    Dh,
    Ds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ball {
    Purified,
    Trace,
}

#[derive(Debug, clap::Args)]
pub struct ComputeArgs {
    pub divergence: Divergence,
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long)]
    pub sigma: PathBuf,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Ball::Purified)]
    pub ball: Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Eq9,
    Dataproc,
    Thm1,
    Thm2,
    Thm3,
    Corollary,
    All,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Suites to run; may be repeated.
    #[arg(long, value_enum, num_args = 1..)]
    pub suite: Vec<SuiteArg>,
    /// JSON configuration; command-line flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gentle,
    Renyi,
    Hypothesis,
    Joint,
}

#[derive(Debug, clap::Args)]
pub struct SmoothArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    /// The state (`ρ_AB` for the joint method).
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Projector to remove (gentle method).
    #[arg(long)]
    pub projector: Option<PathBuf>,
    /// Witness `M`; defaults to the optimal dual witness of the smooth
    /// max-divergence (radius ε for renyi, √ε for hypothesis).
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long)]
    pub sigma_a: Option<PathBuf>,
    #[arg(long)]
    pub sigma_b: Option<PathBuf>,
    /// `M_A`, default identity.
    #[arg(long)]
    pub witness_a: Option<PathBuf>,
    /// `M_B`, default identity.
    #[arg(long)]
    pub witness_b: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.ok_or_else(|| OneshotError::usage(format!("{flag} is required")))
}

fn print_value(v: DivergenceValue) {
    println!("{v}");
}

fn compute(a: &ComputeArgs) -> Result<i32> {
    let rho = io::read_state(&a.rho)?;
    let sigma = io::read_positive(&a.sigma)?;
    let value = match a.divergence {
        Divergence::Dmax => divergences::dmax(&rho, &sigma)?,
        Divergence::Renyi => divergences::renyi(&rho, &sigma, need(a.alpha, "--alpha")?)?,
        Divergence::RelEntropy => divergences::rel_entropy(&rho, &sigma)?,
        Divergence::Dh => divergences::dh(&rho, &sigma, need(a.eps, "--eps")?)?,
        Divergence::Ds => {
            let s = divergences::ds(&rho, &sigma, need(a.eps, "--eps")?)?;
            if s.capped_above {
                DivergenceValue::Infinite
            } else {
                DivergenceValue::Finite(s.value)
            }
        }
        Divergence::DmaxSmooth => {
            let kind = match a.ball {
                Ball::Purified => BallKind::Purified,
                Ball::Trace => BallKind::Trace,
            };
            divergences::dmax_smooth(&rho, &sigma, SmoothingBall::new(kind, need(a.eps, "--eps")?)?)?.value
        }
    };
    print_value(value);
    Ok(0)
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let mut config = match &a.config {
        Some(p) => BatteryConfig::from_file(p)?,
        None => BatteryConfig::default(),
    };
    if !a.suite.is_empty() {
        config.suites = if a.suite.contains(&SuiteArg::All) {
            Suite::ALL.to_vec()
        } else {
            a.suite
                .iter()
                .map(|s| match s {
                    SuiteArg::Eq9 => Suite::Eq9,
                    SuiteArg::Dataproc => Suite::Dataproc,
                    SuiteArg::Thm1 => Suite::Thm1,
                    SuiteArg::Thm2 => Suite::Thm2,
                    SuiteArg::Thm3 => Suite::Thm3,
                    SuiteArg::Corollary => Suite::Corollary,
                    SuiteArg::All => unreachable!(),
                })
                .collect()
        };
    }
    if let Some(t) = a.trials {
        config.trials = t;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(t) = a.tol {
        config.tol = t;
    }
    let report = battery(&config)?;
    io::write_json(&report, a.out.as_deref())?;
    if let Some(p) = &a.csv {
        report.write_csv(p)?;
    }
    log::info!(
        "{} checks, {} failures, {} warnings in {:.1} s",
        report.checks,
        report.failures,
        report.warnings,
        report.runtime_seconds
    );
    Ok(report.exit_code())
}

fn default_witness(rho: &QuantumState, sigma: &PositiveOperator, radius: f64) -> Result<HermitianOperator> {
    let sd = divergences::dmax_smooth(rho, sigma, SmoothingBall::purified(radius)?)?;
    let w = sd.witness.ok_or_else(|| OneshotError::domain("the smooth max-divergence is infinite; pass --witness"))?;
    Ok(admissible_witness(&w, sigma)?)
}

fn smooth(a: &SmoothArgs) -> Result<i32> {
    let rho = io::read_state(&a.rho)?;
    let cert: SmoothingCertificate = match a.method {
        Method::Gentle => {
            let p = io::read_operator(&need(a.projector.clone(), "--projector")?)?;
            let (state, distance) = gentle_projection(&rho, &p)?;
            SmoothingCertificate {
                smoothed_state: state,
                projector: p,
                distance,
                claimed_bound: DivergenceValue::Finite(distance),
                witness_value: distance,
                inequalities: Vec::new(),
            }
        }
        Method::Renyi | Method::Hypothesis => {
            let sigma = io::read_positive(&need(a.sigma.clone(), "--sigma")?)?;
            let eps = need(a.eps, "--eps")?;
            let radius = if a.method == Method::Renyi { eps } else { eps.sqrt() };
            let m = match &a.witness {
                Some(p) => io::read_operator(p)?,
                None => default_witness(&rho, &sigma, radius)?,
            };
            if a.method == Method::Renyi {
                renyi_smoother(&rho, &sigma, eps, need(a.alpha, "--alpha")?, &m)?
            } else {
                hypothesis_smoother(&rho, &sigma, eps, &m, a.eta)?
            }
        }
        Method::Joint => {
            let sa = io::read_positive(&need(a.sigma_a.clone(), "--sigma-a")?)?;
            let sb = io::read_positive(&need(a.sigma_b.clone(), "--sigma-b")?)?;
            let read_or_identity = |p: &Option<PathBuf>, d: usize| match p {
                Some(p) => io::read_operator(p),
                None => Ok(HermitianOperator::identity(d)),
            };
            let ma = read_or_identity(&a.witness_a, sa.dim())?;
            let mb = read_or_identity(&a.witness_b, sb.dim())?;
            let r = joint_smoother_response(&rho, &sa, &sb, need(a.eps, "--eps")?, need(a.eps2, "--eps2")?, &ma, &mb, a.eta)?;
            io::write_json(&JointResponseJson::from(&r), a.out.as_deref())?;
            return Ok(0);
        }
    };
    io::write_json(&CertificateJson::from(&cert), a.out.as_deref())?;
    Ok(0)
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let res = match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => verify(a),
        Command::Smooth(a) => smooth(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let OneshotError::Core(oneshot_core::Error::SdpNotSolved { problem, .. }) = &e {
                let path = std::env::temp_dir().join(format!("oneshot-sdp-{}.json", std::process::id()));
                if io::write_json(&SdpProblemJson::from(problem.as_ref()), Some(&path)).is_ok() {
                    eprintln!("problem dumped to {}", path.display());
                }
            }
            e.exit_code()
        }
    }
}

/// Logging from `ONESHOT_LOG` (`error`, `info` or `debug`; default `warn`).
pub fn init_logging() {
    env_logger::Builder::new()
        .parse_filters(&std::env::var("ONESHOT_LOG").unwrap_or_else(|_| "warn".into()))
        .init();
}
