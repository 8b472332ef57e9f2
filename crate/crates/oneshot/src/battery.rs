//! The inequality battery: every verifier over a grid of random instances.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use oneshot_core::{PositiveOperator, QuantumState};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::instance::{derive_seed, gen_positive, gen_state, pick_kind, rng, Dims, InstanceKind, InstanceSpec};
use crate::io::ext_f64;
use crate::verify::{self, Check};
use crate::{OneshotError, Result};

/// Name of the check that records whether a trial could be evaluated at all.
pub const EVALUATION: &str = "evaluation";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Eq9,
    Dataproc,
    Thm1,
    Thm2,
    Thm3,
    Corollary,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Eq9, Suite::Dataproc, Suite::Thm1, Suite::Thm2, Suite::Thm3, Suite::Corollary];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eq9 => "eq9",
            Suite::Dataproc => "dataproc",
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Thm3 => "thm3",
            Suite::Corollary => "corollary",
        }
    }

    fn bipartite(self) -> bool {
        matches!(self, Suite::Thm3 | Suite::Corollary)
    }
}

/// Grid and tolerances of a battery run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub suites: Vec<Suite>,
    /// Trials per grid cell.
    pub trials: usize,
    pub seed: u64,
    /// Slacks in `[−tol, 0)` are warnings, below `−tol` failures.
    pub tol: f64,
    pub dims: Vec<usize>,
    pub bipartite: Vec<(usize, usize)>,
    pub eps: Vec<f64>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            suites: Suite::ALL.to_vec(),
            trials: 50,
            seed: 1,
            tol: 1e-6,
            dims: vec![2, 3, 4, 6],
            bipartite: vec![(2, 2), (2, 3)],
            eps: vec![0.1, 0.25, 0.4],
        }
    }
}

impl BatteryConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        crate::io::read_json(path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(OneshotError::usage("the suite list is empty"));
        }
        if self.trials == 0 {
            return Err(OneshotError::usage("trials must be positive"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(OneshotError::usage("tolerance must be a nonnegative number"));
        }
        if self.eps.is_empty() || self.eps.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
            return Err(OneshotError::usage("ε grid must be nonempty with values in (0, 1/2)"));
        }
        let single = self.suites.iter().any(|s| !s.bipartite());
        if single && (self.dims.is_empty() || self.dims.contains(&0)) {
            return Err(OneshotError::usage("dimension grid must be nonempty and positive"));
        }
        let bip = self.suites.iter().any(|s| s.bipartite());
        if bip && (self.bipartite.is_empty() || self.bipartite.iter().any(|&(a, b)| a == 0 || b == 0)) {
            return Err(OneshotError::usage("bipartite grid must be nonempty and positive"));
        }
        Ok(())
    }
}

/// Parameters of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellParams {
    pub dims: Dims,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl CellParams {
    fn label(&self) -> String {
        let dims = match self.dims {
            Dims::Single(d) => format!("d={d}"),
            Dims::Bipartite(a, b) => format!("d={a}x{b}"),
        };
        let mut s = format!("{dims} eps={}", self.eps);
        if let Some(e2) = self.eps2 {
            s += &format!(" eps2={e2}");
        }
        if let Some(d) = self.delta {
            s += &format!(" delta={d}");
        }
        s
    }
}

/// Everything needed to regenerate one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialInstance {
    pub trial: usize,
    pub rho: InstanceSpec,
    /// Seeds of `σ` (or `σ_A`, `σ_B`) for [`gen_positive`].
    pub sigma_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ChannelSpec {
    Stinespring { dim_env: usize, seed: u64 },
    Pinching { seed: u64 },
}

impl ChannelSpec {
    pub fn build(&self, dim: usize) -> Result<Channel> {
        match *self {
            ChannelSpec::Stinespring { dim_env, seed } => Channel::random_stinespring(dim, dim_env, seed),
            ChannelSpec::Pinching { seed } => Channel::random_pinching(dim, seed),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub instance: TrialInstance,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub pass: usize,
    pub warn: usize,
    pub fail: usize,
    #[serde(serialize_with = "ext_f64::serialize")]
    pub worst_slack: f64,
    pub worst_instance: TrialInstance,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cell: String,
    pub params: CellParams,
    pub checks: Vec<CheckSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub cells: Vec<CellReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub trials_per_cell: usize,
    pub tolerance: f64,
    pub suites: Vec<SuiteReport>,
    pub checks: usize,
    pub failures: usize,
    pub warnings: usize,
    /// Trials that raised a numerical (solver) error.
    pub numerical_errors: usize,
    pub runtime_seconds: f64,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// 0 when everything passed, 3 when the only failures are numerical
    /// errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.failures == self.numerical_errors {
            3
        } else {
            1
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["suite", "cell", "check", "trials", "pass", "warn", "fail", "worst_slack", "worst_seed"])?;
        for s in &self.suites {
            for c in &s.cells {
                for k in &c.checks {
                    w.write_record([
                        s.suite.name().to_string(),
                        c.cell.clone(),
                        k.name.clone(),
                        k.trials.to_string(),
                        k.pass.to_string(),
                        k.warn.to_string(),
                        k.fail.to_string(),
                        k.worst_slack.to_string(),
                        k.worst_instance.rho.seed.to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| OneshotError::io(path.display().to_string(), e))?;
        Ok(())
    }
}

fn cells(config: &BatteryConfig, suite: Suite) -> Vec<CellParams> {
    let mut out = Vec::new();
    if suite.bipartite() {
        for &(a, b) in &config.bipartite {
            for &eps in &config.eps {
                let delta = (suite == Suite::Corollary).then(|| f64::min(0.1, (1.0 - 2.0 * eps) / 4.0));
                out.push(CellParams { dims: Dims::Bipartite(a, b), eps, eps2: Some(eps), delta });
            }
        }
    } else {
        for &d in &config.dims {
            for &eps in &config.eps {
                let delta = match suite {
                    Suite::Eq9 => Some(0.1),
                    Suite::Thm2 => Some(eps.min((1.0 - eps) / 2.0)),
                    _ => None,
                };
                out.push(CellParams { dims: Dims::Single(d), eps, eps2: None, delta });
            }
        }
    }
    out
}

/// The random instance of `trial` in a cell, derived only from the seeds.
pub fn trial_instance(base_seed: u64, suite: Suite, cell: usize, params: &CellParams, trial: usize) -> TrialInstance {
    let seed = derive_seed(base_seed, &[suite as u64, cell as u64, trial as u64]);
    let mut r = rng(seed);
    let d = params.dims.total();
    let bip = matches!(params.dims, Dims::Bipartite(..));
    let kind = pick_kind(&mut r, bip);
    let rank = if kind == InstanceKind::PureBipartite { 1 } else { r.random_range(1..=d) };
    let rho = InstanceSpec::new(params.dims, rank, r.random(), kind);
    let sigma_seeds = if bip { vec![r.random(), r.random()] } else { vec![r.random()] };
    let alpha = (suite == Suite::Thm1).then(|| [1.5, 2.0, 5.0][trial % 3]).or((suite == Suite::Dataproc).then_some(2.0));
    let channel = (suite == Suite::Dataproc).then(|| {
        if r.random_bool(0.5) {
            ChannelSpec::Stinespring { dim_env: r.random_range(1..=3), seed: r.random() }
        } else {
            ChannelSpec::Pinching { seed: r.random() }
        }
    });
    TrialInstance { trial, rho, sigma_seeds, alpha, channel }
}

/// Runs the verifier of `suite` on a regenerated instance.
pub fn run_trial(suite: Suite, params: &CellParams, inst: &TrialInstance, tol: f64) -> Result<Vec<Check>> {
    let rho: QuantumState = gen_state(&inst.rho)?;
    match params.dims {
        Dims::Single(d) => {
            let sigma: PositiveOperator = gen_positive(d, inst.sigma_seeds[0])?;
            let eps = params.eps;
            match suite {
                Suite::Eq9 => verify::verify_eq9(&rho, &sigma, eps, params.delta.unwrap_or(0.1)),
                Suite::Dataproc => {
                    let ch = inst.channel.as_ref().ok_or_else(|| OneshotError::usage("missing channel"))?.build(d)?;
                    verify::verify_data_processing(&rho, &sigma, &ch, eps, inst.alpha.unwrap_or(2.0))
                }
                Suite::Thm1 => verify::verify_theorem1(&rho, &sigma, eps, inst.alpha.unwrap_or(2.0), tol),
                Suite::Thm2 => verify::verify_theorem2(&rho, &sigma, eps, params.delta.unwrap_or(eps), tol),
                Suite::Thm3 | Suite::Corollary => Err(OneshotError::usage("joint suites need bipartite cells")),
            }
        }
        Dims::Bipartite(a, b) => {
            let sa = gen_positive(a, inst.sigma_seeds[0])?;
            let sb = gen_positive(b, inst.sigma_seeds[1])?;
            let eps2 = params.eps2.unwrap_or(params.eps);
            match suite {
                Suite::Thm3 => verify::verify_theorem3(&rho, &sa, &sb, params.eps, eps2),
                Suite::Corollary => verify::verify_corollary(&rho, &sa, &sb, params.eps, eps2, params.delta.unwrap_or(0.1)),
                _ => Err(OneshotError::usage("single-system suites need single cells")),
            }
        }
    }
}

#[derive(Default)]
struct Tally {
    trials: usize,
    pass: usize,
    warn: usize,
    fail: usize,
    worst: Option<(f64, TrialInstance)>,
    failures: Vec<Failure>,
}

impl Tally {
    fn add(&mut self, slack: f64, inst: &TrialInstance, tol: f64, message: Option<String>) {
        self.trials += 1;
        if slack >= 0.0 {
            self.pass += 1;
        } else if slack >= -tol {
            self.pass += 1;
            self.warn += 1;
        } else {
            self.fail += 1;
            self.failures.push(Failure { instance: inst.clone(), slack, message });
        }
        // NaN counts as a failure above and is always the worst case.
        if self.worst.as_ref().is_none_or(|(w, _)| slack < *w || slack.is_nan()) {
            self.worst = Some((slack, inst.clone()));
        }
    }
}

/// Runs every configured suite. Trials run in parallel; the report only
/// depends on the configuration (apart from `runtime_seconds`).
pub fn battery(config: &BatteryConfig) -> Result<BatteryReport> {
    config.validate()?;
    let start = Instant::now();
    let mut suites = Vec::new();
    let (mut checks, mut failures, mut warnings, mut numerical_errors) = (0, 0, 0, 0);
    for &suite in &config.suites {
        log::info!("suite {}", suite.name());
        let mut cell_reports = Vec::new();
        for (ci, params) in cells(config, suite).into_iter().enumerate() {
            let results: Vec<(TrialInstance, Result<Vec<Check>>)> = (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let inst = trial_instance(config.seed, suite, ci, &params, t);
                    let res = run_trial(suite, &params, &inst, config.tol);
                    (inst, res)
                })
                .collect();
            let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
            let mut order: Vec<String> = vec![EVALUATION.to_string()];
            for (inst, res) in &results {
                match res {
                    Ok(cs) => {
                        tallies.entry(EVALUATION.into()).or_default().add(f64::INFINITY, inst, config.tol, None);
                        for c in cs {
                            if !tallies.contains_key(&c.name) {
                                order.push(c.name.clone());
                            }
                            tallies.entry(c.name.clone()).or_default().add(c.slack, inst, config.tol, None);
                            if c.slack < 0.0 && c.slack >= -config.tol {
                                log::warn!("{} {} trial {}: {} slack {:.3e}", suite.name(), params.label(), inst.trial, c.name, c.slack);
                            }
                        }
                    }
                    Err(e) => {
                        log::debug!("{} {} trial {}: {e}", suite.name(), params.label(), inst.trial);
                        if matches!(e, OneshotError::Core(c) if c.is_numerical()) {
                            numerical_errors += 1;
                        }
                        tallies.entry(EVALUATION.into()).or_default().add(f64::NEG_INFINITY, inst, config.tol, Some(e.to_string()));
                    }
                }
            }
            let mut summaries = Vec::new();
            for name in order {
                let Some(t) = tallies.remove(&name) else { continue };
                checks += t.trials;
                failures += t.fail;
                warnings += t.warn;
                let (worst_slack, worst_instance) = t.worst.expect("tally has at least one entry");
                summaries.push(CheckSummary {
                    name,
                    trials: t.trials,
                    pass: t.pass,
                    warn: t.warn,
                    fail: t.fail,
                    worst_slack,
                    worst_instance,
                    failures: t.failures,
                });
            }
            cell_reports.push(CellReport { cell: params.label(), params, checks: summaries });
        }
        suites.push(SuiteReport { suite, trials: config.trials, cells: cell_reports });
    }
    Ok(BatteryReport {
        seed: config.seed,
        trials_per_cell: config.trials,
        tolerance: config.tol,
        suites,
        checks,
        failures,
        warnings,
        numerical_errors,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
