use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use dissent_core::matching::{read_workforce_csv, Workforce};
use dissent_core::oracle::SimConfig;
use dissent_core::{validate_params, Belief, ParamSpec, Params, Team};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

/// Parameter block of a config file; missing entries fall back to defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub r_high: Option<f64>,
    pub r_low: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub seed: Option<u64>,
    pub paths: Option<u64>,
    pub antithetic: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub random: Option<u64>,
    pub grid: Option<usize>,
}

/// Contents of a `--config` JSON file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsBlock,
    pub scenario: Option<String>,
    pub team: Option<Vec<f64>>,
    pub p_star: Option<f64>,
    pub workforce: Option<String>,
    pub workers: Option<usize>,
    pub grid_step: Option<f64>,
    pub curve_step: Option<f64>,
    #[serde(default)]
    pub sim: SimBlock,
    #[serde(default)]
    pub slack_scan: ScanBlock,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed of the random streams
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving report.json, report.txt and scenario CSV files
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format printed on stdout
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Comma-separated team priors, e.g. 1.0,0.0
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub team: Option<Vec<f64>>,
    /// Evaluator belief p★
    #[arg(long = "p-star", global = true)]
    pub p_star: Option<f64>,
    /// uniform, beta:<a>, or csv:<path>
    #[arg(long, global = true)]
    pub workforce: Option<String>,
    /// Workers drawn from an analytic workforce for discrete matching
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Monte Carlo paths
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Antithetic Monte Carlo pairs
    #[arg(long, global = true)]
    pub antithetic: bool,
    /// High return R
    #[arg(long = "r-high", global = true)]
    pub r_high: Option<f64>,
    /// Low return r
    #[arg(long = "r-low", global = true)]
    pub r_low: Option<f64>,
    /// Share of team output each member receives
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Second-period discount
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Team size N
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Grid step of the best-response search
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkforceSpec {
    Uniform,
    Beta { a: f64 },
    Csv { path: PathBuf },
}

impl WorkforceSpec {
    pub fn parse(s: &str) -> Result<WorkforceSpec> {
        if s == "uniform" {
            return Ok(WorkforceSpec::Uniform);
        }
        if let Some(a) = s.strip_prefix("beta:") {
            let a: f64 = a.parse().with_context(|| format!("workforce: bad beta shape `{a}`"))?;
            return Ok(WorkforceSpec::Beta { a });
        }
        if let Some(path) = s.strip_prefix("csv:") {
            return Ok(WorkforceSpec::Csv { path: PathBuf::from(path) });
        }
        bail!("workforce: expected uniform, beta:<a> or csv:<path>, got `{s}`")
    }

    pub fn load(&self) -> Result<Workforce> {
        Ok(match self {
            WorkforceSpec::Uniform => Workforce::Uniform,
            WorkforceSpec::Beta { a } => Workforce::symmetric_beta(*a).context("workforce")?,
            WorkforceSpec::Csv { path } => {
                let file = fs::File::open(path).with_context(|| format!("workforce: cannot open {}", path.display()))?;
                read_workforce_csv(file).with_context(|| format!("workforce {}", path.display()))?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSize {
    pub random: u64,
    pub grid: usize,
}

/// Fully resolved settings of one run; echoed into the report.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub params: ParamSpec,
    pub team: Vec<f64>,
    pub p_star: f64,
    pub workforce: WorkforceSpec,
    pub workers: usize,
    pub grid_step: f64,
    pub curve_step: f64,
    pub sim: SimConfig,
    pub slack_scan: ScanSize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl Resolved {
    pub fn params(&self) -> Result<Params> {
        Ok(validate_params(self.params)?)
    }

    pub fn team(&self) -> Result<Team> {
        Ok(Team::new(self.team.clone())?)
    }

    pub fn p_star(&self) -> Belief {
        Belief::new(self.p_star).expect("checked while resolving")
    }
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("config: cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("config: invalid JSON in {}", path.display()))
}

/// Merges defaults, the config file and the flags (flags win) and checks
/// every field.
pub fn resolve(command: &str, flags: &Overrides) -> Result<Resolved> {
    let file = match &flags.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &file.scenario {
        if s.replace('_', "-") != command {
            bail!("config: scenario `{s}` does not match the `{command}` command");
        }
    }
    let team = flags.team.clone().or(file.team).unwrap_or_else(|| vec![1.0, 0.0]);
    for (i, &p) in team.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            bail!("team[{i}] = {p} outside [0,1]");
        }
    }
    let d = ParamSpec::default();
    let explicit_n = flags.n.or(file.params.n);
    let params = ParamSpec {
        r_high: flags.r_high.or(file.params.r_high).unwrap_or(d.r_high),
        r_low: flags.r_low.or(file.params.r_low).unwrap_or(d.r_low),
        alpha: flags.alpha.or(file.params.alpha).unwrap_or(d.alpha),
        beta: flags.beta.or(file.params.beta).unwrap_or(d.beta),
        n: explicit_n.unwrap_or(team.len().max(2)),
    };
    validate_params(params).context("params")?;
    let p_star = flags.p_star.or(file.p_star).unwrap_or(0.5);
    if !(0.0..=1.0).contains(&p_star) {
        bail!("p_star = {p_star} outside [0,1]");
    }
    let workforce = WorkforceSpec::parse(flags.workforce.as_deref().or(file.workforce.as_deref()).unwrap_or("uniform"))?;
    let workers = flags.workers.or(file.workers).unwrap_or(200);
    if workers == 0 {
        bail!("workers must be positive");
    }
    let grid_step = flags.grid_step.or(file.grid_step).unwrap_or(1e-5);
    if !(grid_step > 0.0 && grid_step < 1.0) {
        bail!("grid_step = {grid_step} must lie in (0,1)");
    }
    let curve_step = file.curve_step.unwrap_or(0.01);
    if !(curve_step > 0.0 && curve_step <= 1.0) {
        bail!("curve_step = {curve_step} must lie in (0,1]");
    }
    let sim = SimConfig {
        n_paths: flags.paths.or(file.sim.paths).unwrap_or(1_000_000),
        seed: flags.seed.or(file.sim.seed).unwrap_or(42),
        antithetic: flags.antithetic || file.sim.antithetic.unwrap_or(false),
    };
    if sim.n_paths == 0 {
        bail!("paths must be positive");
    }
    let slack_scan = ScanSize {
        random: file.slack_scan.random.unwrap_or(1_000_000),
        grid: file.slack_scan.grid.unwrap_or(20),
    };
    Ok(Resolved {
        params,
        team,
        p_star,
        workforce,
        workers,
        grid_step,
        curve_step,
        sim,
        slack_scan,
        out: flags.out.clone().or(file.out),
        format: flags.format.or(file.format).unwrap_or_default(),
    })
}
