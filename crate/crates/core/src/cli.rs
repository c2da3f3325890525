//! Experiment configs, trial runners and the subcommand entry points.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{benchmark, grid_benchmark_oracle, stackelberg, BenchmarkKind, BenchmarkParams, BenchmarkReport};
use crate::engine::{run_game, GameConfig, RunTrace};
use crate::error::{Error, Result};
use crate::families::{make_canonical_instance, FamilyParams};
use crate::follower::FollowerSpec;
use crate::instance::{Instance, Player};
use crate::leader::LeaderSpec;
use crate::lipschitz::lipschitz_constant;
use crate::metrics::{checkpoints, fit_exponent, mean_stderr, regret_curve, sampled_regret};

/// Where the game comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Family {
        family: String,
        #[serde(default)]
        params: FamilyParams,
    },
    Path {
        path: PathBuf,
    },
}

impl InstanceSource {
    pub fn family(name: &str, params: FamilyParams) -> Self {
        InstanceSource::Family {
            family: name.to_string(),
            params,
        }
    }

    pub fn load(&self, delta: Option<f64>) -> Result<Instance> {
        match self {
            InstanceSource::Family { family, params } => {
                let mut params = params.clone();
                if delta.is_some() {
                    params.delta = delta;
                }
                make_canonical_instance(family, &params)
            }
            InstanceSource::Path { path } => {
                if delta.is_some() {
                    return Err(Error::InvalidParam("delta only applies to canonical families".into()));
                }
                Instance::load(path)
            }
        }
    }
}

/// `delta(T) = kappa * T^-power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaCoupling {
    pub kappa: f64,
    pub power: f64,
}

impl DeltaCoupling {
    pub fn delta(&self, horizon: u64) -> f64 {
        self.kappa * (horizon as f64).powf(-self.power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub horizons: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaCoupling>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSelection {
    #[serde(default = "all_kinds")]
    pub kinds: Vec<BenchmarkKind>,
    #[serde(default)]
    pub params: BenchmarkParams,
}

fn all_kinds() -> Vec<BenchmarkKind> {
    BenchmarkKind::ALL.to_vec()
}

impl Default for BenchmarkSelection {
    fn default() -> Self {
        Self {
            kinds: all_kinds(),
            params: BenchmarkParams::default(),
        }
    }
}

impl BenchmarkSelection {
    pub fn evaluate(&self, inst: &Instance) -> Result<Vec<(BenchmarkKind, BenchmarkReport)>> {
        self.kinds.iter().map(|&k| Ok((k, benchmark(inst, k, &self.params)?))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub leader: LeaderSpec,
    pub follower: FollowerSpec,
    pub game: GameConfig,
    #[serde(default)]
    pub benchmarks: BenchmarkSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Score realized rewards instead of means.
    #[serde(default)]
    pub sampled_rewards: bool,
    /// Write per-round traces from `simulate`.
    #[serde(default = "yes")]
    pub traces: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Parse {
            origin: format!("config at line {}", source.line()),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse { origin, source } => Error::Parse {
                origin: format!("{} ({origin})", path.as_ref().display()),
                source,
            },
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        self.benchmarks.params.validate()?;
        self.leader.check_info(self.game.info)?;
        if let Some(s) = &self.sweep {
            if s.horizons.is_empty() {
                return Err(Error::InvalidParam("sweep needs at least one horizon".into()));
            }
            if s.delta.is_some() && !matches!(self.instance, InstanceSource::Family { .. }) {
                return Err(Error::InvalidParam("delta coupling needs a canonical family".into()));
            }
        }
        Ok(())
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
}

impl RunOptions {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.game.base_seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(gamma) = self.gamma {
            cfg.benchmarks.params.gamma = gamma;
        }
        if let (Some(delta), InstanceSource::Family { params, .. }) = (self.delta, &mut cfg.instance) {
            params.delta = Some(delta);
        }
    }
}

/// One row of the regret summary CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub trial: u64,
    pub player: Player,
    pub benchmark: BenchmarkKind,
    pub beta: f64,
    pub regret: f64,
}

/// Runs `f` on a pool with `jobs` threads (0 for the default).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Plays trials `0..cfg.trials` in parallel and returns them in trial order.
pub fn run_trials(inst: &Instance, leader: &LeaderSpec, follower: &FollowerSpec, cfg: &GameConfig) -> Result<Vec<RunTrace>> {
    (0..cfg.trials).into_par_iter().map(|k| run_game(inst, leader, follower, cfg, k)).collect()
}

/// Regret rows for one trace at the power-of-two checkpoints.
pub fn trace_regrets(
    trace: &RunTrace,
    benchmarks: &[(BenchmarkKind, BenchmarkReport)],
    sampled: bool,
) -> Vec<RegretRow> {
    let at = checkpoints(trace.horizon());
    let mut rows = Vec::new();
    for player in Player::BOTH {
        for (kind, report) in benchmarks {
            let beta = report.beta(player);
            let curve = if sampled {
                at.iter()
                    .map(|&t| {
                        let prefix = RunTrace {
                            trial: trace.trial,
                            rounds: trace.rounds[..t as usize].to_vec(),
                            leader_pulls: Vec::new(),
                            pair_pulls: Vec::new(),
                        };
                        sampled_regret(&prefix, beta, player)
                    })
                    .collect()
            } else {
                regret_curve(trace, beta, player, &at)
            };
            for (&t, regret) in at.iter().zip(curve) {
                rows.push(RegretRow {
                    horizon: t,
                    trial: trace.trial,
                    player,
                    benchmark: *kind,
                    beta,
                    regret,
                });
            }
        }
    }
    rows
}

pub struct SimulationOutput {
    pub instance: Instance,
    pub benchmarks: Vec<(BenchmarkKind, BenchmarkReport)>,
    /// Empty unless traces were requested.
    pub traces: Vec<RunTrace>,
    pub summary: Vec<RegretRow>,
}

impl SimulationOutput {
    /// Mean final regret over trials.
    pub fn mean_regret(&self, player: Player, kind: BenchmarkKind) -> f64 {
        let horizon = self.summary.iter().map(|r| r.horizon).max().unwrap_or(0);
        let xs: Vec<f64> = self
            .summary
            .iter()
            .filter(|r| r.horizon == horizon && r.player == player && r.benchmark == kind)
            .map(|r| r.regret)
            .collect();
        mean_stderr(&xs).mean
    }
}

fn gamma_warning(inst: &Instance, horizon: u64, gamma: f64) {
    let floor = ((inst.n_leader() * inst.n_follower()) as f64 / horizon as f64).cbrt();
    if gamma < floor {
        log::warn!("gamma = {gamma} is below (|A||B|/T)^(1/3) = {floor:.4} at T = {horizon}");
    }
}

/// Runs every trial of the config and scores it against each benchmark.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    let inst = cfg.instance.load(None)?;
    gamma_warning(&inst, cfg.game.horizon, cfg.benchmarks.params.gamma);
    let benchmarks = cfg.benchmarks.evaluate(&inst)?;
    let per_trial: Vec<(Option<RunTrace>, Vec<RegretRow>)> = (0..cfg.game.trials)
        .into_par_iter()
        .map(|k| {
            let trace = run_game(&inst, &cfg.leader, &cfg.follower, &cfg.game, k)?;
            let rows = trace_regrets(&trace, &benchmarks, cfg.sampled_rewards);
            Ok((cfg.traces.then_some(trace), rows))
        })
        .collect::<Result<_>>()?;
    let mut traces = Vec::new();
    let mut summary = Vec::new();
    for (trace, rows) in per_trial {
        traces.extend(trace);
        summary.extend(rows);
    }
    Ok(SimulationOutput {
        instance: inst,
        benchmarks,
        traces,
        summary,
    })
}

/// Mean final regret for one horizon of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub delta: Option<f64>,
    /// `leader`, `follower` or `max` (the larger of the two means).
    pub player: String,
    pub benchmark: BenchmarkKind,
    pub beta: f64,
    pub mean_regret: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub player: String,
    pub benchmark: BenchmarkKind,
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub fits: Vec<SweepFit>,
}

impl SweepOutput {
    pub fn fit(&self, player: &str, kind: BenchmarkKind) -> Option<&SweepFit> {
        self.fits.iter().find(|f| f.player == player && f.benchmark == kind)
    }
}

/// Runs the config once per sweep horizon, re-deriving the instance under a
/// delta coupling and re-resolving horizon-dependent policy lengths.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("config has no sweep section".into()))?;
    let mut points = Vec::new();
    for &horizon in &spec.horizons {
        let delta = spec.delta.map(|c| c.delta(horizon));
        let inst = cfg.instance.load(delta)?;
        gamma_warning(&inst, horizon, cfg.benchmarks.params.gamma);
        let benchmarks = cfg.benchmarks.evaluate(&inst)?;
        let game = GameConfig {
            horizon,
            ..cfg.game.clone()
        };
        let finals: Vec<Vec<f64>> = (0..game.trials)
            .into_par_iter()
            .map(|k| {
                let trace = run_game(&inst, &cfg.leader, &cfg.follower, &game, k)?;
                let mut out = Vec::new();
                for player in Player::BOTH {
                    for (_, report) in &benchmarks {
                        let beta = report.beta(player);
                        out.push(if cfg.sampled_rewards {
                            sampled_regret(&trace, beta, player)
                        } else {
                            regret_curve(&trace, beta, player, &[horizon])[0]
                        });
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let nk = benchmarks.len();
        for (j, (kind, report)) in benchmarks.iter().enumerate() {
            let mut means = Vec::new();
            for (p, player) in Player::BOTH.into_iter().enumerate() {
                let xs: Vec<f64> = finals.iter().map(|f| f[p * nk + j]).collect();
                let ms = mean_stderr(&xs);
                points.push(SweepPoint {
                    horizon,
                    delta,
                    player: player.to_string(),
                    benchmark: *kind,
                    beta: report.beta(player),
                    mean_regret: ms.mean,
                    stderr: ms.stderr,
                });
                means.push((ms, report.beta(player)));
            }
            let (best, beta) = if means[0].0.mean >= means[1].0.mean { &means[0] } else { &means[1] };
            points.push(SweepPoint {
                horizon,
                delta,
                player: "max".into(),
                benchmark: *kind,
                beta: *beta,
                mean_regret: best.mean,
                stderr: best.stderr,
            });
        }
    }
    let mut fits = Vec::new();
    for player in ["leader", "follower", "max"] {
        for &kind in &cfg.benchmarks.kinds {
            let pts: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.player == player && p.benchmark == kind)
                .map(|p| (p.horizon as f64, p.mean_regret))
                .collect();
            match fit_exponent(&pts) {
                Ok(f) => fits.push(SweepFit {
                    player: player.into(),
                    benchmark: kind,
                    slope: f.slope,
                    stderr: f.stderr,
                    intercept: f.intercept,
                    points: f.used,
                }),
                Err(e) => log::warn!("no exponent for {player}/{kind}: {e}"),
            }
        }
    }
    Ok(SweepOutput { points, fits })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `traces.csv` (with a trial column) and `regret.csv`.
pub fn write_simulation(dir: &Path, out: &SimulationOutput) -> Result<()> {
    create_dir(dir)?;
    if !out.traces.is_empty() {
        let path = dir.join("traces.csv");
        let mut w = csv_writer(&path)?;
        for (i, trace) in out.traces.iter().enumerate() {
            trace.write_csv(&out.instance, &mut w, true, i == 0)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    write_rows(&dir.join("regret.csv"), &out.summary)
}

/// Writes `sweep.csv` and `sweep_fit.csv`.
pub fn write_sweep(dir: &Path, out: &SweepOutput) -> Result<()> {
    create_dir(dir)?;
    write_rows(&dir.join("sweep.csv"), &out.points)?;
    write_rows(&dir.join("sweep_fit.csv"), &out.fits)
}

fn benchmark_table(inst: &Instance, params: &BenchmarkParams) -> Result<String> {
    let mut s = String::new();
    let st = stackelberg(inst);
    writeln!(
        s,
        "stackelberg: a* = {}, b* = {}, beta1 = {}, beta2 = {}",
        inst.leader_actions()[st.a_star],
        inst.follower_actions()[st.b_star],
        st.beta1_orig,
        st.beta2_orig
    )
    .unwrap();
    writeln!(s, "{:<16} {:>12} {:>12} {:>12} {:>12}", "benchmark", "beta1", "beta2", "eps1*", "eps2*").unwrap();
    for kind in BenchmarkKind::ALL {
        let r = benchmark(inst, kind, params)?;
        writeln!(
            s,
            "{:<16} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            kind.name(),
            r.beta1,
            r.beta2,
            r.eps1_star,
            r.eps2_star
        )
        .unwrap();
    }
    Ok(s)
}

/// Builds a canonical instance, optionally saves it, and returns a report.
pub fn cmd_instances(family: &str, params: &FamilyParams, bench: &BenchmarkParams, out: Option<&Path>) -> Result<String> {
    bench.validate()?;
    let inst = make_canonical_instance(family, params)?;
    if let Some(path) = out {
        inst.save(path)?;
    }
    let mut s = inst.to_json();
    s.push('\n');
    s.push_str(&benchmark_table(&inst, bench)?);
    Ok(s)
}

/// Benchmarks an instance document and returns the report text.
pub fn cmd_bench(path: &Path, params: &BenchmarkParams, grid_oracle: bool) -> Result<String> {
    params.validate()?;
    let inst = Instance::load(path)?;
    let mut s = benchmark_table(&inst, params)?;
    writeln!(s, "lipschitz constant L* = {}", lipschitz_constant(&inst)).unwrap();
    if grid_oracle {
        let resolution = 1e-4;
        writeln!(s, "grid cross-check (resolution {resolution}):").unwrap();
        for kind in BenchmarkKind::ALL {
            let exact = benchmark(&inst, kind, params)?;
            let grid = grid_benchmark_oracle(&inst, kind, params, resolution)?;
            let gap = (exact.beta1 - grid.beta1).abs().max((exact.beta2 - grid.beta2).abs());
            writeln!(s, "{:<16} grid beta1 = {:.6}, beta2 = {:.6}, max gap = {gap:.2e}", kind.name(), grid.beta1, grid.beta2)
                .unwrap();
        }
    }
    Ok(s)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Loads a config, runs all trials and writes CSVs. Returns the report text.
pub fn cmd_simulate(config: &Path, opts: &RunOptions) -> Result<String> {
    let mut cfg = ExperimentConfig::load(config)?;
    opts.apply(&mut cfg);
    let out = with_jobs(opts.jobs, || simulate(&cfg))?;
    let dir = out_dir(&cfg);
    write_simulation(&dir, &out)?;
    let mut s = String::new();
    writeln!(s, "{} trials of T = {} written to {}", cfg.game.trials, cfg.game.horizon, dir.display()).unwrap();
    for (kind, _) in &out.benchmarks {
        writeln!(
            s,
            "{:<16} mean R1 = {:>12.3}  mean R2 = {:>12.3}",
            kind.name(),
            out.mean_regret(Player::Leader, *kind),
            out.mean_regret(Player::Follower, *kind)
        )
        .unwrap();
    }
    Ok(s)
}

/// Loads a config, runs the horizon sweep and writes CSVs. Returns the report text.
pub fn cmd_sweep(config: &Path, opts: &RunOptions) -> Result<String> {
    let mut cfg = ExperimentConfig::load(config)?;
    opts.apply(&mut cfg);
    let out = with_jobs(opts.jobs, || sweep(&cfg))?;
    let dir = out_dir(&cfg);
    write_sweep(&dir, &out)?;
    let mut s = String::new();
    writeln!(s, "sweep written to {}", dir.display()).unwrap();
    for f in &out.fits {
        writeln!(s, "{:<9} {:<16} slope = {:.3} +- {:.3}", f.player, f.benchmark.name(), f.slope, f.stderr).unwrap();
    }
    Ok(s)
}
