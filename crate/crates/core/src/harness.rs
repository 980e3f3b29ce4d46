//! Experiment runner: seeded independent runs over synthetic or replayed
//! environments, metric recording at a fixed cadence, aggregation across
//! runs and CSV output.
//!
//! Runs are executed on the rayon pool and merged by run id, so results do
//! not depend on scheduling. Run `r` uses seed `base_seed + r`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::adwin::Adwin;
use crate::bandit::{regret_step, top_l, RoundOutcome, Selection};
use crate::base::{EliminationUcb, KlUcb, ThompsonSampling};
use crate::baselines::{
    DiscountedUcb, RestartingExp3, SlidingWindowTs, DUCB_DEFAULT_GAMMA, REXP3_DEFAULT_BATCH,
    SWTS_DEFAULT_WINDOW,
};
use crate::env::{load_log, EnvKind, ReplayLog, SyntheticEnv};
use crate::error::{Error, Result};
use crate::meta::{MetaBandit, Mode};
use crate::policy::{BasePolicy, Policy};
use crate::rng::{bernoulli, run_rng, RunRng};

/// Default change-detection confidence for the meta-bandits.
pub const DEFAULT_DELTA: f64 = 0.001;

#[derive(Clone, Debug, PartialEq)]
pub enum EnvSpec {
    Synthetic {
        kind: EnvKind,
        num_arms: usize,
        horizon: usize,
    },
    Replay {
        path: PathBuf,
        num_arms: Option<usize>,
    },
}

impl EnvSpec {
    pub fn synthetic(kind: EnvKind, num_arms: usize, horizon: usize) -> Self {
        EnvSpec::Synthetic {
            kind,
            num_arms,
            horizon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseKind {
    Ts,
    KlUcb,
    EliminationUcb,
}

impl BaseKind {
    fn as_str(self) -> &'static str {
        match self {
            BaseKind::Ts => "ts",
            BaseKind::KlUcb => "klucb",
            BaseKind::EliminationUcb => "eucb",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ts" => Some(BaseKind::Ts),
            "klucb" | "kl-ucb" => Some(BaseKind::KlUcb),
            "eucb" | "e-ucb" | "elim" => Some(BaseKind::EliminationUcb),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    Base(BaseKind),
    Meta(Mode, BaseKind),
    DiscountedUcb,
    SlidingWindowTs,
    RestartingExp3,
    /// Plays the true top-L arms of a synthetic environment.
    Oracle,
}

/// Hyperparameters; unset entries take the documented defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hyperparams {
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub window: Option<usize>,
    pub batch: Option<usize>,
    pub stride: Option<usize>,
}

impl Hyperparams {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Config(format!("invalid value '{value}' for parameter '{key}'"));
        match key {
            "delta" => self.delta = Some(parse_delta(value)?),
            "gamma" => self.gamma = Some(value.parse().map_err(|_| bad())?),
            "window" | "w" => self.window = Some(value.parse().map_err(|_| bad())?),
            "batch" | "delta_t" => self.batch = Some(value.parse().map_err(|_| bad())?),
            "stride" | "check_stride" => self.stride = Some(value.parse().map_err(|_| bad())?),
            other => return Err(Error::Config(format!("unknown parameter '{other}'"))),
        }
        Ok(())
    }
}

fn parse_delta(value: &str) -> Result<f64> {
    let delta: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("invalid delta '{value}'")))?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(delta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub params: Hyperparams,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            params: Hyperparams::default(),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.params.delta = Some(delta);
        self
    }

    pub fn name(&self) -> String {
        match self.kind {
            PolicyKind::Base(b) => b.as_str().to_string(),
            PolicyKind::Meta(Mode::Reset, b) => format!("adr-{}", b.as_str()),
            PolicyKind::Meta(Mode::Shrink, b) => format!("ads-{}", b.as_str()),
            PolicyKind::DiscountedUcb => "ducb".into(),
            PolicyKind::SlidingWindowTs => "swts".into(),
            PolicyKind::RestartingExp3 => "rexp3".into(),
            PolicyKind::Oracle => "oracle".into(),
        }
    }

    /// Instantiates the policy for `num_arms` arms, `plays` plays per round
    /// and a horizon of `horizon` rounds.
    pub fn build(&self, num_arms: usize, plays: usize, horizon: usize) -> Result<Box<dyn Policy>> {
        let p = &self.params;
        Ok(match self.kind {
            PolicyKind::Base(b) => build_base(b, num_arms, plays, horizon)?,
            PolicyKind::Meta(mode, b) => {
                let base = build_base(b, num_arms, plays, horizon)?;
                let meta = MetaBandit::new(base, mode, p.delta.unwrap_or(DEFAULT_DELTA))?
                    .with_stride(p.stride.unwrap_or(1))?
                    .with_horizon(horizon);
                Box::new(meta)
            }
            PolicyKind::DiscountedUcb => Box::new(DiscountedUcb::new(
                num_arms,
                plays,
                p.gamma.unwrap_or(DUCB_DEFAULT_GAMMA),
            )?),
            PolicyKind::SlidingWindowTs => Box::new(SlidingWindowTs::new(
                num_arms,
                plays,
                p.window.unwrap_or(SWTS_DEFAULT_WINDOW),
            )?),
            PolicyKind::RestartingExp3 => Box::new(RestartingExp3::new(
                num_arms,
                plays,
                p.batch.unwrap_or(REXP3_DEFAULT_BATCH),
            )?),
            PolicyKind::Oracle => {
                return Err(Error::Config(
                    "the oracle policy needs a synthetic environment".into(),
                ))
            }
        })
    }
}

fn build_base(
    kind: BaseKind,
    num_arms: usize,
    plays: usize,
    horizon: usize,
) -> Result<Box<dyn BasePolicy>> {
    Ok(match kind {
        BaseKind::Ts => Box::new(ThompsonSampling::new(num_arms, plays)?),
        BaseKind::KlUcb => Box::new(KlUcb::new(num_arms, plays)?),
        BaseKind::EliminationUcb => Box::new(EliminationUcb::new(num_arms, plays, horizon)?),
    })
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase();
        let kind = match name.as_str() {
            "ducb" | "d-ucb" => PolicyKind::DiscountedUcb,
            "swts" | "sw-ts" => PolicyKind::SlidingWindowTs,
            "rexp3" => PolicyKind::RestartingExp3,
            "oracle" => PolicyKind::Oracle,
            other => {
                if let Some(b) = BaseKind::parse(other) {
                    PolicyKind::Base(b)
                } else if let Some(b) = other.strip_prefix("adr-").and_then(BaseKind::parse) {
                    PolicyKind::Meta(Mode::Reset, b)
                } else if let Some(b) = other.strip_prefix("ads-").and_then(BaseKind::parse) {
                    PolicyKind::Meta(Mode::Shrink, b)
                } else {
                    return Err(Error::Config(format!("unknown policy '{s}'")));
                }
            }
        };
        Ok(PolicySpec::new(kind))
    }
}

/// Plays the best `L` arms of a synthetic environment every round.
struct OraclePolicy {
    env: SyntheticEnv,
    plays: usize,
    means: Vec<f64>,
}

impl Policy for OraclePolicy {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn num_arms(&self) -> usize {
        self.env.num_arms()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, t: usize, _rng: &mut RunRng) -> Selection {
        self.env.means_at(t, &mut self.means);
        top_l(&self.means, self.plays).expect("validated plays")
    }

    fn update(&mut self, _t: usize, _outcome: &RoundOutcome) {}

    fn reset(&mut self) {}
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub policies: Vec<PolicySpec>,
    pub plays: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// Record every `cadence` rounds; defaults to `max(1, T / 1000)`.
    pub cadence: Option<usize>,
    /// Keep the full per-round selection trace in each record.
    pub keep_trace: bool,
}

impl ExperimentConfig {
    pub fn new(env: EnvSpec, policies: Vec<PolicySpec>) -> Self {
        Self {
            env,
            policies,
            plays: 1,
            runs: 1,
            base_seed: 0,
            cadence: None,
            keep_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.plays == 0 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("no policy given".into()));
        }
        if self.cadence == Some(0) {
            return Err(Error::Config("cadence must be at least 1".into()));
        }
        if let EnvSpec::Synthetic {
            num_arms, horizon, ..
        } = self.env
        {
            if self.plays > num_arms {
                return Err(Error::Config(format!(
                    "L = {} exceeds K = {num_arms}",
                    self.plays
                )));
            }
            if horizon == 0 {
                return Err(Error::Config("T must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Regret,
    Reward,
    Resets,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Regret => "regret",
            Metric::Reward => "reward",
            Metric::Resets => "resets",
        }
    }
}

/// Cumulative metrics at one recorded round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordRow {
    pub t: usize,
    /// Cumulative regret (synthetic) or cumulative reward (replay).
    pub value: f64,
    pub resets: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub policy: String,
    pub run: usize,
    pub seed: u64,
    pub metric: Metric,
    pub rows: Vec<RecordRow>,
    /// Rounds (global) at which the policy reset or shrank its window.
    pub reset_rounds: Vec<usize>,
    /// Policy rounds played; for replay, the matched events.
    pub rounds: usize,
    /// Replay events skipped because the presented arm was not selected.
    pub skips: usize,
    pub trace: Option<Vec<Selection>>,
}

impl RunRecord {
    pub fn final_value(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.value)
    }

    pub fn final_resets(&self) -> usize {
        self.rows.last().map_or(0, |r| r.resets)
    }

    /// Cumulative value at the last recorded round `<= t`.
    pub fn value_at(&self, t: usize) -> f64 {
        self.rows
            .iter()
            .take_while(|r| r.t <= t)
            .last()
            .map_or(0.0, |r| r.value)
    }
}

fn default_cadence(length: usize) -> usize {
    (length / 1000).max(1)
}

enum LoadedEnv {
    Synthetic(SyntheticEnv),
    Replay(ReplayLog),
}

/// Executes every policy for `config.runs` seeded runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let env = match &config.env {
        EnvSpec::Synthetic {
            kind,
            num_arms,
            horizon,
        } => LoadedEnv::Synthetic(SyntheticEnv::new(*kind, *num_arms, *horizon)?),
        EnvSpec::Replay { path, num_arms } => {
            let log = load_log(path, *num_arms)?;
            if config.plays > log.num_arms() {
                return Err(Error::Config(format!(
                    "L = {} exceeds the {} arms in the log",
                    config.plays,
                    log.num_arms()
                )));
            }
            LoadedEnv::Replay(log)
        }
    };
    let mut records = Vec::with_capacity(config.policies.len() * config.runs);
    for spec in &config.policies {
        // surface construction errors once, before fanning out
        make_policy(spec, &env, config.plays)?;
        let batch: Result<Vec<RunRecord>> = (0..config.runs)
            .into_par_iter()
            .map(|run| {
                let seed = config.base_seed.wrapping_add(run as u64);
                let mut policy = make_policy(spec, &env, config.plays)?;
                let mut record = match &env {
                    LoadedEnv::Synthetic(e) => simulate(
                        e,
                        policy.as_mut(),
                        config.cadence.unwrap_or(default_cadence(e.horizon())),
                        seed,
                        config.keep_trace,
                    ),
                    LoadedEnv::Replay(log) => replay(
                        log,
                        policy.as_mut(),
                        config.cadence.unwrap_or(default_cadence(log.len())),
                        seed,
                        config.keep_trace,
                    ),
                };
                record.policy = spec.name();
                record.run = run;
                Ok(record)
            })
            .collect();
        records.extend(batch?);
    }
    Ok(records)
}

fn make_policy(spec: &PolicySpec, env: &LoadedEnv, plays: usize) -> Result<Box<dyn Policy>> {
    match (env, spec.kind) {
        (LoadedEnv::Synthetic(e), PolicyKind::Oracle) => {
            if plays > e.num_arms() {
                return Err(Error::Config("L exceeds K".into()));
            }
            Ok(Box::new(OraclePolicy {
                env: e.clone(),
                plays,
                means: Vec::new(),
            }))
        }
        (LoadedEnv::Synthetic(e), _) => spec.build(e.num_arms(), plays, e.horizon()),
        (LoadedEnv::Replay(log), _) => spec.build(log.num_arms(), plays, log.len().max(2)),
    }
}

/// One seeded run against a synthetic environment, recording cumulative
/// regret against the oracle means.
pub fn simulate(
    env: &SyntheticEnv,
    policy: &mut dyn Policy,
    cadence: usize,
    seed: u64,
    keep_trace: bool,
) -> RunRecord {
    let mut rng = run_rng(seed);
    let horizon = env.horizon();
    let cadence = cadence.max(1);
    let mut means = Vec::with_capacity(env.num_arms());
    let mut cumulative = 0.0;
    let mut rows = Vec::with_capacity(horizon / cadence + 1);
    let mut trace = keep_trace.then(|| Vec::with_capacity(horizon));
    let mut reset_rounds = Vec::new();
    let mut resets = 0;
    for t in 1..=horizon {
        let selection = policy.select(t, &mut rng);
        let outcome = env.play(&selection, t, &mut rng);
        policy.update(t, &outcome);
        env.means_at(t, &mut means);
        cumulative += regret_step(&means, &selection);
        if policy.resets() > resets {
            resets = policy.resets();
            reset_rounds.push(t);
        }
        if t % cadence == 0 || t == horizon {
            rows.push(RecordRow {
                t,
                value: cumulative,
                resets,
            });
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(selection);
        }
    }
    RunRecord {
        policy: policy.name(),
        run: 0,
        seed,
        metric: Metric::Regret,
        rows,
        reset_rounds,
        rounds: horizon,
        skips: 0,
        trace,
    }
}

/// One seeded replay of a log. The policy re-selects for every event; the
/// round advances only on a match. Rows are indexed by events consumed.
pub fn replay(
    log: &ReplayLog,
    policy: &mut dyn Policy,
    cadence: usize,
    seed: u64,
    keep_trace: bool,
) -> RunRecord {
    let mut rng = run_rng(seed);
    let cadence = cadence.max(1);
    let mut cursor = log.cursor();
    let mut cumulative = 0.0;
    let mut rows = Vec::new();
    let mut trace = keep_trace.then(Vec::new);
    let mut reset_rounds = Vec::new();
    let mut resets = 0;
    let mut round = 0;
    while !cursor.is_exhausted() {
        let selection = policy.select(round + 1, &mut rng);
        if let Some(outcome) = cursor.offer(&selection) {
            round += 1;
            policy.update(round, &outcome);
            cumulative += outcome.total_reward();
            if policy.resets() > resets {
                resets = policy.resets();
                reset_rounds.push(round);
            }
            if let Some(tr) = trace.as_mut() {
                tr.push(selection);
            }
        }
        let position = cursor.position();
        if position.is_multiple_of(cadence) || position == log.len() {
            rows.push(RecordRow {
                t: position,
                value: cumulative,
                resets,
            });
        }
    }
    RunRecord {
        policy: policy.name(),
        run: 0,
        seed,
        metric: Metric::Reward,
        rows,
        reset_rounds,
        rounds: cursor.rounds(),
        skips: cursor.skips(),
        trace,
    }
}

/// Long-format per-run CSV: `policy,run,t,metric,value`.
pub fn write_records<W: Write>(records: &[RunRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "policy,run,t,metric,value")?;
    let mut line = String::new();
    for r in records {
        for row in &r.rows {
            line.clear();
            let _ = writeln!(
                line,
                "{},{},{},{},{}",
                r.policy,
                r.run,
                row.t,
                r.metric.as_str(),
                row.value
            );
            let _ = writeln!(
                line,
                "{},{},{},{},{}",
                r.policy,
                r.run,
                row.t,
                Metric::Resets.as_str(),
                row.resets
            );
            out.write_all(line.as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub policy: String,
    pub t: usize,
    pub metric: Metric,
    pub mean: f64,
    /// Population standard deviation across runs.
    pub std: f64,
}

/// Mean and population standard deviation across runs, per
/// `(policy, t, metric)`. Policies keep their first-seen order.
pub fn aggregate(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, usize, Metric), Vec<f64>> = BTreeMap::new();
    for r in records {
        let pi = match order.iter().position(|p| *p == r.policy) {
            Some(i) => i,
            None => {
                order.push(&r.policy);
                order.len() - 1
            }
        };
        for row in &r.rows {
            groups
                .entry((pi, row.t, r.metric))
                .or_default()
                .push(row.value);
            groups
                .entry((pi, row.t, Metric::Resets))
                .or_default()
                .push(row.resets as f64);
        }
    }
    groups
        .into_iter()
        .map(|((pi, t, metric), values)| {
            let (mean, std) = mean_std(&values);
            SummaryRow {
                policy: order[pi].to_string(),
                t,
                metric,
                mean,
                std,
            }
        })
        .collect()
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Summary CSV: `policy,t,metric,mean,std`.
pub fn write_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "policy,t,metric,mean,std")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.policy,
            r.t,
            r.metric.as_str(),
            r.mean,
            r.std
        )?;
    }
    Ok(())
}

/// Writes `records` to `path` and the aggregate to `<stem>_summary.csv`
/// next to it. Returns the summary path.
pub fn write_outputs(records: &[RunRecord], path: &Path) -> Result<PathBuf> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_records(records, &mut out)?;
    out.flush()?;
    let summary_path = summary_path_for(path);
    let file = std::fs::File::create(&summary_path)?;
    let mut out = std::io::BufWriter::new(file);
    write_summary(&aggregate(records), &mut out)?;
    out.flush()?;
    Ok(summary_path)
}

pub fn summary_path_for(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}_summary.csv"))
}

/// Mean profile of a univariate test stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanProfile {
    Constant(f64),
    /// `changes` equispaced switches between `low` and `high`, starting at
    /// `low`.
    Abrupt {
        changes: usize,
        low: f64,
        high: f64,
    },
    /// Linear drift from `from` at round 1 to `to` at round `T`.
    Gradual {
        from: f64,
        to: f64,
    },
}

/// A univariate stream: either its mean itself (noiseless) or
/// Bernoulli draws of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamSpec {
    pub profile: MeanProfile,
    pub horizon: usize,
    pub bernoulli: bool,
}

impl StreamSpec {
    pub fn mean(&self, t: usize) -> f64 {
        match self.profile {
            MeanProfile::Constant(m) => m,
            MeanProfile::Abrupt { changes, low, high } => {
                // segment j covers rounds after round(j T / (M + 1))
                let segments = changes + 1;
                let seg = ((t - 1) * segments) / self.horizon;
                if seg.is_multiple_of(2) {
                    low
                } else {
                    high
                }
            }
            MeanProfile::Gradual { from, to } => {
                if self.horizon <= 1 {
                    from
                } else {
                    from + (to - from) * (t - 1) as f64 / (self.horizon - 1) as f64
                }
            }
        }
    }

    pub fn sample(&self, t: usize, rng: &mut RunRng) -> f64 {
        let m = self.mean(t);
        if self.bernoulli {
            bernoulli(rng, m)
        } else {
            m
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSample {
    /// `sum_t |estimate after round t - mu_t|`.
    pub total_error: f64,
    pub detections: usize,
}

/// Runs standalone ADWIN on `runs` seeded draws of `stream`.
pub fn adwin_error_experiment(
    stream: &StreamSpec,
    delta: f64,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<ErrorSample>> {
    Adwin::new(delta)?;
    (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = run_rng(base_seed.wrapping_add(run as u64));
            let mut adwin = Adwin::new(delta)?.with_horizon(stream.horizon);
            let mut total_error = 0.0;
            let mut detections = 0;
            for t in 1..=stream.horizon {
                let report = adwin.observe(stream.sample(t, &mut rng))?;
                detections += usize::from(report.detected);
                let estimate = adwin.estimate().expect("window is nonempty after a push");
                total_error += (estimate - stream.mean(t)).abs();
            }
            Ok(ErrorSample {
                total_error,
                detections,
            })
        })
        .collect()
}

/// Plain `key = value` experiment file. Recognised keys: `env`, `policy`
/// (comma separated), `K`, `T`, `L`, `runs`, `seed`, `delta`, `cadence`,
/// `out`, and `param.<name>` for policy hyperparameters. `#` starts a
/// comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected key = value, found '{raw}'",
                i + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(values: &[f64]) -> RunRecord {
        RunRecord {
            policy: "p".into(),
            run: 0,
            seed: 0,
            metric: Metric::Regret,
            rows: values
                .iter()
                .enumerate()
                .map(|(i, &v)| RecordRow {
                    t: i + 1,
                    value: v,
                    resets: 0,
                })
                .collect(),
            reset_rounds: vec![],
            rounds: values.len(),
            skips: 0,
            trace: None,
        }
    }

    #[test]
    fn aggregate_examples() {
        let a = record(&[1.0, 10.0]);
        let summary = aggregate(&[a.clone(), a.clone()]);
        let regret: Vec<_> = summary
            .iter()
            .filter(|r| r.metric == Metric::Regret)
            .collect();
        assert_eq!(regret[1].mean, 10.0);
        assert_eq!(regret[1].std, 0.0);

        let single = aggregate(std::slice::from_ref(&a));
        assert!(single.iter().all(|r| r.std == 0.0));

        let b = record(&[1.0, 20.0]);
        let summary = aggregate(&[a, b]);
        let last = summary
            .iter()
            .find(|r| r.t == 2 && r.metric == Metric::Regret)
            .unwrap();
        assert_eq!((last.mean, last.std), (15.0, 5.0));
    }

    #[test]
    fn policy_names_parse() {
        for name in [
            "ts",
            "klucb",
            "eucb",
            "adr-ts",
            "adr-klucb",
            "adr-eucb",
            "ads-ts",
            "ducb",
            "swts",
            "rexp3",
            "oracle",
        ] {
            assert_eq!(name.parse::<PolicySpec>().unwrap().name(), name);
        }
        assert!("adr-foo".parse::<PolicySpec>().is_err());
    }

    #[test]
    fn hyperparams_validate() {
        let mut h = Hyperparams::default();
        h.set("delta", "0.01").unwrap();
        h.set("window", "500").unwrap();
        assert_eq!(h.delta, Some(0.01));
        assert!(h.set("delta", "3").is_err());
        assert!(h.set("nope", "1").is_err());
        assert!(h.set("window", "-1").is_err());
    }

    #[test]
    fn config_validation() {
        let env = EnvSpec::synthetic(EnvKind::Stationary, 3, 10);
        let mut cfg =
            ExperimentConfig::new(env, vec![PolicySpec::new(PolicyKind::Base(BaseKind::Ts))]);
        cfg.plays = 4;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.plays = 1;
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_file_parsing() {
        let map =
            parse_config_file("env = abrupt # comment\nK=5\n\n param.delta = 0.01\n").unwrap();
        assert_eq!(map["env"], "abrupt");
        assert_eq!(map["K"], "5");
        assert_eq!(map["param.delta"], "0.01");
        assert!(parse_config_file("novalue\n").is_err());
    }

    #[test]
    fn abrupt_stream_segments() {
        let s = StreamSpec {
            profile: MeanProfile::Abrupt {
                changes: 2,
                low: 0.0,
                high: 1.0,
            },
            horizon: 9,
            bernoulli: false,
        };
        let means: Vec<f64> = (1..=9).map(|t| s.mean(t)).collect();
        assert_eq!(means, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_stream_has_zero_error() {
        let s = StreamSpec {
            profile: MeanProfile::Constant(0.5),
            horizon: 500,
            bernoulli: false,
        };
        let samples = adwin_error_experiment(&s, 0.01, 3, 0).unwrap();
        assert!(samples
            .iter()
            .all(|e| e.total_error == 0.0 && e.detections == 0));
    }

    #[test]
    fn summary_path() {
        assert_eq!(
            summary_path_for(Path::new("/tmp/x/run.csv")),
            PathBuf::from("/tmp/x/run_summary.csv")
        );
    }
}
