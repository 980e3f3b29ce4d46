//! Reward environments: the synthetic Bernoulli benchmarks, global-change
//! diagnostics over their oracle means, and the logged-data replay
//! evaluator.

use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use crate::bandit::{RoundOutcome, Selection};
use crate::error::{Error, Result};
use crate::rng::{bernoulli, RunRng};

/// A synthetic environment family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvKind {
    Stationary,
    Gradual,
    Abrupt,
    AbruptLocal,
}

impl EnvKind {
    pub const ALL: [EnvKind; 4] = [
        EnvKind::Stationary,
        EnvKind::Gradual,
        EnvKind::Abrupt,
        EnvKind::AbruptLocal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::Stationary => "stationary",
            EnvKind::Gradual => "gradual",
            EnvKind::Abrupt => "abrupt",
            EnvKind::AbruptLocal => "abrupt_local",
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(EnvKind::Stationary),
            "gradual" => Ok(EnvKind::Gradual),
            "abrupt" => Ok(EnvKind::Abrupt),
            "abrupt_local" | "abrupt-local" => Ok(EnvKind::AbruptLocal),
            other => Err(Error::Config(format!("unknown environment kind '{other}'"))),
        }
    }
}

/// Number of top arms that change in the abrupt-local environment.
pub const LOCAL_CHANGE_ARMS: usize = 10;

/// Synthetic environment with initial means `mu_{i,1} = (K + 1 - i) / K`
/// (1-based `i`), i.e. `(101 - i) / 100` for the standard `K = 100`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticEnv {
    kind: EnvKind,
    num_arms: usize,
    horizon: usize,
    initial: Vec<f64>,
}

impl SyntheticEnv {
    pub fn new(kind: EnvKind, num_arms: usize, horizon: usize) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::Config("environment needs at least one arm".into()));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let k = num_arms as f64;
        let initial = (0..num_arms).map(|i| (num_arms - i) as f64 / k).collect();
        Ok(Self {
            kind,
            num_arms,
            horizon,
            initial,
        })
    }

    pub fn kind(&self) -> EnvKind {
        self.kind
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `(t', t'')` with `t' = floor(T/3)`, `t'' = floor(2T/3)`; abrupt
    /// changes are active on rounds `t' + 1 ..= t''`.
    pub fn changepoints(&self) -> (usize, usize) {
        (self.horizon / 3, 2 * self.horizon / 3)
    }

    fn in_changed_segment(&self, t: usize) -> bool {
        let (first, second) = self.changepoints();
        t > first && t <= second
    }

    /// Oracle mean of 0-based arm `arm` at 1-based round `t`, without
    /// range checks.
    #[inline]
    pub fn mean_unchecked(&self, arm: usize, t: usize) -> f64 {
        let mu = self.initial[arm];
        match self.kind {
            EnvKind::Stationary => mu,
            EnvKind::Gradual => {
                let horizon = self.horizon as f64;
                let t = t as f64;
                (horizon - t + 1.0) / horizon * mu + (t - 1.0) / horizon * (1.0 - mu)
            }
            EnvKind::Abrupt => {
                if self.in_changed_segment(t) {
                    1.0 - mu
                } else {
                    mu
                }
            }
            EnvKind::AbruptLocal => {
                if arm < LOCAL_CHANGE_ARMS && self.in_changed_segment(t) {
                    0.5
                } else {
                    mu
                }
            }
        }
    }

    pub fn mean(&self, arm: usize, t: usize) -> Result<f64> {
        if arm >= self.num_arms {
            return Err(Error::Usage(format!(
                "arm {arm} out of range for {} arms",
                self.num_arms
            )));
        }
        if t == 0 || t > self.horizon {
            return Err(Error::Usage(format!(
                "round {t} outside 1..={}",
                self.horizon
            )));
        }
        Ok(self.mean_unchecked(arm, t))
    }

    pub fn means_at(&self, t: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.num_arms).map(|i| self.mean_unchecked(i, t)));
    }

    pub fn sample(&self, arm: usize, t: usize, rng: &mut RunRng) -> Result<f64> {
        Ok(bernoulli(rng, self.mean(arm, t)?))
    }

    /// Bernoulli rewards for every selected arm, drawn in ascending arm
    /// order.
    pub fn play(&self, selection: &Selection, t: usize, rng: &mut RunRng) -> RoundOutcome {
        let rewards = selection
            .arms()
            .iter()
            .map(|&a| (a, bernoulli(rng, self.mean_unchecked(a, t))))
            .collect();
        RoundOutcome {
            selection: selection.clone(),
            rewards,
        }
    }

    /// Global-change diagnostics computed over the oracle means.
    pub fn diagnose(&self) -> GlobalChangeReport {
        let mut abrupt: Option<RatioPair> = None;
        let mut gradual: Option<RatioPair> = None;
        let mut prev = Vec::new();
        let mut cur = Vec::new();
        self.means_at(1, &mut prev);
        let mut changes = vec![0.0; self.num_arms];
        for t in 1..self.horizon {
            self.means_at(t + 1, &mut cur);
            for ((c, a), b) in changes.iter_mut().zip(&prev).zip(&cur) {
                *c = (a - b).abs();
            }
            std::mem::swap(&mut prev, &mut cur);
            let max = changes.iter().copied().fold(0.0, f64::max);
            if max <= CHANGE_EPS {
                continue;
            }
            let min_all = changes.iter().copied().fold(f64::INFINITY, f64::min);
            let min_nonzero = changes
                .iter()
                .copied()
                .filter(|&c| c > CHANGE_EPS)
                .fold(f64::INFINITY, f64::min);
            let worst_abrupt = RatioPair {
                all_arms: if min_all <= CHANGE_EPS {
                    f64::INFINITY
                } else {
                    max / min_all
                },
                changing_arms: max / min_nonzero,
            };
            let worst_gradual = RatioPair {
                all_arms: if min_all <= CHANGE_EPS {
                    0.0
                } else {
                    min_all / max
                },
                changing_arms: min_nonzero / max,
            };
            abrupt = Some(match abrupt {
                None => worst_abrupt,
                Some(r) => RatioPair {
                    all_arms: r.all_arms.max(worst_abrupt.all_arms),
                    changing_arms: r.changing_arms.max(worst_abrupt.changing_arms),
                },
            });
            gradual = Some(match gradual {
                None => worst_gradual,
                Some(r) => RatioPair {
                    all_arms: r.all_arms.min(worst_gradual.all_arms),
                    changing_arms: r.changing_arms.min(worst_gradual.changing_arms),
                },
            });
        }
        GlobalChangeReport { abrupt, gradual }
    }
}

const CHANGE_EPS: f64 = 1e-12;

/// A ratio evaluated over all arms and over the arms that actually change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioPair {
    pub all_arms: f64,
    pub changing_arms: f64,
}

/// `None` means there is no round with a change, so the ratio does not
/// apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalChangeReport {
    /// `max |change_j| / |change_i|` over arms and change rounds (>= 1).
    pub abrupt: Option<RatioPair>,
    /// `min |change_i| / |change_j|` over arms and change rounds (in [0, 1]).
    pub gradual: Option<RatioPair>,
}

pub fn global_change_ratio(env: &SyntheticEnv) -> Option<RatioPair> {
    env.diagnose().abrupt
}

pub fn gradual_ratio(env: &SyntheticEnv) -> Option<RatioPair> {
    env.diagnose().gradual
}

/// One logged event: arm `arm` (0-based) was presented at time `t` and
/// produced `reward`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogEvent {
    pub t: u64,
    pub arm: usize,
    pub reward: u8,
}

/// Logged bandit feedback with a fixed arm vocabulary `0..num_arms`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplayLog {
    events: Vec<LogEvent>,
    num_arms: usize,
}

impl ReplayLog {
    pub fn new(events: Vec<LogEvent>, num_arms: usize) -> Result<Self> {
        for (i, e) in events.iter().enumerate() {
            if e.arm >= num_arms {
                return Err(Error::Schema {
                    line: i + 2,
                    message: format!("arm id {} outside 1..={num_arms}", e.arm + 1),
                });
            }
            if e.reward > 1 {
                return Err(Error::Schema {
                    line: i + 2,
                    message: format!("reward {} is not binary", e.reward),
                });
            }
        }
        if let Some(i) = events.windows(2).position(|w| w[1].t < w[0].t) {
            return Err(Error::Schema {
                line: i + 3,
                message: "events are not time-ordered".into(),
            });
        }
        Ok(Self { events, num_arms })
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn cursor(&self) -> ReplayCursor<'_> {
        ReplayCursor {
            log: self,
            position: 0,
            rounds: 0,
            skips: 0,
        }
    }

    /// Writes the log as `t,arm,reward` CSV with 1-based arm ids.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,arm,reward")?;
        for e in &self.events {
            writeln!(out, "{},{},{}", e.t, e.arm + 1, e.reward)?;
        }
        Ok(())
    }
}

/// Parses a `t,arm,reward` CSV log.
///
/// When `num_arms` is `None` the vocabulary is `1..=max arm id` seen in the
/// file; otherwise ids above `num_arms` are schema errors.
pub fn parse_log<R: BufRead>(reader: R, num_arms: Option<usize>) -> Result<ReplayLog> {
    let mut events = Vec::new();
    let mut saw_header = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if !saw_header {
            if line.trim() != "t,arm,reward" {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header 't,arm,reward', found '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let parse_err = |what: &str, raw: &str| Error::Parse {
            line: line_no,
            message: format!("invalid {what} '{raw}'"),
        };
        let t: u64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err("t", fields[0]))?;
        let arm: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| parse_err("arm", fields[1]))?;
        let reward: u8 = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err("reward", fields[2]))?;
        if arm == 0 {
            return Err(Error::Schema {
                line: line_no,
                message: "arm ids start at 1".into(),
            });
        }
        if let Some(k) = num_arms {
            if arm > k {
                return Err(Error::Schema {
                    line: line_no,
                    message: format!("unknown arm id {arm} (vocabulary 1..={k})"),
                });
            }
        }
        if reward > 1 {
            return Err(Error::Schema {
                line: line_no,
                message: format!("reward {reward} is not binary"),
            });
        }
        if let Some(prev) = events.last().map(|e: &LogEvent| e.t) {
            if t < prev {
                return Err(Error::Schema {
                    line: line_no,
                    message: format!("time {t} precedes previous event at {prev}"),
                });
            }
        }
        events.push(LogEvent {
            t,
            arm: arm - 1,
            reward,
        });
    }
    let k = num_arms.unwrap_or_else(|| events.iter().map(|e| e.arm + 1).max().unwrap_or(0));
    ReplayLog::new(events, k)
}

pub fn load_log(path: impl AsRef<Path>, num_arms: Option<usize>) -> Result<ReplayLog> {
    let file = std::fs::File::open(path)?;
    parse_log(std::io::BufReader::new(file), num_arms)
}

/// Replay position within a log.
///
/// An event matches when its presented arm is one of the selected arms;
/// only that arm's reward is revealed. Non-matching events are skipped
/// without advancing the policy.
#[derive(Clone, Debug)]
pub struct ReplayCursor<'a> {
    log: &'a ReplayLog,
    position: usize,
    rounds: usize,
    skips: usize,
}

impl ReplayCursor<'_> {
    /// Consumes a single event. Returns the outcome when the presented arm
    /// is in `selection`, `None` on a skip or when the log is exhausted.
    pub fn offer(&mut self, selection: &Selection) -> Option<RoundOutcome> {
        let event = self.log.events.get(self.position)?;
        self.position += 1;
        if selection.contains(event.arm) {
            self.rounds += 1;
            Some(RoundOutcome {
                selection: selection.clone(),
                rewards: vec![(event.arm, f64::from(event.reward))],
            })
        } else {
            self.skips += 1;
            None
        }
    }

    /// Consumes events until one matches `selection`. Returns `None` once
    /// the log is exhausted.
    pub fn replay_step(&mut self, selection: &Selection) -> Option<RoundOutcome> {
        while !self.is_exhausted() {
            if let Some(outcome) = self.offer(selection) {
                return Some(outcome);
            }
        }
        None
    }

    /// Events consumed so far.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn skips(&self) -> usize {
        self.skips
    }

    pub fn is_exhausted(&self) -> bool {
        self.position >= self.log.events.len()
    }
}

/// Log where each event presents an arm uniformly at random and rewards
/// follow `env`'s oracle means at the event's round.
pub fn synthesize_log(env: &SyntheticEnv, rng: &mut RunRng) -> ReplayLog {
    use rand::Rng;
    let events = (1..=env.horizon())
        .map(|t| {
            let arm = rng.random_range(0..env.num_arms());
            let reward = bernoulli(rng, env.mean_unchecked(arm, t)) as u8;
            LogEvent {
                t: t as u64,
                arm,
                reward,
            }
        })
        .collect();
    ReplayLog {
        events,
        num_arms: env.num_arms(),
    }
}
