//! Change-detecting wrappers around a stationary base policy.
//!
//! Every arm gets an adaptive-window detector over the rewards it produced
//! since the start of the current window. After each round the detectors of
//! arms with new data are scanned in ascending arm order; the first arm
//! whose observation sequence admits a split with mean gap at least
//! `epsilon_cut(|W1|, |W2|, delta)` (counts of that arm's observations)
//! triggers either a full reset ([`Mode::Reset`], ADR) or a shrink to the
//! rounds after the split ([`Mode::Shrink`], ADS).

use crate::adwin::{first_split, CutThreshold};
use crate::bandit::{ArmStats, RoundOutcome, Selection};
use crate::error::{Error, Result};
use crate::policy::{BasePolicy, Observation, Policy};
use crate::rng::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Discard the whole window and re-initialize the base policy.
    Reset,
    /// Keep the rounds after the breakpoint and rebuild the base statistics.
    Shrink,
}

/// One change detection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Detection {
    /// Round at whose end the change was detected.
    pub round: usize,
    pub arm: usize,
    /// Global round of the last observation of the detecting arm in `W1`.
    pub breakpoint: usize,
}

#[derive(Clone, Debug, Default)]
struct ArmTrace {
    rounds: Vec<usize>,
    prefix: Vec<f64>,
    values: Vec<f64>,
}

impl ArmTrace {
    fn new() -> Self {
        Self {
            rounds: Vec::new(),
            prefix: vec![0.0],
            values: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn push(&mut self, round: usize, x: f64) {
        let last = self.prefix[self.values.len()];
        self.rounds.push(round);
        self.values.push(x);
        self.prefix.push(last + x);
    }

    fn clear(&mut self) {
        self.rounds.clear();
        self.values.clear();
        self.prefix.truncate(1);
    }

    /// Drops every observation from rounds `<= breakpoint`.
    fn trim_through(&mut self, breakpoint: usize) -> bool {
        let keep_from = self.rounds.partition_point(|&r| r <= breakpoint);
        if keep_from == 0 {
            return false;
        }
        self.rounds.drain(..keep_from);
        self.values.drain(..keep_from);
        self.prefix.clear();
        self.prefix.push(0.0);
        let mut acc = 0.0;
        for &x in &self.values {
            acc += x;
            self.prefix.push(acc);
        }
        true
    }
}

/// ADR-bandit (`Mode::Reset`) or ADS-bandit (`Mode::Shrink`) around a base
/// policy.
pub struct MetaBandit {
    base: Box<dyn BasePolicy>,
    mode: Mode,
    threshold: CutThreshold,
    stride: usize,
    traces: Vec<ArmTrace>,
    dirty: Vec<bool>,
    window_start: usize,
    detections: Vec<Detection>,
}

impl MetaBandit {
    pub fn new(base: Box<dyn BasePolicy>, mode: Mode, delta: f64) -> Result<Self> {
        let k = base.num_arms();
        Ok(Self {
            base,
            mode,
            threshold: CutThreshold::new(delta)?,
            stride: 1,
            traces: vec![ArmTrace::new(); k],
            dirty: vec![false; k],
            window_start: 1,
            detections: Vec::new(),
        })
    }

    pub fn adr(base: Box<dyn BasePolicy>, delta: f64) -> Result<Self> {
        Self::new(base, Mode::Reset, delta)
    }

    pub fn ads(base: Box<dyn BasePolicy>, delta: f64) -> Result<Self> {
        Self::new(base, Mode::Shrink, delta)
    }

    /// Subsamples candidate split points; `1` keeps the scan exact.
    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Config("check stride must be at least 1".into()));
        }
        self.stride = stride;
        Ok(self)
    }

    /// Preallocates threshold terms for windows up to `horizon` observations.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.threshold.reserve(horizon);
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn delta(&self) -> f64 {
        self.threshold.delta()
    }

    pub fn base(&self) -> &dyn BasePolicy {
        self.base.as_ref()
    }

    pub fn base_stats(&self) -> &[ArmStats] {
        self.base.arm_stats()
    }

    /// First global round of the current window.
    pub fn window_start(&self) -> usize {
        self.window_start
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    /// Rewards held by arm `arm`'s detector, oldest first.
    pub fn detector_values(&self, arm: usize) -> &[f64] {
        &self.traces[arm].values
    }

    /// Global rounds of the rewards held by arm `arm`'s detector.
    pub fn detector_rounds(&self, arm: usize) -> &[usize] {
        &self.traces[arm].rounds
    }

    fn local_round(&self, t: usize) -> usize {
        debug_assert!(t >= self.window_start);
        t - self.window_start + 1
    }

    fn scan(&mut self) -> Option<(usize, usize)> {
        for arm in 0..self.traces.len() {
            if !self.dirty[arm] {
                continue;
            }
            self.dirty[arm] = false;
            let trace = &self.traces[arm];
            if trace.len() < 2 {
                continue;
            }
            self.threshold.reserve(trace.len());
            if let Some(split) = first_split(&trace.prefix, &self.threshold, self.stride) {
                let breakpoint = trace.rounds[split.prefix_len - 1];
                return Some((arm, breakpoint));
            }
        }
        None
    }

    fn clear_window(&mut self, next_start: usize) {
        for trace in &mut self.traces {
            trace.clear();
        }
        self.dirty.fill(false);
        self.window_start = next_start;
    }

    fn shrink_to_after(&mut self, breakpoint: usize) {
        for (trace, dirty) in self.traces.iter_mut().zip(self.dirty.iter_mut()) {
            if trace.trim_through(breakpoint) {
                *dirty = true;
            }
        }
        self.window_start = breakpoint + 1;
        let mut retained: Vec<Observation> = self
            .traces
            .iter()
            .enumerate()
            .flat_map(|(arm, trace)| {
                trace
                    .rounds
                    .iter()
                    .zip(&trace.values)
                    .map(move |(&round, &reward)| Observation {
                        round: round - breakpoint,
                        arm,
                        reward,
                    })
            })
            .collect();
        retained.sort_by_key(|o| (o.round, o.arm));
        self.base.rebuild(&retained);
    }
}

impl Policy for MetaBandit {
    fn name(&self) -> String {
        let prefix = match self.mode {
            Mode::Reset => "adr",
            Mode::Shrink => "ads",
        };
        format!("{prefix}-{}", self.base.name())
    }

    fn num_arms(&self) -> usize {
        self.base.num_arms()
    }

    fn plays(&self) -> usize {
        self.base.plays()
    }

    fn select(&mut self, t: usize, rng: &mut RunRng) -> Selection {
        let local = self.local_round(t);
        self.base.select(local, rng)
    }

    fn update(&mut self, t: usize, outcome: &RoundOutcome) {
        let local = self.local_round(t);
        self.base.update(local, outcome);
        for &(arm, x) in &outcome.rewards {
            self.traces[arm].push(t, x);
            self.dirty[arm] = true;
        }
        if let Some((arm, breakpoint)) = self.scan() {
            self.detections.push(Detection {
                round: t,
                arm,
                breakpoint,
            });
            match self.mode {
                Mode::Reset => {
                    self.base.reset();
                    self.clear_window(t + 1);
                }
                Mode::Shrink => self.shrink_to_after(breakpoint),
            }
        }
    }

    fn reset(&mut self) {
        self.base.reset();
        self.clear_window(1);
        self.detections.clear();
    }

    fn resets(&self) -> usize {
        self.detections.len()
    }
}
