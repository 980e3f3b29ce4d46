use crate::bandit::{ArmStats, RoundOutcome, Selection};
use crate::rng::RunRng;

/// An arm-selection algorithm driven one round at a time:
/// `select(t)`, then `update(t, outcome)` with the revealed rewards.
///
/// Rounds are 1-based. A policy only draws randomness inside `select`.
pub trait Policy: Send {
    fn name(&self) -> String;

    fn num_arms(&self) -> usize;

    /// Arms selected per round (`L`).
    fn plays(&self) -> usize;

    fn select(&mut self, t: usize, rng: &mut RunRng) -> Selection;

    fn update(&mut self, t: usize, outcome: &RoundOutcome);

    /// Back to the freshly constructed state.
    fn reset(&mut self);

    /// Number of times the policy discarded its memory. Zero for policies
    /// without change detection.
    fn resets(&self) -> usize {
        0
    }
}

/// One retained reward, tagged with the round it was observed in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub round: usize,
    pub arm: usize,
    pub reward: f64,
}

/// A stationary policy that can be wrapped by a change-detecting
/// meta-algorithm.
pub trait BasePolicy: Policy {
    /// Per-arm statistics over the current window.
    fn arm_stats(&self) -> &[ArmStats];

    /// Resets, then recomputes all statistics from `retained`, whose
    /// `round` fields are already expressed in the policy's own clock.
    fn rebuild(&mut self, retained: &[Observation]);
}
