//! Stationary base policies: multiple-play Thompson sampling, multiple-play
//! KL-UCB and Elimination-UCB.

use crate::bandit::{kl_ucb_index, top_indices, top_l, ArmStats, RoundOutcome, Selection};
use crate::error::{Error, Result};
use crate::policy::{BasePolicy, Observation, Policy};
use crate::rng::{sample_beta, RunRng};

fn check_shape(num_arms: usize, plays: usize) -> Result<()> {
    if num_arms == 0 || plays == 0 || plays > num_arms {
        return Err(Error::Config(format!(
            "need 1 <= L <= K, got K = {num_arms}, L = {plays}"
        )));
    }
    Ok(())
}

fn record_all(stats: &mut [ArmStats], outcome: &RoundOutcome) {
    for &(arm, x) in &outcome.rewards {
        stats[arm].record(x);
    }
}

/// Multiple-play Thompson sampling with Beta(1, 1) priors.
#[derive(Clone, Debug)]
pub struct ThompsonSampling {
    plays: usize,
    stats: Vec<ArmStats>,
    theta: Vec<f64>,
}

impl ThompsonSampling {
    pub fn new(num_arms: usize, plays: usize) -> Result<Self> {
        check_shape(num_arms, plays)?;
        Ok(Self {
            plays,
            stats: vec![ArmStats::default(); num_arms],
            theta: vec![0.0; num_arms],
        })
    }

    /// The most recent posterior draws, one per arm.
    pub fn samples(&self) -> &[f64] {
        &self.theta
    }
}

/// Draws `theta_i ~ Beta(S_i + 1, N_i - S_i + 1)` in ascending arm order.
pub(crate) fn draw_posteriors(
    rng: &mut RunRng,
    successes: impl Iterator<Item = (f64, f64)>,
    theta: &mut [f64],
) {
    for ((s, n), slot) in successes.zip(theta.iter_mut()) {
        *slot = sample_beta(rng, s + 1.0, n - s + 1.0);
    }
}

impl Policy for ThompsonSampling {
    fn name(&self) -> String {
        "ts".into()
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, _t: usize, rng: &mut RunRng) -> Selection {
        draw_posteriors(
            rng,
            self.stats.iter().map(|s| (s.successes, s.pulls as f64)),
            &mut self.theta,
        );
        top_l(&self.theta, self.plays).expect("validated at construction")
    }

    fn update(&mut self, _t: usize, outcome: &RoundOutcome) {
        record_all(&mut self.stats, outcome);
    }

    fn reset(&mut self) {
        self.stats.fill(ArmStats::default());
        self.theta.fill(0.0);
    }
}

impl BasePolicy for ThompsonSampling {
    fn arm_stats(&self) -> &[ArmStats] {
        &self.stats
    }

    fn rebuild(&mut self, retained: &[Observation]) {
        self.reset();
        for obs in retained {
            self.stats[obs.arm].record(obs.reward);
        }
    }
}

/// Multiple-play KL-UCB with exploration budget `ln(t / N_i)`.
#[derive(Clone, Debug)]
pub struct KlUcb {
    plays: usize,
    stats: Vec<ArmStats>,
    index: Vec<f64>,
}

impl KlUcb {
    pub fn new(num_arms: usize, plays: usize) -> Result<Self> {
        check_shape(num_arms, plays)?;
        Ok(Self {
            plays,
            stats: vec![ArmStats::default(); num_arms],
            index: vec![1.0; num_arms],
        })
    }

    /// Indices computed by the most recent `select`.
    pub fn indices(&self) -> &[f64] {
        &self.index
    }
}

impl Policy for KlUcb {
    fn name(&self) -> String {
        "klucb".into()
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, t: usize, _rng: &mut RunRng) -> Selection {
        for (u, s) in self.index.iter_mut().zip(&self.stats) {
            let mu = if s.pulls == 0 { 0.0 } else { s.mean() };
            *u = kl_ucb_index(mu, s.pulls as usize, t);
        }
        top_l(&self.index, self.plays).expect("validated at construction")
    }

    fn update(&mut self, _t: usize, outcome: &RoundOutcome) {
        record_all(&mut self.stats, outcome);
    }

    fn reset(&mut self) {
        self.stats.fill(ArmStats::default());
        self.index.fill(1.0);
    }
}

impl BasePolicy for KlUcb {
    fn arm_stats(&self) -> &[ArmStats] {
        &self.stats
    }

    fn rebuild(&mut self, retained: &[Observation]) {
        self.reset();
        for obs in retained {
            self.stats[obs.arm].record(obs.reward);
        }
    }
}

/// Elimination-UCB: round-robin over a shrinking candidate set of the best
/// arm, with the remaining `L - 1` plays filled by UCB with confidence
/// radius `sqrt(ln(T^4) / (2 N_i))`.
///
/// Only the round-robin draws (`i = k(t)` and `i` selected) feed the
/// monitoring statistics used for elimination.
#[derive(Clone, Debug)]
pub struct EliminationUcb {
    plays: usize,
    horizon: usize,
    log_t4: f64,
    stats: Vec<ArmStats>,
    candidates: Vec<bool>,
    candidate_count: usize,
    ucb: Vec<f64>,
    eliminations: Vec<(usize, usize)>,
}

impl EliminationUcb {
    pub fn new(num_arms: usize, plays: usize, horizon: usize) -> Result<Self> {
        check_shape(num_arms, plays)?;
        if horizon < 2 {
            return Err(Error::Config(format!(
                "horizon must be >= 2, got {horizon}"
            )));
        }
        Ok(Self {
            plays,
            horizon,
            log_t4: 4.0 * (horizon as f64).ln(),
            stats: vec![ArmStats::default(); num_arms],
            candidates: vec![true; num_arms],
            candidate_count: num_arms,
            ucb: vec![f64::INFINITY; num_arms],
            eliminations: Vec::new(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The round-robin arm `k(t) = t mod K` (0-based).
    pub fn round_robin_arm(&self, t: usize) -> usize {
        t % self.stats.len()
    }

    pub fn is_candidate(&self, arm: usize) -> bool {
        self.candidates[arm]
    }

    pub fn candidates(&self) -> Vec<usize> {
        (0..self.candidates.len())
            .filter(|&i| self.candidates[i])
            .collect()
    }

    /// `(round, arm)` for every elimination since the last reset.
    pub fn eliminations(&self) -> &[(usize, usize)] {
        &self.eliminations
    }

    fn radius(&self, n: u64) -> f64 {
        if n == 0 {
            f64::INFINITY
        } else {
            (self.log_t4 / (2.0 * n as f64)).sqrt()
        }
    }

    fn monitor_lower(&self, arm: usize) -> f64 {
        let s = &self.stats[arm];
        if s.monitor_pulls == 0 {
            f64::NEG_INFINITY
        } else {
            s.monitor_mean() - self.radius(s.monitor_pulls)
        }
    }

    fn monitor_upper(&self, arm: usize) -> f64 {
        let s = &self.stats[arm];
        if s.monitor_pulls == 0 {
            f64::INFINITY
        } else {
            s.monitor_mean() + self.radius(s.monitor_pulls)
        }
    }

    fn try_eliminate(&mut self, t: usize, k: usize) {
        if self.candidate_count < 2 || !self.candidates[k] {
            return;
        }
        let upper = self.monitor_upper(k);
        if (0..self.stats.len()).any(|i| self.monitor_lower(i) > upper) {
            self.candidates[k] = false;
            self.candidate_count -= 1;
            self.eliminations.push((t, k));
        }
    }
}

impl Policy for EliminationUcb {
    fn name(&self) -> String {
        "eucb".into()
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    /// Chooses `I(t)` from the statistics of rounds before `t`, then runs
    /// the elimination test for `k(t)` on those same statistics.
    fn select(&mut self, t: usize, _rng: &mut RunRng) -> Selection {
        for i in 0..self.stats.len() {
            let s = &self.stats[i];
            self.ucb[i] = if s.pulls == 0 {
                f64::INFINITY
            } else {
                s.mean() + self.radius(s.pulls)
            };
        }
        let k = self.round_robin_arm(t);
        let arms = if self.candidates[k] {
            let mut arms = top_indices(&self.ucb, self.plays - 1, Some(k));
            arms.push(k);
            arms
        } else {
            top_indices(&self.ucb, self.plays, None)
        };
        let selection = Selection::new(arms, self.stats.len()).expect("distinct in-range arms");
        self.try_eliminate(t, k);
        selection
    }

    fn update(&mut self, t: usize, outcome: &RoundOutcome) {
        let k = self.round_robin_arm(t);
        for &(arm, x) in &outcome.rewards {
            self.stats[arm].record(x);
            if arm == k {
                self.stats[arm].record_monitor(x);
            }
        }
    }

    fn reset(&mut self) {
        self.stats.fill(ArmStats::default());
        self.candidates.fill(true);
        self.candidate_count = self.candidates.len();
        self.ucb.fill(f64::INFINITY);
        self.eliminations.clear();
    }
}

impl BasePolicy for EliminationUcb {
    fn arm_stats(&self) -> &[ArmStats] {
        &self.stats
    }

    fn rebuild(&mut self, retained: &[Observation]) {
        self.reset();
        for obs in retained {
            self.stats[obs.arm].record(obs.reward);
            if obs.arm == self.round_robin_arm(obs.round) {
                self.stats[obs.arm].record_monitor(obs.reward);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;

    fn play(
        policy: &mut dyn Policy,
        t: usize,
        rng: &mut RunRng,
        reward: impl Fn(usize) -> f64,
    ) -> Selection {
        let sel = policy.select(t, rng);
        let rewards = sel.arms().iter().map(|&a| (a, reward(a))).collect();
        policy.update(
            t,
            &RoundOutcome {
                selection: sel.clone(),
                rewards,
            },
        );
        sel
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ThompsonSampling::new(3, 4).is_err());
        assert!(KlUcb::new(0, 1).is_err());
        assert!(EliminationUcb::new(3, 1, 1).is_err());
    }

    #[test]
    fn ts_flat_prior_draws_are_uniform() {
        let mut ts = ThompsonSampling::new(4, 1).unwrap();
        let mut rng = run_rng(5);
        let mut acc = [0.0; 4];
        let n = 20_000;
        for _ in 0..n {
            ts.select(1, &mut rng);
            for (a, s) in acc.iter_mut().zip(ts.samples()) {
                *a += s;
            }
        }
        for a in acc {
            assert!((a / n as f64 - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn ts_posterior_parameters() {
        // S = 3, N = 10 -> Beta(4, 8), mean 1/3
        let mut ts = ThompsonSampling::new(1, 1).unwrap();
        let mut rng = run_rng(9);
        for i in 0..10 {
            let x = if i < 3 { 1.0 } else { 0.0 };
            ts.update(
                i + 1,
                &RoundOutcome {
                    selection: Selection::single(0),
                    rewards: vec![(0, x)],
                },
            );
        }
        let n = 50_000;
        let mean = (0..n)
            .map(|_| {
                ts.select(11, &mut rng);
                ts.samples()[0]
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 4.0 / 12.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn ts_locks_onto_deterministic_best_arm() {
        let mut hits = 0;
        let mut total = 0;
        for seed in 0..100 {
            let mut ts = ThompsonSampling::new(2, 1).unwrap();
            let mut rng = run_rng(seed);
            for t in 1..=500 {
                let sel = play(&mut ts, t, &mut rng, |a| if a == 0 { 1.0 } else { 0.0 });
                if t > 400 {
                    total += 1;
                    hits += usize::from(sel.arms() == [0]);
                }
            }
        }
        assert!(hits as f64 >= 0.99 * total as f64);
    }

    #[test]
    fn klucb_round_one_and_ties() {
        let mut p = KlUcb::new(4, 2).unwrap();
        let mut rng = run_rng(0);
        assert_eq!(p.select(1, &mut rng).arms(), &[0, 1]);
        assert!(p.indices().iter().all(|&u| u == 1.0));
    }

    #[test]
    fn klucb_equal_zero_means() {
        let mut p = KlUcb::new(2, 1).unwrap();
        let mut rng = run_rng(0);
        for arm in 0..2 {
            for t in 0..10 {
                p.update(
                    t,
                    &RoundOutcome {
                        selection: Selection::single(arm),
                        rewards: vec![(arm, 0.0)],
                    },
                );
            }
        }
        let sel = p.select(100, &mut rng);
        assert_eq!(sel.arms(), &[0]);
        for &u in p.indices() {
            assert!((u - 0.205672).abs() < 1e-6);
        }
    }

    #[test]
    fn klucb_zero_budget_index_is_mean() {
        let mut p = KlUcb::new(2, 1).unwrap();
        let mut rng = run_rng(0);
        for t in 1..=4 {
            p.update(
                t,
                &RoundOutcome {
                    selection: Selection::single(0),
                    rewards: vec![(0, if t % 2 == 0 { 1.0 } else { 0.0 })],
                },
            );
        }
        p.select(4, &mut rng);
        assert_eq!(p.indices()[0], 0.5);
    }

    #[test]
    fn elim_single_arm_never_eliminated() {
        let mut p = EliminationUcb::new(1, 1, 100).unwrap();
        let mut rng = run_rng(0);
        for t in 1..=100 {
            play(&mut p, t, &mut rng, |_| (t % 2) as f64);
        }
        assert_eq!(p.candidates(), vec![0]);
    }

    #[test]
    fn elim_two_arm_deterministic_round_75() {
        let mut p = EliminationUcb::new(2, 1, 100).unwrap();
        let mut rng = run_rng(0);
        for t in 1..=100 {
            play(&mut p, t, &mut rng, |a| if a == 0 { 1.0 } else { 0.0 });
        }
        assert_eq!(p.eliminations(), &[(75, 1)]);
        assert_eq!(p.candidates(), vec![0]);
    }

    #[test]
    fn elim_unplayed_arm_goes_first() {
        let mut p = EliminationUcb::new(3, 2, 100).unwrap();
        let mut rng = run_rng(0);
        // round 3: k = 0, the other play goes to the best UCB; arm 2 unplayed
        for t in 1..=2 {
            let sel = p.select(t, &mut rng);
            let outcome = RoundOutcome {
                selection: sel.clone(),
                rewards: sel.arms().iter().map(|&a| (a, 1.0)).collect(),
            };
            p.update(t, &outcome);
        }
        let counts: Vec<u64> = p.arm_stats().iter().map(|s| s.pulls).collect();
        assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
    }

    #[test]
    fn reset_restores_fresh_state() {
        let mut p = EliminationUcb::new(2, 1, 100).unwrap();
        let mut rng = run_rng(0);
        for t in 1..=100 {
            play(&mut p, t, &mut rng, |a| if a == 0 { 1.0 } else { 0.0 });
        }
        p.reset();
        let fresh = EliminationUcb::new(2, 1, 100).unwrap();
        assert_eq!(p.arm_stats(), fresh.arm_stats());
        assert_eq!(p.candidates(), fresh.candidates());
        let mut again = fresh.clone();
        again.reset();
        assert_eq!(again.candidates(), fresh.candidates());
    }

    #[test]
    fn reset_then_select_matches_fresh_policy() {
        let mut used = ThompsonSampling::new(5, 2).unwrap();
        let mut rng = run_rng(3);
        for t in 1..=50 {
            play(&mut used, t, &mut rng, |a| (a % 2) as f64);
        }
        used.reset();
        let mut fresh = ThompsonSampling::new(5, 2).unwrap();
        let mut rng_a = run_rng(77);
        let mut rng_b = run_rng(77);
        for t in 1..=30 {
            let a = play(&mut used, t, &mut rng_a, |a| (a % 2) as f64);
            let b = play(&mut fresh, t, &mut rng_b, |a| (a % 2) as f64);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rebuild_recomputes_monitor_stats() {
        let mut p = EliminationUcb::new(2, 1, 50).unwrap();
        p.rebuild(&[
            Observation {
                round: 1,
                arm: 1,
                reward: 1.0,
            },
            Observation {
                round: 2,
                arm: 1,
                reward: 0.0,
            },
            Observation {
                round: 3,
                arm: 0,
                reward: 1.0,
            },
        ]);
        let s = p.arm_stats();
        assert_eq!((s[1].pulls, s[1].monitor_pulls), (2, 1));
        assert_eq!((s[0].pulls, s[0].monitor_pulls), (1, 0));
    }
}
