//! Passive nonstationary baselines: discounted UCB, sliding-window Thompson
//! sampling and Exp3 with periodic restarts.

use std::collections::VecDeque;

use rand::Rng;

use crate::bandit::{top_l, RoundOutcome, Selection};
use crate::base::draw_posteriors;
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::rng::RunRng;

pub const DUCB_DEFAULT_GAMMA: f64 = 0.9;
pub const SWTS_DEFAULT_WINDOW: usize = 1000;
pub const REXP3_DEFAULT_BATCH: usize = 1000;

fn check_shape(num_arms: usize, plays: usize) -> Result<()> {
    if num_arms == 0 || plays == 0 || plays > num_arms {
        return Err(Error::Config(format!(
            "need 1 <= L <= K, got K = {num_arms}, L = {plays}"
        )));
    }
    Ok(())
}

/// Discounted UCB: statistics decay by `gamma` each round and the index is
/// `S/N + 2 sqrt(xi ln(n_t) / N)` with `n_t` the total discounted count.
#[derive(Clone, Debug)]
pub struct DiscountedUcb {
    plays: usize,
    gamma: f64,
    xi: f64,
    counts: Vec<f64>,
    sums: Vec<f64>,
    index: Vec<f64>,
}

impl DiscountedUcb {
    pub fn new(num_arms: usize, plays: usize, gamma: f64) -> Result<Self> {
        check_shape(num_arms, plays)?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Config(format!(
                "discount must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(Self {
            plays,
            gamma,
            xi: 0.5,
            counts: vec![0.0; num_arms],
            sums: vec![0.0; num_arms],
            index: vec![f64::INFINITY; num_arms],
        })
    }

    pub fn discounted_counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn discounted_sums(&self) -> &[f64] {
        &self.sums
    }
}

impl Policy for DiscountedUcb {
    fn name(&self) -> String {
        "ducb".into()
    }

    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, _t: usize, _rng: &mut RunRng) -> Selection {
        let total: f64 = self.counts.iter().sum();
        let log_total = if total > 1.0 { total.ln() } else { 0.0 };
        for i in 0..self.counts.len() {
            let n = self.counts[i];
            self.index[i] = if n > 0.0 {
                self.sums[i] / n + 2.0 * (self.xi * log_total / n).sqrt()
            } else {
                f64::INFINITY
            };
        }
        top_l(&self.index, self.plays).expect("validated at construction")
    }

    fn update(&mut self, _t: usize, outcome: &RoundOutcome) {
        if self.gamma < 1.0 {
            for (n, s) in self.counts.iter_mut().zip(self.sums.iter_mut()) {
                *n *= self.gamma;
                *s *= self.gamma;
            }
        }
        for &(arm, x) in &outcome.rewards {
            self.counts[arm] += 1.0;
            self.sums[arm] += x;
        }
    }

    fn reset(&mut self) {
        self.counts.fill(0.0);
        self.sums.fill(0.0);
        self.index.fill(f64::INFINITY);
    }
}

/// Thompson sampling on the observations of the last `window` rounds.
#[derive(Clone, Debug)]
pub struct SlidingWindowTs {
    plays: usize,
    window: usize,
    buffer: VecDeque<Vec<(usize, f64)>>,
    successes: Vec<f64>,
    pulls: Vec<f64>,
    theta: Vec<f64>,
}

impl SlidingWindowTs {
    pub fn new(num_arms: usize, plays: usize, window: usize) -> Result<Self> {
        check_shape(num_arms, plays)?;
        if window == 0 {
            return Err(Error::Config(
                "sliding window must hold at least one round".into(),
            ));
        }
        Ok(Self {
            plays,
            window,
            buffer: VecDeque::with_capacity(window + 1),
            successes: vec![0.0; num_arms],
            pulls: vec![0.0; num_arms],
            theta: vec![0.0; num_arms],
        })
    }

    /// `(successes, pulls)` of `arm` within the window.
    pub fn window_stats(&self, arm: usize) -> (f64, f64) {
        (self.successes[arm], self.pulls[arm])
    }

    pub fn buffered_rounds(&self) -> usize {
        self.buffer.len()
    }
}

impl Policy for SlidingWindowTs {
    fn name(&self) -> String {
        "swts".into()
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, _t: usize, rng: &mut RunRng) -> Selection {
        draw_posteriors(
            rng,
            self.successes
                .iter()
                .copied()
                .zip(self.pulls.iter().copied()),
            &mut self.theta,
        );
        top_l(&self.theta, self.plays).expect("validated at construction")
    }

    fn update(&mut self, _t: usize, outcome: &RoundOutcome) {
        for &(arm, x) in &outcome.rewards {
            self.successes[arm] += x;
            self.pulls[arm] += 1.0;
        }
        self.buffer.push_back(outcome.rewards.clone());
        if self.buffer.len() > self.window {
            for (arm, x) in self.buffer.pop_front().unwrap_or_default() {
                self.successes[arm] -= x;
                self.pulls[arm] -= 1.0;
            }
        }
    }

    fn reset(&mut self) {
        self.buffer.clear();
        self.successes.fill(0.0);
        self.pulls.fill(0.0);
        self.theta.fill(0.0);
    }
}

/// Exp3 exploration rate for a batch of `batch` rounds:
/// `min(1, sqrt(K ln K / ((e - 1) batch)))`.
pub fn rexp3_gamma(num_arms: usize, batch: usize) -> f64 {
    let k = num_arms as f64;
    let raw = (k * k.ln() / ((std::f64::consts::E - 1.0) * batch as f64)).sqrt();
    raw.min(1.0)
}

/// `p_i = (1 - gamma) w_i / sum(w) + gamma / K`.
pub fn exp3_probabilities(weights: &[f64], gamma: f64) -> Vec<f64> {
    let k = weights.len() as f64;
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| (1.0 - gamma) * w / total + gamma / k)
        .collect()
}

/// Exp3 restarted every `batch` rounds.
///
/// Weights are stored as logarithms so long batches cannot overflow.
#[derive(Clone, Debug)]
pub struct RestartingExp3 {
    plays: usize,
    batch: usize,
    gamma: f64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    rounds_in_batch: usize,
}

impl RestartingExp3 {
    pub fn new(num_arms: usize, plays: usize, batch: usize) -> Result<Self> {
        check_shape(num_arms, plays)?;
        if batch == 0 {
            return Err(Error::Config(
                "restart batch must be at least one round".into(),
            ));
        }
        Ok(Self {
            plays,
            batch,
            gamma: rexp3_gamma(num_arms, batch),
            log_weights: vec![0.0; num_arms],
            probs: vec![1.0 / num_arms as f64; num_arms],
            rounds_in_batch: 0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Selection probabilities used by the most recent `select`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Normalized weights (maximum weight 1).
    pub fn weights(&self) -> Vec<f64> {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter().map(|lw| (lw - max).exp()).collect()
    }

    fn refresh_probabilities(&mut self) {
        let w = self.weights();
        self.probs = exp3_probabilities(&w, self.gamma);
    }
}

impl Policy for RestartingExp3 {
    fn name(&self) -> String {
        "rexp3".into()
    }

    fn num_arms(&self) -> usize {
        self.log_weights.len()
    }

    fn plays(&self) -> usize {
        self.plays
    }

    fn select(&mut self, _t: usize, rng: &mut RunRng) -> Selection {
        if self.rounds_in_batch == self.batch {
            self.log_weights.fill(0.0);
            self.rounds_in_batch = 0;
        }
        self.refresh_probabilities();
        // sequential draws without replacement, renormalizing each time
        let k = self.log_weights.len();
        let mut taken = vec![false; k];
        let mut mass = 1.0;
        let mut arms = Vec::with_capacity(self.plays);
        for _ in 0..self.plays {
            let u: f64 = rng.random::<f64>() * mass;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, (&p, &done)) in self.probs.iter().zip(&taken).enumerate() {
                if done {
                    continue;
                }
                acc += p;
                pick = Some(i);
                if u < acc {
                    break;
                }
            }
            let i = pick.expect("at least one arm remains");
            taken[i] = true;
            mass -= self.probs[i];
            arms.push(i);
        }
        Selection::new(arms, k).expect("distinct in-range arms")
    }

    fn update(&mut self, _t: usize, outcome: &RoundOutcome) {
        let k = self.log_weights.len() as f64;
        let plays = self.plays as f64;
        for &(arm, x) in &outcome.rewards {
            let inclusion = (plays * self.probs[arm]).min(1.0);
            self.log_weights[arm] += self.gamma * (x / inclusion) / k;
        }
        self.rounds_in_batch += 1;
    }

    fn reset(&mut self) {
        self.log_weights.fill(0.0);
        self.rounds_in_batch = 0;
        self.refresh_probabilities();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::ThompsonSampling;
    use crate::rng::run_rng;
    use approx::assert_abs_diff_eq;

    fn outcome(arm: usize, x: f64) -> RoundOutcome {
        RoundOutcome {
            selection: Selection::single(arm),
            rewards: vec![(arm, x)],
        }
    }

    #[test]
    fn ducb_gamma_one_keeps_raw_counts() {
        let mut p = DiscountedUcb::new(3, 1, 1.0).unwrap();
        let mut rng = run_rng(0);
        let mut raw = [0.0; 3];
        for t in 1..=50 {
            let arm = p.select(t, &mut rng).arms()[0];
            raw[arm] += 1.0;
            p.update(t, &outcome(arm, 0.5));
        }
        assert_eq!(p.discounted_counts(), &raw);
    }

    #[test]
    fn ducb_discount_recursion() {
        let mut p = DiscountedUcb::new(2, 1, 0.9).unwrap();
        p.update(1, &outcome(0, 1.0));
        p.update(2, &outcome(0, 1.0));
        assert_abs_diff_eq!(p.discounted_counts()[0], 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(p.discounted_sums()[0], 1.9, epsilon = 1e-12);
        p.update(3, &outcome(1, 0.0));
        assert_abs_diff_eq!(p.discounted_counts()[0], 1.71, epsilon = 1e-12);
        assert!(p.discounted_counts()[0] <= 2.0);
    }

    #[test]
    fn ducb_first_round_lowest_arm() {
        let mut p = DiscountedUcb::new(4, 1, 0.9).unwrap();
        assert_eq!(p.select(1, &mut run_rng(0)).arms(), &[0]);
    }

    #[test]
    fn ducb_rejects_bad_discount() {
        assert!(DiscountedUcb::new(2, 1, 0.0).is_err());
        assert!(DiscountedUcb::new(2, 1, 1.1).is_err());
    }

    #[test]
    fn swts_matches_ts_before_window_binds() {
        let mut sw = SlidingWindowTs::new(5, 2, 1000).unwrap();
        let mut ts = ThompsonSampling::new(5, 2).unwrap();
        let mut rng_a = run_rng(13);
        let mut rng_b = run_rng(13);
        for t in 1..=300 {
            let a = sw.select(t, &mut rng_a);
            let b = ts.select(t, &mut rng_b);
            assert_eq!(a, b);
            let o = RoundOutcome {
                selection: a.clone(),
                rewards: a
                    .arms()
                    .iter()
                    .map(|&i| (i, ((i + t) % 3 == 0) as u8 as f64))
                    .collect(),
            };
            sw.update(t, &o);
            ts.update(t, &o);
        }
    }

    #[test]
    fn swts_window_one() {
        let mut sw = SlidingWindowTs::new(2, 1, 1).unwrap();
        sw.update(1, &outcome(0, 1.0));
        sw.update(2, &outcome(1, 0.0));
        assert_eq!(sw.window_stats(0), (0.0, 0.0));
        assert_eq!(sw.window_stats(1), (0.0, 1.0));
        assert_eq!(sw.buffered_rounds(), 1);
    }

    #[test]
    fn swts_full_eviction() {
        let w = 20;
        let mut sw = SlidingWindowTs::new(2, 1, w).unwrap();
        for t in 1..=w {
            sw.update(t, &outcome(0, 1.0));
        }
        assert_eq!(sw.window_stats(0), (w as f64, w as f64));
        for t in w + 1..=2 * w {
            sw.update(t, &outcome(1, 1.0));
        }
        assert_eq!(sw.window_stats(0), (0.0, 0.0));
        assert_eq!(sw.window_stats(1), (w as f64, w as f64));
    }

    #[test]
    fn exp3_probability_formula() {
        let p = exp3_probabilities(&[1.0, 3.0], 0.1);
        assert_abs_diff_eq!(p[0], 0.275, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.725, epsilon = 1e-12);
    }

    #[test]
    fn rexp3_gamma_formula() {
        let g = rexp3_gamma(100, 1000);
        let expected = (100.0 * 100f64.ln() / ((std::f64::consts::E - 1.0) * 1000.0)).sqrt();
        assert_abs_diff_eq!(g, expected, epsilon = 1e-15);
        assert_eq!(rexp3_gamma(100, 1), 1.0);
    }

    #[test]
    fn rexp3_uniform_at_batch_start_and_restart() {
        let batch = 50;
        let mut p = RestartingExp3::new(4, 1, batch).unwrap();
        let mut rng = run_rng(2);
        for t in 1..=3 * batch {
            let sel = p.select(t, &mut rng);
            if (t - 1) % batch == 0 {
                for &q in p.probabilities() {
                    assert_eq!(q, 0.25);
                }
            }
            let s: f64 = p.probabilities().iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
            let arm = sel.arms()[0];
            p.update(t, &outcome(arm, (arm == 2) as u8 as f64));
            assert!(p.weights().iter().all(|w| w.is_finite() && *w > 0.0));
        }
    }

    #[test]
    fn rexp3_multiple_play_distinct() {
        let mut p = RestartingExp3::new(6, 3, 100).unwrap();
        let mut rng = run_rng(8);
        for t in 1..=200 {
            let sel = p.select(t, &mut rng);
            assert_eq!(sel.len(), 3);
            let o = RoundOutcome {
                selection: sel.clone(),
                rewards: sel.arms().iter().map(|&a| (a, 1.0)).collect(),
            };
            p.update(t, &o);
        }
    }
}
