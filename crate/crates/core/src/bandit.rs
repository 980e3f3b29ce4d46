//! Numeric primitives and bookkeeping shared by every policy.
//!
//! Arms are indexed from 0 inside the library; file formats and the CLI use
//! 1-based arm ids.

use crate::error::{Error, Result};

/// Bernoulli KL divergence `d(p, q)`, with `0 ln 0 = 0` and `+inf` when `q`
/// sits on a boundary that `p` does not.
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
    let mut kl = 0.0;
    if p > 0.0 {
        if q <= 0.0 {
            return f64::INFINITY;
        }
        kl += p * (p / q).ln();
    }
    if p < 1.0 {
        if q >= 1.0 {
            return f64::INFINITY;
        }
        kl += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    kl.max(0.0)
}

const KL_UCB_CLAMP: f64 = 1e-12;
const KL_UCB_ITERS: usize = 64;

/// KL-UCB index `max{q in [mu_hat, 1] : n d(mu_hat, q) <= ln(t / n)}`.
///
/// Untried arms (`n = 0`) get index 1. When the budget `ln(t / n)` is not
/// positive the index is `mu_hat` itself.
pub fn kl_ucb_index(mu_hat: f64, n: usize, t: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let budget = (t as f64 / n as f64).ln();
    if budget <= 0.0 {
        return mu_hat;
    }
    let target = budget / n as f64;
    let mut lo = mu_hat;
    let mut hi = 1.0;
    for _ in 0..KL_UCB_ITERS {
        let mid = 0.5 * (lo + hi);
        let q = mid.clamp(KL_UCB_CLAMP, 1.0 - KL_UCB_CLAMP);
        if kl_bernoulli(mu_hat, q) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Arms chosen in one round, sorted ascending, all distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Selection {
    arms: Vec<usize>,
}

impl Selection {
    pub fn new(mut arms: Vec<usize>, num_arms: usize) -> Result<Self> {
        arms.sort_unstable();
        if arms.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Usage(format!(
                "duplicate arms in selection {arms:?}"
            )));
        }
        if let Some(&bad) = arms.iter().find(|&&a| a >= num_arms) {
            return Err(Error::Usage(format!(
                "arm {bad} out of range for {num_arms} arms"
            )));
        }
        Ok(Self { arms })
    }

    pub fn single(arm: usize) -> Self {
        Self { arms: vec![arm] }
    }

    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.arms.binary_search(&arm).is_ok()
    }
}

/// The `plays` arms with the largest scores; ties go to the lower index.
pub fn top_l(scores: &[f64], plays: usize) -> Result<Selection> {
    if plays == 0 || plays > scores.len() {
        return Err(Error::Usage(format!(
            "cannot select {plays} of {} arms",
            scores.len()
        )));
    }
    Ok(Selection {
        arms: top_indices(scores, plays, None),
    })
}

/// Indices of the `count` best scores, optionally skipping one arm.
pub(crate) fn top_indices(scores: &[f64], count: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(count + 1);
    if count == 0 {
        return chosen;
    }
    // insertion into a short sorted list; count is tiny compared with K
    for (i, &s) in scores.iter().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        let pos = chosen
            .iter()
            .position(|&j| s > scores[j])
            .unwrap_or(chosen.len());
        if pos < count {
            chosen.insert(pos, i);
            chosen.truncate(count);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Per-round shortfall of the selected arms against the best `L` arms.
pub fn regret_step(oracle_means: &[f64], selection: &Selection) -> f64 {
    let plays = selection.len();
    let best: f64 = top_indices(oracle_means, plays, None)
        .iter()
        .map(|&i| oracle_means[i])
        .sum();
    let got: f64 = selection.arms().iter().map(|&i| oracle_means[i]).sum();
    (best - got).max(0.0)
}

/// Rewards revealed in one round, as `(arm, reward)` pairs.
///
/// With full feedback there is one pair per selected arm; the replay
/// evaluator may reveal a subset.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    pub selection: Selection,
    pub rewards: Vec<(usize, f64)>,
}

impl RoundOutcome {
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().map(|&(_, x)| x).sum()
    }
}

/// Success/count statistics for one arm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArmStats {
    pub pulls: u64,
    pub successes: f64,
    pub monitor_pulls: u64,
    pub monitor_successes: f64,
}

impl ArmStats {
    pub fn record(&mut self, reward: f64) {
        self.pulls += 1;
        self.successes += reward;
    }

    pub fn record_monitor(&mut self, reward: f64) {
        self.monitor_pulls += 1;
        self.monitor_successes += reward;
    }

    /// Empirical mean; `+inf` for an unplayed arm.
    pub fn mean(&self) -> f64 {
        if self.pulls == 0 {
            f64::INFINITY
        } else {
            self.successes / self.pulls as f64
        }
    }

    pub fn monitor_mean(&self) -> f64 {
        if self.monitor_pulls == 0 {
            f64::INFINITY
        } else {
            self.monitor_successes / self.monitor_pulls as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn kl_examples() {
        assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.1, 0.9), 0.8 * 9.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(kl_bernoulli(0.1, 0.9), 1.757780, epsilon = 1e-6);
        assert_abs_diff_eq!(kl_bernoulli(0.0, 0.5), 2.0f64.ln(), epsilon = 1e-12);
        assert_eq!(kl_bernoulli(0.3, 0.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.3, 1.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.0, 0.0), 0.0);
        assert_eq!(kl_bernoulli(1.0, 1.0), 0.0);
    }

    #[test]
    fn kl_ucb_examples() {
        assert_eq!(kl_ucb_index(0.3, 0, 5), 1.0);
        assert_eq!(kl_ucb_index(0.37, 12, 12), 0.37);
        assert_eq!(kl_ucb_index(0.37, 20, 12), 0.37);
        let expected = 1.0 - (-(10.0f64).ln() / 10.0).exp();
        assert_abs_diff_eq!(kl_ucb_index(0.0, 10, 100), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(kl_ucb_index(0.0, 10, 100), 0.205672, epsilon = 1e-6);
    }

    #[test]
    fn kl_ucb_one_success_rate() {
        // mu_hat = 1 can never move up
        assert_eq!(kl_ucb_index(1.0, 5, 100), 1.0);
    }

    #[test]
    fn top_l_examples() {
        let sel = top_l(&[0.3, 0.9, 0.9, 0.1], 2).unwrap();
        assert_eq!(sel.arms(), &[1, 2]);
        let sel = top_l(&[0.4, 0.1, 0.7], 3).unwrap();
        assert_eq!(sel.arms(), &[0, 1, 2]);
        let sel = top_l(&[0.5, 0.5, 0.5], 1).unwrap();
        assert_eq!(sel.arms(), &[0]);
        assert!(matches!(top_l(&[0.5, 0.5], 3), Err(Error::Usage(_))));
        assert!(top_l(&[0.5], 0).is_err());
    }

    #[test]
    fn top_indices_excludes() {
        assert_eq!(top_indices(&[0.9, 0.8, 0.7], 1, Some(0)), vec![1]);
        assert_eq!(
            top_indices(&[f64::INFINITY, 0.8, f64::INFINITY], 2, None),
            vec![0, 2]
        );
    }

    #[test]
    fn regret_examples() {
        let means: Vec<f64> = (1..=100).map(|i| (101 - i) as f64 / 100.0).collect();
        assert_eq!(regret_step(&means, &Selection::single(0)), 0.0);
        assert_abs_diff_eq!(
            regret_step(&means, &Selection::single(2)),
            0.02,
            epsilon = 1e-12
        );
        let all = Selection::new((0..4).collect(), 4).unwrap();
        assert_eq!(regret_step(&[0.1, 0.7, 0.2, 0.9], &all), 0.0);
    }

    #[test]
    fn selection_validation() {
        assert!(Selection::new(vec![1, 1], 3).is_err());
        assert!(Selection::new(vec![3], 3).is_err());
        assert_eq!(Selection::new(vec![2, 0], 3).unwrap().arms(), &[0, 2]);
    }

    #[test]
    fn arm_stats_unplayed_is_infinite() {
        let mut s = ArmStats::default();
        assert_eq!(s.mean(), f64::INFINITY);
        s.record(1.0);
        s.record(0.0);
        assert_eq!(s.mean(), 0.5);
        assert_eq!(s.monitor_mean(), f64::INFINITY);
    }

    proptest! {
        #[test]
        fn kl_ucb_monotone(mu in 0.0f64..=1.0, n in 1usize..200, t in 1usize..5000, dt in 0usize..500) {
            let base = kl_ucb_index(mu, n, t);
            prop_assert!(base >= mu);
            prop_assert!(kl_ucb_index(mu, n, t + dt) >= base);
            prop_assert!(kl_ucb_index(mu, n + 1, t) <= base + 1e-12);
        }

        #[test]
        fn kl_ucb_solves_equation(mu in 0.0f64..0.999, n in 1usize..100, t in 2usize..10_000) {
            let budget = (t as f64 / n as f64).ln();
            prop_assume!(budget > 0.0);
            let q = kl_ucb_index(mu, n, t);
            if q < 1.0 - 1e-9 {
                let residual = (n as f64 * kl_bernoulli(mu, q) - budget).abs();
                prop_assert!(residual <= 1e-6, "residual {residual}");
            }
        }

        #[test]
        fn top_l_shift_invariant(
            scores in prop::collection::vec(-10.0f64..10.0, 1..30),
            shift in -5.0f64..5.0,
            plays in 1usize..30,
        ) {
            let plays = plays.min(scores.len());
            let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
            // exact ties can be broken by rounding after a shift
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-9));
            prop_assert_eq!(top_l(&scores, plays).unwrap(), top_l(&shifted, plays).unwrap());
        }

        #[test]
        fn regret_nonnegative_and_zero_at_optimum(
            means in prop::collection::vec(0.0f64..=1.0, 1..20),
            pick in prop::collection::vec(any::<prop::sample::Index>(), 1..20),
        ) {
            let k = means.len();
            let mut arms: Vec<usize> = pick.iter().map(|ix| ix.index(k)).collect();
            arms.sort_unstable();
            arms.dedup();
            let sel = Selection::new(arms, k).unwrap();
            let r = regret_step(&means, &sel);
            prop_assert!(r >= 0.0);
            let best = top_l(&means, sel.len()).unwrap();
            prop_assert_eq!(regret_step(&means, &best), 0.0);
        }
    }
}
