//! Elimination UCB on two deterministic arms: the losing arm drops out of
//! the candidate set once its monitoring interval separates.

use adwin_bandits::bandit::RoundOutcome;
use adwin_bandits::base::EliminationUcb;
use adwin_bandits::policy::Policy;
use adwin_bandits::rng::run_rng;

fn main() -> adwin_bandits::Result<()> {
    for horizon in [100, 200, 500, 1000] {
        let mut policy = EliminationUcb::new(2, 1, horizon)?;
        let mut rng = run_rng(0);
        for t in 1..=horizon {
            let selection = policy.select(t, &mut rng);
            let rewards = selection
                .arms()
                .iter()
                .map(|&arm| (arm, if arm == 0 { 1.0 } else { 0.0 }))
                .collect();
            policy.update(t, &RoundOutcome { selection, rewards });
        }
        match policy.eliminations().first() {
            Some(&(t, arm)) => {
                println!("T = {horizon:>4}: arm {} eliminated at round {t}", arm + 1)
            }
            None => println!("T = {horizon:>4}: no elimination"),
        }
    }
    Ok(())
}
