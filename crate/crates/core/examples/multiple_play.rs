//! Multiple plays per round: regret of ADR-KL-UCB and ADR-TS for L = 1, 2, 5
//! on the gradual environment.

use adwin_bandits::env::EnvKind;
use adwin_bandits::harness::{run_experiment, EnvSpec, ExperimentConfig, PolicySpec};

fn main() -> adwin_bandits::Result<()> {
    for plays in [1, 2, 5] {
        let policies = vec!["adr-ts".parse::<PolicySpec>()?, "adr-klucb".parse()?];
        let mut config =
            ExperimentConfig::new(EnvSpec::synthetic(EnvKind::Gradual, 100, 20_000), policies);
        config.plays = plays;
        config.runs = 2;
        for record in run_experiment(&config)? {
            if record.run == 0 {
                println!(
                    "L = {plays}: {:>9} final regret {:>8.1}, resets {}",
                    record.policy,
                    record.final_value(),
                    record.final_resets()
                );
            }
        }
    }
    Ok(())
}
