//! Build a log of uniformly presented arms, save it as CSV, load it back and
//! evaluate a few policies offline by replay.

use adwin_bandits::env::{load_log, synthesize_log, EnvKind, SyntheticEnv};
use adwin_bandits::harness::{replay, PolicySpec};
use adwin_bandits::rng::run_rng;

fn main() -> adwin_bandits::Result<()> {
    let env = SyntheticEnv::new(EnvKind::Abrupt, 10, 60_000)?;
    let log = synthesize_log(&env, &mut run_rng(3));
    let path = std::env::temp_dir().join("synthetic_log.csv");
    log.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;

    let log = load_log(&path, None)?;
    println!(
        "{} events over {} arms from {}",
        log.len(),
        log.num_arms(),
        path.display()
    );
    for name in ["ts", "adr-ts", "ads-klucb", "swts", "rexp3"] {
        let spec: PolicySpec = name.parse()?;
        let mut policy = spec.build(log.num_arms(), 1, log.len())?;
        let record = replay(&log, policy.as_mut(), 1000, 0, false);
        println!(
            "{name:>9}: {:>5} matched rounds, {:>6} skipped, reward per round {:.3}, resets {}",
            record.rounds,
            record.skips,
            record.final_value() / record.rounds as f64,
            record.final_resets()
        );
    }
    Ok(())
}
