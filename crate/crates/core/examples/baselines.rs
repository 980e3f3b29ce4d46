//! Compare ADR-TS with the passive baselines on the abrupt environment and
//! write per-run and summary CSVs to the temp directory.

use adwin_bandits::env::EnvKind;
use adwin_bandits::harness::{
    run_experiment, write_outputs, EnvSpec, ExperimentConfig, PolicySpec,
};

fn main() -> adwin_bandits::Result<()> {
    let names = ["adr-ts", "ts", "ducb", "swts", "rexp3"];
    let policies = names
        .iter()
        .map(|n| n.parse::<PolicySpec>())
        .collect::<adwin_bandits::Result<Vec<_>>>()?;
    let mut config =
        ExperimentConfig::new(EnvSpec::synthetic(EnvKind::Abrupt, 100, 30_000), policies);
    config.runs = 4;
    let records = run_experiment(&config)?;

    for name in names {
        let finals: Vec<f64> = records
            .iter()
            .filter(|r| r.policy == name)
            .map(|r| r.final_value())
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        println!(
            "{name:>7}: mean final regret {mean:>9.1} over {} runs",
            finals.len()
        );
    }

    let path = std::env::temp_dir().join("abrupt_baselines.csv");
    let summary = write_outputs(&records, &path)?;
    println!("wrote {} and {}", path.display(), summary.display());
    Ok(())
}
