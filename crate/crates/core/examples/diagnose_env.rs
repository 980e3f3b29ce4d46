//! Global-change ratios of the synthetic environments. A small ratio means
//! the arms move together, which is what per-arm detectors rely on.

use adwin_bandits::env::{EnvKind, SyntheticEnv};

fn main() -> adwin_bandits::Result<()> {
    for kind in EnvKind::ALL {
        let env = SyntheticEnv::new(kind, 100, 30_000)?;
        let report = env.diagnose();
        let show = |p: Option<adwin_bandits::env::RatioPair>| match p {
            Some(p) => format!(
                "{:.2} (changing arms only: {:.2})",
                p.all_arms, p.changing_arms
            ),
            None => "n/a".to_string(),
        };
        println!(
            "{kind:>13}: abrupt {}, gradual {}",
            show(report.abrupt),
            show(report.gradual)
        );
    }
    Ok(())
}
