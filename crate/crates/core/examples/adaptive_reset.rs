//! ADR and ADS wrappers around Thompson sampling on the abrupt environment:
//! detection rounds, window starts and final regret.

use adwin_bandits::base::ThompsonSampling;
use adwin_bandits::env::{EnvKind, SyntheticEnv};
use adwin_bandits::harness::simulate;
use adwin_bandits::meta::{MetaBandit, Mode};

fn main() -> adwin_bandits::Result<()> {
    let env = SyntheticEnv::new(EnvKind::Abrupt, 100, 30_000)?;
    let (t1, t2) = env.changepoints();
    println!("abrupt environment, changes after rounds {t1} and {t2}");
    for mode in [Mode::Reset, Mode::Shrink] {
        let base = Box::new(ThompsonSampling::new(100, 1)?);
        let mut meta = MetaBandit::new(base, mode, 0.001)?;
        let record = simulate(&env, &mut meta, 1000, 1, false);
        println!(
            "{}: final regret {:.1}",
            record.policy,
            record.final_value()
        );
        for d in meta.detections() {
            println!(
                "  round {:>5}: arm {} detected a change, breakpoint {}",
                d.round,
                d.arm + 1,
                d.breakpoint
            );
        }
        println!("  current window starts at round {}", meta.window_start());
    }
    Ok(())
}
