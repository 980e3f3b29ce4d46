//! Feed a noisy stream with two level shifts through the detector and print
//! every detection with the retained window.

use adwin_bandits::adwin::Adwin;
use adwin_bandits::rng::{bernoulli, run_rng};

fn main() -> adwin_bandits::Result<()> {
    let mut rng = run_rng(7);
    let mut adwin = Adwin::new(0.002)?;
    let level = |t: usize| match t {
        0..=1000 => 0.2,
        1001..=2500 => 0.7,
        _ => 0.4,
    };
    for t in 1..=4000 {
        let report = adwin.observe(bernoulli(&mut rng, level(t)))?;
        if report.detected {
            println!(
                "t={t:>4}: change detected, dropped rounds up to {}, window now {} rounds, estimate {:.3}",
                report.breakpoint.unwrap(),
                report.retained_size,
                adwin.estimate().unwrap()
            );
        }
    }
    println!(
        "final window starts at round {} with mean {:.3}",
        adwin.window().start_time(),
        adwin.estimate().unwrap()
    );
    Ok(())
}
