//! Total estimation error of the standalone detector on stationary,
//! abruptly switching and drifting streams.

use adwin_bandits::harness::{adwin_error_experiment, mean_std, MeanProfile, StreamSpec};

fn main() -> adwin_bandits::Result<()> {
    let horizon = 10_000;
    let delta = 1.0 / (horizon as f64).powi(3);
    let streams = [
        ("Bernoulli(0.5)", MeanProfile::Constant(0.5)),
        (
            "4 switches 0.3/0.7",
            MeanProfile::Abrupt {
                changes: 4,
                low: 0.3,
                high: 0.7,
            },
        ),
        (
            "16 switches 0.3/0.7",
            MeanProfile::Abrupt {
                changes: 16,
                low: 0.3,
                high: 0.7,
            },
        ),
        (
            "drift 0.1 -> 0.9",
            MeanProfile::Gradual { from: 0.1, to: 0.9 },
        ),
    ];
    for (label, profile) in streams {
        let stream = StreamSpec {
            profile,
            horizon,
            bernoulli: true,
        };
        let samples = adwin_error_experiment(&stream, delta, 20, 0)?;
        let errors: Vec<f64> = samples.iter().map(|s| s.total_error).collect();
        let (mean, std) = mean_std(&errors);
        let detections: usize = samples.iter().map(|s| s.detections).sum();
        println!(
            "{label:>20}: Err(T) = {mean:7.1} +/- {std:5.1}, {:.1} detections per run",
            detections as f64 / samples.len() as f64
        );
    }
    Ok(())
}
