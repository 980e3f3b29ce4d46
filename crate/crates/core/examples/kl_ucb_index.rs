//! KL-UCB upper confidence indices for a few empirical means and pull counts.

use adwin_bandits::bandit::{kl_bernoulli, kl_ucb_index};

fn main() {
    let t = 1000;
    println!("t = {t}");
    println!(
        "{:>6} {:>8} {:>8} {:>8} {:>8}",
        "mean", "n=1", "n=10", "n=100", "n=1000"
    );
    for mu in [0.0, 0.1, 0.3, 0.5, 0.9] {
        let row: Vec<String> = [1, 10, 100, 1000]
            .iter()
            .map(|&n| format!("{:>8.4}", kl_ucb_index(mu, n, t)))
            .collect();
        println!("{mu:>6.1} {}", row.join(" "));
    }
    let q = kl_ucb_index(0.3, 50, t);
    println!(
        "check: 50 * kl(0.3, {q:.6}) = {:.6}, ln(1000 / 50) = {:.6}",
        50.0 * kl_bernoulli(0.3, q),
        (t as f64 / 50.0).ln()
    );
}
