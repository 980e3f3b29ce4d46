//! Change detection with adaptive windowing (ADWIN) and bandit policies for
//! piecewise-stationary and drifting Bernoulli environments.
//!
//! The building blocks are:
//!
//! * [`adwin`]: the detector and its cut threshold,
//! * [`base`]: Thompson sampling, KL-UCB and elimination UCB,
//! * [`meta`]: ADR/ADS wrappers that reset or shrink a base policy on detection,
//! * [`baselines`]: discounted UCB, sliding-window TS and restarting Exp3,
//! * [`env`]: synthetic environments, diagnostics and log replay,
//! * [`harness`]: seeded multi-run experiments and CSV output.

pub mod adwin;
pub mod bandit;
pub mod base;
pub mod baselines;
pub mod env;
pub mod error;
pub mod harness;
pub mod meta;
pub mod policy;
pub mod rng;

pub use adwin::{epsilon_cut, Adwin, DetectionReport};
pub use bandit::{kl_ucb_index, regret_step, top_l, ArmStats, RoundOutcome, Selection};
pub use env::{EnvKind, ReplayLog, SyntheticEnv};
pub use error::{Error, Result};
pub use meta::{MetaBandit, Mode};
pub use policy::{BasePolicy, Policy};
