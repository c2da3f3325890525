//! Decentralized Stackelberg bandit games.
//!
//! A leader and a follower repeatedly play a finite two-player game, each
//! learning only from its own noisy rewards. The crate provides:
//!
//! - [`instance`], [`families`], [`benchmark`] and [`lipschitz`]: game
//!   instances, hard-instance generators and the exact relaxed regret
//!   benchmarks.
//! - [`engine`]: a seeded round-by-round simulator.
//! - [`leader`] and [`follower`]: the learning algorithms.
//! - [`metrics`]: regret, follower guarantee checks and exponent fits.
//! - [`cli`]: experiment configs, sweeps and CSV output.
//!
//! ```
//! use stackelberg_dsg::prelude::*;
//!
//! let inst = make_canonical_instance("table2", &FamilyParams::with_delta(0.05)).unwrap();
//! let report = benchmark_gamma_tolerant(&inst, &BenchmarkParams::gamma(0.3)).unwrap();
//! assert!((report.beta1 - 0.55).abs() < 1e-12);
//! ```

pub mod benchmark;
pub mod cli;
pub mod engine;
pub mod error;
pub mod families;
pub mod follower;
pub mod instance;
pub mod leader;
pub mod lipschitz;
pub mod metrics;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::benchmark::{
        benchmark, benchmark_breakpoints, benchmark_gamma_tolerant, benchmark_generalized, benchmark_self_tolerant,
        eps_best_response_set, eps_leader_set, grid_benchmark_oracle, stackelberg, BenchmarkKind, BenchmarkParams,
        BenchmarkReport, StackelbergResult,
    };
    pub use crate::engine::{run_game, GameConfig, InfoStructure, RunTrace};
    pub use crate::error::{Error, Result};
    pub use crate::families::{make_canonical_instance, FamilyParams};
    pub use crate::follower::{BaseSpec, FollowerSpec};
    pub use crate::instance::{Instance, Player};
    pub use crate::leader::{LeaderSpec, Length, LengthRule, Schedule};
    pub use crate::lipschitz::lipschitz_constant;
    pub use crate::metrics::{
        anytime_violations, fit_exponent, instantaneous_to_anytime, instantaneous_violations, pseudo_regret, BoundSpec,
    };
}
