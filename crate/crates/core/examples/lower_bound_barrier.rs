//! Hard family whose gap shrinks like T^(-1/3): no pair of learners gets
//! below T^(2/3) regret on it.

use stackelberg_dsg::cli::{sweep, BenchmarkSelection, DeltaCoupling, ExperimentConfig, InstanceSource, SweepSpec};
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let cfg = ExperimentConfig {
        instance: InstanceSource::family("dlower", FamilyParams::default()),
        leader: LeaderSpec::ExploreThenUcb {
            e: Length::rule(LengthRule::ExploreUcb),
        },
        follower: FollowerSpec::per_arm(BaseSpec::aae(1.0)),
        game: GameConfig::new(1 << 12, InfoStructure::StrongDsg, 0, 100),
        benchmarks: BenchmarkSelection {
            kinds: vec![BenchmarkKind::GammaTolerant],
            params: BenchmarkParams::gamma(0.3),
        },
        sweep: Some(SweepSpec {
            horizons: (12..=16).map(|k| 1u64 << k).collect(),
            delta: Some(DeltaCoupling {
                kappa: 0.3,
                power: 1.0 / 3.0,
            }),
        }),
        out: None,
        sampled_rewards: false,
        traces: false,
    };
    let out = sweep(&cfg)?;
    for p in out.points.iter().filter(|p| p.player == "max") {
        println!("T = {:>6}  delta = {:.4}  regret = {:>8.1}", p.horizon, p.delta.unwrap_or_default(), p.mean_regret);
    }
    if let Some(fit) = out.fit("max", BenchmarkKind::GammaTolerant) {
        println!("slope {:.3}", fit.slope);
    }
    Ok(())
}
