//! Horizon sweep of the explore-then-commit pair with rate-optimal
//! exploration. Regret grows roughly like T^(2/3).

use stackelberg_dsg::cli::{sweep, BenchmarkSelection, ExperimentConfig, InstanceSource, SweepSpec};
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let cfg = ExperimentConfig {
        instance: InstanceSource::family("table2", FamilyParams::with_delta(0.1)),
        leader: LeaderSpec::EtcThrowOut {
            e: Length::rule(LengthRule::EtcLeader),
            e_prime: Length::rule(LengthRule::EtcThrowout),
        },
        follower: FollowerSpec::per_arm(BaseSpec::Etc {
            e: Length::rule(LengthRule::EtcFollower),
        }),
        game: GameConfig::new(1 << 12, InfoStructure::StrongDsg, 0, 100),
        benchmarks: BenchmarkSelection {
            kinds: vec![BenchmarkKind::GammaTolerant],
            params: BenchmarkParams::gamma(0.3),
        },
        sweep: Some(SweepSpec {
            horizons: vec![1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16],
            delta: None,
        }),
        out: None,
        sampled_rewards: false,
        traces: false,
    };
    let out = sweep(&cfg)?;
    for p in out.points.iter().filter(|p| p.player == "max") {
        println!("T = {:>6}  regret = {:>8.1} +- {:.1}", p.horizon, p.mean_regret, p.stderr);
    }
    let fit = out.fit("max", BenchmarkKind::GammaTolerant).expect("enough points");
    println!("slope {:.3} +- {:.3}", fit.slope, fit.stderr);
    Ok(())
}
