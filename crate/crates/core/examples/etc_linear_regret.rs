//! Naive explore-then-commit on both sides: both players can lock into the
//! wrong outcome and lose a constant per round.

use stackelberg_dsg::cli::{simulate, BenchmarkSelection, ExperimentConfig, InstanceSource};
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let cfg = ExperimentConfig {
        instance: InstanceSource::family("table3", FamilyParams::with_delta(0.1)),
        leader: LeaderSpec::Etc { e: Length::Fixed(100) },
        follower: FollowerSpec::per_arm(BaseSpec::Etc { e: Length::Fixed(200) }),
        game: GameConfig::new(20_000, InfoStructure::StrongDsg, 0, 200),
        benchmarks: BenchmarkSelection {
            kinds: vec![BenchmarkKind::GammaTolerant],
            params: BenchmarkParams::gamma(0.1),
        },
        sweep: None,
        out: None,
        sampled_rewards: false,
        traces: true,
    };
    let out = simulate(&cfg)?;
    let wrong = out.traces.iter().filter(|t| t.rounds.last().is_some_and(|r| r.a == 1)).count();
    println!("committed to a2 in {wrong} of {} trials", out.traces.len());
    for player in Player::BOTH {
        let r = out.mean_regret(player, BenchmarkKind::GammaTolerant);
        println!("{player}: mean regret {r:.0} = {:.3} T", r / cfg.game.horizon as f64);
    }
    Ok(())
}
