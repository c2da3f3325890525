//! One seeded game, its trace and the players' regret.

use stackelberg_dsg::metrics::{checkpoints, regret_curve};
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let inst = make_canonical_instance("table2", &FamilyParams::with_delta(0.1))?;
    let leader = LeaderSpec::ExploreThenUcb {
        e: Length::rule(LengthRule::ExploreUcb),
    };
    let follower = FollowerSpec::per_arm(BaseSpec::Ucb);
    let cfg = GameConfig::new(5_000, InfoStructure::StrongDsg, 7, 1);
    let trace = run_game(&inst, &leader, &follower, &cfg, 0)?;

    let mut w = csv::Writer::from_writer(std::io::stdout());
    let head = RunTrace {
        rounds: trace.rounds[..5].to_vec(),
        ..trace.clone()
    };
    head.write_csv(&inst, &mut w, false, true)?;
    drop(w);

    println!("leader pulls {:?}, pair pulls {:?}", trace.leader_pulls, trace.pair_pulls);
    let report = benchmark_gamma_tolerant(&inst, &BenchmarkParams::gamma(0.3))?;
    let at = checkpoints(cfg.horizon);
    for player in Player::BOTH {
        let curve = regret_curve(&trace, report.beta(player), player, &at);
        let last = curve.last().copied().unwrap_or_default();
        println!("{player}: regret {last:.1} against beta {:.3}", report.beta(player));
    }
    Ok(())
}
