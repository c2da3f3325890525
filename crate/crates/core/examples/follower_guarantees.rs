//! Per-round and cumulative follower suboptimality checks.

use stackelberg_dsg::cli::run_trials;
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let inst = Instance::from_matrices(vec![vec![0.5; 4]], vec![vec![0.8, 0.6, 0.5, 0.2]])?;
    let cfg = GameConfig::new(20_000, InfoStructure::StrongDsg, 0, 10);
    let leader = LeaderSpec::Etc { e: Length::Fixed(1) };

    let g = BoundSpec::sqrt_instantaneous(28.0);
    let h = instantaneous_to_anytime(&g);
    println!("g(100) = {:.3}, h(100) = {:.3}", g.eval(100, cfg.horizon, 4), h.eval(100, cfg.horizon, 4));

    // AAE is held to g and its prefix sums, UCB to a square-root anytime bound.
    for (base, anytime) in [(BaseSpec::aae(1.0), h.clone()), (BaseSpec::Ucb, BoundSpec::sqrt_anytime(3.1))] {
        let name = base.name();
        let traces = run_trials(&inst, &leader, &FollowerSpec::per_arm(base), &cfg)?;
        let (mut inst_bad, mut any_bad) = (0, 0);
        for tr in &traces {
            inst_bad += instantaneous_violations(tr, &inst, &g).count;
            any_bad += anytime_violations(tr, &inst, &anytime).count;
        }
        println!("{name}: {inst_bad} instantaneous and {any_bad} anytime violations over {} rounds", cfg.trials * cfg.horizon);
    }
    Ok(())
}
