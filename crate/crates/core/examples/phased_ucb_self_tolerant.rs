//! Phased UCB leader that watches follower actions (weak information)
//! against per-arm AAE followers sharing its phase schedule.

use stackelberg_dsg::cli::{sweep, BenchmarkSelection, ExperimentConfig, InstanceSource, SweepSpec};
use stackelberg_dsg::leader::compute_active_arms;
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let inst = make_canonical_instance("table2", &FamilyParams::with_delta(0.1))?;
    let horizon = 1 << 14;
    println!("phase lengths at T = {horizon}: {:?}", Schedule::default().resolve(horizon)?);

    // The strong information structure hides what the phased leader needs.
    let strong = LeaderSpec::PhasedUcb {
        schedule: Schedule::default(),
        auto_extend: false,
    }
    .build(&inst, horizon, InfoStructure::StrongDsg);
    println!("under StrongDSG: {}", strong.err().map(|e| e.to_string()).unwrap_or_default());

    // Active follower sets replayed from a short hand-written history.
    let history: Vec<_> = (0..12u64)
        .map(|t| stackelberg_dsg::engine::LeaderHistoryEntry {
            t: t + 1,
            a: 0,
            b: Some(if t < 9 { 0 } else { 1 }),
            r1: 0.0,
        })
        .collect();
    println!("active sets: {:?}", compute_active_arms(&[3, 8, 20], 2, 2, &history)?);

    let cfg = ExperimentConfig {
        instance: InstanceSource::family("table2", FamilyParams::with_delta(0.1)),
        leader: LeaderSpec::PhasedUcb {
            schedule: Schedule::default(),
            auto_extend: false,
        },
        follower: FollowerSpec::per_arm(BaseSpec::aae(1.0)),
        game: GameConfig::new(1 << 12, InfoStructure::WeakDsg, 0, 50),
        benchmarks: BenchmarkSelection {
            kinds: vec![BenchmarkKind::SelfTolerant],
            params: BenchmarkParams::gamma(0.3),
        },
        sweep: Some(SweepSpec {
            horizons: (12..=16).map(|k| 1u64 << k).collect(),
            delta: None,
        }),
        out: None,
        sampled_rewards: false,
        traces: false,
    };
    let out = sweep(&cfg)?;
    for p in out.points.iter().filter(|p| p.player == "max") {
        println!("T = {:>6}  regret = {:>8.1}", p.horizon, p.mean_regret);
    }
    if let Some(fit) = out.fit("max", BenchmarkKind::SelfTolerant) {
        println!("slope {:.3}", fit.slope);
    }
    Ok(())
}
