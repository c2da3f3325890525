//! Leader UCB with confidence widths widened by the game's Lipschitz
//! constant, against per-arm UCB followers.

use stackelberg_dsg::cli::{sweep, BenchmarkSelection, ExperimentConfig, InstanceSource, SweepSpec};
use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let params = FamilyParams {
        x: Some(0.3),
        y: Some(0.15),
        ..FamilyParams::default()
    };
    let inst = make_canonical_instance("misaligned_inverted", &params)?;
    let l = lipschitz_constant(&inst);
    println!("L* = {l}");

    let c: f64 = std::env::args().nth(1).map_or(2.7, |s| s.parse().expect("number"));
    let cfg = ExperimentConfig {
        instance: InstanceSource::family("misaligned_inverted", params),
        leader: LeaderSpec::LipschitzUcb { l, c },
        follower: FollowerSpec::per_arm(BaseSpec::Ucb),
        game: GameConfig::new(1 << 12, InfoStructure::StrongDsg, 0, 50),
        benchmarks: BenchmarkSelection {
            kinds: vec![BenchmarkKind::Orig],
            params: BenchmarkParams::default(),
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
    for p in out.points.iter().filter(|p| p.player != "max") {
        println!("T = {:>6}  {:<8}  regret = {:>9.1}", p.horizon, p.player, p.mean_regret);
    }
    for f in &out.fits {
        println!("{} slope {:.3}", f.player, f.slope);
    }
    Ok(())
}
