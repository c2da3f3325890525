//! Round-by-round execution of a decentralized Stackelberg game.

use std::fmt;
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::follower::FollowerSpec;
use crate::instance::{Instance, Player};
use crate::leader::LeaderSpec;

/// Whether the leader gets to see the follower's action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfoStructure {
    /// The leader observes only its own action and reward.
    #[serde(rename = "strong", alias = "StrongDSG", alias = "strong_dsg")]
    StrongDsg,
    /// The leader also observes the follower's action.
    #[serde(rename = "weak", alias = "WeakDSG", alias = "weak_dsg")]
    WeakDsg,
}

impl fmt::Display for InfoStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfoStructure::StrongDsg => "StrongDSG",
            InfoStructure::WeakDsg => "WeakDSG",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub horizon: u64,
    pub info: InfoStructure,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "one")]
    pub trials: u64,
}

fn one() -> u64 {
    1
}

impl GameConfig {
    pub fn new(horizon: u64, info: InfoStructure, base_seed: u64, trials: u64) -> Self {
        Self {
            horizon,
            info,
            base_seed,
            trials,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParam("horizon must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParam("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// What the leader learns after a round. `b` is absent under StrongDSG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeaderHistoryEntry {
    pub t: u64,
    pub a: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<usize>,
    pub r1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowerHistoryEntry {
    pub t: u64,
    pub a: usize,
    pub b: usize,
    pub r2: f64,
}

/// Rounds of `history` played against leader action `a`, as
/// `(pull index, follower action, follower reward)` with pull indices
/// counting from 0.
pub fn per_arm_history(history: &[FollowerHistoryEntry], a: usize) -> Vec<(u64, usize, f64)> {
    history
        .iter()
        .filter(|e| e.a == a)
        .enumerate()
        .map(|(n, e)| (n as u64, e.b, e.r2))
        .collect()
}

/// A distribution over actions emitted by a policy.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionDist {
    Point(usize),
    Weights(Vec<f64>),
}

impl ActionDist {
    /// Draws an action. Point masses consume no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, n_actions: usize, rng: &mut R) -> Result<usize> {
        match self {
            ActionDist::Point(i) if *i < n_actions => Ok(*i),
            ActionDist::Point(i) => Err(Error::UnknownAction(format!("index {i} of {n_actions}"))),
            ActionDist::Weights(w) => {
                if w.len() != n_actions {
                    return Err(Error::DimensionMismatch(format!(
                        "distribution over {} actions, expected {n_actions}",
                        w.len()
                    )));
                }
                let dist = WeightedIndex::new(w)
                    .map_err(|e| Error::InvalidParam(format!("bad action weights: {e}")))?;
                Ok(dist.sample(rng))
            }
        }
    }
}

pub trait LeaderPolicy: Send {
    /// Distribution for the next action given `t` completed rounds.
    fn act(&mut self, t: u64, rng: &mut ChaCha8Rng) -> Result<ActionDist>;
    fn observe(&mut self, entry: &LeaderHistoryEntry);
}

pub trait FollowerPolicy: Send {
    /// Distribution over follower actions after seeing leader action `a`.
    fn act(&mut self, a: usize, t: u64, rng: &mut ChaCha8Rng) -> Result<ActionDist>;
    fn observe(&mut self, entry: &FollowerHistoryEntry);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u64,
    pub a: usize,
    pub b: usize,
    pub r1: f64,
    pub r2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl RoundRecord {
    pub fn mean(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.v1,
            Player::Follower => self.v2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub trial: u64,
    pub rounds: Vec<RoundRecord>,
    /// Final pull count per leader action.
    pub leader_pulls: Vec<u64>,
    /// Final pull count per (leader, follower) pair, row-major.
    pub pair_pulls: Vec<Vec<u64>>,
}

pub const TRACE_HEADER: [&str; 7] = ["t", "a", "b", "r1", "r2", "v1", "v2"];

impl RunTrace {
    pub fn horizon(&self) -> u64 {
        self.rounds.len() as u64
    }

    /// Writes the trace as CSV using the instance's action labels. With
    /// `with_header` false only data rows are written.
    pub fn write_csv<W: Write>(
        &self,
        inst: &Instance,
        out: &mut csv::Writer<W>,
        trial_column: bool,
        with_header: bool,
    ) -> Result<()> {
        if with_header {
            if trial_column {
                out.write_field("trial")?;
            }
            out.write_record(TRACE_HEADER)?;
        }
        for r in &self.rounds {
            if trial_column {
                out.write_field(self.trial.to_string())?;
            }
            out.write_record([
                r.t.to_string(),
                inst.leader_actions()[r.a].clone(),
                inst.follower_actions()[r.b].clone(),
                r.r1.to_string(),
                r.r2.to_string(),
                r.v1.to_string(),
                r.v2.to_string(),
            ])?;
        }
        Ok(())
    }
}

/// Per-trial root seed, a pure function of `(base_seed, trial)`.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    let mut z = base_seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent streams split from one trial seed.
pub struct TrialRngs {
    pub leader_policy: ChaCha8Rng,
    pub follower_policy: ChaCha8Rng,
    pub leader_rewards: ChaCha8Rng,
    pub follower_rewards: ChaCha8Rng,
}

impl TrialRngs {
    pub fn new(seed: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            rng
        };
        Self {
            leader_policy: stream(0),
            follower_policy: stream(1),
            leader_rewards: stream(2),
            follower_rewards: stream(3),
        }
    }
}

/// One unit-variance Gaussian reward around `mean`.
#[inline]
pub fn sample_reward<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + z
}

/// Plays one trial of the game described by the specs.
pub fn run_game(
    inst: &Instance,
    leader: &LeaderSpec,
    follower: &FollowerSpec,
    cfg: &GameConfig,
    trial: u64,
) -> Result<RunTrace> {
    cfg.validate()?;
    let mut l = leader.build(inst, cfg.horizon, cfg.info)?;
    let mut f = follower.build(inst, cfg.horizon)?;
    run_with_policies(inst, l.as_mut(), f.as_mut(), cfg, trial)
}

/// Plays one trial with already constructed policies.
pub fn run_with_policies(
    inst: &Instance,
    leader: &mut dyn LeaderPolicy,
    follower: &mut dyn FollowerPolicy,
    cfg: &GameConfig,
    trial: u64,
) -> Result<RunTrace> {
    let (na, nb) = (inst.n_leader(), inst.n_follower());
    let mut rngs = TrialRngs::new(trial_seed(cfg.base_seed, trial));
    let mut rounds = Vec::with_capacity(cfg.horizon as usize);
    let mut leader_pulls = vec![0u64; na];
    let mut pair_pulls = vec![vec![0u64; nb]; na];

    for done in 0..cfg.horizon {
        let round = done + 1;
        let a = leader
            .act(done, &mut rngs.leader_policy)
            .and_then(|d| d.sample(na, &mut rngs.leader_policy))
            .map_err(|e| e.at_round(round))?;
        let b = follower
            .act(a, done, &mut rngs.follower_policy)
            .and_then(|d| d.sample(nb, &mut rngs.follower_policy))
            .map_err(|e| e.at_round(round))?;
        let (v1, v2) = (inst.v1(a, b), inst.v2(a, b));
        let r1 = sample_reward(v1, &mut rngs.leader_rewards);
        let r2 = sample_reward(v2, &mut rngs.follower_rewards);

        leader.observe(&LeaderHistoryEntry {
            t: round,
            a,
            b: match cfg.info {
                InfoStructure::StrongDsg => None,
                InfoStructure::WeakDsg => Some(b),
            },
            r1,
        });
        follower.observe(&FollowerHistoryEntry { t: round, a, b, r2 });

        leader_pulls[a] += 1;
        pair_pulls[a][b] += 1;
        rounds.push(RoundRecord {
            t: round,
            a,
            b,
            r1,
            r2,
            v1,
            v2,
        });
    }
    Ok(RunTrace {
        trial,
        rounds,
        leader_pulls,
        pair_pulls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_canonical_instance, FamilyParams};
    use crate::follower::{BaseSpec, FollowerSpec};
    use crate::leader::{Length, LeaderSpec};

    fn table3() -> Instance {
        make_canonical_instance("table3", &FamilyParams::default()).unwrap()
    }

    fn etc_pair() -> (LeaderSpec, FollowerSpec) {
        (
            LeaderSpec::Etc { e: Length::Fixed(100) },
            FollowerSpec::per_arm(BaseSpec::Etc { e: Length::Fixed(100) }),
        )
    }

    #[test]
    fn single_cell_game_is_constant() {
        let inst = Instance::from_matrices(vec![vec![0.4]], vec![vec![0.7]]).unwrap();
        let cfg = GameConfig::new(5, InfoStructure::StrongDsg, 3, 1);
        let (l, f) = (
            LeaderSpec::ExploreThenUcb { e: Length::Fixed(1) },
            FollowerSpec::per_arm(BaseSpec::Ucb),
        );
        let trace = run_game(&inst, &l, &f, &cfg, 0).unwrap();
        assert_eq!(trace.rounds.len(), 5);
        assert!(trace.rounds.iter().all(|r| r.a == 0 && r.b == 0 && r.v1 == 0.4 && r.v2 == 0.7));
        assert_eq!(trace.leader_pulls, vec![5]);
    }

    #[test]
    fn etc_explore_prefix_is_round_robin() {
        let (l, f) = etc_pair();
        let cfg = GameConfig::new(1000, InfoStructure::StrongDsg, 42, 1);
        let trace = run_game(&table3(), &l, &f, &cfg, 0).unwrap();
        for r in &trace.rounds[..200] {
            assert_eq!(r.a as u64, (r.t - 1) % 2);
        }
    }

    #[test]
    fn pull_counts_are_consistent_and_runs_repeat() {
        let (l, f) = etc_pair();
        let cfg = GameConfig::new(1000, InfoStructure::StrongDsg, 42, 1);
        let x = run_game(&table3(), &l, &f, &cfg, 0).unwrap();
        let y = run_game(&table3(), &l, &f, &cfg, 0).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.leader_pulls.iter().sum::<u64>(), 1000);
        for (a, row) in x.pair_pulls.iter().enumerate() {
            assert_eq!(row.iter().sum::<u64>(), x.leader_pulls[a]);
        }
    }

    #[test]
    fn trials_use_distinct_streams() {
        let (l, f) = etc_pair();
        let cfg = GameConfig::new(500, InfoStructure::StrongDsg, 42, 2);
        let x = run_game(&table3(), &l, &f, &cfg, 0).unwrap();
        let y = run_game(&table3(), &l, &f, &cfg, 1).unwrap();
        assert_ne!(x.rounds[0].r1, y.rounds[0].r1);
        // Running trial 1 first does not change trial 0.
        let x2 = run_game(&table3(), &l, &f, &cfg, 0).unwrap();
        assert_eq!(x, x2);
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|t| trial_seed(42, t)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn reward_samples_are_reproducible_and_unit_normal() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(sample_reward(0.5, &mut a), sample_reward(0.5, &mut b));

        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..n).map(|_| sample_reward(0.3, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 0.3).abs() < 0.004, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn weighted_distributions_are_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = ActionDist::Weights(vec![0.0, 1.0, 0.0]);
        assert_eq!(d.sample(3, &mut rng).unwrap(), 1);
        assert!(ActionDist::Weights(vec![1.0]).sample(3, &mut rng).is_err());
        assert!(ActionDist::Point(4).sample(3, &mut rng).is_err());
    }

    struct Recorder(Vec<LeaderHistoryEntry>);

    impl LeaderPolicy for Recorder {
        fn act(&mut self, t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
            Ok(ActionDist::Point((t % 2) as usize))
        }
        fn observe(&mut self, entry: &LeaderHistoryEntry) {
            self.0.push(*entry);
        }
    }

    #[test]
    fn strong_leader_history_hides_follower_actions() {
        let inst = table3();
        for (info, hidden) in [(InfoStructure::StrongDsg, true), (InfoStructure::WeakDsg, false)] {
            let mut leader = Recorder(Vec::new());
            let mut follower = FollowerSpec::per_arm(BaseSpec::Ucb).build(&inst, 100).unwrap();
            let cfg = GameConfig::new(100, info, 5, 1);
            run_with_policies(&inst, &mut leader, follower.as_mut(), &cfg, 0).unwrap();
            let text = serde_json::to_string(&leader.0).unwrap();
            assert_eq!(!text.contains("\"b\""), hidden);
            assert_eq!(leader.0.iter().all(|e| e.b.is_none()), hidden);
        }
    }

    #[test]
    fn per_arm_projection() {
        let h: Vec<FollowerHistoryEntry> = (0..6)
            .map(|t| FollowerHistoryEntry {
                t: t + 1,
                a: (t % 2) as usize,
                b: 0,
                r2: t as f64,
            })
            .collect();
        let p = per_arm_history(&h, 0);
        assert_eq!(p, vec![(0, 0, 0.0), (1, 0, 2.0), (2, 0, 4.0)]);
    }

    #[test]
    fn trace_csv_has_labels() {
        let (l, f) = etc_pair();
        let inst = table3();
        let cfg = GameConfig::new(200, InfoStructure::StrongDsg, 1, 1);
        let mut trace = run_game(&inst, &l, &f, &cfg, 0).unwrap();
        trace.rounds.truncate(3);
        let mut w = csv::Writer::from_writer(Vec::new());
        trace.write_csv(&inst, &mut w, true, true).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,t,a,b,r1,r2,v1,v2");
        assert!(lines[1].starts_with("0,1,a1,b1,"));
        assert_eq!(lines.len(), 4);
    }
}
