use rand_chacha::ChaCha8Rng;

use super::ArmStats;
use crate::engine::{ActionDist, LeaderHistoryEntry, LeaderPolicy};
use crate::error::Result;

/// Explore-then-commit over `arms` arms.
///
/// Plays arm `n mod arms` for the first `explore * arms` observations, then
/// commits to the best empirical mean of that prefix. Later rewards are
/// ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Etc {
    arms: usize,
    explore: u64,
    seen: u64,
    stats: ArmStats,
    committed: Option<usize>,
}

impl Etc {
    pub fn new(arms: usize, explore: u64) -> Self {
        Self {
            arms,
            explore,
            seen: 0,
            stats: ArmStats::new(arms),
            committed: None,
        }
    }

    pub fn prefix_len(&self) -> u64 {
        self.explore * self.arms as u64
    }

    pub fn committed(&self) -> Option<usize> {
        self.committed
    }

    pub fn next_arm(&mut self) -> Result<usize> {
        if self.seen < self.prefix_len() {
            return Ok((self.seen % self.arms as u64) as usize);
        }
        if let Some(arm) = self.committed {
            return Ok(arm);
        }
        let arm = self.stats.best_mean()?;
        self.committed = Some(arm);
        Ok(arm)
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        if self.seen < self.prefix_len() {
            self.stats.add(arm, reward);
        }
        self.seen += 1;
    }
}

impl LeaderPolicy for Etc {
    fn act(&mut self, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        self.next_arm().map(ActionDist::Point)
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.record(e.a, e.r1);
    }
}

/// Round-robin for `throw_out * arms` observations that are then discarded,
/// followed by a fresh [`Etc`] on the remaining history.
#[derive(Debug, Clone, PartialEq)]
pub struct EtcThrowOut {
    arms: usize,
    throw_out: u64,
    seen: u64,
    inner: Etc,
}

impl EtcThrowOut {
    pub fn new(arms: usize, explore: u64, throw_out: u64) -> Self {
        Self {
            arms,
            throw_out,
            seen: 0,
            inner: Etc::new(arms, explore),
        }
    }

    pub fn inner(&self) -> &Etc {
        &self.inner
    }

    pub fn next_arm(&mut self) -> Result<usize> {
        let skip = self.throw_out * self.arms as u64;
        if self.seen < skip {
            Ok((self.seen % self.arms as u64) as usize)
        } else {
            self.inner.next_arm()
        }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        if self.seen >= self.throw_out * self.arms as u64 {
            self.inner.record(arm, reward);
        }
        self.seen += 1;
    }
}

impl LeaderPolicy for EtcThrowOut {
    fn act(&mut self, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        self.next_arm().map(ActionDist::Point)
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.record(e.a, e.r1);
    }
}

/// Next action of explore-then-commit given the full `(arm, reward)` history.
pub fn etc_act(explore: u64, arms: usize, history: &[(usize, f64)]) -> Result<ActionDist> {
    let mut p = Etc::new(arms, explore);
    for &(arm, r) in history {
        p.record(arm, r);
    }
    p.next_arm().map(ActionDist::Point)
}

/// Next action of explore-then-commit with a discarded round-robin prefix.
pub fn etc_throwout_act(explore: u64, throw_out: u64, arms: usize, history: &[(usize, f64)]) -> Result<ActionDist> {
    let mut p = EtcThrowOut::new(arms, explore, throw_out);
    for &(arm, r) in history {
        p.record(arm, r);
    }
    p.next_arm().map(ActionDist::Point)
}
