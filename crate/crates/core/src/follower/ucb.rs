use crate::error::Result;
use crate::follower::BaseLearner;
use crate::leader::ArmStats;

/// UCB over the follower's arms: every arm once in index order, then the
/// largest `min(1, mean + 10 sqrt(ln T / n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ucb {
    log_t: f64,
    stats: ArmStats,
}

impl Ucb {
    pub fn new(arms: usize, horizon: u64) -> Self {
        Self {
            log_t: (horizon as f64).ln(),
            stats: ArmStats::new(arms),
        }
    }

    pub fn width(&self, n: u64) -> f64 {
        10.0 * (self.log_t / n as f64).sqrt()
    }

    pub fn bounds(&self) -> Vec<f64> {
        (0..self.stats.arms()).map(|b| self.stats.ucb(b, |n| self.width(n))).collect()
    }

    pub fn choose(&self) -> usize {
        if let Some(b) = self.stats.first_unpulled() {
            return b;
        }
        crate::leader::argmax(self.bounds())
    }
}

impl BaseLearner for Ucb {
    fn next_arm(&mut self) -> Result<usize> {
        Ok(self.choose())
    }

    fn record(&mut self, arm: usize, reward: f64) {
        self.stats.add(arm, reward);
    }
}

/// UCB follower choice from a per-arm `(arm, reward)` history.
pub fn ucb_base_act(arms: usize, horizon: u64, history: &[(usize, f64)]) -> usize {
    let mut u = Ucb::new(arms, horizon);
    for &(b, r) in history {
        u.record(b, r);
    }
    u.choose()
}
