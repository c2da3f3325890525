use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{argmax, ArmStats};
use crate::engine::{ActionDist, LeaderHistoryEntry, LeaderPolicy};
use crate::error::Result;

/// Per-arm view of a UCB computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UcbSnapshot {
    pub means: Vec<f64>,
    pub widths: Vec<f64>,
    pub ucb: Vec<f64>,
    pub counts: Vec<u64>,
}

impl UcbSnapshot {
    fn build(stats: &ArmStats, width: impl Fn(u64) -> f64) -> Self {
        let arms = stats.counts.len();
        let mut s = UcbSnapshot {
            means: vec![0.0; arms],
            widths: vec![f64::INFINITY; arms],
            ucb: vec![1.0; arms],
            counts: stats.counts.clone(),
        };
        for a in 0..arms {
            if stats.counts[a] > 0 {
                s.means[a] = stats.mean(a);
                s.widths[a] = width(stats.counts[a]);
            }
            s.ucb[a] = stats.ucb(a, &width);
        }
        s
    }

    pub fn choice(&self) -> usize {
        argmax(self.ucb.iter().copied())
    }
}

/// Blocked exploration (`E` consecutive rounds per arm), then UCB on the
/// rounds after exploration with width `10 sqrt(ln T) / sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploreThenUcb {
    arms: usize,
    explore: u64,
    log_t: f64,
    seen: u64,
    stats: ArmStats,
}

impl ExploreThenUcb {
    pub fn new(arms: usize, explore: u64, horizon: u64) -> Self {
        Self {
            arms,
            explore,
            log_t: (horizon as f64).ln(),
            seen: 0,
            stats: ArmStats::new(arms),
        }
    }

    fn width(&self, n: u64) -> f64 {
        10.0 * self.log_t.sqrt() / (n as f64).sqrt()
    }

    pub fn snapshot(&self) -> UcbSnapshot {
        UcbSnapshot::build(&self.stats, |n| self.width(n))
    }

    pub fn next_arm(&self) -> usize {
        if self.seen < self.explore * self.arms as u64 {
            return (self.seen / self.explore) as usize;
        }
        argmax((0..self.arms).map(|a| self.stats.ucb(a, |n| self.width(n))))
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        if self.seen >= self.explore * self.arms as u64 {
            self.stats.add(arm, reward);
        }
        self.seen += 1;
    }
}

impl LeaderPolicy for ExploreThenUcb {
    fn act(&mut self, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        Ok(ActionDist::Point(self.next_arm()))
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.record(e.a, e.r1);
    }
}

/// UCB on all observations with width
/// `10 sqrt(|B| ln T / n) + C L sqrt(ln T / n)`.
///
/// With `general = Some((c1, c3))` the second term becomes
/// `C L (ln T)^c3 T^(c1 - 1)`, independent of the count.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzUcb {
    arms: usize,
    base_coef: f64,
    extra_coef: f64,
    general: bool,
    stats: ArmStats,
}

impl LipschitzUcb {
    pub fn new(arms: usize, followers: usize, horizon: u64, l: f64, c: f64, general: Option<(f64, f64)>) -> Self {
        let log_t = (horizon as f64).ln();
        let base_coef = 10.0 * (followers as f64 * log_t).sqrt();
        let extra_coef = match general {
            None => c * l * log_t.sqrt(),
            Some((c1, c3)) => c * l * log_t.powf(c3) * (horizon as f64).powf(c1 - 1.0),
        };
        Self {
            arms,
            base_coef,
            extra_coef,
            general: general.is_some(),
            stats: ArmStats::new(arms),
        }
    }

    fn width(&self, n: u64) -> f64 {
        let root = (n as f64).sqrt();
        if self.general {
            self.base_coef / root + self.extra_coef
        } else {
            self.base_coef / root + self.extra_coef / root
        }
    }

    pub fn snapshot(&self) -> UcbSnapshot {
        UcbSnapshot::build(&self.stats, |n| self.width(n))
    }

    pub fn next_arm(&self) -> usize {
        argmax((0..self.arms).map(|a| self.stats.ucb(a, |n| self.width(n))))
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.stats.add(arm, reward);
    }
}

impl LeaderPolicy for LipschitzUcb {
    fn act(&mut self, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        Ok(ActionDist::Point(self.next_arm()))
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.record(e.a, e.r1);
    }
}

pub fn explore_then_ucb_act(explore: u64, horizon: u64, arms: usize, history: &[(usize, f64)]) -> ActionDist {
    let mut p = ExploreThenUcb::new(arms, explore, horizon);
    for &(a, r) in history {
        p.record(a, r);
    }
    ActionDist::Point(p.next_arm())
}

pub fn lipschitz_ucb_act(
    l: f64,
    c: f64,
    horizon: u64,
    followers: usize,
    arms: usize,
    history: &[(usize, f64)],
) -> ActionDist {
    let mut p = LipschitzUcb::new(arms, followers, horizon, l, c, None);
    for &(a, r) in history {
        p.record(a, r);
    }
    ActionDist::Point(p.next_arm())
}

#[allow(clippy::too_many_arguments)]
pub fn lipschitz_ucb_gen_act(
    l: f64,
    c: f64,
    c1: f64,
    c3: f64,
    horizon: u64,
    followers: usize,
    arms: usize,
    history: &[(usize, f64)],
) -> ActionDist {
    let mut p = LipschitzUcb::new(arms, followers, horizon, l, c, Some((c1, c3)));
    for &(a, r) in history {
        p.record(a, r);
    }
    ActionDist::Point(p.next_arm())
}
