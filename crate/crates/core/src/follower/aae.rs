use crate::error::{Error, Result};
use crate::follower::BaseLearner;
use crate::leader::phase_length;

/// Active arm elimination with phase lengths `M_1, M_2, ..`.
///
/// Phase `s + 1` cycles through the active arms until each has `M_{s+1}`
/// pulls in the phase. Arms whose phase mean plus
/// `20 sqrt(ln T) / sqrt(M_{s+1})` falls below the best phase mean are then
/// dropped. Only samples from the current phase are used.
#[derive(Debug, Clone, PartialEq)]
pub struct Aae {
    log_t: f64,
    schedule: Vec<u64>,
    auto_extend: bool,
    completed: usize,
    active: Vec<usize>,
    pulls_in_phase: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl Aae {
    pub fn new(arms: usize, horizon: u64, schedule: Vec<u64>, auto_extend: bool) -> Self {
        Self {
            log_t: (horizon as f64).ln(),
            schedule,
            auto_extend,
            completed: 0,
            active: (0..arms).collect(),
            pulls_in_phase: 0,
            counts: vec![0; arms],
            sums: vec![0.0; arms],
        }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn completed_phases(&self) -> usize {
        self.completed
    }

    /// Elimination margin after a phase of length `m`.
    pub fn threshold(&self, m: u64) -> f64 {
        20.0 * self.log_t.sqrt() / (m as f64).sqrt()
    }

    fn current_length(&mut self) -> Option<u64> {
        phase_length(&mut self.schedule, self.completed + 1, self.auto_extend)
    }

    pub fn choose(&mut self) -> Result<usize> {
        if self.current_length().is_none() {
            return Err(Error::ScheduleExhausted {
                phases: self.schedule.len(),
                round: 0,
            });
        }
        let i = (self.pulls_in_phase % self.active.len() as u64) as usize;
        Ok(self.active[i])
    }

    pub fn observe(&mut self, arm: usize, reward: f64) {
        let Some(m) = self.current_length() else { return };
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.pulls_in_phase += 1;
        if self.active.iter().all(|&b| self.counts[b] == m) {
            let means: Vec<f64> = self.active.iter().map(|&b| self.sums[b] / m as f64).collect();
            let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let margin = self.threshold(m);
            self.active = self
                .active
                .iter()
                .zip(&means)
                .filter(|&(_, &mean)| mean + margin >= best)
                .map(|(&b, _)| b)
                .collect();
            self.completed += 1;
            self.pulls_in_phase = 0;
            self.counts.iter_mut().for_each(|c| *c = 0);
            self.sums.iter_mut().for_each(|s| *s = 0.0);
        }
    }
}

impl BaseLearner for Aae {
    fn next_arm(&mut self) -> Result<usize> {
        self.choose()
    }

    fn record(&mut self, arm: usize, reward: f64) {
        self.observe(arm, reward);
    }
}

/// AAE choice from a per-arm `(arm, reward)` history.
pub fn aae_base_act(arms: usize, horizon: u64, schedule: &[u64], history: &[(usize, f64)]) -> Result<usize> {
    let mut p = Aae::new(arms, horizon, schedule.to_vec(), false);
    for &(b, r) in history {
        p.observe(b, r);
    }
    p.choose()
}
