use rand_chacha::ChaCha8Rng;

use super::{argmax, phase_length, ArmStats};
use crate::engine::{ActionDist, LeaderHistoryEntry, LeaderPolicy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct ArmPhase {
    completed: usize,
    window_start: u64,
    window_counts: Vec<u64>,
    active: Vec<usize>,
}

/// Tracks, for every leader action, the follower arms that were active in
/// the follower's last completed elimination phase.
///
/// A new phase is detected when some pair count inside the current window
/// exceeds `M_{s+1}`. The active set becomes the arms seen in the window
/// before that round, and the new window starts at that round.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveArms {
    schedule: Vec<u64>,
    auto_extend: bool,
    arms: Vec<ArmPhase>,
    exhausted: Option<(usize, u64)>,
}

impl ActiveArms {
    pub fn new(leaders: usize, followers: usize, schedule: Vec<u64>, auto_extend: bool) -> Self {
        let fresh = ArmPhase {
            completed: 0,
            window_start: 1,
            window_counts: vec![0; followers],
            active: (0..followers).collect(),
        };
        Self {
            schedule,
            auto_extend,
            arms: vec![fresh; leaders],
            exhausted: None,
        }
    }

    /// Feeds the round `t` (1-based) in which `(a, b)` was played.
    pub fn record(&mut self, t: u64, a: usize, b: usize) {
        if self.exhausted.is_some() {
            return;
        }
        let state = &mut self.arms[a];
        state.window_counts[b] += 1;
        let Some(limit) = phase_length(&mut self.schedule, state.completed + 1, self.auto_extend) else {
            self.exhausted = Some((self.schedule.len(), t));
            return;
        };
        if state.window_counts[b] > limit {
            state.window_counts[b] -= 1;
            state.active = (0..state.window_counts.len())
                .filter(|&x| state.window_counts[x] > 0)
                .collect();
            state.completed += 1;
            state.window_start = t;
            state.window_counts.iter_mut().for_each(|c| *c = 0);
            state.window_counts[b] = 1;
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.exhausted {
            Some((phases, round)) => Err(Error::ScheduleExhausted { phases, round }),
            None => Ok(()),
        }
    }

    pub fn active(&self, a: usize) -> &[usize] {
        &self.arms[a].active
    }

    pub fn completed_phases(&self, a: usize) -> usize {
        self.arms[a].completed
    }

    pub fn window_start(&self, a: usize) -> u64 {
        self.arms[a].window_start
    }

    pub fn all_active(&self) -> Vec<Vec<usize>> {
        self.arms.iter().map(|s| s.active.clone()).collect()
    }
}

/// Active follower arms per leader action after replaying a WeakDSG history.
pub fn compute_active_arms(
    schedule: &[u64],
    leaders: usize,
    followers: usize,
    history: &[LeaderHistoryEntry],
) -> Result<Vec<Vec<usize>>> {
    let mut tracker = ActiveArms::new(leaders, followers, schedule.to_vec(), false);
    for e in history {
        let b = e.b.ok_or_else(|| {
            Error::IncompatibleInfoStructure(format!("round {} carries no follower action", e.t))
        })?;
        tracker.record(e.t, e.a, b);
    }
    tracker.check()?;
    Ok(tracker.all_active())
}

/// Per-pair UCB with width `10 sqrt(ln T / n)`; picks the leader action whose
/// best active pair has the largest bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedUcb {
    leaders: usize,
    followers: usize,
    log_t: f64,
    pairs: ArmStats,
    active: ActiveArms,
    blind: bool,
}

impl PhasedUcb {
    pub fn new(leaders: usize, followers: usize, horizon: u64, schedule: Vec<u64>, auto_extend: bool) -> Self {
        Self {
            leaders,
            followers,
            log_t: (horizon as f64).ln(),
            pairs: ArmStats::new(leaders * followers),
            active: ActiveArms::new(leaders, followers, schedule, auto_extend),
            blind: false,
        }
    }

    pub fn active_arms(&self) -> &ActiveArms {
        &self.active
    }

    pub fn pair_ucb(&self, a: usize, b: usize) -> f64 {
        let log_t = self.log_t;
        self.pairs
            .ucb(a * self.followers + b, |n| 10.0 * (log_t / n as f64).sqrt())
    }

    pub fn next_arm(&self) -> Result<usize> {
        if self.blind {
            return Err(Error::IncompatibleInfoStructure(
                "phased_ucb received a round without the follower action".into(),
            ));
        }
        self.active.check()?;
        Ok(argmax((0..self.leaders).map(|a| {
            self.active
                .active(a)
                .iter()
                .map(|&b| self.pair_ucb(a, b))
                .fold(f64::NEG_INFINITY, f64::max)
        })))
    }

    pub fn record(&mut self, e: &LeaderHistoryEntry) {
        match e.b {
            Some(b) => {
                self.pairs.add(e.a * self.followers + b, e.r1);
                self.active.record(e.t, e.a, b);
            }
            None => self.blind = true,
        }
    }
}

impl LeaderPolicy for PhasedUcb {
    fn act(&mut self, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        self.next_arm().map(ActionDist::Point)
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.record(e);
    }
}

pub fn phased_ucb_act(
    schedule: &[u64],
    horizon: u64,
    leaders: usize,
    followers: usize,
    history: &[LeaderHistoryEntry],
) -> Result<ActionDist> {
    let mut p = PhasedUcb::new(leaders, followers, horizon, schedule.to_vec(), false);
    for e in history {
        p.record(e);
    }
    p.next_arm().map(ActionDist::Point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(t: u64, a: usize, b: usize) -> LeaderHistoryEntry {
        LeaderHistoryEntry { t, a, b: Some(b), r1: 0.0 }
    }

    #[test]
    fn empty_history_keeps_everything_active() {
        assert_eq!(compute_active_arms(&[4, 16], 2, 3, &[]).unwrap(), vec![vec![0, 1, 2]; 2]);
        assert_eq!(phased_ucb_act(&[4], 10_000, 2, 2, &[]).unwrap(), ActionDist::Point(0));
    }

    #[test]
    fn trigger_is_strictly_above_the_phase_length() {
        // Leader action 0 sees b0 twice, b1 twice, then b0 again with M_1 = 2.
        let h: Vec<_> = [0, 1, 0, 1].iter().enumerate().map(|(i, &b)| entry(i as u64 + 1, 0, b)).collect();
        assert_eq!(compute_active_arms(&[2, 8], 1, 3, &h).unwrap(), vec![vec![0, 1, 2]]);
        let mut h2 = h.clone();
        h2.push(entry(5, 0, 0));
        assert_eq!(compute_active_arms(&[2, 8], 1, 3, &h2).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn untouched_leader_action_is_unchanged() {
        let h: Vec<_> = (0..50).map(|t| entry(t + 1, 0, 0)).collect();
        let sets = compute_active_arms(&[4, 16, 64], 2, 2, &h).unwrap();
        assert_eq!(sets[1], vec![0, 1]);
        assert_eq!(sets[0], vec![0]);
    }

    #[test]
    fn short_schedule_is_reported() {
        let h: Vec<_> = (0..10).map(|t| entry(t + 1, 0, 0)).collect();
        match compute_active_arms(&[1, 2], 1, 1, &h) {
            Err(Error::ScheduleExhausted { phases: 2, round }) => assert!(round <= 10),
            other => panic!("{other:?}"),
        }
        let mut tracker = ActiveArms::new(1, 1, vec![1, 2], true);
        for e in &h {
            tracker.record(e.t, e.a, 0);
        }
        assert!(tracker.check().is_ok());
    }

    #[test]
    fn strong_history_is_rejected() {
        let h = [LeaderHistoryEntry { t: 1, a: 0, b: None, r1: 0.0 }];
        assert!(matches!(
            compute_active_arms(&[4], 1, 2, &h),
            Err(Error::IncompatibleInfoStructure(_))
        ));
        assert!(phased_ucb_act(&[4], 100, 1, 2, &h).is_err());
    }

    #[test]
    fn pair_width() {
        let mut p = PhasedUcb::new(1, 1, 10_000, vec![1_000_000], false);
        for t in 0..100 {
            p.record(&LeaderHistoryEntry { t: t + 1, a: 0, b: Some(0), r1: -3.0 });
        }
        assert!((p.pair_ucb(0, 0) - (-3.0 + 10_000f64.ln().sqrt())).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn phases_only_move_forward(
            plays in prop::collection::vec((0usize..2, 0usize..3), 0..300)
        ) {
            let mut tracker = ActiveArms::new(2, 3, vec![2, 5, 11, 23, 47, 95, 191], false);
            let mut last = vec![(0usize, vec![0usize, 1, 2]); 2];
            for (i, &(a, b)) in plays.iter().enumerate() {
                tracker.record(i as u64 + 1, a, b);
                for x in 0..2 {
                    let (phase, set) = (tracker.completed_phases(x), tracker.active(x).to_vec());
                    prop_assert!(phase >= last[x].0);
                    if phase == last[x].0 {
                        prop_assert_eq!(&set, &last[x].1);
                    }
                    last[x] = (phase, set);
                }
            }
        }
    }
}
