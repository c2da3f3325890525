//! Follower policies: one independent base bandit learner per leader action.

mod aae;
mod ucb;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use aae::{aae_base_act, Aae};
pub use ucb::{ucb_base_act, Ucb};

use crate::engine::{ActionDist, FollowerHistoryEntry, FollowerPolicy};
use crate::error::Result;
use crate::instance::Instance;
use crate::leader::{Dims, Etc, Length, Schedule};

/// A bandit learner over the follower's actions.
pub trait BaseLearner: Send {
    fn next_arm(&mut self) -> Result<usize>;
    fn record(&mut self, arm: usize, reward: f64);
}

impl BaseLearner for Etc {
    fn next_arm(&mut self) -> Result<usize> {
        Etc::next_arm(self)
    }

    fn record(&mut self, arm: usize, reward: f64) {
        Etc::record(self, arm, reward)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    Etc {
        #[serde(rename = "E")]
        e: Length,
    },
    Ucb,
    Aae {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        log_factor: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phases: Option<usize>,
        #[serde(rename = "M_schedule", default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<u64>>,
        #[serde(default)]
        auto_extend: bool,
    },
}

impl BaseSpec {
    /// AAE with `M_i = ceil(log_factor ln T 4^i)`.
    pub fn aae(log_factor: f64) -> Self {
        BaseSpec::Aae {
            log_factor: Some(log_factor),
            base: None,
            phases: None,
            schedule: None,
            auto_extend: false,
        }
    }

    pub fn schedule(&self) -> Option<Schedule> {
        match self {
            BaseSpec::Aae {
                log_factor,
                base,
                phases,
                schedule,
                ..
            } => Some(match schedule {
                Some(m) => Schedule::Explicit(m.clone()),
                None => Schedule::Geometric {
                    log_factor: log_factor.unwrap_or(1.0),
                    base: base.unwrap_or(4.0),
                    phases: *phases,
                },
            }),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseSpec::Etc { .. } => "etc",
            BaseSpec::Ucb => "ucb",
            BaseSpec::Aae { .. } => "aae",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FollowerKind {
    #[default]
    PerArm,
}

/// Follower configuration: `{"kind": "per_arm", "base": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FollowerSpec {
    #[serde(default)]
    pub kind: FollowerKind,
    pub base: BaseSpec,
}

impl FollowerSpec {
    pub fn per_arm(base: BaseSpec) -> Self {
        Self {
            kind: FollowerKind::PerArm,
            base,
        }
    }

    pub fn build(&self, inst: &Instance, horizon: u64) -> Result<Box<dyn FollowerPolicy>> {
        Ok(Box::new(PerArm::new(&self.base, inst, horizon)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Factory {
    Etc(u64),
    Ucb,
    Aae(Vec<u64>, bool),
}

/// Runs a separate base learner for every leader action, created the first
/// time that action is seen and fed only that action's rounds.
pub struct PerArm {
    followers: usize,
    horizon: u64,
    factory: Factory,
    learners: Vec<Option<Box<dyn BaseLearner>>>,
}

impl PerArm {
    pub fn new(base: &BaseSpec, inst: &Instance, horizon: u64) -> Result<Self> {
        let factory = match base {
            BaseSpec::Etc { e } => Factory::Etc(e.resolve(Dims::of(inst, horizon))?),
            BaseSpec::Ucb => Factory::Ucb,
            BaseSpec::Aae { auto_extend, .. } => Factory::Aae(
                base.schedule().expect("aae has a schedule").resolve(horizon)?,
                *auto_extend,
            ),
        };
        Ok(Self {
            followers: inst.n_follower(),
            horizon,
            factory,
            learners: (0..inst.n_leader()).map(|_| None).collect(),
        })
    }

    fn learner(&mut self, a: usize) -> &mut dyn BaseLearner {
        let (nb, horizon, factory) = (self.followers, self.horizon, &self.factory);
        self.learners[a]
            .get_or_insert_with(|| -> Box<dyn BaseLearner> {
                match factory {
                    Factory::Etc(e) => Box::new(Etc::new(nb, *e)),
                    Factory::Ucb => Box::new(Ucb::new(nb, horizon)),
                    Factory::Aae(m, extend) => Box::new(Aae::new(nb, horizon, m.clone(), *extend)),
                }
            })
            .as_mut()
    }

    /// Whether a learner for leader action `a` has been created yet.
    pub fn is_started(&self, a: usize) -> bool {
        self.learners[a].is_some()
    }
}

impl FollowerPolicy for PerArm {
    fn act(&mut self, a: usize, _t: u64, _rng: &mut ChaCha8Rng) -> Result<ActionDist> {
        self.learner(a).next_arm().map(ActionDist::Point)
    }

    fn observe(&mut self, e: &FollowerHistoryEntry) {
        self.learner(e.a).record(e.b, e.r2);
    }
}

/// Follower action for leader action `a` given the full follower history.
pub fn follower_act(
    base: &BaseSpec,
    inst: &Instance,
    horizon: u64,
    a: usize,
    history: &[FollowerHistoryEntry],
) -> Result<ActionDist> {
    let mut w = PerArm::new(base, inst, horizon)?;
    for e in history {
        w.observe(e);
    }
    w.learner(a).next_arm().map(ActionDist::Point)
}
