//! Leader policies.
//!
//! Every policy exists in two forms: an incremental struct used by the
//! engine, and a pure `*_act` function that replays a full history. The two
//! agree by construction and the tests check both against naive versions.

mod etc;
mod phased;
mod ucb;

use serde::{Deserialize, Serialize};

pub use etc::{etc_act, etc_throwout_act, Etc, EtcThrowOut};
pub use phased::{compute_active_arms, phased_ucb_act, ActiveArms, PhasedUcb};
pub use ucb::{
    explore_then_ucb_act, lipschitz_ucb_act, lipschitz_ucb_gen_act, ExploreThenUcb, LipschitzUcb, UcbSnapshot,
};

use crate::engine::{InfoStructure, LeaderPolicy};
use crate::error::{Error, Result};
use crate::instance::Instance;

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn four() -> f64 {
    4.0
}

/// Sizes that explore lengths may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub leaders: usize,
    pub followers: usize,
    pub horizon: u64,
}

impl Dims {
    pub fn of(inst: &Instance, horizon: u64) -> Self {
        Self {
            leaders: inst.n_leader(),
            followers: inst.n_follower(),
            horizon,
        }
    }
}

/// Horizon-dependent explore lengths that yield the `T^{2/3}`-type rates.
///
/// With `eta = 2 / (2 + d)` and `ln` the natural log:
/// - `etc_follower`: `(|A||B|)^-eta (ln T)^(1-eta) (cT)^eta`
/// - `etc_leader`: `|A|^-eta (ln T)^(1-eta) (cT)^eta`
/// - `etc_throwout`: `etc_follower * |B|`
/// - `explore_ucb`: `|A|^-eta (|B| ln T)^(1-eta) (cT)^eta`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthRule {
    EtcLeader,
    EtcFollower,
    EtcThrowout,
    ExploreUcb,
}

/// Explore length: a literal count or a rule scaled by a leading constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Fixed(u64),
    Rule {
        rule: LengthRule,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        c: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        d: f64,
    },
}

impl Length {
    pub fn rule(rule: LengthRule) -> Self {
        Length::Rule {
            rule,
            scale: 1.0,
            c: 1.0,
            d: 1.0,
        }
    }

    pub fn resolve(&self, dims: Dims) -> Result<u64> {
        match *self {
            Length::Fixed(n) => Ok(n),
            Length::Rule { rule, scale, c, d } => {
                if !(scale > 0.0 && c > 0.0 && d > 0.0) {
                    return Err(Error::InvalidParam(format!(
                        "length rule needs positive scale, c and d (got {scale}, {c}, {d})"
                    )));
                }
                let eta = 2.0 / (2.0 + d);
                let na = dims.leaders as f64;
                let nb = dims.followers as f64;
                let log_t = (dims.horizon as f64).ln();
                let growth = (c * dims.horizon as f64).powf(eta);
                let raw = match rule {
                    LengthRule::EtcLeader => na.powf(-eta) * log_t.powf(1.0 - eta) * growth,
                    LengthRule::EtcFollower => (na * nb).powf(-eta) * log_t.powf(1.0 - eta) * growth,
                    LengthRule::EtcThrowout => nb * (na * nb).powf(-eta) * log_t.powf(1.0 - eta) * growth,
                    LengthRule::ExploreUcb => na.powf(-eta) * (nb * log_t).powf(1.0 - eta) * growth,
                };
                Ok(((scale * raw).round() as u64).max(1))
            }
        }
    }
}

/// Phase lengths `M_1, M_2, ..`: an explicit list or `ceil(c ln T base^i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Explicit(Vec<u64>),
    Geometric {
        #[serde(default = "one")]
        log_factor: f64,
        #[serde(default = "four")]
        base: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phases: Option<usize>,
    },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Geometric {
            log_factor: 1.0,
            base: 4.0,
            phases: None,
        }
    }
}

impl Schedule {
    /// Concrete phase lengths. Without an explicit phase count the list
    /// runs until one phase is longer than the horizon.
    pub fn resolve(&self, horizon: u64) -> Result<Vec<u64>> {
        let m = match self {
            Schedule::Explicit(m) => m.clone(),
            Schedule::Geometric {
                log_factor,
                base,
                phases,
            } => {
                if !(*log_factor > 0.0 && *base > 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "schedule needs log_factor > 0 and base > 1 (got {log_factor}, {base})"
                    )));
                }
                let log_t = (horizon as f64).ln();
                let mut m: Vec<u64> = Vec::new();
                for i in 1.. {
                    let raw = (log_factor * log_t * base.powi(i)).ceil() as u64;
                    let next = raw.max(m.last().map_or(1, |x| x + 1));
                    m.push(next);
                    match phases {
                        Some(p) if m.len() >= *p => break,
                        None if next > horizon => break,
                        _ => {}
                    }
                }
                m
            }
        };
        if m.is_empty() || m[0] == 0 || m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParam(format!(
                "phase schedule must be positive and strictly increasing, got {m:?}"
            )));
        }
        Ok(m)
    }
}

/// Looks up `M_{phase}` (1-based), extending by a factor 4 when allowed.
pub(crate) fn phase_length(schedule: &mut Vec<u64>, phase: usize, auto_extend: bool) -> Option<u64> {
    while auto_extend && schedule.len() < phase {
        let last = *schedule.last().expect("schedule is non-empty");
        schedule.push(last.saturating_mul(4));
    }
    schedule.get(phase - 1).copied()
}

/// Tagged description of a leader algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeaderSpec {
    /// Round-robin exploration for `E` rounds per arm, then commit.
    Etc {
        #[serde(rename = "E")]
        e: Length,
    },
    /// Round-robin for `E_prime` rounds per arm, forget them, then run [`LeaderSpec::Etc`].
    #[serde(rename = "etc_throwout")]
    EtcThrowOut {
        #[serde(rename = "E")]
        e: Length,
        #[serde(rename = "E_prime")]
        e_prime: Length,
    },
    /// Blocked exploration, then UCB on post-exploration data.
    ExploreThenUcb {
        #[serde(rename = "E")]
        e: Length,
    },
    /// UCB with widths widened by the cross-player Lipschitz constant.
    LipschitzUcb {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    /// Lipschitz UCB with a count-free second width term.
    LipschitzUcbGen {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "C")]
        c: f64,
        c1: f64,
        c3: f64,
    },
    /// Per-pair UCB restricted to the follower's active arms. Needs WeakDSG.
    PhasedUcb {
        #[serde(rename = "M_schedule", default)]
        schedule: Schedule,
        #[serde(default)]
        auto_extend: bool,
    },
}

impl LeaderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LeaderSpec::Etc { .. } => "etc",
            LeaderSpec::EtcThrowOut { .. } => "etc_throwout",
            LeaderSpec::ExploreThenUcb { .. } => "explore_then_ucb",
            LeaderSpec::LipschitzUcb { .. } => "lipschitz_ucb",
            LeaderSpec::LipschitzUcbGen { .. } => "lipschitz_ucb_gen",
            LeaderSpec::PhasedUcb { .. } => "phased_ucb",
        }
    }

    pub fn check_info(&self, info: InfoStructure) -> Result<()> {
        if matches!(self, LeaderSpec::PhasedUcb { .. }) && info == InfoStructure::StrongDsg {
            return Err(Error::IncompatibleInfoStructure(
                "phased_ucb needs to observe follower actions (WeakDSG)".into(),
            ));
        }
        Ok(())
    }

    pub fn build(&self, inst: &Instance, horizon: u64, info: InfoStructure) -> Result<Box<dyn LeaderPolicy>> {
        self.check_info(info)?;
        let dims = Dims::of(inst, horizon);
        let na = inst.n_leader();
        let explore = |e: &Length| -> Result<u64> {
            let e = e.resolve(dims)?;
            if e.saturating_mul(na as u64) > horizon {
                return Err(Error::InvalidParam(format!(
                    "explore length {e} per arm over {na} arms exceeds horizon {horizon}"
                )));
            }
            Ok(e)
        };
        let nonneg = |name: &str, x: f64| -> Result<f64> {
            if x >= 0.0 && x.is_finite() {
                Ok(x)
            } else {
                Err(Error::InvalidParam(format!("{name} must be finite and >= 0, got {x}")))
            }
        };
        Ok(match self {
            LeaderSpec::Etc { e } => Box::new(Etc::new(na, explore(e)?)),
            LeaderSpec::EtcThrowOut { e, e_prime } => {
                let (e, e_prime) = (e.resolve(dims)?, e_prime.resolve(dims)?);
                if (e + e_prime).saturating_mul(na as u64) > horizon {
                    return Err(Error::InvalidParam(format!(
                        "explore lengths {e_prime} + {e} per arm exceed horizon {horizon}"
                    )));
                }
                Box::new(EtcThrowOut::new(na, e, e_prime))
            }
            LeaderSpec::ExploreThenUcb { e } => Box::new(ExploreThenUcb::new(na, explore(e)?, horizon)),
            LeaderSpec::LipschitzUcb { l, c } => Box::new(LipschitzUcb::new(
                na,
                inst.n_follower(),
                horizon,
                nonneg("L", *l)?,
                nonneg("C", *c)?,
                None,
            )),
            LeaderSpec::LipschitzUcbGen { l, c, c1, c3 } => {
                if !(*c1 > 0.0 && *c1 < 1.0 && *c3 > 0.0) {
                    return Err(Error::InvalidParam(format!("need c1 in (0, 1) and c3 > 0, got {c1}, {c3}")));
                }
                Box::new(LipschitzUcb::new(
                    na,
                    inst.n_follower(),
                    horizon,
                    nonneg("L", *l)?,
                    nonneg("C", *c)?,
                    Some((*c1, *c3)),
                ))
            }
            LeaderSpec::PhasedUcb { schedule, auto_extend } => Box::new(PhasedUcb::new(
                na,
                inst.n_follower(),
                horizon,
                schedule.resolve(horizon)?,
                *auto_extend,
            )),
        })
    }
}

/// Running per-arm counts and reward sums.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ArmStats {
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
}

impl ArmStats {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: vec![0; arms],
            sums: vec![0.0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn first_unpulled(&self) -> Option<usize> {
        self.counts.iter().position(|&n| n == 0)
    }

    #[inline]
    pub fn add(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward;
    }

    #[inline]
    pub fn mean(&self, arm: usize) -> f64 {
        self.sums[arm] / self.counts[arm] as f64
    }

    /// `min(1, mean + width(n))`, or 1 for an unpulled arm.
    #[inline]
    pub fn ucb(&self, arm: usize, width: impl Fn(u64) -> f64) -> f64 {
        match self.counts[arm] {
            0 => 1.0,
            n => (self.mean(arm) + width(n)).min(1.0),
        }
    }

    /// Arm with the largest mean, lowest index on ties.
    pub fn best_mean(&self) -> Result<usize> {
        let mut best = None::<(usize, f64)>;
        for arm in 0..self.counts.len() {
            if self.counts[arm] == 0 {
                return Err(Error::EmptyHistoryArm(arm));
            }
            let m = self.mean(arm);
            if best.is_none_or(|(_, v)| m > v) {
                best = Some((arm, m));
            }
        }
        Ok(best.expect("at least one arm").0)
    }
}

/// First index attaining the maximum.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_canonical_instance, FamilyParams};

    #[test]
    fn spec_parses_from_config_text() {
        let spec: LeaderSpec = serde_json::from_str(r#"{"kind": "explore_then_ucb", "E": 120}"#).unwrap();
        assert_eq!(spec, LeaderSpec::ExploreThenUcb { e: Length::Fixed(120) });
        let spec: LeaderSpec =
            serde_json::from_str(r#"{"kind": "phased_ucb", "M_schedule": {"log_factor": 1.0, "base": 4, "phases": 3}}"#)
                .unwrap();
        let LeaderSpec::PhasedUcb { schedule, .. } = &spec else { panic!() };
        assert_eq!(schedule.resolve(10_000).unwrap(), vec![37, 148, 590]);
        let spec: LeaderSpec = serde_json::from_str(r#"{"kind": "phased_ucb", "M_schedule": [4, 16]}"#).unwrap();
        assert!(matches!(spec, LeaderSpec::PhasedUcb { schedule: Schedule::Explicit(_), .. }));
        let spec: LeaderSpec =
            serde_json::from_str(r#"{"kind": "etc_throwout", "E": {"rule": "etc_leader"}, "E_prime": {"rule": "etc_throwout", "scale": 2.0}}"#)
                .unwrap();
        let back: LeaderSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);
        assert!(serde_json::from_str::<LeaderSpec>(r#"{"kind": "thompson"}"#).is_err());
    }

    #[test]
    fn length_rules() {
        let dims = Dims {
            leaders: 2,
            followers: 2,
            horizon: 1 << 12,
        };
        let t = 4096f64;
        let expect = |x: f64| x.round() as u64;
        let base = t.ln().powf(1.0 / 3.0) * t.powf(2.0 / 3.0);
        assert_eq!(Length::rule(LengthRule::EtcLeader).resolve(dims).unwrap(), expect(2f64.powf(-2.0 / 3.0) * base));
        assert_eq!(Length::rule(LengthRule::EtcFollower).resolve(dims).unwrap(), expect(4f64.powf(-2.0 / 3.0) * base));
        assert_eq!(
            Length::rule(LengthRule::ExploreUcb).resolve(dims).unwrap(),
            expect(2f64.powf(-2.0 / 3.0) * (2.0 * t.ln()).powf(1.0 / 3.0) * t.powf(2.0 / 3.0))
        );
        assert_eq!(Length::Fixed(7).resolve(dims).unwrap(), 7);
    }

    #[test]
    fn default_schedule_outgrows_the_horizon() {
        let m = Schedule::default().resolve(1 << 16).unwrap();
        assert!(*m.last().unwrap() > 1 << 16);
        assert_eq!(m[0], (4.0 * (65536f64).ln()).ceil() as u64);
        assert!(Schedule::Explicit(vec![4, 4]).resolve(10).is_err());
        assert!(Schedule::Explicit(vec![]).resolve(10).is_err());
    }

    #[test]
    fn build_checks() {
        let inst = make_canonical_instance("table2", &FamilyParams::with_delta(0.1)).unwrap();
        let phased = LeaderSpec::PhasedUcb {
            schedule: Schedule::default(),
            auto_extend: false,
        };
        assert!(matches!(
            phased.build(&inst, 100, InfoStructure::StrongDsg),
            Err(Error::IncompatibleInfoStructure(_))
        ));
        assert!(phased.build(&inst, 100, InfoStructure::WeakDsg).is_ok());
        assert!(LeaderSpec::Etc { e: Length::Fixed(60) }
            .build(&inst, 100, InfoStructure::StrongDsg)
            .is_err());
    }
}
