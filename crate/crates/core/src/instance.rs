//! Finite two-player game instances.
//!
//! An [`Instance`] holds the leader action set, the follower action set and
//! the two mean-reward matrices. Matrices are stored row-major with the
//! leader action as the outer index, matching how the canonical tables are
//! laid out.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used to classify ties and gaps between mean rewards.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Leader,
    Follower,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Leader, Player::Follower];

    /// 1 for the leader, 2 for the follower.
    pub fn number(self) -> u8 {
        match self {
            Player::Leader => 1,
            Player::Follower => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Leader => f.write_str("leader"),
            Player::Follower => f.write_str("follower"),
        }
    }
}

/// On-disk layout of an instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub leader_actions: Vec<String>,
    pub follower_actions: Vec<String>,
    pub v1: Vec<Vec<f64>>,
    pub v2: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct Instance {
    leader_actions: Vec<String>,
    follower_actions: Vec<String>,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

impl Instance {
    /// Builds a checked instance: both matrices must be `|A| x |B|` with
    /// every entry in `[0, 1]`.
    pub fn new(
        leader_actions: Vec<String>,
        follower_actions: Vec<String>,
        v1: Vec<Vec<f64>>,
        v2: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let inst = Self::new_unbounded(leader_actions, follower_actions, v1, v2)?;
        for player in Player::BOTH {
            for a in 0..inst.n_leader() {
                for b in 0..inst.n_follower() {
                    let value = inst.value(player, a, b);
                    if !(0.0..=1.0).contains(&value) {
                        return Err(Error::ValueOutOfRange {
                            player,
                            leader: inst.leader_actions[a].clone(),
                            follower: inst.follower_actions[b].clone(),
                            value,
                        });
                    }
                }
            }
        }
        Ok(inst)
    }

    /// Like [`Instance::new`] but only requires finite entries.
    ///
    /// Some illustrative tables use utilities above 1; the benchmark
    /// mathematics does not depend on the `[0, 1]` range.
    pub fn new_unbounded(
        leader_actions: Vec<String>,
        follower_actions: Vec<String>,
        v1: Vec<Vec<f64>>,
        v2: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let (na, nb) = (leader_actions.len(), follower_actions.len());
        if na == 0 || nb == 0 {
            return Err(Error::DimensionMismatch(format!(
                "need at least one action per player, got |A|={na}, |B|={nb}"
            )));
        }
        let flat_v1 = flatten("v1", v1, na, nb)?;
        let flat_v2 = flatten("v2", v2, na, nb)?;
        if let Some(x) = flat_v1.iter().chain(&flat_v2).find(|x| !x.is_finite()) {
            return Err(Error::InvalidParam(format!("non-finite mean reward {x}")));
        }
        Ok(Self {
            leader_actions,
            follower_actions,
            v1: flat_v1,
            v2: flat_v2,
        })
    }

    /// Builds an instance with default labels `a1.. / b1..`.
    pub fn from_matrices(v1: Vec<Vec<f64>>, v2: Vec<Vec<f64>>) -> Result<Self> {
        let na = v1.len();
        let nb = v1.first().map_or(0, Vec::len);
        Self::new(default_labels('a', na), default_labels('b', nb), v1, v2)
    }

    pub fn n_leader(&self) -> usize {
        self.leader_actions.len()
    }

    pub fn n_follower(&self) -> usize {
        self.follower_actions.len()
    }

    pub fn leader_actions(&self) -> &[String] {
        &self.leader_actions
    }

    pub fn follower_actions(&self) -> &[String] {
        &self.follower_actions
    }

    #[inline]
    pub fn v1(&self, a: usize, b: usize) -> f64 {
        self.v1[a * self.n_follower() + b]
    }

    #[inline]
    pub fn v2(&self, a: usize, b: usize) -> f64 {
        self.v2[a * self.n_follower() + b]
    }

    #[inline]
    pub fn value(&self, player: Player, a: usize, b: usize) -> f64 {
        match player {
            Player::Leader => self.v1(a, b),
            Player::Follower => self.v2(a, b),
        }
    }

    /// Row `a` of the given player's matrix.
    pub fn row(&self, player: Player, a: usize) -> &[f64] {
        let nb = self.n_follower();
        let m = match player {
            Player::Leader => &self.v1,
            Player::Follower => &self.v2,
        };
        &m[a * nb..(a + 1) * nb]
    }

    /// Best follower value against leader action `a`.
    pub fn follower_max(&self, a: usize) -> f64 {
        self.row(Player::Follower, a)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn leader_index(&self, name: &str) -> Result<usize> {
        self.leader_actions
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn follower_index(&self, name: &str) -> Result<usize> {
        self.follower_actions
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub(crate) fn check_leader(&self, a: usize) -> Result<()> {
        if a < self.n_leader() {
            Ok(())
        } else {
            Err(Error::UnknownAction(format!(
                "leader action index {a} (|A| = {})",
                self.n_leader()
            )))
        }
    }

    /// Follower best response to `a`: maximize `v2(a, .)`, break follower
    /// ties toward the lowest leader utility, then toward the lowest index.
    pub fn best_response(&self, a: usize) -> Result<usize> {
        self.check_leader(a)?;
        Ok(self.best_response_with_tol(a, DEFAULT_TIE_TOLERANCE))
    }

    pub(crate) fn best_response_with_tol(&self, a: usize, tol: f64) -> usize {
        let best = self.follower_max(a);
        let mut choice = None::<usize>;
        for b in 0..self.n_follower() {
            if self.v2(a, b) < best - tol {
                continue;
            }
            choice = match choice {
                Some(c) if self.v1(a, c) <= self.v1(a, b) + tol => Some(c),
                _ => Some(b),
            };
        }
        choice.expect("at least one follower action attains the maximum")
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let nb = self.n_follower();
        let unflatten = |m: &[f64]| m.chunks(nb).map(<[f64]>::to_vec).collect();
        InstanceDoc {
            leader_actions: self.leader_actions.clone(),
            follower_actions: self.follower_actions.clone(),
            v1: unflatten(&self.v1),
            v2: unflatten(&self.v2),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|source| Error::Parse {
            origin: "instance".into(),
            source,
        })?;
        Self::try_from(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: InstanceDoc = serde_json::from_str(&text).map_err(|source| Error::Parse {
            origin: path.display().to_string(),
            source,
        })?;
        Self::try_from(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        Instance::new(doc.leader_actions, doc.follower_actions, doc.v1, doc.v2)
    }
}

impl From<Instance> for InstanceDoc {
    fn from(inst: Instance) -> Self {
        inst.to_doc()
    }
}

pub(crate) fn default_labels(prefix: char, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn flatten(name: &str, m: Vec<Vec<f64>>, na: usize, nb: usize) -> Result<Vec<f64>> {
    if m.len() != na {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected |A| = {na}",
            m.len()
        )));
    }
    let mut flat = Vec::with_capacity(na * nb);
    for (i, row) in m.into_iter().enumerate() {
        if row.len() != nb {
            return Err(Error::DimensionMismatch(format!(
                "{name} row {i} has {} entries, expected |B| = {nb}",
                row.len()
            )));
        }
        flat.extend(row);
    }
    Ok(flat)
}
