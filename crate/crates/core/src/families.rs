//! Generators for the canonical hand-built instances and hard-instance
//! families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{default_labels, Instance};

pub const FAMILIES: [&str; 11] = [
    "table1_I",
    "table1_Itilde",
    "table2",
    "table3",
    "table4_I",
    "table4_Itilde",
    "table5",
    "table8",
    "misaligned_inverted",
    "sqrt_lower",
    "dlower",
];

/// Parameters shared by the families. Each family reads only the fields it
/// needs. Action indices are 0-based.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    /// Number of leader actions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaders: Option<usize>,
    /// Number of follower actions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub followers: Option<usize>,
    /// Perturbed outcome `[a, b]` for `sqrt_lower`; absent means the base member.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<[usize; 2]>,
    /// Perturbed follower column for `dlower`; absent or 0 means the base member.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<usize>,
}

impl FamilyParams {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta: Some(delta),
            ..Self::default()
        }
    }

    fn need(value: Option<f64>, name: &str, family: &str) -> Result<f64> {
        value.ok_or_else(|| Error::InvalidParam(format!("{family} needs parameter {name}")))
    }

    fn need_size(value: Option<usize>, name: &str, family: &str, min: usize) -> Result<usize> {
        let n = value.ok_or_else(|| Error::InvalidParam(format!("{family} needs parameter {name}")))?;
        if n < min {
            return Err(Error::InvalidParam(format!("{family} needs {name} >= {min}, got {n}")));
        }
        Ok(n)
    }
}

fn positive(delta: f64, family: &str) -> Result<f64> {
    if delta > 0.0 && delta.is_finite() {
        Ok(delta)
    } else {
        Err(Error::InvalidParam(format!("{family} needs delta > 0, got {delta}")))
    }
}

/// Builds the named instance. Entries leaving `[0, 1]` surface as
/// [`Error::InvalidParam`].
pub fn make_canonical_instance(family: &str, params: &FamilyParams) -> Result<Instance> {
    let delta = || positive(FamilyParams::need(params.delta, "delta", family)?, family);
    let built = match family {
        "table1_I" | "table1_Itilde" => {
            let d = delta()?;
            let tilde = if family == "table1_Itilde" { 2.0 * d } else { 0.0 };
            Instance::from_matrices(
                vec![vec![0.6, 0.2], vec![0.5, 0.4]],
                vec![vec![d, tilde], vec![0.6, 0.4]],
            )
        }
        "table2" => {
            let d = delta()?;
            Instance::from_matrices(
                vec![vec![0.5 + d, 0.2], vec![0.5, 0.4]],
                vec![vec![0.4, 0.0], vec![3.0 * d, 2.0 * d]],
            )
        }
        "table3" => Instance::from_matrices(
            vec![vec![0.6, 0.2], vec![0.5, 0.4]],
            vec![vec![0.4, 0.0], vec![0.3, 0.2]],
        ),
        "table4_I" | "table4_Itilde" => {
            let d = delta()?;
            let second = if family == "table4_Itilde" { 2.0 * d } else { 0.0 };
            Instance::from_matrices(
                vec![vec![0.5 + d, 0.0], vec![0.5, 0.5]],
                vec![vec![d, second], vec![3.0 * d, 3.0 * d]],
            )
        }
        "table5" => {
            let d = delta()?;
            Instance::new_unbounded(
                default_labels('a', 3),
                default_labels('b', 3),
                vec![vec![1.0, 0.7, 1.1], vec![0.8, 1.2, 0.9], vec![0.5, 0.7, 2.0]],
                vec![
                    vec![0.5 + 2.0 * d, 0.5 + d, 0.0],
                    vec![3.5 * d, 3.0 * d, 4.0 * d],
                    vec![0.5, 0.0, 0.1],
                ],
            )
        }
        "table8" => Instance::from_matrices(
            vec![vec![0.6, 0.2], vec![0.5, 0.4]],
            vec![vec![0.05, 0.1], vec![0.2, 0.15]],
        ),
        "misaligned_inverted" => {
            let x = FamilyParams::need(params.x, "x", family)?;
            let y = FamilyParams::need(params.y, "y", family)?;
            for (name, v) in [("x", x), ("y", y)] {
                if !(v > 0.0 && v < 1.0 / 3.0) {
                    return Err(Error::InvalidParam(format!("{family} needs {name} in (0, 1/3), got {v}")));
                }
            }
            Instance::from_matrices(
                vec![vec![1.0, 1.0 - x], vec![1.0 - 2.0 * x, 1.0 - 3.0 * x]],
                vec![vec![0.0, y], vec![2.0 * y, 3.0 * y]],
            )
        }
        "sqrt_lower" => {
            let d = delta()?;
            let na = FamilyParams::need_size(params.leaders, "leaders", family, 2)?;
            let nb = FamilyParams::need_size(params.followers, "followers", family, 1)?;
            let mut m = vec![vec![0.0; nb]; na];
            m[0] = vec![d; nb];
            match params.cell {
                None | Some([0, 0]) => {}
                Some([a, b]) if a >= 1 && a < na && b < nb => m[a][b] = 2.0 * d,
                Some(cell) => {
                    return Err(Error::InvalidParam(format!(
                        "{family} cell {cell:?} must name a non-first leader row inside {na}x{nb}"
                    )))
                }
            }
            Instance::from_matrices(m.clone(), m)
        }
        "dlower" => {
            let d = delta()?;
            let na = FamilyParams::need_size(params.leaders.or(Some(2)), "leaders", family, 2)?;
            let nb = FamilyParams::need_size(params.followers.or(Some(2)), "followers", family, 2)?;
            let b_prime = params.b_prime.unwrap_or(0);
            if b_prime >= nb {
                return Err(Error::InvalidParam(format!("{family} b_prime {b_prime} outside {nb} follower actions")));
            }
            let mut v1 = vec![vec![0.0; nb]; na];
            let mut v2 = vec![vec![0.0; nb]; na];
            v1[0] = vec![0.5; nb];
            v2[0] = vec![3.0 * d; nb];
            for a in 1..na {
                v1[a][0] = 0.5 + d;
                v2[a][0] = d;
                if b_prime != 0 {
                    v2[a][b_prime] = 2.0 * d;
                }
            }
            Instance::from_matrices(v1, v2)
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    built.map_err(|e| match e {
        Error::ValueOutOfRange { .. } => Error::InvalidParam(format!("{family} with {params:?}: {e}")),
        other => other,
    })
}
