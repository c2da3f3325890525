//! Regret, follower guarantee checks and scaling-exponent fits.

use serde::{Deserialize, Serialize};

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::instance::{Instance, Player};

/// `beta * T - sum_t v_player(a_t, b_t)` using mean rewards.
pub fn pseudo_regret(trace: &RunTrace, beta: f64, player: Player) -> f64 {
    let earned: f64 = trace.rounds.iter().map(|r| r.mean(player)).sum();
    beta * trace.horizon() as f64 - earned
}

/// Like [`pseudo_regret`] but with the realized noisy rewards.
pub fn sampled_regret(trace: &RunTrace, beta: f64, player: Player) -> f64 {
    let earned: f64 = trace
        .rounds
        .iter()
        .map(|r| match player {
            Player::Leader => r.r1,
            Player::Follower => r.r2,
        })
        .sum();
    beta * trace.horizon() as f64 - earned
}

/// Powers of two up to `horizon`, plus `horizon` itself.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&t| t <= horizon).collect();
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

/// Pseudo-regret of every prefix ending at one of `at` (sorted, each <= T).
pub fn regret_curve(trace: &RunTrace, beta: f64, player: Player, at: &[u64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(at.len());
    let mut earned = 0.0;
    let mut next = at.iter().peekable();
    for (i, r) in trace.rounds.iter().enumerate() {
        earned += r.mean(player);
        let t = i as u64 + 1;
        while next.peek() == Some(&&t) {
            out.push(beta * t as f64 - earned);
            next.next();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
}

pub fn mean_stderr(xs: &[f64]) -> MeanStd {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let stderr = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    MeanStd { mean, stderr }
}

/// Bound `g(t, T, |B|)` or `h(t, T, |B|)` on follower suboptimality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BoundSpec {
    Constant {
        value: f64,
    },
    /// `coef * t^t_exp * |B|^arms_exp * (ln T)^log_exp`.
    Power {
        coef: f64,
        t_exp: f64,
        #[serde(default)]
        arms_exp: f64,
        #[serde(default)]
        log_exp: f64,
    },
    /// `head` for `t <= until`, `tail` afterwards.
    Piecewise {
        until: u64,
        head: Box<BoundSpec>,
        tail: Box<BoundSpec>,
    },
    Sum {
        terms: Vec<BoundSpec>,
    },
    /// `inner` evaluated at the fixed count `at`.
    Frozen {
        at: u64,
        inner: Box<BoundSpec>,
    },
    /// Exact `sum_{s <= t} inner(s)`.
    PrefixSum {
        inner: Box<BoundSpec>,
    },
}

impl BoundSpec {
    pub fn constant(value: f64) -> Self {
        BoundSpec::Constant { value }
    }

    /// `coef * sqrt(|B| ln T / t)`.
    pub fn sqrt_instantaneous(coef: f64) -> Self {
        BoundSpec::Power {
            coef,
            t_exp: -0.5,
            arms_exp: 0.5,
            log_exp: 0.5,
        }
    }

    /// `coef * sqrt(|B| t ln T)`.
    pub fn sqrt_anytime(coef: f64) -> Self {
        BoundSpec::Power {
            coef,
            t_exp: 0.5,
            arms_exp: 0.5,
            log_exp: 0.5,
        }
    }

    pub fn eval(&self, t: u64, horizon: u64, arms: usize) -> f64 {
        match self {
            BoundSpec::Constant { value } => *value,
            BoundSpec::Power {
                coef,
                t_exp,
                arms_exp,
                log_exp,
            } => {
                coef * (t as f64).powf(*t_exp)
                    * (arms as f64).powf(*arms_exp)
                    * (horizon as f64).ln().powf(*log_exp)
            }
            BoundSpec::Piecewise { until, head, tail } => {
                if t <= *until {
                    head.eval(t, horizon, arms)
                } else {
                    tail.eval(t, horizon, arms)
                }
            }
            BoundSpec::Sum { terms } => terms.iter().map(|b| b.eval(t, horizon, arms)).sum(),
            BoundSpec::Frozen { at, inner } => inner.eval(*at, horizon, arms),
            BoundSpec::PrefixSum { inner } => (1..=t).map(|s| inner.eval(s, horizon, arms)).sum(),
        }
    }

    /// `Some(g)` with the `t`-free part when the bound does not depend on `t`.
    fn flat_part(&self) -> Option<BoundSpec> {
        match self {
            BoundSpec::Constant { .. } => Some(self.clone()),
            BoundSpec::Power { t_exp, .. } if *t_exp == 0.0 => Some(self.clone()),
            _ => None,
        }
    }
}

/// Multiplies a `t`-free bound by `t^1`, optionally scaled.
fn times_t(flat: &BoundSpec, scale: f64, t_exp: f64) -> BoundSpec {
    match flat {
        BoundSpec::Constant { value } => BoundSpec::Power {
            coef: value * scale,
            t_exp,
            arms_exp: 0.0,
            log_exp: 0.0,
        },
        BoundSpec::Power {
            coef,
            arms_exp,
            log_exp,
            ..
        } => BoundSpec::Power {
            coef: coef * scale,
            t_exp,
            arms_exp: *arms_exp,
            log_exp: *log_exp,
        },
        _ => unreachable!("only flat bounds are scaled"),
    }
}

/// Anytime bound `h(t) >= sum_{s <= t} g(s)` from an instantaneous bound.
///
/// Closed forms: a constant `c` gives `c t`; `c t^-p` with `p` in `(0, 1)`
/// gives `c t^(1-p) / (1-p) + c`; a piecewise bound with a constant tail
/// `eps` after `E` gives `h_head(E) + eps (t - E)`. Anything else falls back
/// to the exact prefix sum.
pub fn instantaneous_to_anytime(g: &BoundSpec) -> BoundSpec {
    if let Some(flat) = g.flat_part() {
        return times_t(&flat, 1.0, 1.0);
    }
    match g {
        BoundSpec::Power { coef, t_exp, arms_exp, log_exp } if *t_exp < 0.0 && *t_exp > -1.0 => {
            let q = 1.0 + t_exp;
            BoundSpec::Sum {
                terms: vec![
                    BoundSpec::Power {
                        coef: coef / q,
                        t_exp: q,
                        arms_exp: *arms_exp,
                        log_exp: *log_exp,
                    },
                    BoundSpec::Power {
                        coef: *coef,
                        t_exp: 0.0,
                        arms_exp: *arms_exp,
                        log_exp: *log_exp,
                    },
                ],
            }
        }
        BoundSpec::Piecewise { until, head, tail } => {
            let head_h = instantaneous_to_anytime(head);
            let frozen = BoundSpec::Frozen {
                at: *until,
                inner: Box::new(head_h.clone()),
            };
            let tail_h = match tail.flat_part() {
                Some(flat) => BoundSpec::Sum {
                    terms: vec![frozen, times_t(&flat, 1.0, 1.0), times_t(&flat, -(*until as f64), 0.0)],
                },
                // Summing the tail from 1 rather than from `until + 1` only
                // loosens the bound.
                None => BoundSpec::Sum {
                    terms: vec![frozen, instantaneous_to_anytime(tail)],
                },
            };
            BoundSpec::Piecewise {
                until: *until,
                head: Box::new(head_h),
                tail: Box::new(tail_h),
            }
        }
        BoundSpec::Sum { terms } => BoundSpec::Sum {
            terms: terms.iter().map(instantaneous_to_anytime).collect(),
        },
        other => BoundSpec::PrefixSum {
            inner: Box::new(other.clone()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violations {
    pub count: u64,
    pub rounds: u64,
    pub rate: f64,
    /// First violating round, 1-based.
    pub first: Option<u64>,
}

impl Violations {
    fn new(count: u64, rounds: u64, first: Option<u64>) -> Self {
        Self {
            count,
            rounds,
            rate: if rounds == 0 { 0.0 } else { count as f64 / rounds as f64 },
            first,
        }
    }
}

/// Rounds where `v2(a_t, b_t) < max_b v2(a_t, b) - g(n_{a_t}(t+1), T, |B|)`,
/// with `n_a(t+1)` counting the current pull.
pub fn instantaneous_violations(trace: &RunTrace, inst: &Instance, g: &BoundSpec) -> Violations {
    let horizon = trace.horizon();
    let nb = inst.n_follower();
    let best: Vec<f64> = (0..inst.n_leader()).map(|a| inst.follower_max(a)).collect();
    let mut pulls = vec![0u64; inst.n_leader()];
    let (mut count, mut first) = (0, None);
    for r in &trace.rounds {
        pulls[r.a] += 1;
        if inst.v2(r.a, r.b) < best[r.a] - g.eval(pulls[r.a], horizon, nb) {
            count += 1;
            first.get_or_insert(r.t);
        }
    }
    Violations::new(count, horizon, first)
}

/// Rounds where the follower's cumulative suboptimality on the current
/// leader action exceeds `h(n_{a_t}(t+1), T, |B|)`. Only the action played
/// in a round is checked since the other actions' totals do not move.
pub fn anytime_violations(trace: &RunTrace, inst: &Instance, h: &BoundSpec) -> Violations {
    let horizon = trace.horizon();
    let nb = inst.n_follower();
    let best: Vec<f64> = (0..inst.n_leader()).map(|a| inst.follower_max(a)).collect();
    let mut pulls = vec![0u64; inst.n_leader()];
    let mut lost = vec![0.0; inst.n_leader()];
    let (mut count, mut first) = (0, None);
    for r in &trace.rounds {
        pulls[r.a] += 1;
        lost[r.a] += best[r.a] - inst.v2(r.a, r.b);
        if lost[r.a] > h.eval(pulls[r.a], horizon, nb) {
            count += 1;
            first.get_or_insert(r.t);
        }
    }
    Violations::new(count, horizon, first)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log-space residuals.
    pub residual: f64,
    /// Standard error of the slope; zero with exactly two degrees of freedom lost.
    pub stderr: f64,
    pub used: usize,
    pub dropped: usize,
}

/// Least squares fit of `ln R = slope * ln T + intercept`. Non-positive
/// regrets are dropped with a warning.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(t, r)| {
            let ok = r > 0.0 && t > 0.0;
            if !ok {
                log::warn!("dropping non-positive regret point T={t}, R={r}");
            }
            ok
        })
        .map(|&(t, r)| (t.ln(), r.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(Error::NotEnoughPoints(kept.len()));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParam("all horizons are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = kept.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
        stderr: (sse / (n - 2.0) / sxx).sqrt(),
        used: kept.len(),
        dropped: points.len() - kept.len(),
    })
}
