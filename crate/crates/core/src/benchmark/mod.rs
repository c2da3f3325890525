//! Stackelberg and relaxed regret benchmarks.
//!
//! The relaxed benchmarks take an infimum over a tolerance `eps` in
//! `[0, gamma]`. The relaxed utilities are right-continuous step functions
//! of `eps` and the regularizer `c * eps^d` is increasing, so the infimum is
//! attained on a finite candidate set which [`benchmark_breakpoints`]
//! enumerates exactly.

mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Player, DEFAULT_TIE_TOLERANCE};

pub use oracle::grid_benchmark_oracle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkParams {
    pub gamma: f64,
    pub c: f64,
    pub d: f64,
    /// Absolute tolerance for ties and gaps.
    pub tol: f64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            c: 1.0,
            d: 1.0,
            tol: DEFAULT_TIE_TOLERANCE,
        }
    }
}

impl BenchmarkParams {
    pub fn gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn generalized(gamma: f64, c: f64, d: f64) -> Self {
        Self {
            gamma,
            c,
            d,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParam(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParam(format!("c must be a finite value >= 0, got {}", self.c)));
        }
        if !(self.d > 0.0 && self.d <= 1.0) {
            return Err(Error::InvalidParam(format!("d must lie in (0, 1], got {}", self.d)));
        }
        if !(self.tol >= 0.0 && self.tol < 1e-3) {
            return Err(Error::InvalidParam(format!("tolerance {} out of range", self.tol)));
        }
        Ok(())
    }

    /// `c * eps^d`.
    #[inline]
    pub fn regularizer(&self, eps: f64) -> f64 {
        self.c * eps.powf(self.d)
    }

    /// Exponent `2 / (2 + d)` governing the generalized explore lengths.
    pub fn eta(&self) -> f64 {
        2.0 / (2.0 + self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Orig,
    GammaTolerant,
    SelfTolerant,
    Generalized,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 4] = [
        BenchmarkKind::Orig,
        BenchmarkKind::GammaTolerant,
        BenchmarkKind::SelfTolerant,
        BenchmarkKind::Generalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::Orig => "orig",
            BenchmarkKind::GammaTolerant => "gamma_tolerant",
            BenchmarkKind::SelfTolerant => "self_tolerant",
            BenchmarkKind::Generalized => "generalized",
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown benchmark kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub beta1: f64,
    pub beta2: f64,
    pub eps1_star: f64,
    pub eps2_star: f64,
    pub breakpoints: Vec<f64>,
}

impl BenchmarkReport {
    pub fn beta(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.beta1,
            Player::Follower => self.beta2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackelbergResult {
    pub a_star: usize,
    pub b_star: usize,
    pub beta1_orig: f64,
    pub beta2_orig: f64,
}

/// Leader-optimal commitment against an exactly best-responding follower.
/// Leader ties go to the lowest index.
pub fn stackelberg(inst: &Instance) -> StackelbergResult {
    let tol = DEFAULT_TIE_TOLERANCE;
    let mut best: Option<(usize, usize, f64)> = None;
    for a in 0..inst.n_leader() {
        let b = inst.best_response_with_tol(a, tol);
        let value = inst.v1(a, b);
        if best.is_none_or(|(_, _, v)| value > v + tol) {
            best = Some((a, b, value));
        }
    }
    let (a_star, b_star, beta1_orig) = best.expect("instance has a leader action");
    StackelbergResult {
        a_star,
        b_star,
        beta1_orig,
        beta2_orig: inst.v2(a_star, b_star),
    }
}

/// Follower actions within `eps` of the best response value against `a`.
pub fn eps_best_response_set(inst: &Instance, a: usize, eps: f64) -> Result<Vec<usize>> {
    inst.check_leader(a)?;
    Ok(br_set(inst, a, eps, DEFAULT_TIE_TOLERANCE))
}

/// Leader actions that can still reach the worst-case relaxed value `W(eps)`.
pub fn eps_leader_set(inst: &Instance, eps: f64) -> Vec<usize> {
    Relaxation::at(inst, eps, DEFAULT_TIE_TOLERANCE).leaders
}

fn br_set(inst: &Instance, a: usize, eps: f64, tol: f64) -> Vec<usize> {
    let floor = inst.follower_max(a) - eps - tol;
    (0..inst.n_follower()).filter(|&b| inst.v2(a, b) >= floor).collect()
}

/// All sets and summary values of the relaxation at one tolerance.
#[derive(Debug, Clone)]
struct Relaxation {
    br: Vec<Vec<usize>>,
    /// Upper end of the leader's value on `br[a]`.
    upper: Vec<f64>,
    /// `max_a min_{b in br[a]} v1(a, b)`.
    worst_case: f64,
    leaders: Vec<usize>,
}

impl Relaxation {
    fn at(inst: &Instance, eps: f64, tol: f64) -> Self {
        let na = inst.n_leader();
        let br: Vec<Vec<usize>> = (0..na).map(|a| br_set(inst, a, eps, tol)).collect();
        let lower: Vec<f64> = (0..na)
            .map(|a| br[a].iter().map(|&b| inst.v1(a, b)).fold(f64::INFINITY, f64::min))
            .collect();
        let upper: Vec<f64> = (0..na)
            .map(|a| br[a].iter().map(|&b| inst.v1(a, b)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let worst_case = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let leaders = (0..na)
            .filter(|&a| upper[a] >= worst_case - eps - tol)
            .collect();
        Self {
            br,
            upper,
            worst_case,
            leaders,
        }
    }

    fn gamma_tolerant_utility(&self, inst: &Instance, player: Player) -> f64 {
        match player {
            Player::Leader => self.worst_case,
            Player::Follower => self
                .leaders
                .iter()
                .map(|&a| inst.follower_max(a))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn self_tolerant_utility(&self, inst: &Instance, player: Player) -> f64 {
        self.leaders
            .iter()
            .flat_map(|&a| self.br[a].iter().map(move |&b| inst.value(player, a, b)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Candidate tolerances at which the relaxed objective can attain its
/// infimum over `[0, gamma]`: the endpoints, every follower gap in
/// `(0, gamma]`, and the leader-set membership boundaries inside each
/// interval between consecutive gaps.
pub fn benchmark_breakpoints(inst: &Instance, gamma: f64) -> Vec<f64> {
    breakpoints_with_tol(inst, gamma, DEFAULT_TIE_TOLERANCE)
}

fn breakpoints_with_tol(inst: &Instance, gamma: f64, tol: f64) -> Vec<f64> {
    let mut base = vec![0.0, gamma];
    for a in 0..inst.n_leader() {
        let best = inst.follower_max(a);
        for &v in inst.row(Player::Follower, a) {
            let gap = best - v;
            if gap > tol && gap <= gamma {
                base.push(gap);
            }
        }
    }
    sort_dedup(&mut base, tol);

    let mut all = base.clone();
    for w in base.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let rel = Relaxation::at(inst, lo, tol);
        for a in 0..inst.n_leader() {
            let boundary = rel.worst_case - rel.upper[a];
            if boundary > lo + tol && boundary < hi - tol {
                all.push(boundary);
            }
        }
    }
    sort_dedup(&mut all, tol);
    all
}

fn sort_dedup(xs: &mut Vec<f64>, tol: f64) {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|later, earlier| (*later - *earlier).abs() <= tol);
}

/// Minimizes `utility(eps) + regularizer(eps)` over the breakpoints.
/// Ties keep the smallest tolerance.
fn minimize<F>(inst: &Instance, p: &BenchmarkParams, utility: F) -> BenchmarkReport
where
    F: Fn(&Relaxation, Player) -> f64,
{
    let breakpoints = breakpoints_with_tol(inst, p.gamma, p.tol);
    let mut best = [(f64::INFINITY, 0.0); 2];
    for &eps in &breakpoints {
        let rel = Relaxation::at(inst, eps, p.tol);
        for (slot, player) in best.iter_mut().zip(Player::BOTH) {
            let value = utility(&rel, player) + p.regularizer(eps);
            if value < slot.0 {
                *slot = (value, eps);
            }
        }
    }
    BenchmarkReport {
        beta1: best[0].0,
        beta2: best[1].0,
        eps1_star: best[0].1,
        eps2_star: best[1].1,
        breakpoints,
    }
}

/// γ-tolerant benchmarks with regularizer `c * eps^d` taken from `p`.
/// With the default `c = d = 1` this is the plain γ-tolerant benchmark.
pub fn benchmark_gamma_tolerant(inst: &Instance, p: &BenchmarkParams) -> Result<BenchmarkReport> {
    p.validate()?;
    Ok(minimize(inst, p, |rel, player| rel.gamma_tolerant_utility(inst, player)))
}

/// Self-γ-tolerant benchmarks: both players' values are minimized over the
/// relaxed leader set and the relaxed best-response sets.
pub fn benchmark_self_tolerant(inst: &Instance, p: &BenchmarkParams) -> Result<BenchmarkReport> {
    p.validate()?;
    Ok(minimize(inst, p, |rel, player| rel.self_tolerant_utility(inst, player)))
}

/// Generalized `(c, d, gamma)`-tolerant benchmarks.
pub fn benchmark_generalized(inst: &Instance, p: &BenchmarkParams) -> Result<BenchmarkReport> {
    benchmark_gamma_tolerant(inst, p)
}

/// Dispatches on `kind`. `GammaTolerant` and `SelfTolerant` ignore `c` and
/// `d` and use the unit regularizer; `Generalized` honours them.
pub fn benchmark(inst: &Instance, kind: BenchmarkKind, p: &BenchmarkParams) -> Result<BenchmarkReport> {
    let unit = BenchmarkParams {
        c: 1.0,
        d: 1.0,
        ..*p
    };
    match kind {
        BenchmarkKind::Orig => {
            let s = stackelberg(inst);
            Ok(BenchmarkReport {
                beta1: s.beta1_orig,
                beta2: s.beta2_orig,
                eps1_star: 0.0,
                eps2_star: 0.0,
                breakpoints: vec![0.0],
            })
        }
        BenchmarkKind::GammaTolerant => benchmark_gamma_tolerant(inst, &unit),
        BenchmarkKind::SelfTolerant => benchmark_self_tolerant(inst, &unit),
        BenchmarkKind::Generalized => benchmark_generalized(inst, p),
    }
}
