//! Cross-player Lipschitz constant of an instance.

use crate::instance::{Instance, Player, DEFAULT_TIE_TOLERANCE};

/// Largest ratio between one player's value difference and the other's over
/// all pairs of distinct outcomes.
///
/// A zero over zero ratio counts as 1 and a nonzero over zero ratio as
/// infinity. An instance with a single outcome has no pairs and returns 0.
pub fn lipschitz_constant(inst: &Instance) -> f64 {
    let tol = DEFAULT_TIE_TOLERANCE;
    let cells: Vec<(f64, f64)> = (0..inst.n_leader())
        .flat_map(|a| (0..inst.n_follower()).map(move |b| (a, b)))
        .map(|(a, b)| (inst.value(Player::Leader, a, b), inst.value(Player::Follower, a, b)))
        .collect();
    let mut sup = 0.0f64;
    for (i, p) in cells.iter().enumerate() {
        for q in &cells[i + 1..] {
            let d1 = (p.0 - q.0).abs();
            let d2 = (p.1 - q.1).abs();
            let ratio = match (d1 <= tol, d2 <= tol) {
                (true, true) => 1.0,
                (false, true) | (true, false) => return f64::INFINITY,
                (false, false) => (d1 / d2).max(d2 / d1),
            };
            sup = sup.max(ratio);
        }
    }
    sup
}
