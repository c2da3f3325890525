//! Grid evaluation of the relaxed benchmarks, written independently of the
//! breakpoint code so the two can check each other.

use super::{BenchmarkKind, BenchmarkParams, BenchmarkReport};
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Evaluates the benchmark objective by direct set construction at
/// `eps in {0, r, 2r, ..} ∪ {gamma} ∪ {follower gaps <= gamma}` and returns
/// the minimum found.
pub fn grid_benchmark_oracle(
    inst: &Instance,
    kind: BenchmarkKind,
    p: &BenchmarkParams,
    resolution: f64,
) -> Result<BenchmarkReport> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidParam(format!("grid resolution must be > 0, got {resolution}")));
    }
    p.validate()?;
    let na = inst.n_leader();
    let nb = inst.n_follower();
    let tol = p.tol;

    if kind == BenchmarkKind::Orig {
        // Brute force over every leader action and every follower reply.
        let mut out = (f64::NEG_INFINITY, 0.0, 0.0);
        for a in 0..na {
            let mut reply = 0;
            for b in 1..nb {
                let (cur2, new2) = (inst.v2(a, reply), inst.v2(a, b));
                if new2 > cur2 + tol || ((new2 - cur2).abs() <= tol && inst.v1(a, b) < inst.v1(a, reply) - tol) {
                    reply = b;
                }
            }
            if inst.v1(a, reply) > out.0 + tol {
                out = (inst.v1(a, reply), inst.v2(a, reply), 0.0);
            }
        }
        return Ok(BenchmarkReport {
            beta1: out.0,
            beta2: out.1,
            eps1_star: 0.0,
            eps2_star: 0.0,
            breakpoints: vec![0.0],
        });
    }

    let (c, d) = match kind {
        BenchmarkKind::Generalized => (p.c, p.d),
        _ => (1.0, 1.0),
    };

    let mut grid = Vec::new();
    let steps = (p.gamma / resolution).floor() as u64;
    for k in 0..=steps {
        grid.push(k as f64 * resolution);
    }
    grid.push(p.gamma);
    for a in 0..na {
        let top = (0..nb).map(|b| inst.v2(a, b)).fold(f64::MIN, f64::max);
        for b in 0..nb {
            let g = top - inst.v2(a, b);
            if g <= p.gamma {
                grid.push(g);
            }
        }
    }
    grid.retain(|&e| e <= p.gamma);
    grid.sort_by(f64::total_cmp);

    let mut best1 = (f64::INFINITY, 0.0);
    let mut best2 = (f64::INFINITY, 0.0);
    for &eps in &grid {
        // Relaxed best responses.
        let mut member = vec![vec![false; nb]; na];
        for a in 0..na {
            let top = (0..nb).map(|b| inst.v2(a, b)).fold(f64::MIN, f64::max);
            for b in 0..nb {
                member[a][b] = top - inst.v2(a, b) <= eps + tol;
            }
        }
        // Worst-case leader value.
        let mut w = f64::MIN;
        for a in 0..na {
            let mut m = f64::MAX;
            for b in 0..nb {
                if member[a][b] && inst.v1(a, b) < m {
                    m = inst.v1(a, b);
                }
            }
            if m > w {
                w = m;
            }
        }
        // Leader actions with any chance.
        let mut chance = vec![false; na];
        for a in 0..na {
            for b in 0..nb {
                if member[a][b] && inst.v1(a, b) + eps + tol >= w {
                    chance[a] = true;
                }
            }
        }

        let (u1, u2) = match kind {
            BenchmarkKind::SelfTolerant => {
                let (mut m1, mut m2) = (f64::MAX, f64::MAX);
                for a in (0..na).filter(|&a| chance[a]) {
                    for b in (0..nb).filter(|&b| member[a][b]) {
                        m1 = m1.min(inst.v1(a, b));
                        m2 = m2.min(inst.v2(a, b));
                    }
                }
                (m1, m2)
            }
            _ => {
                let mut m2 = f64::MAX;
                for a in (0..na).filter(|&a| chance[a]) {
                    let top = (0..nb).map(|b| inst.v2(a, b)).fold(f64::MIN, f64::max);
                    m2 = m2.min(top);
                }
                (w, m2)
            }
        };
        let reg = c * eps.powf(d);
        if u1 + reg < best1.0 {
            best1 = (u1 + reg, eps);
        }
        if u2 + reg < best2.0 {
            best2 = (u2 + reg, eps);
        }
    }

    Ok(BenchmarkReport {
        beta1: best1.0,
        beta2: best2.0,
        eps1_star: best1.1,
        eps2_star: best2.1,
        breakpoints: grid,
    })
}
