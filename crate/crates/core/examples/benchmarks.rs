//! Exact relaxed benchmarks for a small game, with the grid cross-check.
//!
//! cargo run --example benchmarks -- 0.05 0.3

use stackelberg_dsg::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>().expect("number"));
    let delta = args.next().unwrap_or(0.05);
    let gamma = args.next().unwrap_or(0.3);

    let inst = make_canonical_instance("table2", &FamilyParams::with_delta(delta))?;
    let st = stackelberg(&inst);
    println!("stackelberg outcome ({}, {}): beta = ({:.4}, {:.4})", st.a_star, st.b_star, st.beta1_orig, st.beta2_orig);

    for kind in BenchmarkKind::ALL {
        let p = match kind {
            BenchmarkKind::Generalized => BenchmarkParams::generalized(gamma, 1.5, 1.0),
            _ => BenchmarkParams::gamma(gamma),
        };
        let exact = benchmark(&inst, kind, &p)?;
        let grid = grid_benchmark_oracle(&inst, kind, &p, 1e-4)?;
        println!(
            "{:<15} beta = ({:.4}, {:.4})  eps* = ({:.3}, {:.3})  grid = ({:.4}, {:.4})",
            kind.name(),
            exact.beta1,
            exact.beta2,
            exact.eps1_star,
            exact.eps2_star,
            grid.beta1,
            grid.beta2
        );
    }
    println!("breakpoints: {:?}", benchmark_breakpoints(&inst, gamma));
    Ok(())
}
