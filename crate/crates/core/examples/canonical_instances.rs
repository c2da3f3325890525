//! Every built-in instance family, its documents and its Lipschitz constant.

use stackelberg_dsg::families::FAMILIES;
use stackelberg_dsg::prelude::*;

fn params(family: &str) -> FamilyParams {
    match family {
        "misaligned_inverted" => FamilyParams {
            x: Some(0.2),
            y: Some(0.1),
            ..FamilyParams::default()
        },
        "sqrt_lower" => FamilyParams {
            delta: Some(0.05),
            leaders: Some(3),
            followers: Some(2),
            cell: Some([1, 0]),
            ..FamilyParams::default()
        },
        "table8" => FamilyParams::default(),
        _ => FamilyParams::with_delta(0.05),
    }
}

fn main() -> Result<()> {
    for family in FAMILIES {
        let inst = make_canonical_instance(family, &params(family))?;
        let st = stackelberg(&inst);
        println!(
            "{family:<20} {}x{}  a* = {}  beta_orig = ({:.3}, {:.3})  L* = {}",
            inst.n_leader(),
            inst.n_follower(),
            inst.leader_actions()[st.a_star],
            st.beta1_orig,
            st.beta2_orig,
            lipschitz_constant(&inst)
        );
    }

    // Documents round-trip through JSON.
    let inst = make_canonical_instance("table4_I", &FamilyParams::with_delta(0.02))?;
    let text = inst.to_json();
    assert_eq!(Instance::from_json(&text)?, inst);
    println!("\n{text}");

    // Parameters that push entries outside [0, 1] are rejected.
    let err = make_canonical_instance("table1_I", &FamilyParams::with_delta(1.5)).unwrap_err();
    println!("table1_I with delta 1.5: {err}");
    Ok(())
}
