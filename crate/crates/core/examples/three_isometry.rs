//! A unilateral weighted shift that is a 3-isometry but not a 2-isometry,
//! with a Cauchy dual that fails the Agler–Embry positivity test.

use std::sync::Arc;

use cauchy_dual::oracle::{defect_entry, truncate};
use cauchy_dual::shift::{build_shift, WeightSpec};
use cauchy_dual::subnormality::{dual_subnormality, SubnormalityOptions};
use cauchy_dual::tree::TreeSpec;

fn main() -> cauchy_dual::Result<()> {
    let s = build_shift(&WeightSpec::Treiso {}, Arc::new(TreeSpec::path(32).materialize()?))?;
    let op = truncate(&s);
    for m in 1..=3 {
        println!("interior ‖B_{m}(T)‖ = {:.3e}", op.defect_interior_norm(m)?);
    }
    let dual = op.dual_matrix()?;
    for m in 1..=4 {
        println!("⟨B_{m}(T′)e_0, e_0⟩ = {:.12}", defect_entry(&dual, m, "g0:0")?);
    }
    let opts = SubnormalityOptions {
        require_two_isometry: false,
        ..SubnormalityOptions::default()
    };
    println!("{}", dual_subnormality(&s, &opts)?.summary);
    Ok(())
}
