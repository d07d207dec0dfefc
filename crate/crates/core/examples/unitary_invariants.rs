//! Root norm and generation branching degrees decide unitary equivalence of
//! 2-isometric shifts with the kernel condition, even across non-isomorphic
//! trees. Diagonal operator weights split into scalar 2-isometric shifts.

use std::sync::Arc;

use cauchy_dual::oracle::{ovws_from_atoms, DiscreteSpectralAtoms};
use cauchy_dual::shift::{are_unitarily_equivalent, build_shift, shift_invariants, WeightSpec, DEFAULT_TOL};
use cauchy_dual::tree::TreeSpec;

fn main() -> cauchy_dual::Result<()> {
    let inv = |degrees: Vec<Vec<usize>>, x: f64| {
        let tree = Arc::new(TreeSpec::generation_rule(degrees, 10).materialize()?);
        shift_invariants(&build_shift(&WeightSpec::kernel_condition(x), tree)?, DEFAULT_TOL)
    };
    let a = inv(vec![vec![2], vec![3, 1]], 1.2)?;
    let b = inv(vec![vec![2], vec![2, 2]], 1.2)?;
    let c = inv(vec![vec![2], vec![2, 2]], 1.3)?;
    println!("root norm {:.4}, branching {:?}", a.root_norm, &a.branching[..3]);
    println!("degrees 3,1 vs 2,2 at x = 1.2: {}", are_unitarily_equivalent(&a, &b)?);
    println!("x = 1.2 vs x = 1.3: {}", are_unitarily_equivalent(&a, &c)?);

    let atoms = DiscreteSpectralAtoms::new(vec![(2f64.sqrt(), 1), (1.2, 2)])?;
    let (op, dec) = ovws_from_atoms(&atoms, 12)?;
    println!(
        "operator weight on {} basis vectors, ‖B_2‖ = {:.1e}",
        op.dim(),
        op.defect_interior_norm(2)?
    );
    for s in &dec.summands {
        println!("  S_[{:.4}] × {}", s.first_weight, s.multiplicity);
    }
    Ok(())
}
